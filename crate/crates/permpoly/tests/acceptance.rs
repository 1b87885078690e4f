//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured runtime (run with `-- --nocapture` to see them). Every
//! tolerance is zero-failure; any disagreement fails the build.

use std::time::Instant;

use permpoly::arith::gcd;
use permpoly::{
    candidate_polynomial, construct_product, construct_quotient, construct_s2,
    is_permutation_bruteforce, make_field, mu_criterion, smallest_valid_r, transfer_check,
    trinomial_seed, Branch, Error, FieldRef, Finding, MuGroup, MultiplierSpec, Polynomial,
    S2Branch, SearchConfig, SeedParams, SeedVariant,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Dense-random polynomial of degree <= max_deg (each coefficient uniform,
/// zeros dropped by the constructor).
fn random_poly(field: &FieldRef, max_deg: u64, rng: &mut StdRng) -> Polynomial {
    let mut pairs = Vec::new();
    for e in 0..=max_deg {
        let idx = rng.random_range(0..field.order());
        if idx != 0 {
            pairs.push((e, idx));
        }
    }
    Polynomial::from_indexed_terms(field, &pairs).unwrap()
}

#[test]
fn a1_subgroup_criterion_matches_oracle() {
    let start = Instant::now();
    let mut samples = 0u64;
    for (p, k) in [
        (2u64, 1usize),
        (3, 1),
        (2, 2),
        (5, 1),
        (7, 1),
        (2, 3),
        (3, 2),
    ] {
        let field = make_field(p, 2 * k).unwrap();
        let q = field.q().unwrap();
        let mu = MuGroup::enumerate(&field).unwrap();
        let mut rng = StdRng::seed_from_u64(0xACC1 + q);
        for _ in 0..500 {
            let r = rng.random_range(1..=2 * q * q);
            let a = random_poly(&field, q + 2, &mut rng);
            let criterion = mu_criterion(r as i64, &a, &mu).unwrap();
            let oracle = is_permutation_bruteforce(&candidate_polynomial(r, &a).unwrap()).unwrap();
            assert_eq!(criterion, oracle, "q={q} r={r} A={a}");
            samples += 1;
        }
    }
    println!(
        "ACCEPTANCE 1 (subgroup criterion = oracle, {} samples): PASS in {:.2?}",
        samples,
        start.elapsed()
    );
}

#[test]
fn a2_multiplier_transfer_iff() {
    let start = Instant::now();
    let mut samples = 0u64;
    for (p, k) in [(2u64, 1usize), (3, 1), (2, 2), (5, 1), (2, 3)] {
        let field = make_field(p, 2 * k).unwrap();
        let q = field.q().unwrap();
        let mu = MuGroup::enumerate(&field).unwrap();
        let mut rng = StdRng::seed_from_u64(0xACC2 + q);
        for _ in 0..500 {
            let r = rng.random_range(1..=2 * (q + 1)) as i64;
            let s = rng.random_range(1..=4u64);
            let t = rng.random_range(1..=q + 1);
            let a = random_poly(&field, 6, &mut rng);
            let spec = MultiplierSpec::new(s, t).unwrap();
            let check = transfer_check(r, &a, &[spec], &mu).unwrap();
            assert!(
                check.agree(),
                "q={q} r={r} s={s} t={t} A={a}: product side {} vs shifted side {}",
                check.product_side,
                check.shifted_side
            );
            samples += 1;
        }
    }
    println!(
        "ACCEPTANCE 2 (multiplier transfer iff, {} samples): PASS in {:.2?}",
        samples,
        start.elapsed()
    );
}

#[test]
fn a3_trinomial_seeds_exhaustive() {
    let start = Instant::now();
    let mut checked = 0u64;
    for k in 1..=8u32 {
        let field = make_field(2, 2 * k as usize).unwrap();
        let mu = MuGroup::enumerate(&field).unwrap();
        for ell in 1..=8u32 {
            for variant in [SeedVariant::V1, SeedVariant::V2] {
                let params = SeedParams::new(k, ell, variant).unwrap();
                if !params.admissible() {
                    continue;
                }
                // trinomial_seed verifies the permutation of mu_{q+1} and
                // errors on failure.
                trinomial_seed(&params, &mu).unwrap();
                checked += 1;
            }
        }
    }
    assert!(
        checked >= 64,
        "expected a dense admissible grid, got {checked}"
    );
    println!(
        "ACCEPTANCE 3 (trinomial seeds, {} (k, ell, variant) cases, k,ell <= 8): PASS in {:.2?}",
        checked,
        start.elapsed()
    );
}

#[test]
fn a4_s2_constructions_end_to_end() {
    let start = Instant::now();
    let mut constructed = 0u64;
    for k in [2u32, 4, 6] {
        let field = make_field(2, 2 * k as usize).unwrap();
        let mu = MuGroup::enumerate(&field).unwrap();
        let q = 1u64 << k;
        for ell in 1..=6u32 {
            for variant in [SeedVariant::V1, SeedVariant::V2] {
                let params = SeedParams::new(k, ell, variant).unwrap();
                if !params.admissible() {
                    continue;
                }
                let big_q = params.big_q();
                for t in 1..=8u64 {
                    let r = smallest_valid_r((big_q + 1 + 2 * t) as i64, q).unwrap();
                    let result =
                        construct_s2(&params, S2Branch::Product, Some(t), r, &mu, true).unwrap();
                    assert!(result.verified, "k={k} ell={ell} t={t} r={r}");
                    constructed += 1;
                }
                let parity_ok = match variant {
                    SeedVariant::V1 => ell % 2 == 0,
                    SeedVariant::V2 => ell % 2 == 1,
                };
                if parity_ok {
                    let r = smallest_valid_r(big_q as i64 - 1, q).unwrap();
                    let result =
                        construct_s2(&params, S2Branch::Quotient, None, r, &mu, true).unwrap();
                    assert!(result.verified, "k={k} ell={ell} quotient r={r}");
                    constructed += 1;
                }
            }
        }
    }
    assert!(
        constructed >= 200,
        "expected >= 200 constructions, got {constructed}"
    );
    println!(
        "ACCEPTANCE 4 (s=2 constructions end-to-end, {} oracle-verified): PASS in {:.2?}",
        constructed,
        start.elapsed()
    );
}

#[test]
fn a5_divisibility_parity() {
    let start = Instant::now();
    let field = make_field(2, 4).unwrap();
    let divisor = Polynomial::from_indexed_terms(&field, &[(2, 1), (1, 1), (0, 1)]).unwrap();
    let mut cases = 0u64;
    for ell in 1..=10u32 {
        for variant in [SeedVariant::V1, SeedVariant::V2] {
            let params = SeedParams::new(2, ell, variant).unwrap();
            let d = params.trinomial(&field).unwrap();
            let expected = match variant {
                SeedVariant::V1 => ell % 2 == 0,
                SeedVariant::V2 => ell % 2 == 1,
            };
            match d.exact_divide(&divisor) {
                Ok(b) => {
                    assert!(
                        expected,
                        "ell={ell} variant {variant:?} divided unexpectedly"
                    );
                    assert_eq!(b.mul(&divisor).unwrap(), d);
                }
                Err(Error::NotDivisible) => {
                    assert!(!expected, "ell={ell} variant {variant:?} should divide");
                }
                Err(other) => panic!("unexpected error: {other}"),
            }
            cases += 1;
        }
    }
    println!(
        "ACCEPTANCE 5 (divisibility parity, {} cases, ell <= 10): PASS in {:.2?}",
        cases,
        start.elapsed()
    );
}

#[test]
fn a6_composition_closure() {
    let start = Instant::now();
    let mut composed = 0u64;
    for k in [1u32, 2, 3] {
        let field = make_field(2, 2 * k as usize).unwrap();
        let q = 1u64 << k;
        let mu = MuGroup::enumerate(&field).unwrap();
        let exponents: Vec<u64> = (1..=20).filter(|&e| gcd(e, q * q - 1) == 1).collect();

        // First 50 constructions in deterministic grid order.
        let mut permutations = Vec::new();
        'grid: for ell in 1..=10u32 {
            for variant in [SeedVariant::V1, SeedVariant::V2] {
                let params = SeedParams::new(k, ell, variant).unwrap();
                if !params.admissible() {
                    continue;
                }
                let seed = trinomial_seed(&params, &mu).unwrap();
                let mut tuples: Vec<Vec<MultiplierSpec>> = vec![Vec::new()];
                for s in 1..=4u64 {
                    for t in 1..=6u64 {
                        tuples.push(vec![MultiplierSpec::new(s, t).unwrap()]);
                    }
                }
                for branch in [Branch::Product, Branch::Quotient] {
                    for specs in &tuples {
                        let shift: i64 = specs.iter().map(|sp| (sp.s() * sp.t()) as i64).sum();
                        let target = match branch {
                            Branch::Product => seed.v() + shift,
                            _ => seed.v() - shift,
                        };
                        let Ok(r) = smallest_valid_r(target, q) else {
                            continue;
                        };
                        let built = match branch {
                            Branch::Product => construct_product(&seed, specs, r, &mu, true),
                            _ => construct_quotient(&seed, specs, r, &mu, true),
                        };
                        match built {
                            Ok(result) => {
                                permutations.push(result.f);
                                if permutations.len() == 50 {
                                    break 'grid;
                                }
                            }
                            Err(Error::NotDivisible | Error::PreconditionFailed(_)) => {}
                            Err(other) => panic!("unexpected error: {other}"),
                        }
                    }
                }
            }
        }
        assert_eq!(permutations.len(), 50, "q={q}: not enough constructions");

        for f in &permutations {
            for &e in &exponents {
                let g = f.compose_power(e).unwrap();
                assert!(
                    is_permutation_bruteforce(&g).unwrap(),
                    "q={q} e={e} f={f} composed to a non-permutation"
                );
                composed += 1;
            }
        }
    }
    println!(
        "ACCEPTANCE 6 (composition closure, {} composed polynomials): PASS in {:.2?}",
        composed,
        start.elapsed()
    );
}

#[test]
fn a7_search_determinism_and_soundness() {
    let start = Instant::now();
    // The shipped demo config, with output redirected into a temp dir.
    let repo_demo = concat!(env!("CARGO_MANIFEST_DIR"), "/../../demo.cfg");
    let dir = tempfile::tempdir().unwrap();
    let mut config = SearchConfig::from_file(std::path::Path::new(repo_demo)).unwrap();
    assert_eq!(config.k_range, vec![2, 4]);
    assert!(config.verify);
    config.output = dir.path().join("findings.jsonl");

    let stats1 = permpoly::run_search(&config).unwrap();
    let bytes1 = std::fs::read(&config.output).unwrap();
    let stats2 = permpoly::run_search(&config).unwrap();
    let bytes2 = std::fs::read(&config.output).unwrap();
    assert_eq!(
        bytes1, bytes2,
        "findings file differs between identical runs"
    );
    assert_eq!(stats1, stats2);
    assert!(stats1.emitted > 0);

    let text = String::from_utf8(bytes1).unwrap();
    let findings: Vec<Finding> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();

    // Soundness: every record claims verified and survives an independent
    // re-check: rebuild f from (r, B) and brute-force it.
    for fd in &findings {
        assert!(fd.verified, "unverified record: {fd:?}");
        let field = make_field(fd.p, 2 * fd.k as usize).unwrap();
        let b = Polynomial::parse(&fd.b, &field).unwrap();
        let mut f = candidate_polynomial(fd.r, &b).unwrap();
        if let Some(e) = fd.e {
            f = f.compose_power(e).unwrap();
        }
        assert_eq!(
            f.to_string(),
            fd.f,
            "stored f does not match X^r*B(X^(q-1))"
        );
        assert!(
            is_permutation_bruteforce(&f).unwrap(),
            "record fails oracle: {fd:?}"
        );
    }

    // The five-term product instance for q = 4 is present with its
    // canonical (already monic) reduced form.
    let hit = findings
        .iter()
        .find(|fd| fd.q == 4 && fd.b == "1*X^7 + 1*X^6 + 1*X^5 + 1*X^3 + 1")
        .expect("five-term instance missing");
    assert_eq!(hit.r, 2);
    assert_eq!(hit.f, "1*X^11 + 1*X^8 + 1*X^5");
    assert_eq!(hit.branch, "cor3.1");
    assert_eq!(hit.multipliers, vec![(2, 1)]);
    assert!(hit.verified);

    println!(
        "ACCEPTANCE 7 (search determinism + soundness, {} findings re-verified): PASS in {:.2?}",
        findings.len(),
        start.elapsed()
    );
}

#[test]
fn a8_field_layer() {
    let start = Instant::now();

    // make_field output is irreducible for p in {2, 3, 5}, n <= 8.
    let mut fields = 0u64;
    for p in [2u64, 3, 5] {
        for n in 1..=8usize {
            let field = make_field(p, n).unwrap();
            assert!(
                permpoly::is_irreducible(field.modulus(), p).unwrap(),
                "p={p} n={n}"
            );
            fields += 1;
        }
    }

    // is_irreducible agrees with exhaustive trial division over F_2 for all
    // monic candidates of degree <= 6.
    fn divides(f: &[u64], g: &[u64]) -> bool {
        // remainder of f by g over F_2
        let mut rem: Vec<u64> = f.to_vec();
        while rem.last() == Some(&0) {
            rem.pop();
        }
        let dg = g.len() - 1;
        while rem.len() > dg {
            let shift = rem.len() - 1 - dg;
            for (i, &gc) in g.iter().enumerate() {
                rem[shift + i] ^= gc;
            }
            while rem.last() == Some(&0) {
                rem.pop();
            }
            if rem.is_empty() {
                return true;
            }
        }
        rem.is_empty()
    }
    let mut candidates = 0u64;
    for n in 1..=6usize {
        for m in 0..(1u64 << n) {
            let mut f = Vec::with_capacity(n + 1);
            let mut mm = m;
            for _ in 0..n {
                f.push(mm % 2);
                mm /= 2;
            }
            f.push(1);
            let mut reducible = false;
            for deg in 1..=n / 2 {
                for gm in 0..(1u64 << deg) {
                    let mut g = Vec::with_capacity(deg + 1);
                    let mut gg = gm;
                    for _ in 0..deg {
                        g.push(gg % 2);
                        gg /= 2;
                    }
                    g.push(1);
                    if divides(&f, &g) {
                        reducible = true;
                        break;
                    }
                }
                if reducible {
                    break;
                }
            }
            assert_eq!(
                permpoly::is_irreducible(&f, 2).unwrap(),
                !reducible,
                "degree {n} candidate {m}"
            );
            candidates += 1;
        }
    }
    println!(
        "ACCEPTANCE 8 (field layer: {} moduli irreducible, {} candidates vs trial division): PASS in {:.2?}",
        fields,
        candidates,
        start.elapsed()
    );
}
