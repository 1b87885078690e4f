//! The subgroup μ_{q+1} ⊂ F_{q²}^* of (q+1)-th roots of unity, the
//! permutation criterion that routes through it, and the brute-force
//! permutation oracle that serves as ground truth for everything else.
//!
//! For f(X) = X^r·A(X^{q−1}): f permutes F_{q²} iff gcd(r, q−1) = 1 and
//! g(X) = X^r·A(X)^{q−1} permutes μ_{q+1}. Both sides of that equivalence
//! are implemented independently here and tested against each other.

use std::collections::HashMap;
use std::sync::Arc;

use crate::arith::{gcd, prime_factors};
use crate::gf::{FieldElement, FieldRef};
use crate::poly::Polynomial;
use crate::{Error, Result};

/// Default cap on the field order for whole-field scans (q² ≤ 2^26).
/// Callers on larger machines can pass their own cap through the
/// `*_with_cap` entry points.
pub const DEFAULT_RESOURCE_CAP: u64 = 1 << 26;

fn check_cap(order: u64, cap: u64, what: &str) -> Result<()> {
    if order > cap {
        return Err(Error::ResourceLimit(format!(
            "{what}: field order {order} exceeds cap {cap}"
        )));
    }
    Ok(())
}

/// The full subgroup μ_{q+1} = {x ∈ F_{q²} : x^{q+1} = 1}, with elements in
/// field enumeration order.
#[derive(Debug, Clone)]
pub struct MuGroup {
    field: FieldRef,
    elements: Vec<FieldElement>,
    positions: HashMap<u64, usize>,
}

impl MuGroup {
    /// Enumerate by powering a generator of the cyclic group F_{q²}^* to the
    /// (q−1): μ_{q+1} = ⟨g^{q−1}⟩. Elements are sorted into field
    /// enumeration order so both modes produce identical groups.
    pub fn enumerate(field: &FieldRef) -> Result<Self> {
        Self::enumerate_with_cap(field, DEFAULT_RESOURCE_CAP)
    }

    pub fn enumerate_with_cap(field: &FieldRef, cap: u64) -> Result<Self> {
        let q = field.quadratic_q()?;
        check_cap(field.order(), cap, "enumerate_mu")?;
        let g = find_generator(field)?;
        let h = g.pow_u64(q - 1);
        let mut elements = Vec::with_capacity((q + 1) as usize);
        let mut acc = field.one();
        for _ in 0..=q {
            elements.push(acc.clone());
            acc = acc.mul(&h)?;
        }
        if !acc.is_one() {
            return Err(Error::Inconsistency(
                "mu generator does not have order q+1".into(),
            ));
        }
        elements.sort_by_key(|x| x.index());
        Self::from_elements(field, elements)
    }

    /// Enumerate by scanning all q² elements for x^{q+1} = 1.
    pub fn enumerate_scan(field: &FieldRef) -> Result<Self> {
        Self::enumerate_scan_with_cap(field, DEFAULT_RESOURCE_CAP)
    }

    pub fn enumerate_scan_with_cap(field: &FieldRef, cap: u64) -> Result<Self> {
        let q = field.quadratic_q()?;
        check_cap(field.order(), cap, "enumerate_mu")?;
        let elements: Vec<FieldElement> = field
            .elements()
            .filter(|x| x.pow_u64(q + 1).is_one())
            .collect();
        Self::from_elements(field, elements)
    }

    fn from_elements(field: &FieldRef, elements: Vec<FieldElement>) -> Result<Self> {
        let q = field.quadratic_q()?;
        if elements.len() as u64 != q + 1 {
            return Err(Error::Inconsistency(format!(
                "mu_{{q+1}} has {} elements, expected {}",
                elements.len(),
                q + 1
            )));
        }
        let positions = elements
            .iter()
            .enumerate()
            .map(|(i, x)| (x.index(), i))
            .collect();
        Ok(MuGroup {
            field: Arc::clone(field),
            elements,
            positions,
        })
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.positions.contains_key(&x.index())
    }

    fn position(&self, x: &FieldElement) -> Option<usize> {
        self.positions.get(&x.index()).copied()
    }
}

/// First generator of F_{q²}^* in field enumeration order: order q²−1 is
/// verified by checking x^{(q²−1)/ℓ} ≠ 1 for every prime ℓ | q²−1.
fn find_generator(field: &FieldRef) -> Result<FieldElement> {
    let target = field.order() - 1;
    let primes = prime_factors(target);
    for idx in 1..field.order() {
        let x = field.from_index(idx)?;
        if primes.iter().all(|&ell| !x.pow_u64(target / ell).is_one()) {
            return Ok(x);
        }
    }
    Err(Error::Inconsistency(
        "multiplicative group has no generator".into(),
    ))
}

/// Does x ↦ x^r·A(x)^{q−1} permute μ_{q+1}?
///
/// A(x) is evaluated once per point and reused for the (q−1) power. A zero
/// value of A on μ_{q+1} sends the point to 0 ∉ μ_{q+1}, so the answer is
/// immediately false. Negative r is folded mod q+1, valid because
/// x^{q+1} = 1 on the subgroup.
pub fn permutes_mu(r: i64, a: &Polynomial, mu: &MuGroup) -> Result<bool> {
    if a.field() != mu.field() && !Arc::ptr_eq(a.field(), mu.field()) {
        return Err(Error::FieldMismatch);
    }
    let q = mu.field().quadratic_q()?;
    let rr = r.rem_euclid((q + 1) as i64) as u64;
    let mut seen = vec![false; mu.len()];
    for x in mu.elements() {
        let ax = a.eval(x)?;
        if ax.is_zero() {
            return Ok(false);
        }
        let image = x.pow_u64(rr).mul(&ax.pow_u64(q - 1))?;
        match mu.position(&image) {
            None => return Ok(false),
            Some(pos) => {
                if seen[pos] {
                    return Ok(false);
                }
                seen[pos] = true;
            }
        }
    }
    Ok(true)
}

/// Ground-truth permutation test: evaluate f at every field element and
/// check for q² distinct values with a seen-set, exiting on the first
/// collision.
pub fn is_permutation_bruteforce(f: &Polynomial) -> Result<bool> {
    is_permutation_bruteforce_with_cap(f, DEFAULT_RESOURCE_CAP)
}

pub fn is_permutation_bruteforce_with_cap(f: &Polynomial, cap: u64) -> Result<bool> {
    let order = f.field().order();
    check_cap(order, cap, "is_permutation_bruteforce")?;
    let mut seen = vec![false; order as usize];
    for x in f.field().elements() {
        let idx = f.eval(&x)?.index() as usize;
        if seen[idx] {
            return Ok(false);
        }
        seen[idx] = true;
    }
    Ok(true)
}

/// The reduced polynomial X^r·A(X^{q−1}), for r ≥ 1.
pub fn candidate_polynomial(r: u64, a: &Polynomial) -> Result<Polynomial> {
    if r == 0 {
        return Err(Error::InvalidArgument("exponent r must be >= 1".into()));
    }
    let q = a.field().quadratic_q()?;
    let m = (a.field().order() - 1) as u128;
    let mut pairs: Vec<(u64, FieldElement)> = Vec::with_capacity(a.term_count());
    for (&e, c) in a.terms() {
        let exp = r as u128 + e as u128 * (q - 1) as u128;
        let ee = (((exp - 1) % m) + 1) as u64;
        pairs.push((ee, c.clone()));
    }
    Polynomial::from_terms(a.field(), &pairs)
}

/// The subgroup criterion for f = X^r·A(X^{q−1}): gcd(r, q−1) = 1 together
/// with [`permutes_mu`]. Equal to the brute-force verdict on f — that
/// equality is a tested invariant of this crate, not an assumption.
pub fn mu_criterion(r: i64, a: &Polynomial, mu: &MuGroup) -> Result<bool> {
    if r <= 0 {
        return Err(Error::InvalidArgument(format!(
            "criterion needs a positive r, got {r}"
        )));
    }
    let q = mu.field().quadratic_q()?;
    if gcd(r as u64, q - 1) != 1 {
        return Ok(false);
    }
    permutes_mu(r, a, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::poly::Polynomial;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn f4() -> FieldRef {
        make_field(2, 2).unwrap()
    }

    fn from_exps(field: &FieldRef, exps: &[u64]) -> Polynomial {
        let pairs: Vec<(u64, u64)> = exps.iter().map(|&e| (e, 1)).collect();
        Polynomial::from_indexed_terms(field, &pairs).unwrap()
    }

    #[test]
    fn mu3_is_all_of_f4_star() {
        let f = f4();
        let mu = MuGroup::enumerate(&f).unwrap();
        let indices: Vec<u64> = mu.elements().iter().map(|x| x.index()).collect();
        assert_eq!(indices, vec![1, 2, 3]);
    }

    #[test]
    fn mu5_in_f16() {
        let f = make_field(2, 4).unwrap();
        let mu = MuGroup::enumerate(&f).unwrap();
        assert_eq!(mu.len(), 5);
        for x in mu.elements() {
            assert!(x.pow_u64(5).is_one());
        }
    }

    #[test]
    fn mu4_in_f9_has_two_elements_of_order_4() {
        let f = make_field(3, 2).unwrap();
        let mu = MuGroup::enumerate(&f).unwrap();
        assert_eq!(mu.len(), 4);
        let order4 = mu
            .elements()
            .iter()
            .filter(|x| !x.pow_u64(2).is_one() && x.pow_u64(4).is_one())
            .count();
        assert_eq!(order4, 2);
    }

    #[test]
    fn fast_mode_equals_scan_mode() {
        for (p, k) in [
            (2u64, 1usize),
            (3, 1),
            (2, 2),
            (5, 1),
            (7, 1),
            (2, 3),
            (3, 2),
            (2, 4),
            (5, 2),
            (3, 3),
            (2, 5),
            (7, 2),
            (2, 6),
        ] {
            let f = make_field(p, 2 * k).unwrap();
            let fast = MuGroup::enumerate(&f).unwrap();
            let scan = MuGroup::enumerate_scan(&f).unwrap();
            let fi: Vec<u64> = fast.elements().iter().map(|x| x.index()).collect();
            let si: Vec<u64> = scan.elements().iter().map(|x| x.index()).collect();
            assert_eq!(fi, si, "p={p} k={k}");
        }
    }

    #[test]
    fn mu_is_closed_under_product_and_inverse() {
        let f = make_field(2, 4).unwrap();
        let mu = MuGroup::enumerate(&f).unwrap();
        for x in mu.elements() {
            assert!(mu.contains(&x.inverse().unwrap()));
            for y in mu.elements() {
                assert!(mu.contains(&x.mul(y).unwrap()));
            }
        }
    }

    #[test]
    fn resource_cap_is_enforced() {
        let f = make_field(2, 4).unwrap();
        assert!(matches!(
            MuGroup::enumerate_with_cap(&f, 8),
            Err(Error::ResourceLimit(_))
        ));
        let p = Polynomial::x(&f);
        assert!(matches!(
            is_permutation_bruteforce_with_cap(&p, 8),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn permutes_mu_examples() {
        let f = f4();
        let mu = MuGroup::enumerate(&f).unwrap();
        // x^3 A(x) with A = X^3+X+1 is the identity on mu_3
        assert!(permutes_mu(3, &from_exps(&f, &[3, 1, 0]), &mu).unwrap());
        // A = X+1 vanishes at 1
        assert!(!permutes_mu(1, &from_exps(&f, &[1, 0]), &mu).unwrap());
        // A = 1, r = 1: identity
        assert!(permutes_mu(1, &Polynomial::one(&f), &mu).unwrap());
    }

    #[test]
    fn permutes_mu_handles_negative_r() {
        let f = f4();
        let mu = MuGroup::enumerate(&f).unwrap();
        let one = Polynomial::one(&f);
        // x^{-1} = x^2 on mu_3: a permutation
        assert!(permutes_mu(-1, &one, &mu).unwrap());
        assert_eq!(
            permutes_mu(-1, &one, &mu).unwrap(),
            permutes_mu(2, &one, &mu).unwrap()
        );
    }

    #[test]
    fn closure_on_mu_when_a_nonvanishing() {
        // If A(x) != 0 on mu then g(x)^{q+1} = A(x)^{q^2-1} = 1.
        let f = make_field(2, 4).unwrap();
        let q = f.q().unwrap();
        let mu = MuGroup::enumerate(&f).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..100 {
            let mut pairs = Vec::new();
            for e in 0..=rng.random_range(0..6u64) {
                let idx = rng.random_range(0..f.order());
                if idx != 0 {
                    pairs.push((e, idx));
                }
            }
            let a = Polynomial::from_indexed_terms(&f, &pairs).unwrap();
            let r = rng.random_range(1..=12u64);
            if mu.elements().iter().any(|x| a.eval(x).unwrap().is_zero()) {
                continue;
            }
            for x in mu.elements() {
                let image = x
                    .pow_u64(r)
                    .mul(&a.eval(x).unwrap().pow_u64(q - 1))
                    .unwrap();
                assert!(mu.contains(&image));
            }
        }
    }

    #[test]
    fn bruteforce_examples() {
        let f16 = make_field(2, 4).unwrap();
        assert!(is_permutation_bruteforce(&Polynomial::x(&f16)).unwrap());
        let f = f4();
        assert!(is_permutation_bruteforce(&from_exps(&f, &[2])).unwrap());
        assert!(!is_permutation_bruteforce(&from_exps(&f, &[3])).unwrap());
    }

    #[test]
    fn criterion_examples() {
        let f = f4();
        let mu = MuGroup::enumerate(&f).unwrap();
        // q=2, r=3, A=X^3+X+1: f = X^6+X^4+X^3 reduces to X
        let a = from_exps(&f, &[3, 1, 0]);
        assert!(mu_criterion(3, &a, &mu).unwrap());
        let candidate = candidate_polynomial(3, &a).unwrap();
        assert_eq!(candidate.to_string(), "1*X");
        assert!(is_permutation_bruteforce(&candidate).unwrap());

        // q=4, r=3, A=1: gcd(3, 3) = 3 blocks it
        let f16 = make_field(2, 4).unwrap();
        let mu5 = MuGroup::enumerate(&f16).unwrap();
        assert!(!mu_criterion(3, &Polynomial::one(&f16), &mu5).unwrap());

        // q=2, r=1, A=1: f = X
        assert!(mu_criterion(1, &Polynomial::one(&f), &mu).unwrap());

        assert!(matches!(
            mu_criterion(0, &a, &mu),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn criterion_matches_oracle_on_random_inputs() {
        // Smaller version of the acceptance suite; kept here so module-level
        // regressions surface fast.
        for (p, k) in [(2u64, 1usize), (3, 1), (2, 2)] {
            let f = make_field(p, 2 * k).unwrap();
            let q = f.q().unwrap();
            let mu = MuGroup::enumerate(&f).unwrap();
            let mut rng = StdRng::seed_from_u64(1000 + q);
            for _ in 0..100 {
                let r = rng.random_range(1..=2 * f.order());
                let mut pairs = Vec::new();
                for e in 0..=rng.random_range(0..(q + 3)) {
                    let idx = rng.random_range(0..f.order());
                    if idx != 0 {
                        pairs.push((e, idx));
                    }
                }
                let a = Polynomial::from_indexed_terms(&f, &pairs).unwrap();
                let lhs = mu_criterion(r as i64, &a, &mu).unwrap();
                let rhs = is_permutation_bruteforce(&candidate_polynomial(r, &a).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "q={q} r={r} A={a}");
            }
        }
    }
}
