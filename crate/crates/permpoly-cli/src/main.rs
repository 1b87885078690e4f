//! Batch-oriented command line for permutation polynomial work over F_{q²}.
//!
//! Exit codes: 0 success (or positive permutation verdict), 1 negative
//! verdict, 2 usage or validation problem, 3 resource limit exceeded.
//! Data goes to stdout (or the configured output file); progress and
//! human-readable commentary for `--record` runs go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use permpoly::arith::factorize;
use permpoly::{
    candidate_polynomial, construct_product, construct_quotient, construct_s2,
    is_permutation_bruteforce, make_field, mu_criterion, permutes_mu, run_search, smallest_valid_r,
    summarize, trinomial_seed, Branch, ConstructionResult, Error, Finding, MuGroup, MultiplierSpec,
    Polynomial, S2Branch, SearchConfig, SeedParams, SeedVariant,
};

#[derive(Parser)]
#[command(
    name = "permpoly",
    about = "Verify, construct, and search for permutation polynomials of F_{q^2} shaped X^r*A(X^(q-1))",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    /// Brute-force the polynomial over the whole field.
    Full,
    /// Evaluate the subgroup criterion for (r, A) and cross-check the oracle.
    Lemma1,
}

#[derive(Subcommand)]
enum Command {
    /// Print the field built for (p, n): modulus, q, subgroup size, factorization of q^2-1.
    FieldInfo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Decide whether a polynomial permutes F_{q^2}, q = p^k.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        /// Polynomial text, e.g. '1*X^6 + 1*X^4 + 1*X^3' (full mode).
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, value_enum, default_value = "full")]
        mode: VerifyMode,
        /// Exponent r of X^r*A(X^(q-1)) (lemma1 mode).
        #[arg(long)]
        r: Option<u64>,
        /// Polynomial A text (lemma1 mode).
        #[arg(long)]
        a: Option<String>,
    },
    /// Run one construction branch and print r, B, f, and the oracle verdict.
    Construct {
        /// cor3.1, cor3.2, cor5.1, or cor5.2.
        #[arg(long)]
        branch: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        ell: u32,
        /// Seed variant: 1 (D = X^(Q+1)+X+1) or 2 (D = X^Q+X+1).
        #[arg(long)]
        variant: u8,
        /// Multiplier shift t (required for cor5.1).
        #[arg(long)]
        t: Option<u64>,
        /// Exponent r; defaults to the least valid r in the branch's residue class.
        #[arg(long)]
        r: Option<u64>,
        /// Extra multiplier specs 's,t' for the general branches; repeatable.
        #[arg(long = "spec", value_name = "S,T")]
        specs: Vec<String>,
        /// Skip the brute-force verification of the result.
        #[arg(long)]
        no_verify: bool,
        /// Emit one findings-format JSON line on stdout (report moves to stderr).
        #[arg(long)]
        record: bool,
    },
    /// Run a sweep described by a config file.
    Search {
        #[arg(long)]
        config: PathBuf,
    },
    /// Aggregate a findings file into a table.
    Summarize {
        #[arg(long)]
        findings: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ResourceLimit(_) => 3,
        _ => 2,
    }
}

fn format_factorization(n: u64) -> String {
    let parts: Vec<String> = factorize(n)
        .into_iter()
        .map(|(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect();
    parts.join(" * ")
}

fn parse_spec(text: &str) -> Result<MultiplierSpec, Error> {
    let (s, t) = text
        .split_once(',')
        .ok_or_else(|| Error::InvalidArgument(format!("--spec wants 's,t', got '{text}'")))?;
    let s = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad s in --spec '{text}'")))?;
    let t = t
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad t in --spec '{text}'")))?;
    MultiplierSpec::new(s, t)
}

fn cmd_field_info(p: u64, n: usize) -> Result<u8, Error> {
    let field = make_field(p, n)?;
    println!("field: F_{{{p}^{n}}} (order {})", field.order());
    println!("modulus: {}", field.modulus_string());
    match field.q() {
        Some(q) => {
            println!("q = {q}, q^2 = {}", field.order());
            println!("|mu_{{q+1}}| = {}", q + 1);
            let m = field.order() - 1;
            println!("q^2 - 1 = {m} = {}", format_factorization(m));
        }
        None => println!("n is odd: no quadratic structure"),
    }
    Ok(0)
}

fn cmd_verify(
    p: u64,
    k: usize,
    poly: Option<String>,
    mode: VerifyMode,
    r: Option<u64>,
    a: Option<String>,
) -> Result<u8, Error> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let field = make_field(p, 2 * k)?;
    match mode {
        VerifyMode::Full => {
            let text =
                poly.ok_or_else(|| Error::InvalidArgument("full mode needs --poly".into()))?;
            let f = Polynomial::parse(&text, &field)?;
            let ok = is_permutation_bruteforce(&f)?;
            println!(
                "{}",
                if ok {
                    "PERMUTATION"
                } else {
                    "NOT A PERMUTATION"
                }
            );
            Ok(if ok { 0 } else { 1 })
        }
        VerifyMode::Lemma1 => {
            let r = r.ok_or_else(|| Error::InvalidArgument("lemma1 mode needs --r".into()))?;
            let text = a.ok_or_else(|| Error::InvalidArgument("lemma1 mode needs --a".into()))?;
            let a = Polynomial::parse(&text, &field)?;
            let q = field.quadratic_q()?;
            let mu = MuGroup::enumerate(&field)?;
            let gcd_ok = permpoly::arith::gcd(r, q - 1) == 1;
            let mu_ok = permutes_mu(r as i64, &a, &mu)?;
            let criterion = mu_criterion(r as i64, &a, &mu)?;
            let f = candidate_polynomial(r, &a)?;
            let oracle = is_permutation_bruteforce(&f)?;
            println!("f = {f}");
            println!("gcd(r, q-1) = 1: {}", if gcd_ok { "yes" } else { "no" });
            println!("permutes mu_{{q+1}}: {}", if mu_ok { "yes" } else { "no" });
            println!(
                "criterion: {}",
                if criterion {
                    "PERMUTATION"
                } else {
                    "NOT A PERMUTATION"
                }
            );
            println!(
                "oracle:    {}",
                if oracle {
                    "PERMUTATION"
                } else {
                    "NOT A PERMUTATION"
                }
            );
            if criterion != oracle {
                eprintln!("warning: criterion and oracle disagree; this is a bug");
            }
            Ok(if oracle { 0 } else { 1 })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    branch: &str,
    k: u32,
    ell: u32,
    variant: u8,
    t: Option<u64>,
    r: Option<u64>,
    spec_texts: &[String],
    no_verify: bool,
    record: bool,
) -> Result<u8, Error> {
    let branch = Branch::from_tag(branch)?;
    let variant = SeedVariant::from_number(variant)?;
    let params = SeedParams::new(k, ell, variant)?;
    let field = make_field(2, 2 * k as usize)?;
    let mu = MuGroup::enumerate(&field)?;
    let q = params.q();
    let verify = !no_verify;

    let specs: Vec<MultiplierSpec> = spec_texts
        .iter()
        .map(|s| parse_spec(s))
        .collect::<Result<_, _>>()?;
    if !specs.is_empty() && matches!(branch, Branch::ProductS2 | Branch::QuotientS2) {
        return Err(Error::InvalidArgument(
            "--spec applies only to cor3.1 and cor3.2".into(),
        ));
    }

    let result: ConstructionResult = match branch {
        Branch::ProductS2 => {
            let t = t.ok_or_else(|| Error::InvalidArgument("cor5.1 needs --t".into()))?;
            let r = match r {
                Some(r) => r,
                None => smallest_valid_r((params.big_q() + 1 + 2 * t) as i64, q)?,
            };
            construct_s2(&params, S2Branch::Product, Some(t), r, &mu, verify)?
        }
        Branch::QuotientS2 => {
            let r = match r {
                Some(r) => r,
                None => smallest_valid_r(params.big_q() as i64 - 1, q)?,
            };
            construct_s2(&params, S2Branch::Quotient, t, r, &mu, verify)?
        }
        Branch::Product => {
            let seed = trinomial_seed(&params, &mu)?;
            let shift: i64 = specs.iter().map(|sp| (sp.s() * sp.t()) as i64).sum();
            let r = match r {
                Some(r) => r,
                None => smallest_valid_r(seed.v() + shift, q)?,
            };
            construct_product(&seed, &specs, r, &mu, verify)?
        }
        Branch::Quotient => {
            let seed = trinomial_seed(&params, &mu)?;
            let shift: i64 = specs.iter().map(|sp| (sp.s() * sp.t()) as i64).sum();
            let r = match r {
                Some(r) => r,
                None => smallest_valid_r(seed.v() - shift, q)?,
            };
            construct_quotient(&seed, &specs, r, &mu, verify)?
        }
    };

    let report = format!(
        "branch = {}\nr = {}\nB = {}\nf = {}\nterms(B) = {}, terms(f) = {}\noracle: {}",
        result.branch.tag(),
        result.r,
        result.b,
        result.f,
        result.b.term_count(),
        result.f.term_count(),
        if result.verified {
            "PERMUTATION (verified)"
        } else {
            "skipped"
        }
    );
    if record {
        let finding = Finding {
            p: 2,
            k,
            q,
            r: result.r,
            e: None,
            branch: result.branch.tag().to_string(),
            variant: params.variant().number(),
            ell,
            multipliers: result
                .multipliers
                .iter()
                .map(|sp| (sp.s(), sp.t()))
                .collect(),
            b: result.b.to_string(),
            f: result.f.to_string(),
            terms_b: result.b.term_count(),
            terms_f: result.f.term_count(),
            verified: result.verified,
            seed: result.seed_provenance.tag().to_string(),
        };
        let line = serde_json::to_string(&finding)
            .map_err(|e| Error::Parse(format!("serialize finding: {e}")))?;
        println!("{line}");
        eprintln!("{report}");
    } else {
        println!("{report}");
    }
    Ok(0)
}

fn cmd_search(config_path: &Path) -> Result<u8, Error> {
    let config = SearchConfig::from_file(config_path)?;
    let stats = run_search(&config)?;
    eprintln!(
        "tuples examined: {} (skipped: {}, inadmissible seeds: {})",
        stats.examined, stats.skipped, stats.inadmissible_seeds
    );
    eprintln!(
        "constructed: {} (duplicates: {}, over threshold: {})",
        stats.constructed, stats.duplicates, stats.over_threshold
    );
    eprintln!(
        "findings emitted: {} -> {}",
        stats.emitted,
        config.output.display()
    );
    Ok(0)
}

fn cmd_summarize(path: &Path) -> Result<u8, Error> {
    let summary = summarize(path)?;
    print!("{summary}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::FieldInfo { p, n } => cmd_field_info(p, n),
        Command::Verify {
            p,
            k,
            poly,
            mode,
            r,
            a,
        } => cmd_verify(p, k, poly, mode, r, a),
        Command::Construct {
            branch,
            k,
            ell,
            variant,
            t,
            r,
            specs,
            no_verify,
            record,
        } => cmd_construct(&branch, k, ell, variant, t, r, &specs, no_verify, record),
        Command::Search { config } => cmd_search(&config),
        Command::Summarize { findings } => cmd_summarize(&findings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
