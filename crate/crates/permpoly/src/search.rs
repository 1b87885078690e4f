//! Deterministic sweep over seed families × multiplier sequences ×
//! exponents, emitting the constructed permutation polynomials whose
//! reduced form has few terms.
//!
//! Enumeration order is total — k, ℓ, variant, branch, multiplier tuple in
//! lexicographic order, r ascending, e ascending — and nothing about timing
//! or scheduling leaks into the output, so identical configs produce
//! byte-identical findings files. Work is partitioned across threads at the
//! (k, ℓ, variant, branch) granularity; per-task outputs are merged back in
//! enumeration order before the dedup pass.
//!
//! Findings go to the output path as JSON lines with the fixed key set
//! {p, k, q, r, e, branch, variant, ell, multipliers, B, f, terms_B,
//! terms_f, verified, seed}.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::construct::{
    construct_product, construct_quotient, multiplier_condition, smallest_valid_r, trinomial_seed,
    Branch, SeedParams, SeedVariant,
};
use crate::gf::make_field;
use crate::mu::{is_permutation_bruteforce_with_cap, MuGroup, DEFAULT_RESOURCE_CAP};
use crate::poly::{MultiplierSpec, Polynomial};
use crate::{Error, Result};

/// How r is chosen within its residue class mod q+1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RPolicy {
    /// The least positive valid r only.
    SmallestValid,
    /// Every valid r up to the bound, ascending.
    AllBelow(u64),
}

/// Sweep configuration. See the repository README for the file format.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub k_range: Vec<u32>,
    pub ell_range: Vec<u32>,
    pub variants: Vec<SeedVariant>,
    pub branches: Vec<Branch>,
    pub max_m: u32,
    pub max_s: u64,
    pub max_t: u64,
    pub r_policy: RPolicy,
    pub compose_e: Option<Vec<u64>>,
    pub sparsity_threshold: usize,
    pub verify: bool,
    pub output: PathBuf,
}

fn parse_u64_list(value: &str) -> std::result::Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(format!("empty entry in list '{value}'"));
        }
        out.push(
            part.parse::<u64>()
                .map_err(|_| format!("'{part}' is not a nonnegative integer"))?,
        );
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl SearchConfig {
    /// Parse the flat key-value config format. Every problem — unknown keys,
    /// bad values, missing keys, violated bounds — is reported in one pass.
    pub fn parse(text: &str) -> Result<Self> {
        let mut problems: Vec<String> = Vec::new();
        let mut fields: BTreeMap<&str, String> = BTreeMap::new();
        const KNOWN: [&str; 12] = [
            "k-range",
            "ell-range",
            "variants",
            "branches",
            "max-m",
            "max-s",
            "max-t",
            "r-policy",
            "compose-e",
            "sparsity-threshold",
            "verify",
            "output",
        ];
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                problems.push(format!("line {}: expected 'key = value'", no + 1));
                continue;
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN.contains(&key) {
                problems.push(format!("unknown key '{key}'"));
                continue;
            }
            if fields.insert(key, value.to_string()).is_some() {
                problems.push(format!("duplicate key '{key}'"));
            }
        }

        let take = |key: &str| fields.get(key).cloned();

        let k_range = match take("k-range") {
            None => {
                problems.push("missing key 'k-range'".into());
                Vec::new()
            }
            Some(v) => match parse_u64_list(&v) {
                Err(e) => {
                    problems.push(format!("k-range: {e}"));
                    Vec::new()
                }
                Ok(list) => {
                    if list.is_empty() || list.iter().any(|k| !(1..=16).contains(k)) {
                        problems.push("k-range must be a nonempty list with 1 <= k <= 16".into());
                    }
                    list.into_iter().map(|k| k as u32).collect()
                }
            },
        };
        let ell_range = match take("ell-range") {
            None => {
                problems.push("missing key 'ell-range'".into());
                Vec::new()
            }
            Some(v) => match parse_u64_list(&v) {
                Err(e) => {
                    problems.push(format!("ell-range: {e}"));
                    Vec::new()
                }
                Ok(list) => {
                    if list.is_empty() || list.iter().any(|l| !(1..=62).contains(l)) {
                        problems
                            .push("ell-range must be a nonempty list with 1 <= ell <= 62".into());
                    }
                    list.into_iter().map(|l| l as u32).collect()
                }
            },
        };
        let variants = match take("variants") {
            None => {
                problems.push("missing key 'variants'".into());
                Vec::new()
            }
            Some(v) => match parse_u64_list(&v) {
                Err(e) => {
                    problems.push(format!("variants: {e}"));
                    Vec::new()
                }
                Ok(list) => {
                    let mut out = Vec::new();
                    if list.is_empty() {
                        problems.push("variants must be a nonempty subset of {1, 2}".into());
                    }
                    for v in list {
                        match v {
                            1 => out.push(SeedVariant::V1),
                            2 => out.push(SeedVariant::V2),
                            _ => problems.push(format!("variants: {v} is not 1 or 2")),
                        }
                    }
                    out
                }
            },
        };
        let branches = match take("branches") {
            None => {
                problems.push("missing key 'branches'".into());
                Vec::new()
            }
            Some(v) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    match Branch::from_tag(part.trim()) {
                        Ok(b @ (Branch::Product | Branch::Quotient)) => out.push(b),
                        Ok(other) => problems.push(format!(
                            "branches: '{}' is not sweepable; use cor3.1 or cor3.2",
                            other.tag()
                        )),
                        Err(_) => problems.push(format!("branches: unknown tag '{}'", part.trim())),
                    }
                }
                if out.is_empty() {
                    problems.push("branches must contain cor3.1 and/or cor3.2".into());
                }
                out.sort();
                out.dedup();
                out
            }
        };
        let mut parse_bound = |key: &str, min: u64| -> u64 {
            match take(key) {
                None => {
                    problems.push(format!("missing key '{key}'"));
                    min
                }
                Some(v) => match v.parse::<u64>() {
                    Err(_) => {
                        problems.push(format!("{key}: '{v}' is not a nonnegative integer"));
                        min
                    }
                    Ok(n) if n < min => {
                        problems.push(format!("{key} must be >= {min}, got {n}"));
                        min
                    }
                    Ok(n) => n,
                },
            }
        };
        let max_m = parse_bound("max-m", 0) as u32;
        let max_s = parse_bound("max-s", 1);
        let max_t = parse_bound("max-t", 1);

        let r_policy = match take("r-policy") {
            None => {
                problems.push("missing key 'r-policy'".into());
                RPolicy::SmallestValid
            }
            Some(v) => {
                let v = v.trim();
                if v == "smallest-valid" {
                    RPolicy::SmallestValid
                } else if let Some(rest) = v.strip_prefix("all-below") {
                    // accept all-below:N, all-below(N), all-below-bound(N)
                    let digits = rest
                        .trim_start_matches("-bound")
                        .trim_start_matches([':', '('])
                        .trim_end_matches(')')
                        .trim();
                    match digits.parse::<u64>() {
                        Ok(n) if n >= 1 => RPolicy::AllBelow(n),
                        _ => {
                            problems.push(format!("r-policy: bad bound in '{v}'"));
                            RPolicy::SmallestValid
                        }
                    }
                } else {
                    problems.push(format!(
                        "r-policy: '{v}' is not 'smallest-valid' or 'all-below:N'"
                    ));
                    RPolicy::SmallestValid
                }
            }
        };

        let compose_e = match take("compose-e") {
            None => None,
            Some(v) => match parse_u64_list(&v) {
                Err(e) => {
                    problems.push(format!("compose-e: {e}"));
                    None
                }
                Ok(list) => {
                    if list.contains(&0) {
                        problems.push("compose-e entries must be >= 1".into());
                    }
                    for &e in &list {
                        for &k in k_range.iter() {
                            let m = (1u64 << (2 * k)) - 1;
                            if gcd(e, m) != 1 {
                                problems.push(format!(
                                    "compose-e: gcd({e}, q^2-1) = {} != 1 for k = {k}",
                                    gcd(e, m)
                                ));
                            }
                        }
                    }
                    Some(list)
                }
            },
        };

        let sparsity_threshold = match take("sparsity-threshold") {
            None => {
                problems.push("missing key 'sparsity-threshold'".into());
                0
            }
            Some(v) => match v.parse::<usize>() {
                Err(_) => {
                    problems.push(format!(
                        "sparsity-threshold: '{v}' is not a nonnegative integer"
                    ));
                    0
                }
                Ok(n) => n,
            },
        };

        let verify = match take("verify") {
            None => {
                problems.push("missing key 'verify'".into());
                false
            }
            Some(v) => match v.trim() {
                "on" => true,
                "off" => false,
                other => {
                    problems.push(format!("verify: '{other}' is not 'on' or 'off'"));
                    false
                }
            },
        };

        let output = match take("output") {
            None => {
                problems.push("missing key 'output'".into());
                PathBuf::new()
            }
            Some(v) if v.trim().is_empty() => {
                problems.push("output path must be nonempty".into());
                PathBuf::new()
            }
            Some(v) => PathBuf::from(v.trim()),
        };

        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }
        Ok(SearchConfig {
            k_range,
            ell_range,
            variants,
            branches,
            max_m,
            max_s,
            max_t,
            r_policy,
            compose_e,
            sparsity_threshold,
            verify,
            output,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }
}

/// One search result, serialized as a single JSON line.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Finding {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub r: u64,
    pub e: Option<u64>,
    pub branch: String,
    pub variant: u8,
    pub ell: u32,
    pub multipliers: Vec<(u64, u64)>,
    #[serde(rename = "B")]
    pub b: String,
    pub f: String,
    #[serde(rename = "terms_B")]
    pub terms_b: usize,
    pub terms_f: usize,
    pub verified: bool,
    pub seed: String,
}

/// Counters describing one sweep; every candidate lands in exactly one of
/// skipped / duplicates / over_threshold / emitted once it leaves the grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// (seed, branch) pairs dropped because the variant condition fails.
    pub inadmissible_seeds: u64,
    /// (seed, branch, multiplier tuple) grid points enumerated.
    pub examined: u64,
    /// Grid points abandoned before construction: failed multiplier
    /// condition, not divisible, or no valid r.
    pub skipped: u64,
    /// Successful constructions (one per surviving r).
    pub constructed: u64,
    /// Candidates whose canonical form was already seen this run.
    pub duplicates: u64,
    /// Unique candidates with more terms than the threshold.
    pub over_threshold: u64,
    /// Findings written to the output.
    pub emitted: u64,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.inadmissible_seeds += other.inadmissible_seeds;
        self.examined += other.examined;
        self.skipped += other.skipped;
        self.constructed += other.constructed;
        self.duplicates += other.duplicates;
        self.over_threshold += other.over_threshold;
        self.emitted += other.emitted;
    }
}

/// Reduce, then scale so the highest-exponent coefficient is 1. Two
/// polynomials are duplicates for the sweep exactly when their canonical
/// forms have identical term maps.
pub fn canonicalize(f: &Polynomial) -> Result<Polynomial> {
    let reduced = f.reduce_mod_field()?;
    let Some(lead) = reduced.leading_coefficient() else {
        return Err(Error::InvalidArgument(
            "cannot canonicalize the zero polynomial".into(),
        ));
    };
    reduced.scaled(&lead.inverse()?)
}

/// Multiplier tuples of length 0..=max_m, lexicographic within each length,
/// pairs ordered by (s, t).
fn multiplier_tuples(max_m: u32, max_s: u64, max_t: u64) -> Vec<Vec<MultiplierSpec>> {
    let singles: Vec<MultiplierSpec> = (1..=max_s)
        .flat_map(|s| (1..=max_t).map(move |t| MultiplierSpec::new(s, t).expect("s,t >= 1")))
        .collect();
    let mut out: Vec<Vec<MultiplierSpec>> = vec![Vec::new()];
    let mut layer: Vec<Vec<MultiplierSpec>> = vec![Vec::new()];
    for _ in 0..max_m {
        let mut next = Vec::with_capacity(layer.len() * singles.len());
        for tuple in &layer {
            for sp in &singles {
                let mut extended = tuple.clone();
                extended.push(*sp);
                next.push(extended);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

struct Task {
    k: u32,
    ell: u32,
    variant: SeedVariant,
    branch: Branch,
    mu: MuGroup,
}

struct TaskOutput {
    stats: SearchStats,
    /// (dedup key, finding) in task-local enumeration order.
    candidates: Vec<(String, Finding)>,
}

fn valid_rs(target: i64, q: u64, policy: RPolicy) -> Vec<u64> {
    match policy {
        RPolicy::SmallestValid => smallest_valid_r(target, q).ok().into_iter().collect(),
        RPolicy::AllBelow(bound) => {
            let m = q + 1;
            let start = target.rem_euclid(m as i64) as u64;
            let mut r = if start == 0 { m } else { start };
            let mut out = Vec::new();
            while r <= bound {
                if gcd(r, q - 1) == 1 {
                    out.push(r);
                }
                r += m;
            }
            out
        }
    }
}

fn run_task(
    config: &SearchConfig,
    task: &Task,
    tuples: &[Vec<MultiplierSpec>],
) -> Result<TaskOutput> {
    let mut stats = SearchStats::default();
    let mut candidates = Vec::new();
    let q = 1u64 << task.k;
    let params = SeedParams::new(task.k, task.ell, task.variant)?;
    if !params.admissible() {
        stats.inadmissible_seeds += 1;
        return Ok(TaskOutput { stats, candidates });
    }
    let seed = trinomial_seed(&params, &task.mu)?;
    let e_list: Vec<Option<u64>> = match &config.compose_e {
        None => vec![None],
        Some(es) => es.iter().map(|&e| Some(e)).collect(),
    };
    for specs in tuples {
        stats.examined += 1;
        if !specs
            .iter()
            .all(|sp| multiplier_condition(sp.s(), sp.t(), q))
        {
            stats.skipped += 1;
            continue;
        }
        let shift: i64 = specs.iter().map(|sp| (sp.s() * sp.t()) as i64).sum();
        let target = match task.branch {
            Branch::Product => seed.v() + shift,
            Branch::Quotient => seed.v() - shift,
            _ => unreachable!("sweeps use the general branches"),
        };
        let rs = valid_rs(target, q, config.r_policy);
        if rs.is_empty() {
            stats.skipped += 1;
            continue;
        }
        let mut divisibility_failed = false;
        for r in rs {
            let built = match task.branch {
                Branch::Product => construct_product(&seed, specs, r, &task.mu, config.verify),
                Branch::Quotient => construct_quotient(&seed, specs, r, &task.mu, config.verify),
                _ => unreachable!(),
            };
            let result = match built {
                Ok(result) => result,
                Err(Error::NotDivisible) => {
                    divisibility_failed = true;
                    break;
                }
                Err(Error::PreconditionFailed(_)) => break,
                Err(other) => return Err(other),
            };
            stats.constructed += 1;
            for &e in &e_list {
                let final_f = match e {
                    None => result.f.clone(),
                    Some(e) => result.f.compose_power(e)?,
                };
                let mut verified = result.verified;
                if let (true, Some(e)) = (config.verify, e) {
                    if !is_permutation_bruteforce_with_cap(&final_f, DEFAULT_RESOURCE_CAP)? {
                        return Err(Error::Inconsistency(format!(
                            "composition with X^{e} broke a verified permutation, r = {r}"
                        )));
                    }
                    verified = true;
                }
                let canonical = canonicalize(&final_f)?;
                let key = format!("{}|{}", task.k, canonical);
                let finding = Finding {
                    p: 2,
                    k: task.k,
                    q,
                    r,
                    e,
                    branch: task.branch.tag().to_string(),
                    variant: task.variant.number(),
                    ell: task.ell,
                    multipliers: specs.iter().map(|sp| (sp.s(), sp.t())).collect(),
                    b: result.b.to_string(),
                    f: final_f.to_string(),
                    terms_b: result.b.term_count(),
                    terms_f: final_f.term_count(),
                    verified,
                    seed: result.seed_provenance.tag().to_string(),
                };
                candidates.push((key, finding));
            }
        }
        if divisibility_failed {
            stats.skipped += 1;
        }
    }
    Ok(TaskOutput { stats, candidates })
}

/// Run the sweep and stream findings to the config's output path.
///
/// Construction work runs in parallel across (k, ℓ, variant, branch) tasks;
/// outputs are merged in enumeration order, deduplicated on canonical form,
/// filtered by the sparsity threshold, and written one JSON line each.
pub fn run_search(config: &SearchConfig) -> Result<SearchStats> {
    // With verification on, every constructed polynomial is brute-forced
    // over its field, so the whole field must fit under the cap.
    for &k in &config.k_range {
        let order = 1u64 << (2 * k);
        if config.verify && order > DEFAULT_RESOURCE_CAP {
            return Err(Error::ResourceLimit(format!(
                "verify=on needs field order <= {DEFAULT_RESOURCE_CAP}, but k = {k} gives q^2 = {order}"
            )));
        }
    }

    let tuples = multiplier_tuples(config.max_m, config.max_s, config.max_t);

    let mut tasks = Vec::new();
    for &k in &config.k_range {
        let field = make_field(2, 2 * k as usize)?;
        let mu = MuGroup::enumerate(&field)?;
        for &ell in &config.ell_range {
            for &variant in &config.variants {
                for &branch in &config.branches {
                    tasks.push(Task {
                        k,
                        ell,
                        variant,
                        branch,
                        mu: mu.clone(),
                    });
                }
            }
        }
    }

    let outputs: Result<Vec<TaskOutput>> = tasks
        .par_iter()
        .map(|task| run_task(config, task, &tuples))
        .collect();
    let outputs = outputs?;

    let mut stats = SearchStats::default();
    let mut seen: HashSet<String> = HashSet::new();
    let file = File::create(&config.output)?;
    let mut writer = BufWriter::new(file);
    for output in outputs {
        stats.absorb(&output.stats);
        for (key, finding) in output.candidates {
            if !seen.insert(key) {
                stats.duplicates += 1;
                continue;
            }
            if finding.terms_f > config.sparsity_threshold {
                stats.over_threshold += 1;
                continue;
            }
            let line = serde_json::to_string(&finding)
                .map_err(|e| Error::Parse(format!("serialize finding: {e}")))?;
            writeln!(writer, "{line}")?;
            stats.emitted += 1;
        }
    }
    writer.flush()?;
    Ok(stats)
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Aggregated view of a findings file.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub total: u64,
    /// (q, branch, terms_f) -> count, sorted.
    pub counts: Vec<(u64, String, usize, u64)>,
    /// Per q: the first finding with the minimal term count.
    pub sparsest: Vec<(u64, Finding)>,
}

/// Read a findings file back and aggregate it: counts by (q, branch,
/// terms_f) and the sparsest finding per q.
pub fn summarize(path: &Path) -> Result<Summary> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut total = 0u64;
    let mut counts: BTreeMap<(u64, String, usize), u64> = BTreeMap::new();
    let mut sparsest: BTreeMap<u64, Finding> = BTreeMap::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let finding: Finding = serde_json::from_str(&line).map_err(|e| Error::ParseRecord {
            line: no + 1,
            msg: e.to_string(),
        })?;
        total += 1;
        *counts
            .entry((finding.q, finding.branch.clone(), finding.terms_f))
            .or_insert(0) += 1;
        match sparsest.get(&finding.q) {
            Some(best) if best.terms_f <= finding.terms_f => {}
            _ => {
                sparsest.insert(finding.q, finding);
            }
        }
    }
    Ok(Summary {
        total,
        counts: counts
            .into_iter()
            .map(|((q, branch, terms), count)| (q, branch, terms, count))
            .collect(),
        sparsest: sparsest.into_iter().collect(),
    })
}

impl std::fmt::Display for Summary {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "findings: {}", self.total)?;
        if self.total == 0 {
            return Ok(());
        }
        writeln!(out)?;
        writeln!(
            out,
            "{:>6}  {:<8}  {:>7}  {:>5}",
            "q", "branch", "terms_f", "count"
        )?;
        for (q, branch, terms, count) in &self.counts {
            writeln!(out, "{q:>6}  {branch:<8}  {terms:>7}  {count:>5}")?;
        }
        writeln!(out)?;
        writeln!(out, "sparsest per q:")?;
        for (q, finding) in &self.sparsest {
            writeln!(
                out,
                "  q={q}: terms_f={} r={} branch={} f={}",
                finding.terms_f, finding.r, finding.branch, finding.f
            )?;
        }
        Ok(())
    }
}
