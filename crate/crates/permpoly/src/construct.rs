//! Checked factories for permutation polynomials of F_{q²}.
//!
//! The machinery starts from a seed: a pair (v, D) such that
//! X^v·D(X)^{q−1} permutes μ_{q+1}. Multiplying D by multiplier polynomials
//! Σ_{j=0}^{s} X^{jt} transfers the permutation property to a shifted
//! exponent, provided gcd(s+1, q) = 1 and (q+1)/gcd(t, q+1) is coprime to
//! s+1. The product route multiplies the multipliers in; the quotient route
//! divides them out of D. Either way, any positive r with gcd(r, q−1) = 1 in
//! the right residue class mod q+1 yields a permutation X^r·B(X^{q−1}) of
//! F_{q²}.
//!
//! Over characteristic 2 the trinomials D = X^{Q+1}+X+1 (variant 1, needs
//! ord₂(ℓ) ≤ ord₂(k)) and D = X^Q+X+1 (variant 2, needs ord₂(ℓ) ≠ ord₂(k)),
//! with q = 2^k, Q = 2^ℓ and v = Q+1, provide a stock of seeds.
//!
//! Every factory re-verifies its output against the brute-force oracle when
//! the field is small enough; a failure there is a bug, never bad input.

use crate::arith::gcd;
use crate::gf::FieldRef;
use crate::mu::{
    candidate_polynomial, is_permutation_bruteforce_with_cap, permutes_mu, MuGroup,
    DEFAULT_RESOURCE_CAP,
};
use crate::poly::{multiplier_poly, MultiplierSpec, Polynomial};
use crate::{Error, Result};

/// Largest i with 2^i | n.
pub fn ord2(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidArgument("ord2 needs n >= 1".into()));
    }
    Ok(n.trailing_zeros())
}

/// The multiplier admissibility condition: gcd(s+1, q) = 1 and
/// (q+1)/gcd(t, q+1) coprime to s+1.
pub fn multiplier_condition(s: u64, t: u64, q: u64) -> bool {
    gcd(s + 1, q) == 1 && gcd((q + 1) / gcd(t, q + 1), s + 1) == 1
}

/// Product of multiplier polynomials for a spec sequence; the empty
/// sequence gives 1.
pub fn multiplier_product(specs: &[MultiplierSpec], field: &FieldRef) -> Result<Polynomial> {
    let mut prod = Polynomial::one(field);
    for spec in specs {
        prod = prod.mul(&multiplier_poly(spec, field))?;
    }
    Ok(prod)
}

/// Both sides of the multiplier-transfer equivalence, computed
/// independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferCheck {
    /// Does X^r·B(X)^{q−1} permute μ_{q+1}, where B = A·∏ multipliers?
    pub product_side: bool,
    /// Does X^{r−Σsᵢtᵢ}·A(X)^{q−1} permute μ_{q+1} with every multiplier
    /// condition satisfied?
    pub shifted_side: bool,
}

impl TransferCheck {
    pub fn agree(&self) -> bool {
        self.product_side == self.shifted_side
    }
}

/// Evaluate both sides of the transfer equivalence for (r, A, specs).
/// The shifted exponent r − Σsᵢtᵢ may be negative; it is folded mod q+1
/// inside [`permutes_mu`], valid because x^{q+1} = 1 on the subgroup.
pub fn transfer_check(
    r: i64,
    a: &Polynomial,
    specs: &[MultiplierSpec],
    mu: &MuGroup,
) -> Result<TransferCheck> {
    let q = mu.field().quadratic_q()?;
    let b = a.mul(&multiplier_product(specs, a.field())?)?;
    let product_side = permutes_mu(r, &b, mu)?;
    let shift: i64 = specs.iter().map(|sp| (sp.s() * sp.t()) as i64).sum();
    let shifted_side = permutes_mu(r - shift, a, mu)?
        && specs
            .iter()
            .all(|sp| multiplier_condition(sp.s(), sp.t(), q));
    Ok(TransferCheck {
        product_side,
        shifted_side,
    })
}

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

/// Which trinomial family a seed came from, or user-supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedProvenance {
    TrinomialV1,
    TrinomialV2,
    UserSupplied,
}

impl SeedProvenance {
    /// Stable tag used in findings files.
    pub fn tag(&self) -> &'static str {
        match self {
            SeedProvenance::TrinomialV1 => "lemma4-variant-1",
            SeedProvenance::TrinomialV2 => "lemma4-variant-2",
            SeedProvenance::UserSupplied => "user-supplied",
        }
    }
}

/// A verified seed: X^v·D(X)^{q−1} permutes μ_{q+1}.
#[derive(Debug, Clone)]
pub struct SeedPermutation {
    v: i64,
    d: Polynomial,
    provenance: SeedProvenance,
}

impl SeedPermutation {
    /// Wrap a user-supplied (v, D); the permutation property is verified
    /// against `mu` before the seed is accepted.
    pub fn new(v: i64, d: Polynomial, mu: &MuGroup) -> Result<Self> {
        if !permutes_mu(v, &d, mu)? {
            return Err(Error::PreconditionFailed(format!(
                "X^{v}·D(X)^(q-1) does not permute mu_(q+1) for D = {d}"
            )));
        }
        Ok(SeedPermutation {
            v,
            d,
            provenance: SeedProvenance::UserSupplied,
        })
    }

    pub fn v(&self) -> i64 {
        self.v
    }

    pub fn d(&self) -> &Polynomial {
        &self.d
    }

    pub fn provenance(&self) -> SeedProvenance {
        self.provenance
    }
}

/// The two characteristic-2 trinomial families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SeedVariant {
    /// D = X^{Q+1}+X+1; admissible when ord₂(ℓ) ≤ ord₂(k).
    V1,
    /// D = X^Q+X+1; admissible when ord₂(ℓ) ≠ ord₂(k).
    V2,
}

impl SeedVariant {
    pub fn number(&self) -> u8 {
        match self {
            SeedVariant::V1 => 1,
            SeedVariant::V2 => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(SeedVariant::V1),
            2 => Ok(SeedVariant::V2),
            _ => Err(Error::InvalidArgument(format!(
                "variant must be 1 or 2, got {n}"
            ))),
        }
    }

    fn provenance(&self) -> SeedProvenance {
        match self {
            SeedVariant::V1 => SeedProvenance::TrinomialV1,
            SeedVariant::V2 => SeedProvenance::TrinomialV2,
        }
    }
}

/// Parameters (k, ℓ, variant) of a trinomial seed over F_{2^{2k}};
/// q = 2^k, Q = 2^ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedParams {
    k: u32,
    ell: u32,
    variant: SeedVariant,
}

impl SeedParams {
    pub fn new(k: u32, ell: u32, variant: SeedVariant) -> Result<Self> {
        if k < 1 || ell < 1 {
            return Err(Error::InvalidArgument(
                "seed parameters need k >= 1 and ell >= 1".into(),
            ));
        }
        if k > 16 || ell > 62 {
            return Err(Error::InvalidArgument(format!(
                "seed parameters out of supported range (k = {k} <= 16, ell = {ell} <= 62)"
            )));
        }
        Ok(SeedParams { k, ell, variant })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn variant(&self) -> SeedVariant {
        self.variant
    }

    pub fn q(&self) -> u64 {
        1u64 << self.k
    }

    /// Q = 2^ℓ.
    pub fn big_q(&self) -> u64 {
        1u64 << self.ell
    }

    /// The variant condition on the 2-adic valuations of ℓ and k.
    pub fn admissible(&self) -> bool {
        let ok = ord2(self.k as u64).expect("k >= 1");
        let ol = ord2(self.ell as u64).expect("ell >= 1");
        match self.variant {
            SeedVariant::V1 => ol <= ok,
            SeedVariant::V2 => ol != ok,
        }
    }

    /// The trinomial D for this variant, over `field`.
    pub fn trinomial(&self, field: &FieldRef) -> Result<Polynomial> {
        let top = match self.variant {
            SeedVariant::V1 => self.big_q() + 1,
            SeedVariant::V2 => self.big_q(),
        };
        Polynomial::from_indexed_terms(field, &[(top, 1), (1, 1), (0, 1)])
    }
}

/// Build the trinomial seed (v = Q+1, D) over mu's field and verify it
/// permutes μ_{q+1}.
pub fn trinomial_seed(params: &SeedParams, mu: &MuGroup) -> Result<SeedPermutation> {
    let field = mu.field();
    if field.p() != 2 {
        return Err(Error::InvalidArgument(
            "trinomial seeds live in characteristic 2".into(),
        ));
    }
    if field.q() != Some(params.q()) {
        return Err(Error::InvalidArgument(format!(
            "seed wants q = {}, mu group has q = {:?}",
            params.q(),
            field.q()
        )));
    }
    if !params.admissible() {
        let (k, ell) = (params.k, params.ell);
        let clause = match params.variant {
            SeedVariant::V1 => format!(
                "variant 1 requires ord2(ell) <= ord2(k): ord2({ell}) = {} > ord2({k}) = {}",
                ord2(ell as u64)?,
                ord2(k as u64)?
            ),
            SeedVariant::V2 => format!(
                "variant 2 requires ord2(ell) != ord2(k): ord2({ell}) = ord2({k}) = {}",
                ord2(k as u64)?
            ),
        };
        return Err(Error::PreconditionFailed(clause));
    }
    let d = params.trinomial(field)?;
    let v = (params.big_q() + 1) as i64;
    if !permutes_mu(v, &d, mu)? {
        // Guaranteed by theory for admissible parameters.
        return Err(Error::Inconsistency(format!(
            "trinomial seed (k={}, ell={}, variant {}) failed verification",
            params.k,
            params.ell,
            params.variant.number()
        )));
    }
    Ok(SeedPermutation {
        v,
        d,
        provenance: params.variant.provenance(),
    })
}

// ---------------------------------------------------------------------------
// Construction results
// ---------------------------------------------------------------------------

/// Which factory produced a result. Tags are the stable strings used in
/// findings files and on the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Branch {
    /// General product route.
    Product,
    /// General quotient route.
    Quotient,
    /// Product route specialized to a single (s=2, t) multiplier.
    ProductS2,
    /// Quotient route specialized to dividing out X²+X+1.
    QuotientS2,
}

impl Branch {
    pub fn tag(&self) -> &'static str {
        match self {
            Branch::Product => "cor3.1",
            Branch::Quotient => "cor3.2",
            Branch::ProductS2 => "cor5.1",
            Branch::QuotientS2 => "cor5.2",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "cor3.1" => Ok(Branch::Product),
            "cor3.2" => Ok(Branch::Quotient),
            "cor5.1" => Ok(Branch::ProductS2),
            "cor5.2" => Ok(Branch::QuotientS2),
            _ => Err(Error::InvalidArgument(format!(
                "unknown branch tag '{tag}'"
            ))),
        }
    }
}

/// A constructed permutation polynomial f = X^r·B(X^{q−1}) (reduced), with
/// the inputs echoed and an oracle flag.
#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub r: u64,
    pub b: Polynomial,
    pub f: Polynomial,
    pub branch: Branch,
    pub multipliers: Vec<MultiplierSpec>,
    pub seed_v: i64,
    pub seed_d: Polynomial,
    pub seed_provenance: SeedProvenance,
    /// True when the brute-force oracle ran and confirmed f.
    pub verified: bool,
}

fn check_r_preconditions(r: u64, target_residue: i64, q: u64, label: &str) -> Result<()> {
    if r == 0 {
        return Err(Error::PreconditionFailed(
            "r must be a positive integer".into(),
        ));
    }
    if gcd(r, q - 1) != 1 {
        return Err(Error::PreconditionFailed(format!(
            "gcd(r, q-1) != 1: r = {r}, q-1 = {}",
            q - 1
        )));
    }
    let m = (q + 1) as i64;
    if (r as i64 - target_residue).rem_euclid(m) != 0 {
        return Err(Error::PreconditionFailed(format!(
            "r !== {label} (mod q+1): r = {r}, {label} = {target_residue}, q+1 = {}",
            q + 1
        )));
    }
    Ok(())
}

fn check_multiplier_conditions(specs: &[MultiplierSpec], q: u64) -> Result<()> {
    for sp in specs {
        if !multiplier_condition(sp.s(), sp.t(), q) {
            return Err(Error::PreconditionFailed(format!(
                "multiplier condition fails for (s={}, t={}): need gcd(s+1, q) = 1 and \
                 gcd((q+1)/gcd(t, q+1), s+1) = 1 with q = {q}",
                sp.s(),
                sp.t()
            )));
        }
    }
    Ok(())
}

fn finish(
    r: u64,
    b: Polynomial,
    branch: Branch,
    specs: &[MultiplierSpec],
    seed: &SeedPermutation,
    verify: bool,
) -> Result<ConstructionResult> {
    let f = candidate_polynomial(r, &b)?;
    let mut verified = false;
    if verify && b.field().order() <= DEFAULT_RESOURCE_CAP {
        if !is_permutation_bruteforce_with_cap(&f, DEFAULT_RESOURCE_CAP)? {
            return Err(Error::Inconsistency(format!(
                "constructed polynomial failed the oracle: r = {r}, B = {b}"
            )));
        }
        verified = true;
    }
    Ok(ConstructionResult {
        r,
        b,
        f,
        branch,
        multipliers: specs.to_vec(),
        seed_v: seed.v,
        seed_d: seed.d.clone(),
        seed_provenance: seed.provenance,
        verified,
    })
}

/// Product route: B = D·∏ multipliers and f = X^r·B(X^{q−1}), for positive
/// r with gcd(r, q−1) = 1 and r ≡ v + Σsᵢtᵢ (mod q+1).
pub fn construct_product(
    seed: &SeedPermutation,
    specs: &[MultiplierSpec],
    r: u64,
    mu: &MuGroup,
    verify: bool,
) -> Result<ConstructionResult> {
    let q = mu.field().quadratic_q()?;
    let shift: i64 = specs.iter().map(|sp| (sp.s() * sp.t()) as i64).sum();
    check_r_preconditions(r, seed.v + shift, q, "v + sum(s_i*t_i)")?;
    check_multiplier_conditions(specs, q)?;
    let b = seed.d.mul(&multiplier_product(specs, seed.d.field())?)?;
    finish(r, b, Branch::Product, specs, seed, verify)
}

/// Quotient route: B = D / ∏ multipliers (exact division required) and
/// f = X^r·B(X^{q−1}), for positive r with gcd(r, q−1) = 1 and
/// r ≡ v − Σsᵢtᵢ (mod q+1).
pub fn construct_quotient(
    seed: &SeedPermutation,
    specs: &[MultiplierSpec],
    r: u64,
    mu: &MuGroup,
    verify: bool,
) -> Result<ConstructionResult> {
    let q = mu.field().quadratic_q()?;
    let shift: i64 = specs.iter().map(|sp| (sp.s() * sp.t()) as i64).sum();
    check_r_preconditions(r, seed.v - shift, q, "v - sum(s_i*t_i)")?;
    check_multiplier_conditions(specs, q)?;
    let b = seed
        .d
        .exact_divide(&multiplier_product(specs, seed.d.field())?)?;
    finish(r, b, Branch::Quotient, specs, seed, verify)
}

/// The two specialized routes with a single s = 2 multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S2Branch {
    /// B = D·(X^{2t}+X^t+1), r ≡ Q+1+2t (mod q+1).
    Product,
    /// B = D/(X²+X+1), r ≡ Q−1 (mod q+1); needs (ℓ even, variant 1) or
    /// (ℓ odd, variant 2).
    Quotient,
}

/// Specialized factory for even k and a single s = 2 multiplier. The
/// product route takes the multiplier shift t; the quotient route divides
/// X²+X+1 out of the trinomial seed.
///
/// For even k, 3 | 2^k − 1, so 3 ∤ q+1 and the multiplier condition for
/// s = 2 holds at every t; that guarantee is re-checked here.
pub fn construct_s2(
    params: &SeedParams,
    branch: S2Branch,
    t: Option<u64>,
    r: u64,
    mu: &MuGroup,
    verify: bool,
) -> Result<ConstructionResult> {
    if !params.k().is_multiple_of(2) {
        return Err(Error::PreconditionFailed(format!(
            "k must be even, got k = {}",
            params.k()
        )));
    }
    let q = params.q();
    match branch {
        S2Branch::Product => {
            let t =
                t.ok_or_else(|| Error::InvalidArgument("the s=2 product branch needs t".into()))?;
            if t == 0 {
                return Err(Error::InvalidArgument("t must be >= 1".into()));
            }
            if !multiplier_condition(2, t, q) {
                return Err(Error::Inconsistency(format!(
                    "multiplier condition (s=2, t={t}) must hold for even k, q = {q}"
                )));
            }
            let seed = trinomial_seed(params, mu)?;
            let specs = [MultiplierSpec::new(2, t)?];
            let result = construct_product(&seed, &specs, r, mu, verify)?;
            Ok(ConstructionResult {
                branch: Branch::ProductS2,
                ..result
            })
        }
        S2Branch::Quotient => {
            if t.is_some() {
                return Err(Error::InvalidArgument(
                    "the s=2 quotient branch takes no t".into(),
                ));
            }
            let ell_even = params.ell().is_multiple_of(2);
            let allowed = match params.variant() {
                SeedVariant::V1 => ell_even,
                SeedVariant::V2 => !ell_even,
            };
            if !allowed {
                return Err(Error::PreconditionFailed(format!(
                    "quotient branch requires (ell even with variant 1) or (ell odd with \
                     variant 2): ell = {}, variant = {}",
                    params.ell(),
                    params.variant().number()
                )));
            }
            if !multiplier_condition(2, 1, q) {
                return Err(Error::Inconsistency(format!(
                    "multiplier condition (s=2, t=1) must hold for even k, q = {q}"
                )));
            }
            let seed = trinomial_seed(params, mu)?;
            let specs = [MultiplierSpec::new(2, 1)?];
            let result = construct_quotient(&seed, &specs, r, mu, verify)?;
            Ok(ConstructionResult {
                branch: Branch::QuotientS2,
                ..result
            })
        }
    }
}

/// Least positive r ≡ target (mod q+1) with gcd(r, q−1) = 1. The scan is
/// bounded by (q−1)(q+1) candidates; when q is odd and the whole residue
/// class shares a factor with q−1 no such r exists and the scan reports it.
pub fn smallest_valid_r(target: i64, q: u64) -> Result<u64> {
    let m = q + 1;
    let start = target.rem_euclid(m as i64) as u64;
    let mut r = if start == 0 { m } else { start };
    for _ in 0..(q - 1) * (q + 1) + 1 {
        if gcd(r, q - 1) == 1 {
            return Ok(r);
        }
        r += m;
    }
    Err(Error::PreconditionFailed(format!(
        "no positive r = {target} (mod {m}) has gcd(r, {}) = 1",
        q - 1
    )))
}
