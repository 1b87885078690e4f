//! Sparse polynomial algebra over a [`FieldSpec`].
//!
//! The parameter sweeps produce high-degree polynomials with very few terms,
//! so terms live in an exponent → coefficient map; zero coefficients are
//! never stored. Reduction mod X^{q²}−X maps every positive exponent e to
//! ((e−1) mod (q²−1)) + 1 and keeps exponent 0 fixed — the unique convention
//! under which the reduced polynomial induces the same function on all of
//! F_{q²}, including at x = 0.
//!
//! Textual format (CLI and findings files): terms `c*X^e` joined by ` + `
//! with exponents strictly decreasing, coefficients rendered as base-p
//! coordinate integers; exponent 1 prints as `c*X`, exponent 0 as `c`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::gf::{FieldElement, FieldRef};
use crate::{Error, Result};

/// One (s, t) pair describing the multiplier polynomial Σ_{j=0}^{s} X^{jt}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiplierSpec {
    s: u64,
    t: u64,
}

impl MultiplierSpec {
    pub fn new(s: u64, t: u64) -> Result<Self> {
        if s < 1 || t < 1 {
            return Err(Error::InvalidArgument(format!(
                "multiplier spec needs s >= 1 and t >= 1, got (s={s}, t={t})"
            )));
        }
        Ok(MultiplierSpec { s, t })
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn t(&self) -> u64 {
        self.t
    }
}

/// Σ_{j=0}^{s} X^{jt}: s + 1 terms, all with coefficient 1.
pub fn multiplier_poly(spec: &MultiplierSpec, field: &FieldRef) -> Polynomial {
    let mut terms = BTreeMap::new();
    for j in 0..=spec.s {
        terms.insert(j * spec.t, field.one());
    }
    Polynomial {
        field: Arc::clone(field),
        terms,
    }
}

/// A polynomial over a [`FieldSpec`], sparse exponent → coefficient map.
/// Stored coefficients are nonzero; the zero polynomial has no terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: FieldRef,
    terms: BTreeMap<u64, FieldElement>,
}

impl Polynomial {
    pub fn zero(field: &FieldRef) -> Self {
        Polynomial {
            field: Arc::clone(field),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: &FieldRef) -> Self {
        Self::constant(field.one())
    }

    /// The monomial X.
    pub fn x(field: &FieldRef) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(1, field.one());
        Polynomial {
            field: Arc::clone(field),
            terms,
        }
    }

    pub fn constant(c: FieldElement) -> Self {
        let field = Arc::clone(c.field());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        Polynomial { field, terms }
    }

    pub fn monomial(e: u64, c: FieldElement) -> Self {
        let field = Arc::clone(c.field());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Polynomial { field, terms }
    }

    /// Build from (exponent, coefficient) pairs; repeated exponents are
    /// summed, zero coefficients dropped.
    pub fn from_terms(field: &FieldRef, pairs: &[(u64, FieldElement)]) -> Result<Self> {
        let mut out = Polynomial::zero(field);
        for (e, c) in pairs {
            if c.field() != field && !Arc::ptr_eq(c.field(), field) {
                return Err(Error::FieldMismatch);
            }
            out.add_term(*e, c.clone())?;
        }
        Ok(out)
    }

    /// Build from (exponent, coefficient-index) pairs; handy for literals.
    pub fn from_indexed_terms(field: &FieldRef, pairs: &[(u64, u64)]) -> Result<Self> {
        let mut out = Polynomial::zero(field);
        for &(e, idx) in pairs {
            out.add_term(e, field.from_index(idx)?)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, e: u64, c: FieldElement) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(old) => {
                let sum = old.add(&c)?;
                if !sum.is_zero() {
                    self.terms.insert(e, sum);
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<u64, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coefficient(&self) -> Option<&FieldElement> {
        self.terms.values().next_back()
    }

    /// Number of stored (nonzero-coefficient) terms. Callers that want the
    /// canonical sparsity must reduce first.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Σ cᵢ·x^{eᵢ}; the empty polynomial evaluates to 0.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.field && !Arc::ptr_eq(x.field(), &self.field) {
            return Err(Error::FieldMismatch);
        }
        let mut acc = self.field.zero();
        for (&e, c) in &self.terms {
            acc = acc.add(&c.mul(&x.pow_u64(e))?)?;
        }
        Ok(acc)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.neg())?;
        }
        Ok(out)
    }

    /// Convolution product; zero coefficients are dropped as they collapse.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let mut out = Polynomial::zero(&self.field);
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                let e = e1
                    .checked_add(e2)
                    .ok_or_else(|| Error::InvalidArgument("exponent overflow in product".into()))?;
                out.add_term(e, c1.mul(c2)?)?;
            }
        }
        Ok(out)
    }

    /// Multiply every coefficient by c.
    pub fn scaled(&self, c: &FieldElement) -> Result<Self> {
        let mut out = Polynomial::zero(&self.field);
        for (&e, coeff) in &self.terms {
            out.add_term(e, coeff.mul(c)?)?;
        }
        Ok(out)
    }

    /// Exact quotient `self / den`, or [`Error::NotDivisible`] when the
    /// remainder is nonzero. The quotient is re-multiplied against the
    /// divisor before being returned.
    pub fn exact_divide(&self, den: &Self) -> Result<Self> {
        self.same_field(den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let den_deg = den.degree().expect("nonzero");
        let den_lead_inv = den.leading_coefficient().expect("nonzero").inverse()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.field);
        while let Some(rem_deg) = rem.degree() {
            if rem_deg < den_deg {
                return Err(Error::NotDivisible);
            }
            let c = rem
                .leading_coefficient()
                .expect("nonzero")
                .mul(&den_lead_inv)?;
            let e = rem_deg - den_deg;
            for (&de, dc) in &den.terms {
                rem.add_term(de + e, dc.mul(&c)?.neg())?;
            }
            quot.add_term(e, c)?;
        }
        if quot.mul(den)? != *self {
            return Err(Error::Inconsistency(
                "exact_divide: quotient times divisor does not reproduce the dividend".into(),
            ));
        }
        Ok(quot)
    }

    /// Reduce mod X^{q²}−X: exponent 0 stays, every e > 0 becomes
    /// ((e−1) mod (q²−1)) + 1, colliding coefficients are summed. The result
    /// induces the same function on F_{q²} and has all exponents < q².
    pub fn reduce_mod_field(&self) -> Result<Self> {
        self.field.quadratic_q()?;
        let m = self.field.order() - 1;
        let mut out = Polynomial::zero(&self.field);
        for (&e, c) in &self.terms {
            let ee = if e == 0 { 0 } else { ((e - 1) % m) + 1 };
            out.add_term(ee, c.clone())?;
        }
        Ok(out)
    }

    /// f(X^e) followed by reduction mod X^{q²}−X. Requires e ≥ 1.
    pub fn compose_power(&self, exponent: u64) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::InvalidArgument(
                "compose_power needs exponent >= 1".into(),
            ));
        }
        self.field.quadratic_q()?;
        let m = (self.field.order() - 1) as u128;
        let mut out = Polynomial::zero(&self.field);
        for (&e, c) in &self.terms {
            let prod = e as u128 * exponent as u128;
            let ee = if prod == 0 {
                0
            } else {
                (((prod - 1) % m) + 1) as u64
            };
            out.add_term(ee, c.clone())?;
        }
        Ok(out)
    }

    /// Parse the textual grammar produced by [`Display`]. Liberal in what it
    /// accepts: whitespace is free, `X^e` without a coefficient means 1, and
    /// repeated exponents are summed.
    pub fn parse(text: &str, field: &FieldRef) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::Parse("empty polynomial text".into()));
        }
        let mut out = Polynomial::zero(field);
        for raw in text.split('+') {
            let part = raw.trim();
            if part.is_empty() {
                return Err(Error::Parse(format!("empty term in '{text}'")));
            }
            let (coeff_text, exp_text) = match part.split_once('*') {
                Some((c, x)) => (Some(c.trim()), Some(x.trim())),
                None => {
                    if part.starts_with('X') {
                        (None, Some(part))
                    } else {
                        (Some(part), None)
                    }
                }
            };
            let coeff_idx: u64 = match coeff_text {
                None => 1,
                Some(c) => c
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient '{c}'")))?,
            };
            let exponent: u64 = match exp_text {
                None => 0,
                Some(x) => {
                    let rest = x
                        .strip_prefix('X')
                        .ok_or_else(|| Error::Parse(format!("bad term '{part}'")))?;
                    if rest.is_empty() {
                        1
                    } else {
                        let digits = rest
                            .strip_prefix('^')
                            .ok_or_else(|| Error::Parse(format!("bad term '{part}'")))?
                            .trim();
                        digits
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad exponent '{digits}'")))?
                    }
                }
            };
            if coeff_idx >= field.order() {
                return Err(Error::Parse(format!(
                    "coefficient {coeff_idx} out of range for field of order {}",
                    field.order()
                )));
            }
            out.add_term(exponent, field.from_index(coeff_idx)?)
                .map_err(|e| Error::Parse(format!("{e}")))?;
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{}", c.index())?,
                1 => write!(f, "{}*X", c.index())?,
                _ => write!(f, "{}*X^{}", c.index(), e)?,
            }
        }
        Ok(())
    }
}
