//! Exact arithmetic in prime-power finite fields F_{p^n}.
//!
//! A field is described by a [`FieldSpec`]: the characteristic p, the
//! extension degree n, and a monic irreducible modulus of degree n over F_p.
//! Elements are dense coordinate vectors in the power basis of the modulus.
//! When n = 2k the spec also records q = p^k, the subfield order used by the
//! quadratic-extension machinery in the rest of the crate.
//!
//! Fields stay small by design (p^n ≤ 2^32); coordinates fit in machine
//! integers and no arbitrary-precision arithmetic is involved.

use std::fmt;
use std::sync::Arc;

use crate::arith::{is_prime, prime_factors};
use crate::{Error, Result};

/// Largest field order this crate will construct.
pub const MAX_FIELD_ORDER: u64 = 1 << 32;

// ---------------------------------------------------------------------------
// Dense polynomials over the prime field F_p.
//
// Coefficient vectors are low-to-high and trimmed (empty vec = zero). These
// helpers back both the irreducibility test and element arithmetic.
// ---------------------------------------------------------------------------

pub(crate) mod fp {
    /// Remove trailing zero coefficients.
    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn degree(v: &[u64]) -> Option<usize> {
        if v.is_empty() {
            None
        } else {
            Some(v.len() - 1)
        }
    }

    /// c^e mod p by square-and-multiply.
    pub fn scalar_pow(c: u64, mut e: u64, p: u64) -> u64 {
        let mut base = (c % p) as u128;
        let m = p as u128;
        let mut acc = 1u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as u64
    }

    /// Inverse of c mod p (p prime, c ≠ 0 mod p).
    pub fn scalar_inv(c: u64, p: u64) -> u64 {
        scalar_pow(c, p - 2, p)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut acc = vec![0u128; a.len() + b.len() - 1];
        for (i, &ca) in a.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in b.iter().enumerate() {
                acc[i + j] += ca as u128 * cb as u128;
            }
        }
        let mut out: Vec<u64> = acc.into_iter().map(|v| (v % p as u128) as u64).collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder of a by b (b ≠ 0).
    pub fn divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        let db = b.len() - 1;
        let lead_inv = scalar_inv(b[db], p);
        let mut rem = a.to_vec();
        trim(&mut rem);
        if rem.len() <= db && rem.len() < b.len() {
            return (Vec::new(), rem);
        }
        let mut quot = vec![0u64; rem.len().saturating_sub(db)];
        while rem.len() > db {
            let dr = rem.len() - 1;
            let c = rem[dr] as u128 * lead_inv as u128 % p as u128;
            let c = c as u64;
            quot[dr - db] = c;
            for (i, &bc) in b.iter().enumerate() {
                let sub = c as u128 * bc as u128 % p as u128;
                let cur = rem[dr - db + i] as u128;
                rem[dr - db + i] = ((cur + p as u128 - sub) % p as u128) as u64;
            }
            trim(&mut rem);
        }
        trim(&mut quot);
        (quot, rem)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        divmod(a, m, p).1
    }

    /// base^e mod m.
    pub fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// X^(p^times) mod m, by iterating the p-th power map.
    pub fn frobenius_power_of_x(times: usize, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[0, 1], m, p);
        for _ in 0..times {
            acc = powmod(&acc, p, m, p);
        }
        acc
    }

    /// Monic gcd.
    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            if lead != 1 {
                let inv = scalar_inv(lead, p);
                for c in &mut a {
                    *c = (*c as u128 * inv as u128 % p as u128) as u64;
                }
            }
        }
        a
    }

    /// Inverse of a mod m (extended Euclid). None when gcd(a, m) is not
    /// constant, which cannot happen for irreducible m and a ≢ 0.
    pub fn inverse_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        let mut r0 = m.to_vec();
        let mut r1 = rem(a, m, p);
        let mut t0: Vec<u64> = Vec::new();
        let mut t1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = divmod(&r0, &r1, p);
            let qt = mul(&q, &t1, p);
            let mut t2 = Vec::with_capacity(t0.len().max(qt.len()));
            for i in 0..t0.len().max(qt.len()) {
                let x = *t0.get(i).unwrap_or(&0);
                let y = *qt.get(i).unwrap_or(&0);
                t2.push((x + p - y) % p);
            }
            trim(&mut t2);
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t2;
        }
        if r0.len() != 1 {
            return None;
        }
        let inv = scalar_inv(r0[0], p);
        let mut out: Vec<u64> = t0
            .iter()
            .map(|&c| (c as u128 * inv as u128 % p as u128) as u64)
            .collect();
        trim(&mut out);
        Some(rem(&out, m, p))
    }
}

// ---------------------------------------------------------------------------
// Irreducibility and field construction
// ---------------------------------------------------------------------------

fn validate_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("p = {p} is not prime")));
    }
    Ok(())
}

/// Irreducibility of f over F_p.
///
/// Coefficients are low-to-high and must be reduced mod p. Uses the standard
/// criterion: f of degree d is irreducible iff X^(p^d) ≡ X (mod f) and
/// gcd(X^(p^(d/ℓ)) − X, f) = 1 for every prime ℓ | d.
pub fn is_irreducible(coeffs: &[u64], p: u64) -> Result<bool> {
    validate_prime(p)?;
    if coeffs.iter().any(|&c| c >= p) {
        return Err(Error::InvalidArgument(
            "coefficients must be reduced mod p".into(),
        ));
    }
    let mut f = coeffs.to_vec();
    fp::trim(&mut f);
    match fp::degree(&f) {
        None | Some(0) => Err(Error::InvalidArgument(
            "irreducibility needs degree >= 1".into(),
        )),
        Some(_) => Ok(is_irreducible_unchecked(&f, p)),
    }
}

fn is_irreducible_unchecked(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 1 {
        return true;
    }
    let x = [0u64, 1];
    let sub_x = |poly: &[u64]| -> Vec<u64> {
        let mut out: Vec<u64> = Vec::with_capacity(poly.len().max(2));
        for i in 0..poly.len().max(2) {
            let a = *poly.get(i).unwrap_or(&0);
            let b = *x.get(i).unwrap_or(&0);
            out.push((a + p - b) % p);
        }
        fp::trim(&mut out);
        out
    };
    let top = fp::frobenius_power_of_x(d, f, p);
    if !sub_x(&top).is_empty() {
        return false;
    }
    for ell in prime_factors(d as u64) {
        let mid = fp::frobenius_power_of_x(d / ell as usize, f, p);
        let g = fp::gcd(&sub_x(&mid), f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn checked_order(p: u64, n: usize) -> Result<u64> {
    let mut order: u64 = 1;
    for _ in 0..n {
        order = order
            .checked_mul(p)
            .filter(|&o| o <= MAX_FIELD_ORDER)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "field order p^n = {p}^{n} exceeds the supported bound 2^32"
                ))
            })?;
    }
    Ok(order)
}

/// A constructed finite field F_{p^n}.
///
/// The modulus is the lexicographically smallest monic irreducible of its
/// degree (coefficient tuples read as base-p integers, constant term least
/// significant), so construction is deterministic. When n = 2k the spec also
/// carries k and q = p^k.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    n: usize,
    modulus: Vec<u64>,
    order: u64,
    k: Option<usize>,
    q: Option<u64>,
}

/// Shared handle to a [`FieldSpec`]; elements hold one of these.
pub type FieldRef = Arc<FieldSpec>;

/// Construct F_{p^n} with the lexicographically smallest monic irreducible
/// modulus. Deterministic: the same (p, n) always yields the same field.
pub fn make_field(p: u64, n: usize) -> Result<FieldRef> {
    validate_prime(p)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "extension degree must be >= 1".into(),
        ));
    }
    let order = checked_order(p, n)?;
    // Scan candidate tails (c_0, ..., c_{n-1}) in base-p integer order.
    for m in 0..order {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut mm = m;
        for _ in 0..n {
            coeffs.push(mm % p);
            mm /= p;
        }
        coeffs.push(1);
        if is_irreducible_unchecked(&coeffs, p) {
            let k = if n.is_multiple_of(2) {
                Some(n / 2)
            } else {
                None
            };
            let q = k.map(|k| {
                let mut q = 1u64;
                for _ in 0..k {
                    q *= p;
                }
                q
            });
            return Ok(Arc::new(FieldSpec {
                p,
                n,
                modulus: coeffs,
                order,
                k,
                q,
            }));
        }
    }
    // An irreducible of every degree exists over every F_p.
    Err(Error::Inconsistency(format!(
        "no irreducible of degree {n} over F_{p} found"
    )))
}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Monic modulus, coefficients low-to-high, length n + 1.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// p^n.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Half the degree, when n = 2k.
    pub fn k(&self) -> Option<usize> {
        self.k
    }

    /// q = p^k, when n = 2k.
    pub fn q(&self) -> Option<u64> {
        self.q
    }

    /// q = p^k, or an error when the field has no quadratic structure.
    pub fn quadratic_q(&self) -> Result<u64> {
        self.q.ok_or_else(|| {
            Error::InvalidArgument(format!(
                "F_{{{}^{}}} has odd degree: no quadratic structure",
                self.p, self.n
            ))
        })
    }

    /// The modulus in the textual polynomial grammar, e.g. `1*X^4 + 1*X + 1`.
    pub fn modulus_string(&self) -> String {
        let mut parts = Vec::new();
        for (e, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            parts.push(match e {
                0 => format!("{c}"),
                1 => format!("{c}*X"),
                _ => format!("{c}*X^{e}"),
            });
        }
        parts.join(" + ")
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement {
            field: Arc::clone(self),
            coeffs: vec![0; self.n],
        }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.scalar(1)
    }

    /// The image of the integer c under F_p → F_{p^n}.
    pub fn scalar(self: &Arc<Self>, c: u64) -> FieldElement {
        let mut coeffs = vec![0; self.n];
        coeffs[0] = c % self.p;
        FieldElement {
            field: Arc::clone(self),
            coeffs,
        }
    }

    /// Element from its coordinates in the power basis (length n, each < p).
    pub fn element(self: &Arc<Self>, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} coordinates, got {}",
                self.n,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument(
                "coordinates must be reduced mod p".into(),
            ));
        }
        Ok(FieldElement {
            field: Arc::clone(self),
            coeffs: coeffs.to_vec(),
        })
    }

    /// Element number `idx` in base-p digit order; inverse of
    /// [`FieldElement::index`]. Enumeration order for the whole field.
    pub fn from_index(self: &Arc<Self>, idx: u64) -> Result<FieldElement> {
        if idx >= self.order {
            return Err(Error::InvalidArgument(format!(
                "index {idx} out of range for field of order {}",
                self.order
            )));
        }
        let mut coeffs = Vec::with_capacity(self.n);
        let mut m = idx;
        for _ in 0..self.n {
            coeffs.push(m % self.p);
            m /= self.p;
        }
        Ok(FieldElement {
            field: Arc::clone(self),
            coeffs,
        })
    }

    /// All field elements in index order.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        let this = Arc::clone(self);
        (0..self.order).map(move |i| this.from_index(i).expect("index in range"))
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// An element of a [`FieldSpec`]: coordinates in the power basis of the
/// modulus, each reduced mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FieldRef,
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Position in field enumeration order: coordinates read as a base-p
    /// integer, constant coordinate least significant.
    pub fn index(&self) -> u64 {
        let p = self.field.p;
        let mut v = 0u64;
        for &c in self.coeffs.iter().rev() {
            v = v * p + c;
        }
        v
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let p = self.field.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let p = self.field.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let p = self.field.p;
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.same_field(rhs)?;
        let p = self.field.p;
        let n = self.field.n;
        let mut acc = vec![0u128; 2 * n - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                acc[i + j] += a as u128 * b as u128;
            }
        }
        let mut tmp: Vec<u64> = acc.into_iter().map(|v| (v % p as u128) as u64).collect();
        // reduce by the monic modulus
        for i in (n..tmp.len()).rev() {
            let c = tmp[i];
            if c == 0 {
                continue;
            }
            tmp[i] = 0;
            for j in 0..n {
                let m = self.field.modulus[j];
                if m == 0 {
                    continue;
                }
                let sub = c as u128 * m as u128 % p as u128;
                let cur = tmp[i - n + j] as u128;
                tmp[i - n + j] = ((cur + p as u128 - sub) % p as u128) as u64;
            }
        }
        tmp.truncate(n);
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coeffs: tmp,
        })
    }

    /// Multiplicative inverse, via extended Euclid against the modulus.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut a = self.coeffs.clone();
        fp::trim(&mut a);
        let inv = fp::inverse_mod(&a, &self.field.modulus, self.field.p)
            .ok_or_else(|| Error::Inconsistency("modulus is not irreducible".into()))?;
        let mut coeffs = inv;
        coeffs.resize(self.field.n, 0);
        Ok(FieldElement {
            field: Arc::clone(&self.field),
            coeffs,
        })
    }

    /// a^e with 0^0 = 1; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            if self.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Ok(self.inverse()?.pow_u64(e.unsigned_abs()));
        }
        Ok(self.pow_u64(e as u64))
    }

    /// a^e for nonnegative e; 0^0 = 1 by convention.
    pub fn pow_u64(&self, mut e: u64) -> Self {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}
