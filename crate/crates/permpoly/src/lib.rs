//! Permutation polynomials over F_{q²} of the shape X^r·A(X^{q−1}).
//!
//! A polynomial f ∈ F_q[X] is a permutation polynomial if c ↦ f(c) is a
//! bijection of F_q. For f(X) = X^r·A(X^{q−1}) over the quadratic extension
//! F_{q²}, the permutation property reduces to a condition on the subgroup
//! μ_{q+1} of (q+1)-th roots of unity: f permutes F_{q²} iff gcd(r, q−1) = 1
//! and x ↦ x^r·A(x)^{q−1} permutes μ_{q+1}.
//!
//! The crate provides:
//!
//! - [`gf`] — exact arithmetic in prime-power fields F_{p^n};
//! - [`poly`] — sparse polynomial algebra over those fields;
//! - [`mu`] — μ_{q+1} enumeration, the permutation criterion, and the
//!   brute-force oracle that everything else is checked against;
//! - [`construct`] — checked factories that manufacture permutation
//!   polynomials from seed permutations of μ_{q+1} and multiplier products
//!   Σ_{j=0}^{s} X^{jt};
//! - [`search`] — a deterministic parameter sweep that ranks the constructed
//!   permutation polynomials by how few terms they have.

pub mod arith;
pub mod construct;
pub mod gf;
pub mod mu;
pub mod poly;
pub mod search;

pub use construct::{
    construct_product, construct_quotient, construct_s2, multiplier_condition, multiplier_product,
    ord2, smallest_valid_r, transfer_check, trinomial_seed, Branch, ConstructionResult, S2Branch,
    SeedParams, SeedPermutation, SeedProvenance, SeedVariant, TransferCheck,
};
pub use gf::{is_irreducible, make_field, FieldElement, FieldRef, FieldSpec};
pub use mu::{
    candidate_polynomial, is_permutation_bruteforce, is_permutation_bruteforce_with_cap,
    mu_criterion, permutes_mu, MuGroup, DEFAULT_RESOURCE_CAP,
};
pub use poly::{multiplier_poly, MultiplierSpec, Polynomial};
pub use search::{
    canonicalize, run_search, summarize, Finding, RPolicy, SearchConfig, SearchStats, Summary,
};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("division by zero")]
    DivisionByZero,

    /// Exact division was requested but the remainder is nonzero.
    #[error("not divisible: remainder is nonzero")]
    NotDivisible,

    /// Operands belong to different fields.
    #[error("field mismatch: operands belong to different fields")]
    FieldMismatch,

    /// A stated precondition of a construction does not hold; the message
    /// names the violated clause.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// A property that is guaranteed by theory failed computationally.
    /// Seeing this means a bug in this crate, not bad input.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Malformed record in a findings file.
    #[error("parse error at line {line}: {msg}")]
    ParseRecord { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
