//! Property tests for the polynomial layer: structural invariants that
//! should hold for arbitrary inputs, not just the worked examples.

use permpoly::{canonicalize, is_permutation_bruteforce, make_field, FieldRef, Polynomial};
use proptest::prelude::*;

fn f16() -> FieldRef {
    make_field(2, 4).unwrap()
}

fn f9() -> FieldRef {
    make_field(3, 2).unwrap()
}

/// Up to eight sparse terms with exponents below 200.
fn sparse_terms(max_coeff: u64) -> impl Strategy<Value = Vec<(u64, u64)>> {
    prop::collection::vec((0u64..200, 1..max_coeff), 0..8)
}

proptest! {
    #[test]
    fn display_parse_roundtrip(pairs in sparse_terms(16)) {
        let field = f16();
        let p = Polynomial::from_indexed_terms(&field, &pairs).unwrap();
        let reparsed = Polynomial::parse(&p.to_string(), &field).unwrap();
        prop_assert_eq!(reparsed, p);
    }

    #[test]
    fn reduce_is_idempotent_and_bounded(pairs in sparse_terms(16)) {
        let field = f16();
        let p = Polynomial::from_indexed_terms(&field, &pairs).unwrap();
        let once = p.reduce_mod_field().unwrap();
        prop_assert_eq!(once.reduce_mod_field().unwrap(), once.clone());
        if let Some(d) = once.degree() {
            prop_assert!(d < field.order());
        }
        // same induced function
        for x in field.elements() {
            prop_assert_eq!(p.eval(&x).unwrap(), once.eval(&x).unwrap());
        }
    }

    #[test]
    fn compose_power_one_is_reduction(pairs in sparse_terms(16)) {
        let field = f16();
        let p = Polynomial::from_indexed_terms(&field, &pairs).unwrap();
        prop_assert_eq!(p.compose_power(1).unwrap(), p.reduce_mod_field().unwrap());
    }

    #[test]
    fn product_then_exact_division_is_identity(
        a_pairs in sparse_terms(9),
        b_pairs in sparse_terms(9),
    ) {
        let field = f9();
        let a = Polynomial::from_indexed_terms(&field, &a_pairs).unwrap();
        let mut b = Polynomial::from_indexed_terms(&field, &b_pairs).unwrap();
        if b.is_zero() {
            b = Polynomial::one(&field);
        }
        let product = a.mul(&b).unwrap();
        prop_assert_eq!(product.exact_divide(&b).unwrap(), a);
    }

    #[test]
    fn canonical_form_ignores_scaling(pairs in sparse_terms(16), c_idx in 1u64..16) {
        let field = f16();
        let p = Polynomial::from_indexed_terms(&field, &pairs).unwrap();
        prop_assume!(!p.is_zero());
        let c = field.from_index(c_idx).unwrap();
        let scaled = p.scaled(&c).unwrap();
        prop_assert_eq!(canonicalize(&scaled).unwrap(), canonicalize(&p).unwrap());
        // scaling by a nonzero constant never changes the permutation verdict
        prop_assert_eq!(
            is_permutation_bruteforce(&scaled).unwrap(),
            is_permutation_bruteforce(&p).unwrap()
        );
    }

    #[test]
    fn addition_is_commutative_and_mul_distributes(
        a_pairs in sparse_terms(9),
        b_pairs in sparse_terms(9),
        c_pairs in sparse_terms(9),
    ) {
        let field = f9();
        let a = Polynomial::from_indexed_terms(&field, &a_pairs).unwrap();
        let b = Polynomial::from_indexed_terms(&field, &b_pairs).unwrap();
        let c = Polynomial::from_indexed_terms(&field, &c_pairs).unwrap();
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
