//! Algebraic laws of the truncated graded quotient rings.

use g13_core::rational::{frac, int};
use g13_core::ring::{GradedElement, Ring, RingBuilder};
use proptest::prelude::*;

fn ring() -> Ring {
    // Same shape as the Jacobian ring's low-degree part: nilpotent e, g with
    // g² = −2et, plus a free generator.
    RingBuilder::new(8)
        .generator("g", 2)
        .generator("e", 2)
        .generator("t", 2)
        .generator("c", 4)
        .rule(&[("e", 2)], &[])
        .rule(&[("g", 1), ("e", 1)], &[])
        .rule(&[("g", 2)], &[(&[("e", 1), ("t", 1)], int(-2))])
        .build()
        .unwrap()
}

fn element(r: &Ring, coeffs: &[(i64, i64, [u32; 4])]) -> GradedElement {
    coeffs.iter().fold(r.zero(), |acc, (n, d, p)| {
        let m = r
            .monomial(&[("g", p[0]), ("e", p[1]), ("t", p[2]), ("c", p[3])])
            .unwrap();
        acc + m.scale(&frac(*n, *d))
    })
}

fn terms() -> impl Strategy<Value = Vec<(i64, i64, [u32; 4])>> {
    prop::collection::vec(
        (-20i64..20, 1i64..6, [0u32..3, 0u32..2, 0u32..4, 0u32..2]),
        0..6,
    )
}

proptest! {
    #[test]
    fn multiplication_is_commutative_and_associative(a in terms(), b in terms(), c in terms()) {
        let r = ring();
        let (x, y, z) = (element(&r, &a), element(&r, &b), element(&r, &c));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn multiplication_distributes(a in terms(), b in terms(), c in terms()) {
        let r = ring();
        let (x, y, z) = (element(&r, &a), element(&r, &b), element(&r, &c));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    #[test]
    fn series_inverse_is_an_inverse(a in terms(), k in 1i64..9) {
        let r = ring();
        let x = element(&r, &a);
        let unit = r.constant(int(k)) + (&x - &r.constant(x.constant_term()));
        let inv = unit.series_inverse().unwrap();
        prop_assert_eq!(&unit * &inv, r.one());
    }

    #[test]
    fn graded_parts_sum_to_element(a in terms()) {
        let r = ring();
        let x = element(&r, &a);
        let sum = (0..=8).fold(r.zero(), |acc, d| acc + x.graded_part(d));
        prop_assert_eq!(sum, x.clone());
        for d in 0..=8 {
            let p = x.graded_part(d);
            prop_assert!(p.is_zero() || p.homogeneous_degree() == Some(d));
        }
    }

    #[test]
    fn products_respect_grading(a in terms(), b in terms(), da in 0u32..=8, db in 0u32..=8) {
        let r = ring();
        let x = element(&r, &a).graded_part(da);
        let y = element(&r, &b).graded_part(db);
        let p = &x * &y;
        prop_assert!(p.is_zero() || p.homogeneous_degree() == Some(da + db));
    }
}
