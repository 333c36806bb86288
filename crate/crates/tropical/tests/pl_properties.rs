//! Randomized properties of piecewise-linear functions and their divisors.

use std::sync::Arc;

use g13_core::rational::{frac, int, Rational};
use g13_tropical::certify::{
    analyze_envelope, certify_independence, min_combination, minimizers_by_edge, verify_certificate,
};
use g13_tropical::graph::{make_admissible_chain, ChainGraph, GraphPoint};
use g13_tropical::plf::{pl_divisor, PlFunction};
use proptest::prelude::*;

fn graph() -> Arc<ChainGraph> {
    Arc::new(make_admissible_chain(3, &int(10)).unwrap())
}

type Shape = (i64, Vec<Vec<(u32, i64)>>);

fn shape(edges: usize) -> impl Strategy<Value = Shape> {
    (-50i64..50, prop::collection::vec(prop::collection::vec((0u32..1000, -4i64..=4), 1..5), edges))
}

fn build(g: &Arc<ChainGraph>, (left, edges): &Shape) -> PlFunction {
    PlFunction::from_shape(g.clone(), int(*left), edges).unwrap()
}

fn point(g: &ChainGraph, (edge, thousandths): (usize, u32)) -> GraphPoint {
    let e = g.edges()[edge % g.edge_count()];
    g.point(e, g.length(e) * frac(thousandths.into(), 1000)).unwrap()
}

fn points() -> impl Strategy<Value = Vec<(usize, u32)>> {
    prop::collection::vec((0usize..64, 0u32..=1000), 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn divisor_has_degree_zero(s in shape(graph().edge_count())) {
        prop_assert_eq!(pl_divisor(&build(&graph(), &s)).degree(), 0);
    }

    #[test]
    fn divisor_of_sum_is_sum_of_divisors(a in shape(graph().edge_count()), b in shape(graph().edge_count())) {
        let g = graph();
        let (f, h) = (build(&g, &a), build(&g, &b));
        prop_assert_eq!(pl_divisor(&f.add(&h).unwrap()), &pl_divisor(&f) + &pl_divisor(&h));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn divisor_ignores_constants_and_flips_under_negation(s in shape(graph().edge_count()), c in -100i64..100) {
        let f = build(&graph(), &s);
        prop_assert_eq!(pl_divisor(&f.shift(&int(c))), pl_divisor(&f));
        prop_assert_eq!(pl_divisor(&f.neg()), pl_divisor(&f).scaled(-1));
    }

    #[test]
    fn sums_evaluate_pointwise(a in shape(graph().edge_count()), b in shape(graph().edge_count()), ps in points()) {
        let g = graph();
        let (f, h) = (build(&g, &a), build(&g, &b));
        let sum = f.add(&h).unwrap();
        for p in ps {
            let p = point(&g, p);
            prop_assert_eq!(sum.eval(&p), f.eval(&p) + h.eval(&p));
        }
    }

    #[test]
    fn minimum_is_pointwise_and_single_pass_agrees(
        shapes in prop::collection::vec(shape(graph().edge_count()), 1..5),
        coeffs in prop::collection::vec(-200i64..200, 5),
        ps in points(),
    ) {
        let g = graph();
        let fs: Vec<PlFunction> = shapes.iter().map(|s| build(&g, s)).collect();
        let bs: Vec<Rational> = coeffs[..fs.len()].iter().map(|&b| int(b)).collect();
        let m = min_combination(&fs, &bs).unwrap();
        for p in ps {
            let p = point(&g, p);
            let expected = fs.iter().zip(&bs).map(|(f, b)| f.eval(&p) + b).min().unwrap();
            prop_assert_eq!(m.eval(&p), expected);
        }
        let single = analyze_envelope(&fs, &bs).unwrap();
        prop_assert_eq!(&single.minimum, &m);
        prop_assert_eq!(&single.minimizers, &minimizers_by_edge(&fs, &bs));
        let cert = certify_independence(&fs, &bs).unwrap();
        prop_assert_eq!(&single.certificate, &cert);
        if let Ok(c) = cert {
            prop_assert!(verify_certificate(&fs, &c));
        }
    }
}

#[test]
fn shape_closes_every_loop() {
    let g = graph();
    let edges = g.edge_count();
    let f = PlFunction::from_shape(g.clone(), int(7), &vec![vec![(0, 3), (500, -2)]; edges]).unwrap();
    assert_eq!(f.left_value(), &int(7));
    assert_eq!(pl_divisor(&f).degree(), 0);
}
