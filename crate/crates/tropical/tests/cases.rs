//! Invariants of the construction over sampled tableaux of every genus.

use std::collections::BTreeMap;

use g13_core::rational::int;
use g13_tropical::engine::{prove_case, realize, EngineError, Place, ProveOptions};
use g13_tropical::slopes::{enumerate_tableaux, slopes_from_tableau};
use proptest::prelude::*;

fn check_case(genus: usize, index: usize) -> Result<(), TestCaseError> {
    let cases = enumerate_tableaux(genus).unwrap();
    let t = &cases[index % cases.len()];
    let r = prove_case(t, &ProveOptions::default()).unwrap();
    prop_assert_eq!(r.attempts, 1);
    prop_assert_eq!(r.labels.len(), 20);
    prop_assert!(!r.labels.contains(&r.basis.omitted.label()));
    prop_assert!(r.basis.checklist.iter().all(|(_, ok)| *ok), "{:?}", r.basis.checklist);
    prop_assert!(r.plan.z1 <= r.plan.z2);

    // Every function is assigned exactly once, one per loop, the rest on bridges.
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut per_loop: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &r.log.entries {
        *seen.entry(e.function.as_str()).or_default() += 1;
        if let Place::Loop(k) = e.place {
            *per_loop.entry(k).or_default() += 1;
        }
    }
    prop_assert_eq!(seen.len(), 20);
    prop_assert!(seen.values().all(|&n| n == 1));
    prop_assert_eq!(per_loop.len(), genus);
    prop_assert!(per_loop.values().all(|&n| n == 1));

    prop_assert!(r.all_margins_positive());
    prop_assert!(r.theta_divisor.is_effective());
    prop_assert!(r.late_minimizers.is_empty(), "{:?}", r.late_minimizers);

    // The break divisor has one chip per loop plus the rest at the left end.
    let st = slopes_from_tableau(t).unwrap();
    let real = realize(&st, &r.scale_base).unwrap();
    prop_assert_eq!(r.theta_divisor_degree, 2 * real.chips.divisor.degree());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn genus_13_cases_hold_invariants(i in 0usize..1716) {
        check_case(13, i)?;
    }

    #[test]
    fn genus_12_cases_hold_invariants(i in 0usize..1584) {
        check_case(12, i)?;
    }

    #[test]
    fn genus_11_cases_hold_invariants(i in 0usize..1452) {
        check_case(11, i)?;
    }
}

#[test]
fn insufficient_separation_escalates() {
    let t = &enumerate_tableaux(13).unwrap()[0];
    let r = prove_case(t, &ProveOptions { scale_base: int(3), ..Default::default() }).unwrap();
    assert_eq!(r.attempts, 2);
    assert_eq!(r.scale_base, int(9));
    assert!(r.all_margins_positive());
}

#[test]
fn exhausted_escalation_reports_the_failure() {
    let t = &enumerate_tableaux(13).unwrap()[0];
    let err = prove_case(t, &ProveOptions { scale_base: int(3), escalations: 0, ..Default::default() }).unwrap_err();
    assert!(matches!(err, EngineError::Builder { .. } | EngineError::Certification { .. }), "{err}");
}
