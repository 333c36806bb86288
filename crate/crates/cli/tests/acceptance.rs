//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons,
//! wall-clock budgets enforced. Exits nonzero if any criterion fails.

use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use g13_cli::{worked_example_tableau, worked_example_verdicts};
use g13_core::hecke::{bernoulli_table, check_powers_of_h, count_bundles, porteous_resonance_count};
use g13_core::jacobian::{self, compute_virtual_class, top_product};
use g13_core::moduli::{divisor_report, Coefficient, DivClassR13};
use g13_core::rational::{factorial, frac, int, Rational};
use g13_core::ring::{GradedElement, Ring};
use g13_tropical::certify::{certify_independence, verify_certificate};
use g13_tropical::engine::{pair_members, prove_case, realize, CaseReport, ProveOptions};
use g13_tropical::graph::{make_admissible_chain, ChainGraph};
use g13_tropical::plf::{pl_divisor, PlFunction};
use g13_tropical::slopes::{enumerate_tableaux, slopes_from_tableau, Tableau};
use num_traits::Signed;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rayon::prelude::*;

/// Collected failures of one criterion; empty means PASS.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn eq<T: PartialEq + Display>(&mut self, name: &str, expected: T, actual: T) {
        if expected != actual {
            self.0.push(format!("{name}: expected {expected}, got {actual}"));
        }
    }

    fn eq_dbg<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, expected: T, actual: T) {
        if expected != actual {
            self.0.push(format!("{name}: expected {expected:?}, got {actual:?}"));
        }
    }

    fn holds(&mut self, name: &str, ok: bool) {
        if !ok {
            self.0.push(format!("{name}: does not hold"));
        }
    }
}

type Mono<'a> = &'a [(&'a str, u32)];

fn poly(ring: &Ring, terms: &[(i64, i64, Mono<'_>)]) -> GradedElement {
    terms.iter().fold(ring.zero(), |acc, (n, d, m)| acc + ring.monomial(m).expect("known generators").scale(&frac(*n, *d)))
}

fn virtual_class(c: &mut Checks) {
    let (v, r1, r0) = compute_virtual_class().expect("virtual class");
    c.eq("Z intersection (b1 pipeline)", int(259314), r1.intersection);
    c.eq("b1", int(11787), r1.b1);
    c.eq("Y intersection (b0 pipeline)", int(42141), r0.intersection);
    c.eq("b0", int(2247), r0.b0);
    c.eq("a", int(15177), v.a.clone());
    c.eq_dbg("common factor", Some(3.into()), v.content());
    c.eq("a / 3", int(5059), &v.a / int(3));
    c.eq("b0 / 3", int(749), &v.b0 / int(3));
    c.eq("b1 / 3", int(3929), &v.b1 / int(3));
    c.eq("slope", frac(5059, 749), v.slope());
    c.holds("5059·13 < 749·88", v.slope() < frac(88, 13) && 5059 * 13 < 749 * 88);
}

fn intermediate_polynomials(c: &mut Checks) {
    let r = jacobian::ring();
    let (_, r1, r0) = compute_virtual_class().expect("virtual class");
    let d1 = poly(
        r,
        &[
            (-602, 1, &[("c1", 1), ("c5", 1)]),
            (432, 1, &[("c2", 1), ("c4", 1)]),
            (-120, 1, &[("c1", 2), ("c3", 1), ("theta", 1)]),
            (168, 1, &[("c1", 1), ("c3", 1), ("theta", 2)]),
            (-48, 1, &[("c3", 1), ("theta", 3)]),
            (1080, 1, &[("c1", 2), ("c4", 1)]),
            (-1428, 1, &[("c1", 1), ("c4", 1), ("theta", 1)]),
            (-48, 1, &[("c2", 1), ("c3", 1), ("theta", 1)]),
            (384, 1, &[("c4", 1), ("theta", 2)]),
            (344, 1, &[("c5", 1), ("theta", 1)]),
            (-44, 1, &[("c6", 1)]),
        ],
    );
    let d0 = poly(
        r,
        &[
            (-40, 1, &[("c1", 2), ("c3", 1), ("theta", 1)]),
            (56, 1, &[("c1", 1), ("c3", 1), ("theta", 2)]),
            (-16, 1, &[("c3", 1), ("theta", 3)]),
            (300, 1, &[("c1", 2), ("c4", 1)]),
            (-392, 1, &[("c1", 1), ("c4", 1), ("theta", 1)]),
            (-16, 1, &[("c2", 1), ("c3", 1), ("theta", 1)]),
            (104, 1, &[("c4", 1), ("theta", 2)]),
            (-217, 1, &[("c1", 1), ("c5", 1)]),
            (120, 1, &[("c2", 1), ("c4", 1)]),
            (124, 1, &[("c5", 1), ("theta", 1)]),
            (2, 1, &[("c6", 1)]),
        ],
    );
    c.eq("η polynomial for b1", d1, r1.computation.eta_polynomial.clone());
    c.eq("η polynomial for b0", d0, r0.computation.eta_polynomial.clone());
    let shape = |[(a, b), (c_, d), (e, f), (g, h)]: [(i64, i64); 4]| {
        poly(
            r,
            &[
                (a, b, &[("theta", 6)]),
                (c_, d, &[("theta", 5), ("y1", 1)]),
                (e, f, &[("theta", 4), ("y1", 2)]),
                (g, h, &[("theta", 3), ("y1", 3)]),
            ],
        )
    };
    c.eq(
        "θ/y1 reduction for b1",
        shape([(193, 45), (-1271, 30), (1607, 12), (-120, 1)]),
        r1.computation.theta_y1_polynomial.clone(),
    );
    c.eq(
        "θ/y1 reduction for b0",
        shape([(161, 180), (-28, 3), (755, 24), (-30, 1)]),
        r0.computation.theta_y1_polynomial.clone(),
    );
}

fn hecke_count(c: &mut Checks) {
    let b = count_bundles().expect("bundle count");
    c.eq("∫ f", int(-6), b.integral_f);
    c.eq("bundle count", 3, b.count);
    c.eq_dbg("first n ≤ 72 where hⁿ disagrees with the closed form", None, check_powers_of_h(72));
    let listed = [
        (2, frac(1, 6)),
        (4, frac(-1, 30)),
        (6, frac(1, 42)),
        (8, frac(-1, 30)),
        (10, frac(5, 66)),
        (12, frac(-691, 2730)),
        (14, frac(7, 6)),
        (16, frac(-3617, 510)),
        (18, frac(43867, 798)),
        (20, frac(-174611, 330)),
        (22, frac(854513, 138)),
        (24, frac(-236364091, 2730)),
    ];
    let table = bernoulli_table();
    c.eq("Bernoulli values listed", listed.len(), table.len());
    for ((q, expected), (tq, actual)) in listed.iter().zip(&table) {
        c.eq(&format!("B_{q}"), format!("B_{q} = {expected}"), format!("B_{tq} = {actual}"));
    }
}

fn porteous(c: &mut Checks) {
    let p = porteous_resonance_count();
    c.eq("(Porteous, excess, difference)", "(64, 61, 3)".to_string(), format!("({}, {}, {})", p.porteous, p.excess, p.difference));
}

fn downstream_classes(c: &mut Checks) {
    let (v, _, _) = compute_virtual_class().expect("virtual class");
    let rep = divisor_report(&v).expect("divisor report");
    c.eq("ϑ⋆γ λ", frac(11288, 143), rep.gamma.gamma.lambda.clone());
    c.eq_dbg("ϑ⋆γ δ₀", Coefficient::Exact(frac(1582, 143)), rep.gamma.gamma.boundary[0].clone());
    c.eq("MP λ", frac(8218, 143), rep.mp.lambda.clone());
    c.eq_dbg("MP δ₀", Coefficient::Exact(frac(1220, 143)), rep.mp.boundary[0].clone());
    c.eq("MP slope", frac(4109, 610), rep.mp_slope.clone());
    c.holds("MP slope < 88/13", rep.mp_slope < frac(88, 13) && rep.mp_below_brill_noether);
    c.eq_dbg(
        "Theta class",
        DivClassR13::exact(frac(10430, 143), frac(1582, 143), frac(1582, 143), frac(5899, 286)),
        rep.theta.class.clone(),
    );
}

fn kodaira(c: &mut Checks) {
    let (v, _, _) = compute_virtual_class().expect("virtual class");
    let rep = divisor_report(&v).expect("divisor report");
    c.eq("λ-coefficient", frac(4362, 337), rep.kodaira.lambda.clone());
    c.holds("λ-coefficient < 13", rep.kodaira.lambda < int(13));
    c.eq("boundary bounds", 6, rep.kodaira.inequalities.len());
    for ineq in &rep.kodaira.inequalities {
        c.holds(&format!("bound i = {} ({} ≥ 3)", ineq.i, ineq.value), ineq.value >= int(3) && ineq.holds);
    }
    let expected = int(2) * frac(4109, 610) - frac(9, 17);
    c.eq("2·(4109/610) − 9/17", expected.clone(), rep.pointed.value.clone());
    c.holds("2·(4109/610) − 9/17 < 13", expected < int(13) && rep.pointed.holds);
}

/// The 20 functions of a report, rebuilt from the realization at its scale.
fn functions_of(t: &Tableau, r: &CaseReport) -> Vec<PlFunction> {
    let st = slopes_from_tableau(t).expect("slopes");
    let real = realize(&st, &r.scale_base).expect("realization");
    pair_members(&real.phis, &r.basis.retained).expect("members").into_iter().map(|m| m.function).collect()
}

fn independence_suite(c: &mut Checks) {
    for (genus, expected) in [(13, 1716), (12, 1584), (11, 1452)] {
        let cases = enumerate_tableaux(genus).expect("tableaux");
        c.eq(&format!("genus {genus} cases"), expected, cases.len());
        let failures: Vec<String> = cases
            .par_iter()
            .filter_map(|t| {
                let r = match prove_case(t, &ProveOptions::default()) {
                    Ok(r) => r,
                    Err(e) => return Some(format!("{t}: {e}")),
                };
                let fs = functions_of(t, &r);
                let ok = r.all_margins_positive()
                    && r.min_margin.is_positive()
                    && r.late_minimizers.is_empty()
                    && verify_certificate(&fs, &r.certificate);
                (!ok).then(|| format!("{t}: certificate rejected"))
            })
            .collect();
        c.eq(&format!("genus {genus} failures"), 0, failures.len());
        c.0.extend(failures.into_iter().take(5));
    }
}

fn worked_example(c: &mut Checks) {
    let r = prove_case(&worked_example_tableau(), &ProveOptions::default()).expect("worked example");
    for v in worked_example_verdicts(&r) {
        if !v.pass {
            c.0.push(format!("{}: expected {}, got {}", v.name, v.expected, v.actual));
        }
    }
}

/// A random continuous PL function on `g`: a few slope changes per edge.
fn random_function(g: &Arc<ChainGraph>, rng: &mut StdRng) -> PlFunction {
    let shape: Vec<Vec<(u32, i64)>> = (0..g.edge_count())
        .map(|_| (0..rng.random_range(1..5)).map(|_| (rng.random_range(0..1000), rng.random_range(-4..=4))).collect())
        .collect();
    PlFunction::from_shape(g.clone(), int(rng.random_range(-1000..1000)), &shape).expect("valid shape")
}

fn oracles(c: &mut Checks) {
    for i in 0..=6u32 {
        // Independent oracle with machine integers: i!·C(12, i).
        let binom = (0..i as u64).fold(1u64, |b, k| b * (12 - k) / (k + 1));
        let fact: u64 = (1..=i as u64).product();
        c.eq(&format!("evaluate_top({i})"), int((fact * binom) as i64), top_product(i));
        c.eq(&format!("12!/(12−{i})!"), Rational::new(factorial(12), factorial(12 - i)), top_product(i));
    }
    let g = Arc::new(make_admissible_chain(13, &int(10_000)).expect("chain"));
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    let fs: Vec<PlFunction> = (0..1000).map(|_| random_function(&g, &mut rng)).collect();
    let (mut degree, mut sum_rule) = (0, 0);
    for (n, f) in fs.iter().enumerate() {
        if pl_divisor(f).degree() != 0 {
            degree += 1;
        }
        let h = &fs[(n + 1) % fs.len()];
        if pl_divisor(&f.add(h).expect("same graph")) != &pl_divisor(f) + &pl_divisor(h) {
            sum_rule += 1;
        }
    }
    c.eq("functions with deg div ≠ 0", 0, degree);
    c.eq("pairs violating div(f + h) = div f + div h", 0, sum_rule);
}

fn openness(c: &mut Checks) {
    const SCALE: i64 = 1_000_000;
    let cases = enumerate_tableaux(13).expect("tableaux");
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let mut picked: Vec<usize> = Vec::new();
    while picked.len() < 20 {
        let i = rng.random_range(0..cases.len());
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    let mut trials = 0;
    for &i in &picked {
        let t = &cases[i];
        let r = prove_case(t, &ProveOptions::default()).expect("case");
        let fs = functions_of(t, &r);
        let base = r.certificate.coefficients();
        let half = &r.min_margin / int(2);
        for _ in 0..5 {
            // Each coefficient moves by strictly less than half the minimum margin.
            let bs: Vec<Rational> =
                base.iter().map(|b| b + &half * frac(rng.random_range(-(SCALE - 1)..SCALE), SCALE)).collect();
            trials += 1;
            let ok = matches!(certify_independence(&fs, &bs), Ok(Ok(cert)) if cert.entries.iter().all(|e| e.margin.is_positive()) && verify_certificate(&fs, &cert));
            c.holds(&format!("case {t}, perturbation {trials}"), ok);
        }
    }
    c.eq("perturbations", 100, trials);
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn(&mut Checks)); 10] = [
        ("virtual class", 10, virtual_class),
        ("intermediate polynomials", 10, intermediate_polynomials),
        ("Hecke count, powers of h, Bernoulli numbers", 300, hecke_count),
        ("Porteous and excess count", 1, porteous),
        ("pushforward, Mukai-Petri and theta classes", 1, downstream_classes),
        ("Kodaira checks", 1, kodaira),
        ("independence suite, genus 13, 12, 11", 600, independence_suite),
        ("worked example", 5, worked_example),
        ("oracles: top products and PL divisors", 30, oracles),
        ("openness under coefficient perturbation", 60, openness),
    ];
    let mut failed = 0;
    for (n, (title, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut checks = Checks::default();
        if let Err(panic) = catch_unwind(AssertUnwindSafe(|| run(&mut checks))) {
            let msg = panic.downcast_ref::<String>().cloned().or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()));
            checks.0.push(format!("panicked: {}", msg.unwrap_or_default()));
        }
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(*budget) {
            checks.0.push(format!("took {elapsed:.1?}, budget {budget} s"));
        }
        let verdict = if checks.0.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {:>2}: {title} ({elapsed:.2?})", n + 1);
        for f in &checks.0 {
            println!("      {f}");
        }
        failed += usize::from(!checks.0.is_empty());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
