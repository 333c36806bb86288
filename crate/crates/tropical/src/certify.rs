//! Exact lower envelopes: `min_combination` and independence certificates.
//!
//! Both operations refine every edge at the union of the breakpoints of the
//! input functions. On each resulting interval every function is a line, and
//! the lower envelope of finitely many lines is computed exactly, including
//! the crossing points. Functions that cannot reach the minimum anywhere on
//! an edge (their minimum exceeds the smallest maximum) are pruned first.

use g13_core::rational::{self, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, GraphPoint};
use crate::plf::{EdgeFunction, PlError, PlFunction};

/// A proof that `min_i (ψ_i + b_i)` is a tropical independence: every function
/// attains the minimum alone at its witness point, by the stated margin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub entries: Vec<CertificateEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    /// Position of the function in the input list.
    pub function: usize,
    #[serde(with = "rational::serde_str")]
    pub coefficient: Rational,
    pub witness: GraphPoint,
    /// Gap between the second-smallest and the smallest value at the witness.
    #[serde(with = "rational::serde_str")]
    pub margin: Rational,
}

impl IndependenceCertificate {
    pub fn min_margin(&self) -> Option<Rational> {
        self.entries.iter().map(|e| e.margin.clone()).min()
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.entries.len()];
        for e in &self.entries {
            out[e.function] = e.coefficient.clone();
        }
        out
    }
}

/// Why certification failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationFailure {
    /// Functions that never achieve the minimum uniquely.
    pub never_unique: Vec<usize>,
}

/// A line `value + slope·(x − origin)` on an interval, tagged with its function.
#[derive(Clone, Debug)]
struct Line {
    function: usize,
    value: Rational,
    slope: i64,
}

/// One maximal piece of the envelope on an interval.
#[derive(Clone, Debug)]
struct Piece {
    /// Offsets relative to the interval origin.
    from: Rational,
    to: Rational,
    /// Value and slope of the minimizing line at `from`.
    value: Rational,
    slope: i64,
    /// All functions realizing the piece (more than one means a tie).
    functions: Vec<usize>,
}

/// Lower envelope of `lines` (values given at offset 0) on `[0, width]`.
fn envelope(lines: &[Line], width: &Rational) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let mut pos = Rational::zero();
    let value_at = |l: &Line, t: &Rational| rational::add(&l.value, &rational::mul_int(t, l.slope));
    // Pick the minimizing line at `pos`, preferring the smallest slope.
    let pick = |t: &Rational| -> (Rational, i64) {
        let mut best: Option<(Rational, i64)> = None;
        for l in lines {
            let v = value_at(l, t);
            let better = match &best {
                None => true,
                Some((bv, bs)) => v < *bv || (v == *bv && l.slope < *bs),
            };
            if better {
                best = Some((v, l.slope));
            }
        }
        best.expect("nonempty")
    };
    while pos < *width {
        let (v0, s0) = pick(&pos);
        let functions: Vec<usize> = lines
            .iter()
            .filter(|l| l.slope == s0 && value_at(l, &pos) == v0)
            .map(|l| l.function)
            .collect();
        // Next crossing: a line with a smaller slope catching up.
        let mut next = width.clone();
        for l in lines.iter().filter(|l| l.slope < s0) {
            let gap = rational::sub(&value_at(l, &pos), &v0);
            let t = rational::add(&pos, &rational::div_int(&gap, s0 - l.slope));
            if t < next {
                next = t;
            }
        }
        pieces.push(Piece { from: pos.clone(), to: next.clone(), value: v0, slope: s0, functions });
        pos = next;
    }
    pieces
}

/// Per-edge data: each kept function's restriction, with its coefficient.
struct EdgeView<'a> {
    kept: Vec<(usize, &'a EdgeFunction, &'a Rational)>,
}

fn edge_view<'a>(fs: &'a [PlFunction], bs: &'a [Rational], e: EdgeId) -> EdgeView<'a> {
    let restr: Vec<(usize, &EdgeFunction, &Rational)> =
        fs.iter().enumerate().map(|(i, f)| (i, f.edge(e), &bs[i])).collect();
    let ranges: Vec<(Rational, Rational)> = restr
        .iter()
        .map(|(_, ef, b)| {
            let (lo, hi) = ef.range();
            (rational::add(lo, b), rational::add(hi, b))
        })
        .collect();
    let bound = ranges.iter().map(|r| &r.1).min().expect("nonempty").clone();
    let kept = restr.into_iter().zip(&ranges).filter(|(_, r)| r.0 <= bound).map(|(x, _)| x).collect();
    EdgeView { kept }
}

/// Runs `visit(interval start, pieces)` over the refined intervals of edge `e`.
fn scan_edge<'a, F: FnMut(&Rational, Vec<Piece>)>(view: &EdgeView<'a>, length: &Rational, mut visit: F) {
    let mut cuts: Vec<&Rational> = view.kept.iter().flat_map(|(_, ef, _)| ef.breakpoints()).collect();
    cuts.sort();
    cuts.dedup();
    let zero = Rational::zero();
    let mut starts: Vec<&Rational> = vec![&zero];
    starts.extend(cuts);
    let mut cursor = vec![0usize; view.kept.len()];
    for (n, x0) in starts.iter().enumerate() {
        let x1 = starts.get(n + 1).copied().unwrap_or(length);
        let width = rational::sub(x1, x0);
        let lines: Vec<Line> = view
            .kept
            .iter()
            .zip(cursor.iter_mut())
            .map(|((i, ef, b), c)| {
                while *c + 1 < ef.segment_count() && ef.segment_start(*c + 1) <= *x0 {
                    *c += 1;
                }
                let s = ef.segment_slope(*c);
                let v = rational::add(&rational::affine(ef.segment_value(*c), x0, ef.segment_start(*c), s), b);
                Line { function: *i, value: v, slope: s }
            })
            .collect();
        visit(x0, envelope(&lines, &width));
    }
}

fn check_inputs(fs: &[PlFunction], bs: &[Rational]) -> Result<(), PlError> {
    if fs.is_empty() {
        return Err(PlError::Empty);
    }
    if fs.len() != bs.len() {
        return Err(PlError::LengthMismatch(fs.len(), bs.len()));
    }
    if fs.iter().any(|f| !f.same_graph(&fs[0])) {
        return Err(PlError::GraphMismatch);
    }
    Ok(())
}

/// The pointwise minimum `min_i (ψ_i + b_i)`, with exact crossing points.
pub fn min_combination(fs: &[PlFunction], bs: &[Rational]) -> Result<PlFunction, PlError> {
    check_inputs(fs, bs)?;
    let graph = fs[0].graph().clone();
    let mut segments = Vec::with_capacity(graph.edge_count());
    let mut left_value = None;
    for e in graph.edges() {
        let view = edge_view(fs, bs, e);
        let mut pieces: Vec<(Rational, i64)> = Vec::new();
        scan_edge(&view, graph.length_ref(e), |x0, env| {
            for p in env {
                if left_value.is_none() {
                    left_value = Some(p.value.clone());
                }
                if pieces.last().map(|l| l.1) != Some(p.slope) {
                    pieces.push((rational::add(x0, &p.from), p.slope));
                }
            }
        });
        segments.push(pieces);
    }
    PlFunction::from_segments(graph, left_value.expect("nonempty graph"), segments)
}

/// For every function, the best point on `edges` where `ψ_i + b_i` is the
/// unique minimum: the midpoint of the envelope piece with the largest gap
/// to the next function. `None` if the function is never the unique minimum
/// there. Gaps are exact at the returned points.
pub fn unique_minimum_witnesses(
    fs: &[PlFunction],
    bs: &[Rational],
    edges: &[EdgeId],
) -> Vec<Option<(Rational, GraphPoint)>> {
    let graph = fs[0].graph().clone();
    let mut best: Vec<Option<(Rational, GraphPoint)>> = vec![None; fs.len()];
    for &e in edges {
        let view = edge_view(fs, bs, e);
        scan_edge(&view, graph.length_ref(e), |x0, env| {
            for p in env {
                if p.functions.len() != 1 {
                    continue;
                }
                let i = p.functions[0];
                let mid = rational::div_int(&rational::add(&p.from, &p.to), 2);
                let x = rational::add(x0, &mid);
                let min_here = rational::affine(&p.value, &mid, &p.from, p.slope);
                // Rank candidates against the functions kept on this edge; pruned
                // ones lie strictly above the envelope, and the final gap is exact.
                let margin = view
                    .kept
                    .iter()
                    .filter(|(j, _, _)| *j != i)
                    .map(|(_, ef, b)| rational::add(&ef.value_at(&x), b))
                    .min()
                    .map(|s| rational::sub(&s, &min_here))
                    .unwrap_or_else(|| graph.length(e));
                let improves = match &best[i] {
                    None => true,
                    Some((m, _)) => margin > *m,
                };
                if improves {
                    let witness = graph.point(e, x).expect("point on edge");
                    best[i] = Some((margin, witness));
                }
            }
        });
    }
    for slot in best.iter_mut().flatten() {
        slot.0 = exact_gap(fs, bs, &slot.1);
    }
    best
}

/// For every edge, the functions that attain the minimum on an interval of positive length.
pub fn minimizers_by_edge(fs: &[PlFunction], bs: &[Rational]) -> Vec<(EdgeId, std::collections::BTreeSet<usize>)> {
    let graph = fs[0].graph().clone();
    graph
        .edges()
        .into_iter()
        .map(|e| {
            let view = edge_view(fs, bs, e);
            let mut set = std::collections::BTreeSet::new();
            scan_edge(&view, graph.length_ref(e), |_, env| {
                for p in env {
                    if p.to > p.from {
                        set.extend(p.functions.iter().copied());
                    }
                }
            });
            (e, set)
        })
        .collect()
}

/// Everything one envelope scan yields: the certificate (or its failure),
/// the minimum `min_i (ψ_i + b_i)` and the per-edge minimizers.
#[derive(Clone, Debug)]
pub struct EnvelopeAnalysis {
    pub certificate: Result<IndependenceCertificate, CertificationFailure>,
    pub minimum: PlFunction,
    pub minimizers: Vec<(EdgeId, std::collections::BTreeSet<usize>)>,
}

/// [`certify_independence`], [`min_combination`] and [`minimizers_by_edge`]
/// in a single pass over the edges.
pub fn analyze_envelope(fs: &[PlFunction], bs: &[Rational]) -> Result<EnvelopeAnalysis, PlError> {
    check_inputs(fs, bs)?;
    let graph = fs[0].graph().clone();
    let mut best: Vec<Option<(Rational, GraphPoint)>> = vec![None; fs.len()];
    let mut segments = Vec::with_capacity(graph.edge_count());
    let mut minimizers = Vec::with_capacity(graph.edge_count());
    let mut left_value = None;
    for e in graph.edges() {
        let view = edge_view(fs, bs, e);
        let mut pieces: Vec<(Rational, i64)> = Vec::new();
        let mut set = std::collections::BTreeSet::new();
        scan_edge(&view, graph.length_ref(e), |x0, env| {
            for p in env {
                if left_value.is_none() {
                    left_value = Some(p.value.clone());
                }
                if pieces.last().map(|l| l.1) != Some(p.slope) {
                    pieces.push((rational::add(x0, &p.from), p.slope));
                }
                if p.to > p.from {
                    set.extend(p.functions.iter().copied());
                }
                if p.functions.len() != 1 {
                    continue;
                }
                let i = p.functions[0];
                let mid = rational::div_int(&rational::add(&p.from, &p.to), 2);
                let x = rational::add(x0, &mid);
                let min_here = rational::affine(&p.value, &mid, &p.from, p.slope);
                let margin = view
                    .kept
                    .iter()
                    .filter(|(j, _, _)| *j != i)
                    .map(|(_, ef, b)| rational::add(&ef.value_at(&x), b))
                    .min()
                    .map(|s| rational::sub(&s, &min_here))
                    .unwrap_or_else(|| graph.length(e));
                let improves = match &best[i] {
                    None => true,
                    Some((m, _)) => margin > *m,
                };
                if improves {
                    best[i] = Some((margin, graph.point(e, x).expect("point on edge")));
                }
            }
        });
        segments.push(pieces);
        minimizers.push((e, set));
    }
    let minimum = PlFunction::from_segments(graph, left_value.expect("nonempty graph"), segments)?;
    let never_unique: Vec<usize> = (0..fs.len()).filter(|&i| best[i].is_none()).collect();
    let certificate = if never_unique.is_empty() {
        let entries = best
            .into_iter()
            .enumerate()
            .map(|(i, slot)| {
                let (_, witness) = slot.expect("checked above");
                let margin = exact_gap(fs, bs, &witness);
                CertificateEntry { function: i, coefficient: bs[i].clone(), witness, margin }
            })
            .collect();
        Ok(IndependenceCertificate { entries })
    } else {
        Err(CertificationFailure { never_unique })
    };
    Ok(EnvelopeAnalysis { certificate, minimum, minimizers })
}

/// Second-smallest minus smallest value of `ψ_j + b_j` at `p` (1 for a single function).
fn exact_gap(fs: &[PlFunction], bs: &[Rational], p: &GraphPoint) -> Rational {
    let mut values: Vec<Rational> = fs.iter().zip(bs).map(|(f, b)| rational::add(&f.eval(p), b)).collect();
    if values.len() < 2 {
        return Rational::from_integer(1.into());
    }
    values.sort();
    rational::sub(&values[1], &values[0])
}

/// Certifies that every `ψ_i + b_i` achieves the minimum alone somewhere.
///
/// For every function the witness is the midpoint of the envelope piece
/// (among all pieces where it is the unique minimizer) with the largest
/// margin; the margin is then recomputed exactly against all functions.
pub fn certify_independence(
    fs: &[PlFunction],
    bs: &[Rational],
) -> Result<Result<IndependenceCertificate, CertificationFailure>, PlError> {
    check_inputs(fs, bs)?;
    let edges = fs[0].graph().edges();
    let best = unique_minimum_witnesses(fs, bs, &edges);
    let never_unique: Vec<usize> = (0..fs.len()).filter(|&i| best[i].is_none()).collect();
    if !never_unique.is_empty() {
        return Ok(Err(CertificationFailure { never_unique }));
    }
    let entries = best
        .into_iter()
        .enumerate()
        .map(|(i, slot)| {
            let (margin, witness) = slot.expect("checked above");
            debug_assert!(margin.is_positive());
            CertificateEntry { function: i, coefficient: bs[i].clone(), witness, margin }
        })
        .collect();
    Ok(Ok(IndependenceCertificate { entries }))
}

/// Re-checks a certificate directly: at each witness the named function must be strictly below all others by the recorded margin.
pub fn verify_certificate(fs: &[PlFunction], cert: &IndependenceCertificate) -> bool {
    if cert.entries.len() != fs.len() {
        return false;
    }
    let bs = cert.coefficients();
    cert.entries.iter().all(|entry| {
        let mine = fs[entry.function].eval(&entry.witness) + &bs[entry.function];
        let others = (0..fs.len())
            .filter(|&j| j != entry.function)
            .map(|j| fs[j].eval(&entry.witness) + &bs[j])
            .min();
        entry.margin.is_positive()
            && match others {
                Some(o) => o - mine == entry.margin,
                None => true,
            }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_admissible_chain, ChainGraph};
    use crate::plf::pl_divisor;
    use g13_core::rational::{frac, int};
    use std::sync::Arc;

    fn graph() -> Arc<ChainGraph> {
        Arc::new(make_admissible_chain(2, &int(10)).unwrap())
    }

    fn on_first_bridge(g: &Arc<ChainGraph>, pieces: Vec<(Rational, i64)>, left: i64) -> PlFunction {
        let mut segs = vec![vec![(int(0), 0)]; g.edge_count()];
        segs[0] = pieces;
        PlFunction::from_segments(g.clone(), int(left), segs).unwrap()
    }

    #[test]
    fn envelope_of_two_lines_crosses_exactly() {
        let lines = vec![
            Line { function: 0, value: int(0), slope: 1 },
            Line { function: 1, value: int(1), slope: -2 },
        ];
        let env = envelope(&lines, &int(5));
        assert_eq!(env.len(), 2);
        assert_eq!(env[0].to, frac(1, 3));
        assert_eq!(env[1].functions, vec![1]);
    }

    #[test]
    fn min_of_shifted_copy_is_itself() {
        let g = graph();
        let a = on_first_bridge(&g, vec![(int(0), 1), (int(50), -1)], 0);
        let m = min_combination(&[a.clone(), a.clone()], &[int(0), int(1)]).unwrap();
        assert_eq!(m, a);
        let single = min_combination(std::slice::from_ref(&a), &[int(3)]).unwrap();
        assert_eq!(single, a.shift(&int(3)));
    }

    #[test]
    fn min_has_crossing_breakpoint() {
        let g = graph();
        let a = on_first_bridge(&g, vec![(int(0), 1)], 0);
        let b = on_first_bridge(&g, vec![(int(0), -1)], 0);
        let m = min_combination(&[a.clone(), b.clone()], &[int(0), int(10)]).unwrap();
        // Crossing where x = 10 − x.
        let bridge = m.edge(EdgeId::Bridge(12));
        assert_eq!(bridge.breakpoints(), &[int(5)]);
        assert_eq!(pl_divisor(&m).degree(), 0);
        let cert = certify_independence(&[a, b], &[int(0), int(10)]).unwrap().unwrap();
        assert_eq!(cert.entries.len(), 2);
        assert!(cert.min_margin().unwrap().is_positive());
    }

    #[test]
    fn identical_functions_fail() {
        let g = graph();
        let a = on_first_bridge(&g, vec![(int(0), 1)], 0);
        let out = certify_independence(&[a.clone(), a.clone()], &[int(0), int(0)]).unwrap();
        assert!(out.is_err());
        let out = certify_independence(&[a.clone(), a.clone()], &[int(0), int(2)]).unwrap();
        assert_eq!(out.unwrap_err().never_unique, vec![1]);
    }

    #[test]
    fn single_function_succeeds() {
        let g = graph();
        let a = on_first_bridge(&g, vec![(int(0), 1)], 0);
        let cert = certify_independence(std::slice::from_ref(&a), &[int(7)]).unwrap().unwrap();
        assert!(verify_certificate(&[a], &cert));
    }
}
