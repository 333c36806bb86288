//! Slope combinatorics: tableaux, slope tables, loop classification, the
//! break divisor `D` and the functions `φ_i ∈ R(D)` realizing a slope table.
//!
//! On loop `γ_k` positions are measured by the circle coordinate
//! `t ∈ [0, C)`, `C = ℓ_k + m_k`: `t = 0` is `v_k`, the top edge is
//! `[0, ℓ_k]`, and the bottom edge is traversed backwards from `w_k`. A
//! function on the loop is determined by its incoming slope `s`, outgoing
//! slope `s'` and its zeros and poles; its derivative jumps by `s − ord` at
//! `v_k`, by `−s' − ord` at `w_k` and by `−ord` elsewhere, and it closes up
//! exactly when the first moment of the jumps is a multiple of `C`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use g13_core::rational::{int, Rational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divisor::GraphDivisor;
use crate::graph::{modulo, ChainGraph, EdgeId, GraphPoint, LAST_BRIDGE, LAST_LOOP};
use crate::plf::PlFunction;

/// Six slopes `s[0] < ⋯ < s[5]`.
pub type Slopes = [i64; 6];

/// Number of slope indices (rank 5 series).
pub const RANK_PLUS_ONE: usize = 6;
/// Starting slopes `s'_0` for the unramified genus-13 series.
pub const INITIAL_SLOPES: Slopes = [-2, -1, 0, 1, 2, 3];
/// Degree of the break divisor `D`.
pub const DIVISOR_DEGREE: i64 = 16;
/// Position of the kink of a decreasing bridge, as a fraction of the bridge.
pub const BRIDGE_KINK: (i64, i64) = (1, 4);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlopeError {
    #[error("tableau is not standard: {0}")]
    NonStandard(String),
    #[error("unsupported genus {0} (expected 11, 12 or 13)")]
    Genus(usize),
    #[error("slopes at {place} are not strictly increasing: {slopes:?}")]
    NotIncreasing { place: String, slopes: Slopes },
    #[error("slope table is inconsistent: {0}")]
    Inconsistent(String),
    #[error("more than one non-ordinary item: {0}")]
    TooManySpecial(String),
    #[error("loop {k} cannot be classified: {reason}")]
    Unclassified { k: usize, reason: String },
    #[error("no chip position on loop {k} is compatible with all slope pairs: {reason}")]
    Infeasible { k: usize, reason: String },
    #[error("index {0} out of range")]
    Index(usize),
}

/// A standard filling of the 2×6 rectangle. Symbols run over `1..=13`
/// minus the lingering symbol; symbols below `14 − g` (for `g < 13`) encode
/// the ramification imposed at the left end and correspond to loops that
/// are not part of the genus-`g` chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tableau {
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    pub lingering: usize,
    pub genus: usize,
}

impl Tableau {
    pub fn first_loop(&self) -> usize {
        14 - self.genus
    }

    pub fn validate(&self) -> Result<(), SlopeError> {
        let bad = |s: String| Err(SlopeError::NonStandard(s));
        if !(11..=13).contains(&self.genus) {
            return Err(SlopeError::Genus(self.genus));
        }
        if self.top.len() != 6 || self.bottom.len() != 6 {
            return bad("each row must have 6 entries".into());
        }
        if !(self.first_loop()..=LAST_LOOP).contains(&self.lingering) {
            return bad(format!("lingering loop {} is not a loop of the chain", self.lingering));
        }
        for row in [&self.top, &self.bottom] {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return bad("rows must increase to the right".into());
            }
        }
        if (0..6).any(|i| self.top[i] >= self.bottom[i]) {
            return bad("columns must increase downward".into());
        }
        let mut symbols: Vec<usize> = self.top.iter().chain(&self.bottom).copied().collect();
        symbols.sort();
        let expected: Vec<usize> = (1..=LAST_LOOP).filter(|&s| s != self.lingering).collect();
        if symbols != expected {
            return bad(format!("symbols must be 1..=13 without the lingering symbol {}", self.lingering));
        }
        Ok(())
    }

    /// Column (0-indexed) of a symbol, if present.
    pub fn column(&self, symbol: usize) -> Option<usize> {
        self.top.iter().chain(&self.bottom).position(|&s| s == symbol).map(|p| p % 6)
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={} l={} top={:?} bottom={:?}", self.genus, self.lingering, self.top, self.bottom)
    }
}

/// All standard fillings of the 2×6 rectangle by `1..=12`, as (top, bottom) rows.
pub fn standard_fillings() -> Vec<(Vec<usize>, Vec<usize>)> {
    fn go(top: &mut Vec<usize>, bottom: &mut Vec<usize>, next: usize, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
        if next > 12 {
            out.push((top.clone(), bottom.clone()));
            return;
        }
        if top.len() < 6 {
            top.push(next);
            go(top, bottom, next + 1, out);
            top.pop();
        }
        if bottom.len() < top.len() {
            bottom.push(next);
            go(top, bottom, next + 1, out);
            bottom.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut Vec::new(), 1, &mut out);
    out
}

/// All vertex-avoiding unramified cases of genus `g`: every standard filling
/// combined with every admissible lingering loop (symbols are shifted past
/// the lingering symbol). Genus 12 and 11 keep the genus-13 filling and
/// drop the first `13 − g` loops, whose symbols then encode the left-end
/// ramification.
pub fn enumerate_tableaux(genus: usize) -> Result<Vec<Tableau>, SlopeError> {
    if !(11..=13).contains(&genus) {
        return Err(SlopeError::Genus(genus));
    }
    let fillings = standard_fillings();
    let mut out = Vec::with_capacity(fillings.len() * genus);
    for lingering in (14 - genus)..=LAST_LOOP {
        let shift = |s: &usize| if *s >= lingering { s + 1 } else { *s };
        for (top, bottom) in &fillings {
            out.push(Tableau {
                top: top.iter().map(shift).collect(),
                bottom: bottom.iter().map(shift).collect(),
                lingering,
                genus,
            });
        }
    }
    Ok(out)
}

/// What happens to the slopes across one loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoopStep {
    /// Slope index `j` increases by one.
    Increase(usize),
    /// No slope changes.
    Linger,
    /// Index `up` increases and index `down` decreases by one.
    Decrease { up: usize, down: usize },
}

/// Slopes along the whole chain: `s_k`, `s'_k` on each loop, and for each
/// bridge its slope at the left end (`s'_{k−1}`) and right end (`s_k`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeTable {
    pub genus: usize,
    /// `s'_{first−1}`: slopes leaving the leftmost point.
    pub initial: Slopes,
    /// `(s_k, s'_k)` for `k = first..=13`.
    pub loops: Vec<(Slopes, Slopes)>,
    /// `(s'_{k−1}, s_k)` for `k = first..=14`; they differ only on a decreasing bridge.
    pub bridges: Vec<(Slopes, Slopes)>,
}

fn check_increasing(place: &str, s: &Slopes) -> Result<(), SlopeError> {
    if s.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(SlopeError::NotIncreasing { place: place.to_string(), slopes: *s })
    }
}

impl SlopeTable {
    /// Builds a table from the starting slopes, one step per loop, and an
    /// optional decreasing bridge `(k, h)` (slope `h` drops by one along `β_k`).
    pub fn from_steps(
        genus: usize,
        initial: Slopes,
        steps: &[LoopStep],
        decreasing_bridge: Option<(usize, usize)>,
    ) -> Result<Self, SlopeError> {
        if !(1..=13).contains(&genus) || steps.len() != genus {
            return Err(SlopeError::Inconsistent(format!("{} steps for genus {genus}", steps.len())));
        }
        let first = 14 - genus;
        check_increasing("the left end", &initial)?;
        let mut current = initial;
        let mut loops = Vec::with_capacity(genus);
        let mut bridges = Vec::with_capacity(genus + 1);
        let bridge = |k: usize, left: Slopes| -> Result<(Slopes, Slopes), SlopeError> {
            let mut right = left;
            if let Some((kb, h)) = decreasing_bridge {
                if kb == k {
                    *right.get_mut(h).ok_or(SlopeError::Index(h))? -= 1;
                    check_increasing(&format!("the right end of bridge {k}"), &right)?;
                }
            }
            Ok((left, right))
        };
        for (n, step) in steps.iter().enumerate() {
            let k = first + n;
            let (l, r) = bridge(k, current)?;
            bridges.push((l, r));
            let mut out = r;
            match *step {
                LoopStep::Increase(j) => *out.get_mut(j).ok_or(SlopeError::Index(j))? += 1,
                LoopStep::Linger => {}
                LoopStep::Decrease { up, down } => {
                    *out.get_mut(up).ok_or(SlopeError::Index(up))? += 1;
                    *out.get_mut(down).ok_or(SlopeError::Index(down))? -= 1;
                }
            }
            check_increasing(&format!("the right of loop {k}"), &out)?;
            loops.push((r, out));
            current = out;
        }
        bridges.push(bridge(LAST_BRIDGE, current)?);
        Ok(Self { genus, initial, loops, bridges })
    }

    pub fn first_loop(&self) -> usize {
        14 - self.genus
    }

    /// `s_k` (entering loop `γ_k`).
    pub fn s(&self, k: usize) -> &Slopes {
        &self.loops[k - self.first_loop()].0
    }

    /// `s'_k` (leaving loop `γ_k`); `s'_{first−1}` is the initial vector.
    pub fn s_out(&self, k: usize) -> &Slopes {
        if k + 1 == self.first_loop() {
            &self.initial
        } else {
            &self.loops[k - self.first_loop()].1
        }
    }

    /// Left and right slopes of bridge `β_k`.
    pub fn bridge(&self, k: usize) -> &(Slopes, Slopes) {
        &self.bridges[k - self.first_loop()]
    }

    /// Final slopes on the last bridge.
    pub fn last(&self) -> &Slopes {
        &self.bridge(LAST_BRIDGE).1
    }
}

/// Slope table of a tableau: starting from `(−2,−1,0,1,2,3)`, the loop
/// carrying the symbol in column `i` increases slope index `5 − i`; the
/// lingering loop changes nothing. Symbols of loops left of the chain are
/// applied to the starting slopes.
pub fn slopes_from_tableau(t: &Tableau) -> Result<SlopeTable, SlopeError> {
    t.validate()?;
    let first = t.first_loop();
    let mut initial = INITIAL_SLOPES;
    for symbol in 1..first {
        let col = t.column(symbol).expect("validated");
        initial[5 - col] += 1;
    }
    let steps: Vec<LoopStep> = (first..=LAST_LOOP)
        .map(|k| match t.column(k) {
            Some(col) => LoopStep::Increase(5 - col),
            None => LoopStep::Linger,
        })
        .collect();
    SlopeTable::from_steps(t.genus, initial, &steps, None)
}

/// `τ(k) = Σ_i (s'_k[i] + 2 − i)`.
pub fn tau(st: &SlopeTable, k: usize) -> i64 {
    st.s_out(k).iter().enumerate().map(|(i, s)| s + 2 - i as i64).sum()
}

/// Classification of a loop or bridge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ItemKind {
    Ordinary,
    Lingering,
    DecreasingLoop { h: usize },
    DecreasingBridge { h: usize },
    Switching { h: usize },
}

/// The single item of positive multiplicity (or ramification), if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Special {
    None,
    Lingering { loop_index: usize },
    DecreasingLoop { loop_index: usize, h: usize },
    DecreasingBridge { bridge_index: usize, h: usize },
    Switching { loop_index: usize, h: usize },
    /// Ramified at `v_14`; `k` is the smallest loop with `s'_k[5] = 6`.
    RightRamified { k: usize },
    /// Extra ramification at the left end; `k` is the largest loop with `s_k[0] = −3`.
    LeftRamified { k: usize },
}

/// A witness that loop `γ_ℓ` switches slope `h`: some function of the
/// series has `s_ℓ(φ) ≤ s_ℓ[h]` and `s'_ℓ(φ) = s'_ℓ[h] + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchingWitness {
    pub loop_index: usize,
    pub h: usize,
    pub incoming: i64,
    pub outgoing: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopProfile {
    pub genus: usize,
    pub loops: Vec<(usize, ItemKind)>,
    pub bridges: Vec<(usize, ItemKind)>,
    pub special: Special,
    /// `τ(k)` for every loop.
    pub tau: Vec<(usize, i64)>,
}

impl LoopProfile {
    pub fn lingering(&self) -> Option<usize> {
        match self.special {
            Special::Lingering { loop_index } => Some(loop_index),
            _ => None,
        }
    }
}

/// Identifies the unique loop, bridge or ramification of positive weight.
pub fn classify(st: &SlopeTable, witness: Option<&SwitchingWitness>) -> Result<LoopProfile, SlopeError> {
    let first = st.first_loop();
    let mut specials: Vec<Special> = Vec::new();
    let mut loops = Vec::new();
    let mut bridges = Vec::new();
    for k in st.bridges.iter().enumerate().map(|(n, _)| first + n) {
        let (l, r) = st.bridge(k);
        let drops: Vec<usize> = (0..6).filter(|&i| r[i] < l[i]).collect();
        let kind = match drops.as_slice() {
            [] if l == r => ItemKind::Ordinary,
            [h] if l[*h] - r[*h] == 1 && (0..6).all(|i| i == *h || l[i] == r[i]) => {
                specials.push(Special::DecreasingBridge { bridge_index: k, h: *h });
                ItemKind::DecreasingBridge { h: *h }
            }
            _ => {
                return Err(SlopeError::Unclassified { k, reason: format!("bridge slopes {l:?} → {r:?}") });
            }
        };
        bridges.push((k, kind));
    }
    for k in first..=LAST_LOOP {
        let (s, t) = (st.s(k), st.s_out(k));
        let ups: Vec<usize> = (0..6).filter(|&i| t[i] == s[i] + 1).collect();
        let downs: Vec<usize> = (0..6).filter(|&i| t[i] == s[i] - 1).collect();
        if (0..6).any(|i| (t[i] - s[i]).abs() > 1) {
            return Err(SlopeError::Unclassified { k, reason: format!("slopes {s:?} → {t:?}") });
        }
        let kind = match (ups.as_slice(), downs.as_slice()) {
            ([_], []) => ItemKind::Ordinary,
            ([], []) => match witness {
                Some(w) if w.loop_index == k => {
                    specials.push(Special::Switching { loop_index: k, h: w.h });
                    ItemKind::Switching { h: w.h }
                }
                _ => {
                    specials.push(Special::Lingering { loop_index: k });
                    ItemKind::Lingering
                }
            },
            ([_], [h]) => {
                specials.push(Special::DecreasingLoop { loop_index: k, h: *h });
                ItemKind::DecreasingLoop { h: *h }
            }
            _ => {
                return Err(SlopeError::Unclassified { k, reason: format!("slopes {s:?} → {t:?}") });
            }
        };
        loops.push((k, kind));
    }
    // Ramification counts against the same budget of one non-ordinary item.
    if let Some(k) = (first..=LAST_LOOP).find(|&k| st.s_out(k)[5] >= 6) {
        specials.push(Special::RightRamified { k });
    }
    if let Some(k) = (first..=LAST_LOOP).rev().find(|&k| st.s(k)[0] <= -3) {
        specials.push(Special::LeftRamified { k });
    }
    if specials.len() > 1 {
        return Err(SlopeError::TooManySpecial(format!("{specials:?}")));
    }
    let tau = (first..=LAST_LOOP).map(|k| (k, tau(st, k))).collect();
    Ok(LoopProfile {
        genus: st.genus,
        loops,
        bridges,
        special: specials.pop().unwrap_or(Special::None),
        tau,
    })
}

/// The break divisor and the chip position on every loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChipSolution {
    pub divisor: GraphDivisor,
    /// Circle coordinate of the chip on each loop `first..=13`.
    pub positions: Vec<Rational>,
}

impl ChipSolution {
    pub fn position(&self, first: usize, k: usize) -> &Rational {
        &self.positions[k - first]
    }
}

/// The generic position used when no slope constraint pins the chip: the
/// midpoint of the largest gap between the vertices and the small
/// multiples `j·m_k` (`|j| ≤ 7`) around the circle.
pub fn generic_position(graph: &ChainGraph, k: usize) -> Rational {
    let c = graph.circumference(k);
    let m = graph.length(EdgeId::Bottom(k));
    let mut marks: Vec<Rational> = (-7i64..=7).map(|j| modulo(&(&m * int(j)), &c)).collect();
    marks.push(Rational::zero());
    marks.push(graph.length(EdgeId::Top(k)));
    marks.sort();
    marks.dedup();
    let mut best = (Rational::zero(), Rational::zero());
    for (n, a) in marks.iter().enumerate() {
        let b = marks.get(n + 1).cloned().unwrap_or_else(|| &marks[0] + &c);
        if &b - a > best.1 {
            best = ((a + &b) / int(2), b - a);
        }
    }
    modulo(&best.0, &c)
}

/// Solves for the chip on each loop: every slope index that increases
/// across `γ_k` (incoming `s`, outgoing `s + 1`) forces the chip to
/// `t ≡ −(s + 1)·m_k (mod C)`; with no such index the chip is generic. The
/// remaining `16 − g` chips sit at the leftmost point.
pub fn chip_solve(st: &SlopeTable, graph: &ChainGraph) -> Result<ChipSolution, SlopeError> {
    if graph.genus() != st.genus {
        return Err(SlopeError::Inconsistent("graph and slope table have different genus".into()));
    }
    let first = st.first_loop();
    let mut divisor = GraphDivisor::new();
    divisor.add_chips(graph.left_end(), DIVISOR_DEGREE - st.genus as i64);
    let mut positions = Vec::with_capacity(st.genus);
    for k in first..=LAST_LOOP {
        let c = graph.circumference(k);
        let m = graph.length(EdgeId::Bottom(k));
        let (s, t) = (st.s(k), st.s_out(k));
        let mut forced: Option<Rational> = None;
        for i in 0..6 {
            if t[i] == s[i] + 1 {
                let p = modulo(&(-(&m * int(t[i]))), &c);
                match &forced {
                    Some(q) if *q != p => {
                        return Err(SlopeError::Infeasible {
                            k,
                            reason: format!("indices force different positions (index {i})"),
                        })
                    }
                    _ => forced = Some(p),
                }
            }
        }
        let p = forced.unwrap_or_else(|| generic_position(graph, k));
        divisor.add_chips(graph.loop_point(k, &p), 1);
        positions.push(p);
    }
    Ok(ChipSolution { divisor, positions })
}

/// Segments of a loop function on the top and bottom edges.
type LoopSegments = (Vec<(Rational, i64)>, Vec<(Rational, i64)>);

/// The function on loop `γ_k` with incoming slope `s`, outgoing slope `s'`,
/// using the chip at circle coordinate `p` for its pole when needed.
fn loop_function(graph: &ChainGraph, k: usize, s: i64, s_out: i64, p: &Rational) -> Result<LoopSegments, SlopeError> {
    let c = graph.circumference(k);
    let l = graph.length(EdgeId::Top(k));
    let m = graph.length(EdgeId::Bottom(k));
    // Orders of vanishing at circle positions.
    let mut ords: BTreeMap<Rational, i64> = BTreeMap::new();
    let mut add = |x: Rational, o: i64| *ords.entry(x).or_insert(0) += o;
    match s_out - s {
        1 => add(p.clone(), -1),
        0 => {
            let q = modulo(&(p + &m * int(s)), &c);
            if q != *p {
                add(p.clone(), -1);
                add(q, 1);
            }
        }
        -1 => add(modulo(&(&m * int(s_out)), &c), 1),
        d => {
            return Err(SlopeError::Unclassified { k, reason: format!("slope change {d} on one index") });
        }
    }
    ords.retain(|_, o| *o != 0);
    // Derivative jumps at positions in (0, C); the jump at 0 closes the circle.
    let mut jumps: BTreeMap<Rational, i64> = BTreeMap::new();
    jumps.insert(l.clone(), -s_out);
    for (x, o) in &ords {
        if x.is_zero() {
            continue;
        }
        *jumps.entry(x.clone()).or_insert(0) -= o;
    }
    jumps.retain(|_, j| *j != 0);
    let moment: Rational = jumps.iter().map(|(x, j)| (&c - x) * int(*j)).sum();
    let sigma0 = -moment / &c;
    if !sigma0.is_integer() {
        return Err(SlopeError::Infeasible { k, reason: format!("slopes {s} → {s_out} do not close up") });
    }
    let sigma0: i64 = sigma0.to_integer().try_into().expect("small slope");
    // Derivative on consecutive circle intervals.
    let mut intervals: Vec<(Rational, Rational, i64)> = Vec::new();
    let mut start = Rational::zero();
    let mut slope = sigma0;
    for (x, j) in &jumps {
        intervals.push((start, x.clone(), slope));
        start = x.clone();
        slope += j;
    }
    intervals.push((start, c.clone(), slope));
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for (a, b, sl) in &intervals {
        if *a < l {
            top.push((a.clone(), *sl));
        }
        if *b > l {
            // Bottom offset y = C − t, slope reversed.
            let y = &c - b;
            bottom.push((y, -*sl));
        }
    }
    bottom.reverse();
    Ok((top, bottom))
}

/// Bridge segments for slopes `left → right` (a kink at a quarter of the bridge if they differ).
fn bridge_segments(graph: &ChainGraph, k: usize, left: i64, right: i64) -> Vec<(Rational, i64)> {
    if left == right {
        vec![(Rational::zero(), left)]
    } else {
        let n = graph.length(EdgeId::Bridge(k));
        vec![(Rational::zero(), left), (n * g13_core::rational::frac(BRIDGE_KINK.0, BRIDGE_KINK.1), right)]
    }
}

/// A function with prescribed slopes: bridge `β_k` goes from `bridge(k).0` to
/// `bridge(k).1`, loop `γ_k` from `loop(k).0` to `loop(k).1`, with the chip
/// positions of `chips`. Normalized to 0 at the leftmost point.
pub fn build_from_slopes(
    graph: &Arc<ChainGraph>,
    chips: &ChipSolution,
    bridge: impl Fn(usize) -> (i64, i64),
    loop_slopes: impl Fn(usize) -> (i64, i64),
) -> Result<PlFunction, SlopeError> {
    let first = graph.first_loop();
    let mut segments = Vec::with_capacity(graph.edge_count());
    for k in first..=LAST_LOOP {
        let (bl, br) = bridge(k);
        segments.push(bridge_segments(graph, k, bl, br));
        let (s, t) = loop_slopes(k);
        let (top, bottom) = loop_function(graph, k, s, t, chips.position(first, k))?;
        segments.push(top);
        segments.push(bottom);
    }
    let (bl, br) = bridge(LAST_BRIDGE);
    segments.push(bridge_segments(graph, LAST_BRIDGE, bl, br));
    PlFunction::from_segments(graph.clone(), Rational::zero(), segments)
        .map_err(|e| SlopeError::Inconsistent(e.to_string()))
}

/// `φ_i`: slope `s_k[i]` along the bridges and the matching loop transitions.
pub fn build_phi(
    i: usize,
    st: &SlopeTable,
    chips: &ChipSolution,
    graph: &Arc<ChainGraph>,
) -> Result<PlFunction, SlopeError> {
    if i >= RANK_PLUS_ONE {
        return Err(SlopeError::Index(i));
    }
    build_from_slopes(
        graph,
        chips,
        |k| {
            let (l, r) = st.bridge(k);
            (l[i], r[i])
        },
        |k| (st.s(k)[i], st.s_out(k)[i]),
    )
}

/// Where a loop chip sits, as a graph point.
pub fn chip_point(graph: &ChainGraph, chips: &ChipSolution, k: usize) -> GraphPoint {
    graph.loop_point(k, chips.position(graph.first_loop(), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::make_admissible_chain;
    use crate::plf::{in_linear_system, pl_divisor};

    pub(crate) fn figure_tableau() -> Tableau {
        Tableau { top: vec![1, 3, 4, 8, 9, 10], bottom: vec![2, 5, 7, 11, 12, 13], lingering: 6, genus: 13 }
    }

    #[test]
    fn there_are_132_fillings() {
        assert_eq!(standard_fillings().len(), 132);
        assert_eq!(enumerate_tableaux(13).unwrap().len(), 1716);
        assert_eq!(enumerate_tableaux(12).unwrap().len(), 1584);
        assert_eq!(enumerate_tableaux(11).unwrap().len(), 1452);
        for t in enumerate_tableaux(11).unwrap().iter().take(50) {
            t.validate().unwrap();
        }
    }

    #[test]
    fn figure_slopes() {
        let st = slopes_from_tableau(&figure_tableau()).unwrap();
        assert_eq!(st.initial, [-2, -1, 0, 1, 2, 3]);
        assert_eq!(*st.s_out(1), [-2, -1, 0, 1, 2, 4]);
        assert_eq!(*st.last(), [0, 1, 2, 3, 4, 5]);
        assert_eq!(st.s(6), st.s_out(6));
        assert_eq!(tau(&st, 0), 0);
        assert_eq!(tau(&st, 13), 12);
    }

    #[test]
    fn non_standard_is_rejected() {
        let mut t = figure_tableau();
        t.bottom.swap(0, 1);
        assert!(slopes_from_tableau(&t).is_err());
        let mut t = figure_tableau();
        t.lingering = 5;
        assert!(t.validate().is_err());
    }

    #[test]
    fn classification_finds_the_lingering_loop() {
        let st = slopes_from_tableau(&figure_tableau()).unwrap();
        let p = classify(&st, None).unwrap();
        assert_eq!(p.special, Special::Lingering { loop_index: 6 });
        let steps: Vec<LoopStep> = (1..=13)
            .map(|k| match k {
                1 | 2 => LoopStep::Increase(5),
                3 => LoopStep::Decrease { up: 4, down: 5 },
                _ => LoopStep::Linger,
            })
            .collect();
        let bad = SlopeTable::from_steps(13, INITIAL_SLOPES, &steps, None).unwrap();
        assert!(matches!(classify(&bad, None), Err(SlopeError::TooManySpecial(_))));
    }

    #[test]
    fn phis_lie_in_the_linear_system() {
        let graph = Arc::new(make_admissible_chain(13, &int(10_000)).unwrap());
        let st = slopes_from_tableau(&figure_tableau()).unwrap();
        let chips = chip_solve(&st, &graph).unwrap();
        assert_eq!(chips.divisor.degree(), 16);
        assert_eq!(chips.divisor.multiplicity(&graph.left_end()), 3);
        for i in 0..6 {
            let phi = build_phi(i, &st, &chips, &graph).unwrap();
            assert!(in_linear_system(&chips.divisor, &phi), "phi_{i}");
            assert_eq!(pl_divisor(&phi).degree(), 0);
            for k in 1..=14 {
                assert_eq!(phi.bridge_slopes(k), (st.bridge(k).0[i], st.bridge(k).1[i]));
            }
        }
    }
}
