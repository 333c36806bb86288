//! Construction of tropical independences among pairwise sums `φ_i + φ_j`.
//!
//! The chain is cut into three blocks on which the target minimum `θ` has
//! bridge slope 4, 3 and 2. One function is omitted so that every block has
//! one more permissible function than loops, and the builder then sweeps
//! left to right, adjusting coefficients upward and assigning one function
//! to every loop and the rest to bridges. The result is always checked by
//! the exact certifier; the builder's own bookkeeping is only a guide.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use g13_core::rational::{self, frac, int, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{
    analyze_envelope, min_combination, minimizers_by_edge, unique_minimum_witnesses, CertificationFailure,
    IndependenceCertificate,
};
use crate::divisor::GraphDivisor;
use crate::graph::{make_admissible_chain, ChainGraph, EdgeId, GraphError, GraphPoint, LAST_BRIDGE, LAST_LOOP};
use crate::plf::{in_linear_system, pl_divisor, PlError, PlFunction};
use crate::slopes::{
    build_phi, chip_solve, classify, slopes_from_tableau, ChipSolution, LoopProfile, SlopeError, SlopeTable, Special,
    Tableau,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Slope(#[from] SlopeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error("no block plan for this profile: {0}")]
    Unclassified(String),
    #[error("no valid omission: {0}")]
    NoOmission(String),
    #[error("builder invariant violated at {place}: {reason}")]
    Builder { place: String, reason: String },
    #[error("φ_{0} is not in R(D)")]
    NotInLinearSystem(usize),
    #[error("certification failed for {labels:?} at every scale up to B = {scale}")]
    Certification { labels: Vec<String>, scale: String },
}

/// Where `θ` has slope 4 (loops `≤ z₁`), 3 (`z₁ < k ≤ z₂`) and 2 (after `z₂`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub z1: usize,
    pub z2: usize,
    pub first: usize,
    /// Which case table produced the plan.
    pub rule: String,
}

impl BlockPlan {
    pub fn new(first: usize, z1: usize, z2: usize, rule: impl Into<String>) -> Self {
        Self { z1, z2, first, rule: rule.into() }
    }

    /// `s_k(θ)`, the slope of `θ` on bridge `β_k` (and the target on loop `γ_k`).
    pub fn theta_slope(&self, k: usize) -> i64 {
        if k <= self.z1 {
            4
        } else if k <= self.z2 {
            3
        } else {
            2
        }
    }

    /// Loop ranges of the three blocks (possibly empty).
    pub fn blocks(&self) -> [std::ops::RangeInclusive<usize>; 3] {
        [self.first..=self.z1, self.z1 + 1..=self.z2, self.z2 + 1..=LAST_LOOP]
    }

    pub fn block_of(&self, k: usize) -> usize {
        if k <= self.z1 {
            0
        } else if k <= self.z2 {
            1
        } else {
            2
        }
    }
}

fn right_ramified_blocks(first: usize, k: usize) -> BlockPlan {
    let z1 = if k >= 7 { 6 } else { 7 };
    BlockPlan::new(first, z1, (k.saturating_sub(1)).max(7), "ramified at the right end")
}

fn left_ramified_blocks(first: usize, k: usize) -> BlockPlan {
    let z2 = if k >= 8 { 6 } else { 7 };
    BlockPlan::new(first, k.min(6), z2, "extra ramification at the left end")
}

/// Smallest `k` with `s'_k[5] = 6`.
fn right_ramification_loop(st: &SlopeTable) -> Option<usize> {
    (st.first_loop()..=LAST_LOOP).find(|&k| st.s_out(k)[5] >= 6)
}

/// Largest `k` with `s_k[0] = −3`.
fn left_ramification_loop(st: &SlopeTable) -> Option<usize> {
    (st.first_loop()..=LAST_LOOP).rev().find(|&k| st.s(k)[0] <= -3)
}

/// The block boundaries `(z₁, z₂)` for each case.
pub fn choose_blocks(profile: &LoopProfile, st: &SlopeTable) -> Result<BlockPlan, EngineError> {
    let first = st.first_loop();
    let plan = match profile.special {
        Special::Lingering { loop_index: l } => BlockPlan::new(first, l.min(6), l.max(7), "vertex avoiding"),
        Special::RightRamified { k } => right_ramified_blocks(first, k),
        Special::LeftRamified { k } => left_ramified_blocks(first, k),
        Special::DecreasingBridge { bridge_index: l, .. } => {
            if l >= 8 && st.bridge(l).0[5] == 6 {
                right_ramified_blocks(first, right_ramification_loop(st).expect("ramified"))
            } else if l <= 7 && st.bridge(l).1[0] == -3 {
                left_ramified_blocks(first, left_ramification_loop(st).expect("ramified"))
            } else {
                BlockPlan::new(first, (l - 1).min(6), l - 1, "decreasing bridge")
            }
        }
        Special::DecreasingLoop { loop_index: l, .. } => {
            if l >= 8 && st.s(l)[5] == 6 {
                right_ramified_blocks(first, right_ramification_loop(st).expect("ramified"))
            } else if l <= 7 && st.s_out(l)[0] == -3 {
                left_ramified_blocks(first, left_ramification_loop(st).expect("ramified"))
            } else {
                let z1 = match l {
                    l if l < 6 => l,
                    6 => 5,
                    _ => 6,
                };
                let z2 = match l {
                    l if l > 8 => l - 1,
                    8 => 8,
                    _ => 7,
                };
                BlockPlan::new(first, z1, z2, "decreasing loop")
            }
        }
        Special::Switching { loop_index: l, .. } => {
            let z1 = match l {
                l if l < 6 => l,
                6 => 5,
                _ => 6,
            };
            let z2 = if l < 6 { 7 } else { l };
            BlockPlan::new(first, z1, z2, "switching loop")
        }
        Special::None => return Err(EngineError::Unclassified("no loop, bridge or ramification of positive weight".into())),
    };
    Ok(plan)
}

/// Permissibility of a function on a loop, from its bridge slopes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permissibility {
    pub permissible: bool,
    pub new: bool,
    pub departing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermissibleKind {
    Not,
    New,
    Ordinary,
    Departing,
    NewAndDeparting,
}

impl Permissibility {
    /// `s_k(ψ) ≤ s_k(θ) ≤ s'_k(ψ)`; new if `s_k(ψ) < s_k(θ)`, departing if `s'_k(ψ) > s_k(θ)`.
    pub fn of(s_in: i64, s_out: i64, theta: i64) -> Self {
        let permissible = s_in <= theta && theta <= s_out;
        Self { permissible, new: permissible && s_in < theta, departing: permissible && s_out > theta }
    }

    pub fn kind(&self) -> PermissibleKind {
        match (self.permissible, self.new, self.departing) {
            (false, _, _) => PermissibleKind::Not,
            (true, true, true) => PermissibleKind::NewAndDeparting,
            (true, true, false) => PermissibleKind::New,
            (true, false, true) => PermissibleKind::Departing,
            (true, false, false) => PermissibleKind::Ordinary,
        }
    }
}

/// A pair `i ≤ j`, standing for `φ_i + φ_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(pub usize, pub usize);

impl Pair {
    pub fn label(&self) -> String {
        format!("{}{}", self.0, self.1)
    }

    fn s_in(&self, st: &SlopeTable, k: usize) -> i64 {
        st.s(k)[self.0] + st.s(k)[self.1]
    }

    fn s_out(&self, st: &SlopeTable, k: usize) -> i64 {
        st.s_out(k)[self.0] + st.s_out(k)[self.1]
    }

    pub fn permissibility(&self, st: &SlopeTable, plan: &BlockPlan, k: usize) -> Permissibility {
        Permissibility::of(self.s_in(st, k), self.s_out(st, k), plan.theta_slope(k))
    }

    fn contains(&self, h: usize) -> bool {
        self.0 == h || self.1 == h
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "φ{}{}", self.0, self.1)
    }
}

/// All 21 pairs in lexicographic order.
pub fn all_pairs() -> Vec<Pair> {
    (0..6).flat_map(|i| (i..6).map(move |j| Pair(i, j))).collect()
}

/// How to pick among equally valid omissions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// The largest label (reproduces the worked example's omission of φ₂₃).
    #[default]
    Largest,
    Smallest,
}

/// The 20 retained pairs, the omitted one and why, and the condition checklist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSelection {
    pub retained: Vec<Pair>,
    pub omitted: Pair,
    pub reason: String,
    /// Candidates the omission was chosen from.
    pub candidates: Vec<Pair>,
    pub checklist: Vec<(String, bool)>,
}

/// Slope of `φ_i + φ_j` at the right end of bridge `β_k`.
fn pair_bridge_slope(p: &Pair, st: &SlopeTable, k: usize) -> i64 {
    let right = &st.bridge(k).1;
    right[p.0] + right[p.1]
}

fn permissible_on_block(p: &Pair, st: &SlopeTable, plan: &BlockPlan, block: usize) -> bool {
    plan.blocks()[block].clone().any(|k| p.permissibility(st, plan, k).permissible)
}

fn pick(mut cands: Vec<Pair>, tie: TieBreak) -> Option<Pair> {
    cands.sort();
    match tie {
        TieBreak::Largest => cands.last().copied(),
        TieBreak::Smallest => cands.first().copied(),
    }
}

/// Chooses the omitted function per the case rules and checks conditions (ii)–(vi).
pub fn select_basis(
    profile: &LoopProfile,
    st: &SlopeTable,
    plan: &BlockPlan,
    tie: TieBreak,
) -> Result<BasisSelection, EngineError> {
    let pairs = all_pairs();
    let block_candidates = |block: usize| -> Vec<Pair> {
        let range = plan.blocks()[block].clone();
        if range.is_empty() {
            // An empty block: the functions with θ's slope on the bridge where it would start.
            let k = *range.start();
            let slope = if block == 1 { 3 } else { 2 };
            pairs.iter().copied().filter(|p| pair_bridge_slope(p, st, k) == slope).collect()
        } else {
            pairs.iter().copied().filter(|p| permissible_on_block(p, st, plan, block)).collect()
        }
    };
    let (candidates, reason): (Vec<Pair>, String) = match profile.special {
        Special::Lingering { loop_index: l } | Special::Switching { loop_index: l, .. } => {
            if l <= 7 {
                (block_candidates(1), "permissible on the second block".into())
            } else {
                (block_candidates(2), "permissible on the third block".into())
            }
        }
        Special::RightRamified { .. } | Special::LeftRamified { .. } => {
            (block_candidates(1), "permissible on the second block".into())
        }
        Special::DecreasingBridge { bridge_index: l, h } => {
            let ramified = (l >= 8 && st.bridge(l).0[5] == 6) || (l <= 7 && st.bridge(l).1[0] == -3);
            if ramified {
                (block_candidates(1), "permissible on the second block".into())
            } else {
                let s = st.s_out(l - 1);
                let theta = plan.theta_slope(l - 1);
                if l == 5 || l == 6 {
                    let c: Vec<Pair> = (0..6)
                        .filter(|&i| s[h] + s[i] == theta - 1)
                        .map(|i| Pair(i.min(h), i.max(h)))
                        .collect();
                    (c, "decreasing bridge: s'[h] + s'[i] = s(θ) − 1".into())
                } else {
                    let c: Vec<Pair> =
                        (0..6).filter(|&i| s[h] + s[i] == theta).map(|i| Pair(i.min(h), i.max(h))).collect();
                    if c.len() == 1 {
                        (c, "decreasing bridge: s'[h] + s'[i] = s(θ)".into())
                    } else if 2 * s[h] == theta + 1 {
                        (vec![Pair(h, h)], "decreasing bridge: 2s'[h] = s(θ) + 1".into())
                    } else {
                        (Vec::new(), "decreasing bridge: neither alternative holds".into())
                    }
                }
            }
        }
        Special::DecreasingLoop { loop_index: l, h } => {
            let ramified = (l >= 8 && st.s(l)[5] == 6) || (l <= 7 && st.s(l)[0] == -3);
            if ramified {
                (block_candidates(1), "permissible on the second block".into())
            } else {
                let s = st.s(l);
                let theta = if l < 6 || l == 7 || l == 8 { plan.theta_slope(l) } else { plan.theta_slope(l - 1) };
                let c: Vec<Pair> =
                    (0..6).filter(|&i| s[h] + s[i] == theta).map(|i| Pair(i.min(h), i.max(h))).collect();
                if c.len() == 1 {
                    (c, "decreasing loop: s[h] + s[i] = s(θ)".into())
                } else if 2 * s[h] == theta + 1 {
                    (vec![Pair(h, h)], "decreasing loop: 2s[h] = s(θ) + 1".into())
                } else {
                    (Vec::new(), "decreasing loop: neither alternative holds".into())
                }
            }
        }
        Special::None => return Err(EngineError::Unclassified("no special item".into())),
    };
    let omitted = pick(candidates.clone(), tie).ok_or_else(|| EngineError::NoOmission(reason.clone()))?;
    let retained: Vec<Pair> = pairs.into_iter().filter(|p| *p != omitted).collect();
    let checklist = basis_checklist(profile, st, plan, &retained);
    Ok(BasisSelection { retained, omitted, reason, candidates, checklist })
}

/// Conditions (ii)–(vi) on a retained set (condition (i) needs the functions; see [`loop_distinctness`]).
pub fn basis_checklist(profile: &LoopProfile, st: &SlopeTable, plan: &BlockPlan, retained: &[Pair]) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let blocks = plan.blocks();
    for (b, range) in blocks.iter().enumerate() {
        let loops = range.clone().count();
        let count = if range.is_empty() && b > 0 {
            let slope = if b == 1 { 3 } else { 2 };
            retained.iter().filter(|p| pair_bridge_slope(p, st, *range.start()) == slope).count()
        } else {
            retained.iter().filter(|p| permissible_on_block(p, st, plan, b)).count()
        };
        out.push((format!("(ii) block {}: {count} permissible for {loops} loops", b + 1), count <= loops + 1));
    }
    let multi: Vec<String> = retained
        .iter()
        .filter(|p| (0..3).filter(|&b| permissible_on_block(p, st, plan, b)).count() > 1)
        .map(|p| p.label())
        .collect();
    out.push((format!("(iii) permissible on several blocks: {multi:?}"), multi.is_empty()));
    if let Some(l) = profile.lingering() {
        let last = blocks.iter().any(|r| r.end() == &l && r.contains(&l));
        out.push((format!("(iv) lingering loop {l} ends its block"), last));
    }
    if let Special::DecreasingLoop { loop_index: k, h } = profile.special {
        let bad: Vec<String> = retained
            .iter()
            .filter(|p| p.contains(h) && p.permissibility(st, plan, k).permissible)
            .map(|p| p.label())
            .collect();
        out.push((format!("(v) decreasing loop {k}: permissible sums containing {h}: {bad:?}"), bad.is_empty()));
    }
    if let Special::DecreasingBridge { bridge_index: k, h } = profile.special {
        let between = plan.block_of(k - 1) != plan.block_of(k.min(LAST_LOOP)) || k == LAST_BRIDGE;
        let ok = between
            || !retained.iter().any(|p| p.contains(h) && p.permissibility(st, plan, k - 1).permissible);
        out.push((format!("(vi) decreasing bridge {k}"), ok));
    }
    out
}

/// A labeled function entering the construction.
#[derive(Clone, Debug)]
pub struct Member {
    pub label: String,
    pub function: PlFunction,
}

impl Member {
    /// `s_k(ψ)`: slope at the right end of `β_k`.
    pub fn s_in(&self, k: usize) -> i64 {
        self.function.bridge_slopes(k).1
    }

    /// `s'_k(ψ)`: slope at the left end of `β_{k+1}`.
    pub fn s_out(&self, k: usize) -> i64 {
        self.function.bridge_slopes(k + 1).0
    }

    pub fn permissibility(&self, plan: &BlockPlan, k: usize) -> Permissibility {
        Permissibility::of(self.s_in(k), self.s_out(k), plan.theta_slope(k))
    }
}

/// Where a function was assigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "kebab-case")]
pub enum Place {
    Loop(usize),
    Bridge(usize),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Loop(k) => write!(f, "loop {k}"),
            Place::Bridge(k) => write!(f, "bridge {k}"),
        }
    }
}

/// One assignment, in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentEntry {
    pub place: Place,
    pub function: String,
    #[serde(with = "rational::serde_str")]
    pub coefficient: Rational,
    /// Unassigned permissible functions on entering the loop (loops only).
    pub unassigned_permissible: Option<usize>,
    /// How the function was chosen.
    pub step: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentLog {
    pub entries: Vec<AssignmentEntry>,
}

impl AssignmentLog {
    pub fn at(&self, place: Place) -> Vec<&str> {
        self.entries.iter().filter(|e| e.place == place).map(|e| e.function.as_str()).collect()
    }
}

/// The sweep that assigns coefficients.
struct Builder<'a> {
    graph: &'a ChainGraph,
    members: &'a [Member],
    plan: &'a BlockPlan,
    coeff: Vec<Option<Rational>>,
    assigned: Vec<Option<Place>>,
    log: AssignmentLog,
}

fn builder_error(place: impl fmt::Display, reason: impl Into<String>) -> EngineError {
    EngineError::Builder { place: place.to_string(), reason: reason.into() }
}

impl<'a> Builder<'a> {
    fn value(&self, i: usize, p: &GraphPoint) -> Option<Rational> {
        self.coeff[i].as_ref().map(|c| self.members[i].function.eval(p) + c)
    }

    fn theta(&self, p: &GraphPoint) -> Option<Rational> {
        (0..self.members.len()).filter_map(|i| self.value(i, p)).min()
    }

    /// Sets `c_i` so that `ψ_i + c_i = θ` at `p`.
    fn match_theta(&mut self, i: usize, p: &GraphPoint, place: Place) -> Result<(), EngineError> {
        let t = self.theta(p).ok_or_else(|| builder_error(place, "θ undefined"))?;
        self.coeff[i] = Some(t - self.members[i].function.eval(p));
        Ok(())
    }

    fn assign(&mut self, i: usize, place: Place, unassigned: Option<usize>, step: &str) {
        self.assigned[i] = Some(place);
        self.log.entries.push(AssignmentEntry {
            place,
            function: self.members[i].label.clone(),
            coefficient: self.coeff[i].clone().expect("finite when assigned"),
            unassigned_permissible: unassigned,
            step: step.to_string(),
        });
    }

    fn unassigned(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.members.len()).filter(|&i| self.assigned[i].is_none())
    }

    fn first_bridge(&mut self) -> Result<(), EngineError> {
        let first = self.graph.first_loop();
        let theta = self.plan.theta_slope(first);
        let slope = |i: usize| self.members[i].function.bridge_slopes(first).0;
        let mut high: Vec<usize> = self.unassigned().filter(|&i| slope(i) > theta).collect();
        high.sort_by_key(|&i| std::cmp::Reverse(slope(i)));
        let r = high.len() as i64;
        for (j, &i) in high.iter().enumerate() {
            if j == 0 {
                self.coeff[i] = Some(-self.members[i].function.left_value());
            } else {
                let p = self.graph.bridge_point(first, &frac(j as i64, r + 1));
                self.match_theta(i, &p, Place::Bridge(first))?;
            }
            self.assign(i, Place::Bridge(first), None, "first bridge");
        }
        let level: Vec<usize> = self.unassigned().filter(|&i| slope(i) == theta).collect();
        for i in level {
            if r == 0 {
                self.coeff[i] = Some(-self.members[i].function.left_value());
            } else {
                let p = self.graph.bridge_point(first, &frac(r, r + 1));
                self.match_theta(i, &p, Place::Bridge(first))?;
            }
        }
        Ok(())
    }

    fn loop_step(&mut self, k: usize) -> Result<(), EngineError> {
        let place = Place::Loop(k);
        let theta = self.plan.theta_slope(k);
        let perm: Vec<usize> =
            self.unassigned().filter(|&i| self.members[i].permissibility(self.plan, k).permissible).collect();
        if perm.len() < 2 {
            return Err(builder_error(place, format!("only {} unassigned permissible functions", perm.len())));
        }
        let w = self.graph.w(k);
        // Step 1: raise everything to the highest finite value at w_k.
        let top = perm
            .iter()
            .filter_map(|&i| self.value(i, &w))
            .max()
            .ok_or_else(|| builder_error(place, "no permissible function has a finite coefficient"))?;
        for &i in &perm {
            let c = &top - self.members[i].function.eval(&w);
            if let Some(old) = &self.coeff[i] {
                if c < *old {
                    return Err(builder_error(place, "downward adjustment"));
                }
            }
            self.coeff[i] = Some(c);
        }
        // Step 2: a departing function takes the loop.
        let departing: Vec<usize> =
            perm.iter().copied().filter(|&i| self.members[i].s_out(k) > theta).collect();
        if departing.len() > 1 {
            return Err(builder_error(place, format!("{} departing functions", departing.len())));
        }
        if let Some(&d) = departing.first() {
            let others: Vec<usize> = perm.iter().copied().filter(|&i| i != d).collect();
            let m = self.graph.length(EdgeId::Bottom(k));
            let mut delta = Rational::zero();
            for &o in &others {
                let gap = self.members[d].s_out(k) - self.members[o].s_out(k);
                if gap < 1 {
                    return Err(builder_error(place, "departing slope does not exceed the others"));
                }
                let diff = self.members[o]
                    .function
                    .add(&self.members[d].function.neg())?
                    .shift(&(self.coeff[o].clone().unwrap() - self.coeff[d].clone().unwrap()));
                let on_loop = [EdgeId::Top(k), EdgeId::Bottom(k)]
                    .iter()
                    .map(|&e| diff.edge(e).range().0.clone())
                    .min()
                    .expect("two edges");
                let excess = diff.eval(&w) - on_loop;
                let need = excess / int(gap);
                if need > delta {
                    delta = need;
                }
            }
            delta += &m / int(8);
            if delta >= self.graph.length(EdgeId::Bridge(k + 1)) {
                return Err(builder_error(place, "departing offset does not fit on the next bridge"));
            }
            let x = self.graph.point(EdgeId::Bridge(k + 1), delta)?;
            let target = self.value(d, &x).expect("finite");
            for &o in &others {
                let c = &target - self.members[o].function.eval(&x);
                self.coeff[o] = Some(c);
            }
            self.assign(d, place, Some(perm.len()), "departing");
            return Ok(());
        }
        // Step 4: among at most three, one is strictly minimal somewhere on the loop.
        if perm.len() > 3 {
            return Err(builder_error(place, format!("{} non-departing permissible functions", perm.len())));
        }
        let fs: Vec<PlFunction> = perm.iter().map(|&i| self.members[i].function.clone()).collect();
        let bs: Vec<Rational> = perm.iter().map(|&i| self.coeff[i].clone().unwrap()).collect();
        let witnesses = unique_minimum_witnesses(&fs, &bs, &[EdgeId::Top(k), EdgeId::Bottom(k)]);
        let raise = self.graph.length(EdgeId::Bottom(k)) / int(3);
        let chosen = witnesses
            .iter()
            .enumerate()
            .filter_map(|(n, w)| w.as_ref().map(|(gap, _)| (n, gap.clone())))
            .filter(|(_, gap)| *gap > raise)
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(n, _)| perm[n])
            .ok_or_else(|| builder_error(place, "no function is minimal by more than m/3 on the loop"))?;
        let c = self.coeff[chosen].clone().unwrap() + raise;
        self.coeff[chosen] = Some(c);
        self.assign(chosen, place, Some(perm.len()), "three-shape");
        Ok(())
    }

    /// Assigns the remaining permissible function of `block` to the bridge after it.
    fn close_block(&mut self, block: usize) -> Result<usize, EngineError> {
        let range = self.plan.blocks()[block].clone();
        let z = *range.end();
        let place = Place::Bridge(z + 1);
        let left: Vec<usize> = self
            .unassigned()
            .filter(|&i| self.coeff[i].is_some())
            .filter(|&i| range.clone().any(|k| self.members[i].permissibility(self.plan, k).permissible))
            .collect();
        if left.len() != 1 {
            return Err(builder_error(place, format!("{} unassigned permissible functions at block end", left.len())));
        }
        self.assign(left[0], place, None, "block end");
        Ok(z + 1)
    }

    fn run(&mut self) -> Result<(), EngineError> {
        self.first_bridge()?;
        let blocks = self.plan.blocks();
        // Points along a bridge between blocks, right of any kink at a quarter.
        let transition_points = [frac(1, 2), frac(3, 4), frac(7, 8)];
        let mut pending_bridge: Option<(usize, usize)> = None; // (bridge, next point index)
        let mut last_used: Option<Rational> = None;
        for (b, range) in blocks.iter().enumerate() {
            if range.is_empty() {
                if let Some((bridge, n)) = pending_bridge {
                    // An empty block: the function with θ's slope on this bridge takes it.
                    let slope = if b == 1 { 3 } else { 2 };
                    let cands: Vec<usize> = self
                        .unassigned()
                        .filter(|&i| self.coeff[i].is_none() && self.members[i].s_in(bridge) == slope)
                        .collect();
                    if cands.len() != 1 {
                        return Err(builder_error(
                            Place::Bridge(bridge),
                            format!("{} functions with slope {slope} for an empty block", cands.len()),
                        ));
                    }
                    let p = self.graph.bridge_point(bridge, &transition_points[n]);
                    self.match_theta(cands[0], &p, Place::Bridge(bridge))?;
                    self.assign(cands[0], Place::Bridge(bridge), None, "empty block");
                    pending_bridge = Some((bridge, n + 1));
                    if bridge == LAST_BRIDGE {
                        last_used = Some(transition_points[n].clone());
                    }
                }
                continue;
            }
            let start = *range.start();
            if let Some((bridge, n)) = pending_bridge {
                let p = self.graph.bridge_point(bridge, &transition_points[n]);
                let init: Vec<usize> = self
                    .unassigned()
                    .filter(|&i| self.coeff[i].is_none())
                    .filter(|&i| self.members[i].permissibility(self.plan, start).permissible)
                    .collect();
                for i in init {
                    self.match_theta(i, &p, Place::Bridge(bridge))?;
                }
            }
            for k in range.clone() {
                self.loop_step(k)?;
            }
            let bridge = self.close_block(b)?;
            pending_bridge = Some((bridge, 0));
        }
        // The last bridge: everything left, by decreasing slope, on the second half.
        let mut rest: Vec<usize> = self.unassigned().collect();
        if rest.iter().any(|&i| self.coeff[i].is_some()) {
            return Err(builder_error(Place::Bridge(LAST_BRIDGE), "a function with a coefficient was never assigned"));
        }
        let slope = |i: usize| self.members[i].function.bridge_slopes(LAST_BRIDGE).0;
        rest.sort_by_key(|&i| std::cmp::Reverse(slope(i)));
        let r = rest.len() as i64;
        for (j, &i) in rest.iter().enumerate() {
            let t = match &last_used {
                None => frac(1, 2) + frac(j as i64, 2 * r),
                Some(u) => u + (int(1) - u) * frac(j as i64 + 1, r + 1),
            };
            let p = self.graph.bridge_point(LAST_BRIDGE, &t);
            self.match_theta(i, &p, Place::Bridge(LAST_BRIDGE))?;
            self.assign(i, Place::Bridge(LAST_BRIDGE), None, "last bridge");
        }
        Ok(())
    }
}

/// Runs the left-to-right construction and returns the coefficients and the log.
pub fn run_builder(
    members: &[Member],
    plan: &BlockPlan,
    graph: &ChainGraph,
) -> Result<(Vec<Rational>, AssignmentLog), EngineError> {
    let mut b = Builder {
        graph,
        members,
        plan,
        coeff: vec![None; members.len()],
        assigned: vec![None; members.len()],
        log: AssignmentLog::default(),
    };
    b.run()?;
    let coeffs = b.coeff.into_iter().map(|c| c.expect("all assigned")).collect();
    Ok((coeffs, b.log))
}

/// `min_{φ ∈ T} (φ − c(φ, θ))` with `c(φ, θ) = min_Γ (φ − θ)`, together with the offsets `c`.
pub fn best_approximation(theta: &PlFunction, t: &[PlFunction]) -> Result<(PlFunction, Vec<Rational>), EngineError> {
    if t.is_empty() {
        return Err(PlError::Empty.into());
    }
    let neg_theta = theta.neg();
    let mut offsets = Vec::with_capacity(t.len());
    for phi in t {
        offsets.push(-phi.add(&neg_theta)?.minimum());
    }
    Ok((min_combination(t, &offsets)?, offsets))
}

/// Functions whose restrictions to loop `γ_k` differ by a constant (condition (i)).
pub fn loop_distinctness(members: &[Member], plan: &BlockPlan, k: usize) -> Vec<(String, String)> {
    let perm: Vec<&Member> = members.iter().filter(|m| m.permissibility(plan, k).permissible).collect();
    let mut out = Vec::new();
    for (a, ma) in perm.iter().enumerate() {
        for mb in &perm[a + 1..] {
            let diff = ma.function.add(&mb.function.neg()).expect("same graph");
            let flat = [EdgeId::Top(k), EdgeId::Bottom(k)].iter().all(|&e| {
                let ef = diff.edge(e);
                ef.segment_count() == 1 && ef.start_slope() == 0
            });
            if flat {
                out.push((ma.label.clone(), mb.label.clone()));
            }
        }
    }
    out
}

/// Everything produced for one case.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseReport {
    pub input: String,
    pub genus: usize,
    #[serde(with = "rational::serde_str")]
    pub scale_base: Rational,
    pub attempts: usize,
    pub profile: LoopProfile,
    pub plan: BlockPlan,
    pub basis: BasisSelection,
    pub log: AssignmentLog,
    pub labels: Vec<String>,
    pub certificate: IndependenceCertificate,
    #[serde(with = "rational::serde_str")]
    pub min_margin: Rational,
    /// `2D + div θ`, which must be effective.
    pub theta_divisor: GraphDivisor,
    pub theta_divisor_degree: i64,
    /// Assigned functions that reach the minimum right of `v_{k+1}` (must be empty).
    pub late_minimizers: Vec<String>,
}

/// The realized objects for one slope table.
pub struct Realization {
    pub graph: Arc<ChainGraph>,
    pub chips: ChipSolution,
    pub phis: Vec<PlFunction>,
}

/// Builds the chain, the break divisor and `φ_0, …, φ_5`, checking `φ_i ∈ R(D)`.
pub fn realize(st: &SlopeTable, scale_base: &Rational) -> Result<Realization, EngineError> {
    let graph = Arc::new(make_admissible_chain(st.genus, scale_base)?);
    let chips = chip_solve(st, &graph)?;
    let mut phis = Vec::with_capacity(6);
    for i in 0..6 {
        let phi = build_phi(i, st, &chips, &graph)?;
        if !in_linear_system(&chips.divisor, &phi) {
            return Err(EngineError::NotInLinearSystem(i));
        }
        phis.push(phi);
    }
    Ok(Realization { graph, chips, phis })
}

/// Pair sums `φ_i + φ_j` as labeled members.
pub fn pair_members(phis: &[PlFunction], pairs: &[Pair]) -> Result<Vec<Member>, EngineError> {
    pairs
        .iter()
        .map(|p| Ok(Member { label: p.label(), function: phis[p.0].add(&phis[p.1])? }))
        .collect()
}

/// Assigned functions that achieve the minimum (on an interval) right of `v_{k+1}`.
pub fn late_minimizers(members: &[Member], coeffs: &[Rational], log: &AssignmentLog) -> Vec<String> {
    let fs: Vec<PlFunction> = members.iter().map(|m| m.function.clone()).collect();
    late_minimizers_from(members, &minimizers_by_edge(&fs, coeffs), log)
}

fn late_minimizers_from(
    members: &[Member],
    by_edge: &[(EdgeId, BTreeSet<usize>)],
    log: &AssignmentLog,
) -> Vec<String> {
    let mut out = BTreeSet::new();
    for entry in &log.entries {
        let k = match entry.place {
            Place::Loop(k) | Place::Bridge(k) => k,
        };
        let i = members.iter().position(|m| m.label == entry.function).expect("logged member");
        let late = by_edge.iter().any(|(e, set)| *e >= EdgeId::Top(k + 1) && set.contains(&i));
        if late {
            out.insert(entry.function.clone());
        }
    }
    out.into_iter().collect()
}

/// Options for a proof attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProveOptions {
    pub scale_base: Rational,
    /// How many times to square the scale base after a certification failure.
    pub escalations: usize,
    pub tie_break: TieBreak,
}

impl Default for ProveOptions {
    fn default() -> Self {
        Self { scale_base: int(crate::graph::DEFAULT_SCALE_BASE), escalations: 2, tie_break: TieBreak::default() }
    }
}

/// One attempt at a fixed scale; `Ok(Err(..))` is a certification failure.
fn attempt(
    input: &str,
    st: &SlopeTable,
    profile: &LoopProfile,
    plan: &BlockPlan,
    basis: &BasisSelection,
    scale: &Rational,
) -> Result<Result<CaseReport, (CertificationFailure, Vec<String>)>, EngineError> {
    let real = realize(st, scale)?;
    let members = pair_members(&real.phis, &basis.retained)?;
    let (coeffs, log) = run_builder(&members, plan, &real.graph)?;
    let fs: Vec<PlFunction> = members.iter().map(|m| m.function.clone()).collect();
    let labels: Vec<String> = members.iter().map(|m| m.label.clone()).collect();
    let analysis = analyze_envelope(&fs, &coeffs)?;
    let certificate = match analysis.certificate {
        Ok(c) => c,
        Err(f) => return Ok(Err((f, labels))),
    };
    let theta = analysis.minimum;
    let twice_d: GraphDivisor = real.chips.divisor.scaled(2);
    let theta_div = &twice_d + &pl_divisor(&theta);
    if !theta_div.is_effective() {
        return Err(builder_error("θ", "2D + div θ is not effective"));
    }
    let late = late_minimizers_from(&members, &analysis.minimizers, &log);
    Ok(Ok(CaseReport {
        input: input.to_string(),
        genus: st.genus,
        scale_base: scale.clone(),
        attempts: 1,
        profile: profile.clone(),
        plan: plan.clone(),
        basis: basis.clone(),
        min_margin: certificate.min_margin().unwrap_or_else(Rational::zero),
        log,
        labels,
        certificate,
        theta_divisor_degree: theta_div.degree(),
        theta_divisor: theta_div,
        late_minimizers: late,
    }))
}

/// End to end for a slope table: classify, choose blocks and basis, build,
/// certify; on a certification failure the scale base is squared and the
/// construction repeated.
pub fn prove_slope_table(input: &str, st: &SlopeTable, opts: &ProveOptions) -> Result<CaseReport, EngineError> {
    let profile = classify(st, None)?;
    let plan = choose_blocks(&profile, st)?;
    let basis = select_basis(&profile, st, &plan, opts.tie_break)?;
    let mut scale = opts.scale_base.clone();
    let mut last_error = None;
    for n in 0..=opts.escalations {
        if n > 0 {
            scale = &scale * &scale;
        }
        // Both a certification failure and a violated builder invariant mean
        // the edge lengths are not separated enough; retry with B².
        last_error = Some(match attempt(input, st, &profile, &plan, &basis, &scale) {
            Ok(Ok(mut report)) => {
                report.attempts = n + 1;
                return Ok(report);
            }
            Ok(Err((failure, labels))) => EngineError::Certification {
                labels: failure.never_unique.iter().map(|&i| labels[i].clone()).collect(),
                scale: rational::to_string(&scale),
            },
            Err(e @ EngineError::Builder { .. }) => e,
            Err(e) => return Err(e),
        });
    }
    Err(last_error.expect("at least one attempt"))
}

/// End to end for a tableau.
pub fn prove_case(t: &Tableau, opts: &ProveOptions) -> Result<CaseReport, EngineError> {
    let st = slopes_from_tableau(t)?;
    let input = serde_json::to_string(t).expect("tableau serializes");
    prove_slope_table(&input, &st, opts)
}

impl CaseReport {
    /// Function labels assigned to each place, in log order.
    pub fn assignments(&self) -> Vec<(Place, String)> {
        self.log.entries.iter().map(|e| (e.place, e.function.clone())).collect()
    }

    pub fn all_margins_positive(&self) -> bool {
        self.certificate.entries.iter().all(|e| e.margin.is_positive())
    }
}
