//! The chain of loops: `g` loops joined left to right by `g + 1` bridges.
//!
//! Loops and bridges keep the labels of the genus-13 picture, so a chain of
//! genus `g` has loops `γ_k` for `k = 14 − g, …, 13` and bridges `β_k` for
//! `k = 14 − g, …, 14`. Bridge `β_k` runs from `w_{k−1}` to `v_k`; the top edge
//! (length `ℓ_k`) and the bottom edge (length `m_k`) of `γ_k` both run from
//! `v_k` to `w_k`. Offsets on every edge are measured from its left endpoint.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use g13_core::rational::{self, int, Rational};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// The index of the last loop; loops are labeled so that the chain always ends here.
pub const LAST_LOOP: usize = 13;
/// The index of the rightmost bridge.
pub const LAST_BRIDGE: usize = 14;
/// Default base of the length tower.
pub const DEFAULT_SCALE_BASE: i64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("genus must be between 1 and 13, got {0}")]
    Genus(usize),
    #[error("scale base must be at least 2, got {0}")]
    ScaleBase(String),
    #[error("edge {0} does not exist on this chain")]
    NoSuchEdge(EdgeId),
    #[error("offset {offset} lies outside edge {edge} of length {length}")]
    OffsetOutOfRange { edge: EdgeId, offset: String, length: String },
    #[error("edge lengths must be positive ({0})")]
    NonPositiveLength(EdgeId),
    #[error("length chain is not admissible: {0}")]
    NotAdmissible(String),
    #[error("wrong number of edge lengths: {0}")]
    Shape(String),
    #[error("malformed edge name `{0}`")]
    EdgeName(String),
}

/// An edge of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeId {
    Bridge(usize),
    Top(usize),
    Bottom(usize),
}

impl EdgeId {
    /// The loop or bridge index.
    pub fn index(self) -> usize {
        match self {
            EdgeId::Bridge(k) | EdgeId::Top(k) | EdgeId::Bottom(k) => k,
        }
    }

    /// Left-to-right sort key: `β_k < top_k < bottom_k < β_{k+1}`.
    fn key(self) -> (usize, u8) {
        match self {
            EdgeId::Bridge(k) => (k, 0),
            EdgeId::Top(k) => (k, 1),
            EdgeId::Bottom(k) => (k, 2),
        }
    }

    pub fn is_bridge(self) -> bool {
        matches!(self, EdgeId::Bridge(_))
    }
}

impl Ord for EdgeId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for EdgeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeId::Bridge(k) => write!(f, "bridge:{k}"),
            EdgeId::Top(k) => write!(f, "top:{k}"),
            EdgeId::Bottom(k) => write!(f, "bottom:{k}"),
        }
    }
}

impl FromStr for EdgeId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, index) = s.split_once(':').ok_or_else(|| GraphError::EdgeName(s.to_string()))?;
        let k: usize = index.parse().map_err(|_| GraphError::EdgeName(s.to_string()))?;
        match kind {
            "bridge" => Ok(EdgeId::Bridge(k)),
            "top" => Ok(EdgeId::Top(k)),
            "bottom" => Ok(EdgeId::Bottom(k)),
            _ => Err(GraphError::EdgeName(s.to_string())),
        }
    }
}

impl Serialize for EdgeId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgeId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the chain, in canonical form: vertices are always represented
/// on a bridge (`v_k` as the right end of `β_k`, `w_k` as the left end of
/// `β_{k+1}`), so equal points compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GraphPoint {
    pub edge: EdgeId,
    #[serde(with = "rational::serde_str")]
    pub offset: Rational,
}

impl fmt::Display for GraphPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.edge, rational::Show(&self.offset))
    }
}

/// Graph configuration as read from JSON:
/// `{"g":13,"scale_base":"10000","overrides":{"m2_equals_l2":false}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub g: usize,
    #[serde(with = "rational::serde_str")]
    pub scale_base: Rational,
    #[serde(default)]
    pub overrides: GraphOverrides,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOverrides {
    /// Give the second loop torsion index 2 by setting `m_2 = ℓ_2`; this
    /// deliberately breaks admissibility and is only for manual exploration.
    #[serde(default)]
    pub m2_equals_l2: bool,
}

impl GraphConfig {
    pub fn new(g: usize, scale_base: i64) -> Self {
        Self { g, scale_base: int(scale_base), overrides: GraphOverrides::default() }
    }

    pub fn build(&self) -> Result<ChainGraph, GraphError> {
        let chain = make_admissible_chain(self.g, &self.scale_base)?;
        if self.overrides.m2_equals_l2 {
            let mut bottom = chain.bottom.clone();
            let i = 2usize
                .checked_sub(chain.first)
                .filter(|&i| i < bottom.len())
                .ok_or(GraphError::NoSuchEdge(EdgeId::Bottom(2)))?;
            bottom[i] = chain.top[i].clone();
            ChainGraph::custom(self.g, chain.top, bottom, chain.bridge, true)
        } else {
            Ok(chain)
        }
    }
}

/// A chain of loops with exact rational edge lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainGraph {
    genus: usize,
    first: usize,
    /// `ℓ_k` for `k = first..=13`.
    #[serde(with = "rational::serde_str_vec")]
    top: Vec<Rational>,
    /// `m_k` for `k = first..=13`.
    #[serde(with = "rational::serde_str_vec")]
    bottom: Vec<Rational>,
    /// `n_k` for `k = first..=14`.
    #[serde(with = "rational::serde_str_vec")]
    bridge: Vec<Rational>,
    admissible: bool,
}

/// Exponents of the minimal power tower realizing
/// `ℓ_{k+1} ≪ m_k ≪ ℓ_k ≪ n_{k+1} ≪ n_k` with one factor of `B` per `≪`:
/// `m_k = B^{26−2k}`, `ℓ_k = B^{27−2k}`, `n_k = B^{30−2k}`, except that the
/// leftmost bridge is one factor above its right neighbour.
fn tower_exponents(first: usize) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let top = (first..=LAST_LOOP).map(|k| (27 - 2 * k) as u32).collect();
    let bottom = (first..=LAST_LOOP).map(|k| (26 - 2 * k) as u32).collect();
    let bridge = (first..=LAST_BRIDGE)
        .map(|k| if k == first { (30 - 2 * (k + 1) + 1) as u32 } else { (30 - 2 * k) as u32 })
        .collect();
    (top, bottom, bridge)
}

/// Builds the chain of genus `g` whose lengths follow the admissible
/// `≪`-chain with consecutive factors of `scale_base`; the shortest edge
/// (`m_13`) has length 1 and the leftmost bridge is the longest edge.
pub fn make_admissible_chain(g: usize, scale_base: &Rational) -> Result<ChainGraph, GraphError> {
    if !(1..=13).contains(&g) {
        return Err(GraphError::Genus(g));
    }
    if *scale_base < int(2) {
        return Err(GraphError::ScaleBase(rational::to_string(scale_base)));
    }
    let first = 14 - g;
    let (t, b, n) = tower_exponents(first);
    let pow = |e: &u32| num_traits::pow(scale_base.clone(), *e as usize);
    ChainGraph::custom(
        g,
        t.iter().map(pow).collect(),
        b.iter().map(pow).collect(),
        n.iter().map(pow).collect(),
        false,
    )
}

impl ChainGraph {
    /// Builds a chain from explicit lengths. Unless `relaxed`, the lengths
    /// must satisfy the strict ordering `ℓ_{k+1} < m_k < ℓ_k < n_{k+1} < n_k`.
    pub fn custom(
        genus: usize,
        top: Vec<Rational>,
        bottom: Vec<Rational>,
        bridge: Vec<Rational>,
        relaxed: bool,
    ) -> Result<Self, GraphError> {
        if !(1..=13).contains(&genus) {
            return Err(GraphError::Genus(genus));
        }
        let first = 14 - genus;
        if top.len() != genus || bottom.len() != genus || bridge.len() != genus + 1 {
            return Err(GraphError::Shape(format!(
                "genus {genus} needs {genus} top, {genus} bottom and {} bridge lengths",
                genus + 1
            )));
        }
        let graph = Self { genus, first, top, bottom, bridge, admissible: false };
        for e in graph.edges() {
            if !graph.length(e).is_positive() {
                return Err(GraphError::NonPositiveLength(e));
            }
        }
        let violation = graph.admissibility_violation();
        if let Some(v) = &violation {
            if !relaxed {
                return Err(GraphError::NotAdmissible(v.clone()));
            }
        }
        Ok(Self { admissible: violation.is_none(), ..graph })
    }

    fn admissibility_violation(&self) -> Option<String> {
        // n_k ≫ n_{k+1} ≫ ℓ_k ≫ m_k ≫ ℓ_{k+1}; check the pairwise constraints.
        for k in self.loops() {
            let n = self.length(EdgeId::Bridge(k));
            let n_next = self.length(EdgeId::Bridge(k + 1));
            let l = self.length(EdgeId::Top(k));
            let m = self.length(EdgeId::Bottom(k));
            if n_next >= n {
                return Some(format!("n_{} must be shorter than n_{k}", k + 1));
            }
            if l >= n_next {
                return Some(format!("l_{k} must be shorter than n_{}", k + 1));
            }
            if m >= l {
                return Some(format!("m_{k} must be shorter than l_{k}"));
            }
            if k < LAST_LOOP && self.length(EdgeId::Top(k + 1)) >= m {
                return Some(format!("l_{} must be shorter than m_{k}", k + 1));
            }
        }
        None
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Index of the leftmost loop, `14 − g`.
    pub fn first_loop(&self) -> usize {
        self.first
    }

    /// Whether the lengths satisfy the strict admissible ordering.
    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    pub fn loops(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=LAST_LOOP
    }

    pub fn bridges(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=LAST_BRIDGE
    }

    /// All edges, left to right.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out = Vec::with_capacity(self.edge_count());
        for k in self.loops() {
            out.push(EdgeId::Bridge(k));
            out.push(EdgeId::Top(k));
            out.push(EdgeId::Bottom(k));
        }
        out.push(EdgeId::Bridge(LAST_BRIDGE));
        out
    }

    pub fn edge_count(&self) -> usize {
        3 * self.genus + 1
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        match e {
            EdgeId::Bridge(k) => self.bridges().contains(&k),
            EdgeId::Top(k) | EdgeId::Bottom(k) => self.loops().contains(&k),
        }
    }

    /// Dense position of an edge in [`ChainGraph::edges`].
    pub fn edge_slot(&self, e: EdgeId) -> usize {
        let (k, kind) = e.key();
        3 * (k - self.first) + kind as usize
    }

    pub fn length(&self, e: EdgeId) -> Rational {
        match e {
            EdgeId::Bridge(k) => self.bridge[k - self.first].clone(),
            EdgeId::Top(k) => self.top[k - self.first].clone(),
            EdgeId::Bottom(k) => self.bottom[k - self.first].clone(),
        }
    }

    pub fn length_ref(&self, e: EdgeId) -> &Rational {
        match e {
            EdgeId::Bridge(k) => &self.bridge[k - self.first],
            EdgeId::Top(k) => &self.top[k - self.first],
            EdgeId::Bottom(k) => &self.bottom[k - self.first],
        }
    }

    /// Circumference `ℓ_k + m_k` of loop `γ_k`.
    pub fn circumference(&self, k: usize) -> Rational {
        self.length(EdgeId::Top(k)) + self.length(EdgeId::Bottom(k))
    }

    /// A point, canonicalized so that vertices live on bridges.
    pub fn point(&self, edge: EdgeId, offset: Rational) -> Result<GraphPoint, GraphError> {
        if !self.contains(edge) {
            return Err(GraphError::NoSuchEdge(edge));
        }
        let length = self.length(edge);
        if offset.is_negative() || offset > length {
            return Err(GraphError::OffsetOutOfRange {
                edge,
                offset: rational::to_string(&offset),
                length: rational::to_string(&length),
            });
        }
        Ok(match edge {
            EdgeId::Top(k) | EdgeId::Bottom(k) if offset.is_zero() => self.v(k),
            EdgeId::Top(k) | EdgeId::Bottom(k) if offset == length => self.w(k),
            _ => GraphPoint { edge, offset },
        })
    }

    /// The vertex `v_k` (right end of `β_k`).
    pub fn v(&self, k: usize) -> GraphPoint {
        GraphPoint { edge: EdgeId::Bridge(k), offset: self.length(EdgeId::Bridge(k)) }
    }

    /// The vertex `w_k` (left end of `β_{k+1}`); `w_{first−1}` is the leftmost point.
    pub fn w(&self, k: usize) -> GraphPoint {
        GraphPoint { edge: EdgeId::Bridge(k + 1), offset: Rational::zero() }
    }

    /// The point a fraction `t ∈ [0, 1]` of the way along bridge `β_k`.
    pub fn bridge_point(&self, k: usize, t: &Rational) -> GraphPoint {
        GraphPoint { edge: EdgeId::Bridge(k), offset: self.length(EdgeId::Bridge(k)) * t }
    }

    /// A point of loop `γ_k` given by its circle coordinate `t ∈ [0, ℓ_k + m_k)`:
    /// `t = 0` is `v_k`, the top edge is `[0, ℓ_k]`, and the bottom edge is
    /// traversed backwards (`t = C − y` for bottom offset `y`).
    pub fn loop_point(&self, k: usize, t: &Rational) -> GraphPoint {
        let l = self.length(EdgeId::Top(k));
        let c = self.circumference(k);
        let t = modulo(t, &c);
        if t <= l {
            self.point(EdgeId::Top(k), t).expect("offset within top edge")
        } else {
            self.point(EdgeId::Bottom(k), c - t).expect("offset within bottom edge")
        }
    }

    /// The leftmost point `w_{first−1}`.
    pub fn left_end(&self) -> GraphPoint {
        self.w(self.first - 1)
    }

    /// The rightmost point `v_14`.
    pub fn right_end(&self) -> GraphPoint {
        self.v(LAST_BRIDGE)
    }
}

/// Representative of `t` modulo `c` in `[0, c)`.
pub fn modulo(t: &Rational, c: &Rational) -> Rational {
    let q = (t / c).floor();
    t - q * c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_13_tower_has_longest_first_bridge() {
        let g = make_admissible_chain(13, &int(10)).unwrap();
        assert_eq!(g.loops().count(), 13);
        assert_eq!(g.bridges().count(), 14);
        let n1 = g.length(EdgeId::Bridge(1));
        for e in g.edges() {
            assert!(g.length(e) <= n1);
        }
        assert_eq!(g.length(EdgeId::Bottom(13)), int(1));
        assert!(g.is_admissible());
    }

    #[test]
    fn genus_11_starts_at_w2() {
        let g = make_admissible_chain(11, &int(10)).unwrap();
        assert_eq!(g.first_loop(), 3);
        assert_eq!(g.left_end(), GraphPoint { edge: EdgeId::Bridge(3), offset: int(0) });
        assert_eq!(g.v(3).edge, EdgeId::Bridge(3));
        assert!(!g.contains(EdgeId::Top(2)));
    }

    #[test]
    fn torsion_override_requires_relaxation() {
        let g = make_admissible_chain(13, &int(10)).unwrap();
        let mut bottom: Vec<Rational> = g.loops().map(|k| g.length(EdgeId::Bottom(k))).collect();
        let top: Vec<Rational> = g.loops().map(|k| g.length(EdgeId::Top(k))).collect();
        let bridge: Vec<Rational> = g.bridges().map(|k| g.length(EdgeId::Bridge(k))).collect();
        bottom[1] = top[1].clone();
        assert!(ChainGraph::custom(13, top.clone(), bottom.clone(), bridge.clone(), false).is_err());
        let relaxed = ChainGraph::custom(13, top, bottom, bridge, true).unwrap();
        assert!(!relaxed.is_admissible());
        let cfg = GraphConfig {
            g: 13,
            scale_base: int(10),
            overrides: GraphOverrides { m2_equals_l2: true },
        };
        assert_eq!(cfg.build().unwrap(), relaxed);
    }

    #[test]
    fn vertices_are_canonical() {
        let g = make_admissible_chain(13, &int(10)).unwrap();
        let l = g.length(EdgeId::Top(4));
        assert_eq!(g.point(EdgeId::Top(4), int(0)).unwrap(), g.v(4));
        assert_eq!(g.point(EdgeId::Bottom(4), g.length(EdgeId::Bottom(4))).unwrap(), g.w(4));
        assert_eq!(g.point(EdgeId::Top(4), l).unwrap(), g.w(4));
        assert!(g.point(EdgeId::Top(4), int(-1)).is_err());
        assert_eq!(g.loop_point(4, &g.circumference(4)), g.v(4));
    }

    #[test]
    fn edge_names_round_trip() {
        for e in [EdgeId::Bridge(4), EdgeId::Top(13), EdgeId::Bottom(1)] {
            assert_eq!(e.to_string().parse::<EdgeId>().unwrap(), e);
        }
        let p = GraphPoint { edge: EdgeId::Bridge(4), offset: rational::frac(3, 2) };
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"edge":"bridge:4","offset":"3/2"}"#);
    }

    #[test]
    fn config_json() {
        let cfg: GraphConfig =
            serde_json::from_str(r#"{"g":13,"scale_base":"10000","overrides":{"m2_equals_l2":false}}"#)
                .unwrap();
        assert_eq!(cfg, GraphConfig::new(13, 10_000));
        assert!(cfg.build().unwrap().is_admissible());
    }
}
