//! Piecewise-linear functions with integer slopes on a chain of loops.
//!
//! A function stores, for every edge, its segments as `(start offset,
//! slope)` pairs together with the cached value at each segment start.
//! Values are exact rationals; continuity at every vertex is checked when a
//! function is assembled.

use std::sync::Arc;

use g13_core::rational::{self, Rational};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divisor::GraphDivisor;
use crate::graph::{ChainGraph, EdgeId, GraphPoint, LAST_BRIDGE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error("edge {edge}: {reason}")]
    Segments { edge: EdgeId, reason: String },
    #[error("values disagree at w_{0}: the top and bottom edges end at different heights")]
    Discontinuous(usize),
    #[error("expected segments for {expected} edges, got {got}")]
    EdgeCount { expected: usize, got: usize },
    #[error("functions live on different graphs")]
    GraphMismatch,
    #[error("the list of functions is empty")]
    Empty,
    #[error("{0} functions but {1} coefficients")]
    LengthMismatch(usize, usize),
}

/// The restriction of a function to one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFunction {
    /// Segment start offsets; the first is 0, strictly increasing.
    starts: Vec<Rational>,
    slopes: Vec<i64>,
    /// Value at each segment start.
    values: Vec<Rational>,
    length: Rational,
    end_value: Rational,
}

impl EdgeFunction {
    fn new(start_value: Rational, length: Rational, pieces: Vec<(Rational, i64)>, edge: EdgeId) -> Result<Self, PlError> {
        let err = |reason: &str| PlError::Segments { edge, reason: reason.to_string() };
        if pieces.is_empty() {
            return Err(err("no segments"));
        }
        if !pieces[0].0.is_zero() {
            return Err(err("the first segment must start at offset 0"));
        }
        let mut starts: Vec<Rational> = Vec::with_capacity(pieces.len());
        let mut slopes: Vec<i64> = Vec::with_capacity(pieces.len());
        for (x, s) in pieces {
            if let Some(last) = starts.last() {
                if x <= *last {
                    return Err(err("segment starts must strictly increase"));
                }
            }
            if x >= length {
                return Err(err("segment starts past the end of the edge"));
            }
            if slopes.last() == Some(&s) {
                continue;
            }
            starts.push(x);
            slopes.push(s);
        }
        let mut values = Vec::with_capacity(starts.len());
        let mut v = start_value;
        for i in 0..starts.len() {
            values.push(v.clone());
            let end = starts.get(i + 1).unwrap_or(&length);
            v = rational::affine(&v, end, &starts[i], slopes[i]);
        }
        Ok(Self { starts, slopes, values, length, end_value: v })
    }

    pub fn start_value(&self) -> &Rational {
        &self.values[0]
    }

    pub fn end_value(&self) -> &Rational {
        &self.end_value
    }

    pub fn length(&self) -> &Rational {
        &self.length
    }

    pub fn start_slope(&self) -> i64 {
        self.slopes[0]
    }

    pub fn end_slope(&self) -> i64 {
        *self.slopes.last().expect("nonempty")
    }

    /// `(start, slope, value at start)` for each segment.
    pub fn segments(&self) -> impl Iterator<Item = (&Rational, i64, &Rational)> {
        self.starts.iter().zip(&self.slopes).zip(&self.values).map(|((x, &s), v)| (x, s, v))
    }

    pub fn segment_count(&self) -> usize {
        self.starts.len()
    }

    pub fn segment_start(&self, i: usize) -> &Rational {
        &self.starts[i]
    }

    pub fn segment_slope(&self, i: usize) -> i64 {
        self.slopes[i]
    }

    pub fn segment_value(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    /// Interior breakpoints (segment starts other than 0).
    pub fn breakpoints(&self) -> &[Rational] {
        &self.starts[1..]
    }

    /// Index of the segment containing offset `x` (the later one at a breakpoint).
    pub fn segment_at(&self, x: &Rational) -> usize {
        match self.starts.binary_search(x) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn value_at(&self, x: &Rational) -> Rational {
        let i = self.segment_at(x);
        rational::affine(&self.values[i], x, &self.starts[i], self.slopes[i])
    }

    /// Minimum and maximum over the edge (attained at segment ends).
    pub fn range(&self) -> (&Rational, &Rational) {
        let mut lo = &self.end_value;
        let mut hi = &self.end_value;
        for v in &self.values {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }

    fn pieces(&self) -> Vec<(Rational, i64)> {
        self.starts.iter().cloned().zip(self.slopes.iter().copied()).collect()
    }

    fn shifted(&self, c: &Rational) -> Self {
        Self {
            starts: self.starts.clone(),
            slopes: self.slopes.clone(),
            values: self.values.iter().map(|v| rational::add(v, c)).collect(),
            length: self.length.clone(),
            end_value: rational::add(&self.end_value, c),
        }
    }

    fn sum(&self, other: &Self) -> Self {
        let mut starts = Vec::new();
        let mut slopes: Vec<i64> = Vec::new();
        let mut values = Vec::new();
        let (mut i, mut j) = (0, 0);
        loop {
            let x = match (self.starts.get(i), other.starts.get(j)) {
                (Some(a), Some(b)) => std::cmp::min(a, b).clone(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => break,
            };
            if self.starts.get(i) == Some(&x) {
                i += 1;
            }
            if other.starts.get(j) == Some(&x) {
                j += 1;
            }
            let s = self.slopes[i - 1] + other.slopes[j - 1];
            if slopes.last() == Some(&s) {
                continue;
            }
            values.push(rational::add(&self.value_at(&x), &other.value_at(&x)));
            starts.push(x);
            slopes.push(s);
        }
        Self {
            starts,
            slopes,
            values,
            length: self.length.clone(),
            end_value: rational::add(&self.end_value, &other.end_value),
        }
    }
}

/// A continuous piecewise-linear function with integer slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlFunction {
    graph: Arc<ChainGraph>,
    edges: Vec<EdgeFunction>,
}

/// Serializable form: the value at the leftmost vertex and the segments of every edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlFunctionData {
    #[serde(with = "rational::serde_str")]
    pub left_value: Rational,
    pub edges: Vec<EdgeSegments>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSegments {
    pub edge: EdgeId,
    /// `(start offset, slope)` pairs.
    pub segments: Vec<(String, i64)>,
}

impl PlFunction {
    /// Assembles a function from its value at the leftmost vertex and the
    /// `(start offset, slope)` segments of every edge, listed in the order of
    /// [`ChainGraph::edges`]. Fails if the two edges of a loop end at
    /// different values.
    pub fn from_segments(
        graph: Arc<ChainGraph>,
        left_value: Rational,
        segments: Vec<Vec<(Rational, i64)>>,
    ) -> Result<Self, PlError> {
        let edge_ids = graph.edges();
        if segments.len() != edge_ids.len() {
            return Err(PlError::EdgeCount { expected: edge_ids.len(), got: segments.len() });
        }
        let mut edges: Vec<EdgeFunction> = Vec::with_capacity(edge_ids.len());
        let mut at_w = left_value;
        let mut at_v = Rational::zero();
        for (e, pieces) in edge_ids.iter().zip(segments) {
            let start = match e {
                EdgeId::Bridge(_) => at_w.clone(),
                _ => at_v.clone(),
            };
            let ef = EdgeFunction::new(start, graph.length(*e), pieces, *e)?;
            match e {
                EdgeId::Bridge(_) => at_v = ef.end_value.clone(),
                EdgeId::Top(_) => at_w = ef.end_value.clone(),
                EdgeId::Bottom(k) => {
                    if ef.end_value != at_w {
                        return Err(PlError::Discontinuous(*k));
                    }
                }
            }
            edges.push(ef);
        }
        Ok(Self { graph, edges })
    }

    /// A continuous function from a coarse shape, for sampling.
    ///
    /// `shape[e]` lists `(position in thousandths of the edge length, slope)`
    /// for edge `e` (in the order of [`ChainGraph::edges`]); positions are
    /// sorted and deduplicated and a leading 0 is implied. On every bottom
    /// edge the shape only covers the first half; the second half is closed
    /// with two slopes so the loop ends where its top edge does.
    pub fn from_shape(graph: Arc<ChainGraph>, left_value: Rational, shape: &[Vec<(u32, i64)>]) -> Result<Self, PlError> {
        let edge_ids = graph.edges();
        if shape.len() != edge_ids.len() {
            return Err(PlError::EdgeCount { expected: edge_ids.len(), got: shape.len() });
        }
        let mut segments = Vec::with_capacity(edge_ids.len());
        let mut at_w = left_value.clone();
        let mut at_v = Rational::zero();
        for (e, edge_shape) in edge_ids.iter().zip(shape) {
            let length = graph.length(*e);
            let span = match e {
                EdgeId::Bottom(_) => &length / rational::int(2),
                _ => length.clone(),
            };
            let mut marks: Vec<(u32, i64)> = edge_shape.iter().map(|&(x, s)| (x.min(999), s)).collect();
            marks.sort();
            marks.dedup_by_key(|m| m.0);
            let mut pieces: Vec<(Rational, i64)> = marks
                .iter()
                .filter(|m| m.0 > 0)
                .map(|&(x, s)| (&span * rational::frac(x.into(), 1000), s))
                .collect();
            pieces.insert(0, (Rational::zero(), marks.first().map_or(0, |m| m.1)));
            let start = if e.is_bridge() { at_w.clone() } else { at_v.clone() };
            let ef = EdgeFunction::new(start, span.clone(), pieces.clone(), *e)?;
            match e {
                EdgeId::Bridge(_) => at_v = ef.end_value.clone(),
                EdgeId::Top(_) => at_w = ef.end_value.clone(),
                EdgeId::Bottom(_) => {
                    // Close up: slope a on [span, x), then b on [x, length), with
                    // b < needed/rest < a so that the break x lies strictly inside.
                    let rest = &length - &span;
                    let mean = (&at_w - &ef.end_value) / &rest;
                    let b = mean.floor().to_integer().to_i64().expect("slope fits") - 1;
                    let a = mean.ceil().to_integer().to_i64().expect("slope fits") + 1;
                    let x = &span + (&mean - rational::int(b)) * &rest / rational::int(a - b);
                    pieces.push((span, a));
                    pieces.push((x, b));
                }
            }
            segments.push(pieces);
        }
        Self::from_segments(graph, left_value, segments)
    }

    /// The constant function `c`.
    pub fn constant(graph: Arc<ChainGraph>, c: Rational) -> Self {
        let n = graph.edge_count();
        Self::from_segments(graph, c, vec![vec![(Rational::zero(), 0)]; n]).expect("constant is valid")
    }

    pub fn graph(&self) -> &Arc<ChainGraph> {
        &self.graph
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeFunction {
        &self.edges[self.graph.edge_slot(e)]
    }

    /// Edge restrictions in the order of [`ChainGraph::edges`].
    pub fn edge_functions(&self) -> &[EdgeFunction] {
        &self.edges
    }

    pub fn left_value(&self) -> &Rational {
        self.edges[0].start_value()
    }

    pub fn eval(&self, p: &GraphPoint) -> Rational {
        self.edge(p.edge).value_at(&p.offset)
    }

    /// Slope along bridge `β_k` at its left end (`s'_{k−1}`) and right end (`s_k`).
    pub fn bridge_slopes(&self, k: usize) -> (i64, i64) {
        let e = self.edge(EdgeId::Bridge(k));
        (e.start_slope(), e.end_slope())
    }

    pub fn same_graph(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph
    }

    /// `self + c` for a constant `c`.
    pub fn shift(&self, c: &Rational) -> Self {
        Self { graph: self.graph.clone(), edges: self.edges.iter().map(|e| e.shifted(c)).collect() }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Result<Self, PlError> {
        if !self.same_graph(other) {
            return Err(PlError::GraphMismatch);
        }
        Ok(Self {
            graph: self.graph.clone(),
            edges: self.edges.iter().zip(&other.edges).map(|(a, b)| a.sum(b)).collect(),
        })
    }

    /// Pointwise negation.
    pub fn neg(&self) -> Self {
        let segments = self
            .edges
            .iter()
            .map(|e| e.pieces().into_iter().map(|(x, s)| (x, -s)).collect())
            .collect();
        Self::from_segments(self.graph.clone(), -self.left_value(), segments).expect("negation is valid")
    }

    /// Global minimum over the graph.
    pub fn minimum(&self) -> Rational {
        self.edges.iter().map(|e| e.range().0.clone()).min().expect("nonempty")
    }

    pub fn to_data(&self) -> PlFunctionData {
        PlFunctionData {
            left_value: self.left_value().clone(),
            edges: self
                .graph
                .edges()
                .into_iter()
                .zip(&self.edges)
                .map(|(edge, ef)| EdgeSegments {
                    edge,
                    segments: ef.pieces().into_iter().map(|(x, s)| (rational::to_string(&x), s)).collect(),
                })
                .collect(),
        }
    }

    pub fn from_data(graph: Arc<ChainGraph>, data: &PlFunctionData) -> Result<Self, PlError> {
        let mut segments = Vec::with_capacity(data.edges.len());
        for (expected, es) in graph.edges().into_iter().zip(&data.edges) {
            if es.edge != expected {
                return Err(PlError::Segments { edge: es.edge, reason: format!("expected {expected}") });
            }
            let mut pieces = Vec::with_capacity(es.segments.len());
            for (x, s) in &es.segments {
                let x = rational::parse(x)
                    .map_err(|e| PlError::Segments { edge: es.edge, reason: e.to_string() })?;
                pieces.push((x, *s));
            }
            segments.push(pieces);
        }
        Self::from_segments(graph, data.left_value.clone(), segments)
    }
}

/// The divisor of a function, `ord_p(ψ) = −Σ` of the outgoing slopes at `p`.
pub fn pl_divisor(psi: &PlFunction) -> GraphDivisor {
    let g = psi.graph();
    let mut div = GraphDivisor::new();
    for e in g.edges() {
        let ef = psi.edge(e);
        for i in 1..ef.segment_count() {
            // Incoming from the left has outgoing slope −s_{i−1}; to the right s_i.
            let ord = ef.segment_slope(i - 1) - ef.segment_slope(i);
            div.add_chips(GraphPoint { edge: e, offset: ef.segment_start(i).clone() }, ord);
        }
    }
    for k in g.bridges() {
        let bridge = psi.edge(EdgeId::Bridge(k));
        // Left end of β_k: w_{k−1}.
        let mut out_w = bridge.start_slope();
        if k > g.first_loop() {
            out_w -= psi.edge(EdgeId::Top(k - 1)).end_slope();
            out_w -= psi.edge(EdgeId::Bottom(k - 1)).end_slope();
        }
        div.add_chips(g.w(k - 1), -out_w);
        // Right end of β_k: v_k.
        let mut out_v = -bridge.end_slope();
        if k < LAST_BRIDGE {
            out_v += psi.edge(EdgeId::Top(k)).start_slope();
            out_v += psi.edge(EdgeId::Bottom(k)).start_slope();
        }
        div.add_chips(g.v(k), -out_v);
    }
    div
}

/// Whether `D + div(ψ) ≥ 0`.
pub fn in_linear_system(d: &GraphDivisor, psi: &PlFunction) -> bool {
    (d + &pl_divisor(psi)).is_effective()
}
