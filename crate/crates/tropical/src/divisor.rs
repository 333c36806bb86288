//! Divisors on the chain: finitely supported integer combinations of points.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::GraphPoint;

/// A divisor, stored with nonzero multiplicities only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphDivisor {
    chips: BTreeMap<GraphPoint, i64>,
}

/// One `(point, multiplicity)` entry, for serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorEntry {
    pub point: GraphPoint,
    pub multiplicity: i64,
}

impl GraphDivisor {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `multiplicity` chips at `point`.
    pub fn add_chips(&mut self, point: GraphPoint, multiplicity: i64) {
        if multiplicity == 0 {
            return;
        }
        let entry = self.chips.entry(point);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += multiplicity;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(multiplicity);
            }
        }
    }

    pub fn multiplicity(&self, p: &GraphPoint) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.chips.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&m| m >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.chips.is_empty()
    }

    /// Points with nonzero multiplicity, left to right.
    pub fn iter(&self) -> impl Iterator<Item = (&GraphPoint, i64)> {
        self.chips.iter().map(|(p, &m)| (p, m))
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn scaled(&self, factor: i64) -> Self {
        let mut out = Self::new();
        for (p, m) in self.iter() {
            out.add_chips(p.clone(), m * factor);
        }
        out
    }

    pub fn entries(&self) -> Vec<DivisorEntry> {
        self.iter().map(|(p, m)| DivisorEntry { point: p.clone(), multiplicity: m }).collect()
    }

    /// `self ≥ other` coefficientwise.
    pub fn dominates(&self, other: &Self) -> bool {
        (self - other).is_effective()
    }
}

impl std::ops::Add for &GraphDivisor {
    type Output = GraphDivisor;
    fn add(self, rhs: &GraphDivisor) -> GraphDivisor {
        let mut out = self.clone();
        for (p, m) in rhs.iter() {
            out.add_chips(p.clone(), m);
        }
        out
    }
}

impl std::ops::Sub for &GraphDivisor {
    type Output = GraphDivisor;
    fn sub(self, rhs: &GraphDivisor) -> GraphDivisor {
        let mut out = self.clone();
        for (p, m) in rhs.iter() {
            out.add_chips(p.clone(), -m);
        }
        out
    }
}

impl std::ops::Neg for &GraphDivisor {
    type Output = GraphDivisor;
    fn neg(self) -> GraphDivisor {
        self.scaled(-1)
    }
}

impl FromIterator<(GraphPoint, i64)> for GraphDivisor {
    fn from_iter<I: IntoIterator<Item = (GraphPoint, i64)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (p, m) in iter {
            out.add_chips(p, m);
        }
        out
    }
}

impl Serialize for GraphDivisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GraphDivisor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let entries = Vec::<DivisorEntry>::deserialize(d)?;
        Ok(entries.into_iter().map(|e| (e.point, e.multiplicity)).collect())
    }
}

impl fmt::Display for GraphDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(p, m)| format!("{m}·[{p}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeId;
    use g13_core::rational::int;

    fn pt(k: usize, x: i64) -> GraphPoint {
        GraphPoint { edge: EdgeId::Bridge(k), offset: int(x) }
    }

    #[test]
    fn cancellation_removes_points() {
        let mut d = GraphDivisor::new();
        d.add_chips(pt(1, 0), 2);
        d.add_chips(pt(1, 0), -2);
        assert!(d.is_zero());
        let a: GraphDivisor = [(pt(1, 0), 1), (pt(2, 3), -1)].into_iter().collect();
        assert_eq!(a.degree(), 0);
        assert!(!a.is_effective());
        assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let a: GraphDivisor = [(pt(1, 0), 3), (pt(4, 7), 2)].into_iter().collect();
        let s = serde_json::to_string(&a).unwrap();
        let b: GraphDivisor = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
