//! Graded commutative quotient rings with exact rational coefficients.
//!
//! A [`Ring`] is a polynomial ring over ℚ in finitely many named generators,
//! each carrying a cohomological degree, modulo a fixed list of monomial
//! rewrite rules. Elements are kept in normal form at all times: every stored
//! monomial is irreducible, every coefficient is nonzero, and monomials whose
//! degree exceeds the ring's top degree (or any auxiliary weight cap) are
//! dropped as zero.
//!
//! Reduction uses a lexicographic order on the generator list (the first
//! generator is the most significant). Every rule must rewrite its leading
//! monomial into strictly lex-smaller monomials of the same degree, which
//! makes reduction terminating and deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

/// Exponent vector, one entry per generator in ring order.
pub type Monomial = Vec<u32>;

/// Errors raised by ring construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("elements belong to different rings")]
    RingMismatch,
    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),
    #[error("duplicate generator {0:?}")]
    DuplicateGenerator(String),
    #[error("constant term is {0}, expected 1")]
    NonUnitConstant(String),
    #[error("rewrite rule for {0} is not homogeneous")]
    InhomogeneousRule(String),
    #[error("rewrite rule for {0} does not decrease the leading monomial")]
    NonDecreasingRule(String),
    #[error("weight vector {0:?} has the wrong length")]
    BadWeights(String),
}

/// An auxiliary grading with an upper bound: monomials whose weight exceeds
/// `max` are zero in the ring.
///
/// Used for bigraded spaces such as `X × W`, where classes vanish as soon as
/// either factor's degree is exceeded, not only the total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightCap {
    pub name: String,
    pub weights: Vec<u32>,
    pub max: u32,
}

#[derive(Debug)]
struct Rule {
    lhs: Monomial,
    rhs: Vec<(Monomial, Rational)>,
}

#[derive(Debug)]
struct RingData {
    id: usize,
    names: Vec<String>,
    degrees: Vec<u32>,
    caps: Vec<WeightCap>,
    top: u32,
    rules: Vec<Rule>,
}

/// A graded quotient ring. Cheap to clone; clones share identity.
#[derive(Debug, Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for Ring {}

static NEXT_RING_ID: AtomicUsize = AtomicUsize::new(0);

type Term<'a> = (&'a str, u32);

/// Builder for [`Ring`].
#[derive(Debug, Default)]
pub struct RingBuilder {
    names: Vec<String>,
    degrees: Vec<u32>,
    caps: Vec<(String, Vec<(String, u32)>, u32)>,
    top: u32,
    rules: Vec<(Vec<(String, u32)>, Vec<(Vec<(String, u32)>, Rational)>)>,
}

fn owned(terms: &[Term<'_>]) -> Vec<(String, u32)> {
    terms.iter().map(|(n, e)| (n.to_string(), *e)).collect()
}

impl RingBuilder {
    /// Starts a ring whose monomials of cohomological degree above `top`
    /// vanish.
    pub fn new(top: u32) -> Self {
        RingBuilder {
            top,
            ..Default::default()
        }
    }

    /// Appends a generator. Earlier generators are lex-larger.
    pub fn generator(mut self, name: &str, degree: u32) -> Self {
        self.names.push(name.to_string());
        self.degrees.push(degree);
        self
    }

    /// Adds a weight cap; generators not listed have weight 0.
    pub fn weight_cap(mut self, name: &str, weights: &[Term<'_>], max: u32) -> Self {
        self.caps.push((name.to_string(), owned(weights), max));
        self
    }

    /// Adds the rewrite rule `lhs → Σ coeff · monomial`.
    pub fn rule(mut self, lhs: &[Term<'_>], rhs: &[(&[Term<'_>], Rational)]) -> Self {
        let rhs = rhs.iter().map(|(m, c)| (owned(m), c.clone())).collect();
        self.rules.push((owned(lhs), rhs));
        self
    }

    /// Validates and freezes the ring.
    pub fn build(self) -> Result<Ring, RingError> {
        let n = self.names.len();
        for (i, a) in self.names.iter().enumerate() {
            if self.names[..i].contains(a) {
                return Err(RingError::DuplicateGenerator(a.clone()));
            }
        }
        let index = |name: &str| {
            self.names
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| RingError::UnknownGenerator(name.to_string()))
        };
        let mono = |terms: &[(String, u32)]| -> Result<Monomial, RingError> {
            let mut m = vec![0; n];
            for (name, e) in terms {
                m[index(name)?] += e;
            }
            Ok(m)
        };
        let mut caps = Vec::new();
        for (name, ws, max) in &self.caps {
            let mut weights = vec![0; n];
            for (g, w) in ws {
                weights[index(g)?] = *w;
            }
            caps.push(WeightCap {
                name: name.clone(),
                weights,
                max: *max,
            });
        }
        let mut rules = Vec::new();
        for (lhs, rhs) in &self.rules {
            let l = mono(lhs)?;
            let label = format!("{lhs:?}");
            let deg = |m: &Monomial| -> u32 { m.iter().zip(&self.degrees).map(|(e, d)| e * d).sum() };
            let mut r = Vec::new();
            for (terms, c) in rhs {
                let m = mono(terms)?;
                if deg(&m) != deg(&l)
                    || caps.iter().any(|cap| weight(&cap.weights, &m) != weight(&cap.weights, &l))
                {
                    return Err(RingError::InhomogeneousRule(label));
                }
                if m >= l {
                    return Err(RingError::NonDecreasingRule(label));
                }
                if !c.is_zero() {
                    r.push((m, c.clone()));
                }
            }
            rules.push(Rule { lhs: l, rhs: r });
        }
        Ok(Ring(Arc::new(RingData {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            names: self.names,
            degrees: self.degrees,
            caps,
            top: self.top,
            rules,
        })))
    }
}

fn weight(weights: &[u32], m: &Monomial) -> u32 {
    m.iter().zip(weights).map(|(e, w)| e * w).sum()
}

fn divides(a: &Monomial, b: &Monomial) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl Ring {
    /// Generator names in order.
    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    /// Cohomological top degree.
    pub fn top_degree(&self) -> u32 {
        self.0.top
    }

    /// Index of a generator.
    pub fn index_of(&self, name: &str) -> Result<usize, RingError> {
        self.0
            .names
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| RingError::UnknownGenerator(name.to_string()))
    }

    /// Cohomological degree of a monomial.
    pub fn degree(&self, m: &Monomial) -> u32 {
        weight(&self.0.degrees, m)
    }

    fn vanishes(&self, m: &Monomial) -> bool {
        self.degree(m) > self.0.top
            || self.0.caps.iter().any(|c| weight(&c.weights, m) > c.max)
    }

    /// Normal form of a single monomial as a list of (monomial, coefficient).
    fn reduce_monomial(&self, m: Monomial, coeff: Rational, out: &mut BTreeMap<Monomial, Rational>) {
        if coeff.is_zero() || self.vanishes(&m) {
            return;
        }
        for rule in &self.0.rules {
            if divides(&rule.lhs, &m) {
                for (rm, rc) in &rule.rhs {
                    let next: Monomial = m
                        .iter()
                        .zip(&rule.lhs)
                        .zip(rm)
                        .map(|((a, l), r)| a - l + r)
                        .collect();
                    self.reduce_monomial(next, &coeff * rc, out);
                }
                return;
            }
        }
        accumulate(out, m, coeff);
    }

    /// The zero element.
    pub fn zero(&self) -> GradedElement {
        GradedElement {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The unit element.
    pub fn one(&self) -> GradedElement {
        self.constant(Rational::one())
    }

    /// A constant.
    pub fn constant(&self, c: Rational) -> GradedElement {
        self.from_terms([(vec![0; self.0.names.len()], c)])
    }

    /// A generator by name.
    ///
    /// # Panics
    /// Panics if the name is unknown; use [`Ring::try_gen`] for fallible lookup.
    pub fn gen(&self, name: &str) -> GradedElement {
        self.try_gen(name).unwrap_or_else(|e| panic!("{e}"))
    }

    /// A generator by name.
    pub fn try_gen(&self, name: &str) -> Result<GradedElement, RingError> {
        self.monomial(&[(name, 1)])
    }

    /// The reduced form of a product of generator powers.
    pub fn monomial(&self, powers: &[Term<'_>]) -> Result<GradedElement, RingError> {
        let mut m = vec![0; self.0.names.len()];
        for (name, e) in powers {
            m[self.index_of(name)?] += e;
        }
        Ok(self.from_terms([(m, Rational::one())]))
    }

    /// Builds an element from raw (possibly unreduced) terms.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(&self, terms: I) -> GradedElement {
        let mut out = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), self.0.names.len(), "monomial length mismatch");
            self.reduce_monomial(m, c, &mut out);
        }
        GradedElement {
            ring: self.clone(),
            terms: out,
        }
    }
}

fn accumulate(out: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    match out.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// An element of a [`Ring`], always in normal form.
#[derive(Debug, Clone)]
pub struct GradedElement {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for GradedElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}
impl Eq for GradedElement {}

/// Multiplies two elements of the same ring, reducing the product.
pub fn ring_mul(a: &GradedElement, b: &GradedElement) -> Result<GradedElement, RingError> {
    if a.ring != b.ring {
        return Err(RingError::RingMismatch);
    }
    let mut out = BTreeMap::new();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            a.ring.reduce_monomial(m, ca * cb, &mut out);
        }
    }
    Ok(GradedElement {
        ring: a.ring.clone(),
        terms: out,
    })
}

impl GradedElement {
    /// The ring this element lives in.
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// `true` for the zero element.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// `true` when there are no terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates over (monomial, coefficient) in lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of the monomial given by generator powers (0 if absent).
    pub fn coefficient(&self, powers: &[Term<'_>]) -> Result<Rational, RingError> {
        let mut m = vec![0; self.ring.0.names.len()];
        for (name, e) in powers {
            m[self.ring.index_of(name)?] += e;
        }
        Ok(self.terms.get(&m).cloned().unwrap_or_else(Rational::zero))
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        let z = vec![0; self.ring.0.names.len()];
        self.terms.get(&z).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sum.
    pub fn add(&self, other: &GradedElement) -> Result<GradedElement, RingError> {
        if self.ring != other.ring {
            return Err(RingError::RingMismatch);
        }
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(GradedElement {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> GradedElement {
        if c.is_zero() {
            return self.ring.zero();
        }
        GradedElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    /// Non-negative power.
    pub fn pow(&self, n: u32) -> GradedElement {
        let mut acc = self.ring.one();
        for _ in 0..n {
            acc = ring_mul(&acc, self).expect("same ring");
        }
        acc
    }

    /// Homogeneous component of cohomological degree `d`.
    pub fn graded_part(&self, d: u32) -> GradedElement {
        GradedElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.ring.degree(m) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The common degree of all terms, if the element is homogeneous and
    /// nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| self.ring.degree(m));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    /// Formal inverse `1 / x` up to the top degree. Requires a nonzero
    /// constant term.
    pub fn series_inverse(&self) -> Result<GradedElement, RingError> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(RingError::NonUnitConstant(c.to_string()));
        }
        // x = c(1 + n) with n nilpotent; 1/x = c⁻¹ Σ (−n)^k.
        let c_inv = c.recip();
        let normalized = self.scale(&c_inv);
        let minus_n = normalized.add(&self.ring.constant(-Rational::one()))?.scale(&-Rational::one());
        let mut result = self.ring.one();
        let mut power = self.ring.one();
        loop {
            power = ring_mul(&power, &minus_n)?;
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result.scale(&c_inv))
    }

    /// Re-applies the rewrite rules (a no-op on well-formed elements).
    pub fn reduce(&self) -> GradedElement {
        self.ring
            .from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.clone())))
    }

    /// Replaces every occurrence of generator `name` by `value`.
    pub fn substitute(&self, name: &str, value: &GradedElement) -> Result<GradedElement, RingError> {
        if self.ring != value.ring {
            return Err(RingError::RingMismatch);
        }
        let i = self.ring.index_of(name)?;
        let mut powers = vec![self.ring.one()];
        let mut out = self.ring.zero();
        for (m, c) in &self.terms {
            let e = m[i] as usize;
            while powers.len() <= e {
                let next = ring_mul(powers.last().expect("nonempty"), value)?;
                powers.push(next);
            }
            let mut rest = m.clone();
            rest[i] = 0;
            let base = self.ring.from_terms([(rest, c.clone())]);
            out = out.add(&ring_mul(&base, &powers[e])?)?;
        }
        Ok(out)
    }

    /// The coefficient of `name^power`: all terms with exactly that exponent
    /// of `name`, with the generator removed.
    pub fn coefficient_of_power(&self, name: &str, power: u32) -> Result<GradedElement, RingError> {
        let i = self.ring.index_of(name)?;
        Ok(GradedElement {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m[i] == power)
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m[i] = 0;
                    (m, c.clone())
                })
                .collect(),
        })
    }

    /// Largest exponent of `name` appearing in any term.
    pub fn max_power(&self, name: &str) -> Result<u32, RingError> {
        let i = self.ring.index_of(name)?;
        Ok(self.terms.keys().map(|m| m[i]).max().unwrap_or(0))
    }

    /// Human-readable monomial, e.g. `c1*c5` or `eta*theta^2`.
    pub fn monomial_name(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .iter()
            .zip(&self.ring.0.names)
            .filter(|(e, _)| **e > 0)
            .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Terms as (monomial name, coefficient) pairs, for reports.
    pub fn named_terms(&self) -> Vec<(String, Rational)> {
        self.terms
            .iter()
            .map(|(m, c)| (self.monomial_name(m), c.clone()))
            .collect()
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let name = self.monomial_name(m);
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if name == "1" {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{a}*{name}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr<&GradedElement> for &GradedElement {
            type Output = GradedElement;
            /// # Panics
            /// Panics when the operands live in different rings.
            fn $m(self, rhs: &GradedElement) -> GradedElement {
                let f: fn(&GradedElement, &GradedElement) -> Result<GradedElement, RingError> = $body;
                f(self, rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<GradedElement> for GradedElement {
            type Output = GradedElement;
            fn $m(self, rhs: GradedElement) -> GradedElement {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
        impl std::ops::$tr<&GradedElement> for GradedElement {
            type Output = GradedElement;
            fn $m(self, rhs: &GradedElement) -> GradedElement {
                std::ops::$tr::$m(&self, rhs)
            }
        }
        impl std::ops::$tr<GradedElement> for &GradedElement {
            type Output = GradedElement;
            fn $m(self, rhs: GradedElement) -> GradedElement {
                std::ops::$tr::$m(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add(b));
binop!(Sub, sub, |a, b| a.add(&b.scale(&-Rational::one())));
binop!(Mul, mul, ring_mul);

impl std::ops::Neg for &GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        self.scale(&-Rational::one())
    }
}
impl std::ops::Neg for GradedElement {
    type Output = GradedElement;
    fn neg(self) -> GradedElement {
        -&self
    }
}

impl std::ops::Mul<&GradedElement> for &Rational {
    type Output = GradedElement;
    fn mul(self, rhs: &GradedElement) -> GradedElement {
        rhs.scale(self)
    }
}
impl std::ops::Mul<GradedElement> for Rational {
    type Output = GradedElement;
    fn mul(self, rhs: GradedElement) -> GradedElement {
        rhs.scale(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn toy() -> Ring {
        RingBuilder::new(6)
            .generator("g", 2)
            .generator("e", 2)
            .generator("t", 2)
            .rule(&[("e", 2)], &[])
            .rule(&[("g", 1), ("e", 1)], &[])
            .rule(&[("g", 2)], &[(&[("e", 1), ("t", 1)], int(-2))])
            .build()
            .unwrap()
    }

    #[test]
    fn relations_apply() {
        let r = toy();
        let g = r.gen("g");
        let e = r.gen("e");
        let t = r.gen("t");
        assert_eq!(&g * &g, (&e * &t).scale(&int(-2)));
        assert!((&e * &e).is_zero());
        assert!((&g * &e).is_zero());
        assert!(g.pow(3).is_zero());
    }

    #[test]
    fn top_degree_truncates() {
        let r = toy();
        let t = r.gen("t");
        assert!(!t.pow(3).is_zero());
        assert!(t.pow(4).is_zero());
    }

    #[test]
    fn rejects_increasing_rule() {
        let err = RingBuilder::new(4)
            .generator("a", 2)
            .generator("b", 2)
            .rule(&[("b", 2)], &[(&[("a", 2)], int(1))])
            .build()
            .unwrap_err();
        assert!(matches!(err, RingError::NonDecreasingRule(_)));
    }

    #[test]
    fn rejects_inhomogeneous_rule() {
        let err = RingBuilder::new(8)
            .generator("a", 2)
            .generator("b", 4)
            .rule(&[("a", 2)], &[(&[("b", 2)], int(1))])
            .build()
            .unwrap_err();
        assert!(matches!(err, RingError::InhomogeneousRule(_)));
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = toy().gen("g");
        let b = toy().gen("g");
        assert_eq!(ring_mul(&a, &b), Err(RingError::RingMismatch));
    }

    #[test]
    fn inverse_of_one_plus_h() {
        let r = RingBuilder::new(2).generator("h", 2).build().unwrap();
        let x = r.one() + r.gen("h");
        assert_eq!(x.series_inverse().unwrap(), r.one() - r.gen("h"));
        assert!(r.gen("h").series_inverse().is_err());
    }

    #[test]
    fn graded_part_and_display() {
        let r = toy();
        let x = r.one() + r.gen("e").scale(&int(54)) + r.gen("g").scale(&int(2))
            - (r.gen("e") * r.gen("t")).scale(&int(6));
        let p = x.graded_part(2);
        assert_eq!(p, r.gen("g").scale(&int(2)) + r.gen("e").scale(&int(54)));
        assert_eq!(p.to_string(), "2*g + 54*e");
        assert!(r.gen("t").graded_part(0).is_zero());
        assert_eq!(r.constant(frac(-1, 2)).to_string(), "-1/2");
    }

    #[test]
    fn substitute_and_coefficients() {
        let r = toy();
        let t = r.gen("t");
        let e = r.gen("e");
        let x = &t * &t + &e * &t;
        let y = x.substitute("t", &(r.one() + e.clone())).unwrap();
        // (1+e)^2 + e(1+e) = 1 + 3e
        assert_eq!(y, r.one() + e.scale(&int(3)));
        assert_eq!(x.coefficient_of_power("e", 1).unwrap(), t);
        assert_eq!(x.max_power("t").unwrap(), 2);
    }
}
