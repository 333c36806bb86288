//! The Hecke-correspondence count of rank-two bundles and the Porteous
//! resonance count in genus 13.
//!
//! The projective bundle `P → SU_X(2, ω(p))` carries the relative hyperplane
//! class `h` with `h² = αh − (α² − β)/4`, where `α, β, γ` are the
//! tautological classes of complex degrees 1, 2, 3 on the moduli space. The
//! classes `c_n` of the Lagrangian degeneracy formalism satisfy a four-term
//! recursion; the virtual class of the degeneracy locus is an 8×8
//! determinant in them, which splits as `f(α,β,γ) + h·u(α,β,γ)`. Top
//! intersection numbers on the moduli space are evaluated with Thaddeus'
//! closed formula in terms of Bernoulli numbers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{factorial, frac, from_bigint, int, pow_int, Rational};
use crate::ring::{GradedElement, Ring, RingBuilder};

/// Genus of the curve.
pub const GENUS: u32 = 13;

/// Complex dimension of `SU_X(2, ω(p))`, `3g − 3`.
pub const MODULI_DIMENSION: u32 = 3 * GENUS - 3;

/// Errors raised by the Hecke pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("α^{m}β^{n}γ^{p} has complex degree {deg}, expected {expected}")]
    DegreeMismatch { m: u32, n: u32, p: u32, deg: u32, expected: u32 },
    #[error("γ exponent {0} exceeds the genus")]
    GammaTooLarge(u32),
    #[error("c_{0} requested, only 0..=15 are used")]
    SequenceIndex(usize),
    #[error("element contains a monomial outside α, β, γ, h: {0}")]
    ForeignMonomial(String),
}

/// Builds the ring `ℚ[h, α, β, γ]/(h² − αh + (α²−β)/4)` truncated above the
/// given complex degree.
pub fn verlinde_ring(top_complex_degree: u32) -> Ring {
    RingBuilder::new(2 * top_complex_degree)
        .generator("h", 2)
        .generator("alpha", 2)
        .generator("beta", 4)
        .generator("gamma", 6)
        .rule(
            &[("h", 2)],
            &[
                (&[("alpha", 1), ("h", 1)], int(1)),
                (&[("alpha", 2)], frac(-1, 4)),
                (&[("beta", 1)], frac(1, 4)),
            ],
        )
        .build()
        .expect("the Hecke ring is well formed")
}

/// The ring used for the determinant: everything up to complex degree 37
/// (the dimension of `P`).
pub fn hecke_ring() -> &'static Ring {
    static RING: std::sync::OnceLock<Ring> = std::sync::OnceLock::new();
    RING.get_or_init(|| verlinde_ring(MODULI_DIMENSION + 1))
}

/// An element `p + h·q` with `p, q` in `ℚ[α, β, γ]`, stored in reduced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerlindeElement(pub GradedElement);

impl VerlindeElement {
    /// Splits into `(p, q)` with `self = p + h·q`.
    pub fn split(&self) -> (GradedElement, GradedElement) {
        let x = &self.0;
        (
            x.coefficient_of_power("h", 0).expect("h exists"),
            x.coefficient_of_power("h", 1).expect("h exists"),
        )
    }

    /// Product, reduced by the relation for `h²`.
    pub fn h_mul(&self, other: &VerlindeElement) -> VerlindeElement {
        VerlindeElement(&self.0 * &other.0)
    }
}

/// The classes `c_0, …, c_15` from the initial values and the recursion
/// `(n+4)c_{n+4} = h c_{n+3} − (βh/4 + γ/2)c_{n+1} + ((n+2)/2) β c_{n+2}
/// − (β/4)² n c_n` for `n ≥ 1`.
pub fn c_sequence_in(ring: &Ring, len: usize) -> Vec<GradedElement> {
    let h = ring.gen("h");
    let b = ring.gen("beta");
    let gm = ring.gen("gamma");
    let mut c = vec![
        ring.constant(int(2)),
        h.clone(),
        h.pow(2).scale(&frac(1, 2)),
        (h.pow(3).scale(&frac(1, 2)) + (&b * &h).scale(&frac(1, 4)) - gm.scale(&frac(1, 2)))
            .scale(&frac(1, 3)),
        (h.pow(4).scale(&frac(1, 6)) + (&b * &h.pow(2)).scale(&frac(1, 3))
            - (&gm * &h).scale(&frac(2, 3)))
        .scale(&frac(1, 4)),
    ];
    let mut n = 1usize;
    while c.len() < len {
        let rhs = &h * &c[n + 3] - &((&b * &h).scale(&frac(1, 4)) + gm.scale(&frac(1, 2))) * &c[n + 1]
            + (&b * &c[n + 2]).scale(&frac(n as i64 + 2, 2))
            - (&b * &b * &c[n]).scale(&frac(n as i64, 16));
        c.push(rhs.scale(&frac(1, n as i64 + 4)));
        n += 1;
    }
    c.truncate(len);
    c
}

/// `c_n` for `0 ≤ n ≤ 15`.
pub fn c_sequence(n: usize) -> Result<VerlindeElement, HeckeError> {
    if n > 15 {
        return Err(HeckeError::SequenceIndex(n));
    }
    Ok(VerlindeElement(c_sequence_in(hecke_ring(), 16).swap_remove(n)))
}

/// Residual of the recursion at step `n`; zero for a correct sequence.
pub fn recursion_residual(c: &[GradedElement], n: usize) -> GradedElement {
    let ring = c[0].ring();
    let h = ring.gen("h");
    let b = ring.gen("beta");
    let gm = ring.gen("gamma");
    let lhs = c[n + 4].scale(&int(n as i64 + 4)) - (&b * &c[n + 2]).scale(&frac(n as i64 + 2, 2))
        + (&b * &b * &c[n]).scale(&frac(n as i64, 16));
    let rhs = &h * &c[n + 3] - &((&b * &h).scale(&frac(1, 4)) + gm.scale(&frac(1, 2))) * &c[n + 1];
    lhs - rhs
}

/// The 8×8 matrix of the determinantal formula, as indices into the
/// sequence (`None` for a zero entry).
pub fn bp8_pattern() -> [[Option<usize>; 8]; 8] {
    let mut m = [[None; 8]; 8];
    // Rows 1–5: c_{2(4−r)+j}.
    for r in 0..5 {
        for j in 0..8 {
            m[r][j] = Some(2 * (4 - r) + j);
        }
    }
    // Rows 6–8: shifted copies starting at c_0 in columns 2, 4, 6.
    for (r, start) in [(5usize, 2usize), (6, 4), (7, 6)] {
        for j in start..8 {
            m[r][j] = Some(j - start);
        }
    }
    m
}

/// Determinant of a square matrix over a commutative ring by Laplace
/// expansion with memoization over the set of used columns. Division free.
pub fn determinant(matrix: &[Vec<Option<GradedElement>>], ring: &Ring) -> GradedElement {
    let n = matrix.len();
    // partial[mask] = signed sum over injective assignments of the first
    // popcount(mask) rows to the columns in mask.
    let mut partial: BTreeMap<u32, GradedElement> = BTreeMap::new();
    partial.insert(0, ring.one());
    for (row, entries) in matrix.iter().enumerate() {
        let mut next: BTreeMap<u32, GradedElement> = BTreeMap::new();
        for (mask, value) in &partial {
            for (col, entry) in entries.iter().enumerate() {
                let Some(entry) = entry else { continue };
                if mask & (1 << col) != 0 {
                    continue;
                }
                // Sign: parity of the number of used columns to the right of
                // `col` (inversions contributed by this row).
                let inversions = (mask >> (col + 1)).count_ones();
                let mut term = value * entry;
                if inversions % 2 == 1 {
                    term = -term;
                }
                let key = mask | (1 << col);
                let slot = next.entry(key).or_insert_with(|| ring.zero());
                *slot = &*slot + &term;
            }
        }
        partial = next;
        debug_assert!(partial.keys().all(|m| m.count_ones() as usize == row + 1));
    }
    partial.remove(&((1u32 << n) - 1)).unwrap_or_else(|| ring.zero())
}

/// The virtual class of the degeneracy locus, `f + h·u`.
pub fn bp8_determinant() -> VerlindeElement {
    let ring = hecke_ring();
    let c = c_sequence_in(ring, 16);
    let matrix: Vec<Vec<Option<GradedElement>>> = bp8_pattern()
        .iter()
        .map(|row| row.iter().map(|e| e.map(|i| c[i].clone())).collect())
        .collect();
    VerlindeElement(determinant(&matrix, ring))
}

/// Bernoulli numbers `B_0, …, B_n` (with `B_1 = −1/2`) from the recurrence
/// `Σ_{k=0}^{m} C(m+1, k) B_k = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for m in 1..=n {
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += from_bigint(binomial(BigInt::from(m + 1), BigInt::from(k))) * bk;
        }
        b.push(-s / int(m as i64 + 1));
    }
    b
}

/// `B_q`, with `B_q = 0` for odd `q ≥ 3`.
pub fn bernoulli(q: usize) -> Rational {
    bernoulli_numbers(q).swap_remove(q)
}

/// The Bernoulli values `B_2, B_4, …, B_24` as used by the count.
pub fn bernoulli_table() -> Vec<(usize, Rational)> {
    let b = bernoulli_numbers(24);
    (2..=24).step_by(2).map(|q| (q, b[q].clone())).collect()
}

/// `∫ α^m β^n γ^p` over `SU_X(2, ω(p))` for `g = 13`.
///
/// With `q = m + p + 1 − g` the value is
/// `(−1)^{g−p} g! m! / ((g−p)! q!) · 2^{2g−2−p} (2^q − 2) B_q`, read as 0 when
/// `q < 0`, when `q = 1`, and when `q ≥ 3` is odd.
pub fn thaddeus_number(m: u32, n: u32, p: u32) -> Result<Rational, HeckeError> {
    let g = GENUS;
    let deg = m + 2 * n + 3 * p;
    if deg != MODULI_DIMENSION {
        return Err(HeckeError::DegreeMismatch { m, n, p, deg, expected: MODULI_DIMENSION });
    }
    if p > g {
        return Err(HeckeError::GammaTooLarge(p));
    }
    let q = m as i64 + p as i64 + 1 - g as i64;
    if q < 0 || q == 1 || (q >= 3 && q % 2 == 1) {
        return Ok(Rational::zero());
    }
    let q = q as u32;
    let sign = if (g - p).is_multiple_of(2) { int(1) } else { int(-1) };
    let ratio = Rational::new(
        factorial(g) * factorial(m),
        factorial(g - p) * factorial(q),
    );
    let power = pow_int(2, 2 * g - 2 - p);
    let twos = pow_int(2, q) - int(2);
    Ok(sign * ratio * power * twos * bernoulli(q as usize))
}

/// `∫_{SU} x` for `x ∈ ℚ[α, β, γ]`, monomial by monomial.
pub fn integrate_su(x: &GradedElement) -> Result<Rational, HeckeError> {
    let mut total = Rational::zero();
    for (mono, coeff) in x.terms() {
        if mono[0] != 0 {
            return Err(HeckeError::ForeignMonomial(x.monomial_name(mono)));
        }
        total += coeff * thaddeus_number(mono[1], mono[2], mono[3])?;
    }
    Ok(total)
}

/// `∫_P (p + h·q) = ∫_{SU} q` (integration along the `P¹` fibres).
pub fn integrate(x: &VerlindeElement) -> Result<Rational, HeckeError> {
    let (_, q) = x.split();
    integrate_su(&q)
}

/// Outcome of the bundle count.
#[derive(Debug, Clone, Serialize)]
pub struct BundleCount {
    /// `∫_{SU} f`, equivalently `∫_P h·f`.
    #[serde(with = "crate::rational::serde_str")]
    pub integral_f: Rational,
    /// `∫_{SU} α·u`, equivalently `∫_P h·α·u`.
    #[serde(with = "crate::rational::serde_str")]
    pub integral_alpha_u: Rational,
    /// The number of bundles, `½ ∫ h·α·u = −½ ∫ h·f`.
    pub count: u64,
    /// Number of monomials in `f`.
    pub f_terms: usize,
    /// Human-readable statement of the sign convention applied.
    pub convention: String,
}

/// Counts the bundles from the determinant.
///
/// Intersecting the class `f + h·u = a·[fibre]` with `h` and `α` gives
/// `2a = ∫ h·α·u = −∫ h·f`; the count is reported as `½∫h·α·u`, which is
/// `|½ ∫ f|`.
pub fn count_bundles() -> Result<BundleCount, HeckeError> {
    let det = bp8_determinant();
    count_from_determinant(&det)
}

/// As [`count_bundles`], for an already computed determinant.
pub fn count_from_determinant(det: &VerlindeElement) -> Result<BundleCount, HeckeError> {
    let ring = det.0.ring();
    let (f, u) = det.split();
    let hf = VerlindeElement(&ring.gen("h") * &f);
    let hau = VerlindeElement(&(&ring.gen("h") * &ring.gen("alpha")) * &u);
    let integral_f = integrate(&hf)?;
    let integral_alpha_u = integrate(&hau)?;
    let twice = &integral_alpha_u;
    let count = (twice / int(2)).abs().to_integer().to_u64().unwrap_or(0);
    Ok(BundleCount {
        integral_f,
        integral_alpha_u,
        count,
        f_terms: f.len(),
        convention: "count = (1/2)∫ h·α·u = −(1/2)∫ h·f; the printed a = (1/2)∫ h·f has the opposite sign"
            .to_string(),
    })
}

/// The ring `ℚ[h, s, α, β]/(h² − αh + (α²−β)/4, s² − β)` with a formal
/// square root `s` of `β`, truncated above complex degree `top`.
fn root_extended_ring(top: u32) -> Ring {
    RingBuilder::new(2 * top)
        .generator("h", 2)
        .generator("s", 2)
        .generator("alpha", 2)
        .generator("beta", 4)
        .rule(
            &[("h", 2)],
            &[
                (&[("alpha", 1), ("h", 1)], int(1)),
                (&[("alpha", 2)], frac(-1, 4)),
                (&[("beta", 1)], frac(1, 4)),
            ],
        )
        .rule(&[("s", 2)], &[(&[("beta", 1)], int(1))])
        .build()
        .expect("well formed")
}

/// Checks the closed form for powers of `h`: with `r± = (α ± s)/2` the two
/// roots of the quadratic relation, Lagrange interpolation gives
/// `2s·hⁿ = (2h − α + s)·r₊ⁿ − (2h − α − s)·r₋ⁿ`.
/// Both sides are computed independently — the left by repeated reduction
/// of `h²`, the right by expanding the binomials — for `2 ≤ n ≤ max_n`.
/// Returns the first failing `n`, if any.
pub fn check_powers_of_h(max_n: u32) -> Option<u32> {
    let ring = root_extended_ring(max_n + 2);
    let h = ring.gen("h");
    let s = ring.gen("s");
    let a = ring.gen("alpha");
    let plus = (&a + &s).scale(&frac(1, 2));
    let minus = (&a - &s).scale(&frac(1, 2));
    let two_h_minus_a = h.scale(&int(2)) - a.clone();
    let left = &two_h_minus_a + &s;
    let right = &two_h_minus_a - &s;
    let two_s = s.scale(&int(2));
    let (mut hp, mut pp, mut mp) = (ring.one(), ring.one(), ring.one());
    for n in 1..=max_n {
        hp = &hp * &h;
        pp = &pp * &plus;
        mp = &mp * &minus;
        if n >= 2 && &two_s * &hp != &left * &pp - &right * &mp {
            return Some(n);
        }
    }
    None
}

/// The residual `s(α²−β)hⁿ − N₊r₊ⁿ − N₋r₋ⁿ` of the closed form with the
/// numerators `N± = ±h(2h − 2α)s + α² − 2αh + β` taken literally. Its
/// numerators are not homogeneous, so the residual is nonzero; kept as a
/// diagnostic for the regression report.
pub fn literal_powers_of_h_residual(n: u32) -> GradedElement {
    let ring = root_extended_ring(n + 4);
    let h = ring.gen("h");
    let s = ring.gen("s");
    let a = ring.gen("alpha");
    let b = ring.gen("beta");
    let common = &a * &a - (&a * &h).scale(&int(2)) + b.clone();
    let twisted = &(&h * &(&h - &a).scale(&int(2))) * &s;
    let n_plus = &twisted + &common;
    let n_minus = &common - &twisted;
    let plus = (&a + &s).scale(&frac(1, 2));
    let minus = (&a - &s).scale(&frac(1, 2));
    let lhs = &(&s * &(&a * &a - b)) * &h.pow(n);
    lhs - &n_plus * &plus.pow(n) - &n_minus * &minus.pow(n)
}

/// The three numbers of the Porteous computation on `P⁶`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PorteousCount {
    /// `[1/(1+2h)]_6` as a multiple of `h⁶`.
    pub porteous: i64,
    /// Excess contribution of the embedded curve.
    pub excess: i64,
    /// Difference: the number of bundles with the given subpencil.
    pub difference: i64,
}

/// Degree of the line bundle `L` in the Porteous count.
const DEG_L: i64 = 17;

/// Rank of the kernel bundle `M` (a hyperplane of `H⁰(L)`, which has
/// dimension 7).
const RANK_M: i64 = 6;

/// The Porteous count on `P⁶ = P(H⁰(L)^∨)`.
///
/// With `c(M) = 1/(1+h)` and `c(⋀²M) = (1+2h)/(1+h)⁷`, the bundle
/// `A = M ⊗ H⁰(L) / ⋀²M` has `c(A) = c(M)⁷ / c(⋀²M)`. The dual map
/// `H⁰(L²)^∨ → A^∨` (ranks 22 → 27) fails to be injective along a locus of
/// class `c₆(A^∨)`.
///
/// The excess contribution of the curve `X ⊂ P⁶` is
/// `−5c₁(Ker) + c₁(A^∨|X) − c₁(N)` with `c₁(Ker|X) = −2 deg L` (so that the
/// first term is `10 deg L`), `c₁(A^∨|X) = 2 deg L` and
/// `c₁(N) = 7 deg L + 2g − 2`.
pub fn porteous_resonance_count() -> PorteousCount {
    let ring = RingBuilder::new(12).generator("h", 2).build().expect("well formed");
    let h = ring.gen("h");
    let one_plus_h = ring.one() + h.clone();
    let c_m = one_plus_h.series_inverse().expect("unit");
    let c_wedge2 = (ring.one() + h.scale(&int(2))) * one_plus_h.pow(7).series_inverse().expect("unit");
    let c_a = c_m.pow(7) * c_wedge2.series_inverse().expect("unit");
    let c_a_dual = c_a.substitute("h", &-h.clone()).expect("h exists");
    let porteous = c_a_dual
        .coefficient(&[("h", 6)])
        .expect("h exists")
        .to_integer()
        .to_i64()
        .expect("small");
    let g = GENUS as i64;
    let ker = -2 * DEG_L;
    let a_dual = 2 * DEG_L;
    let normal = 7 * DEG_L + 2 * g - 2;
    let excess = -(RANK_M - 1) * ker + a_dual - normal;
    PorteousCount {
        porteous,
        excess,
        difference: porteous - excess,
    }
}

/// `[1/(1+2h)]_6` computed directly.
pub fn inverse_one_plus_two_h_degree6() -> GradedElement {
    let ring = RingBuilder::new(12).generator("h", 2).build().expect("well formed");
    let x = ring.one() + ring.gen("h").scale(&int(2));
    x.series_inverse().expect("unit").graded_part(12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_squared_relation() {
        let r = hecke_ring();
        let h = VerlindeElement(r.gen("h"));
        let hh = h.h_mul(&h);
        let a = r.gen("alpha");
        let expect = &a * &r.gen("h") - (&a * &a - r.gen("beta")).scale(&frac(1, 4));
        assert_eq!(hh.0, expect);
        let (p, q) = hh.split();
        assert_eq!(q, a);
        assert_eq!(p, -(&r.gen("alpha") * &r.gen("alpha") - r.gen("beta")).scale(&frac(1, 4)));
    }

    #[test]
    fn initial_values() {
        let r = hecke_ring();
        let c = c_sequence_in(r, 16);
        assert_eq!(c[0], r.constant(int(2)));
        assert_eq!(c[2], r.gen("h").pow(2).scale(&frac(1, 2)));
        for n in 1..=11 {
            assert!(recursion_residual(&c, n).is_zero(), "n = {n}");
        }
        for (n, cn) in c.iter().enumerate() {
            if n > 0 {
                assert_eq!(cn.homogeneous_degree(), Some(2 * n as u32));
            }
        }
    }

    #[test]
    fn pattern_entries() {
        let p = bp8_pattern();
        assert_eq!(p[4][0], Some(0));
        assert_eq!(p[7][6], Some(0));
        assert_eq!(p[0][7], Some(15));
        assert_eq!(p[7][5], None);
    }

    #[test]
    fn determinant_of_small_integer_matrix() {
        let r = verlinde_ring(4);
        let k = |n: i64| Some(r.constant(int(n)));
        let m = vec![vec![k(2), k(1), None], vec![k(1), k(3), k(1)], vec![None, k(1), k(4)]];
        // 2(12−1) − 1(4−0) + 0 = 18
        assert_eq!(determinant(&m, &r), r.constant(int(18)));
    }

    #[test]
    fn bernoulli_values() {
        let t = bernoulli_table();
        let expect = [
            (1, 6),
            (-1, 30),
            (1, 42),
            (-1, 30),
            (5, 66),
            (-691, 2730),
            (7, 6),
            (-3617, 510),
            (43867, 798),
            (-174611, 330),
            (854513, 138),
            (-236364091, 2730),
        ];
        assert_eq!(t.len(), 12);
        for ((q, b), (n, d)) in t.iter().zip(expect) {
            assert_eq!(*b, frac(n, d), "B_{q}");
        }
        assert!(bernoulli(5).is_zero());
    }

    #[test]
    fn thaddeus_conventions() {
        // In degree 36, q = m + p − 12 is always even.
        for p in 0..=12u32 {
            for n in 0..=18u32 {
                if 3 * p + 2 * n <= 36 {
                    let m = 36 - 3 * p - 2 * n;
                    assert_eq!((m + p) % 2, 0);
                }
            }
        }
        // q < 0 ⇒ 0.
        assert!(thaddeus_number(0, 18, 0).unwrap().is_zero());
        assert!(thaddeus_number(1, 1, 1).is_err());
    }

    #[test]
    fn thaddeus_top_alpha_power() {
        // Independent evaluation for α^36: q = 24, sign (−1)^13, g!36!/(13!24!)
        // · 2^24 · (2^24 − 2) · B_24.
        let g13 = factorial(13);
        let expect = -Rational::new(g13.clone() * factorial(36), g13 * factorial(24))
            * pow_int(2, 24)
            * (pow_int(2, 24) - int(2))
            * frac(-236364091, 2730);
        assert_eq!(thaddeus_number(36, 0, 0).unwrap(), expect);
    }

    #[test]
    fn porteous_numbers() {
        let r = porteous_resonance_count();
        assert_eq!(r, PorteousCount { porteous: 64, excess: 61, difference: 3 });
        let x = inverse_one_plus_two_h_degree6();
        assert_eq!(x.coefficient(&[("h", 6)]).unwrap(), int(64));
    }

    #[test]
    fn powers_of_h_small() {
        assert_eq!(check_powers_of_h(12), None);
    }

    #[test]
    fn literal_numerators_are_inhomogeneous() {
        assert!(!literal_powers_of_h_residual(2).is_zero());
    }
}
