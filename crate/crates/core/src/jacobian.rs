//! Intersection theory on `X × W`, where `X` is a general genus-12 curve and
//! `W = W⁵₁₆(X)` its Brill–Noether locus of dimension 6.
//!
//! Classes are polynomials in
//!
//! * `eta` — the pullback of the point class of `X`,
//! * `gamma` — the mixed class of the Poincaré bundle (`γ² = −2ηθ`,
//!   `γη = 0`, `γ³ = 0`),
//! * `theta` — the pullback of the theta divisor,
//! * `y1` — the auxiliary degree-2 class in which the Chern classes of the
//!   tautological rank-6 bundle are expressed,
//! * `c1 … c7` — the Chern classes of that bundle (`c7` is kept as a symbol
//!   and set to zero only when a final class is formed), and
//! * `kappa` — the first Chern class of a rank-one kernel bundle on one of
//!   the two test surfaces `Z` and `Y`. It is *not* subject to any ring
//!   relation; it is eliminated by [`kernel_reduce`].
//!
//! The ring carries two auxiliary caps: the `X`-degree (`η` counts 2, `γ`
//! counts 1) is at most 2, and the `W`-degree (`γ` counts 1, `θ` and `y1`
//! count 2, `c_i` counts `2i`) is at most 12. As a consequence every
//! surviving top-degree class is divisible by `η`.
//!
//! The two pipelines [`compute_b1`] and [`compute_b0`] evaluate the virtual
//! degeneracy class of `Sym²E → F` on the test surfaces and produce the
//! boundary coefficients of the virtual divisor.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{factorial, frac, int, Rational};
use crate::ring::{GradedElement, Ring, RingBuilder, RingError};

/// Cohomological dimension of `X × W`.
pub const TOP_DEGREE: u32 = 14;

/// `2g(X) − 2` for the genus-12 curve `X`.
const TWO_G_MINUS_TWO: i64 = 22;

/// Errors raised by the Jacobian pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JacobianError {
    #[error("Chern class index {0} out of range 0..=7")]
    ChernIndex(u32),
    #[error("kernel class appears to power {0}, at most 2 is supported")]
    KappaDegree(u32),
    #[error("class is not of top degree: stray monomial {0}")]
    NotTopDegree(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// The test surface on which a kernel class lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Surface {
    /// The surface used against the test curve `F₁` (pairs `(y, L)` with
    /// `L` ramified at `y`).
    Z,
    /// The surface used against the test curve `F₀` (pairs `(y, L)` with
    /// `L` identifying `y` and the fixed point).
    Y,
}

/// Generator names in lex order.
pub const GENERATORS: [&str; 12] = [
    "gamma", "eta", "kappa", "theta", "y1", "c1", "c2", "c3", "c4", "c5", "c6", "c7",
];

/// The cohomology ring of `X × W` extended by the kernel symbol.
pub fn ring() -> &'static Ring {
    static RING: OnceLock<Ring> = OnceLock::new();
    RING.get_or_init(|| {
        let mut b = RingBuilder::new(TOP_DEGREE);
        for name in &GENERATORS[..5] {
            b = b.generator(name, 2);
        }
        for i in 1..=7u32 {
            b = b.generator(&format!("c{i}"), 2 * i);
        }
        b.weight_cap("X", &[("eta", 2), ("gamma", 1)], 2)
            .weight_cap(
                "W",
                &[
                    ("gamma", 1),
                    ("theta", 2),
                    ("y1", 2),
                    ("c1", 2),
                    ("c2", 4),
                    ("c3", 6),
                    ("c4", 8),
                    ("c5", 10),
                    ("c6", 12),
                    ("c7", 14),
                ],
                12,
            )
            .rule(&[("eta", 2)], &[])
            .rule(&[("gamma", 1), ("eta", 1)], &[])
            .rule(&[("gamma", 3)], &[])
            .rule(&[("gamma", 2)], &[(&[("eta", 1), ("theta", 1)], int(-2))])
            .build()
            .expect("the Jacobian ring is well formed")
    })
}

fn g(name: &str) -> GradedElement {
    ring().gen(name)
}

fn k(n: i64) -> Rational {
    int(n)
}

/// The Chern class `c_i` of the tautological bundle, as a formula in `θ` and
/// `y1`: `c_i = θ^i/i! − θ^{i−1}/(i−1)! · y1` for `1 ≤ i ≤ 6`, `c_0 = 1`,
/// and `c_7 = 0` because the bundle has rank 6.
pub fn chern_m(i: u32) -> Result<GradedElement, JacobianError> {
    let r = ring();
    match i {
        0 => Ok(r.one()),
        1..=6 => {
            let t = g("theta");
            let a = t.pow(i).scale(&Rational::new(BigInt::one(), factorial(i)));
            let b = (t.pow(i - 1) * g("y1")).scale(&Rational::new(BigInt::one(), factorial(i - 1)));
            Ok(a - b)
        }
        7 => Ok(r.zero()),
        _ => Err(JacobianError::ChernIndex(i)),
    }
}

fn c(i: u32) -> GradedElement {
    g(&format!("c{i}"))
}

/// `Σ_{j ≥ 0} x^j`, the inverse of `1 − x`.
fn geometric(x: &GradedElement) -> GradedElement {
    (ring().one() - x).series_inverse().expect("unit constant term")
}

/// The inverse total Chern class of the bundle that cuts out the surface:
/// the dual jet bundle of the Poincaré bundle for `Z` (an extension of the
/// Poincaré bundle `P` by `ω_X ⊗ P`), the dual of the rank-two bundle `B`
/// for `Y`.
///
/// With `c₁(P) = 16η + γ` and `deg ω_X = 22` this is
/// `Σ(16η+γ)^j · Σ(38η+γ)^j` for `Z` and `Σ(16η+γ)^j · (1 − η)` for `Y`.
pub fn auxiliary_inverse_chern(which: Surface) -> GradedElement {
    let p = g("eta").scale(&k(16)) + g("gamma");
    match which {
        Surface::Z => geometric(&p) * geometric(&(g("eta").scale(&k(38)) + g("gamma"))),
        Surface::Y => geometric(&p) * (ring().one() - g("eta")),
    }
}

/// Total Chern class of the dual tautological bundle, `1 + c1 + … + c7`.
fn tautological_total() -> GradedElement {
    (1..=7).fold(ring().one(), |acc, i| acc + c(i))
}

/// `c_j(M^∨ − S^∨)` where `S` is the bundle cutting out the surface: the
/// degree-`2j` part of `c(M^∨) · c(S^∨)⁻¹`.
fn difference_class(which: Surface, j: u32) -> GradedElement {
    (tautological_total() * auxiliary_inverse_chern(which)).graded_part(2 * j)
}

/// The class of the test surface in `H^10(X × W)` (Porteous).
pub fn surface_class(which: Surface) -> GradedElement {
    difference_class(which, 5)
}

/// The Chern classes of the rank-two bundles `A₂` (fibres `H⁰(L²(−2y))`)
/// and `B₂` (fibres `H⁰(L²(−y−q))`) on `X × Pic¹⁶(X)`.
#[derive(Debug, Clone)]
pub struct AuxiliaryBundles {
    pub c1_a2: GradedElement,
    pub c2_a2: GradedElement,
    pub c1_b2: GradedElement,
    pub c2_b2: GradedElement,
}

/// The four Chern classes of `A₂` and `B₂`.
pub fn chern_a2b2() -> AuxiliaryBundles {
    let t = g("theta");
    let e = g("eta");
    let ga = g("gamma");
    AuxiliaryBundles {
        c1_a2: -(t.scale(&k(4)) + ga.scale(&k(4)) + e.scale(&k(86))),
        c2_a2: (&t * &t).scale(&k(8)) + (&e * &t).scale(&k(320)) + (&ga * &t).scale(&k(16)),
        c1_b2: -(t.scale(&k(4)) + ga.scale(&k(2)) + e.scale(&k(31))),
        c2_b2: (&t * &t).scale(&k(8)) + (&e * &t).scale(&k(116)) + (&t * &ga).scale(&k(8)),
    }
}

/// Eliminates the kernel symbol `kappa` on the given surface.
///
/// Writing `x = x₀ + κ·x₁ + κ²·x₂`, the result is
/// `x₀·[S] + x₁·K₁(S) + x₂·K₂(S)` where `K₁` is the Harris–Tu expression for
/// `κ·ξ` (it already includes the surface) and `K₂` that for `κ²`. Finally
/// `c7` is set to zero.
pub fn kernel_reduce(x: &GradedElement, which: Surface) -> Result<GradedElement, JacobianError> {
    let kp = x.max_power("kappa")?;
    if kp > 2 {
        return Err(JacobianError::KappaDegree(kp));
    }
    let x0 = x.coefficient_of_power("kappa", 0)?;
    let x1 = x.coefficient_of_power("kappa", 1)?;
    let x2 = x.coefficient_of_power("kappa", 2)?;
    let k1 = -difference_class(which, 6);
    let k2 = difference_class(which, 7);
    let total = x0 * surface_class(which) + x1 * k1 + x2 * k2;
    Ok(total.substitute("c7", &ring().zero())?)
}

/// Evaluates a top-degree class on `X × W`.
///
/// The coefficient of `η` is taken, the Chern classes are replaced by their
/// `θ, y1` expressions, and each `θ^i y1^{6−i}` is evaluated as
/// `12!/(12−i)!`.
pub fn evaluate_top(x: &GradedElement) -> Result<Rational, JacobianError> {
    let (_, value) = theta_y1_reduction(x)?;
    Ok(value)
}

/// The `θ, y1` polynomial obtained from a top class after removing `η` and
/// substituting the Chern classes, together with its numerical value.
pub fn theta_y1_reduction(x: &GradedElement) -> Result<(GradedElement, Rational), JacobianError> {
    for (m, _) in x.terms() {
        if ring().degree(m) != TOP_DEGREE || m[1] != 1 {
            return Err(JacobianError::NotTopDegree(x.monomial_name(m)));
        }
    }
    let mut p = x.coefficient_of_power("eta", 1)?;
    for i in 1..=7 {
        p = p.substitute(&format!("c{i}"), &chern_m(i)?)?;
    }
    let twelve = factorial(12);
    let mut total = Rational::zero();
    for (m, coeff) in p.terms() {
        let i = m[3];
        let j = m[4];
        if i + j != 6 || m.iter().enumerate().any(|(idx, e)| *e > 0 && idx != 3 && idx != 4) {
            return Err(JacobianError::NotTopDegree(p.monomial_name(m)));
        }
        total += coeff * Rational::new(twelve.clone(), factorial(12 - i));
    }
    Ok((p, total))
}

/// `θ^i · y1^{6−i}` evaluated on `W`.
pub fn top_product(i: u32) -> Rational {
    assert!(i <= 6);
    Rational::new(factorial(12), factorial(12 - i))
}

/// The class of the degeneracy locus on a test surface, split into the part
/// without the kernel symbol and the kernel part, before and after
/// elimination.
#[derive(Debug, Clone)]
pub struct SurfaceComputation {
    pub surface: Surface,
    /// `c₂(Sym²E^∨ − F^∨)` restricted to the surface, a degree-4 polynomial
    /// that may involve `kappa`.
    pub integrand: GradedElement,
    /// Top-degree class after eliminating `kappa`; divisible by `η`.
    pub top_class: GradedElement,
    /// The `η`-coefficient of `top_class`, in `θ` and the `c_i`.
    pub eta_polynomial: GradedElement,
    /// The same after substituting the Chern classes, in `θ` and `y1`.
    pub theta_y1_polynomial: GradedElement,
    /// Its value.
    pub value: Rational,
}

/// Assembles `20c₁²(E) + 8c₂(E) − 7c₁(E)c₁(F) + c₁²(F) − c₂(F)` on a surface,
/// where `E` restricts to the dual tautological bundle and `F` is an
/// extension of `u^{⊗2}` by the rank-two bundle of the surface.
pub fn degeneracy_integrand(which: Surface) -> GradedElement {
    let aux = chern_a2b2();
    let (c1x, c2x, u0) = match which {
        Surface::Z => (aux.c1_a2, aux.c2_a2, g("gamma").scale(&k(2)) + g("eta").scale(&k(54))),
        Surface::Y => (aux.c1_b2, aux.c2_b2, g("gamma") + g("eta").scale(&k(15))),
    };
    let u = u0 + g("kappa");
    let c1e = -c(1);
    let c2e = c(2);
    let c1f = &c1x + &u.scale(&k(2));
    let c2f = &c2x + &(&c1x * &u).scale(&k(2));
    (&c1e * &c1e).scale(&k(20)) + c2e.scale(&k(8)) - (&c1e * &c1f).scale(&k(7)) + &c1f * &c1f - c2f
}

fn run_surface(which: Surface) -> Result<SurfaceComputation, JacobianError> {
    let integrand = degeneracy_integrand(which);
    let top_class = kernel_reduce(&integrand, which)?;
    let eta_polynomial = top_class.coefficient_of_power("eta", 1)?;
    let (theta_y1_polynomial, value) = theta_y1_reduction(&top_class)?;
    Ok(SurfaceComputation {
        surface: which,
        integrand,
        top_class,
        eta_polynomial,
        theta_y1_polynomial,
        value,
    })
}

/// Result of the `b₁` pipeline.
#[derive(Debug, Clone)]
pub struct B1Result {
    pub computation: SurfaceComputation,
    /// `σ*(F₁) · c₂(…)`, the intersection number on `Z`.
    pub intersection: Rational,
    pub b1: Rational,
}

/// `b₁ = σ*(F₁)·c₂(Sym²E^∨ − F^∨) / (2g(X) − 2)`.
pub fn compute_b1() -> Result<B1Result, JacobianError> {
    let computation = run_surface(Surface::Z)?;
    let intersection = computation.value.clone();
    let b1 = &intersection / k(TWO_G_MINUS_TWO);
    Ok(B1Result {
        computation,
        intersection,
        b1,
    })
}

/// Result of the `b₀` pipeline.
#[derive(Debug, Clone)]
pub struct B0Result {
    pub computation: SurfaceComputation,
    /// `σ*(F₀) · c₂(…)`, the intersection number on `Y`.
    pub intersection: Rational,
    pub b0: Rational,
}

/// `b₀ = (σ*(F₀)·c₂(…) + b₁) / (2g(X))`.
pub fn compute_b0(b1: &Rational) -> Result<B0Result, JacobianError> {
    let computation = run_surface(Surface::Y)?;
    let intersection = computation.value.clone();
    let b0 = (&intersection + b1) / k(TWO_G_MINUS_TWO + 2);
    Ok(B0Result {
        computation,
        intersection,
        b0,
    })
}

/// The virtual divisor `aλ − b₀δ₀ − b₁δ₁` on the moduli space of genus-13
/// curves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualClass {
    pub a: Rational,
    pub b0: Rational,
    pub b1: Rational,
}

impl VirtualClass {
    /// `a / b₀`.
    pub fn slope(&self) -> Rational {
        &self.a / &self.b0
    }

    /// The largest common integer factor of `(a, b₀, b₁)` when all are
    /// integers.
    pub fn content(&self) -> Option<BigInt> {
        use num_integer::Integer;
        if ![&self.a, &self.b0, &self.b1].iter().all(|q| q.is_integer()) {
            return None;
        }
        Some(self.a.to_integer().gcd(&self.b0.to_integer()).gcd(&self.b1.to_integer()))
    }
}

/// Runs both pipelines and closes the system with `a − 12b₀ + b₁ = 0`.
pub fn compute_virtual_class() -> Result<(VirtualClass, B1Result, B0Result), JacobianError> {
    let r1 = compute_b1()?;
    let r0 = compute_b0(&r1.b1)?;
    let a = k(12) * &r0.b0 - &r1.b1;
    Ok((
        VirtualClass {
            a,
            b0: r0.b0.clone(),
            b1: r1.b1.clone(),
        },
        r1,
        r0,
    ))
}

/// `6 + 10/13`, the slope of the Brill–Noether divisors in genus 13 range.
pub fn brill_noether_slope_bound() -> Rational {
    frac(88, 13)
}
