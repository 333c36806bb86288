//! Divisor classes on the moduli space of genus-13 curves and on the moduli
//! space of genus-13 Prym curves: slopes, the pushforward of the
//! tautological class `γ`, and the downstream Mukai–Petri and theta classes
//! together with the inequalities that decide the Kodaira dimension.
//!
//! Boundary coefficients follow the convention `aλ − Σ b_i δ_i`. A
//! coefficient may be exact, only bounded from below, or unknown; nothing
//! here ever invents a value for an unknown coefficient.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::jacobian::VirtualClass;
use crate::rational::{frac, int, Rational};

/// Genus of the curves.
pub const GENUS: i64 = 13;

/// Degree of the forgetful map from the moduli of bundles to the moduli of
/// curves.
pub const FORGETFUL_DEGREE: i64 = 3;

/// Errors raised by divisor-class operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("boundary coefficient of {0} is unknown")]
    UnknownCoefficient(String),
    #[error("boundary coefficient of {0} is not positive")]
    NonPositiveBoundary(String),
    #[error("slope of a class with no boundary coefficients is undefined")]
    NoBoundary,
}

/// A boundary coefficient `b` (the class contains `−b·δ`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Coefficient {
    /// Known exactly.
    Exact(#[serde(with = "crate::rational::serde_str")] Rational),
    /// Only a lower bound `b ≥ value` is known.
    AtLeast(#[serde(with = "crate::rational::serde_str")] Rational),
    /// Not known.
    Unknown,
}

impl Coefficient {
    /// The exact value or lower bound, if any.
    pub fn bound(&self) -> Option<&Rational> {
        match self {
            Coefficient::Exact(q) | Coefficient::AtLeast(q) => Some(q),
            Coefficient::Unknown => None,
        }
    }

    /// The exact value, if known.
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Coefficient::Exact(q) => Some(q),
            _ => None,
        }
    }

    fn scale(&self, c: &Rational) -> Coefficient {
        match self {
            Coefficient::Exact(q) => Coefficient::Exact(q * c),
            Coefficient::AtLeast(q) => Coefficient::AtLeast(q * c),
            Coefficient::Unknown => Coefficient::Unknown,
        }
    }

    /// Sum of two coefficients; a bound plus anything known is a bound.
    fn add(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(a + b),
            (Coefficient::Unknown, _) | (_, Coefficient::Unknown) => Coefficient::Unknown,
            (a, b) => Coefficient::AtLeast(a.bound().unwrap() + b.bound().unwrap()),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(q) => write!(f, "{q}"),
            Coefficient::AtLeast(q) => write!(f, "≥{q}"),
            Coefficient::Unknown => write!(f, "?"),
        }
    }
}

/// Which part of the moduli space a class lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// The full compactification, with boundary `δ₀, …, δ₆`.
    Full,
    /// The partial compactification whose only boundary divisor is `δ₀`.
    Irreducible,
}

/// A class `aλ − Σ b_i δ_i` on the moduli space of genus-13 curves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivClassM13 {
    #[serde(with = "crate::rational::serde_str")]
    pub lambda: Rational,
    /// `b₀, …, b₆`; for [`Support::Irreducible`] only `b₀` is meaningful.
    pub boundary: Vec<Coefficient>,
    pub support: Support,
}

impl DivClassM13 {
    /// A class on the partial compactification, `aλ − b₀δ₀`.
    pub fn irreducible(a: Rational, b0: Rational) -> Self {
        let mut boundary = vec![Coefficient::Unknown; 7];
        boundary[0] = Coefficient::Exact(b0);
        DivClassM13 { lambda: a, boundary, support: Support::Irreducible }
    }

    /// The coefficient `b₀`.
    pub fn b0(&self) -> &Coefficient {
        &self.boundary[0]
    }

    /// Multiplies by a rational number.
    pub fn scale(&self, c: &Rational) -> Self {
        DivClassM13 {
            lambda: &self.lambda * c,
            boundary: self.boundary.iter().map(|b| b.scale(c)).collect(),
            support: self.support,
        }
    }

    /// Sum of two classes on the same support.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.support, other.support, "classes on different supports");
        DivClassM13 {
            lambda: &self.lambda + &other.lambda,
            boundary: self.boundary.iter().zip(&other.boundary).map(|(a, b)| a.add(b)).collect(),
            support: self.support,
        }
    }

    /// Boundary coefficients that take part in the slope.
    fn relevant(&self) -> &[Coefficient] {
        match self.support {
            Support::Full => &self.boundary,
            Support::Irreducible => &self.boundary[..1],
        }
    }
}

impl fmt::Display for DivClassM13 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}λ", self.lambda)?;
        for (i, b) in self.relevant().iter().enumerate() {
            write!(f, " − ({b})δ{i}")?;
        }
        Ok(())
    }
}

/// The slope `a / min_i b_i`.
///
/// Every relevant boundary coefficient must be known exactly or bounded
/// below, and the minimum must be attained by an exactly known coefficient
/// that is no larger than every lower bound.
pub fn slope(c: &DivClassM13) -> Result<Rational, ModuliError> {
    let mut min_exact: Option<Rational> = None;
    let mut min_bound: Option<Rational> = None;
    for (i, b) in c.relevant().iter().enumerate() {
        let name = format!("δ{i}");
        match b {
            Coefficient::Unknown => return Err(ModuliError::UnknownCoefficient(name)),
            Coefficient::Exact(q) => {
                if !q.is_positive() {
                    return Err(ModuliError::NonPositiveBoundary(name));
                }
                if min_exact.as_ref().is_none_or(|m| q < m) {
                    min_exact = Some(q.clone());
                }
            }
            Coefficient::AtLeast(q) => {
                if min_bound.as_ref().is_none_or(|m| q < m) {
                    min_bound = Some(q.clone());
                }
            }
        }
    }
    let min = min_exact.ok_or(ModuliError::NoBoundary)?;
    if let Some(lb) = min_bound {
        if lb < min {
            return Err(ModuliError::UnknownCoefficient(
                "a boundary coefficient only bounded below the minimum".into(),
            ));
        }
    }
    Ok(&c.lambda / min)
}

/// The virtual class `aλ − b₀δ₀ − b₁δ₁ − Σ_{i≥2} b_iδ_i` with the standard
/// hypothesis `b_i ≥ b₀` for `i ≥ 2`.
pub fn virtual_divisor_class(v: &VirtualClass) -> DivClassM13 {
    let mut boundary = vec![Coefficient::Exact(v.b0.clone()), Coefficient::Exact(v.b1.clone())];
    boundary.extend((2..=6).map(|_| Coefficient::AtLeast(v.b0.clone())));
    DivClassM13 { lambda: v.a.clone(), boundary, support: Support::Full }
}

/// The lower bounds `(6i+8)b₀ − (i+1)a` for `i = 2..=6` produced by the
/// pencil-on-K3 comparison. Reported only: for genus 13 they are negative
/// and therefore do not by themselves give `b_i ≥ b₀`.
pub fn boundary_chain_bounds(v: &VirtualClass) -> Vec<(u32, Rational)> {
    (2..=6)
        .map(|i| {
            let i_q = int(i as i64);
            (i, (int(6) * &i_q + int(8)) * &v.b0 - (&i_q + int(1)) * &v.a)
        })
        .collect()
}

/// The class `48λ − 7δ₀` of the heptagonal locus (up to the factor 6 and
/// the omitted higher boundary terms).
pub fn heptagonal_class() -> DivClassM13 {
    DivClassM13::irreducible(int(48), int(7)).scale(&int(6))
}

/// Inputs and output of the pushforward computation.
#[derive(Debug, Clone, Serialize)]
pub struct GammaPushforward {
    /// The virtual Brill–Noether class restricted to the partial
    /// compactification.
    pub virtual_part: DivClassM13,
    /// Three times the heptagonal class.
    pub heptagonal_part: DivClassM13,
    /// `ϑ⋆(γ)`.
    pub gamma: DivClassM13,
}

/// Solves for `ϑ⋆(γ)` from
/// `ϑ⋆[Res] = 132(−(9/4)·deg ϑ·λ + (13/8)ϑ⋆(γ))` and
/// `ϑ⋆[Res] = [D] + 3[heptagonal]`.
pub fn solve_gamma_pushforward(v: &VirtualClass) -> GammaPushforward {
    let virtual_part = DivClassM13::irreducible(v.a.clone(), v.b0.clone());
    let heptagonal_part = heptagonal_class().scale(&int(3));
    let res = virtual_part.add(&heptagonal_part);
    let lambda_pull = DivClassM13::irreducible(int(FORGETFUL_DEGREE), Rational::zero());
    // 132·(13/8)·X = res + 132·(9/4)·deg·λ
    let rhs = res.add(&lambda_pull.scale(&(int(132) * frac(9, 4))));
    let gamma = rhs.scale(&(int(1) / (int(132) * frac(13, 8))));
    GammaPushforward { virtual_part, heptagonal_part, gamma }
}

/// The intermediate of the proof's display,
/// `(48/13)(a/(3·264)·3 + 9/8 + 144/132)`, i.e. the λ-coefficient
/// recomputed term by term.
pub fn gamma_lambda_intermediate(v: &VirtualClass) -> Rational {
    let a_over_3 = &v.a / int(3);
    frac(48, 13) * (a_over_3 / int(264) + frac(9, 8) + frac(144, 132))
}

/// The residual of the defining relation for `ϑ⋆(γ)`; zero in every
/// component when the solve is right.
pub fn gamma_relation_residual(v: &VirtualClass, gamma: &DivClassM13) -> DivClassM13 {
    let lhs = gamma
        .scale(&(int(132) * frac(13, 8)))
        .add(&DivClassM13::irreducible(int(FORGETFUL_DEGREE), Rational::zero()).scale(&(int(132) * frac(-9, 4))));
    let rhs = DivClassM13::irreducible(v.a.clone(), v.b0.clone()).add(&heptagonal_class().scale(&int(3)));
    lhs.add(&rhs.scale(&int(-1)))
}

/// `[MP] = 3(6λ − δ₀) + ϑ⋆(γ)/2`.
///
/// The `3(6λ − δ₀)` term is `ϑ⋆ϑ*(6λ − δ₀)` with
/// `6λ − δ₀ = (15λ − δ₀) − 9λ`: the first Chern class of `℘⋆Sym²E` minus
/// that of `Sym²℘⋆E`, whose `γ` parts are `−4γ` and `−(9/2)γ`.
pub fn mp_class(gamma: &DivClassM13) -> DivClassM13 {
    let sym2_push = DivClassM13::irreducible(int(15), int(1)); // plus −4γ
    let push_sym2 = DivClassM13::irreducible(int(9), int(0)); // plus −(9/2)γ
    let gamma_coeff = int(-4) - frac(-9, 2);
    sym2_push
        .add(&push_sym2.scale(&int(-1)))
        .scale(&int(FORGETFUL_DEGREE))
        .add(&gamma.scale(&gamma_coeff))
}

/// A class `aλ − b′δ₀′ − b″δ₀″ − b^ram δ₀^ram − ⋯` on the moduli space of
/// genus-13 Prym curves. Higher boundary classes are carried as unknown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivClassR13 {
    #[serde(with = "crate::rational::serde_str")]
    pub lambda: Rational,
    pub delta0_prime: Coefficient,
    pub delta0_second: Coefficient,
    pub delta0_ram: Coefficient,
}

impl DivClassR13 {
    /// Builds a class with exactly known coefficients.
    pub fn exact(a: Rational, b1: Rational, b2: Rational, b_ram: Rational) -> Self {
        DivClassR13 {
            lambda: a,
            delta0_prime: Coefficient::Exact(b1),
            delta0_second: Coefficient::Exact(b2),
            delta0_ram: Coefficient::Exact(b_ram),
        }
    }

    /// Multiplies by a rational number.
    pub fn scale(&self, c: &Rational) -> Self {
        DivClassR13 {
            lambda: &self.lambda * c,
            delta0_prime: self.delta0_prime.scale(c),
            delta0_second: self.delta0_second.scale(c),
            delta0_ram: self.delta0_ram.scale(c),
        }
    }

    /// Sum of two classes.
    pub fn add(&self, other: &Self) -> Self {
        DivClassR13 {
            lambda: &self.lambda + &other.lambda,
            delta0_prime: self.delta0_prime.add(&other.delta0_prime),
            delta0_second: self.delta0_second.add(&other.delta0_second),
            delta0_ram: self.delta0_ram.add(&other.delta0_ram),
        }
    }

    /// Turns every exact boundary coefficient into a lower bound.
    pub fn with_lower_bounds(&self) -> Self {
        let relax = |c: &Coefficient| match c {
            Coefficient::Exact(q) => Coefficient::AtLeast(q.clone()),
            other => other.clone(),
        };
        DivClassR13 {
            lambda: self.lambda.clone(),
            delta0_prime: relax(&self.delta0_prime),
            delta0_second: relax(&self.delta0_second),
            delta0_ram: relax(&self.delta0_ram),
        }
    }
}

impl fmt::Display for DivClassR13 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}λ − ({})δ0' − ({})δ0'' − ({})δ0ram",
            self.lambda, self.delta0_prime, self.delta0_second, self.delta0_ram
        )
    }
}

/// Pullback from curves to Prym curves on the irreducible boundary:
/// `λ ↦ λ`, `δ₀ ↦ δ₀′ + δ₀″ + 2δ₀^ram`.
pub fn pullback_to_prym(c: &DivClassM13) -> DivClassR13 {
    let b0 = c.b0();
    DivClassR13 {
        lambda: c.lambda.clone(),
        delta0_prime: b0.clone(),
        delta0_second: b0.clone(),
        delta0_ram: b0.scale(&int(2)),
    }
}

/// Intermediate data of the theta-class computation.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaComputation {
    /// Coefficient of `γ` in `c₁(B) − c₁(A)`.
    #[serde(with = "crate::rational::serde_str")]
    pub gamma_coefficient: Rational,
    /// Pulled-back part `c₁(B) − c₁(A) − (γ-part)`, before pushforward.
    pub pulled_back_part: DivClassR13,
    /// The resulting class.
    pub class: DivClassR13,
}

/// `[Θ] = ϑ⋆(c₁(B) − c₁(A))` with `c₁(B) = ϑ*(4λ + 2δ₀^ram) − 6γ` and
/// `c₁(A) = −7γ + ϑ*(6λ + (3/2)δ₀^ram)`.
pub fn theta_class_r13(gamma: &DivClassM13) -> ThetaComputation {
    // Classes written as aλ − bδ: +2δ^ram is b = −2.
    let c1_b = DivClassR13::exact(int(4), int(0), int(0), int(-2));
    let c1_a = DivClassR13::exact(int(6), int(0), int(0), frac(-3, 2));
    let gamma_coefficient = int(-6) - int(-7);
    let pulled_back_part = c1_b.add(&c1_a.scale(&int(-1)));
    let class = pulled_back_part
        .scale(&int(FORGETFUL_DEGREE))
        .add(&pullback_to_prym(gamma).scale(&gamma_coefficient));
    ThetaComputation { gamma_coefficient, pulled_back_part, class }
}

/// The class `19λ − 3(δ₀′ + δ₀″) − (13/4)δ₀^ram − ⋯` of the difference
/// variety divisor, with the positive normalizing constant taken as 1.
pub fn difference_divisor_class() -> DivClassR13 {
    DivClassR13::exact(int(19), int(3), int(3), frac(13, 4))
}

/// Weights of the effective combination used for the Kodaira check.
pub fn kodaira_weights() -> (Rational, Rational) {
    (frac(65, 674), frac(1153, 3707))
}

/// One boundary inequality `2(6i+18) − a(i+1) ≥ 3`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryInequality {
    pub i: u32,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
    pub holds: bool,
}

/// Result of the Kodaira-dimension check on Prym curves.
#[derive(Debug, Clone, Serialize)]
pub struct KodairaReport {
    /// The combination `D`, with boundary coefficients as lower bounds.
    pub combination: DivClassR13,
    /// `λ`-coefficient of `D`.
    #[serde(with = "crate::rational::serde_str")]
    pub lambda: Rational,
    pub lambda_below_13: bool,
    /// Hypotheses `a₀′ ≥ 2`, `a₀″ ≥ 2`, `a₀^ram ≥ 3` checked against the
    /// computed lower bounds.
    pub boundary_hypotheses_hold: bool,
    pub inequalities: Vec<BoundaryInequality>,
    /// `K − D` has positive `λ`-part and boundary parts that are effective.
    pub canonical_expressible: bool,
    /// Canonical class, known part.
    pub canonical: DivClassR13,
}

/// Checks that the canonical class of the moduli of Prym curves is big.
pub fn kodaira_check_r13(theta: &DivClassR13) -> KodairaReport {
    let (w_theta, w_diff) = kodaira_weights();
    // The closure of the theta divisor has boundary coefficients at least
    // those of the open class.
    let combination = theta
        .with_lower_bounds()
        .scale(&w_theta)
        .add(&difference_divisor_class().scale(&w_diff));
    let lambda = combination.lambda.clone();
    let lambda_below_13 = lambda < int(13);
    let bound = |c: &Coefficient| c.bound().cloned().unwrap_or_else(Rational::zero);
    let boundary_hypotheses_hold = bound(&combination.delta0_prime) >= int(2)
        && bound(&combination.delta0_second) >= int(2)
        && bound(&combination.delta0_ram) >= int(3);
    let inequalities = (1..=6)
        .map(|i| {
            let value = int(2) * int(6 * i as i64 + 18) - &lambda * int(i as i64 + 1);
            let holds = value >= int(3);
            BoundaryInequality { i, value, holds }
        })
        .collect();
    let canonical = DivClassR13::exact(int(13), int(2), int(2), int(3));
    let canonical_expressible = lambda_below_13 && boundary_hypotheses_hold;
    KodairaReport {
        combination,
        lambda,
        lambda_below_13,
        boundary_hypotheses_hold,
        inequalities,
        canonical_expressible,
        canonical,
    }
}

/// The inequality `2s − 9/17 < 13` for pointed curves with nine markings.
#[derive(Debug, Clone, Serialize)]
pub struct PointedCheck {
    #[serde(with = "crate::rational::serde_str")]
    pub slope: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub margin: Rational,
    pub holds: bool,
}

/// Evaluates `2s − 9/17` against 13.
pub fn pointed_check(slope: &Rational) -> PointedCheck {
    let value = int(2) * slope - frac(9, 17);
    let margin = int(13) - &value;
    PointedCheck { slope: slope.clone(), holds: margin.is_positive(), value, margin }
}

/// [`pointed_check`] for the Mukai–Petri class.
pub fn m13_9_check(mp: &DivClassM13) -> Result<PointedCheck, ModuliError> {
    Ok(pointed_check(&slope(mp)?))
}

/// Every class of the module, computed from the virtual class.
#[derive(Debug, Clone, Serialize)]
pub struct DivisorReport {
    pub virtual_class: DivClassM13,
    #[serde(with = "crate::rational::serde_str")]
    pub virtual_slope: Rational,
    pub boundary_chain: Vec<(u32, String)>,
    pub gamma: GammaPushforward,
    #[serde(with = "crate::rational::serde_str")]
    pub gamma_lambda_intermediate: Rational,
    pub mp: DivClassM13,
    #[serde(with = "crate::rational::serde_str")]
    pub mp_slope: Rational,
    pub mp_below_brill_noether: bool,
    pub theta: ThetaComputation,
    pub kodaira: KodairaReport,
    pub pointed: PointedCheck,
}

/// Assembles the full report.
pub fn divisor_report(v: &VirtualClass) -> Result<DivisorReport, ModuliError> {
    let virtual_class = virtual_divisor_class(v);
    let virtual_slope = slope(&virtual_class)?;
    let gamma = solve_gamma_pushforward(v);
    let mp = mp_class(&gamma.gamma);
    let mp_slope = slope(&mp)?;
    let theta = theta_class_r13(&gamma.gamma);
    let kodaira = kodaira_check_r13(&theta.class);
    let pointed = m13_9_check(&mp)?;
    Ok(DivisorReport {
        virtual_class,
        virtual_slope,
        boundary_chain: boundary_chain_bounds(v)
            .into_iter()
            .map(|(i, q)| (i, q.to_string()))
            .collect(),
        gamma_lambda_intermediate: gamma_lambda_intermediate(v),
        mp_below_brill_noether: mp_slope < frac(88, 13),
        mp,
        mp_slope,
        theta,
        kodaira,
        pointed,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn virtual_class() -> VirtualClass {
        VirtualClass { a: int(15177), b0: int(2247), b1: int(11787) }
    }

    #[test]
    fn virtual_slope() {
        let c = virtual_divisor_class(&virtual_class());
        assert_eq!(slope(&c).unwrap(), frac(5059, 749));
    }

    #[test]
    fn lambda_alone_has_no_slope() {
        let c = DivClassM13::irreducible(int(1), int(0));
        assert!(slope(&c).is_err());
    }

    #[test]
    fn unknown_boundary_refused() {
        let mut c = virtual_divisor_class(&virtual_class());
        c.boundary[4] = Coefficient::Unknown;
        assert!(matches!(slope(&c), Err(ModuliError::UnknownCoefficient(_))));
    }

    #[test]
    fn gamma_pushforward() {
        let v = virtual_class();
        let g = solve_gamma_pushforward(&v).gamma;
        assert_eq!(g.lambda, frac(11288, 143));
        assert_eq!(g.b0(), &Coefficient::Exact(frac(1582, 143)));
        assert_eq!(gamma_lambda_intermediate(&v), frac(11288, 143));
        let r = gamma_relation_residual(&v, &g);
        assert!(r.lambda.is_zero());
        assert_eq!(r.b0(), &Coefficient::Exact(int(0)));
    }

    #[test]
    fn mp_values() {
        let g = solve_gamma_pushforward(&virtual_class()).gamma;
        let mp = mp_class(&g);
        assert_eq!(mp, DivClassM13::irreducible(frac(8218, 143), frac(1220, 143)));
        assert_eq!(slope(&mp).unwrap(), frac(4109, 610));
        let s = slope(&mp).unwrap();
        assert!(s.numer() * 13 < s.denom() * 88);
    }

    #[test]
    fn theta_values() {
        let g = solve_gamma_pushforward(&virtual_class()).gamma;
        let t = theta_class_r13(&g).class;
        assert_eq!(
            t,
            DivClassR13::exact(frac(10430, 143), frac(1582, 143), frac(1582, 143), frac(5899, 286))
        );
    }

    #[test]
    fn kodaira_values() {
        let g = solve_gamma_pushforward(&virtual_class()).gamma;
        let t = theta_class_r13(&g).class;
        let k = kodaira_check_r13(&t);
        assert_eq!(k.lambda, frac(4362, 337));
        assert!(k.lambda_below_13);
        assert!(k.boundary_hypotheses_hold);
        assert!(k.inequalities.iter().all(|b| b.holds));
        assert_eq!(k.inequalities[0].value, frac(7452, 337));
        assert!(k.canonical_expressible);
    }

    #[test]
    fn pointed_values() {
        let c = pointed_check(&frac(4109, 610));
        assert_eq!(c.value, frac(67108, 5185));
        assert!(c.holds);
        assert!(!pointed_check(&frac(88, 13)).holds);
    }

    #[test]
    fn chain_is_negative() {
        let b = boundary_chain_bounds(&virtual_class());
        assert_eq!(b[0], (2, int(-591)));
    }
}
