//! Exact arithmetic and intersection-theory pipelines for the genus-13
//! non-abelian Brill–Noether computations.
//!
//! * [`rational`] — exact rationals and their string form.
//! * [`ring`] — truncated graded quotient rings over ℚ.
//! * [`jacobian`] — Chern-class integrals on symmetric products and the
//!   virtual divisor class.
//! * [`hecke`] — the determinantal bundle count and the Porteous count.
//! * [`moduli`] — divisor classes, slopes, and the Kodaira checks.

pub mod hecke;
pub mod jacobian;
pub mod moduli;
pub mod rational;
pub mod ring;

pub use rational::Rational;
