//! Exact tropical geometry on the genus-13 chain of loops: piecewise-linear
//! functions, their divisors, minimum combinations, and certificates of
//! tropical independence, together with the slope combinatorics and the
//! block-by-block construction of independences among pairwise sums.

pub mod certify;
pub mod divisor;
pub mod engine;
pub mod graph;
pub mod plf;
pub mod slopes;

pub use certify::{certify_independence, min_combination, CertificationFailure, IndependenceCertificate};
pub use divisor::GraphDivisor;
pub use graph::{make_admissible_chain, ChainGraph, EdgeId, GraphConfig, GraphPoint};
pub use plf::{in_linear_system, pl_divisor, PlFunction};
