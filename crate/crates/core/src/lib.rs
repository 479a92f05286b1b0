//! Secret sharing on graph access structures.
//!
//! Bounds on the information complexity of a graph (largest core, star
//! cover rate, entropy-method LP) and, for trees, construction and
//! verification of the linear scheme with optimal load `2 - 1/c`.

pub mod core_analysis;
pub mod entropy;
pub mod field;
pub mod generate;
pub mod graph;
pub mod lp;
pub mod scheme;
pub mod star;

/// Exact rational number used for every bound and LP value.
pub type Rational = num_rational::BigRational;
