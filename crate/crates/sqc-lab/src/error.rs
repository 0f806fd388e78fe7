//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("linear map is singular or nearly singular")]
    SingularMap,

    #[error("power iteration did not converge within {iterations} iterations")]
    PowerIterationDiverged { iterations: usize },

    #[error("{operation} requires a bounded domain")]
    UnboundedDomain { operation: &'static str },

    #[error("boundary sampling requested on the full space, which has no boundary")]
    BoundaryOfFullSpace,

    #[error("sampler could not produce a valid point after {attempts} attempts")]
    SamplerExhausted { attempts: usize },

    #[error("{name} requires a function on a bounded interval")]
    IntervalDomainRequired { name: &'static str },

    #[error("base function is not increasing: f({hi}) < f({lo})")]
    NotIncreasing { lo: f64, hi: f64 },

    #[error("base function is not radially monotone")]
    NotRadiallyMonotone,

    #[error("point is not the global minimizer: f there is {point_value}, found {better_value}")]
    NotGlobalMinimum { point_value: f64, better_value: f64 },

    #[error("point must lie in the interior of the domain")]
    PointNotInterior,

    #[error("point lies outside the effective domain")]
    PointOutsideDomain,

    #[error("restriction set is not contained in the effective domain")]
    RestrictionOutsideDomain,

    #[error("all samples were skipped; no ratio could be formed")]
    AllSamplesSkipped,

    #[error("grid of {nodes} nodes exceeds the limit of {max}")]
    GridTooLarge { nodes: usize, max: usize },

    #[error("function `{label}` has no known modulus; pass gamma explicitly")]
    UnknownModulus { label: String },
}
