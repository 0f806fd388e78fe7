//! Strongly quasiconvex function laboratory.
//!
//! A function `f` is strongly quasiconvex (SQC) with modulus `gamma > 0` when
//!
//! ```text
//! f((1-t)x + ty) <= max(f(x), f(y)) - (gamma/2) * (1-t) * t * ||x - y||^2
//! ```
//!
//! for all `x`, `y` in its effective domain and all `t` in `(0, 1)`. This
//! crate builds a gallery of such functions, continuous and discontinuous,
//! univariable and multivariable, and checks the inequality numerically on
//! deterministic streams of sampled triples. Alongside the inequality check
//! it provides modulus estimation, semicontinuity probes at declared
//! discontinuity loci, a derivative-free multistart minimizer search, a
//! ray-sampling coercivity probe, and an exhaustive 1-D grid oracle.
//!
//! The main entry points are the constructors in [`gallery`] and the checks
//! in [`verify`].

// Parameter validation uses `!(x > 0.0)` so that NaN inputs are rejected
// along with nonpositive ones; `x <= 0.0` would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod core;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod verify;

pub use crate::core::{
    convex_combination, sqc_rhs, squared_distance, ExtendedReal, Point, RngSeed, Tolerance,
};
pub use crate::error::Error;
pub use crate::gallery::{
    DiscontinuityRecord, Locus, SemicontinuityClass, SpherePartitionPredicate, SqcFunction,
};
pub use crate::geometry::{
    min_modulus, sample_triples, ConvexDomain, LinearMap, PointClass, Region, SampleRegion,
    StressSet, TripleSample,
};
pub use crate::verify::{
    continuity_probe, grid_oracle_1d, jump_spread, modulus_estimate, sqc_check, stress_sets_for,
    supercoercivity_probe, unique_min_check, ContinuityProbeResult, MinCluster, ModulusEstimate,
    VerificationReport, VerifyConfig, Violation,
};
