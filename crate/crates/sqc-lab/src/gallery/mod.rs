//! The function gallery: every construction returns an [`SqcFunction`]
//! carrying its evaluator, domain, claimed modulus, and declared
//! discontinuity metadata.

mod fixtures;
mod multivariate;
mod univariate;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::core::{ExtendedReal, Point, RngSeed};
use crate::error::Error;
use crate::geometry::{unit_direction, ConvexDomain, Region, SampleRegion};

pub use fixtures::{constant, negated_quadratic};
pub use multivariate::{
    affine_pullback, boundary_perturbation, line_slice, point_drop, radial_jump,
    radial_jump_quadratic, radial_split, restrict, ClosureSide,
};
pub use univariate::{countable_jumps, endpoint_jump, interior_jump_lsc, interior_jump_usc};

/// Points whose squared norm matches the target within this relative band are
/// treated as lying on a sphere locus. Wide enough for points built as
/// `radius * direction`, narrow enough that generic samples never hit it.
pub(crate) const SPHERE_BAND: f64 = 32.0 * f64::EPSILON;

/// Semicontinuity at a point, relative to the effective domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SemicontinuityClass {
    Continuous,
    /// Lower semicontinuous but not upper semicontinuous.
    LscNotUsc,
    /// Upper semicontinuous but not lower semicontinuous.
    UscNotLsc,
    Neither,
    Inconclusive,
}

impl fmt::Display for SemicontinuityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SemicontinuityClass::Continuous => "continuous",
            SemicontinuityClass::LscNotUsc => "lsc-not-usc",
            SemicontinuityClass::UscNotLsc => "usc-not-lsc",
            SemicontinuityClass::Neither => "neither",
            SemicontinuityClass::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

/// Where a declared discontinuity lives.
#[derive(Debug, Clone, Serialize)]
pub enum Locus {
    SinglePoint {
        point: Point,
    },
    /// Both endpoints of an interval domain, with possibly different gaps.
    IntervalEndpoints {
        a: f64,
        b: f64,
        jump_at_a: f64,
        jump_at_b: f64,
    },
    /// A countable family of points with per-point gaps.
    CountableSet {
        description: String,
        points: Vec<Point>,
        jumps: Vec<f64>,
    },
    /// The sphere `||x|| = radius`. `members_only` restricts the locus to
    /// the partition members (`Some(true)`), the complement (`Some(false)`),
    /// or the whole sphere (`None`).
    Sphere {
        radius: f64,
        members_only: Option<bool>,
    },
    /// The subset of the domain boundary selected by the named predicate.
    BoundarySubset {
        predicate: String,
    },
    /// Image of another locus under an affine map; representative points are
    /// precomputed in `DiscontinuityRecord::witnesses`.
    Mapped {
        description: String,
    },
}

/// A declared discontinuity: locus, semicontinuity classification, and the
/// gap between branch values there.
#[derive(Debug, Clone, Serialize)]
pub struct DiscontinuityRecord {
    pub locus: Locus,
    pub classification: SemicontinuityClass,
    /// Smallest declared gap over the locus; per-point gaps, where they
    /// differ, live in the locus itself.
    pub jump_size: f64,
    /// Representative points on the locus for probing. Empty for parametric
    /// loci (spheres, boundaries), which are sampled on demand.
    pub witnesses: Vec<Point>,
}

impl DiscontinuityRecord {
    pub(crate) fn point(point: Point, classification: SemicontinuityClass, jump: f64) -> Self {
        DiscontinuityRecord {
            locus: Locus::SinglePoint {
                point: point.clone(),
            },
            classification,
            jump_size: jump,
            witnesses: vec![point],
        }
    }

    /// The declared gap at a specific locus point.
    pub fn jump_at(&self, p: &Point) -> f64 {
        match &self.locus {
            Locus::IntervalEndpoints {
                a,
                b,
                jump_at_a,
                jump_at_b,
            } => {
                if (p[0] - a).abs() <= (p[0] - b).abs() {
                    *jump_at_a
                } else {
                    *jump_at_b
                }
            }
            Locus::CountableSet { points, jumps, .. } => points
                .iter()
                .zip(jumps)
                .min_by(|(q1, _), (q2, _)| {
                    let d1 = (q1[0] - p[0]).abs();
                    let d2 = (q2[0] - p[0]).abs();
                    d1.partial_cmp(&d2).unwrap()
                })
                .map(|(_, j)| *j)
                .unwrap_or(self.jump_size),
            _ => self.jump_size,
        }
    }
}

/// A deterministic membership test splitting a sphere or a boundary into two
/// parts. The defining inequality holds for any partition; only the declared
/// density of the two parts depends on the choice.
#[derive(Clone)]
pub enum SpherePartitionPredicate {
    /// Membership by the parity of the least significant significand bit of
    /// the first coordinate. Both classes interleave finely everywhere.
    FirstCoordLsbParity,
    Custom {
        id: String,
        membership: Arc<dyn Fn(&Point) -> bool + Send + Sync>,
    },
}

impl SpherePartitionPredicate {
    pub fn id(&self) -> &str {
        match self {
            SpherePartitionPredicate::FirstCoordLsbParity => "x1-lsb-parity",
            SpherePartitionPredicate::Custom { id, .. } => id,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            SpherePartitionPredicate::FirstCoordLsbParity => p[0].to_bits() & 1 == 0,
            SpherePartitionPredicate::Custom { membership, .. } => membership(p),
        }
    }
}

impl fmt::Debug for SpherePartitionPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpherePartitionPredicate({})", self.id())
    }
}

type Evaluator = Arc<dyn Fn(&Point) -> (ExtendedReal, &'static str) + Send + Sync>;

/// A function under study: evaluator plus metadata.
///
/// Evaluators are pure and immutable; an `SqcFunction` can be evaluated from
/// any number of threads at once. Values are finite exactly on the domain
/// and infinite outside it.
#[derive(Clone)]
pub struct SqcFunction {
    label: String,
    construction: &'static str,
    domain: ConvexDomain,
    claimed_modulus: Option<f64>,
    discontinuities: Vec<DiscontinuityRecord>,
    partition: Option<SpherePartitionPredicate>,
    fixture: bool,
    eval: Evaluator,
}

impl fmt::Debug for SqcFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SqcFunction")
            .field("label", &self.label)
            .field("claimed_modulus", &self.claimed_modulus)
            .finish_non_exhaustive()
    }
}

#[allow(clippy::too_many_arguments)]
impl SqcFunction {
    pub(crate) fn new(
        label: String,
        construction: &'static str,
        domain: ConvexDomain,
        claimed_modulus: Option<f64>,
        discontinuities: Vec<DiscontinuityRecord>,
        partition: Option<SpherePartitionPredicate>,
        fixture: bool,
        eval: Evaluator,
    ) -> Self {
        SqcFunction {
            label,
            construction,
            domain,
            claimed_modulus,
            discontinuities,
            partition,
            fixture,
            eval,
        }
    }

    pub fn evaluate(&self, x: &Point) -> ExtendedReal {
        (self.eval)(x).0
    }

    /// Value plus the name of the piecewise branch that produced it.
    pub fn evaluate_with_branch(&self, x: &Point) -> (ExtendedReal, &'static str) {
        (self.eval)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Machine-readable constructor name.
    pub fn construction(&self) -> &'static str {
        self.construction
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn claimed_modulus(&self) -> Option<f64> {
        self.claimed_modulus
    }

    pub fn discontinuities(&self) -> &[DiscontinuityRecord] {
        &self.discontinuities
    }

    pub fn partition(&self) -> Option<&SpherePartitionPredicate> {
        self.partition.as_ref()
    }

    pub fn is_fixture(&self) -> bool {
        self.fixture
    }

    /// Draws `count` points lying on the record's locus (and, for split
    /// loci, on the requested side of the partition).
    pub fn locus_points<R: Rng + ?Sized>(
        &self,
        record: &DiscontinuityRecord,
        count: usize,
        rng: &mut R,
    ) -> Vec<Point> {
        match &record.locus {
            Locus::SinglePoint { point } => vec![point.clone()],
            Locus::IntervalEndpoints { a, b, .. } => vec![
                Point::new_unchecked(vec![*a]),
                Point::new_unchecked(vec![*b]),
            ],
            Locus::CountableSet { points, .. } => points.iter().take(count).cloned().collect(),
            Locus::Mapped { .. } => record.witnesses.iter().take(count).cloned().collect(),
            Locus::Sphere {
                radius,
                members_only,
            } => {
                // The point must land on the branch that carries the locus
                // value: a hair inside when the value sits on the low branch
                // (closed-from-below), a hair outside when it sits on the
                // high branch. Split loci use a tolerance band, so the
                // inward side works for both.
                let nudge = match (members_only, record.classification) {
                    (None, SemicontinuityClass::UscNotLsc) => 1.0 + 4.0 * f64::EPSILON,
                    _ => 1.0 - 4.0 * f64::EPSILON,
                };
                let dim = self.domain.dimension();
                let mut out = Vec::with_capacity(count);
                let mut guard = 0usize;
                while out.len() < count && guard < 100_000 {
                    guard += 1;
                    let dir = unit_direction(dim, rng);
                    let p = Point::new_unchecked(
                        dir.coords().iter().map(|c| c * radius * nudge).collect(),
                    );
                    if !self.domain.contains(&p) {
                        continue;
                    }
                    if let (Some(side), Some(pred)) = (members_only, self.partition()) {
                        if pred.contains(&p) != *side {
                            continue;
                        }
                    }
                    out.push(p);
                }
                out
            }
            Locus::BoundarySubset { .. } => {
                let mut out = Vec::with_capacity(count);
                let mut guard = 0usize;
                while out.len() < count && guard < 100_000 {
                    guard += 1;
                    let Ok(p) = self.domain.sample_point(SampleRegion::Boundary, rng) else {
                        break;
                    };
                    if let Some(pred) = self.partition() {
                        if !pred.contains(&p) {
                            continue;
                        }
                    }
                    out.push(p);
                }
                out
            }
        }
    }

    /// The record, if any, whose locus contains `p` (within `tol`). For
    /// partitioned sphere loci the membership side must match as well.
    pub fn record_at(&self, p: &Point, tol: f64) -> Option<&DiscontinuityRecord> {
        self.discontinuities.iter().find(|rec| match &rec.locus {
            Locus::SinglePoint { point } => crate::core::squared_distance(point, p)
                .map(|d| d.sqrt() <= tol)
                .unwrap_or(false),
            Locus::IntervalEndpoints { a, b, .. } => {
                (p[0] - a).abs() <= tol || (p[0] - b).abs() <= tol
            }
            Locus::CountableSet { points, .. } => points.iter().any(|q| (q[0] - p[0]).abs() <= tol),
            Locus::Sphere {
                radius,
                members_only,
            } => {
                if (p.norm() - radius).abs() > tol {
                    return false;
                }
                match (members_only, self.partition()) {
                    (Some(side), Some(pred)) => pred.contains(p) == *side,
                    _ => true,
                }
            }
            Locus::BoundarySubset { .. } => {
                let on_boundary = self
                    .domain
                    .classify(p, tol.max(1e-12))
                    .map(|c| c.region == Region::Boundary)
                    .unwrap_or(false);
                on_boundary
                    && self
                        .partition()
                        .map(|pred| pred.contains(p))
                        .unwrap_or(true)
            }
            Locus::Mapped { .. } => rec.witnesses.iter().any(|q| {
                crate::core::squared_distance(q, p)
                    .map(|d| d.sqrt() <= tol)
                    .unwrap_or(false)
            }),
        })
    }
}

/// `f(x) = ||x||^2` on the full space: strongly convex, hence SQC, with
/// modulus 2, and it satisfies the exact interpolation identity
/// `f((1-t)x+ty) = (1-t)f(x) + t f(y) - (1-t)t ||x-y||^2`.
pub fn quadratic_norm(n: usize) -> Result<SqcFunction, Error> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "dimension must be at least 1".into(),
        });
    }
    let domain = ConvexDomain::full_space(n)?;
    Ok(SqcFunction::new(
        format!("quadratic_norm(n={n})"),
        "quadratic_norm",
        domain,
        Some(2.0),
        vec![],
        None,
        false,
        Arc::new(|x: &Point| (ExtendedReal::Finite(x.norm_squared()), "base")),
    ))
}

/// `f(x) = max(||x||^(1/2), ||x||^2 - k)` on the full space: SQC without
/// being convex. No modulus is claimed; the estimator supplies an empirical
/// lower bound.
pub fn max_root_quadratic(n: usize, k: u32) -> Result<SqcFunction, Error> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "dimension must be at least 1".into(),
        });
    }
    if k < 1 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "k must be at least 1".into(),
        });
    }
    let domain = ConvexDomain::full_space(n)?;
    let kf = k as f64;
    Ok(SqcFunction::new(
        format!("max_root_quadratic(n={n}, k={k})"),
        "max_root_quadratic",
        domain,
        None,
        vec![],
        None,
        false,
        Arc::new(move |x: &Point| {
            let r = x.norm();
            let root = r.sqrt();
            let quad = r * r - kf;
            if root >= quad {
                (ExtendedReal::Finite(root), "root")
            } else {
                (ExtendedReal::Finite(quad), "shifted_quadratic")
            }
        }),
    ))
}

/// Fixed internal seed for constructor-time spot checks (monotonicity,
/// global-minimum, restriction containment). Constructors stay deterministic
/// without threading a seed through every call site.
pub(crate) const SPOT_CHECK_SEED: RngSeed = RngSeed(0x5ac_c0de);

/// One entry of the serializable gallery catalogue.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub parameters: &'static [&'static str],
    pub default_modulus: &'static str,
    /// Declared discontinuity records in short form; empty when continuous.
    pub discontinuities: &'static str,
    pub discontinuous: bool,
    pub fixture: bool,
}

/// Every constructor the command line can instantiate.
pub fn catalogue() -> Vec<CatalogueEntry> {
    vec![
        CatalogueEntry {
            name: "quadratic_norm",
            summary: "squared Euclidean norm; strongly convex, continuous",
            parameters: &["n: dimension (default 2)"],
            default_modulus: "2",
            discontinuities: "",
            discontinuous: false,
            fixture: false,
        },
        CatalogueEntry {
            name: "max_root_quadratic",
            summary: "max of sqrt-norm and shifted squared norm; SQC but not convex, continuous",
            parameters: &["n: dimension (default 2)", "k: shift (default 1)"],
            default_modulus: "unknown (estimated empirically)",
            discontinuities: "",
            discontinuous: false,
            fixture: false,
        },
        CatalogueEntry {
            name: "endpoint_jump",
            summary: "x^2 on [a,b] lifted to max+1 at both endpoints; jumps at the interval ends",
            parameters: &[
                "a: left endpoint (default 0)",
                "b: right endpoint (default 1)",
                "gamma: base modulus (default 2)",
            ],
            default_modulus: "2",
            discontinuities:
                "interval endpoints {a, b}: usc-not-lsc, jumps max+1-f(a) and max+1-f(b)",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "interior_jump_lsc",
            summary: "x^2 dropped by 1 on [0,c]; lower semicontinuous with one interior jump",
            parameters: &["c: jump point in (0,1) (default 0.5)", "gamma (default 2)"],
            default_modulus: "2",
            discontinuities: "single point c: lsc-not-usc, jump 1",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "interior_jump_usc",
            summary: "x^2 dropped by 1 on [0,c); upper semicontinuous with one interior jump",
            parameters: &["c: jump point in (0,1) (default 0.5)", "gamma (default 2)"],
            default_modulus: "2",
            discontinuities: "single point c: usc-not-lsc, jump 1",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "countable_jumps",
            summary: "x^2 - 1 + 2^(1-k) staircase on (1/(k+1), 1/k]; jumps at 1/k for k >= 2",
            parameters: &["gamma (default 2)"],
            default_modulus: "2",
            discontinuities: "countable set 1/k (k >= 2): lsc-not-usc, jump 2^(1-k) at 1/k",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "boundary_perturbation",
            summary: "squared norm on the closed unit ball, lifted by alpha on a boundary subset",
            parameters: &["n: dimension >= 2 (default 2)", "alpha: lift (default 1)"],
            default_modulus: "2",
            discontinuities: "boundary subset (predicate members): usc-not-lsc, jump alpha",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "point_drop",
            summary: "squared norm with its value at the minimizer dropped by alpha",
            parameters: &["n: dimension >= 2 (default 2)", "alpha: drop (default 1)"],
            default_modulus: "2",
            discontinuities: "single point c: lsc-not-usc, jump alpha",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "radial_jump",
            summary: "squared norm plus an outward step of beta across the sphere of radius rho",
            parameters: &[
                "n: dimension >= 2 (default 2)",
                "rho: sphere radius (default 1)",
                "beta: step (default 1)",
                "variant: lower (lsc) | upper (usc) (default lower)",
            ],
            default_modulus: "2",
            discontinuities:
                "sphere rho: lower variant lsc-not-usc / upper variant usc-not-lsc, jump beta",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "radial_split",
            summary: "radial step with the sphere itself split between the two branches",
            parameters: &[
                "n: dimension >= 2 (default 2)",
                "rho: sphere radius (default 1)",
                "beta: step (default 1)",
            ],
            default_modulus: "2",
            discontinuities:
                "sphere rho: lsc-not-usc on members, usc-not-lsc on the rest, jump beta",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "restricted_radial_jump",
            summary: "radial_jump restricted to a centered box, infinite outside",
            parameters: &[
                "n, rho, beta, variant: as radial_jump",
                "half-width: box half-width (default 2)",
            ],
            default_modulus: "2",
            discontinuities: "sphere rho (inside the box): as radial_jump",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "restricted_radial_split",
            summary: "radial_split restricted to a centered box, infinite outside",
            parameters: &[
                "n, rho, beta: as radial_split",
                "half-width: box half-width (default 2)",
            ],
            default_modulus: "2",
            discontinuities: "sphere rho (inside the box): as radial_split",
            discontinuous: true,
            fixture: false,
        },
        CatalogueEntry {
            name: "affine_pullback",
            summary: "inner function composed with the inverse of an affine map z -> Az + b",
            parameters: &[
                "inner: name of the inner function (default quadratic_norm)",
                "matrix: rows separated by ';', entries by spaces (default identity)",
                "offset: translation b (default 0)",
            ],
            default_modulus: "gamma * beta^2 (beta = minimum modulus of the map)",
            discontinuities: "image of the inner loci under the map",
            discontinuous: false,
            fixture: false,
        },
        CatalogueEntry {
            name: "constant5",
            summary: "constant 5; not SQC for any modulus (detection fixture)",
            parameters: &["n: dimension (default 2)"],
            default_modulus: "none",
            discontinuities: "",
            discontinuous: false,
            fixture: true,
        },
        CatalogueEntry {
            name: "neg_quadratic",
            summary: "negated squared norm; quasiconcave, not SQC (detection fixture)",
            parameters: &["n: dimension (default 2)"],
            default_modulus: "none",
            discontinuities: "",
            discontinuous: false,
            fixture: true,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coords: &[f64]) -> Point {
        Point::from_slice(coords).unwrap()
    }

    #[test]
    fn quadratic_norm_values() {
        let f = quadratic_norm(2).unwrap();
        assert_eq!(f.evaluate(&p(&[3.0, 4.0])), ExtendedReal::Finite(25.0));
        assert_eq!(f.evaluate(&Point::origin(2)), ExtendedReal::Finite(0.0));
        let f1 = quadratic_norm(1).unwrap();
        assert_eq!(f1.evaluate(&p(&[1.0])), ExtendedReal::Finite(1.0));
        assert!(quadratic_norm(0).is_err());
        assert_eq!(f.claimed_modulus(), Some(2.0));
        assert!(f.discontinuities().is_empty());
    }

    #[test]
    fn max_root_quadratic_values() {
        let f = max_root_quadratic(2, 1).unwrap();
        assert_eq!(f.evaluate(&Point::origin(2)), ExtendedReal::Finite(0.0));
        assert_eq!(f.evaluate(&p(&[2.0, 0.0])), ExtendedReal::Finite(3.0));
        let f4 = max_root_quadratic(2, 4).unwrap();
        assert_eq!(f4.evaluate(&p(&[1.0, 0.0])), ExtendedReal::Finite(1.0));
        assert!(f.claimed_modulus().is_none());
        assert!(max_root_quadratic(2, 0).is_err());
    }

    #[test]
    fn quadratic_interpolation_identity_is_exact() {
        use crate::core::{convex_combination, squared_distance};
        let mut rng = RngSeed(2).rng();
        for n in [1usize, 2, 5] {
            let f = quadratic_norm(n).unwrap();
            let domain = ConvexDomain::full_space(n).unwrap();
            for _ in 0..10_000 {
                let x = domain
                    .sample_point(SampleRegion::Anywhere, &mut rng)
                    .unwrap();
                let y = domain
                    .sample_point(SampleRegion::Anywhere, &mut rng)
                    .unwrap();
                let t: f64 = rng.random_range(0.01..0.99);
                let z = convex_combination(&x, &y, t).unwrap();
                let lhs = f.evaluate(&z).value().unwrap();
                let rhs = (1.0 - t) * f.evaluate(&x).value().unwrap()
                    + t * f.evaluate(&y).value().unwrap()
                    - (1.0 - t) * t * squared_distance(&x, &y).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn lsb_parity_predicate_is_deterministic_and_mixed() {
        let pred = SpherePartitionPredicate::FirstCoordLsbParity;
        let mut rng = RngSeed(6).rng();
        let mut members = 0;
        for _ in 0..1_000 {
            let q = unit_direction(2, &mut rng);
            assert_eq!(pred.contains(&q), pred.contains(&q));
            if pred.contains(&q) {
                members += 1;
            }
        }
        assert!(members > 300 && members < 700, "members = {members}");
    }

    #[test]
    fn catalogue_is_complete_and_serializable() {
        let cat = catalogue();
        assert!(cat.iter().any(|e| e.name == "radial_jump"));
        assert!(cat.iter().filter(|e| e.fixture).count() == 2);
        let json = serde_json::to_string(&cat).unwrap();
        assert!(json.contains("quadratic_norm"));
    }
}
