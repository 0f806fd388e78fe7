//! Multivariable constructions: boundary lifts on the unit ball, a value
//! drop at the minimizer, radial steps across a sphere, restriction to a
//! bounded convex set, and affine pullbacks.

use std::sync::Arc;

use crate::core::{ExtendedReal, Point};
use crate::error::Error;
use crate::gallery::{
    DiscontinuityRecord, Locus, SemicontinuityClass, SpherePartitionPredicate, SqcFunction,
    SPHERE_BAND, SPOT_CHECK_SEED,
};
use crate::geometry::{min_modulus, ConvexDomain, LinearMap, Region, SampleRegion};

/// Which side of the sphere the step is closed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureSide {
    /// `f = base` on `||x|| <= rho`: lower semicontinuous everywhere.
    LowerClosed,
    /// `f = base + beta` on `||x|| >= rho`: upper semicontinuous everywhere.
    UpperClosed,
}

/// Squared norm on the closed unit ball, lifted by `alpha` on the part of
/// the boundary sphere selected by `predicate`. Keeps modulus 2: every
/// combination of two boundary points falls strictly inside the ball, where
/// the lift never fires.
pub fn boundary_perturbation(
    n: usize,
    predicate: SpherePartitionPredicate,
    alpha: f64,
) -> Result<SqcFunction, Error> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "dimension must be at least 2".into(),
        });
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must be positive".into(),
        });
    }
    let domain = ConvexDomain::closed_ball(Point::origin(n), 1.0)?;
    let domain_for_eval = domain.clone();
    let pred = predicate.clone();
    let record = DiscontinuityRecord {
        locus: Locus::BoundarySubset {
            predicate: predicate.id().to_string(),
        },
        classification: SemicontinuityClass::UscNotLsc,
        jump_size: alpha,
        witnesses: vec![],
    };
    Ok(SqcFunction::new(
        format!(
            "boundary_perturbation(n={n}, alpha={alpha}, predicate={})",
            predicate.id()
        ),
        "boundary_perturbation",
        domain,
        Some(2.0),
        vec![record],
        Some(predicate),
        false,
        Arc::new(move |x: &Point| {
            if !domain_for_eval.contains(x) {
                return (ExtendedReal::Infinity, "outside");
            }
            let base = x.norm_squared();
            let on_sphere = (base - 1.0).abs() <= SPHERE_BAND;
            if on_sphere && pred.contains(x) {
                (ExtendedReal::Finite(base + alpha), "boundary_lift")
            } else {
                (ExtendedReal::Finite(base), "base")
            }
        }),
    ))
}

/// Drops the value of `f0` at its global minimizer `c` by `alpha`. The
/// minimizer must be interior; both preconditions are spot checked on 10^3
/// sampled points.
pub fn point_drop(
    f0: &SqcFunction,
    gamma: f64,
    c: Point,
    alpha: f64,
) -> Result<SqcFunction, Error> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must be positive".into(),
        });
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be positive".into(),
        });
    }
    if f0.domain().classify(&c, 1e-9)?.region != Region::Interior {
        return Err(Error::PointNotInterior);
    }
    let fc = match f0.evaluate(&c) {
        ExtendedReal::Finite(v) => v,
        ExtendedReal::Infinity => return Err(Error::PointOutsideDomain),
    };
    let mut rng = SPOT_CHECK_SEED.rng();
    for _ in 0..1_000 {
        let x = f0.domain().sample_point(SampleRegion::Anywhere, &mut rng)?;
        if let ExtendedReal::Finite(v) = f0.evaluate(&x) {
            if v < fc - 1e-9 {
                return Err(Error::NotGlobalMinimum {
                    point_value: fc,
                    better_value: v,
                });
            }
        }
    }
    let claimed = if f0.construction() == "quadratic_norm" {
        gamma.min(2.0)
    } else {
        gamma
    };
    let record = DiscontinuityRecord::point(c.clone(), SemicontinuityClass::LscNotUsc, alpha);
    let inner = f0.clone();
    let dropped = fc - alpha;
    Ok(SqcFunction::new(
        format!("point_drop({}, c={c}, alpha={alpha})", inner.label()),
        "point_drop",
        inner.domain().clone(),
        Some(claimed),
        vec![record],
        None,
        false,
        Arc::new(move |x: &Point| {
            if x == &c {
                (ExtendedReal::Finite(dropped), "drop")
            } else {
                let (v, tag) = inner.evaluate_with_branch(x);
                (v, if tag == "outside" { tag } else { "base" })
            }
        }),
    ))
}

/// Spot check of the radial monotonicity hypothesis:
/// `||x|| <= ||y||` implies `base(x) <= base(y)`, on 10^3 sampled pairs.
fn check_radially_monotone(base: &SqcFunction, n: usize) -> Result<(), Error> {
    let space = ConvexDomain::full_space(n)?;
    let mut rng = SPOT_CHECK_SEED.rng();
    for _ in 0..1_000 {
        let a = space.sample_point(SampleRegion::Anywhere, &mut rng)?;
        let b = space.sample_point(SampleRegion::Anywhere, &mut rng)?;
        let (lo, hi) = if a.norm_squared() <= b.norm_squared() {
            (a, b)
        } else {
            (b, a)
        };
        let flo = base.evaluate(&lo).as_f64();
        let fhi = base.evaluate(&hi).as_f64();
        if flo > fhi + 1e-12 {
            return Err(Error::NotRadiallyMonotone);
        }
    }
    Ok(())
}

/// Adds a step of `beta` to a radially monotone SQC base outside (or, for
/// `UpperClosed`, outside-and-on) the sphere of radius `rho`. The base
/// defaults to the squared norm via [`radial_jump_quadratic`].
pub fn radial_jump(
    n: usize,
    base: &SqcFunction,
    rho: f64,
    beta: f64,
    side: ClosureSide,
) -> Result<SqcFunction, Error> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "dimension must be at least 2".into(),
        });
    }
    if !(rho > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho/beta",
            reason: "both must be positive".into(),
        });
    }
    if !matches!(base.domain(), ConvexDomain::FullSpace { dim } if *dim == n) {
        return Err(Error::InvalidParameter {
            name: "base",
            reason: "base must live on the full space of matching dimension".into(),
        });
    }
    check_radially_monotone(base, n)?;
    let inner = base.clone();
    let rho_sq = rho * rho;
    let classification = match side {
        ClosureSide::LowerClosed => SemicontinuityClass::LscNotUsc,
        ClosureSide::UpperClosed => SemicontinuityClass::UscNotLsc,
    };
    let record = DiscontinuityRecord {
        locus: Locus::Sphere {
            radius: rho,
            members_only: None,
        },
        classification,
        jump_size: beta,
        witnesses: vec![],
    };
    let variant = match side {
        ClosureSide::LowerClosed => "lower_closed",
        ClosureSide::UpperClosed => "upper_closed",
    };
    Ok(SqcFunction::new(
        format!(
            "radial_jump({}, rho={rho}, beta={beta}, {variant})",
            inner.label()
        ),
        "radial_jump",
        ConvexDomain::full_space(n)?,
        inner.claimed_modulus(),
        vec![record],
        None,
        false,
        Arc::new(move |x: &Point| {
            let inside = match side {
                ClosureSide::LowerClosed => x.norm_squared() <= rho_sq,
                ClosureSide::UpperClosed => x.norm_squared() < rho_sq,
            };
            match inner.evaluate(x) {
                ExtendedReal::Finite(v) => {
                    if inside {
                        (ExtendedReal::Finite(v), "core")
                    } else {
                        (ExtendedReal::Finite(v + beta), "outer")
                    }
                }
                ExtendedReal::Infinity => (ExtendedReal::Infinity, "outside"),
            }
        }),
    ))
}

/// [`radial_jump`] over the squared-norm base.
pub fn radial_jump_quadratic(
    n: usize,
    rho: f64,
    beta: f64,
    side: ClosureSide,
) -> Result<SqcFunction, Error> {
    let base = crate::gallery::quadratic_norm(n)?;
    radial_jump(n, &base, rho, beta, side)
}

/// Radial step with the sphere itself split by `partition`: members keep the
/// inner value, non-members take the stepped value. Lower- but not upper-
/// semicontinuous on the member side, the reverse on the other side.
pub fn radial_split(
    n: usize,
    rho: f64,
    beta: f64,
    partition: SpherePartitionPredicate,
) -> Result<SqcFunction, Error> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "dimension must be at least 2".into(),
        });
    }
    if !(rho > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho/beta",
            reason: "both must be positive".into(),
        });
    }
    let rho_sq = rho * rho;
    let band = SPHERE_BAND * rho_sq.max(1.0);
    let pred = partition.clone();
    let records = vec![
        DiscontinuityRecord {
            locus: Locus::Sphere {
                radius: rho,
                members_only: Some(true),
            },
            classification: SemicontinuityClass::LscNotUsc,
            jump_size: beta,
            witnesses: vec![],
        },
        DiscontinuityRecord {
            locus: Locus::Sphere {
                radius: rho,
                members_only: Some(false),
            },
            classification: SemicontinuityClass::UscNotLsc,
            jump_size: beta,
            witnesses: vec![],
        },
    ];
    Ok(SqcFunction::new(
        format!(
            "radial_split(n={n}, rho={rho}, beta={beta}, predicate={})",
            partition.id()
        ),
        "radial_split",
        ConvexDomain::full_space(n)?,
        Some(2.0),
        records,
        Some(partition),
        false,
        Arc::new(move |x: &Point| {
            let q = x.norm_squared();
            if (q - rho_sq).abs() <= band {
                if pred.contains(x) {
                    (ExtendedReal::Finite(q), "sphere_member")
                } else {
                    (ExtendedReal::Finite(q + beta), "sphere_complement")
                }
            } else if q < rho_sq {
                (ExtendedReal::Finite(q), "core")
            } else {
                (ExtendedReal::Finite(q + beta), "outer")
            }
        }),
    ))
}

/// Canonical extension of `f` restricted to `C`: the value of `f` on `C` and
/// infinity outside. `C` must be contained in the effective domain (spot
/// checked on 10^3 sampled points). Discontinuity records whose locus misses
/// the interior of `C` are dropped.
pub fn restrict(f: &SqcFunction, c: ConvexDomain) -> Result<SqcFunction, Error> {
    if c.dimension() != f.domain().dimension() {
        return Err(Error::DimensionMismatch {
            left: c.dimension(),
            right: f.domain().dimension(),
        });
    }
    let mut rng = SPOT_CHECK_SEED.rng();
    for _ in 0..1_000 {
        let x = c.sample_point(SampleRegion::Anywhere, &mut rng)?;
        if !f.evaluate(&x).is_finite() {
            return Err(Error::RestrictionOutsideDomain);
        }
    }
    let records: Vec<DiscontinuityRecord> = f
        .discontinuities()
        .iter()
        .filter(|rec| locus_meets_interior(f, rec, &c))
        .cloned()
        .collect();
    let inner = f.clone();
    let c_eval = c.clone();
    Ok(SqcFunction::new(
        format!("restrict({}, C={})", inner.label(), c.describe()),
        "restrict",
        c,
        inner.claimed_modulus(),
        records,
        inner.partition().cloned(),
        inner.is_fixture(),
        Arc::new(move |x: &Point| {
            if c_eval.contains(x) {
                inner.evaluate_with_branch(x)
            } else {
                (ExtendedReal::Infinity, "outside")
            }
        }),
    ))
}

fn locus_meets_interior(f: &SqcFunction, rec: &DiscontinuityRecord, c: &ConvexDomain) -> bool {
    let interior = |p: &Point| {
        c.classify(p, 1e-9)
            .map(|cl| cl.region == Region::Interior)
            .unwrap_or(false)
    };
    match &rec.locus {
        Locus::SinglePoint { point } => interior(point),
        Locus::IntervalEndpoints { a, b, .. } => {
            interior(&Point::new_unchecked(vec![*a])) || interior(&Point::new_unchecked(vec![*b]))
        }
        Locus::CountableSet { points, .. } => points.iter().any(interior),
        Locus::Sphere { .. } | Locus::BoundarySubset { .. } => {
            let mut rng = SPOT_CHECK_SEED.rng();
            f.locus_points(rec, 128, &mut rng).iter().any(interior)
        }
        Locus::Mapped { .. } => rec.witnesses.iter().any(interior),
    }
}

/// The restriction of `f` to the line through the origin along `direction`,
/// as a function of the signed arc length on `[-half_length, half_length]`.
///
/// A restriction to a segment keeps the modulus, and the restricted
/// inequality is exactly the inequality of `f` on collinear triples, which
/// makes slices the bridge between the multivariable constructions and the
/// exhaustive 1-D grid oracle. Sphere loci crossing the line turn into point
/// loci at the two crossings; the segment must stay inside the effective
/// domain (spot checked on 10^3 points).
pub fn line_slice(
    f: &SqcFunction,
    direction: &Point,
    half_length: f64,
) -> Result<SqcFunction, Error> {
    use rand::Rng;
    let dim = f.domain().dimension();
    if direction.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: direction.dim(),
            right: dim,
        });
    }
    if !(half_length > 0.0) {
        return Err(Error::InvalidParameter {
            name: "half_length",
            reason: "must be positive".into(),
        });
    }
    let norm = direction.norm();
    if norm < 1e-12 {
        return Err(Error::InvalidParameter {
            name: "direction",
            reason: "must be a nonzero vector".into(),
        });
    }
    let unit: Vec<f64> = direction.coords().iter().map(|c| c / norm).collect();
    let embed = {
        let unit = unit.clone();
        move |s: f64| Point::new_unchecked(unit.iter().map(|c| c * s).collect())
    };
    let mut rng = SPOT_CHECK_SEED.rng();
    for _ in 0..1_000 {
        let s: f64 = rng.random_range(-half_length..=half_length);
        if !f.evaluate(&embed(s)).is_finite() {
            return Err(Error::RestrictionOutsideDomain);
        }
    }
    let records = slice_records(f, &embed, half_length);
    let inner = f.clone();
    Ok(SqcFunction::new(
        format!(
            "line_slice({}, direction={direction}, half_length={half_length})",
            inner.label()
        ),
        "line_slice",
        ConvexDomain::interval(-half_length, half_length)?,
        inner.claimed_modulus(),
        records,
        None,
        inner.is_fixture(),
        Arc::new(move |s: &Point| {
            if s[0] < -half_length || s[0] > half_length {
                (ExtendedReal::Infinity, "outside")
            } else {
                inner.evaluate_with_branch(&embed(s[0]))
            }
        }),
    ))
}

fn slice_records(
    f: &SqcFunction,
    embed: &impl Fn(f64) -> Point,
    half_length: f64,
) -> Vec<DiscontinuityRecord> {
    let mut out = Vec::new();
    for rec in f.discontinuities() {
        match &rec.locus {
            Locus::Sphere { radius, .. } if *radius < half_length => {
                // The line meets the sphere at two points; keep a crossing
                // when the full-space point there is covered by this record
                // (split loci depend on the partition side at the crossing).
                let nudge = match rec.classification {
                    SemicontinuityClass::UscNotLsc => 1.0 + 4.0 * f64::EPSILON,
                    _ => 1.0 - 4.0 * f64::EPSILON,
                };
                for sign in [-1.0, 1.0] {
                    let s = sign * radius * nudge;
                    if f.record_at(&embed(s), 1e-9)
                        .map(|r| std::ptr::eq(r, rec))
                        .unwrap_or(false)
                    {
                        out.push(DiscontinuityRecord::point(
                            Point::new_unchecked(vec![s]),
                            rec.classification,
                            rec.jump_size,
                        ));
                    }
                }
            }
            Locus::SinglePoint { point } => {
                let s: f64 = point
                    .coords()
                    .iter()
                    .zip(embed(1.0).coords())
                    .map(|(p, d)| p * d)
                    .sum();
                if s.abs() <= half_length {
                    let projected = embed(s);
                    let off = crate::core::squared_distance(&projected, point)
                        .map(f64::sqrt)
                        .unwrap_or(f64::INFINITY);
                    if off <= 1e-12 {
                        out.push(DiscontinuityRecord::point(
                            Point::new_unchecked(vec![s]),
                            rec.classification,
                            rec.jump_size,
                        ));
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Pulls `f` back through the inverse of `z -> Az + b`: the result evaluates
/// `f(A^{-1}(z - b))` on the affine image of the domain and carries modulus
/// `gamma * beta^2`, where `beta` is the minimum modulus of the map.
pub fn affine_pullback(f: &SqcFunction, map: LinearMap) -> Result<SqcFunction, Error> {
    let gamma = f.claimed_modulus().ok_or_else(|| Error::UnknownModulus {
        label: f.label().to_string(),
    })?;
    if map.dimension() != f.domain().dimension() {
        return Err(Error::DimensionMismatch {
            left: map.dimension(),
            right: f.domain().dimension(),
        });
    }
    let beta = min_modulus(&map, 1e-12)?;
    let claimed = gamma * beta * beta;
    let records = f
        .discontinuities()
        .iter()
        .map(|rec| map_record(f, rec, &map))
        .collect();
    let domain = ConvexDomain::affine_image(map.clone(), f.domain().clone())?;
    let inner = f.clone();
    let eval_map = map.clone();
    Ok(SqcFunction::new(
        format!("affine_pullback({}, beta={beta})", inner.label()),
        "affine_pullback",
        domain,
        Some(claimed),
        records,
        None,
        false,
        Arc::new(move |z: &Point| inner.evaluate_with_branch(&eval_map.apply_inverse(z))),
    ))
}

fn map_record(f: &SqcFunction, rec: &DiscontinuityRecord, map: &LinearMap) -> DiscontinuityRecord {
    let forward = |p: &Point| map.apply(p);
    let trivially_centered = map.offset().coords().iter().all(|c| *c == 0.0);
    match &rec.locus {
        Locus::SinglePoint { point } => DiscontinuityRecord {
            locus: Locus::SinglePoint {
                point: forward(point),
            },
            classification: rec.classification,
            jump_size: rec.jump_size,
            witnesses: vec![forward(point)],
        },
        Locus::Sphere {
            radius,
            members_only: None,
        } if map.is_similarity() && trivially_centered => {
            let scaled = radius * map.largest_singular_value();
            DiscontinuityRecord {
                locus: Locus::Sphere {
                    radius: scaled,
                    members_only: None,
                },
                classification: rec.classification,
                jump_size: rec.jump_size,
                witnesses: vec![],
            }
        }
        _ => {
            let mut rng = SPOT_CHECK_SEED.rng();
            let witnesses: Vec<Point> = f
                .locus_points(rec, 32, &mut rng)
                .iter()
                .map(forward)
                .collect();
            DiscontinuityRecord {
                locus: Locus::Mapped {
                    description: format!("affine image of {:?}", rec.locus),
                },
                classification: rec.classification,
                jump_size: rec.jump_size,
                witnesses,
            }
        }
    }
}
