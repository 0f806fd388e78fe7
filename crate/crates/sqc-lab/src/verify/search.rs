//! Derivative-free searches: multistart pattern search for minimizer
//! uniqueness and a ray probe for quadratic supercoercivity.

use serde::Serialize;

use crate::core::{squared_distance, ExtendedReal, Point, RngSeed};
use crate::error::Error;
use crate::gallery::SqcFunction;
use crate::geometry::{unit_direction, ConvexDomain, SampleRegion};

/// A cluster of pattern-search terminals.
#[derive(Debug, Clone, Serialize)]
pub struct MinCluster {
    pub point: Point,
    pub value: f64,
    pub members: usize,
}

const STEP_FLOOR: f64 = 1e-8;
const CLUSTER_RADIUS: f64 = 1e-4;

/// Coordinate pattern search with step halving. Gradient-free on purpose:
/// the gallery functions jump.
fn pattern_search(
    f: &SqcFunction,
    search_domain: &ConvexDomain,
    start: Point,
    initial_step: f64,
) -> (Point, f64) {
    let eval = |x: &Point| -> f64 {
        if search_domain.contains(x) {
            f.evaluate(x).as_f64()
        } else {
            f64::INFINITY
        }
    };
    let n = start.dim();
    let mut center = start;
    let mut value = eval(&center);
    let mut step = initial_step;
    let mut iterations = 0usize;
    while step >= STEP_FLOOR && iterations < 200_000 {
        iterations += 1;
        let mut best: Option<(Point, f64)> = None;
        for i in 0..n {
            for sign in [-1.0, 1.0] {
                let mut coords = center.coords().to_vec();
                coords[i] += sign * step;
                let cand = Point::new_unchecked(coords);
                let v = eval(&cand);
                if v < best.as_ref().map(|(_, bv)| *bv).unwrap_or(value) {
                    best = Some((cand, v));
                }
            }
        }
        match best {
            Some((p, v)) => {
                center = p;
                value = v;
            }
            None => step *= 0.5,
        }
    }
    (center, value)
}

/// Multistart minimizer search over a bounded domain. Terminals within
/// 1e-4 of each other merge into one cluster; clusters come back sorted by
/// value. A function whose sublevel sets shrink to one point yields exactly
/// one cluster.
///
/// Starts are `starts` random interior points plus every declared
/// single-point discontinuity witness inside the search domain, so isolated
/// value drops are reachable.
pub fn unique_min_check(
    f: &SqcFunction,
    search_domain: &ConvexDomain,
    starts: usize,
    seed: RngSeed,
) -> Result<Vec<MinCluster>, Error> {
    let diameter = search_domain.diameter().ok_or(Error::UnboundedDomain {
        operation: "unique_min_check",
    })?;
    let mut rng = seed.rng();
    let mut start_points = Vec::with_capacity(starts + 4);
    for _ in 0..starts {
        start_points.push(search_domain.sample_point(SampleRegion::Interior, &mut rng)?);
    }
    for rec in f.discontinuities() {
        for w in &rec.witnesses {
            if w.dim() == search_domain.dimension()
                && search_domain.contains(w)
                && f.evaluate(w).is_finite()
            {
                start_points.push(w.clone());
            }
        }
    }

    let mut terminals: Vec<(Point, f64)> = start_points
        .into_iter()
        .map(|s| pattern_search(f, search_domain, s, 0.1 * diameter))
        .filter(|(_, v)| v.is_finite())
        .collect();
    terminals.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    let mut clusters: Vec<MinCluster> = Vec::new();
    for (p, v) in terminals {
        match clusters.iter_mut().find(|c| {
            squared_distance(&c.point, &p)
                .map(|d| d.sqrt() <= CLUSTER_RADIUS)
                .unwrap_or(false)
        }) {
            Some(c) => c.members += 1,
            None => clusters.push(MinCluster {
                point: p,
                value: v,
                members: 1,
            }),
        }
    }
    Ok(clusters)
}

/// Ray-sampling probe for 2-supercoercivity: the minimum of `f(r d) / r^2`
/// over random unit directions `d` and the two largest radii. A positive
/// return is consistent with the ratio staying bounded away from zero.
pub fn supercoercivity_probe(
    f: &SqcFunction,
    directions: usize,
    radii: &[f64],
    seed: RngSeed,
) -> Result<f64, Error> {
    if !matches!(f.domain(), ConvexDomain::FullSpace { .. }) {
        return Err(Error::UnboundedDomain {
            operation: "supercoercivity_probe (needs the full space)",
        });
    }
    if radii.len() < 2 || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter {
            name: "radii",
            reason: "need a strictly increasing schedule of at least two radii".into(),
        });
    }
    if directions == 0 {
        return Err(Error::InvalidParameter {
            name: "directions",
            reason: "need at least one direction".into(),
        });
    }
    let dim = f.domain().dimension();
    let mut rng = seed.rng();
    let far = &radii[radii.len() - 2..];
    let mut worst = f64::INFINITY;
    for _ in 0..directions {
        let d = unit_direction(dim, &mut rng);
        for &r in far {
            let x = Point::new_unchecked(d.coords().iter().map(|c| c * r).collect());
            if let ExtendedReal::Finite(v) = f.evaluate(&x) {
                worst = worst.min(v / (r * r));
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{self, ClosureSide};

    fn ball2(r: f64) -> ConvexDomain {
        ConvexDomain::closed_ball(Point::origin(2), r).unwrap()
    }

    #[test]
    fn quadratic_has_one_minimizer_cluster() {
        let f = gallery::quadratic_norm(2).unwrap();
        let clusters = unique_min_check(&f, &ball2(1.0), 64, RngSeed(7)).unwrap();
        assert_eq!(clusters.len(), 1);
        assert!(clusters[0].point.norm() < 1e-6);
        assert!(clusters[0].value < 1e-10);
    }

    #[test]
    fn point_drop_cluster_reports_the_dropped_value() {
        let base = gallery::quadratic_norm(2).unwrap();
        let f = gallery::point_drop(&base, 2.0, Point::origin(2), 1.0).unwrap();
        let clusters = unique_min_check(&f, &ball2(1.0), 64, RngSeed(7)).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].value, -1.0);
        assert_eq!(clusters[0].point, Point::origin(2));
    }

    #[test]
    fn endpoint_jump_minimum_sits_just_inside_the_interval() {
        let base = gallery::restrict(
            &gallery::quadratic_norm(1).unwrap(),
            ConvexDomain::interval(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let f = gallery::endpoint_jump(&base, 2.0, None).unwrap();
        let clusters = unique_min_check(
            &f,
            &ConvexDomain::interval(0.0, 1.0).unwrap(),
            32,
            RngSeed(7),
        )
        .unwrap();
        assert_eq!(clusters.len(), 1);
        // the infimum 0 at the open end is approached, never attained
        assert!(clusters[0].point[0] > 0.0);
        assert!(clusters[0].value < 1e-10);
    }

    #[test]
    fn unbounded_search_domain_is_rejected() {
        let f = gallery::quadratic_norm(2).unwrap();
        assert!(matches!(
            unique_min_check(&f, f.domain(), 4, RngSeed(7)),
            Err(Error::UnboundedDomain { .. })
        ));
    }

    #[test]
    fn supercoercivity_of_gallery_functions() {
        let radii = [1.0, 10.0, 100.0, 1000.0];
        let q = gallery::quadratic_norm(2).unwrap();
        let v = supercoercivity_probe(&q, 64, &radii, RngSeed(7)).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "quadratic ratio {v}");
        let r = gallery::radial_jump_quadratic(2, 1.0, 1.0, ClosureSide::LowerClosed).unwrap();
        let v = supercoercivity_probe(&r, 64, &radii, RngSeed(7)).unwrap();
        assert!((1.0..1.1).contains(&v), "radial ratio {v}");
        let m = gallery::max_root_quadratic(2, 1).unwrap();
        let v = supercoercivity_probe(&m, 64, &radii, RngSeed(7)).unwrap();
        assert!(v > 0.9, "max-root ratio {v}");
    }

    #[test]
    fn supercoercivity_requires_full_space() {
        let base = gallery::restrict(&gallery::quadratic_norm(2).unwrap(), ball2(1.0)).unwrap();
        assert!(supercoercivity_probe(&base, 8, &[1.0, 10.0], RngSeed(7)).is_err());
    }
}
