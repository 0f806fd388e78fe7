//! Convex domains with membership classification, point and triple samplers,
//! and the minimum modulus of an invertible linear map.

mod matrix;
mod sampler;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::core::Point;
use crate::error::Error;
use matrix::SquareMatrix;

pub use sampler::{sample_triples, stress_distance, StressSet, TripleSample, TripleSampler};

/// Where a point sits relative to a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Interior,
    Boundary,
    Outside,
}

/// Classification of a point together with its distance to the boundary.
///
/// For affine images the distance is measured in the preimage coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointClass {
    pub region: Region,
    pub boundary_distance: f64,
}

/// Region request for point sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleRegion {
    Interior,
    Boundary,
    Anywhere,
}

/// An invertible affine map `x -> Ax + b`. The inverse is precomputed at
/// construction, and the smallest singular value of `A` must exceed 1e-12.
#[derive(Debug, Clone)]
pub struct LinearMap {
    forward: SquareMatrix,
    inverse: SquareMatrix,
    offset: Point,
    sigma_max: f64,
}

impl LinearMap {
    pub fn new(rows: &[Vec<f64>], offset: Point) -> Result<Self, Error> {
        let forward = SquareMatrix::from_rows(rows)?;
        if forward.dim() != offset.dim() {
            return Err(Error::DimensionMismatch {
                left: forward.dim(),
                right: offset.dim(),
            });
        }
        let inverse = forward.inverse()?;
        let sigma_max = forward.largest_singular_value(1e-12)?;
        let sigma_max_inv = inverse.largest_singular_value(1e-12)?;
        // sigma_min(A) = 1 / sigma_max(A^-1)
        if sigma_max_inv <= 0.0 || 1.0 / sigma_max_inv <= 1e-12 {
            return Err(Error::SingularMap);
        }
        Ok(LinearMap {
            forward,
            inverse,
            offset,
            sigma_max,
        })
    }

    pub fn identity(dim: usize) -> Self {
        LinearMap {
            forward: SquareMatrix::identity(dim),
            inverse: SquareMatrix::identity(dim),
            offset: Point::origin(dim),
            sigma_max: 1.0,
        }
    }

    pub fn scaling(dim: usize, factor: f64) -> Result<Self, Error> {
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { factor } else { 0.0 })
                    .collect()
            })
            .collect();
        LinearMap::new(&rows, Point::origin(dim))
    }

    pub fn dimension(&self) -> usize {
        self.forward.dim()
    }

    pub fn offset(&self) -> &Point {
        &self.offset
    }

    /// `Ax + b`.
    pub fn apply(&self, x: &Point) -> Point {
        let mut v = self.forward.matvec(x.coords());
        for (c, b) in v.iter_mut().zip(self.offset.coords()) {
            *c += b;
        }
        Point::new_unchecked(v)
    }

    /// `A^{-1}(z - b)`.
    pub fn apply_inverse(&self, z: &Point) -> Point {
        let shifted: Vec<f64> = z
            .coords()
            .iter()
            .zip(self.offset.coords())
            .map(|(a, b)| a - b)
            .collect();
        Point::new_unchecked(self.inverse.matvec(&shifted))
    }

    pub fn largest_singular_value(&self) -> f64 {
        self.sigma_max
    }

    /// Whether `A` is a scaled rotation, i.e. `A^T A = s^2 I`.
    pub(crate) fn is_similarity(&self) -> bool {
        let n = self.dimension();
        let s2 = self.sigma_max * self.sigma_max;
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = self.forward.matvec(&e);
            for k in 0..n {
                let mut ek = vec![0.0; n];
                ek[k] = 1.0;
                let colk = self.forward.matvec(&ek);
                let dot: f64 = col.iter().zip(&colk).map(|(a, b)| a * b).sum();
                let want = if j == k { s2 } else { 0.0 };
                if (dot - want).abs() > 1e-12 * s2.max(1.0) {
                    return false;
                }
            }
        }
        true
    }
}

/// Minimum modulus of the map: `min { ||A^{-1} v|| : ||v|| = 1 }`, which
/// equals the reciprocal of the largest singular value of `A`.
///
/// `tol` is the power iteration convergence threshold.
pub fn min_modulus(map: &LinearMap, tol: f64) -> Result<f64, Error> {
    let sigma = map.forward.largest_singular_value(tol)?;
    if sigma <= 0.0 {
        return Err(Error::SingularMap);
    }
    Ok(1.0 / sigma)
}

/// A convex subset of `R^n`. Convexity holds by construction for every
/// variant.
#[derive(Debug, Clone)]
pub enum ConvexDomain {
    FullSpace {
        dim: usize,
    },
    Interval {
        a: f64,
        b: f64,
    },
    Box {
        lo: Point,
        hi: Point,
    },
    ClosedBall {
        center: Point,
        radius: f64,
    },
    AffineImage {
        map: LinearMap,
        inner: Box<ConvexDomain>,
    },
}

impl ConvexDomain {
    pub fn full_space(dim: usize) -> Result<Self, Error> {
        if dim < 1 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "dimension must be at least 1".into(),
            });
        }
        Ok(ConvexDomain::FullSpace { dim })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self, Error> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter {
                name: "interval",
                reason: format!("need finite a < b, got [{a}, {b}]"),
            });
        }
        Ok(ConvexDomain::Interval { a, b })
    }

    pub fn axis_box(lo: Point, hi: Point) -> Result<Self, Error> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                left: lo.dim(),
                right: hi.dim(),
            });
        }
        if lo.coords().iter().zip(hi.coords()).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidParameter {
                name: "box",
                reason: "need lo < hi in every coordinate".into(),
            });
        }
        Ok(ConvexDomain::Box { lo, hi })
    }

    pub fn closed_ball(center: Point, radius: f64) -> Result<Self, Error> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter {
                name: "radius",
                reason: format!("must be positive and finite, got {radius}"),
            });
        }
        Ok(ConvexDomain::ClosedBall { center, radius })
    }

    pub fn affine_image(map: LinearMap, inner: ConvexDomain) -> Result<Self, Error> {
        if map.dimension() != inner.dimension() {
            return Err(Error::DimensionMismatch {
                left: map.dimension(),
                right: inner.dimension(),
            });
        }
        Ok(ConvexDomain::AffineImage {
            map,
            inner: Box::new(inner),
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexDomain::FullSpace { dim } => *dim,
            ConvexDomain::Interval { .. } => 1,
            ConvexDomain::Box { lo, .. } => lo.dim(),
            ConvexDomain::ClosedBall { center, .. } => center.dim(),
            ConvexDomain::AffineImage { map, .. } => map.dimension(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexDomain::FullSpace { .. } => false,
            ConvexDomain::Interval { .. }
            | ConvexDomain::Box { .. }
            | ConvexDomain::ClosedBall { .. } => true,
            ConvexDomain::AffineImage { inner, .. } => inner.is_bounded(),
        }
    }

    /// An upper bound on the diameter; `None` for unbounded domains.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            ConvexDomain::FullSpace { .. } => None,
            ConvexDomain::Interval { a, b } => Some(b - a),
            ConvexDomain::Box { lo, hi } => Some(
                lo.coords()
                    .iter()
                    .zip(hi.coords())
                    .map(|(l, h)| (h - l) * (h - l))
                    .sum::<f64>()
                    .sqrt(),
            ),
            ConvexDomain::ClosedBall { radius, .. } => Some(2.0 * radius),
            ConvexDomain::AffineImage { map, inner } => {
                inner.diameter().map(|d| d * map.largest_singular_value())
            }
        }
    }

    /// Exact set membership. No tolerance: the closed variants use `<=`
    /// comparisons directly, so this agrees bit for bit with the evaluators
    /// that extend functions by infinity outside their domain.
    pub fn contains(&self, x: &Point) -> bool {
        if x.dim() != self.dimension() {
            return false;
        }
        match self {
            ConvexDomain::FullSpace { .. } => true,
            ConvexDomain::Interval { a, b } => x[0] >= *a && x[0] <= *b,
            ConvexDomain::Box { lo, hi } => x
                .coords()
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .all(|(c, (l, h))| c >= l && c <= h),
            ConvexDomain::ClosedBall { center, radius } => {
                dist_squared(x, center) <= radius * radius
            }
            ConvexDomain::AffineImage { map, inner } => inner.contains(&map.apply_inverse(x)),
        }
    }

    /// Classifies `x` as interior, boundary, or outside, with `tol` as the
    /// width of the boundary band.
    pub fn classify(&self, x: &Point, tol: f64) -> Result<PointClass, Error> {
        if x.dim() != self.dimension() {
            return Err(Error::DimensionMismatch {
                left: x.dim(),
                right: self.dimension(),
            });
        }
        assert!(tol > 0.0, "classification tolerance must be positive");
        Ok(match self {
            ConvexDomain::FullSpace { .. } => PointClass {
                region: Region::Interior,
                boundary_distance: f64::INFINITY,
            },
            ConvexDomain::Interval { a, b } => {
                let v = x[0];
                let bd = (v - a).abs().min((b - v).abs());
                let region = if bd <= tol {
                    Region::Boundary
                } else if v > *a && v < *b {
                    Region::Interior
                } else {
                    Region::Outside
                };
                PointClass {
                    region,
                    boundary_distance: bd,
                }
            }
            ConvexDomain::Box { lo, hi } => {
                let mut outside_sq = 0.0;
                let mut inner_margin = f64::INFINITY;
                for ((&c, &l), &h) in x.coords().iter().zip(lo.coords()).zip(hi.coords()) {
                    let below = l - c;
                    let above = c - h;
                    if below > 0.0 {
                        outside_sq += below * below;
                    }
                    if above > 0.0 {
                        outside_sq += above * above;
                    }
                    inner_margin = inner_margin.min((c - l).min(h - c));
                }
                if outside_sq > 0.0 {
                    let d = outside_sq.sqrt();
                    PointClass {
                        region: if d <= tol {
                            Region::Boundary
                        } else {
                            Region::Outside
                        },
                        boundary_distance: d,
                    }
                } else {
                    PointClass {
                        region: if inner_margin <= tol {
                            Region::Boundary
                        } else {
                            Region::Interior
                        },
                        boundary_distance: inner_margin,
                    }
                }
            }
            ConvexDomain::ClosedBall { center, radius } => {
                let r = dist_squared(x, center).sqrt();
                let bd = (r - radius).abs();
                let region = if bd <= tol {
                    Region::Boundary
                } else if r < *radius {
                    Region::Interior
                } else {
                    Region::Outside
                };
                PointClass {
                    region,
                    boundary_distance: bd,
                }
            }
            ConvexDomain::AffineImage { map, inner } => {
                inner.classify(&map.apply_inverse(x), tol)?
            }
        })
    }

    /// Draws a point from the requested region.
    ///
    /// Interior sampling covers the whole interior with positive density.
    /// Boundary points land within 1e-12 of the analytic boundary while
    /// still passing `contains`.
    pub fn sample_point<R: Rng + ?Sized>(
        &self,
        region: SampleRegion,
        rng: &mut R,
    ) -> Result<Point, Error> {
        const CLASSIFY_TOL: f64 = 1e-9;
        const MAX_TRIES: usize = 10_000;
        match region {
            SampleRegion::Boundary => self.sample_boundary(rng),
            SampleRegion::Anywhere => Ok(self.sample_anywhere(rng)),
            SampleRegion::Interior => {
                for _ in 0..MAX_TRIES {
                    let p = self.sample_anywhere(rng);
                    if self.classify(&p, CLASSIFY_TOL)?.region == Region::Interior {
                        return Ok(p);
                    }
                }
                Err(Error::SamplerExhausted {
                    attempts: MAX_TRIES,
                })
            }
        }
    }

    fn sample_anywhere<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            // Centered Gaussian; the scale is wide enough to cover the unit
            // spheres and jump radii that the gallery uses while keeping
            // values in a numerically comfortable range.
            ConvexDomain::FullSpace { dim } => {
                let coords = (0..*dim)
                    .map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                Point::new_unchecked(coords)
            }
            ConvexDomain::Interval { a, b } => {
                Point::new_unchecked(vec![rng.random_range(*a..=*b)])
            }
            ConvexDomain::Box { lo, hi } => {
                let coords = lo
                    .coords()
                    .iter()
                    .zip(hi.coords())
                    .map(|(&l, &h)| rng.random_range(l..=h))
                    .collect();
                Point::new_unchecked(coords)
            }
            ConvexDomain::ClosedBall { center, radius } => {
                let dir = unit_direction(center.dim(), rng);
                let u: f64 = rng.random_range(0.0..=1.0);
                let r = radius * u.powf(1.0 / center.dim() as f64);
                let coords = center
                    .coords()
                    .iter()
                    .zip(dir.coords())
                    .map(|(c, d)| c + r * d)
                    .collect();
                Point::new_unchecked(coords)
            }
            ConvexDomain::AffineImage { map, inner } => map.apply(&inner.sample_anywhere(rng)),
        }
    }

    fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point, Error> {
        match self {
            ConvexDomain::FullSpace { .. } => Err(Error::BoundaryOfFullSpace),
            ConvexDomain::Interval { a, b } => {
                let v = if rng.random::<bool>() { *a } else { *b };
                Ok(Point::new_unchecked(vec![v]))
            }
            ConvexDomain::Box { lo, hi } => {
                let n = lo.dim();
                let face = rng.random_range(0..n);
                let low_side = rng.random::<bool>();
                let coords = lo
                    .coords()
                    .iter()
                    .zip(hi.coords())
                    .enumerate()
                    .map(|(i, (&l, &h))| {
                        if i == face {
                            if low_side {
                                l
                            } else {
                                h
                            }
                        } else {
                            rng.random_range(l..=h)
                        }
                    })
                    .collect();
                Ok(Point::new_unchecked(coords))
            }
            ConvexDomain::ClosedBall { center, radius } => {
                // Normalized Gaussian direction, nudged a hair inward so the
                // point still passes the exact `contains` test.
                let dir = unit_direction(center.dim(), rng);
                let r = radius * (1.0 - 4.0 * f64::EPSILON);
                let coords = center
                    .coords()
                    .iter()
                    .zip(dir.coords())
                    .map(|(c, d)| c + r * d)
                    .collect();
                Ok(Point::new_unchecked(coords))
            }
            ConvexDomain::AffineImage { map, inner } => Ok(map.apply(&inner.sample_boundary(rng)?)),
        }
    }

    /// Short human-readable description, used in labels and reports.
    pub fn describe(&self) -> String {
        match self {
            ConvexDomain::FullSpace { dim } => format!("R^{dim}"),
            ConvexDomain::Interval { a, b } => format!("[{a}, {b}]"),
            ConvexDomain::Box { lo, hi } => format!("box {lo}..{hi}"),
            ConvexDomain::ClosedBall { center, radius } => {
                format!("closed ball (center {center}, radius {radius})")
            }
            ConvexDomain::AffineImage { inner, .. } => {
                format!("affine image of {}", inner.describe())
            }
        }
    }
}

fn dist_squared(x: &Point, y: &Point) -> f64 {
    x.coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// A uniformly random unit vector (normalized Gaussian).
pub(crate) fn unit_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Point {
    loop {
        let coords: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return Point::new_unchecked(coords.iter().map(|c| c / norm).collect());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::RngSeed;

    fn p(coords: &[f64]) -> Point {
        Point::from_slice(coords).unwrap()
    }

    #[test]
    fn classify_examples() {
        let ball = ConvexDomain::closed_ball(Point::origin(2), 1.0).unwrap();
        assert_eq!(
            ball.classify(&p(&[0.5, 0.0]), 1e-9).unwrap().region,
            Region::Interior
        );
        assert_eq!(
            ball.classify(&p(&[1.0, 0.0]), 1e-9).unwrap().region,
            Region::Boundary
        );
        let iv = ConvexDomain::interval(0.0, 1.0).unwrap();
        assert_eq!(
            iv.classify(&p(&[2.0]), 1e-9).unwrap().region,
            Region::Outside
        );
    }

    #[test]
    fn classify_box() {
        let b = ConvexDomain::axis_box(p(&[0.0, 0.0]), p(&[1.0, 1.0])).unwrap();
        assert_eq!(
            b.classify(&p(&[0.5, 0.5]), 1e-9).unwrap().region,
            Region::Interior
        );
        assert_eq!(
            b.classify(&p(&[0.0, 0.5]), 1e-9).unwrap().region,
            Region::Boundary
        );
        assert_eq!(
            b.classify(&p(&[2.0, 0.5]), 1e-9).unwrap().region,
            Region::Outside
        );
    }

    #[test]
    fn samples_classify_into_requested_region() {
        let domains = [
            ConvexDomain::interval(0.0, 1.0).unwrap(),
            ConvexDomain::axis_box(p(&[0.0, 0.0]), p(&[1.0, 1.0])).unwrap(),
            ConvexDomain::closed_ball(Point::origin(3), 1.5).unwrap(),
            ConvexDomain::affine_image(
                LinearMap::new(&[vec![2.0, 0.0], vec![0.0, 1.0]], p(&[1.0, -1.0])).unwrap(),
                ConvexDomain::closed_ball(Point::origin(2), 1.0).unwrap(),
            )
            .unwrap(),
        ];
        let mut rng = RngSeed(11).rng();
        for domain in &domains {
            for _ in 0..100_000 {
                let q = domain
                    .sample_point(SampleRegion::Interior, &mut rng)
                    .unwrap();
                assert_eq!(domain.classify(&q, 1e-9).unwrap().region, Region::Interior);
            }
            for _ in 0..1_000 {
                let q = domain
                    .sample_point(SampleRegion::Boundary, &mut rng)
                    .unwrap();
                assert_eq!(domain.classify(&q, 1e-9).unwrap().region, Region::Boundary);
                assert!(domain.contains(&q));
            }
            for _ in 0..1_000 {
                let q = domain
                    .sample_point(SampleRegion::Anywhere, &mut rng)
                    .unwrap();
                assert!(domain.contains(&q));
            }
        }
    }

    #[test]
    fn ball_boundary_lands_on_sphere() {
        let ball = ConvexDomain::closed_ball(Point::origin(2), 1.0).unwrap();
        let mut rng = RngSeed(3).rng();
        let q = ball.sample_point(SampleRegion::Boundary, &mut rng).unwrap();
        assert!((q.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_of_full_space_is_an_error() {
        let fs = ConvexDomain::full_space(2).unwrap();
        let mut rng = RngSeed(3).rng();
        assert!(matches!(
            fs.sample_point(SampleRegion::Boundary, &mut rng),
            Err(Error::BoundaryOfFullSpace)
        ));
    }

    #[test]
    fn min_modulus_examples() {
        let two_i = LinearMap::scaling(2, 2.0).unwrap();
        assert!((min_modulus(&two_i, 1e-12).unwrap() - 0.5).abs() < 1e-10);
        let id = LinearMap::identity(4);
        assert!((min_modulus(&id, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let diag = LinearMap::new(&[vec![1.0, 0.0], vec![0.0, 3.0]], Point::origin(2)).unwrap();
        assert!((min_modulus(&diag, 1e-12).unwrap() - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn inverse_map_respects_min_modulus_bound() {
        // ||A^{-1} v|| >= beta ||v|| for the minimum modulus beta.
        let map = LinearMap::new(&[vec![1.0, 2.0], vec![-0.5, 3.0]], Point::origin(2)).unwrap();
        let beta = min_modulus(&map, 1e-12).unwrap();
        let mut rng = RngSeed(5).rng();
        for _ in 0..1_000 {
            let v = unit_direction(2, &mut rng);
            let shifted = Point::new_unchecked(
                map.apply_inverse(&v)
                    .coords()
                    .iter()
                    .zip(map.apply_inverse(&Point::origin(2)).coords())
                    .map(|(a, b)| a - b)
                    .collect(),
            );
            assert!(shifted.norm() >= beta - 1e-8);
        }
    }

    #[test]
    fn affine_image_membership_roundtrip() {
        let map = LinearMap::new(&[vec![2.0, 1.0], vec![0.0, 1.0]], p(&[3.0, -2.0])).unwrap();
        let inner = ConvexDomain::closed_ball(Point::origin(2), 1.0).unwrap();
        let image = ConvexDomain::affine_image(map.clone(), inner.clone()).unwrap();
        let mut rng = RngSeed(9).rng();
        for _ in 0..10_000 {
            let q = image
                .sample_point(SampleRegion::Anywhere, &mut rng)
                .unwrap();
            assert_eq!(image.contains(&q), inner.contains(&map.apply_inverse(&q)));
            // and a point sampled outside transforms consistently too
            let far = Point::new_unchecked(vec![
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
            ]);
            assert_eq!(
                image.contains(&far),
                inner.contains(&map.apply_inverse(&far))
            );
        }
    }

    #[test]
    fn degenerate_constructors_rejected() {
        assert!(ConvexDomain::interval(1.0, 1.0).is_err());
        assert!(ConvexDomain::closed_ball(Point::origin(2), 0.0).is_err());
        assert!(ConvexDomain::axis_box(p(&[0.0]), p(&[0.0])).is_err());
        assert!(LinearMap::new(&[vec![1.0, 1.0], vec![1.0, 1.0]], Point::origin(2)).is_err());
    }
}
