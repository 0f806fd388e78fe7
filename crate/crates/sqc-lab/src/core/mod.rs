//! Numeric foundations: extended reals, points, tolerance policy, and seeds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::Error;

/// A real value extended with a single point at positive infinity.
///
/// Infinity is a distinct variant rather than `f64::INFINITY`, so arithmetic
/// involving it must be handled explicitly. Negative infinity has no
/// representation: every function in this crate is proper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    /// Wraps a finite value.
    ///
    /// Panics if `value` is NaN or infinite.
    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite(), "ExtendedReal::finite got {value}");
        ExtendedReal::Finite(value)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinity => None,
        }
    }

    /// Collapses to `f64`, mapping the infinite state to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                ExtendedReal::Finite(if a >= b { a } else { b })
            }
            _ => ExtendedReal::Infinity,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::Finite(_), ExtendedReal::Infinity) => Some(Ordering::Less),
            (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => Some(Ordering::Greater),
            (ExtendedReal::Infinity, ExtendedReal::Infinity) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => serializer.serialize_f64(*v),
            ExtendedReal::Infinity => serializer.serialize_str("inf"),
        }
    }
}

/// Serializes a margin that may be infinite (JSON has no literal for it).
pub(crate) fn serialize_margin<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// A point of `R^n` with finite coordinates. The dimension is fixed at
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, Error> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter {
                name: "coords",
                reason: "a point needs at least one coordinate".into(),
            });
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "coords",
                reason: format!("coordinates must be finite, got {bad}"),
            });
        }
        Ok(Point(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self, Error> {
        Self::new(coords.to_vec())
    }

    /// The origin of `R^n`.
    pub fn origin(dim: usize) -> Self {
        assert!(dim >= 1);
        Point(vec![0.0; dim])
    }

    /// Skips the finiteness check; callers guarantee finite coordinates.
    pub(crate) fn new_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Slack policy for inequality checks.
///
/// The inequalities under test hold exactly; the slack only absorbs rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    /// Absolute slack added to every comparison.
    pub abs_eps: f64,
    /// Relative slack, applied as `rel_eps * max(1, |rhs|)`.
    pub rel_eps: f64,
    /// Smallest admissible `||x - y||` between checked pair members.
    pub min_pair_distance: f64,
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64, min_pair_distance: f64) -> Result<Self, Error> {
        let in_range = |v: f64| (0.0..=1e-3).contains(&v);
        if !in_range(abs_eps) {
            return Err(Error::InvalidParameter {
                name: "abs_eps",
                reason: format!("must lie in [0, 1e-3], got {abs_eps}"),
            });
        }
        if !in_range(rel_eps) {
            return Err(Error::InvalidParameter {
                name: "rel_eps",
                reason: format!("must lie in [0, 1e-3], got {rel_eps}"),
            });
        }
        if !(min_pair_distance > 0.0) {
            return Err(Error::InvalidParameter {
                name: "min_pair_distance",
                reason: format!("must be positive, got {min_pair_distance}"),
            });
        }
        Ok(Tolerance {
            abs_eps,
            rel_eps,
            min_pair_distance,
        })
    }

    /// Total slack allowed on a comparison against `rhs`.
    pub fn slack(&self, rhs: f64) -> f64 {
        self.abs_eps + self.rel_eps * rhs.abs().max(1.0)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_eps: 1e-9,
            rel_eps: 1e-9,
            min_pair_distance: 1e-6,
        }
    }
}

/// Seed for the deterministic sample streams.
///
/// All sampling runs on ChaCha8 keyed by this seed, so identical seed and
/// configuration reproduce bit-identical streams on every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// The point `(1-t)x + ty`.
pub fn convex_combination(x: &Point, y: &Point, t: f64) -> Result<Point, Error> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must lie in (0, 1), got {t}"),
        });
    }
    let coords = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (1.0 - t) * a + t * b)
        .collect();
    Ok(Point::new_unchecked(coords))
}

/// Squared Euclidean distance between two points of the same dimension.
pub fn squared_distance(x: &Point, y: &Point) -> Result<f64, Error> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    Ok(x.coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Right-hand side of the defining inequality:
/// `max(fx, fy) - (gamma/2)(1-t)t * sqdist`.
///
/// Absorbs to infinity when either value is infinite.
pub fn sqc_rhs(
    fx: ExtendedReal,
    fy: ExtendedReal,
    gamma: f64,
    t: f64,
    sqdist: f64,
) -> ExtendedReal {
    assert!(gamma > 0.0, "gamma must be positive, got {gamma}");
    assert!(t > 0.0 && t < 1.0, "t must lie in (0, 1), got {t}");
    assert!(sqdist >= 0.0, "sqdist must be nonnegative, got {sqdist}");
    match fx.max(fy) {
        ExtendedReal::Finite(m) => ExtendedReal::Finite(m - 0.5 * gamma * (1.0 - t) * t * sqdist),
        ExtendedReal::Infinity => ExtendedReal::Infinity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(coords: &[f64]) -> Point {
        Point::from_slice(coords).unwrap()
    }

    #[test]
    fn extended_real_ordering() {
        let one = ExtendedReal::finite(1.0);
        let two = ExtendedReal::finite(2.0);
        assert!(one < two);
        assert!(two < ExtendedReal::Infinity);
        assert_eq!(one.max(ExtendedReal::Infinity), ExtendedReal::Infinity);
        assert_eq!(one.max(two), two);
    }

    #[test]
    #[should_panic]
    fn extended_real_rejects_nan() {
        ExtendedReal::finite(f64::NAN);
    }

    #[test]
    fn point_rejects_non_finite_coords() {
        assert!(Point::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn convex_combination_examples() {
        // midpoint of (0,0) and (2,0)
        let z = convex_combination(&p(&[0.0, 0.0]), &p(&[2.0, 0.0]), 0.5).unwrap();
        assert_eq!(z, p(&[1.0, 0.0]));
        // identical endpoints stay fixed
        let z = convex_combination(&p(&[1.0, 1.0]), &p(&[1.0, 1.0]), 0.3).unwrap();
        assert_eq!(z, p(&[1.0, 1.0]));
        // quarter point on a segment of length one
        let z = convex_combination(&p(&[0.0]), &p(&[1.0]), 0.25).unwrap();
        assert_eq!(z, p(&[0.25]));
    }

    #[test]
    fn convex_combination_errors() {
        assert!(matches!(
            convex_combination(&p(&[0.0]), &p(&[0.0, 1.0]), 0.5),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(convex_combination(&p(&[0.0]), &p(&[1.0]), 0.0).is_err());
        assert!(convex_combination(&p(&[0.0]), &p(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn squared_distance_examples() {
        assert_eq!(
            squared_distance(&p(&[0.0, 0.0]), &p(&[0.0, 0.0])).unwrap(),
            0.0
        );
        assert_eq!(
            squared_distance(&p(&[0.0, 0.0]), &p(&[3.0, 4.0])).unwrap(),
            25.0
        );
        assert_eq!(squared_distance(&p(&[1.0]), &p(&[-1.0])).unwrap(), 4.0);
        assert!(squared_distance(&p(&[1.0]), &p(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn sqc_rhs_examples() {
        let fin = ExtendedReal::finite;
        assert_eq!(sqc_rhs(fin(2.0), fin(2.0), 2.0, 0.5, 1.0), fin(1.75));
        assert_eq!(
            sqc_rhs(ExtendedReal::Infinity, fin(0.0), 2.0, 0.5, 4.0),
            ExtendedReal::Infinity
        );
        assert_eq!(sqc_rhs(fin(0.0), fin(4.0), 2.0, 0.5, 4.0), fin(3.0));
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(1e-2, 0.0, 1e-6).is_err());
        assert!(Tolerance::new(0.0, 1e-2, 1e-6).is_err());
        assert!(Tolerance::new(0.0, 0.0, 0.0).is_err());
        let tol = Tolerance::default();
        assert_eq!(tol.slack(0.5), 1e-9 + 1e-9);
        assert_eq!(tol.slack(10.0), 1e-9 + 1e-8);
    }

    #[test]
    fn seeded_rng_replays() {
        use rand::Rng;
        let mut a = RngSeed(7).rng();
        let mut b = RngSeed(7).rng();
        for _ in 0..64 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn combination_is_symmetric_under_t_flip(
            xs in proptest::collection::vec(-10.0f64..10.0, 1..5),
            ys in proptest::collection::vec(-10.0f64..10.0, 1..5),
            t in 0.01f64..0.99,
        ) {
            let n = xs.len().min(ys.len());
            let x = p(&xs[..n]);
            let y = p(&ys[..n]);
            let a = convex_combination(&x, &y, t).unwrap();
            let b = convex_combination(&y, &x, 1.0 - t).unwrap();
            for i in 0..n {
                prop_assert!((a[i] - b[i]).abs() <= 1e-12 * a[i].abs().max(1.0));
            }
        }

        #[test]
        fn squared_distance_symmetric_and_definite(
            xs in proptest::collection::vec(-10.0f64..10.0, 1..5),
            ys in proptest::collection::vec(-10.0f64..10.0, 1..5),
        ) {
            let n = xs.len().min(ys.len());
            let x = p(&xs[..n]);
            let y = p(&ys[..n]);
            let d = squared_distance(&x, &y).unwrap();
            prop_assert_eq!(d, squared_distance(&y, &x).unwrap());
            prop_assert!(d >= 0.0);
            prop_assert_eq!(squared_distance(&x, &x).unwrap(), 0.0);
        }

        #[test]
        fn rhs_monotone_in_values_and_decreasing_in_distance(
            fx in -5.0f64..5.0,
            fy in -5.0f64..5.0,
            bump in 0.01f64..1.0,
            t in 0.01f64..0.99,
            d in 0.0f64..10.0,
        ) {
            let fin = ExtendedReal::finite;
            let base = sqc_rhs(fin(fx), fin(fy), 2.0, t, d).as_f64();
            let bumped = sqc_rhs(fin(fx + bump), fin(fy), 2.0, t, d).as_f64();
            prop_assert!(bumped >= base);
            let farther = sqc_rhs(fin(fx), fin(fy), 2.0, t, d + bump).as_f64();
            prop_assert!(farther < base);
        }
    }
}
