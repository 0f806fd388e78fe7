//! Exhaustive brute-force check on a 1-D grid: the independent oracle for
//! the interval constructions.

use crate::core::{sqc_rhs, ExtendedReal, Point};
use crate::error::Error;
use crate::gallery::SqcFunction;
use crate::geometry::ConvexDomain;

const MAX_CELLS: usize = 2_000;

/// Checks the defining inequality over every grid pair `x < y` with
/// `t in {0.05, 0.10, ..., 0.95}` and returns the worst `lhs - rhs`.
/// A nonpositive return certifies the inequality on the grid.
pub fn grid_oracle_1d(f: &SqcFunction, gamma: f64, step: f64) -> Result<f64, Error> {
    let (a, b) = match f.domain() {
        ConvexDomain::Interval { a, b } => (*a, *b),
        _ => {
            return Err(Error::IntervalDomainRequired {
                name: "grid_oracle_1d",
            })
        }
    };
    if !(step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: "must be positive".into(),
        });
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be positive".into(),
        });
    }
    let span = b - a;
    let cells = (span / step).round().max(1.0) as usize;
    if cells > MAX_CELLS {
        return Err(Error::GridTooLarge {
            nodes: cells,
            max: MAX_CELLS,
        });
    }
    let xs: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { b } else { a + i as f64 * step })
        .collect();
    let values: Vec<ExtendedReal> = xs
        .iter()
        .map(|&x| f.evaluate(&Point::new_unchecked(vec![x])))
        .collect();
    let ts: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();

    let mut worst = f64::NEG_INFINITY;
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let (x, y) = (xs[i], xs[j]);
            let sqd = (x - y) * (x - y);
            for &t in &ts {
                let rhs = sqc_rhs(values[i], values[j], gamma, t, sqd);
                let z = (1.0 - t) * x + t * y;
                let lhs = f.evaluate(&Point::new_unchecked(vec![z]));
                let margin = match (lhs, rhs) {
                    (ExtendedReal::Finite(l), ExtendedReal::Finite(r)) => l - r,
                    (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => f64::INFINITY,
                    (_, ExtendedReal::Infinity) => f64::NEG_INFINITY,
                };
                if margin > worst {
                    worst = margin;
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn sq01() -> SqcFunction {
        gallery::restrict(
            &gallery::quadratic_norm(1).unwrap(),
            ConvexDomain::interval(0.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn interval_constructions_pass_the_grid() {
        let base = sq01();
        for f in [
            gallery::endpoint_jump(&base, 2.0, None).unwrap(),
            gallery::interior_jump_lsc(&base, 2.0, 0.5).unwrap(),
            gallery::interior_jump_usc(&base, 2.0, 0.5).unwrap(),
            gallery::countable_jumps(&base, 2.0).unwrap(),
        ] {
            let worst = grid_oracle_1d(&f, 2.0, 1e-2).unwrap();
            assert!(worst <= 0.0, "{}: worst {worst}", f.label());
        }
    }

    #[test]
    fn radial_slices_of_multivariable_constructions_pass_the_grid() {
        use crate::gallery::{ClosureSide, SpherePartitionPredicate};
        let e1 = Point::from_slice(&[1.0, 0.0]).unwrap();
        let slices = [
            gallery::radial_jump_quadratic(2, 0.5, 1.0, ClosureSide::LowerClosed).unwrap(),
            gallery::radial_jump_quadratic(2, 0.5, 1.0, ClosureSide::UpperClosed).unwrap(),
            gallery::radial_split(2, 0.5, 1.0, SpherePartitionPredicate::FirstCoordLsbParity)
                .unwrap(),
            gallery::boundary_perturbation(2, SpherePartitionPredicate::FirstCoordLsbParity, 1.0)
                .unwrap(),
        ];
        for f in &slices {
            let slice = gallery::line_slice(f, &e1, 1.0).unwrap();
            let worst = grid_oracle_1d(&slice, 2.0, 1e-3).unwrap();
            // antipodal grid pairs attain equality exactly, so the raw
            // margin carries a few ulps of rounding
            assert!(worst <= 1e-12, "{}: worst {worst}", slice.label());
        }
        // the slice of a non-SQC fixture still shows violations
        let neg = gallery::negated_quadratic(2).unwrap();
        let slice = gallery::line_slice(&neg, &e1, 1.0).unwrap();
        assert!(grid_oracle_1d(&slice, 2.0, 1e-3).unwrap() > 0.0);
    }

    #[test]
    fn slice_inherits_crossing_records() {
        use crate::gallery::{ClosureSide, Locus, SemicontinuityClass};
        let f = gallery::radial_jump_quadratic(2, 0.5, 1.0, ClosureSide::LowerClosed).unwrap();
        let slice = gallery::line_slice(&f, &Point::from_slice(&[0.0, 2.0]).unwrap(), 1.0).unwrap();
        assert_eq!(slice.discontinuities().len(), 2);
        for rec in slice.discontinuities() {
            assert_eq!(rec.classification, SemicontinuityClass::LscNotUsc);
            match &rec.locus {
                Locus::SinglePoint { point } => assert!((point[0].abs() - 0.5).abs() < 1e-9),
                other => panic!("expected point locus, got {other:?}"),
            }
        }
        // and the point drop projects onto the slice origin
        let quad = gallery::quadratic_norm(2).unwrap();
        let drop = gallery::point_drop(&quad, 2.0, Point::origin(2), 1.0).unwrap();
        let slice =
            gallery::line_slice(&drop, &Point::from_slice(&[1.0, 0.0]).unwrap(), 2.0).unwrap();
        assert_eq!(slice.discontinuities().len(), 1);
        assert_eq!(
            slice.evaluate(&Point::from_slice(&[0.0]).unwrap()),
            crate::core::ExtendedReal::Finite(-1.0)
        );
    }

    #[test]
    fn max_root_radial_slice_admits_a_positive_modulus() {
        // A 1-D slice through the origin; the flattest configurations sit
        // where the root branch hands over to the shifted quadratic, and the
        // ratio there stays above 0.2.
        let slice = gallery::restrict(
            &gallery::max_root_quadratic(1, 1).unwrap(),
            ConvexDomain::interval(-3.0, 3.0).unwrap(),
        )
        .unwrap();
        let worst = grid_oracle_1d(&slice, 0.2, 6e-3).unwrap();
        assert!(worst <= 0.0, "worst margin {worst}");
        // and a generous modulus must fail
        let worst = grid_oracle_1d(&slice, 2.0, 6e-3).unwrap();
        assert!(worst > 0.0);
    }

    #[test]
    fn constant_fixture_fails_the_grid() {
        let c = gallery::constant(ConvexDomain::interval(0.0, 1.0).unwrap(), 5.0).unwrap();
        let worst = grid_oracle_1d(&c, 2.0, 1e-2).unwrap();
        assert!(worst > 0.0);
    }

    #[test]
    fn oversized_grids_are_rejected() {
        let f = sq01();
        assert!(matches!(
            grid_oracle_1d(&f, 2.0, 1e-5),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn non_interval_domains_are_rejected() {
        let f = gallery::quadratic_norm(2).unwrap();
        assert!(matches!(
            grid_oracle_1d(&f, 2.0, 1e-2),
            Err(Error::IntervalDomainRequired { .. })
        ));
    }
}
