//! Constructions on a bounded interval: endpoint lifts, a single interior
//! drop (closed on either side), and a countable staircase of jumps.

use std::sync::Arc;

use crate::core::{ExtendedReal, Point};
use crate::error::Error;
use crate::gallery::{
    DiscontinuityRecord, Locus, SemicontinuityClass, SqcFunction, SPOT_CHECK_SEED,
};
use crate::geometry::ConvexDomain;

fn interval_bounds(f0: &SqcFunction, name: &'static str) -> Result<(f64, f64), Error> {
    match f0.domain() {
        ConvexDomain::Interval { a, b } => Ok((*a, *b)),
        _ => Err(Error::IntervalDomainRequired { name }),
    }
}

fn eval_scalar(f0: &SqcFunction, x: f64) -> f64 {
    f0.evaluate(&Point::new_unchecked(vec![x])).as_f64()
}

/// Spot check that `f0` is strictly increasing: 10^3 ordered pairs.
fn check_increasing(f0: &SqcFunction, a: f64, b: f64) -> Result<(), Error> {
    use rand::Rng;
    let mut rng = SPOT_CHECK_SEED.rng();
    for _ in 0..1_000 {
        let u: f64 = rng.random_range(a..b);
        let v: f64 = rng.random_range(a..b);
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        if hi - lo < 1e-12 {
            continue;
        }
        if eval_scalar(f0, hi) < eval_scalar(f0, lo) {
            return Err(Error::NotIncreasing { lo, hi });
        }
    }
    Ok(())
}

/// Maximum of a continuous function over `[a, b]`: 1001-node scan followed by
/// golden-section refinement of the bracketing cell down to width 1e-10.
fn scan_max(f0: &SqcFunction, a: f64, b: f64) -> f64 {
    const NODES: usize = 1_000;
    let h = (b - a) / NODES as f64;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=NODES {
        let x = if i == NODES { b } else { a + i as f64 * h };
        let v = eval_scalar(f0, x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = a + best_i.saturating_sub(1) as f64 * h;
    let mut hi = (a + (best_i + 1) as f64 * h).min(b);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = eval_scalar(f0, x1);
    let mut f2 = eval_scalar(f0, x2);
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = eval_scalar(f0, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = eval_scalar(f0, x1);
        }
    }
    best.max(f1)
        .max(f2)
        .max(eval_scalar(f0, a))
        .max(eval_scalar(f0, b))
}

/// Lifts a continuous SQC function on `[a, b]` to `M + 1` at both endpoints,
/// where `M` is its maximum over the interval. The result keeps the modulus
/// `gamma` and is discontinuous exactly at `a` and `b`.
///
/// `max_override`, when given, replaces the scanned maximum; it must not be
/// smaller than the scanned value.
pub fn endpoint_jump(
    f0: &SqcFunction,
    gamma: f64,
    max_override: Option<f64>,
) -> Result<SqcFunction, Error> {
    let (a, b) = interval_bounds(f0, "endpoint_jump")?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be positive".into(),
        });
    }
    let scanned = scan_max(f0, a, b);
    let m = match max_override {
        Some(user) => {
            if user < scanned {
                return Err(Error::InvalidParameter {
                    name: "max_override",
                    reason: format!("{user} is below the scanned maximum {scanned}"),
                });
            }
            user
        }
        None => scanned,
    };
    let lifted = m + 1.0;
    let jump_at_a = lifted - eval_scalar(f0, a);
    let jump_at_b = lifted - eval_scalar(f0, b);
    let inner = f0.clone();
    let record = DiscontinuityRecord {
        locus: Locus::IntervalEndpoints {
            a,
            b,
            jump_at_a,
            jump_at_b,
        },
        classification: SemicontinuityClass::UscNotLsc,
        jump_size: jump_at_a.min(jump_at_b),
        witnesses: vec![Point::new_unchecked(vec![a]), Point::new_unchecked(vec![b])],
    };
    Ok(SqcFunction::new(
        format!("endpoint_jump({}, gamma={gamma})", inner.label()),
        "endpoint_jump",
        ConvexDomain::interval(a, b)?,
        Some(gamma),
        vec![record],
        None,
        false,
        Arc::new(move |x: &Point| {
            let v = x[0];
            if v < a || v > b {
                (ExtendedReal::Infinity, "outside")
            } else if v == a || v == b {
                (ExtendedReal::Finite(lifted), "endpoint_lift")
            } else {
                (inner.evaluate(x), "base")
            }
        }),
    ))
}

fn interior_jump(
    f0: &SqcFunction,
    gamma: f64,
    c: f64,
    lower_closed: bool,
    name: &'static str,
) -> Result<SqcFunction, Error> {
    let (a, b) = interval_bounds(f0, name)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be positive".into(),
        });
    }
    if !(c > a && c < b) {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: format!("must lie in ({a}, {b}), got {c}"),
        });
    }
    check_increasing(f0, a, b)?;
    let inner = f0.clone();
    let classification = if lower_closed {
        // value at c sits on the low branch, below the right-hand limit
        SemicontinuityClass::LscNotUsc
    } else {
        SemicontinuityClass::UscNotLsc
    };
    let record = DiscontinuityRecord::point(Point::new_unchecked(vec![c]), classification, 1.0);
    Ok(SqcFunction::new(
        format!("{name}({}, gamma={gamma}, c={c})", inner.label()),
        name,
        ConvexDomain::interval(a, b)?,
        Some(gamma),
        vec![record],
        None,
        false,
        Arc::new(move |x: &Point| {
            let v = x[0];
            if v < a || v > b {
                return (ExtendedReal::Infinity, "outside");
            }
            let dropped = if lower_closed { v <= c } else { v < c };
            if dropped {
                match inner.evaluate(x) {
                    ExtendedReal::Finite(w) => (ExtendedReal::Finite(w - 1.0), "dropped"),
                    ExtendedReal::Infinity => (ExtendedReal::Infinity, "outside"),
                }
            } else {
                (inner.evaluate(x), "base")
            }
        }),
    ))
}

/// Drops a strictly increasing SQC function by 1 on `[a, c]`. Lower
/// semicontinuous everywhere, discontinuous at `c`.
pub fn interior_jump_lsc(f0: &SqcFunction, gamma: f64, c: f64) -> Result<SqcFunction, Error> {
    interior_jump(f0, gamma, c, true, "interior_jump_lsc")
}

/// Drops a strictly increasing SQC function by 1 on `[a, c)`. Upper
/// semicontinuous everywhere, discontinuous at `c`.
pub fn interior_jump_usc(f0: &SqcFunction, gamma: f64, c: f64) -> Result<SqcFunction, Error> {
    interior_jump(f0, gamma, c, false, "interior_jump_usc")
}

/// How many staircase points are materialized as metadata witnesses.
const COUNTABLE_WITNESSES: usize = 8;

/// The staircase: `f0(x) - 1 + 2^(1-k)` on `(1/(k+1), 1/k]` and `f0(0) - 1`
/// at zero, for a strictly increasing SQC `f0` on `[0, 1]`.
///
/// The value and the right-hand limit disagree at `1/k` for `k >= 2`, with
/// gap `2^(1-k)`; at `x = 1` the would-be jump lies outside the domain, so
/// relative to `[0, 1]` the function is continuous there. The declared locus
/// therefore starts at `1/2`.
pub fn countable_jumps(f0: &SqcFunction, gamma: f64) -> Result<SqcFunction, Error> {
    let (a, b) = interval_bounds(f0, "countable_jumps")?;
    if a != 0.0 || b != 1.0 {
        return Err(Error::InvalidParameter {
            name: "f0",
            reason: format!("domain must be [0, 1], got [{a}, {b}]"),
        });
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be positive".into(),
        });
    }
    check_increasing(f0, a, b)?;
    let inner = f0.clone();
    let points: Vec<Point> = (2..2 + COUNTABLE_WITNESSES)
        .map(|m| Point::new_unchecked(vec![1.0 / m as f64]))
        .collect();
    let jumps: Vec<f64> = (2..2 + COUNTABLE_WITNESSES)
        .map(|m| (1.0 - m as f64).exp2())
        .collect();
    let min_jump = *jumps.last().unwrap();
    let record = DiscontinuityRecord {
        locus: Locus::CountableSet {
            description: "reciprocals 1/k, k >= 2".into(),
            points: points.clone(),
            jumps,
        },
        classification: SemicontinuityClass::LscNotUsc,
        jump_size: min_jump,
        witnesses: points,
    };
    Ok(SqcFunction::new(
        format!("countable_jumps({}, gamma={gamma})", inner.label()),
        "countable_jumps",
        ConvexDomain::interval(0.0, 1.0)?,
        Some(gamma),
        vec![record],
        None,
        false,
        Arc::new(move |x: &Point| {
            let v = x[0];
            if !(0.0..=1.0).contains(&v) {
                return (ExtendedReal::Infinity, "outside");
            }
            let base = match inner.evaluate(x) {
                ExtendedReal::Finite(w) => w,
                ExtendedReal::Infinity => return (ExtendedReal::Infinity, "outside"),
            };
            if v == 0.0 {
                return (ExtendedReal::Finite(base - 1.0), "origin");
            }
            // x in (1/(k+1), 1/k] iff k = floor(1/x); exp2 underflows to 0
            // gracefully as k grows, matching the limit at 0.
            let k = (1.0 / v).floor();
            (ExtendedReal::Finite(base - 1.0 + (1.0 - k).exp2()), "stair")
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::quadratic_norm;

    fn sq_on(a: f64, b: f64) -> SqcFunction {
        // x^2 restricted to [a, b]
        let base = quadratic_norm(1).unwrap();
        crate::gallery::restrict(&base, ConvexDomain::interval(a, b).unwrap()).unwrap()
    }

    fn ev(f: &SqcFunction, x: f64) -> f64 {
        f.evaluate(&Point::new_unchecked(vec![x])).as_f64()
    }

    #[test]
    fn endpoint_jump_values() {
        let f = endpoint_jump(&sq_on(0.0, 1.0), 2.0, None).unwrap();
        // max of x^2 over [0,1] is 1, so both endpoints lift to 2
        assert_eq!(ev(&f, 0.0), 2.0);
        assert_eq!(ev(&f, 1.0), 2.0);
        assert_eq!(ev(&f, 0.5), 0.25);
        assert_eq!(ev(&f, 1.5), f64::INFINITY);
        // jump sizes: 2 - 0 at the left end, 2 - 1 at the right end
        match &f.discontinuities()[0].locus {
            Locus::IntervalEndpoints {
                jump_at_a,
                jump_at_b,
                ..
            } => {
                assert!((jump_at_a - 2.0).abs() < 1e-9);
                assert!((jump_at_b - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected locus {other:?}"),
        }
        assert!(f.discontinuities()[0].jump_size >= 1.0 - 1e-9);
    }

    #[test]
    fn endpoint_jump_inequality_at_midpoint() {
        let f = endpoint_jump(&sq_on(0.0, 1.0), 2.0, None).unwrap();
        // x = 0, y = 1, t = 0.5: lhs 0.25 vs rhs max(2,2) - 0.25 = 1.75
        let lhs = ev(&f, 0.5);
        let rhs = 2.0 - 0.5 * 2.0 * 0.25 * 1.0;
        assert!(lhs <= rhs);
        assert_eq!(rhs, 1.75);
    }

    #[test]
    fn endpoint_jump_override_must_dominate_scan() {
        let base = sq_on(0.0, 1.0);
        assert!(endpoint_jump(&base, 2.0, Some(0.5)).is_err());
        let f = endpoint_jump(&base, 2.0, Some(3.0)).unwrap();
        assert_eq!(ev(&f, 0.0), 4.0);
    }

    #[test]
    fn endpoint_jump_requires_interval() {
        let q = quadratic_norm(1).unwrap();
        assert!(matches!(
            endpoint_jump(&q, 2.0, None),
            Err(Error::IntervalDomainRequired { .. })
        ));
    }

    #[test]
    fn interior_jump_lsc_values() {
        let f = interior_jump_lsc(&sq_on(0.0, 1.0), 2.0, 0.5).unwrap();
        assert_eq!(ev(&f, 0.25), -0.9375);
        assert_eq!(ev(&f, 0.5), -0.75);
        assert_eq!(ev(&f, 0.75), 0.5625);
        assert_eq!(ev(&f, 1.0), 1.0);
    }

    #[test]
    fn interior_jump_usc_values() {
        let f = interior_jump_usc(&sq_on(0.0, 1.0), 2.0, 0.5).unwrap();
        assert_eq!(ev(&f, 0.5), 0.25);
        assert_eq!(ev(&f, 0.499), 0.499f64 * 0.499 - 1.0);
        assert_eq!(ev(&f, 0.0), -1.0);
    }

    #[test]
    fn interior_jump_rejects_decreasing_base() {
        // -x^2 is decreasing on [0, 1]
        let neg = crate::gallery::restrict(
            &crate::gallery::negated_quadratic(1).unwrap(),
            ConvexDomain::interval(0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            interior_jump_lsc(&neg, 2.0, 0.5),
            Err(Error::NotIncreasing { .. })
        ));
    }

    #[test]
    fn countable_jumps_values() {
        let f = countable_jumps(&sq_on(0.0, 1.0), 2.0).unwrap();
        // k = 1 branch at x = 1
        assert_eq!(ev(&f, 1.0), 1.0);
        // 0.4 lies in (1/3, 1/2], the k = 2 branch
        assert!((ev(&f, 0.4) - (-0.34)).abs() < 1e-15);
        assert_eq!(ev(&f, 0.0), -1.0);
        // right-hand gap at 1/2: branch constant steps from 2^-1 to 2^0
        let left = ev(&f, 0.5);
        let right = ev(&f, 0.5 + 1e-9);
        assert!((right - left - 0.5).abs() < 1e-6);
    }

    #[test]
    fn countable_jumps_declares_reciprocal_locus() {
        let f = countable_jumps(&sq_on(0.0, 1.0), 2.0).unwrap();
        let rec = &f.discontinuities()[0];
        match &rec.locus {
            Locus::CountableSet { points, jumps, .. } => {
                assert_eq!(points[0][0], 0.5);
                assert_eq!(jumps[0], 0.5);
                assert_eq!(points[1][0], 1.0 / 3.0);
                assert_eq!(jumps[1], 0.25);
            }
            other => panic!("unexpected locus {other:?}"),
        }
        assert_eq!(rec.jump_at(&Point::new_unchecked(vec![0.25])), 0.125);
    }
}
