//! Semicontinuity probing: estimates one-sided limits at a point from
//! function values on shrinking shells and classifies the point.

use serde::Serialize;

use crate::core::{ExtendedReal, Point, RngSeed};
use crate::error::Error;
use crate::gallery::{SemicontinuityClass, SqcFunction};
use crate::geometry::unit_direction;

/// Outcome of a probe at one point.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuityProbeResult {
    pub point: Point,
    pub f_value: ExtendedReal,
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub radii_used: Vec<f64>,
    pub samples_per_shell: usize,
    pub classification: SemicontinuityClass,
}

/// The default geometric radius schedule, 1e-1 down to 1e-6.
pub fn default_radii() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

/// Probes semicontinuity of `f` at `p`.
///
/// The same direction set is reused on every shell, and the limit estimates
/// come from linear extrapolation of the per-shell extrema of the two
/// innermost nonempty shells down to radius zero. Reusing directions makes
/// the smooth part of the variation cancel in the extrapolation, so a
/// gradient of order one does not masquerade as a semicontinuity gap.
///
/// Classification, with `tau = 1e-6 * max(1, |f(p)|)`:
/// continuous when both estimates are within `tau` of `f(p)`; a one-sided
/// gap needs to exceed `10 tau` to count, the other side staying within
/// `tau`; gaps on both sides mean neither; anything in between (or shells
/// with no domain points at all) is inconclusive.
pub fn continuity_probe(
    f: &SqcFunction,
    p: &Point,
    radii: &[f64],
    samples_per_shell: usize,
    seed: RngSeed,
) -> Result<ContinuityProbeResult, Error> {
    let fp = match f.evaluate(p) {
        ExtendedReal::Finite(v) => v,
        ExtendedReal::Infinity => return Err(Error::PointOutsideDomain),
    };
    if radii.is_empty() || radii.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidParameter {
            name: "radii",
            reason: "need a strictly decreasing, nonempty schedule".into(),
        });
    }
    if samples_per_shell == 0 {
        return Err(Error::InvalidParameter {
            name: "samples_per_shell",
            reason: "need at least one sample per shell".into(),
        });
    }
    let dim = p.dim();
    let mut rng = seed.rng();
    let directions: Vec<Point> = if dim == 1 {
        vec![
            Point::new_unchecked(vec![-1.0]),
            Point::new_unchecked(vec![1.0]),
        ]
    } else {
        (0..samples_per_shell)
            .map(|_| unit_direction(dim, &mut rng))
            .collect()
    };

    // (radius, shell min, shell max) for shells that meet the domain.
    let mut shells: Vec<(f64, f64, f64)> = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut seen = false;
        for d in &directions {
            let x = Point::new_unchecked(
                p.coords()
                    .iter()
                    .zip(d.coords())
                    .map(|(c, dc)| c + r * dc)
                    .collect(),
            );
            if let ExtendedReal::Finite(v) = f.evaluate(&x) {
                lo = lo.min(v);
                hi = hi.max(v);
                seen = true;
            }
        }
        if seen {
            shells.push((r, lo, hi));
        }
    }

    let (liminf_est, limsup_est, conclusive) = match shells.len() {
        0 => (fp, fp, false),
        1 => {
            let (_, lo, hi) = shells[0];
            (lo, hi, true)
        }
        _ => {
            // Two innermost shells; radii are decreasing so these are last.
            let (r1, lo1, hi1) = shells[shells.len() - 2];
            let (r2, lo2, hi2) = shells[shells.len() - 1];
            let extrapolate = |v1: f64, v2: f64| v2 + (v2 - v1) * r2 / (r1 - r2);
            let mut lo = extrapolate(lo1, lo2);
            let mut hi = extrapolate(hi1, hi2);
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            (lo, hi, true)
        }
    };

    let tau = 1e-6 * fp.abs().max(1.0);
    let below = fp - liminf_est;
    let above = limsup_est - fp;
    let classification = if !conclusive {
        SemicontinuityClass::Inconclusive
    } else if below.abs() <= tau && above.abs() <= tau {
        SemicontinuityClass::Continuous
    } else if below <= tau && above > 10.0 * tau {
        SemicontinuityClass::LscNotUsc
    } else if above <= tau && below > 10.0 * tau {
        SemicontinuityClass::UscNotLsc
    } else if below > 10.0 * tau && above > 10.0 * tau {
        SemicontinuityClass::Neither
    } else {
        SemicontinuityClass::Inconclusive
    };

    Ok(ContinuityProbeResult {
        point: p.clone(),
        f_value: ExtendedReal::Finite(fp),
        liminf_est,
        limsup_est,
        radii_used: radii.to_vec(),
        samples_per_shell: directions.len(),
        classification,
    })
}

/// Observed value spread near a locus point: the max minus min of `f` over a
/// ball of radius `delta` around `p`, including points of the locus itself.
/// For a declared jump this converges to the gap as `delta` shrinks.
pub fn jump_spread(
    f: &SqcFunction,
    record: &crate::gallery::DiscontinuityRecord,
    p: &Point,
    delta: f64,
    samples: usize,
    seed: RngSeed,
) -> f64 {
    let mut rng = seed.rng();
    let dim = p.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut absorb = |v: ExtendedReal| {
        if let ExtendedReal::Finite(w) = v {
            lo = lo.min(w);
            hi = hi.max(w);
        }
    };
    absorb(f.evaluate(p));
    // Ball samples around p.
    use rand::Rng;
    for _ in 0..samples {
        let d = unit_direction(dim, &mut rng);
        let r = delta * rng.random_range(0.0..1.0f64).powf(1.0 / dim as f64);
        let x = Point::new_unchecked(
            p.coords()
                .iter()
                .zip(d.coords())
                .map(|(c, dc)| c + r * dc)
                .collect(),
        );
        absorb(f.evaluate(&x));
    }
    // Locus points near p, so that splits of a sphere or boundary show both
    // branch values inside the window.
    for q in f.locus_points(record, samples.min(64), &mut rng) {
        let dist = crate::core::squared_distance(&q, p)
            .map(f64::sqrt)
            .unwrap_or(f64::INFINITY);
        if dist <= delta {
            absorb(f.evaluate(&q));
        }
    }
    if hi < lo {
        0.0
    } else {
        hi - lo
    }
}
