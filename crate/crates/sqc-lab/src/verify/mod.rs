//! Numerical verification: the defining-inequality check over sampled
//! triples, modulus estimation, semicontinuity probing, minimizer search,
//! coercivity probing, and an exhaustive 1-D oracle.

mod oracle;
mod probe;
mod search;

use std::time::Instant;

use serde::Serialize;

use crate::core::{
    convex_combination, serialize_margin, sqc_rhs, squared_distance, ExtendedReal, Point, RngSeed,
    Tolerance,
};
use crate::error::Error;
use crate::gallery::{Locus, SqcFunction};
use crate::geometry::{sample_triples, StressSet, TripleSample};

pub use oracle::grid_oracle_1d;
pub use probe::{continuity_probe, default_radii, jump_spread, ContinuityProbeResult};
pub use search::{supercoercivity_probe, unique_min_check, MinCluster};

/// Configuration of a verification or estimation run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub count: usize,
    pub stress_sets: Vec<StressSet>,
    pub tolerance: Tolerance,
    pub seed: RngSeed,
    /// Worker threads for triple evaluation; 0 uses the rayon default.
    pub threads: usize,
}

impl VerifyConfig {
    pub fn new(count: usize, seed: RngSeed) -> Self {
        VerifyConfig {
            count,
            stress_sets: vec![],
            tolerance: Tolerance::default(),
            seed,
            threads: 0,
        }
    }

    pub fn with_stress_sets(mut self, stress_sets: Vec<StressSet>) -> Self {
        self.stress_sets = stress_sets;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// Stress sets targeting the declared discontinuity loci of `f`.
pub fn stress_sets_for(f: &SqcFunction) -> Vec<StressSet> {
    let mut sets = Vec::new();
    for rec in f.discontinuities() {
        match &rec.locus {
            Locus::SinglePoint { point } => sets.push(StressSet::Point {
                point: point.clone(),
            }),
            Locus::IntervalEndpoints { a, b, .. } => {
                sets.push(StressSet::Point {
                    point: Point::new_unchecked(vec![*a]),
                });
                sets.push(StressSet::Point {
                    point: Point::new_unchecked(vec![*b]),
                });
            }
            Locus::CountableSet { points, .. } => {
                for p in points.iter().take(5) {
                    sets.push(StressSet::Point { point: p.clone() });
                }
            }
            Locus::Sphere { radius, .. } => {
                if !sets
                    .iter()
                    .any(|s| matches!(s, StressSet::Sphere { radius: r } if r == radius))
                {
                    sets.push(StressSet::Sphere { radius: *radius });
                }
            }
            Locus::BoundarySubset { .. } => {
                if !sets.iter().any(|s| matches!(s, StressSet::Boundary)) {
                    sets.push(StressSet::Boundary);
                }
            }
            Locus::Mapped { .. } => {
                for p in rec.witnesses.iter().take(5) {
                    sets.push(StressSet::Point { point: p.clone() });
                }
            }
        }
    }
    sets
}

/// A recorded failure of the defining inequality on one triple.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub index: usize,
    pub triple: TripleSample,
    pub lhs: ExtendedReal,
    pub rhs: ExtendedReal,
    /// `lhs - rhs`; infinite when the combination point evaluates to
    /// infinity between finite endpoints.
    #[serde(serialize_with = "serialize_margin")]
    pub margin: f64,
}

/// Result of the modulus estimator: the infimum of the sampled ratios
/// `2 (max(f(x), f(y)) - f(z_t)) / ((1-t) t ||x-y||^2)`.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusEstimate {
    pub gamma_hat: f64,
    pub argmin_triple: TripleSample,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Aggregate outcome of a verification run. Serializes to JSON with a stable
/// field order; two runs with the same seed and configuration produce
/// byte-identical documents apart from `wall_time_ms`.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub label: String,
    pub gamma: f64,
    pub config: VerifyConfig,
    pub total_triples: usize,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    #[serde(serialize_with = "serialize_margin")]
    pub worst_margin: f64,
    pub modulus_estimate: Option<ModulusEstimate>,
    pub probes: Vec<ContinuityProbeResult>,
    pub wall_time_ms: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the wall time zeroed, for byte-level comparisons.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_time_ms = 0.0;
        serde_json::to_string_pretty(&clone).expect("report serializes")
    }

    /// CSV rows, one per violation. UTF-8, LF line endings.
    pub fn violations_csv(&self) -> String {
        let mut out = String::from("index,t,x,y,lhs,rhs,margin\n");
        for v in &self.violations {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                v.index,
                v.triple.t,
                join_coords(&v.triple.x),
                join_coords(&v.triple.y),
                v.lhs,
                v.rhs,
                if v.margin.is_finite() {
                    format!("{}", v.margin)
                } else {
                    "inf".to_string()
                },
            ));
        }
        out
    }

    /// CSV rows, one per probe.
    pub fn probes_csv(&self) -> String {
        let mut out = String::from("point,f_value,liminf_est,limsup_est,classification\n");
        for p in &self.probes {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                join_coords(&p.point),
                p.f_value,
                p.liminf_est,
                p.limsup_est,
                p.classification,
            ));
        }
        out
    }
}

fn join_coords(p: &Point) -> String {
    p.coords()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

struct TripleOutcome {
    lhs: ExtendedReal,
    rhs: ExtendedReal,
    /// `lhs - rhs`, with infinities collapsed onto the f64 axis.
    margin: f64,
    violating: bool,
}

fn check_triple(f: &SqcFunction, gamma: f64, tol: &Tolerance, tr: &TripleSample) -> TripleOutcome {
    let fx = f.evaluate(&tr.x);
    let fy = f.evaluate(&tr.y);
    let sqd = squared_distance(&tr.x, &tr.y).expect("triple dims agree");
    let rhs = sqc_rhs(fx, fy, gamma, tr.t, sqd);
    let z = convex_combination(&tr.x, &tr.y, tr.t).expect("triple is valid");
    let lhs = f.evaluate(&z);
    match (lhs, rhs) {
        (ExtendedReal::Finite(l), ExtendedReal::Finite(r)) => TripleOutcome {
            lhs,
            rhs,
            margin: l - r,
            violating: l - r > tol.slack(r),
        },
        // A finite pair whose combination point escapes the domain
        // contradicts convexity of the domain: always a violation.
        (ExtendedReal::Infinity, ExtendedReal::Finite(_)) => TripleOutcome {
            lhs,
            rhs,
            margin: f64::INFINITY,
            violating: true,
        },
        // An endpoint outside the domain puts no constraint on the triple.
        (_, ExtendedReal::Infinity) => TripleOutcome {
            lhs,
            rhs,
            margin: f64::NEG_INFINITY,
            violating: false,
        },
    }
}

const BATCH: usize = 8_192;

fn run_batched<T: Send>(
    f: &SqcFunction,
    config: &VerifyConfig,
    per_triple: impl Fn(&TripleSample) -> T + Sync,
    mut fold: impl FnMut(usize, TripleSample, T),
) -> Result<(), Error> {
    let mut stream = sample_triples(
        f.domain(),
        config.count,
        &config.stress_sets,
        config.tolerance.min_pair_distance,
        config.seed,
    )?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "threads",
            reason: e.to_string(),
        })?;
    let mut index = 0usize;
    loop {
        let batch: Vec<TripleSample> = stream.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            break;
        }
        // Evaluation is pure; results are merged in stream order, so the
        // outcome does not depend on the worker count.
        let results: Vec<T> = pool.install(|| {
            use rayon::prelude::*;
            batch.par_iter().map(&per_triple).collect()
        });
        for (tr, out) in batch.into_iter().zip(results) {
            fold(index, tr, out);
            index += 1;
        }
    }
    Ok(())
}

/// Checks the defining inequality at modulus `gamma` on `config.count`
/// sampled triples and reports every violation together with the worst
/// observed margin.
pub fn sqc_check(
    f: &SqcFunction,
    gamma: f64,
    config: &VerifyConfig,
) -> Result<VerificationReport, Error> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be positive".into(),
        });
    }
    let started = Instant::now();
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let tol = config.tolerance;
    run_batched(
        f,
        config,
        |tr| check_triple(f, gamma, &tol, tr),
        |index, triple, out| {
            if out.margin > worst {
                worst = out.margin;
            }
            if out.violating {
                violations.push(Violation {
                    index,
                    triple,
                    lhs: out.lhs,
                    rhs: out.rhs,
                    margin: out.margin,
                });
            }
        },
    )?;
    Ok(VerificationReport {
        schema: 1,
        label: f.label().to_string(),
        gamma,
        config: config.clone(),
        total_triples: config.count,
        violation_count: violations.len(),
        violations,
        worst_margin: worst,
        modulus_estimate: None,
        probes: vec![],
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Ratio denominators below `1e-7 * max(1, |values|)` are skipped: at that
/// size the rounding of the numerator would dominate the quotient.
const RATIO_FLOOR: f64 = 1e-7;

/// Estimates the largest admissible modulus as the infimum of the sampled
/// ratios. Returns the achieving triple and the skip statistics.
pub fn modulus_estimate(f: &SqcFunction, config: &VerifyConfig) -> Result<ModulusEstimate, Error> {
    let mut best: Option<(f64, TripleSample)> = None;
    let mut used = 0usize;
    let mut skipped = 0usize;
    run_batched(
        f,
        config,
        |tr| {
            let fx = f.evaluate(&tr.x);
            let fy = f.evaluate(&tr.y);
            let sqd = squared_distance(&tr.x, &tr.y).expect("triple dims agree");
            let z = convex_combination(&tr.x, &tr.y, tr.t).expect("triple is valid");
            let fz = f.evaluate(&z);
            match (fx, fy, fz) {
                (ExtendedReal::Finite(a), ExtendedReal::Finite(b), ExtendedReal::Finite(c)) => {
                    let denom = (1.0 - tr.t) * tr.t * sqd;
                    let scale = a.abs().max(b.abs()).max(c.abs()).max(1.0);
                    if denom < RATIO_FLOOR * scale {
                        None
                    } else {
                        Some(2.0 * (a.max(b) - c) / denom)
                    }
                }
                _ => None,
            }
        },
        |_, triple, ratio| match ratio {
            Some(r) => {
                used += 1;
                if best.as_ref().map(|(b, _)| r < *b).unwrap_or(true) {
                    best = Some((r, triple));
                }
            }
            None => skipped += 1,
        },
    )?;
    let (gamma_hat, argmin_triple) = best.ok_or(Error::AllSamplesSkipped)?;
    Ok(ModulusEstimate {
        gamma_hat,
        argmin_triple,
        samples_used: used,
        samples_skipped: skipped,
    })
}
