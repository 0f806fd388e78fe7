//! Translation from command-line flags to gallery constructions.

use anyhow::{anyhow, bail, Result};
use clap::Args;
use serde::Serialize;

use sqc_lab::gallery::{self, ClosureSide, SpherePartitionPredicate};
use sqc_lab::{ConvexDomain, LinearMap, Point, SqcFunction};

/// Flags selecting and parameterizing a gallery function.
#[derive(Debug, Clone, Args, Serialize)]
pub struct FunctionSpec {
    /// Gallery function name (see `list`)
    #[arg(long = "fn")]
    pub function: String,

    /// Dimension
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Shift parameter of max_root_quadratic
    #[arg(long, default_value_t = 1)]
    pub k: u32,

    /// Left interval endpoint
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,

    /// Right interval endpoint
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,

    /// Interior jump point
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub c: f64,

    /// Lift or drop size
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    /// Sphere radius of the radial constructions
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,

    /// Step size of the radial constructions
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,

    /// Radial closure: lower (lsc) or upper (usc)
    #[arg(long, default_value = "lower")]
    pub variant: String,

    /// Half-width of the restriction box
    #[arg(long = "half-width", default_value_t = 2.0)]
    pub half_width: f64,

    /// Inner function of affine_pullback
    #[arg(long, default_value = "quadratic_norm")]
    pub inner: String,

    /// Matrix rows for affine_pullback, e.g. "2 0;0 2"
    #[arg(long = "A", alias = "matrix", allow_hyphen_values = true)]
    pub matrix: Option<String>,

    /// Translation for affine_pullback, e.g. "5 0"
    #[arg(long, allow_hyphen_values = true)]
    pub offset: Option<String>,

    /// Base modulus for the interval constructions
    #[arg(long = "base-gamma", default_value_t = 2.0)]
    pub base_gamma: f64,
}

impl FunctionSpec {
    pub fn build(&self) -> Result<SqcFunction> {
        build_named(&self.function, self)
    }
}

fn closure_side(variant: &str) -> Result<ClosureSide> {
    match variant {
        "lower" => Ok(ClosureSide::LowerClosed),
        "upper" => Ok(ClosureSide::UpperClosed),
        other => bail!("unknown variant `{other}` (expected lower or upper)"),
    }
}

fn square_on_interval(a: f64, b: f64) -> Result<SqcFunction> {
    let base = gallery::quadratic_norm(1)?;
    Ok(gallery::restrict(&base, ConvexDomain::interval(a, b)?)?)
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| anyhow!("bad matrix entry `{tok}`"))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        bail!("matrix must be square; got `{text}`");
    }
    Ok(rows)
}

pub fn parse_point(text: &str, dim: usize) -> Result<Point> {
    let coords: Vec<f64> = text
        .split([',', ' '])
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| anyhow!("bad coordinate `{tok}`"))
        })
        .collect::<Result<_>>()?;
    if coords.len() != dim {
        bail!("expected {dim} coordinates, got {}", coords.len());
    }
    Ok(Point::new(coords)?)
}

fn build_named(name: &str, spec: &FunctionSpec) -> Result<SqcFunction> {
    let f = match name {
        "quadratic_norm" => gallery::quadratic_norm(spec.n)?,
        "max_root_quadratic" => gallery::max_root_quadratic(spec.n, spec.k)?,
        "endpoint_jump" => {
            let base = square_on_interval(spec.a, spec.b)?;
            gallery::endpoint_jump(&base, spec.base_gamma, None)?
        }
        "interior_jump_lsc" => {
            let base = square_on_interval(spec.a, spec.b)?;
            gallery::interior_jump_lsc(&base, spec.base_gamma, spec.c)?
        }
        "interior_jump_usc" => {
            let base = square_on_interval(spec.a, spec.b)?;
            gallery::interior_jump_usc(&base, spec.base_gamma, spec.c)?
        }
        "countable_jumps" => {
            let base = square_on_interval(0.0, 1.0)?;
            gallery::countable_jumps(&base, spec.base_gamma)?
        }
        "boundary_perturbation" => gallery::boundary_perturbation(
            spec.n,
            SpherePartitionPredicate::FirstCoordLsbParity,
            spec.alpha,
        )?,
        "point_drop" => {
            let base = gallery::quadratic_norm(spec.n)?;
            gallery::point_drop(&base, 2.0, Point::origin(spec.n), spec.alpha)?
        }
        "radial_jump" => gallery::radial_jump_quadratic(
            spec.n,
            spec.rho,
            spec.beta,
            closure_side(&spec.variant)?,
        )?,
        "radial_split" => gallery::radial_split(
            spec.n,
            spec.rho,
            spec.beta,
            SpherePartitionPredicate::FirstCoordLsbParity,
        )?,
        "restricted_radial_jump" => {
            let inner = gallery::radial_jump_quadratic(
                spec.n,
                spec.rho,
                spec.beta,
                closure_side(&spec.variant)?,
            )?;
            gallery::restrict(&inner, centered_box(spec.n, spec.half_width)?)?
        }
        "restricted_radial_split" => {
            let inner = gallery::radial_split(
                spec.n,
                spec.rho,
                spec.beta,
                SpherePartitionPredicate::FirstCoordLsbParity,
            )?;
            gallery::restrict(&inner, centered_box(spec.n, spec.half_width)?)?
        }
        "affine_pullback" => {
            if spec.inner == "affine_pullback" {
                bail!("affine_pullback cannot nest itself");
            }
            let inner = build_named(&spec.inner, spec)?;
            let dim = inner.domain().dimension();
            let rows = match &spec.matrix {
                Some(text) => parse_matrix(text)?,
                None => (0..dim)
                    .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect(),
            };
            if rows.len() != dim {
                bail!(
                    "matrix is {}x{} but the inner function lives in dimension {dim}",
                    rows.len(),
                    rows.len()
                );
            }
            let offset = match &spec.offset {
                Some(text) => parse_point(text, dim)?,
                None => Point::origin(dim),
            };
            gallery::affine_pullback(&inner, LinearMap::new(&rows, offset)?)?
        }
        "constant5" => gallery::constant(ConvexDomain::full_space(spec.n)?, 5.0)?,
        "neg_quadratic" => gallery::negated_quadratic(spec.n)?,
        other => bail!("unknown gallery function `{other}`; run `sqc-lab list` for the catalogue"),
    };
    Ok(f)
}

fn centered_box(n: usize, half_width: f64) -> Result<ConvexDomain> {
    if !(half_width > 0.0) {
        bail!("half-width must be positive, got {half_width}");
    }
    let lo = Point::new(vec![-half_width; n])?;
    let hi = Point::new(vec![half_width; n])?;
    Ok(ConvexDomain::axis_box(lo, hi)?)
}
