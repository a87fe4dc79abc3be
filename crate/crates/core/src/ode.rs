//! Residual checks of the governing ODEs for a uniform base distribution.
//!
//! With `F(x) = x` each functional is a closed-form function of `F`:
//!
//! - Type-I `rho(F) = 24/(pi e) sin(pi F) mu(F)` solves
//!   `rho'' + 2 L rho' + [pi^2 - 1/(F(1-F)) + L^2] rho = 0`
//! - Type-II `tau(F) = e/pi sin(pi F) / mu(F)` solves
//!   `tau'' - 2 L tau' + [pi^2 + 1/(F(1-F)) + L^2] tau = 0`
//! - Type-III `nu(F) = 2 sin^2(pi F)` solves `nu''' + 4 pi^2 nu' = 0`
//!
//! where `mu(F) = F^F (1-F)^(1-F)`, `L = ln((1-F)/F)` and primes are
//! derivatives with respect to `F`.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::transform::{kernel, neg_bernoulli_entropy, TransformKind};

/// Probe point for the `F -> 0+` initial-condition limits.
pub const IC_PROBE: f64 = 1e-8;
/// Relative tolerance (absolute for zero targets) of the initial-condition checks.
pub const IC_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcCheck {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
}

impl IcCheck {
    fn new(name: &str, expected: f64, observed: f64) -> Self {
        Self { name: name.to_string(), expected, observed }
    }

    /// Relative error, or absolute error when the target is zero.
    pub fn error(&self) -> f64 {
        let diff = (self.observed - self.expected).abs();
        if self.expected == 0.0 {
            diff
        } else {
            diff / self.expected.abs()
        }
    }

    pub fn passes(&self) -> bool {
        self.error() <= IC_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualReport {
    pub kind: TransformKind,
    #[serde(skip)]
    pub grid: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    pub ic_checks: Vec<IcCheck>,
}

impl ResidualReport {
    fn new(kind: TransformKind, grid: &[f64], residuals: Vec<f64>, ic_checks: Vec<IcCheck>) -> Self {
        let max_abs_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        Self { kind, grid: grid.to_vec(), residuals, max_abs_residual, ic_checks }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report holds plain data")
    }
}

/// `count` equally spaced points covering `[lo, hi]`.
pub fn probability_sweep(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn check_open_unit(grid: &[f64]) -> Result<()> {
    match grid.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
        Some(bad) => Err(Error::Domain(format!("F must lie in (0, 1), got {bad}"))),
        None => Ok(()),
    }
}

/// Value and first two `F`-derivatives of a Type-I/II solution.
///
/// `sign = +1` gives `rho = C sin(pi F) mu`, `sign = -1` gives
/// `tau = C sin(pi F) / mu`. Writing `y = mu^sign v` with `v = C sin(pi F)`
/// and `(ln mu)' = -L`:
/// `y' = mu^sign (v' - sign L v)` and
/// `y'' = mu^sign (v'' - 2 sign L v' + L^2 v + sign v / (F(1-F)))`.
fn entropy_solution(sign: f64, scale: f64, f: f64) -> (f64, f64, f64) {
    let mu_pow = (sign * neg_bernoulli_entropy(f)).exp();
    let l = ((1.0 - f) / f).ln();
    let q = 1.0 / (f * (1.0 - f));
    let v = scale * (PI * f).sin();
    let dv = scale * PI * (PI * f).cos();
    let d2v = -PI * PI * v;
    let y = mu_pow * v;
    let dy = mu_pow * (dv - sign * l * v);
    let d2y = mu_pow * (d2v - 2.0 * sign * l * dv + l * l * v + sign * v * q);
    (y, dy, d2y)
}

fn type1_residual(f: f64, y: f64, dy: f64, d2y: f64) -> f64 {
    let l = ((1.0 - f) / f).ln();
    d2y + 2.0 * l * dy + (PI * PI - 1.0 / (f * (1.0 - f)) + l * l) * y
}

fn type2_residual(f: f64, y: f64, dy: f64, d2y: f64) -> f64 {
    let l = ((1.0 - f) / f).ln();
    d2y - 2.0 * l * dy + (PI * PI + 1.0 / (f * (1.0 - f)) + l * l) * y
}

const TYPE1_SCALE: f64 = 24.0 / (PI * E);
const TYPE2_SCALE: f64 = E / PI;

pub fn residual_type1(grid: &[f64]) -> Result<ResidualReport> {
    check_open_unit(grid)?;
    let residuals = grid
        .iter()
        .map(|&f| {
            let (y, dy, d2y) = entropy_solution(1.0, TYPE1_SCALE, f);
            type1_residual(f, y, dy, d2y)
        })
        .collect();
    let (y0, dy0, _) = entropy_solution(1.0, TYPE1_SCALE, IC_PROBE);
    let ics = vec![IcCheck::new("rho(0)", 0.0, y0), IcCheck::new("drho/dF(0)", 24.0 / E, dy0)];
    Ok(ResidualReport::new(TransformKind::TypeI, grid, residuals, ics))
}

pub fn residual_type2(grid: &[f64]) -> Result<ResidualReport> {
    check_open_unit(grid)?;
    let residuals = grid
        .iter()
        .map(|&f| {
            let (y, dy, d2y) = entropy_solution(-1.0, TYPE2_SCALE, f);
            type2_residual(f, y, dy, d2y)
        })
        .collect();
    let (y0, dy0, _) = entropy_solution(-1.0, TYPE2_SCALE, IC_PROBE);
    let ics = vec![IcCheck::new("tau(0)", 0.0, y0), IcCheck::new("dtau/dF(0)", E, dy0)];
    Ok(ResidualReport::new(TransformKind::TypeII, grid, residuals, ics))
}

fn phase_solution(f: f64) -> [f64; 4] {
    let s2 = (2.0 * PI * f).sin();
    let s = (PI * f).sin();
    [
        2.0 * s * s,
        2.0 * PI * s2,
        4.0 * PI * PI * (2.0 * PI * f).cos(),
        -8.0 * PI.powi(3) * s2,
    ]
}

pub fn residual_type3(grid: &[f64]) -> Result<ResidualReport> {
    check_open_unit(grid)?;
    let residuals = grid
        .iter()
        .map(|&f| {
            let [_, d1, _, d3] = phase_solution(f);
            d3 + 4.0 * PI * PI * d1
        })
        .collect();
    let [y0, d1, d2, _] = phase_solution(IC_PROBE);
    let ics = vec![
        IcCheck::new("nu(0)", 0.0, y0),
        IcCheck::new("dnu/dF(0)", 0.0, d1),
        IcCheck::new("d2nu/dF2(0)", 4.0 * PI * PI, d2),
    ];
    Ok(ResidualReport::new(TransformKind::TypeIII, grid, residuals, ics))
}

pub fn residual(kind: TransformKind, grid: &[f64]) -> Result<ResidualReport> {
    match kind {
        TransformKind::TypeI => residual_type1(grid),
        TransformKind::TypeII => residual_type2(grid),
        TransformKind::TypeIII => residual_type3(grid),
    }
}

/// Same residuals with the derivatives replaced by central differences of
/// step `h` applied to the kernel itself.
pub fn residual_finite_difference(kind: TransformKind, grid: &[f64], h: f64) -> Result<ResidualReport> {
    check_open_unit(grid)?;
    if grid.iter().any(|f| *f - 2.0 * h <= 0.0 || *f + 2.0 * h >= 1.0) {
        return Err(Error::Domain(format!("difference stencil of width {h} leaves (0, 1)")));
    }
    let y = |f: f64| kernel(kind, f);
    let residuals = grid
        .iter()
        .map(|&f| {
            let d1 = (y(f + h) - y(f - h)) / (2.0 * h);
            match kind {
                TransformKind::TypeI | TransformKind::TypeII => {
                    let d2 = (y(f + h) - 2.0 * y(f) + y(f - h)) / (h * h);
                    if kind == TransformKind::TypeI {
                        type1_residual(f, y(f), d1, d2)
                    } else {
                        type2_residual(f, y(f), d1, d2)
                    }
                }
                TransformKind::TypeIII => {
                    let d3 = (y(f + 2.0 * h) - 2.0 * y(f + h) + 2.0 * y(f - h) - y(f - 2.0 * h))
                        / (2.0 * h * h * h);
                    d3 + 4.0 * PI * PI * d1
                }
            }
        })
        .collect();
    Ok(ResidualReport::new(kind, grid, residuals, Vec::new()))
}
