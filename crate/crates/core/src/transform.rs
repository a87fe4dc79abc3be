//! The three derangetropy kernels and their action on grid densities.
//!
//! Every functional has the form `kernel(F(x)) * f(x)` where `F` is the CDF
//! of `f`:
//!
//! | Kind | Kernel `k(z)` | Peak `k(1/2)` |
//! |---|---|---|
//! | Type-I | `24/(pi e) sin(pi z) z^z (1-z)^(1-z)` | `12/(pi e)` |
//! | Type-II | `e/pi sin(pi z) / (z^z (1-z)^(1-z))` | `2e/pi` |
//! | Type-III | `2 sin^2(pi z)` | `2` |
//!
//! Each kernel integrates to one over `[0, 1]`, so the substitution
//! `z = F(x)` makes every transform a density again.

use std::f64::consts::{E, PI};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridCdf, GridDensity};
use crate::io::fmt_f64;

/// Which of the three functionals to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformKind {
    /// Entropy-attenuating: the kernel carries `exp(-H_B(F))`.
    #[serde(rename = "type1")]
    TypeI,
    /// Entropy-amplifying: the kernel carries `exp(+H_B(F))`.
    #[serde(rename = "type2")]
    TypeII,
    /// Phase-modulated: `2 sin^2(pi F)`.
    #[serde(rename = "type3")]
    TypeIII,
}

impl TransformKind {
    pub const ALL: [TransformKind; 3] = [TransformKind::TypeI, TransformKind::TypeII, TransformKind::TypeIII];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::TypeI => "type1",
            TransformKind::TypeII => "type2",
            TransformKind::TypeIII => "type3",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "type1" | "typei" | "i" | "1" => Ok(TransformKind::TypeI),
            "type2" | "typeii" | "ii" | "2" => Ok(TransformKind::TypeII),
            "type3" | "typeiii" | "iii" | "3" => Ok(TransformKind::TypeIII),
            _ => Err(Error::InvalidParameter(format!("unknown transform kind `{s}`"))),
        }
    }
}

#[inline]
fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `z ln z + (1-z) ln(1-z)` with `0 ln 0 = 0`; no domain check.
pub(crate) fn neg_bernoulli_entropy(z: f64) -> f64 {
    xlnx(z) + xlnx(1.0 - z)
}

/// Shannon entropy, in nats, of a coin with bias `p`.
pub fn bernoulli_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(-neg_bernoulli_entropy(p))
}

/// `ln((1-p)/p)` for `p` in `(0, 1)`.
pub fn log_odds(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("log-odds needs p in (0, 1), got {p}")));
    }
    Ok(((1.0 - p) / p).ln())
}

/// Multiplicative weight applied to `f` at a point of cumulative probability `z`.
///
/// Total on `[0, 1]` (`0^0 = 1`) and zero at both endpoints. Inputs outside
/// `[0, 1]` are clamped.
pub fn kernel(kind: TransformKind, z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    let s = (PI * z).sin();
    match kind {
        TransformKind::TypeI => 24.0 / (PI * E) * s * neg_bernoulli_entropy(z).exp(),
        TransformKind::TypeII => E / PI * s * (-neg_bernoulli_entropy(z)).exp(),
        TransformKind::TypeIII => 2.0 * s * s,
    }
}

/// `d/dz ln kernel(kind, z)` for `z` in `(0, 1)`.
pub fn kernel_log_slope(kind: TransformKind, z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("kernel log-slope needs z in (0, 1), got {z}")));
    }
    let cot = 1.0 / (PI * z).tan();
    // d/dz [z ln z + (1-z) ln(1-z)] = ln(z/(1-z))
    let entropy_slope = -log_odds(z)?;
    Ok(match kind {
        TransformKind::TypeI => PI * cot + entropy_slope,
        TransformKind::TypeII => PI * cot - entropy_slope,
        TransformKind::TypeIII => 2.0 * PI * cot,
    })
}

/// A transformed density together with its mass before renormalisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub density: GridDensity,
    pub raw_integral: f64,
}

impl Transformed {
    /// `|raw_integral - 1|`.
    pub fn integral_error(&self) -> f64 {
        (self.raw_integral - 1.0).abs()
    }
}

fn apply_kernel(kind: TransformKind, g: &GridDensity, cdf: &GridCdf) -> Result<GridDensity> {
    let values: Vec<f64> = g
        .values()
        .par_iter()
        .zip(cdf.values().par_iter())
        .map(|(f, z)| kernel(kind, *z) * f)
        .collect();
    g.with_values(values)
}

/// `kernel(F(x)) f(x)` on the grid of `g`, without renormalisation.
pub fn transform_unnormalized(kind: TransformKind, g: &GridDensity) -> Result<GridDensity> {
    apply_kernel(kind, g, &g.cdf())
}

/// Applies the functional and renormalises the result.
pub fn transform(kind: TransformKind, g: &GridDensity) -> Result<Transformed> {
    let raw = transform_unnormalized(kind, g)?;
    let raw_integral = raw.integrate();
    Ok(Transformed { density: raw.normalized()?, raw_integral })
}

/// `d/dx ln(transform(kind, g))(x)` from the chain rule:
/// `kernel_log_slope(F) * f + f'/f`.
///
/// `f` and `f'` come from the quadratic through the three nodes nearest to
/// `x`, `F` from the Hermite-interpolated grid CDF.
pub fn log_derivative(kind: TransformKind, g: &GridDensity, x: f64) -> Result<f64> {
    log_derivative_with(kind, g, &g.cdf(), x)
}

/// [`log_derivative`] with the CDF of `g` supplied by the caller.
pub fn log_derivative_with(kind: TransformKind, g: &GridDensity, cdf: &GridCdf, x: f64) -> Result<f64> {
    let n = g.len();
    let h = g.step();
    if !(x > g.lo() && x < g.hi()) {
        return Err(Error::Domain(format!("x={x} is not interior to [{}, {}]", g.lo(), g.hi())));
    }
    let i = (((x - g.lo()) / h).round() as usize).clamp(1, n - 2);
    let s = (x - g.x(i)) / h;
    let v = g.values();
    let (y0, y1, y2) = (v[i - 1], v[i], v[i + 1]);
    let f = 0.5 * y0 * s * (s - 1.0) + y1 * (1.0 - s * s) + 0.5 * y2 * s * (s + 1.0);
    let df = (y0 * (s - 0.5) - 2.0 * y1 * s + y2 * (s + 0.5)) / h;
    if !(f > 0.0) {
        return Err(Error::Domain(format!("density vanishes at x={x}")));
    }
    let z = cdf.at(x);
    let slope = kernel_log_slope(kind, z)
        .map_err(|_| Error::Domain(format!("CDF at x={x} is {z}, outside (0, 1)")))?;
    Ok(slope * f + df / f)
}

/// Per-step summary of an [`IterationTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepDiagnostics {
    pub step: usize,
    pub variance: f64,
    pub median: f64,
    pub mean: f64,
    pub integral_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub density: GridDensity,
    pub cdf: GridCdf,
    pub diagnostics: StepDiagnostics,
}

impl TraceStep {
    fn new(step: usize, density: GridDensity, integral_error: f64) -> Self {
        let cdf = density.cdf();
        let diagnostics = StepDiagnostics {
            step,
            variance: density.variance(),
            median: cdf.linear_crossing(0.5),
            mean: density.mean(),
            integral_error,
        };
        Self { density, cdf, diagnostics }
    }
}

/// Densities produced by repeatedly applying one functional.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub kind: TransformKind,
    pub steps: Vec<TraceStep>,
}

impl IterationTrace {
    pub fn diagnostics(&self) -> Vec<StepDiagnostics> {
        self.steps.iter().map(|s| s.diagnostics).collect()
    }

    pub fn last(&self) -> &TraceStep {
        self.steps.last().expect("a trace always holds the input step")
    }

    /// Long-format `step,x,f,F` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "step,x,f,F")?;
        for (k, st) in self.steps.iter().enumerate() {
            for (i, (f, c)) in st.density.values().iter().zip(st.cdf.values()).enumerate() {
                writeln!(w, "{k},{},{},{}", fmt_f64(st.density.x(i)), fmt_f64(*f), fmt_f64(*c))?;
            }
        }
        Ok(())
    }

    pub fn diagnostics_json(&self) -> String {
        serde_json::to_string_pretty(&self.diagnostics()).expect("diagnostics are plain numbers")
    }
}

/// Applies `kind` `n` times; step 0 is `g` itself and step `k` is the
/// renormalised transform of step `k - 1`.
pub fn iterate(kind: TransformKind, g: &GridDensity, n: usize) -> Result<IterationTrace> {
    if n == 0 {
        return Err(Error::Config("iteration count must be at least 1".into()));
    }
    let mut steps = Vec::with_capacity(n + 1);
    steps.push(TraceStep::new(0, g.clone(), (g.integrate() - 1.0).abs()));
    for k in 1..=n {
        let prev = &steps[k - 1];
        let raw = apply_kernel(kind, &prev.density, &prev.cdf)?;
        let raw_integral = raw.integrate();
        steps.push(TraceStep::new(k, raw.normalized()?, (raw_integral - 1.0).abs()));
    }
    Ok(IterationTrace { kind, steps })
}
