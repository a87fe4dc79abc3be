//! Characteristic functions of grid densities and the spectral view of the
//! Type-III functional.
//!
//! Because `2 sin^2(pi F) = 1 - cos(2 pi F)`, the characteristic function of
//! the Type-III transform splits as
//!
//! ```text
//! phi_nu(t) = phi_0(t) - (phi_F+(t) + phi_F-(t)) / 2,
//! phi_F±(t) = int exp(i t x ± i 2 pi F(x)) f(x) dx.
//! ```
//!
//! For the uniform law `F(x) = x`, so the modulated terms are plain shifts
//! `phi_0(t ± 2 pi)`, which defines the shift operator [`t_operator`].
//! Frequency grids therefore use steps `2 pi / D` for integer `D`: a shift
//! by `2 pi` is exactly `D` samples.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, GridDensity};
use crate::io::fmt_f64;
use crate::pushforward::Pushforward;
use crate::transform::{transform_unnormalized, TransformKind};

pub const DEFAULT_STEP_DIVISOR: usize = 64;
pub const DEFAULT_TMAX: f64 = 64.0 * PI;
/// Frequencies sampled on `[0, tmax]` when measuring the distance to the
/// standard normal characteristic function.
pub const CONVERGENCE_T_SAMPLES: usize = 501;
/// Relative standard deviation below which an iterate is no longer
/// resolvable in double precision.
pub const DEGENERATE_RELATIVE_SPREAD: f64 = 1e4 * f64::EPSILON;

/// Symmetric frequency grid `t_k = k * 2 pi / divisor`, `|k| <= half_len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    divisor: usize,
    half_len: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        Self::new(DEFAULT_STEP_DIVISOR, DEFAULT_TMAX).expect("defaults are valid")
    }
}

impl FrequencyGrid {
    /// Grid with step `2 pi / divisor` covering `[-tmax, tmax]`.
    pub fn new(divisor: usize, tmax: f64) -> Result<Self> {
        if divisor == 0 {
            return Err(Error::Config("frequency step divisor must be positive".into()));
        }
        if !(tmax.is_finite() && tmax > 0.0) {
            return Err(Error::Config(format!("tmax must be positive, got {tmax}")));
        }
        let step = 2.0 * PI / divisor as f64;
        let half_len = (tmax / step + 1e-9).floor() as usize;
        Ok(Self { divisor, half_len })
    }

    /// Grid from an explicit step, which must divide `2 pi` a whole number of times.
    pub fn from_step(tstep: f64, tmax: f64) -> Result<Self> {
        if !(tstep.is_finite() && tstep > 0.0) {
            return Err(Error::Config(format!("frequency step must be positive, got {tstep}")));
        }
        let ratio = 2.0 * PI / tstep;
        let divisor = ratio.round();
        if divisor < 1.0 || (ratio - divisor).abs() > 1e-9 * ratio {
            return Err(Error::Config(format!(
                "frequency step {tstep} is incommensurate with 2 pi (2 pi / step = {ratio})"
            )));
        }
        Self::new(divisor as usize, tmax)
    }

    pub fn divisor(&self) -> usize {
        self.divisor
    }

    pub fn half_len(&self) -> usize {
        self.half_len
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.divisor as f64
    }

    pub fn tmax(&self) -> f64 {
        self.half_len as f64 * self.step()
    }

    pub fn len(&self) -> usize {
        2 * self.half_len + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency of sample `k`, with `k` in `-half_len..=half_len`.
    pub fn t(&self, k: i64) -> f64 {
        k as f64 * self.step()
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let h = self.half_len as i64;
        -h..=h
    }
}

/// Characteristic-function samples on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CharFunction {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl CharFunction {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `phi` at every grid frequency.
    pub fn from_fn(grid: FrequencyGrid, phi: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.indices().map(|k| phi(grid.t(k))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Sample at index `k`; `None` outside `-half_len..=half_len`.
    pub fn at(&self, k: i64) -> Option<Complex64> {
        let idx = k + self.grid.half_len as i64;
        (0..self.values.len() as i64)
            .contains(&idx)
            .then(|| self.values[idx as usize])
    }

    pub fn at_zero(&self) -> Complex64 {
        self.values[self.grid.half_len]
    }

    /// Copy divided by its value at `t = 0`.
    pub fn renormalized(&self) -> Result<Self> {
        let c = self.at_zero();
        if c.norm() == 0.0 {
            return Err(Error::Domain("characteristic function vanishes at t = 0".into()));
        }
        Ok(Self { grid: self.grid, values: self.values.iter().map(|v| v / c).collect() })
    }

    /// `sup_k |self_k - other_k|` over the frequencies both grids share.
    pub fn sup_distance(&self, other: &CharFunction) -> Result<f64> {
        if self.grid.divisor != other.grid.divisor {
            return Err(Error::Config("frequency grids use different steps".into()));
        }
        let h = self.grid.half_len.min(other.grid.half_len) as i64;
        Ok((-h..=h)
            .map(|k| (self.at(k).unwrap() - other.at(k).unwrap()).norm())
            .fold(0.0, f64::max))
    }

    /// Writes `t,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,re,im")?;
        for (k, v) in self.grid.indices().zip(&self.values) {
            writeln!(w, "{},{},{}", fmt_f64(self.grid.t(k)), fmt_f64(v.re), fmt_f64(v.im))?;
        }
        Ok(())
    }
}

fn simpson_weights(n: usize, step: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * step / 3.0
        })
        .collect()
}

/// Simpson sum of `exp(i phase_i) * mass_i`, where `mass` already carries
/// the quadrature weights.
fn phase_sum(mass: &[f64], phase: impl Fn(usize) -> f64) -> Complex64 {
    let mut re = Vec::with_capacity(mass.len());
    let mut im = Vec::with_capacity(mass.len());
    for (i, m) in mass.iter().enumerate() {
        let (s, c) = phase(i).sin_cos();
        re.push(c * m);
        im.push(s * m);
    }
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

fn weighted_mass(g: &GridDensity) -> Vec<f64> {
    simpson_weights(g.len(), g.step())
        .into_iter()
        .zip(g.values())
        .map(|(w, v)| w * v)
        .collect()
}

/// `int exp(i t x) f(x) dx` at one frequency.
pub fn char_value(g: &GridDensity, t: f64) -> Complex64 {
    let mass = weighted_mass(g);
    let xs: Vec<f64> = g.nodes().collect();
    phase_sum(&mass, |i| t * xs[i])
}

/// Characteristic function of `g` by Simpson quadrature at every grid
/// frequency. Negative frequencies are the conjugates of positive ones.
pub fn char_function(g: &GridDensity, grid: FrequencyGrid) -> CharFunction {
    let mass = weighted_mass(g);
    let xs: Vec<f64> = g.nodes().collect();
    let positive: Vec<Complex64> = (0..=grid.half_len as i64)
        .into_par_iter()
        .map(|k| {
            let t = grid.t(k);
            phase_sum(&mass, |i| t * xs[i])
        })
        .collect();
    let mut values: Vec<Complex64> = positive[1..].iter().rev().map(|v| v.conj()).collect();
    values.extend(positive);
    CharFunction { grid, values }
}

/// Direction of the phase modulation in [`modulated_char`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSign {
    Plus,
    Minus,
}

impl PhaseSign {
    fn value(self) -> f64 {
        match self {
            PhaseSign::Plus => 1.0,
            PhaseSign::Minus => -1.0,
        }
    }
}

/// `int exp(i t x) exp(± i 2 pi F(x)) f(x) dx` with `F` the grid CDF of `g`.
pub fn modulated_char(g: &GridDensity, sign: PhaseSign, grid: FrequencyGrid) -> CharFunction {
    let mass = weighted_mass(g);
    let xs: Vec<f64> = g.nodes().collect();
    let shift: Vec<f64> = g.cdf().values().iter().map(|z| sign.value() * 2.0 * PI * z).collect();
    let values = grid
        .indices()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let t = grid.t(k);
            phase_sum(&mass, |i| t * xs[i] + shift[i])
        })
        .collect();
    CharFunction { grid, values }
}

/// Largest gap between the quadrature characteristic function of the
/// un-renormalised Type-III transform and the decomposition
/// `phi_0 - (phi_F+ + phi_F-) / 2`.
pub fn type3_cf_identity_gap(g: &GridDensity, grid: FrequencyGrid) -> Result<f64> {
    let nu = transform_unnormalized(TransformKind::TypeIII, g)?;
    let lhs = char_function(&nu, grid);
    let phi0 = char_function(g, grid);
    let plus = modulated_char(g, PhaseSign::Plus, grid);
    let minus = modulated_char(g, PhaseSign::Minus, grid);
    let rhs: Vec<Complex64> = phi0
        .values()
        .iter()
        .zip(plus.values())
        .zip(minus.values())
        .map(|((p0, pp), pm)| p0 - 0.5 * (pp + pm))
        .collect();
    lhs.sup_distance(&CharFunction::new(grid, rhs)?)
}

const SERIES_CUTOFF: f64 = 1e-4;

/// `(exp(i u) - 1) / (i u)`, the uniform(0, 1) characteristic function,
/// with the removable point handled by its Taylor series.
pub fn uniform_cf(u: f64) -> Complex64 {
    if u.abs() < SERIES_CUTOFF {
        let u2 = u * u;
        Complex64::new(1.0 - u2 / 6.0 + u2 * u2 / 120.0, u / 2.0 - u * u2 / 24.0)
    } else {
        let (s, c) = u.sin_cos();
        Complex64::new(s / u, (1.0 - c) / u)
    }
}

/// Closed-form characteristic function of the Type-III transform of the
/// uniform(0, 1) law: `phi_0(t) - (phi_0(t + 2 pi) + phi_0(t - 2 pi)) / 2`.
pub fn uniform_closed_form_cf(t: f64) -> Complex64 {
    uniform_cf(t) - 0.5 * (uniform_cf(t + 2.0 * PI) + uniform_cf(t - 2.0 * PI))
}

/// One literal application of `phi(t) - (phi(t + 2 pi) + phi(t - 2 pi)) / 2`.
///
/// The output grid loses `2 pi` at each end. No renormalisation.
pub fn t_operator(phi: &CharFunction) -> Result<CharFunction> {
    let grid = phi.grid();
    let shift = grid.divisor;
    if grid.half_len < shift {
        return Err(Error::Range(format!(
            "tmax {} is smaller than the 2 pi shift",
            grid.tmax()
        )));
    }
    let out_grid = FrequencyGrid { divisor: grid.divisor, half_len: grid.half_len - shift };
    let s = shift as i64;
    let values = out_grid
        .indices()
        .map(|k| {
            let c = phi.at(k).unwrap();
            let up = phi.at(k + s).unwrap();
            let down = phi.at(k - s).unwrap();
            c - 0.5 * (up + down)
        })
        .collect();
    Ok(CharFunction { grid: out_grid, values })
}

/// `steps` successive applications of [`t_operator`], raw.
pub fn t_operator_iterates(phi: &CharFunction, steps: usize) -> Result<Vec<CharFunction>> {
    let mut out: Vec<CharFunction> = Vec::with_capacity(steps);
    for k in 0..steps {
        let next = t_operator(if k == 0 { phi } else { &out[k - 1] })?;
        out.push(next);
    }
    Ok(out)
}

/// Diagnostics of one iterate in [`gaussian_convergence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceStep {
    pub n: usize,
    pub variance: f64,
    pub median: f64,
    pub mean: f64,
    /// `sup_{|t| <= tmax} |phi~_n(t) - exp(-t^2 / 2)|` for the iterate
    /// standardised by its own mean and standard deviation.
    pub sup_distance: f64,
    /// `2 pi^2 n sigma_n^2`.
    pub rate_product: f64,
    pub integral_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceDiagnostics {
    pub kind: TransformKind,
    pub tmax: f64,
    pub steps: Vec<ConvergenceStep>,
    /// Requested iteration count.
    pub requested: usize,
    /// First step whose spread fell below the resolvable limit, if any.
    pub stopped_at: Option<usize>,
}

impl ConvergenceDiagnostics {
    pub fn sup_distances(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.sup_distance).collect()
    }

    /// True when `sup_distance` strictly decreases over steps `from..`.
    pub fn strictly_decreasing_from(&self, from: usize) -> bool {
        let d: Vec<f64> = self.steps.iter().filter(|s| s.n >= from).map(|s| s.sup_distance).collect();
        d.windows(2).all(|w| w[1] < w[0])
    }

    pub fn step(&self, n: usize) -> Option<&ConvergenceStep> {
        self.steps.iter().find(|s| s.n == n)
    }

    /// Writes `n,variance,median,sup_distance,rate_product` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,variance,median,sup_distance,rate_product")?;
        for s in &self.steps {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.n,
                fmt_f64(s.variance),
                fmt_f64(s.median),
                fmt_f64(s.sup_distance),
                fmt_f64(s.rate_product)
            )?;
        }
        Ok(())
    }
}

/// Distance between the characteristic function of `g` standardised by
/// its mean and standard deviation and `exp(-t^2 / 2)`, over `[0, tmax]`.
/// The distance is even in `t` for a real density.
pub fn standardized_gaussian_distance(g: &GridDensity, tmax: f64) -> f64 {
    let mean = g.mean();
    let sd = g.variance().sqrt();
    let mass = weighted_mass(g);
    let total = pairwise_sum(&mass);
    let zs: Vec<f64> = g.nodes().map(|x| (x - mean) / sd).collect();
    (0..CONVERGENCE_T_SAMPLES)
        .into_par_iter()
        .map(|j| {
            let t = tmax * j as f64 / (CONVERGENCE_T_SAMPLES - 1) as f64;
            let phi = phase_sum(&mass, |i| t * zs[i]) / total;
            (phi - Complex64::new((-0.5 * t * t).exp(), 0.0)).norm()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

/// Iterates `kind` `n` times starting from `g` and records, at every step,
/// the variance, median, mean and distance of the standardised
/// characteristic function to the standard normal one on `|t| <= tmax`.
///
/// The iterates collapse onto the median (for Type-III the spread halves
/// at every step), so each step is resampled with `g.len()` nodes on the
/// window that holds all but `2e-12` of its mass, using the exact CDF
/// composition of [`crate::pushforward`]. Iteration stops early once the
/// standard deviation falls below [`DEGENERATE_RELATIVE_SPREAD`] times the
/// source scale.
pub fn gaussian_convergence(
    kind: TransformKind,
    g: &GridDensity,
    n: usize,
    tmax: f64,
) -> Result<ConvergenceDiagnostics> {
    if !(tmax.is_finite() && tmax > 0.0) {
        return Err(Error::Config(format!("tmax must be positive, got {tmax}")));
    }
    let push = Pushforward::new(kind, g);
    let m0 = push.median();
    let scale = m0.abs().max(g.variance().sqrt());
    let mut steps = Vec::with_capacity(n + 1);
    let mut stopped_at = None;
    for k in 0..=n {
        let raw = push.sample(k, g.len())?;
        let integral = raw.integrate();
        let local = raw.normalized()?;
        let variance = local.variance();
        if variance.sqrt() < DEGENERATE_RELATIVE_SPREAD * scale {
            stopped_at = Some(k);
            break;
        }
        steps.push(ConvergenceStep {
            n: k,
            variance,
            median: m0 + local.median(),
            mean: m0 + local.mean(),
            sup_distance: standardized_gaussian_distance(&local, tmax),
            rate_product: 2.0 * PI * PI * k as f64 * variance,
            integral_error: (integral - 1.0).abs(),
        });
    }
    Ok(ConvergenceDiagnostics { kind, tmax, steps, requested: n, stopped_at })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Family;
    use crate::transform::iterate;
    use approx::assert_abs_diff_eq;

    fn reference(f: Family, n: usize) -> GridDensity {
        GridDensity::from_analytic(&f.reference(), n).unwrap()
    }

    #[test]
    fn frequency_grid_validation() {
        let g = FrequencyGrid::default();
        assert_eq!(g.divisor(), 64);
        assert_eq!(g.half_len(), 64 * 32);
        assert_abs_diff_eq!(g.tmax(), 64.0 * PI, epsilon = 1e-12);
        assert!(FrequencyGrid::from_step(2.0 * PI / 64.0, 20.0).is_ok());
        assert!(matches!(FrequencyGrid::from_step(0.1, 20.0), Err(Error::Config(_))));
        assert!(FrequencyGrid::new(0, 1.0).is_err());
        assert!(FrequencyGrid::new(64, -1.0).is_err());
    }

    #[test]
    fn char_function_examples() {
        let u = reference(Family::Uniform, 4097);
        let grid = FrequencyGrid::new(64, 20.0).unwrap();
        let phi = char_function(&u, grid);
        assert_abs_diff_eq!(phi.at_zero().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(phi.at_zero().im, 0.0, epsilon = 1e-15);
        let at_pi = phi.at(32).unwrap();
        assert_abs_diff_eq!(at_pi.re, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(at_pi.im, 2.0 / PI, epsilon = 1e-10);
        assert!(phi.at(64).unwrap().norm() < 1e-8);
    }

    #[test]
    fn char_functions_hermitian_and_bounded() {
        let grid = FrequencyGrid::new(64, 20.0).unwrap();
        for f in Family::ALL {
            let phi = char_function(&reference(f, 2049), grid);
            for k in 0..=grid.half_len() as i64 {
                let (p, m) = (phi.at(k).unwrap(), phi.at(-k).unwrap());
                assert!((p - m.conj()).norm() <= 1e-9);
                assert!(p.norm() <= 1.0 + 1e-9, "{f}");
            }
            assert!((phi.at_zero().norm() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn modulated_examples() {
        let u = reference(Family::Uniform, 4097);
        let grid = FrequencyGrid::new(64, 20.0).unwrap();
        let plus = modulated_char(&u, PhaseSign::Plus, grid);
        assert!(plus.at_zero().norm() <= 1e-8);
        let minus = modulated_char(&u, PhaseSign::Minus, grid);
        assert!((minus.at(64).unwrap() - 1.0).norm() <= 1e-8);
        for f in Family::ALL {
            let g = reference(f, 4097);
            for sign in [PhaseSign::Plus, PhaseSign::Minus] {
                let m = modulated_char(&g, sign, grid);
                assert!(m.at_zero().norm() <= 1e-6, "{f} {:?}: {}", sign, m.at_zero().norm());
            }
        }
    }

    #[test]
    fn identity_gap_examples() {
        let grid = FrequencyGrid::new(64, 20.0).unwrap();
        for (f, tol) in [(Family::Uniform, 1e-6), (Family::Normal, 1e-6), (Family::Arcsine, 1e-5)] {
            let gap = type3_cf_identity_gap(&reference(f, 4097), grid).unwrap();
            assert!(gap <= tol, "{f}: {gap}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let at0 = uniform_closed_form_cf(0.0);
        assert_abs_diff_eq!(at0.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(at0.im, 0.0, epsilon = 1e-15);
        for t in [2.0 * PI, -2.0 * PI] {
            let v = uniform_closed_form_cf(t);
            assert_abs_diff_eq!(v.re, -0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        }
        let u = reference(Family::Uniform, 4097);
        let nu = transform_unnormalized(TransformKind::TypeIII, &u).unwrap();
        let q = char_value(&nu, PI);
        assert!((q - uniform_closed_form_cf(PI)).norm() <= 1e-6);
    }

    #[test]
    fn uniform_cf_series_branch_is_continuous() {
        for u in [0.99e-4, 1.01e-4, -0.99e-4, -1.01e-4, 1e-7] {
            let (s, c) = f64::sin_cos(u);
            let direct = Complex64::new(s / u, (1.0 - c) / u);
            assert!((uniform_cf(u) - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn t_operator_examples() {
        let grid = FrequencyGrid::default();
        let phi0 = CharFunction::from_fn(grid, uniform_cf);
        let iters = t_operator_iterates(&phi0, 2).unwrap();
        assert_abs_diff_eq!(iters[0].at_zero().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(iters[1].at_zero().re, 1.5, epsilon = 1e-12);
        assert_eq!(iters[0].grid().half_len(), grid.half_len() - 64);
        assert_abs_diff_eq!(iters[1].renormalized().unwrap().at_zero().re, 1.0, epsilon = 1e-15);

        let zero = CharFunction::from_fn(grid, |_| Complex64::new(0.0, 0.0));
        assert!(t_operator(&zero).unwrap().values().iter().all(|v| v.norm() == 0.0));

        let short = CharFunction::from_fn(FrequencyGrid::new(64, 3.0).unwrap(), uniform_cf);
        assert!(matches!(t_operator(&short), Err(Error::Range(_))));
    }

    #[test]
    fn convergence_first_steps_match_fixed_grid() {
        let u = reference(Family::Uniform, 4097);
        let diag = gaussian_convergence(TransformKind::TypeIII, &u, 3, 5.0).unwrap();
        assert_abs_diff_eq!(diag.steps[0].variance, 1.0 / 12.0, epsilon = 1e-6);
        assert_abs_diff_eq!(diag.steps[1].variance, 1.0 / 12.0 - 1.0 / (2.0 * PI * PI), epsilon = 1e-5);
        let fixed = iterate(TransformKind::TypeIII, &u, 3).unwrap();
        for k in 1..=3 {
            let (a, b) = (diag.steps[k].variance, fixed.steps[k].diagnostics.variance);
            assert!((a - b).abs() <= 1e-6 * b.max(1e-3), "step {k}: {a} vs {b}");
            assert_abs_diff_eq!(diag.steps[k].median, 0.5, epsilon = 1e-9);
        }
        assert_eq!(diag.stopped_at, None);
        let mut csv = Vec::new();
        diag.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("n,variance,median,sup_distance,rate_product\n0,"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn convergence_runs_for_entropy_kinds() {
        let g = reference(Family::Normal, 1025);
        for kind in [TransformKind::TypeI, TransformKind::TypeII] {
            let diag = gaussian_convergence(kind, &g, 3, 5.0).unwrap();
            let fixed = iterate(kind, &g, 3).unwrap();
            for k in 1..=3 {
                let (a, b) = (diag.steps[k].variance, fixed.steps[k].diagnostics.variance);
                assert!((a - b).abs() <= 1e-5 * b, "{kind} step {k}: {a} vs {b}");
            }
        }
    }
}
