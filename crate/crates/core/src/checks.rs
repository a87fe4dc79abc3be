//! Self-verification suites with pinned sizes and tolerances.
//!
//! Each suite returns a list of [`Check`]s; a [`Report`] passes iff every
//! check does. The CLI `verify` subcommand serialises reports to JSON.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::figures::{count_modes, Figure, FigureTable};
use crate::grid::{amplifying_constant, attenuating_constant, GridDensity, CONSTANT_CHECK_NODES};
use crate::ode::{probability_sweep, residual, residual_finite_difference};
use crate::spectral::{
    char_function, gaussian_convergence, t_operator, type3_cf_identity_gap, uniform_cf,
    uniform_closed_form_cf, CharFunction, FrequencyGrid,
};
use crate::transform::{log_derivative_with, transform, transform_unnormalized, TransformKind};

pub const GRID_NODES: usize = 4097;
pub const DERIVATIVE_GRID_NODES: usize = 65537;

pub const CONSTANT_TOL: f64 = 1e-8;
pub const MASS_TOL: f64 = 1e-4;
pub const MASS_REFINEMENT_RATIO: f64 = 8.0;
/// Mass errors at or below this are roundoff and exempt from the ratio test.
pub const MASS_ROUNDOFF_FLOOR: f64 = 1e-12;
pub const ODE_RESIDUAL_TOL: f64 = 1e-8;
pub const ODE_FD_STEP: f64 = 1e-4;
pub const ODE_FD_TOL: f64 = 1e-3;
pub const ODE_SWEEP: (f64, f64, usize) = (0.05, 0.95, 181);
pub const CF_TMAX: f64 = 20.0;
pub const CF_GAP_TOL: f64 = 1e-5;
pub const CF_GAP_TOL_SINGULAR: f64 = 1e-4;
pub const CF_CLOSED_FORM_TOL: f64 = 1e-6;
pub const T_OPERATOR_TOL: f64 = 1e-6;
pub const EXACT_TOL: f64 = 1e-12;
pub const PHASE_CDF_TOL: f64 = 1e-6;
pub const MEDIAN_TOL: f64 = 1e-4;
pub const CONVERGENCE_STEPS: usize = 30;
pub const CONVERGENCE_TMAX: f64 = 5.0;
pub const CONVERGENCE_SUP_TOL: f64 = 0.05;
pub const CONVERGENCE_DECREASING_FROM: usize = 5;
pub const STEP1_VARIANCE_TOL: f64 = 1e-5;
pub const UNIFORM_TYPE1_PEAK: f64 = 1.4052;
pub const PEAK_TOL: f64 = 1e-4;
pub const MODE_REL_TOL: f64 = 1e-12;
pub const DERIVATIVE_BAND: (f64, f64) = (0.05, 0.95);
pub const DERIVATIVE_REL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Relation {
    /// `|observed - expected| <= tolerance`
    Within,
    /// `observed <= tolerance`
    AtMost,
    /// `observed >= expected`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: Relation,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        let passed = (observed - expected).abs() <= tolerance;
        Self { name: name.into(), relation: Relation::Within, expected, observed, tolerance, passed }
    }

    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::AtMost,
            expected: 0.0,
            observed,
            tolerance: bound,
            passed: observed <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            relation: Relation::AtLeast,
            expected: bound,
            observed,
            tolerance: 0.0,
            passed: observed >= bound,
        }
    }

    /// A yes/no property, recorded as `1` for true.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::within(name, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        match self.relation {
            Relation::Within => write!(
                f,
                "{verdict} {}: observed {:e}, expected {:e} +/- {:e}",
                self.name, self.observed, self.expected, self.tolerance
            ),
            Relation::AtMost => {
                write!(f, "{verdict} {}: observed {:e} <= {:e}", self.name, self.observed, self.tolerance)
            }
            Relation::AtLeast => {
                write!(f, "{verdict} {}: observed {:e} >= {:e}", self.name, self.observed, self.expected)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Normalization,
    Constants,
    Ode,
    Cf,
    Median,
    Convergence,
    Figures,
    Derivatives,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 8] = [
        Suite::Constants,
        Suite::Normalization,
        Suite::Ode,
        Suite::Cf,
        Suite::Median,
        Suite::Convergence,
        Suite::Figures,
        Suite::Derivatives,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Constants => "constants",
            Suite::Ode => "ode",
            Suite::Cf => "cf",
            Suite::Median => "median",
            Suite::Convergence => "convergence",
            Suite::Figures => "figures",
            Suite::Derivatives => "derivatives",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::INDIVIDUAL
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report holds plain data")
    }
}

pub fn run(suite: Suite) -> Result<Report> {
    let checks = match suite {
        Suite::Normalization => normalization()?,
        Suite::Constants => constants()?,
        Suite::Ode => ode()?,
        Suite::Cf => cf()?,
        Suite::Median => median()?,
        Suite::Convergence => convergence()?,
        Suite::Figures => figures()?,
        Suite::Derivatives => derivatives()?,
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::INDIVIDUAL {
                all.extend(run(s)?.checks);
            }
            all
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report { suite, passed, checks })
}

fn reference(f: Family, n: usize) -> Result<GridDensity> {
    GridDensity::from_analytic(&f.reference(), n)
}

pub fn constants() -> Result<Vec<Check>> {
    Ok(vec![
        Check::within(
            "attenuating constant pi e / 24",
            PI * E / 24.0,
            attenuating_constant(CONSTANT_CHECK_NODES)?,
            CONSTANT_TOL,
        ),
        Check::within(
            "amplifying constant pi / e",
            PI / E,
            amplifying_constant(CONSTANT_CHECK_NODES)?,
            CONSTANT_TOL,
        ),
    ])
}

pub fn normalization() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in Family::ALL {
        let coarse = reference(f, GRID_NODES)?;
        let fine = reference(f, 2 * GRID_NODES - 1)?;
        for kind in TransformKind::ALL {
            let e0 = transform(kind, &coarse)?.integral_error();
            let e1 = transform(kind, &fine)?.integral_error();
            out.push(Check::at_most(format!("{f} {kind} mass error, {GRID_NODES} nodes"), e0, MASS_TOL));
            if e0 <= MASS_ROUNDOFF_FLOOR {
                out.push(Check::at_most(format!("{f} {kind} mass error at roundoff"), e0, MASS_ROUNDOFF_FLOOR));
            } else {
                out.push(Check::at_least(
                    format!("{f} {kind} mass error reduction on refinement"),
                    e0 / e1,
                    MASS_REFINEMENT_RATIO,
                ));
            }
        }
    }
    Ok(out)
}

pub fn ode() -> Result<Vec<Check>> {
    let (lo, hi, count) = ODE_SWEEP;
    let sweep = probability_sweep(lo, hi, count);
    let mut out = Vec::new();
    for kind in TransformKind::ALL {
        let report = residual(kind, &sweep)?;
        out.push(Check::at_most(format!("{kind} ODE max residual"), report.max_abs_residual, ODE_RESIDUAL_TOL));
        for ic in &report.ic_checks {
            out.push(Check::at_most(format!("{kind} initial condition {}", ic.name), ic.error(), crate::ode::IC_TOLERANCE));
        }
        let fd = residual_finite_difference(kind, &sweep, ODE_FD_STEP)?;
        out.push(Check::at_most(
            format!("{kind} ODE max residual, finite differences"),
            fd.max_abs_residual,
            ODE_FD_TOL,
        ));
    }
    Ok(out)
}

pub fn cf() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let short = FrequencyGrid::new(crate::spectral::DEFAULT_STEP_DIVISOR, CF_TMAX)?;
    for f in Family::ALL {
        let g = reference(f, GRID_NODES)?;
        let tol = if f.reference().has_singular_endpoints() { CF_GAP_TOL_SINGULAR } else { CF_GAP_TOL };
        out.push(Check::at_most(format!("{f} Type-III CF decomposition gap"), type3_cf_identity_gap(&g, short)?, tol));
    }

    let u = reference(Family::Uniform, GRID_NODES)?;
    let nu = transform_unnormalized(TransformKind::TypeIII, &u)?;
    let quad = char_function(&nu, short);
    let closed = CharFunction::from_fn(short, uniform_closed_form_cf);
    out.push(Check::at_most("uniform Type-III CF against closed form", quad.sup_distance(&closed)?, CF_CLOSED_FORM_TOL));
    let shift = short.divisor() as i64;
    for (k, want) in [(0, 1.0), (shift, -0.5), (-shift, -0.5)] {
        let t = short.t(k);
        let q = quad.at(k).expect("frequency on grid");
        out.push(Check::at_most(
            format!("uniform Type-III CF quadrature at t = {t:.6}"),
            (q - want).norm(),
            CF_CLOSED_FORM_TOL,
        ));
        out.push(Check::at_most(
            format!("uniform Type-III closed form at t = {t:.6}"),
            (uniform_closed_form_cf(t) - want).norm(),
            EXACT_TOL,
        ));
    }

    let full = FrequencyGrid::default();
    let shifted = t_operator(&char_function(&u, full))?;
    let direct = char_function(&nu, shifted.grid());
    out.push(Check::at_most("shift operator matches uniform Type-III CF", shifted.sup_distance(&direct)?, T_OPERATOR_TOL));
    let exact = CharFunction::from_fn(full, uniform_cf);
    let two = t_operator(&t_operator(&exact)?)?;
    out.push(Check::within("shift operator twice at t = 0", 1.5, two.at_zero().re, EXACT_TOL));
    Ok(out)
}

fn phase_cdf(z: f64) -> f64 {
    z - (2.0 * PI * z).sin() / (2.0 * PI)
}

pub fn median() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in Family::ALL {
        let spec = f.reference();
        let g = reference(f, GRID_NODES)?;
        let source = g.cdf();
        let nu = transform(TransformKind::TypeIII, &g)?.density;
        let target = nu.cdf();
        let gap = source
            .values()
            .iter()
            .zip(target.values())
            .fold(0.0f64, |m, (z, w)| m.max((w - phase_cdf(*z)).abs()));
        out.push(Check::at_most(format!("{f} Type-III CDF against F - sin(2 pi F) / (2 pi)"), gap, PHASE_CDF_TOL));
        out.push(Check::within(format!("{f} Type-III median"), spec.median(), nu.median(), MEDIAN_TOL));
        for kind in [TransformKind::TypeI, TransformKind::TypeII] {
            let t = transform(kind, &g)?.density;
            out.push(Check::within(
                format!("{f} {kind} CDF at source median"),
                0.5,
                t.cdf().at(spec.median()),
                MEDIAN_TOL,
            ));
        }
    }
    Ok(out)
}

pub fn convergence() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in Family::ALL {
        let g = reference(f, GRID_NODES)?;
        let diag = gaussian_convergence(TransformKind::TypeIII, &g, CONVERGENCE_STEPS, CONVERGENCE_TMAX)?;
        let last = diag.step(CONVERGENCE_STEPS).map_or(f64::NAN, |s| s.sup_distance);
        out.push(Check::at_most(
            format!("{f} Type-III standardized CF distance at step {CONVERGENCE_STEPS}"),
            last,
            CONVERGENCE_SUP_TOL,
        ));
        out.push(Check::holds(
            format!("{f} Type-III standardized CF distance strictly decreasing from step {CONVERGENCE_DECREASING_FROM}"),
            diag.stopped_at.is_none() && diag.strictly_decreasing_from(CONVERGENCE_DECREASING_FROM),
        ));
        if f == Family::Uniform {
            let v1 = diag.step(1).map_or(f64::NAN, |s| s.variance);
            out.push(Check::within(
                "uniform Type-III step 1 variance",
                1.0 / 12.0 - 1.0 / (2.0 * PI * PI),
                v1,
                STEP1_VARIANCE_TOL,
            ));
        }
    }
    Ok(out)
}

fn argmax_offset(g: &GridDensity, at: f64) -> f64 {
    (g.x(g.argmax()) - at).abs()
}

/// One grid step plus rounding slack.
fn one_step(g: &GridDensity) -> f64 {
    g.step() * (1.0 + 1e-9)
}

pub fn figures() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let arc = FigureTable::build(Figure::Fig1, &Family::Arcsine.reference(), GRID_NODES)?;
    let rho = arc.first.values();
    let mid = ((0.5 - arc.source.lo()) / arc.source.step()).round() as usize;
    out.push(Check::holds(
        "arcsine Type-I local minimum at 0.5",
        rho[mid] < rho[mid - 1] && rho[mid] < rho[mid + 1],
    ));
    out.push(Check::holds(
        "arcsine Type-I boundary values below the centre",
        rho[0] < rho[mid] && rho[rho.len() - 1] < rho[mid],
    ));
    out.push(Check::at_most("arcsine Type-II argmax at 0.5", argmax_offset(&arc.second, 0.5), one_step(&arc.second)));

    let uni = FigureTable::build(Figure::Fig1, &Family::Uniform.reference(), GRID_NODES)?;
    out.push(Check::at_most("uniform Type-I argmax at 0.5", argmax_offset(&uni.first, 0.5), one_step(&uni.first)));
    out.push(Check::within(
        "uniform Type-I peak value",
        UNIFORM_TYPE1_PEAK,
        uni.first.values()[uni.first.argmax()],
        PEAK_TOL,
    ));

    for f in Family::ALL {
        let spec = f.reference();
        let t = FigureTable::build(Figure::Fig2, &spec, GRID_NODES)?;
        out.push(Check::within(
            format!("{f} second Type-III iterate mode count"),
            1.0,
            count_modes(t.second.values(), MODE_REL_TOL) as f64,
            0.0,
        ));
        out.push(Check::at_most(
            format!("{f} second Type-III iterate argmax at the median"),
            argmax_offset(&t.second, spec.median()),
            one_step(&t.second),
        ));
    }
    Ok(out)
}

/// Largest relative gap between the chain-rule log-derivative and central
/// differences of the log of the transformed density, over nodes whose
/// grid CDF lies in [`DERIVATIVE_BAND`]. Relative errors are measured
/// against `max(|fd|, 1)`.
pub fn log_derivative_gap(kind: TransformKind, g: &GridDensity) -> Result<f64> {
    let nu = transform(kind, g)?.density;
    let cdf = g.cdf();
    let (lo, hi) = DERIVATIVE_BAND;
    let v = nu.values();
    let h = g.step();
    let mut worst = 0.0f64;
    for i in 1..g.len() - 1 {
        let z = cdf.values()[i];
        if z < lo || z > hi {
            continue;
        }
        let fd = (v[i + 1].ln() - v[i - 1].ln()) / (2.0 * h);
        let chain = log_derivative_with(kind, g, &cdf, g.x(i))?;
        worst = worst.max((chain - fd).abs() / fd.abs().max(1.0));
    }
    Ok(worst)
}

pub fn derivatives() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for f in Family::ALL {
        let g = reference(f, DERIVATIVE_GRID_NODES)?;
        for kind in TransformKind::ALL {
            out.push(Check::at_most(
                format!("{f} {kind} log-derivative against finite differences"),
                log_derivative_gap(kind, &g)?,
                DERIVATIVE_REL_TOL,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_relations() {
        assert!(Check::within("a", 1.0, 1.0 + 1e-9, 1e-8).passed);
        assert!(!Check::within("a", 1.0, 1.1, 1e-8).passed);
        assert!(Check::at_most("b", 1e-9, 1e-8).passed);
        assert!(!Check::at_most("b", f64::NAN, 1e-8).passed);
        assert!(Check::at_least("c", 9.0, 8.0).passed);
        assert!(!Check::at_least("c", 7.9, 8.0).passed);
        assert!(Check::holds("d", true).passed && !Check::holds("d", false).passed);
        assert!(Check::at_most("e", 0.1, 0.2).to_string().starts_with("PASS e:"));
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::INDIVIDUAL.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn quick_suites_pass() {
        for s in [Suite::Constants, Suite::Ode] {
            let r = run(s).unwrap();
            assert!(r.passed, "{}", r.to_json());
        }
        let json: serde_json::Value = serde_json::from_str(&run(Suite::Constants).unwrap().to_json()).unwrap();
        assert_eq!(json["suite"], "constants");
        assert_eq!(json["checks"].as_array().unwrap().len(), 2);
    }
}
