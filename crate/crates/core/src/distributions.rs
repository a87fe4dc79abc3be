//! Closed-form reference distributions.
//!
//! | Family | Parameters | Effective support |
//! |---|---|---|
//! | uniform | `a < b` | `[a, b]` |
//! | normal | `mean`, `sd > 0` | `[mean - 8 sd, mean + 8 sd]` |
//! | exponential | `rate > 0` | `[0, 40 / rate]` |
//! | semicircle | `center`, `radius > 0` | `[center - radius, center + radius]` |
//! | arcsine | `a < b` | `[a, b]` |
//!
//! Unbounded supports are truncated so that the discarded mass is below
//! `1e-12`. The arcsine density is infinite at both endpoints; evaluation
//! there returns a cap (default [`DEFAULT_PDF_CAP`]).

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Value returned by [`DistributionSpec::pdf`] where the density is infinite.
pub const DEFAULT_PDF_CAP: f64 = 1e12;

/// Half-width of the normal effective support, in standard deviations.
const NORMAL_TAIL_SDS: f64 = 8.0;
/// Upper end of the exponential effective support, in units of `1 / rate`.
const EXPONENTIAL_TAIL_SCALES: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Uniform,
    Normal,
    Exponential,
    Semicircle,
    Arcsine,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Uniform,
        Family::Normal,
        Family::Exponential,
        Family::Semicircle,
        Family::Arcsine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Normal => "normal",
            Family::Exponential => "exponential",
            Family::Semicircle => "semicircle",
            Family::Arcsine => "arcsine",
        }
    }

    /// Parameter names accepted by [`DistributionSpec::from_params`], in order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Uniform | Family::Arcsine => &["a", "b"],
            Family::Normal => &["mean", "sd"],
            Family::Exponential => &["rate"],
            Family::Semicircle => &["center", "radius"],
        }
    }

    /// The parameterisation used for the reference figures.
    pub fn reference(self) -> DistributionSpec {
        let params = match self {
            Family::Uniform | Family::Arcsine => Params::Interval { a: 0.0, b: 1.0 },
            Family::Normal => Params::Normal { mean: 0.0, sd: 1.0 },
            Family::Exponential => Params::Exponential { rate: 1.0 },
            Family::Semicircle => Params::Semicircle { center: 0.0, radius: 1.0 },
        };
        DistributionSpec { family: self, params }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Params {
    Interval { a: f64, b: f64 },
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    Semicircle { center: f64, radius: f64 },
}

/// A validated member of one of the five reference families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    params: Params,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn finite(vals: &[f64]) -> bool {
    vals.iter().all(|v| v.is_finite())
}

impl DistributionSpec {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        check(finite(&[a, b]) && a < b, || format!("uniform requires a < b, got a={a}, b={b}"))?;
        Ok(Self { family: Family::Uniform, params: Params::Interval { a, b } })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        check(finite(&[mean, sd]) && sd > 0.0, || format!("normal requires sd > 0, got {sd}"))?;
        Ok(Self { family: Family::Normal, params: Params::Normal { mean, sd } })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        check(rate.is_finite() && rate > 0.0, || format!("exponential requires rate > 0, got {rate}"))?;
        Ok(Self { family: Family::Exponential, params: Params::Exponential { rate } })
    }

    pub fn semicircle(center: f64, radius: f64) -> Result<Self> {
        check(finite(&[center, radius]) && radius > 0.0, || {
            format!("semicircle requires radius > 0, got {radius}")
        })?;
        Ok(Self { family: Family::Semicircle, params: Params::Semicircle { center, radius } })
    }

    pub fn arcsine(a: f64, b: f64) -> Result<Self> {
        check(finite(&[a, b]) && a < b, || format!("arcsine requires a < b, got a={a}, b={b}"))?;
        Ok(Self { family: Family::Arcsine, params: Params::Interval { a, b } })
    }

    /// Builds a spec from `key=value` overrides on top of the reference
    /// parameterisation. Unknown keys are rejected.
    pub fn from_params(family: Family, overrides: &[(String, f64)]) -> Result<Self> {
        let names = family.param_names();
        let mut values = family.reference().param_values();
        for (key, value) in overrides {
            let idx = names.iter().position(|n| n == key).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "`{key}` is not a parameter of {family} (expected one of {})",
                    names.join(", ")
                ))
            })?;
            values[idx] = *value;
        }
        match family {
            Family::Uniform => Self::uniform(values[0], values[1]),
            Family::Normal => Self::normal(values[0], values[1]),
            Family::Exponential => Self::exponential(values[0]),
            Family::Semicircle => Self::semicircle(values[0], values[1]),
            Family::Arcsine => Self::arcsine(values[0], values[1]),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Parameter values in the order of [`Family::param_names`].
    pub fn param_values(&self) -> Vec<f64> {
        match self.params {
            Params::Interval { a, b } => vec![a, b],
            Params::Normal { mean, sd } => vec![mean, sd],
            Params::Exponential { rate } => vec![rate],
            Params::Semicircle { center, radius } => vec![center, radius],
        }
    }

    /// True when the density is unbounded at an endpoint of its support.
    pub fn has_singular_endpoints(&self) -> bool {
        self.family == Family::Arcsine
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.pdf_capped(x, DEFAULT_PDF_CAP)
    }

    /// Density with infinite endpoint values replaced by `cap`.
    pub fn pdf_capped(&self, x: f64, cap: f64) -> f64 {
        match (self.family, self.params) {
            (Family::Uniform, Params::Interval { a, b }) => {
                if (a..=b).contains(&x) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            (Family::Arcsine, Params::Interval { a, b }) => {
                if x < a || x > b {
                    return 0.0;
                }
                let denom = PI * ((x - a) * (b - x)).sqrt();
                if denom == 0.0 {
                    cap
                } else {
                    (1.0 / denom).min(cap)
                }
            }
            (Family::Normal, Params::Normal { mean, sd }) => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
            }
            (Family::Exponential, Params::Exponential { rate }) => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            (Family::Semicircle, Params::Semicircle { center, radius }) => {
                let y = (x - center) / radius;
                if y.abs() > 1.0 {
                    0.0
                } else {
                    2.0 / (PI * radius) * (1.0 - y * y).sqrt()
                }
            }
            _ => unreachable!("family and parameter shape always agree"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let p = match (self.family, self.params) {
            (Family::Uniform, Params::Interval { a, b }) => (x - a) / (b - a),
            (Family::Arcsine, Params::Interval { a, b }) => {
                let y = ((x - a) / (b - a)).clamp(0.0, 1.0);
                2.0 / PI * y.sqrt().asin()
            }
            (Family::Normal, Params::Normal { mean, sd }) => {
                0.5 * erfc(-(x - mean) / sd * FRAC_1_SQRT_2)
            }
            (Family::Exponential, Params::Exponential { rate }) => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            (Family::Semicircle, Params::Semicircle { center, radius }) => {
                let y = ((x - center) / radius).clamp(-1.0, 1.0);
                0.5 + (y * (1.0 - y * y).sqrt() + y.asin()) / PI
            }
            _ => unreachable!("family and parameter shape always agree"),
        };
        p.clamp(0.0, 1.0)
    }

    pub fn median(&self) -> f64 {
        match self.params {
            Params::Interval { a, b } => 0.5 * (a + b),
            Params::Normal { mean, .. } => mean,
            Params::Exponential { rate } => LN_2 / rate,
            Params::Semicircle { center, .. } => center,
        }
    }

    /// Finite interval holding all but at most `1e-12` of the mass.
    pub fn effective_support(&self) -> (f64, f64) {
        match self.params {
            Params::Interval { a, b } => (a, b),
            Params::Normal { mean, sd } => (mean - NORMAL_TAIL_SDS * sd, mean + NORMAL_TAIL_SDS * sd),
            Params::Exponential { rate } => (0.0, EXPONENTIAL_TAIL_SCALES / rate),
            Params::Semicircle { center, radius } => (center - radius, center + radius),
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, (n, v)) in self.family.param_names().iter().zip(self.param_values()).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        f.write_str(")")
    }
}
