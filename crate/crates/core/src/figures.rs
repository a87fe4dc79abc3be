//! Column tables behind the two reference figures.
//!
//! `Fig1` pairs each density with its Type-I and Type-II transforms
//! (`x,f,rho,tau`); `Fig2` with its first and second Type-III iterates
//! (`x,f,nu1,nu2`).

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::grid::GridDensity;
use crate::io::fmt_f64;
use crate::transform::{iterate, transform, TransformKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
        }
    }

    pub fn columns(self) -> [&'static str; 2] {
        match self {
            Figure::Fig1 => ["rho", "tau"],
            Figure::Fig2 => ["nu1", "nu2"],
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            other => Err(Error::Config(format!("unknown figure '{other}' (expected fig1 or fig2)"))),
        }
    }
}

/// Source density and two derived densities sharing its grid.
#[derive(Debug, Clone)]
pub struct FigureTable {
    pub figure: Figure,
    pub source: GridDensity,
    pub first: GridDensity,
    pub second: GridDensity,
}

impl FigureTable {
    pub fn build(figure: Figure, spec: &DistributionSpec, n: usize) -> Result<Self> {
        let source = GridDensity::from_analytic(spec, n)?;
        let (first, second) = match figure {
            Figure::Fig1 => (
                transform(TransformKind::TypeI, &source)?.density,
                transform(TransformKind::TypeII, &source)?.density,
            ),
            Figure::Fig2 => {
                let mut steps = iterate(TransformKind::TypeIII, &source, 2)?.steps.into_iter().skip(1);
                let nu1 = steps.next().expect("two steps requested").density;
                let nu2 = steps.next().expect("two steps requested").density;
                (nu1, nu2)
            }
        };
        Ok(Self { figure, source, first, second })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let [a, b] = self.figure.columns();
        writeln!(w, "x,f,{a},{b}")?;
        let rows = self.source.values().iter().zip(self.first.values()).zip(self.second.values());
        for (x, ((f, p), q)) in self.source.nodes().zip(rows) {
            writeln!(w, "{},{},{},{}", fmt_f64(x), fmt_f64(*f), fmt_f64(*p), fmt_f64(*q))?;
        }
        Ok(())
    }
}

/// Number of separate rises-then-falls in `values`, ignoring steps that
/// are smaller than `rel_tol` times the largest value.
pub fn count_modes(values: &[f64], rel_tol: f64) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = rel_tol * peak;
    let mut modes = 0;
    let mut rising = true;
    let mut last = values.first().copied().unwrap_or(0.0);
    for &v in &values[1..] {
        if v > last + tol {
            rising = true;
            last = v;
        } else if v < last - tol {
            if rising {
                modes += 1;
            }
            rising = false;
            last = v;
        }
    }
    if rising && values.len() > 1 {
        modes += 1;
    }
    modes
}
