//! CDF-driven reweighting of one-dimensional densities.
//!
//! A functional reweights a density by a kernel of its own CDF,
//! `nu(x) = k(F(x)) f(x)`, with three kernels:
//!
//! * Type-I, `k(z) = 24 / (pi e) * sin(pi z) * z^z (1 - z)^(1 - z)`
//! * Type-II, `k(z) = e / pi * sin(pi z) / (z^z (1 - z)^(1 - z))`
//! * Type-III, `k(z) = 2 sin^2(pi z)`
//!
//! Densities live on uniform grids ([`GridDensity`]) and are integrated by
//! composite Simpson quadrature. The crate also carries the differential
//! equations the transformed densities satisfy ([`ode`]), characteristic
//! function tools ([`spectral`]) and self-checks ([`checks`]).

pub mod checks;
pub mod distributions;
mod error;
pub mod figures;
pub mod grid;
pub mod io;
pub mod ode;
mod pushforward;
pub mod spectral;
pub mod transform;

pub use distributions::{DistributionSpec, Family};
pub use error::{Error, Result};
pub use grid::{GridCdf, GridDensity};
pub use spectral::{CharFunction, FrequencyGrid};
pub use transform::{iterate, transform, IterationTrace, TransformKind, Transformed};
