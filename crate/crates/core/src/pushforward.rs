//! Exact composition of the functionals through their CDF maps.
//!
//! If `F_k` is the CDF after `k` applications of a functional with kernel
//! `k(z)`, then `F_{k+1} = K(F_k)` with `K(z) = int_0^z k`, and the density
//! is `f_k(x) = f_0(x) * prod_{j<k} k(F_j(x))`. Both quantities are
//! pointwise in `x`, so the `k`-th iterate can be sampled on any grid
//! without carrying the previous grids along. Probabilities are tracked as
//! offsets `u = F - 1/2` from the median, where the iterates concentrate.

use std::f64::consts::{E, PI};

use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{simpson, GridCdf, GridDensity};
use crate::transform::TransformKind;

const TABLE_INTERVALS: usize = 4096;
const CELL_SUBINTERVALS: usize = 16;
const BISECTION_STEPS: usize = 200;

/// Tail probability left outside each resampling window.
pub const WINDOW_TAIL: f64 = 1e-12;

#[inline]
fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Kernel evaluated at `z = 1/2 + u`, computed from `u` directly.
pub(crate) fn centered_kernel(kind: TransformKind, u: f64) -> f64 {
    let u = u.clamp(-0.5, 0.5);
    let c = (PI * u).cos();
    match kind {
        TransformKind::TypeIII => 2.0 * c * c,
        TransformKind::TypeI => 24.0 / (PI * E) * c * (xlnx(0.5 + u) + xlnx(0.5 - u)).exp(),
        TransformKind::TypeII => E / PI * c * (-(xlnx(0.5 + u) + xlnx(0.5 - u))).exp(),
    }
}

/// `u -> K(1/2 + u) - 1/2` for one functional.
#[derive(Debug, Clone)]
pub(crate) enum CdfMap {
    /// `u + sin(2 pi u) / (2 pi)`, exact.
    Phase,
    /// Odd extension of a Hermite table of `K` on `u` in `[0, 1/2]`.
    Tabulated { kind: TransformKind, step: f64, k: Vec<f64>, slope: Vec<f64> },
}

impl CdfMap {
    pub fn new(kind: TransformKind) -> Self {
        match kind {
            TransformKind::TypeIII => CdfMap::Phase,
            _ => {
                let step = 0.5 / TABLE_INTERVALS as f64;
                let slope: Vec<f64> = (0..=TABLE_INTERVALS)
                    .map(|j| centered_kernel(kind, j as f64 * step))
                    .collect();
                let mut k = vec![0.0; TABLE_INTERVALS + 1];
                let sub = step / CELL_SUBINTERVALS as f64;
                for j in 0..TABLE_INTERVALS {
                    let a = j as f64 * step;
                    let samples: Vec<f64> = (0..=CELL_SUBINTERVALS)
                        .map(|i| centered_kernel(kind, a + i as f64 * sub))
                        .collect();
                    k[j + 1] = k[j] + simpson(&samples, sub);
                }
                CdfMap::Tabulated { kind, step, k, slope }
            }
        }
    }

    pub fn apply(&self, u: f64) -> f64 {
        match self {
            CdfMap::Phase => (u + (2.0 * PI * u).sin() / (2.0 * PI)).clamp(-0.5, 0.5),
            CdfMap::Tabulated { step, k, slope, .. } => {
                let a = u.abs().min(0.5);
                let pos = a / step;
                let j = (pos.floor() as usize).min(k.len() - 2);
                let s = pos - j as f64;
                let (s2, s3) = (s * s, s * s * s);
                let p = (2.0 * s3 - 3.0 * s2 + 1.0) * k[j]
                    + (s3 - 2.0 * s2 + s) * step * slope[j]
                    + (-2.0 * s3 + 3.0 * s2) * k[j + 1]
                    + (s3 - s2) * step * slope[j + 1];
                p.clamp(0.0, 0.5).copysign(u)
            }
        }
    }

    pub fn kind(&self) -> TransformKind {
        match self {
            CdfMap::Phase => TransformKind::TypeIII,
            CdfMap::Tabulated { kind, .. } => *kind,
        }
    }
}

/// Source density as a `C^1` Hermite interpolant, plus the iteration map.
pub(crate) struct Pushforward {
    cdf: GridCdf,
    map: CdfMap,
    median: f64,
    lo: f64,
    hi: f64,
}

impl Pushforward {
    pub fn new(kind: TransformKind, source: &GridDensity) -> Self {
        let cdf = source.cdf();
        let median = cdf.quantile(0.5);
        Self { median, lo: source.lo(), hi: source.hi(), cdf, map: CdfMap::new(kind) }
    }

    pub fn median(&self) -> f64 {
        self.median
    }

    /// `(F_k - 1/2, f_k)` at `x = median + delta`.
    pub fn evaluate(&self, delta: f64, steps: usize) -> (f64, f64) {
        let x = self.median + delta;
        let mut u = self.cdf.at(x) - 0.5;
        let mut w = self.cdf.density_at(x);
        let kind = self.map.kind();
        for _ in 0..steps {
            w *= centered_kernel(kind, u);
            u = self.map.apply(u);
        }
        (u, w)
    }

    fn bisect(&self, steps: usize, mut inside: f64, mut outside: f64, target: f64) -> f64 {
        let below = |d: f64| self.evaluate(d, steps).0 < target;
        let inside_below = below(inside);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if below(mid) == inside_below {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        outside
    }

    /// Offsets `[lo, hi]` from the median outside of which the `k`-th
    /// iterate holds at most [`WINDOW_TAIL`] mass on each side.
    pub fn window(&self, steps: usize) -> (f64, f64) {
        let left = self.bisect(steps, 0.0, self.lo - self.median, WINDOW_TAIL - 0.5);
        let right = self.bisect(steps, 0.0, self.hi - self.median, 0.5 - WINDOW_TAIL);
        (left.max(self.lo - self.median), right.min(self.hi - self.median))
    }

    /// The `k`-th iterate on `n` nodes spanning its window, in offsets from
    /// the source median. Not renormalised.
    pub fn sample(&self, steps: usize, n: usize) -> Result<GridDensity> {
        let (lo, hi) = self.window(steps);
        let h = (hi - lo) / (n - 1) as f64;
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| self.evaluate(if i == n - 1 { hi } else { lo + i as f64 * h }, steps).1)
            .collect();
        GridDensity::new(lo, hi, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Family;
    use crate::transform::kernel;
    use approx::assert_abs_diff_eq;

    #[test]
    fn centered_kernel_matches_kernel() {
        for kind in TransformKind::ALL {
            for i in 0..=100 {
                let z = i as f64 / 100.0;
                assert_abs_diff_eq!(centered_kernel(kind, z - 0.5), kernel(kind, z), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn maps_fix_median_and_ends() {
        for kind in TransformKind::ALL {
            let m = CdfMap::new(kind);
            assert_eq!(m.apply(0.0), 0.0);
            assert_abs_diff_eq!(m.apply(0.5), 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(m.apply(-0.5), -0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn tabulated_map_matches_quadrature() {
        use crate::grid::simpson_fn;
        for kind in [TransformKind::TypeI, TransformKind::TypeII] {
            let m = CdfMap::new(kind);
            for &z in &[0.01, 0.2, 0.37, 0.5, 0.73, 0.99] {
                let want = simpson_fn(|w| kernel(kind, w), 0.0, z, 20001).unwrap() - 0.5;
                assert_abs_diff_eq!(m.apply(z - 0.5), want, epsilon = 1e-9);
            }
            // slope at the median is the kernel peak
            let u = 1e-9;
            assert_abs_diff_eq!(m.apply(u) / u, kernel(kind, 0.5), epsilon = 1e-6);
        }
    }

    #[test]
    fn phase_map_is_type3_cdf() {
        let m = CdfMap::Phase;
        for i in 1..20 {
            let z = i as f64 / 20.0;
            let want = z - (2.0 * PI * z).sin() / (2.0 * PI);
            assert_abs_diff_eq!(m.apply(z - 0.5) + 0.5, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn one_step_matches_grid_transform() {
        let g = GridDensity::from_analytic(&Family::Normal.reference(), 4097).unwrap();
        let p = Pushforward::new(TransformKind::TypeIII, &g);
        let t = crate::transform::transform(TransformKind::TypeIII, &g).unwrap();
        for i in (100..4000).step_by(97) {
            let (_, f1) = p.evaluate(g.x(i) - p.median(), 1);
            assert_abs_diff_eq!(f1, t.density.values()[i], epsilon = 1e-7);
        }
    }

    #[test]
    fn windows_shrink_with_steps() {
        let g = GridDensity::from_analytic(&Family::Uniform.reference(), 1025).unwrap();
        let p = Pushforward::new(TransformKind::TypeIII, &g);
        let mut prev = f64::INFINITY;
        for k in 0..10 {
            let (lo, hi) = p.window(k);
            assert!(lo < 0.0 && hi > 0.0);
            assert!(hi - lo < prev);
            prev = hi - lo;
        }
    }
}
