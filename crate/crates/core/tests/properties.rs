use std::f64::consts::PI;

use derangetropy::ode::residual;
use derangetropy::spectral::{
    char_function, t_operator, uniform_cf, uniform_closed_form_cf, CharFunction, FrequencyGrid,
};
use derangetropy::transform::{kernel, transform};
use derangetropy::{DistributionSpec, Family, GridDensity, TransformKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (-3.0f64..3.0, 0.2f64..4.0).prop_map(|(a, w)| DistributionSpec::uniform(a, a + w).unwrap()),
        (-3.0f64..3.0, 0.2f64..3.0).prop_map(|(m, s)| DistributionSpec::normal(m, s).unwrap()),
        (0.2f64..5.0).prop_map(|r| DistributionSpec::exponential(r).unwrap()),
        (-3.0f64..3.0, 0.2f64..3.0).prop_map(|(c, r)| DistributionSpec::semicircle(c, r).unwrap()),
        (-3.0f64..3.0, 0.2f64..4.0).prop_map(|(a, w)| DistributionSpec::arcsine(a, a + w).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cdf_derivative_matches_pdf(spec in spec_strategy(), s in 0.05f64..0.95) {
        let (a, b) = spec.effective_support();
        let x = a + s * (b - a);
        let h = 1e-5 * (b - a);
        let fd = (spec.cdf(x + h) - spec.cdf(x - h)) / (2.0 * h);
        let p = spec.pdf(x);
        prop_assume!(p > 1e-6);
        prop_assert!((fd - p).abs() <= 1e-6 * p, "{spec}: {fd} vs {p}");
    }

    #[test]
    fn effective_support_holds_the_mass(spec in spec_strategy()) {
        let (a, b) = spec.effective_support();
        prop_assert!(spec.cdf(b) - spec.cdf(a) >= 1.0 - 1e-12);
    }

    #[test]
    fn transforms_normalize_and_keep_the_median(spec in spec_strategy()) {
        let g = GridDensity::from_analytic(&spec, 4097).unwrap();
        let m = spec.median();
        for kind in TransformKind::ALL {
            let t = transform(kind, &g).unwrap();
            prop_assert!((t.density.integrate() - 1.0).abs() <= 1e-6);
            prop_assert!(t.integral_error() <= 1e-4, "{spec} {kind}: {}", t.integral_error());
            prop_assert!((t.density.cdf().at(m) - 0.5).abs() <= 1e-4, "{spec} {kind}");
        }
    }

    #[test]
    fn type3_cdf_is_phase_map_of_source(spec in spec_strategy()) {
        let g = GridDensity::from_analytic(&spec, 4097).unwrap();
        let nu = transform(TransformKind::TypeIII, &g).unwrap().density;
        for (z, w) in g.cdf().values().iter().zip(nu.cdf().values()) {
            prop_assert!((w - (z - (2.0 * PI * z).sin() / (2.0 * PI))).abs() <= 1e-6);
        }
    }

    #[test]
    fn char_functions_hermitian_and_bounded(spec in spec_strategy()) {
        let g = GridDensity::from_analytic(&spec, 2049).unwrap();
        let grid = FrequencyGrid::new(64, 10.0).unwrap();
        let phi = char_function(&g, grid);
        prop_assert!((phi.at_zero().norm() - 1.0).abs() <= 1e-9);
        for k in 0..=grid.half_len() as i64 {
            let (p, n) = (phi.at(k).unwrap(), phi.at(-k).unwrap());
            prop_assert!((p - n.conj()).norm() <= 1e-9);
            prop_assert!(p.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn shift_operator_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, w in 0.5f64..3.0) {
        let grid = FrequencyGrid::new(16, 30.0).unwrap();
        let p = CharFunction::from_fn(grid, uniform_cf);
        let q = CharFunction::from_fn(grid, |t| Complex64::new((-0.5 * (w * t).powi(2)).exp(), 0.0));
        let mix = CharFunction::from_fn(grid, |t| a * uniform_cf(t) + b * (-0.5 * (w * t).powi(2)).exp());
        let (tp, tq, tm) = (t_operator(&p).unwrap(), t_operator(&q).unwrap(), t_operator(&mix).unwrap());
        for ((x, y), z) in tp.values().iter().zip(tq.values()).zip(tm.values()) {
            prop_assert!((a * x + b * y - z).norm() <= 1e-12);
        }
    }

    #[test]
    fn uniform_closed_form_hermitian(t in -40.0f64..40.0) {
        prop_assert!((uniform_closed_form_cf(-t) - uniform_closed_form_cf(t).conj()).norm() <= 1e-12);
        prop_assert!(uniform_closed_form_cf(t).norm() <= 1.5 + 1e-12);
    }

    #[test]
    fn ode_residuals_vanish(z in 0.05f64..0.95) {
        for kind in TransformKind::ALL {
            prop_assert!(residual(kind, &[z]).unwrap().max_abs_residual <= 1e-8);
        }
    }

    #[test]
    fn kernels_obey_their_bounds(z in 0.0f64..=1.0) {
        prop_assert!(kernel(TransformKind::TypeI, z) <= 1.4052);
        prop_assert!(kernel(TransformKind::TypeII, z) <= 1.7306);
        prop_assert!(kernel(TransformKind::TypeIII, z) <= 2.0);
    }
}

#[test]
fn reference_families_are_the_unit_parameterisations() {
    for f in Family::ALL {
        let spec = f.reference();
        assert_eq!(spec.family(), f);
        assert_eq!(DistributionSpec::from_params(f, &[]).unwrap(), spec);
    }
}
