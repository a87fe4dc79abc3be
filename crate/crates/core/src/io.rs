//! Fixed-format number rendering shared by every CSV writer.

/// Renders `v` with 17 significant digits in scientific notation, so that
/// output is byte-identical across runs and round-trips through `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, -2.5e-300, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
