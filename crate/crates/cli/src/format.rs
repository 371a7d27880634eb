//! Number formatting for tables and data files.

/// `x` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// `x` with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `p/q` with `q <= 5040` when that matches `x` to 1e-12.
pub fn rational(x: f64) -> Option<String> {
    (1..=5040i64).find_map(|q| {
        let p = (x * q as f64).round();
        ((x - p / q as f64).abs() <= 1e-12 * x.abs().max(1.0)).then(|| {
            if q == 1 {
                format!("{}", p as i64)
            } else {
                format!("{}/{q}", p as i64)
            }
        })
    })
}
