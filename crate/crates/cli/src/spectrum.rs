//! Eigenvalue spectra for `maxstep`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::CliError;

/// One eigenvalue per line as `re im` (or just `re`); blank lines and lines
/// starting with `#` are skipped.
pub fn parse_spectrum(text: &str) -> Result<Vec<Complex64>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| {
                CliError::usage(format!("spectrum line {}: `{s}` is not a number", n + 1))
            })
        };
        let z = match fields.as_slice() {
            [re] => Complex64::new(parse(re)?, 0.0),
            [re, im] => Complex64::new(parse(re)?, parse(im)?),
            _ => {
                return Err(CliError::usage(format!(
                    "spectrum line {}: expected `re im`, got `{line}`",
                    n + 1
                )))
            }
        };
        out.push(z);
    }
    if out.is_empty() {
        return Err(CliError::usage("spectrum file contains no eigenvalues"));
    }
    Ok(out)
}

/// Eigenvalues `-(1 - cos θ_k) - i sin θ_k`, `θ_k = 2πk/n`, of first-order
/// upwind differencing for `u_t + u_x = 0` on a periodic grid (unit CFL
/// scaling).
pub fn upwind_spectrum(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            Complex64::new(-(1.0 - theta.cos()), -theta.sin())
        })
        .collect()
}
