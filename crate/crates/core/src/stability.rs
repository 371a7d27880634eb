//! Linear stability functions.
//!
//! For a tableau `(A, b, c)` the stability function is
//! `R(z) = 1 + z b·(I - zA)^{-1} 1`. A predictor-corrector scheme with `m`
//! corrections has the polynomial stability function
//! `1 + z b·1 + z² b·A1 + ... + z^{m+1} b·A^m 1`. Since the `n`-th Taylor
//! coefficient of `R` at the origin is `b·A^{n-1} 1`, that polynomial is the
//! degree-`m+1` Taylor polynomial of `R`. [`verify_main_theorem`] checks this
//! numerically against an independent series division of the closed form.
//!
//! All power-series coefficients here are Taylor-normalized: entry `n` is
//! `R^{(n)}(0) / n!`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polyalg::{
    max_coeff_discrepancy, poly_roots, series_div, Polynomial, PowerSeries, RationalFunction,
};
use crate::tableau::{ButcherTableau, PCScheme};

/// Largest per-coefficient discrepancy accepted by [`verify_main_theorem`].
pub const THEOREM_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// LU factorization with partial pivoting, in place. Returns the row
/// permutation sign, or `None` if a pivot is below `tiny`.
fn lu_in_place(m: &mut [Vec<Complex64>], perm: &mut [usize], tiny: f64) -> Option<f64> {
    let n = m.len();
    let mut sign = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
            .expect("non-empty pivot range");
        if m[p][k].norm() <= tiny {
            return None;
        }
        if p != k {
            m.swap(p, k);
            perm.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            let factor = m[i][k] / m[k][k];
            m[i][k] = factor;
            let (upper, lower) = m.split_at_mut(i);
            for (x, u) in lower[0][k + 1..n].iter_mut().zip(&upper[k][k + 1..n]) {
                *x -= factor * u;
            }
        }
    }
    Some(sign)
}

fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    match lu_in_place(&mut m, &mut perm, 0.0) {
        Some(sign) => (0..n).fold(Complex64::new(sign, 0.0), |acc, k| acc * m[k][k]),
        None => ZERO,
    }
}

/// `I - zA` as a complex matrix.
fn shifted(a: &[Vec<f64>], z: Complex64) -> Vec<Vec<Complex64>> {
    a.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &x)| if i == j { ONE - z * x } else { -z * x })
                .collect()
        })
        .collect()
}

/// `R(z) = 1 + z b·w` with `(I - zA) w = 1`, solved by dense LU with partial
/// pivoting. Fails with [`Error::Pole`] when `I - zA` is numerically singular.
pub fn stability_value(t: &ButcherTableau, z: Complex64) -> Result<Complex64> {
    let s = t.stages();
    let mut m = shifted(t.a(), z);
    let scale = 1.0
        + z.norm()
            * t.a()
                .iter()
                .flatten()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut perm: Vec<usize> = (0..s).collect();
    lu_in_place(&mut m, &mut perm, 1e-14 * scale).ok_or(Error::Pole { z })?;
    // Forward then backward substitution on the permuted right-hand side of ones.
    let mut w = vec![ONE; s];
    for i in 0..s {
        for j in 0..i {
            let l = m[i][j];
            w[i] = w[i] - l * w[j];
        }
    }
    for i in (0..s).rev() {
        for j in i + 1..s {
            let u = m[i][j];
            w[i] = w[i] - u * w[j];
        }
        w[i] /= m[i][i];
    }
    let bw: Complex64 = t.b().iter().zip(&w).map(|(&b, &x)| x * b).sum();
    Ok(ONE + z * bw)
}

/// Closed-form stability function of a tableau.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityFunction {
    /// `num/den` with `den(0) = 1`.
    pub rational: RationalFunction,
    /// Name of the tableau it came from.
    pub source: String,
}

impl StabilityFunction {
    /// `true` when the denominator is the constant 1 (explicit tableaux).
    pub fn is_polynomial(&self) -> bool {
        self.rational.den().degree() == 0
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.rational.eval(z)
    }
}

/// Coefficients of a polynomial of degree `< n` from its values at the
/// `n`-th roots of unity (inverse DFT).
fn interpolate_on_unit_circle(n: usize, f: impl Fn(Complex64) -> Complex64) -> Vec<f64> {
    let nodes: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect();
    let values: Vec<Complex64> = nodes.iter().map(|&z| f(z)).collect();
    (0..n)
        .map(|k| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * Complex64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64)
                })
                .sum();
            sum.re / n as f64
        })
        .collect()
}

/// `R(z) = det(I - zA + z 1 b^T) / det(I - zA)`.
///
/// Both determinants are polynomials of degree at most `s`; they are
/// recovered exactly (up to rounding) from `s + 1` samples on the unit
/// circle.
pub fn stability_function(t: &ButcherTableau) -> StabilityFunction {
    let s = t.stages();
    let den = interpolate_on_unit_circle(s + 1, |z| determinant(shifted(t.a(), z)));
    let num = interpolate_on_unit_circle(s + 1, |z| {
        let mut m = shifted(t.a(), z);
        for row in m.iter_mut() {
            for (x, &bj) in row.iter_mut().zip(t.b()) {
                *x += z * bj;
            }
        }
        determinant(m)
    });
    let rational = RationalFunction::new(Polynomial::new(num), Polynomial::new(den))
        .expect("det(I) = 1 at the origin")
        .normalized();
    StabilityFunction {
        rational,
        source: t.name().to_string(),
    }
}

/// `[1, b·1, b·A1, ..., b·A^{len-2} 1]`, by repeated products `v <- A v`.
fn weighted_krylov(t: &ButcherTableau, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    out.push(1.0);
    let mut v = vec![1.0; t.stages()];
    while out.len() < len {
        out.push(t.weigh(&v));
        v = t.apply_a(&v);
    }
    out
}

/// Stability polynomial of a predictor-corrector scheme:
/// coefficient `n + 1` is `b·A^n 1` for `n = 0..=m`.
pub fn pc_stability_polynomial(scheme: &PCScheme) -> Polynomial {
    Polynomial::new(weighted_krylov(&scheme.corrector, scheme.m + 2))
}

/// Taylor coefficients of `R` at the origin from the derivative formula
/// `R^{(n)}(0) = n! b·A^{n-1} 1`, with the `n!` divided out.
pub fn taylor_coefficients(t: &ButcherTableau, order: usize) -> PowerSeries {
    PowerSeries::new(weighted_krylov(t, order + 1))
}

/// Per-`m` result of [`verify_main_theorem`].
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremCheck {
    pub m: usize,
    pub pc_polynomial: Polynomial,
    pub taylor: PowerSeries,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub tableau: String,
    pub checks: Vec<TheoremCheck>,
}

impl TheoremReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.discrepancy)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.discrepancy <= THEOREM_TOL)
    }
}

/// Compares the scheme polynomial for every `m <= m_max` against the
/// degree-`m+1` truncation of the series division of the closed form.
pub fn verify_main_theorem(t: &ButcherTableau, m_max: usize) -> TheoremReport {
    let r = stability_function(t);
    let checks = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let pc_polynomial = pc_stability_polynomial(&PCScheme::new(t.clone(), m));
            let taylor = series_div(r.rational.num(), r.rational.den(), m + 1).expect("den(0) = 1");
            let discrepancy = max_coeff_discrepancy(pc_polynomial.coeffs(), taylor.coeffs());
            TheoremCheck {
                m,
                pc_polynomial,
                taylor,
                discrepancy,
            }
        })
        .collect();
    TheoremReport {
        tableau: t.name().to_string(),
        checks,
    }
}

/// Poles of the stability function and the radius of convergence of its
/// Taylor series at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Poles {
    pub poles: Vec<Complex64>,
    /// `min |pole|`; infinite for polynomial stability functions.
    pub radius: f64,
}

pub fn poles_and_radius(t: &ButcherTableau) -> Result<Poles> {
    let r = stability_function(t);
    let den = r.rational.den();
    if den.degree() == 0 {
        return Ok(Poles {
            poles: Vec::new(),
            radius: f64::INFINITY,
        });
    }
    let mut poles = poly_roots(den)?;
    poles.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let radius = poles.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    Ok(Poles { poles, radius })
}

/// Stability series of a scheme whose predictor is the explicit method
/// `Y0 = y + h P F(Y0)` instead of explicit Euler, followed by `m`
/// corrections with `A` and the weights `b`.
///
/// Computed as a truncated vector series: `v0 = (I - zP)^{-1} 1`,
/// `v_k = 1 + z A v_{k-1}`, result `1 + z b·v_m`, all to order `order`.
/// `P = 0` reproduces the Euler-predictor polynomial.
pub fn general_predictor_series(
    predictor: &[Vec<f64>],
    corrector: &ButcherTableau,
    m: usize,
    order: usize,
) -> Result<PowerSeries> {
    let s = corrector.stages();
    if predictor.len() != s || predictor.iter().any(|row| row.len() != s) {
        return Err(Error::Precondition(format!(
            "predictor matrix must be {s}x{s} to match the corrector"
        )));
    }
    if predictor
        .iter()
        .enumerate()
        .any(|(i, row)| row[i..].iter().any(|&x| x != 0.0))
    {
        return Err(Error::Precondition(
            "predictor matrix must be strictly lower triangular".into(),
        ));
    }
    let mat_vec = |m: &[Vec<f64>], v: &[f64]| -> Vec<f64> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    };
    // series[n] is the stage vector multiplying z^n.
    let mut series: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    series.push(vec![1.0; s]);
    for n in 1..=order {
        series.push(mat_vec(predictor, &series[n - 1]));
    }
    for _ in 0..m {
        let mut next = vec![vec![0.0; s]; order + 1];
        next[0] = vec![1.0; s];
        for n in 1..=order {
            next[n] = corrector.apply_a(&series[n - 1]);
        }
        series = next;
    }
    let mut out = vec![0.0; order + 1];
    out[0] = 1.0;
    for n in 1..=order {
        out[n] = corrector.weigh(&series[n - 1]);
    }
    Ok(PowerSeries::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::coeffs_close;
    use crate::tableau::{builtin, compose_pc_tableau, BUILTIN_NAMES};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn value_examples() {
        for name in BUILTIN_NAMES {
            assert_eq!(
                stability_value(&builtin(name).unwrap(), c(0.0)).unwrap(),
                c(1.0)
            );
        }
        let r = stability_value(&builtin("radau-iia-2").unwrap(), c(1.0)).unwrap();
        assert!((r - c(8.0 / 3.0)).norm() < 1e-14);
        let r = stability_value(&builtin("explicit-euler").unwrap(), c(-2.0)).unwrap();
        assert_eq!(r, c(-1.0));
    }

    #[test]
    fn value_at_pole_is_an_error() {
        let t = builtin("radau-iia-2").unwrap();
        let pole = Complex64::new(2.0, 2f64.sqrt());
        assert!(matches!(stability_value(&t, pole), Err(Error::Pole { .. })));
    }

    #[test]
    fn closed_forms() {
        let r = stability_function(&builtin("radau-iia-2").unwrap());
        assert!(coeffs_close(r.rational.num().coeffs(), &[1.0, 1.0 / 3.0]));
        assert!(coeffs_close(
            r.rational.den().coeffs(),
            &[1.0, -2.0 / 3.0, 1.0 / 6.0]
        ));
        assert_eq!(r.rational.num().degree(), 1);
        assert_eq!(r.rational.den().degree(), 2);

        let r = stability_function(&builtin("explicit-euler").unwrap());
        assert!(coeffs_close(r.rational.num().coeffs(), &[1.0, 1.0]));
        assert!(r.is_polynomial());

        let composed = compose_pc_tableau(&PCScheme::builtin("radau-iia-2", 2).unwrap());
        let r = stability_function(&composed);
        assert_eq!(r.rational.den().coeffs(), &[1.0]);
        assert!(coeffs_close(
            r.rational.num().coeffs(),
            &[1.0, 1.0, 0.5, 1.0 / 6.0]
        ));
    }

    #[test]
    fn closed_form_matches_direct_value() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            let r = stability_function(&t);
            for re in [-3.0, -1.5, -0.4, 0.3, 0.9] {
                for im in [-2.0, -0.7, 0.0, 1.1, 2.5] {
                    let z = Complex64::new(re, im);
                    let direct = stability_value(&t, z).unwrap();
                    assert!((direct - r.eval(z)).norm() <= 1e-10, "{name} at {z}");
                }
            }
        }
    }

    #[test]
    fn pc_polynomial_examples() {
        let p = pc_stability_polynomial(&PCScheme::builtin("radau-iia-2", 2).unwrap());
        assert!(coeffs_close(p.coeffs(), &[1.0, 1.0, 0.5, 1.0 / 6.0]));
        for name in BUILTIN_NAMES {
            let p = pc_stability_polynomial(&PCScheme::builtin(name, 0).unwrap());
            assert!(coeffs_close(p.coeffs(), &[1.0, 1.0]));
        }
        let p = pc_stability_polynomial(&PCScheme::builtin("radau-iia-2", 3).unwrap());
        assert!(coeffs_close(
            p.coeffs(),
            &[1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 36.0]
        ));
    }

    #[test]
    fn taylor_coefficient_examples() {
        let t = taylor_coefficients(&builtin("radau-iia-2").unwrap(), 5);
        assert!(coeffs_close(&t.coeffs()[..4], &[1.0, 1.0, 0.5, 1.0 / 6.0]));
        assert!(coeff_eq(t.coeff(5), -1.0 / 108.0));
        let t = taylor_coefficients(&builtin("explicit-euler").unwrap(), 3);
        assert_eq!(t.coeffs(), &[1.0, 1.0, 0.0, 0.0]);
    }

    fn coeff_eq(a: f64, b: f64) -> bool {
        crate::polyalg::coeff_close(a, b)
    }

    #[test]
    fn theorem_holds_for_builtins() {
        for name in BUILTIN_NAMES {
            let report = verify_main_theorem(&builtin(name).unwrap(), 10);
            assert!(report.passed(), "{name}: {}", report.max_discrepancy());
            assert_eq!(report.checks.len(), 11);
        }
    }

    #[test]
    fn optimal_order_gives_exponential_taylor() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            let p = t.order() as usize;
            let poly = pc_stability_polynomial(&PCScheme::new(t, p - 1));
            let mut fact = 1.0;
            for n in 0..=p {
                if n > 0 {
                    fact *= n as f64;
                }
                assert!(coeff_eq(poly.coeff(n), 1.0 / fact), "{name} n={n}");
            }
        }
    }

    #[test]
    fn radau_pair_share_stability_function() {
        let iia = stability_function(&builtin("radau-iia-2").unwrap());
        let ia = stability_function(&builtin("radau-ia-2").unwrap());
        assert!(coeffs_close(
            iia.rational.num().coeffs(),
            ia.rational.num().coeffs()
        ));
        assert!(coeffs_close(
            iia.rational.den().coeffs(),
            ia.rational.den().coeffs()
        ));
    }

    #[test]
    fn pole_examples() {
        let p = poles_and_radius(&builtin("radau-iia-2").unwrap()).unwrap();
        let s2 = 2f64.sqrt();
        assert!((p.poles[0] - Complex64::new(2.0, -s2)).norm() < 1e-10);
        assert!((p.poles[1] - Complex64::new(2.0, s2)).norm() < 1e-10);
        assert!((p.radius - 6f64.sqrt()).abs() < 1e-10);

        let p = poles_and_radius(&builtin("explicit-euler").unwrap()).unwrap();
        assert!(p.poles.is_empty());
        assert!(p.radius.is_infinite());

        let p = poles_and_radius(&builtin("hammer-hollingsworth-2").unwrap()).unwrap();
        assert_eq!(p.poles.len(), 2);
        assert!((p.poles[0] - p.poles[1].conj()).norm() < 1e-10);
        assert!((p.radius - 12f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn zero_predictor_reduces_to_euler() {
        let t = builtin("radau-iia-2").unwrap();
        let zero = vec![vec![0.0; 2]; 2];
        let g = general_predictor_series(&zero, &t, 2, 6).unwrap();
        assert!(coeffs_close(
            g.coeffs(),
            &[1.0, 1.0, 0.5, 1.0 / 6.0, 0.0, 0.0, 0.0]
        ));
        for m in 0..5 {
            let g = general_predictor_series(&zero, &t, m, m + 3).unwrap();
            let p = pc_stability_polynomial(&PCScheme::new(t.clone(), m));
            assert!(coeffs_close(g.coeffs(), p.coeffs()));
        }
    }

    #[test]
    fn general_predictor_rejects_implicit_predictor() {
        let t = builtin("radau-iia-2").unwrap();
        let p = vec![vec![0.5, 0.0], vec![0.0, 0.0]];
        assert!(matches!(
            general_predictor_series(&p, &t, 1, 4),
            Err(Error::Precondition(_))
        ));
        assert!(general_predictor_series(&[vec![0.0]], &t, 1, 4).is_err());
    }

    #[test]
    fn general_predictor_lower_part_of_radau() {
        // Explicit predictor built from the strictly lower part of A.
        let t = builtin("radau-iia-2").unwrap();
        let p = vec![vec![0.0, 0.0], vec![0.75, 0.0]];
        let g = general_predictor_series(&p, &t, 1, 4).unwrap();
        // v0 = [1, 1 + 3z/4]; the z^3 term is b·A P 1 = -3/64 + 3/64 = 0,
        // so the series departs from R's Taylor coefficient 1/6.
        let expected = [1.0, 1.0, 0.5, 0.0, 0.0];
        assert!(coeffs_close(g.coeffs(), &expected), "{:?}", g.coeffs());
    }
}
