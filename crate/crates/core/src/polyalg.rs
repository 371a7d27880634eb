//! Real-coefficient polynomials, truncated power series, complex root
//! finding and scalar bisection.
//!
//! Coefficients are stored in ascending order: `coeffs[k]` multiplies `z^k`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for coefficient comparisons.
pub const COEFF_REL_TOL: f64 = 1e-12;
/// Absolute floor for coefficient comparisons and for canonical trimming.
pub const COEFF_ABS_FLOOR: f64 = 1e-14;
/// Residual bound for computed roots, relative to the largest coefficient.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;

/// `true` when `a` and `b` agree to [`COEFF_REL_TOL`] relative, or to
/// [`COEFF_ABS_FLOOR`] absolute, whichever is looser.
pub fn coeff_close(a: f64, b: f64) -> bool {
    let diff = (a - b).abs();
    diff <= COEFF_ABS_FLOOR || diff <= COEFF_REL_TOL * a.abs().max(b.abs())
}

/// Largest absolute difference between two coefficient sequences, padding
/// the shorter one with zeros.
pub fn max_coeff_discrepancy(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Coefficient-wise [`coeff_close`] with zero padding.
pub fn coeffs_close(a: &[f64], b: &[f64]) -> bool {
    (0..a.len().max(b.len())).all(|k| {
        coeff_close(
            a.get(k).copied().unwrap_or(0.0),
            b.get(k).copied().unwrap_or(0.0),
        )
    })
}

/// A polynomial with real coefficients in canonical form: the highest
/// coefficient is nonzero, or the coefficient vector is empty for the zero
/// polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, trimming trailing coefficients below
    /// [`COEFF_ABS_FLOOR`].
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last().is_some_and(|c| c.abs() < COEFF_ABS_FLOOR) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![1.0] }
    }

    /// The monic polynomial `prod (z - r)` over real roots and conjugate
    /// pairs `(a ± ib)`, given as `(a, b)`.
    pub fn from_roots(real: &[f64], conjugate_pairs: &[(f64, f64)]) -> Self {
        let mut p = Polynomial::one();
        for &r in real {
            p = p.mul(&Polynomial::new(vec![-r, 1.0]));
        }
        for &(a, b) in conjugate_pairs {
            p = p.mul(&Polynomial::new(vec![a * a + b * b, -2.0 * a, 1.0]));
        }
        p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Horner evaluation at a real point.
    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c.abs())?,
                1 => write!(f, "{}·z", c.abs())?,
                _ => write!(f, "{}·z^{k}", c.abs())?,
            }
        }
        Ok(())
    }
}

/// A ratio `num/den` of real polynomials whose denominator does not vanish
/// at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Domain("denominator is identically zero".into()));
        }
        if den.coeff(0) == 0.0 {
            return Err(Error::Domain(
                "denominator vanishes at the origin: series at origin undefined".into(),
            ));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Rescales numerator and denominator so that `den(0) = 1`.
    pub fn normalized(&self) -> RationalFunction {
        let d0 = self.den.coeff(0);
        let scale = |p: &Polynomial| Polynomial::new(p.coeffs().iter().map(|c| c / d0).collect());
        RationalFunction {
            num: scale(&self.num),
            den: scale(&self.den),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Taylor coefficients at the origin up to `z^order`.
    pub fn taylor(&self, order: usize) -> PowerSeries {
        series_div(&self.num, &self.den, order).expect("den(0) != 0 is a type invariant")
    }
}

/// A power series truncated after the `z^order` term.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<f64>,
}

impl PowerSeries {
    /// Builds a series; `coeffs.len() - 1` is the truncation order. Panics on
    /// an empty vector.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a power series has at least one coefficient"
        );
        PowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// Truncates to a lower order, or pads with zeros to a higher one.
    pub fn with_order(&self, order: usize) -> PowerSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        PowerSeries { coeffs }
    }

    /// The series as a polynomial (its Taylor truncation).
    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }
}

/// The first `order + 1` Taylor coefficients of `num/den` at the origin.
///
/// Solves `sum_j den[j] a[n-j] = num[n]` for `a[n]` term by term.
pub fn series_div(num: &Polynomial, den: &Polynomial, order: usize) -> Result<PowerSeries> {
    let d0 = den.coeff(0);
    if d0 == 0.0 {
        return Err(Error::Domain(
            "den(0) = 0: series at origin undefined".into(),
        ));
    }
    let mut a = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let tail: f64 = (1..=n.min(den.degree()))
            .map(|j| den.coeff(j) * a[n - j])
            .sum();
        a.push((num.coeff(n) - tail) / d0);
    }
    Ok(PowerSeries::new(a))
}

const ROOT_MAX_ITER: usize = 1000;

/// All complex roots of `p`, with multiplicity.
///
/// Uses Aberth-Ehrlich simultaneous iteration on the monic polynomial,
/// followed by Newton polishing against the original coefficients. Every
/// returned root satisfies `|p(root)| <= 1e-10 * max|coeff|`.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::Domain("roots of the zero polynomial".into()));
    }
    let n = p.degree();
    if n == 0 {
        return Err(Error::Precondition("root finding needs degree >= 1".into()));
    }
    let lead = p.coeff(n);
    let monic = Polynomial {
        coeffs: p.coeffs().iter().map(|c| c / lead).collect(),
    };
    if n == 1 {
        return Ok(vec![Complex64::new(-monic.coeff(0), 0.0)]);
    }
    let dmonic = monic.derivative();

    // Initial guesses on a circle whose radius bounds the root moduli
    // (Fujiwara bound), rotated off the real axis to break symmetry.
    let radius = (0..n)
        .map(|k| (monic.coeff(k).abs()).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..ROOT_MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let pv = monic.eval(z[i]);
            if pv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / dmonic.eval(z[i]);
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    let dp = p.derivative();
    for root in z.iter_mut() {
        for _ in 0..3 {
            let step = p.eval(*root) / dp.eval(*root);
            if !step.is_finite() {
                break;
            }
            let candidate = *root - step;
            if p.eval(candidate).norm() <= p.eval(*root).norm() {
                *root = candidate;
            } else {
                break;
            }
        }
        // Snap imaginary dust on real roots.
        if root.im.abs() <= 1e-14 * root.re.abs().max(1.0)
            && p.eval(Complex64::new(root.re, 0.0)).norm() <= p.eval(*root).norm()
        {
            root.im = 0.0;
        }
    }

    let bound = ROOT_RESIDUAL_TOL * p.max_abs_coeff();
    if let Some(bad) = z.iter().find(|r| p.eval(**r).norm() > bound) {
        return Err(Error::Domain(format!(
            "root iteration did not converge (residual {:e} at {bad})",
            p.eval(*bad).norm()
        )));
    }
    Ok(z)
}

/// Bisection for a sign change of `f` on `[lo, hi]`; returns the midpoint of
/// the final bracket, whose width is at most `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "bisection needs lo < hi and tol > 0 (got [{lo}, {hi}], tol {tol})"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    let fhi = f(hi);
    if !(flo * fhi < 0.0) {
        return Err(Error::Precondition(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {flo}, f(hi) = {fhi}"
        )));
    }
    let lo_negative = flo < 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Polynomial::new(vec![1.0]).eval(c(3.7)), c(1.0));
        let t3 = Polynomial::new(vec![1.0, 1.0, 0.5, 1.0 / 6.0]);
        assert!((t3.eval(c(-2.0)).re + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(Polynomial::new(vec![1.0, 1.0]).eval(c(-2.0)), c(-1.0));
    }

    #[test]
    fn canonical_form_strips_trailing_dust() {
        let p = Polynomial::new(vec![1.0, 2.0, 1e-15, 0.0]);
        assert_eq!(p.coeffs(), &[1.0, 2.0]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
    }

    #[test]
    fn geometric_series() {
        let s = series_div(&Polynomial::one(), &Polynomial::new(vec![1.0, -1.0]), 4).unwrap();
        assert_eq!(s.coeffs(), &[1.0; 5]);
    }

    #[test]
    fn radau_iia_series() {
        let num = Polynomial::new(vec![1.0, 1.0 / 3.0]);
        let den = Polynomial::new(vec![1.0, -2.0 / 3.0, 1.0 / 6.0]);
        let s = series_div(&num, &den, 5).unwrap();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 36.0, -1.0 / 108.0];
        assert!(coeffs_close(s.coeffs(), &want), "{:?}", s.coeffs());
    }

    #[test]
    fn series_at_pole_is_domain_error() {
        let err = series_div(&Polynomial::one(), &Polynomial::new(vec![0.0, 1.0]), 3);
        assert!(matches!(err, Err(Error::Domain(_))));
        assert!(RationalFunction::new(Polynomial::one(), Polynomial::zero()).is_err());
    }

    #[test]
    fn roots_examples() {
        let r = poly_roots(&Polynomial::new(vec![-2.0, 1.0])).unwrap();
        assert_eq!(r, vec![c(2.0)]);

        let mut r = poly_roots(&Polynomial::new(vec![1.0, -2.0 / 3.0, 1.0 / 6.0])).unwrap();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        let s2 = 2f64.sqrt();
        assert!((r[0] - Complex64::new(2.0, -s2)).norm() < 1e-10);
        assert!((r[1] - Complex64::new(2.0, s2)).norm() < 1e-10);

        let r = poly_roots(&Polynomial::new(vec![1.0, 2.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        for root in r {
            assert!((root - c(-1.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn roots_of_zero_polynomial_rejected() {
        assert!(matches!(
            poly_roots(&Polynomial::zero()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bisect_examples() {
        let x = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-10).unwrap();
        assert!((x - 2f64.sqrt()).abs() <= 1e-10);
        let x = bisect(|x: f64| (1.0 + x).abs() - 1.0, -3.0, -1.0, 1e-10).unwrap();
        assert!((x + 2.0).abs() <= 1e-10);
        let t3 = Polynomial::new(vec![1.0, 1.0, 0.5, 1.0 / 6.0]);
        let x = bisect(|x| t3.eval_real(x).abs() - 1.0, -3.0, -2.0, 1e-10).unwrap();
        assert!((x + 2.5127453266).abs() < 1e-8);
    }

    #[test]
    fn bisect_without_sign_change_rejected() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-6),
            Err(Error::Precondition(_))
        ));
    }

    fn distinct(points: &[Complex64], sep: f64) -> bool {
        points
            .iter()
            .enumerate()
            .all(|(i, a)| points[i + 1..].iter().all(|b| (a - b).norm() >= sep))
    }

    proptest! {
        #[test]
        fn series_times_den_reproduces_num(
            num in prop::collection::vec(-2.0f64..2.0, 1..5),
            den_tail in prop::collection::vec(-2.0f64..2.0, 0..4),
            d0 in prop_oneof![0.5f64..2.0, -2.0f64..-0.5],
            order in 0usize..10,
        ) {
            let num = Polynomial::new(num);
            let mut den = vec![d0];
            den.extend(den_tail);
            let den = Polynomial::new(den);
            let s = series_div(&num, &den, order).unwrap();
            let prod = s.to_polynomial().mul(&den);
            for k in 0..=order {
                prop_assert!((prod.coeff(k) - num.coeff(k)).abs() <= 1e-13 * s.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs())));
            }
        }

        #[test]
        fn horner_matches_power_sum(
            coeffs in prop::collection::vec(-3.0f64..3.0, 1..9),
            re in -3.0f64..3.0,
            im in -3.0f64..3.0,
        ) {
            let p = Polynomial::new(coeffs.clone());
            let z = Complex64::new(re, im);
            let naive: Complex64 = coeffs.iter().enumerate().map(|(k, &c)| z.powu(k as u32) * c).sum();
            let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.abs() * z.norm().powi(k as i32)).sum();
            prop_assert!((p.eval(z) - naive).norm() <= 1e-13 * scale.max(1e-300));
        }

        #[test]
        fn roots_recovered(
            real in prop::collection::vec(-4.0f64..4.0, 0..4),
            pairs in prop::collection::vec((-2.8f64..2.8, 0.05f64..2.8), 0..3),
        ) {
            prop_assume!(real.len() + 2 * pairs.len() >= 1);
            let mut expected: Vec<Complex64> = real.iter().map(|&r| c(r)).collect();
            for &(a, b) in &pairs {
                expected.push(Complex64::new(a, b));
                expected.push(Complex64::new(a, -b));
            }
            prop_assume!(distinct(&expected, 0.1));
            let p = Polynomial::from_roots(&real, &pairs);
            let mut found = poly_roots(&p).unwrap();
            prop_assert_eq!(found.len(), expected.len());
            for want in expected {
                let (idx, dist) = found
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (i, (r - want).norm()))
                    .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                    .unwrap();
                prop_assert!(dist < 1e-8, "root {} off by {}", want, dist);
                found.swap_remove(idx);
            }
        }
    }
}
