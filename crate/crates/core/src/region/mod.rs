//! Regions of absolute stability `{z : |p(z)| <= 1}` of stability
//! polynomials, their axis extents, and stability-limited step sizes.

mod contour;
mod output;

use num_complex::Complex64;
use rayon::prelude::*;

pub use output::{write_boundary_csv, write_boundary_svg, write_grid_csv};

use crate::error::{Error, Result};
use crate::polyalg::Polynomial;
use crate::stability::pc_stability_polynomial;
use crate::tableau::PCScheme;

/// Outward search step used by the axis limits.
pub const AXIS_SEARCH_STEP: f64 = 0.1;

/// Rectangular sampling window in the complex plane, `nx` nodes along the
/// real axis and `ny` along the imaginary axis, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for ComplexWindow {
    /// `[-6, 2] × [-4, 4]` at 801×801.
    fn default() -> Self {
        ComplexWindow {
            re_min: -6.0,
            re_max: 2.0,
            im_min: -4.0,
            im_max: 4.0,
            nx: 801,
            ny: 801,
        }
    }
}

impl ComplexWindow {
    pub fn new(
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        let w = ComplexWindow {
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::Precondition(format!(
                "empty window [{}, {}] x [{}, {}]",
                self.re_min, self.re_max, self.im_min, self.im_max
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Precondition(format!(
                "window resolution must be at least 2x2, got {}x{}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    /// Real part of node column `i`. Written so that mirrored windows give
    /// exactly mirrored nodes.
    pub fn re(&self, i: usize) -> f64 {
        let n = (self.nx - 1) as f64;
        (self.re_min * (n - i as f64) + self.re_max * i as f64) / n
    }

    pub fn im(&self, j: usize) -> f64 {
        let n = (self.ny - 1) as f64;
        (self.im_min * (n - j as f64) + self.im_max * j as f64) / n
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re(i), self.im(j))
    }

    pub fn cell_width(&self) -> f64 {
        (self.re_max - self.re_min) / (self.nx - 1) as f64
    }

    pub fn cell_height(&self) -> f64 {
        (self.im_max - self.im_min) / (self.ny - 1) as f64
    }
}

/// Sampled stability region. Node `(i, j)` (real index `i`, imaginary index
/// `j`) is stored at `j * nx + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRegion {
    pub window: ComplexWindow,
    /// `|p(z)|` at every node.
    pub abs_r: Vec<f64>,
    /// `|p(z)| <= 1` at every node.
    pub inside: Vec<bool>,
    /// Polylines on `|p(z)| = 1`; closed loops repeat their first point.
    pub boundary: Vec<Vec<Complex64>>,
}

impl StabilityRegion {
    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        self.inside[j * self.window.nx + i]
    }

    pub fn abs_at(&self, i: usize, j: usize) -> f64 {
        self.abs_r[j * self.window.nx + i]
    }

    /// Fraction of nodes inside the region.
    pub fn inside_fraction(&self) -> f64 {
        self.inside.iter().filter(|&&x| x).count() as f64 / self.inside.len() as f64
    }
}

/// Samples `|p|` on the window and traces the boundary `|p| = 1` by marching
/// squares, refining every vertex by bisection along its grid edge.
///
/// Rows are evaluated in parallel; the result does not depend on scheduling.
/// A constant polynomial of modulus at most 1 yields an all-inside grid and
/// no boundary.
pub fn scan(p: &Polynomial, window: &ComplexWindow) -> Result<StabilityRegion> {
    window.validate()?;
    let (nx, ny) = (window.nx, window.ny);
    let abs_r: Vec<f64> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| (0..nx).map(move |i| p.eval(window.node(i, j)).norm()))
        .collect();
    let inside: Vec<bool> = abs_r.iter().map(|&a| a <= 1.0).collect();
    let node = |i: usize, j: usize| window.node(i, j);
    let level = |z: Complex64| p.eval(z).norm() - 1.0;
    let boundary = contour::trace(&contour::Grid {
        nx,
        ny,
        node: &node,
        inside: &inside,
        level: &level,
    });
    Ok(StabilityRegion {
        window: *window,
        abs_r,
        inside,
        boundary,
    })
}

/// `|p(t d)|² - 1` as a real polynomial in `t`, divided by the largest power
/// of `t` that divides it. The division removes the cancellation that makes
/// `|p| - 1` unreliable near the origin. Returns `None` when `|p(t d)| = 1`
/// identically.
fn ray_excess(p: &Polynomial, d: Complex64) -> Option<Polynomial> {
    let mut scale = Complex64::new(1.0, 0.0);
    let mut re = Vec::with_capacity(p.coeffs().len());
    let mut im = Vec::with_capacity(p.coeffs().len());
    for &a in p.coeffs() {
        let e = scale * a;
        re.push(e.re);
        im.push(e.im);
        scale *= d;
    }
    let re = Polynomial::new(re);
    let im = Polynomial::new(im);
    let mut q = re.mul(&re).into_coeffs();
    let q_im = im.mul(&im);
    if q.len() < q_im.coeffs().len() {
        q.resize(q_im.coeffs().len(), 0.0);
    }
    for (k, &c) in q_im.coeffs().iter().enumerate() {
        q[k] += c;
    }
    if q.is_empty() {
        q.push(0.0);
    }
    q[0] -= 1.0;
    let magnitude = q.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let negligible = 1e-14 * magnitude.max(1.0);
    let lowest = q.iter().position(|c| c.abs() > negligible)?;
    Some(Polynomial::new(q[lowest..].to_vec()))
}

/// Largest `t` in a bracket `[stable, unstable]` at which `excess` changes sign.
fn bisect_boundary(excess: impl Fn(f64) -> bool, mut stable: f64, mut unstable: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (stable + unstable);
        if mid <= stable || mid >= unstable {
            break;
        }
        if excess(mid) {
            unstable = mid;
        } else {
            stable = mid;
        }
    }
    stable
}

/// Largest `β >= 0` with `|p(t d)| <= 1` for all `t ∈ [0, β]`, searched by
/// outward steps of [`AXIS_SEARCH_STEP`] and then bisection.
fn ray_limit(p: &Polynomial, d: Complex64) -> f64 {
    let Some(r) = ray_excess(p, d) else {
        return f64::INFINITY;
    };
    let unstable = |t: f64| r.eval_real(t) > 0.0;
    if r.coeff(0) > 0.0 {
        return 0.0;
    }
    if r.degree() == 0 {
        return f64::INFINITY;
    }
    let mut prev = 0.0;
    for k in 1..=1_000_000u32 {
        let t = k as f64 * AXIS_SEARCH_STEP;
        if unstable(t) {
            return bisect_boundary(unstable, prev, t);
        }
        prev = t;
    }
    f64::INFINITY
}

/// Length of the stable interval `[-β, 0]` on the negative real axis.
pub fn real_axis_limit(p: &Polynomial) -> f64 {
    ray_limit(p, Complex64::new(-1.0, 0.0))
}

/// Length of the stable interval `[0, iβ]` on the imaginary axis.
pub fn imag_axis_limit(p: &Polynomial) -> f64 {
    ray_limit(p, Complex64::new(0.0, 1.0))
}

/// Largest `h` with `|p(hλ)| <= 1` for every `λ` in `spectrum`.
///
/// The bracket starts at `h = 1` and is doubled or halved until it straddles
/// the boundary, then bisected. Zero eigenvalues impose no constraint; an
/// unconstrained spectrum gives `+∞`.
pub fn max_stable_step(p: &Polynomial, spectrum: &[Complex64]) -> Result<f64> {
    if spectrum.is_empty() {
        return Err(Error::Precondition("empty spectrum".into()));
    }
    if let Some(bad) = spectrum.iter().find(|l| l.re > 0.0 || !l.is_finite()) {
        return Err(Error::Precondition(format!(
            "eigenvalue {bad} has positive real part; no stable step exists in general"
        )));
    }
    let mut rays = Vec::new();
    for &lambda in spectrum {
        if lambda == Complex64::new(0.0, 0.0) {
            continue;
        }
        if let Some(r) = ray_excess(p, lambda) {
            if r.coeff(0) > 0.0 {
                return Ok(0.0);
            }
            if r.degree() > 0 {
                rays.push(r);
            }
        }
    }
    if rays.is_empty() {
        return Ok(f64::INFINITY);
    }
    let unstable = |h: f64| rays.iter().any(|r| r.eval_real(h) > 0.0);
    let mut h = 1.0;
    let (stable, unstable_h) = if unstable(h) {
        loop {
            let lower = h * 0.5;
            if lower == 0.0 {
                return Ok(0.0);
            }
            if !unstable(lower) {
                break (lower, h);
            }
            h = lower;
        }
    } else {
        loop {
            let upper = h * 2.0;
            if !upper.is_finite() {
                return Ok(f64::INFINITY);
            }
            if unstable(upper) {
                break (h, upper);
            }
            h = upper;
        }
    };
    Ok(bisect_boundary(unstable, stable, unstable_h))
}

/// Stable real-axis step per parallel flux sweep:
/// `real_axis_limit / (m + 1)`.
pub fn sweep_efficiency(scheme: &PCScheme) -> f64 {
    real_axis_limit(&pc_stability_polynomial(scheme)) / scheme.sweeps() as f64
}
