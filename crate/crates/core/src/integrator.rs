//! Fixed-step time integration with block predictor-corrector schemes.
//!
//! One step of a scheme with corrector `(A, b, c)` and `m` corrections:
//!
//! ```text
//! Y(0)_i = y
//! Y(k)_i = y + h Σ_j A_ij f(t + c_j h, Y(k-1)_j)     k = 1..m
//! y_new  = y + h Σ_i b_i f(t + c_i h, Y(m)_i)
//! ```
//!
//! The `s` fluxes of a sweep only read the previous sweep, so they can be
//! evaluated concurrently ([`Executor::Parallel`]). Every stage writes its
//! own slot, which keeps results bit-identical across executors.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tableau::{ButcherTableau, PCScheme, PredictorAbscissae};

/// Element type of a state vector.
pub trait Scalar:
    Copy + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

type Rhs<S> = Box<dyn Fn(f64, &[S]) -> Vec<S> + Send + Sync>;
type Exact<S> = Box<dyn Fn(f64) -> Vec<S> + Send + Sync>;

/// An initial value problem `y' = f(t, y)`, `y(t0) = y0` on `[t0, t_end]`.
///
/// `f` may be called concurrently from several threads.
pub struct IVProblem<S: Scalar> {
    rhs: Rhs<S>,
    pub y0: Vec<S>,
    pub t0: f64,
    pub t_end: f64,
    exact: Option<Exact<S>>,
}

impl<S: Scalar> IVProblem<S> {
    pub fn new<F>(rhs: F, y0: Vec<S>, t0: f64, t_end: f64) -> Result<Self>
    where
        F: Fn(f64, &[S]) -> Vec<S> + Send + Sync + 'static,
    {
        if !(t0 < t_end) {
            return Err(Error::Precondition(format!(
                "time span must satisfy t0 < t_end (got [{t0}, {t_end}])"
            )));
        }
        let dim = rhs(t0, &y0).len();
        if dim != y0.len() {
            return Err(Error::Precondition(format!(
                "right-hand side returns {dim} components for a state of dimension {}",
                y0.len()
            )));
        }
        Ok(IVProblem {
            rhs: Box::new(rhs),
            y0,
            t0,
            t_end,
            exact: None,
        })
    }

    /// Attaches the exact solution used by [`empirical_order`].
    pub fn with_exact<E>(mut self, exact: E) -> Self
    where
        E: Fn(f64) -> Vec<S> + Send + Sync + 'static,
    {
        self.exact = Some(Box::new(exact));
        self
    }

    pub fn rhs(&self, t: f64, y: &[S]) -> Vec<S> {
        (self.rhs)(t, y)
    }

    pub fn exact(&self, t: f64) -> Option<Vec<S>> {
        self.exact.as_ref().map(|e| e(t))
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }
}

/// How the fluxes of one sweep are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Executor {
    #[default]
    Sequential,
    /// One rayon task per stage.
    Parallel,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepOptions {
    pub predictor: PredictorAbscissae,
    pub executor: Executor,
}

/// Stage states of every sweep of one step and the number of flux
/// evaluations spent.
#[derive(Clone, Debug, PartialEq)]
pub struct StepTrace<S> {
    /// `sweeps[k][i]` is `Y(k)_i`.
    pub sweeps: Vec<Vec<Vec<S>>>,
    pub flux_evaluations: usize,
}

/// `base + h Σ_j w_j k_j`, component-wise, skipping zero weights.
fn combine<S: Scalar>(base: &[S], h: f64, weights: &[f64], fluxes: &[Vec<S>]) -> Vec<S> {
    (0..base.len())
        .map(|d| {
            let mut acc = S::zero();
            for (w, k) in weights.iter().zip(fluxes) {
                if *w != 0.0 {
                    acc = acc + k[d] * *w;
                }
            }
            base[d] + acc * h
        })
        .collect()
}

fn all_finite<S: Scalar>(v: &[S]) -> bool {
    v.iter().all(|x| x.finite())
}

fn map_stages<T: Send>(
    executor: Executor,
    s: usize,
    f: impl Fn(usize) -> T + Send + Sync,
) -> Vec<T> {
    match executor {
        Executor::Sequential => (0..s).map(f).collect(),
        Executor::Parallel => (0..s).into_par_iter().map(f).collect(),
    }
}

/// One step of the predictor-corrector scheme from `(t, y)` with step `h`.
pub fn pc_step<S: Scalar>(
    prob: &IVProblem<S>,
    t: f64,
    y: &[S],
    h: f64,
    scheme: &PCScheme,
    options: StepOptions,
) -> Result<(Vec<S>, StepTrace<S>)> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!(
            "step size must be positive, got {h}"
        )));
    }
    let corr = &scheme.corrector;
    let s = corr.stages();
    let c = corr.c();

    let mut sweeps = Vec::with_capacity(scheme.m + 1);
    sweeps.push(vec![y.to_vec(); s]);
    let (mut fluxes, mut flux_evaluations) = match options.predictor {
        PredictorAbscissae::Stage => (
            map_stages(options.executor, s, |j| prob.rhs(t + c[j] * h, y)),
            s,
        ),
        PredictorAbscissae::Literal => (vec![prob.rhs(t, y); s], 1),
    };
    if !fluxes.iter().all(|k| all_finite(k)) {
        return Err(Error::Overflow {
            sweep: 0,
            step: None,
        });
    }

    for k in 1..=scheme.m {
        let previous = &fluxes;
        let results = map_stages(options.executor, s, |i| {
            let stage = combine(y, h, &corr.a()[i], previous);
            let flux = prob.rhs(t + c[i] * h, &stage);
            (stage, flux)
        });
        let (stages, next): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        flux_evaluations += s;
        if !stages.iter().chain(&next).all(|v| all_finite(v)) {
            return Err(Error::Overflow {
                sweep: k,
                step: None,
            });
        }
        sweeps.push(stages);
        fluxes = next;
    }

    let y_new = combine(y, h, corr.b(), &fluxes);
    if !all_finite(&y_new) {
        return Err(Error::Overflow {
            sweep: scheme.m,
            step: None,
        });
    }
    Ok((
        y_new,
        StepTrace {
            sweeps,
            flux_evaluations,
        },
    ))
}

/// One step of an explicit Runge-Kutta method, stage by stage.
pub fn rk_step<S: Scalar>(
    prob: &IVProblem<S>,
    t: f64,
    y: &[S],
    h: f64,
    tableau: &ButcherTableau,
) -> Result<Vec<S>> {
    if !tableau.is_explicit() {
        return Err(Error::Precondition(format!(
            "`{}` is not explicit (A is not strictly lower triangular)",
            tableau.name()
        )));
    }
    let mut ks: Vec<Vec<S>> = Vec::with_capacity(tableau.stages());
    for i in 0..tableau.stages() {
        let stage = combine(y, h, &tableau.a()[i][..i], &ks);
        ks.push(prob.rhs(t + tableau.c()[i] * h, &stage));
    }
    Ok(combine(y, h, tableau.b(), &ks))
}

/// Outcome of [`integrate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Integration<S> {
    pub y: Vec<S>,
    pub steps: usize,
    /// Parallel flux sweeps performed, `steps * (m + 1)`.
    pub sweeps: usize,
    pub flux_evaluations: usize,
    /// Largest component magnitude along the trajectory, `y0` included.
    pub max_abs: f64,
    /// Largest component magnitude after each step.
    pub history: Vec<f64>,
}

fn max_magnitude<S: Scalar>(y: &[S]) -> f64 {
    y.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
}

/// Number of steps for a span: the nearest integer when `span / h` is one
/// (up to rounding), otherwise the next integer up, so that the final step
/// is the short one.
fn step_count(span: f64, h: f64) -> usize {
    let ratio = span / h;
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    (n as usize).max(1)
}

/// Fixed-step integration over the problem's time span. The last step is
/// adjusted to land exactly on `t_end`.
pub fn integrate<S: Scalar>(
    prob: &IVProblem<S>,
    scheme: &PCScheme,
    h: f64,
    options: StepOptions,
) -> Result<Integration<S>> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!(
            "step size must be positive, got {h}"
        )));
    }
    let n = step_count(prob.t_end - prob.t0, h);
    let mut y = prob.y0.clone();
    let mut max_abs = max_magnitude(&y);
    let mut history = Vec::with_capacity(n);
    let mut flux_evaluations = 0;
    for k in 0..n {
        let t = prob.t0 + k as f64 * h;
        let step = if k + 1 == n { prob.t_end - t } else { h };
        let (next, trace) = pc_step(prob, t, &y, step, scheme, options).map_err(|e| match e {
            Error::Overflow { sweep, .. } => Error::Overflow {
                sweep,
                step: Some(k),
            },
            other => other,
        })?;
        y = next;
        flux_evaluations += trace.flux_evaluations;
        let size = max_magnitude(&y);
        max_abs = max_abs.max(size);
        history.push(size);
    }
    Ok(Integration {
        y,
        steps: n,
        sweeps: n * scheme.sweeps(),
        flux_evaluations,
        max_abs,
        history,
    })
}

/// Errors below this are treated as rounding noise.
pub const SATURATION_LEVEL: f64 = 100.0 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct OrderLevel {
    pub h: f64,
    pub error: f64,
    pub saturated: bool,
}

/// Convergence study produced by [`empirical_order`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrderStudy {
    pub levels: Vec<OrderLevel>,
    /// `log2(e_k / e_{k+1})` for consecutive unsaturated levels.
    pub rates: Vec<f64>,
    /// Mean of `rates`.
    pub observed: f64,
}

/// Observed convergence order from errors at `h0 / 2^k`, `k < levels`.
pub fn empirical_order<S: Scalar>(
    prob: &IVProblem<S>,
    scheme: &PCScheme,
    h0: f64,
    levels: usize,
    options: StepOptions,
) -> Result<OrderStudy> {
    if levels < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 levels, got {levels}"
        )));
    }
    let exact = prob
        .exact(prob.t_end)
        .ok_or_else(|| Error::Precondition("problem has no exact solution".into()))?;
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let h = h0 / 2f64.powi(k as i32);
        let run = integrate(prob, scheme, h, options)?;
        let error = run
            .y
            .iter()
            .zip(&exact)
            .map(|(a, b)| (*a - *b).magnitude())
            .fold(0.0, f64::max);
        out.push(OrderLevel {
            h,
            error,
            saturated: error < SATURATION_LEVEL,
        });
    }
    let rates: Vec<f64> = out
        .windows(2)
        .filter(|w| !w[0].saturated && !w[1].saturated)
        .map(|w| (w[0].error / w[1].error).log2())
        .collect();
    if rates.is_empty() {
        return Err(Error::Domain(
            "errors saturated at rounding level; no convergence rate available".into(),
        ));
    }
    let observed = rates.iter().sum::<f64>() / rates.len() as f64;
    Ok(OrderStudy {
        levels: out,
        rates,
        observed,
    })
}

/// `y' = -y²`, `y(0) = 1` on `[0, 1]`, exact solution `1 / (1 + t)`.
pub fn riccati_problem() -> IVProblem<f64> {
    IVProblem::new(|_, y: &[f64]| vec![-y[0] * y[0]], vec![1.0], 0.0, 1.0)
        .expect("valid problem")
        .with_exact(|t| vec![1.0 / (1.0 + t)])
}

/// `y' = λy` on `[0, t_end]` (no time dependence; `λ` may be complex).
pub fn linear_problem<S>(lambda: S, y0: S, t_end: f64) -> IVProblem<S>
where
    S: Scalar + Mul<Output = S> + 'static,
{
    IVProblem::new(
        move |_, y: &[S]| y.iter().map(|&v| lambda * v).collect(),
        vec![y0],
        0.0,
        t_end,
    )
    .expect("valid problem")
}
