//! Butcher tableaux, predictor-corrector schemes, and the composition of a
//! scheme into a single explicit tableau.

mod builtin;
mod file;

use std::fmt;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use file::{load_tableau, parse_tableau, save_tableau, tableau_to_json};

use crate::error::{Error, Result};

/// Tolerance for the consistency and row-sum invariants.
pub const INVARIANT_TOL: f64 = 1e-12;

/// Tolerance for individual order conditions.
pub const ORDER_CONDITION_TOL: f64 = 1e-12;

/// A Runge-Kutta method `(A, b, c)` with its declared classical order.
#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau {
    name: String,
    order: u32,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ButcherTableau {
    /// Builds a tableau and checks every invariant: square `A` matching `b`
    /// and `c`, abscissae in `[0, 1]`, `sum b = 1`, and `A·1 = c`.
    pub fn new(
        name: impl Into<String>,
        order: u32,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self> {
        let t = ButcherTableau {
            name: name.into(),
            order,
            a,
            b,
            c,
        };
        t.validate()?;
        Ok(t)
    }

    /// Builds a tableau checking only the shape. Used for composed variants
    /// whose predictor block deliberately breaks the row-sum condition.
    pub(crate) fn from_parts(
        name: impl Into<String>,
        order: u32,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self> {
        let t = ButcherTableau {
            name: name.into(),
            order,
            a,
            b,
            c,
        };
        t.check_shape()?;
        Ok(t)
    }

    fn invalid(&self, invariant: impl Into<String>) -> Error {
        Error::Invalid {
            name: self.name.clone(),
            invariant: invariant.into(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        let s = self.b.len();
        if s == 0 {
            return Err(self.invalid("tableau has no stages"));
        }
        if self.c.len() != s || self.a.len() != s || self.a.iter().any(|row| row.len() != s) {
            return Err(self.invalid(format!(
                "dimension mismatch: A must be {s}x{s} and c must have length {s}"
            )));
        }
        let finite = self
            .a
            .iter()
            .flatten()
            .chain(&self.b)
            .chain(&self.c)
            .all(|x| x.is_finite());
        if !finite {
            return Err(self.invalid("non-finite coefficient"));
        }
        if self.order == 0 {
            return Err(self.invalid("declared order must be positive"));
        }
        Ok(())
    }

    /// Re-checks the full set of invariants.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        if let Some((i, ci)) = self
            .c
            .iter()
            .enumerate()
            .find(|(_, ci)| !(0.0..=1.0).contains(*ci))
        {
            return Err(self.invalid(format!("abscissa out of [0,1]: c[{i}] = {ci}")));
        }
        let sum_b: f64 = self.b.iter().sum();
        if (sum_b - 1.0).abs() > INVARIANT_TOL {
            return Err(self.invalid(format!(
                "consistency violated: weights sum to {sum_b}, not 1"
            )));
        }
        for (i, row) in self.a.iter().enumerate() {
            let row_sum: f64 = row.iter().sum();
            if (row_sum - self.c[i]).abs() > INVARIANT_TOL {
                return Err(self.invalid(format!(
                    "row-sum condition violated: row {i} of A sums to {row_sum}, c[{i}] = {}",
                    self.c[i]
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// `true` when `A` is strictly lower triangular.
    pub fn is_explicit(&self) -> bool {
        self.a
            .iter()
            .enumerate()
            .all(|(i, row)| row[i..].iter().all(|&x| x == 0.0))
    }

    /// `A·v`.
    pub(crate) fn apply_a(&self, v: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// `b·v`.
    pub(crate) fn weigh(&self, v: &[f64]) -> f64 {
        self.b.iter().zip(v).map(|(b, x)| b * x).sum()
    }
}

impl fmt::Display for ButcherTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = f.precision().unwrap_or(6);
        writeln!(
            f,
            "{} (order {}, {} stages)",
            self.name,
            self.order,
            self.stages()
        )?;
        let cell = |x: f64| format!("{:>w$.p$}", x, w = width + 4, p = width);
        for (ci, row) in self.c.iter().zip(&self.a) {
            let entries: Vec<String> = row.iter().map(|&x| cell(x)).collect();
            writeln!(f, "{} | {}", cell(*ci), entries.join(" "))?;
        }
        let rule = "-".repeat((width + 4) * (self.stages() + 1) + self.stages() + 2);
        writeln!(f, "{rule}")?;
        let weights: Vec<String> = self.b.iter().map(|&x| cell(x)).collect();
        write!(f, "{} | {}", " ".repeat(width + 4), weights.join(" "))
    }
}

/// One classical order condition and its evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderCondition {
    pub order: u32,
    pub label: &'static str,
    pub value: f64,
    pub expected: f64,
    pub passed: bool,
}

/// Outcome of [`check_order_conditions`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    pub conditions: Vec<OrderCondition>,
}

impl OrderReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    /// Highest `q` such that every condition of order `<= q` passed.
    pub fn satisfied_order(&self) -> u32 {
        let mut q = 0;
        while self
            .conditions
            .iter()
            .filter(|c| c.order == q + 1)
            .all(|c| c.passed)
            && self.conditions.iter().any(|c| c.order == q + 1)
        {
            q += 1;
        }
        q
    }
}

/// Evaluates the standard Runge-Kutta order conditions up to `upto` (1..=4).
pub fn check_order_conditions(t: &ButcherTableau, upto: u32) -> Result<OrderReport> {
    if !(1..=4).contains(&upto) {
        return Err(Error::Precondition(format!(
            "order conditions are available for orders 1..=4, not {upto}"
        )));
    }
    let s = t.stages();
    let (b, c) = (t.b(), t.c());
    let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(x, y)| x * y).sum() };
    let ones = vec![1.0; s];
    let c2: Vec<f64> = c.iter().map(|x| x * x).collect();
    let c3: Vec<f64> = c.iter().map(|x| x * x * x).collect();
    let ac = t.apply_a(c);
    let ac2 = t.apply_a(&c2);
    let aac = t.apply_a(&ac);
    let bc_ac: Vec<f64> = (0..s).map(|i| b[i] * c[i]).collect();

    let mut conditions = Vec::new();
    let mut push = |order: u32, label: &'static str, value: f64, expected: f64| {
        conditions.push(OrderCondition {
            order,
            label,
            value,
            expected,
            passed: (value - expected).abs() <= ORDER_CONDITION_TOL,
        });
    };
    push(1, "sum b_i = 1", dot(b, &ones), 1.0);
    if upto >= 2 {
        push(2, "sum b_i c_i = 1/2", dot(b, c), 0.5);
    }
    if upto >= 3 {
        push(3, "sum b_i c_i^2 = 1/3", dot(b, &c2), 1.0 / 3.0);
        push(3, "sum b_i a_ij c_j = 1/6", dot(b, &ac), 1.0 / 6.0);
    }
    if upto >= 4 {
        push(4, "sum b_i c_i^3 = 1/4", dot(b, &c3), 0.25);
        push(4, "sum b_i c_i a_ij c_j = 1/8", dot(&bc_ac, &ac), 0.125);
        push(4, "sum b_i a_ij c_j^2 = 1/12", dot(b, &ac2), 1.0 / 12.0);
        push(4, "sum b_i a_ij a_jk c_k = 1/24", dot(b, &aac), 1.0 / 24.0);
    }
    Ok(OrderReport { conditions })
}

/// A corrector tableau iterated `m` times after an explicit Euler predictor.
#[derive(Clone, Debug, PartialEq)]
pub struct PCScheme {
    pub corrector: ButcherTableau,
    pub m: usize,
}

impl PCScheme {
    pub fn new(corrector: ButcherTableau, m: usize) -> Self {
        PCScheme { corrector, m }
    }

    /// Shorthand for a built-in corrector.
    pub fn builtin(name: &str, m: usize) -> Result<Self> {
        Ok(PCScheme::new(builtin(name)?, m))
    }

    /// Number of parallel flux sweeps per step (predictor plus corrections).
    pub fn sweeps(&self) -> usize {
        self.m + 1
    }

    /// Declared order of the composed method, `min(p, m + 1)`.
    pub fn order(&self) -> u32 {
        self.corrector.order().min(self.m as u32 + 1)
    }
}

/// Where the predictor block's stages sit in time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PredictorAbscissae {
    /// Predictor fluxes at `t + c_j h`, matching explicit Euler at the
    /// corrector's abscissae.
    #[default]
    Stage,
    /// Predictor fluxes at `t` (abscissae all zero), as in the block tableau
    /// display. Differs from [`Stage`](Self::Stage) only for
    /// non-autonomous problems.
    Literal,
}

/// The explicit `s·(m+1)`-stage tableau of a predictor-corrector scheme.
///
/// Block row 0 has zero coefficients and zero abscissae; block row `k >= 1`
/// carries `A` in block column `k - 1` with abscissae `c`; the weights are
/// `b` on the last block.
pub fn compose_pc_tableau(scheme: &PCScheme) -> ButcherTableau {
    compose_pc_tableau_with(scheme, PredictorAbscissae::Literal)
}

/// [`compose_pc_tableau`] with a choice of predictor abscissae.
pub fn compose_pc_tableau_with(scheme: &PCScheme, predictor: PredictorAbscissae) -> ButcherTableau {
    let corr = &scheme.corrector;
    let s = corr.stages();
    let m = scheme.m;
    let n = s * (m + 1);
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    for k in 0..=m {
        for i in 0..s {
            let row = k * s + i;
            c[row] = match (k, predictor) {
                (0, PredictorAbscissae::Literal) => 0.0,
                _ => corr.c()[i],
            };
            if k >= 1 {
                a[row][(k - 1) * s..k * s].copy_from_slice(&corr.a()[i]);
            }
        }
    }
    b[m * s..].copy_from_slice(corr.b());
    let suffix = match predictor {
        PredictorAbscissae::Literal => "",
        PredictorAbscissae::Stage => ", stage-time predictor",
    };
    ButcherTableau::from_parts(
        format!("pc({}, m={m}{suffix})", corr.name()),
        scheme.order(),
        a,
        b,
        c,
    )
    .expect("composition of a valid corrector has consistent shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtins_satisfy_invariants() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            t.validate().unwrap();
            assert_eq!(t.name(), *name);
        }
        assert!(matches!(builtin("rk4"), Err(Error::UnknownMethod(_))));
    }

    #[test]
    fn radau_iia_order_conditions() {
        let t = builtin("radau-iia-2").unwrap();
        assert!(check_order_conditions(&t, 3).unwrap().all_passed());
        let r4 = check_order_conditions(&t, 4).unwrap();
        assert!(!r4.all_passed());
        assert_eq!(r4.satisfied_order(), 3);
    }

    #[test]
    fn explicit_euler_order_conditions() {
        let r = check_order_conditions(&builtin("explicit-euler").unwrap(), 2).unwrap();
        assert!(r.conditions[0].passed);
        assert!(!r.conditions[1].passed);
        assert_eq!(r.conditions[1].value, 0.0);
    }

    #[test]
    fn declared_orders_hold() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            let r = check_order_conditions(&t, t.order()).unwrap();
            assert!(r.all_passed(), "{name}: {r:?}");
        }
        let hh = builtin("hammer-hollingsworth-2").unwrap();
        assert!(check_order_conditions(&hh, 4).unwrap().all_passed());
    }

    #[test]
    fn order_conditions_reject_order_five() {
        let t = builtin("explicit-euler").unwrap();
        assert!(check_order_conditions(&t, 5).is_err());
        assert!(check_order_conditions(&t, 0).is_err());
    }

    #[test]
    fn validation_messages_name_the_invariant() {
        let err =
            ButcherTableau::new("x", 1, vec![vec![0.5]], vec![1.0], vec![0.5, 1.5]).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"), "{err}");
        let err = ButcherTableau::new(
            "x",
            1,
            vec![vec![0.5, 0.0], vec![1.5, 0.0]],
            vec![0.5, 0.5],
            vec![0.5, 1.5],
        )
        .unwrap_err();
        assert!(err.to_string().contains("abscissa out of [0,1]"), "{err}");
        let err = ButcherTableau::new("x", 1, vec![vec![0.25]], vec![1.0], vec![0.5]).unwrap_err();
        assert!(
            err.to_string().contains("row-sum condition violated"),
            "{err}"
        );
        let err = ButcherTableau::new("x", 1, vec![vec![0.0]], vec![0.9], vec![0.0]).unwrap_err();
        assert!(err.to_string().contains("consistency"), "{err}");
    }

    #[test]
    fn compose_euler_zero_corrections() {
        let t = compose_pc_tableau(&PCScheme::builtin("explicit-euler", 0).unwrap());
        assert_eq!(t.a(), &[vec![0.0]]);
        assert_eq!(t.b(), &[1.0]);
        assert_eq!(t.c(), &[0.0]);
        assert_eq!(t.order(), 1);
    }

    #[test]
    fn compose_radau_iia_one_correction() {
        let t = compose_pc_tableau(&PCScheme::builtin("radau-iia-2", 1).unwrap());
        assert_eq!(t.stages(), 4);
        assert_eq!(t.a()[2], vec![5.0 / 12.0, -1.0 / 12.0, 0.0, 0.0]);
        assert_eq!(t.a()[3], vec![0.75, 0.25, 0.0, 0.0]);
        assert_eq!(t.b(), &[0.0, 0.0, 0.75, 0.25]);
        assert_eq!(t.c(), &[0.0, 0.0, 1.0 / 3.0, 1.0]);
        assert_eq!(t.order(), 2);
        assert!(t.is_explicit());
        t.validate().unwrap();
    }

    #[test]
    fn compose_radau_iia_two_corrections() {
        let t = compose_pc_tableau(&PCScheme::builtin("radau-iia-2", 2).unwrap());
        assert_eq!(t.stages(), 6);
        assert_eq!(t.b(), &[0.0, 0.0, 0.0, 0.0, 0.75, 0.25]);
        assert_eq!(t.order(), 3);
    }

    #[test]
    fn stage_predictor_keeps_abscissae() {
        let scheme = PCScheme::builtin("radau-iia-2", 1).unwrap();
        let t = compose_pc_tableau_with(&scheme, PredictorAbscissae::Stage);
        assert_eq!(t.c(), &[1.0 / 3.0, 1.0, 1.0 / 3.0, 1.0]);
        assert!(t.is_explicit());
        assert!(t.validate().is_err());
    }

    proptest! {
        #[test]
        fn composed_tableau_structure(idx in 0usize..4, m in 0usize..8) {
            let scheme = PCScheme::builtin(BUILTIN_NAMES[idx], m).unwrap();
            let s = scheme.corrector.stages();
            let t = compose_pc_tableau(&scheme);
            prop_assert_eq!(t.stages(), s * (m + 1));
            for (i, row) in t.a().iter().enumerate() {
                let row_sum: f64 = row.iter().sum();
                prop_assert!((row_sum - t.c()[i]).abs() <= 1e-12);
                for (j, &x) in row.iter().enumerate() {
                    if j / s >= i / s {
                        prop_assert_eq!(x, 0.0);
                    }
                }
            }
        }
    }
}
