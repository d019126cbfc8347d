//! Linear and binary mixed-integer programs: model, solution contract, and
//! the backends (HiGHS, a dense reference simplex with branch-and-bound, and
//! an external solver driven through LP files).

mod bnb;
mod external;
#[cfg(feature = "highs")]
mod highs_backend;
mod lpfile;
mod simplex;

pub use bnb::solve_mip_reference;
pub use external::{solve_external, EXTERNAL_ENV};
pub use lpfile::{model_names, read_model, read_solution, write_model, write_solution};
pub use simplex::solve_lp_reference;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub sense: Sense,
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    /// Sparse objective; duplicate indices add up.
    pub objective: Vec<(usize, f64)>,
}

impl LinearModel {
    pub fn new(sense: Sense) -> Self {
        LinearModel { sense, vars: Vec::new(), rows: Vec::new(), objective: Vec::new() }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.vars.push(Variable { name: name.into(), lower, upper, binary: false });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.vars.push(Variable { name: name.into(), lower: 0.0, upper: 1.0, binary: true });
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Row { name: name.into(), coeffs, relation, rhs });
        self.rows.len() - 1
    }

    pub fn has_binaries(&self) -> bool {
        self.vars.iter().any(|v| v.binary)
    }

    pub fn dense_objective(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.vars.len()];
        for &(j, v) in &self.objective {
            c[j] += v;
        }
        c
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, v)| v * x[j]).sum()
    }

    /// Coefficients, bounds and right-hand sides must be finite (bounds may be ±∞).
    pub fn check(&self) -> Result<(), LpError> {
        let bad = |what: String| Err(LpError::InvalidModel(what));
        for (j, v) in self.vars.iter().enumerate() {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper || v.lower == f64::INFINITY {
                return bad(format!("variable {j} has bounds [{}, {}]", v.lower, v.upper));
            }
            if v.binary && (v.lower < 0.0 || v.upper > 1.0) {
                return bad(format!("binary variable {j} has bounds outside [0, 1]"));
            }
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !r.rhs.is_finite() || r.coeffs.iter().any(|&(j, a)| !a.is_finite() || j >= self.vars.len()) {
                return bad(format!("row {i} has a non-finite or out-of-range entry"));
            }
        }
        if self.objective.iter().any(|&(j, a)| !a.is_finite() || j >= self.vars.len()) {
            return bad("objective has a non-finite or out-of-range entry".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    Limit,
}

/// Row duals follow the shadow-price convention: `dual[i]` is the rate of
/// change of the optimal objective per unit increase of `rhs[i]`. Under a
/// max objective, ≤ rows get duals ≥ 0 and ≥ rows duals ≤ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    /// Extra integer-feasible points found by a MIP search, best first.
    pub pool: Vec<Vec<f64>>,
    pub iterations: usize,
    pub nodes: usize,
}

impl Solution {
    pub(crate) fn without_point(status: Status) -> Self {
        Solution {
            status,
            objective: f64::NAN,
            primal: Vec::new(),
            dual: Vec::new(),
            pool: Vec::new(),
            iterations: 0,
            nodes: 0,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Primal feasibility.
    pub primal: f64,
    /// Reduced-cost and dual-sign tolerance.
    pub dual: f64,
    /// Complementary slackness.
    pub complementarity: f64,
    /// Relative primal-dual gap: `gap ≤ gap * (1 + |obj|)`.
    pub gap: f64,
    pub integrality: f64,
    /// Absolute MIP optimality gap.
    pub mip_gap: f64,
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            primal: 1e-7,
            dual: 1e-7,
            complementarity: 1e-6,
            gap: 1e-7,
            integrality: 1e-6,
            mip_gap: 1e-6,
            pivot: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MipOptions {
    pub node_limit: usize,
    pub pool_size: usize,
}

impl Default for MipOptions {
    fn default() -> Self {
        MipOptions { node_limit: 100_000, pool_size: 8 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("binary variables passed to an LP solve")]
    HasBinaries,
    #[error("solution file, line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("external solver: {0}")]
    External(String),
    #[error("backend {0} is not available in this build")]
    Unavailable(String),
}

/// Largest primal violation of rows and bounds.
pub fn primal_residual(model: &LinearModel, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, v) in model.vars.iter().enumerate() {
        worst = worst.max(v.lower - x[j]).max(x[j] - v.upper);
    }
    for r in &model.rows {
        let ax: f64 = r.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
        let viol = match r.relation {
            Relation::Le => ax - r.rhs,
            Relation::Ge => r.rhs - ax,
            Relation::Eq => (ax - r.rhs).abs(),
        };
        worst = worst.max(viol);
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
    pub gap: f64,
}

impl Residuals {
    pub fn within(&self, tol: &Tolerances, objective: f64) -> bool {
        self.primal <= tol.primal.max(1e-7)
            && self.dual <= tol.complementarity
            && self.complementarity <= tol.complementarity
            && self.gap <= tol.gap * (1.0 + objective.abs()).max(1.0) * 10.0
    }
}

/// Optimality certificate residuals of an LP solution under the
/// shadow-price dual convention.
pub fn lp_residuals(model: &LinearModel, sol: &Solution) -> Residuals {
    let x = &sol.primal;
    let y = &sol.dual;
    let s = if model.sense == Sense::Max { 1.0 } else { -1.0 };
    let mut reduced = model.dense_objective();
    for (i, r) in model.rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            reduced[j] -= a * y[i];
        }
    }
    let mut dual: f64 = 0.0;
    let mut comp: f64 = 0.0;
    let mut dual_obj = 0.0;
    for (i, r) in model.rows.iter().enumerate() {
        let yi = s * y[i];
        let sign_viol = match r.relation {
            Relation::Le => -yi,
            Relation::Ge => yi,
            Relation::Eq => 0.0,
        };
        dual = dual.max(sign_viol);
        let ax: f64 = r.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
        comp = comp.max((y[i] * (r.rhs - ax)).abs());
        dual_obj += r.rhs * y[i];
    }
    for (j, v) in model.vars.iter().enumerate() {
        let d = s * reduced[j];
        let at_lower = v.lower.is_finite() && (x[j] - v.lower).abs() <= 1e-9 * (1.0 + v.lower.abs());
        let at_upper = v.upper.is_finite() && (x[j] - v.upper).abs() <= 1e-9 * (1.0 + v.upper.abs());
        let viol = match (at_lower, at_upper) {
            (true, true) => 0.0,
            (true, false) => d,
            (false, true) => -d,
            (false, false) => d.abs(),
        };
        dual = dual.max(viol);
        let slack = if at_lower || at_upper { 0.0 } else { x[j] - x[j].clamp(v.lower, v.upper) };
        comp = comp.max((reduced[j] * slack).abs());
        dual_obj += reduced[j] * x[j];
    }
    let primal = primal_residual(model, x);
    let gap = (model.objective_value(x) - dual_obj).abs();
    Residuals { primal, dual, complementarity: comp, gap }
}

/// Backend selection. `from_env` reads `CORREQ_LP_SOLVER`
/// (`reference`, `highs`, or `external`).
#[derive(Clone, Debug, PartialEq)]
pub enum Backend {
    Reference,
    Highs,
    /// Command template with `{model}` and `{solution}` placeholders.
    External(String),
}

pub const SOLVER_ENV: &str = "CORREQ_LP_SOLVER";

impl Default for Backend {
    fn default() -> Self {
        if cfg!(feature = "highs") {
            Backend::Highs
        } else {
            Backend::Reference
        }
    }
}

impl Backend {
    pub fn from_env() -> Result<Self, LpError> {
        match std::env::var(SOLVER_ENV).ok().as_deref() {
            None | Some("") => Ok(Backend::default()),
            Some(s) => s.parse(),
        }
    }

    pub fn solve_lp(&self, model: &LinearModel, tol: &Tolerances) -> Result<Solution, LpError> {
        if model.has_binaries() {
            return Err(LpError::HasBinaries);
        }
        match self {
            Backend::Reference => solve_lp_reference(model, tol),
            Backend::Highs => highs_lp(model, tol, false),
            Backend::External(cmd) => solve_external(model, cmd),
        }
    }

    pub fn solve_mip(&self, model: &LinearModel, tol: &Tolerances, opts: &MipOptions) -> Result<Solution, LpError> {
        match self {
            Backend::Reference => solve_mip_reference(model, tol, opts),
            Backend::Highs => highs_lp(model, tol, true),
            Backend::External(cmd) => solve_external(model, cmd),
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = LpError;

    fn from_str(s: &str) -> Result<Self, LpError> {
        match s {
            "reference" => Ok(Backend::Reference),
            "highs" => Ok(Backend::Highs),
            "external" => Ok(Backend::External(std::env::var(EXTERNAL_ENV).map_err(|_| {
                LpError::External(format!("{EXTERNAL_ENV} must hold the solver command"))
            })?)),
            other => Err(LpError::Unavailable(other.to_string())),
        }
    }
}

#[cfg(feature = "highs")]
fn highs_lp(model: &LinearModel, tol: &Tolerances, mip: bool) -> Result<Solution, LpError> {
    highs_backend::solve(model, tol, mip)
}

#[cfg(not(feature = "highs"))]
fn highs_lp(_: &LinearModel, _: &Tolerances, _: bool) -> Result<Solution, LpError> {
    Err(LpError::Unavailable("highs".into()))
}
