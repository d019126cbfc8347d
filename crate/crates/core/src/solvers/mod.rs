//! Equilibrium engines: the correlation-DAG LP, two-sided column
//! generation, the deviation-benefit certificate and a brute-force oracle.

mod colgen;
mod dag_lp;
mod deviation;
mod oracle;
mod payoff;

pub use colgen::{build_master, price, solve_colgen, ColgenOptions, MasterState, PricingRule, Pricing};
pub use dag_lp::solve_dag_lp;
pub use colgen::MasterLayout;
pub use deviation::max_deviation_benefit;
pub use oracle::{brute_force_optimal, OracleCaps};
pub use payoff::{payoff_space, PayoffPoint};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::{DagError, FlowError, DEFAULT_EDGE_BUDGET};
use crate::game::{
    compute_public_states, compute_sequences, make_timed, to_f64, Game, GameError, NodeId, PublicPartition,
    SequenceIndex,
};
use crate::lp::{Backend, LpError, MipOptions, Tolerances};
use crate::triggers::{
    deviation_polytope, enumerate_triggers, incentive_matrices, Concept, DeviationPolytope, IncentivePair,
    JointSequences,
};
use crate::vsf::{complete_plan, complete_plan_lp, vsf_system, RelevantPairs, VsfError};

/// Linear objective over outcomes. Terminal ids refer to the game as given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Σ_i u_i.
    SocialWelfare,
    /// u_i of a 0-based player.
    Player(usize),
    /// Σ_i w_i u_i.
    Weights(Vec<f64>),
    /// Coefficient per terminal node; missing terminals count 0.
    Terminal(BTreeMap<NodeId, f64>),
}

impl Objective {
    /// Coefficient c(z) for every node of `game` (0 off terminals).
    pub fn terminal_coefficients(&self, game: &Game) -> Vec<f64> {
        let mut c = vec![0.0; game.num_nodes()];
        for z in game.terminals() {
            let u: Vec<f64> = game.node(z).payoffs.iter().map(to_f64).collect();
            c[z] = match self {
                Objective::SocialWelfare => u.iter().sum(),
                Objective::Player(i) => u.get(*i).copied().unwrap_or(0.0),
                Objective::Weights(w) => u.iter().zip(w).map(|(a, b)| a * b).sum(),
                Objective::Terminal(m) => m.get(&z).copied().unwrap_or(0.0),
            };
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumProblem {
    pub game: Game,
    pub concept: Concept,
    pub objective: Objective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Dag,
    Colgen,
    Oracle,
    Auto,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Dag => "dag",
            Engine::Colgen => "colgen",
            Engine::Oracle => "oracle",
            Engine::Auto => "auto",
        })
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dag" => Ok(Engine::Dag),
            "colgen" => Ok(Engine::Colgen),
            "oracle" => Ok(Engine::Oracle),
            "auto" => Ok(Engine::Auto),
            _ => Err(format!("unknown engine {s:?} (expected dag, colgen, oracle or auto)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: Tolerances,
    pub backend: Backend,
    pub mip: MipOptions,
    pub edge_budget: usize,
    pub time_budget: Option<Duration>,
    /// Relative certification tolerance: benefit ≤ certify · reward range.
    pub certify: f64,
    pub colgen: ColgenOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: Tolerances::default(),
            backend: Backend::default(),
            mip: MipOptions::default(),
            edge_budget: DEFAULT_EDGE_BUDGET,
            time_budget: None,
            certify: 1e-6,
            colgen: ColgenOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("LP solver: {0}")]
    Lp(#[from] LpError),
    #[error(transparent)]
    Vsf(#[from] VsfError),
    #[error("the LP solver reported status {0:?}")]
    Status(crate::lp::Status),
    #[error("budget exceeded after {iterations} iterations (upper bound {bound})")]
    Budget { best: Option<Box<EquilibriumResult>>, bound: f64, iterations: usize },
    #[error("plan has a deviation benefit of {benefit:e}, above the limit {limit:e}")]
    Certification { benefit: f64, limit: f64 },
    #[error("plan has {got} entries, expected {expected}")]
    MissingPlanEntries { got: usize, expected: usize },
    #[error("brute force caps exceeded: {0}")]
    CapsExceeded(String),
}

/// Everything the engines share: the timed game, sequence indices, Σ, the
/// non-void deviation polytopes with their incentive matrices, and the
/// objective and utilities as vectors over Σ.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub game: Game,
    pub node_map: Vec<NodeId>,
    pub seqs: SequenceIndex,
    pub partition: PublicPartition,
    pub sigma: JointSequences,
    pub concept: Concept,
    pub incentives: Vec<(DeviationPolytope, IncentivePair)>,
    pub g: Vec<f64>,
    pub utilities: Vec<Vec<f64>>,
    pub reward_range: f64,
}

impl Prepared {
    pub fn new(problem: &EquilibriumProblem) -> Result<Self, SolverError> {
        let timed = make_timed(&problem.game)?;
        let game = timed.game;
        let seqs = compute_sequences(&game)?;
        let partition = compute_public_states(&game, &seqs)?;
        let sigma = JointSequences::build(&game, &seqs);
        let reach = game.chance_reach();
        let incentives = enumerate_triggers(&game, problem.concept)
            .iter()
            .map(|t| deviation_polytope(&game, &seqs, t))
            .filter(|q| !q.is_void())
            .map(|q| {
                let pair = incentive_matrices(&game, &seqs, &sigma, &q, &reach);
                (q, pair)
            })
            .collect();
        // Coefficients on the original ids, moved onto the timed game.
        let coef_orig = problem.objective.terminal_coefficients(&problem.game);
        let mut coef = vec![0.0; game.num_nodes()];
        for (orig, &h) in timed.node_map.iter().enumerate() {
            coef[h] = coef_orig[orig];
        }
        let n = game.num_players();
        let mut g = vec![0.0; sigma.len()];
        let mut utilities = vec![vec![0.0; sigma.len()]; n];
        for z in game.terminals() {
            let k = sigma.lookup(seqs.joint(z)).expect("terminal joint sequence is relevant");
            let p = to_f64(&reach[z]);
            g[k] += p * coef[z];
            for (i, u) in game.node(z).payoffs.iter().enumerate() {
                utilities[i][k] += p * to_f64(u);
            }
        }
        let (lo, hi) = game.payoff_range();
        Ok(Prepared {
            node_map: timed.node_map,
            seqs,
            partition,
            sigma,
            concept: problem.concept,
            incentives,
            g,
            utilities,
            reward_range: to_f64(&(hi - lo)),
            game,
        })
    }

    /// Same game and concept, a different objective.
    pub fn with_objective(&self, original: &Game, objective: &Objective) -> Prepared {
        let coef_orig = objective.terminal_coefficients(original);
        let mut coef = vec![0.0; self.game.num_nodes()];
        for (orig, &h) in self.node_map.iter().enumerate() {
            coef[h] = coef_orig[orig];
        }
        let reach = self.game.chance_reach();
        let mut g = vec![0.0; self.sigma.len()];
        for z in self.game.terminals() {
            let k = self.sigma.lookup(self.seqs.joint(z)).unwrap();
            g[k] += to_f64(&reach[z]) * coef[z];
        }
        Prepared { g, ..self.clone() }
    }

    pub fn certification_limit(&self, rel: f64) -> f64 {
        rel * self.reward_range
    }

    /// Expected utility of every player under a plan over Σ.
    pub fn expected_utilities(&self, plan: &[f64]) -> Vec<f64> {
        self.utilities.iter().map(|u| u.iter().zip(plan).map(|(a, b)| a * b).sum()).collect()
    }

    /// Σ^c entries of the concept, in index order.
    pub fn terminal_sequences(&self) -> Vec<usize> {
        self.sigma.terminal_indices(self.concept)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultStatus {
    Optimal,
    /// Budget ran out; the plan is a certified equilibrium, not necessarily optimal.
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineStats {
    pub iterations: usize,
    pub pricer_mips: usize,
    pub pricer_lps: usize,
    pub support: usize,
    pub lp_rows: usize,
    pub lp_cols: usize,
    pub dag_nodes: usize,
    pub dag_edges: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumResult {
    pub value: f64,
    pub concept: Concept,
    pub engine: Engine,
    pub status: ResultStatus,
    /// Upper bound on the optimum when the budget ran out.
    pub bound: Option<f64>,
    pub certified_benefit: f64,
    /// Two-player games: largest violation of the von Stengel–Forges rows by
    /// the plan extended to every relevant pair.
    pub vsf_residual: Option<f64>,
    /// Plan over Σ; zero outside the concept's terminal joint sequences.
    pub plan: Vec<f64>,
    pub utilities: Vec<f64>,
    pub stats: EngineStats,
    /// Master objective after every column-generation iteration.
    pub log: Vec<f64>,
}

impl EquilibriumResult {
    /// Result JSON. Plan entries are keyed by joint-sequence labels and
    /// listed in index order; zero entries are omitted.
    pub fn to_json(&self, prep: &Prepared, with_plan: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "value": self.value,
            "concept": self.concept,
            "engine": self.engine,
            "status": self.status,
            "certified_benefit": self.certified_benefit,
            "vsf_residual": self.vsf_residual,
            "iterations": self.stats.iterations,
            "utilities": self.utilities,
            "stats": self.stats,
        });
        if let Some(b) = self.bound {
            v["bound"] = b.into();
        }
        if with_plan {
            let plan: Vec<serde_json::Value> = self
                .plan
                .iter()
                .enumerate()
                .filter(|x| *x.1 != 0.0)
                .map(|(k, &x)| serde_json::json!([prep.sigma.label(&prep.game, &prep.seqs, k), x]))
                .collect();
            v["plan"] = plan.into();
        }
        v
    }
}

/// Residual of a two-player plan in V. `full` is the plan on every relevant
/// pair when the engine has it. Otherwise the plan is extended from Σ^c by
/// summing children, and where that leaves pairs undetermined (pairs only
/// relevant to other concepts) by a feasibility LP.
pub fn vsf_residual(
    prep: &Prepared,
    plan: &[f64],
    full: Option<&[f64]>,
    opts: &SolveOptions,
) -> Result<Option<f64>, SolverError> {
    if prep.game.num_players() != 2 {
        return Ok(None);
    }
    let pairs = RelevantPairs::from_sigma(&prep.seqs, prep.sigma.clone())?;
    let sys = vsf_system(&prep.game, &prep.seqs, &pairs)?;
    if let Some(f) = full {
        return Ok(Some(sys.residual(f)));
    }
    let summed = sys.residual(&complete_plan(&prep.game, &prep.seqs, &pairs, prep.concept, plan)?);
    if summed <= VSF_TOL {
        return Ok(Some(summed));
    }
    let tight = Tolerances { primal: 1e-10, dual: 1e-10, ..opts.tol };
    Ok(Some(match complete_plan_lp(&pairs, &sys, prep.concept, plan, &opts.backend, &tight)? {
        Some(z) => sys.residual(&z).min(summed),
        None => summed,
    }))
}

/// Residual target for plans in V.
pub const VSF_TOL: f64 = 1e-8;

/// Certify a plan and wrap it as a result.
pub(crate) fn finish(
    prep: &Prepared,
    engine: Engine,
    plan: Vec<f64>,
    full: Option<&[f64]>,
    stats: EngineStats,
    opts: &SolveOptions,
) -> Result<EquilibriumResult, SolverError> {
    let vsf_residual = vsf_residual(prep, &plan, full, opts)?;
    let benefit = max_deviation_benefit(prep, &plan)?;
    let limit = prep.certification_limit(opts.certify);
    if benefit > limit.max(1e-12) {
        return Err(SolverError::Certification { benefit, limit });
    }
    let value = prep.g.iter().zip(&plan).map(|(a, b)| a * b).sum();
    Ok(EquilibriumResult {
        value,
        concept: prep.concept,
        engine,
        status: ResultStatus::Optimal,
        bound: None,
        certified_benefit: benefit,
        vsf_residual,
        utilities: prep.expected_utilities(&plan),
        plan,
        stats,
        log: Vec::new(),
    })
}

/// Information complexity threshold for `Engine::Auto`.
pub const AUTO_K_THRESHOLD: usize = 16;

/// Run the chosen engine. `prep` must come from `problem`.
pub fn solve(
    problem: &EquilibriumProblem,
    prep: &Prepared,
    engine: Engine,
    opts: &SolveOptions,
) -> Result<EquilibriumResult, SolverError> {
    match engine {
        Engine::Dag => solve_dag_lp(prep, opts),
        Engine::Colgen => solve_colgen(prep, opts),
        Engine::Oracle => {
            let value = brute_force_optimal(
                &problem.game,
                problem.concept,
                &problem.objective,
                &OracleCaps::default(),
                &opts.backend,
            )?;
            Ok(EquilibriumResult {
                value,
                concept: prep.concept,
                engine,
                status: ResultStatus::Optimal,
                bound: None,
                certified_benefit: f64::NAN,
                vsf_residual: None,
                plan: Vec::new(),
                utilities: Vec::new(),
                stats: EngineStats::default(),
                log: Vec::new(),
            })
        }
        Engine::Auto => solve(problem, prep, auto_engine(prep), opts),
    }
}

/// The engine `Engine::Auto` resolves to.
pub fn auto_engine(prep: &Prepared) -> Engine {
    let k = crate::game::game_parameters(&prep.game, &prep.seqs, &prep.partition).k;
    if k <= AUTO_K_THRESHOLD || prep.game.num_players() != 2 {
        Engine::Dag
    } else {
        Engine::Colgen
    }
}

impl Default for EngineStats {
    fn default() -> Self {
        EngineStats {
            iterations: 0,
            pricer_mips: 0,
            pricer_lps: 0,
            support: 0,
            lp_rows: 0,
            lp_cols: 0,
            dag_nodes: 0,
            dag_edges: 0,
        }
    }
}

#[cfg(test)]
mod tests;
