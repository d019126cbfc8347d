//! Two-player column generation over semi-randomized correlation plans.
//!
//! The master keeps a support of product plans x1 ⊗ x2. Each member
//! contributes two cones, {y1 ⊗ x2 : y1 ∈ λ·X1} and {x1 ⊗ y2 : y2 ∈ λ·X2},
//! and the weights λ over all members sum to one. The incentive constraints
//! are the same dualized trigger rows as in the DAG LP. The pricer maximizes
//! the duals of the linking rows over V with one player's marginals forced
//! to be pure.

use std::collections::HashMap;
use std::time::Instant;

use super::dag_lp::add_incentive_rows;
use super::{finish, Engine, EngineStats, EquilibriumResult, Prepared, ResultStatus, SolveOptions, SolverError};
use crate::lp::{LinearModel, Relation, Sense, Solution, Status};
use crate::vsf::{
    marginals, polish_sequence_form, semi_randomized_model, sequence_form_rows, tensor, uniform_strategy, vsf_system,
    CorrelationPlan, RelevantPairs, Side, VsfSystem,
};

/// Offset subtracted from the pricing optimum to get the reduced cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PricingRule {
    /// The master objective value, i.e. the dual of the convexity row.
    Classical,
    /// gᵀξ − wᵀξ with w the dualized incentive weights. Agrees with
    /// `Classical` only when the master objective is gᵀξ; kept for comparison.
    Printed,
}

#[derive(Clone, Debug)]
pub struct ColgenOptions {
    pub max_iterations: usize,
    pub pricing: PricingRule,
    /// Try the LP relaxation of the pricer before the MIP.
    pub lp_first: bool,
    /// Reduced-cost threshold, relative to the reward range.
    pub tol: f64,
}

impl Default for ColgenOptions {
    fn default() -> Self {
        ColgenOptions { max_iterations: 400, pricing: PricingRule::Classical, lp_first: true, tol: 1e-7 }
    }
}

/// Support of the master plus the phase it runs in.
#[derive(Clone, Debug)]
pub struct MasterState {
    pub members: Vec<CorrelationPlan>,
    /// Maximize −Σ_τ u_τ (the total incentive violation) instead of gᵀξ.
    pub relaxed: bool,
}

/// Where things live in the master model.
#[derive(Clone, Debug)]
pub struct MasterLayout {
    pub xi_var: HashMap<usize, usize>,
    /// Violation slack of every trigger, fixed to 0 outside the relaxed phase.
    pub slacks: Vec<usize>,
    /// Linking row of every Σ^c entry, by Σ index.
    pub link_row: HashMap<usize, usize>,
    pub convexity_row: usize,
    /// (λ, first strategy variable) of both cones of every member.
    pub members: Vec<[(usize, usize); 2]>,
}

pub(crate) struct Context {
    pub pairs: RelevantPairs,
    pub sys: VsfSystem,
    pub sf: [Vec<(Vec<(usize, f64)>, f64)>; 2],
}

impl Context {
    pub fn new(prep: &Prepared) -> Result<Self, SolverError> {
        let pairs = RelevantPairs::from_sigma(&prep.seqs, prep.sigma.clone())?;
        let sys = vsf_system(&prep.game, &prep.seqs, &pairs)?;
        let sf = [sequence_form_rows(&prep.game, &prep.seqs, 0), sequence_form_rows(&prep.game, &prep.seqs, 1)];
        Ok(Context { pairs, sys, sf })
    }
}

pub fn build_master(prep: &Prepared, pairs: &RelevantPairs, state: &MasterState) -> (LinearModel, MasterLayout) {
    let sf = [sequence_form_rows(&prep.game, &prep.seqs, 0), sequence_form_rows(&prep.game, &prep.seqs, 1)];
    master_model(prep, pairs, &sf, state)
}

fn master_model(
    prep: &Prepared,
    pairs: &RelevantPairs,
    sf: &[Vec<(Vec<(usize, f64)>, f64)>; 2],
    state: &MasterState,
) -> (LinearModel, MasterLayout) {
    let mut m = LinearModel::new(Sense::Max);
    let terminal = prep.terminal_sequences();
    let mut xi_var = HashMap::new();
    for &k in &terminal {
        xi_var.insert(k, m.add_var(format!("xi{k}"), f64::NEG_INFINITY, f64::INFINITY));
    }
    let cap = if state.relaxed { f64::INFINITY } else { 0.0 };
    let slacks: Vec<usize> = (0..prep.incentives.len()).map(|t| m.add_var(format!("u{t}"), 0.0, cap)).collect();
    add_incentive_rows(&mut m, prep, &xi_var, &slacks);

    // Member variables: λ and the scaled free strategy of each cone.
    let mut link: HashMap<usize, Vec<(usize, f64)>> = terminal.iter().map(|&k| (k, Vec::new())).collect();
    let mut lambdas = Vec::new();
    let mut member_vars = Vec::new();
    for (s, plan) in state.members.iter().enumerate() {
        let mut here = [(0, 0); 2];
        for player in 0..2 {
            let lam = m.add_var(format!("lam{s}_{player}"), 0.0, f64::INFINITY);
            lambdas.push(lam);
            let n = prep.seqs.num_sequences(player);
            let base = m.vars.len();
            here[player] = (lam, base);
            for q in 0..n {
                m.add_var(format!("y{s}_{player}_{q}"), 0.0, f64::INFINITY);
            }
            for (r, (row, rhs)) in sf[player].iter().enumerate() {
                let mut coeffs: Vec<(usize, f64)> = row.iter().map(|&(q, a)| (base + q, a)).collect();
                if *rhs != 0.0 {
                    coeffs.push((lam, -rhs));
                }
                m.add_row(format!("sf{s}_{player}_{r}"), coeffs, Relation::Eq, 0.0);
            }
            let fixed = if player == 0 { &plan.marg2 } else { &plan.marg1 };
            for &k in &terminal {
                let (s1, s2) = pairs.get(k);
                let (mine, theirs) = if player == 0 { (s1, s2) } else { (s2, s1) };
                if fixed[theirs] != 0.0 {
                    link.get_mut(&k).unwrap().push((base + mine, -fixed[theirs]));
                }
            }
        }
        member_vars.push(here);
    }
    let mut link_row = HashMap::new();
    for &k in &terminal {
        let mut row = vec![(xi_var[&k], 1.0)];
        row.append(link.get_mut(&k).unwrap());
        link_row.insert(k, m.add_row(format!("link{k}"), row, Relation::Eq, 0.0));
    }
    let convexity_row = m.add_row("convex", lambdas.iter().map(|&l| (l, 1.0)).collect(), Relation::Eq, 1.0);
    if state.relaxed {
        m.objective = slacks.iter().map(|&u| (u, -1.0)).collect();
    } else {
        let mut obj: Vec<(usize, f64)> =
            xi_var.iter().filter(|x| prep.g[*x.0] != 0.0).map(|(&k, &x)| (x, prep.g[k])).collect();
        obj.sort_by_key(|x| x.0);
        m.objective = obj;
    }
    (m, MasterLayout { xi_var, slacks, link_row, convexity_row, members: member_vars })
}

/// Outcome of one pricing round.
#[derive(Clone, Debug)]
pub struct Pricing {
    /// Best reduced cost over the side (an upper bound when the pricer's
    /// optimum is not itself a product plan).
    pub delta: f64,
    /// Product plans with positive reduced cost, best first.
    pub columns: Vec<CorrelationPlan>,
    pub used_mip: bool,
}

/// Price one side against a solved master.
pub fn price(
    prep: &Prepared,
    pairs: &RelevantPairs,
    sys: &VsfSystem,
    side: Side,
    state: &MasterState,
    layout: &MasterLayout,
    sol: &Solution,
    opts: &SolveOptions,
) -> Result<Pricing, SolverError> {
    let mut y = vec![0.0; pairs.len()];
    for (&k, &r) in &layout.link_row {
        y[k] = sol.dual[r];
    }
    let offset = match opts.colgen.pricing {
        PricingRule::Classical => sol.objective,
        PricingRule::Printed => {
            // w = g′ − y on Σ^c, where g′ is the phase objective over ξ.
            let mut v = 0.0;
            for (&k, &x) in &layout.xi_var {
                let gp = if state.relaxed { 0.0 } else { prep.g[k] };
                v += (prep.g[k] - (gp - y[k])) * sol.primal[x];
            }
            v
        }
    };
    let mut model = semi_randomized_model(pairs, sys, side, &y);
    let pure = match side {
        Side::One => pairs.marg2_index(),
        Side::Two => pairs.marg1_index(),
    };
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut used_mip = false;
    let mut delta = None;
    if opts.colgen.lp_first {
        let binaries: Vec<usize> = (0..model.vars.len()).filter(|&j| model.vars[j].binary).collect();
        for &j in &binaries {
            model.vars[j].binary = false;
        }
        let relax = opts.backend.solve_lp(&model, &opts.tol)?;
        for &j in &binaries {
            model.vars[j].binary = true;
        }
        if relax.status != Status::Optimal {
            return Err(SolverError::Status(relax.status));
        }
        let integral = pure.iter().all(|&k| {
            let x = relax.primal[k];
            x.min(1.0 - x).abs() <= opts.tol.integrality
        });
        if integral {
            delta = Some(relax.objective - offset);
            candidates.push(relax.primal);
        }
    }
    if delta.is_none() {
        used_mip = true;
        let mip = opts.backend.solve_mip(&model, &opts.tol, &opts.mip)?;
        if mip.status != Status::Optimal {
            return Err(SolverError::Status(mip.status));
        }
        delta = Some(mip.objective - offset);
        candidates.push(mip.primal);
        candidates.extend(mip.pool);
    }
    let delta = delta.unwrap();
    let threshold = opts.colgen.tol * prep.reward_range.max(1.0);
    let mut columns: Vec<(f64, CorrelationPlan)> = Vec::new();
    for zeta in candidates {
        let (mut x1, mut x2) = marginals(pairs, &zeta);
        let snap = |v: &mut Vec<f64>| {
            for x in v.iter_mut() {
                *x = x.clamp(0.0, 1.0);
            }
        };
        snap(&mut x1);
        snap(&mut x2);
        match side {
            Side::One => x2.iter_mut().for_each(|x| *x = x.round()),
            Side::Two => x1.iter_mut().for_each(|x| *x = x.round()),
        }
        polish_sequence_form(&prep.game, &prep.seqs, 0, &mut x1, 1.0);
        polish_sequence_form(&prep.game, &prep.seqs, 1, &mut x2, 1.0);
        // The pricer's point should already be x1 ⊗ x2; fall back to the
        // product of its marginals, which is always a valid plan.
        let plan = tensor(pairs, &x1, &x2);
        debug_assert!(sys.residual(&plan) <= 1e-6);
        let rc: f64 = plan.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - offset;
        if rc > threshold && !columns.iter().any(|c| c.1.xi == plan) && !state.members.iter().any(|c| c.xi == plan) {
            columns.push((rc, CorrelationPlan { xi: plan, marg1: x1, marg2: x2 }));
        }
    }
    columns.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(Pricing { delta, columns: columns.into_iter().map(|c| c.1).collect(), used_mip })
}

pub fn solve_colgen(prep: &Prepared, opts: &SolveOptions) -> Result<EquilibriumResult, SolverError> {
    let ctx = Context::new(prep)?;
    let start = Instant::now();
    let x1 = uniform_strategy(&prep.game, &prep.seqs, 0);
    let x2 = uniform_strategy(&prep.game, &prep.seqs, 1);
    let seed = CorrelationPlan { xi: tensor(&ctx.pairs, &x1, &x2), marg1: x1, marg2: x2 };
    let mut state = MasterState { members: vec![seed], relaxed: true };
    let mut stats = EngineStats::default();
    let mut log = Vec::new();
    let threshold = opts.colgen.tol * prep.reward_range.max(1.0);
    let mut best: Option<EquilibriumResult> = None;
    let mut bound = f64::INFINITY;
    loop {
        let (model, layout) = master_model(prep, &ctx.pairs, &ctx.sf, &state);
        stats.lp_rows = model.rows.len();
        stats.lp_cols = model.vars.len();
        let sol = opts.backend.solve_lp(&model, &opts.tol)?;
        if sol.status != Status::Optimal {
            return Err(SolverError::Status(sol.status));
        }
        log.push(sol.objective);
        if state.relaxed && -sol.objective <= threshold {
            // A feasible plan is in the support; optimize the real objective.
            state.relaxed = false;
            continue;
        }
        let full = extract_plan(prep, &ctx.pairs, &state, &layout, &sol);
        let plan = restrict(prep, &full);
        stats.iterations += 1;
        stats.support = state.members.len();

        // Either side alone bounds the reduced cost over all product plans;
        // pricing both adds two columns per round.
        let mut delta = f64::INFINITY;
        let mut columns = Vec::new();
        for side in [Side::One, Side::Two] {
            let p = price(prep, &ctx.pairs, &ctx.sys, side, &state, &layout, &sol, opts)?;
            if p.used_mip {
                stats.pricer_mips += 1;
            } else {
                stats.pricer_lps += 1;
            }
            delta = delta.min(p.delta);
            for c in p.columns {
                if !columns.iter().any(|x: &CorrelationPlan| x.xi == c.xi) {
                    columns.push(c);
                }
            }
        }
        if !state.relaxed {
            bound = bound.min(sol.objective + delta.max(0.0));
            if let Ok(mut r) = finish(prep, Engine::Colgen, plan.clone(), Some(&full), stats.clone(), opts) {
                r.log = log.clone();
                if best.as_ref().map_or(true, |b| r.value > b.value) {
                    best = Some(r);
                }
            }
        }
        if delta <= threshold {
            if state.relaxed {
                // No product plan lowers the violation: nothing is feasible.
                return Err(SolverError::Certification { benefit: -sol.objective, limit: threshold });
            }
            let mut r = finish(prep, Engine::Colgen, plan, Some(&full), stats, opts)?;
            r.log = log;
            return Ok(r);
        }
        let out_of_time = opts.time_budget.is_some_and(|t| start.elapsed() > t);
        if columns.is_empty() || stats.iterations >= opts.colgen.max_iterations || out_of_time {
            let iterations = stats.iterations;
            let best = best.map(|mut r| {
                r.status = ResultStatus::BudgetExceeded;
                r.bound = Some(bound);
                Box::new(r)
            });
            return Err(SolverError::Budget { best, bound, iterations });
        }
        state.members.extend(columns);
    }
}

/// The master's plan on every relevant pair, rebuilt from the support with
/// each cone strategy made exactly sequence-form consistent.
fn extract_plan(
    prep: &Prepared,
    pairs: &RelevantPairs,
    state: &MasterState,
    layout: &MasterLayout,
    sol: &Solution,
) -> Vec<f64> {
    let mut full = vec![0.0; pairs.len()];
    let mut mass = 0.0;
    for (plan, vars) in state.members.iter().zip(&layout.members) {
        for (player, &(lam, base)) in vars.iter().enumerate() {
            let l = sol.primal[lam].max(0.0);
            if l == 0.0 {
                continue;
            }
            mass += l;
            let n = prep.seqs.num_sequences(player);
            let mut y = sol.primal[base..base + n].to_vec();
            polish_sequence_form(&prep.game, &prep.seqs, player, &mut y, l);
            let t = if player == 0 { tensor(pairs, &y, &plan.marg2) } else { tensor(pairs, &plan.marg1, &y) };
            for (f, x) in full.iter_mut().zip(t) {
                *f += x;
            }
        }
    }
    if mass > 0.0 {
        full.iter_mut().for_each(|x| *x /= mass);
    }
    full
}

/// Zero outside Σ^c.
fn restrict(prep: &Prepared, full: &[f64]) -> Vec<f64> {
    (0..full.len()).map(|k| if prep.sigma.is_terminal(prep.concept, k) { full[k] } else { 0.0 }).collect()
}
