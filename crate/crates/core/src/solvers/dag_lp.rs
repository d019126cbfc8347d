use std::collections::HashMap;

use super::{finish, Engine, EngineStats, EquilibriumResult, Prepared, SolveOptions, SolverError};
use crate::dag::{build_correlation_dag, dag_constraint_system, polish_flow, project_plan, DagOptions};
use crate::lp::{LinearModel, Relation, Sense, Status};

/// Append the incentive constraints of every non-void trigger to a model
/// whose ξ variables are `xi_var` (by Σ index): for each τ a free vector
/// v_τ with F_τᵀv_τ ≥ A_τᵀξ and f_τᵀv_τ − b_τᵀξ ≤ u_τ, where u_τ is
/// `slacks[τ]` (or 0 when `slacks` is empty).
/// Returns the index of the first row of every τ.
pub(crate) fn add_incentive_rows(
    m: &mut LinearModel,
    prep: &Prepared,
    xi_var: &HashMap<usize, usize>,
    slacks: &[usize],
) -> Vec<usize> {
    let mut first = Vec::with_capacity(prep.incentives.len());
    for (t, (q, pair)) in prep.incentives.iter().enumerate() {
        first.push(m.rows.len());
        let v0 = m.vars.len();
        for r in 0..q.rows.len() {
            m.add_var(format!("v{t}_{r}"), f64::NEG_INFINITY, f64::INFINITY);
        }
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); q.num_vars];
        for (r, row) in q.rows.iter().enumerate() {
            for &(c, a) in row {
                cols[c].push((v0 + r, a));
            }
        }
        for &(k, c, a) in &pair.a {
            if let Some(&x) = xi_var.get(&k) {
                cols[c].push((x, -a));
            }
        }
        for (c, coeffs) in cols.into_iter().enumerate() {
            m.add_row(format!("dev{t}_{c}"), coeffs, Relation::Ge, 0.0);
        }
        let mut row: Vec<(usize, f64)> = q.rhs.iter().enumerate().filter(|x| *x.1 != 0.0).map(|(r, &f)| (v0 + r, f)).collect();
        row.extend(pair.b.iter().filter_map(|&(k, b)| xi_var.get(&k).map(|&x| (x, -b))));
        if let Some(&u) = slacks.get(t) {
            row.push((u, -1.0));
        }
        m.add_row(format!("gain{t}"), row, Relation::Le, 0.0);
    }
    first
}

/// Optimal equilibrium through the correlation DAG: the flow polytope of the
/// DAG replaces the correlation-plan polytope.
pub fn solve_dag_lp(prep: &Prepared, opts: &SolveOptions) -> Result<EquilibriumResult, SolverError> {
    let dag_opts = DagOptions { edge_budget: opts.edge_budget, ..DagOptions::default() };
    let dag = build_correlation_dag(&prep.game, &prep.seqs, &prep.partition, &prep.sigma, prep.concept, &dag_opts)?;
    let flow = dag_constraint_system(&dag);
    let mut m = LinearModel::new(Sense::Max);
    for &s in &flow.vars {
        m.add_var(format!("mu{s}"), 0.0, f64::INFINITY);
    }
    for (r, (row, &b)) in flow.rows.iter().zip(&flow.rhs).enumerate() {
        m.add_row(format!("flow{r}"), row.clone(), Relation::Eq, b);
    }
    let mut xi_var = HashMap::new();
    for (k, parents) in &flow.projection {
        let x = m.add_var(format!("xi{k}"), 0.0, f64::INFINITY);
        xi_var.insert(*k, x);
        let mut row = vec![(x, 1.0)];
        row.extend(parents.iter().map(|&p| (p, -1.0)));
        m.add_row(format!("proj{k}"), row, Relation::Eq, 0.0);
    }
    add_incentive_rows(&mut m, prep, &xi_var, &[]);
    let mut obj: Vec<(usize, f64)> =
        xi_var.iter().filter(|x| prep.g[*x.0] != 0.0).map(|(&k, &x)| (x, prep.g[k])).collect();
    obj.sort_by_key(|x| x.0);
    m.objective = obj;

    let sol = opts.backend.solve_lp(&m, &opts.tol)?;
    if sol.status != Status::Optimal {
        return Err(SolverError::Status(sol.status));
    }
    let mu = polish_flow(&dag, &flow, &sol.primal[..flow.vars.len()]);
    let plan = project_plan(&flow, &mu, prep.sigma.len())?;
    let ds = dag.stats();
    let stats = EngineStats {
        iterations: sol.iterations,
        lp_rows: m.rows.len(),
        lp_cols: m.vars.len(),
        dag_nodes: ds.nodes,
        dag_edges: ds.edges,
        ..EngineStats::default()
    };
    finish(prep, Engine::Dag, plan, None, stats, opts)
}
