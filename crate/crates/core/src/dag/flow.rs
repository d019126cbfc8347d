use thiserror::Error;

use super::{CorrelationDag, DagNodeKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("flow vector has {got} entries, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("flow violates row {row} by {residual:e}")]
    InfeasibleFlow { row: usize, residual: f64 },
    #[error("flow variable {var} is negative ({value:e})")]
    Negative { var: usize, value: f64 },
}

/// Sequence-form constraints of the DAG. Variables are the observation
/// nodes (the outcomes of mediator decisions); decision and terminal nodes
/// carry the sum of their parents.
#[derive(Clone, Debug)]
pub struct DagFlowSystem {
    pub vars: Vec<usize>,
    pub var_of: Vec<Option<usize>>,
    /// Equality rows `row · μ = rhs`: the source row, then one per decision node.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    /// (joint sequence, variables summing to ξ at it), by joint sequence.
    pub projection: Vec<(usize, Vec<usize>)>,
}

pub fn dag_constraint_system(dag: &CorrelationDag) -> DagFlowSystem {
    let mut vars = Vec::new();
    let mut var_of = vec![None; dag.nodes.len()];
    for (s, n) in dag.nodes.iter().enumerate() {
        if n.kind == DagNodeKind::Observation {
            var_of[s] = Some(vars.len());
            vars.push(s);
        }
    }
    let mut rows = vec![vec![(var_of[dag.source()].unwrap(), 1.0)]];
    let mut rhs = vec![1.0];
    for n in dag.nodes.iter().filter(|n| n.kind == DagNodeKind::Decision) {
        let mut row: Vec<(usize, f64)> = n.parents.iter().map(|&p| (var_of[p].unwrap(), 1.0)).collect();
        row.extend(n.children.iter().map(|&c| (var_of[c].unwrap(), -1.0)));
        rows.push(row);
        rhs.push(0.0);
    }
    let mut projection: Vec<(usize, Vec<usize>)> = dag
        .nodes
        .iter()
        .filter(|n| n.kind == DagNodeKind::Terminal)
        .map(|n| (n.sigma.unwrap(), n.parents.iter().map(|&p| var_of[p].unwrap()).collect()))
        .collect();
    projection.sort();
    DagFlowSystem { vars, var_of, rows, rhs, projection }
}

/// ξ over all relevant joint sequences (`sigma_len` entries) from a feasible
/// flow; entries outside the concept's terminal set are 0.
pub fn project_plan(sys: &DagFlowSystem, mu: &[f64], sigma_len: usize) -> Result<Vec<f64>, FlowError> {
    const TOL: f64 = 1e-8;
    if mu.len() != sys.vars.len() {
        return Err(FlowError::Length { got: mu.len(), expected: sys.vars.len() });
    }
    if let Some((var, &value)) = mu.iter().enumerate().find(|(_, &v)| v < -TOL) {
        return Err(FlowError::Negative { var, value });
    }
    for (row, (r, b)) in sys.rows.iter().zip(&sys.rhs).enumerate() {
        let residual = r.iter().map(|&(j, a)| a * mu[j]).sum::<f64>() - b;
        if residual.abs() > TOL {
            return Err(FlowError::InfeasibleFlow { row, residual });
        }
    }
    let mut xi = vec![0.0; sigma_len];
    for (k, parents) in &sys.projection {
        xi[*k] = parents.iter().map(|&p| mu[p]).sum();
    }
    Ok(xi)
}

/// Make an approximately feasible flow exactly conservative: walking the
/// DAG in topological order, each decision node passes on exactly its
/// inflow, split in proportion to the (clamped) outflow it had.
pub fn polish_flow(dag: &CorrelationDag, sys: &DagFlowSystem, mu: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = mu.iter().map(|&x| x.max(0.0)).collect();
    out[sys.var_of[dag.source()].unwrap()] = 1.0;
    let mut indeg: Vec<usize> = dag.nodes.iter().map(|n| n.parents.len()).collect();
    let mut ready: Vec<usize> = (0..dag.nodes.len()).filter(|&s| indeg[s] == 0).collect();
    while let Some(s) = ready.pop() {
        let n = &dag.nodes[s];
        if n.kind == DagNodeKind::Decision {
            let inflow: f64 = n.parents.iter().map(|&p| out[sys.var_of[p].unwrap()]).sum();
            let vars: Vec<usize> = n.children.iter().map(|&c| sys.var_of[c].unwrap()).collect();
            let total: f64 = vars.iter().map(|&v| out[v]).sum();
            for (k, &v) in vars.iter().enumerate() {
                out[v] = if total > 0.0 {
                    out[v] * (inflow / total)
                } else if k == 0 {
                    inflow
                } else {
                    0.0
                };
            }
        }
        for &c in &n.children {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::game::{compute_public_states, compute_sequences, GameBuilder, Rational};

    #[test]
    fn one_decision_two_actions() {
        let mut b = GameBuilder::new(1);
        let x = b.terminal(vec![Rational::from_integer(1)]);
        let y = b.terminal(vec![Rational::from_integer(0)]);
        let i = b.add_infoset(0, &["x", "y"]);
        let r = b.decision(i, vec![x, y]);
        let g = b.build(r).unwrap();
        let s = compute_sequences(&g).unwrap();
        let p = compute_public_states(&g, &s).unwrap();
        let sigma = crate::triggers::JointSequences::build(&g, &s);
        let opts = DagOptions { triggers: false, ..DagOptions::default() };
        let dag = build_correlation_dag(&g, &s, &p, &sigma, Concept::Nfcce, &opts).unwrap();
        let sys = dag_constraint_system(&dag);
        assert_eq!(sys.rows.len(), 2);
        assert_eq!(dag.stats().edges, 1 + 2 + 2);
        let xi = project_plan(&sys, &[1.0, 0.25, 0.75], sigma.len()).unwrap();
        let k = |seq: u32| sigma.lookup(&[seq]).unwrap();
        assert_eq!(xi[k(1)], 0.25);
        assert_eq!(xi[k(2)], 0.75);
        assert!(project_plan(&sys, &[1.0, 0.5, 0.25], sigma.len()).is_err());
    }
}
