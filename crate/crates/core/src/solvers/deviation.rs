use super::{Prepared, SolverError};

/// Largest benefit any trigger agent gets from its best deviation against
/// `plan` (a vector over Σ). Void triggers are skipped; with no triggers at
/// all the benefit is 0.
pub fn max_deviation_benefit(prep: &Prepared, plan: &[f64]) -> Result<f64, SolverError> {
    if plan.len() != prep.sigma.len() {
        return Err(SolverError::MissingPlanEntries { got: plan.len(), expected: prep.sigma.len() });
    }
    let best = prep
        .incentives
        .iter()
        .map(|(q, pair)| q.best_response(&pair.weights(q.num_vars, plan)).0 - pair.b_dot(plan))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(if best == f64::NEG_INFINITY { 0.0 } else { best })
}
