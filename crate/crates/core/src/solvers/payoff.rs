use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{solve, Engine, EquilibriumProblem, Objective, Prepared, SolveOptions, SolverError};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PayoffPoint {
    pub theta: f64,
    pub utilities: Vec<f64>,
}

/// Weights of direction k out of n. Three-player games are read as
/// constant-sum, so only the first two utilities are weighted.
pub fn direction(k: usize, n: usize, players: usize) -> Vec<f64> {
    let theta = 2.0 * PI * k as f64 / n as f64;
    let mut w = vec![theta.cos(), theta.sin()];
    w.resize(players.max(2), 0.0);
    w
}

/// Support points of the equilibrium payoff set in `n` evenly spaced
/// directions, solved on `threads` workers.
pub fn payoff_space(
    problem: &EquilibriumProblem,
    prep: &Prepared,
    n: usize,
    engine: Engine,
    opts: &SolveOptions,
    threads: usize,
) -> Result<Vec<PayoffPoint>, SolverError> {
    let players = prep.game.num_players();
    let run = || {
        (0..n)
            .into_par_iter()
            .map(|k| {
                let objective = Objective::Weights(direction(k, n, players));
                let sub = EquilibriumProblem { objective: objective.clone(), ..problem.clone() };
                let p = prep.with_objective(&problem.game, &objective);
                let r = solve(&sub, &p, engine, opts)?;
                Ok(PayoffPoint { theta: 2.0 * PI * k as f64 / n as f64, utilities: r.utilities })
            })
            .collect::<Result<Vec<_>, SolverError>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}
