//! Brute force over pure strategy profiles, written straight from the
//! definitions of the three concepts and sharing nothing with the other
//! engines except the game tree and the LP backend.

use super::{Objective, SolverError};
use crate::game::{to_f64, Game, InfosetId, NodeId};
use crate::lp::{Backend, LinearModel, Relation, Sense, Status, Tolerances};
use crate::triggers::Concept;

#[derive(Clone, Debug)]
pub struct OracleCaps {
    pub max_profiles: usize,
    /// Bound on profiles × agents × nodes.
    pub max_work: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { max_profiles: 20_000, max_work: 200_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Activation {
    Root,
    Reach(InfosetId),
    Recommend(InfosetId, usize),
}

/// A trigger agent: from activation on, `player` plays `assign` wherever it
/// is set and the recommendation elsewhere.
#[derive(Clone, Debug)]
struct Agent {
    player: usize,
    activation: Activation,
    assign: Vec<Option<usize>>,
}

fn walk(game: &Game, h: NodeId, profile: &[usize], agent: Option<&Agent>, mut active: bool, leaf: &dyn Fn(NodeId) -> f64) -> f64 {
    let node = game.node(h);
    if node.is_terminal() {
        return leaf(h);
    }
    if node.is_chance() {
        return node.actions.iter().map(|a| to_f64(a.prob.as_ref().unwrap()) * walk(game, a.child, profile, agent, active, leaf)).sum();
    }
    let j = node.infoset.unwrap();
    let mut a = profile[j];
    if let Some(ag) = agent {
        if !active {
            active = match ag.activation {
                Activation::Root => true,
                Activation::Reach(i) => i == j,
                Activation::Recommend(i, b) => i == j && profile[j] == b,
            };
        }
        if active && node.player() == Some(ag.player) {
            if let Some(d) = ag.assign[j] {
                a = d;
            }
        }
    }
    walk(game, node.actions[a].child, profile, agent, active, leaf)
}

/// Infosets of `player` with a node at or below some node of `top`.
fn below(game: &Game, player: usize, top: InfosetId) -> Vec<InfosetId> {
    let roots = &game.infoset(top).nodes;
    game.infosets_of(player)
        .filter(|&j| game.infoset(j).nodes.iter().any(|&h| roots.iter().any(|&r| game.is_ancestor_or_self(r, h))))
        .collect()
}

/// Every assignment of actions to `infosets`, as full per-infoset vectors.
fn assignments(game: &Game, infosets: &[InfosetId], cap: usize) -> Option<Vec<Vec<Option<usize>>>> {
    let mut out = vec![vec![None; game.infosets().len()]];
    for &j in infosets {
        let n = game.infoset(j).num_actions();
        if out.len() * n > cap {
            return None;
        }
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |a| {
                    let mut w = v.clone();
                    w[j] = Some(a);
                    w
                })
            })
            .collect();
    }
    Some(out)
}

fn agents(game: &Game, concept: Concept, cap: usize) -> Option<Vec<Agent>> {
    let mut out = Vec::new();
    for player in 0..game.num_players() {
        let mut push = |activation, scope: Vec<InfosetId>| -> Option<()> {
            for assign in assignments(game, &scope, cap)? {
                out.push(Agent { player, activation, assign });
            }
            Some(())
        };
        match concept {
            Concept::Nfcce => push(Activation::Root, game.infosets_of(player).collect())?,
            Concept::Efcce => {
                for i in game.infosets_of(player) {
                    push(Activation::Reach(i), below(game, player, i))?;
                }
            }
            Concept::Efce => {
                for i in game.infosets_of(player) {
                    // The recommended action stays available to the agent.
                    for a in 0..game.infoset(i).num_actions() {
                        push(Activation::Recommend(i, a), below(game, player, i))?;
                    }
                }
            }
        }
    }
    Some(out)
}

/// Optimal objective value over all equilibria of `concept`, by an LP over
/// distributions on pure profiles.
pub fn brute_force_optimal(
    game: &Game,
    concept: Concept,
    objective: &Objective,
    caps: &OracleCaps,
    backend: &Backend,
) -> Result<f64, SolverError> {
    let radix: Vec<usize> = game.infosets().iter().map(|i| i.num_actions()).collect();
    let count = radix.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n).filter(|&c| c <= caps.max_profiles));
    let count = count.ok_or_else(|| SolverError::CapsExceeded(format!("more than {} profiles", caps.max_profiles)))?;
    let agents = agents(game, concept, caps.max_work)
        .ok_or_else(|| SolverError::CapsExceeded("too many deviations".into()))?;
    if count.saturating_mul(agents.len().max(1)).saturating_mul(game.num_nodes()) > caps.max_work {
        return Err(SolverError::CapsExceeded(format!("{count} profiles × {} agents", agents.len())));
    }
    let coef = objective.terminal_coefficients(game);
    let mut m = LinearModel::new(Sense::Max);
    let mut profile = vec![0usize; radix.len()];
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); agents.len()];
    for p in 0..count {
        let mut r = p;
        for (j, &n) in radix.iter().enumerate() {
            profile[j] = r % n;
            r /= n;
        }
        let x = m.add_var(format!("p{p}"), 0.0, f64::INFINITY);
        let value = walk(game, 0, &profile, None, false, &|z| coef[z]);
        if value != 0.0 {
            m.objective.push((x, value));
        }
        let base: Vec<f64> = (0..game.num_players())
            .map(|i| walk(game, 0, &profile, None, false, &|z| to_f64(&game.node(z).payoffs[i])))
            .collect();
        for (row, ag) in rows.iter_mut().zip(&agents) {
            let i = ag.player;
            let dev = walk(game, 0, &profile, Some(ag), false, &|z| to_f64(&game.node(z).payoffs[i]));
            let gain = dev - base[i];
            if gain.abs() > 1e-12 {
                row.push((x, gain));
            }
        }
    }
    m.add_row("simplex", (0..count).map(|x| (x, 1.0)).collect(), Relation::Eq, 1.0);
    let mut seen = std::collections::HashSet::new();
    for (k, row) in rows.into_iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        let key: Vec<(usize, u64)> = row.iter().map(|&(x, v)| (x, v.to_bits())).collect();
        if seen.insert(key) {
            m.add_row(format!("agent{k}"), row, Relation::Le, 0.0);
        }
    }
    let sol = backend.solve_lp(&m, &Tolerances::default())?;
    if sol.status != Status::Optimal {
        return Err(SolverError::Status(sol.status));
    }
    Ok(sol.objective)
}
