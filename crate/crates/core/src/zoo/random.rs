//! Seeded random games for property tests and oracle runs.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Action, Game, Owner, RawNode, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RandomGameError {
    #[error("random game parameters exceed caps: {0}")]
    CapsExceeded(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGameSpec {
    pub seed: u64,
    pub players: usize,
    /// Number of decision layers below the root (0 gives a single terminal).
    pub depth: usize,
    pub branching: usize,
    pub infoset_merge_prob: f64,
    pub chance_prob: f64,
}

impl RandomGameSpec {
    /// Parameters used by the oracle suites: at most `players` players and
    /// a handful of terminals.
    pub fn tiny(seed: u64, players: usize) -> Self {
        RandomGameSpec { seed, players, depth: 3, branching: 2, infoset_merge_prob: 0.6, chance_prob: 0.2 }
    }
}

pub const MAX_PLAYERS: usize = 4;
pub const MAX_DEPTH: usize = 12;
pub const MAX_BRANCHING: usize = 4;
pub const MAX_LEAVES: usize = 100_000;

struct Pending {
    owner: Owner,
    /// (player, own sequence, number of actions) grouping key for players.
    own: Vec<Vec<(usize, usize)>>,
    arity: usize,
}

pub fn gen_random_game(spec: &RandomGameSpec) -> Result<Game, RandomGameError> {
    let caps = |m: String| Err(RandomGameError::CapsExceeded(m));
    if spec.players == 0 || spec.players > MAX_PLAYERS {
        return caps(format!("players = {} (1..={MAX_PLAYERS})", spec.players));
    }
    if spec.depth > MAX_DEPTH {
        return caps(format!("depth = {} (max {MAX_DEPTH})", spec.depth));
    }
    if spec.branching == 0 || spec.branching > MAX_BRANCHING {
        return caps(format!("branching = {} (1..={MAX_BRANCHING})", spec.branching));
    }
    if (spec.branching as f64).powi(spec.depth as i32) > MAX_LEAVES as f64 {
        return caps(format!("branching^depth exceeds {MAX_LEAVES}"));
    }
    for (name, p) in [("infoset_merge_prob", spec.infoset_merge_prob), ("chance_prob", spec.chance_prob)] {
        if !(0.0..=1.0).contains(&p) {
            return caps(format!("{name} = {p} is not a probability"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.players;
    let mut raw: Vec<RawNode> = Vec::new();
    let mut infoset_of: Vec<Option<usize>> = Vec::new();
    let mut layer = vec![0usize];
    let mut pending = vec![Pending { owner: Owner::Terminal, own: vec![Vec::new(); n], arity: 0 }];
    raw.push(RawNode { owner: Owner::Terminal, infoset: None, actions: Vec::new(), payoffs: Vec::new() });
    infoset_of.push(None);
    let mut num_infosets = 0;

    for d in 0..=spec.depth {
        // Decide node kinds for this layer.
        for &h in &layer {
            let stop = d == spec.depth || (d > 0 && rng.gen_bool(0.15));
            let p = &mut pending[h];
            if stop {
                p.owner = Owner::Terminal;
                continue;
            }
            p.arity = if spec.branching == 1 { 1 } else { rng.gen_range(2..=spec.branching) };
            p.owner = if rng.gen_bool(spec.chance_prob) { Owner::Chance } else { Owner::Player(rng.gen_range(0..n)) };
        }
        // Infosets: same player, same own sequence, same arity may merge.
        let mut groups: HashMap<(usize, Vec<(usize, usize)>, usize), Vec<usize>> = HashMap::new();
        for &h in &layer {
            if let Owner::Player(i) = pending[h].owner {
                let key = (i, pending[h].own[i].clone(), pending[h].arity);
                let existing = groups.entry(key).or_default();
                let id = if !existing.is_empty() && rng.gen_bool(spec.infoset_merge_prob) {
                    existing[rng.gen_range(0..existing.len())]
                } else {
                    num_infosets += 1;
                    existing.push(num_infosets - 1);
                    num_infosets - 1
                };
                infoset_of[h] = Some(id);
            }
        }
        // Children.
        let mut next = Vec::new();
        for &h in &layer {
            let owner = pending[h].owner;
            if owner == Owner::Terminal {
                raw[h].payoffs = (0..n).map(|_| Rational::from_integer(rng.gen_range(-2..=3))).collect();
                continue;
            }
            let arity = pending[h].arity;
            let weights: Vec<i64> = (0..arity).map(|_| rng.gen_range(1..=3)).collect();
            let total: i64 = weights.iter().sum();
            let mut actions = Vec::with_capacity(arity);
            for (a, &w) in weights.iter().enumerate() {
                let child = raw.len();
                let mut own = pending[h].own.clone();
                if let Owner::Player(i) = owner {
                    own[i].push((infoset_of[h].unwrap(), a));
                }
                raw.push(RawNode { owner: Owner::Terminal, infoset: None, actions: Vec::new(), payoffs: Vec::new() });
                infoset_of.push(None);
                pending.push(Pending { owner: Owner::Terminal, own, arity: 0 });
                let (label, prob) = match owner {
                    Owner::Chance => (format!("c{a}"), Some(Rational::new(w, total))),
                    _ => (format!("a{a}"), None),
                };
                actions.push(Action { label, child, prob });
                next.push(child);
            }
            raw[h].owner = owner;
            raw[h].infoset = infoset_of[h];
            raw[h].actions = actions;
        }
        layer = next;
    }
    Ok(Game::from_raw(n, raw, 0).expect("generated tree is well formed"))
}
