use std::collections::HashMap;

use super::{Trigger, TriggerKind};
use crate::game::{Game, InfosetId, Sequence, SequenceIndex};

/// An infoset of the deviation subtree with its local sequence ids.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalInfoset {
    pub infoset: InfosetId,
    /// Local id of the parent sequence (0 for entry infosets).
    pub parent: usize,
    /// (action index, local sequence id) for every allowed action.
    pub actions: Vec<(usize, usize)>,
}

/// Q[τ] = {μ : Fμ = f, μ ≥ 0}. Local sequence 0 is the trigger root and
/// carries mass 1; the others are infoset-action pairs of the deviation
/// subtree. A sequence trigger Ia forbids a at I itself: a deviation that
/// keeps following a is covered by the triggers further down.
#[derive(Clone, Debug)]
pub struct DeviationPolytope {
    pub trigger: Trigger,
    pub num_vars: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    pub infosets: Vec<LocalInfoset>,
    local_of: HashMap<usize, usize>,
}

impl DeviationPolytope {
    /// Local id of a global sequence of the trigger's player.
    pub fn local(&self, global: usize) -> Option<usize> {
        self.local_of.get(&global).copied()
    }

    /// True when the entry infoset has no allowed action (a sequence trigger
    /// at a single-action infoset): there is nothing to deviate to.
    pub fn is_void(&self) -> bool {
        self.infosets.iter().any(|i| i.actions.is_empty())
    }

    /// Global sequence of every local id; local 0 maps to ∅ only for ∅ triggers.
    pub fn globals(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.num_vars];
        for (&g, &l) in &self.local_of {
            out[l] = Some(g);
        }
        out
    }

    /// Exact maximum of `w·μ` over Q[τ], with a maximizing pure deviation
    /// returned as a 0/1 vector over local ids.
    pub fn best_response(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let mut value = w.to_vec();
        let mut choice = vec![usize::MAX; self.infosets.len()];
        // Children infosets have larger ids, so a reverse sweep sees them first.
        for (k, info) in self.infosets.iter().enumerate().rev() {
            let (best_local, best) = info
                .actions
                .iter()
                .map(|&(_, l)| (l, value[l]))
                .fold((usize::MAX, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            choice[k] = best_local;
            value[info.parent] += best;
        }
        let mut mu = vec![0.0; self.num_vars];
        mu[0] = 1.0;
        for (k, info) in self.infosets.iter().enumerate() {
            if mu[info.parent] > 0.5 {
                mu[choice[k]] = 1.0;
            }
        }
        (value[0], mu)
    }

    /// Number of pure deviations (vertices of Q[τ]).
    pub fn count_pure(&self) -> u128 {
        let mut count = vec![1u128; self.num_vars];
        for info in self.infosets.iter().rev() {
            let s: u128 = info.actions.iter().map(|&(_, l)| count[l]).sum();
            count[info.parent] *= s;
        }
        count[0]
    }

    /// All pure deviations as 0/1 vectors (small subtrees only).
    pub fn pure_deviations(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut mu = vec![0.0; self.num_vars];
        mu[0] = 1.0;
        self.extend(0, &mut mu, &mut out);
        out
    }

    fn extend(&self, k: usize, mu: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if k == self.infosets.len() {
            out.push(mu.clone());
            return;
        }
        let info = &self.infosets[k];
        if mu[info.parent] == 0.0 {
            self.extend(k + 1, mu, out);
            return;
        }
        for &(_, l) in &info.actions {
            mu[l] = 1.0;
            self.extend(k + 1, mu, out);
            mu[l] = 0.0;
        }
    }
}

pub fn deviation_polytope(game: &Game, seqs: &SequenceIndex, trigger: &Trigger) -> DeviationPolytope {
    let player = trigger.player;
    let allowed = |info: InfosetId, a: usize| match trigger.kind {
        TriggerKind::Sequence(i, forbidden) => !(i == info && a == forbidden),
        _ => true,
    };
    let mut member = vec![false; game.infosets().len()];
    let mut local_of = HashMap::new();
    if trigger.kind == TriggerKind::Empty {
        local_of.insert(0, 0);
    }
    let mut infosets = Vec::new();
    let mut num_vars = 1;
    for info in game.infosets_of(player) {
        let parent = seqs.parent_seq(info);
        let entry = match trigger.kind {
            TriggerKind::Empty => parent == 0,
            TriggerKind::Infoset(i) | TriggerKind::Sequence(i, _) => i == info,
        };
        let inside = entry
            || match seqs.sequence(player, parent) {
                Sequence::Empty => false,
                Sequence::Action { infoset, action } => member[infoset] && allowed(infoset, action),
            };
        if !inside {
            continue;
        }
        member[info] = true;
        let parent_local = if entry { 0 } else { local_of[&parent] };
        let mut actions = Vec::new();
        for a in (0..game.infoset(info).num_actions()).filter(|&a| allowed(info, a)) {
            local_of.insert(seqs.seq_of(info, a), num_vars);
            actions.push((a, num_vars));
            num_vars += 1;
        }
        infosets.push(LocalInfoset { infoset: info, parent: parent_local, actions });
    }
    let mut rows = vec![vec![(0, 1.0)]];
    let mut rhs = vec![1.0];
    for info in &infosets {
        let mut row: Vec<(usize, f64)> = info.actions.iter().map(|&(_, l)| (l, 1.0)).collect();
        row.push((info.parent, -1.0));
        rows.push(row);
        rhs.push(0.0);
    }
    DeviationPolytope { trigger: *trigger, num_vars, rows, rhs, infosets, local_of }
}

#[cfg(test)]
mod tests {
    use super::super::{enumerate_triggers, Concept};
    use super::*;
    use crate::game::{compute_sequences, fixtures::letters};

    #[test]
    fn empty_trigger_is_full_strategy_space() {
        let (g, _) = letters();
        let s = compute_sequences(&g).unwrap();
        let t = Trigger { player: 0, kind: TriggerKind::Empty };
        let q = deviation_polytope(&g, &s, &t);
        assert_eq!(q.num_vars, s.num_sequences(0));
        assert_eq!(q.rows.len(), 1 + g.infosets_of(0).count());
        // b: 2 actions, c: 2, h below b:x: 2 → (2 + 1) * 2 = 6 reduced strategies.
        assert_eq!(q.count_pure(), 6);
        assert_eq!(q.pure_deviations().len(), 6);
    }

    #[test]
    fn leaf_infoset_trigger_has_no_decisions_below() {
        let (g, at) = letters();
        let s = compute_sequences(&g).unwrap();
        let ih = g.node(at["h"]).infoset.unwrap();
        let q = deviation_polytope(&g, &s, &Trigger { player: 0, kind: TriggerKind::Sequence(ih, 0) });
        // Only the other action at h remains.
        assert_eq!(q.num_vars, 2);
        assert_eq!(q.count_pure(), 1);
    }

    #[test]
    fn best_response_matches_enumeration() {
        let (g, _) = letters();
        let s = compute_sequences(&g).unwrap();
        for c in Concept::ALL {
            for t in enumerate_triggers(&g, c) {
                let q = deviation_polytope(&g, &s, &t);
                let w: Vec<f64> = (0..q.num_vars).map(|k| ((k * 7 + 3) % 5) as f64 - 2.0).collect();
                let (v, mu) = q.best_response(&w);
                let dot = |m: &Vec<f64>| m.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                let best = q.pure_deviations().iter().map(dot).fold(f64::NEG_INFINITY, f64::max);
                assert!((v - best).abs() < 1e-12);
                assert!((dot(&mu) - v).abs() < 1e-12);
                for (row, rhs) in q.rows.iter().zip(&q.rhs) {
                    let lhs: f64 = row.iter().map(|&(j, a)| a * mu[j]).sum();
                    assert_eq!(lhs, *rhs);
                }
            }
        }
    }
}
