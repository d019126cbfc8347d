use num_traits::Zero;

use super::{DeviationPolytope, JointSequences, TriggerKind};
use crate::game::{to_f64, Game, NodeId, Rational, SequenceIndex};

/// Sparse A_τ (rows: joint sequences, columns: local deviation sequences)
/// and b_τ, so that the benefit of deviating with μ′ is ξᵀA_τμ′ − b_τᵀξ.
#[derive(Clone, Debug, PartialEq)]
pub struct IncentivePair {
    pub a: Vec<(usize, usize, f64)>,
    pub b: Vec<(usize, f64)>,
}

impl IncentivePair {
    /// A_τᵀξ, one weight per local deviation sequence.
    pub fn weights(&self, num_vars: usize, xi: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; num_vars];
        for &(r, c, v) in &self.a {
            w[c] += v * xi[r];
        }
        w
    }

    pub fn b_dot(&self, xi: &[f64]) -> f64 {
        self.b.iter().map(|&(r, v)| v * xi[r]).sum()
    }
}

/// ξᵀA_τμ′ − b_τᵀξ.
pub fn deviation_benefit(pair: &IncentivePair, xi: &[f64], mu: &[f64]) -> f64 {
    pair.a.iter().map(|&(r, c, v)| v * xi[r] * mu[c]).sum::<f64>() - pair.b_dot(xi)
}

fn merge<K: Ord + Copy>(mut v: Vec<(K, Rational)>) -> Vec<(K, f64)> {
    v.sort_by_key(|x| x.0);
    let mut out: Vec<(K, Rational)> = Vec::with_capacity(v.len());
    for (k, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += x,
            _ => out.push((k, x)),
        }
    }
    out.into_iter().filter(|x| !x.1.is_zero()).map(|(k, x)| (k, to_f64(&x))).collect()
}

pub fn incentive_matrices(
    game: &Game,
    seqs: &SequenceIndex,
    sigma: &JointSequences,
    poly: &DeviationPolytope,
    chance_reach: &[Rational],
) -> IncentivePair {
    let t = &poly.trigger;
    let i = t.player;
    let frozen = t.sequence(seqs) as u32;
    // (subtree roots contributing deviation terms, subtree roots contributing b terms)
    let (dev_roots, follow_roots): (Vec<NodeId>, Vec<NodeId>) = match t.kind {
        TriggerKind::Empty => (vec![game.root()], vec![game.root()]),
        TriggerKind::Infoset(info) => (game.infoset(info).nodes.clone(), game.infoset(info).nodes.clone()),
        TriggerKind::Sequence(info, a) => {
            let mut dev = Vec::new();
            let mut follow = Vec::new();
            for &h in &game.infoset(info).nodes {
                for (b, act) in game.node(h).actions.iter().enumerate() {
                    if b == a {
                        follow.push(act.child);
                    } else {
                        dev.push(act.child);
                    }
                }
            }
            (dev, follow)
        }
    };
    let weight = |z: NodeId| game.node(z).payoffs[i] * chance_reach[z];

    let mut a = Vec::new();
    let mut joint = vec![0u32; game.num_players()];
    for &root in &dev_roots {
        for z in root..game.subtree_end(root) {
            if !game.node(z).is_terminal() {
                continue;
            }
            joint.copy_from_slice(seqs.joint(z));
            joint[i] = frozen;
            let row = sigma.lookup(&joint).expect("z^τ joint sequence is relevant");
            let col = poly.local(seqs.seq(z, i)).expect("σ_i(z) lies in the deviation subtree");
            a.push(((row, col), weight(z)));
        }
    }
    let mut b = Vec::new();
    for &root in &follow_roots {
        for z in root..game.subtree_end(root) {
            if game.node(z).is_terminal() {
                let row = sigma.lookup(seqs.joint(z)).expect("terminal joint sequence is relevant");
                b.push((row, weight(z)));
            }
        }
    }
    IncentivePair {
        a: merge(a).into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        b: merge(b),
    }
}
