use std::collections::{BTreeSet, HashMap};

use super::{Concept, Trigger, TriggerIndex, TriggerKind};
use crate::game::{Game, NodeId, SequenceIndex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriggerHistory {
    pub node: NodeId,
    /// Index into `enumerate_triggers(game, concept)`; `None` is ⊥.
    pub trigger: Option<usize>,
    pub trigger_point: Option<NodeId>,
    pub fresh: bool,
    pub joint: Vec<u32>,
}

/// Visit every trigger history h^τ of `concept` at node `h`, ⊥ first.
/// The callback gets (trigger, trigger point, fresh, joint sequence).
pub(crate) fn for_each_at<F>(game: &Game, seqs: &SequenceIndex, concept: Concept, h: NodeId, mut f: F)
where
    F: FnMut(Option<Trigger>, Option<NodeId>, bool, &[u32]),
{
    let base = seqs.joint(h);
    f(None, None, false, base);
    let mut joint = base.to_vec();
    let depth = game.node(h).depth;
    let mut emit = |t: Trigger, point: NodeId, point_depth: usize, f: &mut F| {
        let i = t.player;
        joint[i] = t.sequence(seqs) as u32;
        f(Some(t), Some(point), depth == point_depth, &joint);
        joint[i] = base[i];
    };
    match concept {
        Concept::Nfcce => {
            for player in 0..game.num_players() {
                emit(Trigger { player, kind: TriggerKind::Empty }, game.root(), 0, &mut f);
            }
        }
        Concept::Efcce => {
            // Ancestors-or-self where a player acts, from the root down.
            let mut path = Vec::new();
            let mut v = Some(h);
            while let Some(x) = v {
                path.push(x);
                v = game.node(x).parent;
            }
            for &x in path.iter().rev() {
                let node = game.node(x);
                if let (Some(player), Some(info)) = (node.player(), node.infoset) {
                    emit(Trigger { player, kind: TriggerKind::Infoset(info) }, x, node.depth, &mut f);
                }
            }
        }
        Concept::Efce => {
            let mut path = Vec::new();
            let mut v = h;
            while let Some(p) = game.node(v).parent {
                path.push((p, game.node(v).parent_action));
                v = p;
            }
            for &(x, taken) in path.iter().rev() {
                let node = game.node(x);
                if let (Some(player), Some(info)) = (node.player(), node.infoset) {
                    for a in (0..node.actions.len()).filter(|&a| a != taken) {
                        let point = node.actions[a].child;
                        emit(Trigger { player, kind: TriggerKind::Sequence(info, a) }, point, node.depth + 1, &mut f);
                    }
                }
            }
        }
    }
}

pub fn enumerate_trigger_histories(game: &Game, seqs: &SequenceIndex, concept: Concept) -> Vec<TriggerHistory> {
    let index = TriggerIndex::new(game, concept);
    let mut out = Vec::new();
    for h in 0..game.num_nodes() {
        let start = out.len();
        for_each_at(game, seqs, concept, h, |t, point, fresh, joint| {
            out.push(TriggerHistory {
                node: h,
                trigger: t.map(|t| index.of(&t)),
                trigger_point: point,
                fresh,
                joint: joint.to_vec(),
            });
        });
        out[start..].sort_by_key(|x| x.trigger.map_or(0, |k| k + 1));
    }
    out
}

/// The relevant joint sequences Σ (over all three concepts), sorted
/// lexicographically so that (∅, …, ∅) comes first, with per-concept
/// membership in the terminal set Σ^c.
#[derive(Clone, Debug)]
pub struct JointSequences {
    num_players: usize,
    flat: Vec<u32>,
    index: HashMap<Vec<u32>, usize>,
    terminal: [Vec<bool>; 3],
}

impl JointSequences {
    pub fn build(game: &Game, seqs: &SequenceIndex) -> Self {
        let n = game.num_players();
        let mut all: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut term: [BTreeSet<Vec<u32>>; 3] = Default::default();
        for h in 0..game.num_nodes() {
            let is_terminal = game.node(h).is_terminal();
            for c in Concept::ALL {
                for_each_at(game, seqs, c, h, |_, _, _, joint| {
                    if !all.contains(joint) {
                        all.insert(joint.to_vec());
                    }
                    if is_terminal && !term[c.index()].contains(joint) {
                        term[c.index()].insert(joint.to_vec());
                    }
                });
            }
        }
        let mut flat = Vec::with_capacity(all.len() * n);
        let mut index = HashMap::with_capacity(all.len());
        for (k, j) in all.into_iter().enumerate() {
            flat.extend_from_slice(&j);
            index.insert(j, k);
        }
        let len = index.len();
        let terminal = term.map(|set| {
            let mut v = vec![false; len];
            for j in set {
                v[index[&j]] = true;
            }
            v
        });
        JointSequences { num_players: n, flat, index, terminal }
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, k: usize) -> &[u32] {
        &self.flat[k * self.num_players..(k + 1) * self.num_players]
    }

    pub fn lookup(&self, joint: &[u32]) -> Option<usize> {
        self.index.get(joint).copied()
    }

    /// Whether entry `k` belongs to Σ^c.
    pub fn is_terminal(&self, concept: Concept, k: usize) -> bool {
        self.terminal[concept.index()][k]
    }

    pub fn terminal_indices(&self, concept: Concept) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.terminal[concept.index()][k]).collect()
    }

    pub fn label(&self, game: &Game, seqs: &SequenceIndex, k: usize) -> String {
        let parts: Vec<String> =
            self.get(k).iter().enumerate().map(|(i, &s)| seqs.label(game, i, s as usize)).collect();
        format!("({})", parts.join(", "))
    }
}
