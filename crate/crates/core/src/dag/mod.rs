//! Correlation DAG: a DAG-form decision problem for a mediator whose
//! decision nodes are beliefs (sets of trigger histories within one public
//! state). Its sequence-form polytope projects onto the correlation plans of
//! a concept.

mod build;
mod flow;
mod pure;

pub use build::{build_correlation_dag, DagError, DagOptions, DEFAULT_EDGE_BUDGET};
pub use flow::{dag_constraint_system, polish_flow, project_plan, DagFlowSystem, FlowError};
pub use pure::{pure_dag_strategy, pure_plan, terminal_plans};

use serde::Serialize;

use crate::game::{Game, InfosetId, NodeId, SequenceIndex};
use crate::triggers::{Concept, JointSequences, Trigger};

/// A trigger history packed as `node << 32 | trigger`, where trigger 0 is ⊥
/// and `k + 1` is the k-th trigger of the concept. Packed ids sort by node,
/// then trigger.
pub type Th = u64;

pub fn pack(node: NodeId, trigger: u32) -> Th {
    ((node as u64) << 32) | trigger as u64
}

pub fn unpack(th: Th) -> (NodeId, u32) {
    ((th >> 32) as NodeId, th as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DagNodeKind {
    Observation,
    Decision,
    Terminal,
}

#[derive(Clone, Debug)]
pub struct DagNode {
    pub kind: DagNodeKind,
    /// Belief for decision nodes, `{z^τ}` for terminals, and the observation
    /// set for observation nodes when [`DagOptions::keep_observations`] is on.
    pub content: Vec<Th>,
    pub children: Vec<usize>,
    pub parents: Vec<usize>,
    /// Decision nodes: active infosets in ascending id. Child `k` is the
    /// prescription whose mixed-radix digits (last infoset fastest) are `k`.
    pub active: Vec<InfosetId>,
    /// Terminal nodes: index of the joint sequence in [`JointSequences`].
    pub sigma: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CorrelationDag {
    pub concept: Concept,
    pub nodes: Vec<DagNode>,
    /// `enumerate_triggers(game, concept)`, or empty when triggers are off.
    pub triggers: Vec<Trigger>,
    /// Joint sequence index → terminal DAG node.
    pub terminal_of: Vec<Option<usize>>,
    pub num_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DagStats {
    pub nodes: usize,
    pub edges: usize,
    pub decision: usize,
    pub observation: usize,
    pub terminal: usize,
    pub max_belief: usize,
}

impl CorrelationDag {
    pub fn source(&self) -> usize {
        0
    }

    pub fn stats(&self) -> DagStats {
        let count = |k| self.nodes.iter().filter(|n| n.kind == k).count();
        DagStats {
            nodes: self.nodes.len(),
            edges: self.num_edges,
            decision: count(DagNodeKind::Decision),
            observation: count(DagNodeKind::Observation),
            terminal: count(DagNodeKind::Terminal),
            max_belief: self
                .nodes
                .iter()
                .filter(|n| n.kind == DagNodeKind::Decision)
                .map(|n| n.content.len())
                .max()
                .unwrap_or(0),
        }
    }

    /// Prescription (infoset, action) pairs labelling child `k` of decision node `s`.
    pub fn prescription(&self, game: &Game, s: usize, mut k: usize) -> Vec<(InfosetId, usize)> {
        let node = &self.nodes[s];
        let mut out = vec![(0, 0); node.active.len()];
        for (slot, &i) in node.active.iter().enumerate().rev() {
            let m = game.infoset(i).num_actions();
            out[slot] = (i, k % m);
            k /= m;
        }
        out
    }

    pub fn trigger_label(&self, game: &Game, t: u32) -> String {
        if t == 0 {
            "⊥".into()
        } else {
            self.triggers[t as usize - 1].label(game)
        }
    }

    pub fn history_label(&self, game: &Game, th: Th) -> String {
        let (h, t) = unpack(th);
        if t == 0 {
            format!("{h}")
        } else {
            format!("{h}^{}", self.trigger_label(game, t))
        }
    }

    /// Structural DAG-form check: no observation node has two children with a
    /// common descendant, so any two root paths to a node last split at a
    /// decision node.
    pub fn check_dfsdp(&self) -> Result<(), String> {
        let n = self.nodes.len();
        let mut stamp = vec![usize::MAX; n];
        let mut owner = vec![usize::MAX; n];
        let mut stack = Vec::new();
        for (o, node) in self.nodes.iter().enumerate() {
            if node.kind != DagNodeKind::Observation || node.children.len() < 2 {
                continue;
            }
            for &c in &node.children {
                stack.push(c);
                while let Some(x) = stack.pop() {
                    if stamp[x] == o {
                        if owner[x] != c {
                            return Err(format!("observation node {o} reaches node {x} through two children"));
                        }
                        continue;
                    }
                    stamp[x] = o;
                    owner[x] = c;
                    stack.extend(&self.nodes[x].children);
                }
            }
        }
        Ok(())
    }

    /// One JSON object per node: id, kind, members, children.
    pub fn dump_json_lines(&self, game: &Game, seqs: &SequenceIndex, sigma: &JointSequences) -> String {
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let members: Vec<String> = node.content.iter().map(|&th| self.history_label(game, th)).collect();
            let mut obj = serde_json::json!({
                "id": id,
                "kind": node.kind,
                "members": members,
                "children": node.children,
            });
            if let Some(k) = node.sigma {
                obj["joint"] = sigma.label(game, seqs, k).into();
            }
            out.push_str(&obj.to_string());
            out.push('\n');
        }
        out
    }
}
