use std::collections::{BTreeSet, HashMap};

use super::{CorrelationDag, DagNodeKind};
use crate::game::{Game, SequenceIndex};
use crate::triggers::{Concept, JointSequences};

/// DAG strategy that prescribes `profile[I]` at every active infoset;
/// returns the 0/1 reach indicator of every DAG node.
pub fn pure_dag_strategy(game: &Game, dag: &CorrelationDag, profile: &[usize]) -> Vec<f64> {
    let mut reach = vec![0.0; dag.nodes.len()];
    let mut stack = vec![dag.source()];
    while let Some(s) = stack.pop() {
        if reach[s] == 1.0 {
            continue;
        }
        reach[s] = 1.0;
        let node = &dag.nodes[s];
        match node.kind {
            DagNodeKind::Observation => stack.extend(&node.children),
            DagNodeKind::Decision => {
                let mut k = 0;
                for &i in &node.active {
                    k = k * game.infoset(i).num_actions() + profile[i];
                }
                stack.push(node.children[k]);
            }
            DagNodeKind::Terminal => {}
        }
    }
    reach
}

/// ξ^π⃗ over Σ: 1 exactly where every player's sequence is played by π⃗,
/// restricted to the concept's terminal joint sequences.
pub fn pure_plan(seqs: &SequenceIndex, sigma: &JointSequences, concept: Concept, profile: &[usize]) -> Vec<f64> {
    let plays = |i: usize, s: u32| {
        let mut s = s as usize;
        loop {
            match seqs.sequence(i, s) {
                crate::game::Sequence::Empty => return true,
                crate::game::Sequence::Action { infoset, action } => {
                    if profile[infoset] != action {
                        return false;
                    }
                    s = seqs.parent_seq(infoset);
                }
            }
        }
    };
    (0..sigma.len())
        .map(|k| {
            let on = sigma.is_terminal(concept, k) && sigma.get(k).iter().enumerate().all(|(i, &s)| plays(i, s));
            if on {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Every set of terminal joint sequences reached by some pure DAG strategy,
/// or `None` once more than `cap` sets appear at a node.
pub fn terminal_plans(dag: &CorrelationDag, cap: usize) -> Option<BTreeSet<Vec<usize>>> {
    fn go(
        dag: &CorrelationDag,
        s: usize,
        cap: usize,
        memo: &mut HashMap<usize, BTreeSet<Vec<usize>>>,
    ) -> Option<BTreeSet<Vec<usize>>> {
        if let Some(v) = memo.get(&s) {
            return Some(v.clone());
        }
        let node = &dag.nodes[s];
        let out = match node.kind {
            DagNodeKind::Terminal => BTreeSet::from([vec![node.sigma.unwrap()]]),
            DagNodeKind::Decision => {
                let mut all = BTreeSet::new();
                for &c in &node.children {
                    all.extend(go(dag, c, cap, memo)?);
                    if all.len() > cap {
                        return None;
                    }
                }
                all
            }
            DagNodeKind::Observation => {
                let mut acc = BTreeSet::from([Vec::new()]);
                for &c in &node.children {
                    let sub = go(dag, c, cap, memo)?;
                    let mut next = BTreeSet::new();
                    for a in &acc {
                        for b in &sub {
                            let mut v = a.clone();
                            v.extend(b);
                            v.sort_unstable();
                            next.insert(v);
                        }
                    }
                    if next.len() > cap {
                        return None;
                    }
                    acc = next;
                }
                acc
            }
        };
        memo.insert(s, out.clone());
        Some(out)
    }
    go(dag, dag.source(), cap, &mut HashMap::new())
}
