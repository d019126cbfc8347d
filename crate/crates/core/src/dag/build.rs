use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::{pack, unpack, CorrelationDag, DagNode, DagNodeKind, Th};
use crate::game::{Game, GameError, Owner, PublicPartition, SequenceIndex};
use crate::triggers::{enumerate_triggers, Concept, JointSequences, Trigger, TriggerKind};

pub const DEFAULT_EDGE_BUDGET: usize = 50_000_000;

/// Largest DAG on which the exhaustive DAG-form check runs during build.
const CHECK_LIMIT: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DagError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("correlation DAG exceeds the edge budget of {0}")]
    Budget(usize),
    #[error("malformed correlation DAG: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug)]
pub struct DagOptions {
    pub edge_budget: usize,
    /// Off: no trigger histories at all (a plain belief DAG).
    pub triggers: bool,
    pub keep_observations: bool,
}

impl Default for DagOptions {
    fn default() -> Self {
        DagOptions { edge_budget: DEFAULT_EDGE_BUDGET, triggers: true, keep_observations: false }
    }
}

struct Builder<'a> {
    game: &'a Game,
    partition: &'a PublicPartition,
    concept: Concept,
    triggers: &'a [Trigger],
    /// Trigger id (1-based) of EFCCE `I` and EFCE `Ia`, by infoset.
    trigger_base: Vec<u32>,
    /// Joint-sequence index and representative flag of every terminal trigger history.
    terminal_sigma: HashMap<Th, (usize, bool)>,
    opts: &'a DagOptions,
    nodes: Vec<DagNode>,
    memo: HashMap<Vec<Th>, usize>,
    terminal_of: Vec<Option<usize>>,
    queue: VecDeque<usize>,
    edges: usize,
}

impl Builder<'_> {
    fn new_node(&mut self, kind: DagNodeKind, content: Vec<Th>) -> usize {
        self.nodes.push(DagNode {
            kind,
            content,
            children: Vec::new(),
            parents: Vec::new(),
            active: Vec::new(),
            sigma: None,
        });
        self.nodes.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize) -> Result<(), DagError> {
        self.edges += 1;
        if self.edges > self.opts.edge_budget {
            return Err(DagError::Budget(self.opts.edge_budget));
        }
        self.nodes[from].children.push(to);
        self.nodes[to].parents.push(from);
        Ok(())
    }

    fn triggered_player(&self, t: u32) -> Option<usize> {
        (t > 0).then(|| self.triggers[t as usize - 1].player)
    }

    fn is_active(&self, th: Th) -> bool {
        let (h, t) = unpack(th);
        match self.game.node(h).owner {
            Owner::Player(p) => self.triggered_player(t) != Some(p),
            _ => false,
        }
    }

    /// Ô: the observation set plus the fresh trigger histories it activates.
    fn expand(&self, obs: &[Th], is_source: bool) -> Vec<Th> {
        let mut out = obs.to_vec();
        if !self.opts.triggers {
            return out;
        }
        let g = self.game;
        match self.concept {
            Concept::Nfcce => {
                if is_source {
                    out.extend((0..self.triggers.len()).map(|k| pack(g.root(), k as u32 + 1)));
                }
            }
            Concept::Efcce => {
                for &th in obs {
                    let (h, t) = unpack(th);
                    if let (0, Some(info)) = (t, g.node(h).infoset) {
                        out.push(pack(h, self.trigger_base[info]));
                    }
                }
            }
            Concept::Efce => {
                for &th in obs {
                    let (h, t) = unpack(th);
                    let node = g.node(h);
                    let Some(p) = node.parent else { continue };
                    let parent = g.node(p);
                    if let (0, Some(info)) = (t, parent.infoset) {
                        for (b, act) in parent.actions.iter().enumerate() {
                            if b != node.parent_action {
                                out.push(pack(act.child, self.trigger_base[info] + node.parent_action as u32));
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn observation(&mut self, obs: Vec<Th>, is_source: bool) -> Result<usize, DagError> {
        let full = self.expand(&obs, is_source);
        let content = if self.opts.keep_observations { obs } else { Vec::new() };
        let s = self.new_node(DagNodeKind::Observation, content);
        let mut by_state: Vec<(usize, Th)> = Vec::new();
        for &th in &full {
            let (h, _) = unpack(th);
            if self.game.node(h).is_terminal() {
                let (k, representative) = self.terminal_sigma[&th];
                if !representative {
                    continue;
                }
                let t = match self.terminal_of[k] {
                    Some(t) => t,
                    None => {
                        let t = self.new_node(DagNodeKind::Terminal, vec![th]);
                        self.nodes[t].sigma = Some(k);
                        self.terminal_of[k] = Some(t);
                        t
                    }
                };
                self.edge(s, t)?;
            } else {
                let p = self.partition.state_of(h).expect("non-terminal nodes have a public state");
                by_state.push((p, th));
            }
        }
        by_state.sort_unstable();
        let mut i = 0;
        while i < by_state.len() {
            let p = by_state[i].0;
            let mut j = i;
            let mut belief = Vec::new();
            while j < by_state.len() && by_state[j].0 == p {
                belief.push(by_state[j].1);
                j += 1;
            }
            belief.sort_unstable();
            let d = self.decision(belief);
            self.edge(s, d)?;
            i = j;
        }
        Ok(s)
    }

    fn decision(&mut self, belief: Vec<Th>) -> usize {
        if let Some(&d) = self.memo.get(&belief) {
            return d;
        }
        let mut active: Vec<usize> = belief
            .iter()
            .filter(|&&th| self.is_active(th))
            .map(|&th| self.game.node(unpack(th).0).infoset.unwrap())
            .collect();
        active.sort_unstable();
        active.dedup();
        let d = self.new_node(DagNodeKind::Decision, belief.clone());
        self.nodes[d].active = active;
        self.memo.insert(belief, d);
        self.queue.push_back(d);
        d
    }

    fn expand_decision(&mut self, d: usize) -> Result<(), DagError> {
        let belief = self.nodes[d].content.clone();
        let active = self.nodes[d].active.clone();
        let radix: Vec<usize> = active.iter().map(|&i| self.game.infoset(i).num_actions()).collect();
        // Slot of each active infoset, for prescription lookup.
        let slot: HashMap<usize, usize> = active.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut digits = vec![0usize; active.len()];
        loop {
            let mut next = Vec::new();
            for &th in &belief {
                let (h, t) = unpack(th);
                let node = self.game.node(h);
                if self.is_active(th) {
                    let a = digits[slot[&node.infoset.unwrap()]];
                    next.push(pack(node.actions[a].child, t));
                } else {
                    next.extend(node.actions.iter().map(|act| pack(act.child, t)));
                }
            }
            next.sort_unstable();
            let o = self.observation(next, false)?;
            self.edge(d, o)?;
            // Odometer, last digit fastest.
            let mut k = digits.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < radix[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
    }
}

/// First trigger id (1-based) of each infoset's EFCCE/EFCE triggers.
fn trigger_bases(game: &Game, triggers: &[Trigger]) -> Vec<u32> {
    let mut base = vec![0u32; game.infosets().len()];
    for (k, t) in triggers.iter().enumerate().rev() {
        match t.kind {
            TriggerKind::Infoset(i) | TriggerKind::Sequence(i, _) => base[i] = k as u32 + 1,
            TriggerKind::Empty => {}
        }
    }
    base
}

/// Joint sequence index of every terminal trigger history of the concept,
/// flagged when it is the representative (smallest node, then trigger) of
/// its joint sequence.
fn terminal_representatives(
    game: &Game,
    seqs: &SequenceIndex,
    sigma: &JointSequences,
    concept: Concept,
    triggers: &[Trigger],
    with_triggers: bool,
) -> HashMap<Th, (usize, bool)> {
    let index = crate::triggers::TriggerIndex::new(game, concept);
    let mut out = HashMap::new();
    let mut seen = vec![false; sigma.len()];
    for z in game.terminals() {
        let mut here: Vec<(Th, usize)> = Vec::new();
        crate::triggers::for_each_history(game, seqs, concept, z, |t, _, _, joint| {
            if t.is_some() && !with_triggers {
                return;
            }
            let tid = t.map_or(0, |t| index.of(&t) as u32 + 1);
            here.push((pack(z, tid), sigma.lookup(joint).expect("terminal joint sequence is relevant")));
        });
        here.sort_unstable();
        for (th, k) in here {
            let rep = !seen[k];
            seen[k] = true;
            out.insert(th, (k, rep));
        }
    }
    debug_assert!(triggers.is_empty() || with_triggers);
    out
}

pub fn build_correlation_dag(
    game: &Game,
    seqs: &SequenceIndex,
    partition: &PublicPartition,
    sigma: &JointSequences,
    concept: Concept,
    opts: &DagOptions,
) -> Result<CorrelationDag, DagError> {
    let triggers = if opts.triggers { enumerate_triggers(game, concept) } else { Vec::new() };
    let mut b = Builder {
        game,
        partition,
        concept,
        trigger_base: trigger_bases(game, &triggers),
        terminal_sigma: terminal_representatives(game, seqs, sigma, concept, &triggers, opts.triggers),
        triggers: &triggers,
        opts,
        nodes: Vec::new(),
        memo: HashMap::new(),
        terminal_of: vec![None; sigma.len()],
        queue: VecDeque::new(),
        edges: 0,
    };
    b.observation(vec![pack(game.root(), 0)], true)?;
    while let Some(d) = b.queue.pop_front() {
        b.expand_decision(d)?;
    }
    let (nodes, terminal_of, num_edges) = (b.nodes, b.terminal_of, b.edges);
    let dag = CorrelationDag { concept, nodes, triggers, terminal_of, num_edges };
    if dag.nodes.len() <= CHECK_LIMIT {
        dag.check_dfsdp().map_err(DagError::Malformed)?;
    }
    Ok(dag)
}
