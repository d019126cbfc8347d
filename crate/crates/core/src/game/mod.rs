//! Extensive-form games: tree storage, sequences, public states, parameters,
//! timing normalization and JSON I/O.

mod builder;
mod io;
mod params;
mod public;
mod sequences;
mod timed;
mod validate;

pub use builder::GameBuilder;
pub use io::{load_game, save_game, ParseError};
pub use params::{game_parameters, GameParams};
pub use public::{compute_public_states, PublicPartition};
pub use sequences::{compute_sequences, PrivateState, Sequence, SequenceIndex};
pub use timed::{make_timed, TimedGame};
pub use validate::{validate_game, Diagnostic, DiagnosticKind, Severity};

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational used for payoffs and chance probabilities.
pub type Rational = Ratio<i64>;

pub type NodeId = usize;
pub type InfosetId = usize;
pub type Player = usize;

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("node {0} referenced but not defined")]
    DanglingChild(usize),
    #[error("node {0} has more than one parent")]
    MultipleParents(usize),
    #[error("node {0} is not reachable from the root")]
    Unreachable(usize),
    #[error("root {0} is not a node")]
    BadRoot(usize),
    #[error("node {node}: {msg}")]
    Malformed { node: usize, msg: String },
    #[error("perfect recall violated at infoset {infoset} for player {player}")]
    PerfectRecallViolation { infoset: InfosetId, player: Player },
    #[error("infoset {0} spans several layers; call make_timed first")]
    NotTimed(InfosetId),
    #[error("infoset precedence is cyclic; game cannot be timed")]
    UntimableGame,
    #[error("game fails validation: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Owner {
    Chance,
    Player(Player),
    Terminal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub label: String,
    pub child: NodeId,
    /// Only set on chance edges.
    pub prob: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub owner: Owner,
    pub parent: Option<NodeId>,
    /// Index of this node in its parent's action list.
    pub parent_action: usize,
    pub depth: usize,
    pub infoset: Option<InfosetId>,
    pub actions: Vec<Action>,
    /// One entry per player on terminals, empty elsewhere.
    pub payoffs: Vec<Rational>,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        self.owner == Owner::Terminal
    }

    pub fn is_chance(&self) -> bool {
        self.owner == Owner::Chance
    }

    pub fn player(&self) -> Option<Player> {
        match self.owner {
            Owner::Player(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub player: Player,
    pub labels: Vec<String>,
    /// Members in ascending node id.
    pub nodes: Vec<NodeId>,
}

impl Infoset {
    pub fn num_actions(&self) -> usize {
        self.labels.len()
    }
}

/// Immutable game tree. Node ids are depth-first preorder, the root is 0,
/// players are numbered from 0 internally.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    num_players: usize,
    nodes: Vec<Node>,
    infosets: Vec<Infoset>,
    subtree_end: Vec<NodeId>,
}

/// Node description before preorder renumbering. Ids are arbitrary.
#[derive(Clone, Debug)]
pub struct RawNode {
    pub owner: Owner,
    /// Opaque infoset key for player nodes.
    pub infoset: Option<usize>,
    pub actions: Vec<Action>,
    pub payoffs: Vec<Rational>,
}

impl Game {
    /// Assemble a game from nodes indexed by arbitrary ids. Checks tree
    /// structure only; semantic checks live in [`validate_game`].
    pub fn from_raw(num_players: usize, raw: Vec<RawNode>, root: usize) -> Result<Game, GameError> {
        Self::assemble(num_players, raw, root).map(|(g, _)| g)
    }

    /// As [`Game::from_raw`], also returning the raw-id to preorder-id map.
    pub(crate) fn assemble(
        num_players: usize,
        mut raw: Vec<RawNode>,
        root: usize,
    ) -> Result<(Game, Vec<NodeId>), GameError> {
        let n = raw.len();
        if root >= n {
            return Err(GameError::BadRoot(root));
        }
        let mut has_parent = vec![false; n];
        for (id, node) in raw.iter().enumerate() {
            match node.owner {
                Owner::Terminal => {
                    if !node.actions.is_empty() {
                        return Err(malformed(id, "terminal node with actions"));
                    }
                    if node.payoffs.len() != num_players {
                        return Err(malformed(id, "payoff vector length differs from player count"));
                    }
                }
                Owner::Chance | Owner::Player(_) => {
                    if node.actions.is_empty() {
                        return Err(malformed(id, "non-terminal node without actions"));
                    }
                    if !node.payoffs.is_empty() {
                        return Err(malformed(id, "payoffs on a non-terminal node"));
                    }
                }
            }
            if let Owner::Player(p) = node.owner {
                if p >= num_players {
                    return Err(malformed(id, "player out of range"));
                }
                if node.infoset.is_none() {
                    return Err(malformed(id, "player node without infoset"));
                }
            }
            for a in &node.actions {
                if a.child >= n {
                    return Err(GameError::DanglingChild(a.child));
                }
                if has_parent[a.child] || a.child == root {
                    return Err(GameError::MultipleParents(a.child));
                }
                has_parent[a.child] = true;
                match (node.owner, &a.prob) {
                    (Owner::Chance, None) => return Err(malformed(id, "chance action without probability")),
                    (Owner::Player(_), Some(_)) => return Err(malformed(id, "probability on a player action")),
                    _ => {}
                }
            }
        }

        // Preorder renumbering with an explicit stack.
        let mut order = Vec::with_capacity(n);
        let mut new_id = vec![usize::MAX; n];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            new_id[v] = order.len();
            order.push(v);
            for a in raw[v].actions.iter().rev() {
                stack.push(a.child);
            }
        }
        if let Some(v) = (0..n).find(|&v| new_id[v] == usize::MAX) {
            return Err(GameError::Unreachable(v));
        }

        let mut nodes: Vec<Node> = Vec::with_capacity(n);
        for &old in &order {
            let r = &mut raw[old];
            let mut actions = std::mem::take(&mut r.actions);
            for a in actions.iter_mut() {
                a.child = new_id[a.child];
            }
            nodes.push(Node {
                owner: r.owner,
                parent: None,
                parent_action: 0,
                depth: 0,
                infoset: None,
                actions,
                payoffs: std::mem::take(&mut r.payoffs),
            });
        }
        for h in 0..n {
            let depth = nodes[h].depth;
            for i in 0..nodes[h].actions.len() {
                let c = nodes[h].actions[i].child;
                nodes[c].parent = Some(h);
                nodes[c].parent_action = i;
                nodes[c].depth = depth + 1;
            }
        }

        // Infosets numbered by their first member in preorder.
        let mut key_to_set: std::collections::HashMap<usize, InfosetId> = Default::default();
        let mut infosets: Vec<Infoset> = Vec::new();
        for (h, &old) in order.iter().enumerate() {
            if let Owner::Player(p) = nodes[h].owner {
                let key = raw[old].infoset.expect("checked above");
                let id = *key_to_set.entry(key).or_insert_with(|| {
                    infosets.push(Infoset {
                        player: p,
                        labels: nodes[h].actions.iter().map(|a| a.label.clone()).collect(),
                        nodes: Vec::new(),
                    });
                    infosets.len() - 1
                });
                if infosets[id].player != p {
                    return Err(malformed(h, "infoset shared by two players"));
                }
                infosets[id].nodes.push(h);
                nodes[h].infoset = Some(id);
            }
        }

        let mut subtree_end = vec![0; n];
        for h in (0..n).rev() {
            subtree_end[h] = nodes[h].actions.last().map_or(h + 1, |a| subtree_end[a.child]);
        }
        Ok((Game { num_players, nodes, infosets, subtree_end }, new_id))
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, h: NodeId) -> &Node {
        &self.nodes[h]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn infoset(&self, i: InfosetId) -> &Infoset {
        &self.infosets[i]
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infosets_of(&self, player: Player) -> impl Iterator<Item = InfosetId> + '_ {
        (0..self.infosets.len()).filter(move |&i| self.infosets[i].player == player)
    }

    pub fn terminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&h| self.nodes[h].is_terminal())
    }

    pub fn num_terminals(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_terminal()).count()
    }

    pub fn child(&self, h: NodeId, a: usize) -> NodeId {
        self.nodes[h].actions[a].child
    }

    /// One past the last preorder id in the subtree of `h`.
    pub fn subtree_end(&self, h: NodeId) -> NodeId {
        self.subtree_end[h]
    }

    /// `a ⪯ b`: `a` is `b` or an ancestor of `b`.
    pub fn is_ancestor_or_self(&self, a: NodeId, b: NodeId) -> bool {
        a <= b && b < self.subtree_end[a]
    }

    /// True if some member of the infoset lies in the subtree of `h`.
    pub fn precedes_infoset(&self, h: NodeId, infoset: InfosetId) -> bool {
        self.infosets[infoset].nodes.iter().any(|&m| self.is_ancestor_or_self(h, m))
    }

    /// Lowest common ancestor.
    pub fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while !self.is_ancestor_or_self(a, b) {
            a = self.nodes[a].parent.expect("root is an ancestor of everything");
        }
        while a != b && !self.is_ancestor_or_self(b, a) {
            b = self.nodes[b].parent.expect("root is an ancestor of everything");
        }
        a.min(b)
    }

    /// Ancestor of `h` at the given depth.
    pub fn ancestor_at_depth(&self, mut h: NodeId, depth: usize) -> NodeId {
        while self.nodes[h].depth > depth {
            h = self.nodes[h].parent.expect("depth is above the root");
        }
        h
    }

    /// Chance reach probability p(h) for every node.
    pub fn chance_reach(&self) -> Vec<Rational> {
        let mut p = vec![Rational::zero(); self.nodes.len()];
        p[0] = Rational::one();
        for h in 0..self.nodes.len() {
            for a in &self.nodes[h].actions {
                p[a.child] = match a.prob {
                    Some(q) => p[h] * q,
                    None => p[h],
                };
            }
        }
        p
    }

    /// Number of layers; a root-only game has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Smallest and largest payoff over all terminals and players.
    pub fn payoff_range(&self) -> (Rational, Rational) {
        let mut it = self.nodes.iter().flat_map(|n| n.payoffs.iter().copied());
        let first = it.next().unwrap_or_else(Rational::zero);
        it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)))
    }

    pub fn is_timed(&self) -> bool {
        self.infosets.iter().all(|i| {
            let d = self.nodes[i.nodes[0]].depth;
            i.nodes.iter().all(|&h| self.nodes[h].depth == d)
        })
    }

    /// Validate and return an error if any diagnostic has error severity.
    pub fn ensure_valid(&self) -> Result<(), GameError> {
        let errs: Vec<String> = validate_game(self)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| d.message)
            .collect();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(GameError::Invalid(errs.join("; ")))
        }
    }
}

fn malformed(node: usize, msg: &str) -> GameError {
    GameError::Malformed { node, msg: msg.to_string() }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use std::collections::HashMap;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    /// Small two-player example with chance at the root, nodes named by
    /// letters. a: chance to b, c. b, c: player 0 in separate infosets.
    /// b -> d, f and c -> e, g. Player 1 has infosets {d, e} and {f, g}.
    /// d -> h (player 0) or terminal i; h -> p, q. e -> j, k; f -> l, m;
    /// g -> n, o.
    pub fn letters() -> (Game, HashMap<&'static str, NodeId>) {
        let mut b = GameBuilder::new(2);
        let half = Rational::new(1, 2);
        let de = b.add_infoset(1, &["l", "r"]);
        let fg = b.add_infoset(1, &["l", "r"]);
        let ib = b.add_infoset(0, &["x", "y"]);
        let ic = b.add_infoset(0, &["x", "y"]);
        let ih = b.add_infoset(0, &["u", "v"]);
        let mut names = Vec::new();
        let mut t = |b: &mut GameBuilder, name: &'static str, u: i64, v: i64| {
            let id = b.terminal(vec![r(u), r(v)]);
            names.push((name, id));
            id
        };
        let p = t(&mut b, "p", 3, 1);
        let q = t(&mut b, "q", 0, 0);
        let i = t(&mut b, "i", 1, 2);
        let l = t(&mut b, "l", 2, 2);
        let m = t(&mut b, "m", 0, 3);
        let j = t(&mut b, "j", 1, 0);
        let k = t(&mut b, "k", 4, 1);
        let n = t(&mut b, "n", 2, 1);
        let o = t(&mut b, "o", 1, 3);
        let h = b.decision(ih, vec![p, q]);
        let d = b.decision(de, vec![h, i]);
        let f = b.decision(fg, vec![l, m]);
        let e = b.decision(de, vec![j, k]);
        let g = b.decision(fg, vec![n, o]);
        let bb = b.decision(ib, vec![d, f]);
        let c = b.decision(ic, vec![e, g]);
        let a = b.chance(vec![("b", half, bb), ("c", half, c)]);
        names.extend([("h", h), ("d", d), ("f", f), ("e", e), ("g", g), ("b", bb), ("c", c), ("a", a)]);
        let (game, map) = b.build_with_map(a).unwrap();
        let names = names.into_iter().map(|(s, id)| (s, map[id])).collect();
        (game, names)
    }
}
