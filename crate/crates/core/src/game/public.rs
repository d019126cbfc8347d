use std::collections::HashMap;

use petgraph::unionfind::UnionFind;

use super::{Game, GameError, NodeId, PrivateState, SequenceIndex};

/// Partition of the non-terminal nodes into public states. States are
/// numbered by their smallest node id; members are sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicPartition {
    states: Vec<Vec<NodeId>>,
    state_of: Vec<Option<usize>>,
}

impl PublicPartition {
    pub fn states(&self) -> &[Vec<NodeId>] {
        &self.states
    }

    pub fn state(&self, p: usize) -> &[NodeId] {
        &self.states[p]
    }

    pub fn state_of(&self, h: NodeId) -> Option<usize> {
        self.state_of[h]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

pub fn compute_public_states(game: &Game, seqs: &SequenceIndex) -> Result<PublicPartition, GameError> {
    if let Some(i) = (0..game.infosets().len()).find(|&i| {
        let info = game.infoset(i);
        let d = game.node(info.nodes[0]).depth;
        info.nodes.iter().any(|&h| game.node(h).depth != d)
    }) {
        return Err(GameError::NotTimed(i));
    }

    let n = game.num_nodes();
    let mut uf = UnionFind::<usize>::new(n);

    // Same layer and identical private states for every player.
    let mut by_key: HashMap<(usize, Vec<PrivateState>), NodeId> = HashMap::new();
    for h in 0..n {
        let node = game.node(h);
        if node.is_terminal() {
            continue;
        }
        let key: Vec<PrivateState> =
            (0..game.num_players()).map(|i| seqs.private_state(game, h, i)).collect();
        match by_key.get(&(node.depth, key.clone())) {
            Some(&first) => {
                uf.union(first, h);
            }
            None => {
                by_key.insert((node.depth, key), h);
            }
        }
    }

    // Ancestors in one layer of members of a common infoset.
    for info in game.infosets() {
        let mut frontier = info.nodes.clone();
        while !frontier.is_empty() {
            for w in frontier.windows(2) {
                uf.union(w[0], w[1]);
            }
            let mut up: Vec<NodeId> = frontier.iter().filter_map(|&h| game.node(h).parent).collect();
            up.dedup();
            frontier = up;
        }
    }

    let mut id_of_root: HashMap<usize, usize> = HashMap::new();
    let mut states: Vec<Vec<NodeId>> = Vec::new();
    let mut state_of = vec![None; n];
    for h in 0..n {
        if game.node(h).is_terminal() {
            continue;
        }
        let r = uf.find(h);
        let id = *id_of_root.entry(r).or_insert_with(|| {
            states.push(Vec::new());
            states.len() - 1
        });
        states[id].push(h);
        state_of[h] = Some(id);
    }
    Ok(PublicPartition { states, state_of })
}
