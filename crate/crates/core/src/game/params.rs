use std::collections::HashSet;

use serde::Serialize;

use super::{Game, PrivateState, PublicPartition, SequenceIndex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameParams {
    /// Information complexity.
    pub k: usize,
    /// Largest branching factor of a non-chance node.
    pub b: usize,
    /// Number of layers (root-only game: 1).
    pub d: usize,
    pub num_nodes: usize,
    pub num_terminals: usize,
    pub num_sequences: Vec<usize>,
    pub num_infosets: Vec<usize>,
    pub num_public_states: usize,
}

pub fn game_parameters(game: &Game, seqs: &SequenceIndex, partition: &PublicPartition) -> GameParams {
    let n = game.num_players();
    let k = partition
        .states()
        .iter()
        .map(|members| {
            let distinct: HashSet<(usize, PrivateState)> = members
                .iter()
                .flat_map(|&h| (0..n).map(move |i| (i, seqs.private_state(game, h, i))))
                .collect();
            distinct.len()
        })
        .max()
        .unwrap_or(0);
    let b = game
        .nodes()
        .iter()
        .filter(|x| x.player().is_some())
        .map(|x| x.actions.len())
        .max()
        .unwrap_or(0);
    GameParams {
        k,
        b,
        d: game.depth(),
        num_nodes: game.num_nodes(),
        num_terminals: game.num_terminals(),
        num_sequences: (0..n).map(|i| seqs.num_sequences(i)).collect(),
        num_infosets: (0..n).map(|i| game.infosets_of(i).count()).collect(),
        num_public_states: partition.len(),
    }
}
