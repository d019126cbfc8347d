use super::{Game, GameError, InfosetId, NodeId, Owner, Player};

/// A player's sequence: empty, or the last own infoset-action pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sequence {
    Empty,
    Action { infoset: InfosetId, action: usize },
}

/// Private state σ̄_i(h): the sequence, extended by the current infoset when
/// player i acts at h.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrivateState {
    Seq(usize),
    Infoset(InfosetId),
}

/// Per-node, per-player sequence ids. Sequence id 0 is always ∅_i; the
/// actions of each infoset occupy a contiguous block in ascending infoset id.
#[derive(Clone, Debug)]
pub struct SequenceIndex {
    num_players: usize,
    node_seq: Vec<u32>,
    first_seq: Vec<usize>,
    parent_seq: Vec<usize>,
    sequences: Vec<Vec<Sequence>>,
}

impl SequenceIndex {
    pub fn num_players(&self) -> usize {
        self.num_players
    }

    /// σ_i(h) as a sequence id of player i.
    pub fn seq(&self, h: NodeId, i: Player) -> usize {
        self.node_seq[h * self.num_players + i] as usize
    }

    /// σ⃗(h) for all players.
    pub fn joint(&self, h: NodeId) -> &[u32] {
        &self.node_seq[h * self.num_players..(h + 1) * self.num_players]
    }

    pub fn private_state(&self, game: &Game, h: NodeId, i: Player) -> PrivateState {
        match game.node(h).owner {
            Owner::Player(p) if p == i => PrivateState::Infoset(game.node(h).infoset.unwrap()),
            _ => PrivateState::Seq(self.seq(h, i)),
        }
    }

    /// Id of the sequence (I, a).
    pub fn seq_of(&self, infoset: InfosetId, action: usize) -> usize {
        self.first_seq[infoset] + action
    }

    /// σ_i(I): the owner's sequence leading into the infoset.
    pub fn parent_seq(&self, infoset: InfosetId) -> usize {
        self.parent_seq[infoset]
    }

    pub fn num_sequences(&self, i: Player) -> usize {
        self.sequences[i].len()
    }

    pub fn sequences(&self, i: Player) -> &[Sequence] {
        &self.sequences[i]
    }

    pub fn sequence(&self, i: Player, s: usize) -> Sequence {
        self.sequences[i][s]
    }

    /// Whether `a` is a prefix of `b` (both sequences of player i).
    pub fn is_prefix(&self, i: Player, a: usize, mut b: usize) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.sequences[i][b] {
                Sequence::Empty => return false,
                Sequence::Action { infoset, .. } => b = self.parent_seq[infoset],
            }
        }
    }

    /// Human-readable sequence name, e.g. `"3:x"` or `"∅"`.
    pub fn label(&self, game: &Game, i: Player, s: usize) -> String {
        match self.sequences[i][s] {
            Sequence::Empty => "∅".to_string(),
            Sequence::Action { infoset, action } => {
                format!("{}:{}", infoset, game.infoset(infoset).labels[action])
            }
        }
    }
}

pub fn compute_sequences(game: &Game) -> Result<SequenceIndex, GameError> {
    let n = game.num_players();
    let mut first_seq = vec![0; game.infosets().len()];
    let mut sequences = vec![vec![Sequence::Empty]; n];
    for (id, info) in game.infosets().iter().enumerate() {
        first_seq[id] = sequences[info.player].len();
        for a in 0..info.num_actions() {
            sequences[info.player].push(Sequence::Action { infoset: id, action: a });
        }
    }

    let mut node_seq = vec![0u32; game.num_nodes() * n];
    let mut parent_seq = vec![usize::MAX; game.infosets().len()];
    for h in 0..game.num_nodes() {
        let node = game.node(h);
        if let Some(info) = node.infoset {
            let p = node.player().unwrap();
            let s = node_seq[h * n + p] as usize;
            if parent_seq[info] == usize::MAX {
                parent_seq[info] = s;
            } else if parent_seq[info] != s {
                return Err(GameError::PerfectRecallViolation { infoset: info, player: p });
            }
        }
        for (a, act) in node.actions.iter().enumerate() {
            let c = act.child;
            for i in 0..n {
                node_seq[c * n + i] = node_seq[h * n + i];
            }
            if let (Some(info), Some(p)) = (node.infoset, node.player()) {
                node_seq[c * n + p] = (first_seq[info] + a) as u32;
            }
        }
    }
    Ok(SequenceIndex { num_players: n, node_seq, first_seq, parent_seq, sequences })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::letters;
    use super::*;

    #[test]
    fn root_sequences_are_empty() {
        let (g, _) = letters();
        let s = compute_sequences(&g).unwrap();
        for i in 0..2 {
            assert_eq!(s.seq(0, i), 0);
            assert_eq!(s.sequence(i, 0), Sequence::Empty);
        }
    }

    #[test]
    fn letters_private_states() {
        let (g, at) = letters();
        let s = compute_sequences(&g).unwrap();
        let h = at["h"];
        // Player 0 acted at b and now acts at h: σ̄ = (b:x, I_h), two steps.
        let ih = g.node(h).infoset.unwrap();
        assert_eq!(s.private_state(&g, h, 0), PrivateState::Infoset(ih));
        let ib = g.node(at["b"]).infoset.unwrap();
        assert_eq!(s.parent_seq(ih), s.seq_of(ib, 0));
        assert_eq!(s.sequence(0, s.parent_seq(ib)), Sequence::Empty);
        // Player 1's sequence at h is the action taken at d.
        let de = g.node(at["d"]).infoset.unwrap();
        assert_eq!(s.seq(h, 1), s.seq_of(de, 0));
        assert!(s.is_prefix(0, 0, s.seq(at["p"], 0)));
    }

    #[test]
    fn sequence_counts() {
        let (g, _) = letters();
        let s = compute_sequences(&g).unwrap();
        assert_eq!(s.num_sequences(0), 7);
        assert_eq!(s.num_sequences(1), 5);
    }
}
