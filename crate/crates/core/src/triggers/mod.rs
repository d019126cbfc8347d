//! Triggers, trigger histories, relevant joint sequences, deviation polytopes
//! and incentive matrices.

mod deviation;
mod histories;
mod incentive;

pub use deviation::{deviation_polytope, DeviationPolytope};
pub(crate) use histories::for_each_at as for_each_history;
pub use histories::{enumerate_trigger_histories, JointSequences, TriggerHistory};
pub use incentive::{deviation_benefit, incentive_matrices, IncentivePair};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::game::{Game, InfosetId, NodeId, Player, SequenceIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Concept {
    Nfcce,
    Efcce,
    Efce,
}

impl Concept {
    pub const ALL: [Concept; 3] = [Concept::Nfcce, Concept::Efcce, Concept::Efce];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Concept::Nfcce => "nfcce",
            Concept::Efcce => "efcce",
            Concept::Efce => "efce",
        })
    }
}

impl FromStr for Concept {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nfcce" => Ok(Concept::Nfcce),
            "efcce" => Ok(Concept::Efcce),
            "efce" => Ok(Concept::Efce),
            _ => Err(format!("unknown concept {s:?} (expected nfcce, efcce or efce)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TriggerKind {
    /// ∅_i: the player rejects the mediator before play starts.
    Empty,
    /// Reaching the infoset, before seeing its recommendation.
    Infoset(InfosetId),
    /// Being recommended `action` at the infoset.
    Sequence(InfosetId, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trigger {
    pub player: Player,
    pub kind: TriggerKind,
}

impl Trigger {
    /// Activation set H[τ].
    pub fn activation<'g>(&self, game: &'g Game) -> &'g [NodeId] {
        match self.kind {
            TriggerKind::Empty => std::slice::from_ref(&0),
            TriggerKind::Infoset(i) | TriggerKind::Sequence(i, _) => &game.infoset(i).nodes,
        }
    }

    /// σ_i(τ): the sequence the triggered player is frozen at.
    pub fn sequence(&self, seqs: &SequenceIndex) -> usize {
        match self.kind {
            TriggerKind::Empty => 0,
            TriggerKind::Infoset(i) => seqs.parent_seq(i),
            TriggerKind::Sequence(i, a) => seqs.seq_of(i, a),
        }
    }

    pub fn label(&self, game: &Game) -> String {
        match self.kind {
            TriggerKind::Empty => format!("p{}:∅", self.player + 1),
            TriggerKind::Infoset(i) => format!("p{}:I{}", self.player + 1, i),
            TriggerKind::Sequence(i, a) => format!("p{}:I{}:{}", self.player + 1, i, game.infoset(i).labels[a]),
        }
    }
}

/// Triggers ordered by player, then infoset id, then action.
pub fn enumerate_triggers(game: &Game, concept: Concept) -> Vec<Trigger> {
    let mut out = Vec::new();
    for player in 0..game.num_players() {
        match concept {
            Concept::Nfcce => out.push(Trigger { player, kind: TriggerKind::Empty }),
            Concept::Efcce => {
                out.extend(game.infosets_of(player).map(|i| Trigger { player, kind: TriggerKind::Infoset(i) }))
            }
            Concept::Efce => {
                for i in game.infosets_of(player) {
                    for a in 0..game.infoset(i).num_actions() {
                        out.push(Trigger { player, kind: TriggerKind::Sequence(i, a) });
                    }
                }
            }
        }
    }
    out
}

/// Position of a trigger inside `enumerate_triggers(game, concept)`.
#[derive(Clone, Debug)]
pub struct TriggerIndex {
    concept: Concept,
    first: Vec<usize>,
    player_first: Vec<usize>,
}

impl TriggerIndex {
    pub fn new(game: &Game, concept: Concept) -> Self {
        let mut first = vec![0; game.infosets().len()];
        let mut player_first = vec![0; game.num_players()];
        let mut k = 0;
        for player in 0..game.num_players() {
            player_first[player] = k;
            for i in game.infosets_of(player) {
                first[i] = k;
                k += match concept {
                    Concept::Nfcce => 0,
                    Concept::Efcce => 1,
                    Concept::Efce => game.infoset(i).num_actions(),
                };
            }
            if concept == Concept::Nfcce {
                k += 1;
            }
        }
        TriggerIndex { concept, first, player_first }
    }

    pub fn of(&self, t: &Trigger) -> usize {
        match (self.concept, t.kind) {
            (Concept::Nfcce, TriggerKind::Empty) => self.player_first[t.player],
            (Concept::Efcce, TriggerKind::Infoset(i)) => self.first[i],
            (Concept::Efce, TriggerKind::Sequence(i, a)) => self.first[i] + a,
            _ => panic!("trigger kind does not belong to {}", self.concept),
        }
    }
}
