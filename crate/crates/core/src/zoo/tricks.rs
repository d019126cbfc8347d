//! Three-card bridge endgame. Four seats play clockwise (West, North, East,
//! South); South is declarer and also plays North's cards (the dummy), so
//! there are three players: West, East and the declarer. The deck is ranks
//! 2, 3, 4 of four suits with spades trump, and the dummy always holds
//! ♠2 ♥2 ♥3. West leads the first trick.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Game, GameBuilder, InfosetId, NodeId, Rational};

/// Number of ways to deal the nine free cards 3/3/3.
pub const FULL_DEALS: usize = 1680;

const WEST: usize = 0;
const EAST: usize = 2;
const SOUTH: usize = 3;
const SPADES: u8 = 0;
const SUITS: [&str; 4] = ["S", "H", "D", "C"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TricksError {
    #[error("deal count must be between 1 and {FULL_DEALS}, got {0}")]
    BadDealCount(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TricksSpec {
    /// Sampled deal count; `None` keeps all 1680 deals.
    pub deals: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Every hand is public.
    #[serde(default)]
    pub perfect_info: bool,
}

/// Card `suit * 3 + (rank - 2)`.
pub type Card = u8;

pub fn card_name(c: Card) -> String {
    format!("{}{}", SUITS[(c / 3) as usize], c % 3 + 2)
}

fn suit(c: Card) -> u8 {
    c / 3
}

pub const DUMMY_HAND: [Card; 3] = [0, 3, 4];

/// Hands of (West, East, South) for every deal, in lexicographic order.
pub fn all_deals() -> Vec<[[Card; 3]; 3]> {
    let free: Vec<Card> = (0..12).filter(|c| !DUMMY_HAND.contains(c)).collect();
    let mut out = Vec::with_capacity(FULL_DEALS);
    let triples = |pool: &[Card]| {
        let mut t = Vec::new();
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                for k in j + 1..pool.len() {
                    t.push([pool[i], pool[j], pool[k]]);
                }
            }
        }
        t
    };
    for w in triples(&free) {
        let rest: Vec<Card> = free.iter().copied().filter(|c| !w.contains(c)).collect();
        for e in triples(&rest) {
            let s: Vec<Card> = rest.iter().copied().filter(|c| !e.contains(c)).collect();
            out.push([w, e, [s[0], s[1], s[2]]]);
        }
    }
    out
}

/// Winner seat of a trick given as (seat, card) in play order.
pub fn trick_winner(trick: &[(usize, Card)]) -> usize {
    let lead = suit(trick[0].1);
    let trumped = trick.iter().any(|&(_, c)| suit(c) == SPADES);
    let target = if trumped { SPADES } else { lead };
    trick.iter().filter(|&&(_, c)| suit(c) == target).max_by_key(|&&(_, c)| c % 3).unwrap().0
}

/// Cards `seat` may play from `hand` given the lead card, ascending.
pub fn legal(hand: &[Card], lead: Option<Card>) -> Vec<Card> {
    let mut v: Vec<Card> = match lead {
        Some(l) if hand.iter().any(|&c| suit(c) == suit(l)) => hand.iter().copied().filter(|&c| suit(c) == suit(l)).collect(),
        _ => hand.to_vec(),
    };
    v.sort();
    v
}

fn player_of(seat: usize) -> usize {
    match seat {
        WEST => 0,
        EAST => 1,
        _ => 2,
    }
}

/// What the acting player knows besides the public play history.
#[derive(Clone, PartialEq, Eq, Hash)]
enum Knowledge {
    Deal(usize),
    Hand([Card; 3]),
}

struct Ctx {
    b: GameBuilder,
    perfect: bool,
    infosets: HashMap<(usize, Knowledge, Vec<Card>), InfosetId>,
}

#[derive(Clone)]
struct Play {
    deal: usize,
    dealt: [[Card; 3]; 4],
    hands: [Vec<Card>; 4],
    history: Vec<Card>,
    trick: Vec<(usize, Card)>,
    leader: usize,
    won: [i64; 3],
}

impl Ctx {
    fn infoset(&mut self, s: &Play, seat: usize, labels: &[String]) -> InfosetId {
        // The declarer knows South's hand whichever seat it plays; the seat
        // to act follows from the history.
        let know = if self.perfect {
            Knowledge::Deal(s.deal)
        } else {
            Knowledge::Hand(s.dealt[if player_of(seat) == 2 { SOUTH } else { seat }])
        };
        let key = (player_of(seat), know, s.history.clone());
        if let Some(&i) = self.infosets.get(&key) {
            return i;
        }
        let i = self.b.add_infoset(player_of(seat), labels);
        self.infosets.insert(key, i);
        i
    }

    fn play(&mut self, s: Play) -> NodeId {
        if s.history.len() == 12 {
            return self.b.terminal(s.won.iter().map(|&w| Rational::from_integer(w)).collect());
        }
        let seat = (s.leader + s.trick.len()) % 4;
        let moves = legal(&s.hands[seat], s.trick.first().map(|x| x.1));
        let labels: Vec<String> = moves.iter().map(|&c| card_name(c)).collect();
        let info = self.infoset(&s, seat, &labels);
        let mut children = Vec::with_capacity(moves.len());
        for &c in &moves {
            let mut t = s.clone();
            t.hands[seat].retain(|&x| x != c);
            t.history.push(c);
            t.trick.push((seat, c));
            if t.trick.len() == 4 {
                let w = trick_winner(&t.trick);
                t.won[player_of(w)] += 1;
                t.leader = w;
                t.trick.clear();
            }
            children.push(self.play(t));
        }
        self.b.decision(info, children)
    }
}

pub fn gen_tricks(spec: &TricksSpec) -> Result<Game, TricksError> {
    let all = all_deals();
    let chosen: Vec<usize> = match spec.deals {
        None => (0..FULL_DEALS).collect(),
        Some(l) if l == 0 || l > FULL_DEALS => return Err(TricksError::BadDealCount(l)),
        Some(l) => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut v = rand::seq::index::sample(&mut rng, FULL_DEALS, l).into_vec();
            v.sort();
            v
        }
    };
    let mut ctx = Ctx { b: GameBuilder::new(3), perfect: spec.perfect_info, infosets: HashMap::new() };
    let p = Rational::new(1, chosen.len() as i64);
    let mut outcomes = Vec::with_capacity(chosen.len());
    for &d in &chosen {
        let [w, e, s] = all[d];
        // Seat order West, North, East, South.
        let dealt = [w, DUMMY_HAND, e, s];
        let hands = dealt.map(|h| h.to_vec());
        let start = Play { deal: d, dealt, hands, history: Vec::new(), trick: Vec::new(), leader: WEST, won: [0; 3] };
        let label = [w, e, s].iter().map(|h| h.iter().map(|&c| card_name(c)).collect::<Vec<_>>().join("")).collect::<Vec<_>>().join("/");
        outcomes.push((label, p, ctx.play(start)));
    }
    let root = ctx.b.chance(outcomes);
    Ok(ctx.b.build(root).expect("generator builds a valid tree"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{to_f64, validate_game};

    #[test]
    fn deal_count() {
        let d = all_deals();
        assert_eq!(d.len(), FULL_DEALS);
        let mut seen = std::collections::HashSet::new();
        for x in &d {
            assert!(seen.insert(*x));
        }
    }

    #[test]
    fn trumps_and_lead_suit() {
        // H4 led, D4 discarded, S2 ruffs.
        assert_eq!(trick_winner(&[(0, 5), (1, 8), (2, 0), (3, 4)]), 2);
        assert_eq!(trick_winner(&[(0, 3), (1, 5), (2, 8), (3, 4)]), 1);
        assert_eq!(legal(&[0, 5, 8], Some(3)), vec![5]);
        assert_eq!(legal(&[0, 8], Some(3)), vec![0, 8]);
    }

    #[test]
    fn small_sample_is_valid() {
        let g = gen_tricks(&TricksSpec { deals: Some(5), seed: 1, perfect_info: false }).unwrap();
        assert!(validate_game(&g).is_empty(), "{:?}", validate_game(&g));
        for z in g.terminals() {
            assert_eq!(g.node(z).payoffs.iter().map(to_f64).sum::<f64>(), 3.0);
            assert_eq!(g.node(z).depth, 13);
        }
        assert!(gen_tricks(&TricksSpec { deals: Some(0), seed: 0, perfect_info: false }).is_err());
    }

    /// Team minimax straight from the card rules (defenders maximize).
    fn minimax(hands: &mut [Vec<Card>; 4], trick: &mut Vec<(usize, Card)>, leader: usize, played: usize) -> i64 {
        if played == 12 {
            return 0;
        }
        let seat = (leader + trick.len()) % 4;
        let defender = seat == WEST || seat == EAST;
        let mut best = if defender { i64::MIN } else { i64::MAX };
        for c in legal(&hands[seat], trick.first().map(|x| x.1)) {
            hands[seat].retain(|&x| x != c);
            trick.push((seat, c));
            let v = if trick.len() == 4 {
                let w = trick_winner(trick);
                let mut rest = Vec::new();
                let saved = std::mem::take(trick);
                let gain = i64::from(w == WEST || w == EAST);
                let v = gain + minimax(hands, &mut rest, w, played + 1);
                *trick = saved;
                v
            } else {
                minimax(hands, trick, leader, played + 1)
            };
            trick.pop();
            hands[seat].push(c);
            best = if defender { best.max(v) } else { best.min(v) };
        }
        best
    }

    fn tree_minimax(g: &Game, h: NodeId) -> f64 {
        let n = g.node(h);
        if n.is_terminal() {
            return to_f64(&n.payoffs[0]) + to_f64(&n.payoffs[1]);
        }
        if n.is_chance() {
            return n.actions.iter().map(|a| to_f64(a.prob.as_ref().unwrap()) * tree_minimax(g, a.child)).sum();
        }
        let vals = n.actions.iter().map(|a| tree_minimax(g, a.child));
        if n.player() == Some(2) {
            vals.fold(f64::INFINITY, f64::min)
        } else {
            vals.fold(f64::NEG_INFINITY, f64::max)
        }
    }

    #[test]
    fn one_deal_perfect_info_is_minimax() {
        for seed in 0..5 {
            let spec = TricksSpec { deals: Some(1), seed, perfect_info: true };
            let g = gen_tricks(&spec).unwrap();
            let label = &g.node(0).actions[0].label;
            let deal = all_deals().into_iter().find(|d| {
                d.iter().map(|h| h.iter().map(|&c| card_name(c)).collect::<String>()).collect::<Vec<_>>().join("/") == *label
            });
            let [w, e, s] = deal.unwrap();
            let mut hands = [w.to_vec(), DUMMY_HAND.to_vec(), e.to_vec(), s.to_vec()];
            let want = minimax(&mut hands, &mut Vec::new(), WEST, 0);
            assert_eq!(tree_minimax(&g, 0), want as f64);
        }
    }
}
