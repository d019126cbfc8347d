//! Three-player Kuhn poker with `r` ranks.
//!
//! Each player antes 1 and gets one card. Players act in seat order; while
//! nobody has bet a player may check or bet 1. After a bet every other
//! player, in seat order from the bettor, calls or folds. The highest card
//! among the players still in takes the pot.

use std::collections::HashMap;

use thiserror::Error;

use crate::game::{Game, GameBuilder, InfosetId, NodeId, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KuhnError {
    #[error("three-player Kuhn poker needs between 3 and 13 ranks, got {0}")]
    BadRankCount(usize),
}

const PLAYERS: usize = 3;

struct Ctx {
    b: GameBuilder,
    infosets: HashMap<(usize, usize, String), InfosetId>,
}

impl Ctx {
    fn infoset(&mut self, player: usize, card: usize, history: &str, labels: &[&str]) -> InfosetId {
        let key = (player, card, history.to_string());
        if let Some(&i) = self.infosets.get(&key) {
            return i;
        }
        let i = self.b.add_infoset(player, labels);
        self.infosets.insert(key, i);
        i
    }

    fn showdown(&mut self, cards: &[usize; PLAYERS], put: &[i64; PLAYERS], folded: &[bool; PLAYERS]) -> NodeId {
        let winner = (0..PLAYERS).filter(|&i| !folded[i]).max_by_key(|&i| cards[i]).unwrap();
        let pot: i64 = put.iter().sum();
        let pay = (0..PLAYERS)
            .map(|i| Rational::from_integer(if i == winner { pot - put[i] } else { -put[i] }))
            .collect();
        self.b.terminal(pay)
    }

    /// Nobody has bet yet; `seat` is to act.
    fn open(&mut self, cards: &[usize; PLAYERS], seat: usize, history: &mut String) -> NodeId {
        if seat == PLAYERS {
            return self.showdown(cards, &[1; PLAYERS], &[false; PLAYERS]);
        }
        let info = self.infoset(seat, cards[seat], history, &["check", "bet"]);
        history.push('k');
        let check = self.open(cards, seat + 1, history);
        history.pop();
        history.push('b');
        let mut put = [1; PLAYERS];
        put[seat] = 2;
        let bet = self.respond(cards, seat, 1, put, [false; PLAYERS], history);
        history.pop();
        self.b.decision(info, vec![check, bet])
    }

    /// Player `bettor + k` answers the bet.
    fn respond(
        &mut self,
        cards: &[usize; PLAYERS],
        bettor: usize,
        k: usize,
        put: [i64; PLAYERS],
        folded: [bool; PLAYERS],
        history: &mut String,
    ) -> NodeId {
        if k == PLAYERS {
            return self.showdown(cards, &put, &folded);
        }
        let seat = (bettor + k) % PLAYERS;
        let info = self.infoset(seat, cards[seat], history, &["fold", "call"]);
        history.push('f');
        let mut f = folded;
        f[seat] = true;
        let fold = self.respond(cards, bettor, k + 1, put, f, history);
        history.pop();
        history.push('c');
        let mut p = put;
        p[seat] += 1;
        let call = self.respond(cards, bettor, k + 1, p, folded, history);
        history.pop();
        self.b.decision(info, vec![fold, call])
    }
}

pub fn gen_kuhn3(ranks: usize) -> Result<Game, KuhnError> {
    if !(3..=13).contains(&ranks) {
        return Err(KuhnError::BadRankCount(ranks));
    }
    let mut ctx = Ctx { b: GameBuilder::new(PLAYERS), infosets: HashMap::new() };
    let deals: Vec<[usize; PLAYERS]> = (0..ranks)
        .flat_map(|a| (0..ranks).flat_map(move |b| (0..ranks).map(move |c| [a, b, c])))
        .filter(|[a, b, c]| a != b && b != c && a != c)
        .collect();
    let p = Rational::new(1, deals.len() as i64);
    let mut outcomes = Vec::with_capacity(deals.len());
    for cards in deals {
        let child = ctx.open(&cards, 0, &mut String::new());
        outcomes.push((format!("{}{}{}", cards[0], cards[1], cards[2]), p, child));
    }
    let root = ctx.b.chance(outcomes);
    Ok(ctx.b.build(root).expect("generator builds a valid tree"))
}
