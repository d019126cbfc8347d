use correq::game::{compute_sequences, to_f64};
use correq::zoo::{all_deals, gen_tricks, TricksSpec, DUMMY_HAND};

/// Play sequences of one deal, counted straight from the card rules with
/// cards as (suit, rank) pairs.
fn count_plays(hands: &mut [Vec<(u8, u8)>; 4], trick: &mut Vec<(usize, (u8, u8))>, leader: usize) -> u64 {
    if hands.iter().all(|h| h.is_empty()) {
        return 1;
    }
    let seat = (leader + trick.len()) % 4;
    let lead = trick.first().map(|t| (t.1).0);
    let follow: Vec<(u8, u8)> = hands[seat].iter().copied().filter(|c| Some(c.0) == lead).collect();
    let options = if follow.is_empty() { hands[seat].clone() } else { follow };
    let mut total = 0;
    for c in options {
        hands[seat].retain(|&x| x != c);
        trick.push((seat, c));
        total += if trick.len() == 4 {
            let suit = if trick.iter().any(|t| (t.1).0 == 0) { 0 } else { (trick[0].1).0 };
            let winner = trick.iter().filter(|t| (t.1).0 == suit).max_by_key(|t| (t.1).1).unwrap().0;
            let saved = std::mem::take(trick);
            let n = count_plays(hands, trick, winner);
            *trick = saved;
            n
        } else {
            count_plays(hands, trick, leader)
        };
        trick.pop();
        hands[seat].push(c);
    }
    total
}

#[test]
fn full_tricks_game_sizes() {
    let pair = |c: u8| (c / 3, c % 3);
    let expected: u64 = all_deals()
        .iter()
        .map(|[w, e, s]| {
            let mut hands = [w, &DUMMY_HAND, e, s].map(|h| h.iter().map(|&c| pair(c)).collect::<Vec<_>>());
            count_plays(&mut hands, &mut Vec::new(), 0)
        })
        .sum();
    for perfect_info in [true, false] {
        let g = gen_tricks(&TricksSpec { deals: None, seed: 0, perfect_info }).unwrap();
        assert_eq!(g.num_terminals() as u64, expected);
        assert!(g.terminals().all(|z| g.node(z).depth == 13));
        assert!(g.terminals().all(|z| g.node(z).payoffs.iter().map(to_f64).sum::<f64>() == 3.0));
        compute_sequences(&g).unwrap();
    }
}
