use num_traits::One;

use super::{Action, Game, GameError, NodeId, Owner, RawNode, Rational};

/// A timed game plus the position of every original node in it.
#[derive(Clone, Debug)]
pub struct TimedGame {
    pub game: Game,
    pub node_map: Vec<NodeId>,
}

/// Pad with single-action chance nodes so every infoset sits in one layer.
pub fn make_timed(game: &Game) -> Result<TimedGame, GameError> {
    let n = game.num_nodes();
    if game.is_timed() {
        return Ok(TimedGame { game: game.clone(), node_map: (0..n).collect() });
    }
    let mut time: Vec<usize> = game.nodes().iter().map(|x| x.depth).collect();
    let limit = n + 1;
    loop {
        let mut changed = false;
        for info in game.infosets() {
            let m = info.nodes.iter().map(|&h| time[h]).max().unwrap();
            for &h in &info.nodes {
                if time[h] < m {
                    time[h] = m;
                    changed = true;
                }
            }
        }
        // Preorder visits parents first, so one pass propagates fully.
        for h in 0..n {
            for a in &game.node(h).actions {
                if time[a.child] < time[h] + 1 {
                    time[a.child] = time[h] + 1;
                    changed = true;
                }
            }
        }
        if time.iter().any(|&t| t > limit) {
            return Err(GameError::UntimableGame);
        }
        if !changed {
            break;
        }
    }

    let mut raw: Vec<RawNode> = game
        .nodes()
        .iter()
        .map(|x| RawNode {
            owner: x.owner,
            infoset: x.infoset,
            actions: x.actions.clone(),
            payoffs: x.payoffs.clone(),
        })
        .collect();
    for h in 0..n {
        for a in 0..raw[h].actions.len() {
            let child = raw[h].actions[a].child;
            let gap = time[child] - time[h] - 1;
            let mut below = child;
            for _ in 0..gap {
                raw.push(RawNode {
                    owner: Owner::Chance,
                    infoset: None,
                    actions: vec![Action { label: "wait".into(), child: below, prob: Some(Rational::one()) }],
                    payoffs: Vec::new(),
                });
                below = raw.len() - 1;
            }
            raw[h].actions[a].child = below;
        }
    }
    let (timed, map) = Game::assemble(game.num_players(), raw, 0)?;
    debug_assert!(timed.is_timed());
    debug_assert!(game.nodes().iter().enumerate().all(|(h, x)| {
        matches!(x.owner, Owner::Terminal) || timed.node(map[h]).depth == time[h]
    }));
    Ok(TimedGame { game: timed, node_map: map[..n].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::super::{compute_sequences, GameBuilder};
    use super::*;

    fn r(x: i64) -> Rational {
        Rational::from_integer(x)
    }

    #[test]
    fn timed_game_is_unchanged() {
        let mut b = GameBuilder::new(1);
        let z1 = b.terminal(vec![r(1)]);
        let z2 = b.terminal(vec![r(2)]);
        let z3 = b.terminal(vec![r(3)]);
        let i0 = b.add_infoset(0, &["a", "b"]);
        let i1 = b.add_infoset(0, &["a", "b"]);
        let inner = b.decision(i1, vec![z2, z3]);
        let root = b.decision(i0, vec![z1, inner]);
        let g = b.build(root).unwrap();
        let t = make_timed(&g).unwrap();
        assert_eq!(t.game, g);
        assert_eq!(t.node_map, (0..g.num_nodes()).collect::<Vec<_>>());
    }

    #[test]
    fn spanning_infoset_is_padded() {
        // Chance picks a shallow or a deep path to the same player-1 infoset.
        let mut b = GameBuilder::new(2);
        let info = b.add_infoset(1, &["l", "r"]);
        let pre = b.add_infoset(0, &["x", "y"]);
        let z: Vec<_> = (0..6).map(|k| b.terminal(vec![r(k), r(-k)])).collect();
        let shallow = b.decision(info, vec![z[0], z[1]]);
        let deep_a = b.decision(info, vec![z[2], z[3]]);
        let deep_b = b.decision(info, vec![z[4], z[5]]);
        let mid = b.decision(pre, vec![deep_a, deep_b]);
        let root = b.chance(vec![("s", Rational::new(1, 2), shallow), ("d", Rational::new(1, 2), mid)]);
        let g = b.build(root).unwrap();
        assert!(!g.is_timed());
        let t = make_timed(&g).unwrap();
        assert!(t.game.is_timed());
        assert_eq!(t.game.num_terminals(), g.num_terminals());
        assert_eq!(t.game.num_nodes(), g.num_nodes() + 1);
        let members = &t.game.infoset(t.game.node(t.node_map[1]).infoset.unwrap()).nodes;
        assert!(members.iter().all(|&h| t.game.node(h).depth == 2));
        compute_sequences(&t.game).unwrap();
    }
}
