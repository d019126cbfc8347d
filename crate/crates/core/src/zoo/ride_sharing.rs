//! Two drivers serving ride requests on a small road network.
//!
//! Reading used here (fixed by matching the published structural counts):
//! both starting vertices are drawn uniformly from all ordered pairs, the
//! horizon counts positions so a driver makes `horizon - 1` unit moves, there
//! is no "stay" move, driver 1 moves first and driver 2 moves without seeing
//! that move, and each driver sees the other's exact position only when it
//! is the same or an adjacent vertex. Serving a vertex pays its reward to
//! the first driver there; arriving together pays nobody and still consumes
//! the vertex. Starting vertices count as served on arrival.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Game, GameBuilder, InfosetId, NodeId, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RideSharingError {
    #[error("unknown map {0}")]
    BadMap(String),
    #[error("horizon {0} is too long for a desk-scale game")]
    BadHorizon(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoadMap {
    Map1,
    Map2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RideSharingSpec {
    pub map: RoadMap,
    pub horizon: usize,
}

/// Vertex rewards in halves and the undirected edge list.
pub fn map_data(map: RoadMap) -> (Vec<Rational>, Vec<(usize, usize)>) {
    let halves = |v: &[i64]| v.iter().map(|&x| Rational::new(x, 2)).collect::<Vec<_>>();
    match map {
        RoadMap::Map1 => (
            halves(&[2, 1, 1, 3, 9, 4, 3]),
            vec![(0, 1), (0, 3), (1, 2), (3, 2), (4, 2), (3, 6), (5, 6), (5, 1), (2, 5), (2, 6)],
        ),
        RoadMap::Map2 => (
            halves(&[2, 1, 1, 3, 2, 5, 3, 10]),
            vec![(0, 1), (0, 2), (0, 3), (0, 4), (5, 1), (5, 2), (3, 2), (3, 6), (4, 6), (5, 7), (7, 6)],
        ),
    }
}

const MAX_HORIZON: usize = 6;

struct Ctx {
    rewards: Vec<Rational>,
    adj: Vec<Vec<usize>>,
    moves: usize,
    b: GameBuilder,
    infosets: HashMap<(usize, Vec<i16>), InfosetId>,
}

#[derive(Clone)]
struct State {
    pos: [usize; 2],
    served: u32,
    gain: [Rational; 2],
    obs: [Vec<i16>; 2],
    step: usize,
}

impl Ctx {
    fn sees(&self, from: usize, other: usize) -> bool {
        from == other || self.adj[from].contains(&other)
    }

    fn observe(&self, s: &mut State) {
        for i in 0..2 {
            let (me, other) = (s.pos[i], s.pos[1 - i]);
            s.obs[i].push(me as i16);
            s.obs[i].push(if self.sees(me, other) { other as i16 } else { -1 });
        }
    }

    /// Both drivers arrive at their current positions simultaneously.
    fn arrive(&self, s: &mut State) {
        let [a, b] = s.pos;
        if a == b {
            s.served |= 1 << a;
            return;
        }
        for i in 0..2 {
            let v = s.pos[i];
            if s.served & (1 << v) == 0 {
                s.gain[i] += self.rewards[v];
                s.served |= 1 << v;
            }
        }
    }

    fn infoset(&mut self, player: usize, obs: &[i16], here: usize) -> InfosetId {
        let key = (player, obs.to_vec());
        if let Some(&id) = self.infosets.get(&key) {
            return id;
        }
        let labels: Vec<String> = self.adj[here].iter().map(|v| format!("to{v}")).collect();
        let id = self.b.add_infoset(player, &labels);
        self.infosets.insert(key, id);
        id
    }

    fn driver1(&mut self, s: State) -> NodeId {
        let all = (1u32 << self.rewards.len()) - 1;
        if s.step == self.moves || s.served == all {
            return self.b.terminal(s.gain.to_vec());
        }
        let here = s.pos[0];
        let info = self.infoset(0, &s.obs[0], here);
        let children = self.adj[here].clone().into_iter().map(|v| self.driver2(s.clone(), v)).collect();
        self.b.decision(info, children)
    }

    fn driver2(&mut self, s: State, next1: usize) -> NodeId {
        let here = s.pos[1];
        let info = self.infoset(1, &s.obs[1], here);
        let mut children = Vec::new();
        for v in self.adj[here].clone() {
            let mut t = s.clone();
            t.pos = [next1, v];
            t.step += 1;
            self.arrive(&mut t);
            self.observe(&mut t);
            children.push(self.driver1(t));
        }
        self.b.decision(info, children)
    }
}

pub fn gen_ride_sharing(spec: &RideSharingSpec) -> Result<Game, RideSharingError> {
    if spec.horizon > MAX_HORIZON {
        return Err(RideSharingError::BadHorizon(spec.horizon));
    }
    let (rewards, edges) = map_data(spec.map);
    let nv = rewards.len();
    let mut adj = vec![Vec::new(); nv];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in adj.iter_mut() {
        a.sort();
        a.dedup();
    }
    let mut ctx = Ctx {
        rewards,
        adj,
        moves: spec.horizon.saturating_sub(1),
        b: GameBuilder::new(2),
        infosets: HashMap::new(),
    };
    let p = Rational::new(1, (nv * nv) as i64);
    let mut outcomes = Vec::with_capacity(nv * nv);
    for s1 in 0..nv {
        for s2 in 0..nv {
            let mut s = State {
                pos: [s1, s2],
                served: 0,
                gain: [Rational::zero(), Rational::zero()],
                obs: [Vec::new(), Vec::new()],
                step: 0,
            };
            ctx.arrive(&mut s);
            ctx.observe(&mut s);
            let child = ctx.driver1(s);
            outcomes.push((format!("{s1},{s2}"), p, child));
        }
    }
    let root = ctx.b.chance(outcomes);
    Ok(ctx.b.build(root).expect("generator builds a valid tree"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_game;

    #[test]
    fn no_moves_pays_start_vertices() {
        let g = gen_ride_sharing(&RideSharingSpec { map: RoadMap::Map1, horizon: 1 }).unwrap();
        assert_eq!(g.num_terminals(), 49);
        let (rewards, _) = map_data(RoadMap::Map1);
        for (k, a) in g.node(0).actions.iter().enumerate() {
            let (s1, s2) = (k / 7, k % 7);
            let z = &g.node(a.child).payoffs;
            if s1 == s2 {
                assert!(z.iter().all(|x| x.is_zero()));
            } else {
                assert_eq!(z[0], rewards[s1]);
                assert_eq!(z[1], rewards[s2]);
            }
        }
    }

    #[test]
    fn leaf_counts() {
        let g = gen_ride_sharing(&RideSharingSpec { map: RoadMap::Map1, horizon: 2 }).unwrap();
        assert_eq!(g.num_terminals(), 400);
        assert!(validate_game(&g).is_empty());
        let g = gen_ride_sharing(&RideSharingSpec { map: RoadMap::Map2, horizon: 2 }).unwrap();
        assert_eq!(g.num_terminals(), 484);
    }
}

#[cfg(test)]
mod calibration {
    use super::*;
    use crate::game::{compute_public_states, compute_sequences, game_parameters};

    #[test]
    fn information_complexity() {
        for (map, k) in [(RoadMap::Map1, 15), (RoadMap::Map2, 15)] {
            let g = gen_ride_sharing(&RideSharingSpec { map, horizon: 2 }).unwrap();
            let s = compute_sequences(&g).unwrap();
            let p = compute_public_states(&g, &s).unwrap();
            let params = game_parameters(&g, &s, &p);
            eprintln!("{params:?}");
            assert_eq!(params.k, k);
        }
    }

    #[test]
    fn relevant_joint_sequences() {
        for (map, n) in [(RoadMap::Map1, 613), (RoadMap::Map2, 701)] {
            let g = gen_ride_sharing(&RideSharingSpec { map, horizon: 2 }).unwrap();
            let s = compute_sequences(&g).unwrap();
            let sigma = crate::triggers::JointSequences::build(&g, &s);
            eprintln!("{map:?}: |Σ| = {} |Σ1| = {} |Σ2| = {}", sigma.len(), s.num_sequences(0), s.num_sequences(1));
            assert_eq!(sigma.len(), n);
        }
    }
}
