//! Two-player relevant sequence pairs, the von Stengel–Forges polytope V,
//! semi-randomized correlation plans and product-plan helpers.

use thiserror::Error;

use crate::game::{Game, SequenceIndex};
use crate::lp::{Backend, LinearModel, LpError, Relation, Sense, Status, Tolerances};
use crate::triggers::{Concept, JointSequences};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VsfError {
    #[error("the polytope is defined for two-player games, got {0} players")]
    NotTwoPlayer(usize),
    #[error("relevant pair ({0}, {1}) missing from the index")]
    MissingPair(usize, usize),
}

/// Relevant pairs σ1 ⋈ σ2: the joint-sequence index of a two-player game.
#[derive(Clone, Debug)]
pub struct RelevantPairs {
    sigma: JointSequences,
    marg1: Vec<usize>,
    marg2: Vec<usize>,
}

impl RelevantPairs {
    pub fn from_sigma(seqs: &SequenceIndex, sigma: JointSequences) -> Result<Self, VsfError> {
        if sigma.num_players() != 2 {
            return Err(VsfError::NotTwoPlayer(sigma.num_players()));
        }
        let find = |a: usize, b: usize| sigma.lookup(&[a as u32, b as u32]).ok_or(VsfError::MissingPair(a, b));
        let marg1 = (0..seqs.num_sequences(0)).map(|s| find(s, 0)).collect::<Result<_, _>>()?;
        let marg2 = (0..seqs.num_sequences(1)).map(|s| find(0, s)).collect::<Result<_, _>>()?;
        Ok(RelevantPairs { sigma, marg1, marg2 })
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn get(&self, k: usize) -> (usize, usize) {
        let j = self.sigma.get(k);
        (j[0] as usize, j[1] as usize)
    }

    pub fn lookup(&self, s1: usize, s2: usize) -> Option<usize> {
        self.sigma.lookup(&[s1 as u32, s2 as u32])
    }

    pub fn is_terminal(&self, concept: Concept, k: usize) -> bool {
        self.sigma.is_terminal(concept, k)
    }

    /// Index of (σ1, ∅) for every P1 sequence.
    pub fn marg1_index(&self) -> &[usize] {
        &self.marg1
    }

    /// Index of (∅, σ2) for every P2 sequence.
    pub fn marg2_index(&self) -> &[usize] {
        &self.marg2
    }

    pub fn sigma(&self) -> &JointSequences {
        &self.sigma
    }
}

pub fn relevant_pairs(game: &Game, seqs: &SequenceIndex) -> Result<RelevantPairs, VsfError> {
    if game.num_players() != 2 {
        return Err(VsfError::NotTwoPlayer(game.num_players()));
    }
    RelevantPairs::from_sigma(seqs, JointSequences::build(game, seqs))
}

/// Equality rows Ⓐ, Ⓑ, Ⓒ over relevant pairs; ζ ≥ 0 is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct VsfSystem {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
}

impl VsfSystem {
    /// Largest violation of an equality row or of nonnegativity.
    pub fn residual(&self, zeta: &[f64]) -> f64 {
        let rows = self.rows.iter().zip(&self.rhs).map(|(r, b)| {
            let lhs: f64 = r.iter().map(|&(k, a)| a * zeta[k]).sum();
            (lhs - b).abs()
        });
        let neg = zeta.iter().map(|&z| (-z).max(0.0));
        rows.chain(neg).fold(0.0, f64::max)
    }
}

pub fn vsf_system(game: &Game, seqs: &SequenceIndex, pairs: &RelevantPairs) -> Result<VsfSystem, VsfError> {
    let mut rows = vec![vec![(pairs.lookup(0, 0).ok_or(VsfError::MissingPair(0, 0))?, 1.0)]];
    let mut rhs = vec![1.0];
    for player in 0..2 {
        let other_count = seqs.num_sequences(1 - player);
        // Pair lookup with the player's sequence first.
        let at = |mine: usize, theirs: usize| {
            if player == 0 {
                pairs.lookup(mine, theirs)
            } else {
                pairs.lookup(theirs, mine)
            }
        };
        let missing = |mine: usize, theirs: usize| {
            if player == 0 {
                VsfError::MissingPair(mine, theirs)
            } else {
                VsfError::MissingPair(theirs, mine)
            }
        };
        for info in game.infosets_of(player) {
            let n = game.infoset(info).num_actions();
            let parent = seqs.parent_seq(info);
            for other in 0..other_count {
                if !(0..n).any(|a| at(seqs.seq_of(info, a), other).is_some()) {
                    continue;
                }
                let mut row = Vec::with_capacity(n + 1);
                for a in 0..n {
                    let s = seqs.seq_of(info, a);
                    row.push((at(s, other).ok_or_else(|| missing(s, other))?, 1.0));
                }
                row.push((at(parent, other).ok_or_else(|| missing(parent, other))?, -1.0));
                rows.push(row);
                rhs.push(0.0);
            }
        }
    }
    Ok(VsfSystem { rows, rhs })
}

/// Which semi-randomized set: `One` is S1, where P2's marginal ξ[∅, σ2] is
/// 0/1 (P2 pure, P1 mixed); `Two` is S2, the mirror image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }
}

/// V plus binary marginal coordinates of the chosen side; maximizes
/// `objective · ζ`. Variable k is pair k.
pub fn semi_randomized_model(pairs: &RelevantPairs, sys: &VsfSystem, side: Side, objective: &[f64]) -> LinearModel {
    let mut binary = vec![false; pairs.len()];
    let marg = match side {
        Side::One => pairs.marg2_index(),
        Side::Two => pairs.marg1_index(),
    };
    for &k in &marg[1..] {
        binary[k] = true;
    }
    let mut m = LinearModel::new(Sense::Max);
    for (k, &b) in binary.iter().enumerate() {
        let (s1, s2) = pairs.get(k);
        let name = format!("z_{s1}_{s2}");
        if b {
            m.add_binary(name);
        } else {
            m.add_var(name, 0.0, 1.0);
        }
    }
    for (i, (r, b)) in sys.rows.iter().zip(&sys.rhs).enumerate() {
        m.add_row(format!("v{i}"), r.clone(), Relation::Eq, *b);
    }
    m.objective = objective.iter().enumerate().filter(|x| *x.1 != 0.0).map(|(k, &c)| (k, c)).collect();
    m
}

/// (ξ[·, ∅], ξ[∅, ·]).
pub fn marginals(pairs: &RelevantPairs, xi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (pairs.marg1_index().iter().map(|&k| xi[k]).collect(), pairs.marg2_index().iter().map(|&k| xi[k]).collect())
}

/// ξ[σ1, σ2] = x1[σ1]·x2[σ2] on relevant pairs.
pub fn tensor(pairs: &RelevantPairs, x1: &[f64], x2: &[f64]) -> Vec<f64> {
    (0..pairs.len())
        .map(|k| {
            let (a, b) = pairs.get(k);
            x1[a] * x2[b]
        })
        .collect()
}

pub fn is_product_plan(pairs: &RelevantPairs, xi: &[f64], tol: f64) -> bool {
    let (m1, m2) = marginals(pairs, xi);
    (0..pairs.len()).all(|k| {
        let (a, b) = pairs.get(k);
        (xi[k] - m1[a] * m2[b]).abs() <= tol
    })
}

/// A correlation plan over relevant pairs with cached marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationPlan {
    pub xi: Vec<f64>,
    pub marg1: Vec<f64>,
    pub marg2: Vec<f64>,
}

impl CorrelationPlan {
    pub fn new(pairs: &RelevantPairs, xi: Vec<f64>) -> Self {
        let (marg1, marg2) = marginals(pairs, &xi);
        CorrelationPlan { xi, marg1, marg2 }
    }
}

/// Extend a plan known on Σ^c to every relevant pair by summing children:
/// ξ[σ1, σ2] = Σ_a ξ[Ia, σ2] for the first infoset I (of either player)
/// below the pair that has relevant children. On a member of V every choice
/// of I gives the same value, so the residual of the result measures how far
/// the partial plan is from V.
pub fn complete_plan(
    game: &Game,
    seqs: &SequenceIndex,
    pairs: &RelevantPairs,
    concept: Concept,
    partial: &[f64],
) -> Result<Vec<f64>, VsfError> {
    let mut below: [Vec<Vec<usize>>; 2] = [vec![Vec::new(); seqs.num_sequences(0)], vec![Vec::new(); seqs.num_sequences(1)]];
    for (player, lists) in below.iter_mut().enumerate() {
        for info in game.infosets_of(player) {
            lists[seqs.parent_seq(info)].push(info);
        }
    }
    let mut memo: Vec<Option<f64>> = vec![None; pairs.len()];
    for k in 0..pairs.len() {
        if pairs.is_terminal(concept, k) {
            memo[k] = Some(partial[k]);
        }
    }
    fn value(
        k: usize,
        game: &Game,
        seqs: &SequenceIndex,
        pairs: &RelevantPairs,
        below: &[Vec<Vec<usize>>; 2],
        memo: &mut Vec<Option<f64>>,
    ) -> Result<f64, VsfError> {
        if let Some(v) = memo[k] {
            return Ok(v);
        }
        let (s1, s2) = pairs.get(k);
        let at = |player: usize, mine: usize| if player == 0 { (mine, s2) } else { (s1, mine) };
        let mut result = 0.0;
        'search: for player in 0..2 {
            let own = if player == 0 { s1 } else { s2 };
            for &info in &below[player][own] {
                let children: Vec<(usize, usize)> =
                    (0..game.infoset(info).num_actions()).map(|a| at(player, seqs.seq_of(info, a))).collect();
                if children.iter().all(|&(a, b)| pairs.lookup(a, b).is_none()) {
                    continue;
                }
                let mut sum = 0.0;
                for (a, b) in children {
                    let c = pairs.lookup(a, b).ok_or(VsfError::MissingPair(a, b))?;
                    sum += value(c, game, seqs, pairs, below, memo)?;
                }
                result = sum;
                break 'search;
            }
        }
        memo[k] = Some(result);
        Ok(result)
    }
    (0..pairs.len()).map(|k| value(k, game, seqs, pairs, &below, &mut memo)).collect()
}

/// Completion of a partial plan by a feasibility LP over V with the Σ^c
/// entries fixed. `None` when no member of V matches the partial plan.
pub fn complete_plan_lp(
    pairs: &RelevantPairs,
    sys: &VsfSystem,
    concept: Concept,
    partial: &[f64],
    backend: &Backend,
    tol: &Tolerances,
) -> Result<Option<Vec<f64>>, LpError> {
    let mut m = LinearModel::new(Sense::Max);
    for k in 0..pairs.len() {
        if pairs.is_terminal(concept, k) {
            m.add_var(format!("z{k}"), partial[k], partial[k]);
        } else {
            m.add_var(format!("z{k}"), 0.0, 1.0);
        }
    }
    for (i, (r, b)) in sys.rows.iter().zip(&sys.rhs).enumerate() {
        m.add_row(format!("v{i}"), r.clone(), Relation::Eq, *b);
    }
    let sol = backend.solve_lp(&m, tol)?;
    Ok((sol.status == Status::Optimal).then_some(sol.primal))
}

/// Rescale a sequence-form vector top-down so every infoset's actions sum
/// exactly to their parent, with root mass `mass`. Negative entries are
/// clamped first.
pub fn polish_sequence_form(game: &Game, seqs: &SequenceIndex, player: usize, x: &mut [f64], mass: f64) {
    for v in x.iter_mut() {
        *v = v.max(0.0);
    }
    x[0] = mass;
    for info in game.infosets_of(player) {
        let parent = x[seqs.parent_seq(info)];
        let n = game.infoset(info).num_actions();
        let total: f64 = (0..n).map(|a| x[seqs.seq_of(info, a)]).sum();
        for a in 0..n {
            let s = seqs.seq_of(info, a);
            x[s] = if total > 0.0 {
                x[s] * (parent / total)
            } else if a == 0 {
                parent
            } else {
                0.0
            };
        }
    }
}

/// Sequence form of the uniform behavioral strategy of a player.
pub fn uniform_strategy(game: &Game, seqs: &SequenceIndex, player: usize) -> Vec<f64> {
    let mut x = vec![0.0; seqs.num_sequences(player)];
    x[0] = 1.0;
    for info in game.infosets_of(player) {
        let n = game.infoset(info).num_actions();
        let p = x[seqs.parent_seq(info)];
        for a in 0..n {
            x[seqs.seq_of(info, a)] = p / n as f64;
        }
    }
    x
}

/// Sequence-form rows F x = f of a player: x[∅] = 1 and one flow row per
/// infoset, as (coefficients, rhs).
pub fn sequence_form_rows(game: &Game, seqs: &SequenceIndex, player: usize) -> Vec<(Vec<(usize, f64)>, f64)> {
    let mut rows = vec![(vec![(0, 1.0)], 1.0)];
    for info in game.infosets_of(player) {
        let mut r: Vec<(usize, f64)> =
            (0..game.infoset(info).num_actions()).map(|a| (seqs.seq_of(info, a), 1.0)).collect();
        r.push((seqs.parent_seq(info), -1.0));
        rows.push((r, 0.0));
    }
    rows
}
