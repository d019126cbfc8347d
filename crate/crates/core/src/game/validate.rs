use num_traits::{One, Zero};
use serde::Serialize;

use super::{Game, InfosetId, NodeId, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiagnosticKind {
    ProbabilitySum,
    NegativeProbability,
    InfosetActionMismatch,
    PerfectRecall,
    NotTimed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub node: Option<NodeId>,
    pub infoset: Option<InfosetId>,
    pub message: String,
}

/// Semantic checks. An empty result means the game is well formed; a
/// `NotTimed` warning only matters for public-state based code.
pub fn validate_game(game: &Game) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (h, node) in game.nodes().iter().enumerate() {
        if !node.is_chance() {
            continue;
        }
        let mut sum = Rational::zero();
        for a in &node.actions {
            let p = a.prob.unwrap_or_else(Rational::zero);
            if p < Rational::zero() {
                out.push(Diagnostic {
                    severity: Severity::Error,
                    kind: DiagnosticKind::NegativeProbability,
                    node: Some(h),
                    infoset: None,
                    message: format!("chance node {h}: negative probability {p}"),
                });
            }
            sum += p;
        }
        if !sum.is_one() {
            out.push(Diagnostic {
                severity: Severity::Error,
                kind: DiagnosticKind::ProbabilitySum,
                node: Some(h),
                infoset: None,
                message: format!("chance node {h}: probabilities sum to {sum}"),
            });
        }
    }

    let seq_at = own_sequences(game);
    for (id, info) in game.infosets().iter().enumerate() {
        for &h in &info.nodes {
            let labels: Vec<&str> = game.node(h).actions.iter().map(|a| a.label.as_str()).collect();
            if labels != info.labels.iter().map(String::as_str).collect::<Vec<_>>() {
                out.push(Diagnostic {
                    severity: Severity::Error,
                    kind: DiagnosticKind::InfosetActionMismatch,
                    node: Some(h),
                    infoset: Some(id),
                    message: format!("node {h}: actions differ from those of infoset {id}"),
                });
            }
        }
        let first = &seq_at[info.nodes[0]];
        if info.nodes.iter().any(|&h| &seq_at[h] != first) {
            out.push(Diagnostic {
                severity: Severity::Error,
                kind: DiagnosticKind::PerfectRecall,
                node: None,
                infoset: Some(id),
                message: format!("infoset {id}: members reached by different own action histories"),
            });
        }
        let d = game.node(info.nodes[0]).depth;
        if info.nodes.iter().any(|&h| game.node(h).depth != d) {
            out.push(Diagnostic {
                severity: Severity::Warning,
                kind: DiagnosticKind::NotTimed,
                node: None,
                infoset: Some(id),
                message: format!("infoset {id} spans several layers"),
            });
        }
    }
    out
}

/// The owner's last own (infoset, action) pair at each player node. Unlike
/// `compute_sequences`, this never fails, so every breach is reported.
fn own_sequences(game: &Game) -> Vec<Option<(InfosetId, usize)>> {
    let n = game.num_players();
    let mut last: Vec<Option<(InfosetId, usize)>> = vec![None; game.num_nodes() * n];
    let mut out = vec![None; game.num_nodes()];
    for h in 0..game.num_nodes() {
        let node = game.node(h);
        if let Some(p) = node.player() {
            out[h] = last[h * n + p];
        }
        for (a, act) in node.actions.iter().enumerate() {
            let c = act.child;
            for i in 0..n {
                last[c * n + i] = last[h * n + i];
            }
            if let (Some(p), Some(info)) = (node.player(), node.infoset) {
                last[c * n + p] = Some((info, a));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::letters;
    use super::super::{Action, GameBuilder, Owner, RawNode};
    use super::*;

    #[test]
    fn single_terminal_is_clean() {
        let mut b = GameBuilder::new(1);
        let z = b.terminal(vec![Rational::from_integer(3)]);
        assert!(validate_game(&b.build(z).unwrap()).is_empty());
        assert!(validate_game(&letters().0).is_empty());
    }

    #[test]
    fn bad_probability_sum() {
        let mut b = GameBuilder::new(1);
        let x = b.terminal(vec![Rational::zero()]);
        let y = b.terminal(vec![Rational::zero()]);
        let r = b.chance(vec![("x", Rational::new(1, 2), x), ("y", Rational::new(2, 5), y)]);
        let d = validate_game(&b.build(r).unwrap());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::ProbabilitySum);
    }

    #[test]
    fn perfect_recall_breach() {
        // Player 0 moves, then reaches a shared infoset from both of its actions.
        let z = |_: ()| RawNode {
            owner: Owner::Terminal,
            infoset: None,
            actions: vec![],
            payoffs: vec![Rational::zero()],
        };
        let dec = |key, c0, c1| RawNode {
            owner: Owner::Player(0),
            infoset: Some(key),
            actions: vec![
                Action { label: "l".into(), child: c0, prob: None },
                Action { label: "r".into(), child: c1, prob: None },
            ],
            payoffs: vec![],
        };
        let raw = vec![dec(0, 1, 2), dec(1, 3, 4), dec(1, 5, 6), z(()), z(()), z(()), z(())];
        let g = Game::from_raw(1, raw, 0).unwrap();
        let d = validate_game(&g);
        assert!(d.iter().any(|x| x.kind == DiagnosticKind::PerfectRecall));
    }
}
