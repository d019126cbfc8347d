//! JSON game files.
//!
//! ```json
//! { "players": 2, "root": 0,
//!   "nodes": [ { "id": 0, "kind": "chance", "actions": [ {"label": "x", "child": 1, "prob": "1/2"}, ... ] },
//!              { "id": 1, "kind": "player", "player": 1, "infoset": 0, "actions": [ ... ] },
//!              { "id": 2, "kind": "terminal", "actions": [], "payoffs": ["3/2", "-1/1"] } ] }
//! ```
//!
//! Players are numbered from 1 in files. Rationals are `"p/q"` strings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Action, Game, GameError, Owner, RawNode, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{path} (line {line}, column {column}): {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Structure(#[from] GameError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: usize,
    nodes: Vec<NodeFile>,
    root: usize,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Chance,
    Player,
    Terminal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    id: usize,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    player: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    infoset: Option<usize>,
    #[serde(default)]
    actions: Vec<ActionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payoffs: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionFile {
    label: String,
    child: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prob: Option<String>,
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"`, an integer, or a finite decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        return (q != 0).then(|| Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
        let den = 10i64.checked_pow(frac.len() as u32)?;
        let f: i64 = frac.parse().ok()?;
        let num = whole.abs().checked_mul(den)?.checked_add(f)?;
        return Some(Rational::new(if neg { -num } else { num }, den));
    }
    s.parse::<i64>().ok().map(Rational::from_integer)
}

pub fn load_game(bytes: &[u8]) -> Result<Game, ParseError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let file: GameFile = serde_path_to_error::deserialize(de).map_err(|e| ParseError::Syntax {
        path: e.path().to_string(),
        line: e.inner().line(),
        column: e.inner().column(),
        message: e.inner().to_string(),
    })?;
    let field = |i: usize, f: &str, message: String| ParseError::Field { field: format!("nodes[{i}].{f}"), message };

    let mut index: HashMap<usize, usize> = HashMap::new();
    for (i, n) in file.nodes.iter().enumerate() {
        if index.insert(n.id, i).is_some() {
            return Err(field(i, "id", format!("duplicate node id {}", n.id)));
        }
    }
    let root = *index.get(&file.root).ok_or(ParseError::Field {
        field: "root".into(),
        message: format!("unknown node id {}", file.root),
    })?;

    let mut raw = Vec::with_capacity(file.nodes.len());
    for (i, n) in file.nodes.iter().enumerate() {
        let owner = match n.kind {
            Kind::Chance => Owner::Chance,
            Kind::Terminal => Owner::Terminal,
            Kind::Player => {
                let p = n.player.ok_or_else(|| field(i, "player", "missing".into()))?;
                if p == 0 || p > file.players {
                    return Err(field(i, "player", format!("{p} is outside 1..={}", file.players)));
                }
                Owner::Player(p - 1)
            }
        };
        if n.kind == Kind::Player && n.infoset.is_none() {
            return Err(field(i, "infoset", "missing".into()));
        }
        let mut actions = Vec::with_capacity(n.actions.len());
        for (k, a) in n.actions.iter().enumerate() {
            let child = *index
                .get(&a.child)
                .ok_or_else(|| field(i, &format!("actions[{k}].child"), format!("unknown node id {}", a.child)))?;
            let prob = match &a.prob {
                Some(s) => Some(
                    parse_rational(s)
                        .ok_or_else(|| field(i, &format!("actions[{k}].prob"), format!("bad rational {s:?}")))?,
                ),
                None => None,
            };
            actions.push(Action { label: a.label.clone(), child, prob });
        }
        let mut payoffs = Vec::new();
        for (k, s) in n.payoffs.iter().flatten().enumerate() {
            payoffs.push(
                parse_rational(s).ok_or_else(|| field(i, &format!("payoffs[{k}]"), format!("bad rational {s:?}")))?,
            );
        }
        raw.push(RawNode { owner, infoset: n.infoset, actions, payoffs });
    }
    Ok(Game::from_raw(file.players, raw, root)?)
}

pub fn save_game(game: &Game) -> Vec<u8> {
    let nodes = game
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, n)| NodeFile {
            id,
            kind: match n.owner {
                Owner::Chance => Kind::Chance,
                Owner::Player(_) => Kind::Player,
                Owner::Terminal => Kind::Terminal,
            },
            player: n.player().map(|p| p + 1),
            infoset: n.infoset,
            actions: n
                .actions
                .iter()
                .map(|a| ActionFile { label: a.label.clone(), child: a.child, prob: a.prob.as_ref().map(format_rational) })
                .collect(),
            payoffs: n.is_terminal().then(|| n.payoffs.iter().map(format_rational).collect()),
        })
        .collect();
    let file = GameFile { players: game.num_players(), nodes, root: game.root() };
    let mut out = serde_json::to_vec(&file).expect("game serializes");
    out.push(b'\n');
    out
}
