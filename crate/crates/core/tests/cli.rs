use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use correq::game::save_game;
use correq::lp::{solve_lp_reference, Backend, LinearModel, Relation, Sense, Status, Tolerances};
use correq::zoo::{gen_random_game, RandomGameSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_correq");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("CORREQ_MANIFEST").env_remove("CORREQ_LP_SOLVER").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write_game(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Simultaneous 2x2 game with u1(a, b) = u2(b, a).
const SYMMETRIC: &str = r#"{"players": 2, "root": 0, "nodes": [
  {"id": 0, "kind": "player", "player": 1, "infoset": 0, "actions": [{"label": "d", "child": 1}, {"label": "h", "child": 4}]},
  {"id": 1, "kind": "player", "player": 2, "infoset": 1, "actions": [{"label": "d", "child": 2}, {"label": "h", "child": 3}]},
  {"id": 2, "kind": "terminal", "payoffs": ["4", "4"]},
  {"id": 3, "kind": "terminal", "payoffs": ["1", "5"]},
  {"id": 4, "kind": "player", "player": 2, "infoset": 1, "actions": [{"label": "d", "child": 5}, {"label": "h", "child": 6}]},
  {"id": 5, "kind": "terminal", "payoffs": ["5", "1"]},
  {"id": 6, "kind": "terminal", "payoffs": ["0", "0"]}]}"#;

const ONE_LEAF: &str = r#"{"players": 2, "root": 0, "nodes": [{"id": 0, "kind": "terminal", "payoffs": ["3/2", "-1"]}]}"#;

#[test]
fn stats_of_ride_sharing_and_kuhn() {
    let v = json(&run(&["stats", "--game", "2RS12", "--json"]));
    assert_eq!(v["terminals"], 400);
    assert_eq!(v["relevant_sequences"], 613);
    assert_eq!(v["k"], 15);
    assert_eq!(v["triggers"]["nfcce"], 2);
    let v = json(&run(&["stats", "--game", "3K4", "--json"]));
    assert_eq!(v["terminals"], 312);
    let text = stdout(&run(&["stats", "--game", "2RS22"]));
    assert!(text.contains("|Σ|         701"), "{text}");
}

#[test]
fn load_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_game(dir.path(), "bad.json", "{\"players\": 2, \"nodes\": [");
    for game in ["", "no-such-game", &bad] {
        assert_eq!(run(&["stats", "--game", game]).status.code(), Some(2), "{game:?}");
    }
    let manifest = write_game(dir.path(), "m.json", "{\"games\": 3}");
    assert_eq!(run(&["stats", "--game", "2RS12", "--manifest", &manifest]).status.code(), Some(2));
}

#[test]
fn custom_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let m = r#"{"games": {"tiny-kuhn": {"kind": "kuhn3", "ranks": 3}}}"#;
    let manifest = write_game(dir.path(), "m.json", m);
    let v = json(&run(&["stats", "--game", "tiny-kuhn", "--manifest", &manifest, "--json"]));
    assert_eq!(v["terminals"], 78);
    let o = Command::new(BIN).args(["stats", "--game", "tiny-kuhn", "--json"]).env("CORREQ_MANIFEST", &manifest).output();
    assert!(o.unwrap().status.success());
}

#[test]
fn solve_ride_sharing_efce() {
    let v = json(&run(&["solve", "--game", "2RS12", "--concept", "efce", "--engine", "dag", "--objective", "sw", "--json"]));
    assert!((v["value"].as_f64().unwrap() - 6.010).abs() < 1e-3, "{v}");
    assert!(v["certified_benefit"].as_f64().unwrap() <= 1e-6);
    let text = stdout(&run(&["solve", "--game", "2RS12", "--concept", "nfcce", "--engine", "colgen"]));
    assert!(text.starts_with("nfcce colgen value 6.01"), "{text}");
}

#[test]
fn one_player_objective_is_below_welfare() {
    let base = ["solve", "--game", "2RS22", "--concept", "nfcce", "--engine", "dag", "--json", "--objective"];
    let sw = json(&run(&[&base[..], &["sw"]].concat()))["value"].as_f64().unwrap();
    let p1 = json(&run(&[&base[..], &["player:1"]].concat()))["value"].as_f64().unwrap();
    assert!(p1 <= sw + 1e-9, "{p1} > {sw}");
    assert_eq!(run(&[&base[..], &["player:3"]].concat()).status.code(), Some(2));
}

#[test]
fn result_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        let o = run(&["solve", "--game", "2RS12", "--concept", "efcce", "--engine", "colgen", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        texts.push(std::fs::read(out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let v: serde_json::Value = serde_json::from_slice(&texts[0]).unwrap();
    assert!(v["plan"].as_array().unwrap().len() > 1);
}

#[test]
fn budgets_exit_3() {
    let o = run(&["solve", "--game", "2RS12", "--engine", "dag", "--edge-budget", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["solve", "--game", "2RS12", "--concept", "efce", "--engine", "colgen", "--time-budget", "0"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn custom_objective_file() {
    let dir = tempfile::tempdir().unwrap();
    let game = write_game(dir.path(), "g.json", SYMMETRIC);
    // Reward only the (d, d) outcome.
    let obj = write_game(dir.path(), "o.json", r#"{"2": 1.0}"#);
    let v = json(&run(&["solve", "--game", &game, "--concept", "efce", "--engine", "dag", "--objective", &obj, "--json"]));
    let value = v["value"].as_f64().unwrap();
    assert!(value > 0.0 && value <= 1.0, "{value}");
    let bad = write_game(dir.path(), "bad.json", r#"{"1": 1.0}"#);
    assert_eq!(run(&["solve", "--game", &game, "--objective", &bad]).status.code(), Some(2));
}

fn read_csv(text: &str) -> (Vec<String>, Vec<(f64, Vec<f64>, String)>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let (last, nums) = f.split_last().unwrap();
            let nums: Vec<f64> = nums.iter().map(|x| x.parse().unwrap()).collect();
            (nums[0], nums[1..].to_vec(), last.to_string())
        })
        .collect();
    (header, rows)
}

#[test]
fn payoff_space_is_symmetric_on_a_symmetric_game() {
    let dir = tempfile::tempdir().unwrap();
    let game = write_game(dir.path(), "g.json", SYMMETRIC);
    let o = run(&["payoff-space", "--game", &game, "--directions", "4", "--engine", "dag", "--threads", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&stdout(&o));
    assert_eq!(header, ["theta", "u1", "u2", "concept"]);
    assert_eq!(rows.len(), 12);
    for c in ["nfcce", "efcce", "efce"] {
        let pts: Vec<&Vec<f64>> = rows.iter().filter(|r| r.2 == c).map(|r| &r.1).collect();
        // Directions 0..4 are +u1, +u2, -u1, -u2.
        assert!((pts[0][0] - pts[1][1]).abs() < 1e-7, "{c}: {pts:?}");
        assert!((pts[2][0] - pts[3][1]).abs() < 1e-7, "{c}: {pts:?}");
    }
}

#[test]
fn payoff_space_hulls_nest() {
    let dir = tempfile::tempdir().unwrap();
    let spec = RandomGameSpec { depth: 4, ..RandomGameSpec::tiny(3, 2) };
    let text = String::from_utf8(save_game(&gen_random_game(&spec).unwrap())).unwrap();
    let game = write_game(dir.path(), "g.json", &text);
    let o = run(&["payoff-space", "--game", &game, "--directions", "8", "--engine", "dag"]);
    let (_, rows) = read_csv(&stdout(&o));
    let mut support: BTreeMap<(u64, String), f64> = BTreeMap::new();
    for (theta, u, c) in &rows {
        support.insert((theta.to_bits(), c.clone()), theta.cos() * u[0] + theta.sin() * u[1]);
    }
    for (theta, _, _) in rows.iter().filter(|r| r.2 == "nfcce") {
        let s = |c: &str| support[&(theta.to_bits(), c.to_string())];
        assert!(s("nfcce") >= s("efcce") - 1e-8 && s("efcce") >= s("efce") - 1e-8, "theta {theta}");
    }
    let o = run(&["payoff-space", "--game", &game, "--directions", "1", "--concepts", "efce"]);
    assert_eq!(read_csv(&stdout(&o)).1.len(), 1);
}

#[test]
fn oracle_suite_passes_and_fault_is_caught() {
    let o = run(&["oracle", "--count", "6", "--players", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).matches(" ok").count(), 3);
    let o = run(&["oracle", "--count", "6", "--players", "3", "--seed", "40"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["oracle", "--count", "6", "--players", "2", "--flip-incentive-sign"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn one_terminal_game() {
    let dir = tempfile::tempdir().unwrap();
    let game = write_game(dir.path(), "g.json", ONE_LEAF);
    let v = json(&run(&["oracle", "--game", &game, "--json"]));
    for row in v.as_array().unwrap() {
        assert_eq!(row["oracle"], 0.5);
        assert_eq!(row["delta"], 0.0);
    }
    for c in ["nfcce", "efcce", "efce"] {
        let v = json(&run(&["solve", "--game", &game, "--concept", c, "--engine", "dag", "--json"]));
        assert_eq!(v["value"], 0.5);
    }
}

#[test]
fn dag_command_reports_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dag.jsonl");
    let o = run(&["dag", "--game", "2RS12", "--concept", "efce", "--json", "--out", out.to_str().unwrap()]);
    let v = json(&o);
    let edges = v["edges"].as_u64().unwrap();
    assert!(edges > 0);
    let lines = std::fs::read_to_string(out).unwrap();
    assert_eq!(lines.lines().count() as u64, v["nodes"].as_u64().unwrap());
}

#[test]
fn generate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    assert!(run(&["generate", "--game", "3K3", "--out", out.to_str().unwrap()]).status.success());
    let v = json(&run(&["stats", "--game", out.to_str().unwrap(), "--json"]));
    assert_eq!(v["terminals"], 78);
}

/// Random bounded LP; the first row may be an equality.
fn random_lp(seed: u64) -> LinearModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=4);
    let mut lp = LinearModel::new(if rng.gen_bool(0.5) { Sense::Max } else { Sense::Min });
    for j in 0..n {
        let lo = rng.gen_range(-3..=0) as f64;
        lp.add_var(format!("x{j}"), lo, lo + rng.gen_range(1..=5) as f64);
    }
    for i in 0..m {
        let coeffs = (0..n).map(|j| (j, rng.gen_range(-3..=3) as f64)).collect();
        let rel = [Relation::Le, Relation::Ge, Relation::Eq][rng.gen_range(0..if i == 0 { 3 } else { 2 })];
        lp.add_row(format!("r{i}"), coeffs, rel, rng.gen_range(-4..=4) as f64);
    }
    lp.objective = (0..n).map(|j| (j, rng.gen_range(-5..=5) as f64)).collect();
    lp
}

#[test]
fn external_solver_round_trip_matches_reference() {
    let template = format!("{BIN} lp-solve --model_file {{model}} --solution_file {{solution}} --backend reference");
    let external = Backend::External(template);
    let tol = Tolerances::default();
    let mut optimal = 0;
    for seed in 0..20 {
        let lp = random_lp(seed);
        let want = solve_lp_reference(&lp, &tol).unwrap();
        let got = external.solve_lp(&lp, &tol).unwrap();
        assert_eq!(got.status, want.status, "seed {seed}");
        if want.status == Status::Optimal {
            optimal += 1;
            assert!((got.objective - want.objective).abs() < 1e-7, "seed {seed}");
            for (a, b) in got.primal.iter().zip(&want.primal) {
                assert!((a - b).abs() < 1e-7, "seed {seed}");
            }
        }
    }
    assert!(optimal >= 5);
}
