//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when a
//! hard criterion fails; soft criteria are reported but never fail the run.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use correq::dag::{
    build_correlation_dag, dag_constraint_system, project_plan, pure_dag_strategy, pure_plan, terminal_plans,
    DagOptions,
};
use correq::game::{compute_public_states, compute_sequences, game_parameters, make_timed, Game};
use correq::lp::Backend;
use correq::solvers::{
    brute_force_optimal, payoff_space, solve, Engine, EquilibriumProblem, EquilibriumResult, Objective, OracleCaps,
    Prepared, SolveOptions, SolverError,
};
use correq::triggers::{Concept, JointSequences};
use correq::zoo::{gen_kuhn3, gen_random_game, gen_ride_sharing, RandomGameSpec, RideSharingSpec, RoadMap};

struct Report {
    hard_failures: usize,
    /// Worst certified benefit relative to the reward range, over every plan.
    worst_benefit: f64,
    worst_vsf: f64,
    plans: usize,
    nesting_ok: bool,
    nesting_games: usize,
}

impl Report {
    fn line(&mut self, soft: bool, ok: bool, name: &str, detail: String) {
        let tag = match (ok, soft) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (soft)",
        };
        println!("{tag:<11} {name}: {detail}");
        if !ok && !soft {
            self.hard_failures += 1;
        }
    }

    fn record(&mut self, prep: &Prepared, r: &EquilibriumResult) {
        self.plans += 1;
        self.worst_benefit = self.worst_benefit.max(r.certified_benefit / prep.reward_range.max(f64::MIN_POSITIVE));
        if let Some(v) = r.vsf_residual {
            self.worst_vsf = self.worst_vsf.max(v);
        }
    }

    fn nested(&mut self, values: &[f64]) {
        self.nesting_games += 1;
        if !(values[0] >= values[1] - 1e-8 && values[1] >= values[2] - 1e-8) {
            self.nesting_ok = false;
        }
    }
}

fn ride_sharing(map: RoadMap) -> Game {
    gen_ride_sharing(&RideSharingSpec { map, horizon: 2 }).unwrap()
}

fn run(game: &Game, concept: Concept, objective: Objective, engine: Engine, opts: &SolveOptions) -> (Prepared, EquilibriumResult, Duration) {
    let p = EquilibriumProblem { game: game.clone(), concept, objective };
    let t = Instant::now();
    let prep = Prepared::new(&p).unwrap();
    let r = solve(&p, &prep, engine, opts).unwrap();
    (prep, r, t.elapsed())
}

fn ride_sharing_values(rep: &mut Report, map: RoadMap, name: &str, want: [f64; 3], limit: Duration) {
    let game = ride_sharing(map);
    let opts = SolveOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut by_engine = [Vec::new(), Vec::new()];
    for (c, concept) in Concept::ALL.into_iter().enumerate() {
        for (e, engine) in [Engine::Dag, Engine::Colgen].into_iter().enumerate() {
            let (prep, r, dt) = run(&game, concept, Objective::SocialWelfare, engine, &opts);
            rep.record(&prep, &r);
            by_engine[e].push(r.value);
            let good = (r.value - want[c]).abs() <= 1e-3 && dt <= limit;
            ok &= good;
            parts.push(format!("{concept}/{engine} {:.4} ({:.1}s)", r.value, dt.as_secs_f64()));
        }
    }
    for values in &by_engine {
        rep.nested(values);
    }
    rep.line(
        false,
        ok,
        &format!("{name} social welfare, both engines, tol 1e-3, <= {}s each", limit.as_secs()),
        format!("want {want:?}; {}", parts.join(", ")),
    );
}

fn structure(rep: &mut Report) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (map, name, want) in [(RoadMap::Map1, "2RS12", (400, 613, 15)), (RoadMap::Map2, "2RS22", (484, 701, 15))] {
        let game = make_timed(&ride_sharing(map)).unwrap().game;
        let seqs = compute_sequences(&game).unwrap();
        let part = compute_public_states(&game, &seqs).unwrap();
        let sigma = JointSequences::build(&game, &seqs);
        let k = game_parameters(&game, &seqs, &part).k;
        let got = (game.num_terminals(), sigma.len(), k);
        ok &= got == want;
        parts.push(format!("{name} |Z|,|Σ|,k = {got:?} want {want:?}"));
    }
    rep.line(false, ok, "structural calibration (exact)", parts.join("; "));
}

fn dag_sizes(rep: &mut Report) {
    let game = make_timed(&ride_sharing(RoadMap::Map1)).unwrap().game;
    let seqs = compute_sequences(&game).unwrap();
    let part = compute_public_states(&game, &seqs).unwrap();
    let sigma = JointSequences::build(&game, &seqs);
    let mut ok = true;
    let mut parts = Vec::new();
    for (concept, want) in Concept::ALL.into_iter().zip([10_366usize, 10_366, 8_846]) {
        let dag = build_correlation_dag(&game, &seqs, &part, &sigma, concept, &DagOptions::default()).unwrap();
        let got = dag.stats().edges;
        let rel = (got as f64 - want as f64).abs() / want as f64;
        ok &= rel <= 0.05;
        parts.push(format!("{concept} {got} vs {want} ({:+.2}%)", 100.0 * (got as f64 / want as f64 - 1.0)));
    }
    rep.line(false, ok, "2RS12 DAG edges within 5%", parts.join(", "));
}

fn oracle_suite(rep: &mut Report) {
    let opts = SolveOptions { backend: Backend::Reference, ..SolveOptions::default() };
    let t = Instant::now();
    let mut checked = [0usize; 3];
    let mut colgen_checked = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut seed = 0u64;
    while checked.iter().any(|&c| c < 60) && seed < 400 {
        let players = 2 + (seed % 2) as usize;
        let depth = 3 + (seed / 2 % 2) as usize;
        let game = gen_random_game(&RandomGameSpec { depth, ..RandomGameSpec::tiny(seed, players) }).unwrap();
        seed += 1;
        if game.num_terminals() > 25 {
            continue;
        }
        let objective = match seed % 3 {
            0 => Objective::SocialWelfare,
            1 => Objective::Player(0),
            _ => Objective::Weights([1.0, -2.0, 0.5][..players].to_vec()),
        };
        let mut values = Vec::new();
        for (c, concept) in Concept::ALL.into_iter().enumerate() {
            let want = match brute_force_optimal(&game, concept, &objective, &OracleCaps::default(), &opts.backend) {
                Ok(v) => v,
                Err(SolverError::CapsExceeded(_)) => continue,
                Err(e) => panic!("oracle failed on seed {}: {e}", seed - 1),
            };
            checked[c] += 1;
            let engines: &[Engine] = if players == 2 { &[Engine::Dag, Engine::Colgen] } else { &[Engine::Dag] };
            for &engine in engines {
                let (prep, r, _) = run(&game, concept, objective.clone(), engine, &opts);
                rep.record(&prep, &r);
                let delta = (r.value - want).abs() / (1.0 + want.abs());
                worst = worst.max(delta);
                if delta > 1e-6 {
                    failures.push(format!("seed {} {concept}/{engine}: {} vs {want}", seed - 1, r.value));
                }
                if engine == Engine::Colgen {
                    colgen_checked += 1;
                } else {
                    values.push(r.value);
                }
            }
        }
        if values.len() == 3 {
            rep.nested(&values);
        }
    }
    let dt = t.elapsed();
    let ok = failures.is_empty() && checked.iter().all(|&c| c >= 50) && dt <= Duration::from_secs(600);
    rep.line(
        false,
        ok,
        "oracle equivalence on random tiny games, rel 1e-6, <= 600s",
        format!(
            "games per concept {checked:?}, colgen checks {colgen_checked}, worst rel delta {worst:.2e}, {:.1}s{}",
            dt.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    );
}

/// All pure profiles (one action per infoset), or None past `cap`.
fn profiles(game: &Game, cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for i in game.infosets() {
        let m = i.num_actions();
        if out.len() * m > cap {
            return None;
        }
        out = out.into_iter().flat_map(|p| (0..m).map(move |a| [p.clone(), vec![a]].concat())).collect();
    }
    Some(out)
}

fn projection_check(rep: &mut Report) {
    let mut games = [0usize; 3];
    let mut bad = Vec::new();
    let mut seed = 0;
    while games.iter().any(|&g| g < 25) && seed < 200 {
        let game = gen_random_game(&RandomGameSpec::tiny(seed, 2 + seed as usize % 2)).unwrap();
        seed += 1;
        let game = make_timed(&game).unwrap().game;
        let Some(ps) = profiles(&game, 4096) else { continue };
        let seqs = compute_sequences(&game).unwrap();
        let part = compute_public_states(&game, &seqs).unwrap();
        let sigma = JointSequences::build(&game, &seqs);
        for (c, concept) in Concept::ALL.into_iter().enumerate() {
            let dag = build_correlation_dag(&game, &seqs, &part, &sigma, concept, &DagOptions::default()).unwrap();
            let sys = dag_constraint_system(&dag);
            let Some(vertices) = terminal_plans(&dag, 100_000) else { continue };
            let mut projected = BTreeSet::new();
            let mut direct = BTreeSet::new();
            for p in &ps {
                let reach = pure_dag_strategy(&game, &dag, p);
                let mu: Vec<f64> = sys.vars.iter().map(|&v| reach[v]).collect();
                let xi = project_plan(&sys, &mu, sigma.len()).unwrap();
                let want = pure_plan(&seqs, &sigma, concept, p);
                if xi.iter().zip(&want).any(|(a, b)| (a - b).abs() > 1e-9) {
                    bad.push(format!("seed {} {concept}: projection differs", seed - 1));
                }
                projected.insert((0..xi.len()).filter(|&k| (xi[k] - 1.0).abs() <= 1e-9).collect::<Vec<_>>());
                direct.insert((0..want.len()).filter(|&k| want[k] == 1.0).collect::<Vec<_>>());
            }
            if vertices != direct || projected != direct {
                bad.push(format!("seed {} {concept}: vertex sets differ", seed - 1));
            }
            games[c] += 1;
        }
    }
    bad.dedup();
    let ok = bad.is_empty() && games.iter().all(|&g| g >= 20);
    rep.line(
        false,
        ok,
        "DAG vertex projections equal the pure-profile plans (tol 1e-9)",
        format!("games per concept {games:?}{}", if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }),
    );
}

fn hull_nesting(rep: &mut Report) {
    let opts = SolveOptions { backend: Backend::Reference, ..SolveOptions::default() };
    let mut bad = Vec::new();
    let mut games = 0;
    for seed in 0..12 {
        let players = 2 + seed as usize % 2;
        let game = gen_random_game(&RandomGameSpec::tiny(seed, players)).unwrap();
        let mut support = Vec::new();
        for concept in Concept::ALL {
            let problem = EquilibriumProblem { game: game.clone(), concept, objective: Objective::SocialWelfare };
            let prep = Prepared::new(&problem).unwrap();
            let points = payoff_space(&problem, &prep, 8, Engine::Dag, &opts, 1).unwrap();
            // Support value of the hull along each direction.
            support.push(
                points
                    .iter()
                    .map(|p| p.theta.cos() * p.utilities[0] + p.theta.sin() * p.utilities[1])
                    .collect::<Vec<_>>(),
            );
        }
        for k in 0..support[0].len() {
            let s = [support[0][k], support[1][k], support[2][k]];
            if !(s[0] >= s[1] - 1e-8 && s[1] >= s[2] - 1e-8) {
                bad.push(format!("seed {seed} direction {k}: {s:?}"));
            }
        }
        games += 1;
    }
    let ok = rep.nesting_ok && bad.is_empty();
    rep.line(
        false,
        ok,
        "concept nesting NFCCE >= EFCCE >= EFCE - 1e-8 (values and payoff hulls)",
        format!(
            "{} solved games nested in value{}; {games} games x 8 directions for hulls{}",
            rep.nesting_games,
            if rep.nesting_ok { "" } else { " (VIOLATED)" },
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
        ),
    );
}

fn kuhn(rep: &mut Report) {
    let game = gen_kuhn3(4).unwrap();
    let want = [-0.018, -0.007, 0.064];
    let t = Instant::now();
    let results: Vec<(Prepared, EquilibriumResult)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..3)
            .map(|i| {
                let game = &game;
                s.spawn(move || {
                    let (prep, r, _) = run(game, Concept::Nfcce, Objective::Player(i), Engine::Dag, &SolveOptions::default());
                    (prep, r)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let got: Vec<f64> = results.iter().map(|(_, r)| r.value).collect();
    for (prep, r) in &results {
        rep.record(prep, r);
    }
    let ok = got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 2e-3);
    rep.line(
        true,
        ok,
        "3-player Kuhn r=4 NFCCE per-player optima, DAG engine, tol 2e-3",
        format!("got [{:.6}, {:.6}, {:.6}] want {want:?} ({:.0}s)", got[0], got[1], got[2], t.elapsed().as_secs_f64()),
    );
}

fn main() -> ExitCode {
    let mut rep = Report {
        hard_failures: 0,
        worst_benefit: 0.0,
        worst_vsf: 0.0,
        plans: 0,
        nesting_ok: true,
        nesting_games: 0,
    };
    println!("backend for ride-sharing and Kuhn: {:?}", SolveOptions::default().backend);
    ride_sharing_values(&mut rep, RoadMap::Map1, "2RS12 = 6.010", [6.010; 3], Duration::from_secs(120));
    ride_sharing_values(&mut rep, RoadMap::Map2, "2RS22 = 7.188/7.176/7.176", [7.188, 7.176, 7.176], Duration::from_secs(300));
    structure(&mut rep);
    dag_sizes(&mut rep);
    oracle_suite(&mut rep);
    projection_check(&mut rep);
    kuhn(&mut rep);
    hull_nesting(&mut rep);
    let ok = rep.worst_benefit <= 1e-6 && rep.worst_vsf <= 1e-8;
    rep.line(
        false,
        ok,
        "certification: benefit <= 1e-6 x range, VSF residual <= 1e-8",
        format!("{} plans, worst benefit/range {:.2e}, worst VSF residual {:.2e}", rep.plans, rep.worst_benefit, rep.worst_vsf),
    );
    if rep.hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} hard criteria failed", rep.hard_failures);
        ExitCode::FAILURE
    }
}
