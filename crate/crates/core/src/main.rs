//! `correq` command-line frontend.
//!
//! Exit codes: 0 ok, 1 other errors, 2 load failure, 3 budget exceeded,
//! 4 certification failure, 5 oracle mismatch.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use correq::dag::{build_correlation_dag, DagOptions};
use correq::game::{compute_public_states, compute_sequences, game_parameters, load_game, make_timed, save_game, Game};
use correq::lp::{read_model, write_solution, Backend, MipOptions, Tolerances};
use correq::solvers::{
    brute_force_optimal, payoff_space, solve, Engine, EquilibriumProblem, EquilibriumResult, Objective, OracleCaps,
    Prepared, SolveOptions, SolverError,
};
use correq::triggers::{enumerate_triggers, Concept, JointSequences};
use correq::zoo::{default_manifest, gen_random_game, load_manifest, Manifest, RandomGameSpec};

const EXIT_OTHER: u8 = 1;
const EXIT_LOAD: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_CERTIFY: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

/// Manifest path used when `--manifest` is absent.
const MANIFEST_ENV: &str = "CORREQ_MANIFEST";

#[derive(Parser)]
#[command(name = "correq", version, about = "Optimal correlated equilibria in extensive-form games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size and structure statistics of a game.
    Stats(StatsArgs),
    /// Write a game as JSON.
    Generate(GenerateArgs),
    /// Build the correlation DAG of a game and report its size.
    Dag(DagArgs),
    /// Solve for an optimal equilibrium.
    Solve(SolveArgs),
    /// Support points of the equilibrium payoff set.
    PayoffSpace(PayoffArgs),
    /// Compare the engines with brute force on small games.
    Oracle(OracleArgs),
    /// Solve an LP file and write a solution file (usable as an external solver).
    LpSolve(LpSolveArgs),
}

#[derive(Args)]
struct GameArgs {
    /// Manifest name (e.g. 2RS12) or path to a game JSON file.
    #[arg(long)]
    game: String,
    /// Benchmark manifest; defaults to $CORREQ_MANIFEST, then the built-in list.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "nfcce")]
    concept: Concept,
    #[arg(long, default_value = "auto")]
    engine: Engine,
    /// sw, player:<i> (1-based), weights:<w1,w2,..>, or a JSON file.
    #[arg(long, default_value = "sw")]
    objective: String,
    /// LP feasibility and optimality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    edge_budget: Option<usize>,
    /// Seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    mip_node_limit: Option<usize>,
    /// LP backend: reference, highs or external (defaults to $CORREQ_LP_SOLVER).
    #[arg(long)]
    backend: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DagArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long, default_value = "nfcce")]
    concept: Concept,
    #[arg(long)]
    edge_budget: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Dump the DAG as JSON lines.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Print the result JSON instead of the summary line.
    #[arg(long)]
    json: bool,
    /// Write the result JSON (with the plan) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PayoffArgs {
    #[command(flatten)]
    game: GameArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Concepts to sweep; all three when omitted.
    #[arg(long = "concepts", value_delimiter = ',')]
    concepts: Vec<Concept>,
    #[arg(long, default_value_t = 16)]
    directions: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// A single game; without it a seeded suite of random games is run.
    #[arg(long)]
    game: Option<String>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Number of random games in the suite.
    #[arg(long, default_value_t = 20)]
    count: u64,
    #[arg(long, default_value_t = 2)]
    players: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "sw")]
    objective: String,
    /// Allowed |engine − brute force|.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    json: bool,
    /// Test hook: negate every incentive row before solving.
    #[arg(long, hide = true)]
    flip_incentive_sign: bool,
}

#[derive(Args)]
struct LpSolveArgs {
    #[arg(long = "model_file")]
    model_file: PathBuf,
    #[arg(long = "solution_file")]
    solution_file: PathBuf,
    #[arg(long, default_value = "reference")]
    backend: String,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure { code, message: message.to_string() }
    }

    fn load(message: impl ToString) -> Self {
        Failure::new(EXIT_LOAD, message)
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        let code = match &e {
            SolverError::Budget { .. } | SolverError::Dag(correq::dag::DagError::Budget(_)) => EXIT_BUDGET,
            SolverError::Certification { .. } => EXIT_CERTIFY,
            _ => EXIT_OTHER,
        };
        Failure::new(code, e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Dag(a) => cmd_dag(a),
        Command::Solve(a) => cmd_solve(a),
        Command::PayoffSpace(a) => cmd_payoff_space(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::LpSolve(a) => cmd_lp_solve(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn manifest(path: Option<&Path>) -> Result<Manifest, Failure> {
    let path = path.map(Path::to_path_buf).or_else(|| std::env::var_os(MANIFEST_ENV).map(PathBuf::from));
    match path {
        None => Ok(default_manifest()),
        Some(p) => {
            let bytes = std::fs::read(&p).map_err(|e| Failure::load(format!("{}: {e}", p.display())))?;
            load_manifest(&bytes).map_err(Failure::load)
        }
    }
}

/// A file path when one exists, otherwise a manifest name.
fn load(selector: &str, manifest_path: Option<&Path>) -> Result<Game, Failure> {
    let path = Path::new(selector);
    if selector.is_empty() {
        return Err(Failure::load("empty game selector"));
    }
    if path.is_file() {
        let bytes = std::fs::read(path).map_err(|e| Failure::load(format!("{selector}: {e}")))?;
        return load_game(&bytes).map_err(|e| Failure::load(format!("{selector}: {e}")));
    }
    manifest(manifest_path)?.generate(selector).map_err(Failure::load)
}

fn parse_objective(spec: &str, game: &Game) -> Result<Objective, Failure> {
    if spec == "sw" {
        return Ok(Objective::SocialWelfare);
    }
    if let Some(i) = spec.strip_prefix("player:") {
        let i: usize = i.parse().map_err(|_| Failure::load(format!("bad player in objective {spec:?}")))?;
        if i == 0 || i > game.num_players() {
            return Err(Failure::load(format!("player {i} out of range 1..={}", game.num_players())));
        }
        return Ok(Objective::Player(i - 1));
    }
    if let Some(w) = spec.strip_prefix("weights:") {
        let w: Result<Vec<f64>, _> = w.split(',').map(|x| x.trim().parse::<f64>()).collect();
        return w.map(Objective::Weights).map_err(|_| Failure::load(format!("bad weights in objective {spec:?}")));
    }
    let bytes = std::fs::read(spec).map_err(|e| Failure::load(format!("objective {spec}: {e}")))?;
    objective_from_json(&bytes, game).map_err(|e| Failure::load(format!("objective {spec}: {e}")))
}

/// Either a weight vector `[w1, w2, ..]` or a map from terminal id to coefficient.
fn objective_from_json(bytes: &[u8], game: &Game) -> Result<Objective, String> {
    let v: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    if let Ok(w) = serde_json::from_value::<Vec<f64>>(v.clone()) {
        return Ok(Objective::Weights(w));
    }
    let m: BTreeMap<String, f64> = serde_json::from_value(v).map_err(|e| e.to_string())?;
    let mut out = BTreeMap::new();
    for (k, c) in m {
        let z: usize = k.parse().map_err(|_| format!("key {k:?} is not a node id"))?;
        if z >= game.num_nodes() || !game.node(z).is_terminal() {
            return Err(format!("node {z} is not a terminal"));
        }
        out.insert(z, c);
    }
    Ok(Objective::Terminal(out))
}

fn backend(name: Option<&str>) -> Result<Backend, Failure> {
    match name {
        Some(n) => n.parse().map_err(|e| Failure::new(EXIT_OTHER, e)),
        None => Backend::from_env().map_err(|e| Failure::new(EXIT_OTHER, e)),
    }
}

fn solve_options(run: &RunArgs) -> Result<SolveOptions, Failure> {
    let mut opts = SolveOptions { backend: backend(run.backend.as_deref())?, ..SolveOptions::default() };
    if let Some(t) = run.tol {
        opts.tol = Tolerances { primal: t, dual: t, ..Tolerances::default() };
        opts.colgen.tol = t;
    }
    if let Some(e) = run.edge_budget {
        opts.edge_budget = e;
    }
    if let Some(s) = run.time_budget {
        opts.time_budget = Some(Duration::from_secs_f64(s));
    }
    if let Some(n) = run.mip_node_limit {
        opts.mip = MipOptions { node_limit: n, ..MipOptions::default() };
    }
    Ok(opts)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::new(EXIT_OTHER, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_stats(a: StatsArgs) -> Result<(), Failure> {
    let game = load(&a.game.game, a.game.manifest.as_deref())?;
    let timed = make_timed(&game).map_err(Failure::load)?.game;
    let seqs = compute_sequences(&timed).map_err(Failure::load)?;
    let partition = compute_public_states(&timed, &seqs).map_err(Failure::load)?;
    let params = game_parameters(&timed, &seqs, &partition);
    let sigma = JointSequences::build(&timed, &seqs);
    let triggers: BTreeMap<String, usize> =
        Concept::ALL.iter().map(|&c| (c.to_string(), enumerate_triggers(&timed, c).len())).collect();
    if a.json {
        let v = json!({
            "players": game.num_players(),
            "terminals": game.num_terminals(),
            "nodes": game.num_nodes(),
            "relevant_sequences": sigma.len(),
            "sequences": params.num_sequences,
            "infosets": params.num_infosets,
            "k": params.k,
            "b": params.b,
            "d": params.d,
            "public_states": params.num_public_states,
            "triggers": triggers,
        });
        println!("{}", serde_json::to_string_pretty(&v).unwrap());
        return Ok(());
    }
    println!("players     {}", game.num_players());
    println!("|Z|         {}", game.num_terminals());
    println!("|Σ|         {}", sigma.len());
    for (i, n) in params.num_sequences.iter().enumerate() {
        println!("|Σ_{}|       {n}", i + 1);
    }
    println!("k           {}", params.k);
    println!("b           {}", params.b);
    println!("d           {}", params.d);
    for (c, n) in &triggers {
        println!("triggers    {c} {n}");
    }
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> Result<(), Failure> {
    let game = load(&a.game.game, a.game.manifest.as_deref())?;
    let text = String::from_utf8(save_game(&game)).expect("game JSON is UTF-8");
    write_or_print(a.out.as_deref(), &text)
}

fn cmd_dag(a: DagArgs) -> Result<(), Failure> {
    let game = load(&a.game.game, a.game.manifest.as_deref())?;
    let timed = make_timed(&game).map_err(Failure::load)?.game;
    let seqs = compute_sequences(&timed).map_err(Failure::load)?;
    let partition = compute_public_states(&timed, &seqs).map_err(Failure::load)?;
    let sigma = JointSequences::build(&timed, &seqs);
    let mut opts = DagOptions::default();
    if let Some(e) = a.edge_budget {
        opts.edge_budget = e;
    }
    let start = Instant::now();
    let dag = build_correlation_dag(&timed, &seqs, &partition, &sigma, a.concept, &opts)
        .map_err(|e| Failure::from(SolverError::from(e)))?;
    let s = dag.stats();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&s).unwrap());
    } else {
        println!(
            "{}: {} nodes ({} decision, {} observation), {} edges, largest belief {}, {:.2}s",
            a.concept,
            s.nodes,
            s.decision,
            s.observation,
            s.edges,
            s.max_belief,
            start.elapsed().as_secs_f64()
        );
    }
    if let Some(p) = a.out {
        write_or_print(Some(&p), &dag.dump_json_lines(&timed, &seqs, &sigma))?;
    }
    Ok(())
}

fn setup(game: &GameArgs, run: &RunArgs, concept: Concept) -> Result<(EquilibriumProblem, Prepared), Failure> {
    let g = load(&game.game, game.manifest.as_deref())?;
    let objective = parse_objective(&run.objective, &g)?;
    let problem = EquilibriumProblem { game: g, concept, objective };
    let prep = Prepared::new(&problem).map_err(Failure::load)?;
    Ok((problem, prep))
}

fn result_json(r: &EquilibriumResult, prep: &Prepared, with_plan: bool) -> String {
    serde_json::to_string_pretty(&r.to_json(prep, with_plan)).unwrap() + "\n"
}

fn cmd_solve(a: SolveArgs) -> Result<(), Failure> {
    let (problem, prep) = setup(&a.game, &a.run, a.run.concept)?;
    let opts = solve_options(&a.run)?;
    let start = Instant::now();
    let outcome = solve(&problem, &prep, a.run.engine, &opts);
    let elapsed = start.elapsed().as_secs_f64();
    let result = match outcome {
        Ok(r) => r,
        Err(SolverError::Budget { best: Some(best), bound, iterations }) => {
            if let Some(p) = &a.out {
                write_or_print(Some(p), &result_json(&best, &prep, true))?;
            }
            return Err(Failure::new(
                EXIT_BUDGET,
                format!(
                    "budget exceeded after {iterations} iterations: best {:.6}, bound {bound:.6}, {elapsed:.2}s",
                    best.value
                ),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = &a.out {
        write_or_print(Some(p), &result_json(&result, &prep, true))?;
    }
    if a.json {
        print!("{}", result_json(&result, &prep, false));
    } else {
        println!(
            "{} {} value {:.6} benefit {:.3e} time {elapsed:.2}s",
            result.concept, result.engine, result.value, result.certified_benefit
        );
    }
    Ok(())
}

fn cmd_payoff_space(a: PayoffArgs) -> Result<(), Failure> {
    let concepts = if a.concepts.is_empty() { Concept::ALL.to_vec() } else { a.concepts.clone() };
    let opts = solve_options(&a.run)?;
    let mut csv = String::new();
    let mut header_done = false;
    for concept in concepts {
        let (problem, prep) = setup(&a.game, &a.run, concept)?;
        let players = problem.game.num_players();
        if !header_done {
            csv.push_str("theta");
            for i in 1..=players {
                write!(csv, ",u{i}").unwrap();
            }
            csv.push_str(",concept\n");
            header_done = true;
        }
        for p in payoff_space(&problem, &prep, a.directions, a.run.engine, &opts, a.threads.max(1))? {
            write!(csv, "{}", p.theta).unwrap();
            for u in &p.utilities {
                write!(csv, ",{u}").unwrap();
            }
            writeln!(csv, ",{concept}").unwrap();
        }
    }
    write_or_print(a.out.as_deref(), &csv)
}

fn cmd_oracle(a: OracleArgs) -> Result<(), Failure> {
    let games: Vec<(String, Game)> = match &a.game {
        Some(sel) => vec![(sel.clone(), load(sel, a.manifest.as_deref())?)],
        None => (0..a.count)
            .map(|k| {
                let spec = RandomGameSpec::tiny(a.seed + k, a.players);
                gen_random_game(&spec).map(|g| (format!("random:{}", a.seed + k), g)).map_err(Failure::load)
            })
            .collect::<Result<_, _>>()?,
    };
    let opts = SolveOptions { backend: backend(a.backend.as_deref())?, ..SolveOptions::default() };
    let mut worst: BTreeMap<Concept, f64> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (name, game) in games {
        let objective = parse_objective(&a.objective, &game)?;
        for concept in Concept::ALL {
            let truth = brute_force_optimal(&game, concept, &objective, &OracleCaps::default(), &opts.backend)
                .map_err(|e| Failure::new(EXIT_OTHER, format!("{name}: {e}")))?;
            let problem = EquilibriumProblem { game: game.clone(), concept, objective: objective.clone() };
            let mut prep = Prepared::new(&problem).map_err(Failure::load)?;
            if a.flip_incentive_sign {
                for (_, pair) in prep.incentives.iter_mut() {
                    pair.a.iter_mut().for_each(|x| x.2 = -x.2);
                    pair.b.iter_mut().for_each(|x| x.1 = -x.1);
                }
            }
            let mut engines = vec![Engine::Dag];
            if game.num_players() == 2 {
                engines.push(Engine::Colgen);
            }
            for engine in engines {
                let got = solve(&problem, &prep, engine, &opts).map(|r| r.value);
                let delta = match &got {
                    Ok(v) => (v - truth).abs(),
                    Err(_) => f64::INFINITY,
                };
                let w = worst.entry(concept).or_insert(0.0);
                *w = w.max(delta);
                if delta > a.tol {
                    let got = got.map(|v| format!("{v:.9}")).unwrap_or_else(|e| e.to_string());
                    failures.push(format!("{name} {concept} {engine}: {got} vs brute force {truth:.9}"));
                }
                rows.push(json!({"game": name, "concept": concept, "engine": engine, "oracle": truth, "delta": delta}));
            }
        }
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&rows).unwrap());
    } else {
        for (c, d) in &worst {
            println!("{c}: max delta {d:.3e} {}", if *d <= a.tol { "ok" } else { "MISMATCH" });
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        for f in &failures {
            eprintln!("{f}");
        }
        Err(Failure::new(EXIT_MISMATCH, format!("{} mismatches", failures.len())))
    }
}

fn cmd_lp_solve(a: LpSolveArgs) -> Result<(), Failure> {
    let bytes = std::fs::read(&a.model_file).map_err(|e| Failure::load(format!("{}: {e}", a.model_file.display())))?;
    let model = read_model(&bytes).map_err(Failure::load)?;
    let backend = backend(Some(&a.backend))?;
    let tol = Tolerances::default();
    let sol = if model.has_binaries() {
        backend.solve_mip(&model, &tol, &MipOptions::default())
    } else {
        backend.solve_lp(&model, &tol)
    }
    .map_err(|e| Failure::new(EXIT_OTHER, e))?;
    std::fs::write(&a.solution_file, write_solution(&model, &sol))
        .map_err(|e| Failure::new(EXIT_OTHER, format!("{}: {e}", a.solution_file.display())))
}
