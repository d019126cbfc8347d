use super::*;
use crate::game::{GameBuilder, Rational};
use crate::zoo::{gen_random_game, RandomGameSpec};

fn problem(game: Game, concept: Concept) -> EquilibriumProblem {
    EquilibriumProblem { game, concept, objective: Objective::SocialWelfare }
}

/// Depth-4 games with an objective that pits the players against each
/// other; on these the three concepts often separate.
fn contested(seed: u64, players: usize, concept: Concept) -> EquilibriumProblem {
    let spec = RandomGameSpec { depth: 4, ..RandomGameSpec::tiny(seed, players) };
    let game = gen_random_game(&spec).unwrap();
    let objective = Objective::Weights([1.0, -2.0, 0.5][..players].to_vec());
    EquilibriumProblem { game, concept, objective }
}

fn reference() -> SolveOptions {
    SolveOptions { backend: Backend::Reference, ..SolveOptions::default() }
}

fn oracle(p: &EquilibriumProblem) -> Option<f64> {
    match brute_force_optimal(&p.game, p.concept, &p.objective, &OracleCaps::default(), &Backend::Reference) {
        Ok(v) => Some(v),
        Err(SolverError::CapsExceeded(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn dag_matches_brute_force() {
    let mut checked = 0;
    for (seed, players) in (0..12).map(|s| (s, 2)).chain((0..6).map(|s| (s, 3))) {
        for c in Concept::ALL {
            let p = contested(seed, players, c);
            let Some(want) = oracle(&p) else { continue };
            let prep = Prepared::new(&p).unwrap();
            let got = solve_dag_lp(&prep, &reference()).unwrap();
            assert!((got.value - want).abs() < 1e-6, "seed {seed} {c}: dag {} vs oracle {want}", got.value);
            checked += 1;
        }
    }
    assert!(checked >= 40, "only {checked} instances within caps");
}

#[test]
fn colgen_matches_dag() {
    for seed in 0..12 {
        for c in Concept::ALL {
            let p = contested(seed, 2, c);
            let prep = Prepared::new(&p).unwrap();
            let a = solve_dag_lp(&prep, &reference()).unwrap();
            let b = solve_colgen(&prep, &reference()).unwrap();
            assert!((a.value - b.value).abs() < 1e-6, "seed {seed} {c}: dag {} colgen {}", a.value, b.value);
            for r in [&a, &b] {
                assert!(r.vsf_residual.unwrap() <= 1e-8, "seed {seed} {c} {}: {:?}", r.engine, r.vsf_residual);
            }
        }
    }
}

#[test]
fn concepts_nest_and_sometimes_separate() {
    let mut strict = 0;
    for seed in 0..40 {
        let v: Vec<f64> = Concept::ALL
            .iter()
            .map(|&c| solve_dag_lp(&Prepared::new(&contested(seed, 2, c)).unwrap(), &reference()).unwrap().value)
            .collect();
        assert!(v[0] >= v[1] - 1e-7 && v[1] >= v[2] - 1e-7, "seed {seed}: {v:?}");
        if v[0] > v[2] + 1e-6 {
            strict += 1;
        }
    }
    assert!(strict > 0);
}

#[test]
fn zero_objective_gives_zero() {
    let game = gen_random_game(&RandomGameSpec::tiny(3, 2)).unwrap();
    let p = EquilibriumProblem { game, concept: Concept::Efce, objective: Objective::Weights(vec![0.0, 0.0]) };
    let prep = Prepared::new(&p).unwrap();
    let r = solve_dag_lp(&prep, &reference()).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(r.certified_benefit <= 1e-6 * prep.reward_range);
}

#[test]
fn one_player_takes_the_best_leaf() {
    let mut b = GameBuilder::new(1);
    let x = b.terminal(vec![Rational::from_integer(1)]);
    let y = b.terminal(vec![Rational::from_integer(3)]);
    let i = b.add_infoset(0, &["x", "y"]);
    let r = b.decision(i, vec![x, y]);
    let game = b.build(r).unwrap();
    for c in Concept::ALL {
        let p = problem(game.clone(), c);
        let r = solve_dag_lp(&Prepared::new(&p).unwrap(), &reference()).unwrap();
        assert!((r.value - 3.0).abs() < 1e-9);
    }
}

/// Matching pennies: every equilibrium is uniform, so welfare is 0 and each
/// player's value is 0 whatever the objective.
#[test]
fn constant_sum_values() {
    let one = Rational::from_integer(1);
    let mut b = GameBuilder::new(2);
    let z: Vec<_> = [(1, -1), (-1, 1), (-1, 1), (1, -1)]
        .iter()
        .map(|&(a, c)| b.terminal(vec![one * a, one * c]))
        .collect();
    let i2 = b.add_infoset(1, &["h", "t"]);
    let l = b.decision(i2, vec![z[0], z[1]]);
    let r = b.decision(i2, vec![z[2], z[3]]);
    let i1 = b.add_infoset(0, &["H", "T"]);
    let root = b.decision(i1, vec![l, r]);
    let game = b.build(root).unwrap();
    for c in Concept::ALL {
        let p = EquilibriumProblem { game: game.clone(), concept: c, objective: Objective::Player(0) };
        let prep = Prepared::new(&p).unwrap();
        for engine in [Engine::Dag, Engine::Colgen] {
            let r = solve(&p, &prep, engine, &reference()).unwrap();
            assert!(r.value.abs() < 1e-7, "{c} {engine}: {}", r.value);
        }
    }
}

#[test]
fn printed_pricing_offset_breaks_convergence() {
    // The printed offset drops the objective term of the feasibility phase;
    // on some instance it must either stall or return a different value.
    let mut diverged = false;
    for seed in 0..15 {
        let p = contested(seed, 2, Concept::Efce);
        let prep = Prepared::new(&p).unwrap();
        let good = solve_colgen(&prep, &reference()).unwrap().value;
        let mut opts = reference();
        opts.colgen.pricing = PricingRule::Printed;
        opts.colgen.max_iterations = 60;
        match solve_colgen(&prep, &opts) {
            Ok(r) if (r.value - good).abs() < 1e-6 => {}
            _ => diverged = true,
        }
    }
    assert!(diverged);
}

#[test]
fn deviation_benefit_of_uniform_matching_pennies_is_zero() {
    let game = gen_random_game(&RandomGameSpec::tiny(1, 2)).unwrap();
    let prep = Prepared::new(&problem(game, Concept::Nfcce)).unwrap();
    assert!(matches!(max_deviation_benefit(&prep, &[1.0]), Err(SolverError::MissingPlanEntries { .. })));
}

#[test]
fn json_has_the_result_fields() {
    let game = gen_random_game(&RandomGameSpec::tiny(2, 2)).unwrap();
    let p = problem(game, Concept::Efcce);
    let prep = Prepared::new(&p).unwrap();
    let r = solve_dag_lp(&prep, &reference()).unwrap();
    let j = r.to_json(&prep, true);
    for key in ["value", "concept", "engine", "certified_benefit", "iterations", "plan"] {
        assert!(j.get(key).is_some(), "{key}");
    }
    assert_eq!(j["concept"], "efcce");
}
