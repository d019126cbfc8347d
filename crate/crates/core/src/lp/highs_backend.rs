use highs::{ColProblem, HighsModelStatus, Sense as HSense};

use super::{primal_residual, LinearModel, LpError, Relation, Sense, Solution, Status, Tolerances};

pub(crate) fn solve(model: &LinearModel, tol: &Tolerances, mip: bool) -> Result<Solution, LpError> {
    model.check()?;
    if model.vars.is_empty() {
        // HiGHS reports an empty model without a status; every row is 0 ⋈ rhs.
        let ok = primal_residual(model, &[]) <= tol.primal;
        if !ok {
            return Ok(Solution::without_point(Status::Infeasible));
        }
        return Ok(Solution {
            status: Status::Optimal,
            objective: 0.0,
            primal: Vec::new(),
            dual: vec![0.0; model.rows.len()],
            pool: Vec::new(),
            iterations: 0,
            nodes: 0,
        });
    }
    let mut pb = ColProblem::default();
    let rows: Vec<_> = model
        .rows
        .iter()
        .map(|r| match r.relation {
            Relation::Le => pb.add_row(f64::NEG_INFINITY..=r.rhs),
            Relation::Ge => pb.add_row(r.rhs..=f64::INFINITY),
            Relation::Eq => pb.add_row(r.rhs..=r.rhs),
        })
        .collect();
    let mut entries: Vec<Vec<(highs::Row, f64)>> = vec![Vec::new(); model.vars.len()];
    for (i, r) in model.rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            entries[j].push((rows[i], a));
        }
    }
    let cost = model.dense_objective();
    for (j, v) in model.vars.iter().enumerate() {
        let integer = mip && v.binary;
        pb.add_column_with_integrality(cost[j], v.lower..=v.upper, &entries[j], integer);
    }
    let mut m = pb.optimise(match model.sense {
        Sense::Max => HSense::Maximise,
        Sense::Min => HSense::Minimise,
    });
    m.make_quiet();
    m.set_option("threads", 1);
    // HiGHS rejects feasibility tolerances below 1e-10.
    m.set_option("primal_feasibility_tolerance", (tol.primal * 0.1).max(1e-10));
    m.set_option("dual_feasibility_tolerance", (tol.dual * 0.1).max(1e-10));
    if mip {
        m.set_option("mip_rel_gap", 0.0);
        m.set_option("mip_abs_gap", tol.mip_gap);
        m.set_option("mip_feasibility_tolerance", (tol.integrality * 0.1).max(1e-10));
    }
    let solved = m.try_solve().map_err(|e| LpError::NumericalFailure(format!("HiGHS: {e:?}")))?;
    let status = match solved.status() {
        HighsModelStatus::Optimal => Status::Optimal,
        HighsModelStatus::Infeasible => Status::Infeasible,
        HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => Status::Unbounded,
        HighsModelStatus::ReachedTimeLimit | HighsModelStatus::ReachedIterationLimit => Status::Limit,
        other => return Err(LpError::NumericalFailure(format!("HiGHS status {other:?}"))),
    };
    if status != Status::Optimal {
        return Ok(Solution::without_point(status));
    }
    let sol = solved.get_solution();
    let mut primal = sol.columns().to_vec();
    if mip {
        for (x, v) in primal.iter_mut().zip(&model.vars) {
            if v.binary {
                *x = x.round();
            }
        }
    }
    // HiGHS row duals are already shadow prices in the stated sense.
    let dual = if mip { Vec::new() } else { sol.dual_rows().to_vec() };
    Ok(Solution {
        status,
        objective: model.objective_value(&primal),
        primal,
        dual,
        pool: Vec::new(),
        iterations: 0,
        nodes: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;

    /// Finite differences of the optimal value fix the dual sign convention.
    #[test]
    fn dual_signs_are_shadow_prices() {
        for sense in [Sense::Max, Sense::Min] {
            let build = |d: [f64; 3]| {
                let mut m = LinearModel::new(sense);
                let x = m.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
                let y = m.add_var("y", f64::NEG_INFINITY, f64::INFINITY);
                m.add_row("le", vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0 + d[0]);
                m.add_row("ge", vec![(x, 1.0), (y, -1.0)], Relation::Ge, -1.0 + d[1]);
                m.add_row("eq", vec![(x, 2.0), (y, 1.0)], Relation::Eq, 5.0 + d[2]);
                let s = if sense == Sense::Max { 1.0 } else { -1.0 };
                m.objective = vec![(x, s * 1.0), (y, s * 3.0)];
                m
            };
            let base = build([0.0; 3]);
            let h = Backend::Highs.solve_lp(&base, &Tolerances::default()).unwrap();
            let r = Backend::Reference.solve_lp(&base, &Tolerances::default()).unwrap();
            assert!((h.objective - r.objective).abs() < 1e-9);
            for k in 0..3 {
                let mut d = [0.0; 3];
                d[k] = 1e-3;
                let bumped = solve_lp_reference(&build(d), &Tolerances::default()).unwrap();
                let fd = (bumped.objective - r.objective) / 1e-3;
                assert!((h.dual[k] - fd).abs() < 1e-6, "{sense:?} row {k}: highs {} fd {fd}", h.dual[k]);
                assert!((r.dual[k] - fd).abs() < 1e-6, "{sense:?} row {k}: reference {} fd {fd}", r.dual[k]);
            }
        }
    }

    #[test]
    fn empty_model() {
        let mut m = LinearModel::new(Sense::Max);
        m.add_row("trivial", vec![], Relation::Le, 1.0);
        assert!(Backend::Highs.solve_lp(&m, &Tolerances::default()).unwrap().is_optimal());
        m.add_row("bad", vec![], Relation::Ge, 1.0);
        assert_eq!(Backend::Highs.solve_lp(&m, &Tolerances::default()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn knapsack() {
        let mut m = LinearModel::new(Sense::Max);
        let xs: Vec<usize> = (0..4).map(|k| m.add_binary(format!("x{k}"))).collect();
        m.add_row("cap", xs.iter().map(|&j| (j, 2.0 + j as f64)).collect(), Relation::Le, 7.0);
        m.objective = xs.iter().map(|&j| (j, 3.0 + j as f64 * 1.5)).collect();
        let h = Backend::Highs.solve_mip(&m, &Tolerances::default(), &MipOptions::default()).unwrap();
        let r = Backend::Reference.solve_mip(&m, &Tolerances::default(), &MipOptions::default()).unwrap();
        assert!((h.objective - r.objective).abs() < 1e-9);
    }
}
