//! Best-first branch-and-bound over binary variables on top of the
//! reference simplex. Child LPs are solved from scratch.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{solve_lp_reference, LinearModel, LpError, MipOptions, Sense, Solution, Status, Tolerances};

struct Node {
    bound: f64,
    seq: usize,
    fixed: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        // Larger bound first; earlier nodes break ties.
        self.bound.total_cmp(&o.bound).then(o.seq.cmp(&self.seq))
    }
}

pub fn solve_mip_reference(model: &LinearModel, tol: &Tolerances, opts: &MipOptions) -> Result<Solution, LpError> {
    model.check()?;
    // Work in max form internally.
    let flip = if model.sense == Sense::Max { 1.0 } else { -1.0 };
    let mut relaxed = model.clone();
    for v in relaxed.vars.iter_mut() {
        v.binary = false;
    }
    let binaries: Vec<usize> = (0..model.vars.len()).filter(|&j| model.vars[j].binary).collect();

    let solve_with = |fixed: &[(usize, f64)]| -> Result<Solution, LpError> {
        let mut m = relaxed.clone();
        for &(j, v) in fixed {
            m.vars[j].lower = v;
            m.vars[j].upper = v;
        }
        solve_lp_reference(&m, tol)
    };

    let mut heap = BinaryHeap::new();
    let mut pool: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut iterations = 0;
    let mut nodes = 0;
    let mut seq = 0;
    let mut pending = Some(Vec::new());
    let mut incumbent = f64::NEG_INFINITY;
    let mut limit_hit = false;

    loop {
        let fixed = match pending.take() {
            Some(f) => f,
            None => match heap.pop() {
                Some(Node { bound, fixed, .. }) => {
                    if bound <= incumbent + tol.mip_gap {
                        break;
                    }
                    fixed
                }
                None => break,
            },
        };
        let sol = solve_with(&fixed)?;
        iterations += sol.iterations;
        match sol.status {
            Status::Optimal => {}
            Status::Infeasible => continue,
            Status::Unbounded if fixed.is_empty() => {
                let mut s = Solution::without_point(Status::Unbounded);
                s.iterations = iterations;
                return Ok(s);
            }
            Status::Unbounded => continue,
            Status::Limit => {
                limit_hit = true;
                continue;
            }
        }
        let value = flip * sol.objective;
        if value <= incumbent + tol.mip_gap && !pool.is_empty() && pool.len() >= opts.pool_size {
            continue;
        }
        let branch = binaries
            .iter()
            .map(|&j| (j, (sol.primal[j] - sol.primal[j].round()).abs()))
            .filter(|&(_, f)| f > tol.integrality)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match branch {
            None => {
                let mut x = sol.primal;
                for &j in &binaries {
                    x[j] = x[j].round();
                }
                incumbent = incumbent.max(value);
                pool.push((value, x));
                pool.sort_by(|a, b| b.0.total_cmp(&a.0));
                pool.truncate(opts.pool_size.max(1));
            }
            Some((j, _)) => {
                if value <= incumbent + tol.mip_gap {
                    continue;
                }
                if nodes >= opts.node_limit {
                    limit_hit = true;
                    break;
                }
                for v in [1.0, 0.0] {
                    nodes += 1;
                    seq += 1;
                    let mut f = fixed.clone();
                    f.push((j, v));
                    heap.push(Node { bound: value, seq, fixed: f });
                }
            }
        }
    }

    let Some((_, best)) = pool.first().cloned() else {
        let status = if limit_hit { Status::Limit } else { Status::Infeasible };
        let mut s = Solution::without_point(status);
        s.iterations = iterations;
        s.nodes = nodes;
        return Ok(s);
    };
    let status = if limit_hit { Status::Limit } else { Status::Optimal };
    Ok(Solution {
        status,
        objective: model.objective_value(&best),
        primal: best,
        dual: Vec::new(),
        pool: pool.into_iter().skip(1).map(|(_, x)| x).collect(),
        iterations,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn single_binary() {
        let mut m = LinearModel::new(Sense::Max);
        let x = m.add_binary("x");
        m.objective.push((x, 1.0));
        let s = solve_mip_reference(&m, &Tolerances::default(), &MipOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.primal, vec![1.0]);
    }

    #[test]
    fn integral_relaxation_needs_no_branching() {
        let mut m = LinearModel::new(Sense::Max);
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_row("c", vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
        m.objective.extend([(x, 2.0), (y, 1.0)]);
        let s = solve_mip_reference(&m, &Tolerances::default(), &MipOptions::default()).unwrap();
        assert_eq!(s.nodes, 0);
        assert!((s.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn knapsack_matches_enumeration() {
        let w = [3.0, 4.0, 5.0, 6.0, 2.0, 7.0];
        let v = [4.0, 5.0, 7.0, 8.0, 2.5, 9.5];
        let cap = 13.0;
        let mut m = LinearModel::new(Sense::Max);
        let xs: Vec<usize> = (0..6).map(|k| m.add_binary(format!("x{k}"))).collect();
        m.add_row("cap", xs.iter().map(|&j| (j, w[j])).collect(), Relation::Le, cap);
        m.objective = xs.iter().map(|&j| (j, v[j])).collect();
        let s = solve_mip_reference(&m, &Tolerances::default(), &MipOptions::default()).unwrap();
        let mut best = 0.0f64;
        for mask in 0u32..64 {
            let pick = |k: usize| mask >> k & 1 == 1;
            let weight: f64 = (0..6).filter(|&k| pick(k)).map(|k| w[k]).sum();
            if weight <= cap {
                best = best.max((0..6).filter(|&k| pick(k)).map(|k| v[k]).sum());
            }
        }
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective - best).abs() < 1e-9, "{} vs {best}", s.objective);
        assert!(!s.pool.is_empty());
    }

    #[test]
    fn infeasible_binaries() {
        let mut m = LinearModel::new(Sense::Min);
        let x = m.add_binary("x");
        m.add_row("c", vec![(x, 2.0)], Relation::Eq, 1.0);
        let s = solve_mip_reference(&m, &Tolerances::default(), &MipOptions::default()).unwrap();
        assert_eq!(s.status, Status::Infeasible);
    }
}
