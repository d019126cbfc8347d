//! Dense revised simplex for bounded variables. Phase 1 minimizes the sum of
//! artificial variables; Dantzig pricing with a Harris ratio test, switching
//! to Bland's rule after a run of degenerate pivots.

use super::{LinearModel, LpError, Relation, Sense, Solution, Status, Tolerances};

const REFACTOR_EVERY: usize = 100;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Copy, PartialEq, Debug)]
enum At {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable parked at zero.
    Zero,
}

pub(crate) struct Simplex {
    m: usize,
    /// Sparse columns: structurals, then slacks and artificials.
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    b: Vec<f64>,
    x: Vec<f64>,
    at: Vec<At>,
    head: Vec<usize>,
    binv: Vec<f64>,
    first_artificial: usize,
    pub iterations: usize,
    limit: usize,
    tol: Tolerances,
}

enum Outcome {
    Optimal,
    Unbounded,
    Limit,
}

impl Simplex {
    pub(crate) fn new(model: &LinearModel, tol: &Tolerances) -> Self {
        let n = model.vars.len();
        let m = model.rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, r) in model.rows.iter().enumerate() {
            for &(j, a) in &r.coeffs {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        for c in cols.iter_mut() {
            c.sort_by_key(|e| e.0);
            // Merge duplicate entries.
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(c.len());
            for &(i, a) in c.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == i => last.1 += a,
                    _ => merged.push((i, a)),
                }
            }
            *c = merged;
        }
        let mut lower: Vec<f64> = model.vars.iter().map(|v| v.lower).collect();
        let mut upper: Vec<f64> = model.vars.iter().map(|v| v.upper).collect();
        let mut x = vec![0.0; n];
        let mut at = vec![At::Lower; n];
        for j in 0..n {
            (x[j], at[j]) = if lower[j].is_finite() {
                (lower[j], At::Lower)
            } else if upper[j].is_finite() {
                (upper[j], At::Upper)
            } else {
                (0.0, At::Zero)
            };
        }
        let b: Vec<f64> = model.rows.iter().map(|r| r.rhs).collect();
        let mut resid = b.clone();
        for (j, c) in cols.iter().enumerate() {
            for &(i, a) in c {
                resid[i] -= a * x[j];
            }
        }
        let mut head = vec![0; m];
        for (i, r) in model.rows.iter().enumerate() {
            let (lo, hi) = match r.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            cols.push(vec![(i, 1.0)]);
            lower.push(lo);
            upper.push(hi);
            let s = cols.len() - 1;
            if resid[i] >= lo && resid[i] <= hi {
                x.push(resid[i]);
                at.push(At::Basic);
                head[i] = s;
            } else {
                let parked = resid[i].clamp(lo, hi);
                x.push(parked);
                at.push(if parked == lo { At::Lower } else { At::Upper });
            }
        }
        let first_artificial = cols.len();
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            let s = n + i;
            let sign;
            if at[s] == At::Basic {
                sign = 1.0;
            } else {
                let gap = resid[i] - x[s];
                sign = gap.signum();
                cols.push(vec![(i, sign)]);
                lower.push(0.0);
                upper.push(f64::INFINITY);
                x.push(gap.abs());
                at.push(At::Basic);
                head[i] = cols.len() - 1;
            }
            binv[i * m + i] = sign;
        }
        let total = cols.len();
        let limit = 50_000 + 50 * (m + total);
        Simplex {
            m,
            cols,
            lower,
            upper,
            cost: vec![0.0; total],
            b,
            x,
            at,
            head,
            binv,
            first_artificial,
            iterations: 0,
            limit,
            tol: tol.clone(),
        }
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for r in 0..m {
            let c = self.cost[self.head[r]];
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for k in 0..m {
                    y[k] += c * row[k];
                }
            }
        }
        y
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(i, a) in &self.cols[j] {
            for r in 0..m {
                alpha[r] += self.binv[r * m + i] * a;
            }
        }
        alpha
    }

    /// Rebuild B⁻¹ from scratch and recompute basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (r, &j) in self.head.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                a[i * m + r] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&p, &q| a[p * m + col].abs().total_cmp(&a[q * m + col].abs()))
                .unwrap();
            if a[piv * m + col].abs() < 1e-12 {
                return Err(LpError::NumericalFailure("singular basis".into()));
            }
            if piv != col {
                for k in 0..m {
                    a.swap(piv * m + k, col * m + k);
                    inv.swap(piv * m + k, col * m + k);
                }
            }
            let d = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        let mut rhs = self.b.clone();
        for (j, c) in self.cols.iter().enumerate() {
            if self.at[j] != At::Basic && self.x[j] != 0.0 {
                for &(i, v) in c {
                    rhs[i] -= v * self.x[j];
                }
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.x[self.head[r]] = row.iter().zip(&rhs).map(|(p, q)| p * q).sum();
        }
        Ok(())
    }

    fn run(&mut self) -> Result<Outcome, LpError> {
        let m = self.m;
        let dtol = self.tol.dual * 1e-2;
        let ptol = self.tol.primal * 1e-2;
        let mut degenerate = 0;
        let mut bland = false;
        let mut since_refactor = 0;
        loop {
            if self.iterations >= self.limit {
                return Ok(Outcome::Limit);
            }
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            let y = self.duals();
            // Pricing.
            let mut enter = None;
            let mut best = 0.0;
            for j in 0..self.cols.len() {
                if self.at[j] == At::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = self.cost[j] - self.cols[j].iter().map(|&(i, a)| a * y[i]).sum::<f64>();
                let up = d < -dtol && self.at[j] != At::Upper;
                let down = d > dtol && self.at[j] != At::Lower;
                if up || down {
                    if bland {
                        enter = Some((j, d));
                        break;
                    }
                    if d.abs() > best {
                        best = d.abs();
                        enter = Some((j, d));
                    }
                }
            }
            let Some((j, d)) = enter else {
                return Ok(Outcome::Optimal);
            };
            let dir = if d < 0.0 { 1.0 } else { -1.0 };
            let alpha = self.column(j);
            // Harris ratio test: relaxed bound first, then the largest pivot.
            let rate = |r: usize| -dir * alpha[r];
            let limit_of = |r: usize, slack: f64| -> Option<f64> {
                let k = self.head[r];
                let a = rate(r);
                if a.abs() <= self.tol.pivot {
                    return None;
                }
                if a < 0.0 && self.lower[k].is_finite() {
                    Some((self.x[k] - self.lower[k] + slack) / -a)
                } else if a > 0.0 && self.upper[k].is_finite() {
                    Some((self.upper[k] - self.x[k] + slack) / a)
                } else {
                    None
                }
            };
            let flip = self.upper[j] - self.lower[j];
            let mut leave = None;
            if bland {
                let mut best_t = f64::INFINITY;
                for r in 0..m {
                    if let Some(t) = limit_of(r, 0.0) {
                        let t = t.max(0.0);
                        let better = t < best_t - 1e-12
                            || (t <= best_t + 1e-12 && leave.is_some_and(|l: usize| self.head[r] < self.head[l]));
                        if better {
                            best_t = t;
                            leave = Some(r);
                        }
                    }
                }
            } else {
                let mut tmax = f64::INFINITY;
                for r in 0..m {
                    if let Some(t) = limit_of(r, ptol) {
                        tmax = tmax.min(t);
                    }
                }
                let mut piv = 0.0;
                for r in 0..m {
                    if let Some(t) = limit_of(r, 0.0) {
                        if t <= tmax && alpha[r].abs() > piv {
                            piv = alpha[r].abs();
                            leave = Some(r);
                        }
                    }
                }
            }
            let t_leave = leave.map(|r| limit_of(r, 0.0).unwrap().max(0.0));
            self.iterations += 1;
            since_refactor += 1;
            match t_leave {
                Some(t) if t < flip => {
                    let r = leave.unwrap();
                    self.x[j] += dir * t;
                    for (k, &a) in alpha.iter().enumerate() {
                        if a != 0.0 {
                            self.x[self.head[k]] -= dir * t * a;
                        }
                    }
                    let out = self.head[r];
                    if rate(r) < 0.0 {
                        self.x[out] = self.lower[out];
                        self.at[out] = At::Lower;
                    } else {
                        self.x[out] = self.upper[out];
                        self.at[out] = At::Upper;
                    }
                    self.at[j] = At::Basic;
                    self.head[r] = j;
                    let p = alpha[r];
                    for k in 0..m {
                        self.binv[r * m + k] /= p;
                    }
                    for i in 0..m {
                        if i != r && alpha[i] != 0.0 {
                            let f = alpha[i];
                            for k in 0..m {
                                self.binv[i * m + k] -= f * self.binv[r * m + k];
                            }
                        }
                    }
                    if t <= 1e-12 {
                        degenerate += 1;
                        if degenerate > DEGENERATE_RUN {
                            bland = true;
                        }
                    } else {
                        degenerate = 0;
                        bland = false;
                    }
                }
                _ if flip.is_finite() => {
                    // Bound flip without a basis change.
                    self.x[j] += dir * flip;
                    for (k, &a) in alpha.iter().enumerate() {
                        if a != 0.0 {
                            self.x[self.head[k]] -= dir * flip * a;
                        }
                    }
                    self.at[j] = if dir > 0.0 { At::Upper } else { At::Lower };
                    self.x[j] = if dir > 0.0 { self.upper[j] } else { self.lower[j] };
                    degenerate = 0;
                }
                _ => return Ok(Outcome::Unbounded),
            }
        }
    }

    fn infeasibility(&self) -> f64 {
        (self.first_artificial..self.cols.len()).map(|j| self.x[j].abs()).sum()
    }
}

pub fn solve_lp_reference(model: &LinearModel, tol: &Tolerances) -> Result<Solution, LpError> {
    model.check()?;
    if model.has_binaries() {
        return Err(LpError::HasBinaries);
    }
    let n = model.vars.len();
    let mut s = Simplex::new(model, tol);
    if s.first_artificial < s.cols.len() {
        for j in s.first_artificial..s.cols.len() {
            s.cost[j] = 1.0;
        }
        match s.run()? {
            Outcome::Limit => return Ok(limit(&s)),
            Outcome::Unbounded => return Err(LpError::NumericalFailure("phase 1 unbounded".into())),
            Outcome::Optimal => {}
        }
        s.refactor()?;
        let scale = 1.0 + s.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if s.infeasibility() > tol.primal * scale {
            let mut sol = Solution::without_point(Status::Infeasible);
            sol.iterations = s.iterations;
            return Ok(sol);
        }
        for j in s.first_artificial..s.cols.len() {
            s.cost[j] = 0.0;
            s.upper[j] = 0.0;
            if s.at[j] != At::Basic {
                s.x[j] = 0.0;
            }
        }
    }
    let sign = if model.sense == Sense::Max { -1.0 } else { 1.0 };
    for &(j, c) in &model.objective {
        s.cost[j] += sign * c;
    }
    let outcome = s.run()?;
    let mut sol = match outcome {
        Outcome::Limit => return Ok(limit(&s)),
        Outcome::Unbounded => Solution::without_point(Status::Unbounded),
        Outcome::Optimal => {
            s.refactor()?;
            let primal = s.x[..n].to_vec();
            let dual = s.duals().into_iter().map(|v| sign * v).collect();
            Solution {
                status: Status::Optimal,
                objective: model.objective_value(&primal),
                primal,
                dual,
                pool: Vec::new(),
                iterations: 0,
                nodes: 0,
            }
        }
    };
    sol.iterations = s.iterations;
    Ok(sol)
}

fn limit(s: &Simplex) -> Solution {
    let mut sol = Solution::without_point(Status::Limit);
    sol.iterations = s.iterations;
    sol
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn lp(sense: Sense) -> LinearModel {
        LinearModel::new(sense)
    }

    #[test]
    fn single_bound_row() {
        let mut m = lp(Sense::Max);
        let x = m.add_var("x", 0.0, f64::INFINITY);
        m.add_row("cap", vec![(x, 1.0)], Relation::Le, 3.0);
        m.objective.push((x, 1.0));
        let s = solve_lp_reference(&m, &Tolerances::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!((s.dual[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_pair() {
        let mut m = lp(Sense::Max);
        let x = m.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        m.add_row("a", vec![(x, 1.0)], Relation::Le, 0.0);
        m.add_row("b", vec![(x, 1.0)], Relation::Ge, 1.0);
        assert_eq!(solve_lp_reference(&m, &Tolerances::default()).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut m = lp(Sense::Max);
        let x = m.add_var("x", 0.0, f64::INFINITY);
        let y = m.add_var("y", 0.0, f64::INFINITY);
        m.add_row("a", vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        m.objective.push((x, 1.0));
        assert_eq!(solve_lp_reference(&m, &Tolerances::default()).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn ge_row_dual_is_nonpositive_under_max() {
        // max -x s.t. x >= 2: objective falls as the rhs grows.
        let mut m = lp(Sense::Max);
        let x = m.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        m.add_row("floor", vec![(x, 1.0)], Relation::Ge, 2.0);
        m.objective.push((x, -1.0));
        let s = solve_lp_reference(&m, &Tolerances::default()).unwrap();
        assert!((s.objective + 2.0).abs() < 1e-12);
        assert!((s.dual[0] + 1.0).abs() < 1e-12);
    }
}
