//! Dense bounded-variable primal simplex.
//!
//! Every row gets a slack (`<=`: `[0, inf)`, `>=`: `(-inf, 0]`) and, where the
//! slack cannot start basic, an artificial. Phase one drives the artificials
//! to zero, after which they are fixed at `[0, 0]` and left in place.

use super::{LinearProgram, LpError, LpSolution, LpStatus, Lu, Relation};

const PIVOT_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;
const NONBASIC: usize = usize::MAX;

/// Solves `lp` with the default iteration budget.
pub fn solve_lp(lp: &LinearProgram, tol: f64) -> Result<LpSolution, LpError> {
    let cols = lp.num_vars() + 2 * lp.constraints.len();
    solve_lp_with_limit(lp, tol, 50 * cols + 1000)
}

pub fn solve_lp_with_limit(
    lp: &LinearProgram,
    tol: f64,
    max_iterations: usize,
) -> Result<LpSolution, LpError> {
    lp.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(LpError::InvalidTolerance(tol));
    }
    let n = lp.num_vars();
    let mut tab = Tableau::build(lp);
    let mut iterations = 0;

    if tab.art_start < tab.cols {
        let rhs_scale = lp
            .constraints
            .iter()
            .fold(1.0_f64, |acc, c| acc.max(c.rhs.abs()));
        let cost: Vec<f64> = (0..tab.cols)
            .map(|j| if j >= tab.art_start { -1.0 } else { 0.0 })
            .collect();
        tab.set_costs(cost);
        tab.run(tol, max_iterations, &mut iterations, true)?;
        if tab.artificial_sum() > tol * rhs_scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, n));
        }
        for j in tab.art_start..tab.cols {
            tab.upper[j] = 0.0;
            if tab.row_of[j] == NONBASIC {
                tab.x[j] = 0.0;
            }
        }
    }

    let mut cost = vec![0.0; tab.cols];
    cost[..n].copy_from_slice(&lp.objective);
    tab.set_costs(cost);
    if tab.run(tol, max_iterations, &mut iterations, false)? == LpStatus::Unbounded {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, n));
    }
    tab.refresh_basic_values();

    let x: Vec<f64> = (0..n)
        .map(|j| tab.x[j].clamp(lp.lower[j], lp.upper[j]))
        .collect();
    let violation = lp.max_violation(&x);
    if violation > tol {
        return Err(LpError::Verification { violation });
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.evaluate(&x),
        x,
    })
}

struct Tableau {
    m: usize,
    cols: usize,
    art_start: usize,
    /// Current `B^-1 A`, row-major.
    a: Vec<f64>,
    /// Initial (row-scaled) equality form, kept for the final refresh.
    a0: Vec<f64>,
    b0: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.constraints.len();
        let num_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();

        // Residual of each row with every structural at its lower bound.
        let residual: Vec<f64> = lp
            .constraints
            .iter()
            .map(|c| c.rhs - super::dot(&c.coeffs, &lp.lower))
            .collect();
        let needs_art: Vec<bool> = lp
            .constraints
            .iter()
            .zip(&residual)
            .map(|(c, &r)| match c.relation {
                Relation::Le => r < 0.0,
                Relation::Ge => r > 0.0,
                Relation::Eq => true,
            })
            .collect();
        let num_art = needs_art.iter().filter(|&&b| b).count();
        let art_start = n + num_slack;
        let cols = art_start + num_art;

        let mut a = vec![0.0; m * cols];
        let mut b0 = vec![0.0; m];
        let mut lower = vec![0.0; cols];
        let mut upper = vec![f64::INFINITY; cols];
        lower[..n].copy_from_slice(&lp.lower);
        upper[..n].copy_from_slice(&lp.upper);
        let mut x = vec![0.0; cols];
        x[..n].copy_from_slice(&lp.lower);
        let mut basis = vec![0; m];
        let mut row_of = vec![NONBASIC; cols];

        let mut slack = n;
        let mut art = art_start;
        for (i, c) in lp.constraints.iter().enumerate() {
            let sign = if needs_art[i] && residual[i] < 0.0 {
                -1.0
            } else {
                1.0
            };
            let row = &mut a[i * cols..(i + 1) * cols];
            for (dst, &v) in row.iter_mut().zip(&c.coeffs) {
                *dst = sign * v;
            }
            b0[i] = sign * c.rhs;
            let slack_col = match c.relation {
                Relation::Eq => None,
                rel => {
                    let s = slack;
                    slack += 1;
                    row[s] = sign;
                    if rel == Relation::Ge {
                        lower[s] = f64::NEG_INFINITY;
                        upper[s] = 0.0;
                    }
                    Some(s)
                }
            };
            if needs_art[i] {
                row[art] = 1.0;
                basis[i] = art;
                x[art] = residual[i].abs();
                art += 1;
            } else {
                let s = slack_col.expect("inequality row has a slack");
                basis[i] = s;
                x[s] = residual[i];
            }
            row_of[basis[i]] = i;
        }

        Self {
            m,
            cols,
            art_start,
            a0: a.clone(),
            a,
            b0,
            lower,
            upper,
            x,
            basis,
            row_of,
            cost: vec![0.0; cols],
            reduced: vec![0.0; cols],
        }
    }

    fn set_costs(&mut self, cost: Vec<f64>) {
        self.reduced.copy_from_slice(&cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.cols..(i + 1) * self.cols];
                for (d, &v) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * v;
                }
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
        self.cost = cost;
    }

    fn artificial_sum(&self) -> f64 {
        self.x[self.art_start..].iter().map(|v| v.max(0.0)).sum()
    }

    fn choose_entering(&self, opt_tol: f64, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.cols {
            if self.row_of[j] != NONBASIC || self.upper[j] <= self.lower[j] {
                continue;
            }
            let d = self.reduced[j];
            let dir = if d > opt_tol && self.x[j] < self.upper[j] {
                1.0
            } else if d < -opt_tol && self.x[j] > self.lower[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn run(
        &mut self,
        tol: f64,
        max_iterations: usize,
        iterations: &mut usize,
        phase_one: bool,
    ) -> Result<LpStatus, LpError> {
        let cmax = self.cost.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
        let opt_tol = tol.max(cmax * 1e-13);
        let mut streak = 0;
        let cols = self.cols;
        loop {
            if phase_one && self.artificial_sum() <= tol {
                return Ok(LpStatus::Optimal);
            }
            let bland = streak >= DEGENERATE_STREAK;
            let Some((enter, dir)) = self.choose_entering(opt_tol, bland) else {
                return Ok(LpStatus::Optimal);
            };
            *iterations += 1;
            if *iterations > max_iterations {
                return Err(LpError::IterationLimit(max_iterations));
            }

            let mut theta = self.upper[enter] - self.lower[enter];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let alpha = dir * self.a[i * cols + enter];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.basis[i];
                let limit = if alpha > 0.0 {
                    if !self.lower[b].is_finite() {
                        continue;
                    }
                    (self.x[b] - self.lower[b]) / alpha
                } else {
                    if !self.upper[b].is_finite() {
                        continue;
                    }
                    (self.upper[b] - self.x[b]) / -alpha
                };
                let limit = limit.max(0.0);
                let better = if limit < theta - TIE_TOL {
                    true
                } else if limit <= theta + TIE_TOL {
                    match leave {
                        // ties against a bound flip keep the flip
                        None => false,
                        Some((r, alpha_r)) => {
                            let br = self.basis[r];
                            if bland {
                                b < br
                            } else {
                                alpha.abs() > alpha_r.abs() + TIE_TOL
                                    || (alpha.abs() >= alpha_r.abs() - TIE_TOL && b < br)
                            }
                        }
                    }
                } else {
                    false
                };
                if better {
                    theta = limit;
                    leave = Some((i, alpha));
                }
            }
            if !theta.is_finite() {
                return Ok(LpStatus::Unbounded);
            }

            if theta <= TIE_TOL {
                streak += 1;
            } else {
                streak = 0;
            }

            let step = dir * theta;
            if step != 0.0 {
                self.x[enter] += step;
                for i in 0..self.m {
                    let alpha = self.a[i * cols + enter];
                    if alpha != 0.0 {
                        self.x[self.basis[i]] -= step * alpha;
                    }
                }
            }
            match leave {
                None => {
                    self.x[enter] = if dir > 0.0 {
                        self.upper[enter]
                    } else {
                        self.lower[enter]
                    };
                }
                Some((r, alpha)) => {
                    let out = self.basis[r];
                    self.x[out] = if alpha > 0.0 {
                        self.lower[out]
                    } else {
                        self.upper[out]
                    };
                    self.pivot(r, enter);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let cols = self.cols;
        let piv = self.a[r * cols + enter];
        {
            let row = &mut self.a[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[enter] = 1.0;
        }
        let (before, rest) = self.a.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for row in before
            .chunks_exact_mut(cols)
            .chain(after.chunks_exact_mut(cols))
        {
            let f = row[enter];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * p;
                }
                row[enter] = 0.0;
            }
        }
        let f = self.reduced[enter];
        if f != 0.0 {
            for (d, &p) in self.reduced.iter_mut().zip(pivot_row.iter()) {
                *d -= f * p;
            }
        }
        self.reduced[enter] = 0.0;

        let out = self.basis[r];
        self.row_of[out] = NONBASIC;
        self.row_of[enter] = r;
        self.basis[r] = enter;
    }

    /// Recomputes basic values from the original rows to shed accumulated
    /// pivoting error.
    fn refresh_basic_values(&mut self) {
        let (m, cols) = (self.m, self.cols);
        if m == 0 {
            return;
        }
        let mut rhs = self.b0.clone();
        for j in 0..cols {
            if self.row_of[j] == NONBASIC && self.x[j] != 0.0 {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r -= self.a0[i * cols + j] * self.x[j];
                }
            }
        }
        let mut bmat = vec![0.0; m * m];
        for (k, &col) in self.basis.iter().enumerate() {
            for i in 0..m {
                bmat[i * m + k] = self.a0[i * cols + col];
            }
        }
        if let Some(lu) = Lu::factor(bmat, m, 1e-13) {
            let mut xb = vec![0.0; m];
            lu.solve(&rhs, &mut xb);
            for (k, &col) in self.basis.iter().enumerate() {
                self.x[col] = xb[k];
            }
        }
    }
}
