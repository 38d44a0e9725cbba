//! Exhaustive basic-feasible-point enumeration.
//!
//! A vertex of `{l <= x <= u, rows}` is the unique solution of `n` linearly
//! independent active constraints. Equality rows are active everywhere, so an
//! independent subset of them is always included; the rest of the active set
//! is every choice of `k` inequality rows, `k` free variables, and a lower or
//! upper bound for each remaining variable.

use super::{LinearProgram, LpError, LpSolution, LpStatus, Lu, Relation};

pub const ORACLE_MAX_VARS: usize = 12;
const FEAS_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-10;

pub fn enumerate_oracle(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    if n > ORACLE_MAX_VARS {
        return Err(LpError::TooLarge {
            n,
            max: ORACLE_MAX_VARS,
        });
    }

    let eq_rows = independent_equalities(lp);
    let ineq_rows: Vec<usize> = (0..lp.constraints.len())
        .filter(|&i| lp.constraints[i].relation != Relation::Eq)
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut x = vec![0.0; n];
    let max_k = (n - eq_rows.len()).min(ineq_rows.len());
    for k in 0..=max_k {
        for chosen in Combinations::new(ineq_rows.len(), k) {
            let rows: Vec<usize> = eq_rows
                .iter()
                .copied()
                .chain(chosen.iter().map(|&c| ineq_rows[c]))
                .collect();
            let r = rows.len();
            for free in Combinations::new(n, r) {
                let Some(lu) = factor_active(lp, &rows, &free) else {
                    continue;
                };
                let at_bound: Vec<usize> = (0..n).filter(|j| !free.contains(j)).collect();
                let mut rhs = vec![0.0; r];
                let mut xf = vec![0.0; r];
                for mask in 0..(1u32 << at_bound.len()) {
                    if at_bound
                        .iter()
                        .enumerate()
                        .any(|(bit, &j)| mask >> bit & 1 == 1 && lp.lower[j] == lp.upper[j])
                    {
                        continue;
                    }
                    for (bit, &j) in at_bound.iter().enumerate() {
                        x[j] = if mask >> bit & 1 == 1 {
                            lp.upper[j]
                        } else {
                            lp.lower[j]
                        };
                    }
                    for (ri, &row) in rows.iter().enumerate() {
                        let c = &lp.constraints[row];
                        rhs[ri] = c.rhs - at_bound.iter().map(|&j| c.coeffs[j] * x[j]).sum::<f64>();
                    }
                    lu.solve(&rhs, &mut xf);
                    for (fi, &j) in free.iter().enumerate() {
                        x[j] = xf[fi];
                    }
                    if lp.max_violation(&x) > FEAS_TOL {
                        continue;
                    }
                    let value = lp.evaluate(&x);
                    let improves = match &best {
                        None => true,
                        Some((b, _)) => value > b + 1e-12 * b.abs().max(1.0),
                    };
                    if improves {
                        best = Some((value, x.clone()));
                    }
                }
            }
        }
    }

    Ok(match best {
        Some((objective_value, x)) => LpSolution {
            status: LpStatus::Optimal,
            x,
            objective_value,
        },
        None => LpSolution::without_point(LpStatus::Infeasible, n),
    })
}

fn factor_active(lp: &LinearProgram, rows: &[usize], free: &[usize]) -> Option<Lu> {
    let r = rows.len();
    if r == 0 {
        return Lu::factor(Vec::new(), 0, SINGULAR_TOL);
    }
    let mut mat = vec![0.0; r * r];
    for (i, &row) in rows.iter().enumerate() {
        for (k, &j) in free.iter().enumerate() {
            mat[i * r + k] = lp.constraints[row].coeffs[j];
        }
    }
    Lu::factor(mat, r, SINGULAR_TOL)
}

/// Greedy Gram-Schmidt pass keeping equality rows that add rank.
fn independent_equalities(lp: &LinearProgram) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut keep = Vec::new();
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.relation != Relation::Eq {
            continue;
        }
        let mut v = c.coeffs.clone();
        let norm0 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            continue;
        }
        for q in &basis {
            let p: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(q) {
                *a -= p * b;
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-9 * norm0 {
            v.iter_mut().for_each(|a| *a /= norm);
            basis.push(v);
            keep.push(i);
        }
    }
    keep
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
