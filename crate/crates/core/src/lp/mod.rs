//! Small dense linear programs with finite box bounds.
//!
//! [`solve_lp`] is a bounded-variable simplex; [`enumerate_oracle`] is an
//! exhaustive vertex enumerator used to cross-check it on small instances.

mod oracle;
mod simplex;

pub use oracle::{enumerate_oracle, ORACLE_MAX_VARS};
pub use simplex::{solve_lp, solve_lp_with_limit};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default feasibility / optimality tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective·x + objective_offset` subject to box bounds and
/// general linear rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    /// `n` variables, zero objective, bounds `[0, 0]`.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            objective_offset: 0.0,
            lower: vec![0.0; n],
            upper: vec![0.0; n],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Adds a row given as sparse `(var, coeff)` terms.
    pub fn add_row(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(var, c) in terms {
            coeffs[var] += c;
        }
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x) + self.objective_offset
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::Empty);
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::DimensionMismatch {
                what: "bounds",
                expected: n,
                found: self.lower.len().min(self.upper.len()),
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::DimensionMismatch {
                    what: "constraint",
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite { row: Some(row) });
            }
        }
        if !self.objective_offset.is_finite() || self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite { row: None });
        }
        for var in 0..n {
            let (l, u) = (self.lower[var], self.upper[var]);
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(LpError::InvalidBounds {
                    var,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(())
    }

    /// Largest bound or row violation of `x`, each scaled by `max(1, |rhs|)`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &v) in x.iter().enumerate() {
            worst = worst.max((self.lower[i] - v) / self.lower[i].abs().max(1.0));
            worst = worst.max((v - self.upper[i]) / self.upper[i].abs().max(1.0));
        }
        for c in &self.constraints {
            let lhs = dot(&c.coeffs, x);
            let scale = c.rhs.abs().max(1.0);
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol / scale);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    fn without_point(status: LpStatus, n: usize) -> Self {
        Self {
            status,
            x: vec![0.0; n],
            objective_value: f64::NAN,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program has no variables")]
    Empty,
    #[error("{what} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite coefficient (row {row:?})")]
    NonFinite { row: Option<usize> },
    #[error("variable {var} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
    #[error("solution failed verification: violation {violation:e} exceeds tolerance")]
    Verification { violation: f64 },
    #[error("oracle supports at most {max} variables, got {n}")]
    TooLarge { n: usize, max: usize },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense LU with partial pivoting, row-major `n × n`. Returns `None` when a
/// pivot falls below `pivot_tol`.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub(crate) fn factor(mut a: Vec<f64>, n: usize, pivot_tol: f64) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= pivot_tol {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f != 0.0 {
                    a[i * n + k] = f;
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                } else {
                    a[i * n + k] = 0.0;
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    pub(crate) fn solve(&self, b: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            out[i] = b[self.perm[i]] - dot(row, &out[..i]);
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            out[i] = (out[i] - dot(row, &out[i + 1..n])) / self.lu[i * n + i];
        }
    }
}
