//! Independent statement of the daily problem for the vertex oracle.
//!
//! State of charge is eliminated by unrolling the storage balance, so only the
//! hourly decisions remain as variables:
//! `soc_h = k^(h+1) soc_0 + Σ_{j<=h} k^(h-j) (η c_j - d_j/η - r_j/η)`, with
//! `k = 1 - self_discharge`. Swap uses the literal per-hour bound
//! `r_h <= capacity` plus the daily cap row.

#![allow(dead_code)]

use swapval_core::lp::{LinearProgram, Relation};
use swapval_core::DayInput;

pub struct Condensed {
    pub lp: LinearProgram,
    pub hours: usize,
    pub reserve: bool,
}

/// Builds the condensed LP. `tie_break` is the per-MWh throughput penalty
/// (0 for the true profit).
pub fn condensed_day_lp(input: &DayInput, tie_break: f64) -> Condensed {
    let hours = input.lmp.len();
    let reserve = input.reserve_enabled;
    let b = &input.battery;
    let eta = b.efficiency;
    let k = 1.0 - b.self_discharge;
    let n = if reserve { 4 * hours } else { 3 * hours };
    let (c, d, r) = (|h: usize| h, |h: usize| hours + h, |h: usize| 2 * hours + h);
    let q = |h: usize| 3 * hours + h;

    let mut lp = LinearProgram::new(n);
    lp.objective_offset = -input.amdc * input.calendar_throughput;
    for h in 0..hours {
        let mu = input.amdc + tie_break;
        lp.objective[c(h)] = -input.lmp[h] - mu;
        lp.objective[d(h)] = input.lmp[h] - mu;
        lp.objective[r(h)] = input.swap.swap_price - input.swap.labor_cost - mu;
        lp.set_bounds(c(h), 0.0, b.power_limit_mw);
        lp.set_bounds(d(h), 0.0, b.power_limit_mw);
        lp.set_bounds(r(h), 0.0, input.capacity_now);
        if reserve {
            lp.objective[q(h)] = input.reserve_price[h];
            lp.set_bounds(q(h), 0.0, b.power_limit_mw);
        }
    }

    // soc_h as (terms, constant)
    let soc = |h: usize| -> (Vec<(usize, f64)>, f64) {
        let mut terms = Vec::new();
        for j in 0..=h {
            let decay = k.powi((h - j) as i32);
            terms.push((c(j), decay * eta));
            terms.push((d(j), -decay / eta));
            terms.push((r(j), -decay / eta));
        }
        (terms, k.powi(h as i32 + 1) * input.soc_start)
    };
    for h in 0..hours {
        let (terms, constant) = soc(h);
        lp.add_row(&terms, Relation::Ge, -constant);
        lp.add_row(&terms, Relation::Le, input.capacity_now - constant);
        if reserve {
            // q_h <= η soc_h
            let mut row: Vec<(usize, f64)> = terms.iter().map(|&(v, a)| (v, -eta * a)).collect();
            row.push((q(h), 1.0));
            lp.add_row(&row, Relation::Le, eta * constant);
            lp.add_row(&[(q(h), 1.0), (d(h), 1.0)], Relation::Le, b.power_limit_mw);
        }
    }
    let swaps: Vec<(usize, f64)> = (0..hours).map(|h| (r(h), 1.0)).collect();
    lp.add_row(&swaps, Relation::Le, input.swap.daily_swap_cap);
    Condensed { lp, hours, reserve }
}
