//! Gillespie simulation of the line-counting process `L` of the pruned
//! lookdown graph.
//!
//! Transition rates out of `n`:
//! up `s n (N-n)/N`; down-by-one `n(n-1)/N + u nu1 (n-1) + u nu0 1_{n>1}`;
//! and a jump to each `j in [n-2]` at `u nu0`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::FiniteParams;
use crate::sim::rng::{exp_time, replicate_rng};
use crate::sim::{RatioBatches, RunLength, SimConfig, SimEstimate, BATCH_COUNT};

/// Jump classes out of a state, for rate bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpClass {
    Up = 0,
    DownOne = 1,
    JumpBelow = 2,
}

/// Empirical stationary law of `L` with per-state jump-class counts.
#[derive(Debug, Clone)]
pub struct LineCountingStats {
    /// `w_hat[n]` estimates `P(L_inf = n)`; entry 0 is padding.
    pub w_hat: Vec<SimEstimate>,
    /// `a_hat[n]` estimates `P(L_inf > n)` for `n = 0..=N`.
    pub a_hat: Vec<SimEstimate>,
    /// `class_counts[n][class]` counts observed jumps out of state `n`.
    pub class_counts: Vec<[u64; 3]>,
    pub events: u64,
}

fn rates(p: &FiniteParams, n: usize) -> (f64, f64, f64) {
    let nn = p.pop_size as f64;
    let nf = n as f64;
    let up = p.s * nf * (nn - nf) / nn;
    let down =
        nf * (nf - 1.0) / nn + p.u * p.nu1 * (nf - 1.0) + if n > 1 { p.u * p.nu0 } else { 0.0 };
    let jumps = if n > 2 {
        (n - 2) as f64 * p.u * p.nu0
    } else {
        0.0
    };
    (up, down, jumps)
}

/// Simulates `L` over a time horizon and returns the time-weighted law with
/// batch-means errors. The chain absorbs at 1 when `s = 0`; the remaining
/// horizon is then attributed to state 1.
pub fn simulate_line_counting(
    p: &FiniteParams,
    cfg: &SimConfig,
    init: Option<usize>,
) -> Result<LineCountingStats> {
    let horizon = match cfg.length {
        RunLength::Horizon(t) => t,
        RunLength::Events(_) => {
            return Err(Error::InvalidParameter(
                "line-counting simulation needs a time horizon (the chain can absorb)".into(),
            ))
        }
    };
    let n_max = p.pop_size;
    let start = init.unwrap_or(1).clamp(1, n_max);

    let mut batches = RatioBatches::new(n_max + 1);
    let mut class_counts = vec![[0u64; 3]; n_max + 1];
    let mut events = 0u64;

    for replicate in 0..cfg.replicates {
        let mut rng = replicate_rng(cfg.seed, replicate as u64);
        let mut state = start;
        let burn_time = horizon * cfg.burn_in;
        let measure_time = horizon - burn_time;

        let mut t = 0.0;
        while t < burn_time {
            let (up, down, jumps) = rates(p, state);
            let total = up + down + jumps;
            if total == 0.0 {
                break; // absorbed during burn-in
            }
            t += exp_time(&mut rng, total);
            state = jump(&mut rng, p, state, up, down, total, None);
        }

        let batch_len = measure_time / BATCH_COUNT as f64;
        let mut occ = vec![0.0; n_max + 1];
        let mut elapsed = 0.0;
        let mut batch_end = batch_len;
        loop {
            let (up, down, jumps) = rates(p, state);
            let total = up + down + jumps;
            let dt = if total == 0.0 {
                measure_time - elapsed // absorbed: rest of the window
            } else {
                exp_time(&mut rng, total)
            };
            let t_next = (elapsed + dt).min(measure_time);
            let mut lo = elapsed;
            while batch_end <= t_next {
                occ[state] += batch_end - lo;
                lo = batch_end;
                batches.push_batch(&mut occ, batch_len);
                batch_end += batch_len;
            }
            occ[state] += t_next - lo;
            if elapsed + dt >= measure_time {
                break;
            }
            elapsed += dt;
            state = jump(&mut rng, p, state, up, down, total, Some(&mut class_counts));
            events += 1;
        }
    }

    let w_hat: Vec<SimEstimate> = (0..=n_max)
        .map(|state| batches.estimate(state, events))
        .collect();
    // tails as per-batch unions, so their errors are batch-means errors too
    let a_hat: Vec<SimEstimate> = (0..=n_max)
        .map(|level| batches.estimate_union(level + 1..=n_max, events))
        .collect();
    Ok(LineCountingStats {
        w_hat,
        a_hat,
        class_counts,
        events,
    })
}

fn jump<R: Rng>(
    rng: &mut R,
    p: &FiniteParams,
    state: usize,
    up: f64,
    down: f64,
    total: f64,
    counts: Option<&mut Vec<[u64; 3]>>,
) -> usize {
    let draw = rng.random::<f64>() * total;
    let (class, next) = if draw < up {
        (JumpClass::Up, state + 1)
    } else if draw < up + down {
        (JumpClass::DownOne, state - 1)
    } else {
        // uniform over targets 1..=state-2, each at rate u nu0
        let offset = ((draw - up - down) / (p.u * p.nu0)) as usize;
        (JumpClass::JumpBelow, 1 + offset.min(state - 3))
    };
    if let Some(c) = counts {
        c[state][class as usize] += 1;
    }
    next
}
