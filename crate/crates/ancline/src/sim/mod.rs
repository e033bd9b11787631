//! Exact stochastic simulation oracles.
//!
//! Every analytic quantity in the solver modules has a Monte Carlo
//! counterpart here: the Moran type-count chain ([`moran`]), the
//! line-counting chain of the pruned lookdown graph ([`line_counting`]),
//! the killed-graph absorption estimator ([`killed_asg`]), and the typed
//! forward particle system with backward ancestral tracing ([`ancestral`]).

pub mod ancestral;
pub mod killed_asg;
pub mod line_counting;
pub mod moran;
mod rng;

pub use rng::replicate_rng;

use crate::error::{Error, Result};

/// Run length of a simulation: a number of jump events or a model-time
/// horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunLength {
    Events(u64),
    Horizon(f64),
}

/// Common simulation configuration.
///
/// `seed` and the replicate index determine the random stream completely:
/// runs are bit-reproducible for a fixed seed and replicate count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub length: RunLength,
    /// Fraction of the run discarded as burn-in (for the ancestral tracer:
    /// discarded at both ends of the window).
    pub burn_in: f64,
    pub replicates: u32,
}

impl SimConfig {
    pub fn new(seed: u64, length: RunLength, burn_in: f64, replicates: u32) -> Result<Self> {
        if !(0.0..=0.9).contains(&burn_in) {
            return Err(Error::InvalidParameter(format!(
                "burn-in fraction must lie in [0, 0.9], got {burn_in}"
            )));
        }
        if replicates < 1 {
            return Err(Error::InvalidParameter(
                "need at least one replicate".into(),
            ));
        }
        Ok(Self {
            seed,
            length,
            burn_in,
            replicates,
        })
    }
}

/// A Monte Carlo point estimate with its standard error and the sample or
/// event count behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
}

impl SimEstimate {
    /// Distance to `reference` in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.value == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value - reference).abs() / self.stderr
        }
    }
}

/// Number of batches used by the batch-means standard error of time
/// averages.
pub const BATCH_COUNT: usize = 32;

/// Batch accumulator for time averages of state indicators.
///
/// Estimates are ratios `sum_b Y_b / sum_b T_b` (time in state over total
/// time), with delta-method batch-means errors. The ratio form stays
/// unbiased when batch durations vary, which they do for event-count
/// batches of a chain with wildly different holding times.
#[derive(Debug, Clone)]
pub(crate) struct RatioBatches {
    sums: Vec<Vec<f64>>,
    durations: Vec<f64>,
}

impl RatioBatches {
    pub fn new(states: usize) -> Self {
        Self {
            sums: vec![Vec::new(); states],
            durations: Vec::new(),
        }
    }

    /// Appends one batch and zeroes the per-state accumulator.
    pub fn push_batch(&mut self, occ: &mut [f64], duration: f64) {
        debug_assert_eq!(occ.len(), self.sums.len());
        for (state, time_in_state) in occ.iter_mut().enumerate() {
            self.sums[state].push(*time_in_state);
            *time_in_state = 0.0;
        }
        self.durations.push(duration);
    }

    pub fn batch_count(&self) -> usize {
        self.durations.len()
    }

    fn ratio_estimate(&self, batch_sums: &[f64], events: u64) -> SimEstimate {
        let b = self.durations.len();
        let total_time: f64 = self.durations.iter().sum();
        let value = batch_sums.iter().sum::<f64>() / total_time;
        let stderr = if b > 1 {
            let mean_duration = total_time / b as f64;
            let dev2: f64 = batch_sums
                .iter()
                .zip(&self.durations)
                .map(|(y, t)| {
                    let d = y - value * t;
                    d * d
                })
                .sum();
            (dev2 / (b as f64 * (b as f64 - 1.0))).sqrt() / mean_duration
        } else {
            f64::INFINITY
        };
        SimEstimate {
            value,
            stderr,
            n: events,
        }
    }

    /// Occupancy estimate of one state.
    pub fn estimate(&self, state: usize, events: u64) -> SimEstimate {
        self.ratio_estimate(&self.sums[state], events)
    }

    /// Occupancy estimate of the union of `states`.
    pub fn estimate_union(
        &self,
        states: std::ops::RangeInclusive<usize>,
        events: u64,
    ) -> SimEstimate {
        let b = self.batch_count();
        let mut combined = vec![0.0; b];
        for state in states {
            for (acc, y) in combined.iter_mut().zip(&self.sums[state]) {
                *acc += y;
            }
        }
        self.ratio_estimate(&combined, events)
    }
}

/// Mean and standard error across independent replicate estimates.
pub(crate) fn across_replicates(values: &[f64], events: u64) -> SimEstimate {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1.0);
        (var / r).sqrt()
    } else {
        f64::INFINITY
    };
    SimEstimate {
        value: mean,
        stderr,
        n: events,
    }
}
