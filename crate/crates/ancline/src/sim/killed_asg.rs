//! Absorption estimator for the killed ancestral selection graph.
//!
//! The line-counting process of the killed graph branches at `s n (N-n)/N`,
//! coalesces or prunes down at `n(n-1)/N + u nu1 n`, and is killed (sent to
//! the cemetery) at `u nu0 n`. The sampling probability `b_n` equals the
//! probability of absorption at 0 rather than in the cemetery, so each
//! replicate is one absorption run of the embedded jump chain.

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::FiniteParams;
use crate::sim::rng::replicate_rng;
use crate::sim::{SimConfig, SimEstimate};

/// Estimates `b_{n0}` as the fraction of `cfg.replicates` killed-graph runs
/// absorbed at 0; the standard error is binomial.
pub fn simulate_killed_asg(p: &FiniteParams, n0: usize, cfg: &SimConfig) -> Result<SimEstimate> {
    if n0 < 1 || n0 > p.pop_size {
        return Err(Error::InvalidParameter(format!(
            "killed-graph start {n0} outside [1, {}]",
            p.pop_size
        )));
    }
    let nn = p.pop_size as f64;
    let replicates = cfg.replicates as u64;
    let mut absorbed_at_zero = 0u64;
    for replicate in 0..replicates {
        let mut rng = replicate_rng(cfg.seed, replicate);
        let mut n = n0;
        loop {
            if n == 0 {
                absorbed_at_zero += 1;
                break;
            }
            let nf = n as f64;
            let up = p.s * nf * (nn - nf) / nn;
            let down = nf * (nf - 1.0) / nn + p.u * p.nu1 * nf;
            let kill = p.u * p.nu0 * nf;
            let draw = rng.random::<f64>() * (up + down + kill);
            if draw < up {
                n += 1;
            } else if draw < up + down {
                n -= 1;
            } else {
                break; // cemetery
            }
        }
    }
    let value = absorbed_at_zero as f64 / replicates as f64;
    Ok(SimEstimate {
        value,
        stderr: (value * (1.0 - value) / replicates as f64).sqrt(),
        n: replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{sampling_probs, SamplingMethod};
    use crate::sim::RunLength;

    fn cfg(seed: u64, replicates: u32) -> SimConfig {
        SimConfig::new(seed, RunLength::Events(0), 0.0, replicates).unwrap()
    }

    #[test]
    fn vanishing_kill_rate_means_certain_absorption_at_zero() {
        let p = FiniteParams::new(40, 0.3, 0.2, 1e-15, 1.0 - 1e-15).unwrap();
        let est = simulate_killed_asg(&p, 5, &cfg(1, 2_000)).unwrap();
        assert!(est.value > 0.999, "{}", est.value);
    }

    #[test]
    fn estimates_decrease_with_the_sample_size() {
        // more lines, more chances to be killed
        let p = FiniteParams::from_nu1(30, 0.1, 0.5, 0.3).unwrap();
        let e1 = simulate_killed_asg(&p, 1, &cfg(2, 20_000)).unwrap();
        let e4 = simulate_killed_asg(&p, 4, &cfg(3, 20_000)).unwrap();
        let e12 = simulate_killed_asg(&p, 12, &cfg(4, 20_000)).unwrap();
        assert!(e1.value > e4.value);
        assert!(e4.value + 3.0 * (e4.stderr + e12.stderr) > e12.value);
        assert!(e1.value - e12.value > 0.05);
    }

    #[test]
    fn absorption_frequency_matches_the_sampling_recursion() {
        let p = FiniteParams::from_nu1(50, 0.5, 0.2, 0.7).unwrap();
        let exact = sampling_probs(&p, SamplingMethod::Recursion).unwrap();
        let est = simulate_killed_asg(&p, 3, &cfg(7, 40_000)).unwrap();
        assert!(
            est.z_score(exact[3]) <= 3.0,
            "{} +- {} vs {}",
            est.value,
            est.stderr,
            exact[3]
        );
    }
}
