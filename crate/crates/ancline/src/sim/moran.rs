//! Gillespie simulation of the type-1 count `Y`.

use rand::Rng;

use crate::error::Result;
use crate::finite::{birth_rate, death_rate};
use crate::params::FiniteParams;
use crate::sim::rng::{exp_time, replicate_rng};
use crate::sim::{RatioBatches, RunLength, SimConfig, SimEstimate, BATCH_COUNT};

/// Time-weighted stationary occupancy estimates, one per state `k = 0..=N`.
#[derive(Debug, Clone)]
pub struct MoranOccupancy {
    pub occupancy: Vec<SimEstimate>,
    pub events: u64,
    pub measured_time: f64,
}

impl MoranOccupancy {
    pub fn values(&self) -> Vec<f64> {
        self.occupancy.iter().map(|e| e.value).collect()
    }
}

/// Total variation distance between two distributions on the same support.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Simulates the birth-death chain of the type-1 count and returns the
/// post-burn-in occupancy law with batch-means standard errors.
///
/// `init` is the starting count (default: `round(N nu1)`). With several
/// replicates, each runs on its own random stream and contributes its own
/// batches.
pub fn simulate_moran(
    p: &FiniteParams,
    cfg: &SimConfig,
    init: Option<usize>,
) -> Result<MoranOccupancy> {
    let n = p.pop_size;
    let start = init.unwrap_or((n as f64 * p.nu1).round() as usize).min(n);
    let birth: Vec<f64> = (0..=n).map(|k| birth_rate(p, k)).collect();
    let death: Vec<f64> = (0..=n).map(|k| death_rate(p, k)).collect();

    let mut batches = RatioBatches::new(n + 1);
    let mut events_total = 0u64;
    let mut measured_time = 0.0;

    for replicate in 0..cfg.replicates {
        let mut rng = replicate_rng(cfg.seed, replicate as u64);
        let mut k = start;
        let mut occ = vec![0.0; n + 1];

        match cfg.length {
            RunLength::Events(total) => {
                let burn = (total as f64 * cfg.burn_in).round() as u64;
                for _ in 0..burn {
                    let rate = birth[k] + death[k];
                    let _ = exp_time(&mut rng, rate);
                    k = step(&mut rng, k, birth[k], rate);
                }
                let measured = total - burn;
                let per_batch = (measured / BATCH_COUNT as u64).max(1);
                let mut batch_time = 0.0;
                let mut in_batch = 0u64;
                for _ in 0..measured {
                    let rate = birth[k] + death[k];
                    let dt = exp_time(&mut rng, rate);
                    occ[k] += dt;
                    batch_time += dt;
                    measured_time += dt;
                    k = step(&mut rng, k, birth[k], rate);
                    events_total += 1;
                    in_batch += 1;
                    if in_batch == per_batch {
                        batches.push_batch(&mut occ, batch_time);
                        batch_time = 0.0;
                        in_batch = 0;
                    }
                }
                // a trailing partial batch (< per_batch events) is dropped
            }
            RunLength::Horizon(total) => {
                let burn_time = total * cfg.burn_in;
                let measure_time = total - burn_time;
                let mut t = 0.0;
                while t < burn_time {
                    let rate = birth[k] + death[k];
                    t += exp_time(&mut rng, rate);
                    k = step(&mut rng, k, birth[k], rate);
                }
                let batch_len = measure_time / BATCH_COUNT as f64;
                let mut elapsed = 0.0;
                let mut batch_end = batch_len;
                loop {
                    let rate = birth[k] + death[k];
                    let dt = exp_time(&mut rng, rate);
                    let t_next = (elapsed + dt).min(measure_time);
                    let mut lo = elapsed;
                    // split the holding interval across batch boundaries
                    while batch_end <= t_next {
                        occ[k] += batch_end - lo;
                        lo = batch_end;
                        batches.push_batch(&mut occ, batch_len);
                        batch_end += batch_len;
                    }
                    occ[k] += t_next - lo;
                    measured_time += t_next - elapsed;
                    if elapsed + dt >= measure_time {
                        break;
                    }
                    elapsed += dt;
                    k = step(&mut rng, k, birth[k], rate);
                    events_total += 1;
                }
            }
        }
    }

    let occupancy = (0..=n)
        .map(|state| batches.estimate(state, events_total))
        .collect();
    Ok(MoranOccupancy {
        occupancy,
        events: events_total,
        measured_time,
    })
}

fn step<R: Rng>(rng: &mut R, k: usize, birth: f64, total: f64) -> usize {
    if rng.random::<f64>() * total < birth {
        k + 1
    } else {
        k - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::moran_stationary;
    use crate::sim::RunLength;

    #[test]
    fn two_individual_neutral_law_is_uniform() {
        let p = FiniteParams::from_nu1(2, 0.0, 1.0, 0.5).unwrap();
        let cfg = SimConfig::new(17, RunLength::Events(400_000), 0.1, 1).unwrap();
        let occ = simulate_moran(&p, &cfg, None).unwrap();
        for k in 0..=2 {
            let e = occ.occupancy[k];
            assert!(
                (e.value - 1.0 / 3.0).abs() <= 3.0 * e.stderr,
                "state {k}: {} +- {}",
                e.value,
                e.stderr
            );
        }
    }

    #[test]
    fn occupancy_matches_analytic_law() {
        let p = FiniteParams::from_nu1(40, 0.1, 0.05, 0.8).unwrap();
        let cfg = SimConfig::new(3, RunLength::Events(2_000_000), 0.1, 1).unwrap();
        let occ = simulate_moran(&p, &cfg, None).unwrap();
        let exact = moran_stationary(&p);
        let tv = total_variation(&occ.values(), &exact);
        assert!(tv < 0.02, "TV = {tv}");
        for k in 0..=40 {
            if exact[k] < 1e-3 {
                continue;
            }
            let e = occ.occupancy[k];
            assert!(
                e.z_score(exact[k]) <= 4.0,
                "state {k}: {} +- {} vs {}",
                e.value,
                e.stderr,
                exact[k]
            );
        }
    }

    #[test]
    fn slow_metastable_law_converges_with_enough_events() {
        // nu1 = 0.99 makes the law bimodal (interior lobe plus a sticky top
        // lobe); lobe switches are rare, so this needs a long run
        let p = FiniteParams::from_nu1(100, 0.05, 0.02, 0.99).unwrap();
        let cfg = SimConfig::new(1, RunLength::Events(16_000_000), 0.1, 1).unwrap();
        let occ = simulate_moran(&p, &cfg, None).unwrap();
        let exact = moran_stationary(&p);
        let tv = total_variation(&occ.values(), &exact);
        assert!(tv < 0.02, "TV = {tv}");
        for k in 0..=100 {
            if exact[k] < 1e-3 {
                continue;
            }
            let e = occ.occupancy[k];
            assert!(
                e.z_score(exact[k]) <= 4.0,
                "state {k}: {} +- {} vs {}",
                e.value,
                e.stderr,
                exact[k]
            );
        }
    }

    #[test]
    fn nearly_absorbing_top_state_dominates() {
        // nu0 -> 0 starting at k = N: leaving N is an O(nu0) event, so the
        // time-weighted occupancy concentrates there
        let p = FiniteParams::new(30, 0.2, 0.05, 1e-9, 1.0 - 1e-9).unwrap();
        let cfg = SimConfig::new(5, RunLength::Events(100_000), 0.0, 1).unwrap();
        let occ = simulate_moran(&p, &cfg, Some(30)).unwrap();
        assert!(
            occ.occupancy[30].value > 0.99,
            "{}",
            occ.occupancy[30].value
        );
        // and the analytic law concentrates there too
        let exact = moran_stationary(&p);
        assert!(exact[30] > 0.99);
    }

    #[test]
    fn horizon_mode_matches_event_mode() {
        let p = FiniteParams::from_nu1(20, 0.3, 0.1, 0.6).unwrap();
        let by_events = simulate_moran(
            &p,
            &SimConfig::new(9, RunLength::Events(600_000), 0.1, 1).unwrap(),
            None,
        )
        .unwrap();
        let by_time = simulate_moran(
            &p,
            &SimConfig::new(10, RunLength::Horizon(40_000.0), 0.1, 1).unwrap(),
            None,
        )
        .unwrap();
        let exact = moran_stationary(&p);
        assert!(total_variation(&by_events.values(), &exact) < 0.02);
        assert!(total_variation(&by_time.values(), &exact) < 0.02);
    }
}
