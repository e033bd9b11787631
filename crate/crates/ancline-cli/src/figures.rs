//! Figure data pipelines.
//!
//! Defaults follow the reference parameter set `N = 10^4`, `u = 8e-4`:
//! `anc-dist` sweeps `s` and reports the unfit population share against the
//! unfit-ancestor probability; `partial-fluxes` tabulates the per-level
//! fluxes at `s = 1.5e-3`, `nu1 = 0.99`; `mut-rates` and `mut-fluxes` sweep
//! `s` for `nu1` and its mirror `1 - nu1`.

use ancline::finite::FiniteSolution;
use ancline::params::FiniteParams;

use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureName {
    AncDist,
    PartialFluxes,
    MutRates,
    MutFluxes,
}

impl std::str::FromStr for FigureName {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anc-dist" => Ok(FigureName::AncDist),
            "partial-fluxes" => Ok(FigureName::PartialFluxes),
            "mut-rates" => Ok(FigureName::MutRates),
            "mut-fluxes" => Ok(FigureName::MutFluxes),
            other => Err(CliError::UnknownFigure(other.to_string())),
        }
    }
}

/// Figure inputs after merging overrides into the defaults.
#[derive(Debug, Clone, Copy)]
pub struct FigureOptions {
    pub pop_size: usize,
    pub u: f64,
    pub nu1: f64,
    /// Selection strength (only `partial-fluxes` uses a fixed `s`).
    pub s: f64,
    /// Sweep size including the `s = 0` point.
    pub points: usize,
    pub s_max: f64,
    /// Level cap for `partial-fluxes`.
    pub levels: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            pop_size: 10_000,
            u: 8e-4,
            nu1: 0.99,
            s: 1.5e-3,
            points: 60,
            s_max: 0.0175,
            levels: 100,
        }
    }
}

/// Smallest positive sweep point.
const SWEEP_FLOOR: f64 = 1e-5;

/// `points` selection strengths: 0 followed by a log-spaced grid on
/// `[1e-5, s_max]`; strictly increasing.
pub fn sweep_grid(points: usize, s_max: f64) -> Result<Vec<f64>> {
    if points < 3 || s_max <= SWEEP_FLOOR {
        return Err(CliError::InvalidOverride(format!(
            "sweep needs at least 3 points and s_max > {SWEEP_FLOOR:e}; got {points}, {s_max:e}"
        )));
    }
    let mut grid = vec![0.0];
    let lo = SWEEP_FLOOR.ln();
    let hi = s_max.ln();
    let m = points - 1;
    for i in 0..m - 1 {
        grid.push((lo + (hi - lo) * i as f64 / (m - 1) as f64).exp());
    }
    grid.push(s_max); // endpoint exact, not a ln/exp round trip
    Ok(grid)
}

pub fn run_figure(name: FigureName, opts: &FigureOptions) -> Result<Table> {
    match name {
        FigureName::AncDist => anc_dist(opts),
        FigureName::PartialFluxes => partial_fluxes(opts),
        FigureName::MutRates => rate_or_flux_sweep(opts, true),
        FigureName::MutFluxes => rate_or_flux_sweep(opts, false),
    }
}

fn anc_dist(opts: &FigureOptions) -> Result<Table> {
    let mut table = Table::new(
        "unfit population share vs unfit-ancestor probability",
        vec!["s".into(), "b1".into(), "p_a1".into()],
    );
    for s in sweep_grid(opts.points, opts.s_max)? {
        let p = FiniteParams::from_nu1(opts.pop_size, s, opts.u, opts.nu1)?;
        let sol = FiniteSolution::solve(&p)?;
        let (p_a1, _) = sol.ancestral_probs();
        table.push_row(vec![Cell::Num(s), Cell::Num(sol.b1()), Cell::Num(p_a1)]);
    }
    Ok(table)
}

fn partial_fluxes(opts: &FigureOptions) -> Result<Table> {
    let p = FiniteParams::from_nu1(opts.pop_size, opts.s, opts.u, opts.nu1)?;
    let sol = FiniteSolution::solve(&p)?;
    let fluxes = sol.mutation_fluxes();
    let mut table = Table::new(
        "per-level mutation fluxes",
        vec!["n".into(), "f10_n".into(), "f01_n".into()],
    );
    let cap = opts.levels.min(p.pop_size);
    for level in 1..=cap {
        table.push_row(vec![
            Cell::Int(level as i64),
            Cell::Num(fluxes.per_level_10[level]),
            Cell::Num(fluxes.per_level_01[level]),
        ]);
    }
    Ok(table)
}

fn compact(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn rate_or_flux_sweep(opts: &FigureOptions, rates: bool) -> Result<Table> {
    let nu_pair = [opts.nu1, 1.0 - opts.nu1];
    let headers = if rates {
        vec![
            "s".into(),
            format!("q10_nu1={}", compact(nu_pair[0])),
            format!("q01_nu1={}", compact(nu_pair[0])),
            format!("q10_nu1={}", compact(nu_pair[1])),
            format!("q01_nu1={}", compact(nu_pair[1])),
        ]
    } else {
        vec![
            "s".into(),
            format!("flux_nu1={}", compact(nu_pair[0])),
            format!("flux_nu1={}", compact(nu_pair[1])),
        ]
    };
    let mut table = Table::new(
        if rates {
            "marginal mutation rates on the ancestral line"
        } else {
            "marginal mutation fluxes on the ancestral line"
        },
        headers,
    );
    for s in sweep_grid(opts.points, opts.s_max)? {
        let mut row = vec![Cell::Num(s)];
        for nu1 in nu_pair {
            let p = FiniteParams::from_nu1(opts.pop_size, s, opts.u, nu1)?;
            let sol = FiniteSolution::solve(&p)?;
            if rates {
                let (q10, q01) = sol.mutation_rates()?;
                row.push(Cell::Num(q10));
                row.push(Cell::Num(q01));
            } else {
                row.push(Cell::Num(sol.mutation_fluxes().f10));
            }
        }
        table.push_row(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FigureOptions {
        FigureOptions {
            pop_size: 300,
            points: 12,
            ..FigureOptions::default()
        }
    }

    #[test]
    fn grid_is_strictly_increasing_and_starts_at_zero() {
        let g = sweep_grid(60, 0.0175).unwrap();
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 0.0);
        for w in g.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(g[59], 0.0175);
        assert!(sweep_grid(2, 0.0175).is_err());
    }

    #[test]
    fn defaults_match_the_reference_captions() {
        let d = FigureOptions::default();
        assert_eq!(d.pop_size, 10_000);
        assert_eq!(d.u, 8e-4);
        assert_eq!(d.nu1, 0.99);
        assert_eq!(d.s, 1.5e-3);
    }

    #[test]
    fn figure_names_parse() {
        assert_eq!(
            "anc-dist".parse::<FigureName>().unwrap(),
            FigureName::AncDist
        );
        assert!(matches!(
            "mystery".parse::<FigureName>(),
            Err(CliError::UnknownFigure(_))
        ));
    }

    #[test]
    fn anc_dist_keeps_the_ancestor_below_the_population_share() {
        let t = anc_dist(&small()).unwrap();
        let s = t.column(0);
        let b1 = t.column(1);
        let p_a1 = t.column(2);
        // curves coincide at s = 0 and separate for s > 0
        assert!((b1[0] - p_a1[0]).abs() < 1e-12);
        for i in 1..s.len() {
            assert!(p_a1[i] < b1[i], "row {i}");
        }
    }

    #[test]
    fn neutral_rates_row_collapses() {
        let opts = small();
        let t = rate_or_flux_sweep(&opts, true).unwrap();
        let q10 = t.column(1);
        let q01 = t.column(2);
        assert!((q10[0] - opts.u * (1.0 - opts.nu1)).abs() < 1e-18);
        assert!((q01[0] - opts.u * opts.nu1).abs() < 1e-18);
    }

    #[test]
    fn per_level_table_has_the_requested_levels() {
        let t = partial_fluxes(&small()).unwrap();
        assert_eq!(t.rows.len(), 100);
    }
}
