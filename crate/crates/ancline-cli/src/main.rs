use std::path::PathBuf;

use ancline::deterministic::det_rates_and_flux;
use ancline::diffusion::{DiffusionSolution, DEFAULT_TOL};
use ancline::finite::FiniteSolution;
use ancline::params::{DetParams, DiffusionParams, FiniteParams};
use ancline::sim::ancestral::{simulate_ancestral_line, EventLog, MIN_ANCESTRAL_FLIPS};
use ancline::sim::killed_asg::simulate_killed_asg;
use ancline::sim::line_counting::simulate_line_counting;
use ancline::sim::moran::simulate_moran;
use ancline::sim::{replicate_rng, RunLength, SimConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ancline_cli::compare::{compare_fluxes, find_s_for_b1};
use ancline_cli::config::{pick, require, FileConfig};
use ancline_cli::error::{CliError, Result};
use ancline_cli::figures::{run_figure, FigureName, FigureOptions};
use ancline_cli::summary::{
    det_summary, det_table, diffusion_summary, diffusion_table, finite_summary, finite_table,
};
use ancline_cli::table::{Cell, Table};
use ancline_cli::{svg, validate};

/// Stationary ancestral-line analysis of the two-type Moran model.
#[derive(Parser)]
#[command(name = "ancline", version, about)]
struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for the simulation subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug, Clone, Copy)]
struct FiniteFlags {
    /// Population size.
    #[arg(long = "N")]
    pop_size: Option<usize>,
    /// Selective advantage of the fit type.
    #[arg(long)]
    s: Option<f64>,
    /// Total per-individual mutation rate.
    #[arg(long)]
    u: Option<f64>,
    /// Probability that a mutation lands on the unfit type.
    #[arg(long)]
    nu1: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact finite-population solution (summary as JSON, sequences as CSV).
    Finite(FiniteFlags),
    /// Diffusion-limit solution.
    Diffusion {
        /// Rescaled selection strength.
        #[arg(long)]
        sigma: Option<f64>,
        /// Rescaled total mutation rate.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        nu1: Option<f64>,
        /// Truncation tolerance on the monitored head coefficients.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Deterministic-limit closed forms.
    Det {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        nu1: Option<f64>,
    },
    /// Figure data: anc-dist, partial-fluxes, mut-rates, or mut-fluxes.
    Figure {
        name: String,
        #[command(flatten)]
        params: FiniteFlags,
        /// Sweep size including the s = 0 point.
        #[arg(long)]
        points: Option<usize>,
        /// Upper end of the selection sweep.
        #[arg(long)]
        s_max: Option<f64>,
        /// Level cap for partial-fluxes.
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Pedigree vs phylogenetic mutation flux at a common total rate.
    CompareFluxes {
        #[command(flatten)]
        params: FiniteFlags,
        /// Solve for the s whose expected unfit share is this, then compare.
        #[arg(long, conflicts_with = "s")]
        b1: Option<f64>,
        /// Observed total per-individual mutation rate.
        #[arg(long, default_value_t = 1.6e-3)]
        total_rate: f64,
    },
    /// Selection strength with a prescribed expected unfit share b1 = E(Y/N).
    FindS {
        #[command(flatten)]
        params: FiniteFlags,
        /// Target unfit share, strictly between 0 and the neutral value nu1.
        #[arg(long)]
        b1: f64,
    },
    /// Oracle validation suites (exit code 3 if any check fails).
    Validate,
    /// Run one stochastic oracle.
    Simulate {
        #[command(subcommand)]
        which: SimCommand,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct SimFlags {
    #[command(flatten)]
    params: FiniteFlags,
    /// Run length in jump events.
    #[arg(long)]
    events: Option<u64>,
    /// Run length in model time.
    #[arg(long, conflicts_with = "events")]
    horizon: Option<f64>,
    /// Burn-in fraction.
    #[arg(long)]
    burn_in: Option<f64>,
    /// Independent replicates.
    #[arg(long)]
    replicates: Option<u32>,
}

#[derive(Subcommand)]
enum SimCommand {
    /// Gillespie run of the type-1 count; emits the occupancy law.
    Moran {
        #[command(flatten)]
        sim: SimFlags,
        /// Initial type-1 count (default: round(N nu1)).
        #[arg(long)]
        init: Option<usize>,
    },
    /// Line-counting chain of the pruned lookdown graph.
    Lines {
        #[command(flatten)]
        sim: SimFlags,
        /// Initial line count (default 1).
        #[arg(long)]
        init: Option<usize>,
    },
    /// Killed-graph absorption estimate of b_{n0}.
    KilledAsg {
        #[command(flatten)]
        sim: SimFlags,
        /// Sample size whose sampling probability is estimated.
        #[arg(long, default_value_t = 3)]
        n0: usize,
    },
    /// Typed forward system with backward ancestral tracing.
    Ancestry {
        #[command(flatten)]
        sim: SimFlags,
        /// Minimum ancestral mutation count before reporting.
        #[arg(long)]
        min_flips: Option<u64>,
        /// Dump the first replicate's event log to this file.
        #[arg(long)]
        dump_events: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version leave through the same path with code 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let file_format = file.run.format.as_deref().map(parse_format).transpose()?;
    let format = pick(cli.format, file_format, Format::Json);
    let out = cli
        .out
        .clone()
        .or_else(|| file.run.out.clone().map(PathBuf::from));
    let seed = pick(cli.seed, file.run.seed, 0xA5C1);

    let finite_params = |flags: &FiniteFlags| -> Result<FiniteParams> {
        let pop_size = require(flags.pop_size, file.params.pop_size, "N")?;
        let s = pick(flags.s, file.params.s, 0.0);
        let u = require(flags.u, file.params.u, "u")?;
        let nu1 = require(flags.nu1, file.params.nu1, "nu1")?;
        Ok(FiniteParams::from_nu1(pop_size, s, u, nu1)?)
    };

    match cli.command {
        Command::Finite(flags) => {
            let sol = FiniteSolution::solve(&finite_params(&flags)?)?;
            match format {
                Format::Json => emit(&out, &to_json(&finite_summary(&sol)?)),
                Format::Csv => emit(&out, &finite_table(&sol)?.to_csv()),
                Format::Svg => emit(&out, &svg::render(&finite_table(&sol)?, 0)),
            }
        }
        Command::Diffusion {
            sigma,
            theta,
            nu1,
            tol,
        } => {
            let p = DiffusionParams::from_nu1(
                require(sigma, file.params.sigma, "sigma")?,
                require(theta, file.params.theta, "theta")?,
                require(nu1, file.params.nu1, "nu1")?,
            )?;
            let sol = DiffusionSolution::solve(&p, tol.unwrap_or(DEFAULT_TOL))?;
            match format {
                Format::Json => emit(&out, &to_json(&diffusion_summary(&sol)?)),
                Format::Csv => emit(&out, &diffusion_table(&sol)?.to_csv()),
                Format::Svg => emit(&out, &svg::render(&diffusion_table(&sol)?, 0)),
            }
        }
        Command::Det { s, u, nu1 } => {
            let p = DetParams::from_nu1(
                pick(s, file.params.s, 0.0),
                require(u, file.params.u, "u")?,
                require(nu1, file.params.nu1, "nu1")?,
            )?;
            let sol = det_rates_and_flux(&p);
            match format {
                Format::Json => emit(&out, &to_json(&det_summary(&sol))),
                Format::Csv => emit(&out, &det_table(&sol).to_csv()),
                Format::Svg => Err(CliError::InvalidOverride(
                    "svg output needs a table with an x-axis; use csv or json here".into(),
                )),
            }
        }
        Command::Figure {
            name,
            params,
            points,
            s_max,
            levels,
        } => {
            let name: FigureName = name.parse()?;
            let defaults = FigureOptions::default();
            let opts = FigureOptions {
                pop_size: pick(params.pop_size, file.params.pop_size, defaults.pop_size),
                u: pick(params.u, file.params.u, defaults.u),
                nu1: pick(params.nu1, file.params.nu1, defaults.nu1),
                s: pick(params.s, file.params.s, defaults.s),
                points: pick(points, file.figure.points, defaults.points),
                s_max: pick(s_max, file.figure.s_max, defaults.s_max),
                levels: pick(levels, file.figure.levels, defaults.levels),
            };
            if params.s.is_some() && name != FigureName::PartialFluxes {
                return Err(CliError::InvalidOverride(
                    "--s only applies to partial-fluxes; the sweep figures scan s".into(),
                ));
            }
            let table = run_figure(name, &opts)?;
            match format {
                Format::Json => emit(&out, &table.to_json()),
                Format::Csv => emit(&out, &table.to_csv()),
                Format::Svg => emit(&out, &svg::render(&table, 0)),
            }
        }
        Command::CompareFluxes {
            params,
            b1,
            total_rate,
        } => {
            let mut p = finite_params(&params)?;
            if let Some(target) = b1 {
                p = p.with_s(find_s_for_b1(&p, target)?)?;
            }
            let cmp = compare_fluxes(&p, total_rate)?;
            match format {
                Format::Json => emit(&out, &to_json(&cmp)),
                Format::Csv => {
                    let mut t = Table::new(
                        "pedigree vs phylogenetic flux",
                        vec![
                            "s".into(),
                            "b1".into(),
                            "p_a1".into(),
                            "q10".into(),
                            "q01".into(),
                            "v0".into(),
                            "v1".into(),
                            "pedigree_flux".into(),
                            "phylo_flux".into(),
                            "ratio".into(),
                        ],
                    );
                    t.push_row(vec![
                        Cell::Num(cmp.s),
                        Cell::Num(cmp.b1),
                        Cell::Num(cmp.p_a1),
                        Cell::Num(cmp.q10),
                        Cell::Num(cmp.q01),
                        Cell::Num(cmp.v0),
                        Cell::Num(cmp.v1),
                        Cell::Num(cmp.pedigree_flux),
                        Cell::Num(cmp.phylo_flux),
                        Cell::Num(cmp.ratio),
                    ]);
                    emit(&out, &t.to_csv())
                }
                Format::Svg => Err(CliError::InvalidOverride(
                    "svg output needs a table with an x-axis; use csv or json here".into(),
                )),
            }
        }
        Command::FindS { params, b1 } => {
            let p = finite_params(&params)?;
            let s_star = find_s_for_b1(&p, b1)?;
            let achieved = FiniteSolution::solve(&p.with_s(s_star)?)?.b1();
            #[derive(serde::Serialize)]
            struct FindS {
                s_star: f64,
                target_b1: f64,
                achieved_b1: f64,
            }
            let result = FindS {
                s_star,
                target_b1: b1,
                achieved_b1: achieved,
            };
            match format {
                Format::Json => emit(&out, &to_json(&result)),
                Format::Csv => {
                    let mut t = Table::new(
                        "selection search",
                        vec!["s_star".into(), "target_b1".into(), "achieved_b1".into()],
                    );
                    t.push_row(vec![
                        Cell::Num(result.s_star),
                        Cell::Num(result.target_b1),
                        Cell::Num(result.achieved_b1),
                    ]);
                    emit(&out, &t.to_csv())
                }
                Format::Svg => Err(CliError::InvalidOverride(
                    "svg output needs a table with an x-axis; use csv or json here".into(),
                )),
            }
        }
        Command::Validate => {
            let report = validate::run_validation(seed)?;
            match format {
                Format::Json => emit(&out, &report.to_json())?,
                Format::Csv => emit(&out, &report.to_table().to_csv())?,
                Format::Svg => {
                    return Err(CliError::InvalidOverride(
                        "svg output is not defined for validation reports".into(),
                    ))
                }
            }
            if !report.passed {
                eprintln!("validation failed");
                return Ok(3);
            }
            return Ok(0);
        }
        Command::Simulate { which } => {
            let sim_cfg = |sim: &SimFlags, default: RunLength| -> Result<SimConfig> {
                let length = match (sim.events, sim.horizon, file.sim.events, file.sim.horizon) {
                    (Some(e), None, _, _) => RunLength::Events(e),
                    (None, Some(t), _, _) => RunLength::Horizon(t),
                    (None, None, Some(e), _) => RunLength::Events(e),
                    (None, None, None, Some(t)) => RunLength::Horizon(t),
                    (None, None, None, None) => default,
                    _ => unreachable!("events/horizon conflict is enforced by clap"),
                };
                Ok(SimConfig::new(
                    seed,
                    length,
                    pick(sim.burn_in, file.sim.burn_in, 0.1),
                    pick(sim.replicates, file.sim.replicates, 1),
                )?)
            };
            match which {
                SimCommand::Moran { sim, init } => {
                    let p = finite_params(&sim.params)?;
                    let cfg = sim_cfg(&sim, RunLength::Events(1_000_000))?;
                    let occ = simulate_moran(&p, &cfg, init)?;
                    let mut t = Table::new(
                        "empirical stationary occupancy",
                        vec!["k".into(), "pi_hat".into(), "stderr".into()],
                    );
                    for (k, e) in occ.occupancy.iter().enumerate() {
                        t.push_row(vec![
                            Cell::Int(k as i64),
                            Cell::Num(e.value),
                            Cell::Num(e.stderr),
                        ]);
                    }
                    emit_table(&out, format, &t)
                }
                SimCommand::Lines { sim, init } => {
                    let p = finite_params(&sim.params)?;
                    let cfg = sim_cfg(&sim, RunLength::Horizon(50_000.0))?;
                    let stats = simulate_line_counting(&p, &cfg, init)?;
                    let mut t = Table::new(
                        "empirical line-counting law",
                        vec![
                            "n".into(),
                            "w_hat".into(),
                            "w_stderr".into(),
                            "a_hat".into(),
                            "a_stderr".into(),
                        ],
                    );
                    for level in 1..=p.pop_size {
                        t.push_row(vec![
                            Cell::Int(level as i64),
                            Cell::Num(stats.w_hat[level].value),
                            Cell::Num(stats.w_hat[level].stderr),
                            Cell::Num(stats.a_hat[level].value),
                            Cell::Num(stats.a_hat[level].stderr),
                        ]);
                    }
                    emit_table(&out, format, &t)
                }
                SimCommand::KilledAsg { sim, n0 } => {
                    let p = finite_params(&sim.params)?;
                    let replicates = pick(sim.replicates, file.sim.replicates, 100_000);
                    let cfg = SimConfig::new(seed, RunLength::Events(0), 0.0, replicates)?;
                    let est = simulate_killed_asg(&p, n0, &cfg)?;
                    #[derive(serde::Serialize)]
                    struct Absorption {
                        n0: usize,
                        b_hat: f64,
                        stderr: f64,
                        replicates: u64,
                    }
                    emit(
                        &out,
                        &to_json(&Absorption {
                            n0,
                            b_hat: est.value,
                            stderr: est.stderr,
                            replicates: est.n,
                        }),
                    )
                }
                SimCommand::Ancestry {
                    sim,
                    min_flips,
                    dump_events,
                } => {
                    let p = finite_params(&sim.params)?;
                    let base = sim_cfg(&sim, RunLength::Horizon(20_000.0))?;
                    let cfg = SimConfig::new(
                        base.seed,
                        base.length,
                        base.burn_in,
                        base.replicates.max(2),
                    )?;
                    let est = simulate_ancestral_line(
                        &p,
                        &cfg,
                        min_flips.unwrap_or(MIN_ANCESTRAL_FLIPS),
                    )?;
                    if let Some(path) = dump_events {
                        let horizon = match cfg.length {
                            RunLength::Horizon(t) => t,
                            RunLength::Events(_) => unreachable!(),
                        };
                        let mut rng = replicate_rng(cfg.seed, 0);
                        let log = EventLog::generate(&p, horizon, &mut rng);
                        let file = std::fs::File::create(&path)?;
                        log.dump(std::io::BufWriter::new(file))?;
                    }
                    #[derive(serde::Serialize)]
                    struct Estimate {
                        value: f64,
                        stderr: f64,
                    }
                    #[derive(serde::Serialize)]
                    struct Ancestry {
                        p_a1: Estimate,
                        f10: Estimate,
                        f01: Estimate,
                        q10: Estimate,
                        q01: Estimate,
                        flips10: u64,
                        flips01: u64,
                        events: u64,
                    }
                    let wrap = |e: &ancline::sim::SimEstimate| Estimate {
                        value: e.value,
                        stderr: e.stderr,
                    };
                    emit(
                        &out,
                        &to_json(&Ancestry {
                            p_a1: wrap(&est.p_a1),
                            f10: wrap(&est.f10),
                            f01: wrap(&est.f01),
                            q10: wrap(&est.q10),
                            q01: wrap(&est.q01),
                            flips10: est.flips10,
                            flips01: est.flips01,
                            events: est.events,
                        }),
                    )
                }
            }
        }
    }?;
    Ok(0)
}

fn parse_format(s: &str) -> Result<Format> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        "svg" => Ok(Format::Svg),
        other => Err(CliError::Config(format!("unknown format '{other}'"))),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
        }
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
        }
    }
    Ok(())
}

fn emit_table(out: &Option<PathBuf>, format: Format, table: &Table) -> Result<()> {
    match format {
        Format::Json => emit(out, &table.to_json()),
        Format::Csv => emit(out, &table.to_csv()),
        Format::Svg => emit(out, &svg::render(table, 0)),
    }
}
