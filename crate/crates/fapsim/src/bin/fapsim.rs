//! Command-line front end: single-point model queries, scenario runs, batch
//! experiments, and movement traces.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fapsim::config::SimConfig;
use fapsim::energy::{optimal_speed, Radius, SpeedBounds, UavKind, UavModel};
use fapsim::error::{Error, Result};
use fapsim::io::{
    parse_scenario_file, trace_csv, write_batch_outputs, write_run_outputs, UavFilter,
};
use fapsim::planner::plan;
use fapsim::radio::McsTable;
use fapsim::scenario::run_batch;

#[derive(Parser)]
#[command(name = "fapsim", version, about = "UAV propulsion energy simulator for flying access points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UavArg {
    Rotary,
    Fixed,
    Both,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON file overriding airframe or link parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV file (`mcs,min_snr_db,rate_mbps`) replacing the built-in MCS table.
    #[arg(long)]
    mcs_table: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the power model at a radius: optimal speed, or a given speed.
    Model {
        #[arg(long, value_enum)]
        uav: UavArg,
        /// Turn radius in meters, or `inf` for straight flight.
        #[arg(long)]
        radius: String,
        /// Evaluate at this speed instead of optimizing.
        #[arg(long)]
        speed: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Plan a scenario file and write report.json, results.csv, energy.svg.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        uav: UavArg,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Plan seeded random scenarios and write aggregate statistics.
    Batch {
        /// Ground users per scenario.
        #[arg(long)]
        gus: usize,
        /// Number of scenarios.
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write a `t,x,y,z,speed` trace along one FAP's selected trajectory.
    Trace {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        uav: UavArg,
        /// FAP index within the plan.
        #[arg(long)]
        fap: usize,
        /// Trace duration, seconds.
        #[arg(long)]
        duration: f64,
        /// Sample step, seconds.
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn load_setup(common: &CommonArgs) -> Result<(SimConfig, McsTable)> {
    let config = match &common.config {
        Some(path) => SimConfig::from_path(path)?,
        None => SimConfig::default(),
    };
    let table = match &common.mcs_table {
        Some(path) => McsTable::from_csv_path(path)?,
        None => McsTable::default_table(),
    };
    Ok((config, table))
}

fn parse_radius(text: &str) -> Result<Radius> {
    if text.eq_ignore_ascii_case("inf") || text.eq_ignore_ascii_case("infinite") {
        return Ok(Radius::Straight);
    }
    let r: f64 = text
        .parse()
        .map_err(|_| Error::Validation(format!("radius must be a number or `inf`, got `{text}`")))?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidRadius(r));
    }
    Ok(Radius::Turn(r))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Model {
            uav,
            radius,
            speed,
            common,
        } => {
            let (config, _) = load_setup(&common)?;
            let radius = parse_radius(&radius)?;
            let models: Vec<UavModel> = match uav {
                UavArg::Rotary => vec![UavModel::Rotary(config.rotary.clone())],
                UavArg::Fixed => vec![UavModel::Fixed(config.fixed.clone())],
                UavArg::Both => vec![
                    UavModel::Rotary(config.rotary.clone()),
                    UavModel::Fixed(config.fixed.clone()),
                ],
            };
            for model in models {
                match speed {
                    Some(v) => {
                        let p = model.power(v, radius)?;
                        println!(
                            "uav={} radius={} speed_mps={:.4} power_w={:.4}",
                            model.kind(),
                            radius,
                            v,
                            p
                        );
                    }
                    None => {
                        let (v, p) = optimal_speed(&model, radius, SpeedBounds::default())?;
                        println!(
                            "uav={} radius={} v_opt_mps={:.4} p_min_w={:.4}",
                            model.kind(),
                            radius,
                            v,
                            p
                        );
                    }
                }
            }
            Ok(())
        }
        Command::Run {
            scenario,
            uav,
            out,
            common,
        } => {
            let (config, table) = load_setup(&common)?;
            let sc = parse_scenario_file(&scenario)?;
            let plans = plan(&sc, &config, &table)?;
            let filter = match uav {
                UavArg::Rotary => UavFilter::Rotary,
                UavArg::Fixed => UavFilter::Fixed,
                UavArg::Both => UavFilter::Both,
            };
            write_run_outputs(&out, &sc, &plans, filter)?;
            for (i, p) in plans.iter().enumerate() {
                let fmt = |s: &Option<fapsim::planner::Selection>| match s {
                    Some(sel) => {
                        format!("{} {:.1} kJ/h", sel.kind, sel.energy_per_hour_j / 1000.0)
                    }
                    None => "infeasible".to_string(),
                };
                println!(
                    "fap={} group={:?} radius={} rotary=[{}] fixed=[{}]",
                    i,
                    p.group,
                    p.circular_radius_m
                        .map(|r| format!("{r:.1}"))
                        .unwrap_or_else(|| "-".into()),
                    fmt(&p.rotary),
                    fmt(&p.fixed)
                );
            }
            println!(
                "wrote report.json, results.csv, energy.svg to {}",
                out.display()
            );
            Ok(())
        }
        Command::Batch {
            gus,
            count,
            seed,
            out,
            common,
        } => {
            let (config, table) = load_setup(&common)?;
            if gus == 0 || count == 0 {
                return Err(Error::Validation(
                    "batch needs gus >= 1 and count >= 1".into(),
                ));
            }
            let stats = run_batch(gus, count, seed, &config, &table);
            write_batch_outputs(&out, &stats)?;
            println!(
                "gus={} scenarios={} both_feasible={} infeasible_fixed={} rotary_failed={}",
                stats.gu_count,
                stats.scenario_count,
                stats.both_feasible_count,
                stats.infeasible_fixed_count,
                stats.rotary_failed_count
            );
            if let Some(p) = &stats.percentiles {
                println!(
                    "percent_increase p5={:.1} p25={:.1} p50={:.1} p75={:.1} p95={:.1}",
                    p.p5, p.p25, p.p50, p.p75, p.p95
                );
            }
            println!("wrote report.json, results.csv to {}", out.display());
            Ok(())
        }
        Command::Trace {
            scenario,
            uav,
            fap,
            duration,
            dt,
            out,
            common,
        } => {
            let (config, table) = load_setup(&common)?;
            let kind = match uav {
                UavArg::Rotary => UavKind::Rotary,
                UavArg::Fixed => UavKind::Fixed,
                UavArg::Both => {
                    return Err(Error::Validation(
                        "trace needs a single uav type, rotary or fixed".into(),
                    ))
                }
            };
            let sc = parse_scenario_file(&scenario)?;
            let plans = plan(&sc, &config, &table)?;
            let p = plans.get(fap).ok_or_else(|| {
                Error::Validation(format!(
                    "fap index {fap} out of range, plan has {} FAPs",
                    plans.len()
                ))
            })?;
            let csv = trace_csv(p, fap, kind, &config, duration, dt)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join(format!("trace_fap{fap}_{kind}.csv"));
            std::fs::write(&path, csv)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
