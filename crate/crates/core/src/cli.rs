//! Command-line front end. `run` parses arguments, dispatches, and maps
//! outcomes to exit codes: 0 success, 2 infeasible, 3 limit reached with a
//! gap, 4 bad input, 1 anything else.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use crate::diagram::{build_diagram, DiagramFormat};
use crate::error::{invalid, Error, Result};
use crate::flows::FlowSolution;
use crate::instance::{ingest, GridSpec, IngestConfig, Instance, LatLon, Mode};
use crate::metrics::{compute_metrics, unused_bike_ratio, write_metrics_csv, MetricsRecord};
use crate::milp::{formulate_instance, write_lp};
use crate::oracle::{verify_solution, VerificationReport};
use crate::pipeline::solve_instance;
use crate::solver::{solve_lp, LpStatus, MilpLimits, MilpStatus};
use crate::sweep::{
    append_sweep_records, compare_dock, run_sweep, status_label, SweepRecord, SweepSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bikeflow", version, about = "Bike relocation planning on a time-expanded network")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Dockless,
    Docked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate trip records into an instance file.
    Ingest {
        #[arg(long)]
        trips: PathBuf,
        /// Optional bike position fixes (bike_id,time,lat,lon).
        #[arg(long)]
        bikes: Option<PathBuf>,
        /// South-west grid corner as `lat,lon`.
        #[arg(long, value_parser = parse_latlon)]
        grid_origin: LatLon,
        #[arg(long, default_value_t = 300.0)]
        cell_m: f64,
        /// Grid extent in cells, east and north.
        #[arg(long, default_value_t = 100)]
        cols: u32,
        #[arg(long, default_value_t = 100)]
        rows: u32,
        #[arg(long, default_value_t = 5)]
        interval_min: u32,
        /// Horizon start, `HH:MM`.
        #[arg(long, value_parser = parse_clock)]
        start: u32,
        /// Horizon end, `HH:MM`.
        #[arg(long, value_parser = parse_clock)]
        end: u32,
        #[arg(long, default_value_t = 10)]
        min_trips: u32,
        #[arg(long, default_value_t = 2)]
        trikes: u32,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the ingestion report (also printed).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Solve an instance and write solution.json, metrics.csv, summary.json.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Overrides the instance's mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Uniform dock cap for `--mode docked`.
        #[arg(long)]
        cap: Option<u32>,
        /// Seconds.
        #[arg(long, default_value_t = 1800.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        #[arg(long, default_value_t = 1_000_000)]
        node_limit: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a one-factor sweep described by a JSON spec.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Docked revenue over a range of caps against the dockless reference.
    CompareDock {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated caps, ascending; `inf` for uncapped.
        #[arg(long, value_delimiter = ',', value_parser = parse_cap)]
        caps: Vec<Option<u32>>,
        /// Shrink the fleet so no site starts with more bikes than this.
        #[arg(long, default_value_t = 29)]
        max_initial: u32,
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Export the time-space diagram of a solution.
    ExportDiagram {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Write the program in LP format.
    WriteLp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_latlon(s: &str) -> std::result::Result<LatLon, String> {
    let (lat, lon) = s.split_once(',').ok_or("expected lat,lon")?;
    let lat: f64 = lat.trim().parse().map_err(|e| format!("bad latitude: {e}"))?;
    let lon: f64 = lon.trim().parse().map_err(|e| format!("bad longitude: {e}"))?;
    Ok(LatLon { lat, lon })
}

fn parse_clock(s: &str) -> std::result::Result<u32, String> {
    let (h, m) = s.split_once(':').ok_or("expected HH:MM")?;
    let h: u32 = h.parse().map_err(|e| format!("bad hour: {e}"))?;
    let m: u32 = m.parse().map_err(|e| format!("bad minute: {e}"))?;
    if h > 24 || m > 59 || h * 60 + m > 24 * 60 {
        return Err(format!("{s} is not a time of day"));
    }
    Ok(h * 60 + m)
}

fn parse_cap(s: &str) -> std::result::Result<Option<u32>, String> {
    match s.trim() {
        "inf" | "none" => Ok(None),
        v => v.parse().map(Some).map_err(|e| format!("bad cap {v}: {e}")),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InfeasibleByConstruction(_) => EXIT_INFEASIBLE,
        Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_INPUT,
        _ => EXIT_OTHER,
    }
}

fn limits(time_limit: f64, gap: f64, node_limit: u64) -> Result<MilpLimits> {
    if !(time_limit > 0.0) || !(gap >= 0.0) {
        return Err(invalid("time limit must be positive and gap nonnegative"));
    }
    Ok(MilpLimits { time_limit: Duration::from_secs_f64(time_limit), node_limit, gap, ..MilpLimits::default() })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Ingest {
            trips,
            bikes,
            grid_origin,
            cell_m,
            cols,
            rows,
            interval_min,
            start,
            end,
            min_trips,
            trikes,
            out,
            report,
        } => {
            let mut config = IngestConfig::new(GridSpec { origin: grid_origin, cell_m, cols, rows }, start, end);
            config.interval_minutes = interval_min;
            config.min_trips = min_trips;
            config.trike_count = trikes;
            let trip_file = BufReader::new(File::open(&trips)?);
            let (instance, rep) = match bikes {
                Some(path) => {
                    let mut r = BufReader::new(File::open(path)?);
                    ingest(trip_file, Some(&mut r), &config)?
                }
                None => ingest(trip_file, None, &config)?,
            };
            instance.write_json(&out)?;
            if let Some(path) = report {
                write_json(&path, &rep)?;
            }
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(EXIT_OK)
        }
        Command::Solve { instance, mode, cap, time_limit, gap, node_limit, out } => {
            let mut inst = Instance::read_json(&instance)?;
            match (mode, cap) {
                (Some(ModeArg::Dockless), None) => inst.mode = Mode::Dockless,
                (Some(ModeArg::Docked), Some(c)) => inst.mode = Mode::uniform_cap(inst.num_sites(), c),
                (Some(ModeArg::Docked), None) => {
                    if inst.mode == Mode::Dockless {
                        return Err(invalid("--mode docked needs --cap or an instance with dock caps"));
                    }
                }
                (_, Some(_)) => return Err(invalid("--cap only applies with --mode docked")),
                (None, None) => {}
            }
            solve_command(&inst, &limits(time_limit, gap, node_limit)?, &out)
        }
        Command::Sweep { spec, workers } => {
            let spec = SweepSpec::read_json(&spec)?;
            let base = Instance::read_json(&spec.instance)?;
            let grid = spec.grid(&base);
            let response = spec.demand_response.clone().unwrap_or_default();
            let workers = workers.or(spec.workers).unwrap_or(1);
            let results = run_sweep(&base, &grid, &spec.limits.to_limits()?, &response, workers)?;
            let run_id = spec.run_id.as_deref().unwrap_or("sweep");
            let records: Vec<SweepRecord> = results.iter().map(|r| SweepRecord::new(run_id, r)).collect();
            append_sweep_records(&spec.output, &records)?;
            for r in &records {
                println!(
                    "{} {}={} status={} revenue_cents={}",
                    r.run_id,
                    r.axis,
                    r.value,
                    r.status,
                    r.revenue_cents.map_or("-".to_string(), |c| c.to_string())
                );
            }
            let limited = results.iter().any(|r| !matches!(r.status, MilpStatus::Optimal | MilpStatus::Infeasible));
            Ok(if limited { EXIT_LIMIT } else { EXIT_OK })
        }
        Command::CompareDock { instance, caps, max_initial, time_limit, gap, workers, out } => {
            if caps.is_empty() {
                return Err(invalid("--caps needs at least one value"));
            }
            let base = Instance::read_json(&instance)?;
            let cmp = compare_dock(&base, &caps, max_initial, &limits(time_limit, gap, 1_000_000)?, workers)?;
            let show = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.2}"));
            println!("dockless: {} revenue={}", status_label(&cmp.dockless.status), show(cmp.dockless.revenue));
            for c in &cmp.caps {
                let cap = c.cap.map_or("inf".to_string(), |v| v.to_string());
                println!("cap {cap}: {} revenue={}", status_label(&c.status), show(c.revenue));
            }
            match cmp.converged_at {
                Some(cap) => println!("matches dockless from cap {}", cap.map_or("inf".to_string(), |v| v.to_string())),
                None => println!("no cap matched the dockless revenue"),
            }
            if let Some(path) = out {
                write_json(&path, &cmp)?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { instance, solution } => {
            let inst = Instance::read_json(&instance)?;
            let flows = FlowSolution::read_json(&solution)?;
            let report = verify_solution(&inst, &flows);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.feasible { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::ExportDiagram { instance, solution, out, format } => {
            let inst = Instance::read_json(&instance)?;
            let flows = FlowSolution::read_json(&solution)?;
            let diagram = build_diagram(&inst, &flows)?;
            let format = match format {
                FormatArg::Json => DiagramFormat::Json,
                FormatArg::Dot => DiagramFormat::Dot,
            };
            fs::write(&out, diagram.render(format)?)?;
            info!(
                "wrote {} nodes, {} rider arcs, {} trike arcs to {}",
                diagram.nodes.len(),
                diagram.rider_arcs.len(),
                diagram.trike_arcs.len(),
                out.display()
            );
            Ok(EXIT_OK)
        }
        Command::WriteLp { instance, out } => {
            let inst = Instance::read_json(&instance)?;
            let formulation = formulate_instance(&inst)?;
            fs::write(&out, write_lp(&formulation.problem))?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    status: MilpStatus,
    objective: Option<f64>,
    bound: Option<f64>,
    gap: Option<f64>,
    nodes: u64,
    lp_iterations: u64,
    lp_relaxation: Option<f64>,
    verification: Option<VerificationReport>,
    unused_bike_ratio: Option<Vec<f64>>,
    note: Option<String>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn solve_command(inst: &Instance, limits: &MilpLimits, out: &Path) -> Result<i32> {
    fs::create_dir_all(out)?;
    let summary_path = out.join("summary.json");
    let solved = match solve_instance(inst, limits) {
        Ok(s) => s,
        Err(Error::InfeasibleByConstruction(why)) => {
            let summary = Summary {
                status: MilpStatus::Infeasible,
                objective: None,
                bound: None,
                gap: None,
                nodes: 0,
                lp_iterations: 0,
                lp_relaxation: None,
                verification: None,
                unused_bike_ratio: None,
                note: Some(why.clone()),
            };
            write_json(&summary_path, &summary)?;
            eprintln!("infeasible: {why}");
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e) => return Err(e),
    };
    let sol = &solved.solution;
    info!("solve finished in {:.3}s", sol.elapsed.as_secs_f64());
    let lp = solve_lp(&solved.formulation.problem.relaxation());
    let mut summary = Summary {
        status: sol.status,
        objective: finite(sol.objective),
        bound: finite(sol.bound),
        gap: finite(sol.gap),
        nodes: sol.nodes,
        lp_iterations: sol.lp_iterations,
        lp_relaxation: (lp.status == LpStatus::Optimal).then_some(lp.objective),
        verification: solved.verification.clone(),
        unused_bike_ratio: None,
        note: None,
    };
    if let Some(flows) = &solved.flows {
        flows.write_json(out.join("solution.json"))?;
        let metrics = compute_metrics(inst, flows)?;
        let file = File::create(out.join("metrics.csv"))?;
        write_metrics_csv(file, &[MetricsRecord::new("solve", &metrics)])?;
        summary.unused_bike_ratio = Some(unused_bike_ratio(inst, flows));
    }
    let code = match sol.status {
        MilpStatus::Optimal => EXIT_OK,
        MilpStatus::Feasible { gap } if gap <= limits.gap => EXIT_OK,
        MilpStatus::Feasible { .. } | MilpStatus::LimitReached => EXIT_LIMIT,
        MilpStatus::Infeasible => {
            summary.note = Some("branch-and-bound exhausted the tree without an integer solution".into());
            EXIT_INFEASIBLE
        }
        MilpStatus::Unbounded | MilpStatus::NumericalFailure => EXIT_OTHER,
    };
    write_json(&summary_path, &summary)?;
    println!(
        "status={} objective={} gap={} nodes={}",
        status_label(&sol.status),
        summary.objective.map_or("-".to_string(), |v| format!("{v:.6}")),
        summary.gap.map_or("-".to_string(), |v| format!("{v:.3e}")),
        sol.nodes
    );
    Ok(code)
}
