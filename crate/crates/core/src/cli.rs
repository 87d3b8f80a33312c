//! Command-line front end: `sample`, `volume`, `diagnose`, `couple`,
//! `schedule`. Exit codes: 0 success, 1 configuration error (bad flags,
//! unreadable body spec, missing seed), 2 numeric failure (projection
//! divergence, oracle acceptance collapse, degenerate estimates).
//!
//! Every data file a command writes is byte-identical across reruns with
//! the same flags, independent of `--threads`; wall-clock timing goes to
//! the stderr summary and the one `seconds` CSV column only.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::config::{parse_potential, reference_volume, resolve_body, ExperimentConfig};
use crate::diagnostics::{
    boundary_mass_check, checkpoint_time_integral, coupling_tail, escape_probability_check,
    local_time_budget, rejection_oracle, BoundReport,
};
use crate::output::{
    write_bound_reports_csv, write_events_jsonl, write_trajectory_csv, write_volume_rows_csv,
    VolumeRow,
};
use crate::potential::Potential;
use crate::rng::replica_seed;
use crate::sampler::{
    coupled_resolution_run, merge_tol, practical_eta, run_lmc, schedule_practical,
    schedule_theorem1, SamplerConfig, ScheduleCase,
};
use crate::volume::{build_schedule_with, estimate_volume, SamplerKind};
use crate::{Error, Result};

pub const SEED_ENV_VAR: &str = "LOGCAVE_SEED";

#[derive(Parser)]
#[command(
    name = "logcave",
    version,
    about = "Sampling toolkit for log-concave distributions over convex bodies",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the projected Langevin chain and write the trajectory as CSV
    Sample(SampleArgs),
    /// Estimate the volume of a body by Gaussian cooling
    Volume(VolumeArgs),
    /// Run the bound-check battery and write a pass/fail report
    Diagnose(DiagnoseArgs),
    /// Coupled-chain experiments: reflection coupling or resolution gaps
    Couple(CoupleArgs),
    /// Print step-size schedules (theoretical and practical)
    Schedule(ScheduleArgs),
}

#[derive(clap::Args)]
struct SampleArgs {
    /// Body alias (box{n}, ball{n}, boxball{n}) or body-file path
    #[arg(long)]
    body: String,
    /// uniform, gaussian, or gaussian:<sigma>
    #[arg(long, default_value = "uniform")]
    potential: String,
    /// Step size, or `auto` for the practical rule 1/(beta n^2)
    #[arg(long, default_value = "auto")]
    eta: String,
    /// Number of chain steps (the CSV gets steps+1 data rows)
    #[arg(long)]
    steps: usize,
    /// RNG seed; falls back to the LOGCAVE_SEED environment variable
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory CSV path
    #[arg(long)]
    out: String,
    /// Optional JSON-lines path for boundary local-time events
    #[arg(long)]
    events: Option<String>,
    /// Worker threads for replica-parallel stages (never changes outputs)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct VolumeArgs {
    #[arg(long)]
    body: String,
    /// lmc or hr
    #[arg(long, value_enum, default_value_t = SamplerArg::Lmc)]
    sampler: SamplerArg,
    #[arg(long)]
    seed: Option<u64>,
    /// Retained samples per cooling phase
    #[arg(long, default_value_t = 2000)]
    spp: usize,
    /// Output CSV path; omitted = write CSV to stdout
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct DiagnoseArgs {
    #[arg(long)]
    body: String,
    #[arg(long, default_value = "uniform")]
    potential: String,
    /// Step size for the chain-driven checks, or `auto`
    #[arg(long, default_value = "auto")]
    eta: String,
    /// Time horizon T for the local-time and escape checks
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Monte Carlo replicas for the chain-driven checks
    #[arg(long, default_value_t = 200)]
    replicas: usize,
    /// Shell width / escape radius gamma
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Exact oracle samples for the boundary-mass check
    #[arg(long, default_value_t = 100_000)]
    oracle_samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Report CSV path; omitted = write CSV to stdout
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct CoupleArgs {
    #[arg(long, value_enum, default_value_t = CoupleMode::Reflection)]
    mode: CoupleMode,
    #[arg(long)]
    body: String,
    #[arg(long, default_value = "uniform")]
    potential: String,
    #[arg(long, default_value = "auto")]
    eta: String,
    /// Initial separation |x - x'| (reflection mode)
    #[arg(long, default_value_t = 1.0)]
    dist: f64,
    /// Horizons at which to report P(tau > t), comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0])]
    times: Vec<f64>,
    /// Merge radius; defaults to 1e-3·sqrt(eta)
    #[arg(long)]
    merge_tol: Option<f64>,
    /// Refinement factor m for resolution mode (fine step = eta/m)
    #[arg(long, default_value_t = 16)]
    refine: usize,
    /// Horizon for resolution mode
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    #[arg(long, default_value_t = 2000)]
    replicas: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct ScheduleArgs {
    /// uniform / general: theoretical rates; practical: the 1/(beta n^2) rule
    #[arg(long, value_enum)]
    case: CaseArg,
    #[arg(long)]
    n: usize,
    /// Circumradius R (theoretical cases)
    #[arg(long = "R", default_value_t = 1.0)]
    r_big: f64,
    /// Target accuracy epsilon in (0,1) (theoretical cases)
    #[arg(long)]
    eps: Option<f64>,
    /// Lipschitz constant L of the potential gradient bound
    #[arg(long = "L", default_value_t = 0.0)]
    l: f64,
    /// Smoothness constant beta
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SamplerArg {
    Lmc,
    Hr,
}

impl From<SamplerArg> for SamplerKind {
    fn from(a: SamplerArg) -> Self {
        match a {
            SamplerArg::Lmc => SamplerKind::Lmc,
            SamplerArg::Hr => SamplerKind::HitAndRun,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum CoupleMode {
    Reflection,
    Resolution,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CaseArg {
    Uniform,
    General,
    Practical,
}

/// Parse and execute; never panics on bad input. This is the whole binary —
/// `main` just forwards `args_os` and exits with the returned code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Volume(args) => cmd_volume(args),
        Command::Diagnose(args) => cmd_diagnose(args),
        Command::Couple(args) => cmd_couple(args),
        Command::Schedule(args) => cmd_schedule(args),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(v) => v.parse::<u64>().map_err(|_| {
            Error::Invalid(format!("{SEED_ENV_VAR} must be an unsigned integer, got '{v}'"))
        }),
        Err(_) => Err(Error::Invalid(format!(
            "a seed is required: pass --seed or set {SEED_ENV_VAR}"
        ))),
    }
}

fn resolve_eta(spec: &str, potential: &Potential, n: usize) -> Result<f64> {
    if spec == "auto" {
        return Ok(practical_eta(potential, n));
    }
    let eta: f64 = spec
        .parse()
        .map_err(|_| Error::Invalid(format!("--eta must be a number or 'auto', got '{spec}'")))?;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Invalid(format!("--eta must be positive and finite, got {eta}")));
    }
    Ok(eta)
}

/// Run `f` inside a dedicated rayon pool when `--threads` is given. Results
/// never depend on the pool size: replica aggregation is index-ordered.
fn with_pool(threads: Option<usize>, f: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    match threads {
        None => f(),
        Some(0) => Err(Error::Invalid("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn out_writer(path: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Write a report either to the given path or to stdout.
fn emit_reports(reports: &[BoundReport], out: &Option<String>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = out_writer(path)?;
            write_bound_reports_csv(reports, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_bound_reports_csv(reports, &mut lock)?;
        }
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed)?;
    let (body, label) = resolve_body(&args.body)?;
    let potential = parse_potential(&args.potential, &body)?;
    let eta = resolve_eta(&args.eta, &potential, body.dim())?;
    let config = ExperimentConfig {
        command: "sample".into(),
        body: args.body.clone(),
        potential: args.potential.clone(),
        eta: Some(eta),
        steps: args.steps,
        seed,
        out: Some(args.out.clone()),
        threads: args.threads.unwrap_or(0),
    };
    with_pool(args.threads, || {
        let traj = run_lmc(&body, &potential, &SamplerConfig::new(eta, args.steps, seed))?;
        let mut w = out_writer(&args.out)?;
        write_trajectory_csv(&traj, &mut w)?;
        w.flush()?;
        if let Some(events_path) = &args.events {
            let mut ew = out_writer(events_path)?;
            write_events_jsonl(&traj.local_time, &mut ew)?;
            ew.flush()?;
        }
        eprintln!(
            "sample: body={label} eta={eta} steps={} events={} -> {} ({:.3}s) config={}",
            args.steps,
            traj.local_time.len(),
            args.out,
            started.elapsed().as_secs_f64(),
            config.to_json()
        );
        Ok(())
    })
}

fn cmd_volume(args: VolumeArgs) -> Result<()> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed)?;
    let (body, label) = resolve_body(&args.body)?;
    if args.spp == 0 {
        return Err(Error::Invalid("--spp must be at least 1".into()));
    }
    let kind: SamplerKind = args.sampler.into();
    with_pool(args.threads, || {
        let schedule = build_schedule_with(&body, args.spp, kind);
        let est = estimate_volume(&body, &schedule, seed)?;
        if est.base_fraction < 0.5 {
            eprintln!(
                "warning: only {:.1}% of anchor draws landed in the body; the declared inradius looks wrong",
                est.base_fraction * 100.0
            );
        }
        let row = VolumeRow {
            body: label.clone(),
            n: body.dim(),
            sampler: kind.as_str(),
            phases: schedule.phases(),
            samples: est.total_samples,
            volume: est.value,
            normalized: est.value / reference_volume(&label),
            seconds: est.wall_time,
            seed,
        };
        match &args.out {
            Some(path) => {
                let mut w = out_writer(path)?;
                write_volume_rows_csv(std::slice::from_ref(&row), &mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                write_volume_rows_csv(std::slice::from_ref(&row), &mut lock)?;
            }
        }
        eprintln!(
            "volume: body={label} sampler={} phases={} volume={:.4} normalized={:.4} ({:.3}s)",
            kind.as_str(),
            schedule.phases(),
            est.value,
            row.normalized,
            started.elapsed().as_secs_f64()
        );
        Ok(())
    })
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<()> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed)?;
    let (body, label) = resolve_body(&args.body)?;
    let potential = parse_potential(&args.potential, &body)?;
    let eta = resolve_eta(&args.eta, &potential, body.dim())?;
    if !(args.horizon > 0.0) || args.replicas == 0 {
        return Err(Error::Invalid("--horizon must be positive and --replicas at least 1".into()));
    }
    with_pool(args.threads, || {
        let steps = (args.horizon / eta).round().max(1.0) as usize;
        let trajectories = (0..args.replicas)
            .into_par_iter()
            .map(|i| {
                run_lmc(
                    &body,
                    &potential,
                    &SamplerConfig::new(eta, steps, replica_seed(seed, i)),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut reports =
            vec![local_time_budget(&trajectories, &body, &potential, args.horizon)];
        let oracle_seed = replica_seed(seed, args.replicas);
        let samples = rejection_oracle(&body, &potential, args.oracle_samples, oracle_seed)?;
        reports.push(boundary_mass_check(&samples, &body, &potential, args.gamma));
        reports.push(escape_probability_check(
            &body,
            &potential,
            &vec![0.0; body.dim()],
            args.gamma,
            args.horizon,
            args.replicas,
            eta,
            replica_seed(seed, args.replicas + 1),
        )?);
        let passed = reports.iter().filter(|r| r.pass).count();
        emit_reports(&reports, &args.out)?;
        eprintln!(
            "diagnose: body={label} eta={eta} checks={} passed={passed} ({:.3}s)",
            reports.len(),
            started.elapsed().as_secs_f64()
        );
        Ok(())
    })
}

fn cmd_couple(args: CoupleArgs) -> Result<()> {
    let started = Instant::now();
    let seed = resolve_seed(args.seed)?;
    let (body, label) = resolve_body(&args.body)?;
    let potential = parse_potential(&args.potential, &body)?;
    let eta = resolve_eta(&args.eta, &potential, body.dim())?;
    with_pool(args.threads, || match args.mode {
        CoupleMode::Reflection => {
            let mut x = vec![0.0; body.dim()];
            let mut x_other = vec![0.0; body.dim()];
            x[0] = args.dist / 2.0;
            x_other[0] = -args.dist / 2.0;
            if !body.membership(&x) || !body.membership(&x_other) {
                return Err(Error::Invalid(format!(
                    "--dist {} puts the start points outside the body",
                    args.dist
                )));
            }
            let radius = args.merge_tol.unwrap_or_else(|| merge_tol(eta));
            let reports = coupling_tail(
                &body,
                &potential,
                &x,
                &x_other,
                eta,
                &args.times,
                args.replicas,
                seed,
                radius,
            )?;
            let passed = reports.iter().filter(|r| r.pass).count();
            emit_reports(&reports, &args.out)?;
            eprintln!(
                "couple: mode=reflection body={label} eta={eta} merge_tol={radius:.3e} replicas={} horizons={} passed={passed} ({:.3}s)",
                args.replicas,
                reports.len(),
                started.elapsed().as_secs_f64()
            );
            Ok(())
        }
        CoupleMode::Resolution => {
            let runs = (0..args.replicas)
                .into_par_iter()
                .map(|i| {
                    coupled_resolution_run(
                        &body,
                        &potential,
                        eta,
                        args.refine,
                        args.horizon,
                        replica_seed(seed, i),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let gaps: Vec<f64> = runs.iter().map(|r| r.gap).collect();
            let mean = gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
            let var = if gaps.len() > 1 {
                gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (gaps.len() - 1) as f64
            } else {
                0.0
            };
            let se = (var / gaps.len().max(1) as f64).sqrt();
            let mean_integral = runs
                .iter()
                .map(|r| checkpoint_time_integral(&r.checkpoints))
                .sum::<f64>()
                / runs.len().max(1) as f64;
            let header = "eta,refine,horizon,replicas,mean_gap,stderr,mean_time_integral";
            let row = format!(
                "{},{},{},{},{},{},{}",
                eta, args.refine, args.horizon, args.replicas, mean, se, mean_integral
            );
            match &args.out {
                Some(path) => {
                    let mut w = out_writer(path)?;
                    writeln!(w, "{header}")?;
                    writeln!(w, "{row}")?;
                    w.flush()?;
                }
                None => {
                    println!("{header}");
                    println!("{row}");
                }
            }
            eprintln!(
                "couple: mode=resolution body={label} eta={eta} refine={} mean_gap={mean:.4e} ({:.3}s)",
                args.refine,
                started.elapsed().as_secs_f64()
            );
            Ok(())
        }
    })
}

fn cmd_schedule(args: ScheduleArgs) -> Result<()> {
    match args.case {
        CaseArg::Uniform | CaseArg::General => {
            let eps = args.eps.ok_or_else(|| {
                Error::Invalid("--eps is required for the uniform and general cases".into())
            })?;
            let case = match args.case {
                CaseArg::Uniform => ScheduleCase::Uniform,
                _ => ScheduleCase::General,
            };
            let (eta, steps) = schedule_theorem1(args.n, args.r_big, eps, case, args.l, args.beta)?;
            println!("eta = {eta:e}");
            println!("N = {steps:e}");
        }
        CaseArg::Practical => {
            let eta = schedule_practical(args.beta, args.n, 1.0);
            println!("eta = {eta}");
        }
    }
    Ok(())
}
