//! `esp`: compress files with the exponential-smoothing estimator, print
//! redundancy bounds, run the worst-case redundancy study and measure
//! empirical entropy.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 format or validation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use esp_core::bitseq::{empirical_entropy, pws_baseline, BitSequence, Partition};
use esp_core::bounds::{corollary_bound, optimal_fixed_bound, BoundInput};
use esp_core::codec::{compress_bytes, decompress_bytes};
use esp_core::experiment::{self, bound_csv, curve_csv, q_grid_with_step, ExperimentConfig};
use esp_core::schedule::{optimal_fixed_alpha, ScheduleKind};
use esp_core::{Error, Schedule};

#[derive(Parser)]
#[command(
    name = "esp",
    version,
    about = "Exponential-smoothing probability estimation for binary data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file as a flat bit stream.
    Compress(CompressArgs),
    /// Restore a file written by `compress`.
    Decompress { input: PathBuf, output: PathBuf },
    /// Print a closed-form redundancy bound.
    Bounds(BoundsArgs),
    /// Run the worst-case redundancy study.
    Simulate(SimulateArgs),
    /// Empirical entropy of a file, whole and per segment.
    Entropy {
        input: PathBuf,
        /// Segment boundaries in bits, e.g. `0,200,1000`.
        #[arg(long)]
        partition: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Fixed,
    Decaying,
    Count,
}

impl From<Kind> for ScheduleKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Fixed => ScheduleKind::Fixed,
            Kind::Decaying => ScheduleKind::Decaying,
            Kind::Count => ScheduleKind::Count,
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long, value_enum, default_value = "fixed")]
    schedule: Kind,
    /// Fixed smoothing rate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Count-smoothing factor.
    #[arg(long)]
    lambda: Option<f64>,
    /// Count-smoothing initial total exponent.
    #[arg(long, default_value_t = 1)]
    m: u32,
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    schedule: ScheduleArgs,
    /// Prior probability of a 1-bit.
    #[arg(long, default_value_t = 0.5)]
    prior: f64,
    /// Pick the rate that minimizes the bound for the input's bit length.
    #[arg(long)]
    auto_n: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    segments: usize,
    /// Smaller prior probability, in (0, 0.5].
    #[arg(long, default_value_t = 0.5)]
    pmin: f64,
    /// Write the bound for every prefix length `k = 1..n`.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Full grid: fraction step 0.05 and 100 repeats.
    #[arg(long)]
    full: bool,
    #[arg(long, value_enum)]
    schedule: Option<Kind>,
    /// Smoothing rate (`alpha` or `lambda`); default is the optimal fixed rate for `n`.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    /// Segment boundaries, e.g. `0,200,700,1000`.
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    q_step: Option<f64>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Curve CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the configuration and simulation count without running.
    #[arg(long)]
    plan: bool,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn build_schedule(args: &ScheduleArgs, auto_n: Option<usize>) -> Result<Schedule, Failure> {
    let auto = |explicit: Option<f64>, flag: &str| -> Result<f64, Failure> {
        match (explicit, auto_n) {
            (Some(_), Some(_)) => Err(Failure::Usage(format!("--{flag} conflicts with --auto-n"))),
            (Some(v), None) => Ok(v),
            (None, Some(n)) => Ok(optimal_fixed_alpha::<f64>(n.max(2))?.alpha),
            (None, None) => Err(Failure::Usage(format!("this schedule needs --{flag} or --auto-n"))),
        }
    };
    Ok(match args.schedule {
        Kind::Fixed => Schedule::fixed(auto(args.alpha, "alpha")?)?,
        Kind::Decaying => Schedule::decaying(),
        Kind::Count => Schedule::count(auto(args.lambda, "lambda")?, args.m)?,
    })
}

fn assumption_warning(s: &Schedule) {
    if s.violates_assumption() {
        let a1 = s.rate_at(1).unwrap_or(f64::NAN);
        eprintln!("warning: {s} has alpha_1 = {a1:.6} <= 1/2; the redundancy bounds do not apply");
    }
}

fn compress(args: &CompressArgs) -> CliResult {
    let data = read(&args.input)?;
    let bits = data.len() * 8;
    let auto_n = args.auto_n.then_some(bits);
    if args.auto_n && matches!(args.schedule.schedule, Kind::Decaying) {
        return Err(Failure::Usage("--auto-n has no effect on the decaying schedule".into()));
    }
    let schedule = build_schedule(&args.schedule, auto_n)?;
    assumption_warning(&schedule);
    let encoded = compress_bytes(&data, &schedule, args.prior)?;
    write(&args.output, &encoded.bytes)?;
    println!("schedule: {schedule}");
    println!("original bits: {bits}");
    println!("payload bits: {}", encoded.payload_bits());
    println!("ideal bits: {:.3}", encoded.ideal_bits);
    Ok(())
}

fn decompress(input: &Path, output: &Path) -> CliResult {
    let bytes = read(input)?;
    let data = decompress_bytes(&bytes)?;
    write(output, &data)?;
    println!("restored bits: {}", data.len() * 8);
    Ok(())
}

fn bounds(args: &BoundsArgs) -> CliResult {
    let input = BoundInput::new(args.n, args.segments, args.pmin)?;
    let auto = args.schedule.alpha.is_none() && args.schedule.lambda.is_none();
    let schedule = build_schedule(&args.schedule, auto.then_some(args.n))?;
    let relaxed = auto && matches!(args.schedule.schedule, Kind::Fixed);
    let at = |n: usize| -> Result<f64, Error> {
        let input = BoundInput { n, ..input };
        if relaxed {
            Ok(optimal_fixed_bound(&input))
        } else {
            corollary_bound(&schedule, &input)
        }
    };
    assumption_warning(&schedule);
    println!("schedule: {schedule}");
    println!("bound bits: {:.6}", at(args.n)?);
    if let Some(path) = &args.csv {
        let curve = (1..=args.n).map(at).collect::<Result<Vec<_>, _>>()?;
        write(path, bound_csv(&curve).as_bytes())?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> CliResult {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_kv_file(path)?,
        None => ExperimentConfig::reduced(ScheduleKind::Fixed),
    };
    if args.full {
        cfg.q_grid = q_grid_with_step(0.05)?;
        cfg.repeats = 100;
    }
    if let Some(k) = args.schedule {
        cfg.schedule = k.into();
    }
    if let Some(n) = args.n {
        cfg.n = n;
        if args.partition.is_none() && cfg.partition.n() != n {
            cfg.partition = Partition::single(n)?;
        }
    }
    if let Some(p) = &args.partition {
        cfg.partition = Partition::parse(p)?;
    }
    if let Some(step) = args.q_step {
        cfg.q_grid = q_grid_with_step(step)?;
    }
    cfg.rate = args.rate.or(cfg.rate);
    cfg.m = args.m.unwrap_or(cfg.m);
    cfg.eps = args.eps.unwrap_or(cfg.eps);
    cfg.repeats = args.repeats.unwrap_or(cfg.repeats);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.validate()?;

    let schedule = cfg.schedule_instance()?;
    assumption_warning(&schedule);
    println!("schedule: {schedule}");
    println!("partition: {}", cfg.partition);
    println!("simulations: {}", cfg.simulations());
    if args.plan {
        print!("{}", cfg.to_kv_string());
        return Ok(());
    }
    let summary = experiment::run(&cfg)?;
    let curve = &summary.curve;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!("max r_measured bits: {:.6}", max(&curve.r_measured));
    println!("max bound bits: {:.6}", max(&curve.bound));
    let (k, margin) = curve.min_margin();
    println!("min margin bits: {margin:.6} at k = {k}");
    println!("dominance: {}", curve.dominance_holds());
    if let Some(path) = &args.out {
        write(path, curve_csv(curve).as_bytes())?;
    }
    Ok(())
}

fn entropy(input: &Path, partition: Option<&str>) -> CliResult {
    let x = BitSequence::from_bytes(&read(input)?);
    let h: f64 = empirical_entropy(&x);
    let pws = match partition {
        Some(p) => pws_baseline(&x, &Partition::parse(p)?)?,
        None if x.is_empty() => 0.0,
        None => pws_baseline(&x, &Partition::single(x.len())?)?,
    };
    println!("bits: {}", x.len());
    println!("entropy bits: {h:.6}");
    println!("segment entropy bits: {pws:.6}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Compress(args) => compress(args),
        Command::Decompress { input, output } => decompress(input, output),
        Command::Bounds(args) => bounds(args),
        Command::Simulate(args) => simulate(args),
        Command::Entropy { input, partition } => entropy(input, partition.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Io { .. }) { 2 } else { 3 })
        }
    }
}
