use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use steffensen_cli::parse::{parse_filter_run, parse_list, parse_tau};
use steffensen_cli::sweep::{summary_cells, write_trace_csv, FilterRun, Outcome, DEFAULT_ITERS};
use steffensen_cli::{
    load_image, parse_filter, parse_mu, parse_scheme, save_image, CliError, Grid, SweepConfig,
};
use steffensen_core::pattern::checker_gradient;
use steffensen_core::reverse::{DEFAULT_PSNR_FLOOR, DEFAULT_SNAPSHOT_STRIDE};
use steffensen_core::{apply_filter, Accelerator, ReverseProblem, RunConfig, RunStatus};

/// Vector Steffensen reverse filtering.
#[derive(Parser, Debug)]
#[command(name = "steffensen", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reverse a filter on one observation with a single method.
    Run(RunArgs),
    /// Run a method × μ × accelerator grid on one or more filters.
    Sweep(SweepArgs),
    /// Apply a filter to an image (fabricates an observation).
    Filter(FilterArgs),
    /// Write the built-in checkerboard/gradient test pattern.
    Pattern(PatternArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Observed (filtered) image, PGM or PNG.
    #[arg(long)]
    input: PathBuf,
    /// Ground truth for PSNR tracking.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Black-box filter, e.g. `gaussian:sigma=1`.
    #[arg(long)]
    filter: String,
    /// A1…A4, B1…B4, C1…C3, EPS, T, TDA or S.
    #[arg(long, default_value = "A1")]
    method: String,
    /// 1, ed1, ed2, cheby or cheby:P=64.
    #[arg(long, default_value = "1")]
    mu: String,
    /// none, nesterov or afm.
    #[arg(long, default_value = "none")]
    accel: String,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    iters: usize,
    /// Hard limit on the step scalar (`inf` disables it).
    #[arg(long, default_value = "0.75")]
    tau: String,
    /// PSNR (dB) below which the run counts as divergent.
    #[arg(long, default_value_t = DEFAULT_PSNR_FLOOR)]
    floor: f64,
    /// Output directory for trace.csv and recovered.pgm.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Ground-truth image; uses the built-in 64×64 pattern when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Filter spec, repeatable; append `@N` for a per-filter iteration count.
    #[arg(long = "filter", required = true)]
    filters: Vec<String>,
    /// Comma-separated methods.
    #[arg(
        long = "method",
        default_value = "A1,A2,A3,A4,B1,B2,B3,B4,C1,C2,C3,EPS"
    )]
    methods: String,
    /// Comma-separated μ schedules.
    #[arg(long, default_value = "1,ed1,ed2,cheby")]
    mu: String,
    /// Comma-separated accelerators.
    #[arg(long, default_value = "none,nesterov,afm")]
    accel: String,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    iters: usize,
    #[arg(long, default_value = "0.75")]
    tau: String,
    #[arg(long, default_value_t = DEFAULT_PSNR_FLOOR)]
    floor: f64,
    /// Keep the iterate every this many iterations.
    #[arg(long, default_value_t = DEFAULT_SNAPSHOT_STRIDE)]
    stride: usize,
    /// Skip writing observation and recovered images.
    #[arg(long)]
    no_images: bool,
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FilterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    filter: String,
    /// Output image (.pgm or .png).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PatternArgs {
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// Output image (.pgm or .png).
    #[arg(long)]
    out: PathBuf,
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
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => sweep(args),
        Command::Filter(args) => filter(args),
        Command::Pattern(args) => pattern(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        reason: e.to_string(),
    })
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let spec = parse_filter(&args.filter)?;
    let scheme = parse_scheme(&args.method, parse_tau(&args.tau)?)?;
    let mu = parse_mu(&args.mu)?;
    let accel: Accelerator = args.accel.parse()?;
    let mut cfg = RunConfig::new(scheme, args.iters)
        .with_schedule(mu.resolve(args.iters))
        .with_accelerator(accel);
    cfg.divergence_psnr_floor = args.floor;
    cfg.validate()?;

    let observation = load_image(&args.input)?;
    let mut problem = ReverseProblem::new(observation, spec.build()?)?;
    if let Some(path) = &args.reference {
        problem = problem.with_reference(load_image(path)?)?;
    }
    let trace = steffensen_core::run_reverse(&problem, &cfg)?;

    create_dir(&args.out)?;
    write_trace_csv(&trace, &args.out.join("trace.csv"))?;
    save_image(
        &problem.to_image(&trace.final_iterate)?,
        args.out.join("recovered.pgm"),
    )?;

    let outcome = match trace.status {
        RunStatus::Completed => Outcome::Completed(trace.final_pct()),
        RunStatus::Diverged(n) => Outcome::Diverged(n),
    };
    let (pct, status) = summary_cells(&outcome);
    let last = trace.records.last();
    println!(
        "{} mu={} accel={} filter={}: {} iterations, {status}, final_pct={}, residual={:e}",
        scheme.name(),
        mu,
        accel,
        spec,
        trace.records.len(),
        if pct.is_empty() { "n/a" } else { &pct },
        last.map_or(f64::NAN, |r| r.residual_norm),
    );
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let tau = parse_tau(&args.tau)?;
    let filters = args
        .filters
        .iter()
        .map(|s| parse_filter_run(s, args.iters).map(|(spec, iters)| FilterRun { spec, iters }))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = Grid {
        schemes: parse_list(&args.methods, |s| parse_scheme(s, tau))?,
        schedules: parse_list(&args.mu, parse_mu)?,
        accelerators: parse_list(&args.accel, |s| {
            s.parse::<Accelerator>().map_err(Into::into)
        })?,
        snapshot_stride: args.stride,
        psnr_floor: args.floor,
    };
    create_dir(&args.out)?;
    let input = match args.input {
        Some(path) => path,
        None => {
            let path = args.out.join("pattern.pgm");
            save_image(&checker_gradient(64), &path)?;
            path
        }
    };
    let cfg = SweepConfig {
        input,
        filters,
        grid,
        out_dir: args.out,
        write_images: !args.no_images,
    };
    let report = steffensen_cli::run_sweep(&cfg)?;
    let diverged = report
        .variants
        .iter()
        .filter(|v| matches!(v.outcome, Outcome::Diverged(_)))
        .count();
    let failed = report
        .variants
        .iter()
        .filter(|v| matches!(v.outcome, Outcome::Failed(_)))
        .count();
    println!(
        "{} variants, {diverged} diverged, {failed} failed",
        report.variants.len()
    );
    for s in &report.summaries {
        println!("summary: {}", s.display());
    }
    Ok(())
}

fn filter(args: FilterArgs) -> Result<(), CliError> {
    let spec = parse_filter(&args.filter)?;
    let img = load_image(&args.input)?;
    save_image(&apply_filter(spec, &img)?, &args.out)
}

fn pattern(args: PatternArgs) -> Result<(), CliError> {
    if args.size == 0 {
        return Err(CliError::Config("size must be at least 1".into()));
    }
    save_image(&checker_gradient(args.size), &args.out)
}
