//! Experiment grids: every (filter × method × μ schedule × accelerator)
//! combination is run independently in parallel and written to its own CSV.
//!
//! Output layout, one directory per filter:
//!
//! ```text
//! OUT/<filter>/observation.pgm
//! OUT/<filter>/<method>_<mu>_<accel>.csv    per-iteration trace
//! OUT/<filter>/<method>_<mu>_<accel>.pgm    recovered image (optional)
//! OUT/<filter>/summary.csv                  final improvement per variant
//! ```

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use steffensen_core::{
    run_reverse, Accelerator, FilterSpec, ImageFilter, ImageMatrix, IterationTrace, Method,
    ReverseProblem, RunConfig, RunStatus, Scheme,
};

use crate::error::{CliError, Result};
use crate::io::save_image;
use crate::parse::{slug, MuSpec};

/// Column header of every trace CSV.
pub const TRACE_HEADER: [&str; 7] = [
    "n",
    "psnr_db",
    "pct_improvement",
    "lambda_raw",
    "lambda_clipped",
    "mu",
    "singular",
];

/// Column header of every summary CSV.
pub const SUMMARY_HEADER: [&str; 5] = ["method", "mu", "accel", "final_pct", "status"];

/// Summary marker for divergent variants.
pub const DIVERGED: &str = "DIVERGED";

/// Default iteration count per filter.
pub const DEFAULT_ITERS: usize = 300;

/// Builds a fresh filter instance for one run.
pub type FilterFactory = Box<dyn Fn() -> Box<dyn ImageFilter + Send> + Send + Sync>;

/// A filter entry of the grid.
pub struct NamedFilter {
    /// Label used in the summary and (slugged) as directory name.
    pub label: String,
    /// Iterations per run on this filter.
    pub iters: usize,
    /// Instance factory; each variant gets its own filter.
    pub make: FilterFactory,
}

impl NamedFilter {
    /// Wraps a built-in filter.
    pub fn builtin(spec: FilterSpec, iters: usize) -> Result<Self> {
        let f = spec.build()?;
        Ok(Self {
            label: spec.to_string(),
            iters,
            make: Box::new(move || Box::new(f)),
        })
    }

    /// Wraps an arbitrary filter constructor.
    pub fn custom<F>(
        label: impl Into<String>,
        iters: usize,
        make: impl Fn() -> F + Send + Sync + 'static,
    ) -> Self
    where
        F: ImageFilter + Send + 'static,
    {
        Self {
            label: label.into(),
            iters,
            make: Box::new(move || Box::new(make())),
        }
    }
}

/// The method × schedule × accelerator part of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    #[allow(missing_docs)]
    pub schemes: Vec<Scheme>,
    #[allow(missing_docs)]
    pub schedules: Vec<MuSpec>,
    #[allow(missing_docs)]
    pub accelerators: Vec<Accelerator>,
    /// Iterate snapshot stride passed to every run.
    pub snapshot_stride: usize,
    /// PSNR floor (dB) for divergence detection.
    pub psnr_floor: f64,
}

impl Grid {
    /// All 12 methods (default `τ`) × 4 schedules × 3 accelerators.
    pub fn full() -> Self {
        Self {
            schemes: Method::ALL
                .iter()
                .map(|&m| Scheme::Steffensen(m.into()))
                .collect(),
            schedules: MuSpec::GRID.to_vec(),
            accelerators: Accelerator::ALL.to_vec(),
            snapshot_stride: steffensen_core::reverse::DEFAULT_SNAPSHOT_STRIDE,
            psnr_floor: steffensen_core::reverse::DEFAULT_PSNR_FLOOR,
        }
    }

    /// Number of variants per filter.
    pub fn len(&self) -> usize {
        self.schemes.len() * self.schedules.len() * self.accelerators.len()
    }

    #[allow(missing_docs)]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Filter entry of a [`SweepConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterRun {
    #[allow(missing_docs)]
    pub spec: FilterSpec,
    #[allow(missing_docs)]
    pub iters: usize,
}

/// A complete sweep over built-in filters.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Ground-truth image; each filter fabricates its own observation from it.
    pub input: PathBuf,
    #[allow(missing_docs)]
    pub filters: Vec<FilterRun>,
    #[allow(missing_docs)]
    pub grid: Grid,
    #[allow(missing_docs)]
    pub out_dir: PathBuf,
    /// Also save observation and recovered images.
    pub write_images: bool,
}

/// How one variant ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Ran to the end; improvement of the last iterate.
    Completed(Option<f64>),
    /// Diverged at the given iteration.
    Diverged(usize),
    /// Panicked or could not be written.
    Failed(String),
}

/// Result row of one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantOutcome {
    #[allow(missing_docs)]
    pub filter: String,
    #[allow(missing_docs)]
    pub method: String,
    #[allow(missing_docs)]
    pub mu: String,
    #[allow(missing_docs)]
    pub accel: Accelerator,
    #[allow(missing_docs)]
    pub outcome: Outcome,
    #[allow(missing_docs)]
    pub trace_path: PathBuf,
}

/// Everything a sweep produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// In grid order: filter, method, schedule, accelerator.
    pub variants: Vec<VariantOutcome>,
    /// One per filter.
    pub summaries: Vec<PathBuf>,
}

/// Loads the input image and runs the grid on each built-in filter.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.filters.is_empty() {
        return Err(CliError::Config("no filters given".into()));
    }
    let truth = crate::io::load_image(&cfg.input)?;
    let filters = cfg
        .filters
        .iter()
        .map(|f| NamedFilter::builtin(f.spec, f.iters))
        .collect::<Result<Vec<_>>>()?;
    run_sweep_with_filters(&truth, &filters, &cfg.grid, &cfg.out_dir, cfg.write_images)
}

struct Job<'a> {
    filter: &'a NamedFilter,
    observation: &'a ImageMatrix,
    dir: &'a Path,
    scheme: Scheme,
    mu: MuSpec,
    accel: Accelerator,
}

/// Runs `grid` on each of `filters` against the ground truth `truth`.
///
/// Variant failures (divergence, panics, unwritable traces) are recorded in
/// the report and the summaries; only configuration problems and failure to
/// create directories or summaries are errors.
pub fn run_sweep_with_filters(
    truth: &ImageMatrix,
    filters: &[NamedFilter],
    grid: &Grid,
    out_dir: &Path,
    write_images: bool,
) -> Result<SweepReport> {
    if filters.is_empty() || grid.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    if filters.iter().any(|f| f.iters == 0) {
        return Err(CliError::Config(
            "iteration count must be at least 1".into(),
        ));
    }
    let mut dirs = Vec::with_capacity(filters.len());
    let mut observations = Vec::with_capacity(filters.len());
    for f in filters {
        let dir = out_dir.join(slug(&f.label));
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let observation = (f.make)().apply(truth);
        if write_images {
            save_image(&observation, dir.join("observation.pgm"))?;
        }
        dirs.push(dir);
        observations.push(observation);
    }

    let mut jobs = Vec::with_capacity(filters.len() * grid.len());
    for (i, filter) in filters.iter().enumerate() {
        for &scheme in &grid.schemes {
            for &mu in &grid.schedules {
                for &accel in &grid.accelerators {
                    jobs.push(Job {
                        filter,
                        observation: &observations[i],
                        dir: &dirs[i],
                        scheme,
                        mu,
                        accel,
                    });
                }
            }
        }
    }

    let variants: Vec<VariantOutcome> = jobs
        .par_iter()
        .map(|job| run_job(job, truth, grid, write_images))
        .collect();

    let mut summaries = Vec::with_capacity(filters.len());
    for (f, dir) in filters.iter().zip(&dirs) {
        let path = dir.join("summary.csv");
        let rows = variants.iter().filter(|v| v.filter == f.label);
        write_summary_csv(rows, &path)?;
        summaries.push(path);
    }
    Ok(SweepReport {
        variants,
        summaries,
    })
}

fn run_job(job: &Job<'_>, truth: &ImageMatrix, grid: &Grid, write_images: bool) -> VariantOutcome {
    let method = job.scheme.name().to_string();
    let mu = job.mu.label();
    let stem = format!("{method}_{mu}_{}", job.accel);
    let trace_path = job.dir.join(format!("{stem}.csv"));

    let attempt = panic::catch_unwind(AssertUnwindSafe(
        || -> std::result::Result<Outcome, String> {
            let filter = (job.filter.make)();
            let problem = ReverseProblem::new(job.observation.clone(), |img: &ImageMatrix| {
                filter.apply(img)
            })
            .and_then(|p| p.with_reference(truth.clone()))
            .map_err(|e| e.to_string())?;
            let mut cfg = RunConfig::new(job.scheme, job.filter.iters)
                .with_schedule(job.mu.resolve(job.filter.iters))
                .with_accelerator(job.accel);
            cfg.snapshot_stride = grid.snapshot_stride;
            cfg.divergence_psnr_floor = grid.psnr_floor;
            let trace = run_reverse(&problem, &cfg).map_err(|e| e.to_string())?;
            write_trace_csv(&trace, &trace_path).map_err(|e| e.to_string())?;
            if write_images {
                let img = problem
                    .to_image(&trace.final_iterate)
                    .map_err(|e| e.to_string())?;
                save_image(&img, job.dir.join(format!("{stem}.pgm"))).map_err(|e| e.to_string())?;
            }
            Ok(match trace.status {
                RunStatus::Completed => Outcome::Completed(trace.final_pct()),
                RunStatus::Diverged(n) => Outcome::Diverged(n),
            })
        },
    ));
    let outcome = match attempt {
        Ok(Ok(o)) => o,
        Ok(Err(msg)) => Outcome::Failed(msg),
        Err(payload) => Outcome::Failed(panic_message(payload.as_ref())),
    };
    VariantOutcome {
        filter: job.filter.label.clone(),
        method,
        mu,
        accel: job.accel,
        outcome,
        trace_path,
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    let detail = payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into());
    format!("panic: {detail}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| CliError::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes the per-iteration records of `trace`.
pub fn write_trace_csv(trace: &IterationTrace, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e: csv::Error| CliError::io(path, e);
    w.write_record(TRACE_HEADER).map_err(err)?;
    for r in &trace.records {
        w.write_record([
            r.n.to_string(),
            opt(r.psnr_db),
            opt(r.pct_improvement),
            num(r.lambda_raw),
            num(r.lambda_clipped),
            num(r.mu),
            u8::from(r.singular).to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Summary cells `(final_pct, status)` of an outcome.
pub fn summary_cells(outcome: &Outcome) -> (String, String) {
    match outcome {
        Outcome::Completed(pct) => (
            pct.map(|p| format!("{p:.4}")).unwrap_or_default(),
            "completed".into(),
        ),
        Outcome::Diverged(n) => (DIVERGED.into(), format!("diverged at {n}")),
        Outcome::Failed(msg) => ("FAILED".into(), format!("failed: {msg}")),
    }
}

fn write_summary_csv<'a>(
    rows: impl Iterator<Item = &'a VariantOutcome>,
    path: &Path,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = |e: csv::Error| CliError::io(path, e);
    w.write_record(SUMMARY_HEADER).map_err(err)?;
    for v in rows {
        let (pct, status) = summary_cells(&v.outcome);
        w.write_record([
            v.method.as_str(),
            v.mu.as_str(),
            v.accel.name(),
            &pct,
            &status,
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
