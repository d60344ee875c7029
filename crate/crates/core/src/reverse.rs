//! Semi-blind reverse filtering.
//!
//! Given an observation `x₀ = f(x*)` of an unknown image `x*` through a filter
//! `f` that can be called but not inspected, the fixed-point map
//!
//! ```text
//! φ(x) = x + (x₀ − f(x))
//! ```
//!
//! has `x*` as a fixed point. Each Steffensen step needs the residuals
//! `a = x₀ − f(x)` and `b = x₀ − f(x + a)`, i.e. two filter calls.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::filter::ImageFilter;
use crate::metrics::{pct_improvement, psnr};
use crate::schedule::{Accelerator, AfmState, Schedule};
use crate::steffensen::{vector_step, AbcTriple, MethodSpec};
use crate::vector::{is_negligible, matrix_2norm, ImageMatrix, RealVector, NORM_MAX_ITER};
use crate::{Error, Result};

/// Relative tolerance of the matrix 2-norm inside the S-method.
pub const S_METHOD_NORM_TOL: f64 = 1e-6;

/// Default PSNR floor (dB) below which a run counts as divergent.
pub const DEFAULT_PSNR_FLOOR: f64 = 1.0;

/// Default snapshot stride.
pub const DEFAULT_SNAPSHOT_STRIDE: usize = 100;

/// An observation, the black-box filter that produced it and, optionally,
/// the ground truth used for metrics.
#[derive(Debug, Clone)]
pub struct ReverseProblem<F> {
    rows: usize,
    cols: usize,
    observation: RealVector,
    filter: F,
    reference: Option<RealVector>,
}

impl<F: ImageFilter> ReverseProblem<F> {
    /// `observation` must be finite.
    pub fn new(observation: ImageMatrix, filter: F) -> Result<Self> {
        let (rows, cols) = observation.shape();
        let observation = RealVector::new(observation.into_vector().into_vec())?;
        Ok(Self {
            rows,
            cols,
            observation,
            filter,
            reference: None,
        })
    }

    /// Attaches the ground truth; it must match the observation's shape.
    pub fn with_reference(mut self, reference: ImageMatrix) -> Result<Self> {
        if reference.shape() != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.observation.len(),
                found: reference.as_slice().len(),
            });
        }
        self.reference = Some(RealVector::new(reference.into_vector().into_vec())?);
        Ok(self)
    }

    /// `x₀` flattened row-major.
    pub fn observation(&self) -> &RealVector {
        &self.observation
    }

    #[allow(missing_docs)]
    pub fn reference(&self) -> Option<&RealVector> {
        self.reference.as_ref()
    }

    /// `(rows, cols)` of the image.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[allow(missing_docs)]
    pub fn filter(&self) -> &F {
        &self.filter
    }

    /// Reshapes an iterate into the image view.
    pub fn to_image(&self, x: &RealVector) -> Result<ImageMatrix> {
        ImageMatrix::from_vector(self.rows, self.cols, x.clone())
    }

    /// `f(x)`, one filter call.
    pub fn apply_filter(&self, x: &RealVector) -> Result<RealVector> {
        self.check_len(x)?;
        let out = self.filter.apply(&self.to_image(x)?);
        if out.shape() != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.observation.len(),
                found: out.as_slice().len(),
            });
        }
        let out = out.into_vector();
        if !out.is_finite() {
            return Err(Error::Divergence);
        }
        Ok(out)
    }

    /// `a = x₀ − f(x)`, one filter call.
    pub fn residual(&self, x: &RealVector) -> Result<RealVector> {
        Ok(self.observation.sub(&self.apply_filter(x)?))
    }

    /// `φ(x) = x + (x₀ − f(x))`, one filter call.
    pub fn phi(&self, x: &RealVector) -> Result<RealVector> {
        Ok(x.add(&self.residual(x)?))
    }

    /// The residual triple at `x`, two filter calls.
    pub fn abc(&self, x: &RealVector) -> Result<AbcTriple> {
        let a = self.residual(x)?;
        let b = self.residual(&x.add(&a))?;
        AbcTriple::from_residuals(x, a, b)
    }

    fn check_len(&self, x: &RealVector) -> Result<()> {
        if x.len() != self.observation.len() {
            return Err(Error::DimensionMismatch {
                expected: self.observation.len(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// `φ(x) = x + x₀ − f(x)` for `problem`.
pub fn phi_reverse<F: ImageFilter>(
    x: &RealVector,
    problem: &ReverseProblem<F>,
) -> Result<RealVector> {
    problem.phi(x)
}

/// Residual triple `a = x₀ − f(x)`, `b = x₀ − f(x + a)`, `c = a − b`.
pub fn reverse_abc<F: ImageFilter>(
    x: &RealVector,
    problem: &ReverseProblem<F>,
) -> Result<AbcTriple> {
    problem.abc(x)
}

/// Earlier per-pixel reverse-filtering iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Baseline {
    /// `x + a`
    T,
    /// `x + c`
    Tda,
    /// `x + (‖a‖_M / ‖c‖_M)·c` with matrix 2-norms.
    S,
}

impl Baseline {
    #[allow(missing_docs)]
    pub fn name(self) -> &'static str {
        match self {
            Baseline::T => "T",
            Baseline::Tda => "TDA",
            Baseline::S => "S",
        }
    }
}

/// Outcome of one baseline step.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineStep {
    #[allow(missing_docs)]
    pub next_x: RealVector,
    /// Step scalar: 1 for T and TDA, the norm ratio for S.
    pub lambda: f64,
    /// The S-method denominator was guard-zero.
    pub singular: bool,
}

/// One baseline step, with the step scalar multiplied by `mu`.
///
/// `shape` is the image shape used for the S-method's matrix norms.
pub fn baseline_step(
    kind: Baseline,
    x: &RealVector,
    t: &AbcTriple,
    shape: (usize, usize),
    mu: f64,
) -> Result<BaselineStep> {
    if x.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: t.len(),
        });
    }
    let (lambda, singular, dir) = match kind {
        Baseline::T => (1.0, false, t.a()),
        Baseline::Tda => (1.0, false, t.c()),
        Baseline::S => {
            let (lambda, singular) = s_method_ratio(t.a(), t.c(), shape)?;
            (lambda, singular, t.c())
        }
    };
    let next_x = x.axpy(mu * lambda, dir);
    if !next_x.is_finite() {
        return Err(Error::Divergence);
    }
    Ok(BaselineStep {
        next_x,
        lambda,
        singular,
    })
}

fn norm_m(v: &RealVector, shape: (usize, usize)) -> Result<f64> {
    let m = ImageMatrix::from_vector(shape.0, shape.1, v.clone())?;
    match matrix_2norm(&m, S_METHOD_NORM_TOL, NORM_MAX_ITER) {
        Ok(n) => Ok(n),
        Err(Error::IterationLimit { estimate, .. }) => Ok(estimate),
        Err(e) => Err(e),
    }
}

fn s_method_ratio(a: &RealVector, c: &RealVector, shape: (usize, usize)) -> Result<(f64, bool)> {
    let na = norm_m(a, shape)?;
    let nc = norm_m(c, shape)?;
    if is_negligible(nc, na) {
        return Ok((0.0, true));
    }
    Ok((na / nc, false))
}

/// The base iteration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// A vector Steffensen method.
    Steffensen(MethodSpec),
    /// A baseline method.
    Baseline(Baseline),
}

impl Scheme {
    /// Method name: `A1`…`EPS`, `T`, `TDA` or `S`.
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Steffensen(spec) => spec.method().name(),
            Scheme::Baseline(b) => b.name(),
        }
    }

    /// Filter calls each iteration costs.
    pub fn filter_calls_per_iteration(&self) -> usize {
        match self {
            Scheme::Baseline(Baseline::T) => 1,
            _ => 2,
        }
    }
}

/// Settings of one reverse-filtering run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    #[allow(missing_docs)]
    pub scheme: Scheme,
    #[allow(missing_docs)]
    pub schedule: Schedule,
    #[allow(missing_docs)]
    pub accelerator: Accelerator,
    /// Number of iterations `N`, at least 1.
    pub max_iters: usize,
    /// PSNR (dB) below which the run is declared divergent.
    pub divergence_psnr_floor: f64,
    /// Keep the iterate every `snapshot_stride` iterations (plus the first
    /// and last); 0 keeps only first and last.
    pub snapshot_stride: usize,
}

impl RunConfig {
    /// Parameter-free defaults: `μ = 1`, no acceleration.
    pub fn new(scheme: Scheme, max_iters: usize) -> Self {
        Self {
            scheme,
            schedule: Schedule::UNIT,
            accelerator: Accelerator::None,
            max_iters,
            divergence_psnr_floor: DEFAULT_PSNR_FLOOR,
            snapshot_stride: DEFAULT_SNAPSHOT_STRIDE,
        }
    }

    #[allow(missing_docs)]
    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    #[allow(missing_docs)]
    pub fn with_accelerator(mut self, accelerator: Accelerator) -> Self {
        self.accelerator = accelerator;
        self
    }

    #[allow(missing_docs)]
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1"));
        }
        if self.divergence_psnr_floor.is_nan() {
            return Err(Error::InvalidParameter("divergence floor is NaN"));
        }
        self.schedule.validate()
    }

    /// `method_mu_accel`, e.g. `A4_cheby_nesterov`.
    pub fn label(&self) -> String {
        format!(
            "{}_{}_{}",
            self.scheme.name(),
            self.schedule.label(),
            self.accelerator
        )
    }
}

/// Metrics of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Index of the iterate `x_n` this record describes (1-based).
    pub n: usize,
    /// PSNR of `x_n` against the reference, when one is available.
    pub psnr_db: Option<f64>,
    /// Percentage PSNR improvement over the observation.
    pub pct_improvement: Option<f64>,
    /// `‖a‖` at `x_{n−1}`.
    pub residual_norm: f64,
    #[allow(missing_docs)]
    pub lambda_raw: f64,
    #[allow(missing_docs)]
    pub lambda_clipped: f64,
    #[allow(missing_docs)]
    pub mu: f64,
    /// The step scalar fell back to zero on a singular denominator.
    pub singular: bool,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// All iterations ran.
    Completed,
    /// Iteration `n` produced a non-finite value or fell under the PSNR floor.
    Diverged(usize),
}

/// A stored iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    #[allow(missing_docs)]
    pub n: usize,
    #[allow(missing_docs)]
    pub iterate: RealVector,
}

/// Per-iteration history of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    #[allow(missing_docs)]
    pub records: Vec<IterationRecord>,
    #[allow(missing_docs)]
    pub status: RunStatus,
    /// PSNR of the observation, when a reference is available.
    pub psnr_0: Option<f64>,
    #[allow(missing_docs)]
    pub snapshots: Vec<Snapshot>,
    /// The last finite iterate.
    pub final_iterate: RealVector,
}

impl IterationTrace {
    /// Improvement of the last record.
    pub fn final_pct(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.pct_improvement)
    }

    #[allow(missing_docs)]
    pub fn diverged(&self) -> bool {
        matches!(self.status, RunStatus::Diverged(_))
    }
}

struct BaseOutcome {
    u: RealVector,
    residual_norm: f64,
    lambda_raw: f64,
    lambda_clipped: f64,
    singular: bool,
}

fn base_step<F: ImageFilter>(
    problem: &ReverseProblem<F>,
    scheme: &Scheme,
    x: &RealVector,
    mu: f64,
) -> Result<BaseOutcome> {
    if let Scheme::Baseline(Baseline::T) = scheme {
        // T needs only the first residual
        let a = problem.residual(x)?;
        let u = x.axpy(mu * 1.0, &a);
        if !u.is_finite() {
            return Err(Error::Divergence);
        }
        return Ok(BaseOutcome {
            u,
            residual_norm: a.norm(),
            lambda_raw: 1.0,
            lambda_clipped: 1.0,
            singular: false,
        });
    }
    let t = problem.abc(x)?;
    let residual_norm = t.a().norm();
    match scheme {
        Scheme::Steffensen(spec) => {
            let s = vector_step(spec, x, &t, mu)?;
            Ok(BaseOutcome {
                u: s.next_x,
                residual_norm,
                lambda_raw: s.lambda_raw,
                lambda_clipped: s.lambda_clipped,
                singular: s.singular,
            })
        }
        Scheme::Baseline(kind) => {
            let s = baseline_step(*kind, x, &t, problem.shape(), mu)?;
            Ok(BaseOutcome {
                u: s.next_x,
                residual_norm,
                lambda_raw: s.lambda,
                lambda_clipped: s.lambda,
                singular: s.singular,
            })
        }
    }
}

/// Runs `config` on `problem`, starting from the observation.
///
/// Divergence is reported through [`RunStatus`]; errors are returned only for
/// invalid configurations.
pub fn run_reverse<F: ImageFilter>(
    problem: &ReverseProblem<F>,
    config: &RunConfig,
) -> Result<IterationTrace> {
    config.validate()?;
    let x0 = problem.observation().clone();
    let psnr_0 = match problem.reference() {
        Some(r) => Some(psnr(&x0, r)?),
        None => None,
    };

    let mut records = Vec::with_capacity(config.max_iters);
    let mut snapshots = Vec::new();
    let mut status = RunStatus::Completed;
    let mut x = x0.clone();
    let mut state = AfmState::new(config.accelerator, x0);

    for n in 1..=config.max_iters {
        let mu = config.schedule.mu_at(n - 1);
        let step = base_step(problem, &config.scheme, &x, mu).and_then(|o| {
            state
                .clone()
                .advance(o.u.clone(), &x)
                .map(|(xn, s)| (xn, s, o))
        });
        let (x_next, next_state, outcome) = match step {
            Ok(v) => v,
            Err(Error::Divergence) => {
                records.push(IterationRecord {
                    n,
                    psnr_db: None,
                    pct_improvement: None,
                    residual_norm: f64::NAN,
                    lambda_raw: f64::NAN,
                    lambda_clipped: f64::NAN,
                    mu,
                    singular: false,
                });
                status = RunStatus::Diverged(n);
                break;
            }
            Err(e) => return Err(e),
        };

        let psnr_n = match problem.reference() {
            Some(r) => Some(psnr(&x_next, r)?),
            None => None,
        };
        let pct = match (psnr_n, psnr_0) {
            (Some(p), Some(p0)) => pct_improvement(p, p0).ok(),
            _ => None,
        };
        records.push(IterationRecord {
            n,
            psnr_db: psnr_n,
            pct_improvement: pct,
            residual_norm: outcome.residual_norm,
            lambda_raw: outcome.lambda_raw,
            lambda_clipped: outcome.lambda_clipped,
            mu,
            singular: outcome.singular,
        });
        if psnr_n.is_some_and(|p| p.is_nan() || p < config.divergence_psnr_floor) {
            status = RunStatus::Diverged(n);
            break;
        }

        let keep = n == 1
            || n == config.max_iters
            || (config.snapshot_stride > 0 && n % config.snapshot_stride == 0);
        if keep {
            snapshots.push(Snapshot {
                n,
                iterate: x_next.clone(),
            });
        }
        x = x_next;
        state = next_state;
    }

    Ok(IterationTrace {
        records,
        status,
        psnr_0,
        snapshots,
        final_iterate: x,
    })
}

/// One contraction-ratio sample `‖K(xₙ) − K(yₘ)‖ / ‖xₙ − yₘ‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    #[allow(missing_docs)]
    pub n: usize,
    #[allow(missing_docs)]
    pub m: usize,
    #[allow(missing_docs)]
    pub ratio: f64,
}

/// Numerically probes whether one step `K` of `spec` (with `μ = 1`) contracts.
///
/// `K` is evaluated on `first` at `xs[n]` and on `second` at `ys[m]` for every
/// `(n, m)` in `pairs`. Pairs with `xₙ = yₘ` are skipped.
pub fn contraction_probe<F: ImageFilter, G: ImageFilter>(
    spec: &MethodSpec,
    first: &ReverseProblem<F>,
    xs: &[RealVector],
    second: &ReverseProblem<G>,
    ys: &[RealVector],
    pairs: &[(usize, usize)],
) -> Result<Vec<ProbeSample>> {
    let step =
        |p: &dyn Fn(&RealVector) -> Result<AbcTriple>, x: &RealVector| -> Result<RealVector> {
            let t = p(x)?;
            Ok(vector_step(spec, x, &t, 1.0)?.next_x)
        };
    let mut out = Vec::new();
    for &(n, m) in pairs {
        let (x, y) = match (xs.get(n), ys.get(m)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::InvalidParameter("probe pair index out of range")),
        };
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        let dist = x.sub(y).norm();
        if dist == 0.0 {
            continue;
        }
        let kx = step(&|v| first.abc(v), x)?;
        let ky = step(&|v| second.abc(v), y)?;
        out.push(ProbeSample {
            n,
            m,
            ratio: kx.sub(&ky).norm() / dist,
        });
    }
    Ok(out)
}
