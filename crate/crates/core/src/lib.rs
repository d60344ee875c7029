//! Vector-variable Steffensen iterations for fixed-point acceleration, and a
//! semi-blind image reverse-filtering driver built on top of them.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; image I/O, CSV output and the command line live in
//! the `steffensen-cli` companion crate.
//!
//! Layout:
//!
//! * [`vector`]: dense vectors, image matrices, Brezinski inverse, geometric
//!   sandwich product and the matrix 2-norm.
//! * [`steffensen`]: scalar and parametric Steffensen steps and the catalog of
//!   twelve vector methods (`A1`..`A4`, `B1`..`B4`, `C1`..`C3`, `EPS`).
//! * [`geometric`]: the geometric-product vectorizations of every scalar case.
//! * [`schedule`]: relaxation schedules and Nesterov / AFM momentum.
//! * [`filter`]: the black-box image filters.
//! * [`reverse`]: reverse filtering, baselines, tracing and the contraction probe.
//! * [`metrics`]: PSNR and percentage improvement.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;

mod error;
pub mod filter;
pub mod geometric;
pub mod metrics;
pub mod pattern;
pub mod reverse;
pub mod schedule;
pub mod steffensen;
pub mod vector;

pub use error::{Error, Result};
pub use filter::{apply_filter, BuiltinFilter, CountingFilter, FilterSpec, ImageFilter};
pub use metrics::{pct_improvement, psnr, PSNR_CAP_DB};
pub use reverse::{
    run_reverse, Baseline, IterationRecord, IterationTrace, ReverseProblem, RunConfig, RunStatus,
    Scheme,
};
pub use schedule::{Accelerator, AfmState, Schedule};
pub use steffensen::{AbcTriple, Method, MethodSpec, StepResult};
pub use vector::{ImageMatrix, RealVector};
