//! Command line front end for `steffensen-core`: grayscale image files,
//! spec-string parsing and parallel experiment sweeps writing CSV traces.

#![warn(missing_docs)]

mod error;
pub mod io;
pub mod parse;
pub mod sweep;

pub use error::{CliError, Result};
pub use io::{load_image, save_image};
pub use parse::{parse_filter, parse_mu, parse_scheme, MuSpec};
pub use sweep::{
    run_sweep, run_sweep_with_filters, Grid, NamedFilter, Outcome, SweepConfig, SweepReport,
};
