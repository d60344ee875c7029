//! Spec strings accepted on the command line.
//!
//! ```text
//! gaussian:sigma=1   box:r=1   guided:r=8,eps=0.01   bilateral:sigma_s=3,sigma_r=0.1
//! 1 | 0.5 | ed1 | ed2 | cheby | cheby:P=64
//! A1 … C3 | EPS | T | TDA | S
//! ```

use std::fmt;

use steffensen_core::schedule::DEFAULT_CHEBYSHEV_PERIOD;
use steffensen_core::{Baseline, FilterSpec, Method, MethodSpec, Schedule, Scheme};

use crate::error::{CliError, Result};

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn key_values(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| config(format!("expected key=value, got `{kv}`")))?;
            Ok((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

fn take<T: std::str::FromStr>(kvs: &[(String, String)], keys: &[&str], what: &str) -> Result<T> {
    let (_, v) = kvs
        .iter()
        .find(|(k, _)| keys.contains(&k.as_str()))
        .ok_or_else(|| config(format!("missing `{}` for {what}", keys[0])))?;
    v.parse()
        .map_err(|_| config(format!("bad value `{v}` for {what}")))
}

fn check_keys(kvs: &[(String, String)], allowed: &[&str], what: &str) -> Result<()> {
    match kvs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(config(format!("unknown key `{k}` for {what}"))),
        None => Ok(()),
    }
}

/// Parses a filter spec such as `guided:r=8,eps=0.01`.
pub fn parse_filter(s: &str) -> Result<FilterSpec> {
    let (kind, body) = s.split_once(':').unwrap_or((s, ""));
    let kvs = key_values(body)?;
    let kind = kind.trim().to_ascii_lowercase();
    let spec = match kind.as_str() {
        "gaussian" | "gauss" => {
            check_keys(&kvs, &["sigma"], "gaussian")?;
            FilterSpec::Gaussian {
                sigma: take(&kvs, &["sigma"], "gaussian")?,
            }
        }
        "box" => {
            check_keys(&kvs, &["r", "radius"], "box")?;
            FilterSpec::Box {
                radius: take(&kvs, &["r", "radius"], "box")?,
            }
        }
        "guided" => {
            check_keys(&kvs, &["r", "radius", "eps"], "guided")?;
            FilterSpec::Guided {
                radius: take(&kvs, &["r", "radius"], "guided")?,
                eps: take(&kvs, &["eps"], "guided")?,
            }
        }
        "bilateral" => {
            check_keys(&kvs, &["sigma_s", "sigma_r"], "bilateral")?;
            FilterSpec::Bilateral {
                sigma_s: take(&kvs, &["sigma_s"], "bilateral")?,
                sigma_r: take(&kvs, &["sigma_r"], "bilateral")?,
            }
        }
        other => return Err(config(format!("unknown filter `{other}`"))),
    };
    spec.validate()?;
    Ok(spec)
}

/// Parses `SPEC` or `SPEC@N`, where `N` overrides the iteration count.
pub fn parse_filter_run(s: &str, default_iters: usize) -> Result<(FilterSpec, usize)> {
    let (spec, iters) = match s.rsplit_once('@') {
        Some((spec, n)) => (
            spec,
            n.trim()
                .parse()
                .map_err(|_| config(format!("bad iteration count in `{s}`")))?,
        ),
        None => (s, default_iters),
    };
    if iters == 0 {
        return Err(config("iteration count must be at least 1"));
    }
    Ok((parse_filter(spec)?, iters))
}

/// A `μ` schedule whose length is bound later, once the iteration count is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuSpec {
    #[allow(missing_docs)]
    Constant(f64),
    #[allow(missing_docs)]
    Ed1,
    #[allow(missing_docs)]
    Ed2,
    /// Chebyshev with period `P`.
    Chebyshev(usize),
}

impl MuSpec {
    /// The four schedules of the default sweep grid.
    pub const GRID: [MuSpec; 4] = [
        MuSpec::Constant(1.0),
        MuSpec::Ed1,
        MuSpec::Ed2,
        MuSpec::Chebyshev(DEFAULT_CHEBYSHEV_PERIOD),
    ];

    /// Binds the schedule to a run of `iters` iterations.
    pub fn resolve(self, iters: usize) -> Schedule {
        match self {
            MuSpec::Constant(mu) => Schedule::Constant(mu),
            MuSpec::Ed1 => Schedule::Ed1 { total: iters },
            MuSpec::Ed2 => Schedule::Ed2 { total: iters },
            MuSpec::Chebyshev(period) => Schedule::Chebyshev { period },
        }
    }

    /// Label used in file names and summaries.
    pub fn label(self) -> String {
        self.resolve(1).label()
    }
}

impl fmt::Display for MuSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `1`, any positive number, `ed1`, `ed2`, `cheby` or `cheby:P=64`.
pub fn parse_mu(s: &str) -> Result<MuSpec> {
    let (kind, body) = s.split_once(':').unwrap_or((s, ""));
    let kind = kind.trim().to_ascii_lowercase();
    let mu = match kind.as_str() {
        "ed1" | "ed-1" => MuSpec::Ed1,
        "ed2" | "ed-2" => MuSpec::Ed2,
        "cheby" | "chebyshev" => {
            let kvs = key_values(body)?;
            check_keys(&kvs, &["p"], "cheby")?;
            if kvs.is_empty() {
                MuSpec::Chebyshev(DEFAULT_CHEBYSHEV_PERIOD)
            } else {
                MuSpec::Chebyshev(take(&kvs, &["p"], "cheby")?)
            }
        }
        num => MuSpec::Constant(
            num.parse()
                .map_err(|_| config(format!("unknown mu schedule `{s}`")))?,
        ),
    };
    if !matches!(kind.as_str(), "cheby" | "chebyshev") && !body.is_empty() {
        return Err(config(format!("unexpected parameters in `{s}`")));
    }
    mu.resolve(1).validate()?;
    Ok(mu)
}

/// Parses a catalog method or a baseline (`T`, `TDA`, `S`) with limiter `tau`.
pub fn parse_scheme(s: &str, tau: f64) -> Result<Scheme> {
    match s.trim().to_ascii_uppercase().as_str() {
        "T" => Ok(Scheme::Baseline(Baseline::T)),
        "TDA" => Ok(Scheme::Baseline(Baseline::Tda)),
        "S" => Ok(Scheme::Baseline(Baseline::S)),
        _ => {
            let m: Method = s
                .parse()
                .map_err(|_| config(format!("unknown method `{s}`")))?;
            Ok(Scheme::Steffensen(MethodSpec::new(m, tau)?))
        }
    }
}

/// Parses a `τ` value; `inf` selects the unlimited step.
pub fn parse_tau(s: &str) -> Result<f64> {
    let tau: f64 = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => f64::INFINITY,
        v => v.parse().map_err(|_| config(format!("bad tau `{s}`")))?,
    };
    if tau.is_nan() || tau <= 0.0 {
        return Err(config("tau must be positive"));
    }
    Ok(tau)
}

/// Splits a comma-separated list, parsing each entry with `f`.
pub fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(f)
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(config("empty list"));
    }
    Ok(items)
}

/// File-name-safe rendering of a spec string.
pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect::<String>()
        .replace("__", "_")
}
