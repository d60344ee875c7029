//! Relaxation schedules for `μ` and momentum accelerators.

use core::f64::consts::PI;
use core::fmt;

use crate::vector::RealVector;
use crate::{Error, Result};

/// Default period of the Chebyshev schedule.
pub const DEFAULT_CHEBYSHEV_PERIOD: usize = 64;

/// How `μₙ` evolves with the iteration index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// Fixed `μ`.
    Constant(f64),
    /// `1 + exp(−(2n/N)²)`, from 2 down towards 1.
    Ed1 {
        /// Total iteration count `N`.
        total: usize,
    },
    /// `2·exp(−(2n/N)²)`, from 2 down towards 0.
    Ed2 {
        /// Total iteration count `N`.
        total: usize,
    },
    /// `2·min(1, 1/(1 + cos(2(n+1)π/P)))`.
    Chebyshev {
        /// Period `P`.
        period: usize,
    },
}

impl Schedule {
    /// The parameter-free schedule `μ = 1`.
    pub const UNIT: Schedule = Schedule::Constant(1.0);

    /// Checks the schedule parameters.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Schedule::Constant(mu) if !mu.is_finite() || mu <= 0.0 => Err(Error::InvalidParameter(
                "constant mu must be positive and finite",
            )),
            Schedule::Ed1 { total: 0 } | Schedule::Ed2 { total: 0 } => {
                Err(Error::InvalidParameter("ed-1/ed-2 need N >= 1"))
            }
            Schedule::Chebyshev { period } if period < 2 => {
                Err(Error::InvalidParameter("chebyshev period must be >= 2"))
            }
            _ => Ok(()),
        }
    }

    /// `μₙ` for the 0-based iteration index `n`.
    pub fn mu_at(&self, n: usize) -> f64 {
        match *self {
            Schedule::Constant(mu) => mu,
            Schedule::Ed1 { total } => 1.0 + decay(n, total),
            Schedule::Ed2 { total } => 2.0 * decay(n, total),
            Schedule::Chebyshev { period } => {
                // reduce the index first so the sequence is exactly periodic
                let k = ((n % period) + 1) as f64;
                let denom = 1.0 + libm::cos(2.0 * k * PI / period as f64);
                if denom < 1e-12 {
                    2.0
                } else {
                    2.0 * f64::min(1.0, 1.0 / denom)
                }
            }
        }
    }

    /// Short label used in file names and summaries: `1`, `ed1`, `ed2`, `cheby`.
    pub fn label(&self) -> alloc::string::String {
        use alloc::format;
        match *self {
            Schedule::Constant(mu) => format!("{mu}"),
            Schedule::Ed1 { .. } => "ed1".into(),
            Schedule::Ed2 { .. } => "ed2".into(),
            Schedule::Chebyshev { period } if period == DEFAULT_CHEBYSHEV_PERIOD => "cheby".into(),
            Schedule::Chebyshev { period } => format!("cheby{period}"),
        }
    }
}

fn decay(n: usize, total: usize) -> f64 {
    let r = 2.0 * n as f64 / total as f64;
    libm::exp(-(r * r))
}

/// Momentum wrapper around the base iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Accelerator {
    /// Plain iteration.
    None,
    /// Nesterov momentum (`γ = 0`).
    Nesterov,
    /// Accelerated first-order method.
    Afm,
}

impl Accelerator {
    #[allow(missing_docs)]
    pub const ALL: [Accelerator; 3] = [Accelerator::None, Accelerator::Nesterov, Accelerator::Afm];

    #[allow(missing_docs)]
    pub fn name(self) -> &'static str {
        match self {
            Accelerator::None => "none",
            Accelerator::Nesterov => "nesterov",
            Accelerator::Afm => "afm",
        }
    }
}

impl fmt::Display for Accelerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Accelerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Accelerator::None),
            "nesterov" | "nest" => Ok(Accelerator::Nesterov),
            "afm" => Ok(Accelerator::Afm),
            _ => Err(Error::InvalidParameter("unknown accelerator")),
        }
    }
}

/// `t_{n+1} = (1 + √(1 + 4tₙ²)) / 2`.
#[inline]
pub fn next_t(t: f64) -> f64 {
    0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * t * t))
}

/// `(β, γ, t_{n+1})` for the current `tₙ`.
pub fn momentum_coefficients(t: f64) -> (f64, f64, f64) {
    let t_next = next_t(t);
    ((t - 1.0) / t_next, t / t_next, t_next)
}

/// `u' + β(u' − u) + γ(u' − x)`.
pub fn momentum_combine(
    u_next: &RealVector,
    u_prev: &RealVector,
    x: &RealVector,
    beta: f64,
    gamma: f64,
) -> RealVector {
    let momentum = u_next.sub(u_prev);
    let pull = u_next.sub(x);
    u_next.axpy(beta, &momentum).axpy(gamma, &pull)
}

/// Momentum state carried between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct AfmState {
    t: f64,
    u_prev: RealVector,
    mode: Accelerator,
}

impl AfmState {
    /// Starts with `t₀ = 1` and `u₀ = start` (the initial iterate).
    pub fn new(mode: Accelerator, start: RealVector) -> Self {
        Self {
            t: 1.0,
            u_prev: start,
            mode,
        }
    }

    /// Current `tₙ`.
    pub fn t(&self) -> f64 {
        self.t
    }

    #[allow(missing_docs)]
    pub fn mode(&self) -> Accelerator {
        self.mode
    }

    /// Previous base-iteration output `uₙ`.
    pub fn u_prev(&self) -> &RealVector {
        &self.u_prev
    }

    /// Combines the base output `u_next = u_{n+1}` with the momentum terms
    /// and returns `x_{n+1}` with the advanced state.
    pub fn advance(self, u_next: RealVector, x_n: &RealVector) -> Result<(RealVector, AfmState)> {
        if u_next.len() != self.u_prev.len() || x_n.len() != u_next.len() {
            return Err(Error::DimensionMismatch {
                expected: self.u_prev.len(),
                found: u_next.len(),
            });
        }
        let (beta, gamma, t_next) = momentum_coefficients(self.t);
        let x_next = match self.mode {
            Accelerator::None => u_next.clone(),
            Accelerator::Nesterov => momentum_combine(&u_next, &self.u_prev, x_n, beta, 0.0),
            Accelerator::Afm => momentum_combine(&u_next, &self.u_prev, x_n, beta, gamma),
        };
        if !x_next.is_finite() {
            return Err(Error::Divergence);
        }
        Ok((
            x_next,
            AfmState {
                t: t_next,
                u_prev: u_next,
                mode: self.mode,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(d: &[f64]) -> RealVector {
        RealVector::new(d.to_vec()).unwrap()
    }

    #[test]
    fn mu_examples() {
        let ed1 = Schedule::Ed1 { total: 300 };
        assert_eq!(ed1.mu_at(0), 2.0);
        let oracle = 1.0 + libm::exp(-1.0);
        assert!((ed1.mu_at(150) - oracle).abs() < 1e-15);
        assert!((oracle - 1.367879).abs() < 1e-6);

        let cheb = Schedule::Chebyshev { period: 64 };
        let oracle = 2.0 / (1.0 + libm::cos(2.0 * PI / 64.0));
        assert!((cheb.mu_at(0) - oracle).abs() < 1e-15);
        assert!((cheb.mu_at(0) - 1.00241).abs() < 1e-5);

        assert_eq!(Schedule::Ed2 { total: 10 }.mu_at(0), 2.0);
        assert_eq!(Schedule::Constant(0.3).mu_at(99), 0.3);
    }

    #[test]
    fn chebyshev_guard_hits_two() {
        // n + 1 = P/2 puts cos at −1
        let cheb = Schedule::Chebyshev { period: 64 };
        assert_eq!(cheb.mu_at(31), 2.0);
        let cheb = Schedule::Chebyshev { period: 2 };
        assert_eq!(cheb.mu_at(0), 2.0);
    }

    #[test]
    fn validation() {
        assert!(Schedule::Constant(0.0).validate().is_err());
        assert!(Schedule::Ed1 { total: 0 }.validate().is_err());
        assert!(Schedule::Chebyshev { period: 1 }.validate().is_err());
        assert!(Schedule::Ed2 { total: 5 }.validate().is_ok());
    }

    #[test]
    fn first_afm_step() {
        let (beta, gamma, t1) = momentum_coefficients(1.0);
        assert_eq!(beta, 0.0);
        assert!((t1 - 1.618_033_988_749_895).abs() < 1e-15);
        assert!((gamma - 0.618_033_988_749_895).abs() < 1e-15);

        let u0 = rv(&[1.0, 2.0]);
        let x0 = rv(&[0.0, 0.5]);
        let u1 = rv(&[2.0, 1.0]);
        let (x1, state) = AfmState::new(Accelerator::Afm, u0)
            .advance(u1.clone(), &x0)
            .unwrap();
        let expect = u1.axpy(gamma, &u1.sub(&x0));
        assert!(x1.max_abs_diff(&expect) < 1e-15);
        assert_eq!(state.t(), t1);
        assert_eq!(state.u_prev(), &u1);
    }

    #[test]
    fn nesterov_without_momentum_is_passthrough() {
        let u = rv(&[0.3, 0.7]);
        let state = AfmState {
            t: 5.0,
            u_prev: u.clone(),
            mode: Accelerator::Nesterov,
        };
        let (x, _) = state.advance(u.clone(), &rv(&[9.0, 9.0])).unwrap();
        assert_eq!(x, u);
    }

    #[test]
    fn asymptotic_form() {
        let u_next = rv(&[1.0, -2.0, 0.5]);
        let u_prev = rv(&[0.25, 4.0, 1.0]);
        let x = rv(&[3.0, 0.0, -1.0]);
        let got = momentum_combine(&u_next, &u_prev, &x, 1.0, 1.0);
        let expect = u_next.scale(3.0).sub(&u_prev).sub(&x);
        assert!(got.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn none_mode_is_identity() {
        let u = rv(&[0.1, 0.2]);
        let (x, _) = AfmState::new(Accelerator::None, rv(&[5.0, 5.0]))
            .advance(u.clone(), &rv(&[7.0, 7.0]))
            .unwrap();
        assert_eq!(x, u);
    }
}
