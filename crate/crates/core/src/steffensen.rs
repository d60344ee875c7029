//! Scalar, parametric and vector-variable Steffensen steps.
//!
//! Every vector method is built from one triple of residuals at the current
//! point `x`:
//!
//! ```text
//! a = φ(x) − x,   b = φ(φ(x)) − φ(x),   c = a − b
//! ```
//!
//! and has the shape `base + λ·d`, where the base is one of `x`, `φ(x)`,
//! `φ(φ(x))` and the direction `d` is one of `a`, `b`, `c`:
//!
//! | method | base      | direction | λ                 |
//! |--------|-----------|-----------|-------------------|
//! | A1     | x         | a         | ‖a‖² / aᵀc        |
//! | A2     | x         | a         | aᵀc / ‖c‖²        |
//! | A3     | x         | a         | aᵀb / bᵀc         |
//! | A4     | φ(φ(x))   | a         | ‖b‖² / aᵀc        |
//! | B1     | x         | b         | ‖a‖² / bᵀc        |
//! | B2     | φ(x)      | b         | aᵀc / ‖c‖²        |
//! | B3     | φ(x)      | b         | aᵀb / bᵀc         |
//! | B4     | φ(x)      | b         | ‖a‖² / aᵀc        |
//! | C1     | x         | c         | ‖a‖² / ‖c‖²       |
//! | C2     | φ(x)      | c         | aᵀb / ‖c‖²        |
//! | C3     | φ(φ(x))   | c         | ‖b‖² / ‖c‖²       |
//!
//! `EPS` is `φ(x) + λ·b − η·a` with `λ = ‖a‖²/‖c‖²` and `η = ‖b‖²/‖c‖²`.

use core::fmt;
use core::str::FromStr;

use crate::vector::{is_negligible, RealVector};
use crate::{Error, Result};

/// Hard-limiter bound used unless configured otherwise.
pub const DEFAULT_TAU: f64 = 0.75;

/// One classic Steffensen step `x − (φ(x) − x)² / (φ(φ(x)) − 2φ(x) + x)`.
pub fn scalar_steffensen_step<F: Fn(f64) -> f64>(phi: F, x: f64) -> Result<f64> {
    let px = phi(x);
    let ppx = phi(px);
    steffensen_formula(x, px, ppx)
}

/// Steffensen step applied to the Mann map `ϕ(x) = x + μ(φ(x) − x)`.
///
/// Reduces to [`scalar_steffensen_step`] when `mu == 1`.
pub fn parametric_steffensen_step<F: Fn(f64) -> f64>(phi: F, x: f64, mu: f64) -> Result<f64> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::InvalidParameter("mu must be positive and finite"));
    }
    let mann = |y: f64| y + mu * (phi(y) - y);
    let px = mann(x);
    let ppx = mann(px);
    steffensen_formula(x, px, ppx)
}

fn steffensen_formula(x: f64, px: f64, ppx: f64) -> Result<f64> {
    let den = ppx - 2.0 * px + x;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::NearSingular { denominator: den });
    }
    let num = (px - x) * (px - x);
    let next = x - num / den;
    if !next.is_finite() {
        return Err(Error::Divergence);
    }
    Ok(next)
}

/// Wynn's epsilon extrapolation with `k = 2` from three consecutive iterates.
pub fn wynn_k2_scalar(x0: f64, x1: f64, x2: f64) -> Result<f64> {
    let den = 2.0 * x1 - x2 - x0;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::NearSingular { denominator: den });
    }
    Ok(x1 + (x2 - x1) * (x1 - x0) / den)
}

/// Sign-preserving clip of `lambda` to `[-tau, tau]`.
#[inline]
pub fn hard_limit(lambda: f64, tau: f64) -> f64 {
    if lambda.abs() > tau {
        tau.copysign(lambda)
    } else {
        lambda
    }
}

/// The twelve vector-variable Steffensen iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(missing_docs)]
pub enum Method {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    B4,
    C1,
    C2,
    C3,
    Eps,
}

/// Which point a method extrapolates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasePoint {
    /// `x`
    X,
    /// `φ(x)`
    Phi,
    /// `φ(φ(x))`
    PhiPhi,
}

/// Which residual a method moves along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `a = φ(x) − x`
    A,
    /// `b = φ(φ(x)) − φ(x)`
    B,
    /// `c = a − b`
    C,
}

impl Method {
    /// All methods in catalog order.
    pub const ALL: [Method; 12] = [
        Method::A1,
        Method::A2,
        Method::A3,
        Method::A4,
        Method::B1,
        Method::B2,
        Method::B3,
        Method::B4,
        Method::C1,
        Method::C2,
        Method::C3,
        Method::Eps,
    ];

    /// Short name, e.g. `"B3"` or `"EPS"`.
    pub fn name(self) -> &'static str {
        match self {
            Method::A1 => "A1",
            Method::A2 => "A2",
            Method::A3 => "A3",
            Method::A4 => "A4",
            Method::B1 => "B1",
            Method::B2 => "B2",
            Method::B3 => "B3",
            Method::B4 => "B4",
            Method::C1 => "C1",
            Method::C2 => "C2",
            Method::C3 => "C3",
            Method::Eps => "EPS",
        }
    }

    #[allow(missing_docs)]
    pub fn base(self) -> BasePoint {
        use Method::*;
        match self {
            A1 | A2 | A3 | B1 | C1 => BasePoint::X,
            B2 | B3 | B4 | C2 | Eps => BasePoint::Phi,
            A4 | C3 => BasePoint::PhiPhi,
        }
    }

    /// Update direction. `EPS` reports `b`; its extra `−η·a` term is
    /// handled separately.
    pub fn direction(self) -> Direction {
        use Method::*;
        match self {
            A1 | A2 | A3 | A4 => Direction::A,
            B1 | B2 | B3 | B4 | Eps => Direction::B,
            C1 | C2 | C3 => Direction::C,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| {
                m.name().eq_ignore_ascii_case(s)
                    || (*m == Method::Eps && s.eq_ignore_ascii_case("epsilon"))
            })
            .ok_or(Error::InvalidParameter("unknown method name"))
    }
}

/// A method together with its hard-limiter bound `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    method: Method,
    tau: f64,
}

impl MethodSpec {
    /// `tau` must be positive; `f64::INFINITY` disables the limiter.
    pub fn new(method: Method, tau: f64) -> Result<Self> {
        if tau.is_nan() || tau <= 0.0 {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        Ok(Self { method, tau })
    }

    /// The unlimited (`tau = ∞`) form of `method`.
    pub fn unlimited(method: Method) -> Self {
        Self {
            method,
            tau: f64::INFINITY,
        }
    }

    #[allow(missing_docs)]
    pub fn method(&self) -> Method {
        self.method
    }

    #[allow(missing_docs)]
    pub fn tau(&self) -> f64 {
        self.tau
    }
}

impl From<Method> for MethodSpec {
    fn from(method: Method) -> Self {
        Self {
            method,
            tau: DEFAULT_TAU,
        }
    }
}

/// Residual vectors of one Steffensen step at a point `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcTriple {
    a: RealVector,
    b: RealVector,
    c: RealVector,
    phi_x: RealVector,
    phi_phi_x: RealVector,
}

impl AbcTriple {
    /// Builds the triple from `x`, `φ(x)` and `φ(φ(x))`.
    pub fn from_evaluations(
        x: &RealVector,
        phi_x: RealVector,
        phi_phi_x: RealVector,
    ) -> Result<Self> {
        check_same(x, &phi_x)?;
        check_same(x, &phi_phi_x)?;
        let a = phi_x.sub(x);
        let b = phi_phi_x.sub(&phi_x);
        let c = a.sub(&b);
        Ok(Self {
            a,
            b,
            c,
            phi_x,
            phi_phi_x,
        })
    }

    /// Builds the triple from `x` and the residuals `a`, `b`; `φ(x) = x + a`
    /// and `φ(φ(x)) = φ(x) + b`.
    pub fn from_residuals(x: &RealVector, a: RealVector, b: RealVector) -> Result<Self> {
        check_same(x, &a)?;
        check_same(x, &b)?;
        let phi_x = x.add(&a);
        let phi_phi_x = phi_x.add(&b);
        let c = a.sub(&b);
        Ok(Self {
            a,
            b,
            c,
            phi_x,
            phi_phi_x,
        })
    }

    /// `φ(x) − x`
    pub fn a(&self) -> &RealVector {
        &self.a
    }

    /// `φ(φ(x)) − φ(x)`
    pub fn b(&self) -> &RealVector {
        &self.b
    }

    /// `a − b`
    pub fn c(&self) -> &RealVector {
        &self.c
    }

    /// `φ(x)`
    pub fn phi_x(&self) -> &RealVector {
        &self.phi_x
    }

    /// `φ(φ(x))`
    pub fn phi_phi_x(&self) -> &RealVector {
        &self.phi_phi_x
    }

    #[allow(missing_docs)]
    pub fn len(&self) -> usize {
        self.a.len()
    }

    #[allow(missing_docs)]
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// True when all residuals and map values are finite.
    pub fn is_finite(&self) -> bool {
        self.a.is_finite()
            && self.b.is_finite()
            && self.phi_x.is_finite()
            && self.phi_phi_x.is_finite()
    }

    fn base(&self, x: &RealVector, base: BasePoint) -> RealVector {
        match base {
            BasePoint::X => x.clone(),
            BasePoint::Phi => self.phi_x.clone(),
            BasePoint::PhiPhi => self.phi_phi_x.clone(),
        }
    }

    fn direction(&self, d: Direction) -> &RealVector {
        match d {
            Direction::A => &self.a,
            Direction::B => &self.b,
            Direction::C => &self.c,
        }
    }
}

fn check_same(x: &RealVector, y: &RealVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Evaluates `phi` exactly twice at `x` and returns the residual triple.
pub fn compute_abc<F>(mut phi: F, x: &RealVector) -> Result<AbcTriple>
where
    F: FnMut(&RealVector) -> RealVector,
{
    let phi_x = phi(x);
    check_same(x, &phi_x)?;
    if !phi_x.is_finite() {
        return Err(Error::Divergence);
    }
    let phi_phi_x = phi(&phi_x);
    check_same(x, &phi_phi_x)?;
    if !phi_phi_x.is_finite() {
        return Err(Error::Divergence);
    }
    AbcTriple::from_evaluations(x, phi_x, phi_phi_x)
}

/// Step scalars of a method before limiting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepScalars {
    /// `λ`; zero when `singular`.
    pub lambda: f64,
    /// `η` for `EPS`; zero when `singular`.
    pub eta: Option<f64>,
    /// The denominator was guard-zero.
    pub singular: bool,
}

/// The λ (and η for `EPS`) of `method` for the given triple.
///
/// When the method's denominator is guard-zero the scalars are set to zero
/// and `singular` is raised, so the step falls back to its base point.
pub fn lambda_for(method: Method, t: &AbcTriple) -> StepScalars {
    lambda_from_residuals(method, t.a(), t.b(), t.c())
}

/// [`lambda_for`] on explicit residual vectors.
pub fn lambda_from_residuals(
    method: Method,
    a: &RealVector,
    b: &RealVector,
    c: &RealVector,
) -> StepScalars {
    use Method::*;
    enum Den {
        Ac,
        Bc,
        Cc,
    }
    let (num, den) = match method {
        A1 | B4 => (a.norm_sq(), Den::Ac),
        A2 | B2 => (a.dot(c), Den::Cc),
        A3 | B3 => (a.dot(b), Den::Bc),
        A4 => (b.norm_sq(), Den::Ac),
        B1 => (a.norm_sq(), Den::Bc),
        C1 | Eps => (a.norm_sq(), Den::Cc),
        C2 => (a.dot(b), Den::Cc),
        C3 => (b.norm_sq(), Den::Cc),
    };
    let (den, scale) = match den {
        Den::Ac => (a.dot(c), a.norm() * c.norm()),
        Den::Bc => (b.dot(c), b.norm() * c.norm()),
        Den::Cc => {
            let cc = c.norm_sq();
            (cc, cc)
        }
    };
    let is_eps = method == Eps;
    if is_negligible(den, scale) {
        return StepScalars {
            lambda: 0.0,
            eta: is_eps.then_some(0.0),
            singular: true,
        };
    }
    StepScalars {
        lambda: num / den,
        eta: is_eps.then(|| b.norm_sq() / den),
        singular: false,
    }
}

/// Outcome of one vector step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    /// The new iterate.
    pub next_x: RealVector,
    /// λ before limiting.
    pub lambda_raw: f64,
    /// λ after the hard limiter.
    pub lambda_clipped: f64,
    /// η before limiting (`EPS` only).
    pub eta: Option<f64>,
    /// η after the hard limiter (`EPS` only).
    pub eta_clipped: Option<f64>,
    /// The λ denominator was guard-zero and λ fell back to zero.
    pub singular: bool,
}

/// Applies `spec` at `x`: `base + μ·λ̂·d`, or `φ(x) + μ·λ̂·b − μ·η̂·a` for `EPS`.
///
/// `mu` scales only the limited scalars, never the base point.
pub fn vector_step(
    spec: &MethodSpec,
    x: &RealVector,
    t: &AbcTriple,
    mu: f64,
) -> Result<StepResult> {
    check_same(x, t.a())?;
    let method = spec.method();
    let scalars = lambda_for(method, t);
    let lambda_clipped = hard_limit(scalars.lambda, spec.tau());
    let eta_clipped = scalars.eta.map(|e| hard_limit(e, spec.tau()));

    let base = t.base(x, method.base());
    let mut next_x = base.axpy(mu * lambda_clipped, t.direction(method.direction()));
    if let Some(eta) = eta_clipped {
        next_x = next_x.axpy(-(mu * eta), t.a());
    }
    if !next_x.is_finite() {
        return Err(Error::Divergence);
    }
    Ok(StepResult {
        next_x,
        lambda_raw: scalars.lambda,
        lambda_clipped,
        eta: scalars.eta,
        eta_clipped,
        singular: scalars.singular,
    })
}

/// Anderson acceleration with window two: `θ₀φ(x) + (1 − θ₀)φ(φ(x))`,
/// `θ₀ = −bᵀc / ‖c‖²`.
pub fn anderson2_step(t: &AbcTriple) -> Result<RealVector> {
    let cc = t.c().norm_sq();
    if is_negligible(cc, cc) {
        return Err(Error::NearSingular { denominator: cc });
    }
    let theta0 = -t.b().dot(t.c()) / cc;
    let phi = t.phi_x().scale(theta0);
    Ok(phi.axpy(1.0 - theta0, t.phi_phi_x()))
}
