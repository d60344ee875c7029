//! Vectorization of the scalar Steffensen cases through the geometric product.
//!
//! Products are expanded with `c = a − b`, `xx = ‖x‖²` and the sandwich rule
//! `xyx = 2(xᵀy)x − ‖x‖²y`, and `c⁻¹ = c / ‖c‖²`. The ten cases collapse onto
//! three catalog methods; see [`GeometricCase::equivalent`].

use core::fmt;

use crate::steffensen::{AbcTriple, Method};
use crate::vector::{geometric_sandwich, is_negligible, RealVector};
use crate::{Error, Result};

/// Scalar case name with its `ω` product, e.g. `A2_4` is `b a c⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(non_camel_case_types, missing_docs)]
pub enum GeometricCase {
    /// `x + a a c⁻¹`
    A1_1,
    /// `x + a c⁻¹ a`
    A1_2,
    /// `φ(x) + a b c⁻¹`
    A2_1,
    /// `φ(x) + a c⁻¹ b`
    A2_2,
    /// `φ(x) + b c⁻¹ a`
    A2_3,
    /// `φ(x) + b a c⁻¹`
    A2_4,
    /// `φ(x) + c⁻¹ a b`
    A2_5,
    /// `φ(x) + c⁻¹ b a`
    A2_6,
    /// `φ(φ(x)) + b b c⁻¹`
    A3_1,
    /// `φ(φ(x)) + b c⁻¹ b`
    A3_2,
}

impl GeometricCase {
    #[allow(missing_docs)]
    pub const ALL: [GeometricCase; 10] = [
        GeometricCase::A1_1,
        GeometricCase::A1_2,
        GeometricCase::A2_1,
        GeometricCase::A2_2,
        GeometricCase::A2_3,
        GeometricCase::A2_4,
        GeometricCase::A2_5,
        GeometricCase::A2_6,
        GeometricCase::A3_1,
        GeometricCase::A3_2,
    ];

    /// The catalog method this case reduces to.
    pub fn equivalent(self) -> Method {
        use GeometricCase::*;
        match self {
            A1_1 | A2_1 | A2_6 => Method::C1,
            A1_2 | A2_2 | A2_3 | A3_2 => Method::Eps,
            A2_4 | A2_5 | A3_1 => Method::C3,
        }
    }
}

impl fmt::Display for GeometricCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GeometricCase::A1_1 => "A1.1-G",
            GeometricCase::A1_2 => "A1.2-G",
            GeometricCase::A2_1 => "A2.1-G",
            GeometricCase::A2_2 => "A2.2-G",
            GeometricCase::A2_3 => "A2.3-G",
            GeometricCase::A2_4 => "A2.4-G",
            GeometricCase::A2_5 => "A2.5-G",
            GeometricCase::A2_6 => "A2.6-G",
            GeometricCase::A3_1 => "A3.1-G",
            GeometricCase::A3_2 => "A3.2-G",
        };
        f.write_str(s)
    }
}

/// `ω` of `case` before division by `‖c‖²`.
fn omega_times_cc(
    case: GeometricCase,
    a: &RealVector,
    b: &RealVector,
    c: &RealVector,
) -> Result<RealVector> {
    use GeometricCase::*;
    let aa = a.norm_sq();
    let bb = b.norm_sq();
    Ok(match case {
        // a a c = ‖a‖² c
        A1_1 => c.scale(aa),
        // a c a
        A1_2 => geometric_sandwich(a, c)?,
        // a b (a − b) = aba − ‖b‖² a
        A2_1 => geometric_sandwich(a, b)?.axpy(-bb, a),
        // a (a − b) b = ‖a‖² b − ‖b‖² a
        A2_2 => b.scale(aa).axpy(-bb, a),
        // b (a − b) a = ‖a‖² b − ‖b‖² a
        A2_3 => b.scale(aa).axpy(-bb, a),
        // b a (a − b) = ‖a‖² b − bab
        A2_4 => b.scale(aa).sub(&geometric_sandwich(b, a)?),
        // (a − b) a b = ‖a‖² b − bab
        A2_5 => b.scale(aa).sub(&geometric_sandwich(b, a)?),
        // (a − b) b a = aba − ‖b‖² a
        A2_6 => geometric_sandwich(a, b)?.axpy(-bb, a),
        // b b c = ‖b‖² c
        A3_1 => c.scale(bb),
        // b c b
        A3_2 => geometric_sandwich(b, c)?,
    })
}

/// Evaluates the geometric-product iteration of `case` at `x`.
pub fn geometric_step(case: GeometricCase, x: &RealVector, t: &AbcTriple) -> Result<RealVector> {
    if x.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: t.len(),
        });
    }
    let cc = t.c().norm_sq();
    if is_negligible(cc, cc) {
        return Err(Error::NearSingular { denominator: cc });
    }
    let omega = omega_times_cc(case, t.a(), t.b(), t.c())?.scale(1.0 / cc);
    let base = match case {
        GeometricCase::A1_1 | GeometricCase::A1_2 => x,
        GeometricCase::A3_1 | GeometricCase::A3_2 => t.phi_phi_x(),
        _ => t.phi_x(),
    };
    Ok(base.add(&omega))
}
