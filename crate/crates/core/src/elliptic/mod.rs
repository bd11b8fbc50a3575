//! Short Weierstrass curves `y^2 = x^3 + A x + B` over Q.
//!
//! Division polynomials and the scalar-multiplication maps `(r, s, t)` are
//! built in a [`CurveRing`]: either the symbolic ring `[x, A, B]` or `[x]`
//! with a concrete curve plugged in.  Both give the same polynomials after
//! specialization.

mod division;
mod maps;
mod point;

pub use division::{division_polynomial, division_polynomials, CurveRing, DivisionPolynomial};
pub use maps::{evaluate_multiplication_map, multiplication_maps, projective_image, MultiplicationMaps};
pub use point::{add_points, negate_point, scalar_mul_point, CurvePoint};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EllipticError {
    #[error("singular curve: A = {a}, B = {b} has zero discriminant")]
    Singular { a: i64, b: i64 },
    #[error("multiplier alpha must be nonzero")]
    ZeroAlpha,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("the {parity} formula is undefined at this point: {reason}")]
    Undefined { parity: &'static str, reason: String },
}

/// Nonsingular curve `y^2 = x^3 + A x + B` with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct WeierstrassCurve {
    a: i64,
    b: i64,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    #[serde(rename = "A")]
    a: i64,
    #[serde(rename = "B")]
    b: i64,
}

impl TryFrom<RawCurve> for WeierstrassCurve {
    type Error = EllipticError;
    fn try_from(raw: RawCurve) -> Result<Self, EllipticError> {
        WeierstrassCurve::new(raw.a, raw.b)
    }
}

impl From<WeierstrassCurve> for RawCurve {
    fn from(c: WeierstrassCurve) -> Self {
        RawCurve { a: c.a, b: c.b }
    }
}

/// `-16 (4A^3 + 27B^2)` for any integer pair, singular or not.
pub fn discriminant_of(a: i64, b: i64) -> BigInt {
    let a = BigInt::from(a);
    let b = BigInt::from(b);
    BigInt::from(-16) * (BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b)
}

impl WeierstrassCurve {
    pub fn new(a: i64, b: i64) -> Result<Self, EllipticError> {
        if discriminant_of(a, b).is_zero() {
            return Err(EllipticError::Singular { a, b });
        }
        Ok(WeierstrassCurve { a, b })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn discriminant(&self) -> BigInt {
        discriminant_of(self.a, self.b)
    }

    /// `j = -1728 (4A)^3 / Delta`.
    pub fn j_invariant(&self) -> Rational {
        let four_a = BigInt::from(4) * BigInt::from(self.a);
        let num = BigInt::from(-1728) * &four_a * &four_a * &four_a;
        Rational::new(num, self.discriminant())
    }

    /// Right-hand side `x^3 + A x + B` at a rational abscissa.
    pub fn rhs(&self, x: &Rational) -> Rational {
        x * x * x + Rational::from_integer(self.a.into()) * x + Rational::from_integer(self.b.into())
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    pub fn point(&self, x: Rational, y: Rational) -> Result<CurvePoint, EllipticError> {
        let p = CurvePoint::Affine { x, y };
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(EllipticError::NotOnCurve)
        }
    }
}

/// Free-function form of [`WeierstrassCurve::discriminant`].
pub fn discriminant(curve: &WeierstrassCurve) -> BigInt {
    curve.discriminant()
}

/// Free-function form of [`WeierstrassCurve::j_invariant`].
pub fn j_invariant(curve: &WeierstrassCurve) -> Rational {
    curve.j_invariant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert_eq!(WeierstrassCurve::new(0, 1).unwrap().discriminant(), BigInt::from(-432));
        assert_eq!(WeierstrassCurve::new(-1, 0).unwrap().discriminant(), BigInt::from(64));
        assert_eq!(discriminant_of(0, 0), BigInt::zero());
        assert_eq!(WeierstrassCurve::new(0, 0), Err(EllipticError::Singular { a: 0, b: 0 }));
    }

    #[test]
    fn j_invariants() {
        let j = |a, b| WeierstrassCurve::new(a, b).unwrap().j_invariant();
        assert_eq!(j(0, 1), Rational::zero());
        assert_eq!(j(-1, 0), Rational::from_integer(1728.into()));
        assert_eq!(j(1, 1), Rational::new(6912.into(), 31.into()));
    }

    #[test]
    fn json_shape_and_validation() {
        let c: WeierstrassCurve = serde_json::from_str(r#"{"A":-1,"B":0}"#).unwrap();
        assert_eq!((c.a(), c.b()), (-1, 0));
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"A":-1,"B":0}"#);
        assert!(serde_json::from_str::<WeierstrassCurve>(r#"{"A":0,"B":0}"#).is_err());
    }
}
