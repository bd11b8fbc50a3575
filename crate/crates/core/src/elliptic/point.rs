use num_traits::Zero;

use super::WeierstrassCurve;
use crate::exact_poly::Rational;

/// Rational point on a curve in affine coordinates, or the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl CurvePoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        CurvePoint::Affine {
            x: Rational::from_integer(x.into()),
            y: Rational::from_integer(y.into()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Affine { x, .. } => Some(x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&Rational> {
        match self {
            CurvePoint::Affine { y, .. } => Some(y),
            CurvePoint::Infinity => None,
        }
    }
}

pub fn negate_point(p: &CurvePoint) -> CurvePoint {
    match p {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: -y },
    }
}

/// Chord-and-tangent addition.
pub fn add_points(curve: &WeierstrassCurve, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
    let (x1, y1, x2, y2) = match (p, q) {
        (CurvePoint::Infinity, _) => return q.clone(),
        (_, CurvePoint::Infinity) => return p.clone(),
        (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
    };
    let slope = if x1 == x2 {
        if (y1 + y2).is_zero() {
            return CurvePoint::Infinity;
        }
        let three = Rational::from_integer(3.into());
        let a = Rational::from_integer(curve.a().into());
        (three * x1 * x1 + a) / (y1 + y1)
    } else {
        (y2 - y1) / (x2 - x1)
    };
    let x3 = &slope * &slope - x1 - x2;
    let y3 = slope * (x1 - &x3) - y1;
    CurvePoint::Affine { x: x3, y: y3 }
}

/// `[n]P` by double-and-add; negative `n` negates.
pub fn scalar_mul_point(curve: &WeierstrassCurve, n: i64, p: &CurvePoint) -> CurvePoint {
    let mut k = n.unsigned_abs();
    let mut base = if n.is_negative() { negate_point(p) } else { p.clone() };
    let mut acc = CurvePoint::Infinity;
    while k > 0 {
        if k & 1 == 1 {
            acc = add_points(curve, &acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = add_points(curve, &base, &base);
        }
    }
    acc
}
