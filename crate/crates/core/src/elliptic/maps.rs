use num_traits::Zero;

use super::division::{division_polynomials, CurveRing, DivisionPolynomial};
use super::{CurvePoint, EllipticError, WeierstrassCurve};
use crate::exact_poly::{exact_divide, MultiPoly, Rational};

/// Rational maps of `[alpha]`: projectively `(r t : s y : t^3)`, so that
/// `x` goes to `r / t^2` and `y` to `s y / t^3`.
///
/// For odd `alpha`, `t = psi_alpha`, `r = x psi_alpha^2 - psi_{alpha-1} psi_{alpha+1}` and
/// `s = psi_{2 alpha} / (2 psi_alpha)`.  For even `alpha` the cubic `f = x^3 + A x + B`
/// divides `r`, `s` and `t`; the cofactors `r_tilde = r / f` and `t_tilde = t / f`
/// are stored as well.  Negative `alpha` flips the sign of `s`.
#[derive(Debug, Clone)]
pub struct MultiplicationMaps {
    pub alpha: i64,
    pub r: MultiPoly,
    pub s: MultiPoly,
    pub t: MultiPoly,
    pub r_tilde: Option<MultiPoly>,
    pub t_tilde: Option<MultiPoly>,
    ctx: CurveRing,
}

impl MultiplicationMaps {
    pub fn is_even(&self) -> bool {
        self.alpha % 2 == 0
    }

    pub fn context(&self) -> &CurveRing {
        &self.ctx
    }

    /// Degree of `[alpha]`, i.e. `alpha^2`.
    pub fn degree(&self) -> u128 {
        u128::from(self.alpha.unsigned_abs()).pow(2)
    }

    /// Specializes symbolic maps to `curve`; maps already fixed to a curve are returned as is.
    pub fn specialize(&self, curve: &WeierstrassCurve) -> MultiplicationMaps {
        if !self.ctx.is_symbolic() {
            return self.clone();
        }
        let ctx = CurveRing::specialized(curve);
        let sp = |p: &MultiPoly| ctx.specialize_from_symbolic(p);
        MultiplicationMaps {
            alpha: self.alpha,
            r: sp(&self.r),
            s: sp(&self.s),
            t: sp(&self.t),
            r_tilde: self.r_tilde.as_ref().map(sp),
            t_tilde: self.t_tilde.as_ref().map(sp),
            ctx,
        }
    }
}

/// Builds the maps of `[alpha]` inside `ctx`.
pub fn multiplication_maps(ctx: &CurveRing, alpha: i64) -> Result<MultiplicationMaps, EllipticError> {
    if alpha == 0 {
        return Err(EllipticError::ZeroAlpha);
    }
    let n = alpha.unsigned_abs() as usize;
    let psi = division_polynomials(ctx, n + 2);
    let f = ctx.cubic();
    let ring = ctx.ring();
    let minus_one = DivisionPolynomial { cofactor: MultiPoly::integer(ring, -1), has_y: false };
    let at = |i: isize| if i < 0 { &minus_one } else { &psi[i as usize] };
    let mul = |a: &DivisionPolynomial, b: &DivisionPolynomial| {
        let mut c = &a.cofactor * &b.cofactor;
        if a.has_y && b.has_y {
            c = &c * f;
        }
        (c, a.has_y ^ b.has_y)
    };
    let ni = n as isize;
    let (lo, hi) = (at(ni - 1), at(ni + 1));
    let (prod_lh, _) = mul(lo, hi);
    // N = psi_{n+2} psi_{n-1}^2 - psi_{n-2} psi_{n+1}^2, so that 2 y psi_{2n} = psi_n N.
    let (lo2, _) = mul(lo, lo);
    let (hi2, _) = mul(hi, hi);
    let (n1, _) = mul(at(ni + 2), &DivisionPolynomial { cofactor: lo2, has_y: false });
    let (n2, _) = mul(at(ni - 2), &DivisionPolynomial { cofactor: hi2, has_y: false });
    let big_n = &n1 - &n2;
    let x = ctx.x();
    let quarter = Rational::new(1.into(), 4.into());
    let mut maps = if n % 2 == 1 {
        let t = psi[n].cofactor.clone();
        let r = &(x * &t.pow(2)) - &prod_lh;
        let s = exact_divide(&big_n.scale(&quarter), f).expect("f divides N for odd alpha");
        MultiplicationMaps { alpha, r, s, t, r_tilde: None, t_tilde: None, ctx: ctx.clone() }
    } else {
        // psi_n = y * t_tilde, the cofactor of N carries the remaining y.
        let t_tilde = psi[n].cofactor.clone();
        let r_tilde = &(&(x * f) * &t_tilde.pow(2)) - &prod_lh;
        let s = (f * &big_n).scale(&quarter);
        MultiplicationMaps {
            alpha,
            r: f * &r_tilde,
            s,
            t: f * &t_tilde,
            r_tilde: Some(r_tilde),
            t_tilde: Some(t_tilde),
            ctx: ctx.clone(),
        }
    };
    if alpha < 0 {
        maps.s = -&maps.s;
    }
    Ok(maps)
}

/// Homogeneous image `(X : Y : Z)` of an affine point under the parity-appropriate formula:
/// `(r t : s y : t^3)` for odd `alpha`, `(r t_tilde y : s : t_tilde t^2 y)` for even `alpha`.
pub fn projective_image(maps: &MultiplicationMaps, curve: &WeierstrassCurve, p: &CurvePoint) -> Option<[Rational; 3]> {
    let (x, y) = match p {
        CurvePoint::Infinity => return None,
        CurvePoint::Affine { x, y } => (x, y),
    };
    let pt = maps.ctx.point_for(x, curve);
    let r = maps.r.eval(&pt);
    let s = maps.s.eval(&pt);
    let t = maps.t.eval(&pt);
    Some(match &maps.t_tilde {
        None => [&r * &t, &s * y, &t * &t * &t],
        Some(tt) => {
            let tt = tt.eval(&pt);
            [&r * &tt * y, s, &tt * &t * &t * y]
        }
    })
}

/// `[alpha]P` through the rational maps.
///
/// Fails with [`EllipticError::Undefined`] exactly where the affine output
/// would need a zero denominator: zeros of `t` for odd `alpha`, zeros of
/// `t_tilde t^2 y` for even `alpha`.  These are kernel points; callers fall back
/// to the group law there.
pub fn evaluate_multiplication_map(
    curve: &WeierstrassCurve,
    maps: &MultiplicationMaps,
    p: &CurvePoint,
) -> Result<CurvePoint, EllipticError> {
    if p.is_infinity() {
        return Ok(CurvePoint::Infinity);
    }
    if !curve.contains(p) {
        return Err(EllipticError::NotOnCurve);
    }
    let [x, y, z] = projective_image(maps, curve, p).expect("affine input");
    if z.is_zero() {
        let (parity, reason) = if maps.is_even() {
            ("even", "t_tilde(x) t(x)^2 y vanishes")
        } else {
            ("odd", "t(x) vanishes")
        };
        return Err(EllipticError::Undefined { parity, reason: reason.into() });
    }
    Ok(CurvePoint::Affine { x: &x / &z, y: &y / &z })
}
