//! Explicit height constants and the Diophantine bounds built from them.
//!
//! Every real quantity is an [`Interval`]; reports quote upper bounds by their
//! upper endpoint and lower bounds by their lower endpoint.  The constants
//! `c6`, `c7`, `c8` are only known to be effective, so the essential-minimum
//! bounds report the explicit cofactor and name the constant.

mod interval;

pub use interval::{Interval, WORKING_PRECISION};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::elliptic::WeierstrassCurve;
use crate::exact_poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeightError {
    #[error("deg(phi) must be at least 1")]
    ZeroIsogenyDegree,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("result is outside the representable exponent range")]
    OutOfRange,
    #[error("argument out of domain: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Up,
    Down,
}

/// A real bound rounded in the stated direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub name: String,
    pub value: f64,
    pub decimal: String,
    pub rounding: Rounding,
}

impl BoundValue {
    pub fn upper(name: &str, x: &Interval) -> Self {
        BoundValue { name: name.into(), value: x.upper_f64(), decimal: x.upper_decimal(), rounding: Rounding::Up }
    }

    pub fn lower(name: &str, x: &Interval) -> Self {
        BoundValue { name: name.into(), value: x.lower_f64(), decimal: x.lower_decimal(), rounding: Rounding::Down }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerValue {
    pub name: String,
    /// Decimal digits; may exceed 64 bits.
    pub value: String,
}

/// An effective constant whose value is not known explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicConstant {
    pub name: String,
    pub depends_on: String,
    /// The reported values are multipliers of this constant, taken as 1.
    pub assumed: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: serde_json::Value,
    pub values: Vec<BoundValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub integers: Vec<IntegerValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub symbolic: Vec<SymbolicConstant>,
}

const P: usize = WORKING_PRECISION;

fn int(n: u128) -> Interval {
    Interval::from_u128(n, P)
}

fn rat(n: i64, d: i64) -> Interval {
    Interval::from_rational(&Rational::new(n.into(), d.into()), P)
}

/// `log max(|n|, 1)` for an integer.
fn height_int(n: &BigInt) -> Interval {
    if n.abs() <= BigInt::from(1) {
        int(0)
    } else {
        Interval::from_bigint(&n.abs(), P).ln()
    }
}

/// `h(q) = log max(|numerator|, denominator)` in lowest terms; `h(0) = 0`.
pub fn weil_height_rational(q: &Rational) -> Interval {
    if q.is_zero() {
        return int(0);
    }
    height_int(q.numer()).max(&height_int(q.denom()))
}

/// `log max(|q|, 1)`, the archimedean part of the height on `Q`.
pub fn archimedean_height(q: &Rational) -> Interval {
    if q.abs() <= Rational::from_integer(1.into()) {
        int(0)
    } else {
        height_int(q.numer()).sub(&height_int(q.denom()))
    }
}

/// `c0(d1, d2, m)` by the double sum, accumulated in interval arithmetic.
pub fn c0(d1: u32, d2: u32, m: u128) -> Interval {
    c0_with_precision(d1, d2, m, P)
}

pub fn c0_with_precision(d1: u32, d2: u32, m: u128, p: usize) -> Interval {
    let mut sum = Interval::from_u128(0, p);
    for i in 0..=u128::from(d1) {
        for j in 0..=u128::from(d2) {
            sum = sum.add(&Interval::from_u128(1, p).div(&Interval::from_u128(2 * (i + j + 1), p)));
        }
    }
    sum.add(&c0_log_part(d1, d2, m, p))
}

/// `c0(d1, d2, m)` through harmonic numbers, with the rational part exact:
/// `((d1 + d2 + 2) H(d1 + d2 + 2) - (d1 + 1) H(d1 + 1) - (d2 + 1) H(d2 + 1)) / 2`.
pub fn c0_harmonic(d1: u32, d2: u32, m: u128) -> Interval {
    let h = |k: u32| -> Rational { (1..=k).map(|j| Rational::new(1.into(), j.into())).sum() };
    let q = |k: u32| Rational::from_integer(k.into());
    let two = Rational::from_integer(2.into());
    let rational = (q(d1 + d2 + 2) * h(d1 + d2 + 2) - q(d1 + 1) * h(d1 + 1) - q(d2 + 1) * h(d2 + 1)) / two;
    Interval::from_rational(&rational, P).add(&c0_log_part(d1, d2, m, P))
}

fn c0_log_part(d1: u32, d2: u32, m: u128, p: usize) -> Interval {
    let coeff = Rational::from_integer(BigInt::from(m)) - Rational::new((d1 + d2).into(), 2.into());
    let ln2 = Interval::ln2(p);
    Interval::from_rational(&coeff, p).mul(&ln2)
}

/// Additive constants comparing the Faltings and Neron-Tate heights on one curve.
#[derive(Debug, Clone)]
pub struct CurveConstants {
    pub c1: Interval,
    pub c2: Interval,
    pub c3: Interval,
}

/// `c1(E)`, `c2(E)` and `c3 = c1 + c2`; `use_better` selects the sharper pair valid over `Q`.
pub fn c1_c2_curve(curve: &WeierstrassCurve, use_better: bool) -> CurveConstants {
    let a = BigInt::from(curve.a());
    let b = BigInt::from(curve.b());
    let delta = curve.discriminant();
    let j = curve.j_invariant();
    let h_j = weil_height_rational(&j);
    let h_inf_j = archimedean_height(&j);
    let h_delta = height_int(&delta);
    let (c1, c2) = if use_better {
        let sum = Interval::from_bigint(&(a.abs() + b.abs() + 3), P).ln().div(&int(2));
        let disc = h_delta.add(&h_inf_j).div(&int(4));
        // h(1 : A^(1/2) : B^(1/3)) = max(0, log|A| / 2, log|B| / 3) for integers.
        let weighted = int(0).max(&height_int(&a).div(&int(2))).max(&height_int(&b).div(&int(3)));
        let first = sum.add(&disc);
        let c1 = first
            .add(&h_j.div(&int(8)))
            .add(&Interval::from_decimal("2.919", P))
            .min(&weighted.mul(&int(3)).add(&Interval::from_decimal("4.709", P)));
        let c2 = first
            .add(&Interval::from_decimal("3.21", P))
            .min(&weighted.mul(&rat(3, 2)).add(&Interval::from_decimal("2.427", P)));
        (c1, c2)
    } else {
        let base = height_int(&a).add(&height_int(&b)).div(&int(2)).add(&h_delta.add(&h_inf_j).div(&int(4)));
        let c1 = base.add(&h_j.div(&int(8))).add(&Interval::from_decimal("3.724", P));
        let c2 = base.add(&Interval::from_decimal("4.015", P));
        (c1, c2)
    };
    let c3 = c1.add(&c2);
    CurveConstants { c1, c2, c3 }
}

/// Per-curve constants and their sums over the product.
#[derive(Debug, Clone)]
pub struct ProductConstants {
    pub curves: Vec<CurveConstants>,
    pub c1: Interval,
    pub c2: Interval,
    pub c3: Interval,
}

pub fn product_constants(curves: &[WeierstrassCurve], use_better: bool) -> ProductConstants {
    let per: Vec<CurveConstants> = curves.iter().map(|c| c1_c2_curve(c, use_better)).collect();
    let sum = |f: fn(&CurveConstants) -> &Interval| per.iter().fold(int(0), |acc, c| acc.add(f(c)));
    let c1 = sum(|c| &c.c1);
    let c2 = sum(|c| &c.c2);
    let c3 = c1.add(&c2);
    ProductConstants { curves: per, c1, c2, c3 }
}

fn check_nonnegative(name: &str, x: f64) -> Result<(), HeightError> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(HeightError::Domain(format!("{name} must be a finite non-negative number, got {x}")))
    }
}

/// Upper bound `N 3^(N-1) (h2(Q) + c3(A_N))` for the height of a point-fibre subvariety.
pub fn zhang_special_bound(n: u32, h2_q: f64, c3_product: &Interval) -> Result<Interval, HeightError> {
    check_nonnegative("h2(Q)", h2_q)?;
    if n == 0 {
        return Err(HeightError::Domain("N must be positive".into()));
    }
    let coeff = 3u128
        .checked_pow(n - 1)
        .and_then(|t| t.checked_mul(u128::from(n)))
        .ok_or(HeightError::OutOfRange)?;
    Ok(int(coeff).mul(&Interval::from_f64(h2_q, P).add(c3_product)))
}

#[derive(Debug, Clone)]
pub struct BezoutBounds {
    pub trivial: Interval,
    pub improved: Interval,
    /// `c0(1, dim_B, 3^N - 1)`.
    pub c0: Interval,
}

/// Arithmetic Bezout bounds for a component of `phi^{-1}(C) ∩ B`, without and with irreducibility.
pub fn bezout_intersection_bounds(
    deg_pre: u128,
    h2_pre: f64,
    deg_b: u128,
    h2_b: f64,
    dim_b: u32,
    n: u32,
    deg_phi: u128,
) -> Result<BezoutBounds, HeightError> {
    if deg_phi == 0 {
        return Err(HeightError::ZeroIsogenyDegree);
    }
    check_nonnegative("h2 of the preimage", h2_pre)?;
    check_nonnegative("h2(B)", h2_b)?;
    let m = 3u128.checked_pow(n).ok_or(HeightError::OutOfRange)? - 1;
    let c = c0(1, dim_b, m);
    let trivial = int(deg_pre)
        .mul(&Interval::from_f64(h2_b, P))
        .add(&int(deg_b).mul(&Interval::from_f64(h2_pre, P)))
        .add(&c.mul(&int(deg_pre)).mul(&int(deg_b)));
    let improved = trivial.div(&int(deg_phi));
    Ok(BezoutBounds { trivial, improved, c0: c })
}

/// `lambda(N, k) = (5 N (k + 1))^(k + 1)`, exactly.
pub fn galateau_lambda(n: u32, k: u32) -> BigUint {
    let base = BigUint::from(5u32) * BigUint::from(n) * BigUint::from(k + 1);
    num_traits::pow(base, (k + 1) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EssentialMinimumMode {
    Smart,
    Naive,
}

fn big_interval(n: &BigUint) -> Interval {
    Interval::from_bigint(&BigInt::from(n.clone()), P)
}

fn pow_u(base: u128, e: u32) -> Result<u128, HeightError> {
    base.checked_pow(e).ok_or(HeightError::OutOfRange)
}

/// Lower-bound multipliers for the essential minimum of `Phi(C)`.
///
/// Smart mode goes through the preimage `f^{-1}(C)`; naive mode applies the
/// lower bound to `Phi(C)` directly.  `deg_pre` is the degree of `f^{-1}(C)`
/// if known.
pub fn essential_minimum_image_bounds(
    n: u32,
    r: u32,
    d_l: u128,
    alpha: i64,
    deg_c: u128,
    deg_pre: Option<u128>,
    mode: EssentialMinimumMode,
) -> Result<BoundReport, HeightError> {
    if n < 2 || r < 2 || r > n {
        return Err(HeightError::Hypothesis(format!("need 2 <= r <= N, got r = {r}, N = {n}")));
    }
    if d_l == 0 {
        return Err(HeightError::Domain("d_L must be positive".into()));
    }
    let abs = u128::from(alpha.unsigned_abs());
    let alpha2 = abs.checked_mul(abs).ok_or(HeightError::OutOfRange)?;
    if alpha2 < d_l {
        return Err(HeightError::Hypothesis(format!("alpha^2 = {alpha2} < d_L = {d_l}")));
    }
    let lambda = galateau_lambda(n, n - 1);
    let lam = big_interval(&lambda);
    let nn = u128::from(n);
    let inv_n1 = rat(1, i64::from(n - 1));
    let mut values = Vec::new();
    let mut integers = vec![IntegerValue { name: "lambda(N,N-1)".into(), value: lambda.to_string() }];
    let push_int = |name: &str, v: Result<u128, HeightError>, into: &mut Vec<IntegerValue>| -> Result<(), HeightError> {
        into.push(IntegerValue { name: name.into(), value: v?.to_string() });
        Ok(())
    };
    let checked = |x: Interval| if x.is_finite() { Ok(x) } else { Err(HeightError::OutOfRange) };
    let constant = match mode {
        EssentialMinimumMode::Smart => {
            let log_base = d_l.checked_mul(abs).ok_or(HeightError::OutOfRange)?;
            if log_base < 2 {
                return Err(HeightError::Domain("d_L |alpha| must be at least 2".into()));
            }
            let log_pow = checked(int(log_base).ln().pow(&lam))?;
            let strong = checked(
                int(alpha2)
                    .pow(&int(u128::from(r - 1)))
                    .div(&int(d_l))
                    .pow(&inv_n1)
                    .div(&log_pow),
            )?;
            let weak = checked(int(abs).pow(&rat(2 * i64::from(r - 2), i64::from(n - 1))).div(&log_pow))?;
            values.push(BoundValue::lower("c7_multiplier", &strong));
            values.push(BoundValue::lower("c7_multiplier_weak", &weak));
            let n2 = 3 * nn * nn;
            let n3 = 3 * nn * nn * nn;
            if let Some(d) = deg_pre {
                push_int("deg_D_via_preimage", n2.checked_mul(d_l).and_then(|x| x.checked_mul(d)).ok_or(HeightError::OutOfRange), &mut integers)?;
            }
            let a_nr = pow_u(alpha2, n - r)?;
            push_int(
                "deg_D_via_dL",
                n3.checked_mul(d_l).and_then(|x| x.checked_mul(a_nr)).and_then(|x| x.checked_mul(deg_c)).ok_or(HeightError::OutOfRange),
                &mut integers,
            )?;
            push_int(
                "deg_D_via_alpha",
                pow_u(alpha2, n + 1 - r)?.checked_mul(n3).and_then(|x| x.checked_mul(deg_c)).ok_or(HeightError::OutOfRange),
                &mut integers,
            )?;
            SymbolicConstant { name: "c7".into(), depends_on: "A_N, deg(C)".into(), assumed: 1 }
        }
        EssentialMinimumMode::Naive => {
            if abs < 2 {
                return Err(HeightError::Domain("naive mode needs |alpha| >= 2".into()));
            }
            let log_pow = checked(int(abs).ln().pow(&lam))?;
            let m = checked(int(abs).pow(&rat(-2, i64::from(n - 1))).div(&log_pow))?;
            values.push(BoundValue::lower("c8_multiplier", &m));
            push_int(
                "deg_Phi_C",
                (3 * nn * nn).checked_mul(alpha2).and_then(|x| x.checked_mul(deg_c)).ok_or(HeightError::OutOfRange),
                &mut integers,
            )?;
            SymbolicConstant { name: "c8".into(), depends_on: "A_N, deg(C)".into(), assumed: 1 }
        }
    };
    Ok(BoundReport {
        name: "essential_minimum_image".into(),
        inputs: serde_json::json!({
            "N": n, "r": r, "d_L": d_l.to_string(), "alpha": alpha, "deg_C": deg_c.to_string(),
            "deg_preimage": deg_pre.map(|d| d.to_string()), "mode": mode,
        }),
        values,
        integers,
        symbolic: vec![constant],
    })
}
