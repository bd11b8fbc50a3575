//! Closed intervals of binary floats with outward rounding.
//!
//! The backend returns correctly rounded to-nearest results (error at most half
//! an ulp) and flags inexact ones; every inexact endpoint is then pushed outward
//! by a relative `2^(2 - p)`, i.e. about four ulps, which strictly covers the
//! rounding error.  Exact results are kept as they are.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;

use crate::exact_poly::Rational;

/// Default significand width in bits.
pub const WORKING_PRECISION: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache allocation"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

fn cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(x) if x < 0 => Ordering::Less,
        Some(0) => Ordering::Equal,
        Some(_) => Ordering::Greater,
        None => panic!("comparison with NaN"),
    }
}

#[derive(Clone)]
pub struct Interval {
    lo: BigFloat,
    hi: BigFloat,
    p: usize,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower_decimal(), self.upper_decimal())
    }
}

/// Moves `x` down (`up = false`) or up by a relative `2^(2-p)` if it is inexact.
///
/// Stored endpoints always carry a cleared inexact flag, so the flag on a
/// fresh result reports the rounding of that one operation only.
fn nudge(mut x: BigFloat, up: bool, p: usize) -> BigFloat {
    if !x.inexact() {
        return x;
    }
    x.set_inexact(false);
    if x.is_zero() {
        let tiny = BigFloat::min_positive(p);
        return if up { tiny } else { tiny.neg() };
    }
    let mut eps = BigFloat::from_u8(1, p);
    eps.set_exponent(3 - p as i32);
    let delta = x.abs().mul(&eps, p, RM);
    let mut moved = if up { x.add(&delta, p, RM) } else { x.sub(&delta, p, RM) };
    moved.set_inexact(false);
    moved
}

impl Interval {
    fn from_raw(lo: BigFloat, hi: BigFloat, p: usize) -> Self {
        assert!(!lo.is_nan() && !hi.is_nan(), "interval endpoint is NaN");
        let lo = nudge(lo, false, p);
        let hi = nudge(hi, true, p);
        debug_assert!(cmp(&lo, &hi) != Ordering::Greater);
        Interval { lo, hi, p }
    }

    pub fn point(x: BigFloat, p: usize) -> Self {
        Interval::from_raw(x.clone(), x, p)
    }

    pub fn from_u128(n: u128, p: usize) -> Self {
        Interval::point(BigFloat::from_u128(n, p), p)
    }

    pub fn from_i64(n: i64, p: usize) -> Self {
        Interval::point(BigFloat::from_i64(n, p), p)
    }

    /// Exact for every finite `f64`.
    pub fn from_f64(x: f64, p: usize) -> Self {
        assert!(x.is_finite(), "non-finite input {x}");
        Interval::point(BigFloat::from_f64(x, p.max(64)), p)
    }

    pub fn from_bigint(n: &BigInt, p: usize) -> Self {
        let x = with_consts(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, p, RM, cc));
        Interval::point(x, p)
    }

    pub fn from_rational(q: &Rational, p: usize) -> Self {
        Interval::from_bigint(q.numer(), p).div(&Interval::from_bigint(q.denom(), p))
    }

    /// A decimal literal such as `3.724`, enclosed.
    pub fn from_decimal(s: &str, p: usize) -> Self {
        let x = with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc));
        Interval::point(x, p)
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    fn prec(&self, other: &Interval) -> usize {
        self.p.max(other.p)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let p = self.prec(other);
        Interval::from_raw(self.lo.add(&other.lo, p, RM), self.hi.add(&other.hi, p, RM), p)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let p = self.prec(other);
        Interval::from_raw(self.lo.sub(&other.hi, p, RM), self.hi.sub(&other.lo, p, RM), p)
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), p: self.p }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let p = self.prec(other);
        // Each candidate is nudged both ways so the extremes stay covered after rounding.
        let mut lo: Option<BigFloat> = None;
        let mut hi: Option<BigFloat> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let c = a.mul(b, p, RM);
                let (down, up) = (nudge(c.clone(), false, p), nudge(c, true, p));
                if lo.as_ref().is_none_or(|l| cmp(&down, l) == Ordering::Less) {
                    lo = Some(down);
                }
                if hi.as_ref().is_none_or(|h| cmp(&up, h) == Ordering::Greater) {
                    hi = Some(up);
                }
            }
        }
        Interval { lo: lo.expect("four products"), hi: hi.expect("four products"), p }
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, other: &Interval) -> Interval {
        assert!(other.is_positive() || other.is_negative(), "division by an interval containing zero");
        let p = self.prec(other);
        let inv = Interval::from_raw(
            BigFloat::from_u8(1, p).div(&other.hi, p, RM),
            BigFloat::from_u8(1, p).div(&other.lo, p, RM),
            p,
        );
        self.mul(&inv)
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self) -> Interval {
        assert!(self.is_positive(), "logarithm of a non-positive interval");
        let p = self.p;
        let (lo, hi) = with_consts(|cc| (self.lo.ln(p, RM, cc), self.hi.ln(p, RM, cc)));
        Interval::from_raw(lo, hi, p)
    }

    pub fn exp(&self) -> Interval {
        let p = self.p;
        let (lo, hi) = with_consts(|cc| (self.lo.exp(p, RM, cc), self.hi.exp(p, RM, cc)));
        Interval::from_raw(lo, hi, p)
    }

    pub fn ln2(p: usize) -> Interval {
        Interval::from_u128(2, p).ln()
    }

    /// `self^e` for a positive base, as `exp(e ln self)`.
    pub fn pow(&self, e: &Interval) -> Interval {
        e.mul(&self.ln()).exp()
    }

    /// Hull of the pointwise maximum.
    pub fn max(&self, other: &Interval) -> Interval {
        let pick = |a: &BigFloat, b: &BigFloat| if cmp(a, b) == Ordering::Less { b.clone() } else { a.clone() };
        Interval { lo: pick(&self.lo, &other.lo), hi: pick(&self.hi, &other.hi), p: self.prec(other) }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        self.neg().max(&other.neg()).neg()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive() && !self.lo.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative() && !self.hi.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.lo.is_inf() && !self.hi.is_inf()
    }

    /// `self` lies inside `other`.
    pub fn within(&self, other: &Interval) -> bool {
        cmp(&other.lo, &self.lo) != Ordering::Greater && cmp(&self.hi, &other.hi) != Ordering::Greater
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let b = BigFloat::from_f64(x, 64);
        cmp(&self.lo, &b) != Ordering::Greater && cmp(&b, &self.hi) != Ordering::Greater
    }

    /// Largest `f64` not above the lower endpoint.
    pub fn lower_f64(&self) -> f64 {
        to_f64(&self.lo, false)
    }

    /// Smallest `f64` not below the upper endpoint.
    pub fn upper_f64(&self) -> f64 {
        to_f64(&self.hi, true)
    }

    pub fn lower_decimal(&self) -> String {
        decimal(&self.lo)
    }

    pub fn upper_decimal(&self) -> String {
        decimal(&self.hi)
    }
}

fn decimal(x: &BigFloat) -> String {
    with_consts(|cc| x.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
}

fn to_f64(x: &BigFloat, up: bool) -> f64 {
    if x.is_inf_pos() {
        return if up { f64::INFINITY } else { f64::MAX };
    }
    if x.is_inf_neg() {
        return if up { f64::MIN } else { f64::NEG_INFINITY };
    }
    let mut f: f64 = decimal(x).parse().unwrap_or(0.0);
    if f == f64::INFINITY && !up {
        f = f64::MAX;
    } else if f == f64::NEG_INFINITY && up {
        f = f64::MIN;
    }
    let wrong = |f: f64| {
        if f.is_infinite() {
            return false;
        }
        let o = cmp(&BigFloat::from_f64(f, 64), x);
        if up { o == Ordering::Less } else { o == Ordering::Greater }
    };
    while wrong(f) {
        f = if up { f.next_up() } else { f.next_down() };
    }
    f
}
