use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Monomial, MultiPoly, PolyError, Rational};

/// Exact quotient `a / b` in the polynomial ring.
///
/// Runs leading-term division in graded-lex order; with a single divisor this
/// terminates with remainder zero exactly when `b` divides `a`.
pub fn exact_divide(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, PolyError> {
    a.checked_sub(&MultiPoly::zero(b.ring()))?;
    let (lm_b, lc_b) = b.leading_term().ok_or(PolyError::DivisionByZero)?;
    let lm_b = lm_b.clone();
    let inv_lc = lc_b.recip();
    let mut rem = a.clone();
    let mut quot = MultiPoly::zero(a.ring());
    while let Some((lm_r, lc_r)) = rem.leading_term() {
        let m = lm_r.div(&lm_b).ok_or(PolyError::InexactDivision)?;
        let c = lc_r * &inv_lc;
        quot.add_term(m.clone(), c.clone());
        for (mb, cb) in b.terms() {
            rem.add_term(mb.mul(&m), -(cb * &c));
        }
    }
    Ok(quot)
}

fn to_integer_primitive(coeffs: &[Rational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in coeffs {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
        .collect();
    primitive(ints)
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return v;
    }
    let sign = if v.last().is_some_and(Signed::is_negative) { -g } else { g };
    v.into_iter().map(|c| c / &sign).collect()
}

/// Pseudo-remainder of `a` by `b` (dense, lowest degree first, `b` nonzero).
fn pseudo_remainder(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= bc * &lr;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

/// Monic gcd over Q of two polynomials univariate in `var`.
///
/// Primitive-part Euclidean algorithm on integer coefficient vectors.
/// `gcd(0, 0)` is the zero polynomial.
pub fn univariate_gcd(a: &MultiPoly, b: &MultiPoly, var: &str) -> Result<MultiPoly, PolyError> {
    a.checked_sub(b)?;
    let ring = a.ring();
    let idx = ring.require(var)?;
    let ca = a.univariate_coefficients(idx)?;
    let cb = b.univariate_coefficients(idx)?;
    let mut x = to_integer_primitive(&ca);
    let mut y = to_integer_primitive(&cb);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive(pseudo_remainder(&x, &y));
        x = y;
        y = r;
    }
    let coeffs: Vec<Rational> = x.into_iter().map(Rational::from_integer).collect();
    Ok(MultiPoly::from_univariate(ring, idx, &coeffs).monic())
}

/// A rational-function value `numerator / denominator` bound to a variable.
#[derive(Debug, Clone)]
pub struct Binding {
    pub var: String,
    pub numerator: MultiPoly,
    pub denominator: MultiPoly,
}

impl Binding {
    pub fn new(var: impl Into<String>, numerator: MultiPoly, denominator: MultiPoly) -> Self {
        Binding {
            var: var.into(),
            numerator,
            denominator,
        }
    }
}

/// Substitutes rational functions for variables and returns the result as one
/// fraction `(numerator, denominator)`.
///
/// For each bound variable `v` of degree `D_v` in `p`, every term is multiplied
/// through by `den_v^{D_v}`, so the denominator is `prod_v den_v^{D_v}`; no
/// cancellation is attempted.  Unbound variables are left in place.
pub fn substitute(p: &MultiPoly, bindings: &[Binding]) -> Result<(MultiPoly, MultiPoly), PolyError> {
    let ring = p.ring();
    struct Prepared {
        index: usize,
        num_pows: Vec<MultiPoly>,
        den_pows: Vec<MultiPoly>,
        degree: u32,
    }
    let mut prepared = Vec::new();
    for b in bindings {
        let index = ring.require(&b.var)?;
        b.numerator.checked_sub(&MultiPoly::zero(ring))?;
        b.denominator.checked_sub(&MultiPoly::zero(ring))?;
        if b.denominator.is_zero() {
            return Err(PolyError::ZeroDenominator { var: b.var.clone() });
        }
        let degree = p.degree_at(index).unwrap_or(0);
        prepared.push(Prepared {
            index,
            num_pows: powers(&b.numerator, degree),
            den_pows: powers(&b.denominator, degree),
            degree,
        });
    }
    let mut numerator = MultiPoly::zero(ring);
    for (m, c) in p.terms() {
        let mut rest = m.clone();
        let mut term = MultiPoly::one(ring);
        for pr in &prepared {
            let e = m.exponent(pr.index);
            rest = rest.with_exponent(pr.index, 0);
            term = &term * &pr.num_pows[e as usize];
            term = &term * &pr.den_pows[(pr.degree - e) as usize];
        }
        term = &term * &MultiPoly::monomial(ring, rest, c.clone());
        numerator = &numerator + &term;
    }
    let mut denominator = MultiPoly::one(ring);
    for pr in &prepared {
        denominator = &denominator * &pr.den_pows[pr.degree as usize];
    }
    Ok((numerator, denominator))
}

fn powers(p: &MultiPoly, max: u32) -> Vec<MultiPoly> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(MultiPoly::one(p.ring()));
    for i in 1..=max as usize {
        out.push(&out[i - 1] * p);
    }
    out
}

/// Reduces `p` modulo relations `y_i^2 = cubic_i` so every `y_i` has degree at most one.
pub fn reduce_weierstrass(p: &MultiPoly, system: &[(String, MultiPoly)]) -> Result<MultiPoly, PolyError> {
    let ring = p.ring();
    let mut rels = Vec::with_capacity(system.len());
    for (y, cubic) in system {
        let idx = ring.require(y)?;
        cubic.checked_sub(&MultiPoly::zero(ring))?;
        let half = p.degree_at(idx).unwrap_or(0) / 2;
        rels.push((idx, powers(cubic, half)));
    }
    // Group terms by their reduced monomial so each cubic power is multiplied once per group.
    let mut current = p.clone();
    for (idx, cubic_pows) in &rels {
        let mut groups: BTreeMap<u32, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in current.terms() {
            let e = m.exponent(*idx);
            groups
                .entry(e / 2)
                .or_default()
                .insert(m.with_exponent(*idx, e % 2), c.clone());
        }
        let mut next = MultiPoly::zero(ring);
        for (half, terms) in groups {
            let part = MultiPoly::from_terms(ring, terms);
            next = &next + &(&part * &cubic_pows[half as usize]);
        }
        current = next;
    }
    // A cubic may mention another y only if the caller built an unusual system; reduce again then.
    let reduced = system.iter().all(|(y, _)| {
        ring.index_of(y)
            .is_none_or(|i| current.degree_at(i).unwrap_or(0) <= 1)
    });
    if reduced {
        Ok(current)
    } else {
        reduce_weierstrass(&current, system)
    }
}
