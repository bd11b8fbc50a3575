use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Monomial, PolyError, Rational};

/// Ordered list of variable names shared by a family of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Arc<[String]>,
}

impl Ring {
    pub fn new<I, S>(vars: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(PolyError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Ring { vars: vars.into() })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name)
            .ok_or_else(|| PolyError::MissingVariable(name.to_string()))
    }

    fn check_same(&self, other: &Ring) -> Result<(), PolyError> {
        if self == other {
            Ok(())
        } else {
            Err(PolyError::RingMismatch {
                left: self.vars.join(","),
                right: other.vars.join(","),
            })
        }
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring[{}]", self.vars.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Ring-checked arithmetic entry point.
pub fn poly_arith(a: &MultiPoly, b: &MultiPoly, op: ArithOp) -> Result<MultiPoly, PolyError> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

/// Sparse polynomial over Q in the variables of its [`Ring`].
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(ring: &Ring) -> Self {
        MultiPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Ring, c: Rational) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.len()), c);
        }
        p
    }

    pub fn integer(ring: &Ring, c: i64) -> Self {
        Self::constant(ring, Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(ring: &Ring, name: &str) -> Result<Self, PolyError> {
        let idx = ring.require(name)?;
        Ok(Self::var_at(ring, idx))
    }

    pub fn var_at(ring: &Ring, index: usize) -> Self {
        let mut p = Self::zero(ring);
        p.terms
            .insert(Monomial::var(ring.len(), index), Rational::one());
        p
    }

    pub fn monomial(ring: &Ring, mono: Monomial, c: Rational) -> Self {
        assert_eq!(mono.arity(), ring.len(), "monomial arity must match ring");
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(ring: &Ring, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            assert_eq!(m.arity(), ring.len(), "monomial arity must match ring");
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in the variable at `index`; `None` for the zero polynomial.
    pub fn degree_at(&self, index: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(index)).max()
    }

    pub fn degree_in(&self, name: &str) -> Result<Option<u32>, PolyError> {
        Ok(self.degree_at(self.ring.require(name)?))
    }

    /// True when every term involves only the variable at `index`.
    pub fn is_univariate_at(&self, index: usize) -> bool {
        self.terms.keys().all(|m| {
            m.exponents()
                .iter()
                .enumerate()
                .all(|(i, &e)| i == index || e == 0)
        })
    }

    /// Whether the variable at `index` occurs in some term.
    pub fn involves(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(index) > 0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut out = MultiPoly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> MultiPoly {
        self.scale(&Rational::from_integer(BigInt::from(c)))
    }

    pub fn pow(&self, mut n: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.ring);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact evaluation at a rational point given in ring order.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.ring.len(), "point arity must match ring");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluation modulo an odd prime `p` at a point with coordinates in `[0, p)`.
    /// Returns `None` when some coefficient denominator is divisible by `p`.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> Option<u64> {
        assert_eq!(point.len(), self.ring.len(), "point arity must match ring");
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = rational_mod(c, p)?;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = mul_mod(t, pow_mod(point[i] % p, u64::from(e), p), p);
                }
            }
            acc = (acc + t) % p;
        }
        Some(acc)
    }

    /// Replaces the variable at `index` by a rational constant.
    pub fn specialize_at(&self, index: usize, value: &Rational) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            let c = if e == 0 {
                c.clone()
            } else {
                c * num_traits::pow(value.clone(), e as usize)
            };
            out.add_term(m.with_exponent(index, 0), c);
        }
        out
    }

    pub fn specialize(&self, name: &str, value: &Rational) -> Result<MultiPoly, PolyError> {
        Ok(self.specialize_at(self.ring.require(name)?, value))
    }

    /// Moves the polynomial into `target`, sending variable `i` of this ring to
    /// variable `mapping[i]` of the target.  Variables mapped to `None` must not occur.
    pub fn embed(&self, target: &Ring, mapping: &[Option<usize>]) -> Result<MultiPoly, PolyError> {
        assert_eq!(mapping.len(), self.ring.len());
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match mapping[i] {
                    Some(j) => exps[j] += e,
                    None => return Err(PolyError::MissingVariable(self.ring.vars()[i].clone())),
                }
            }
            out.add_term(Monomial::from_exponents(exps), c.clone());
        }
        Ok(out)
    }

    /// Embeds by variable name: every variable that occurs must exist in `target`
    /// under the name given by `rename` (identity when `rename` returns `None`).
    pub fn embed_by_name<F>(&self, target: &Ring, rename: F) -> Result<MultiPoly, PolyError>
    where
        F: Fn(&str) -> Option<String>,
    {
        let mapping: Vec<Option<usize>> = self
            .ring
            .vars()
            .iter()
            .map(|v| {
                let name = rename(v).unwrap_or_else(|| v.clone());
                target.index_of(&name)
            })
            .collect();
        self.embed(target, &mapping)
    }

    /// Coefficients of a univariate polynomial in the variable at `index`,
    /// lowest degree first.  Fails if other variables occur.
    pub fn univariate_coefficients(&self, index: usize) -> Result<Vec<Rational>, PolyError> {
        if !self.is_univariate_at(index) {
            return Err(PolyError::NotUnivariate {
                var: self.ring.vars()[index].clone(),
            });
        }
        let deg = self.degree_at(index).unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            coeffs[m.exponent(index) as usize] = c.clone();
        }
        Ok(coeffs)
    }

    /// Inverse of [`univariate_coefficients`](Self::univariate_coefficients).
    pub fn from_univariate(ring: &Ring, index: usize, coeffs: &[Rational]) -> MultiPoly {
        MultiPoly::from_terms(
            ring,
            coeffs.iter().enumerate().map(|(e, c)| {
                (
                    Monomial::var(ring.len(), index).with_exponent(index, e as u32),
                    c.clone(),
                )
            }),
        )
    }

    /// Groups terms by the exponent pattern of all variables except `index`;
    /// each group is a univariate polynomial in that variable.
    pub fn coefficients_over(&self, index: usize) -> BTreeMap<Monomial, MultiPoly> {
        let mut groups: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key = m.with_exponent(index, 0);
            let local = Monomial::one(self.ring.len()).with_exponent(index, m.exponent(index));
            groups
                .entry(key)
                .or_insert_with(|| MultiPoly::zero(&self.ring))
                .add_term(local, c.clone());
        }
        groups
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        if num_gcd.is_zero() {
            return Rational::one();
        }
        Rational::new(num_gcd, den_lcm)
    }

    /// Primitive integer form with a positive leading (graded-lex highest) coefficient.
    pub fn primitive_normalized(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_term().is_some_and(|(_, lc)| lc.is_negative()) {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Monic associate (leading coefficient one).
    pub fn monic(&self) -> MultiPoly {
        match self.leading_term() {
            Some((_, lc)) => self.scale(&lc.recip()),
            None => self.clone(),
        }
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// If `other = c * self` for a nonzero rational `c`, returns `c`.
    pub fn proportionality(&self, other: &MultiPoly) -> Option<Rational> {
        if self.ring != other.ring || self.terms.len() != other.terms.len() || self.is_zero() {
            return None;
        }
        let (m, a) = self.leading_term()?;
        let c = other.terms.get(m)? / a;
        (self.scale(&c) == *other).then_some(c)
    }
}

pub(crate) fn rational_mod(c: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let num = c.numer().mod_floor(&pb);
    let den = c.denom().mod_floor(&pb);
    let den: u64 = u64::try_from(den).ok()?;
    if den == 0 {
        return None;
    }
    let num: u64 = u64::try_from(num).ok()?;
    Some(mul_mod(num, inv_mod(den, p), p))
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Inverse modulo a prime via Fermat; `a` must be nonzero mod `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mono = format_monomial(self.ring.vars(), m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {:?}", self.ring)
    }
}

fn format_monomial(vars: &[String], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (v, &e) in vars.iter().zip(m.exponents()) {
        match e {
            0 => {}
            1 => parts.push(v.clone()),
            _ => parts.push(format!("{v}^{e}")),
        }
    }
    parts.join("*")
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomials from different rings")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomials from different rings")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomials from different rings")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::new(["x", "A", "B"]).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn display_uses_grlex_and_attached_signs() {
        let r = ring();
        let x = MultiPoly::var(&r, "x").unwrap();
        let a = MultiPoly::var(&r, "A").unwrap();
        let b = MultiPoly::var(&r, "B").unwrap();
        let t3 = &(&(&x.pow(4).scale_int(3) + &(&x.pow(2) * &a).scale_int(6))
            + &(&x * &b).scale_int(12))
            - &a.pow(2);
        assert_eq!(t3.to_string(), "3*x^4 + 6*x^2*A + 12*x*B - A^2");
        assert_eq!((-&t3).to_string(), "-3*x^4 - 6*x^2*A - 12*x*B + A^2");
        assert_eq!(MultiPoly::zero(&r).to_string(), "0");
        let frac = MultiPoly::constant(&r, Rational::new((-256).into(), 5.into()));
        assert_eq!(frac.to_string(), "-256/5");
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let p = MultiPoly::one(&ring());
        let other = MultiPoly::one(&Ring::new(["x"]).unwrap());
        assert!(matches!(
            poly_arith(&p, &other, ArithOp::Add),
            Err(PolyError::RingMismatch { .. })
        ));
        assert!(Ring::new(["x", "x"]).is_err());
    }

    #[test]
    fn primitive_normalization_clears_denominators_and_sign() {
        let r = ring();
        let x = MultiPoly::var(&r, "x").unwrap();
        let p = &x.scale(&Rational::new((-3).into(), 4.into())) + &MultiPoly::constant(&r, Rational::new(9.into(), 2.into()));
        let n = p.primitive_normalized();
        assert_eq!(n.to_string(), "x - 6");
        assert_eq!(p.proportionality(&n), Some(Rational::new((-4).into(), 3.into())));
    }

    #[test]
    fn eval_mod_matches_exact_eval() {
        let r = ring();
        let x = MultiPoly::var(&r, "x").unwrap();
        let p = &x.pow(3).scale(&Rational::new(1.into(), 3.into())) + &MultiPoly::integer(&r, 5);
        let exact = p.eval(&[q(4), q(0), q(0)]);
        let p_mod = 7;
        assert_eq!(p.eval_mod(&[4, 0, 0], p_mod), rational_mod(&exact, p_mod));
        assert_eq!(p.eval_mod(&[4, 0, 0], 3), None);
    }

    #[test]
    fn specialize_and_embed() {
        let r = ring();
        let x = MultiPoly::var(&r, "x").unwrap();
        let a = MultiPoly::var(&r, "A").unwrap();
        let p = &(&x * &a) + &a;
        let s = p.specialize("A", &q(2)).unwrap();
        assert_eq!(s.to_string(), "2*x + 2");
        let target = Ring::new(["x1", "y1"]).unwrap();
        let e = s.embed_by_name(&target, |v| (v == "x").then(|| "x1".to_string())).unwrap();
        assert_eq!(e.to_string(), "2*x1 + 2");
        assert!(p.embed_by_name(&target, |_| None).is_err());
    }
}
