use super::WeierstrassCurve;
use crate::exact_poly::{exact_divide, MultiPoly, Rational, Ring};

/// Polynomial ring hosting division polynomials, with `A`, `B` either symbolic
/// or fixed to a curve.
#[derive(Debug, Clone)]
pub struct CurveRing {
    ring: Ring,
    curve: Option<WeierstrassCurve>,
    x: MultiPoly,
    a: MultiPoly,
    b: MultiPoly,
    cubic: MultiPoly,
}

impl CurveRing {
    /// Ring `[x, A, B]` with both coefficients left as variables.
    pub fn symbolic() -> Self {
        let ring = Ring::new(["x", "A", "B"]).expect("distinct names");
        let x = MultiPoly::var_at(&ring, 0);
        let a = MultiPoly::var_at(&ring, 1);
        let b = MultiPoly::var_at(&ring, 2);
        Self::assemble(ring, None, x, a, b)
    }

    /// Ring `[x]` with the coefficients of `curve` substituted.
    pub fn specialized(curve: &WeierstrassCurve) -> Self {
        let ring = Ring::new(["x"]).expect("single name");
        let x = MultiPoly::var_at(&ring, 0);
        let a = MultiPoly::integer(&ring, curve.a());
        let b = MultiPoly::integer(&ring, curve.b());
        Self::assemble(ring, Some(*curve), x, a, b)
    }

    fn assemble(ring: Ring, curve: Option<WeierstrassCurve>, x: MultiPoly, a: MultiPoly, b: MultiPoly) -> Self {
        let cubic = &(&x.pow(3) + &(&a * &x)) + &b;
        CurveRing { ring, curve, x, a, b, cubic }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn curve(&self) -> Option<&WeierstrassCurve> {
        self.curve.as_ref()
    }

    pub fn is_symbolic(&self) -> bool {
        self.curve.is_none()
    }

    pub fn x(&self) -> &MultiPoly {
        &self.x
    }

    /// The Weierstrass cubic `x^3 + A x + B`.
    pub fn cubic(&self) -> &MultiPoly {
        &self.cubic
    }

    /// Evaluation point for polynomials of this ring at abscissa `x` on `curve`.
    pub fn point_for(&self, x: &Rational, curve: &WeierstrassCurve) -> Vec<Rational> {
        if self.is_symbolic() {
            vec![
                x.clone(),
                Rational::from_integer(curve.a().into()),
                Rational::from_integer(curve.b().into()),
            ]
        } else {
            vec![x.clone()]
        }
    }

    /// Same as [`point_for`](Self::point_for) with coordinates reduced mod `p`.
    pub fn point_for_mod(&self, x: u64, curve: &WeierstrassCurve, p: u64) -> Vec<u64> {
        if self.is_symbolic() {
            vec![
                x % p,
                curve.a().rem_euclid(p as i64) as u64,
                curve.b().rem_euclid(p as i64) as u64,
            ]
        } else {
            vec![x % p]
        }
    }

    /// Moves a polynomial of the symbolic ring into this one.
    pub fn specialize_from_symbolic(&self, p: &MultiPoly) -> MultiPoly {
        match &self.curve {
            None => p.clone(),
            Some(c) => {
                let fixed = p
                    .specialize_at(1, &Rational::from_integer(c.a().into()))
                    .specialize_at(2, &Rational::from_integer(c.b().into()));
                fixed
                    .embed(&self.ring, &[Some(0), None, None])
                    .expect("A and B were specialized away")
            }
        }
    }
}

/// Division polynomial `psi_m = y^e * cofactor` with `e` in `{0, 1}`.
///
/// Odd-index polynomials are free of `y`; even-index ones carry exactly one
/// factor of `y`, and the cofactor is a polynomial in `x` alone (with `y^2`
/// already replaced by the cubic).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionPolynomial {
    pub cofactor: MultiPoly,
    pub has_y: bool,
}

impl DivisionPolynomial {
    fn plain(cofactor: MultiPoly) -> Self {
        DivisionPolynomial { cofactor, has_y: false }
    }

    fn mul(&self, other: &Self, cubic: &MultiPoly) -> Self {
        let mut cofactor = &self.cofactor * &other.cofactor;
        let has_y = match (self.has_y, other.has_y) {
            (true, true) => {
                cofactor = &cofactor * cubic;
                false
            }
            (u, v) => u ^ v,
        };
        DivisionPolynomial { cofactor, has_y }
    }

    fn sub(&self, other: &Self) -> Self {
        if other.cofactor.is_zero() {
            return self.clone();
        }
        if self.cofactor.is_zero() {
            return DivisionPolynomial { cofactor: -&other.cofactor, has_y: other.has_y };
        }
        assert_eq!(self.has_y, other.has_y, "y-parity mismatch in division polynomial recurrence");
        DivisionPolynomial {
            cofactor: &self.cofactor - &other.cofactor,
            has_y: self.has_y,
        }
    }

    fn cube(&self, cubic: &MultiPoly) -> Self {
        self.mul(&self.mul(self, cubic), cubic)
    }

    fn square(&self, cubic: &MultiPoly) -> Self {
        self.mul(self, cubic)
    }
}

/// `psi_0, ..., psi_max` by the standard doubling recurrences.
pub fn division_polynomials(ctx: &CurveRing, max: usize) -> Vec<DivisionPolynomial> {
    let ring = ctx.ring();
    let (x, a, b, f) = (&ctx.x, &ctx.a, &ctx.b, &ctx.cubic);
    let int = |n: i64| MultiPoly::integer(ring, n);
    let mut psi = vec![
        DivisionPolynomial::plain(MultiPoly::zero(ring)),
        DivisionPolynomial::plain(int(1)),
        DivisionPolynomial { cofactor: int(2), has_y: true },
    ];
    let x2 = x.pow(2);
    let psi3 = &(&(&x.pow(4).scale_int(3) + &(&a.scale_int(6) * &x2)) + &(&b.scale_int(12) * x)) - &a.pow(2);
    psi.push(DivisionPolynomial::plain(psi3));
    let inner = [
        x.pow(6),
        &a.scale_int(5) * &x.pow(4),
        &b.scale_int(20) * &x.pow(3),
        &a.pow(2).scale_int(-5) * &x2,
        &(a * b).scale_int(-4) * x,
        b.pow(2).scale_int(-8),
        -&a.pow(3),
    ]
    .iter()
    .fold(MultiPoly::zero(ring), |acc, t| &acc + t);
    psi.push(DivisionPolynomial { cofactor: inner.scale_int(4), has_y: true });
    let two_f = f.scale_int(2);
    for n in 5..=max {
        let m = n / 2;
        let next = if n % 2 == 1 {
            let lhs = psi[m + 2].mul(&psi[m].cube(f), f);
            let rhs = psi[m - 1].mul(&psi[m + 1].cube(f), f);
            lhs.sub(&rhs)
        } else {
            let lhs = psi[m + 2].mul(&psi[m - 1].square(f), f);
            let rhs = psi[m - 2].mul(&psi[m + 1].square(f), f);
            let p = psi[m].mul(&lhs.sub(&rhs), f);
            debug_assert!(!p.has_y);
            // psi_{2m} = P / (2y) = y * P / (2 f)
            let cofactor = exact_divide(&p.cofactor, &two_f).expect("2f divides the doubling numerator");
            DivisionPolynomial { cofactor, has_y: true }
        };
        psi.push(next);
    }
    psi.truncate(max + 1);
    psi
}

pub fn division_polynomial(ctx: &CurveRing, m: usize) -> DivisionPolynomial {
    division_polynomials(ctx, m.max(4)).swap_remove(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_poly::parse_poly;

    #[test]
    fn small_indices() {
        let ctx = CurveRing::symbolic();
        let psi = division_polynomials(&ctx, 4);
        assert!(psi[0].cofactor.is_zero());
        assert!(psi[1].cofactor.is_one() && !psi[1].has_y);
        assert!(psi[2].has_y && psi[2].cofactor.to_string() == "2");
        let t3 = parse_poly("3*x^4 + 6*A*x^2 + 12*B*x - A^2", ctx.ring()).unwrap();
        assert_eq!(psi[3].cofactor, t3);
    }

    #[test]
    fn psi5_on_j_zero_curve() {
        let e = WeierstrassCurve::new(0, 1).unwrap();
        let ctx = CurveRing::specialized(&e);
        let psi5 = division_polynomial(&ctx, 5);
        assert!(!psi5.has_y);
        assert_eq!(psi5.cofactor.degree_at(0), Some(12));
        // Printed degree-12 bracket of the [1,5] example, scaled by the leading coefficient 5.
        let printed = parse_poly("x^12 + 76*x^9 - 48*x^6 - 320*x^3 - 256/5", ctx.ring()).unwrap();
        assert_eq!(psi5.cofactor, printed.scale_int(5));
    }

    #[test]
    fn specialization_commutes_with_construction() {
        let sym = division_polynomials(&CurveRing::symbolic(), 9);
        for (a, b) in [(0, 1), (-1, 0), (2, -3), (-7, 11)] {
            let e = WeierstrassCurve::new(a, b).unwrap();
            let ctx = CurveRing::specialized(&e);
            let direct = division_polynomials(&ctx, 9);
            for (s, d) in sym.iter().zip(&direct) {
                assert_eq!(ctx.specialize_from_symbolic(&s.cofactor), d.cofactor);
                assert_eq!(s.has_y, d.has_y);
            }
        }
    }

    #[test]
    fn degrees_follow_the_torsion_count() {
        let psi = division_polynomials(&CurveRing::specialized(&WeierstrassCurve::new(3, 7).unwrap()), 12);
        for (n, p) in psi.iter().enumerate().skip(1) {
            let n = n as u32;
            let expected = if n % 2 == 1 { (n * n - 1) / 2 } else { (n * n - 4) / 2 };
            assert_eq!(p.cofactor.degree_at(0), Some(expected), "psi_{n}");
            assert_eq!(p.has_y, n.is_multiple_of(2));
        }
    }
}
