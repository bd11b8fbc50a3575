//! Affine equations for `[alpha_1, ..., alpha_N]^{-1}(V)`.
//!
//! Each equation of `V` is pulled back by substituting `x_j -> r_j / t_j^2` and
//! `y_j -> s_j y_j / t_j^3`, clearing the denominator, reducing modulo the
//! Weierstrass relations and then dividing out every factor that lives on the
//! kernel locus `t_j(x_j) = 0`.  Those factors are recorded so that callers
//! know where the equations say nothing.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::diagonal_isogeny::DiagonalIsogeny;
use crate::elliptic::{multiplication_maps, CurvePoint, CurveRing, EllipticError};
use crate::exact_poly::{exact_divide, reduce_weierstrass, substitute, univariate_gcd, Binding, MultiPoly, PolyError};
use crate::product_variety::{
    preimage_multidegrees, MultiDegreeEntry, MultiDegreeTable, SubvarietyPresentation, VarietyError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreimageError {
    #[error("isogeny has {got} coordinates but the variety lives in a product of {expected} curves")]
    ArityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error("equation {index}: {source}")]
    Poly { index: usize, source: PolyError },
    #[error("equation {index} pulls back to zero; the variety contains a kernel translate")]
    IdenticallyZero { index: usize },
    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("point {coordinate} is not an affine point of its curve")]
    NotOnCurve { coordinate: usize },
    #[error("point {coordinate} lies on the excluded kernel locus")]
    Excluded { coordinate: usize },
}

/// How even multipliers are substituted.
///
/// `Reduced` sends `x_j` to `r_tilde / (t t_tilde)`, the form with the common
/// factor of `r` and `t` cancelled.  `Unreduced` uses `r / t^2` for every
/// parity.  Both must lead to the same cleaned equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubstitutionStyle {
    #[default]
    Reduced,
    Unreduced,
}

/// Where coordinate `j` of the pulled-back equations is not meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExcludedLocus {
    /// 1-based coordinate.
    pub coordinate: usize,
    pub alpha: i64,
    /// `t_alpha(x_j)`; its zeros are the kernel abscissas.
    #[serde(serialize_with = "as_string")]
    pub t: MultiPoly,
    /// Factors divided out of the cleared equations, one entry per division.
    #[serde(serialize_with = "as_strings")]
    pub stripped: Vec<MultiPoly>,
}

fn as_string<S: serde::Serializer>(p: &MultiPoly, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(p)
}

fn as_strings<S: serde::Serializer>(ps: &[MultiPoly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(ToString::to_string))
}

#[derive(Debug, Clone)]
pub struct PreimagePresentation {
    pub base: SubvarietyPresentation,
    pub isogeny: DiagonalIsogeny,
    pub equations: Vec<MultiPoly>,
    /// One entry per coordinate with `|alpha_j| > 1`.
    pub excluded_locus: Vec<ExcludedLocus>,
    pub multidegrees: MultiDegreeTable,
}

/// Wire form of a [`PreimagePresentation`].
#[derive(Debug, Clone, Serialize)]
pub struct PreimageJson {
    pub isogeny: Vec<i64>,
    pub equations: Vec<String>,
    pub excluded_locus: Vec<ExcludedLocus>,
    pub dim: usize,
    pub multidegrees: Vec<MultiDegreeEntry>,
    pub total_degree: u128,
}

impl PreimagePresentation {
    pub fn to_json(&self) -> Result<PreimageJson, VarietyError> {
        Ok(PreimageJson {
            isogeny: self.isogeny.alphas().to_vec(),
            equations: self.equations.iter().map(ToString::to_string).collect(),
            excluded_locus: self.excluded_locus.clone(),
            dim: self.multidegrees.dim(),
            multidegrees: self
                .multidegrees
                .entries()
                .map(|(t, d)| MultiDegreeEntry { index: t.to_vec(), deg: d })
                .collect(),
            total_degree: self.multidegrees.total_degree()?,
        })
    }

    /// True when some coordinate of the tuple (given as ring coordinates mod `p`) is a kernel abscissa.
    pub fn is_excluded_mod(&self, point: &[u64], p: u64) -> bool {
        self.excluded_locus
            .iter()
            .any(|e| e.t.eval_mod(point, p).is_none_or(|v| v == 0))
    }

    /// Whether every equation vanishes at `point` mod `p`; `None` if a coefficient is not `p`-integral.
    pub fn equations_vanish_mod(&self, point: &[u64], p: u64) -> Option<bool> {
        let mut all = true;
        for eq in &self.equations {
            all &= eq.eval_mod(point, p)? == 0;
        }
        Some(all)
    }
}

/// Pulls `c` back along `phi` with the default substitution style.
pub fn generate_preimage(c: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<PreimagePresentation, PreimageError> {
    generate_preimage_with(c, phi, SubstitutionStyle::default())
}

pub fn generate_preimage_with(
    c: &SubvarietyPresentation,
    phi: &DiagonalIsogeny,
    style: SubstitutionStyle,
) -> Result<PreimagePresentation, PreimageError> {
    let system = &c.system;
    if phi.arity() != system.len() {
        return Err(PreimageError::ArityMismatch { expected: system.len(), got: phi.arity() });
    }
    let ring = system.ring();
    let mut bindings = Vec::new();
    let mut loci = Vec::new();
    for (j, &alpha) in phi.alphas().iter().enumerate() {
        if alpha == 1 {
            continue;
        }
        let maps = multiplication_maps(&CurveRing::specialized(&system.curves()[j]), alpha)?;
        let lift = |p: &MultiPoly| p.embed(ring, &[Some(system.x_index(j))]).expect("univariate in x");
        let (r, s, t) = (lift(&maps.r), lift(&maps.s), lift(&maps.t));
        let y = MultiPoly::var_at(ring, system.y_index(j));
        let x_binding = match (style, &maps.r_tilde, &maps.t_tilde) {
            (SubstitutionStyle::Reduced, Some(rt), Some(tt)) => (lift(rt), &t * &lift(tt)),
            _ => (r, t.pow(2)),
        };
        let names = &ring.vars()[system.x_index(j)..=system.y_index(j)];
        bindings.push(Binding::new(names[0].clone(), x_binding.0, x_binding.1));
        bindings.push(Binding::new(names[1].clone(), &s * &y, t.pow(3)));
        if alpha.abs() > 1 {
            loci.push(ExcludedLocus { coordinate: j + 1, alpha, t, stripped: Vec::new() });
        }
    }
    let weierstrass = system.weierstrass_system();
    let mut equations = Vec::with_capacity(c.equations.len());
    for (i, eq) in c.equations.iter().enumerate() {
        let index = i + 1;
        let poly_err = |source| PreimageError::Poly { index, source };
        let (num, _den) = substitute(eq, &bindings).map_err(poly_err)?;
        let mut cleared = reduce_weierstrass(&num, &weierstrass).map_err(poly_err)?;
        if cleared.is_zero() {
            return Err(PreimageError::IdenticallyZero { index });
        }
        for locus in &mut loci {
            let j = locus.coordinate - 1;
            strip_kernel_factors(&mut cleared, system.x_index(j), locus).map_err(poly_err)?;
            if locus.alpha % 2 == 0 {
                strip_variable(&mut cleared, system.y_index(j));
            }
        }
        equations.push(cleared.primitive_normalized());
    }
    let multidegrees = preimage_multidegrees(&c.multidegrees, phi)?;
    Ok(PreimagePresentation {
        base: c.clone(),
        isogeny: phi.clone(),
        equations,
        excluded_locus: loci,
        multidegrees,
    })
}

/// Content of `p` as a polynomial over `Q[x_index]`.
fn content_in(p: &MultiPoly, index: usize) -> Result<MultiPoly, PolyError> {
    let var = &p.ring().vars()[index];
    let mut g = MultiPoly::zero(p.ring());
    for coeff in p.coefficients_over(index).values() {
        g = univariate_gcd(&g, coeff, var)?;
        if g.is_one() {
            break;
        }
    }
    Ok(g)
}

/// Divides out factors of the `x`-content that share roots with `t`.
fn strip_kernel_factors(p: &mut MultiPoly, index: usize, locus: &mut ExcludedLocus) -> Result<(), PolyError> {
    let var = p.ring().vars()[index].clone();
    let mut content = content_in(p, index)?;
    loop {
        let g = univariate_gcd(&content, &locus.t, &var)?;
        if g.is_constant() {
            return Ok(());
        }
        *p = exact_divide(p, &g)?;
        content = exact_divide(&content, &g)?;
        locus.stripped.push(g);
    }
}

/// Removes the largest power of the variable at `index` dividing `p`.
fn strip_variable(p: &mut MultiPoly, index: usize) {
    let Some(e) = p.terms().map(|(m, _)| m.exponent(index)).min() else {
        return;
    };
    if e > 0 {
        let ring = p.ring().clone();
        *p = MultiPoly::from_terms(&ring, p.terms().map(|(m, c)| (m.with_exponent(index, m.exponent(index) - e), c.clone())));
    }
}

/// Whether the affine tuple `points` satisfies every pulled-back equation.
pub fn membership_test(points: &[CurvePoint], pre: &PreimagePresentation) -> Result<bool, PreimageError> {
    let system = &pre.base.system;
    if points.len() != system.len() {
        return Err(PreimageError::PointCount { expected: system.len(), got: points.len() });
    }
    let mut coords = Vec::with_capacity(2 * points.len());
    for (j, (pt, curve)) in points.iter().zip(system.curves()).enumerate() {
        match pt {
            CurvePoint::Affine { x, y } if curve.contains(pt) => {
                coords.push(x.clone());
                coords.push(y.clone());
            }
            _ => return Err(PreimageError::NotOnCurve { coordinate: j + 1 }),
        }
    }
    if let Some(e) = pre.excluded_locus.iter().find(|e| e.t.eval(&coords).is_zero()) {
        return Err(PreimageError::Excluded { coordinate: e.coordinate });
    }
    Ok(pre.equations.iter().all(|eq| eq.eval(&coords).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{scalar_mul_point, WeierstrassCurve};
    use crate::exact_poly::{parse_poly, Rational};
    use crate::product_variety::make_cn_curve;

    fn c3() -> SubvarietyPresentation {
        let e = WeierstrassCurve::new(0, 1).unwrap();
        make_cn_curve(e, e, 3).unwrap()
    }

    fn iso(a: &[i64]) -> DiagonalIsogeny {
        DiagonalIsogeny::new(a.to_vec()).unwrap()
    }

    #[test]
    fn two_one_matches_hand_substitution() {
        let v = c3();
        let pre = generate_preimage(&v, &iso(&[2, 1])).unwrap();
        let expected = parse_poly("64*y2*(x1^3 + 1)^3 - (x1^4 - 8*x1)^3", v.system.ring()).unwrap();
        assert_eq!(pre.equations.len(), 1);
        assert!(expected.proportionality(&pre.equations[0]).is_some(), "{}", pre.equations[0]);
        assert!(pre.equations[0].has_integer_coefficients());
        // r / t^2 carries a spurious f^3 (t_2 = 2 f) that the cancelled form never produces.
        assert_eq!(pre.excluded_locus[0].coordinate, 1);
        assert!(pre.excluded_locus[0].stripped.is_empty());
        let raw = generate_preimage_with(&v, &iso(&[2, 1]), SubstitutionStyle::Unreduced).unwrap();
        let f = parse_poly("x1^3 + 1", v.system.ring()).unwrap();
        assert_eq!(raw.excluded_locus[0].stripped, vec![f.clone(), f.clone(), f]);
        assert_eq!(pre.multidegrees.total_degree(), Ok(81));
    }

    #[test]
    fn one_five_brackets_match_print() {
        let v = c3();
        let ring = v.system.ring();
        let pre = generate_preimage(&v, &iso(&[1, 5])).unwrap();
        let eq = &pre.equations[0];
        let y2 = v.system.y_index(1);
        let x1 = v.system.x_index(0);
        let part = |e: u32| {
            MultiPoly::from_terms(
                ring,
                eq.terms().filter(|(m, _)| m.exponent(y2) == e).map(|(m, c)| (m.with_exponent(y2, 0), c.clone())),
            )
        };
        let (with_y, without_y) = (part(1), part(0));
        assert_eq!(eq.degree_at(y2), Some(1));
        let s5 = parse_poly(
            "x2^36 + 4692*x2^33 - 884544*x2^30 + 1880320*x2^27 - 94222080*x2^24 - 1437769728*x2^21 \
             - 3534606336*x2^18 - 8883929088*x2^15 - 6868500480*x2^12 - 1853358080*x2^9 \
             - 497025024*x2^6 - 742391808*x2^3 + 16777216",
            ring,
        )
        .unwrap();
        let t5 = parse_poly("x2^12 + 76*x2^9 - 48*x2^6 - 320*x2^3 - 256/5", ring).unwrap();
        let cube = exact_divide(&without_y, &MultiPoly::var_at(ring, x1).pow(3)).unwrap();
        assert!(s5.proportionality(&with_y).is_some());
        assert!(t5.pow(3).proportionality(&cube).is_some());
        assert_eq!(pre.multidegrees.total_degree(), Ok(243));
    }

    #[test]
    fn identity_is_normalization_only() {
        let v = c3();
        let pre = generate_preimage(&v, &iso(&[1, 1])).unwrap();
        assert_eq!(pre.equations, vec![v.equations[0].primitive_normalized()]);
        assert!(pre.excluded_locus.is_empty());
    }

    #[test]
    fn negative_one_flips_y() {
        let v = c3();
        let pre = generate_preimage(&v, &iso(&[1, -1])).unwrap();
        let expected = parse_poly("y2 + x1^3", v.system.ring()).unwrap();
        assert_eq!(pre.equations[0], expected.primitive_normalized());
    }

    #[test]
    fn styles_agree() {
        let v = c3();
        for a in [[2, 1], [4, 1], [2, 3], [-2, 2]] {
            let phi = iso(&a);
            let reduced = generate_preimage_with(&v, &phi, SubstitutionStyle::Reduced).unwrap();
            let unreduced = generate_preimage_with(&v, &phi, SubstitutionStyle::Unreduced).unwrap();
            assert_eq!(reduced.equations, unreduced.equations, "{phi}");
        }
    }

    #[test]
    fn membership_by_forward_construction() {
        let e = WeierstrassCurve::new(0, 1).unwrap();
        let v = c3();
        let pre = generate_preimage(&v, &iso(&[1, 3])).unwrap();
        // [3](2,3) = (-1,0), so P1 needs x1^3 = 0.
        let q2 = CurvePoint::from_ints(2, 3);
        assert_eq!(scalar_mul_point(&e, 3, &q2), CurvePoint::from_ints(-1, 0));
        let p1 = CurvePoint::from_ints(0, 1);
        assert!(membership_test(&[p1.clone(), q2.clone()], &pre).unwrap());
        assert!(!membership_test(&[CurvePoint::from_ints(-1, 0), q2], &pre).unwrap());
        // Kernel points are refused.
        let k = CurvePoint::from_ints(0, 1);
        assert_eq!(membership_test(&[p1, k], &pre), Err(PreimageError::Excluded { coordinate: 2 }));
    }

    #[test]
    fn empty_system_is_everything() {
        let mut v = c3();
        v.equations.clear();
        let pre = generate_preimage(&v, &iso(&[2, 3])).unwrap();
        let pts = [CurvePoint::from_ints(2, 3), CurvePoint::from_ints(2, -3)];
        assert!(membership_test(&pts, &pre).unwrap());
    }

    #[test]
    fn errors() {
        let v = c3();
        assert!(matches!(generate_preimage(&v, &iso(&[2])), Err(PreimageError::ArityMismatch { .. })));
        let mut w = c3();
        w.equations = vec![parse_poly("y1^2 - x1^3 - 1", w.system.ring()).unwrap()];
        assert_eq!(generate_preimage(&w, &iso(&[3, 1])).unwrap_err(), PreimageError::IdenticallyZero { index: 1 });
        let pre = generate_preimage(&v, &iso(&[2, 1])).unwrap();
        let half = Rational::new(1.into(), 2.into());
        let off = CurvePoint::Affine { x: half.clone(), y: half };
        assert!(matches!(
            membership_test(&[off, CurvePoint::from_ints(0, 1)], &pre),
            Err(PreimageError::NotOnCurve { coordinate: 1 })
        ));
    }
}
