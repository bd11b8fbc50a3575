//! Finite-field oracle: brute-force checks of the symbolic constructions over `F_p`.
//!
//! The group law here is written from scratch on `u64` residues and shares no
//! code with the rational-map machinery it checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::certify::is_prime;
use crate::elliptic::{multiplication_maps, CurveRing, EllipticError, WeierstrassCurve};
use crate::preimage_equations::PreimagePresentation;

/// Seed of the sampled scan, fixed so that reports are reproducible.
pub const SAMPLE_SEED: u64 = 0x7472_616e_7376_6572;
/// Tuples drawn by the sampled scan.
pub const SAMPLE_COUNT: usize = 10_000;
/// Largest prime scanned exhaustively by [`ScanPolicy::Auto`].
pub const EXHAUSTIVE_PRIME_CAP: u64 = 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("p = {p} divides 6 * disc(E_{curve}); reduction is bad")]
    BadReduction { p: u64, curve: usize },
    #[error("p = {p} divides alpha = {alpha}")]
    DividesAlpha { p: u64, alpha: i64 },
    #[error("curve index {0} out of range")]
    NoSuchCurve(usize),
    #[error("point count {count} over F_{p} violates the Hasse bound")]
    Hasse { p: u64, count: u64 },
    #[error("coefficient of an equation has a denominator divisible by {0}")]
    NotIntegral(u64),
    #[error("arity mismatch between the field context and the presentation")]
    Arity,
    #[error("fibre statistics need a curve in a product of two curves")]
    NotCurveCase,
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b, p);
        }
        b = mulm(b, b, p);
        e >>= 1;
    }
    r
}

fn invm(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

fn residue(n: i64, p: u64) -> u64 {
    n.rem_euclid(p as i64) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FpPoint {
    Infinity,
    Affine(u64, u64),
}

/// A curve reduced mod `p`, with its own group law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpCurve {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    source: WeierstrassCurve,
}

impl FpCurve {
    pub fn source(&self) -> &WeierstrassCurve {
        &self.source
    }

    pub fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        (mulm(mulm(x, x, p), x, p) + mulm(self.a, x, p) + self.b) % p
    }

    pub fn contains(&self, pt: FpPoint) -> bool {
        match pt {
            FpPoint::Infinity => true,
            FpPoint::Affine(x, y) => mulm(y, y, self.p) == self.rhs(x),
        }
    }

    pub fn neg(&self, pt: FpPoint) -> FpPoint {
        match pt {
            FpPoint::Infinity => pt,
            FpPoint::Affine(x, y) => FpPoint::Affine(x, (self.p - y) % self.p),
        }
    }

    pub fn add(&self, u: FpPoint, v: FpPoint) -> FpPoint {
        let p = self.p;
        let (x1, y1, x2, y2) = match (u, v) {
            (FpPoint::Infinity, _) => return v,
            (_, FpPoint::Infinity) => return u,
            (FpPoint::Affine(a, b), FpPoint::Affine(c, d)) => (a, b, c, d),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return FpPoint::Infinity;
            }
            mulm((3 * mulm(x1, x1, p) + self.a) % p, invm(2 * y1 % p, p), p)
        } else {
            mulm((y2 + p - y1) % p, invm((x2 + p - x1) % p, p), p)
        };
        let x3 = (mulm(lambda, lambda, p) + 2 * p - x1 - x2) % p;
        let y3 = (mulm(lambda, (x1 + p - x3) % p, p) + p - y1) % p;
        FpPoint::Affine(x3, y3)
    }

    /// Double-and-add.
    pub fn mul(&self, n: i64, pt: FpPoint) -> FpPoint {
        let mut acc = FpPoint::Infinity;
        let mut base = if n < 0 { self.neg(pt) } else { pt };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }
}

/// A prime of good reduction for a list of curves.
#[derive(Debug, Clone)]
pub struct PrimeFieldCtx {
    pub p: u64,
    pub curves: Vec<FpCurve>,
}

impl PrimeFieldCtx {
    /// Requires `p` odd prime with `p ∤ 6 disc(E_j)` for every curve and `p ∤ alpha` for every `alpha`.
    pub fn new(p: u64, curves: &[WeierstrassCurve], alphas: &[i64]) -> Result<Self, OracleError> {
        if p == 2 || !is_prime(p) {
            return Err(OracleError::NotOddPrime(p));
        }
        let pb = BigInt::from(p);
        for (j, c) in curves.iter().enumerate() {
            if p == 3 || (c.discriminant() % &pb).is_zero() {
                return Err(OracleError::BadReduction { p, curve: j + 1 });
            }
        }
        if let Some(&alpha) = alphas.iter().find(|&&a| a.unsigned_abs() % p == 0) {
            return Err(OracleError::DividesAlpha { p, alpha });
        }
        let curves = curves
            .iter()
            .map(|c| FpCurve { p, a: residue(c.a(), p), b: residue(c.b(), p), source: *c })
            .collect();
        Ok(PrimeFieldCtx { p, curves })
    }

    pub fn curve(&self, j: usize) -> Result<&FpCurve, OracleError> {
        self.curves.get(j).ok_or(OracleError::NoSuchCurve(j))
    }
}

/// Every point of `E_j(F_p)`, infinity first, then affine points by increasing `(x, y)`.
pub fn enumerate_points(ctx: &PrimeFieldCtx, j: usize) -> Result<Vec<FpPoint>, OracleError> {
    let c = ctx.curve(j)?;
    let p = ctx.p;
    let mut roots: Vec<Vec<u64>> = vec![Vec::new(); p as usize];
    for y in 0..p {
        roots[mulm(y, y, p) as usize].push(y);
    }
    let mut out = vec![FpPoint::Infinity];
    for x in 0..p {
        out.extend(roots[c.rhs(x) as usize].iter().map(|&y| FpPoint::Affine(x, y)));
    }
    let count = out.len() as u64;
    // |#E - (p + 1)| <= 2 sqrt(p), squared to stay in integers.
    let diff = count.abs_diff(p + 1);
    if diff * diff > 4 * p {
        return Err(OracleError::Hasse { p, count });
    }
    Ok(out)
}

fn affine_points(ctx: &PrimeFieldCtx, j: usize) -> Result<Vec<(u64, u64)>, OracleError> {
    Ok(enumerate_points(ctx, j)?
        .into_iter()
        .filter_map(|pt| match pt {
            FpPoint::Affine(x, y) => Some((x, y)),
            FpPoint::Infinity => None,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub point: FpPoint,
    pub formula: FpPoint,
    pub group_law: FpPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapsReport {
    pub p: u64,
    /// 1-based.
    pub curve: usize,
    pub alpha: i64,
    pub affine_points: usize,
    /// Points where the projective triple is not `(0:0:0)` and matches the group law.
    pub agreed: usize,
    /// Points sent to the point at infinity by the formula (nonzero triple with `Z = 0`).
    pub kernel_points: Vec<FpPoint>,
    /// Points where the triple is `(0:0:0)`; only 2-torsion for even `alpha`.
    pub degenerate: Vec<FpPoint>,
    /// Kernel points equal the zeros of `t` (odd `alpha`) and degenerate points are 2-torsion.
    pub exceptional_loci_consistent: bool,
    pub mismatches: Vec<Mismatch>,
    pub passed: bool,
}

/// Compares the rational maps of `[alpha]` with double-and-add at every affine point.
pub fn verify_maps_vs_group_law(ctx: &PrimeFieldCtx, j: usize, alpha: i64) -> Result<MapsReport, OracleError> {
    let c = ctx.curve(j)?;
    let p = ctx.p;
    if alpha.unsigned_abs().is_multiple_of(p) {
        return Err(OracleError::DividesAlpha { p, alpha });
    }
    let ring = CurveRing::specialized(c.source());
    let maps = multiplication_maps(&ring, alpha)?;
    let ev = |poly: &crate::exact_poly::MultiPoly, x: u64| {
        poly.eval_mod(&ring.point_for_mod(x, c.source(), p), p).ok_or(OracleError::NotIntegral(p))
    };
    let mut report = MapsReport {
        p,
        curve: j + 1,
        alpha,
        affine_points: 0,
        agreed: 0,
        kernel_points: Vec::new(),
        degenerate: Vec::new(),
        exceptional_loci_consistent: true,
        mismatches: Vec::new(),
        passed: true,
    };
    for (x, y) in affine_points(ctx, j)? {
        report.affine_points += 1;
        let pt = FpPoint::Affine(x, y);
        let (r, s, t) = (ev(&maps.r, x)?, ev(&maps.s, x)?, ev(&maps.t, x)?);
        let triple = match &maps.t_tilde {
            None => [mulm(r, t, p), mulm(s, y, p), powm(t, 3, p)],
            Some(tt) => {
                let tt = ev(tt, x)?;
                [mulm(mulm(r, tt, p), y, p), s, mulm(mulm(tt, mulm(t, t, p), p), y, p)]
            }
        };
        let expected = c.mul(alpha, pt);
        if triple == [0, 0, 0] {
            report.degenerate.push(pt);
            if y != 0 || alpha % 2 != 0 {
                report.exceptional_loci_consistent = false;
            }
            continue;
        }
        let formula = if triple[2] == 0 {
            report.kernel_points.push(pt);
            if maps.t_tilde.is_none() && t != 0 {
                report.exceptional_loci_consistent = false;
            }
            FpPoint::Infinity
        } else {
            let zi = invm(triple[2], p);
            FpPoint::Affine(mulm(triple[0], zi, p), mulm(triple[1], zi, p))
        };
        if maps.t_tilde.is_none() && (t == 0) != (formula == FpPoint::Infinity) {
            report.exceptional_loci_consistent = false;
        }
        if formula == expected {
            report.agreed += 1;
        } else {
            report.mismatches.push(Mismatch { point: pt, formula, group_law: expected });
        }
    }
    report.passed = report.mismatches.is_empty() && report.exceptional_loci_consistent;
    Ok(report)
}

/// How the product point set is traversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanPolicy {
    /// Exhaustive when `p <= 31` and at most two factors, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScanMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipMismatch {
    pub point: Vec<(u64, u64)>,
    pub equations_vanish: bool,
    pub image_on_variety: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub p: u64,
    pub mode: ScanMode,
    /// Product of the affine point counts.
    pub product_size: u128,
    pub iterations: u128,
    pub excluded: u128,
    pub by_equations: u128,
    pub by_group_law: u128,
    /// First few failures; the full count is `mismatch_count`.
    pub mismatches: Vec<MembershipMismatch>,
    pub mismatch_count: u128,
    pub passed: bool,
}

fn ring_point(tuple: &[(u64, u64)]) -> Vec<u64> {
    tuple.iter().flat_map(|&(x, y)| [x, y]).collect()
}

/// Checks, tuple by tuple, that the pulled-back equations vanish exactly when the image lies on the base variety.
pub fn verify_preimage_membership(
    ctx: &PrimeFieldCtx,
    pre: &PreimagePresentation,
    policy: ScanPolicy,
) -> Result<MembershipReport, OracleError> {
    let n = pre.base.system.len();
    if ctx.curves.len() != n {
        return Err(OracleError::Arity);
    }
    let p = ctx.p;
    if let Some(&alpha) = pre.isogeny.alphas().iter().find(|&&a| a.unsigned_abs() % p == 0) {
        return Err(OracleError::DividesAlpha { p, alpha });
    }
    let points: Vec<Vec<(u64, u64)>> = (0..n).map(|j| affine_points(ctx, j)).collect::<Result<_, _>>()?;
    let product_size = points.iter().map(|v| v.len() as u128).product::<u128>();
    let mode = match policy {
        ScanPolicy::Exhaustive => ScanMode::Exhaustive,
        ScanPolicy::Auto if p <= EXHAUSTIVE_PRIME_CAP && n <= 2 => ScanMode::Exhaustive,
        ScanPolicy::Auto => ScanMode::Sampled { samples: SAMPLE_COUNT, seed: SAMPLE_SEED },
        ScanPolicy::Sampled { samples, seed } => ScanMode::Sampled { samples, seed },
    };
    let mut report = MembershipReport {
        p,
        mode: mode.clone(),
        product_size,
        iterations: 0,
        excluded: 0,
        by_equations: 0,
        by_group_law: 0,
        mismatches: Vec::new(),
        mismatch_count: 0,
        passed: true,
    };
    if points.iter().any(Vec::is_empty) {
        return Ok(report);
    }
    let mut visit = |tuple: &[(u64, u64)]| -> Result<(), OracleError> {
        report.iterations += 1;
        let coords = ring_point(tuple);
        if pre.is_excluded_mod(&coords, p) {
            report.excluded += 1;
            return Ok(());
        }
        let lhs = pre.equations_vanish_mod(&coords, p).ok_or(OracleError::NotIntegral(p))?;
        let mut image = Vec::with_capacity(2 * n);
        for (j, &(x, y)) in tuple.iter().enumerate() {
            match ctx.curves[j].mul(pre.isogeny.alphas()[j], FpPoint::Affine(x, y)) {
                FpPoint::Affine(u, v) => image.extend([u, v]),
                // Only kernel points map to infinity, and those were excluded above.
                FpPoint::Infinity => return Err(OracleError::NotIntegral(p)),
            }
        }
        let mut rhs = true;
        for eq in &pre.base.equations {
            rhs &= eq.eval_mod(&image, p).ok_or(OracleError::NotIntegral(p))? == 0;
        }
        report.by_equations += u128::from(lhs);
        report.by_group_law += u128::from(rhs);
        if lhs != rhs {
            report.mismatch_count += 1;
            if report.mismatches.len() < 10 {
                report.mismatches.push(MembershipMismatch {
                    point: tuple.to_vec(),
                    equations_vanish: lhs,
                    image_on_variety: rhs,
                });
            }
        }
        Ok(())
    };
    match mode {
        ScanMode::Exhaustive => {
            let mut idx = vec![0usize; n];
            'outer: loop {
                let tuple: Vec<(u64, u64)> = idx.iter().enumerate().map(|(j, &i)| points[j][i]).collect();
                visit(&tuple)?;
                for j in (0..n).rev() {
                    idx[j] += 1;
                    if idx[j] < points[j].len() {
                        continue 'outer;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
        ScanMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let tuple: Vec<(u64, u64)> =
                    points.iter().map(|v| v[(rng.next_u64() % v.len() as u64) as usize]).collect();
                visit(&tuple)?;
            }
        }
    }
    report.passed = report.mismatch_count == 0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibreReport {
    pub p: u64,
    /// Preimage points (off the excluded locus) over each `x_1`.
    pub fibres: BTreeMap<u64, u64>,
    pub max_fibre: u64,
    /// `x_2`-degrees of the `y_2` coefficient and of the rest of the first equation.
    pub s_degree: u32,
    pub t_degree: u32,
    /// `2 max(2 s_degree + 3, 2 t_degree)`: squaring out `y_2` bounds the `x_2` roots, two `y_1` per `x_1`.
    pub generic_fibre_bound: u64,
}

/// Fibre statistics of a curve in `E_1 x E_2` over the first coordinate; informational only.
pub fn degree_spot_check(ctx: &PrimeFieldCtx, pre: &PreimagePresentation) -> Result<FibreReport, OracleError> {
    let system = &pre.base.system;
    if system.len() != 2 || pre.multidegrees.dim() != 1 || ctx.curves.len() != 2 {
        return Err(OracleError::NotCurveCase);
    }
    let p = ctx.p;
    let (s_degree, t_degree) = match pre.equations.first() {
        Some(eq) => {
            let (y2, x2) = (system.y_index(1), system.x_index(1));
            let deg = |e: u32| {
                eq.terms()
                    .filter(|(m, _)| m.exponent(y2) == e)
                    .map(|(m, _)| m.exponent(x2))
                    .max()
                    .unwrap_or(0)
            };
            (deg(1), deg(0))
        }
        None => (0, 0),
    };
    let e1 = affine_points(ctx, 0)?;
    let e2 = affine_points(ctx, 1)?;
    let mut fibres = BTreeMap::new();
    for &(x1, y1) in &e1 {
        let entry = fibres.entry(x1).or_insert(0u64);
        for &(x2, y2) in &e2 {
            let coords = [x1, y1, x2, y2];
            if pre.is_excluded_mod(&coords, p) {
                continue;
            }
            if pre.equations_vanish_mod(&coords, p).ok_or(OracleError::NotIntegral(p))? {
                *entry += 1;
            }
        }
    }
    let max_fibre = fibres.values().copied().max().unwrap_or(0);
    let generic_fibre_bound = 2 * u64::from((2 * s_degree + 3).max(2 * t_degree));
    Ok(FibreReport { p, fibres, max_fibre, s_degree, t_degree, generic_fibre_bound })
}
