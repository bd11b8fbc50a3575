//! Fixtures, random instance generators and property suites shared by the integration targets.
#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transverse::diagonal_isogeny::DiagonalIsogeny;
use transverse::elliptic::WeierstrassCurve;
use transverse::exact_poly::{parse_poly, reduce_weierstrass, Monomial, MultiPoly, Rational};
use transverse::ff_oracle::{enumerate_points, FpPoint, PrimeFieldCtx};
use transverse::height_bounds::Interval;
use transverse::product_variety::{
    make_cn_curve, preimage_degree, preimage_multidegrees, weight_tuples, MultiDegreeTable, ProductSystem,
    SubvarietyPresentation,
};

pub fn e01() -> WeierstrassCurve {
    WeierstrassCurve::new(0, 1).unwrap()
}

pub fn c3() -> SubvarietyPresentation {
    make_cn_curve(e01(), e01(), 3).unwrap()
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Deterministic generator for the randomized acceptance checks.
pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 0
    }
}

pub fn next_prime(mut n: u64) -> u64 {
    while !transverse::certify::is_prime(n) {
        n += 1;
    }
    n
}

/// Transverse-flagged presentation with no equations and the given table on `N` copies of `y^2 = x^3 + 1`.
pub fn table_presentation(n: usize, dim: usize, degs: &[u128]) -> SubvarietyPresentation {
    let system = ProductSystem::new(vec![e01(); n]).unwrap();
    let tuples = weight_tuples(n, dim);
    assert_eq!(tuples.len(), degs.len());
    let table = MultiDegreeTable::new(n, dim, tuples.into_iter().zip(degs.iter().copied())).unwrap();
    SubvarietyPresentation::new(system, Vec::new(), table, true).unwrap()
}

/// Random table where every coordinate lies in the support of some tuple with positive degree.
pub fn random_table(g: &mut Gen) -> SubvarietyPresentation {
    loop {
        let n = g.range(1, 4) as usize;
        let dim = g.range(1, n as i64) as usize;
        let tuples = weight_tuples(n, dim);
        let degs: Vec<u128> = tuples
            .iter()
            .map(|_| if g.below(4) == 0 { 0 } else { g.range(1, 30) as u128 })
            .collect();
        let covered = (0..n).all(|j| tuples.iter().zip(&degs).any(|(t, &d)| t[j] == 1 && d > 0));
        if covered {
            return table_presentation(n, dim, &degs);
        }
    }
}

/// Random isogeny mixing units, small integers and primes above `bound`.
pub fn random_isogeny(g: &mut Gen, n: usize, bound: u128) -> DiagonalIsogeny {
    let alphas = (0..n)
        .map(|_| {
            let a = match g.below(3) {
                0 => 1,
                1 => g.range(2, 12),
                _ => {
                    let lo = u64::try_from(bound).unwrap_or(u64::MAX / 4) + 1;
                    next_prime(lo + g.below(lo)) as i64
                }
            };
            if g.coin() { a } else { -a }
        })
        .collect();
    DiagonalIsogeny::new(alphas).unwrap()
}

/// Random curve table (`dim = 1`) with `N >= 2` and every `d_j >= 1`.
pub fn random_curve_table(g: &mut Gen) -> SubvarietyPresentation {
    let n = g.range(2, 4) as usize;
    let degs: Vec<u128> = (0..n).map(|_| g.range(1, 20) as u128).collect();
    table_presentation(n, 1, &degs)
}

/// Integers near `deg C * N * 3^(N-1)`: primes above it, primes below it, or composites.
pub fn random_primes(g: &mut Gen, c: &SubvarietyPresentation) -> Vec<i64> {
    let n = c.arity() as u32;
    let threshold = (c.total_degree().unwrap() * u128::from(n) * 3u128.pow(n - 1)) as u64;
    (0..n)
        .map(|_| {
            let v = match g.below(4) {
                0 => next_prime(1 + g.below(threshold)),
                1 => {
                    let a = g.range(2, 40) as u64;
                    a * (threshold / a + 1 + g.below(5))
                }
                _ => next_prime(threshold + g.below(threshold)),
            };
            v as i64
        })
        .collect()
}

// Property suites.

fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

fn run<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: Clone + std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    TestRunner::new(config(cases)).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn product_system() -> ProductSystem {
    ProductSystem::new(vec![e01(), WeierstrassCurve::new(-1, 0).unwrap()]).unwrap()
}

type RawPoly = Vec<([u32; 4], i64, i64)>;

fn raw_poly(max_exp: u32, max_terms: usize) -> impl Strategy<Value = RawPoly> + Clone {
    prop::collection::vec(([0..=max_exp, 0..=max_exp, 0..=max_exp, 0..=max_exp], -6i64..=6, 1i64..=4), 0..=max_terms)
}

fn build(sys: &ProductSystem, raw: &RawPoly) -> MultiPoly {
    MultiPoly::from_terms(sys.ring(), raw.iter().map(|(e, n, d)| (Monomial::from_exponents(e.to_vec()), q(*n, *d))))
}

#[allow(clippy::eq_op)] // a - a is the point
pub fn prop_ring_laws(cases: u32) -> Result<(), String> {
    let sys = product_system();
    let s = raw_poly(2, 4);
    run(cases, (s.clone(), s.clone(), s), |(a, b, c)| {
        let (a, b, c) = (build(&sys, &a), build(&sys, &b), build(&sys, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &MultiPoly::one(sys.ring()), a.clone());
        prop_assert_eq!(&a + &(-&a), MultiPoly::zero(sys.ring()));
        Ok(())
    })
}

pub fn prop_parse_round_trip(cases: u32) -> Result<(), String> {
    let sys = product_system();
    run(cases, raw_poly(5, 8), |a| {
        let a = build(&sys, &a);
        let back = parse_poly(&a.to_string(), sys.ring()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, a);
        Ok(())
    })
}

/// Affine points of both factors over `F_101`.
fn points_mod_101(sys: &ProductSystem) -> Vec<Vec<(u64, u64)>> {
    let ctx = PrimeFieldCtx::new(101, sys.curves(), &[]).unwrap();
    (0..sys.len())
        .map(|j| {
            enumerate_points(&ctx, j)
                .unwrap()
                .into_iter()
                .filter_map(|p| match p {
                    FpPoint::Affine(x, y) => Some((x, y)),
                    FpPoint::Infinity => None,
                })
                .collect()
        })
        .collect()
}

pub fn prop_reduce_weierstrass(cases: u32) -> Result<(), String> {
    let sys = product_system();
    let w = sys.weierstrass_system();
    let pts = points_mod_101(&sys);
    let y_indices = [sys.y_index(0), sys.y_index(1)];
    run(cases, (raw_poly(5, 6), 0..pts[0].len(), 0..pts[1].len()), |(a, i, k)| {
        let a = build(&sys, &a);
        let r = reduce_weierstrass(&a, &w).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(reduce_weierstrass(&r, &w).unwrap(), r.clone());
        for &y in &y_indices {
            prop_assert!(r.degree_at(y).unwrap_or(0) <= 1);
        }
        let point = [pts[0][i].0, pts[0][i].1, pts[1][k].0, pts[1][k].1];
        prop_assert_eq!(a.eval_mod(&point, 101), r.eval_mod(&point, 101));
        Ok(())
    })
}

fn alpha() -> impl Strategy<Value = i64> {
    (1i64..=7, any::<bool>()).prop_map(|(a, neg)| if neg { -a } else { a })
}

pub fn prop_multidegree_functoriality(cases: u32) -> Result<(), String> {
    let s = (1usize..=3).prop_flat_map(|n| {
        (0..=n).prop_flat_map(move |dim| {
            let len = weight_tuples(n, dim).len();
            (
                Just(n),
                Just(dim),
                prop::collection::vec(0u128..=50, len),
                prop::collection::vec(alpha(), n),
                prop::collection::vec(alpha(), n),
            )
        })
    });
    run(cases, s, |(n, dim, degs, a, b)| {
        let v = table_presentation(n, dim, &degs);
        let (phi, psi) = (DiagonalIsogeny::new(a).unwrap(), DiagonalIsogeny::new(b).unwrap());
        let two_step = preimage_multidegrees(&preimage_multidegrees(&v.multidegrees, &phi).unwrap(), &psi).unwrap();
        let one_step = preimage_multidegrees(&v.multidegrees, &phi.compose(&psi).unwrap()).unwrap();
        prop_assert_eq!(&two_step, &one_step);
        let pulled = preimage_multidegrees(&v.multidegrees, &phi).unwrap();
        prop_assert_eq!(preimage_degree(&v, &phi).unwrap(), pulled.total_degree().unwrap());
        prop_assert_eq!(
            preimage_multidegrees(&v.multidegrees, &DiagonalIsogeny::identity(n)).unwrap(),
            v.multidegrees.clone()
        );
        Ok(())
    })
}

pub fn prop_directed_rounding(cases: u32) -> Result<(), String> {
    let r = (-1000i64..=1000, 1i64..=1000);
    run(cases, (r.clone(), r), |((an, ad), (bn, bd))| {
        let (a, b) = (q(an, ad), q(bn, bd));
        let iv = |x: &Rational, p| Interval::from_rational(x, p);
        let mut cases = vec![(a.clone() + b.clone(), 0), (a.clone() - b.clone(), 1), (a.clone() * b.clone(), 2)];
        if bn != 0 {
            cases.push((a.clone() / b.clone(), 3));
        }
        for (exact, op) in cases {
            let apply = |p| {
                let (x, y) = (iv(&a, p), iv(&b, p));
                match op {
                    0 => x.add(&y),
                    1 => x.sub(&y),
                    2 => x.mul(&y),
                    _ => x.div(&y),
                }
            };
            let (coarse, fine) = (apply(64), apply(128));
            prop_assert!(iv(&exact, 256).within(&fine), "op {} misses the exact value", op);
            prop_assert!(fine.within(&coarse), "op {} not nested", op);
            prop_assert!(coarse.lower_f64() <= coarse.upper_f64());
        }
        // ln and exp are nondecreasing, so enclosures may overlap but never cross.
        let (x, y) = (iv(&q(an.abs() + 1, ad), 128), iv(&q(bn.abs() + 1, bd), 128));
        let (lo, hi) = if (an.abs() + 1) * bd <= (bn.abs() + 1) * ad { (x, y) } else { (y, x) };
        prop_assert!(lo.ln().lower_f64() <= hi.ln().upper_f64());
        prop_assert!(lo.exp().lower_f64() <= hi.exp().upper_f64());
        Ok(())
    })
}

pub type Suite = fn(u32) -> Result<(), String>;

pub const SUITES: [(&str, Suite); 5] = [
    ("ring laws", prop_ring_laws),
    ("parse round trip", prop_parse_round_trip),
    ("weierstrass reduction", prop_reduce_weierstrass),
    ("multidegree functoriality", prop_multidegree_functoriality),
    ("directed rounding", prop_directed_rounding),
];
