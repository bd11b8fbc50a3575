//! Products `E_1 x ... x E_N`, subvarieties given by equations plus a
//! multidegree table, and the degree formulas for preimages.
//!
//! All multidegrees used here are indexed by 0/1 tuples (entries with some
//! `i_j >= 2` vanish), so the multinomial weights `I!` are all 1 and
//! `deg V = dim! * sum_I deg_I(V)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagonal_isogeny::DiagonalIsogeny;
use crate::elliptic::WeierstrassCurve;
use crate::exact_poly::{parse_poly, MultiPoly, PolyError, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("a product needs at least one curve")]
    EmptySystem,
    #[error("index tuple {tuple:?} has length {got}, expected {expected}")]
    TupleArity { tuple: Vec<u8>, got: usize, expected: usize },
    #[error("index tuple {0:?} has an entry other than 0 or 1")]
    NotZeroOne(Vec<u8>),
    #[error("index tuple {tuple:?} has weight {weight}, expected dim = {dim}")]
    WrongWeight { tuple: Vec<u8>, weight: usize, dim: usize },
    #[error("index tuple {0:?} appears twice")]
    Duplicate(Vec<u8>),
    #[error("missing multidegree entry for {0:?}")]
    Missing(Vec<u8>),
    #[error("dim = {dim} exceeds the number of factors {n}")]
    DimTooLarge { dim: usize, n: usize },
    #[error("arity mismatch: variety lives in {variety} factors, isogeny has {isogeny}")]
    ArityMismatch { variety: usize, isogeny: usize },
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("n must be at least 1")]
    BadExponent,
    #[error("factor index {index} out of range for {n} factors")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("equation {index}: {source}")]
    Equation { index: usize, source: PolyError },
    #[error("curve {index}: {reason}")]
    Curve { index: usize, reason: String },
}

/// `A_N = E_1 x ... x E_N` with coordinate ring `[x1, y1, ..., xN, yN]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSystem {
    curves: Vec<WeierstrassCurve>,
    ring: Ring,
}

impl ProductSystem {
    pub fn new(curves: Vec<WeierstrassCurve>) -> Result<Self, VarietyError> {
        if curves.is_empty() {
            return Err(VarietyError::EmptySystem);
        }
        let names = (1..=curves.len()).flat_map(|i| [format!("x{i}"), format!("y{i}")]);
        let ring = Ring::new(names).expect("generated names are distinct");
        Ok(ProductSystem { curves, ring })
    }

    pub fn curves(&self) -> &[WeierstrassCurve] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Ring index of `x_{j+1}` (zero-based `j`).
    pub fn x_index(&self, j: usize) -> usize {
        2 * j
    }

    pub fn y_index(&self, j: usize) -> usize {
        2 * j + 1
    }

    /// The cubic `x_j^3 + A_j x_j + B_j` in the product ring.
    pub fn cubic(&self, j: usize) -> MultiPoly {
        let c = &self.curves[j];
        let x = MultiPoly::var_at(&self.ring, self.x_index(j));
        &(&x.pow(3) + &x.scale_int(c.a())) + &MultiPoly::integer(&self.ring, c.b())
    }

    /// Relations `y_j^2 = cubic_j` in the form accepted by `reduce_weierstrass`.
    pub fn weierstrass_system(&self) -> Vec<(String, MultiPoly)> {
        (0..self.len())
            .map(|j| (self.ring.vars()[self.y_index(j)].clone(), self.cubic(j)))
            .collect()
    }
}

/// Multidegrees `deg_I` indexed by 0/1 tuples of weight `dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDegreeTable {
    arity: usize,
    dim: usize,
    entries: BTreeMap<Vec<u8>, u128>,
}

/// All 0/1 tuples of length `n` and weight `k`, in lexicographic order of their supports.
pub fn weight_tuples(n: usize, k: usize) -> Vec<Vec<u8>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            cur[i] = 1;
            go(n, k - 1, i + 1, cur, out);
            cur[i] = 0;
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(n, k, 0, &mut vec![0; n], &mut out);
    }
    out
}

fn factorial(n: usize) -> Result<u128, VarietyError> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k).ok_or(VarietyError::Overflow("dim!")))
}

impl MultiDegreeTable {
    /// Validates that the tuples are exactly the 0/1 tuples of weight `dim`.
    pub fn new<I>(arity: usize, dim: usize, entries: I) -> Result<Self, VarietyError>
    where
        I: IntoIterator<Item = (Vec<u8>, u128)>,
    {
        if arity == 0 {
            return Err(VarietyError::EmptySystem);
        }
        if dim > arity {
            return Err(VarietyError::DimTooLarge { dim, n: arity });
        }
        let mut map = BTreeMap::new();
        for (tuple, deg) in entries {
            if tuple.len() != arity {
                return Err(VarietyError::TupleArity { got: tuple.len(), expected: arity, tuple });
            }
            if tuple.iter().any(|&e| e > 1) {
                return Err(VarietyError::NotZeroOne(tuple));
            }
            let weight = tuple.iter().filter(|&&e| e == 1).count();
            if weight != dim {
                return Err(VarietyError::WrongWeight { tuple, weight, dim });
            }
            if map.insert(tuple.clone(), deg).is_some() {
                return Err(VarietyError::Duplicate(tuple));
            }
        }
        for t in weight_tuples(arity, dim) {
            if !map.contains_key(&t) {
                return Err(VarietyError::Missing(t));
            }
        }
        Ok(MultiDegreeTable { arity, dim, entries: map })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, tuple: &[u8]) -> Option<u128> {
        self.entries.get(tuple).copied()
    }

    /// Entries in lexicographic tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u8], u128)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// `d_j = deg_{e_j}` for a curve table.
    pub fn curve_degrees(&self) -> Option<Vec<u128>> {
        (self.dim == 1).then(|| {
            (0..self.arity)
                .map(|j| {
                    let mut e = vec![0; self.arity];
                    e[j] = 1;
                    self.entries[&e]
                })
                .collect()
        })
    }

    pub fn dim_factorial(&self) -> Result<u128, VarietyError> {
        factorial(self.dim)
    }

    /// `dim! * sum_I deg_I`.
    pub fn total_degree(&self) -> Result<u128, VarietyError> {
        let sum = self
            .entries
            .values()
            .try_fold(0u128, |acc, &d| acc.checked_add(d))
            .ok_or(VarietyError::Overflow("sum of multidegrees"))?;
        factorial(self.dim)?
            .checked_mul(sum)
            .ok_or(VarietyError::Overflow("total degree"))
    }
}

/// Affine equations on `A_N` (together with the Weierstrass relations),
/// the dimension, the multidegree table and the user's transversality flag.
#[derive(Debug, Clone)]
pub struct SubvarietyPresentation {
    pub system: ProductSystem,
    pub equations: Vec<MultiPoly>,
    pub multidegrees: MultiDegreeTable,
    pub transverse: bool,
}

impl SubvarietyPresentation {
    pub fn new(
        system: ProductSystem,
        equations: Vec<MultiPoly>,
        multidegrees: MultiDegreeTable,
        transverse: bool,
    ) -> Result<Self, VarietyError> {
        if multidegrees.arity() != system.len() {
            return Err(VarietyError::TupleArity {
                tuple: Vec::new(),
                got: multidegrees.arity(),
                expected: system.len(),
            });
        }
        for (index, eq) in equations.iter().enumerate() {
            if eq.ring() != system.ring() {
                return Err(VarietyError::Equation {
                    index,
                    source: PolyError::RingMismatch {
                        left: eq.ring().vars().join(","),
                        right: system.ring().vars().join(","),
                    },
                });
            }
        }
        Ok(SubvarietyPresentation { system, equations, multidegrees, transverse })
    }

    pub fn dim(&self) -> usize {
        self.multidegrees.dim()
    }

    pub fn arity(&self) -> usize {
        self.system.len()
    }

    pub fn total_degree(&self) -> Result<u128, VarietyError> {
        self.multidegrees.total_degree()
    }

    pub fn from_json_str(text: &str) -> Result<Self, SubvarietyInputError> {
        let raw: SubvarietyJson = serde_json::from_str(text).map_err(|e| SubvarietyInputError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.build().map_err(SubvarietyInputError::Invalid)
    }

    pub fn to_json(&self) -> SubvarietyJson {
        SubvarietyJson {
            curves: self.system.curves().to_vec(),
            equations: self.equations.iter().map(|e| e.to_string()).collect(),
            dim: self.dim(),
            multidegrees: self
                .multidegrees
                .entries()
                .map(|(i, deg)| MultiDegreeEntry { index: i.to_vec(), deg })
                .collect(),
            transverse: self.transverse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubvarietyInputError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error(transparent)]
    Invalid(VarietyError),
}

/// Wire format of a subvariety.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubvarietyJson {
    pub curves: Vec<WeierstrassCurve>,
    pub equations: Vec<String>,
    pub dim: usize,
    pub multidegrees: Vec<MultiDegreeEntry>,
    pub transverse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiDegreeEntry {
    #[serde(rename = "I")]
    pub index: Vec<u8>,
    pub deg: u128,
}

impl SubvarietyJson {
    pub fn build(&self) -> Result<SubvarietyPresentation, VarietyError> {
        let system = ProductSystem::new(self.curves.clone())?;
        let equations = self
            .equations
            .iter()
            .enumerate()
            .map(|(index, text)| {
                parse_poly(text, system.ring()).map_err(|source| VarietyError::Equation { index: index + 1, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let table = MultiDegreeTable::new(
            system.len(),
            self.dim,
            self.multidegrees.iter().map(|e| (e.index.clone(), e.deg)),
        )?;
        SubvarietyPresentation::new(system, equations, table, self.transverse)
    }
}

/// The curve `C_n: y_2 = x_1^n` in `E_1 x E_2`, with `deg_(1,0) = 9` and `deg_(0,1) = 6n`.
pub fn make_cn_curve(e1: WeierstrassCurve, e2: WeierstrassCurve, n: u32) -> Result<SubvarietyPresentation, VarietyError> {
    if n < 1 {
        return Err(VarietyError::BadExponent);
    }
    let system = ProductSystem::new(vec![e1, e2])?;
    let ring = system.ring().clone();
    let eq = &MultiPoly::var_at(&ring, system.y_index(1)) - &MultiPoly::var_at(&ring, system.x_index(0)).pow(n);
    let six_n = 6u128 * u128::from(n);
    let table = MultiDegreeTable::new(2, 1, [(vec![1, 0], 9), (vec![0, 1], six_n)])?;
    SubvarietyPresentation::new(system, vec![eq], table, true)
}

pub fn total_degree(v: &SubvarietyPresentation) -> Result<u128, VarietyError> {
    v.total_degree()
}

fn check_arity(table: &MultiDegreeTable, phi: &DiagonalIsogeny) -> Result<(), VarietyError> {
    if table.arity() != phi.arity() {
        return Err(VarietyError::ArityMismatch { variety: table.arity(), isogeny: phi.arity() });
    }
    Ok(())
}

/// Off-support degree product `prod_{k not in J} alpha_k^2`.
fn off_support_degree(tuple: &[u8], phi: &DiagonalIsogeny) -> Result<u128, VarietyError> {
    tuple
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == 0)
        .try_fold(1u128, |acc, (k, _)| acc.checked_mul(phi.coordinate_degree(k)))
        .ok_or(VarietyError::Overflow("preimage multidegree"))
}

/// Table of `phi^{-1}(V)`: the entry at `I_J` gets multiplied by `prod_{k not in J} alpha_k^2`.
pub fn preimage_multidegrees(table: &MultiDegreeTable, phi: &DiagonalIsogeny) -> Result<MultiDegreeTable, VarietyError> {
    check_arity(table, phi)?;
    let entries = table
        .entries()
        .map(|(t, d)| {
            let m = off_support_degree(t, phi)?;
            Ok((t.to_vec(), d.checked_mul(m).ok_or(VarietyError::Overflow("preimage multidegree"))?))
        })
        .collect::<Result<Vec<_>, VarietyError>>()?;
    MultiDegreeTable::new(table.arity(), table.dim(), entries)
}

/// `deg phi^{-1}(V) = dim! * sum_J (prod_{k not in J} deg alpha_k) deg_{I_J}(V)`.
pub fn preimage_degree(v: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<u128, VarietyError> {
    let table = &v.multidegrees;
    check_arity(table, phi)?;
    let mut sum = 0u128;
    for (t, d) in table.entries() {
        let term = off_support_degree(t, phi)?
            .checked_mul(d)
            .ok_or(VarietyError::Overflow("preimage degree"))?;
        sum = sum.checked_add(term).ok_or(VarietyError::Overflow("preimage degree"))?;
    }
    table
        .dim_factorial()?
        .checked_mul(sum)
        .ok_or(VarietyError::Overflow("preimage degree"))
}

/// Degree of `[alpha]_j^{-1}(C)` for a curve with per-factor degrees `d`: `d_j + alpha^2 sum_{i != j} d_i`.
/// `j` is zero-based.
pub fn preimage_degree_curve(d: &[u128], j: usize, alpha: i64) -> Result<u128, VarietyError> {
    if j >= d.len() {
        return Err(VarietyError::IndexOutOfRange { index: j, n: d.len() });
    }
    let a2 = u128::from(alpha.unsigned_abs()).pow(2);
    let rest = d
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .try_fold(0u128, |acc, (_, &x)| acc.checked_add(x))
        .ok_or(VarietyError::Overflow("curve degree"))?;
    a2.checked_mul(rest)
        .and_then(|r| r.checked_add(d[j]))
        .ok_or(VarietyError::Overflow("curve preimage degree"))
}
