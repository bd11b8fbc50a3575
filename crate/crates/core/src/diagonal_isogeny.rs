//! Diagonal endomorphisms `[alpha_1, ..., alpha_N]` of a product of elliptic curves.
//!
//! Only integer multipliers are supported, so `deg(alpha) = alpha^2`.  A CM
//! order would replace the square by the norm form; everything downstream only
//! calls [`DiagonalIsogeny::coordinate_degree`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsogenyError {
    #[error("an isogeny needs at least one coordinate")]
    Empty,
    #[error("alpha_{index} is zero; multiplication by zero is not an isogeny")]
    ZeroEntry { index: usize },
    #[error("arity mismatch: {left} vs {right} coordinates")]
    ArityMismatch { left: usize, right: usize },
    #[error("integer overflow while computing {what}")]
    Overflow { what: &'static str },
    #[error("cannot parse isogeny `{text}`: {reason}")]
    Parse { text: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIsogeny", into = "RawIsogeny")]
pub struct DiagonalIsogeny {
    alphas: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct RawIsogeny {
    alphas: Vec<i64>,
}

impl TryFrom<RawIsogeny> for DiagonalIsogeny {
    type Error = IsogenyError;
    fn try_from(raw: RawIsogeny) -> Result<Self, IsogenyError> {
        DiagonalIsogeny::new(raw.alphas)
    }
}

impl From<DiagonalIsogeny> for RawIsogeny {
    fn from(phi: DiagonalIsogeny) -> Self {
        RawIsogeny { alphas: phi.alphas }
    }
}

impl DiagonalIsogeny {
    pub fn new(alphas: Vec<i64>) -> Result<Self, IsogenyError> {
        if alphas.is_empty() {
            return Err(IsogenyError::Empty);
        }
        if let Some(index) = alphas.iter().position(|&a| a == 0) {
            return Err(IsogenyError::ZeroEntry { index: index + 1 });
        }
        Ok(DiagonalIsogeny { alphas })
    }

    pub fn identity(n: usize) -> Self {
        DiagonalIsogeny { alphas: vec![1; n.max(1)] }
    }

    /// Parses the inline form `[2,1]`.
    pub fn parse(text: &str) -> Result<Self, IsogenyError> {
        let alphas: Vec<i64> = serde_json::from_str(text).map_err(|e| IsogenyError::Parse {
            text: text.to_string(),
            reason: e.to_string(),
        })?;
        Self::new(alphas)
    }

    pub fn alphas(&self) -> &[i64] {
        &self.alphas
    }

    pub fn arity(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_identity(&self) -> bool {
        self.alphas.iter().all(|&a| a == 1)
    }

    /// `deg(alpha_j) = alpha_j^2`.
    pub fn coordinate_degree(&self, j: usize) -> u128 {
        let a = u128::from(self.alphas[j].unsigned_abs());
        a * a
    }

    /// `prod_j alpha_j^2`.
    pub fn degree(&self) -> Result<u128, IsogenyError> {
        (0..self.arity()).try_fold(1u128, |acc, j| {
            acc.checked_mul(self.coordinate_degree(j))
                .ok_or(IsogenyError::Overflow { what: "isogeny degree" })
        })
    }

    /// The one-coordinate factors `[alpha_j]_j`, skipping `alpha_j = 1`.
    pub fn canonical_factorization(&self) -> AdmissibleFactorization {
        let n = self.arity();
        let factors = self
            .alphas
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 1)
            .map(|(j, &a)| {
                let mut alphas = vec![1; n];
                alphas[j] = a;
                OneCoordinateFactor { index: j, isogeny: DiagonalIsogeny { alphas } }
            })
            .collect();
        AdmissibleFactorization { arity: n, factors }
    }

    /// Coordinate-wise product; the factors commute.
    pub fn compose(&self, other: &DiagonalIsogeny) -> Result<DiagonalIsogeny, IsogenyError> {
        if self.arity() != other.arity() {
            return Err(IsogenyError::ArityMismatch { left: self.arity(), right: other.arity() });
        }
        let alphas = self
            .alphas
            .iter()
            .zip(&other.alphas)
            .map(|(a, b)| a.checked_mul(*b).ok_or(IsogenyError::Overflow { what: "composition" }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DiagonalIsogeny { alphas })
    }

    /// Primes dividing `deg(phi)`, equivalently some `|alpha_j|`.
    pub fn factor_degree_primes(&self) -> BTreeSet<u64> {
        self.alphas
            .iter()
            .flat_map(|a| prime_factors(a.unsigned_abs()))
            .collect()
    }
}

impl fmt::Display for DiagonalIsogeny {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alphas.iter().map(i64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Trial division; inputs are machine-size multipliers.
pub fn prime_factors(mut n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        while n.is_multiple_of(d) {
            out.insert(d);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneCoordinateFactor {
    /// Zero-based coordinate acted on.
    pub index: usize,
    pub isogeny: DiagonalIsogeny,
}

/// Ordered one-coordinate factors with pairwise disjoint supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleFactorization {
    arity: usize,
    factors: Vec<OneCoordinateFactor>,
}

impl AdmissibleFactorization {
    pub fn factors(&self) -> &[OneCoordinateFactor] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Recomposes the factors in order.
    pub fn compose_all(&self) -> DiagonalIsogeny {
        self.factors.iter().fold(DiagonalIsogeny::identity(self.arity), |acc, f| {
            acc.compose(&f.isogeny).expect("factors share the parent arity and cannot overflow it")
        })
    }
}
