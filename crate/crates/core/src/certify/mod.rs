//! Sufficient criteria for transversality (hence irreducibility) of preimages
//! `[alpha_1, ..., alpha_N]^{-1}(V)` of a transverse `V`, emitted as certificates.
//!
//! Every criterion is one-sided: a failed check yields `Inconclusive`, never a
//! claim of reducibility.  Transversality of the input itself is a user-supplied
//! hypothesis; certificates restate it but never conclude it.
//!
//! Witness indices `j` are 1-based (they are meant to be read); all function
//! arguments remain 0-based.

mod recheck;

pub use recheck::{recheck, RecheckError};

use serde::Serialize;
use thiserror::Error;

use crate::diagonal_isogeny::DiagonalIsogeny;
use crate::product_variety::{weight_tuples, MultiDegreeEntry, MultiDegreeTable, SubvarietyPresentation, VarietyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("criterion needs a curve (dim 1), got dim {dim}")]
    NotCurve { dim: usize },
    #[error("expected {expected} entries, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("n must be nonzero")]
    ZeroN,
    #[error("prime mode needs a prime, got {0}")]
    NotPrime(i64),
    #[error(transparent)]
    Variety(#[from] VarietyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    TheoremA,
    TheoremMain,
    TheoremWeak,
    CorollaryIdentity,
    CorollaryCurves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    CertifiedTransverse,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub transverse_input: bool,
}

/// Echo of everything a criterion read, so that a certificate can be rechecked on its own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateInputs {
    pub n_factors: usize,
    pub dim: usize,
    pub multidegrees: Vec<MultiDegreeEntry>,
    pub total_degree: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime_mode: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveWitness {
    pub j: usize,
    pub d_j: u128,
    pub deg_alpha: u128,
    pub gcd: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetChoice {
    #[serde(rename = "I")]
    pub tuple: Vec<u8>,
    pub deg_i: u128,
    /// `dim! * deg_I`.
    pub scaled: u128,
    pub gcd: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MainWitness {
    pub j: usize,
    pub deg_alpha: u128,
    /// Lexicographically smallest support witnessing coprimality, if any.
    pub choice: Option<SubsetChoice>,
    pub tuples_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeComparison {
    pub p: u64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakWitness {
    /// `dim! * deg V`.
    pub bound: u128,
    pub primes: Vec<PrimeComparison>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdEntry {
    pub j: usize,
    pub p_j: i64,
    pub is_prime: bool,
    pub meets_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdWitness {
    /// `deg C * N * 3^(N-1)`.
    pub threshold: u128,
    pub entries: Vec<ThresholdEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityWitness {
    pub j: usize,
    pub choice: Option<SubsetChoice>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeModeEntry {
    pub j: usize,
    /// gcd of `deg_I` over tuples with `i_j = 1`.
    pub gcd_of_degrees: u128,
    pub divisible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeModeWitness {
    pub dim_factorial: u128,
    pub divides_dim_factorial: bool,
    pub entries: Vec<PrimeModeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Curves(Vec<CurveWitness>),
    Main(Vec<MainWitness>),
    Weak(WeakWitness),
    Threshold(ThresholdWitness),
    Identity(Vec<IdentityWitness>),
    PrimeMode(PrimeModeWitness),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub criterion: Criterion,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub criterion: Criterion,
    pub verdict: Verdict,
    pub hypotheses: Hypotheses,
    pub inputs: CertificateInputs,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reasons: Vec<String>,
    /// Present on certificates produced by [`certify_auto`]: every criterion tried, in order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub attempts: Vec<Attempt>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::CertifiedTransverse
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Trial division up to the square root.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn base_inputs(v: &SubvarietyPresentation) -> Result<CertificateInputs, CertifyError> {
    Ok(CertificateInputs {
        n_factors: v.arity(),
        dim: v.dim(),
        multidegrees: v
            .multidegrees
            .entries()
            .map(|(t, d)| MultiDegreeEntry { index: t.to_vec(), deg: d })
            .collect(),
        total_degree: v.total_degree()?,
        alphas: None,
        primes: None,
        n: None,
        prime_mode: None,
    })
}

fn finish(
    criterion: Criterion,
    v: &SubvarietyPresentation,
    inputs: CertificateInputs,
    witness: Witness,
    mut reasons: Vec<String>,
) -> Certificate {
    if !v.transverse {
        reasons.insert(0, "input is not flagged transverse; every criterion assumes it".into());
    }
    let verdict = if reasons.is_empty() { Verdict::CertifiedTransverse } else { Verdict::Inconclusive };
    Certificate {
        criterion,
        verdict,
        hypotheses: Hypotheses { transverse_input: v.transverse },
        inputs,
        witness,
        reasons,
        attempts: Vec::new(),
    }
}

fn check_isogeny_arity(v: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<(), CertifyError> {
    if phi.arity() != v.arity() {
        return Err(CertifyError::ArityMismatch { expected: v.arity(), got: phi.arity() });
    }
    Ok(())
}

/// First tuple of weight `dim` containing `j` (in support-lex order) with `gcd(m, dim! deg_I) = 1`.
fn search_subset(table: &MultiDegreeTable, j: usize, m: u128) -> Result<(Option<SubsetChoice>, usize), CertifyError> {
    let fact = table.dim_factorial()?;
    let mut checked = 0;
    for t in weight_tuples(table.arity(), table.dim()) {
        if t[j] != 1 {
            continue;
        }
        checked += 1;
        let deg_i = table.get(&t).expect("validated table is complete");
        let scaled = fact.checked_mul(deg_i).ok_or(VarietyError::Overflow("dim! * deg_I"))?;
        let g = gcd(m, scaled);
        if g == 1 {
            return Ok((Some(SubsetChoice { tuple: t, deg_i, scaled, gcd: g }), checked));
        }
    }
    Ok((None, checked))
}

/// Theorem A: primes `p_j` with `|p_j| >= deg C * N * 3^(N-1)`.
pub fn check_theorem_a(c: &SubvarietyPresentation, primes: &[i64]) -> Result<Certificate, CertifyError> {
    if c.dim() != 1 {
        return Err(CertifyError::NotCurve { dim: c.dim() });
    }
    let n = c.arity();
    if primes.len() != n {
        return Err(CertifyError::ArityMismatch { expected: n, got: primes.len() });
    }
    let mut inputs = base_inputs(c)?;
    inputs.primes = Some(primes.to_vec());
    let overflow = || VarietyError::Overflow("deg C * N * 3^(N-1)");
    let pow3 = 3u128.checked_pow(n as u32 - 1).ok_or_else(overflow)?;
    let threshold = inputs
        .total_degree
        .checked_mul(n as u128)
        .and_then(|x| x.checked_mul(pow3))
        .ok_or_else(overflow)?;
    let mut reasons = Vec::new();
    let entries = primes
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let abs = p.unsigned_abs();
            let entry = ThresholdEntry {
                j: j + 1,
                p_j: p,
                is_prime: is_prime(abs),
                meets_threshold: u128::from(abs) >= threshold,
            };
            if !entry.is_prime {
                reasons.push(format!("p_{} = {p} is not prime", j + 1));
            }
            if !entry.meets_threshold {
                reasons.push(format!("|p_{}| = {abs} is below the threshold {threshold}", j + 1));
            }
            entry
        })
        .collect();
    let witness = Witness::Threshold(ThresholdWitness { threshold, entries });
    Ok(finish(Criterion::TheoremA, c, inputs, witness, reasons))
}

/// For every `j`, some `J` containing `j` with `|J| = dim` and `gcd(alpha_j^2, dim! deg_{I_J}) = 1`.
pub fn check_theorem_main(v: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<Certificate, CertifyError> {
    check_isogeny_arity(v, phi)?;
    let mut inputs = base_inputs(v)?;
    inputs.alphas = Some(phi.alphas().to_vec());
    let mut reasons = Vec::new();
    let mut witness = Vec::new();
    for j in 0..v.arity() {
        let deg_alpha = phi.coordinate_degree(j);
        let (choice, tuples_checked) = search_subset(&v.multidegrees, j, deg_alpha)?;
        if choice.is_none() {
            reasons.push(format!(
                "j = {}: none of the {tuples_checked} tuples of weight {} containing j has gcd(deg alpha_j = {deg_alpha}, dim! deg_I) = 1",
                j + 1,
                v.dim()
            ));
        }
        witness.push(MainWitness { j: j + 1, deg_alpha, choice, tuples_checked });
    }
    Ok(finish(Criterion::TheoremMain, v, inputs, Witness::Main(witness), reasons))
}

/// Every prime dividing `deg phi` exceeds `dim! deg V`.
pub fn check_theorem_weak(v: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<Certificate, CertifyError> {
    check_isogeny_arity(v, phi)?;
    let mut inputs = base_inputs(v)?;
    inputs.alphas = Some(phi.alphas().to_vec());
    let bound = v
        .multidegrees
        .dim_factorial()?
        .checked_mul(inputs.total_degree)
        .ok_or(VarietyError::Overflow("dim! deg V"))?;
    let mut reasons = Vec::new();
    let primes = phi
        .factor_degree_primes()
        .into_iter()
        .map(|p| {
            let exceeds = u128::from(p) > bound;
            if !exceeds {
                reasons.push(format!("prime {p} divides deg phi but does not exceed dim! deg V = {bound}"));
            }
            PrimeComparison { p, exceeds }
        })
        .collect();
    let witness = Witness::Weak(WeakWitness { bound, primes });
    Ok(finish(Criterion::TheoremWeak, v, inputs, witness, reasons))
}

/// `[n, ..., n]^{-1}(V)`.  Integer mode: per `j` a tuple with `i_j = 1` and
/// `gcd(n, dim! deg_I) = 1`.  Prime mode: `p` does not divide `dim!`, nor for any
/// `j` the gcd of the `deg_I` with `i_j = 1`.
pub fn check_corollary_identity(v: &SubvarietyPresentation, n: i64, prime_mode: bool) -> Result<Certificate, CertifyError> {
    if n == 0 {
        return Err(CertifyError::ZeroN);
    }
    let abs = n.unsigned_abs();
    if prime_mode && !is_prime(abs) {
        return Err(CertifyError::NotPrime(n));
    }
    let mut inputs = base_inputs(v)?;
    inputs.n = Some(n);
    inputs.prime_mode = Some(prime_mode);
    let table = &v.multidegrees;
    let mut reasons = Vec::new();
    let witness = if prime_mode {
        let p = u128::from(abs);
        let dim_factorial = table.dim_factorial()?;
        let divides_dim_factorial = dim_factorial % p == 0;
        if divides_dim_factorial {
            reasons.push(format!("p = {abs} divides dim! = {dim_factorial}"));
        }
        let entries = (0..v.arity())
            .map(|j| {
                let g = table
                    .entries()
                    .filter(|(t, _)| t[j] == 1)
                    .fold(0u128, |g, (_, d)| gcd(g, d));
                let divisible = g % p == 0;
                if divisible {
                    reasons.push(format!("j = {}: p = {abs} divides gcd of deg_I with i_j = 1, which is {g}", j + 1));
                }
                PrimeModeEntry { j: j + 1, gcd_of_degrees: g, divisible }
            })
            .collect();
        Witness::PrimeMode(PrimeModeWitness { dim_factorial, divides_dim_factorial, entries })
    } else {
        let mut out = Vec::new();
        for j in 0..v.arity() {
            let (choice, checked) = search_subset(table, j, u128::from(abs))?;
            if choice.is_none() {
                reasons.push(format!(
                    "j = {}: none of the {checked} tuples with i_j = 1 has gcd(n, dim! deg_I) = 1",
                    j + 1
                ));
            }
            out.push(IdentityWitness { j: j + 1, choice });
        }
        Witness::Identity(out)
    };
    Ok(finish(Criterion::CorollaryIdentity, v, inputs, witness, reasons))
}

/// Curves: `gcd(alpha_j^2, d_j) = 1` for every `j`.
pub fn check_corollary_curves(c: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<Certificate, CertifyError> {
    let d = c.multidegrees.curve_degrees().ok_or(CertifyError::NotCurve { dim: c.dim() })?;
    check_isogeny_arity(c, phi)?;
    let mut inputs = base_inputs(c)?;
    inputs.alphas = Some(phi.alphas().to_vec());
    let mut reasons = Vec::new();
    let witness = d
        .iter()
        .enumerate()
        .map(|(j, &d_j)| {
            let deg_alpha = phi.coordinate_degree(j);
            let g = gcd(deg_alpha, d_j);
            if g != 1 {
                reasons.push(format!("j = {}: gcd(deg alpha_j = {deg_alpha}, d_j = {d_j}) = {g}", j + 1));
            }
            CurveWitness { j: j + 1, d_j, deg_alpha, gcd: g }
        })
        .collect();
    Ok(finish(Criterion::CorollaryCurves, c, inputs, Witness::Curves(witness), reasons))
}

/// Tries, in order: CorollaryCurves (curves only), TheoremMain, CorollaryIdentity
/// (when all `alpha_j` are equal), TheoremWeak, TheoremA (curves whose
/// multipliers are all prime).  Returns the first certificate that certifies,
/// otherwise an Inconclusive certificate from the last criterion tried.  Either
/// way `attempts` lists every criterion tried.
pub fn certify_auto(v: &SubvarietyPresentation, phi: &DiagonalIsogeny) -> Result<Certificate, CertifyError> {
    check_isogeny_arity(v, phi)?;
    let mut attempts = Vec::new();
    let mut last = None;
    let alphas = phi.alphas();
    let all_equal = alphas.iter().all(|&a| a == alphas[0]);
    let all_prime = alphas.iter().all(|a| is_prime(a.unsigned_abs()));
    let mut candidates: Vec<Box<dyn Fn() -> Result<Certificate, CertifyError>>> = Vec::new();
    if v.dim() == 1 {
        candidates.push(Box::new(|| check_corollary_curves(v, phi)));
    }
    candidates.push(Box::new(|| check_theorem_main(v, phi)));
    if all_equal {
        candidates.push(Box::new(|| check_corollary_identity(v, alphas[0], false)));
    }
    candidates.push(Box::new(|| check_theorem_weak(v, phi)));
    if v.dim() == 1 && all_prime {
        candidates.push(Box::new(|| check_theorem_a(v, alphas)));
    }
    for run in candidates {
        let cert = run()?;
        attempts.push(Attempt { criterion: cert.criterion, verdict: cert.verdict, reasons: cert.reasons.clone() });
        let done = cert.is_certified();
        last = Some(cert);
        if done {
            break;
        }
    }
    let mut cert = last.expect("at least TheoremMain and TheoremWeak are tried");
    cert.attempts = attempts;
    if !cert.is_certified() {
        cert.reasons = cert
            .attempts
            .iter()
            .flat_map(|a| a.reasons.iter().map(move |r| format!("{:?}: {r}", a.criterion)))
            .collect();
    }
    Ok(cert)
}
