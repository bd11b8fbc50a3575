//! Independent re-verification of certified certificates.
//!
//! Deliberately shares no arithmetic with the checks that produced the
//! certificate: gcd is binary, primality uses a 6k +/- 1 wheel, factorials and
//! subset weights are recomputed here.  Only the echoed inputs are trusted.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Certificate, Criterion, PrimeComparison, SubsetChoice, Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("recheck failed: {0}")]
pub struct RecheckError(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, RecheckError> {
    Err(RecheckError(msg.into()))
}

fn binary_gcd(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn wheel_prime(n: u64) -> bool {
    match n {
        0 | 1 => false,
        2 | 3 => true,
        _ if n.is_multiple_of(2) || n.is_multiple_of(3) => false,
        _ => {
            let mut k = 5u64;
            while k.saturating_mul(k) <= n {
                if n.is_multiple_of(k) || n.is_multiple_of(k + 2) {
                    return false;
                }
                k += 6;
            }
            true
        }
    }
}

fn distinct_primes(mut n: u64, into: &mut Vec<u64>) {
    let mut k = 2u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            into.push(k);
            while n.is_multiple_of(k) {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        into.push(n);
    }
}

fn checked(v: Option<u128>, what: &str) -> Result<u128, RecheckError> {
    v.ok_or_else(|| RecheckError(format!("overflow recomputing {what}")))
}

struct Table {
    n: usize,
    dim: usize,
    dim_factorial: u128,
    entries: BTreeMap<Vec<u8>, u128>,
}

fn table_of(cert: &Certificate) -> Result<Table, RecheckError> {
    let inp = &cert.inputs;
    let mut entries = BTreeMap::new();
    for e in &inp.multidegrees {
        if e.index.len() != inp.n_factors || e.index.iter().any(|&b| b > 1) {
            return fail(format!("malformed tuple {:?}", e.index));
        }
        if e.index.iter().map(|&b| usize::from(b)).sum::<usize>() != inp.dim {
            return fail(format!("tuple {:?} does not have weight {}", e.index, inp.dim));
        }
        entries.insert(e.index.clone(), e.deg);
    }
    // Count of weight-dim tuples is C(n, dim); compare instead of enumerating.
    let mut binom = 1u128;
    for i in 0..inp.dim {
        binom = binom * (inp.n_factors - i) as u128 / (i + 1) as u128;
    }
    if entries.len() as u128 != binom {
        return fail("multidegree table is incomplete");
    }
    let mut dim_factorial = 1u128;
    for k in 2..=inp.dim as u128 {
        dim_factorial = checked(dim_factorial.checked_mul(k), "dim!")?;
    }
    let mut sum = 0u128;
    for d in entries.values() {
        sum = checked(sum.checked_add(*d), "degree sum")?;
    }
    if checked(dim_factorial.checked_mul(sum), "total degree")? != inp.total_degree {
        return fail("echoed total degree disagrees with the table");
    }
    Ok(Table { n: inp.n_factors, dim: inp.dim, dim_factorial, entries })
}

fn alpha_degrees(cert: &Certificate, t: &Table) -> Result<Vec<u128>, RecheckError> {
    let alphas = cert.inputs.alphas.as_ref().ok_or_else(|| RecheckError("isogeny not echoed".into()))?;
    if alphas.len() != t.n || alphas.contains(&0) {
        return fail("echoed isogeny has the wrong arity or a zero entry");
    }
    Ok(alphas.iter().map(|a| u128::from(a.unsigned_abs()).pow(2)).collect())
}

fn check_choice(t: &Table, j: usize, m: u128, choice: &Option<SubsetChoice>) -> Result<(), RecheckError> {
    let Some(c) = choice else {
        return fail(format!("no subset recorded for j = {}", j + 1));
    };
    if c.tuple.len() != t.n || c.tuple[j] != 1 {
        return fail(format!("subset for j = {} does not contain j", j + 1));
    }
    let deg = *t.entries.get(&c.tuple).ok_or_else(|| RecheckError(format!("tuple {:?} not in table", c.tuple)))?;
    if deg != c.deg_i || checked(t.dim_factorial.checked_mul(deg), "dim! deg_I")? != c.scaled {
        return fail(format!("recorded degrees for j = {} do not match the table", j + 1));
    }
    if binary_gcd(m, c.scaled) != 1 || c.gcd != 1 {
        return fail(format!("gcd for j = {} is not 1", j + 1));
    }
    Ok(())
}

/// Re-verifies a `CertifiedTransverse` certificate from its echoed inputs.
pub fn recheck(cert: &Certificate) -> Result<(), RecheckError> {
    if cert.verdict != Verdict::CertifiedTransverse {
        return fail("only certified certificates can be rechecked");
    }
    if !cert.hypotheses.transverse_input {
        return fail("certificate does not assume a transverse input");
    }
    let t = table_of(cert)?;
    match (&cert.criterion, &cert.witness) {
        (Criterion::CorollaryCurves, Witness::Curves(w)) => {
            if t.dim != 1 || w.len() != t.n {
                return fail("curve witness has the wrong shape");
            }
            let degs = alpha_degrees(cert, &t)?;
            for (j, item) in w.iter().enumerate() {
                let mut e = vec![0u8; t.n];
                e[j] = 1;
                if item.j != j + 1 || t.entries[&e] != item.d_j || degs[j] != item.deg_alpha {
                    return fail(format!("curve witness entry {} does not match the inputs", j + 1));
                }
                if binary_gcd(item.deg_alpha, item.d_j) != 1 {
                    return fail(format!("gcd(deg alpha_{0}, d_{0}) is not 1", j + 1));
                }
            }
        }
        (Criterion::TheoremMain, Witness::Main(w)) => {
            let degs = alpha_degrees(cert, &t)?;
            if w.len() != t.n {
                return fail("main witness must cover every factor");
            }
            for (j, item) in w.iter().enumerate() {
                if item.deg_alpha != degs[j] {
                    return fail(format!("deg alpha_{} mismatch", j + 1));
                }
                check_choice(&t, j, degs[j], &item.choice)?;
            }
        }
        (Criterion::TheoremWeak, Witness::Weak(w)) => {
            let alphas = cert.inputs.alphas.as_ref().ok_or_else(|| RecheckError("isogeny not echoed".into()))?;
            let mut primes = Vec::new();
            for a in alphas {
                distinct_primes(a.unsigned_abs(), &mut primes);
            }
            primes.sort_unstable();
            primes.dedup();
            let bound = checked(t.dim_factorial.checked_mul(cert.inputs.total_degree), "dim! deg V")?;
            let expected: Vec<PrimeComparison> =
                primes.iter().map(|&p| PrimeComparison { p, exceeds: u128::from(p) > bound }).collect();
            if w.bound != bound || w.primes != expected || expected.iter().any(|c| !c.exceeds) {
                return fail("prime comparison does not certify");
            }
        }
        (Criterion::TheoremA, Witness::Threshold(w)) => {
            let primes = cert.inputs.primes.as_ref().ok_or_else(|| RecheckError("primes not echoed".into()))?;
            if t.dim != 1 || primes.len() != t.n || w.entries.len() != t.n {
                return fail("threshold witness has the wrong shape");
            }
            let mut threshold = checked(cert.inputs.total_degree.checked_mul(t.n as u128), "threshold")?;
            for _ in 1..t.n {
                threshold = checked(threshold.checked_mul(3), "threshold")?;
            }
            if threshold != w.threshold {
                return fail("threshold mismatch");
            }
            for p in primes {
                let abs = p.unsigned_abs();
                if !wheel_prime(abs) || u128::from(abs) < threshold {
                    return fail(format!("{p} is not a prime above the threshold"));
                }
            }
        }
        (Criterion::CorollaryIdentity, Witness::Identity(w)) => {
            let n = cert.inputs.n.ok_or_else(|| RecheckError("n not echoed".into()))?;
            if w.len() != t.n || n == 0 {
                return fail("identity witness has the wrong shape");
            }
            for (j, item) in w.iter().enumerate() {
                check_choice(&t, j, u128::from(n.unsigned_abs()), &item.choice)?;
            }
        }
        (Criterion::CorollaryIdentity, Witness::PrimeMode(w)) => {
            let p = cert.inputs.n.ok_or_else(|| RecheckError("p not echoed".into()))?.unsigned_abs();
            if !wheel_prime(p) {
                return fail("prime mode with a non-prime");
            }
            let p = u128::from(p);
            if t.dim_factorial % p == 0 || w.dim_factorial != t.dim_factorial {
                return fail("p divides dim!");
            }
            for j in 0..t.n {
                let g = t.entries.iter().filter(|(k, _)| k[j] == 1).fold(0, |g, (_, &d)| binary_gcd(g, d));
                if g % p == 0 {
                    return fail(format!("p divides the gcd for j = {}", j + 1));
                }
            }
        }
        _ => return fail("witness kind does not match the criterion"),
    }
    Ok(())
}
