use std::cmp::Ordering;

/// Exponent vector, one entry per ring variable.
///
/// Ordered graded-lexicographically: total degree first, then the exponent of
/// the first variable, then the second, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, index: usize) -> Self {
        let mut exps = vec![0; arity];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.arity(), other.arity());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn with_exponent(&self, index: usize, e: u32) -> Monomial {
        let mut exps = self.0.clone();
        exps[index] = e;
        Monomial(exps)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_prefers_degree_then_earlier_variables() {
        let x4 = Monomial::from_exponents(vec![4, 0, 0]);
        let x2a = Monomial::from_exponents(vec![2, 1, 0]);
        let xb = Monomial::from_exponents(vec![1, 0, 1]);
        let a2 = Monomial::from_exponents(vec![0, 2, 0]);
        let mut v = vec![a2.clone(), xb.clone(), x4.clone(), x2a.clone()];
        v.sort();
        assert_eq!(v, vec![a2, xb, x2a, x4]);
    }

    #[test]
    fn division_requires_componentwise_dominance() {
        let a = Monomial::from_exponents(vec![3, 1]);
        let b = Monomial::from_exponents(vec![1, 1]);
        assert_eq!(a.div(&b), Some(Monomial::from_exponents(vec![2, 0])));
        assert_eq!(b.div(&a), None);
    }
}
