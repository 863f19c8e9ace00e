//! Carlitz-type q-Euler numbers and polynomials, and the classical Euler
//! numbers they deform.
//!
//! The numbers `E_{n,Q}` (with `Q = q^W`) are defined by the umbral recurrence
//! `Q (Q E + 1)^n + E_n = [2]_Q δ_{0,n}`, which unrolls to
//!
//! ```text
//! E_0 = 1,   (1 + Q^{n+1}) E_n = -Q Σ_{l<n} C(n,l) Q^l E_l   (n ≥ 1).
//! ```
//!
//! The fermionic integral of `[x + y]_Q^n` yields the closed form
//!
//! ```text
//! E_n(x) = (1 - Q)^{-n} Σ_{l=0}^{n} C(n,l) (-1)^l Q^{l x} (1 + Q) / (1 + Q^{l+1}),
//! ```
//!
//! which is kept as an independent oracle for the recurrence.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::qcalc::{BracketArg, QSample, Rational};

/// Row `n` of Pascal's triangle, `C(n, 0..=n)`.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

fn binomial_rational_row(n: usize) -> Vec<Rational> {
    binomial_row(n).into_iter().map(Rational::from_integer).collect()
}

fn sign(l: usize) -> Rational {
    if l.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Memo table for `E_{l, q^W}` keyed by `(W, q)`, each entry a prefix
/// `E_0..E_len`. Entries are only ever appended, so a key, once present,
/// never changes value. Safe to share between threads.
#[derive(Debug, Default)]
pub struct QEulerCache {
    table: RwLock<HashMap<(u64, Rational), Vec<Rational>>>,
    evaluations: AtomicUsize,
}

impl QEulerCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of `(l, W, q)` values computed by the recurrence so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Number of distinct `(W, q)` bases seen.
    pub fn bases(&self) -> usize {
        self.table.read().expect("cache lock poisoned").len()
    }

    pub fn get(&self, n: usize, base_power: u64, q: &QSample) -> Option<Rational> {
        let table = self.table.read().expect("cache lock poisoned");
        table.get(&(base_power, q.value().clone())).and_then(|row| row.get(n).cloned())
    }

    /// `E_0..=E_n` for base `q^W`, extending the memoized prefix if needed.
    pub fn prefix(&self, n: usize, base_power: u64, q: &QSample) -> Vec<Rational> {
        let key = (base_power, q.value().clone());
        {
            let table = self.table.read().expect("cache lock poisoned");
            if let Some(row) = table.get(&key) {
                if row.len() > n {
                    return row[..=n].to_vec();
                }
            }
        }
        let mut table = self.table.write().expect("cache lock poisoned");
        let row = table.entry(key).or_default();
        let before = row.len();
        if before <= n {
            extend_recurrence(row, n, &q.raise(base_power));
            self.evaluations.fetch_add(row.len() - before, Ordering::Relaxed);
        }
        row[..=n].to_vec()
    }
}

/// Extends `row` (a prefix `E_0..` for base `big_q`) through index `n`.
fn extend_recurrence(row: &mut Vec<Rational>, n: usize, big_q: &QSample) {
    if row.is_empty() {
        row.push(Rational::one());
    }
    while row.len() <= n {
        let k = row.len();
        let binom = binomial_rational_row(k);
        let mut acc = Rational::zero();
        for (l, e_l) in row.iter().enumerate() {
            acc += &binom[l] * big_q.pow(l as i64) * e_l;
        }
        let lead = Rational::one() + big_q.pow(k as i64 + 1);
        row.push(-(big_q.value() * acc) / lead);
    }
}

/// `E_{n, q^W}` by the defining recurrence, memoized in `cache`.
pub fn q_euler_number(n: usize, base_power: u64, q: &QSample, cache: &QEulerCache) -> Rational {
    if let Some(hit) = cache.get(n, base_power, q) {
        return hit;
    }
    cache.prefix(n, base_power, q).pop().expect("prefix is non-empty")
}

/// `E_{n, q^W}` from the closed form of the fermionic integral.
pub fn q_euler_number_closed(n: usize, base_power: u64, q: &QSample) -> Rational {
    q_euler_poly_closed_exp(n, 0, base_power, q)
}

/// Closed form of `E_{n,Q}(x)` where `x = exponent / W`:
/// `(1 - Q)^{-n} Σ_l C(n,l) (-1)^l q^{l * exponent} (1 + Q) / (1 + Q^{l+1})`.
pub fn q_euler_poly_closed_exp(n: usize, exponent: i64, base_power: u64, q: &QSample) -> Rational {
    let big_q = q.raise(base_power);
    let one = Rational::one();
    let two_bracket = &one + big_q.value();
    let binom = binomial_rational_row(n);
    let mut acc = Rational::zero();
    for (l, c) in binom.iter().enumerate() {
        let term = c * q.pow(l as i64 * exponent) * &two_bracket / (&one + big_q.pow(l as i64 + 1));
        acc += sign(l) * term;
    }
    acc / num_traits::Pow::pow(&one - big_q.value(), n)
}

/// Closed form of `E_{n,Q}(x)` for a guarded bracket argument.
pub fn q_euler_poly_closed(n: usize, x: &BracketArg, q: &QSample) -> Rational {
    q_euler_poly_closed_exp(n, x.exponent(), x.base_power(), q)
}

/// `E_{n,Q}(x) = Σ_l C(n,l) Q^{l x} E_{l,Q} [x]_Q^{n-l}` with `Q = q^W`,
/// `W` being the argument's base power.
pub fn q_euler_poly(n: usize, x: &BracketArg, q: &QSample, cache: &QEulerCache) -> Rational {
    let numbers = cache.prefix(n, x.base_power(), q);
    poly_from_numbers(&numbers, x.exponent(), x.base_power(), q)
}

/// Evaluates the polynomial expansion given `E_0..=E_n` for base `q^W`.
/// `exponent` is `W x`.
pub(crate) fn poly_from_numbers(
    numbers: &[Rational],
    exponent: i64,
    base_power: u64,
    q: &QSample,
) -> Rational {
    let n = numbers.len() - 1;
    if exponent == 0 {
        return numbers[n].clone();
    }
    let binom = binomial_rational_row(n);
    let bracket = q.bracket_exp(exponent, base_power);
    let shift = q.pow(exponent);
    // powers of [x]_Q from n down; 0^0 = 1
    let mut bracket_pows = Vec::with_capacity(n + 1);
    bracket_pows.push(Rational::one());
    for i in 1..=n {
        let next = &bracket_pows[i - 1] * &bracket;
        bracket_pows.push(next);
    }
    let mut acc = Rational::zero();
    let mut shift_pow = Rational::one();
    for (l, e_l) in numbers.iter().enumerate() {
        acc += &binom[l] * &shift_pow * e_l * &bracket_pows[n - l];
        shift_pow *= &shift;
    }
    acc
}

/// Memo table for the classical Euler numbers `E_n`.
#[derive(Debug, Clone)]
pub struct ClassicalEulerCache {
    numbers: Vec<Rational>,
}

impl Default for ClassicalEulerCache {
    fn default() -> Self {
        Self { numbers: vec![Rational::one()] }
    }
}

impl ClassicalEulerCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `E_n` from `E_0 = 1`, `(E + 1)^n + E_n = 2 δ_{0,n}`, i.e.
    /// `2 E_n = -Σ_{j<n} C(n,j) E_j` for `n ≥ 1`.
    pub fn number(&mut self, n: usize) -> Rational {
        while self.numbers.len() <= n {
            let k = self.numbers.len();
            let binom = binomial_rational_row(k);
            let sum: Rational =
                self.numbers.iter().zip(&binom).map(|(e, c)| e * c).fold(Rational::zero(), |a, b| a + b);
            self.numbers.push(-sum / Rational::from_integer(BigInt::from(2)));
        }
        self.numbers[n].clone()
    }
}

/// `E_n(x) = Σ_l C(n,l) x^{n-l} E_l`.
pub fn classical_euler_poly(n: usize, x: &Rational, cache: &mut ClassicalEulerCache) -> Rational {
    let binom = binomial_rational_row(n);
    let mut acc = Rational::zero();
    let mut x_pow = Rational::one();
    for l in (0..=n).rev() {
        acc += &binom[l] * &x_pow * cache.number(l);
        x_pow *= x;
    }
    acc
}

/// Checks `q^k E_{m,q}(k) + (-1)^{k-1} E_{m,q} = [2]_q Σ_{l<k} (-1)^{k-1-l} q^l [l]_q^m`
/// exactly, for `k = n_shift ≥ 1`. The left side goes through the recurrence
/// and polynomial expansion, the right side through brackets alone.
///
/// The weight `q^l` comes from telescoping the partial sums of the integral
/// one shift at a time; it is invisible at `k = 1`, where only `l = 0`
/// contributes.
pub fn verify_shift_identity(m: usize, n_shift: u32, q: &QSample) -> Result<bool> {
    if n_shift == 0 {
        return Err(crate::Error::InvalidArgument("shift must be at least 1".into()));
    }
    let cache = QEulerCache::new();
    let k = n_shift as i64;
    let shifted = q_euler_poly(m, &BracketArg::integer(k, 1)?, q, &cache);
    let base = q_euler_number(m, 1, q, &cache);
    let lhs = q.pow(k) * shifted + sign(n_shift as usize - 1) * base;

    let mut sum = Rational::zero();
    for l in 0..k {
        let f = num_traits::Pow::pow(q.bracket_exp(l, 1), m);
        sum += sign((k - 1 - l) as usize) * q.pow(l) * f;
    }
    let rhs = q.two_bracket(1) * sum;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{integer, rational};

    fn q(n: i64, d: i64) -> QSample {
        QSample::from_ratio(n, d).unwrap()
    }

    #[test]
    fn binomials() {
        let row: Vec<i64> = binomial_row(5).iter().map(|b| i64::try_from(b).unwrap()).collect();
        assert_eq!(row, vec![1, 5, 10, 10, 5, 1]);
        assert_eq!(binomial_row(0).len(), 1);
    }

    #[test]
    fn number_examples() {
        let cache = QEulerCache::new();
        assert_eq!(q_euler_number(0, 7, &q(5, 3), &cache), integer(1));
        assert_eq!(q_euler_number(1, 1, &q(2, 1), &cache), rational(-2, 5));
        assert_eq!(q_euler_number(2, 1, &q(2, 1), &cache), rational(2, 15));
    }

    #[test]
    fn closed_form_examples() {
        let cache = QEulerCache::new();
        assert_eq!(q_euler_number_closed(0, 3, &q(7, 2)), integer(1));
        assert_eq!(q_euler_number_closed(1, 1, &q(2, 1)), rational(-2, 5));
        assert_eq!(q_euler_number_closed(2, 1, &q(2, 1)), rational(2, 15));
        let five_halves = q(5, 2);
        assert_eq!(
            q_euler_number_closed(5, 3, &five_halves),
            q_euler_number(5, 3, &five_halves, &cache)
        );
    }

    #[test]
    fn poly_examples() {
        let cache = QEulerCache::new();
        let q2 = q(2, 1);
        for n in 0..6 {
            let at_zero = q_euler_poly(n, &BracketArg::integer(0, 1).unwrap(), &q2, &cache);
            assert_eq!(at_zero, q_euler_number(n, 1, &q2, &cache));
        }
        let arg = BracketArg::new(rational(7, 3), 3).unwrap();
        assert_eq!(q_euler_poly(0, &arg, &q2, &cache), integer(1));
        let one = BracketArg::integer(1, 1).unwrap();
        assert_eq!(q_euler_poly(1, &one, &q2, &cache), rational(1, 5));
    }

    #[test]
    fn classical_examples() {
        let mut cache = ClassicalEulerCache::new();
        assert_eq!(classical_euler_poly(0, &rational(3, 7), &mut cache), integer(1));
        assert_eq!(classical_euler_poly(1, &integer(0), &mut cache), rational(-1, 2));
        assert_eq!(classical_euler_poly(3, &integer(0), &mut cache), rational(1, 4));
        // E_1(x) = x - 1/2, E_2(x) = x^2 - x
        assert_eq!(classical_euler_poly(1, &integer(1), &mut cache), rational(1, 2));
        assert_eq!(classical_euler_poly(2, &integer(3), &mut cache), integer(6));
    }

    #[test]
    fn shift_examples() {
        for m in 0..6 {
            assert!(verify_shift_identity(m, 1, &q(2, 1)).unwrap(), "m = {m}");
        }
        assert!(verify_shift_identity(0, 1, &q(9, 4)).unwrap());
        assert!(verify_shift_identity(3, 4, &q(5, 3)).unwrap());
        assert!(verify_shift_identity(2, 0, &q(2, 1)).is_err());
    }

    #[test]
    fn shift_identity_needs_the_q_weight() {
        // Without q^l on the right the k = 2 case already fails, even for f = 1:
        // q^2 - 1 != [2]_q (1 - 1).
        let q2 = q(2, 1);
        let cache = QEulerCache::new();
        let lhs = q2.pow(2) * q_euler_poly(0, &BracketArg::integer(2, 1).unwrap(), &q2, &cache)
            - q_euler_number(0, 1, &q2, &cache);
        assert_eq!(lhs, integer(3));
        let unweighted = q2.two_bracket(1) * (integer(1) - integer(1));
        assert_ne!(lhs, unweighted);
        assert!(verify_shift_identity(0, 2, &q2).unwrap());
    }

    #[test]
    fn cache_is_write_once_and_counts() {
        let cache = QEulerCache::new();
        let q3 = q(3, 1);
        let a = q_euler_number(6, 5, &q3, &cache);
        assert_eq!(cache.evaluations(), 7);
        let b = q_euler_number(6, 5, &q3, &cache);
        assert_eq!(a, b);
        q_euler_number(3, 5, &q3, &cache);
        assert_eq!(cache.evaluations(), 7);
        assert_eq!(cache.bases(), 1);
    }
}
