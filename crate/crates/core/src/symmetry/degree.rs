//! Structural degree bounds for the theorem expressions, viewed as rational
//! functions of `q`.
//!
//! A [`DegreeBound`] stands for some `N(q) / D(q)` where `deg N` is at most
//! `numerator` and `D` is the product of the recorded factors `1 ± q^e`. Sums
//! use the factor-wise lcm of denominators, products add both parts. At an
//! admissible `q` every recorded factor is nonzero, so two expressions whose
//! cross difference `N_a D_b - N_b D_a` has degree at most `d` and which agree
//! at `d + 1` distinct admissible points are the same rational function.

use std::collections::BTreeMap;

use crate::euler::binomial_row;
use crate::symmetry::{cofactors, for_each_index, Permutation, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Factor {
    /// `1 - q^e`
    OneMinus(u64),
    /// `1 + q^e`
    OnePlus(u64),
}

impl Factor {
    fn degree(self) -> u64 {
        match self {
            Factor::OneMinus(e) | Factor::OnePlus(e) => e,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeBound {
    numerator: u64,
    denominator: BTreeMap<Factor, u64>,
}

impl DegreeBound {
    pub fn constant() -> Self {
        Self::default()
    }

    pub fn monomial(exponent: u64) -> Self {
        Self { numerator: exponent, ..Self::default() }
    }

    /// `[e / b]_{q^b} = (1 - q^e) / (1 - q^b)`.
    pub fn bracket(exponent: u64, base_power: u64) -> Self {
        if exponent == 0 {
            return Self::constant();
        }
        let mut bound = Self::monomial(exponent);
        bound.denominator.insert(Factor::OneMinus(base_power), 1);
        bound
    }

    /// Divides by `1 + q^e`.
    pub fn over_one_plus(mut self, exponent: u64) -> Self {
        *self.denominator.entry(Factor::OnePlus(exponent)).or_default() += 1;
        self
    }

    pub fn numerator_degree(&self) -> u64 {
        self.numerator
    }

    pub fn denominator_degree(&self) -> u64 {
        self.denominator.iter().map(|(f, mult)| f.degree() * mult).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut denominator = self.denominator.clone();
        for (f, mult) in &other.denominator {
            *denominator.entry(*f).or_default() += mult;
        }
        Self { numerator: self.numerator + other.numerator, denominator }
    }

    pub fn pow(&self, k: u64) -> Self {
        Self {
            numerator: self.numerator * k,
            denominator: self.denominator.iter().map(|(f, m)| (*f, m * k)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut lcm = self.denominator.clone();
        for (f, mult) in &other.denominator {
            let entry = lcm.entry(*f).or_default();
            *entry = (*entry).max(*mult);
        }
        let lcm_degree: u64 = lcm.iter().map(|(f, m)| f.degree() * m).sum();
        let lifted = |b: &Self| b.numerator + lcm_degree - b.denominator_degree();
        Self { numerator: lifted(self).max(lifted(other)), denominator: lcm }
    }

    fn sum<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(None, |acc: Option<Self>, t| Some(match acc {
            None => t,
            Some(a) => a.add(&t),
        }))
        .unwrap_or_default()
    }
}

/// Bounds for `E_{0..=n, q^W}` following the recurrence
/// `E_k = -Q Σ_{l<k} C(k,l) Q^l E_l / (1 + Q^{k+1})`.
fn number_bounds(n: usize, base_power: u64) -> Vec<DegreeBound> {
    let mut bounds = vec![DegreeBound::constant()];
    for k in 1..=n {
        let sum = DegreeBound::sum(
            bounds
                .iter()
                .enumerate()
                .map(|(l, e)| DegreeBound::monomial(base_power * (l as u64 + 1)).mul(e)),
        );
        bounds.push(sum.over_one_plus(base_power * (k as u64 + 1)));
    }
    bounds
}

/// Bound for `Σ_l C(n,l) q^{l e} E_l [e/W]_{q^W}^{n-l}` with `e = W x ≥ 0`.
fn poly_bound(numbers: &[DegreeBound], exponent: u64, base_power: u64) -> DegreeBound {
    let n = numbers.len() - 1;
    if exponent == 0 {
        return numbers[n].clone();
    }
    let bracket = DegreeBound::bracket(exponent, base_power);
    DegreeBound::sum(numbers.iter().enumerate().map(|(l, e)| {
        DegreeBound::monomial(l as u64 * exponent)
            .mul(e)
            .mul(&bracket.pow((n - l) as u64))
    }))
}

pub fn theorem2_bound(wv: &WeightVector, sigma: &Permutation, m: usize, x: u64) -> DegreeBound {
    let ws = sigma.apply(wv);
    let (prefix, last) = ws.split_at(ws.len() - 1);
    let last = last[0];
    let w_prod: u64 = prefix.iter().product();
    let cof = cofactors(prefix);
    let numbers = number_bounds(m, w_prod);
    let mut terms = Vec::new();
    for_each_index(prefix, |k| {
        let s: u64 = cof.iter().zip(k).map(|(c, k)| c * k).sum();
        let exponent = last * x * w_prod + last * s;
        terms.push(DegreeBound::monomial(last * s).mul(&poly_bound(&numbers, exponent, w_prod)));
    });
    DegreeBound::bracket(w_prod, 1)
        .pow(m as u64)
        .mul(&DegreeBound::sum(terms))
        .over_one_plus(w_prod)
}

fn t_hat_bound(m: usize, l: usize, prefix: &[u64], raise: u64) -> DegreeBound {
    let cof = cofactors(prefix);
    let mut terms = Vec::new();
    for_each_index(prefix, |k| {
        let s: u64 = cof.iter().zip(k).map(|(c, k)| c * k).sum();
        terms.push(
            DegreeBound::monomial(raise * (l as u64 + 1) * s)
                .mul(&DegreeBound::bracket(raise * s, raise).pow((m - l) as u64)),
        );
    });
    DegreeBound::sum(terms)
}

pub fn theorem3_bound(wv: &WeightVector, sigma: &Permutation, m: usize, x: u64) -> DegreeBound {
    let ws = sigma.apply(wv);
    let (prefix, last) = ws.split_at(ws.len() - 1);
    let last = last[0];
    let w_prod: u64 = prefix.iter().product();
    let numbers = number_bounds(m, w_prod);
    let binom = binomial_row(m);
    let terms = (0..=m).map(|l| {
        debug_assert!(binom[l] > 0.into());
        DegreeBound::bracket(w_prod, 1)
            .pow(l as u64)
            .mul(&DegreeBound::bracket(last, 1).pow((m - l) as u64))
            .mul(&poly_bound(&numbers[..=l], w_prod * last * x, w_prod))
            .mul(&t_hat_bound(m, l, prefix, last))
    });
    DegreeBound::sum(terms).over_one_plus(w_prod)
}

/// Degree bound `D` on every cross difference `N_a D_b - N_b D_a` between
/// any two of the theorem-2 and theorem-3 expressions over all permutations.
/// Agreement of all of them at `D + 1` distinct admissible points makes the
/// invariance a formal identity in `q`.
pub fn certify_bound(wv: &WeightVector, m: usize, x: u64) -> u64 {
    let mut max_num = 0;
    let mut max_den = 0;
    for sigma in Permutation::all(wv.len()) {
        for bound in [theorem2_bound(wv, &sigma, m, x), theorem3_bound(wv, &sigma, m, x)] {
            max_num = max_num.max(bound.numerator_degree());
            max_den = max_den.max(bound.denominator_degree());
        }
    }
    (max_num + max_den).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_of_bounds() {
        let a = DegreeBound::bracket(6, 2); // (1 - q^6)/(1 - q^2)
        assert_eq!((a.numerator_degree(), a.denominator_degree()), (6, 2));
        let b = DegreeBound::monomial(3).over_one_plus(4);
        let s = a.add(&b);
        // common denominator (1 - q^2)(1 + q^4)
        assert_eq!(s.denominator_degree(), 6);
        assert_eq!(s.numerator_degree(), 10);
        let same = a.add(&a);
        assert_eq!(same, a);
        let p = a.mul(&b).pow(2);
        assert_eq!((p.numerator_degree(), p.denominator_degree()), (18, 12));
    }

    #[test]
    fn recurrence_bounds_match_first_numbers() {
        // E_1 = -Q/(1+Q^2): numerator degree W, denominator 2W.
        let b = number_bounds(1, 3);
        assert_eq!(b[1].numerator_degree(), 3);
        assert_eq!(b[1].denominator_degree(), 6);
    }

    #[test]
    fn trivial_weight_bound_is_small() {
        let wv = WeightVector::new(vec![1]).unwrap();
        let d = certify_bound(&wv, 0, 0);
        assert!((1..=4).contains(&d), "{d}");
    }
}
