//! Symmetric-group invariance of the weighted q-Euler sums.
//!
//! For odd weights `w_1..w_n` and a permutation `σ`, write `W_σ` for the
//! product of the first `n - 1` permuted weights and `w_σ` for the last one.
//! Two expressions are evaluated per `σ`:
//!
//! * the direct sum over the mixed-radix index `k`,
//!   `[W_σ]_q^m / [2]_{q^{W_σ}} Σ_k (-1)^{Σk} q^{w_σ S(k)} E_{m, q^{W_σ}}(w_σ x + w_σ Σ_j k_j / w_{σ(j)})`,
//! * its decomposition through the `T̂` sums,
//!   `1/[2]_{q^{W_σ}} Σ_l C(m,l) [W_σ]_q^l [w_σ]_q^{m-l} E_{l, q^{W_σ}}(w_σ x) T̂_{m, q^{w_σ}}(.. | l)`,
//!
//! where `S(k) = Σ_j (Π_{i≠j} w_{σ(i)}) k_j`. Both must be independent of
//! `σ` and equal to each other.

pub mod degree;
mod intpoly;

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::euler::{binomial_row, poly_from_numbers, QEulerCache};
use crate::qcalc::{format_rational, sample_points, QSample, Rational};
use intpoly::{small_binomials, IntPoly};

pub use degree::certify_bound;

/// Default ceiling on `n! * Π w * (m_max + 1) * samples`.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Odd positive weights `w_1..w_n`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        if let Some(&even) = weights.iter().find(|w| *w % 2 == 0) {
            return Err(Error::EvenWeight(even));
        }
        weights
            .iter()
            .try_fold(1u64, |acc, w| acc.checked_mul(*w))
            .filter(|p| *p <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidArgument("weight product is too large".into()))?;
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> u64 {
        self.0.iter().product()
    }
}

/// A permutation of `{0..n-1}`; displayed and serialized one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// From one-based images `σ(1)..σ(n)`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let seen: BTreeSet<usize> = images.iter().copied().collect();
        if seen.len() != n || images.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::NotAPermutation(images, n));
        }
        Ok(Self(images.into_iter().map(|i| i - 1).collect()))
    }

    /// One-based images.
    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// All of `S_n` in lexicographic order, identity first.
    pub fn all(n: usize) -> Vec<Self> {
        (0..n).permutations(n).map(Self).collect()
    }

    /// `(w_{σ(1)}, ..., w_{σ(n)})`.
    pub fn apply(&self, wv: &WeightVector) -> Vec<u64> {
        self.0.iter().map(|&i| wv.0[i]).collect()
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.images().serialize(serializer)
    }
}

/// `Π_{i≠j} w_i` for each `j`.
pub(crate) fn cofactors(prefix: &[u64]) -> Vec<u64> {
    (0..prefix.len())
        .map(|j| prefix.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, w)| w).product())
        .collect()
}

/// Visits every `k` with `0 ≤ k_j < radii[j]` in little-endian odometer
/// order (first coordinate fastest). An empty `radii` yields one empty index.
pub fn for_each_index(radii: &[u64], mut visit: impl FnMut(&[u64])) {
    let mut k = vec![0u64; radii.len()];
    if radii.contains(&0) {
        return;
    }
    loop {
        visit(&k);
        let mut pos = 0;
        loop {
            if pos == k.len() {
                return;
            }
            k[pos] += 1;
            if k[pos] < radii[pos] {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
    }
}

/// Deliberate single-term corruptions, for checking that verification
/// actually detects a broken evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Flips the sign of the last term of every `T̂` sum.
    THatSignFlip,
    /// Flips the sign of the last term of the direct theorem-2 sum.
    Theorem2SignFlip,
}

/// Evaluates the theorem expressions against a shared `E` cache.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'c> {
    cache: &'c QEulerCache,
    mutation: Option<Mutation>,
}

struct Split {
    prefix: Vec<u64>,
    last: u64,
    w_prod: u64,
}

fn split(wv: &WeightVector, sigma: &Permutation) -> Result<Split> {
    if sigma.0.len() != wv.len() {
        return Err(Error::InvalidArgument(format!(
            "permutation of {} elements applied to {} weights",
            sigma.0.len(),
            wv.len()
        )));
    }
    let mut prefix = sigma.apply(wv);
    let last = prefix.pop().expect("weights are non-empty");
    let w_prod = prefix.iter().product();
    Ok(Split { prefix, last, w_prod })
}

impl<'c> Evaluator<'c> {
    pub fn new(cache: &'c QEulerCache) -> Self {
        Self { cache, mutation: None }
    }

    pub fn with_mutation(self, mutation: Mutation) -> Self {
        Self { mutation: Some(mutation), ..self }
    }

    pub fn cache(&self) -> &'c QEulerCache {
        self.cache
    }

    pub fn theorem2_value(
        &self,
        wv: &WeightVector,
        sigma: &Permutation,
        m: usize,
        x: u64,
        q: &QSample,
    ) -> Result<Rational> {
        let Split { prefix, last, w_prod } = split(wv, sigma)?;
        let cof = cofactors(&prefix);
        let numbers = self.cache.prefix(m, w_prod, q);
        // Expanding E_{m,Q}(y) = Σ_l C(m,l) Q^{ly} E_l [y]_Q^{m-l} and swapping
        // the sums leaves, for each l, an integer polynomial in q:
        // P_l = Σ_k ± q^{w S(k) + l e_k} (1 - q^{e_k})^{m-l}.
        let binoms: Vec<Vec<i128>> = (0..=m).map(small_binomials).collect();
        let mut polys = vec![IntPoly::new(); m + 1];
        let total: u64 = prefix.iter().product();
        let mut visited = 0u64;
        for_each_index(&prefix, |k| {
            visited += 1;
            let s: u64 = cof.iter().zip(k).map(|(c, k)| c * k).sum();
            let mut sign = if k.iter().sum::<u64>() % 2 == 1 { -1 } else { 1 };
            if visited == total && self.mutation == Some(Mutation::Theorem2SignFlip) {
                sign = -sign;
            }
            // W-multiple of the argument w x + w Σ k_j / w_j
            let e = last * x * w_prod + last * s;
            for (l, poly) in polys.iter_mut().enumerate() {
                poly.add_shifted_power(sign, last * s + l as u64 * e, e, m - l, &binoms[m - l]);
            }
        });
        let one_minus_big_q = Rational::one() - q.pow(w_prod as i64);
        let mut sum = Rational::zero();
        let binom = binomial_row(m);
        for (l, poly) in polys.iter().enumerate() {
            let c = Rational::from_integer(binom[l].clone());
            sum += c * &numbers[l] * poly.eval(q.value()) / Pow::pow(&one_minus_big_q, m - l);
        }
        let scale = Pow::pow(q.bracket_exp(w_prod as i64, 1), m) / q.two_bracket(w_prod);
        Ok(scale * sum)
    }

    /// `T̂_{m, q_eff}(prefix | l)`.
    pub fn t_hat(&self, m: usize, l: usize, prefix: &[u64], q_eff: &QSample) -> Result<Rational> {
        if l > m {
            return Err(Error::InvalidArgument(format!("T-hat index l = {l} exceeds m = {m}")));
        }
        let cof = cofactors(prefix);
        let binom = small_binomials(m - l);
        let total: u64 = prefix.iter().product();
        let mut visited = 0u64;
        // numerator of Σ_k ± q^{(l+1)s} [s]^{m-l}; [0]^0 = 1 falls out of the expansion
        let mut poly = IntPoly::new();
        for_each_index(prefix, |k| {
            visited += 1;
            let s: u64 = cof.iter().zip(k).map(|(c, k)| c * k).sum();
            let mut sign = if k.iter().sum::<u64>() % 2 == 1 { -1 } else { 1 };
            if visited == total && self.mutation == Some(Mutation::THatSignFlip) {
                sign = -sign;
            }
            poly.add_shifted_power(sign, (l as u64 + 1) * s, s, m - l, &binom);
        });
        let denom = Pow::pow(Rational::one() - q_eff.value(), m - l);
        Ok(poly.eval(q_eff.value()) / denom)
    }

    pub fn theorem3_value(
        &self,
        wv: &WeightVector,
        sigma: &Permutation,
        m: usize,
        x: u64,
        q: &QSample,
    ) -> Result<Rational> {
        let Split { prefix, last, w_prod } = split(wv, sigma)?;
        let numbers = self.cache.prefix(m, w_prod, q);
        let binom = binomial_row(m);
        let q_eff = q.raise(last);
        let prod_bracket = q.bracket_exp(w_prod as i64, 1);
        let last_bracket = q.bracket_exp(last as i64, 1);
        let exponent = (w_prod * last * x) as i64;
        let mut sum = Rational::zero();
        for (l, c) in binom.into_iter().enumerate() {
            let e = poly_from_numbers(&numbers[..=l], exponent, w_prod, q);
            let t = self.t_hat(m, l, &prefix, &q_eff)?;
            sum += Rational::from_integer(c)
                * Pow::pow(&prod_bracket, l)
                * Pow::pow(&last_bracket, m - l)
                * e
                * t;
        }
        Ok(sum / q.two_bracket(w_prod))
    }

    pub fn verify_invariance(&self, config: &InvarianceConfig) -> Result<SymmetryReport> {
        verify_with(self, config)
    }
}

pub fn theorem2_value(
    wv: &WeightVector,
    sigma: &Permutation,
    m: usize,
    x: u64,
    q: &QSample,
    cache: &QEulerCache,
) -> Result<Rational> {
    Evaluator::new(cache).theorem2_value(wv, sigma, m, x, q)
}

pub fn t_hat(m: usize, l: usize, prefix: &[u64], q_eff: &QSample) -> Result<Rational> {
    Evaluator::new(&QEulerCache::new()).t_hat(m, l, prefix, q_eff)
}

pub fn theorem3_value(
    wv: &WeightVector,
    sigma: &Permutation,
    m: usize,
    x: u64,
    q: &QSample,
    cache: &QEulerCache,
) -> Result<Rational> {
    Evaluator::new(cache).theorem3_value(wv, sigma, m, x, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sampled,
    Certified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceConfig {
    pub weights: WeightVector,
    pub m_max: usize,
    pub x: u64,
    /// Sample count in sampled mode; ignored in certified mode.
    pub q_count: usize,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub budget: u128,
}

impl InvarianceConfig {
    pub fn sampled(weights: WeightVector, m_max: usize, x: u64, q_count: usize) -> Self {
        Self { weights, m_max, x, q_count, mode: Mode::Sampled, seed: None, budget: DEFAULT_BUDGET }
    }

    pub fn certified(weights: WeightVector, m_max: usize, x: u64) -> Self {
        Self { mode: Mode::Certified, ..Self::sampled(weights, m_max, x, 0) }
    }

    pub fn with_seed(self, seed: Option<u64>) -> Self {
        Self { seed, ..self }
    }
}

pub(crate) fn serialize_rational<S: Serializer>(
    value: &Rational,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_rational(value))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaValue {
    pub sigma: Permutation,
    #[serde(serialize_with = "serialize_rational")]
    pub theorem2: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub theorem3: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub m: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub q: Rational,
    pub values: Vec<SigmaValue>,
    pub theorem2_invariant: bool,
    pub theorem3_invariant: bool,
    pub routes_agree: bool,
}

impl Cell {
    pub fn passed(&self) -> bool {
        self.theorem2_invariant && self.theorem3_invariant && self.routes_agree
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Theorem2Invariance,
    Theorem3Invariance,
    RouteEquality,
}

/// Two values that should have been equal. For invariance failures the
/// permutations differ; for route failures they coincide and the values are
/// the theorem-2 and theorem-3 results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub m: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub q: Rational,
    pub sigma_a: Permutation,
    pub sigma_b: Permutation,
    #[serde(serialize_with = "serialize_rational")]
    pub value_a: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub value_b: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub m: usize,
    pub degree_bound: u64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub theorem2_invariance: bool,
    pub theorem3_invariance: bool,
    pub route_equality: bool,
}

impl Verdicts {
    pub fn passed(&self) -> bool {
        self.theorem2_invariance && self.theorem3_invariance && self.route_equality
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub weights: WeightVector,
    pub m_max: usize,
    pub x: u64,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub certificates: Vec<Certificate>,
    pub cells: Vec<Cell>,
    pub verdicts: Verdicts,
    pub witnesses: Vec<Witness>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.verdicts.passed()
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn check_budget(config: &InvarianceConfig, total_samples: usize) -> Result<()> {
    let work = factorial(config.weights.len())
        .saturating_mul(config.weights.product() as u128)
        .saturating_mul(total_samples as u128);
    if work > config.budget {
        return Err(Error::BudgetExceeded { work, budget: config.budget });
    }
    Ok(())
}

fn evaluate_cell(ev: &Evaluator<'_>, config: &InvarianceConfig, m: usize, q: &QSample) -> Result<(Cell, Vec<Witness>)> {
    let wv = &config.weights;
    let mut values = Vec::new();
    for sigma in Permutation::all(wv.len()) {
        let theorem2 = ev.theorem2_value(wv, &sigma, m, config.x, q)?;
        let theorem3 = ev.theorem3_value(wv, &sigma, m, config.x, q)?;
        values.push(SigmaValue { sigma, theorem2, theorem3 });
    }

    let mut witnesses = Vec::new();
    let reference = &values[0];
    let witness = |kind, a: &SigmaValue, b: &SigmaValue, va: &Rational, vb: &Rational| Witness {
        kind,
        m,
        q: q.value().clone(),
        sigma_a: a.sigma.clone(),
        sigma_b: b.sigma.clone(),
        value_a: va.clone(),
        value_b: vb.clone(),
    };
    let t2_break = values.iter().find(|v| v.theorem2 != reference.theorem2);
    if let Some(v) = t2_break {
        witnesses.push(witness(WitnessKind::Theorem2Invariance, reference, v, &reference.theorem2, &v.theorem2));
    }
    let t3_break = values.iter().find(|v| v.theorem3 != reference.theorem3);
    if let Some(v) = t3_break {
        witnesses.push(witness(WitnessKind::Theorem3Invariance, reference, v, &reference.theorem3, &v.theorem3));
    }
    let route_break = values.iter().find(|v| v.theorem2 != v.theorem3);
    if let Some(v) = route_break {
        witnesses.push(witness(WitnessKind::RouteEquality, v, v, &v.theorem2, &v.theorem3));
    }

    let (theorem2_invariant, theorem3_invariant, routes_agree) =
        (t2_break.is_none(), t3_break.is_none(), route_break.is_none());
    let cell = Cell { m, q: q.value().clone(), values, theorem2_invariant, theorem3_invariant, routes_agree };
    Ok((cell, witnesses))
}

fn verify_with(ev: &Evaluator<'_>, config: &InvarianceConfig) -> Result<SymmetryReport> {
    let mut certificates = Vec::new();
    let mut grid: Vec<(usize, QSample)> = Vec::new();
    for m in 0..=config.m_max {
        let count = match config.mode {
            Mode::Sampled => config.q_count,
            Mode::Certified => {
                let degree_bound = certify_bound(&config.weights, m, config.x);
                let samples = degree_bound as usize + 1;
                certificates.push(Certificate { m, degree_bound, samples });
                samples
            }
        };
        grid.extend(sample_points(count, &[], config.seed).into_iter().map(|q| (m, q)));
    }
    check_budget(config, grid.len())?;

    let evaluated: Vec<(Cell, Vec<Witness>)> = grid
        .par_iter()
        .map(|(m, q)| evaluate_cell(ev, config, *m, q))
        .collect::<Result<_>>()?;

    let mut cells = Vec::with_capacity(evaluated.len());
    let mut witnesses = Vec::new();
    for (cell, w) in evaluated {
        cells.push(cell);
        witnesses.extend(w);
    }
    let verdicts = Verdicts {
        theorem2_invariance: cells.iter().all(|c| c.theorem2_invariant),
        theorem3_invariance: cells.iter().all(|c| c.theorem3_invariant),
        route_equality: cells.iter().all(|c| c.routes_agree),
    };
    Ok(SymmetryReport {
        weights: config.weights.clone(),
        m_max: config.m_max,
        x: config.x,
        mode: config.mode,
        seed: config.seed,
        certificates,
        cells,
        verdicts,
        witnesses,
    })
}

pub fn verify_invariance(config: &InvarianceConfig, cache: &QEulerCache) -> Result<SymmetryReport> {
    Evaluator::new(cache).verify_invariance(config)
}

/// `E_{m,q}(w_1 x) / [2]_q`, what both theorems collapse to for `n = 1`.
pub fn single_weight_value(w: u64, m: usize, x: u64, q: &QSample, cache: &QEulerCache) -> Rational {
    let numbers = cache.prefix(m, 1, q);
    poly_from_numbers(&numbers, (w * x) as i64, 1, q) / (Rational::one() + q.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcalc::{integer, rational};

    // Term-by-term sums, kept as the reference for the polynomial evaluators.
    fn direct_theorem2(wv: &WeightVector, sigma: &Permutation, m: usize, x: u64, q: &QSample) -> Rational {
        let Split { prefix, last, w_prod } = split(wv, sigma).unwrap();
        let cof = cofactors(&prefix);
        let numbers = QEulerCache::new().prefix(m, w_prod, q);
        let mut sum = Rational::zero();
        for_each_index(&prefix, |k| {
            let s: u64 = cof.iter().zip(k).map(|(c, k)| c * k).sum();
            let exponent = (last * x * w_prod + last * s) as i64;
            let term = q.pow((last * s) as i64) * poly_from_numbers(&numbers, exponent, w_prod, q);
            if k.iter().sum::<u64>() % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
        });
        Pow::pow(q.bracket_exp(w_prod as i64, 1), m) / q.two_bracket(w_prod) * sum
    }

    fn direct_t_hat(m: usize, l: usize, prefix: &[u64], q_eff: &QSample) -> Rational {
        let cof = cofactors(prefix);
        let mut sum = Rational::zero();
        for_each_index(prefix, |k| {
            let s: u64 = cof.iter().zip(k).map(|(c, k)| c * k).sum();
            let bracket = if s == 0 { Rational::zero() } else { q_eff.bracket_exp(s as i64, 1) };
            let term = q_eff.pow((l as i64 + 1) * s as i64) * Pow::pow(bracket, m - l);
            if k.iter().sum::<u64>() % 2 == 1 {
                sum -= term;
            } else {
                sum += term;
            }
        });
        sum
    }

    #[test]
    fn polynomial_form_matches_direct_sums() {
        let cache = QEulerCache::new();
        let weights = wv(&[3, 1, 5]);
        for sigma in Permutation::all(3) {
            for (m, x, q) in [(0, 0, q(2, 1)), (2, 1, q(3, 2)), (3, 0, q(-5, 3)), (4, 2, q(7, 3))] {
                assert_eq!(
                    theorem2_value(&weights, &sigma, m, x, &q, &cache).unwrap(),
                    direct_theorem2(&weights, &sigma, m, x, &q)
                );
            }
        }
        for m in 0..5 {
            for l in 0..=m {
                let q_eff = q(5, 2);
                assert_eq!(t_hat(m, l, &[3, 5], &q_eff).unwrap(), direct_t_hat(m, l, &[3, 5], &q_eff));
            }
        }
    }

    fn wv(w: &[u64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    fn q(n: i64, d: i64) -> QSample {
        QSample::from_ratio(n, d).unwrap()
    }

    #[test]
    fn weight_validation() {
        assert!(matches!(WeightVector::new(vec![]), Err(Error::EmptyWeights)));
        assert!(matches!(WeightVector::new(vec![1, 4]), Err(Error::EvenWeight(4))));
        assert!(matches!(WeightVector::new(vec![0]), Err(Error::EvenWeight(0))));
    }

    #[test]
    fn permutations() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], Permutation::identity(3));
        assert_eq!(all[1].images(), vec![1, 3, 2]);
        assert!(Permutation::from_images(vec![1, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 1]).is_err());
        let swap = Permutation::from_images(vec![2, 1]).unwrap();
        assert_eq!(swap.apply(&wv(&[1, 3])), vec![3, 1]);
        assert_eq!(Permutation::all(0).len(), 1);
    }

    #[test]
    fn odometer_order() {
        let mut seen = Vec::new();
        for_each_index(&[2, 3], |k| seen.push(k.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[1], vec![1, 0]);
        assert_eq!(seen[2], vec![0, 1]);
        let mut empty = 0;
        for_each_index(&[], |k| {
            assert!(k.is_empty());
            empty += 1;
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn cofactor_products() {
        assert_eq!(cofactors(&[3, 5, 7]), vec![35, 21, 15]);
        assert_eq!(cofactors(&[3]), vec![1]);
        assert!(cofactors(&[]).is_empty());
    }

    #[test]
    fn t_hat_examples() {
        let q2 = q(2, 1);
        for m in 0..4 {
            let expected = if m == 0 { 1 } else { 0 };
            assert_eq!(t_hat(m, 0, &[1], &q2).unwrap(), integer(expected));
            assert_eq!(t_hat(m, m, &[1], &q2).unwrap(), integer(1));
        }
        assert_eq!(t_hat(0, 0, &[3], &q2).unwrap(), integer(3));
        assert_eq!(t_hat(1, 0, &[3], &q2).unwrap(), integer(10));
        assert_eq!(t_hat(2, 2, &[], &q2).unwrap(), integer(1));
        assert_eq!(t_hat(2, 1, &[], &q2).unwrap(), integer(0));
        assert!(t_hat(1, 2, &[3], &q2).is_err());
    }

    #[test]
    fn two_weight_hand_example() {
        let cache = QEulerCache::new();
        let w = wv(&[1, 3]);
        let q2 = q(2, 1);
        for sigma in Permutation::all(2) {
            assert_eq!(theorem2_value(&w, &sigma, 0, 0, &q2, &cache).unwrap(), rational(1, 3));
            assert_eq!(theorem3_value(&w, &sigma, 0, 0, &q2, &cache).unwrap(), rational(1, 3));
        }
    }

    #[test]
    fn single_weight_collapse() {
        let cache = QEulerCache::new();
        let sigma = Permutation::identity(1);
        for (w, m, x) in [(1, 0, 0), (3, 2, 1), (5, 4, 2), (7, 3, 0)] {
            let qs = q(5, 2);
            let expected = single_weight_value(w, m, x, &qs, &cache);
            assert_eq!(theorem2_value(&wv(&[w]), &sigma, m, x, &qs, &cache).unwrap(), expected);
            assert_eq!(theorem3_value(&wv(&[w]), &sigma, m, x, &qs, &cache).unwrap(), expected);
        }
    }

    #[test]
    fn three_weights_agree() {
        let cache = QEulerCache::new();
        let w = wv(&[1, 3, 5]);
        let qs = q(3, 2);
        let values: BTreeSet<Rational> = Permutation::all(3)
            .iter()
            .flat_map(|s| {
                [
                    theorem2_value(&w, s, 2, 1, &qs, &cache).unwrap(),
                    theorem3_value(&w, s, 2, 1, &qs, &cache).unwrap(),
                ]
            })
            .collect();
        assert_eq!(values.len(), 1);
    }

    #[test]
    fn mismatched_permutation_is_rejected() {
        let cache = QEulerCache::new();
        let err = theorem2_value(&wv(&[1, 3]), &Permutation::identity(3), 0, 0, &q(2, 1), &cache);
        assert!(err.is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let cache = QEulerCache::new();
        let mut config = InvarianceConfig::sampled(wv(&[3, 5, 7]), 2, 0, 4);
        config.budget = 100;
        assert!(matches!(verify_invariance(&config, &cache), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn mutation_produces_witness() {
        let cache = QEulerCache::new();
        let config = InvarianceConfig::sampled(wv(&[1, 3]), 1, 0, 2);
        let report = Evaluator::new(&cache)
            .with_mutation(Mutation::THatSignFlip)
            .verify_invariance(&config)
            .unwrap();
        assert!(!report.passed());
        assert!(!report.witnesses.is_empty());
        let clean = verify_invariance(&config, &cache).unwrap();
        assert!(clean.passed());
        assert!(clean.witnesses.is_empty());
    }
}
