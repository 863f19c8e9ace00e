use std::collections::BTreeSet;

use qeuler::euler::QEulerCache;
use qeuler::symmetry::{
    certify_bound, single_weight_value, theorem2_value, theorem3_value, verify_invariance, Evaluator,
    InvarianceConfig, Mutation, Permutation, WeightVector, WitnessKind,
};
use qeuler::qcalc::sample_points;
use qeuler::{Error, QSample};

fn wv(w: &[u64]) -> WeightVector {
    WeightVector::new(w.to_vec()).unwrap()
}

#[test]
fn certified_small_grid_passes() {
    let cache = QEulerCache::new();
    for x in 0..=1 {
        let config = InvarianceConfig::certified(wv(&[1, 3]), 2, x);
        let report = verify_invariance(&config, &cache).unwrap();
        assert!(report.passed(), "x={x}");
        assert_eq!(report.certificates.len(), 3);
        for c in &report.certificates {
            assert_eq!(c.samples as u64, c.degree_bound + 1);
            assert_eq!(c.degree_bound, certify_bound(&config.weights, c.m, x));
        }
    }
}

#[test]
fn certified_mode_catches_each_mutation() {
    let cache = QEulerCache::new();
    let config = InvarianceConfig::certified(wv(&[1, 3]), 2, 1);
    for mutation in [Mutation::THatSignFlip, Mutation::Theorem2SignFlip] {
        let report = Evaluator::new(&cache).with_mutation(mutation).verify_invariance(&config).unwrap();
        assert!(!report.passed(), "{mutation:?}");
        assert!(!report.witnesses.is_empty());
        let w = &report.witnesses[0];
        assert_ne!(w.value_a, w.value_b);
    }
}

#[test]
fn mutated_route_is_reported_as_route_failure() {
    let cache = QEulerCache::new();
    let config = InvarianceConfig::sampled(wv(&[3, 5]), 2, 0, 3);
    let report = Evaluator::new(&cache).with_mutation(Mutation::THatSignFlip).verify_invariance(&config).unwrap();
    assert!(report.verdicts.theorem2_invariance);
    assert!(!report.verdicts.route_equality);
    assert!(report.witnesses.iter().any(|w| w.kind == WitnessKind::RouteEquality));
}

#[test]
fn cache_work_is_independent_of_weight_product() {
    let m_max = 4;
    for weights in [vec![1, 3], vec![5, 7], vec![1, 3, 5]] {
        let cache = QEulerCache::new();
        let config = InvarianceConfig::sampled(wv(&weights), m_max, 1, 4);
        assert!(verify_invariance(&config, &cache).unwrap().passed());
        // one base W per distinct prefix product, one entry per index
        let bases: BTreeSet<u64> = Permutation::all(weights.len())
            .iter()
            .map(|s| s.apply(&config.weights)[..weights.len() - 1].iter().product())
            .collect();
        assert!(cache.evaluations() <= (m_max + 1) * bases.len() * 4, "{weights:?}");
    }
}

#[test]
fn all_ones_weights_are_trivially_symmetric() {
    let cache = QEulerCache::new();
    let weights = wv(&[1, 1, 1]);
    let q = QSample::from_ratio(7, 3).unwrap();
    let values: BTreeSet<_> = Permutation::all(3)
        .iter()
        .map(|s| theorem2_value(&weights, s, 3, 2, &q, &cache).unwrap())
        .collect();
    assert_eq!(values.len(), 1);
    let collapse = single_weight_value(1, 3, 2, &q, &cache);
    assert_eq!(values.into_iter().next().unwrap(), collapse);
}

#[test]
fn single_weight_reduces_to_the_polynomial() {
    let cache = QEulerCache::new();
    for q in sample_points(3, &[], None) {
        for m in 0..=4 {
            let id = Permutation::identity(1);
            let expected = single_weight_value(5, m, 1, &q, &cache);
            assert_eq!(theorem2_value(&wv(&[5]), &id, m, 1, &q, &cache).unwrap(), expected);
            assert_eq!(theorem3_value(&wv(&[5]), &id, m, 1, &q, &cache).unwrap(), expected);
        }
    }
}

#[test]
fn invalid_inputs() {
    assert!(matches!(WeightVector::new(vec![2, 4]), Err(Error::EvenWeight(2))));
    assert!(matches!(WeightVector::new(vec![]), Err(Error::EmptyWeights)));
    assert!(Permutation::from_images(vec![1, 1]).is_err());
    let cache = QEulerCache::new();
    let mut config = InvarianceConfig::sampled(wv(&[3, 5, 7]), 2, 0, 8);
    config.budget = 100;
    assert!(matches!(verify_invariance(&config, &cache), Err(Error::BudgetExceeded { .. })));
}
