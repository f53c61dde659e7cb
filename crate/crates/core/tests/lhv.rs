mod common;

use common::random_config;
use nlocal::{
    build_chain, build_star, evaluate_s, lhv_best_s, lhv_distribution, LhvModel, LhvNetwork, LhvSearchOptions,
    NetworkConfig, SettingAssignment,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_model(rng: &mut impl Rng, config: &NetworkConfig, c: usize) -> LhvModel {
    let weights = (0..config.n)
        .map(|_| {
            let raw: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|w| w / total).collect()
        })
        .collect();
    let table = |rng: &mut dyn rand::RngCore, len: usize| (0..len).map(|_| rng.random_range(0..2u8)).collect();
    LhvModel {
        alphabet_size: c,
        source_weights: weights,
        intermediate_tables: (0..config.l()).map(|_| table(rng, 2 * c.pow(config.m as u32))).collect(),
        extremal_tables: (0..config.p).map(|_| table(rng, 2 * c)).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn local_models_respect_the_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config = random_config(&mut rng, 4);
        let c = rng.random_range(1..=3);
        let model = random_model(&mut rng, &config, c);
        let net = LhvNetwork::new(&config, model.clone()).unwrap();
        let r = evaluate_s(&net).unwrap();
        prop_assert!(r.s <= 1.0 + 1e-9, "S = {}", r.s);

        let setting = SettingAssignment::uniform(config.l(), config.p, rng.random_bool(0.5), rng.random_bool(0.5));
        let dist = lhv_distribution(&config, &model, &setting).unwrap();
        prop_assert!((dist.total() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn search_is_reproducible_and_replayable() {
    let config = build_chain(3).unwrap();
    let options = LhvSearchOptions { seed: 11, ..Default::default() };
    let report = lhv_best_s(&config, &options).unwrap();
    assert!(report.certified, "{}", report.best_s);
    assert!(report.best_s >= 1.0 - 1e-3);
    assert_eq!(lhv_best_s(&config, &options).unwrap(), report);
    let replay = evaluate_s(&LhvNetwork::new(&config, report.model).unwrap()).unwrap();
    assert!((replay.s - report.best_s).abs() < 1e-9);
}

#[test]
fn oversized_search_is_refused() {
    let err = lhv_best_s(&build_star(4).unwrap(), &LhvSearchOptions::default()).unwrap_err();
    assert!(matches!(err, nlocal::NetworkError::ResourceLimit { .. }));
    let options = LhvSearchOptions { alphabet_size: 3, ..Default::default() };
    let err = lhv_best_s(&build_chain(2).unwrap(), &options).unwrap_err();
    assert!(matches!(err, nlocal::NetworkError::ResourceLimit { size, .. } if size == 1 << 27));
}
