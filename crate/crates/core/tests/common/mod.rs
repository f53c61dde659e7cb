#![allow(dead_code)]

use nlocal::{build_chain, build_star, build_tree, BlochObservable, MeasurementPlan, NetworkConfig};
use rand::Rng;

/// A random chain, star or tree with at most `max_n` sources.
pub fn random_config(rng: &mut impl Rng, max_n: usize) -> NetworkConfig {
    loop {
        let n = rng.random_range(2..=max_n);
        let config = match rng.random_range(0..3) {
            0 => build_chain(n),
            1 => build_star(n),
            _ => build_tree(n, rng.random_range(2..=n.max(2))),
        };
        if let Ok(config) = config {
            return config;
        }
    }
}

pub fn random_bloch(rng: &mut impl Rng) -> BlochObservable {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if let Ok(b) = BlochObservable::from_direction(v[0], v[1], v[2]) {
            return b;
        }
    }
}

pub fn random_plan(rng: &mut impl Rng, config: &NetworkConfig) -> MeasurementPlan {
    let intermediate = (0..config.l())
        .map(|_| {
            [(0..config.m).map(|_| random_bloch(rng)).collect(), (0..config.m).map(|_| random_bloch(rng)).collect()]
        })
        .collect();
    MeasurementPlan::new(intermediate, random_angles(rng, config.p))
}

pub fn random_angles(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}

pub fn random_bits(rng: &mut impl Rng, k: usize) -> Vec<bool> {
    (0..k).map(|_| rng.random_bool(0.5)).collect()
}
