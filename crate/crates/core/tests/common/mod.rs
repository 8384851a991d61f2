#![allow(dead_code)]

use maxent_core::{Distribution, Event, SampleSpace};
use proptest::prelude::*;
use proptest::test_runner::Config;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weights on the simplex; `zeros` allows exact zeros.
pub fn simplex(rng: &mut impl Rng, n: usize, zeros: bool) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| {
                if zeros && rng.gen_bool(0.2) {
                    0.0
                } else {
                    rng.gen_range(0.01..1.0)
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return raw.iter().map(|w| w / total).collect();
        }
    }
}

pub fn random_distribution(rng: &mut impl Rng, n: usize, zeros: bool) -> Distribution<f64> {
    let s = SampleSpace::numbered(n).unwrap();
    Distribution::normalized(&s, simplex(rng, n, zeros)).unwrap()
}

pub fn random_event(rng: &mut impl Rng, s: &SampleSpace) -> Event {
    Event::from_predicate(s, |_, _| rng.gen_bool(0.5))
}

/// Strategy for raw positive weight vectors of length 2..=max_n.
pub fn weights(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 2..=max_n).prop_filter("nonzero mass", |w| {
        w.iter().sum::<f64>() > 1e-3
    })
}

pub fn dist(raw: &[f64]) -> Distribution<f64> {
    let s = SampleSpace::numbered(raw.len()).unwrap();
    Distribution::normalized(&s, raw.to_vec()).unwrap()
}
