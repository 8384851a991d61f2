mod common;

use common::{config, dist, weights};
use maxent_core::{Axis, Distribution, Event, JointDistribution, SampleSpace};
use num_rational::Ratio;
use proptest::prelude::*;

#[test]
fn condition_matches_rational_oracle() {
    let s = SampleSpace::numbered(3).unwrap();
    let d = Distribution::<f64>::new(&s, vec![0.1, 0.2, 0.7]).unwrap();
    let e = Event::from_labels(&s, &["2", "3"]).unwrap();
    let got = d.condition(&e).unwrap();

    let exact: Vec<Ratio<i64>> = vec![Ratio::new(1, 10), Ratio::new(2, 10), Ratio::new(7, 10)];
    let mass: Ratio<i64> = exact[1] + exact[2];
    let oracle: Vec<Ratio<i64>> = exact
        .iter()
        .enumerate()
        .map(|(i, &w)| if e.contains(i) { w / mass } else { Ratio::from_integer(0) })
        .collect();
    assert_eq!(oracle, vec![Ratio::from_integer(0), Ratio::new(2, 9), Ratio::new(7, 9)]);
    for (g, o) in got.weights().iter().zip(&oracle) {
        let o = *o.numer() as f64 / *o.denom() as f64;
        assert!((g - o).abs() < 1e-15, "{g} vs {o}");
    }
}

fn assert_simplex(d: &Distribution<f64>) {
    assert!(d.weights().iter().all(|&w| w >= 0.0));
    assert!((d.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn conditioning_stays_on_simplex_and_is_idempotent(raw in weights(10), mask in prop::collection::vec(any::<bool>(), 10)) {
        let d = dist(&raw);
        assert_simplex(&d);
        let e = Event::from_mask(d.space(), mask[..d.len()].to_vec()).unwrap();
        prop_assume!(d.prob(&e).unwrap() > 1e-9);
        let once = d.condition(&e).unwrap();
        assert_simplex(&once);
        let twice = once.condition(&e).unwrap();
        prop_assert!(once.max_abs_diff(&twice).unwrap() <= 1e-12);
    }

    #[test]
    fn conditioning_on_everything_is_plain_probability(raw in weights(10), mask in prop::collection::vec(any::<bool>(), 10)) {
        let d = dist(&raw);
        let a = Event::from_mask(d.space(), mask[..d.len()].to_vec()).unwrap();
        let whole = Event::whole(d.space());
        prop_assert!((d.conditional_prob(&a, &whole).unwrap() - d.prob(&a).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn marginals_sum_to_one(rows in 1usize..5, cols in 1usize..5, raw in prop::collection::vec(0.01f64..1.0, 16)) {
        let r = SampleSpace::numbered(rows).unwrap();
        let c = SampleSpace::numbered(cols).unwrap();
        let cells = &raw[..rows * cols];
        let total: f64 = cells.iter().sum();
        let j = JointDistribution::new(&r, &c, cells.iter().map(|w| w / total).collect()).unwrap();
        for axis in [Axis::Row, Axis::Col] {
            let m = j.marginal(axis);
            prop_assert!((m.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }
}
