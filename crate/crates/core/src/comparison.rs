//! Certainty-factor style updating versus Jeffrey updating.
//!
//! With evidence `E` held at certainty `q`, Jeffrey's rule gives
//! `P(H) = P(H|E)·q + P(H|¬E)·(1-q)`, while multiplying certainty factors
//! gives `P(H|E)·q`. The two differ by exactly `P(H|¬E)·(1-q)`, which
//! shrinks to zero as the evidence becomes certain.
//!
//! Certainty factors here live on the `[0, 1]` probability scale.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::solver::{jeffrey_update, UpdateReport};
use crate::space::{Distribution, Event, Partition, SampleSpace};
use crate::constraints::PartitionWeights;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceScenario<T> {
    pub p_h_given_e: T,
    pub p_h_given_not_e: T,
    /// Posterior certainty of the evidence.
    pub q: T,
}

fn unit<T: Real>(name: &str, v: T) -> Result<()> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")))
    }
}

impl<T: Real> EvidenceScenario<T> {
    pub fn new(p_h_given_e: T, p_h_given_not_e: T, q: T) -> Result<Self> {
        unit("p_h_given_e", p_h_given_e)?;
        unit("p_h_given_not_e", p_h_given_not_e)?;
        unit("q", q)?;
        Ok(EvidenceScenario {
            p_h_given_e,
            p_h_given_not_e,
            q,
        })
    }
}

pub fn jeffrey_posterior<T: Real>(sc: &EvidenceScenario<T>) -> T {
    sc.p_h_given_e * sc.q + sc.p_h_given_not_e * (T::one() - sc.q)
}

pub fn cf_approx_posterior<T: Real>(sc: &EvidenceScenario<T>) -> T {
    sc.p_h_given_e * sc.q
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergencePoint<T> {
    pub q: T,
    pub jeffrey: T,
    pub cf: T,
    pub divergence: T,
}

/// Both posteriors and `|jeffrey - cf|` at each `q` in `q_grid`.
pub fn divergence_curve<T: Real>(
    p_h_given_e: T,
    p_h_given_not_e: T,
    q_grid: &[T],
) -> Result<Vec<DivergencePoint<T>>> {
    q_grid
        .iter()
        .map(|&q| {
            let sc = EvidenceScenario::new(p_h_given_e, p_h_given_not_e, q)?;
            let jeffrey = jeffrey_posterior(&sc);
            let cf = cf_approx_posterior(&sc);
            Ok(DivergencePoint {
                q,
                jeffrey,
                cf,
                divergence: (jeffrey - cf).abs(),
            })
        })
        .collect()
}

/// `steps` evenly spaced points from 0 to 1 inclusive; `steps >= 2`.
pub fn uniform_grid<T: Real>(steps: usize) -> Result<Vec<T>> {
    if steps < 2 {
        return Err(Error::Domain(format!("grid needs at least 2 points, got {steps}")));
    }
    let last = steps - 1;
    Ok((0..steps)
        .map(|k| if k == last { T::one() } else { T::lit(k as f64 / last as f64) })
        .collect())
}

/// The scenario as a distribution update on the four outcomes
/// `H&E, ~H&E, H&~E, ~H&~E`: a prior with the scenario's conditionals
/// (evidence mass `prior_e`) is moved onto `P(E) = q` by Jeffrey's rule.
/// The posterior probability of `H` equals [`jeffrey_posterior`].
pub fn four_outcome_update<T: Real>(
    sc: &EvidenceScenario<T>,
    prior_e: T,
) -> Result<(UpdateReport<T>, Event)> {
    if !(prior_e > T::zero() && prior_e < T::one()) {
        return Err(Error::Domain(format!("prior P(E) must lie in (0, 1), got {prior_e}")));
    }
    let space = SampleSpace::new(["H&E", "~H&E", "H&~E", "~H&~E"])?;
    let one = T::one();
    let prior = Distribution::new(
        &space,
        vec![
            sc.p_h_given_e * prior_e,
            (one - sc.p_h_given_e) * prior_e,
            sc.p_h_given_not_e * (one - prior_e),
            (one - sc.p_h_given_not_e) * (one - prior_e),
        ],
    )?;
    let e = Event::from_labels(&space, &["H&E", "~H&E"])?;
    let h = Event::from_labels(&space, &["H&E", "H&~E"])?;
    let m = PartitionWeights::new(Partition::binary(&e)?, vec![sc.q, one - sc.q])?;
    Ok((jeffrey_update(&prior, &m)?, h))
}
