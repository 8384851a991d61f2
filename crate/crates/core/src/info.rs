//! Entropy, self-information, relative entropy, conditional entropy and
//! mutual information. All values are in nats.
//!
//! [`relative_entropy`] keeps the sign convention `-Σ post·ln(post/prior)`,
//! which is never positive and is the quantity the updater maximizes.
//! [`kl_divergence`] is its negation.

use std::fmt;

use crate::error::{Error, Result};
use crate::real::{xlogx, Real};
use crate::space::{Axis, Distribution, JointDistribution};

/// An amount of information in natural-log units.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct InfoValue<T>(pub T);

impl<T: Real> InfoValue<T> {
    pub fn nats(self) -> T {
        self.0
    }

    pub fn bits(self) -> T {
        self.0 / T::lit(std::f64::consts::LN_2)
    }

    pub fn in_units(self, units: Units) -> T {
        match units {
            Units::Nats => self.nats(),
            Units::Bits => self.bits(),
        }
    }
}

impl<T: Real> fmt::Display for InfoValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nats", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

/// `-ln p`, the information gained on learning an event of probability `p`.
pub fn self_information<T: Real>(p: T) -> Result<InfoValue<T>> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(Error::Domain(format!(
            "self-information needs 0 < p <= 1, got {p}"
        )));
    }
    Ok(InfoValue(-p.ln()))
}

/// Shannon entropy `Σ w·(-ln w)`.
pub fn entropy<T: Real>(d: &Distribution<T>) -> InfoValue<T> {
    entropy_of_weights(d.weights())
}

pub(crate) fn entropy_of_weights<T: Real>(w: &[T]) -> InfoValue<T> {
    InfoValue(-w.iter().map(|&x| xlogx(x)).sum::<T>())
}

/// `H(post, prior) = -Σ post·ln(post/prior)`; at most zero.
pub fn relative_entropy<T: Real>(
    post: &Distribution<T>,
    prior: &Distribution<T>,
) -> Result<InfoValue<T>> {
    post.space().check_same(prior.space())?;
    let mut acc = T::zero();
    for (i, (&p, &q)) in post.weights().iter().zip(prior.weights()).enumerate() {
        if p > T::zero() {
            if q <= T::zero() {
                return Err(Error::SupportViolation { index: i });
            }
            acc -= p * (p / q).ln();
        }
    }
    Ok(InfoValue(acc))
}

/// `KL(post || prior) = -H(post, prior)`; never negative.
pub fn kl_divergence<T: Real>(
    post: &Distribution<T>,
    prior: &Distribution<T>,
) -> Result<InfoValue<T>> {
    relative_entropy(post, prior).map(|h| InfoValue(-h.0))
}

/// `H(W | B) = Σ prob(w,b)·ln(1 / prob(w|b))`, with `W` the row space.
pub fn conditional_entropy<T: Real>(j: &JointDistribution<T>) -> InfoValue<T> {
    let col_marginal = j.marginal(Axis::Col);
    let (nr, nc) = (j.row_space().len(), j.col_space().len());
    let mut acc = T::zero();
    for c in 0..nc {
        let pb = col_marginal.weight(c);
        if pb <= T::zero() {
            continue;
        }
        for r in 0..nr {
            let pwb = j.get(r, c);
            if pwb > T::zero() {
                acc += pwb * (pb / pwb).ln();
            }
        }
    }
    InfoValue(acc)
}

/// `I(W; B) = H(W) - H(W | B)`.
pub fn mutual_information<T: Real>(j: &JointDistribution<T>) -> InfoValue<T> {
    InfoValue(entropy(&j.marginal(Axis::Row)).0 - conditional_entropy(j).0)
}

/// Entropy of the joint viewed as one distribution over all cells.
pub fn joint_entropy<T: Real>(j: &JointDistribution<T>) -> InfoValue<T> {
    entropy_of_weights(j.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SampleSpace;

    const LN2: f64 = std::f64::consts::LN_2;

    fn two() -> SampleSpace {
        SampleSpace::new(["a", "b"]).unwrap()
    }

    #[test]
    fn self_information_examples() {
        assert_eq!(self_information(1.0f64).unwrap().nats(), 0.0);
        assert!((self_information(0.5f64).unwrap().nats() - LN2).abs() < 1e-15);
        let quarter = self_information(0.25f64).unwrap().nats();
        assert!((quarter - 2.0 * self_information(0.5f64).unwrap().nats()).abs() < 1e-15);
        assert!(self_information(0.0).is_err());
        assert!(self_information(1.5).is_err());
        assert!(self_information(-0.1).is_err());
        assert!(self_information(f64::NAN).is_err());
    }

    #[test]
    fn bits_rescale() {
        assert!((self_information(0.25f64).unwrap().bits() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        let s = SampleSpace::numbered(3).unwrap();
        let pm = Distribution::<f64>::point_mass(&s, 1).unwrap();
        assert_eq!(entropy(&pm).nats(), 0.0);
        let u = Distribution::<f64>::uniform(&s);
        assert!((entropy(&u).nats() - 3f64.ln()).abs() < 1e-15);
        let d = Distribution::<f64>::new(&s, vec![0.5, 0.25, 0.25]).unwrap();
        // 0.5 ln 2 + 2 * 0.25 ln 4 = 1.5 ln 2
        assert!((entropy(&d).nats() - 1.039720770839918).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let s = two();
        let half = Distribution::<f64>::new(&s, vec![0.5, 0.5]).unwrap();
        assert_eq!(relative_entropy(&half, &half).unwrap().nats(), 0.0);
        let corner = Distribution::<f64>::new(&s, vec![1.0, 0.0]).unwrap();
        assert!((relative_entropy(&corner, &half).unwrap().nats() + LN2).abs() < 1e-15);
        let d = Distribution::<f64>::new(&s, vec![0.8, 0.2]).unwrap();
        let h = relative_entropy(&d, &half).unwrap().nats();
        assert!((h + 0.19274475702175753).abs() < 1e-12, "{h}");
        assert!((kl_divergence(&d, &half).unwrap().nats() - 0.19274475702175753).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_support_violation() {
        let s = two();
        let half = Distribution::<f64>::new(&s, vec![0.5, 0.5]).unwrap();
        let corner = Distribution::<f64>::new(&s, vec![1.0, 0.0]).unwrap();
        assert_eq!(
            relative_entropy(&half, &corner).unwrap_err(),
            Error::SupportViolation { index: 1 }
        );
    }

    #[test]
    fn conditional_entropy_examples() {
        let w = two();
        let b = SampleSpace::new(["x", "y"]).unwrap();
        let perm = JointDistribution::<f64>::from_rows(&w, &b, &[vec![0.0, 0.3], vec![0.7, 0.0]]).unwrap();
        assert_eq!(conditional_entropy(&perm).nats(), 0.0);

        let p = Distribution::<f64>::new(&w, vec![0.3, 0.7]).unwrap();
        let q = Distribution::<f64>::new(&b, vec![0.6, 0.4]).unwrap();
        let ind = JointDistribution::product(&p, &q);
        assert!((conditional_entropy(&ind).nats() - entropy(&p).nats()).abs() < 1e-12);

        let j = JointDistribution::<f64>::from_rows(&w, &b, &[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        assert!((conditional_entropy(&j).nats() - 0.5004024235381879).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_examples() {
        let w = two();
        let b = SampleSpace::new(["x", "y"]).unwrap();
        let p = Distribution::<f64>::new(&w, vec![0.3, 0.7]).unwrap();
        let q = Distribution::<f64>::new(&b, vec![0.6, 0.4]).unwrap();
        assert!(mutual_information(&JointDistribution::product(&p, &q)).nats().abs() < 1e-12);

        let u = Distribution::<f64>::uniform(&w);
        let id = JointDistribution::identity_coupling(&u);
        assert!((mutual_information(&id).nats() - LN2).abs() < 1e-12);

        let j = JointDistribution::<f64>::from_rows(&w, &b, &[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let mi = mutual_information(&j).nats();
        assert!((mi - 0.19274475702175753).abs() < 1e-12);
        let d = Distribution::<f64>::new(&w, vec![0.8, 0.2]).unwrap();
        assert!((mi + relative_entropy(&d, &u).unwrap().nats()).abs() < 1e-12);
    }
}
