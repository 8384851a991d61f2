//! Belief updating over finite probability spaces by maximum relative
//! entropy, with the information measures and coherence audits that go with
//! it.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below name the `f64` instantiations used by the scenario format
//! and the CLI.

pub mod axioms;
pub mod coherence;
pub mod comparison;
pub mod constraints;
pub mod demos;
pub mod error;
pub mod info;
mod linalg;
pub mod real;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod space;

pub use constraints::{
    residual, triage_feasibility, Constraint, ConstraintSet, Feasibility, LinearForm,
    PartitionWeights,
};
pub use error::{Error, Infeasibility, Result};
pub use info::{
    conditional_entropy, entropy, joint_entropy, kl_divergence, mutual_information,
    relative_entropy, self_information, InfoValue, Units,
};
pub use real::{Real, ZERO_MASS};
pub use solver::{
    conditionalize, jeffrey_update, maxent_update, solve_dual, solve_dual_from, solve_forms,
    Method, SolverOptions, UpdateReport,
};
pub use space::{Axis, Distribution, Event, JointDistribution, Partition, RandomVariable, SampleSpace};

pub type Distribution64 = Distribution<f64>;
pub type Distribution32 = Distribution<f32>;
pub type JointDistribution64 = JointDistribution<f64>;
pub type RandomVariable64 = RandomVariable<f64>;
pub type Constraint64 = Constraint<f64>;
pub type ConstraintSet64 = ConstraintSet<f64>;
pub type SolverOptions64 = SolverOptions<f64>;
pub type UpdateReport64 = UpdateReport<f64>;
