use thiserror::Error;

/// Reason a constraint set was judged inconsistent with the prior.
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    /// A probability target lies outside `[0, 1]`, or partition weights are
    /// negative or fail to sum to one.
    ValueOutOfRange { constraint: usize, value: f64 },
    /// An expectation target lies outside the range of the variable over the
    /// prior's support.
    ExpectationOutsideSupport {
        constraint: usize,
        target: f64,
        min: f64,
        max: f64,
    },
    /// Positive probability demanded for an event the prior rules out.
    EventWithoutPriorMass { constraint: usize, value: f64 },
    /// Positive weight demanded for a partition cell the prior rules out.
    DeadCell {
        constraint: usize,
        cell: usize,
        weight: f64,
    },
    /// The dual multipliers diverged while the residual stopped improving.
    DivergentMultipliers { max_multiplier: f64, residual: f64 },
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Infeasibility::ValueOutOfRange { constraint, value } => write!(
                f,
                "range: constraint {constraint} has probability value {value} outside [0, 1]"
            ),
            Infeasibility::ExpectationOutsideSupport {
                constraint,
                target,
                min,
                max,
            } => write!(
                f,
                "support range: constraint {constraint} expects {target}, but the variable spans [{min}, {max}] on the prior's support"
            ),
            Infeasibility::EventWithoutPriorMass { constraint, value } => write!(
                f,
                "dead event: constraint {constraint} asks probability {value} for an event with zero prior mass"
            ),
            Infeasibility::DeadCell {
                constraint,
                cell,
                weight,
            } => write!(
                f,
                "dead cell: constraint {constraint} assigns weight {weight} to cell {cell}, which has zero prior mass"
            ),
            Infeasibility::DivergentMultipliers {
                max_multiplier,
                residual,
            } => write!(
                f,
                "divergent multipliers: |lambda|max = {max_multiplier:e} while the residual stalled at {residual:e}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample space must contain at least one outcome")]
    EmptySpace,
    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),
    #[error("outcome index {index} out of range for a space of {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("value at position {index} is not finite")]
    NonFinite { index: usize },
    #[error("negative weight {value} at position {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("operands live on different sample spaces")]
    SpaceMismatch,
    #[error("partition cell {0} is empty")]
    EmptyCell(usize),
    #[error("outcome `{0}` belongs to more than one partition cell")]
    PartitionOverlap(String),
    #[error("outcome `{0}` is not covered by any partition cell")]
    PartitionNotExhaustive(String),
    #[error("event has probability {mass}, at or below the zero-mass threshold")]
    ZeroMassEvent { mass: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("posterior puts mass on outcome {index} where the prior has none")]
    SupportViolation { index: usize },
    #[error("infeasible constraints: {0}")]
    Infeasible(Infeasibility),
    #[error("solver stopped after {iterations} iterations with residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("conditional constraint {constraint} is satisfied only by giving its condition zero mass")]
    DegenerateConditional { constraint: usize },
    #[error("cell info {cell_info}: {reason}")]
    InvalidCellInfo { cell_info: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
