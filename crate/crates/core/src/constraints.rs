//! Declarative equality constraints on a posterior and their compilation to
//! linear forms `coeffs · p = target`.

use crate::error::{Error, Infeasibility, Result};
use crate::linalg::dot;
use crate::real::{Real, ZERO_MASS};
use crate::space::{Distribution, Event, Partition, RandomVariable, SampleSpace};

/// Prescribed probabilities for the cells of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionWeights<T> {
    pub partition: Partition,
    pub weights: Vec<T>,
}

impl<T: Real> PartitionWeights<T> {
    /// Checks only that there is one finite weight per cell; range and
    /// normalization are judged by [`triage_feasibility`].
    pub fn new(partition: Partition, weights: Vec<T>) -> Result<Self> {
        if weights.len() != partition.len() {
            return Err(Error::LengthMismatch {
                expected: partition.len(),
                actual: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(PartitionWeights { partition, weights })
    }

    pub fn space(&self) -> &SampleSpace {
        self.partition.space()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint<T> {
    /// `P(event) = value`
    EventProb { event: Event, value: T },
    /// `E[variable] = value`
    Expectation {
        variable: RandomVariable<T>,
        value: T,
    },
    /// `P(event | given) = value`
    CondProb {
        event: Event,
        given: Event,
        value: T,
    },
    /// `P(cell_i) = weights_i` for every cell.
    PartitionWeights(PartitionWeights<T>),
}

impl<T: Real> Constraint<T> {
    pub fn event_prob(event: Event, value: T) -> Self {
        Constraint::EventProb { event, value }
    }

    pub fn expectation(variable: RandomVariable<T>, value: T) -> Self {
        Constraint::Expectation { variable, value }
    }

    pub fn cond_prob(event: Event, given: Event, value: T) -> Self {
        Constraint::CondProb {
            event,
            given,
            value,
        }
    }

    pub fn partition(partition: Partition, weights: Vec<T>) -> Result<Self> {
        PartitionWeights::new(partition, weights).map(Constraint::PartitionWeights)
    }

    fn check_space(&self, s: &SampleSpace) -> Result<()> {
        let ok = match self {
            Constraint::EventProb { event, .. } => event.space() == s,
            Constraint::Expectation { variable, .. } => variable.space() == s,
            Constraint::CondProb { event, given, .. } => event.space() == s && given.space() == s,
            Constraint::PartitionWeights(m) => m.space() == s,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Compiles to one or more linear forms over `s`.
    pub fn compile(&self, s: &SampleSpace) -> Result<Vec<LinearForm<T>>> {
        self.check_space(s)?;
        Ok(match self {
            Constraint::EventProb { event, value } => vec![LinearForm {
                coeffs: event.indicator(),
                target: *value,
            }],
            Constraint::Expectation { variable, value } => vec![LinearForm {
                coeffs: variable.values().to_vec(),
                target: *value,
            }],
            Constraint::CondProb {
                event,
                given,
                value,
            } => {
                let coeffs = (0..s.len())
                    .map(|i| {
                        let b = if given.contains(i) { T::one() } else { T::zero() };
                        let ab = if event.contains(i) { b } else { T::zero() };
                        ab - *value * b
                    })
                    .collect();
                vec![LinearForm {
                    coeffs,
                    target: T::zero(),
                }]
            }
            Constraint::PartitionWeights(m) => m
                .partition
                .cells()
                .iter()
                .zip(&m.weights)
                .map(|(cell, &w)| LinearForm {
                    coeffs: cell.indicator(),
                    target: w,
                })
                .collect(),
        })
    }
}

/// `Σ coeffs_i · p_i = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm<T> {
    pub coeffs: Vec<T>,
    pub target: T,
}

impl<T: Real> LinearForm<T> {
    pub fn eval(&self, p: &[T]) -> T {
        dot(&self.coeffs, p)
    }

    pub fn violation(&self, p: &[T]) -> T {
        (self.eval(p) - self.target).abs()
    }

    /// Reads this form as a statement about the distribution conditioned on
    /// `cell`: `Σ_{i∈cell} a_i p_i / P(cell) = t` becomes
    /// `Σ_i (a_i - t)·1_cell(i)·p_i = 0`.
    pub fn relativize(&self, cell: &Event) -> LinearForm<T> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(cell.mask())
            .map(|(&a, &m)| if m { a - self.target } else { T::zero() })
            .collect();
        LinearForm {
            coeffs,
            target: T::zero(),
        }
    }
}

/// An ordered list of constraints on one sample space.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet<T> {
    space: SampleSpace,
    constraints: Vec<Constraint<T>>,
}

impl<T: Real> ConstraintSet<T> {
    pub fn new(space: &SampleSpace, constraints: Vec<Constraint<T>>) -> Result<Self> {
        for c in &constraints {
            c.check_space(space)?;
        }
        Ok(ConstraintSet {
            space: space.clone(),
            constraints,
        })
    }

    pub fn empty(space: &SampleSpace) -> Self {
        ConstraintSet {
            space: space.clone(),
            constraints: Vec::new(),
        }
    }

    pub fn single(c: Constraint<T>, space: &SampleSpace) -> Result<Self> {
        Self::new(space, vec![c])
    }

    pub fn push(&mut self, c: Constraint<T>) -> Result<()> {
        c.check_space(&self.space)?;
        self.constraints.push(c);
        Ok(())
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// All linear forms, in constraint order.
    pub fn compile(&self) -> Result<Vec<LinearForm<T>>> {
        let mut out = Vec::new();
        for c in &self.constraints {
            out.extend(c.compile(&self.space)?);
        }
        Ok(out)
    }
}

/// Largest absolute violation over the compiled forms of `cs`.
pub fn residual<T: Real>(d: &Distribution<T>, cs: &ConstraintSet<T>) -> Result<T> {
    d.space().check_same(cs.space())?;
    Ok(forms_residual(d.weights(), &cs.compile()?))
}

pub(crate) fn forms_residual<T: Real>(p: &[T], forms: &[LinearForm<T>]) -> T {
    forms
        .iter()
        .map(|f| f.violation(p))
        .fold(T::zero(), T::max)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// No cheap certificate of inconsistency; the solver decides.
    FeasibleUnknown,
    Infeasible(Infeasibility),
}

impl Feasibility {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Feasibility::Infeasible(_))
    }
}

/// Values within [`Real::SIMPLEX_SLACK`] of `[0, 1]` count as in range, so
/// probabilities read off a distribution never fail on rounding.
fn out_of_unit<T: Real>(v: T) -> bool {
    let slack = T::lit(T::SIMPLEX_SLACK);
    !(v >= -slack && v <= T::one() + slack)
}

fn support_range<T: Real>(prior: &Distribution<T>, variable: &RandomVariable<T>) -> (T, T) {
    prior
        .weights()
        .iter()
        .zip(variable.values())
        .filter(|(&w, _)| w > T::zero())
        .map(|(_, &v)| v)
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Looks for a cheap certificate that no distribution supported inside the
/// prior's support can satisfy `cs`. Never reports a satisfiable set as
/// infeasible.
pub fn triage_feasibility<T: Real>(prior: &Distribution<T>, cs: &ConstraintSet<T>) -> Result<Feasibility> {
    prior.space().check_same(cs.space())?;
    let dead = T::lit(ZERO_MASS);
    for (k, c) in cs.constraints().iter().enumerate() {
        let verdict = match c {
            Constraint::EventProb { event, value } => {
                if out_of_unit(*value) {
                    Some(Infeasibility::ValueOutOfRange {
                        constraint: k,
                        value: value.as_f64(),
                    })
                } else if *value > T::zero() && prior.prob(event)? <= dead {
                    Some(Infeasibility::EventWithoutPriorMass {
                        constraint: k,
                        value: value.as_f64(),
                    })
                } else {
                    None
                }
            }
            Constraint::CondProb { value, .. } => out_of_unit(*value).then(|| {
                Infeasibility::ValueOutOfRange {
                    constraint: k,
                    value: value.as_f64(),
                }
            }),
            Constraint::Expectation { variable, value } => {
                let (min, max) = support_range(prior, variable);
                let slack = T::lit(T::SIMPLEX_SLACK) * T::one().max(min.abs()).max(max.abs());
                (!(*value >= min - slack && *value <= max + slack)).then(|| Infeasibility::ExpectationOutsideSupport {
                    constraint: k,
                    target: value.as_f64(),
                    min: min.as_f64(),
                    max: max.as_f64(),
                })
            }
            Constraint::PartitionWeights(m) => partition_certificate(prior, m, k)?,
        };
        if let Some(reason) = verdict {
            return Ok(Feasibility::Infeasible(reason));
        }
    }
    Ok(Feasibility::FeasibleUnknown)
}

/// Pulls values that passed triage within rounding slack exactly into
/// range: probabilities into `[0, 1]`, expectations into the variable's
/// range over the prior's support.
pub(crate) fn clamp_to_range<T: Real>(prior: &Distribution<T>, cs: &ConstraintSet<T>) -> ConstraintSet<T> {
    let unit = |v: T| v.max(T::zero()).min(T::one());
    let constraints = cs
        .constraints()
        .iter()
        .map(|c| match c {
            Constraint::EventProb { event, value } => Constraint::EventProb {
                event: event.clone(),
                value: unit(*value),
            },
            Constraint::CondProb { event, given, value } => Constraint::CondProb {
                event: event.clone(),
                given: given.clone(),
                value: unit(*value),
            },
            Constraint::Expectation { variable, value } => {
                let (min, max) = support_range(prior, variable);
                Constraint::Expectation {
                    variable: variable.clone(),
                    value: value.max(min).min(max),
                }
            }
            Constraint::PartitionWeights(m) => Constraint::PartitionWeights(PartitionWeights {
                partition: m.partition.clone(),
                weights: m.weights.iter().map(|&w| unit(w)).collect(),
            }),
        })
        .collect();
    ConstraintSet {
        space: cs.space().clone(),
        constraints,
    }
}

pub(crate) fn partition_certificate<T: Real>(
    prior: &Distribution<T>,
    m: &PartitionWeights<T>,
    k: usize,
) -> Result<Option<Infeasibility>> {
    if let Some(&w) = m.weights.iter().find(|&&w| out_of_unit(w)) {
        return Ok(Some(Infeasibility::ValueOutOfRange {
            constraint: k,
            value: w.as_f64(),
        }));
    }
    let sum: T = m.weights.iter().copied().sum();
    if (sum - T::one()).abs() > T::lit(T::SIMPLEX_SLACK) {
        return Ok(Some(Infeasibility::ValueOutOfRange {
            constraint: k,
            value: sum.as_f64(),
        }));
    }
    for (cell_idx, (cell, &w)) in m.partition.cells().iter().zip(&m.weights).enumerate() {
        if w > T::zero() && prior.prob(cell)? <= T::lit(ZERO_MASS) {
            return Ok(Some(Infeasibility::DeadCell {
                constraint: k,
                cell: cell_idx,
                weight: w.as_f64(),
            }));
        }
    }
    Ok(None)
}
