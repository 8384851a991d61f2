//! JSON scenario files: a space, a prior, constraints, and optional queries
//! and forecasts.
//!
//! ```json
//! {
//!   "version": 1,
//!   "space": ["1", "2", "3", "4", "5", "6"],
//!   "prior": "uniform",
//!   "constraints": [
//!     {"type": "expectation",
//!      "variable": {"1": 1, "2": 2, "3": 3, "4": 4, "5": 5, "6": 6},
//!      "value": 4.5}
//!   ],
//!   "queries": [{"type": "entropy", "on": "posterior"}]
//! }
//! ```
//!
//! Constraint types: `event_prob` (`event`, `value`), `expectation`
//! (`variable`, `value`), `cond_prob` (`event`, `given`, `value`) and
//! `partition` (`cells`, `weights`). Query types: `prob` (`event`),
//! `cond_prob` (`event`, `given`), `entropy`, `mutual_information` (`rows`,
//! `cols`: two partitions of the space) and `posterior`; every query but
//! `posterior` takes an optional `on` of `"prior"` or `"posterior"`
//! (default). `forecasts` is an array of `{"event", "value"}`.
//!
//! Only `f64` scenarios are supported.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence::ForecastSystem;
use crate::constraints::{Constraint, ConstraintSet};
use crate::error::Error;
use crate::space::{Distribution, Event, Partition, RandomVariable, SampleSpace};

pub const FORMAT_VERSION: u64 = 1;

/// Malformed JSON.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Well-formed JSON that does not describe a valid scenario. `code` is a
/// stable identifier for the violated rule; `key` is the JSON path.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scenario [{code}] at `{key}`: {message}")]
pub struct ValidationError {
    pub code: &'static str,
    pub key: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// Every diagnostic code [`ValidationError`] can carry.
pub const VALIDATION_CODES: &[&str] = &[
    "schema",
    "unsupported_version",
    "empty_space",
    "duplicate_label",
    "unknown_label",
    "unknown_prior",
    "length_mismatch",
    "non_finite",
    "negative_weight",
    "not_normalized",
    "variable_incomplete",
    "empty_cell",
    "partition_overlap",
    "partition_not_exhaustive",
    "invalid",
];

fn code_of(e: &Error) -> &'static str {
    match e {
        Error::EmptySpace => "empty_space",
        Error::DuplicateLabel(_) => "duplicate_label",
        Error::UnknownLabel(_) => "unknown_label",
        Error::LengthMismatch { .. } => "length_mismatch",
        Error::NonFinite { .. } => "non_finite",
        Error::NegativeWeight { .. } => "negative_weight",
        Error::NotNormalized { .. } => "not_normalized",
        Error::EmptyCell(_) => "empty_cell",
        Error::PartitionOverlap(_) => "partition_overlap",
        Error::PartitionNotExhaustive(_) => "partition_not_exhaustive",
        _ => "invalid",
    }
}

fn invalid(code: &'static str, key: impl Into<String>, message: impl Into<String>) -> ValidationError {
    ValidationError {
        code,
        key: key.into(),
        message: message.into(),
    }
}

trait AtKey<T> {
    fn at(self, key: &str) -> Result<T, ValidationError>;
}

impl<T> AtKey<T> for crate::error::Result<T> {
    fn at(self, key: &str) -> Result<T, ValidationError> {
        self.map_err(|e| invalid(code_of(&e), key, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum On {
    Prior,
    #[default]
    Posterior,
}

impl fmt::Display for On {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            On::Prior => "prior",
            On::Posterior => "posterior",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Prob { event: Event, on: On },
    CondProb { event: Event, given: Event, on: On },
    Entropy { on: On },
    MutualInformation { rows: Partition, cols: Partition, on: On },
    Posterior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub version: Option<u64>,
    pub prior: Distribution<f64>,
    pub constraints: ConstraintSet<f64>,
    pub queries: Vec<Query>,
    pub forecasts: Option<ForecastSystem<f64>>,
}

impl Scenario {
    pub fn space(&self) -> &SampleSpace {
        self.prior.space()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    version: Option<u64>,
    space: Vec<String>,
    prior: RawPrior,
    constraints: Vec<RawConstraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    queries: Vec<RawQuery>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    forecasts: Option<Vec<RawForecast>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawPrior {
    Named(String),
    Weights(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawConstraint {
    EventProb {
        event: Vec<String>,
        value: f64,
    },
    Expectation {
        variable: BTreeMap<String, f64>,
        value: f64,
    },
    CondProb {
        event: Vec<String>,
        given: Vec<String>,
        value: f64,
    },
    Partition {
        cells: Vec<Vec<String>>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawQuery {
    Prob {
        event: Vec<String>,
        #[serde(default)]
        on: On,
    },
    CondProb {
        event: Vec<String>,
        given: Vec<String>,
        #[serde(default)]
        on: On,
    },
    Entropy {
        #[serde(default)]
        on: On,
    },
    MutualInformation {
        rows: Vec<Vec<String>>,
        cols: Vec<Vec<String>>,
        #[serde(default)]
        on: On,
    },
    Posterior {},
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForecast {
    event: Vec<String>,
    value: f64,
}

fn event(space: &SampleSpace, labels: &[String], key: &str) -> Result<Event, ValidationError> {
    Event::from_labels(space, labels).at(key)
}

fn partition(space: &SampleSpace, cells: &[Vec<String>], key: &str) -> Result<Partition, ValidationError> {
    for (i, cell) in cells.iter().enumerate() {
        event(space, cell, &format!("{key}[{i}]"))?;
    }
    Partition::from_labels(space, cells).at(key)
}

/// Parses and validates a scenario document.
pub fn parse(document: &str) -> Result<Scenario, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(document);
    let raw: RawScenario = match serde_path_to_error::deserialize(&mut de) {
        Ok(raw) => raw,
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            return Err(match inner.classify() {
                serde_json::error::Category::Data => {
                    invalid("schema", path, inner.to_string()).into()
                }
                _ => ParseError {
                    line: inner.line(),
                    column: inner.column(),
                    message: inner.to_string(),
                }
                .into(),
            });
        }
    };
    de.end().map_err(|e| ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(build(raw)?)
}

fn build(raw: RawScenario) -> Result<Scenario, ValidationError> {
    if let Some(v) = raw.version {
        if v != FORMAT_VERSION {
            return Err(invalid(
                "unsupported_version",
                "version",
                format!("unsupported version {v}; expected {FORMAT_VERSION}"),
            ));
        }
    }
    let space = SampleSpace::new(raw.space.iter()).at("space")?;
    let prior = match raw.prior {
        RawPrior::Named(name) if name == "uniform" => Distribution::uniform(&space),
        RawPrior::Named(name) => {
            return Err(invalid(
                "unknown_prior",
                "prior",
                format!("unknown prior `{name}`; expected \"uniform\" or an array"),
            ))
        }
        RawPrior::Weights(w) => Distribution::new(&space, w).at("prior")?,
    };

    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (i, c) in raw.constraints.into_iter().enumerate() {
        let key = format!("constraints[{i}]");
        constraints.push(match c {
            RawConstraint::EventProb { event: e, value } => {
                Constraint::event_prob(event(&space, &e, &format!("{key}.event"))?, value)
            }
            RawConstraint::Expectation { variable, value } => {
                let vkey = format!("{key}.variable");
                if let Some(label) = variable.keys().find(|l| space.index_of(l).is_err()) {
                    return Err(invalid("unknown_label", vkey, format!("unknown outcome label `{label}`")));
                }
                let values = space
                    .labels()
                    .iter()
                    .map(|l| {
                        variable.get(l.as_str()).copied().ok_or_else(|| {
                            invalid("variable_incomplete", &vkey, format!("no value for outcome `{l}`"))
                        })
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                Constraint::expectation(RandomVariable::new(&space, values).at(&vkey)?, value)
            }
            RawConstraint::CondProb { event: e, given, value } => Constraint::cond_prob(
                event(&space, &e, &format!("{key}.event"))?,
                event(&space, &given, &format!("{key}.given"))?,
                value,
            ),
            RawConstraint::Partition { cells, weights } => {
                let p = partition(&space, &cells, &format!("{key}.cells"))?;
                Constraint::partition(p, weights).at(&format!("{key}.weights"))?
            }
        });
    }
    let constraints = ConstraintSet::new(&space, constraints).at("constraints")?;

    let mut queries = Vec::with_capacity(raw.queries.len());
    for (i, q) in raw.queries.into_iter().enumerate() {
        let key = format!("queries[{i}]");
        queries.push(match q {
            RawQuery::Prob { event: e, on } => Query::Prob {
                event: event(&space, &e, &format!("{key}.event"))?,
                on,
            },
            RawQuery::CondProb { event: e, given, on } => Query::CondProb {
                event: event(&space, &e, &format!("{key}.event"))?,
                given: event(&space, &given, &format!("{key}.given"))?,
                on,
            },
            RawQuery::Entropy { on } => Query::Entropy { on },
            RawQuery::MutualInformation { rows, cols, on } => Query::MutualInformation {
                rows: partition(&space, &rows, &format!("{key}.rows"))?,
                cols: partition(&space, &cols, &format!("{key}.cols"))?,
                on,
            },
            RawQuery::Posterior {} => Query::Posterior,
        });
    }

    let forecasts = match raw.forecasts {
        None => None,
        Some(list) => {
            let mut events = Vec::with_capacity(list.len());
            let mut values = Vec::with_capacity(list.len());
            for (i, f) in list.into_iter().enumerate() {
                events.push(event(&space, &f.event, &format!("forecasts[{i}].event"))?);
                values.push(f.value);
            }
            Some(ForecastSystem::new(&space, events, values).at("forecasts")?)
        }
    };

    Ok(Scenario {
        version: raw.version,
        prior,
        constraints,
        queries,
        forecasts,
    })
}

fn labels(e: &Event) -> Vec<String> {
    e.labels().into_iter().map(str::to_owned).collect()
}

fn cells(p: &Partition) -> Vec<Vec<String>> {
    p.cells().iter().map(labels).collect()
}

/// Serializes a scenario so that [`parse`] reproduces it exactly.
pub fn emit_scenario(sc: &Scenario) -> String {
    let space = sc.space();
    let prior = if sc.prior == Distribution::uniform(space) {
        RawPrior::Named("uniform".into())
    } else {
        RawPrior::Weights(sc.prior.weights().to_vec())
    };
    let constraints = sc
        .constraints
        .constraints()
        .iter()
        .map(|c| match c {
            Constraint::EventProb { event, value } => RawConstraint::EventProb {
                event: labels(event),
                value: *value,
            },
            Constraint::Expectation { variable, value } => RawConstraint::Expectation {
                variable: space
                    .labels()
                    .iter()
                    .cloned()
                    .zip(variable.values().iter().copied())
                    .collect(),
                value: *value,
            },
            Constraint::CondProb { event, given, value } => RawConstraint::CondProb {
                event: labels(event),
                given: labels(given),
                value: *value,
            },
            Constraint::PartitionWeights(pw) => RawConstraint::Partition {
                cells: cells(&pw.partition),
                weights: pw.weights.clone(),
            },
        })
        .collect();
    let queries = sc
        .queries
        .iter()
        .map(|q| match q {
            Query::Prob { event, on } => RawQuery::Prob {
                event: labels(event),
                on: *on,
            },
            Query::CondProb { event, given, on } => RawQuery::CondProb {
                event: labels(event),
                given: labels(given),
                on: *on,
            },
            Query::Entropy { on } => RawQuery::Entropy { on: *on },
            Query::MutualInformation { rows, cols, on } => RawQuery::MutualInformation {
                rows: cells(rows),
                cols: cells(cols),
                on: *on,
            },
            Query::Posterior => RawQuery::Posterior {},
        })
        .collect();
    let forecasts = sc.forecasts.as_ref().map(|fs| {
        fs.events()
            .iter()
            .zip(fs.forecasts())
            .map(|(e, &value)| RawForecast {
                event: labels(e),
                value,
            })
            .collect()
    });
    let raw = RawScenario {
        version: sc.version,
        space: space.labels().to_vec(),
        prior,
        constraints,
        queries,
        forecasts,
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("scenario serializes");
    out.push('\n');
    out
}
