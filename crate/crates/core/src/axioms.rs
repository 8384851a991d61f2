//! Executable checks of the partition-consistency property of maximum
//! relative entropy updating:
//!
//! ```text
//! post(prior, I & M) restricted to S_i  ==  post(prior restricted to S_i, I_i)
//! ```
//!
//! where `M` fixes the masses of the cells `S_i` of a partition and each
//! `I_i` constrains the conditional distribution inside `S_i`. With every
//! `I_i` empty this says the update only rescales cells; read through
//! conditional probabilities, `post(A | S_i) = prior(A | S_i)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{Constraint, ConstraintSet, LinearForm, PartitionWeights};
use crate::error::{Error, Result};
use crate::real::{Real, ZERO_MASS};
use crate::solver::{maxent_update, solve_dual, solve_forms, SolverOptions, UpdateReport};
use crate::space::{Distribution, Event, Partition, RandomVariable, SampleSpace};

/// Random events drawn per cell on top of the singletons.
pub const RANDOM_EVENTS_PER_CELL: usize = 20;

/// Constraints on the conditional distribution inside one partition cell.
/// Events and variables are stated on the full space; only their part
/// inside the cell matters.
#[derive(Debug, Clone, PartialEq)]
pub struct CellInfo<T> {
    pub cell_index: usize,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDeviation<T> {
    pub cell: usize,
    /// `None` when the cell has no posterior mass and was skipped.
    pub deviation: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport<T> {
    pub check: &'static str,
    pub max_deviation: T,
    pub per_cell: Vec<CellDeviation<T>>,
    pub tol: T,
    pub passed: bool,
}

impl<T: Real> AxiomReport<T> {
    fn new(check: &'static str, per_cell: Vec<CellDeviation<T>>, tol: T) -> Self {
        let max_deviation = per_cell
            .iter()
            .filter_map(|c| c.deviation)
            .fold(T::zero(), T::max);
        AxiomReport {
            check,
            max_deviation,
            per_cell,
            tol,
            passed: max_deviation <= tol,
        }
    }

    pub fn skipped(&self) -> impl Iterator<Item = usize> + '_ {
        self.per_cell
            .iter()
            .filter(|c| c.deviation.is_none())
            .map(|c| c.cell)
    }
}

fn check_cell_info<T: Real>(k: usize, info: &CellInfo<T>, part: &Partition) -> Result<()> {
    let invalid = |reason: String| Error::InvalidCellInfo {
        cell_info: k,
        reason,
    };
    let cell = part
        .cells()
        .get(info.cell_index)
        .ok_or_else(|| invalid(format!("cell index {} out of range", info.cell_index)))?;
    for c in &info.constraints {
        let events: Vec<&Event> = match c {
            Constraint::EventProb { event, .. } => vec![event],
            Constraint::CondProb { event, given, .. } => vec![event, given],
            Constraint::Expectation { variable, .. } => {
                part.space().check_same(variable.space())?;
                vec![]
            }
            Constraint::PartitionWeights(_) => {
                return Err(invalid("partition constraints are not cell information".into()))
            }
        };
        if let Some(e) = events.into_iter().find(|e| !e.is_subset_of(cell)) {
            return Err(invalid(format!("event {:?} leaves cell {}", e.labels(), info.cell_index)));
        }
    }
    Ok(())
}

/// Compares both sides of the consistency property cell by cell.
///
/// The left side solves the full problem once, with every cell's
/// information re-expressed as a conditional statement given its cell; the
/// right side solves each cell's problem on the relativized prior.
pub fn check_axiom4_full<T: Real>(
    prior: &Distribution<T>,
    m: &PartitionWeights<T>,
    infos: &[CellInfo<T>],
    tol: T,
    opts: &SolverOptions<T>,
) -> Result<AxiomReport<T>> {
    prior.space().check_same(m.space())?;
    let part = &m.partition;
    for (k, info) in infos.iter().enumerate() {
        check_cell_info(k, info, part)?;
    }
    for cell in part.cells() {
        let mass = prior.prob(cell)?;
        if mass <= T::lit(ZERO_MASS) {
            return Err(Error::ZeroMassEvent {
                mass: mass.as_f64(),
            });
        }
    }

    let mut forms: Vec<LinearForm<T>> = Constraint::PartitionWeights(m.clone()).compile(prior.space())?;
    for info in infos {
        let cell = &part.cells()[info.cell_index];
        for c in &info.constraints {
            forms.extend(c.compile(prior.space())?.iter().map(|f| f.relativize(cell)));
        }
    }
    let joint = solve_forms(prior, &forms, opts, None)?.posterior;

    let mut per_cell = Vec::with_capacity(part.len());
    for (i, cell) in part.cells().iter().enumerate() {
        if joint.prob(cell)? <= T::lit(ZERO_MASS) {
            per_cell.push(CellDeviation {
                cell: i,
                deviation: None,
            });
            continue;
        }
        let left = joint.condition(cell)?;
        let local_prior = prior.condition(cell)?;
        let local = infos
            .iter()
            .filter(|info| info.cell_index == i)
            .flat_map(|info| info.constraints.iter().cloned())
            .collect();
        let right = maxent_update(&local_prior, &ConstraintSet::new(prior.space(), local)?, opts)?.posterior;
        per_cell.push(CellDeviation {
            cell: i,
            deviation: Some(left.max_abs_diff(&right)?),
        });
    }
    Ok(AxiomReport::new("axiom4", per_cell, tol))
}

/// The special case with no within-cell information: both sides reduce to
/// the relativized prior.
pub fn check_axiom4a<T: Real>(
    prior: &Distribution<T>,
    m: &PartitionWeights<T>,
    tol: T,
    opts: &SolverOptions<T>,
) -> Result<AxiomReport<T>> {
    check_axiom4_full(prior, m, &[], tol, opts).map(|mut r| {
        r.check = "axiom4a";
        r
    })
}

/// Singletons of `cell` plus [`RANDOM_EVENTS_PER_CELL`] seeded random
/// subsets of it.
pub fn event_family(cell: &Event, seed: u64, cell_index: usize) -> Vec<Event> {
    let space = cell.space();
    let members: Vec<usize> = cell.indices().collect();
    let mut out: Vec<Event> = members
        .iter()
        .map(|&i| Event::from_predicate(space, |j, _| j == i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell_index as u64);
    for _ in 0..RANDOM_EVENTS_PER_CELL {
        let pick: Vec<bool> = members.iter().map(|_| rng.gen_bool(0.5)).collect();
        out.push(Event::from_predicate(space, |j, _| {
            members.iter().position(|&i| i == j).is_some_and(|k| pick[k])
        }));
    }
    out
}

/// Checks `post(A | S_i) = prior(A | S_i)` for the posterior produced by
/// `update` under the partition constraint `m`.
pub fn check_axiom4b_with<T, F>(
    prior: &Distribution<T>,
    m: &PartitionWeights<T>,
    tol: T,
    seed: u64,
    update: F,
) -> Result<AxiomReport<T>>
where
    T: Real,
    F: FnOnce(&Distribution<T>, &ConstraintSet<T>) -> Result<UpdateReport<T>>,
{
    prior.space().check_same(m.space())?;
    let cs = ConstraintSet::single(Constraint::PartitionWeights(m.clone()), prior.space())?;
    let post = update(prior, &cs)?.posterior;
    let dead = T::lit(ZERO_MASS);
    let mut per_cell = Vec::with_capacity(m.partition.len());
    for (i, cell) in m.partition.cells().iter().enumerate() {
        if post.prob(cell)? <= dead || prior.prob(cell)? <= dead {
            per_cell.push(CellDeviation {
                cell: i,
                deviation: None,
            });
            continue;
        }
        let mut worst = T::zero();
        for a in event_family(cell, seed, i) {
            let d = (post.conditional_prob(&a, cell)? - prior.conditional_prob(&a, cell)?).abs();
            worst = worst.max(d);
        }
        per_cell.push(CellDeviation {
            cell: i,
            deviation: Some(worst),
        });
    }
    Ok(AxiomReport::new("axiom4b", per_cell, tol))
}

/// [`check_axiom4b_with`] using the generic dual solver, so the check
/// exercises the optimizer rather than the closed-form partition update.
pub fn check_axiom4b<T: Real>(
    prior: &Distribution<T>,
    m: &PartitionWeights<T>,
    tol: T,
    seed: u64,
) -> Result<AxiomReport<T>> {
    check_axiom4b_with(prior, m, tol, seed, |p, cs| {
        solve_dual(p, cs, &SolverOptions::default())
    })
}

/// Deterministic generator for randomized partition-update cases, fully
/// determined by `(seed, trial)`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_simplex<T: Real, R: Rng>(rng: &mut R, n: usize, floor: f64) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(floor..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| T::lit(w / total)).collect()
}

fn random_partition<R: Rng>(rng: &mut R, space: &SampleSpace, cells: usize) -> Result<Partition> {
    let n = space.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut cell_of = vec![0; n];
    for (k, &i) in order.iter().enumerate() {
        cell_of[i] = if k < cells { k } else { rng.gen_range(0..cells) };
    }
    let events = (0..cells)
        .map(|c| Event::from_predicate(space, |i, _| cell_of[i] == c))
        .collect();
    Partition::new(space, events)
}

/// A random strictly positive prior on `2..=n_max` outcomes with a random
/// partition (2 to 4 cells) and random target cell masses.
pub fn random_partition_case<T: Real>(
    seed: u64,
    trial: u64,
    n_max: usize,
) -> Result<(Distribution<T>, PartitionWeights<T>)> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(2..=n_max.max(2));
    let space = SampleSpace::numbered(n)?;
    let prior = Distribution::new(&space, random_simplex(&mut rng, n, 0.02))?;
    let cells = rng.gen_range(2..=n.min(4));
    let partition = random_partition(&mut rng, &space, cells)?;
    let weights = random_simplex(&mut rng, cells, 0.02);
    Ok((prior, PartitionWeights::new(partition, weights)?))
}

/// Like [`random_partition_case`] (at most 2 cells) plus at most one
/// feasible within-cell constraint per cell.
pub fn random_cell_info_case<T: Real>(
    seed: u64,
    trial: u64,
    n_max: usize,
) -> Result<(Distribution<T>, PartitionWeights<T>, Vec<CellInfo<T>>)> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(4..=n_max.max(4));
    let space = SampleSpace::numbered(n)?;
    let prior = Distribution::new(&space, random_simplex(&mut rng, n, 0.02))?;
    let partition = random_partition(&mut rng, &space, 2)?;
    let weights = random_simplex(&mut rng, 2, 0.05);
    let mut infos = Vec::new();
    for (c, cell) in partition.cells().iter().enumerate() {
        let members: Vec<usize> = cell.indices().collect();
        if members.len() < 2 || rng.gen_bool(0.25) {
            continue;
        }
        let constraint = if rng.gen_bool(0.5) {
            let cut = rng.gen_range(1..members.len());
            let event = Event::from_indices(&space, &members[..cut])?;
            Constraint::event_prob(event, T::lit(rng.gen_range(0.1..0.9)))
        } else {
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (lo, hi) = members
                .iter()
                .map(|&i| values[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            let target = lo + (hi - lo) * rng.gen_range(0.2..0.8);
            let variable = RandomVariable::new(&space, values.into_iter().map(T::lit).collect())?;
            Constraint::expectation(variable, T::lit(target))
        };
        infos.push(CellInfo {
            cell_index: c,
            constraints: vec![constraint],
        });
    }
    Ok((prior, PartitionWeights::new(partition, weights)?, infos))
}
