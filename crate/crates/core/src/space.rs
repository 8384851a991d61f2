//! Finite probability spaces and the objects defined over them.
//!
//! Every numeric sequence is positionally aligned with the fixed outcome
//! order of its [`SampleSpace`]; nothing is ever reordered after
//! construction.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::{Real, ZERO_MASS};

#[derive(Debug)]
struct SpaceInner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

/// An ordered set of distinct outcome labels. Cheap to clone.
#[derive(Clone)]
pub struct SampleSpace(Arc<SpaceInner>);

impl SampleSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(SampleSpace(Arc::new(SpaceInner { labels, index })))
    }

    /// A space labelled `"1"`, `"2"`, ..., `"n"`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.0
            .index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub(crate) fn check_same(&self, other: &SampleSpace) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

impl PartialEq for SampleSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl Eq for SampleSpace {}

impl fmt::Debug for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SampleSpace").field(&self.0.labels).finish()
    }
}

/// A subset of a sample space's outcomes, stored as a membership mask.
#[derive(Clone, PartialEq, Eq)]
pub struct Event {
    space: SampleSpace,
    mask: Vec<bool>,
}

impl Event {
    pub fn from_labels<S: AsRef<str>>(space: &SampleSpace, labels: &[S]) -> Result<Self> {
        let mut mask = vec![false; space.len()];
        for l in labels {
            mask[space.index_of(l.as_ref())?] = true;
        }
        Ok(Event {
            space: space.clone(),
            mask,
        })
    }

    pub fn from_indices(space: &SampleSpace, indices: &[usize]) -> Result<Self> {
        let mut mask = vec![false; space.len()];
        for &i in indices {
            if i >= space.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: space.len(),
                });
            }
            mask[i] = true;
        }
        Ok(Event {
            space: space.clone(),
            mask,
        })
    }

    pub fn from_mask(space: &SampleSpace, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: mask.len(),
            });
        }
        Ok(Event {
            space: space.clone(),
            mask,
        })
    }

    pub fn from_predicate(space: &SampleSpace, mut keep: impl FnMut(usize, &str) -> bool) -> Self {
        let mask = space
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| keep(i, l))
            .collect();
        Event {
            space: space.clone(),
            mask,
        }
    }

    pub fn whole(space: &SampleSpace) -> Self {
        Event {
            space: space.clone(),
            mask: vec![true; space.len()],
        }
    }

    pub fn empty(space: &SampleSpace) -> Self {
        Event {
            space: space.clone(),
            mask: vec![false; space.len()],
        }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Member indices in space order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.indices().map(|i| self.space.label(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn is_whole(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    pub fn complement(&self) -> Self {
        Event {
            space: self.space.clone(),
            mask: self.mask.iter().map(|m| !m).collect(),
        }
    }

    pub fn intersect(&self, other: &Event) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Event {
            space: self.space.clone(),
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect(),
        })
    }

    pub fn union(&self, other: &Event) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Event {
            space: self.space.clone(),
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect(),
        })
    }

    pub fn is_subset_of(&self, other: &Event) -> bool {
        self.space == other.space && self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    pub fn indicator<T: Real>(&self) -> Vec<T> {
        self.mask
            .iter()
            .map(|&m| if m { T::one() } else { T::zero() })
            .collect()
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.labels()).finish()
    }
}

/// A real-valued function on the outcomes of a space.
#[derive(Clone, PartialEq)]
pub struct RandomVariable<T> {
    space: SampleSpace,
    values: Vec<T>,
}

impl<T: Real> RandomVariable<T> {
    pub fn new(space: &SampleSpace, values: Vec<T>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(RandomVariable {
            space: space.clone(),
            values,
        })
    }

    pub fn from_fn(space: &SampleSpace, f: impl FnMut(usize, &str) -> T) -> Result<Self> {
        let mut f = f;
        let values = space
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| f(i, l))
            .collect();
        Self::new(space, values)
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, i: usize) -> T {
        self.values[i]
    }
}

impl<T: fmt::Debug> fmt::Debug for RandomVariable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.space.labels().iter().zip(&self.values))
            .finish()
    }
}

/// Pairwise disjoint, nonempty events covering the whole space.
#[derive(Clone, PartialEq)]
pub struct Partition {
    space: SampleSpace,
    cells: Vec<Event>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn new(space: &SampleSpace, cells: Vec<Event>) -> Result<Self> {
        let mut cell_of = vec![usize::MAX; space.len()];
        for (c, cell) in cells.iter().enumerate() {
            space.check_same(cell.space())?;
            if cell.is_empty() {
                return Err(Error::EmptyCell(c));
            }
            for i in cell.indices() {
                if cell_of[i] != usize::MAX {
                    return Err(Error::PartitionOverlap(space.label(i).to_string()));
                }
                cell_of[i] = c;
            }
        }
        if let Some(i) = cell_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::PartitionNotExhaustive(space.label(i).to_string()));
        }
        Ok(Partition {
            space: space.clone(),
            cells,
            cell_of,
        })
    }

    pub fn from_labels<S: AsRef<str>>(space: &SampleSpace, cells: &[Vec<S>]) -> Result<Self> {
        let cells = cells
            .iter()
            .map(|c| Event::from_labels(space, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, cells)
    }

    /// The two-cell partition `{e, not e}`. Fails if either side is empty.
    pub fn binary(e: &Event) -> Result<Self> {
        Self::new(e.space(), vec![e.clone(), e.complement()])
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the cell containing outcome `i`.
    pub fn cell_of(&self, i: usize) -> usize {
        self.cell_of[i]
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.cells).finish()
    }
}

fn check_simplex<T: Real>(weights: &[T]) -> Result<()> {
    for (index, &w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if w < T::zero() {
            return Err(Error::NegativeWeight {
                index,
                value: w.as_f64(),
            });
        }
    }
    let sum: T = weights.iter().copied().sum();
    if (sum - T::one()).abs() > T::lit(T::SIMPLEX_SLACK) {
        return Err(Error::NotNormalized { sum: sum.as_f64() });
    }
    Ok(())
}

/// A probability distribution over a finite sample space.
#[derive(Clone, PartialEq)]
pub struct Distribution<T> {
    space: SampleSpace,
    weights: Vec<T>,
}

impl<T: Real> Distribution<T> {
    /// Validates nonnegativity and unit sum (within `T::SIMPLEX_SLACK`).
    pub fn new(space: &SampleSpace, weights: Vec<T>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: weights.len(),
            });
        }
        check_simplex(&weights)?;
        Ok(Distribution {
            space: space.clone(),
            weights,
        })
    }

    /// Divides nonnegative weights by their total.
    pub fn normalized(space: &SampleSpace, mut weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) || !total.is_finite() {
            return Err(Error::ZeroMassEvent {
                mass: total.as_f64(),
            });
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::new(space, weights)
    }

    pub fn uniform(space: &SampleSpace) -> Self {
        let w = T::one() / T::from_usize(space.len()).expect("space size fits scalar");
        Distribution {
            space: space.clone(),
            weights: vec![w; space.len()],
        }
    }

    pub fn point_mass(space: &SampleSpace, i: usize) -> Result<Self> {
        if i >= space.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: space.len(),
            });
        }
        let mut weights = vec![T::zero(); space.len()];
        weights[i] = T::one();
        Ok(Distribution {
            space: space.clone(),
            weights,
        })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Outcomes with strictly positive weight.
    pub fn support(&self) -> Event {
        let mask = self.weights.iter().map(|&w| w > T::zero()).collect();
        Event {
            space: self.space.clone(),
            mask,
        }
    }

    pub fn prob(&self, e: &Event) -> Result<T> {
        self.space.check_same(e.space())?;
        Ok(e.indices().map(|i| self.weights[i]).sum())
    }

    /// Restriction to `e`, renormalized.
    pub fn condition(&self, e: &Event) -> Result<Self> {
        let mass = self.prob(e)?;
        if mass <= T::lit(ZERO_MASS) {
            return Err(Error::ZeroMassEvent {
                mass: mass.as_f64(),
            });
        }
        let weights = self
            .weights
            .iter()
            .zip(e.mask())
            .map(|(&w, &m)| if m { w / mass } else { T::zero() })
            .collect();
        Ok(Distribution {
            space: self.space.clone(),
            weights,
        })
    }

    pub fn expectation(&self, f: &RandomVariable<T>) -> Result<T> {
        self.space.check_same(f.space())?;
        Ok(self
            .weights
            .iter()
            .zip(f.values())
            .map(|(&w, &v)| w * v)
            .sum())
    }

    /// `P(a | b)`.
    pub fn conditional_prob(&self, a: &Event, b: &Event) -> Result<T> {
        let pb = self.prob(b)?;
        if pb <= T::lit(ZERO_MASS) {
            return Err(Error::ZeroMassEvent { mass: pb.as_f64() });
        }
        Ok(self.prob(&a.intersect(b)?)? / pb)
    }

    /// Largest elementwise absolute difference.
    pub fn max_abs_diff(&self, other: &Distribution<T>) -> Result<T> {
        self.space.check_same(&other.space)?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max))
    }

    /// Re-expresses the distribution on a relabelled copy of the space, where
    /// outcome `i` moves to position `perm[i]`.
    pub fn permuted(&self, space: &SampleSpace, perm: &[usize]) -> Result<Self> {
        let mut weights = vec![T::zero(); self.len()];
        for (i, &j) in perm.iter().enumerate() {
            weights[j] = self.weights[i];
        }
        Distribution::new(space, weights)
    }

    pub fn map_scalar<U: Real>(&self) -> Distribution<U> {
        Distribution {
            space: self.space.clone(),
            weights: self.weights.iter().map(|w| U::lit(w.as_f64())).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.space.labels().iter().zip(&self.weights))
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Col,
}

/// Joint probabilities `prob(w, b)` over a row space `W` and a column
/// space `B`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    rows: SampleSpace,
    cols: SampleSpace,
    weights: Vec<T>,
}

impl<T: Real> JointDistribution<T> {
    pub fn new(rows: &SampleSpace, cols: &SampleSpace, weights: Vec<T>) -> Result<Self> {
        let expected = rows.len() * cols.len();
        if weights.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: weights.len(),
            });
        }
        check_simplex(&weights)?;
        Ok(JointDistribution {
            rows: rows.clone(),
            cols: cols.clone(),
            weights,
        })
    }

    pub fn from_rows(rows: &SampleSpace, cols: &SampleSpace, matrix: &[Vec<T>]) -> Result<Self> {
        if matrix.len() != rows.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                actual: matrix.len(),
            });
        }
        let mut weights = Vec::with_capacity(rows.len() * cols.len());
        for r in matrix {
            if r.len() != cols.len() {
                return Err(Error::LengthMismatch {
                    expected: cols.len(),
                    actual: r.len(),
                });
            }
            weights.extend_from_slice(r);
        }
        Self::new(rows, cols, weights)
    }

    /// The independent joint `p ⊗ q`.
    pub fn product(p: &Distribution<T>, q: &Distribution<T>) -> Self {
        let weights = p
            .weights()
            .iter()
            .flat_map(|&a| q.weights().iter().map(move |&b| a * b))
            .collect();
        JointDistribution {
            rows: p.space().clone(),
            cols: q.space().clone(),
            weights,
        }
    }

    /// The coupling of `d` with itself that puts all mass on the diagonal.
    pub fn identity_coupling(d: &Distribution<T>) -> Self {
        let n = d.len();
        let mut weights = vec![T::zero(); n * n];
        for i in 0..n {
            weights[i * n + i] = d.weight(i);
        }
        JointDistribution {
            rows: d.space().clone(),
            cols: d.space().clone(),
            weights,
        }
    }

    /// Joint law of the cells of two partitions of the same space under `d`:
    /// entry `(i, j)` is `P(row_i ∩ col_j)`. Rows and columns are labelled by
    /// cell position.
    pub fn of_partitions(d: &Distribution<T>, rows: &Partition, cols: &Partition) -> Result<Self> {
        d.space().check_same(rows.space())?;
        d.space().check_same(cols.space())?;
        let row_space = SampleSpace::numbered(rows.len())?;
        let col_space = SampleSpace::numbered(cols.len())?;
        let mut weights = vec![T::zero(); rows.len() * cols.len()];
        for (i, &w) in d.weights().iter().enumerate() {
            weights[rows.cell_of(i) * cols.len() + cols.cell_of(i)] += w;
        }
        Ok(JointDistribution {
            rows: row_space,
            cols: col_space,
            weights,
        })
    }

    pub fn row_space(&self) -> &SampleSpace {
        &self.rows
    }

    pub fn col_space(&self) -> &SampleSpace {
        &self.cols
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.weights[r * self.cols.len() + c]
    }

    pub fn marginal(&self, axis: Axis) -> Distribution<T> {
        let (nr, nc) = (self.rows.len(), self.cols.len());
        match axis {
            Axis::Row => Distribution {
                space: self.rows.clone(),
                weights: (0..nr)
                    .map(|r| (0..nc).map(|c| self.get(r, c)).sum())
                    .collect(),
            },
            Axis::Col => Distribution {
                space: self.cols.clone(),
                weights: (0..nc)
                    .map(|c| (0..nr).map(|r| self.get(r, c)).sum())
                    .collect(),
            },
        }
    }
}
