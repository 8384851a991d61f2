//! Quadratic-loss admissibility audit for forecast systems.
//!
//! A forecast vector `x` for events `E_1..E_n` incurs loss
//! `Σ (v(E_i) - x_i)²` in the world where `v(E_i)` is the truth value of
//! `E_i`. `x` is admissible when no other vector has strictly smaller loss
//! in every world, which holds exactly when `x` lies in the convex hull of
//! the world valuation vectors. Outside the hull, the Euclidean projection
//! onto it is a dominating forecast.

use crate::linalg::{dot, solve};
use crate::real::Real;
use crate::space::{Distribution, Event, SampleSpace};
use crate::error::{Error, Result};

/// Projection distance at or below which a forecast is admissible.
pub const ADMISSIBLE_DISTANCE: f64 = 1e-9;
const GAP_TOL: f64 = 1e-14;
const MAX_STEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSystem<T> {
    space: SampleSpace,
    events: Vec<Event>,
    forecasts: Vec<T>,
}

/// Truth values of every event in the world where `outcome` obtains.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldValuation<T> {
    pub outcome: usize,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityVerdict<T> {
    pub admissible: bool,
    /// The projection of the forecasts onto the hull of valuations, present
    /// only when it strictly dominates them.
    pub dominating: Option<Vec<T>>,
    /// Smallest per-world loss improvement of `dominating`; zero when
    /// admissible.
    pub margin: T,
    /// Euclidean distance from the forecasts to the hull.
    pub distance: T,
}

impl<T: Real> ForecastSystem<T> {
    /// Forecasts may lie outside `[0, 1]`; they only need to be finite.
    pub fn new(space: &SampleSpace, events: Vec<Event>, forecasts: Vec<T>) -> Result<Self> {
        if events.len() != forecasts.len() {
            return Err(Error::LengthMismatch {
                expected: events.len(),
                actual: forecasts.len(),
            });
        }
        for e in &events {
            space.check_same(e.space())?;
        }
        if let Some(index) = forecasts.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(ForecastSystem {
            space: space.clone(),
            events,
            forecasts,
        })
    }

    /// Forecasts `P(E_i)` read off a distribution.
    pub fn from_distribution(d: &Distribution<T>, events: Vec<Event>) -> Result<Self> {
        let forecasts = events.iter().map(|e| d.prob(e)).collect::<Result<Vec<_>>>()?;
        Self::new(d.space(), events, forecasts)
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn forecasts(&self) -> &[T] {
        &self.forecasts
    }

    pub fn valuation(&self, outcome: usize) -> WorldValuation<T> {
        WorldValuation {
            outcome,
            values: self
                .events
                .iter()
                .map(|e| if e.contains(outcome) { T::one() } else { T::zero() })
                .collect(),
        }
    }

    /// One valuation per outcome, in space order.
    pub fn valuations(&self) -> Vec<WorldValuation<T>> {
        (0..self.space.len()).map(|i| self.valuation(i)).collect()
    }

    pub fn loss(&self, w: &WorldValuation<T>) -> T {
        quadratic_loss(&self.forecasts, w)
    }
}

/// `Σ (v(E_i) - x_i)²`.
pub fn quadratic_loss<T: Real>(forecasts: &[T], w: &WorldValuation<T>) -> T {
    forecasts
        .iter()
        .zip(&w.values)
        .map(|(&x, &v)| (v - x) * (v - x))
        .sum()
}

/// `loss(x, w) - loss(y, w)`, evaluated as `Σ (x-y)(x+y-2v)` to avoid
/// cancellation between two nearly equal sums.
pub fn loss_improvement<T: Real>(x: &[T], y: &[T], w: &WorldValuation<T>) -> T {
    x.iter()
        .zip(y)
        .zip(&w.values)
        .map(|((&a, &b), &v)| (a - b) * (a + b - v - v))
        .sum()
}

pub fn audit_admissibility<T: Real>(fs: &ForecastSystem<T>) -> AdmissibilityVerdict<T> {
    let worlds = fs.valuations();
    let mut vertices: Vec<Vec<T>> = Vec::new();
    for w in &worlds {
        if !vertices.contains(&w.values) {
            vertices.push(w.values.clone());
        }
    }
    let x = fs.forecasts();
    let offset = min_norm_point(
        &vertices
            .iter()
            .map(|v| v.iter().zip(x).map(|(&a, &b)| a - b).collect())
            .collect::<Vec<Vec<T>>>(),
    );
    let distance = dot(&offset, &offset).sqrt();
    let admissible_verdict = AdmissibilityVerdict {
        admissible: true,
        dominating: None,
        margin: T::zero(),
        distance,
    };
    if distance <= T::lit(ADMISSIBLE_DISTANCE) {
        return admissible_verdict;
    }
    let projection: Vec<T> = x.iter().zip(&offset).map(|(&a, &d)| a + d).collect();
    let margin = worlds
        .iter()
        .map(|w| loss_improvement(x, &projection, w))
        .fold(T::infinity(), T::min);
    if !(margin > T::zero()) {
        // Too close to the hull for strict domination to be certified in
        // floating point.
        return admissible_verdict;
    }
    AdmissibilityVerdict {
        admissible: false,
        dominating: Some(projection),
        margin,
        distance,
    }
}

/// Affine minimizer of `‖Σ α_k p_k‖` subject to `Σ α_k = 1`.
fn affine_minimizer<T: Real>(points: &[&Vec<T>]) -> Option<Vec<T>> {
    let k = points.len();
    let n = k + 1;
    let mut a = vec![T::zero(); n * n];
    for i in 0..k {
        for j in i..k {
            let g = dot(points[i], points[j]);
            a[i * n + j] = g;
            a[j * n + i] = g;
        }
        a[i * n + k] = T::one();
        a[k * n + i] = T::one();
    }
    let mut b = vec![T::zero(); n];
    b[k] = T::one();
    let mut sol = solve(a, b)?;
    sol.truncate(k);
    Some(sol)
}

fn combine<T: Real>(points: &[&Vec<T>], weights: &[T]) -> Vec<T> {
    let dim = points[0].len();
    let mut y = vec![T::zero(); dim];
    for (p, &w) in points.iter().zip(weights) {
        for (acc, &v) in y.iter_mut().zip(p.iter()) {
            *acc += w * v;
        }
    }
    y
}

/// Wolfe's nearest-point iteration: the point of minimum norm in the convex
/// hull of `points`. Vertex selection is the conditional-gradient rule
/// (minimize `⟨y, p⟩`); each step re-solves the affine minimizer over the
/// active vertices and drops vertices whose weight hits zero.
fn min_norm_point<T: Real>(points: &[Vec<T>]) -> Vec<T> {
    let start = (0..points.len())
        .min_by(|&a, &b| {
            dot(&points[a], &points[a])
                .partial_cmp(&dot(&points[b], &points[b]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("at least one vertex");
    let mut active = vec![start];
    let mut weights = vec![T::one()];
    let eps = T::lit(GAP_TOL);
    let mut steps = 0;
    'major: while steps < MAX_STEPS {
        steps += 1;
        let pts: Vec<&Vec<T>> = active.iter().map(|&i| &points[i]).collect();
        let y = combine(&pts, &weights);
        let yy = dot(&y, &y);
        if yy == T::zero() {
            return y;
        }
        let (j, best) = (0..points.len())
            .map(|j| (j, dot(&y, &points[j])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("at least one vertex");
        if yy - best <= eps || active.contains(&j) {
            return y;
        }
        active.push(j);
        weights.push(T::zero());
        loop {
            steps += 1;
            if steps >= MAX_STEPS {
                break 'major;
            }
            let pts: Vec<&Vec<T>> = active.iter().map(|&i| &points[i]).collect();
            let Some(alpha) = affine_minimizer(&pts) else {
                // Affinely dependent active set; keep the current point.
                active.pop();
                weights.pop();
                break 'major;
            };
            if alpha.iter().all(|&a| a > T::zero()) {
                weights = alpha;
                continue 'major;
            }
            let theta = weights
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= T::zero())
                .map(|(&w, &a)| w / (w - a))
                .fold(T::one(), T::min);
            for (w, &a) in weights.iter_mut().zip(&alpha) {
                *w = (T::one() - theta) * *w + theta * a;
            }
            let keep: Vec<bool> = weights.iter().map(|&w| w > T::zero()).collect();
            if keep.iter().all(|&k| k) {
                // Ensure progress when rounding leaves every weight positive.
                let drop = weights
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                active.remove(drop);
                weights.remove(drop);
            } else {
                let mut k = 0;
                active.retain(|_| {
                    k += 1;
                    keep[k - 1]
                });
                weights.retain(|&w| w > T::zero());
            }
            let total: T = weights.iter().copied().sum();
            for w in &mut weights {
                *w /= total;
            }
        }
    }
    let pts: Vec<&Vec<T>> = active.iter().map(|&i| &points[i]).collect();
    combine(&pts, &weights)
}
