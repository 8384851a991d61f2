//! Maximum relative entropy updating.
//!
//! The posterior maximizing `H(post, prior)` under linear equality
//! constraints has the exponential-family shape
//! `post_i ∝ prior_i · exp(Σ_j λ_j a_ji)` on the prior's support. The
//! multipliers `λ` maximize the concave dual
//! `g(λ) = -ln Z(λ) + λ·b`, whose gradient is `b - E_post[a]` and whose
//! Hessian is `-Cov_post(a)`. [`solve_dual`] runs damped Newton ascent on
//! `g`; [`maxent_update`] first tries the closed forms for certainty
//! (conditionalization) and partition reweighting (Jeffrey's rule).

use std::fmt;

use crate::constraints::{
    clamp_to_range, forms_residual, partition_certificate, triage_feasibility, Constraint,
    ConstraintSet, Feasibility, LinearForm, PartitionWeights,
};
use crate::error::{Error, Infeasibility, Result};
use crate::info::relative_entropy;
use crate::linalg::{dot, solve};
use crate::real::{Real, ZERO_MASS};
use crate::space::{Distribution, Event, Partition};

/// Diagonal shift applied to the covariance before each Newton solve.
const HESSIAN_RIDGE: f64 = 1e-12;
/// Window and minimum improvement for the stalled-residual test.
const STALL_WINDOW: usize = 10;
const STALL_IMPROVEMENT: f64 = 1e-12;
const MAX_HALVINGS: usize = 60;
/// Conditioning mass at or below this multiple of `tol` is degenerate.
const DEGENERATE_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Largest accepted constraint residual.
    pub tol: T,
    pub max_iter: usize,
    /// Multipliers beyond this (in max norm) with a stalled residual signal
    /// an inconsistent constraint set.
    pub multiplier_bound: T,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::lit(T::DEFAULT_TOL),
            max_iter: 200,
            multiplier_bound: T::lit(1e6),
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        if !(self.multiplier_bound > T::zero()) {
            return Err(Error::Domain("multiplier_bound must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DualNewton,
    Jeffrey,
    Conditionalization,
    NoOp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::DualNewton => "dual_newton",
            Method::Jeffrey => "jeffrey",
            Method::Conditionalization => "conditionalization",
            Method::NoOp => "no_op",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateReport<T> {
    pub prior: Distribution<T>,
    pub posterior: Distribution<T>,
    /// One multiplier per compiled linear form. Closed-form paths may
    /// report infinite values where the optimum sits on the boundary.
    pub multipliers: Vec<T>,
    pub iterations: usize,
    pub final_residual: T,
    /// `H(posterior, prior)` in nats; never positive.
    pub objective: T,
    pub method: Method,
}

fn objective<T: Real>(post: &Distribution<T>, prior: &Distribution<T>) -> Result<T> {
    // Rounding can leave +1e-17 when post ≈ prior.
    Ok(relative_entropy(post, prior)?.nats().min(T::zero()))
}

fn no_op<T: Real>(prior: &Distribution<T>, n_forms: usize, res: T) -> UpdateReport<T> {
    UpdateReport {
        prior: prior.clone(),
        posterior: prior.clone(),
        multipliers: vec![T::zero(); n_forms],
        iterations: 0,
        final_residual: res,
        objective: T::zero(),
        method: Method::NoOp,
    }
}

/// Updating on an event learned with certainty.
pub fn conditionalize<T: Real>(prior: &Distribution<T>, e: &Event) -> Result<UpdateReport<T>> {
    let posterior = prior.condition(e)?;
    let form = LinearForm {
        coeffs: e.indicator(),
        target: T::one(),
    };
    let final_residual = form.violation(posterior.weights());
    if prior.prob(&e.complement())? == T::zero() {
        return Ok(no_op(prior, 1, form.violation(prior.weights())));
    }
    Ok(UpdateReport {
        objective: objective(&posterior, prior)?,
        prior: prior.clone(),
        posterior,
        multipliers: vec![T::infinity()],
        iterations: 0,
        final_residual,
        method: Method::Conditionalization,
    })
}

/// Jeffrey's rule: rescale each cell to its prescribed mass, keeping the
/// prior's proportions inside every cell.
pub fn jeffrey_update<T: Real>(
    prior: &Distribution<T>,
    m: &PartitionWeights<T>,
) -> Result<UpdateReport<T>> {
    prior.space().check_same(m.space())?;
    if let Some(reason) = partition_certificate(prior, m, 0)? {
        return Err(Error::Infeasible(reason));
    }
    let cells = m.partition.cells();
    let masses = cells
        .iter()
        .map(|c| prior.prob(c))
        .collect::<Result<Vec<T>>>()?;
    let scale: Vec<T> = masses
        .iter()
        .zip(&m.weights)
        .map(|(&mass, &w)| if w > T::zero() { w / mass } else { T::zero() })
        .collect();
    let weights = prior
        .weights()
        .iter()
        .enumerate()
        .map(|(i, &p)| p * scale[m.partition.cell_of(i)])
        .collect();
    let posterior = Distribution::new(prior.space(), weights)?;
    let multipliers = masses
        .iter()
        .zip(&m.weights)
        .map(|(&mass, &w)| match (w > T::zero(), mass > T::zero()) {
            (true, _) => (w / mass).ln(),
            (false, true) => T::neg_infinity(),
            (false, false) => T::zero(),
        })
        .collect();
    let forms = Constraint::PartitionWeights(m.clone()).compile(prior.space())?;
    Ok(UpdateReport {
        objective: objective(&posterior, prior)?,
        final_residual: forms_residual(posterior.weights(), &forms),
        prior: prior.clone(),
        posterior,
        multipliers,
        iterations: 0,
        method: Method::Jeffrey,
    })
}

/// The maximum relative entropy posterior of `prior` under `cs`.
///
/// Runs feasibility triage, returns `no_op` when the prior already
/// satisfies every constraint, and uses the closed forms when `cs` is a
/// single event or partition constraint.
pub fn maxent_update<T: Real>(
    prior: &Distribution<T>,
    cs: &ConstraintSet<T>,
    opts: &SolverOptions<T>,
) -> Result<UpdateReport<T>> {
    opts.validate()?;
    prior.space().check_same(cs.space())?;
    if let Feasibility::Infeasible(reason) = triage_feasibility(prior, cs)? {
        return Err(Error::Infeasible(reason));
    }
    let cs = &clamp_to_range(prior, cs);
    let forms = cs.compile()?;
    let res = forms_residual(prior.weights(), &forms);
    if res <= opts.tol {
        check_conditionals(prior, cs, opts.tol)?;
        return Ok(no_op(prior, forms.len(), res));
    }
    if let [single] = cs.constraints() {
        match single {
            Constraint::EventProb { event, value } if *value == T::one() => {
                return conditionalize(prior, event);
            }
            Constraint::EventProb { event, value } if !event.is_empty() && !event.is_whole() => {
                let m = PartitionWeights::new(
                    Partition::binary(event)?,
                    vec![*value, T::one() - *value],
                )?;
                let mut report = jeffrey_update(prior, &m)?;
                report.multipliers = vec![report.multipliers[0] - report.multipliers[1]];
                return Ok(report);
            }
            Constraint::PartitionWeights(m) => return jeffrey_update(prior, m),
            _ => {}
        }
    }
    solve_dual(prior, cs, opts)
}

/// Always runs the dual Newton iteration from `λ = 0`.
pub fn solve_dual<T: Real>(
    prior: &Distribution<T>,
    cs: &ConstraintSet<T>,
    opts: &SolverOptions<T>,
) -> Result<UpdateReport<T>> {
    solve_dual_inner(prior, cs, opts, None)
}

/// Like [`solve_dual`] but starting from the given multipliers.
pub fn solve_dual_from<T: Real>(
    prior: &Distribution<T>,
    cs: &ConstraintSet<T>,
    opts: &SolverOptions<T>,
    start: &[T],
) -> Result<UpdateReport<T>> {
    solve_dual_inner(prior, cs, opts, Some(start))
}

fn solve_dual_inner<T: Real>(
    prior: &Distribution<T>,
    cs: &ConstraintSet<T>,
    opts: &SolverOptions<T>,
    start: Option<&[T]>,
) -> Result<UpdateReport<T>> {
    prior.space().check_same(cs.space())?;
    let forms = cs.compile()?;
    let report = solve_forms(prior, &forms, opts, start)?;
    check_conditionals(&report.posterior, cs, opts.tol)?;
    Ok(report)
}

/// A conditional constraint is only meaningful when its condition keeps
/// mass: the linearized residual bounds `|P(A|B) - v|` by `tol / P(B)`, so
/// `P(B)` at the scale of the tolerance means the conditional is not
/// actually enforced.
fn check_conditionals<T: Real>(post: &Distribution<T>, cs: &ConstraintSet<T>, tol: T) -> Result<()> {
    let floor = T::lit(ZERO_MASS).max(T::lit(DEGENERATE_FACTOR) * tol);
    for (k, c) in cs.constraints().iter().enumerate() {
        if let Constraint::CondProb { given, .. } = c {
            if post.prob(given)? <= floor {
                return Err(Error::DegenerateConditional { constraint: k });
            }
        }
    }
    Ok(())
}

/// Exponential-family dual restricted to the prior's support.
struct Dual<T> {
    support: Vec<usize>,
    log_prior: Vec<T>,
    /// `coeffs[j][s]`: form `j` at support point `s`.
    coeffs: Vec<Vec<T>>,
    targets: Vec<T>,
}

struct DualPoint<T> {
    value: T,
    post: Vec<T>,
}

impl<T: Real> Dual<T> {
    fn new(prior: &Distribution<T>, forms: &[LinearForm<T>]) -> Self {
        let support: Vec<usize> = (0..prior.len()).filter(|&i| prior.weight(i) > T::zero()).collect();
        Dual {
            log_prior: support.iter().map(|&i| prior.weight(i).ln()).collect(),
            coeffs: forms
                .iter()
                .map(|f| support.iter().map(|&i| f.coeffs[i]).collect())
                .collect(),
            targets: forms.iter().map(|f| f.target).collect(),
            support,
        }
    }

    fn eval(&self, lambda: &[T]) -> DualPoint<T> {
        let scores: Vec<T> = (0..self.support.len())
            .map(|s| {
                self.log_prior[s]
                    + lambda
                        .iter()
                        .zip(&self.coeffs)
                        .map(|(&l, a)| l * a[s])
                        .sum::<T>()
            })
            .collect();
        let top = scores.iter().copied().fold(T::neg_infinity(), T::max);
        let z: T = scores.iter().map(|&x| (x - top).exp()).sum();
        let log_z = top + z.ln();
        let post = scores.iter().map(|&x| (x - log_z).exp()).collect();
        DualPoint {
            value: dot(lambda, &self.targets) - log_z,
            post,
        }
    }

    fn means(&self, post: &[T]) -> Vec<T> {
        self.coeffs.iter().map(|a| dot(a, post)).collect()
    }

    fn residual(&self, means: &[T]) -> T {
        means
            .iter()
            .zip(&self.targets)
            .map(|(&m, &b)| (b - m).abs())
            .fold(T::zero(), T::max)
    }

    fn newton_direction(&self, post: &[T], means: &[T]) -> Option<Vec<T>> {
        let m = self.coeffs.len();
        let centered: Vec<Vec<T>> = self
            .coeffs
            .iter()
            .zip(means)
            .map(|(a, &mu)| a.iter().map(|&x| x - mu).collect())
            .collect();
        let mut cov = vec![T::zero(); m * m];
        for j in 0..m {
            for k in j..m {
                let c: T = centered[j]
                    .iter()
                    .zip(&centered[k])
                    .zip(post)
                    .map(|((&x, &y), &p)| p * x * y)
                    .sum();
                cov[j * m + k] = c;
                cov[k * m + j] = c;
            }
        }
        // The ridge must survive rounding against the diagonal in low
        // precision; in f64 the fixed floor dominates.
        let diag = (0..m).map(|j| cov[j * m + j]).fold(T::zero(), T::max);
        let ridge = T::lit(HESSIAN_RIDGE).max(T::lit(64.0) * T::epsilon() * diag);
        for j in 0..m {
            cov[j * m + j] += ridge;
        }
        let grad = self.targets.iter().zip(means).map(|(&b, &mu)| b - mu).collect();
        solve(cov, grad)
    }

    fn full_posterior(&self, n: usize, post: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); n];
        for (&i, &p) in self.support.iter().zip(post) {
            out[i] = p;
        }
        out
    }
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| x.abs()).fold(T::zero(), T::max)
}

/// Damped Newton ascent on the dual for raw linear forms. Does not run
/// triage, fast paths or conditional-degeneracy checks.
pub fn solve_forms<T: Real>(
    prior: &Distribution<T>,
    forms: &[LinearForm<T>],
    opts: &SolverOptions<T>,
    start: Option<&[T]>,
) -> Result<UpdateReport<T>> {
    opts.validate()?;
    for f in forms {
        if f.coeffs.len() != prior.len() {
            return Err(Error::LengthMismatch {
                expected: prior.len(),
                actual: f.coeffs.len(),
            });
        }
    }
    let dual = Dual::new(prior, forms);
    let mut lambda = match start {
        Some(s) if s.len() != forms.len() => {
            return Err(Error::LengthMismatch {
                expected: forms.len(),
                actual: s.len(),
            })
        }
        Some(s) => s.to_vec(),
        None => vec![T::zero(); forms.len()],
    };
    let slack = T::lit(16.0) * T::epsilon();
    let mut point = dual.eval(&lambda);
    let mut means = dual.means(&point.post);
    let mut res = dual.residual(&means);
    let mut history = vec![res];
    let mut iterations = 0;

    while res > opts.tol {
        if iterations >= opts.max_iter {
            break;
        }
        let bound_exceeded = max_abs(&lambda) > opts.multiplier_bound;
        if bound_exceeded && history.len() > STALL_WINDOW {
            let before = history[history.len() - 1 - STALL_WINDOW];
            if before - res < T::lit(STALL_IMPROVEMENT) {
                break;
            }
        }
        iterations += 1;
        let Some(dir) = dual.newton_direction(&point.post, &means) else {
            break;
        };
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<T> = lambda.iter().zip(&dir).map(|(&l, &d)| l + step * d).collect();
            let cand = dual.eval(&trial);
            if cand.value.is_finite()
                && cand.value >= point.value - slack * point.value.abs().max(T::one())
            {
                accepted = Some((trial, cand));
                break;
            }
            step /= T::lit(2.0);
        }
        if let Some((trial, cand)) = accepted {
            lambda = trial;
            point = cand;
            means = dual.means(&point.post);
            res = dual.residual(&means);
        }
        history.push(res);
        if lambda.iter().any(|l| !l.is_finite()) {
            break;
        }
    }

    if res > opts.tol || !res.is_finite() {
        let max_multiplier = max_abs(&lambda);
        if max_multiplier > opts.multiplier_bound || !max_multiplier.is_finite() {
            return Err(Error::Infeasible(Infeasibility::DivergentMultipliers {
                max_multiplier: max_multiplier.as_f64(),
                residual: res.as_f64(),
            }));
        }
        return Err(Error::NonConvergence {
            iterations,
            residual: res.as_f64(),
        });
    }

    let posterior = Distribution::normalized(prior.space(), dual.full_posterior(prior.len(), &point.post))?;
    Ok(UpdateReport {
        objective: objective(&posterior, prior)?,
        final_residual: forms_residual(posterior.weights(), forms),
        prior: prior.clone(),
        posterior,
        multipliers: lambda,
        iterations,
        method: Method::DualNewton,
    })
}
