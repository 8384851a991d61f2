//! Deterministic, line-oriented text reports.
//!
//! Every real number goes through [`fmt_num`]: rounded to 10 significant
//! digits, printed positionally for magnitudes in `[1e-5, 1e10)` and in
//! scientific notation otherwise. The output depends only on the bits of the
//! input, so identical inputs give byte-identical reports.

use std::fmt::Write as _;

use crate::axioms::AxiomReport;
use crate::coherence::{quadratic_loss, AdmissibilityVerdict, ForecastSystem, WorldValuation};
use crate::comparison::DivergencePoint;
use crate::error::{Infeasibility, Result};
use crate::info::{entropy, mutual_information, InfoValue, Units};
use crate::scenario::{On, Query, Scenario};
use crate::solver::UpdateReport;
use crate::space::{Distribution, Event, JointDistribution};

pub const SIGNIFICANT_DIGITS: usize = 10;

/// `x` to 10 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        let (int, frac) = digits.split_at(split);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

pub fn fmt_info(v: InfoValue<f64>, units: Units) -> String {
    format!("{} {}", fmt_num(v.in_units(units)), units.name())
}

fn fmt_event(e: &Event) -> String {
    format!("{{{}}}", e.labels().join(","))
}

fn distribution_lines(out: &mut String, d: &Distribution<f64>) {
    for (label, &w) in d.space().labels().iter().zip(d.weights()) {
        let _ = writeln!(out, "{label} {}", fmt_num(w));
    }
}

/// Anything the CLI prints as a report.
#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Update(&'a UpdateReport<f64>),
    Axiom(&'a AxiomReport<f64>),
    Verdict {
        system: &'a ForecastSystem<f64>,
        verdict: &'a AdmissibilityVerdict<f64>,
    },
    Divergence {
        p_h_given_e: f64,
        p_h_given_not_e: f64,
        points: &'a [DivergencePoint<f64>],
    },
    Infeasible(&'a Infeasibility),
}

pub fn emit_report(report: &Report<'_>, units: Units) -> String {
    let mut out = String::new();
    match *report {
        Report::Update(r) => {
            let _ = writeln!(out, "method: {}", r.method);
            let _ = writeln!(out, "iterations: {}", r.iterations);
            let _ = writeln!(out, "final_residual: {}", fmt_num(r.final_residual));
            let _ = writeln!(out, "relative_entropy: {}", fmt_info(InfoValue(r.objective), units));
            let mult: Vec<String> = r.multipliers.iter().map(|&m| fmt_num(m)).collect();
            let _ = writeln!(out, "multipliers: {}", mult.join(" "));
            out.push_str("prior:\n");
            distribution_lines(&mut out, &r.prior);
            out.push_str("posterior:\n");
            distribution_lines(&mut out, &r.posterior);
        }
        Report::Axiom(r) => {
            let _ = writeln!(out, "check: {}", r.check);
            for c in &r.per_cell {
                match c.deviation {
                    Some(d) => {
                        let _ = writeln!(out, "cell {}: deviation {}", c.cell, fmt_num(d));
                    }
                    None => {
                        let _ = writeln!(out, "cell {}: skipped (no mass)", c.cell);
                    }
                }
            }
            let _ = writeln!(out, "max_deviation: {}", fmt_num(r.max_deviation));
            let _ = writeln!(out, "tol: {}", fmt_num(r.tol));
            let _ = writeln!(out, "passed: {}", r.passed);
        }
        Report::Verdict { system, verdict } => {
            let labels = system.space().labels();
            for (e, &x) in system.events().iter().zip(system.forecasts()) {
                let _ = writeln!(out, "forecast {} {}", fmt_event(e), fmt_num(x));
            }
            let _ = writeln!(out, "admissible: {}", verdict.admissible);
            let _ = writeln!(out, "distance: {}", fmt_num(verdict.distance));
            if let Some(dom) = &verdict.dominating {
                let xs: Vec<String> = dom.iter().map(|&x| fmt_num(x)).collect();
                let _ = writeln!(out, "dominating: {}", xs.join(" "));
            }
            for w in system.valuations() {
                let _ = write!(out, "world {}: loss {}", labels[w.outcome], fmt_num(system.loss(&w)));
                if let Some(dom) = &verdict.dominating {
                    let _ = write!(out, " dominating_loss {}", fmt_num(quadratic_loss(dom, &w)));
                }
                out.push('\n');
            }
            let _ = writeln!(out, "margin: {}", fmt_num(verdict.margin));
        }
        Report::Divergence {
            p_h_given_e,
            p_h_given_not_e,
            points,
        } => {
            let _ = writeln!(
                out,
                "# p_h_given_e={} p_h_given_not_e={}",
                fmt_num(p_h_given_e),
                fmt_num(p_h_given_not_e)
            );
            out.push_str("# q divergence jeffrey cf\n");
            for p in points {
                let _ = writeln!(
                    out,
                    "{} {} {} {}",
                    fmt_num(p.q),
                    fmt_num(p.divergence),
                    fmt_num(p.jeffrey),
                    fmt_num(p.cf)
                );
            }
        }
        Report::Infeasible(c) => {
            out.push_str("status: infeasible\n");
            let _ = writeln!(out, "certificate: {c}");
        }
    }
    out
}

/// Answers the scenario's queries against the prior and, when available,
/// the posterior. Queries on a missing posterior use the prior.
pub fn emit_queries(
    sc: &Scenario,
    posterior: Option<&Distribution<f64>>,
    units: Units,
) -> Result<String> {
    let mut out = String::new();
    let pick = |on: On| match (on, posterior) {
        (On::Posterior, Some(p)) => p,
        _ => &sc.prior,
    };
    for q in &sc.queries {
        match q {
            Query::Prob { event, on } => {
                let p = pick(*on).prob(event)?;
                let _ = writeln!(out, "prob[{on}] {} = {}", fmt_event(event), fmt_num(p));
            }
            Query::CondProb { event, given, on } => {
                let value = match pick(*on).conditional_prob(event, given) {
                    Ok(p) => fmt_num(p),
                    Err(crate::error::Error::ZeroMassEvent { .. }) => "undefined".into(),
                    Err(e) => return Err(e),
                };
                let _ = writeln!(
                    out,
                    "cond_prob[{on}] {} | {} = {value}",
                    fmt_event(event),
                    fmt_event(given)
                );
            }
            Query::Entropy { on } => {
                let _ = writeln!(out, "entropy[{on}] = {}", fmt_info(entropy(pick(*on)), units));
            }
            Query::MutualInformation { rows, cols, on } => {
                let j = JointDistribution::of_partitions(pick(*on), rows, cols)?;
                let _ = writeln!(
                    out,
                    "mutual_information[{on}] = {}",
                    fmt_info(mutual_information(&j), units)
                );
            }
            Query::Posterior => {
                out.push_str("posterior:\n");
                distribution_lines(&mut out, pick(On::Posterior));
            }
        }
    }
    Ok(out)
}

/// Per-world losses of an arbitrary forecast vector.
pub fn losses(forecasts: &[f64], worlds: &[WorldValuation<f64>]) -> Vec<f64> {
    worlds.iter().map(|w| quadratic_loss(forecasts, w)).collect()
}
