//! Built-in worked examples.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::comparison::{
    cf_approx_posterior, divergence_curve, jeffrey_posterior, uniform_grid, EvidenceScenario,
};
use crate::constraints::Constraint;
use crate::error::Result;
use crate::info::Units;
use crate::report::{emit_queries, emit_report, fmt_num, Report};
use crate::scenario::{parse, Scenario};
use crate::solver::{maxent_update, SolverOptions};
use crate::space::Event;

pub const DIE_SCENARIO: &str = include_str!("../scenarios/die.json");
pub const TIGER_SCENARIO: &str = include_str!("../scenarios/tiger.json");
pub const COIN_SCENARIO: &str = include_str!("../scenarios/coin.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Demo {
    Die,
    Tiger,
    Coin,
    Mycin,
}

impl Demo {
    pub const ALL: [Demo; 4] = [Demo::Die, Demo::Tiger, Demo::Coin, Demo::Mycin];

    pub fn name(self) -> &'static str {
        match self {
            Demo::Die => "die",
            Demo::Tiger => "tiger",
            Demo::Coin => "coin",
            Demo::Mycin => "mycin",
        }
    }

    /// The scenario file behind the demo, if it has one.
    pub fn scenario_text(self) -> Option<&'static str> {
        match self {
            Demo::Die => Some(DIE_SCENARIO),
            Demo::Tiger => Some(TIGER_SCENARIO),
            Demo::Coin => Some(COIN_SCENARIO),
            Demo::Mycin => None,
        }
    }

    pub fn scenario(self) -> Option<Scenario> {
        self.scenario_text()
            .map(|t| parse(t).expect("built-in scenarios are valid"))
    }
}

impl FromStr for Demo {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Demo::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown demo `{s}`; expected one of die, tiger, coin, mycin"))
    }
}

fn ev(sc: &Scenario, labels: &[&str]) -> Event {
    Event::from_labels(sc.space(), labels).expect("demo labels exist")
}

/// Runs a demo and returns its report text.
pub fn run_demo(demo: Demo, opts: &SolverOptions<f64>, units: Units) -> Result<String> {
    let Some(sc) = demo.scenario() else {
        return Ok(mycin());
    };
    let mut out = String::new();
    let r = maxent_update(&sc.prior, &sc.constraints, opts)?;
    out.push_str(&emit_report(&Report::Update(&r), units));
    out.push_str(&emit_queries(&sc, Some(&r.posterior), units)?);
    match demo {
        Demo::Die => {
            let Constraint::Expectation { variable, .. } = &sc.constraints.constraints()[0] else {
                unreachable!("die scenario constrains the mean")
            };
            let _ = writeln!(out, "mean[posterior] = {}", fmt_num(r.posterior.expectation(variable)?));
            out.push_str(
                "note: the posterior tilts the uniform prior exponentially in the face value until the mean is 4.5\n",
            );
        }
        Demo::Tiger => {
            let t = ev(&sc, &["T&D1", "T&D2"]);
            let d1t = ev(&sc, &["T&D1"]);
            let before = sc.prior.conditional_prob(&d1t, &t)?;
            let after = r.posterior.conditional_prob(&d1t, &t)?;
            let _ = writeln!(out, "P(D1|T): prior {} posterior {}", fmt_num(before), fmt_num(after));
            out.push_str(
                "note: learning only P(T) = 0.8 rescales T and ~T and leaves probabilities conditional on T unchanged; the prior's P(D1|T) = 0.3 is illustrative\n",
            );
        }
        Demo::Coin => {
            let heads = ev(&sc, &["mint/biased/H", "mint/fair/H", "other/biased/H", "other/fair/H"]);
            let mint = ev(&sc, &["mint/biased/H", "mint/biased/T", "mint/fair/H", "mint/fair/T"]);
            let biased = ev(&sc, &["mint/biased/H", "mint/biased/T", "other/biased/H", "other/biased/T"]);
            let before = sc.prior.conditional_prob(&mint, &heads)?;
            let after = r.posterior.conditional_prob(&mint, &heads)?;
            let propensity = sc.prior.conditional_prob(&mint, &biased)?;
            let _ = writeln!(out, "P(mint|H): prior {} posterior {}", fmt_num(before), fmt_num(after));
            let _ = writeln!(out, "P(mint|biased): prior {}", fmt_num(propensity));
            out.push_str(
                "note: read as a direct constraint P(H) = 2/3, the update preserves P(mint|H); read as a propensity it is evidence of a biased coin, which would lower P(mint|H) toward P(mint|biased)\n",
            );
            out.push_str("note: the prior numbers are illustrative\n");
        }
        Demo::Mycin => unreachable!(),
    }
    Ok(out)
}

fn mycin() -> String {
    let mut out = String::new();
    let (a, b) = (0.9, 0.3);
    let grid = uniform_grid::<f64>(11).expect("11 >= 2");
    let points = divergence_curve(a, b, &grid).expect("grid lies in [0, 1]");
    out.push_str(&emit_report(
        &Report::Divergence {
            p_h_given_e: a,
            p_h_given_not_e: b,
            points: &points,
        },
        Units::Nats,
    ));
    let sc = EvidenceScenario::new(a, b, 0.8).expect("valid scenario");
    let _ = writeln!(
        out,
        "q = 0.8: jeffrey {} cf {}",
        fmt_num(jeffrey_posterior(&sc)),
        fmt_num(cf_approx_posterior(&sc))
    );
    out.push_str(
        "note: multiplying certainty factors drops the P(H|~E)(1-q) term of Jeffrey's rule, so the gap closes as the evidence becomes certain\n",
    );
    out
}
