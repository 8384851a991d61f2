//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p maxent-cli --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use maxent_core::axioms::{check_axiom4b, random_partition_case};
use maxent_core::coherence::{audit_admissibility, quadratic_loss, ForecastSystem, WorldValuation};
use maxent_core::comparison::{
    cf_approx_posterior, divergence_curve, jeffrey_posterior, uniform_grid, EvidenceScenario,
};
use maxent_core::{
    entropy, jeffrey_update, joint_entropy, maxent_update, mutual_information, solve_dual, Axis,
    Constraint, ConstraintSet, Distribution, Event, JointDistribution, Method, RandomVariable,
    SampleSpace, SolverOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn within(elapsed: Duration, limit_s: f64) -> Outcome {
    ensure!(
        elapsed.as_secs_f64() < limit_s,
        "took {} (limit {limit_s} s)",
        ms(elapsed)
    );
    Ok(String::new())
}

fn maxent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxent"))
        .args(args)
        .output()
        .expect("run maxent binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simplex(r: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..1.0)).collect();
    let t: f64 = raw.iter().sum();
    raw.iter().map(|w| w / t).collect()
}

// 1 ------------------------------------------------------------------------

/// Independent oracle: bisection on the tilt `t` of `w_i ∝ exp(t·i)` so the
/// mean face is 4.5.
fn die_oracle() -> Vec<f64> {
    let weights = |t: f64| {
        let raw: Vec<f64> = (1..=6).map(|i| (t * i as f64).exp()).collect();
        let z: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / z).collect::<Vec<_>>()
    };
    let mean = |t: f64| weights(t).iter().enumerate().map(|(i, w)| (i + 1) as f64 * w).sum::<f64>();
    let (mut lo, mut hi) = (0.0, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < 4.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    weights(0.5 * (lo + hi))
}

fn criterion_1() -> Outcome {
    let s = SampleSpace::numbered(6).unwrap();
    let face = RandomVariable::from_fn(&s, |i, _| (i + 1) as f64).unwrap();
    let cs = ConstraintSet::single(Constraint::expectation(face.clone(), 4.5), &s).unwrap();
    let start = Instant::now();
    let r = maxent_update(&Distribution::uniform(&s), &cs, &SolverOptions::default())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mean = r.posterior.expectation(&face).unwrap();
    ensure!((mean - 4.5).abs() <= 1e-8, "mean {mean}");
    let oracle = die_oracle();
    let err = r
        .posterior
        .weights()
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure!(err <= 1e-6, "max weight error {err:e}");
    ensure!(r.iterations <= 50, "{} Newton iterations", r.iterations);
    within(elapsed, 1.0)?;
    Ok(format!(
        "mean err {:.1e}, weight err {err:.1e}, {} iterations, {}",
        (mean - 4.5).abs(),
        r.iterations,
        ms(elapsed)
    ))
}

// 2 ------------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let opts = SolverOptions::default();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let (prior, m) = random_partition_case::<f64>(2024, trial, 12).unwrap();
        let cs = ConstraintSet::single(Constraint::PartitionWeights(m.clone()), prior.space()).unwrap();
        let dual = solve_dual(&prior, &cs, &opts).map_err(|e| format!("trial {trial}: {e}"))?;
        let closed = jeffrey_update(&prior, &m).map_err(|e| format!("trial {trial}: {e}"))?;
        let d = dual.posterior.max_abs_diff(&closed.posterior).unwrap();
        ensure!(d <= 1e-8, "trial {trial}: difference {d:e}");
        worst = worst.max(d);
    }
    let elapsed = start.elapsed();
    within(elapsed, 5.0)?;
    Ok(format!("100 cases, max diff {worst:.1e}, {}", ms(elapsed)))
}

// 3 ------------------------------------------------------------------------

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let (prior, m) = random_partition_case::<f64>(7, trial, 10).unwrap();
        let r = check_axiom4b(&prior, &m, 1e-8, 7).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!(r.passed, "trial {trial}: deviation {:e}", r.max_deviation);
        worst = worst.max(r.max_deviation);
    }
    let cli = maxent(&["axioms", "--trials", "100", "--seed", "7"]);
    ensure!(cli.status.code() == Some(0), "axioms exit {:?}", cli.status.code());
    ensure!(
        stdout(&cli).contains("axiom4b: 100/100 passed, max_deviation ≤ 1e-8"),
        "axioms summary: {}",
        stdout(&cli)
    );

    let tiger = maxent(&["demo", "tiger"]);
    ensure!(tiger.status.code() == Some(0), "tiger exit {:?}", tiger.status.code());
    let out = stdout(&tiger);
    let line = out
        .lines()
        .find(|l| l.starts_with("P(D1|T):"))
        .ok_or("tiger demo printed no P(D1|T) line")?;
    let nums: Vec<f64> = line.split_whitespace().filter_map(|t| t.parse().ok()).collect();
    ensure!(nums.len() == 2, "unexpected line `{line}`");
    ensure!((nums[0] - nums[1]).abs() <= 1e-9, "tiger `{line}`");
    Ok(format!("100 cases, max deviation {worst:.1e}; tiger `{line}`"))
}

// 4 ------------------------------------------------------------------------

fn rel_entropy(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| -a * (a / b).ln())
        .sum()
}

/// Best relative entropy over a 1e-3 grid of the slice `{p : a·p = b}` of
/// the simplex. The first `n-2` coordinates walk the grid; the last two are
/// solved from normalization and the constraint.
fn grid_best(prior: &[f64], a: &[f64], b: f64) -> Option<f64> {
    let n = prior.len();
    // put the pair with the most distinct coefficients last
    let mut order: Vec<usize> = (0..n).collect();
    let (mut bi, mut bj, mut gap) = (0, 1, -1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (a[i] - a[j]).abs() > gap {
                (bi, bj, gap) = (i, j, (a[i] - a[j]).abs());
            }
        }
    }
    if gap <= 0.0 {
        return None;
    }
    order.retain(|&k| k != bi && k != bj);
    order.push(bi);
    order.push(bj);
    let free = &order[..n - 2];
    let steps = 1000usize;
    let mut idx = vec![0usize; free.len()];
    let mut p = vec![0.0; n];
    let mut best: Option<f64> = None;
    loop {
        let used: usize = idx.iter().sum();
        if used <= steps {
            for (k, &i) in free.iter().enumerate() {
                p[i] = idx[k] as f64 / steps as f64;
            }
            let rest = 1.0 - used as f64 / steps as f64;
            let rhs = b - free.iter().map(|&i| a[i] * p[i]).sum::<f64>();
            // p_bi + p_bj = rest, a_bi p_bi + a_bj p_bj = rhs
            let x = (rhs - a[bj] * rest) / (a[bi] - a[bj]);
            let y = rest - x;
            if x >= -1e-15 && y >= -1e-15 {
                p[bi] = x.max(0.0);
                p[bj] = y.max(0.0);
                let h = rel_entropy(&p, prior);
                best = Some(best.map_or(h, |v: f64| v.max(h)));
            }
        }
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] <= steps {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return best;
        }
    }
}

fn criterion_4() -> Outcome {
    let mut r = rng(404);
    let opts = SolverOptions::default();
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    for case in 0..25 {
        let n = 2 + case % 3;
        let s = SampleSpace::numbered(n).unwrap();
        let prior = Distribution::new(&s, simplex(&mut r, n)).unwrap();
        let target = Distribution::new(&s, simplex(&mut r, n)).unwrap();
        let c = match case % 3 {
            0 => {
                let mut e = Event::from_predicate(&s, |_, _| r.gen_bool(0.5));
                if e.is_empty() || e.is_whole() {
                    e = Event::from_indices(&s, &[0]).unwrap();
                }
                Constraint::event_prob(e.clone(), target.prob(&e).unwrap())
            }
            1 => {
                let f = RandomVariable::from_fn(&s, |_, _| r.gen_range(-2.0..2.0)).unwrap();
                Constraint::expectation(f.clone(), target.expectation(&f).unwrap())
            }
            _ => {
                let a = Event::from_indices(&s, &[0]).unwrap();
                let b = Event::from_indices(&s, &(0..n - 1).collect::<Vec<_>>()).unwrap();
                Constraint::cond_prob(a.clone(), b.clone(), target.conditional_prob(&a, &b).unwrap())
            }
        };
        let cs = ConstraintSet::single(c, &s).unwrap();
        let rep = maxent_update(&prior, &cs, &opts).map_err(|e| format!("case {case}: {e}"))?;
        let form = &cs.compile().unwrap()[0];
        let best = grid_best(prior.weights(), &form.coeffs, form.target)
            .ok_or(format!("case {case}: empty grid slice"))?;
        let excess = best - rep.objective;
        ensure!(excess <= 1e-4, "case {case}: grid beats solver by {excess:e}");
        worst = worst.max(excess);
    }
    let elapsed = start.elapsed();
    within(elapsed, 30.0)?;
    Ok(format!("25 cases, max grid excess {worst:.1e}, {}", ms(elapsed)))
}

// 5 ------------------------------------------------------------------------

fn criterion_5() -> Outcome {
    let mut r = rng(505);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let (nr, nc) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let w = simplex(&mut r, nr * nc);
        let j = JointDistribution::new(&SampleSpace::numbered(nr).unwrap(), &SampleSpace::numbered(nc).unwrap(), w)
            .unwrap();
        let alt = entropy(&j.marginal(Axis::Row)).nats() + entropy(&j.marginal(Axis::Col)).nats()
            - joint_entropy(&j).nats();
        let d = (mutual_information(&j).nats() - alt).abs();
        ensure!(d <= 1e-9, "joint {k}: identity off by {d:e}");
        worst = worst.max(d);
    }
    for k in 0..100 {
        let n = r.gen_range(1..=10);
        let d = Distribution::new(&SampleSpace::numbered(n).unwrap(), simplex(&mut r, n)).unwrap();
        let gap = (mutual_information(&JointDistribution::identity_coupling(&d)).nats() - entropy(&d).nats()).abs();
        ensure!(gap <= 1e-9, "distribution {k}: I(B;B) - H(B) = {gap:e}");
        worst = worst.max(gap);
    }
    for k in 0..100 {
        let (nr, nc) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let p = Distribution::new(&SampleSpace::numbered(nr).unwrap(), simplex(&mut r, nr)).unwrap();
        let q = Distribution::new(&SampleSpace::numbered(nc).unwrap(), simplex(&mut r, nc)).unwrap();
        let mi = mutual_information(&JointDistribution::product(&p, &q)).nats().abs();
        ensure!(mi <= 1e-10, "independent joint {k}: I = {mi:e}");
    }
    Ok(format!("200 + 100 + 100 cases, max error {worst:.1e}"))
}

// 6 ------------------------------------------------------------------------

fn brute_dominated(x: &[f64], worlds: &[WorldValuation<f64>]) -> bool {
    let steps = 100usize;
    let base: Vec<f64> = worlds.iter().map(|w| quadratic_loss(x, w)).collect();
    let n = x.len();
    let mut idx = vec![0usize; n];
    let mut y = vec![0.0; n];
    loop {
        for k in 0..n {
            y[k] = idx[k] as f64 / steps as f64;
        }
        if worlds.iter().zip(&base).all(|(w, &b)| quadratic_loss(&y, w) < b - 1e-12) {
            return true;
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] <= steps {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return false;
        }
    }
}

fn criterion_6() -> Outcome {
    let mut r = rng(606);
    // (0.7, 0.7) on (E, not E)
    let s = SampleSpace::new(["E", "notE"]).unwrap();
    let e = Event::from_labels(&s, &["E"]).unwrap();
    let fs = ForecastSystem::new(&s, vec![e.clone(), e.complement()], vec![0.7f64, 0.7]).unwrap();
    let v = audit_admissibility(&fs);
    let dom = v.dominating.clone().ok_or("(0.7, 0.7) judged admissible")?;
    for w in fs.valuations() {
        ensure!((fs.loss(&w) - 0.58).abs() <= 1e-12, "loss {}", fs.loss(&w));
        ensure!((quadratic_loss(&dom, &w) - 0.50).abs() <= 1e-12, "dominating loss {}", quadratic_loss(&dom, &w));
    }

    // coherent systems from distributions
    for k in 0..100 {
        let n = r.gen_range(1..=6);
        let s = SampleSpace::numbered(n).unwrap();
        let d = Distribution::new(&s, simplex(&mut r, n)).unwrap();
        let events = (0..r.gen_range(1..=5))
            .map(|_| Event::from_predicate(&s, |_, _| r.gen_bool(0.5)))
            .collect();
        let fs = ForecastSystem::from_distribution(&d, events).unwrap();
        let v = audit_admissibility(&fs);
        ensure!(v.admissible, "distribution system {k} judged inadmissible (distance {:e})", v.distance);
    }

    // seeded systems on a 0.05 grid until 100 incoherent ones are seen
    let (mut incoherent, mut total) = (0, 0);
    while incoherent < 100 {
        total += 1;
        ensure!(total < 10_000, "could not draw 100 incoherent systems");
        let outcomes = r.gen_range(2..=4);
        let s = SampleSpace::numbered(outcomes).unwrap();
        let n = r.gen_range(1..=3);
        let events: Vec<Event> = (0..n).map(|_| Event::from_predicate(&s, |_, _| r.gen_bool(0.5))).collect();
        let xs: Vec<f64> = (0..n).map(|_| r.gen_range(0..=20) as f64 * 0.05).collect();
        let fs = ForecastSystem::new(&s, events, xs).unwrap();
        let worlds = fs.valuations();
        let v = audit_admissibility(&fs);
        let brute = brute_dominated(fs.forecasts(), &worlds);
        ensure!(v.admissible != brute, "system {total}: audit {} vs grid {}", v.admissible, brute);
        if let Some(dom) = &v.dominating {
            incoherent += 1;
            ensure!(v.margin > 0.0, "system {total}: margin {}", v.margin);
            for w in &worlds {
                ensure!(quadratic_loss(dom, w) < fs.loss(w), "system {total}: not dominating in world {}", w.outcome);
            }
        }
    }
    Ok(format!("100 coherent admissible; 100 incoherent dominated out of {total} drawn; (0.7,0.7): 0.58 vs 0.50"))
}

// 7 ------------------------------------------------------------------------

fn criterion_7() -> Outcome {
    let sc = EvidenceScenario::new(0.9f64, 0.3, 0.8).unwrap();
    ensure!((jeffrey_posterior(&sc) - 0.78).abs() <= 1e-12, "jeffrey {}", jeffrey_posterior(&sc));
    ensure!((cf_approx_posterior(&sc) - 0.72).abs() <= 1e-12, "cf {}", cf_approx_posterior(&sc));
    let mut r = rng(707);
    let grid = uniform_grid::<f64>(51).unwrap();
    for k in 0..100 {
        let (a, b) = (r.gen_range(0.0..=1.0), r.gen_range(0.0..=1.0));
        let mut qs = grid.clone();
        qs.extend((0..20).map(|_| r.gen_range(0.0..=1.0)));
        qs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let curve = divergence_curve(a, b, &qs).unwrap();
        for p in &curve {
            ensure!((p.divergence - b * (1.0 - p.q)).abs() <= 1e-12, "scenario {k} at q={}", p.q);
        }
        for pair in curve.windows(2) {
            ensure!(pair[0].divergence >= pair[1].divergence, "scenario {k}: not monotone");
        }
        ensure!(curve.last().unwrap().divergence == 0.0, "scenario {k}: nonzero at q = 1");
    }
    let cli = maxent(&["compare", "0.9", "0.3", "--grid-steps", "6"]);
    ensure!(cli.status.code() == Some(0), "compare exit {:?}", cli.status.code());
    ensure!(
        stdout(&cli).contains("\n0.8000000000 0.06000000000 0.7800000000 0.7200000000\n"),
        "compare output: {}",
        stdout(&cli)
    );
    Ok("100 scenarios; (0.9, 0.3, 0.8): 0.78 vs 0.72".into())
}

// 8 ------------------------------------------------------------------------

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn criterion_8() -> Outcome {
    let opts = SolverOptions::default();
    let s = SampleSpace::numbered(4).unwrap();
    let prior = Distribution::new(&s, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    let a = Event::from_labels(&s, &["1", "2"]).unwrap();
    let cs = ConstraintSet::single(Constraint::event_prob(a, 0.3), &s).unwrap();
    let r = maxent_update(&prior, &cs, &opts).map_err(|e| e.to_string())?;
    ensure!(r.method == Method::NoOp, "satisfied constraint gave {}", r.method);
    ensure!(r.posterior == prior, "no_op posterior differs from prior");

    let f = RandomVariable::from_fn(&s, |i, _| i as f64).unwrap();
    let cs = ConstraintSet::single(Constraint::expectation(f, 2.5), &s).unwrap();
    let first = maxent_update(&prior, &cs, &opts).map_err(|e| e.to_string())?;
    let second = maxent_update(&first.posterior, &cs, &opts).map_err(|e| e.to_string())?;
    ensure!(second.method == Method::NoOp, "re-update gave {}", second.method);
    ensure!(second.posterior == first.posterior, "re-update moved the posterior");

    let dir = tempfile::tempdir().unwrap();
    let satisfied = write(
        dir.path(),
        "satisfied.json",
        r#"{"space":["a","b"],"prior":[0.25,0.75],"constraints":[{"type":"event_prob","event":["a"],"value":0.25}]}"#,
    );
    let out = maxent(&["update", &satisfied]);
    ensure!(out.status.code() == Some(0), "satisfied scenario exit {:?}", out.status.code());
    ensure!(stdout(&out).contains("method: no_op\n"), "no_op not reported: {}", stdout(&out));

    let cases = [
        (
            "range.json",
            r#"{"space":["a","b"],"prior":"uniform","constraints":[{"type":"event_prob","event":["a"],"value":1.2}]}"#,
            "range:",
        ),
        (
            "support.json",
            r#"{"space":["a","b"],"prior":"uniform","constraints":[{"type":"expectation","variable":{"a":1,"b":2},"value":7}]}"#,
            "support range:",
        ),
        (
            "dead.json",
            r#"{"space":["a","b","c"],"prior":[0.5,0.5,0],"constraints":[{"type":"partition","cells":[["a","b"],["c"]],"weights":[0.6,0.4]}]}"#,
            "dead cell:",
        ),
    ];
    for (name, body, reason) in cases {
        let path = write(dir.path(), name, body);
        let out = maxent(&["update", &path]);
        ensure!(out.status.code() == Some(2), "{name}: exit {:?}", out.status.code());
        let text = stdout(&out);
        ensure!(text.contains(&format!("certificate: {reason}")), "{name}: report `{text}`");
    }
    Ok("no_op exact, idempotent; range / support range / dead cell all exit 2".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("die posterior", criterion_1),
        ("Jeffrey equivalence", criterion_2),
        ("within-cell conditionals preserved", criterion_3),
        ("optimality vs brute force", criterion_4),
        ("information identities", criterion_5),
        ("coherence audit", criterion_6),
        ("certainty-factor divergence", criterion_7),
        ("minimal change and idempotence", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = ms(start.elapsed());
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name} — {detail} [{elapsed}]", k + 1),
            Err(reason) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name} — {reason} [{elapsed}]", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
