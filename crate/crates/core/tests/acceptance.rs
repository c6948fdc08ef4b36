//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::hint::black_box;
use std::time::{Duration, Instant};

use common::*;
use datatrust::checker::{check_dp, eval, hlist, HList};
use datatrust::harness::{
    equivalence_suite, necessitation_suite, sized_formula, soundness_suite, stress_model,
    var_names, GenParams, Generator, SuiteReport,
};
use datatrust::model::EvalPoint;
use datatrust::proofs::{check_proof, Verdict};
use datatrust::syntax::{subformula_occurrences, Dataset, Formula};

const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const SOUNDNESS_TRIALS: usize = 1000;
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(60);
const EQUIVALENCE_TRIALS: usize = 10_000;
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(60);
const NECESSITATION_TRIALS: usize = 1000;
const HLIST_TRIALS: u64 = 1000;
const HLIST_SIZES: [usize; 6] = [10, 100, 1000, 2000, 5000, 10_000];
/// Measured times at sizes of at least this are compared with the fit.
const HLIST_FIT_FROM: usize = 1000;
const HLIST_FIT_FACTOR: f64 = 2.0;
const SCALING_WORLDS: usize = 200;
const SCALING_VARS: usize = 50;
const SCALING_NODES: usize = 500;
const SCALING_MAX_DATASET: usize = 10;
const SCALING_BUDGET: Duration = Duration::from_secs(1);
const SCALING_REPEATS: usize = 5;
const SCALING_MAX_RATIO: f64 = 4.0;
const MUTATIONS_PER_FIXTURE: usize = 20;
const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn criterion_golden() -> Outcome {
    // (model, world, announced, formula, verdict)
    let cases: &[(&str, &str, &[&str], &str, bool)] = &[
        ("m1.json", "w2", &[], "[t] B{t}{} decline", true),
        ("m1.json", "w3", &[], "[t] B{t}{} decline", true),
        ("m1.json", "w1", &[], "[t] B{t}{} decline", false),
        ("m1.json", "w2", &[], "B{t}{} [t] B{t}{} decline", false),
        ("m1.json", "w2", &[], "K{t} [t] B{t}{} decline", true),
        ("m1.json", "w2", &[], "K{t} tweet_explosions", true),
        ("m2.json", "w", &[], "B{}{x} p", true),
        ("m2.json", "w", &["x"], "B{}{x} p", false),
        ("m2.json", "w", &[], "[x] !B{}{x} p", true),
        ("m2.json", "w", &[], "[x] B{}{x} !p", true),
        ("m3.json", "w1", &[], "B{}{x} !B{}{y} p", true),
        ("m3.json", "w1", &[], "[x] !B{}{x} !B{}{y} p", true),
        ("m3.json", "w1", &[], "[x] B{}{x} !!B{}{y} p", true),
    ];
    let start = Instant::now();
    let mut matched = 0;
    let mut bad = Vec::new();
    for &(model, world, announced, text, expected) in cases {
        let m = load_model(model);
        let pt = EvalPoint::new(world, ds(announced));
        let phi = f(text);
        let o = eval(&m, &pt, &phi).unwrap();
        let d = check_dp(&m, &pt, &phi).unwrap();
        if o == expected && d == expected {
            matched += 1;
        } else {
            bad.push(format!("{model} {world} `{text}`: oracle {o} dp {d}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = matched == cases.len() && elapsed < GOLDEN_BUDGET;
    let mut detail = format!("{matched}/{} verdicts, {elapsed:.2?}", cases.len());
    for b in bad {
        detail.push_str(&format!("; {b}"));
    }
    outcome(pass, detail)
}

fn suite_outcome(r: &SuiteReport, budget: Option<Duration>, want_trials: usize) -> Outcome {
    let elapsed = Duration::from_secs_f64(r.wall_time_ms / 1e3);
    let in_time = budget.is_none_or(|b| elapsed < b);
    let pass = r.passed() && r.trials == want_trials && in_time;
    let mut detail = format!(
        "{} trials, {} skipped, {} failures, {elapsed:.2?}",
        r.trials,
        r.skipped,
        r.failures.len()
    );
    if let Some(fl) = r.failures.first() {
        detail.push_str(&format!(
            "; first: {} seed {} `{}`",
            fl.check, fl.seed, fl.instance.formula
        ));
    }
    outcome(pass, detail)
}

fn criterion_soundness() -> Outcome {
    let r = soundness_suite(&GenParams::with_seed(SEED), SOUNDNESS_TRIALS);
    let families = datatrust::harness::Family::sound().len();
    suite_outcome(&r, Some(SOUNDNESS_BUDGET), families * SOUNDNESS_TRIALS)
}

fn criterion_equivalence() -> Outcome {
    let r = equivalence_suite(&GenParams::with_seed(SEED), EQUIVALENCE_TRIALS);
    suite_outcome(&r, Some(EQUIVALENCE_BUDGET), EQUIVALENCE_TRIALS)
}

fn criterion_necessitation() -> Outcome {
    let params = GenParams::with_seed(SEED);
    assert!(params.max_variables <= 4);
    let r = necessitation_suite(&params, NECESSITATION_TRIALS);
    suite_outcome(&r, None, NECESSITATION_TRIALS)
}

/// Seconds per `hlist` call for a formula of `n` nodes, best of 7.
fn time_hlist(n: usize, vars: &Dataset) -> f64 {
    let f = sized_formula(n, vars, 3, 3, n as u64);
    let u = Dataset::empty();
    let calls = (200_000 / n).max(3);
    (0..7)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..calls {
                black_box(hlist(black_box(&u), black_box(&f)));
            }
            start.elapsed().as_secs_f64() / calls as f64
        })
        .fold(f64::INFINITY, f64::min)
}

fn postorder(hl: &HList<'_>) -> bool {
    let mut seen = std::collections::HashSet::new();
    hl.iter().all(|e| {
        let ok = HList::dependencies(e)
            .iter()
            .all(|d| seen.contains(&(d.0.clone(), d.1)));
        seen.insert((e.env.clone(), e.formula));
        ok
    })
}

fn criterion_hlist() -> Outcome {
    let vars = var_names(4);
    let mut structural = 0;
    for seed in 0..HLIST_TRIALS {
        let mut g = Generator::new(GenParams::with_seed(SEED ^ seed));
        let f = g.formula(&vars);
        let u = g.dataset(&vars);
        let hl = hlist(&u, &f);
        if postorder(&hl) && hl.len() == subformula_occurrences(&f) {
            structural += 1;
        }
    }

    let times: Vec<(f64, f64)> = HLIST_SIZES
        .iter()
        .map(|&n| (n as f64, time_hlist(n, &vars)))
        .collect();
    let k = times.len() as f64;
    let mx = times.iter().map(|t| t.0).sum::<f64>() / k;
    let my = times.iter().map(|t| t.1).sum::<f64>() / k;
    let sxy: f64 = times.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = times.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let mut worst: f64 = 1.0;
    let mut fits = true;
    for &(n, t) in &times {
        if (n as usize) < HLIST_FIT_FROM {
            continue;
        }
        let predicted = a + b * n;
        let ratio = t / predicted;
        if ratio.ln().abs() > worst.ln().abs() {
            worst = ratio;
        }
        if !(predicted > 0.0 && (1.0 / HLIST_FIT_FACTOR..=HLIST_FIT_FACTOR).contains(&ratio)) {
            fits = false;
        }
    }
    let pass = structural == HLIST_TRIALS && fits;
    outcome(
        pass,
        format!(
            "{structural}/{HLIST_TRIALS} structural, fit {:.3} us + {:.3} ns/node, worst measured/fit {worst:.2}",
            a * 1e6,
            b * 1e9
        ),
    )
}

fn dp_time(worlds: usize, f: &Formula) -> (Duration, bool) {
    let m = stress_model(worlds, SCALING_VARS, 3, SEED);
    let pt = EvalPoint {
        world: m.worlds()[0].clone(),
        announced: Dataset::empty(),
    };
    let start = Instant::now();
    let v = check_dp(&m, &pt, f).unwrap();
    (start.elapsed(), v)
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

fn criterion_scaling() -> Outcome {
    let vars = var_names(SCALING_VARS);
    let f = sized_formula(SCALING_NODES, &vars, SCALING_MAX_DATASET, 3, SEED);
    let beliefs = count(&f, |g| matches!(g, Formula::Belief { .. }));
    let announces = count(&f, |g| matches!(g, Formula::Announce { .. }));
    let (first, _) = dp_time(SCALING_WORLDS, &f);
    let base = median(
        (0..SCALING_REPEATS)
            .map(|_| dp_time(SCALING_WORLDS, &f).0)
            .collect(),
    );
    let doubled = median(
        (0..SCALING_REPEATS)
            .map(|_| dp_time(2 * SCALING_WORLDS, &f).0)
            .collect(),
    );
    let ratio = doubled.as_secs_f64() / base.as_secs_f64();
    let pass = f.size() == SCALING_NODES
        && beliefs > 0
        && announces > 0
        && first < SCALING_BUDGET
        && ratio <= SCALING_MAX_RATIO;
    outcome(
        pass,
        format!(
            "{} nodes ({beliefs} belief, {announces} announce), first run {first:.2?}, median {base:.2?} -> {doubled:.2?} at {} worlds, ratio {ratio:.2}",
            f.size(),
            2 * SCALING_WORLDS
        ),
    )
}

fn count(f: &Formula, pred: impl Fn(&Formula) -> bool + Copy) -> usize {
    let own = usize::from(pred(f));
    own + match f {
        Formula::Atom(_) => 0,
        Formula::Not(b) | Formula::Belief { body: b, .. } | Formula::Announce { body: b, .. } => {
            count(b, pred)
        }
        Formula::Implies(a, b) => count(a, pred) + count(b, pred),
    }
}

fn criterion_proofs() -> Outcome {
    let mut accepted = 0;
    let mut rejected = 0;
    let mut total = 0;
    let mut notes = Vec::new();
    for name in [EMPTY_ANNOUNCEMENT, POSITIVE_INTROSPECTION] {
        let pf = load_proof(name);
        if matches!(check_proof(&pf), Verdict::Accepted { .. }) {
            accepted += 1;
        } else {
            notes.push(format!("{name} not accepted"));
        }
        let cat = catalog(name);
        if cat.len() != MUTATIONS_PER_FIXTURE {
            notes.push(format!("{name}: {} mutations", cat.len()));
        }
        for (line, m) in cat {
            total += 1;
            match check_proof(&apply(&pf, line, &m)).rejected_line() {
                Some(l) if l == line => rejected += 1,
                other => notes.push(format!("{name} {m:?} at {line}: {other:?}")),
            }
        }
    }
    let pass = accepted == 2 && rejected == 2 * MUTATIONS_PER_FIXTURE && notes.is_empty();
    let mut detail = format!(
        "{accepted}/2 fixtures accepted, {rejected}/{total} mutations rejected at their line"
    );
    for n in notes {
        detail.push_str(&format!("; {n}"));
    }
    outcome(pass, detail)
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 golden verdicts", criterion_golden()),
        ("2 soundness suite", criterion_soundness()),
        ("3 oracle/DP equivalence", criterion_equivalence()),
        ("4 necessitation preservation", criterion_necessitation()),
        ("5 HList structure and linearity", criterion_hlist()),
        ("6 polynomial scaling", criterion_scaling()),
        ("7 proof fixtures and mutations", criterion_proofs()),
    ];
    let stand_in = [1usize, 2, 3, 6].iter().all(|&i| results[i].1.pass);
    results.push((
        "8 completeness stand-in",
        outcome(
            stand_in,
            "not reproducible on finite models; stands on criteria 2, 3, 4 and 7",
        ),
    ));
    let mut all = true;
    for (name, o) in &results {
        all &= o.pass;
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
