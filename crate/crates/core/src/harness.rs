//! Seeded random models, formulas and axiom instances, and the three
//! property suites built on them.
//!
//! Every trial draws from its own ChaCha stream whose seed is derived from
//! the base seed, a suite stream id and the trial index. Trials run in
//! parallel and are merged in index order, so a report depends only on the
//! parameters and the trial count.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::checker::{check_dp, eval, eval_all_worlds};
use crate::model::{EvalPoint, ModelFile, TrustModel, ValuationFile};
use crate::proofs::{instantiate, DatasetVar, Schema, Substitution};
use crate::syntax::{Dataset, Formula, VarName};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub max_worlds: usize,
    pub max_variables: usize,
    pub max_depth: usize,
    pub max_dataset_size: usize,
    pub atoms: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_worlds: 6,
            max_variables: 4,
            max_depth: 6,
            max_dataset_size: 3,
            atoms: 3,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn with_seed(seed: u64) -> Self {
        GenParams {
            seed,
            ..Self::default()
        }
    }

    /// Everything but `max_variables` must be at least 1.
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("max_worlds", self.max_worlds),
            ("max_depth", self.max_depth),
            ("max_dataset_size", self.max_dataset_size),
            ("atoms", self.atoms),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` in suite stream `stream`.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    mix(mix(mix(base) ^ stream.wrapping_mul(0xd6e8_feb8_6659_fd93)) ^ index)
}

pub fn var_names(n: usize) -> Dataset {
    Dataset::from_names((0..n).map(|i| format!("x{i}"))).expect("generated names are valid")
}

pub fn atom_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Random draws for one trial.
pub struct Generator {
    params: GenParams,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(params: GenParams) -> Self {
        Generator {
            params,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        }
    }

    pub fn params(&self) -> &GenParams {
        &self.params
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Each variable independently with probability 1/2, capped at
    /// `max_dataset_size` by random truncation.
    pub fn dataset(&mut self, vars: &Dataset) -> Dataset {
        self.dataset_capped(vars, self.params.max_dataset_size)
    }

    fn dataset_capped(&mut self, vars: &Dataset, cap: usize) -> Dataset {
        let mut picked: Vec<VarName> = vars
            .iter()
            .filter(|_| self.rng.gen_bool(0.5))
            .cloned()
            .collect();
        picked.shuffle(&mut self.rng);
        picked.truncate(cap);
        Dataset::new(picked)
    }

    /// Any subset of `vars`, uniformly.
    pub fn subset(&mut self, vars: &Dataset) -> Dataset {
        self.dataset_capped(vars, usize::MAX)
    }

    /// Uniform set partition growth: each world joins an existing block or
    /// opens a new one, all choices equally likely.
    fn partition(&mut self, worlds: &[String]) -> Vec<Vec<String>> {
        let mut blocks: Vec<Vec<String>> = Vec::new();
        for w in worlds {
            let b = self.rng.gen_range(0..=blocks.len());
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(w.clone());
        }
        blocks
    }

    pub fn model(&mut self) -> TrustModel {
        let nw = self.rng.gen_range(1..=self.params.max_worlds);
        let nv = self.rng.gen_range(0..=self.params.max_variables);
        self.model_with(nw, nv, 3)
    }

    fn model_with(&mut self, nw: usize, nv: usize, max_announced: usize) -> TrustModel {
        let worlds: Vec<String> = (0..nw).map(|i| format!("w{i}")).collect();
        let vars = var_names(nv);
        let mut file = ModelFile {
            worlds: worlds.clone(),
            variables: vars.names(),
            ..ModelFile::default()
        };
        for v in vars.iter() {
            let parts = self.partition(&worlds);
            file.indistinguishability
                .insert(v.as_str().to_string(), parts);
        }
        for w in &worlds {
            file.trustworthy
                .insert(w.clone(), self.subset(&vars).names());
        }
        let mut valuation = BTreeMap::new();
        for p in atom_names(self.params.atoms) {
            let mut entry = ValuationFile::default();
            for w in &worlds {
                if self.rng.gen_bool(0.4) {
                    entry.permanent.push(w.clone());
                }
                for _ in 0..self.rng.gen_range(0..=max_announced) {
                    entry
                        .announced
                        .push((w.clone(), self.subset(&vars).names()));
                }
            }
            valuation.insert(p, entry);
        }
        file.valuation = valuation;
        TrustModel::from_file(&file).expect("generated models are well formed")
    }

    /// Random formula over `vars` and the atom pool of depth at most
    /// `max_depth` (atoms have depth 0).
    pub fn formula(&mut self, vars: &Dataset) -> Formula {
        self.formula_depth(vars, self.params.max_depth)
    }

    pub fn formula_depth(&mut self, vars: &Dataset, depth: usize) -> Formula {
        let atom = |g: &mut Self| {
            let i = g.rng.gen_range(0..g.params.atoms);
            Formula::atom(format!("p{i}"))
        };
        if depth == 0 {
            return atom(self);
        }
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=29 => atom(self),
            30..=44 => Formula::not(self.formula_depth(vars, depth - 1)),
            45..=64 => {
                let a = self.formula_depth(vars, depth - 1);
                let b = self.formula_depth(vars, depth - 1);
                Formula::implies(a, b)
            }
            65..=84 => {
                let t = self.dataset(vars);
                let x = self.dataset(vars);
                Formula::belief(t, x, self.formula_depth(vars, depth - 1))
            }
            _ => {
                let x = self.dataset(vars);
                Formula::announce(x, self.formula_depth(vars, depth - 1))
            }
        }
    }

    pub fn point(&mut self, m: &TrustModel) -> EvalPoint {
        let w = m.worlds()[self.rng.gen_range(0..m.world_count())].clone();
        EvalPoint {
            world: w,
            announced: self.subset(m.variables()),
        }
    }

    /// Random instance of `family` over `vars`.
    pub fn instance(&mut self, family: Family, vars: &Dataset) -> Formula {
        let depth = self.params.max_depth;
        match family {
            Family::Axiom(schema) => {
                let mut s = Substitution::new();
                for &v in schema.formula_vars() {
                    let f = self.formula_depth(vars, depth);
                    s.formulas.insert(v, f);
                }
                for &v in schema.dataset_vars() {
                    let d = self.dataset(vars);
                    s.datasets.insert(v, d);
                }
                if schema == Schema::Monotonicity {
                    for (small, big) in [
                        (DatasetVar::T, DatasetVar::TPrime),
                        (DatasetVar::X, DatasetVar::XPrime),
                    ] {
                        let d = s.datasets[&small].union(&s.datasets[&big]);
                        s.datasets.insert(big, d);
                    }
                }
                instantiate(schema, &s).expect("substitution covers the schema")
            }
            Family::PositiveIntrospection => {
                let phi = self.formula_depth(vars, depth);
                let b = Formula::belief(self.dataset(vars), self.dataset(vars), phi);
                let Formula::Belief { data, .. } = &b else {
                    unreachable!()
                };
                let k = Formula::knows(data.clone(), b.clone());
                Formula::implies(b, k)
            }
            Family::BrokenTruth => {
                let phi = self.formula_depth(vars, depth);
                let mut t = self.dataset(vars);
                if t.is_empty() {
                    if let Some(v) = vars.iter().next() {
                        t = Dataset::new([v.clone()]);
                    }
                }
                let x = self.dataset(vars);
                Formula::implies(Formula::belief(t, x, phi.clone()), phi)
            }
        }
    }
}

/// `gen_model` for the parameters' own seed.
pub fn gen_model(params: &GenParams) -> TrustModel {
    Generator::new(*params).model()
}

/// `gen_formula` for the parameters' own seed.
pub fn gen_formula(params: &GenParams, vars: &Dataset) -> Formula {
    Generator::new(*params).formula(vars)
}

/// What the soundness suite instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Axiom(Schema),
    PositiveIntrospection,
    /// Truth with a nonempty trust set; not valid, used to test the suite.
    BrokenTruth,
}

impl Family {
    pub fn name(self) -> String {
        match self {
            Family::Axiom(s) => s.name().to_string(),
            Family::PositiveIntrospection => "PositiveIntrospection".into(),
            Family::BrokenTruth => "BrokenTruth".into(),
        }
    }

    /// The families checked by default: all axioms and positive
    /// introspection.
    pub fn sound() -> Vec<Family> {
        Schema::AXIOMS
            .iter()
            .map(|&s| Family::Axiom(s))
            .chain(std::iter::once(Family::PositiveIntrospection))
            .collect()
    }
}

/// A concrete failing check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub model: ModelFile,
    pub formula: String,
    pub world: String,
    pub announced: Vec<String>,
    pub expected: bool,
    pub got: bool,
    pub max_worlds: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub check: String,
    pub instance: Instance,
    /// Smallest failing rerun of the same seed with reduced parameters.
    pub shrunk: Option<Instance>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub skipped: usize,
    pub failures: Vec<Failure>,
    pub wall_time_ms: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Concatenates reports in order.
    pub fn merge(suite: &str, parts: Vec<SuiteReport>) -> SuiteReport {
        let mut out = SuiteReport {
            suite: suite.to_string(),
            trials: 0,
            skipped: 0,
            failures: Vec::new(),
            wall_time_ms: 0.0,
        };
        for p in parts {
            out.trials += p.trials;
            out.skipped += p.skipped;
            out.failures.extend(p.failures);
            out.wall_time_ms += p.wall_time_ms;
        }
        out
    }
}

enum Outcome {
    Pass,
    Skip,
    Fail(String, Box<Instance>),
}

fn instance(
    params: &GenParams,
    m: &TrustModel,
    f: &Formula,
    pt: &EvalPoint,
    expected: bool,
    got: bool,
) -> Box<Instance> {
    Box::new(Instance {
        model: m.to_file(),
        formula: f.to_string(),
        world: pt.world.to_string(),
        announced: pt.announced.names(),
        expected,
        got,
        max_worlds: params.max_worlds,
        max_depth: params.max_depth,
    })
}

/// First `(w, U)` at which `f` is false, scanning every `U ⊆ V`.
fn first_falsifier(m: &TrustModel, f: &Formula) -> Option<EvalPoint> {
    for u in m.all_datasets() {
        let vals = eval_all_worlds(m, &u, f).expect("generated inputs are valid");
        if let Some(wi) = vals.iter().position(|v| !v) {
            return Some(EvalPoint {
                world: m.worlds()[wi].clone(),
                announced: u,
            });
        }
    }
    None
}

fn check_round_trip(params: &GenParams, m: &TrustModel) -> Option<Outcome> {
    let reloaded = TrustModel::from_json(m.to_json().as_bytes());
    if reloaded.as_ref() == Ok(m) {
        return None;
    }
    let pt = EvalPoint {
        world: m.worlds()[0].clone(),
        announced: Dataset::empty(),
    };
    Some(Outcome::Fail(
        "model round trip".into(),
        instance(params, m, &Formula::atom("p0"), &pt, true, false),
    ))
}

fn soundness_trial(params: &GenParams, family: Family) -> Outcome {
    let mut g = Generator::new(*params);
    let m = g.model();
    if let Some(fail) = check_round_trip(params, &m) {
        return fail;
    }
    let f = g.instance(family, m.variables());
    match first_falsifier(&m, &f) {
        None => Outcome::Pass,
        Some(pt) => Outcome::Fail(family.name(), instance(params, &m, &f, &pt, true, false)),
    }
}

fn equivalence_trial(params: &GenParams) -> Outcome {
    let mut g = Generator::new(*params);
    let m = g.model();
    if let Some(fail) = check_round_trip(params, &m) {
        return fail;
    }
    let f = g.formula(m.variables());
    let pt = g.point(&m);
    let in_vars = f.variables().iter().all(|v| m.variables().contains(v));
    if f.depth() > params.max_depth || !in_vars {
        return Outcome::Fail(
            "formula generator contract".into(),
            instance(params, &m, &f, &pt, true, false),
        );
    }
    let expected = eval(&m, &pt, &f).expect("generated inputs are valid");
    let got = check_dp(&m, &pt, &f).expect("generated inputs are valid");
    if expected == got {
        Outcome::Pass
    } else {
        Outcome::Fail(
            "check_dp = eval".into(),
            instance(params, &m, &f, &pt, expected, got),
        )
    }
}

/// Draws `f` (half the time a random axiom instance, otherwise a random
/// formula) and, when `f` is valid on the model, checks both
/// necessitations of it.
fn necessitation_trial(params: &GenParams) -> Outcome {
    let mut g = Generator::new(*params);
    let m = g.model();
    let vars = m.variables().clone();
    let f = if g.rng().gen_bool(0.5) {
        let families = Family::sound();
        let fam = families[g.rng().gen_range(0..families.len())];
        g.instance(fam, &vars)
    } else {
        g.formula(&vars)
    };
    if first_falsifier(&m, &f).is_some() {
        return Outcome::Skip;
    }
    let t = g.dataset(&vars);
    let x = g.dataset(&vars);
    let nec_b = Formula::belief(t, x.clone(), f.clone());
    let nec_a = Formula::announce(x, f);
    for (name, h) in [("necessitation B", nec_b), ("necessitation [X]", nec_a)] {
        if let Some(pt) = first_falsifier(&m, &h) {
            return Outcome::Fail(name.into(), instance(params, &m, &h, &pt, true, false));
        }
    }
    Outcome::Pass
}

/// Reruns a failing seed with fewer worlds and shallower formulas and keeps
/// the smallest instance that still fails.
fn shrink(params: &GenParams, trial: &dyn Fn(&GenParams) -> Outcome) -> Option<Instance> {
    let mut best: Option<(usize, usize, Box<Instance>)> = None;
    for worlds in 1..=params.max_worlds {
        for depth in 1..=params.max_depth {
            if (worlds, depth) == (params.max_worlds, params.max_depth) {
                continue;
            }
            let p = GenParams {
                max_worlds: worlds,
                max_depth: depth,
                ..*params
            };
            if let Outcome::Fail(_, inst) = trial(&p) {
                let size = inst.model.worlds.len();
                let fsize = inst.formula.len();
                let better = match &best {
                    None => true,
                    Some((s, fs, _)) => (size, fsize) < (*s, *fs),
                };
                if better {
                    best = Some((size, fsize, inst));
                }
            }
        }
    }
    best.map(|(_, _, i)| *i)
}

const STREAM_EQUIVALENCE: u64 = 1;
const STREAM_NECESSITATION: u64 = 2;
const STREAM_SOUNDNESS: u64 = 16;

/// Runs `trials` seeded trials in parallel, in index order.
fn run_trials(
    suite: &str,
    params: &GenParams,
    stream: u64,
    trials: usize,
    trial: &(dyn Fn(&GenParams) -> Outcome + Sync),
) -> SuiteReport {
    let start = Instant::now();
    let outcomes: Vec<(u64, Outcome)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(params.seed, stream, i);
            (seed, trial(&GenParams { seed, ..*params }))
        })
        .collect();
    let mut report = collect(suite, params, outcomes, trial);
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

fn collect(
    suite: &str,
    params: &GenParams,
    outcomes: Vec<(u64, Outcome)>,
    trial: &(dyn Fn(&GenParams) -> Outcome + Sync),
) -> SuiteReport {
    let mut report = SuiteReport {
        suite: suite.to_string(),
        trials: 0,
        skipped: 0,
        failures: Vec::new(),
        wall_time_ms: 0.0,
    };
    for (seed, o) in outcomes {
        match o {
            Outcome::Pass => report.trials += 1,
            Outcome::Skip => report.skipped += 1,
            Outcome::Fail(check, inst) => {
                report.trials += 1;
                let p = GenParams { seed, ..*params };
                report.failures.push(Failure {
                    seed,
                    check,
                    instance: *inst,
                    shrunk: shrink(&p, trial),
                });
            }
        }
    }
    report
}

/// Instantiates each family `trials` times and checks the instance at every
/// `(w, U)` of a fresh model.
pub fn soundness_suite_with(params: &GenParams, trials: usize, families: &[Family]) -> SuiteReport {
    let parts = families
        .iter()
        .enumerate()
        .map(|(k, &fam)| {
            run_trials(
                &format!("soundness/{}", fam.name()),
                params,
                STREAM_SOUNDNESS + k as u64,
                trials,
                &move |p: &GenParams| soundness_trial(p, fam),
            )
        })
        .collect();
    SuiteReport::merge("soundness", parts)
}

pub fn soundness_suite(params: &GenParams, trials: usize) -> SuiteReport {
    soundness_suite_with(params, trials, &Family::sound())
}

/// Compares the two engines on random models, formulas and points.
pub fn equivalence_suite(params: &GenParams, trials: usize) -> SuiteReport {
    run_trials(
        "equivalence",
        params,
        STREAM_EQUIVALENCE,
        trials,
        &equivalence_trial,
    )
}

/// Runs until `trials` applicable trials (valid `f`) have been checked.
/// Attempts are capped at `100 * trials`; skipped attempts are counted.
pub fn necessitation_suite(params: &GenParams, trials: usize) -> SuiteReport {
    let start = Instant::now();
    let cap = trials.saturating_mul(100);
    let mut outcomes: Vec<(u64, Outcome)> = Vec::new();
    let mut applicable = 0;
    let mut next: u64 = 0;
    while applicable < trials && (next as usize) < cap {
        let batch = ((trials - applicable) * 2).clamp(64, 4096) as u64;
        let end = (next + batch).min(cap as u64);
        let chunk: Vec<(u64, Outcome)> = (next..end)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(params.seed, STREAM_NECESSITATION, i);
                (seed, necessitation_trial(&GenParams { seed, ..*params }))
            })
            .collect();
        next = end;
        for (seed, o) in chunk {
            if applicable == trials {
                break;
            }
            if !matches!(o, Outcome::Skip) {
                applicable += 1;
            }
            outcomes.push((seed, o));
        }
    }
    let mut report = collect("necessitation", params, outcomes, &necessitation_trial);
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

/// A larger model for timing: `worlds` worlds, `vars` variables each with
/// between 2 and 8 blocks, random trust sets and one atom per pool slot.
pub fn stress_model(worlds: usize, vars: usize, atoms: usize, seed: u64) -> TrustModel {
    let mut g = Generator::new(GenParams {
        max_worlds: worlds.max(1),
        max_variables: vars,
        atoms: atoms.max(1),
        seed,
        ..GenParams::default()
    });
    let names: Vec<String> = (0..worlds).map(|i| format!("w{i}")).collect();
    let vs = var_names(vars);
    let mut file = ModelFile {
        worlds: names.clone(),
        variables: vs.names(),
        ..ModelFile::default()
    };
    for v in vs.iter() {
        let k = g.rng.gen_range(2..=8);
        let mut parts = vec![Vec::new(); k];
        for w in &names {
            parts[g.rng.gen_range(0..k)].push(w.clone());
        }
        parts.retain(|p| !p.is_empty());
        file.indistinguishability
            .insert(v.as_str().to_string(), parts);
    }
    for w in &names {
        let t = g.dataset_capped(&vs, 3);
        file.trustworthy.insert(w.clone(), t.names());
    }
    for p in atom_names(atoms) {
        let mut entry = ValuationFile::default();
        for w in &names {
            if g.rng.gen_bool(0.5) {
                entry.permanent.push(w.clone());
            } else if g.rng.gen_bool(0.2) {
                entry
                    .announced
                    .push((w.clone(), g.dataset_capped(&vs, 4).names()));
            }
        }
        file.valuation.insert(p, entry);
    }
    TrustModel::from_file(&file).expect("stress model is well formed")
}

/// A formula with exactly `size` nodes over `vars`, biased towards belief
/// and announcement nodes, with datasets of at most `max_dataset` variables.
/// Beyond nesting depth 24 only implications are added, so the depth stays
/// logarithmic in `size` past that point.
pub fn sized_formula(
    size: usize,
    vars: &Dataset,
    max_dataset: usize,
    atoms: usize,
    seed: u64,
) -> Formula {
    assert!(size >= 1);
    let mut g = Generator::new(GenParams {
        atoms: atoms.max(1),
        seed,
        ..GenParams::default()
    });
    sized(&mut g, size, 0, vars, max_dataset)
}

fn sized(g: &mut Generator, n: usize, depth: usize, vars: &Dataset, cap: usize) -> Formula {
    if n == 1 {
        let i = g.rng.gen_range(0..g.params.atoms);
        return Formula::atom(format!("p{i}"));
    }
    let binary = n >= 3 && (depth >= 24 || g.rng.gen_bool(0.4));
    if binary {
        let left = if depth >= 24 {
            (n - 1) / 2
        } else {
            g.rng.gen_range(1..n - 1)
        };
        let a = sized(g, left, depth + 1, vars, cap);
        let b = sized(g, n - 1 - left, depth + 1, vars, cap);
        return Formula::implies(a, b);
    }
    let body = sized(g, n - 1, depth + 1, vars, cap);
    match g.rng.gen_range(0..5) {
        0 => Formula::not(body),
        1 | 2 => {
            let t = g.dataset_capped(vars, cap.min(2));
            let x = g.dataset_capped(vars, cap);
            Formula::belief(t, x, body)
        }
        _ => Formula::announce(g.dataset_capped(vars, cap), body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::valid_on_model;
    use crate::syntax::parse;

    #[test]
    fn seeds_are_distinct_and_stable() {
        assert_eq!(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
        assert_ne!(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
        assert_ne!(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenParams::with_seed(7);
        assert_eq!(gen_model(&p), gen_model(&p));
        let v = var_names(3);
        assert_eq!(gen_formula(&p, &v), gen_formula(&p, &v));
    }

    #[test]
    fn single_world_boundary() {
        let p = GenParams {
            max_worlds: 1,
            max_variables: 0,
            ..GenParams::with_seed(3)
        };
        let m = gen_model(&p);
        assert_eq!(m.world_count(), 1);
        assert!(m.variables().is_empty());
    }

    #[test]
    fn formula_contracts() {
        let v = var_names(4);
        for seed in 0..200 {
            let p = GenParams::with_seed(seed);
            let f = gen_formula(&p, &v);
            assert!(f.depth() <= p.max_depth);
            assert!(f.variables().iter().all(|x| v.contains(x)));
        }
    }

    #[test]
    fn params_validation() {
        assert!(GenParams::default().validate().is_ok());
        let p = GenParams {
            atoms: 0,
            ..GenParams::default()
        };
        assert!(p.validate().is_err());
        let p = GenParams {
            max_variables: 0,
            ..GenParams::default()
        };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn empty_suites_pass() {
        let p = GenParams::default();
        for r in [
            soundness_suite(&p, 0),
            equivalence_suite(&p, 0),
            necessitation_suite(&p, 0),
        ] {
            assert!(r.passed());
            assert_eq!(r.trials, 0);
        }
    }

    #[test]
    fn small_suites_pass() {
        let p = GenParams::with_seed(11);
        assert!(soundness_suite(&p, 20).passed());
        let r = equivalence_suite(&p, 200);
        assert!(r.passed());
        assert_eq!(r.trials, 200);
        let r = necessitation_suite(&p, 50);
        assert!(r.passed());
        assert_eq!(r.trials, 50);
    }

    #[test]
    fn broken_truth_is_caught_and_shrunk() {
        let p = GenParams::with_seed(5);
        let r = soundness_suite_with(&p, 200, &[Family::BrokenTruth]);
        assert!(!r.passed());
        let f = &r.failures[0];
        let shrunk = f.shrunk.as_ref().unwrap_or(&f.instance);
        assert!(shrunk.model.worlds.len() <= f.instance.model.worlds.len());
        // The reported failure replays from its seed.
        let replay = soundness_trial(&GenParams { seed: f.seed, ..p }, Family::BrokenTruth);
        assert!(matches!(replay, Outcome::Fail(..)));
    }

    #[test]
    fn suites_are_deterministic() {
        let p = GenParams::with_seed(9);
        let a = necessitation_suite(&p, 30);
        let b = necessitation_suite(&p, 30);
        assert_eq!((a.trials, a.skipped), (b.trials, b.skipped));
    }

    #[test]
    fn trivially_valid_necessitation() {
        let m = gen_model(&GenParams::with_seed(1));
        assert!(valid_on_model(&m, &parse("p0 -> p0").unwrap()).unwrap());
        let vars = m.variables();
        if let Some(x) = vars.iter().next() {
            let f = parse(&format!("[{x}](p0 -> p0)")).unwrap();
            assert!(valid_on_model(&m, &f).unwrap());
        }
    }

    #[test]
    fn stress_builders() {
        let m = stress_model(20, 10, 3, 1);
        assert_eq!(m.world_count(), 20);
        assert_eq!(m.variables().len(), 10);
        for size in [1, 2, 3, 10, 157, 2000] {
            let f = sized_formula(size, m.variables(), 4, 3, size as u64);
            assert_eq!(f.size(), size);
            assert!(f.depth() <= 24 + 2 * (usize::BITS - size.leading_zeros()) as usize + 2);
        }
    }
}
