//! Hilbert-style proof checking.
//!
//! Axiom lines carry an explicit substitution for their schema, so checking
//! a line is a structural comparison against the computed instance. Lines
//! justified as propositional tautologies are checked by truth table after
//! abstracting every modal subformula into an atom.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::syntax::{parse, Dataset, Formula, ParseError};

/// Upper bound on distinct atoms a tautology check will enumerate.
pub const TAUTOLOGY_ATOM_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Schema {
    Truth,
    DistributivityB,
    DistributivityA,
    NegIntrospection,
    Monotonicity,
    Trust,
    Combination,
    Commutativity,
    Duality,
    EmptyAnnouncement,
    Tautology,
}

/// Formula metavariables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormulaVar {
    Phi,
    Psi,
}

/// Dataset metavariables. `TPrime`/`XPrime` are the primed sets of
/// Monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DatasetVar {
    X,
    Y,
    T,
    TPrime,
    XPrime,
}

impl FormulaVar {
    pub fn key(self) -> &'static str {
        match self {
            FormulaVar::Phi => "phi",
            FormulaVar::Psi => "psi",
        }
    }
}

impl DatasetVar {
    pub fn key(self) -> &'static str {
        match self {
            DatasetVar::X => "X",
            DatasetVar::Y => "Y",
            DatasetVar::T => "T",
            DatasetVar::TPrime => "T'",
            DatasetVar::XPrime => "X'",
        }
    }
}

impl Schema {
    pub const AXIOMS: [Schema; 10] = [
        Schema::Truth,
        Schema::DistributivityB,
        Schema::DistributivityA,
        Schema::NegIntrospection,
        Schema::Monotonicity,
        Schema::Trust,
        Schema::Combination,
        Schema::Commutativity,
        Schema::Duality,
        Schema::EmptyAnnouncement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::Truth => "Truth",
            Schema::DistributivityB => "DistributivityB",
            Schema::DistributivityA => "DistributivityA",
            Schema::NegIntrospection => "NegIntrospection",
            Schema::Monotonicity => "Monotonicity",
            Schema::Trust => "Trust",
            Schema::Combination => "Combination",
            Schema::Commutativity => "Commutativity",
            Schema::Duality => "Duality",
            Schema::EmptyAnnouncement => "EmptyAnnouncement",
            Schema::Tautology => "Tautology",
        }
    }

    pub fn formula_vars(self) -> &'static [FormulaVar] {
        use FormulaVar::*;
        match self {
            Schema::DistributivityB | Schema::DistributivityA => &[Phi, Psi],
            Schema::Tautology => &[],
            _ => &[Phi],
        }
    }

    pub fn dataset_vars(self) -> &'static [DatasetVar] {
        use DatasetVar::*;
        match self {
            Schema::Truth => &[X],
            Schema::DistributivityB => &[T, X],
            Schema::DistributivityA => &[X],
            Schema::NegIntrospection => &[T, X],
            Schema::Monotonicity => &[T, TPrime, X, XPrime],
            Schema::Trust => &[T, X, Y],
            Schema::Combination => &[X, Y],
            Schema::Commutativity => &[T, X, Y],
            Schema::Duality => &[X],
            Schema::EmptyAnnouncement => &[],
            Schema::Tautology => &[],
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::AXIOMS
            .iter()
            .chain(std::iter::once(&Schema::Tautology))
            .copied()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown schema `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub formulas: BTreeMap<FormulaVar, Formula>,
    pub datasets: BTreeMap<DatasetVar, Dataset>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn formula(mut self, var: FormulaVar, f: Formula) -> Self {
        self.formulas.insert(var, f);
        self
    }

    pub fn dataset(mut self, var: DatasetVar, d: Dataset) -> Self {
        self.datasets.insert(var, d);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("{schema}: missing binding for `{var}`")]
    MissingBinding { schema: Schema, var: &'static str },
    #[error("{schema}: unexpected binding for `{var}`")]
    ExtraBinding { schema: Schema, var: &'static str },
    #[error("Monotonicity requires T ⊆ T' and X ⊆ X'")]
    SideCondition,
    #[error("Tautology lines are checked by truth table, not instantiated")]
    Tautology,
}

/// The formula a schema denotes under a substitution, with `<->` expanded.
pub fn instantiate(schema: Schema, subst: &Substitution) -> Result<Formula, InstantiateError> {
    if schema == Schema::Tautology {
        return Err(InstantiateError::Tautology);
    }
    for var in subst.formulas.keys() {
        if !schema.formula_vars().contains(var) {
            return Err(InstantiateError::ExtraBinding {
                schema,
                var: var.key(),
            });
        }
    }
    for var in subst.datasets.keys() {
        if !schema.dataset_vars().contains(var) {
            return Err(InstantiateError::ExtraBinding {
                schema,
                var: var.key(),
            });
        }
    }
    let f = |v: FormulaVar| {
        subst
            .formulas
            .get(&v)
            .cloned()
            .ok_or(InstantiateError::MissingBinding {
                schema,
                var: v.key(),
            })
    };
    let d = |v: DatasetVar| {
        subst
            .datasets
            .get(&v)
            .cloned()
            .ok_or(InstantiateError::MissingBinding {
                schema,
                var: v.key(),
            })
    };
    // Fetch every required binding first so errors are reported uniformly.
    for &v in schema.formula_vars() {
        f(v)?;
    }
    for &v in schema.dataset_vars() {
        d(v)?;
    }

    use DatasetVar::*;
    use FormulaVar::*;
    let none = Dataset::empty;
    let out = match schema {
        Schema::Truth => {
            let phi = f(Phi)?;
            Formula::implies(Formula::belief(none(), d(X)?, phi.clone()), phi)
        }
        Schema::DistributivityB => {
            let (phi, psi, t, x) = (f(Phi)?, f(Psi)?, d(T)?, d(X)?);
            let b = |g: Formula| Formula::belief(t.clone(), x.clone(), g);
            Formula::implies(
                b(Formula::implies(phi.clone(), psi.clone())),
                Formula::implies(b(phi), b(psi)),
            )
        }
        Schema::DistributivityA => {
            let (phi, psi, x) = (f(Phi)?, f(Psi)?, d(X)?);
            let a = |g: Formula| Formula::announce(x.clone(), g);
            Formula::implies(
                a(Formula::implies(phi.clone(), psi.clone())),
                Formula::implies(a(phi), a(psi)),
            )
        }
        Schema::NegIntrospection => {
            let (phi, t, x) = (f(Phi)?, d(T)?, d(X)?);
            let nb = Formula::not(Formula::belief(t, x.clone(), phi));
            Formula::implies(nb.clone(), Formula::belief(none(), x, nb))
        }
        Schema::Monotonicity => {
            let (phi, t, t2, x, x2) = (f(Phi)?, d(T)?, d(TPrime)?, d(X)?, d(XPrime)?);
            if !t.is_subset(&t2) || !x.is_subset(&x2) {
                return Err(InstantiateError::SideCondition);
            }
            Formula::implies(
                Formula::belief(t, x, phi.clone()),
                Formula::belief(t2, x2, phi),
            )
        }
        Schema::Trust => {
            let (phi, t, x, y) = (f(Phi)?, d(T)?, d(X)?, d(Y)?);
            Formula::belief(
                t.clone(),
                x,
                Formula::implies(Formula::belief(t, y, phi.clone()), phi),
            )
        }
        Schema::Combination => {
            let (phi, x, y) = (f(Phi)?, d(X)?, d(Y)?);
            Formula::iff(
                Formula::announce(x.clone(), Formula::announce(y.clone(), phi.clone())),
                Formula::announce(x.union(&y), phi),
            )
        }
        Schema::Commutativity => {
            let (phi, t, x, y) = (f(Phi)?, d(T)?, d(X)?, d(Y)?);
            Formula::iff(
                Formula::announce(
                    y.clone(),
                    Formula::belief(t.clone(), x.clone(), phi.clone()),
                ),
                Formula::belief(t, y.union(&x), Formula::announce(y, phi)),
            )
        }
        Schema::Duality => {
            let (phi, x) = (f(Phi)?, d(X)?);
            Formula::iff(
                Formula::not(Formula::announce(x.clone(), phi.clone())),
                Formula::announce(x, Formula::not(phi)),
            )
        }
        Schema::EmptyAnnouncement => {
            let phi = f(Phi)?;
            Formula::iff(Formula::announce(none(), phi.clone()), phi)
        }
        Schema::Tautology => unreachable!(),
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("tautology check needs {found} atoms, cap is {TAUTOLOGY_ATOM_CAP}")]
pub struct AtomCapExceeded {
    pub found: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Leaf<'f> {
    Atom(&'f str),
    Modal(&'f Formula),
}

/// Propositional validity over `!` and `->`, treating each distinct maximal
/// belief or announcement subformula as an opaque atom.
pub fn is_tautology(f: &Formula) -> Result<bool, AtomCapExceeded> {
    let mut leaves: HashMap<Leaf<'_>, usize> = HashMap::new();
    let skeleton = abstract_leaves(f, &mut leaves);
    let k = leaves.len();
    if k > TAUTOLOGY_ATOM_CAP {
        return Err(AtomCapExceeded { found: k });
    }
    Ok((0u32..(1u32 << k)).all(|row| skeleton.eval(row)))
}

/// Number of distinct atoms [`is_tautology`] would enumerate for `f`.
pub fn tautology_atoms(f: &Formula) -> usize {
    let mut leaves = HashMap::new();
    abstract_leaves(f, &mut leaves);
    leaves.len()
}

enum Skeleton {
    Var(usize),
    Not(Box<Skeleton>),
    Implies(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    fn eval(&self, row: u32) -> bool {
        match self {
            Skeleton::Var(i) => row & (1 << i) != 0,
            Skeleton::Not(b) => !b.eval(row),
            Skeleton::Implies(a, b) => !a.eval(row) || b.eval(row),
        }
    }
}

fn abstract_leaves<'f>(f: &'f Formula, leaves: &mut HashMap<Leaf<'f>, usize>) -> Skeleton {
    let mut leaf = |l: Leaf<'f>| {
        let next = leaves.len();
        Skeleton::Var(*leaves.entry(l).or_insert(next))
    };
    match f {
        Formula::Atom(p) => leaf(Leaf::Atom(p)),
        Formula::Belief { .. } | Formula::Announce { .. } => leaf(Leaf::Modal(f)),
        Formula::Not(b) => Skeleton::Not(Box::new(abstract_leaves(b, leaves))),
        Formula::Implies(a, b) => Skeleton::Implies(
            Box::new(abstract_leaves(a, leaves)),
            Box::new(abstract_leaves(b, leaves)),
        ),
    }
}

/// How a proof line is justified. Line references are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom {
        schema: Schema,
        subst: Substitution,
    },
    ModusPonens {
        from: usize,
        implication: usize,
    },
    NecBelief {
        from: usize,
        trust: Dataset,
        data: Dataset,
    },
    NecAnnounce {
        from: usize,
        data: Dataset,
    },
    /// Index (1-based) into the assumption list; derivations only.
    Assumption(usize),
    /// A previously checked theorem; derivations only.
    Theorem(Box<Proof>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub lines: Vec<ProofLine>,
    pub conclusion: Formula,
}

/// Outcome of checking a proof. `line` is 1-based; 0 refers to the proof as
/// a whole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted {
        conclusion: Formula,
    },
    Rejected {
        line: usize,
        reason: String,
    },
    /// A Tautology line has more distinct atoms than [`TAUTOLOGY_ATOM_CAP`].
    CapExceeded {
        line: usize,
        found: usize,
    },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }

    pub fn rejected_line(&self) -> Option<usize> {
        match self {
            Verdict::Rejected { line, .. } | Verdict::CapExceeded { line, .. } => Some(*line),
            Verdict::Accepted { .. } => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Theorem,
    Derivation { necessitation: bool },
}

/// Checks a theorem proof: axioms, tautologies, Modus Ponens and both
/// Necessitation rules.
pub fn check_proof(pf: &Proof) -> Verdict {
    check_lines(pf, &[], Mode::Theorem)
}

/// Checks `assumptions ⊢ conclusion`: lines may cite assumptions or whole
/// theorems, but the only inference rule is Modus Ponens. With no
/// assumptions every line is itself a theorem, so Necessitation is allowed
/// and this coincides with [`check_proof`].
pub fn check_derivation(assumptions: &[Formula], pf: &Proof) -> Verdict {
    let mode = Mode::Derivation {
        necessitation: assumptions.is_empty(),
    };
    check_lines(pf, assumptions, mode)
}

fn check_lines(pf: &Proof, assumptions: &[Formula], mode: Mode) -> Verdict {
    let Some(last) = pf.lines.last() else {
        return Verdict::Rejected {
            line: 0,
            reason: "proof has no lines".into(),
        };
    };
    for (i, line) in pf.lines.iter().enumerate() {
        if let Justification::Axiom {
            schema: Schema::Tautology,
            ..
        } = line.by
        {
            let found = tautology_atoms(&line.formula);
            if found > TAUTOLOGY_ATOM_CAP {
                return Verdict::CapExceeded { line: i + 1, found };
            }
        }
        if let Err(reason) = check_line(&pf.lines[..i], line, assumptions, mode) {
            return Verdict::Rejected {
                line: i + 1,
                reason,
            };
        }
    }
    if last.formula != pf.conclusion {
        return Verdict::Rejected {
            line: pf.lines.len(),
            reason: format!(
                "last line proves `{}`, not the stated conclusion `{}`",
                last.formula, pf.conclusion
            ),
        };
    }
    Verdict::Accepted {
        conclusion: pf.conclusion.clone(),
    }
}

fn earlier(prev: &[ProofLine], idx: usize) -> Result<&Formula, String> {
    if idx == 0 || idx > prev.len() {
        return Err(format!(
            "reference to line {idx}, only lines 1..={} precede this one",
            prev.len()
        ));
    }
    Ok(&prev[idx - 1].formula)
}

fn expect_claim(claimed: &Formula, derived: &Formula, what: &str) -> Result<(), String> {
    if claimed == derived {
        Ok(())
    } else {
        Err(format!(
            "{what} yields `{derived}`, line claims `{claimed}`"
        ))
    }
}

fn check_line(
    prev: &[ProofLine],
    line: &ProofLine,
    assumptions: &[Formula],
    mode: Mode,
) -> Result<(), String> {
    let claimed = &line.formula;
    match &line.by {
        Justification::Axiom {
            schema: Schema::Tautology,
            subst,
        } => {
            if subst != &Substitution::default() {
                return Err("Tautology lines take no substitution".into());
            }
            match is_tautology(claimed) {
                Ok(true) => Ok(()),
                Ok(false) => Err(format!("`{claimed}` is not a propositional tautology")),
                Err(e) => Err(e.to_string()),
            }
        }
        Justification::Axiom { schema, subst } => {
            let inst = instantiate(*schema, subst).map_err(|e| e.to_string())?;
            expect_claim(claimed, &inst, &format!("{schema} instance"))
        }
        Justification::ModusPonens { from, implication } => {
            let antecedent = earlier(prev, *from)?;
            let imp = earlier(prev, *implication)?;
            match imp {
                Formula::Implies(a, b) if a.as_ref() == antecedent => {
                    expect_claim(claimed, b, "Modus Ponens")
                }
                _ => Err(format!(
                    "line {implication} is not an implication from line {from}"
                )),
            }
        }
        Justification::NecBelief { from, trust, data } => {
            if mode
                == (Mode::Derivation {
                    necessitation: false,
                })
            {
                return Err("Necessitation not permitted under assumptions".into());
            }
            let body = earlier(prev, *from)?;
            let derived = Formula::belief(trust.clone(), data.clone(), body.clone());
            expect_claim(claimed, &derived, "belief Necessitation")
        }
        Justification::NecAnnounce { from, data } => {
            if mode
                == (Mode::Derivation {
                    necessitation: false,
                })
            {
                return Err("Necessitation not permitted under assumptions".into());
            }
            let body = earlier(prev, *from)?;
            let derived = Formula::announce(data.clone(), body.clone());
            expect_claim(claimed, &derived, "announcement Necessitation")
        }
        Justification::Assumption(idx) => {
            if mode == Mode::Theorem {
                return Err("assumptions are not allowed in a theorem proof".into());
            }
            let a = idx
                .checked_sub(1)
                .and_then(|i| assumptions.get(i))
                .ok_or_else(|| format!("no assumption {idx}"))?;
            expect_claim(claimed, a, &format!("assumption {idx}"))
        }
        Justification::Theorem(pf) => {
            if mode == Mode::Theorem {
                return Err("cited theorems are only allowed in derivations".into());
            }
            match check_proof(pf) {
                Verdict::Accepted { conclusion } => {
                    expect_claim(claimed, &conclusion, "cited theorem")
                }
                Verdict::Rejected { line, reason } => Err(format!(
                    "cited theorem rejected at its line {line}: {reason}"
                )),
                Verdict::CapExceeded { line, found } => Err(format!(
                    "cited theorem line {line} needs {found} atoms, cap is {TAUTOLOGY_ATOM_CAP}"
                )),
            }
        }
    }
}

// ---- JSON format ----

#[derive(Debug, Error)]
pub enum ProofFileError {
    #[error("malformed proof JSON: {0}")]
    Json(String),
    #[error("{path}: formula does not parse: {source}")]
    Formula {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NecBFile {
    from: usize,
    #[serde(rename = "T", default)]
    trust: Vec<String>,
    #[serde(rename = "X", default)]
    data: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NecAFile {
    from: usize,
    #[serde(rename = "X", default)]
    data: Vec<String>,
}

fn invalid(path: &str, message: impl Into<String>) -> ProofFileError {
    ProofFileError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

fn parse_formula_at(path: &str, text: &str) -> Result<Formula, ProofFileError> {
    parse(text).map_err(|source| ProofFileError::Formula {
        path: path.to_string(),
        source,
    })
}

fn dataset_at(path: &str, v: &Value) -> Result<Dataset, ProofFileError> {
    let arr = v
        .as_array()
        .ok_or_else(|| invalid(path, "expected an array of variable names"))?;
    let names = arr
        .iter()
        .map(|n| {
            n.as_str()
                .map(str::to_string)
                .ok_or_else(|| invalid(path, "variable names must be strings"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::from_names(names).map_err(|e| invalid(path, e.to_string()))
}

fn names_to_dataset(path: &str, names: &[String]) -> Result<Dataset, ProofFileError> {
    Dataset::from_names(names.iter().cloned()).map_err(|e| invalid(path, e.to_string()))
}

fn justification_from_value(path: &str, by: &Value) -> Result<Justification, ProofFileError> {
    let obj = by
        .as_object()
        .ok_or_else(|| invalid(path, "justification must be an object"))?;
    if let Some(name) = obj.get("axiom") {
        let name = name
            .as_str()
            .ok_or_else(|| invalid(path, "axiom name must be a string"))?;
        let schema: Schema = name.parse().map_err(|e: String| invalid(path, e))?;
        let mut subst = Substitution::new();
        for key in obj.keys() {
            if key != "axiom" && key != "subst" {
                return Err(invalid(path, format!("unexpected key `{key}`")));
            }
        }
        if let Some(s) = obj.get("subst") {
            let s = s
                .as_object()
                .ok_or_else(|| invalid(path, "subst must be an object"))?;
            for (key, val) in s {
                let kpath = format!("{path}.subst.{key}");
                match key.as_str() {
                    "phi" | "psi" => {
                        let text = val
                            .as_str()
                            .ok_or_else(|| invalid(&kpath, "formula binding must be a string"))?;
                        let var = if key == "phi" {
                            FormulaVar::Phi
                        } else {
                            FormulaVar::Psi
                        };
                        subst.formulas.insert(var, parse_formula_at(&kpath, text)?);
                    }
                    "X" | "Y" | "T" | "T'" | "X'" => {
                        let var = match key.as_str() {
                            "X" => DatasetVar::X,
                            "Y" => DatasetVar::Y,
                            "T" => DatasetVar::T,
                            "T'" => DatasetVar::TPrime,
                            _ => DatasetVar::XPrime,
                        };
                        subst.datasets.insert(var, dataset_at(&kpath, val)?);
                    }
                    _ => return Err(invalid(&kpath, "unknown metavariable")),
                }
            }
        }
        return Ok(Justification::Axiom { schema, subst });
    }
    let single = |key: &str| -> Result<&Value, ProofFileError> {
        if obj.len() != 1 {
            return Err(invalid(
                path,
                format!("`{key}` justification takes no other keys"),
            ));
        }
        Ok(&obj[key])
    };
    let decode = |key: &str, v: &Value| -> Result<usize, ProofFileError> {
        v.as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| invalid(path, format!("`{key}` expects a line number")))
    };
    if obj.contains_key("mp") {
        let v = single("mp")?;
        let pair: [usize; 2] =
            serde_json::from_value(v.clone()).map_err(|e| invalid(path, format!("mp: {e}")))?;
        return Ok(Justification::ModusPonens {
            from: pair[0],
            implication: pair[1],
        });
    }
    if obj.contains_key("necB") {
        let n: NecBFile = serde_json::from_value(single("necB")?.clone())
            .map_err(|e| invalid(path, format!("necB: {e}")))?;
        return Ok(Justification::NecBelief {
            from: n.from,
            trust: names_to_dataset(path, &n.trust)?,
            data: names_to_dataset(path, &n.data)?,
        });
    }
    if obj.contains_key("necA") {
        let n: NecAFile = serde_json::from_value(single("necA")?.clone())
            .map_err(|e| invalid(path, format!("necA: {e}")))?;
        return Ok(Justification::NecAnnounce {
            from: n.from,
            data: names_to_dataset(path, &n.data)?,
        });
    }
    if obj.contains_key("assumption") {
        let v = single("assumption")?;
        return Ok(Justification::Assumption(decode("assumption", v)?));
    }
    if obj.contains_key("theorem") {
        let v = single("theorem")?;
        let pf = proof_from_value(&format!("{path}.theorem"), v)?;
        return Ok(Justification::Theorem(Box::new(pf)));
    }
    Err(invalid(
        path,
        "expected one of `axiom`, `mp`, `necB`, `necA`, `assumption`, `theorem`",
    ))
}

fn proof_from_value(path: &str, v: &Value) -> Result<Proof, ProofFileError> {
    let obj = v
        .as_object()
        .ok_or_else(|| invalid(path, "proof must be an object"))?;
    for key in obj.keys() {
        if key != "conclusion" && key != "lines" {
            return Err(invalid(path, format!("unexpected key `{key}`")));
        }
    }
    let conclusion = obj
        .get("conclusion")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid(path, "missing string `conclusion`"))?;
    let conclusion = parse_formula_at(&format!("{path}.conclusion"), conclusion)?;
    let lines = obj
        .get("lines")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid(path, "missing array `lines`"))?;
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let lpath = format!("{path}.lines[{}]", i + 1);
        let lobj = line
            .as_object()
            .ok_or_else(|| invalid(&lpath, "line must be an object"))?;
        for key in lobj.keys() {
            if key != "formula" && key != "by" {
                return Err(invalid(&lpath, format!("unexpected key `{key}`")));
            }
        }
        let text = lobj
            .get("formula")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid(&lpath, "missing string `formula`"))?;
        let formula = parse_formula_at(&format!("{lpath}.formula"), text)?;
        let by = lobj
            .get("by")
            .ok_or_else(|| invalid(&lpath, "missing `by`"))?;
        out.push(ProofLine {
            formula,
            by: justification_from_value(&format!("{lpath}.by"), by)?,
        });
    }
    Ok(Proof {
        lines: out,
        conclusion,
    })
}

impl Proof {
    pub fn from_json(bytes: &[u8]) -> Result<Proof, ProofFileError> {
        let v: Value =
            serde_json::from_slice(bytes).map_err(|e| ProofFileError::Json(e.to_string()))?;
        proof_from_value("proof", &v)
    }

    pub fn to_json(&self) -> Value {
        let lines: Vec<Value> = self
            .lines
            .iter()
            .map(|l| {
                serde_json::json!({
                    "formula": l.formula.to_string(),
                    "by": justification_to_value(&l.by),
                })
            })
            .collect();
        serde_json::json!({
            "conclusion": self.conclusion.to_string(),
            "lines": lines,
        })
    }
}

fn justification_to_value(by: &Justification) -> Value {
    use serde_json::json;
    match by {
        Justification::Axiom { schema, subst } => {
            let mut s = serde_json::Map::new();
            for (k, f) in &subst.formulas {
                s.insert(k.key().into(), Value::String(f.to_string()));
            }
            for (k, d) in &subst.datasets {
                s.insert(k.key().into(), json!(d.names()));
            }
            if s.is_empty() {
                json!({ "axiom": schema.name() })
            } else {
                json!({ "axiom": schema.name(), "subst": s })
            }
        }
        Justification::ModusPonens { from, implication } => json!({ "mp": [from, implication] }),
        Justification::NecBelief { from, trust, data } => {
            json!({ "necB": { "from": from, "T": trust.names(), "X": data.names() } })
        }
        Justification::NecAnnounce { from, data } => {
            json!({ "necA": { "from": from, "X": data.names() } })
        }
        Justification::Assumption(i) => json!({ "assumption": i }),
        Justification::Theorem(pf) => json!({ "theorem": pf.to_json() }),
    }
}

/// Reads an assumption list: a JSON array of formula strings.
pub fn assumptions_from_json(bytes: &[u8]) -> Result<Vec<Formula>, ProofFileError> {
    let texts: Vec<String> =
        serde_json::from_slice(bytes).map_err(|e| ProofFileError::Json(e.to_string()))?;
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| parse_formula_at(&format!("assumptions[{}]", i + 1), t))
        .collect()
}
