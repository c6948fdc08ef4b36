//! Satisfaction of formulas at `(world, announced)` points.
//!
//! Two engines are provided. [`eval`] recurses directly on the satisfaction
//! clauses and serves as the oracle. [`check_dp`] first lists every
//! `(environment, subformula)` pair the recursion can visit, children before
//! parents ([`hlist`]), then fills a world × pair table in that order. Its
//! cost is polynomial in the number of worlds, the formula size and the
//! number of variables.

use std::collections::HashMap;

use crate::model::{EvalPoint, SemanticError, TrustModel, WorldId};
use crate::syntax::{Dataset, Formula};

/// Rejects formulas mentioning variables the model does not have.
pub fn check_formula_vars(m: &TrustModel, f: &Formula) -> Result<(), SemanticError> {
    for v in f.variables() {
        m.var_idx(&v)?;
    }
    Ok(())
}

fn check_inputs(m: &TrustModel, pt: &EvalPoint, f: &Formula) -> Result<usize, SemanticError> {
    if m.world_count() == 0 {
        return Err(SemanticError::EmptyModel);
    }
    let wi = m.check_point(pt)?;
    check_formula_vars(m, f)?;
    Ok(wi)
}

/// Direct recursive evaluation of `m, pt ⊩ f`.
pub fn eval(m: &TrustModel, pt: &EvalPoint, f: &Formula) -> Result<bool, SemanticError> {
    let wi = check_inputs(m, pt, f)?;
    Ok(eval_at(m, wi, &pt.announced, f))
}

// Inputs are validated by the caller.
fn eval_at(m: &TrustModel, wi: usize, announced: &Dataset, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => m.holds_atom_idx(wi, announced, p),
        Formula::Not(b) => !eval_at(m, wi, announced, b),
        Formula::Implies(a, b) => !eval_at(m, wi, announced, a) || eval_at(m, wi, announced, b),
        Formula::Belief { trust, data, body } => {
            let vars = m
                .var_indices(&data.union(announced))
                .expect("variables validated");
            (0..m.world_count()).all(|v| {
                !(m.same_blocks(wi, v, &vars) && m.trusts_idx(v, trust))
                    || eval_at(m, v, announced, body)
            })
        }
        Formula::Announce { data, body } => eval_at(m, wi, &announced.union(data), body),
    }
}

/// One `(environment, subformula)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HEntry<'f> {
    pub env: Dataset,
    pub formula: &'f Formula,
}

/// Every pair needed to evaluate a formula, children strictly before parents.
/// Its length is the number of nodes of the root formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HList<'f> {
    entries: Vec<HEntry<'f>>,
}

impl<'f> HList<'f> {
    pub fn entries(&self) -> &[HEntry<'f>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HEntry<'f>> {
        self.entries.iter()
    }

    /// The pairs an entry's value is computed from, in the order they are
    /// read.
    pub fn dependencies(entry: &HEntry<'f>) -> Vec<(Dataset, &'f Formula)> {
        match entry.formula {
            Formula::Atom(_) => vec![],
            Formula::Not(b) => vec![(entry.env.clone(), &**b)],
            Formula::Implies(a, b) => vec![(entry.env.clone(), &**a), (entry.env.clone(), &**b)],
            Formula::Belief { body, .. } => vec![(entry.env.clone(), &**body)],
            Formula::Announce { data, body } => vec![(entry.env.union(data), &**body)],
        }
    }
}

/// Builds the pair list for `f0` under initial environment `u0`.
pub fn hlist<'f>(u0: &Dataset, f0: &'f Formula) -> HList<'f> {
    let mut entries = Vec::with_capacity(f0.size());
    push_pairs(u0, f0, &mut entries);
    HList { entries }
}

fn push_pairs<'f>(env: &Dataset, f: &'f Formula, out: &mut Vec<HEntry<'f>>) {
    match f {
        Formula::Atom(_) => {}
        Formula::Not(b) | Formula::Belief { body: b, .. } => push_pairs(env, b, out),
        Formula::Implies(a, b) => {
            push_pairs(env, a, out);
            push_pairs(env, b, out);
        }
        Formula::Announce { data, body } => push_pairs(&env.union(data), body, out),
    }
    out.push(HEntry {
        env: env.clone(),
        formula: f,
    });
}

/// The filled world × pair table. A pair listed twice by [`hlist`] shares one
/// column; recomputing it writes the same values.
#[derive(Debug, Clone)]
pub struct SatTable<'m, 'f> {
    model: &'m TrustModel,
    hlist: HList<'f>,
    /// Column of each hlist entry.
    entry_cols: Vec<usize>,
    /// `cells[column][world]`
    cells: Vec<Vec<bool>>,
}

impl<'m, 'f> SatTable<'m, 'f> {
    pub fn hlist(&self) -> &HList<'f> {
        &self.hlist
    }

    /// Number of distinct pairs.
    pub fn column_count(&self) -> usize {
        self.cells.len()
    }

    /// Truth values of a pair across all worlds, in model world order.
    pub fn column(&self, env: &Dataset, f: &Formula) -> Option<&[bool]> {
        self.hlist
            .iter()
            .position(|e| &e.env == env && e.formula == f)
            .map(|i| self.cells[self.entry_cols[i]].as_slice())
    }

    pub fn get(&self, world: &WorldId, env: &Dataset, f: &Formula) -> Option<bool> {
        let wi = self.model.world_idx(world).ok()?;
        self.column(env, f).map(|col| col[wi])
    }

    /// Values of the root pair for every world.
    pub fn root(&self) -> &[bool] {
        let last = *self.entry_cols.last().expect("hlist is never empty");
        &self.cells[last]
    }

    /// `(world, entry index, value)` for every world and every entry, entry
    /// major, in the order the table was filled.
    pub fn rows(&self) -> impl Iterator<Item = (&WorldId, usize, bool)> + '_ {
        self.entry_cols.iter().enumerate().flat_map(move |(i, &c)| {
            self.model
                .worlds()
                .iter()
                .zip(self.cells[c].iter().copied())
                .map(move |(w, v)| (w, i, v))
        })
    }
}

/// Identity of a pair, given the columns of its immediate subpairs.
#[derive(PartialEq, Eq, Hash)]
enum PairKey<'f> {
    Atom(usize, &'f str),
    Not(usize, usize),
    Implies(usize, usize, usize),
    Belief(usize, &'f Dataset, &'f Dataset, usize),
    Announce(usize, &'f Dataset, usize),
}

/// Runs the table-filling algorithm for `f0` under environment `u0`.
pub fn sat_table<'m, 'f>(
    m: &'m TrustModel,
    u0: &Dataset,
    f0: &'f Formula,
) -> Result<SatTable<'m, 'f>, SemanticError> {
    m.check_dataset(u0)?;
    check_formula_vars(m, f0)?;
    let hl = hlist(u0, f0);
    let n = m.world_count();

    // Entries are in postorder: the last child of entry i is entry i - 1 and
    // `span[i]` counts the entries of i's subtree.
    let mut span: Vec<usize> = Vec::with_capacity(hl.len());
    let mut entry_cols: Vec<usize> = Vec::with_capacity(hl.len());
    let mut envs: HashMap<&Dataset, usize> = HashMap::new();
    let mut keys: HashMap<PairKey<'f>, usize> = HashMap::with_capacity(hl.len());
    let mut cells: Vec<Vec<bool>> = Vec::with_capacity(hl.len());

    for (i, e) in hl.entries.iter().enumerate() {
        let next_env = envs.len();
        let env = *envs.entry(&e.env).or_insert(next_env);
        let (key, len) = match e.formula {
            Formula::Atom(p) => (PairKey::Atom(env, p.as_str()), 1),
            Formula::Not(_) => (PairKey::Not(env, entry_cols[i - 1]), 1 + span[i - 1]),
            Formula::Implies(..) => {
                let b = i - 1;
                let a = b - span[b];
                (
                    PairKey::Implies(env, entry_cols[a], entry_cols[b]),
                    1 + span[a] + span[b],
                )
            }
            Formula::Belief { trust, data, .. } => (
                PairKey::Belief(env, trust, data, entry_cols[i - 1]),
                1 + span[i - 1],
            ),
            Formula::Announce { data, .. } => (
                PairKey::Announce(env, data, entry_cols[i - 1]),
                1 + span[i - 1],
            ),
        };
        span.push(len);
        if let Some(&col) = keys.get(&key) {
            entry_cols.push(col);
            continue;
        }
        let row: Vec<bool> = match (e.formula, &key) {
            (Formula::Atom(p), _) => (0..n).map(|w| m.holds_atom_idx(w, &e.env, p)).collect(),
            (_, PairKey::Not(_, c)) => cells[*c].iter().map(|v| !v).collect(),
            (_, PairKey::Implies(_, ca, cb)) => {
                (0..n).map(|w| !cells[*ca][w] || cells[*cb][w]).collect()
            }
            (Formula::Belief { trust, data, .. }, PairKey::Belief(.., c)) => {
                let body_vals = &cells[*c];
                let vars = m.var_indices(&data.union(&e.env))?;
                let trusted: Vec<bool> = (0..n).map(|w| m.trusts_idx(w, trust)).collect();
                (0..n)
                    .map(|w| {
                        let mut val = true;
                        for w2 in 0..n {
                            if trusted[w2] && !body_vals[w2] && m.same_blocks(w, w2, &vars) {
                                val = false;
                                break;
                            }
                        }
                        val
                    })
                    .collect()
            }
            (_, PairKey::Announce(_, _, c)) => cells[*c].clone(),
            _ => unreachable!("key kind follows formula kind"),
        };
        let col = cells.len();
        cells.push(row);
        keys.insert(key, col);
        entry_cols.push(col);
    }

    Ok(SatTable {
        model: m,
        hlist: hl,
        entry_cols,
        cells,
    })
}

/// Table-filling check of `m, pt ⊩ f0`.
pub fn check_dp(m: &TrustModel, pt: &EvalPoint, f0: &Formula) -> Result<bool, SemanticError> {
    let wi = check_inputs(m, pt, f0)?;
    let table = sat_table(m, &pt.announced, f0)?;
    Ok(table.root()[wi])
}

/// Truth of `f` at `(w, announced)` for every world `w`, via the table.
pub fn eval_all_worlds(
    m: &TrustModel,
    announced: &Dataset,
    f: &Formula,
) -> Result<Vec<bool>, SemanticError> {
    Ok(sat_table(m, announced, f)?.root().to_vec())
}

/// True iff `f` holds at every `(w, U)` for every world and every subset `U`
/// of the model's variables.
pub fn valid_on_model(m: &TrustModel, f: &Formula) -> Result<bool, SemanticError> {
    for u in m.all_datasets() {
        if !eval_all_worlds(m, &u, f)?.into_iter().all(|b| b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Worlds that refute a belief: reachable under the data plus announced
/// variables, trusting the trust set, and falsifying the body.
pub fn belief_counterexamples(
    m: &TrustModel,
    pt: &EvalPoint,
    f: &Formula,
) -> Result<Vec<WorldId>, SemanticError> {
    let Formula::Belief { trust, data, body } = f else {
        return Err(SemanticError::NotBelief(f.to_string()));
    };
    let wi = check_inputs(m, pt, f)?;
    let vars = m.var_indices(&data.union(&pt.announced))?;
    Ok((0..m.world_count())
        .filter(|&v| {
            m.same_blocks(wi, v, &vars)
                && m.trusts_idx(v, trust)
                && !eval_at(m, v, &pt.announced, body)
        })
        .map(|v| m.worlds()[v].clone())
        .collect())
}
