//! Finite trustworthiness models.
//!
//! A model has a set of worlds, one partition of the worlds per data
//! variable (the indistinguishability relation), a trust set per world and a
//! valuation that may depend on the announced dataset.
//!
//! Partitions are stored as a dense `block[var][world]` index, so every
//! `~_x` is an equivalence relation by construction and membership tests are
//! a single comparison.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{is_identifier, Dataset, VarName, RESERVED_ATOM};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId(String);

impl WorldId {
    pub fn new(name: impl Into<String>) -> Self {
        WorldId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for WorldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A `(world, announced dataset)` pair at which formulas are evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvalPoint {
    pub world: WorldId,
    pub announced: Dataset,
}

impl EvalPoint {
    pub fn new(world: impl Into<String>, announced: Dataset) -> Self {
        EvalPoint {
            world: WorldId::new(world),
            announced,
        }
    }
}

/// Finite encoding of `pi(p)`: `p` holds at `(w, U)` iff `w` is in
/// `permanent` or `(w, U)` is listed in `announced`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValuationEntry {
    permanent: Vec<bool>,
    announced: HashSet<(usize, Dataset)>,
}

/// Unknown worlds or variables, or an empty model, when querying a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no worlds to evaluate")]
    EmptyModel,
    #[error("formula is not a belief: {0}")]
    NotBelief(String),
}

/// Problems found while loading a model file. `path` points into the JSON
/// document, e.g. `indistinguishability.t[1]`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed model JSON: {0}")]
    Json(String),
    #[error("{path}: invalid name `{name}`")]
    InvalidName { path: String, name: String },
    #[error("{path}: duplicate world `{world}`")]
    DuplicateWorld { path: String, world: String },
    #[error("{path}: duplicate variable `{var}`")]
    DuplicateVariable { path: String, var: String },
    #[error("{path}: unknown world `{world}`")]
    UnknownWorld { path: String, world: String },
    #[error("{path}: unknown variable `{var}`")]
    UnknownVariable { path: String, var: String },
    #[error("{path}: world `{world}` appears in more than one block")]
    OverlappingBlocks { path: String, world: String },
    #[error("{path}: world `{world}` is not covered by any block")]
    UncoveredWorld { path: String, world: String },
    #[error("{path}: empty block")]
    EmptyBlock { path: String },
}

/// On-disk JSON shape. Absent keys mean empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub worlds: Vec<String>,
    #[serde(default)]
    pub variables: Vec<String>,
    #[serde(default)]
    pub indistinguishability: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub trustworthy: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, ValuationFile>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuationFile {
    #[serde(default)]
    pub permanent: Vec<String>,
    #[serde(default)]
    pub announced: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustModel {
    worlds: Vec<WorldId>,
    world_index: HashMap<WorldId, usize>,
    variables: Dataset,
    var_index: HashMap<VarName, usize>,
    /// `blocks[v][w]`: block number of world `w` in the partition of variable `v`.
    blocks: Vec<Vec<u32>>,
    block_counts: Vec<usize>,
    trust: Vec<Dataset>,
    valuation: BTreeMap<String, ValuationEntry>,
}

impl TrustModel {
    /// Parses and validates a JSON model file.
    pub fn from_json(bytes: &[u8]) -> Result<Self, ModelError> {
        let file: ModelFile =
            serde_json::from_slice(bytes).map_err(|e| ModelError::Json(e.to_string()))?;
        TrustModel::from_file(&file)
    }

    pub fn from_file(file: &ModelFile) -> Result<Self, ModelError> {
        let mut worlds = Vec::with_capacity(file.worlds.len());
        let mut world_index = HashMap::new();
        for (i, w) in file.worlds.iter().enumerate() {
            let path = format!("worlds[{i}]");
            if !is_identifier(w) {
                return Err(ModelError::InvalidName {
                    path,
                    name: w.clone(),
                });
            }
            let id = WorldId::new(w.clone());
            if world_index.insert(id.clone(), i).is_some() {
                return Err(ModelError::DuplicateWorld {
                    path,
                    world: w.clone(),
                });
            }
            worlds.push(id);
        }

        let mut var_names = Vec::with_capacity(file.variables.len());
        for (i, v) in file.variables.iter().enumerate() {
            let path = format!("variables[{i}]");
            let name = VarName::new(v.clone()).map_err(|_| ModelError::InvalidName {
                path: path.clone(),
                name: v.clone(),
            })?;
            if var_names.contains(&name) {
                return Err(ModelError::DuplicateVariable {
                    path,
                    var: v.clone(),
                });
            }
            var_names.push(name);
        }
        let variables = Dataset::new(var_names);
        let var_index: HashMap<VarName, usize> = variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();

        let lookup_world = |path: &str, w: &str| -> Result<usize, ModelError> {
            world_index
                .get(&WorldId::new(w))
                .copied()
                .ok_or_else(|| ModelError::UnknownWorld {
                    path: path.to_string(),
                    world: w.to_string(),
                })
        };
        let lookup_dataset = |path: &str, names: &[String]| -> Result<Dataset, ModelError> {
            let mut out = Vec::with_capacity(names.len());
            for (i, n) in names.iter().enumerate() {
                let name = VarName::new(n.clone()).ok();
                match name {
                    Some(name) if var_index.contains_key(&name) => out.push(name),
                    _ => {
                        return Err(ModelError::UnknownVariable {
                            path: format!("{path}[{i}]"),
                            var: n.clone(),
                        })
                    }
                }
            }
            Ok(Dataset::new(out))
        };

        let n = worlds.len();
        // Identity partition unless the file says otherwise.
        let mut blocks: Vec<Vec<u32>> = (0..variables.len())
            .map(|_| (0..n as u32).collect())
            .collect();
        let mut block_counts = vec![n; variables.len()];
        for (var, parts) in &file.indistinguishability {
            let path = format!("indistinguishability.{var}");
            let vi = VarName::new(var.clone())
                .ok()
                .and_then(|v| var_index.get(&v).copied())
                .ok_or_else(|| ModelError::UnknownVariable {
                    path: path.clone(),
                    var: var.clone(),
                })?;
            let mut assigned: Vec<Option<u32>> = vec![None; n];
            for (bi, block) in parts.iter().enumerate() {
                let bpath = format!("{path}[{bi}]");
                if block.is_empty() {
                    return Err(ModelError::EmptyBlock { path: bpath });
                }
                for (k, w) in block.iter().enumerate() {
                    let wi = lookup_world(&format!("{bpath}[{k}]"), w)?;
                    if assigned[wi].is_some() {
                        return Err(ModelError::OverlappingBlocks {
                            path: bpath,
                            world: w.clone(),
                        });
                    }
                    assigned[wi] = Some(bi as u32);
                }
            }
            let mut row = Vec::with_capacity(n);
            for (wi, a) in assigned.into_iter().enumerate() {
                match a {
                    Some(b) => row.push(b),
                    None => {
                        return Err(ModelError::UncoveredWorld {
                            path,
                            world: worlds[wi].0.clone(),
                        })
                    }
                }
            }
            blocks[vi] = normalize_blocks(&row);
            block_counts[vi] = parts.len();
        }

        let mut trust = vec![Dataset::empty(); n];
        for (w, vars) in &file.trustworthy {
            let path = format!("trustworthy.{w}");
            let wi = lookup_world(&path, w)?;
            trust[wi] = lookup_dataset(&path, vars)?;
        }

        let mut valuation = BTreeMap::new();
        for (prop, entry) in &file.valuation {
            let path = format!("valuation.{prop}");
            if !is_identifier(prop) && prop != RESERVED_ATOM {
                return Err(ModelError::InvalidName {
                    path,
                    name: prop.clone(),
                });
            }
            let mut permanent = vec![false; n];
            for (i, w) in entry.permanent.iter().enumerate() {
                permanent[lookup_world(&format!("{path}.permanent[{i}]"), w)?] = true;
            }
            let mut announced = HashSet::new();
            for (i, (w, vars)) in entry.announced.iter().enumerate() {
                let apath = format!("{path}.announced[{i}]");
                let wi = lookup_world(&apath, w)?;
                announced.insert((wi, lookup_dataset(&apath, vars)?));
            }
            valuation.insert(
                prop.clone(),
                ValuationEntry {
                    permanent,
                    announced,
                },
            );
        }

        Ok(TrustModel {
            worlds,
            world_index,
            variables,
            var_index,
            blocks,
            block_counts,
            trust,
            valuation,
        })
    }

    /// Serializes back to the file format. Partitions are always written out
    /// in full, blocks ordered by first member.
    pub fn to_file(&self) -> ModelFile {
        let mut indist = BTreeMap::new();
        for (vi, var) in self.variables.iter().enumerate() {
            let mut groups: BTreeMap<u32, Vec<String>> = BTreeMap::new();
            let mut order = Vec::new();
            for (wi, &b) in self.blocks[vi].iter().enumerate() {
                let g = groups.entry(b).or_default();
                if g.is_empty() {
                    order.push(b);
                }
                g.push(self.worlds[wi].0.clone());
            }
            let parts = order
                .into_iter()
                .map(|b| groups.remove(&b).unwrap())
                .collect();
            indist.insert(var.as_str().to_string(), parts);
        }
        let trustworthy = self
            .worlds
            .iter()
            .zip(&self.trust)
            .filter(|(_, t)| !t.is_empty())
            .map(|(w, t)| (w.0.clone(), t.names()))
            .collect();
        let valuation = self
            .valuation
            .iter()
            .map(|(p, e)| {
                let permanent = e
                    .permanent
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(wi, _)| self.worlds[wi].0.clone())
                    .collect();
                let mut announced: Vec<(usize, Dataset)> = e.announced.iter().cloned().collect();
                announced.sort();
                let announced = announced
                    .into_iter()
                    .map(|(wi, u)| (self.worlds[wi].0.clone(), u.names()))
                    .collect();
                (
                    p.clone(),
                    ValuationFile {
                        permanent,
                        announced,
                    },
                )
            })
            .collect();
        ModelFile {
            worlds: self.worlds.iter().map(|w| w.0.clone()).collect(),
            variables: self.variables.names(),
            indistinguishability: indist,
            trustworthy,
            valuation,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("model file serializes")
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn variables(&self) -> &Dataset {
        &self.variables
    }

    /// Number of blocks in the partition of each variable, in variable order.
    pub fn block_counts(&self) -> impl Iterator<Item = (&VarName, usize)> {
        self.variables.iter().zip(self.block_counts.iter().copied())
    }

    pub fn propositions(&self) -> impl Iterator<Item = &str> {
        self.valuation.keys().map(String::as_str)
    }

    pub fn trust_set(&self, w: &WorldId) -> Result<&Dataset, SemanticError> {
        Ok(&self.trust[self.world_idx(w)?])
    }

    pub fn world_idx(&self, w: &WorldId) -> Result<usize, SemanticError> {
        self.world_index
            .get(w)
            .copied()
            .ok_or_else(|| SemanticError::UnknownWorld(w.0.clone()))
    }

    pub fn var_idx(&self, v: &VarName) -> Result<usize, SemanticError> {
        self.var_index
            .get(v)
            .copied()
            .ok_or_else(|| SemanticError::UnknownVariable(v.as_str().to_string()))
    }

    /// Variable indices for every member of `xs`.
    pub fn var_indices(&self, xs: &Dataset) -> Result<Vec<usize>, SemanticError> {
        xs.iter().map(|v| self.var_idx(v)).collect()
    }

    pub fn check_dataset(&self, xs: &Dataset) -> Result<(), SemanticError> {
        for v in xs {
            self.var_idx(v)?;
        }
        Ok(())
    }

    /// Validates an evaluation point, returning its world index.
    pub fn check_point(&self, pt: &EvalPoint) -> Result<usize, SemanticError> {
        let wi = self.world_idx(&pt.world)?;
        self.check_dataset(&pt.announced)?;
        Ok(wi)
    }

    /// `w ~_X u`: same block for every variable in `X`.
    pub fn indistinguishable(
        &self,
        w: &WorldId,
        u: &WorldId,
        xs: &Dataset,
    ) -> Result<bool, SemanticError> {
        let (wi, ui) = (self.world_idx(w)?, self.world_idx(u)?);
        let vars = self.var_indices(xs)?;
        Ok(self.same_blocks(wi, ui, &vars))
    }

    /// Index-level `~` over pre-resolved variable indices.
    #[inline]
    pub fn same_blocks(&self, wi: usize, ui: usize, vars: &[usize]) -> bool {
        vars.iter().all(|&v| {
            let row = &self.blocks[v];
            row[wi] == row[ui]
        })
    }

    /// `T ⊆ trust(w)`.
    pub fn trusts(&self, w: &WorldId, ts: &Dataset) -> Result<bool, SemanticError> {
        let wi = self.world_idx(w)?;
        self.check_dataset(ts)?;
        Ok(self.trusts_idx(wi, ts))
    }

    #[inline]
    pub fn trusts_idx(&self, wi: usize, ts: &Dataset) -> bool {
        ts.is_subset(&self.trust[wi])
    }

    /// Atomic truth at a point. Propositions without a valuation entry are
    /// false everywhere.
    pub fn holds_atom(&self, pt: &EvalPoint, prop: &str) -> Result<bool, SemanticError> {
        let wi = self.check_point(pt)?;
        Ok(self.holds_atom_idx(wi, &pt.announced, prop))
    }

    pub fn holds_atom_idx(&self, wi: usize, announced: &Dataset, prop: &str) -> bool {
        match self.valuation.get(prop) {
            None => false,
            Some(e) => e.permanent[wi] || e.announced.contains(&(wi, announced.clone())),
        }
    }

    /// Variables `x` (of the whole model) with `w ~_x u`.
    pub fn agreeing_variables(&self, wi: usize, ui: usize) -> Dataset {
        self.variables
            .iter()
            .enumerate()
            .filter(|(v, _)| self.blocks[*v][wi] == self.blocks[*v][ui])
            .map(|(_, name)| name.clone())
            .collect()
    }

    /// Every subset of the model's variables, in binary-counter order.
    /// Only sensible for small variable sets.
    pub fn all_datasets(&self) -> Vec<Dataset> {
        all_subsets(&self.variables)
    }
}

// Renumbers blocks by first occurrence so equal partitions compare equal.
fn normalize_blocks(row: &[u32]) -> Vec<u32> {
    let mut seen: HashMap<u32, u32> = HashMap::new();
    row.iter()
        .map(|b| {
            let next = seen.len() as u32;
            *seen.entry(*b).or_insert(next)
        })
        .collect()
}

pub fn all_subsets(vars: &Dataset) -> Vec<Dataset> {
    let items: Vec<&VarName> = vars.iter().collect();
    assert!(items.len() < 24, "too many variables to enumerate subsets");
    (0u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| (*v).clone())
                .collect()
        })
        .collect()
}
