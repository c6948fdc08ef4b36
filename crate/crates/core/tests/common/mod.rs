#![allow(dead_code)]

use std::path::PathBuf;

use datatrust::model::TrustModel;
use datatrust::proofs::{
    DatasetVar, FormulaVar, Justification, Proof, ProofLine, Schema, Substitution,
};
use datatrust::syntax::{parse, Dataset, Formula};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

pub fn load_model(name: &str) -> TrustModel {
    let bytes = std::fs::read(fixture(name)).unwrap();
    TrustModel::from_json(&bytes).unwrap()
}

pub fn load_proof(name: &str) -> Proof {
    let bytes = std::fs::read(fixture(&format!("proofs/{name}"))).unwrap();
    Proof::from_json(&bytes).unwrap()
}

pub fn ds(names: &[&str]) -> Dataset {
    Dataset::from_names(names.iter().copied()).unwrap()
}

pub fn f(text: &str) -> Formula {
    parse(text).unwrap()
}

/// A single-line edit of a proof.
#[derive(Debug, Clone)]
pub enum Mutation {
    NegateClaim,
    ReplaceClaim(&'static str),
    SwapMp,
    MpRefs(usize, usize),
    /// Adds the variable `zz` to a dataset binding of an axiom line.
    AddVar(DatasetVar),
    /// Adds `zz` to the data (`false`) or trust (`true`) set of a Nec line.
    AddNecVar {
        trust: bool,
    },
    ChangeSchema(Schema),
    NegatePhi,
    SetPhi(&'static str),
    DropFormulaBinding(FormulaVar),
    DropDatasetBinding(DatasetVar),
    ExtraBinding(DatasetVar),
    ToTautology,
    ToTruthAxiom,
    ToNecAnnounce(usize),
    ToAssumption(usize),
}

fn zz() -> Dataset {
    ds(&["zz"])
}

pub fn apply(pf: &Proof, line: usize, m: &Mutation) -> Proof {
    let mut out = pf.clone();
    let l: &mut ProofLine = &mut out.lines[line - 1];
    let axiom = |by: &mut Justification| -> (Schema, Substitution) {
        match by {
            Justification::Axiom { schema, subst } => (*schema, subst.clone()),
            other => panic!("mutation needs an axiom line, found {other:?}"),
        }
    };
    match m {
        Mutation::NegateClaim => l.formula = Formula::not(l.formula.clone()),
        Mutation::ReplaceClaim(t) => l.formula = f(t),
        Mutation::SwapMp => match &mut l.by {
            Justification::ModusPonens { from, implication } => {
                std::mem::swap(from, implication);
            }
            other => panic!("not an MP line: {other:?}"),
        },
        Mutation::MpRefs(a, b) => {
            l.by = Justification::ModusPonens {
                from: *a,
                implication: *b,
            }
        }
        Mutation::AddVar(v) => {
            let (schema, mut subst) = axiom(&mut l.by);
            let d = subst.datasets.get(v).cloned().unwrap_or_default();
            subst.datasets.insert(*v, d.union(&zz()));
            l.by = Justification::Axiom { schema, subst };
        }
        Mutation::AddNecVar { trust: t } => match &mut l.by {
            Justification::NecBelief { trust, data, .. } => {
                if *t {
                    *trust = trust.union(&zz());
                } else {
                    *data = data.union(&zz());
                }
            }
            Justification::NecAnnounce { data, .. } => *data = data.union(&zz()),
            other => panic!("not a Nec line: {other:?}"),
        },
        Mutation::ChangeSchema(s) => {
            let (_, subst) = axiom(&mut l.by);
            l.by = Justification::Axiom { schema: *s, subst };
        }
        Mutation::NegatePhi | Mutation::SetPhi(_) => {
            let (schema, mut subst) = axiom(&mut l.by);
            let phi = subst.formulas[&FormulaVar::Phi].clone();
            let new = match m {
                Mutation::SetPhi(t) => f(t),
                _ => Formula::not(phi),
            };
            subst.formulas.insert(FormulaVar::Phi, new);
            l.by = Justification::Axiom { schema, subst };
        }
        Mutation::DropFormulaBinding(v) => {
            let (schema, mut subst) = axiom(&mut l.by);
            assert!(subst.formulas.remove(v).is_some());
            l.by = Justification::Axiom { schema, subst };
        }
        Mutation::DropDatasetBinding(v) => {
            let (schema, mut subst) = axiom(&mut l.by);
            assert!(subst.datasets.remove(v).is_some());
            l.by = Justification::Axiom { schema, subst };
        }
        Mutation::ExtraBinding(v) => {
            let (schema, mut subst) = axiom(&mut l.by);
            assert!(subst.datasets.insert(*v, ds(&["x"])).is_none());
            l.by = Justification::Axiom { schema, subst };
        }
        Mutation::ToTautology => {
            l.by = Justification::Axiom {
                schema: Schema::Tautology,
                subst: Substitution::new(),
            }
        }
        Mutation::ToTruthAxiom => {
            l.by = Justification::Axiom {
                schema: Schema::Truth,
                subst: Substitution::new()
                    .formula(FormulaVar::Phi, f("p"))
                    .dataset(DatasetVar::X, ds(&["x"])),
            }
        }
        Mutation::ToNecAnnounce(from) => {
            l.by = Justification::NecAnnounce {
                from: *from,
                data: Dataset::empty(),
            }
        }
        Mutation::ToAssumption(i) => l.by = Justification::Assumption(*i),
    }
    out
}

pub const EMPTY_ANNOUNCEMENT: &str = "empty_announcement.json";
pub const POSITIVE_INTROSPECTION: &str = "positive_introspection.json";

/// The catalogued mutations of a fixture: `(line, mutation)`, each expected
/// to be rejected at exactly `line`.
pub fn catalog(fixture_name: &str) -> Vec<(usize, Mutation)> {
    use DatasetVar as D;
    use Mutation::*;
    match fixture_name {
        EMPTY_ANNOUNCEMENT => vec![
            (1, NegateClaim),
            (1, NegatePhi),
            (1, SetPhi("q")),
            (1, ChangeSchema(Schema::Duality)),
            (1, ChangeSchema(Schema::Truth)),
            (1, ExtraBinding(D::X)),
            (1, DropFormulaBinding(FormulaVar::Phi)),
            (1, ToTautology),
            (1, ToAssumption(1)),
            (2, NegateClaim),
            (2, ToTruthAxiom),
            (2, ToNecAnnounce(1)),
            (3, NegateClaim),
            (3, SwapMp),
            (3, MpRefs(4, 2)),
            (3, MpRefs(3, 2)),
            (3, MpRefs(0, 2)),
            (3, MpRefs(1, 1)),
            (3, ToTautology),
            (3, ToNecAnnounce(1)),
        ],
        POSITIVE_INTROSPECTION => vec![
            (1, NegateClaim),
            (1, NegatePhi),
            (1, AddVar(D::X)),
            (1, ChangeSchema(Schema::NegIntrospection)),
            (1, ToTautology),
            (2, NegateClaim),
            (3, SwapMp),
            (3, MpRefs(4, 2)),
            (4, AddVar(D::T)),
            (4, AddVar(D::X)),
            (4, ChangeSchema(Schema::Truth)),
            (6, MpRefs(6, 5)),
            (7, SwapMp),
            (8, NegatePhi),
            (8, DropDatasetBinding(D::T)),
            (11, AddNecVar { trust: false }),
            (11, AddNecVar { trust: true }),
            (12, ExtraBinding(D::Y)),
            (16, MpRefs(0, 15)),
            (16, NegateClaim),
        ],
        other => panic!("no catalog for {other}"),
    }
}
