mod common;

use common::*;
use datatrust::checker::valid_on_model;
use datatrust::harness::{gen_model, GenParams};
use datatrust::proofs::{assumptions_from_json, check_derivation, check_proof, Proof, Verdict};

fn fixtures() -> [&'static str; 2] {
    [EMPTY_ANNOUNCEMENT, POSITIVE_INTROSPECTION]
}

#[test]
fn fixtures_are_accepted() {
    assert_eq!(
        check_proof(&load_proof(EMPTY_ANNOUNCEMENT)),
        Verdict::Accepted {
            conclusion: f("[] p -> p")
        }
    );
    assert_eq!(
        check_proof(&load_proof(POSITIVE_INTROSPECTION)),
        Verdict::Accepted {
            conclusion: f("B{t}{x} p -> B{}{x} B{t}{x} p")
        }
    );
}

#[test]
fn catalogued_mutations_are_rejected_at_their_line() {
    for name in fixtures() {
        let pf = load_proof(name);
        let cat = catalog(name);
        assert_eq!(cat.len(), 20, "{name}");
        for (line, m) in cat {
            let mutated = apply(&pf, line, &m);
            assert_ne!(mutated, pf, "{name} {m:?} is a no-op");
            let v = check_proof(&mutated);
            assert_eq!(
                v.rejected_line(),
                Some(line),
                "{name} line {line} {m:?}: {v:?}"
            );
        }
    }
}

#[test]
fn fixtures_round_trip_through_json() {
    for name in fixtures() {
        let pf = load_proof(name);
        let text = serde_json::to_string(&pf.to_json()).unwrap();
        assert_eq!(Proof::from_json(text.as_bytes()).unwrap(), pf);
    }
}

#[test]
fn accepted_conclusions_hold_on_generated_models() {
    let conclusions: Vec<_> = fixtures()
        .iter()
        .map(|n| match check_proof(&load_proof(n)) {
            Verdict::Accepted { conclusion } => conclusion,
            v => panic!("{v:?}"),
        })
        .collect();
    for seed in 0..300 {
        let params = GenParams {
            atoms: 1,
            max_variables: 0,
            ..GenParams::with_seed(seed)
        };
        let m = gen_model(&params);
        // Rename the generated model's vocabulary to the fixtures' `p`, `t`, `x`.
        let mut file = m.to_file();
        let p0 = file.valuation.remove("p0").unwrap();
        file.valuation.insert("p".into(), p0);
        file.variables = vec!["t".into(), "x".into()];
        let worlds = file.worlds.clone();
        let half = worlds.len() / 2;
        file.indistinguishability
            .insert("t".into(), vec![worlds.clone()]);
        let (a, b) = worlds.split_at(half.max(1).min(worlds.len()));
        let mut x = vec![a.to_vec()];
        if !b.is_empty() {
            x.push(b.to_vec());
        }
        file.indistinguishability.insert("x".into(), x);
        for (i, w) in worlds.iter().enumerate() {
            let t = if (seed as usize + i).is_multiple_of(2) {
                vec!["t".to_string()]
            } else {
                vec![]
            };
            file.trustworthy.insert(w.clone(), t);
        }
        let m = datatrust::model::TrustModel::from_file(&file).unwrap();
        for c in &conclusions {
            assert!(valid_on_model(&m, c).unwrap(), "seed {seed}: {c}");
        }
    }
}

#[test]
fn derivation_from_files() {
    let pf = load_proof("nec_under_assumption.json");
    let a = assumptions_from_json(&std::fs::read(fixture("proofs/assumptions_p.json")).unwrap())
        .unwrap();
    match check_derivation(&a, &pf) {
        Verdict::Rejected { line, reason } => {
            assert_eq!(line, 2);
            assert!(reason.contains("Necessitation not permitted under assumptions"));
        }
        v => panic!("{v:?}"),
    }
    assert_eq!(check_proof(&pf).rejected_line(), Some(1));
}
