//! Properties of the bundled corpus beyond "it checks".

mod common;

use std::sync::Arc;

use af2m::{check_source, commands, corpus, report};
use af2m_core::equational::{check_evidence, derive_eq, EqEvidence, Equation, RewriteConfig};
use af2m_core::kernel::{check_steps, equivalent, CheckOptions};
use af2m_core::{Formula, Rule, Term};
use common::{checked_corpus, corpus_file};

fn assert_passes(file: &str) {
    let f = corpus_file(file);
    assert!(f.diagnostics.is_empty(), "{file}: {:?}", f.diagnostics);
    for t in &f.theorems {
        if let Err(e) = &t.result {
            panic!("{file}: {}: {}", t.name, e.message);
        }
    }
    for e in &f.expects {
        if let Err(m) = &e.result {
            panic!("{file}: {}: {m}", e.name);
        }
        if let Some(sr) = &e.subject_reduction {
            assert!(sr.holds.is_ok(), "{file}: {}: {:?}", e.name, sr.holds);
        }
    }
}

#[test]
fn nat_adhoc_checks() {
    assert_passes("nat_adhoc.af2");
}

#[test]
fn nat_equi_checks() {
    assert_passes("nat_equi.af2");
}

#[test]
fn nat_iso_checks() {
    assert_passes("nat_iso.af2");
}

#[test]
fn conat_checks() {
    assert_passes("conat.af2");
}

#[test]
fn stream_checks() {
    assert_passes("stream.af2");
}

#[test]
fn order_checks() {
    assert_passes("order.af2");
}

#[test]
fn obseq_checks() {
    assert_passes("obseq.af2");
}

#[test]
fn every_rule_is_exercised() {
    let mut total = af2m_core::kernel::Coverage::new();
    for (_, f) in checked_corpus() {
        for (r, n) in f.coverage() {
            *total.entry(r).or_insert(0) += n;
        }
    }
    let missing: Vec<&str> = Rule::ALL.iter().filter(|r| !total.contains_key(r)).map(|r| r.name()).collect();
    assert!(missing.is_empty(), "{missing:?}");
}

// Adding a hypothesis that no step mentions, and an equation over a symbol
// that no step mentions, changes neither terms nor formulas. The new
// hypothesis appears in every context.
#[test]
fn weakening_preserves_judgments() {
    let extra = Formula::equation(Term::constant("weak0"), Term::constant("weak0"));
    for (n, f) in checked_corpus() {
        for t in &f.theorems {
            let Some(script) = &t.script else { continue };
            let plain = check_steps(script, &CheckOptions::default()).unwrap();
            let mut sig = (*script.signature).clone();
            sig.add_function("weak0", 0).unwrap();
            sig.add_function("weak1", 1).unwrap();
            let mut weak = script.clone();
            weak.signature = Arc::new(sig);
            let x = Term::var("x");
            weak.eqs.push(Equation::schematic(Term::app("weak1", vec![x.clone()]), x));
            let options =
                CheckOptions { base_context: vec![(af2m_core::syntax::name("h_weak"), extra.clone())], ..CheckOptions::default() };
            let heavy = check_steps(&weak, &options).unwrap_or_else(|e| panic!("{n}: {}: {e}", t.name));
            for (a, b) in plain.iter().zip(&heavy) {
                assert_eq!(a.term(), b.term(), "{n}: {}", t.name);
                assert!(equivalent(a.formula(), b.formula()), "{n}: {}", t.name);
                for h in a.context() {
                    assert!(b.context().contains(h), "{n}: {}: lost {}", t.name, h.0);
                }
                assert!(b.context().iter().any(|(h, _)| h.as_ref() == "h_weak"));
            }
        }
    }
}

#[test]
fn derivations_are_symmetric() {
    let config = RewriteConfig::default();
    for (n, f) in checked_corpus() {
        for t in &f.theorems {
            for ob in &t.obligations {
                let ev = derive_eq(&ob.pool, &ob.rhs, &ob.lhs, &config)
                    .unwrap_or_else(|e| panic!("{n}: {}: {} = {}: {e}", t.name, ob.rhs, ob.lhs));
                check_evidence(&ob.pool, None, &ev, &ob.rhs, &ob.lhs).unwrap();
            }
        }
    }
}

fn shape_ok(ev: &EqEvidence, v: &serde_json::Value) -> bool {
    match ev {
        EqEvidence::Refl(t) => v["refl"] == t.to_string(),
        EqEvidence::Instance { index, .. } => {
            v["instance"] == *index && (v["orientation"] == "forward" || v["orientation"] == "backward")
        }
        EqEvidence::Trans { left, right, mid } => {
            v["mid"] == mid.to_string() && shape_ok(left, &v["trans"][0]) && shape_ok(right, &v["trans"][1])
        }
        EqEvidence::Cong { symbol, args } => {
            v["cong"] == symbol.as_ref()
                && v["args"].as_array().is_some_and(|a| a.len() == args.len())
                && args.iter().enumerate().all(|(i, e)| shape_ok(e, &v["args"][i]))
        }
    }
}

#[test]
fn evidence_json_mirrors_the_tree() {
    let mut seen = 0;
    for (_, f) in checked_corpus() {
        for t in &f.theorems {
            for ob in &t.obligations {
                seen += 1;
                assert!(shape_ok(&ob.evidence, &report::evidence(&ob.evidence)));
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn parallel_check_matches_sequential() {
    let sources: Vec<(String, String)> = corpus::FILES.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect();
    let par = commands::check_sources(&sources, None);
    for ((n, src), p) in sources.iter().zip(&par) {
        let s = check_source(src, None);
        assert_eq!(s.all_passed(), p.all_passed(), "{n}");
        let a: Vec<String> = s.judgments().map(|(k, j)| format!("{k}: {} : {}", j.term(), j.formula())).collect();
        let b: Vec<String> = p.judgments().map(|(k, j)| format!("{k}: {} : {}", j.term(), j.formula())).collect();
        assert_eq!(a, b, "{n}");
    }
}
