use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::reduction::oracle::DEFAULT_ORACLE_BUDGET;
use crate::reduction::sn::DEFAULT_SN_FUEL;

fn v(x: &str) -> ProofTerm {
    ProofTerm::var(x)
}

fn app(f: ProofTerm, a: ProofTerm) -> ProofTerm {
    ProofTerm::app(f, a)
}

fn id(x: &str) -> ProofTerm {
    ProofTerm::lam(x, v(x))
}

fn omega() -> ProofTerm {
    let w = ProofTerm::lam("x", app(v("x"), v("x")));
    app(w.clone(), w)
}

#[test]
fn mrec_axiom_at_root() {
    let t = ProofTerm::mrec(v("s"), ProofTerm::in_(v("t")));
    let steps = one_step(&t);
    assert_eq!(steps.len(), 1);
    assert!(steps[0].path.is_empty());
    assert_eq!(steps[0].axiom, Axiom::MRec);
    let expected = ProofTerm::apps(
        v("s"),
        vec![id("y"), ProofTerm::lam("z", ProofTerm::mrec(v("s"), v("z"))), v("t")],
    );
    assert!(steps[0].contractum.alpha_eq(&expected), "{}", steps[0].contractum);
}

#[test]
fn mcorec_axiom_at_root() {
    let t = ProofTerm::out(ProofTerm::mcorec(v("s"), v("t")));
    let steps = one_step(&t);
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0].axiom, Axiom::MCoRecOut);
    let expected = ProofTerm::apps(
        v("s"),
        vec![id("y"), ProofTerm::lam("z", ProofTerm::mcorec(v("s"), v("z"))), v("t")],
    );
    assert!(steps[0].contractum.alpha_eq(&expected));
}

#[test]
fn normal_forms_have_no_steps() {
    assert!(one_step(&id("x")).is_empty());
    assert!(one_step(&ProofTerm::mcorec(v("s"), v("t"))).is_empty());
}

#[test]
fn derived_axioms() {
    let pair = ProofTerm::pair(v("a"), v("b"));
    let cases = [
        (ProofTerm::Fst(Box::new(pair.clone())), Axiom::Fst, v("a")),
        (ProofTerm::Snd(Box::new(pair)), Axiom::Snd, v("b")),
        (
            ProofTerm::case(ProofTerm::Inl(Box::new(v("a"))), "x", app(v("f"), v("x")), "y", v("y")),
            Axiom::CaseInl,
            app(v("f"), v("a")),
        ),
        (
            ProofTerm::case(ProofTerm::Inr(Box::new(v("a"))), "x", v("x"), "y", app(v("g"), v("y"))),
            Axiom::CaseInr,
            app(v("g"), v("a")),
        ),
        (
            ProofTerm::open(ProofTerm::Pack(Box::new(v("a"))), "u", app(v("h"), v("u"))),
            Axiom::OpenPack,
            app(v("h"), v("a")),
        ),
    ];
    for (t, axiom, result) in cases {
        let (a, c) = contract(&t).unwrap();
        assert_eq!(a, axiom);
        assert!(c.alpha_eq(&result), "{t} gave {c}");
    }
}

#[test]
fn substitution_avoids_capture() {
    // (\x. \y. x) y  ->  \y'. y
    let t = app(ProofTerm::lams(&["x", "y"], v("x")), v("y"));
    let (_, c) = contract(&t).unwrap();
    assert!(c.alpha_eq(&ProofTerm::lam("w", v("y"))), "{c}");
}

#[test]
fn weak_head_examples() {
    let t = ProofTerm::apps(id("x"), vec![v("a"), v("b")]);
    let s = whd_step(&t).unwrap();
    assert_eq!(s.path, vec![0]);
    assert!(s.apply(&t).alpha_eq(&app(v("a"), v("b"))));

    let t = ProofTerm::mrec(v("s"), ProofTerm::in_(v("t")));
    assert_eq!(whd_step(&t).unwrap().axiom, Axiom::MRec);

    let t = ProofTerm::lam("x", app(id("y"), v("x")));
    assert!(whd_step(&t).is_none());
    assert_eq!(one_step(&t).len(), 1);

    // Redex under the recursor argument position is in the hole.
    let t = ProofTerm::mrec(v("s"), app(id("y"), ProofTerm::in_(v("t"))));
    assert_eq!(whd_step(&t).unwrap().path, vec![1]);
}

#[test]
fn iteration_laws() {
    let t = ProofTerm::mit(v("s"), ProofTerm::in_(v("t")));
    let n = normalize(&t, DEFAULT_FUEL).unwrap();
    let expected = ProofTerm::apps(v("s"), vec![ProofTerm::unapplied(v("s"), ProofTerm::MIt), v("t")]);
    assert!(n.trace.passes_through(&expected));

    let t = ProofTerm::out(ProofTerm::mcoit(v("s"), v("t")));
    let n = normalize(&t, DEFAULT_FUEL).unwrap();
    let expected = ProofTerm::apps(v("s"), vec![ProofTerm::unapplied(v("s"), ProofTerm::MCoIt), v("t")]);
    assert!(n.trace.passes_through(&expected));
}

#[test]
fn normalize_runs_out_of_fuel_on_omega() {
    let err = normalize(&omega(), 50).unwrap_err();
    assert_eq!(err.trace.steps.len(), 50);
    assert!(err.reached.alpha_eq(&omega()));
}

#[test]
fn subterm_sets() {
    assert!(ist(&v("x")).is_empty());
    assert_eq!(ist(&ProofTerm::mrec(v("s"), v("r"))), vec![v("s"), v("r")]);
    assert_eq!(ist(&ProofTerm::pair(v("r"), v("s"))), vec![v("r"), v("s")]);

    assert_eq!(prt(&app(id("x"), v("s"))).unwrap(), vec![v("s")]);
    assert!(prt(&ProofTerm::mrec(v("s"), ProofTerm::in_(v("r")))).unwrap().is_empty());
    assert_eq!(prt(&ProofTerm::Fst(Box::new(ProofTerm::pair(v("r"), v("s"))))).unwrap(), vec![v("s")]);
    assert!(prt(&v("x")).is_err());
}

#[test]
fn classification() {
    assert!(is_neutral(&app(v("x"), v("s"))));
    assert!(is_neutral(&ProofTerm::mrec(v("s"), v("x"))));
    assert!(!is_neutral(&id("x")));
    assert_eq!(classify(&ProofTerm::in_(v("r"))), TermClass::Intro);
    assert_eq!(classify(&ProofTerm::out(v("r"))), TermClass::Elim);
    assert_eq!(classify(&v("x")), TermClass::Variable);
}

#[test]
fn certifier_examples() {
    let d = sn_certify(&v("x"), 10).unwrap();
    assert_eq!(d.rule, SnRule::Var);
    let d = sn_certify(&id("x"), 10).unwrap();
    assert_eq!(d.rule, SnRule::Intro);
    assert_eq!(d.premises.len(), 1);

    let t = app(ProofTerm::lam("x", v("y")), omega());
    assert!(sn_certify(&t, 10_000).is_err());
    // The contractum alone is fine; the discarded argument is what fails.
    assert!(sn_certify(&v("y"), 10).is_ok());
    assert!(matches!(sn_oracle(&t, 100), OracleVerdict::Cycle(_)));
}

#[test]
fn oracle_examples() {
    // The abstraction and its body.
    assert_eq!(sn_oracle(&id("x"), 10), OracleVerdict::Sn { nodes: 2 });
    assert_eq!(sn_oracle_flat(&id("x"), 10), OracleVerdict::Sn { nodes: 1 });
    // Under a binder the loop goes through a subterm link.
    match sn_oracle(&ProofTerm::lam("z", omega()), 10) {
        OracleVerdict::Cycle(path) => assert!(path[0].alpha_eq(&omega())),
        other => panic!("{other:?}"),
    }
    match sn_oracle(&omega(), 10) {
        OracleVerdict::Cycle(path) => {
            assert_eq!(path.len(), 1);
            assert!(path[0].alpha_eq(&omega()));
        }
        other => panic!("{other:?}"),
    }
    // (\x. x x x)(\x. x x x) grows without bound.
    let w3 = ProofTerm::lam("x", ProofTerm::apps(v("x"), vec![v("x"), v("x")]));
    assert!(matches!(sn_oracle(&app(w3.clone(), w3), 50), OracleVerdict::Inconclusive { .. }));
}

/// All subterms and reducts, closed.
fn closed_universe(seeds: &[ProofTerm]) -> Vec<ProofTerm> {
    let mut seen = alloc::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut todo: Vec<ProofTerm> = seeds.to_vec();
    while let Some(t) = todo.pop() {
        if out.len() > 200 {
            break;
        }
        if !seen.insert(t.canonical()) {
            continue;
        }
        todo.extend(t.children().into_iter().cloned());
        todo.extend(one_step(&t).iter().map(|s| s.apply(&t)));
        out.push(t);
    }
    out
}

#[test]
fn saturation_closure() {
    let k = ProofTerm::lam("y", id("x"));
    let expand = app(k, v("z"));
    let u = closed_universe(&[expand.clone(), app(v("z"), v("z"))]);

    let base = sat_closure(&[], &u, 100).unwrap();
    for t in &u {
        let member = base.iter().any(|b| b.alpha_eq(t));
        assert_eq!(member, is_neutral(t), "{t}");
    }

    let cl = sat_closure(&[id("x")], &u, 100).unwrap();
    assert!(cl.iter().any(|t| t.alpha_eq(&id("x"))));
    assert!(cl.iter().any(|t| t.alpha_eq(&expand)));

    let bad = closed_universe(&[omega()]);
    let cl = sat_closure(&[omega()], &bad, 100).unwrap();
    assert!(!cl.iter().any(|t| t.alpha_eq(&omega())));

    assert!(matches!(sat_closure(&[], &[expand], 100), Err(SatError::NotClosed { .. })));
}

fn arb_term() -> impl Strategy<Value = ProofTerm> {
    let leaf = prop_oneof![
        Just(v("x")),
        Just(v("y")),
        Just(v("z")),
        Just(ProofTerm::Unit),
    ];
    leaf.prop_recursive(4, 12, 3, |inner| {
        let name = prop_oneof![Just("x"), Just("y"), Just("z")];
        prop_oneof![
            (name.clone(), inner.clone()).prop_map(|(x, b)| ProofTerm::lam(x, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| app(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| app(a, b)),
            inner.clone().prop_map(ProofTerm::in_),
            inner.clone().prop_map(ProofTerm::out),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ProofTerm::mrec(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ProofTerm::mcorec(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ProofTerm::mit(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ProofTerm::pair(a, b)),
            inner.clone().prop_map(|a| ProofTerm::Fst(Box::new(a))),
            inner.clone().prop_map(|a| ProofTerm::Inl(Box::new(a))),
            (inner.clone(), name.clone(), inner.clone(), inner.clone())
                .prop_map(|(r, x, s, t)| ProofTerm::case(r, x, s, "y", t)),
            (inner.clone(), name, inner.clone()).prop_map(|(t, u, r)| ProofTerm::open(ProofTerm::Pack(Box::new(t)), u, r)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn certified_terms_are_sn(t in arb_term()) {
        if let Ok(d) = sn_certify(&t, 20_000) {
            prop_assert!(d.is_valid());
            let verdict = sn_oracle(&t, DEFAULT_ORACLE_BUDGET);
            prop_assert!(verdict.is_sn(), "{t}: {verdict:?}");
        }
    }

    #[test]
    fn split_oracle_agrees_with_flat_search(t in arb_term()) {
        let a = sn_oracle(&t, 5_000);
        let b = sn_oracle_flat(&t, 5_000);
        if !matches!(a, OracleVerdict::Inconclusive { .. }) && !matches!(b, OracleVerdict::Inconclusive { .. }) {
            prop_assert_eq!(a.is_sn(), b.is_sn(), "{}: {:?} vs {:?}", t, a, b);
        }
    }

    #[test]
    fn weak_head_step_is_a_full_step(t in arb_term()) {
        if let Some(s) = whd_step(&t) {
            prop_assert!(one_step(&t).contains(&s));
        }
    }

    #[test]
    fn leftmost_outermost_is_first(t in arb_term()) {
        prop_assert_eq!(leftmost_outermost(&t), one_step(&t).into_iter().next());
    }

    #[test]
    fn classification_is_total_and_intros_have_no_head_step(t in arb_term()) {
        if classify(&t) == TermClass::Intro {
            prop_assert!(whd_step(&t).is_none());
        }
    }

    #[test]
    fn traces_replay(t in arb_term()) {
        let trace = match normalize(&t, 40) {
            Ok(n) => {
                prop_assert!(one_step(&n.term).is_empty());
                n.trace
            }
            Err(e) => e.trace,
        };
        prop_assert!(trace.replay().is_ok());
    }

    #[test]
    fn iteration_agrees_with_its_unfolding(t in arb_term()) {
        // Normal forms commute with unfolding MIt into MRec.
        if let Ok(n) = normalize(&t, 200) {
            if let Ok(m) = normalize(&t.desugar_iteration(), 400) {
                prop_assert!(m.term.alpha_eq(&n.term.desugar_iteration()), "{} vs {}", m.term, n.term);
            }
        }
    }

    #[test]
    fn sn_members_are_in_their_closure(t in arb_term()) {
        let u = closed_universe(core::slice::from_ref(&t));
        prop_assume!(u.len() <= 40);
        if let Ok(cl) = sat_closure(core::slice::from_ref(&t), &u, 500) {
            let member = cl.iter().any(|c| c.alpha_eq(&t));
            prop_assert_eq!(member, sn_oracle(&t, 500).is_sn());
        }
    }
}

// Default budgets are generous.
const _: () = assert!(DEFAULT_SN_FUEL >= 100_000 && DEFAULT_FUEL >= 100_000);
