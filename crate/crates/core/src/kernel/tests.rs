use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::syntax::{name, FixKind, Transformer};

fn x() -> Term {
    Term::var("x")
}

fn star() -> Term {
    Term::constant("star")
}

/// Ad-hoc naturals: `N = μX.λx. x = star ∨ X(x)` with constructor `suc`,
/// so that `0` is `suc(star)`.
fn nats() -> (Arc<Signature>, Arc<FixPoint>) {
    let mut sig = Signature::new();
    sig.add_function("star", 0).unwrap();
    sig.add_function("suc", 1).unwrap();
    sig.add_function("zero", 0).unwrap();
    sig.add_predicate("P", 1).unwrap();
    let body = Pred::comp(
        &["x"],
        Formula::or(Formula::equation(x(), star()), Formula::atom(Pred::var("X", 1), vec![x()])),
    );
    let phi = Transformer { var: name("X"), arity: 1, body };
    let fp = sig.add_fixpoint(FixKind::Mu, "N", phi, vec![name("suc")]).unwrap();
    (Arc::new(sig), fp)
}

fn script(sig: &Arc<Signature>, eqs: EquationSet, steps: Vec<Step>) -> DerivationScript {
    DerivationScript { signature: sig.clone(), eqs, steps }
}

fn hyp(n: &str, a: Formula) -> Step {
    Step::new(Rule::Var, vec![], Payload::Hyp { name: name(n), formula: Some(a) })
}

fn p(t: Term) -> Formula {
    Formula::atom(Pred::Sym(name("P"), 1), vec![t])
}

fn nat(fp: &Arc<FixPoint>, t: Term) -> Formula {
    Formula::atom(Pred::Fix(fp.clone()), vec![t])
}

fn phi_at(fp: &Arc<FixPoint>, x: Pred, t: Term) -> Formula {
    crate::syntax::apply_transformer(&fp.phi, &x).unwrap().apply(vec![t])
}

#[test]
fn identity_has_empty_context() {
    let (sig, _) = nats();
    let s = script(
        &sig,
        EquationSet::new(),
        vec![hyp("h", p(x())), Step::new(Rule::ImpI, vec![0], Payload::Hyp { name: name("h"), formula: None })],
    );
    let j = check_script(&s).unwrap();
    assert!(j.context().is_empty());
    assert_eq!(j.formula(), &Formula::imp(p(x()), p(x())));
    assert_eq!(alloc::format!("{}", j.term()), "\\h. h");
}

#[test]
fn generalizing_a_context_variable_fails() {
    let (sig, _) = nats();
    let s = script(&sig, EquationSet::new(), vec![hyp("h", p(x())), Step::new(Rule::AllI, vec![0], Payload::Obj(name("x")))]);
    let err = check_script(&s).unwrap_err();
    assert_eq!(err.step, 1);
    assert!(matches!(err.kind, ErrorKind::Freshness { .. }));
}

#[test]
fn forward_references_are_rejected() {
    let (sig, _) = nats();
    let s = script(&sig, EquationSet::new(), vec![Step::new(Rule::ImpE, vec![1, 0], Payload::None)]);
    assert!(matches!(check_script(&s).unwrap_err().kind, ErrorKind::ForwardReference(1)));
}

fn zero_is_nat(fp: &Arc<FixPoint>) -> Vec<Step> {
    let dis = phi_at(fp, Pred::Fix(fp.clone()), star());
    vec![
        Step::new(Rule::EqAx, vec![], Payload::Equation { lhs: star(), rhs: star(), evidence: None }),
        Step::new(Rule::OrIL, vec![0], Payload::None).stating(dis),
        Step::new(Rule::MuI, vec![1], Payload::Fold { fix: fp.clone(), args: vec![star()] }),
        Step::new(Rule::Eq, vec![2], Payload::Convert).stating(nat(fp, Term::constant("zero"))),
    ]
}

#[test]
fn zero_is_a_natural() {
    let (sig, fp) = nats();
    let eqs = EquationSet::from_pairs(vec![(Term::unary("suc", star()), Term::constant("zero"))]);
    let j = check_script(&script(&sig, eqs, zero_is_nat(&fp))).unwrap();
    assert!(j.context().is_empty());
    assert_eq!(alloc::format!("{}", j.term()), "in (inl unit)");
}

#[test]
fn conversion_needs_the_equation() {
    let (sig, fp) = nats();
    let err = check_script(&script(&sig, EquationSet::new(), zero_is_nat(&fp))).unwrap_err();
    assert_eq!(err.step, 3);
    assert!(matches!(err.kind, ErrorKind::Equation(_)), "{err}");
}

/// `⊢ ∀X(X ⊆ N -> Φ(X) ⊆_suc N)`, the step of the identity iteration.
fn identity_step(fp: &Arc<FixPoint>) -> Vec<Step> {
    let xp = Pred::var("X", 1);
    let fix = Pred::Fix(fp.clone());
    let h = rules::subset(&xp, &[UnaryFn::identity()], &fix);
    let left = Formula::equation(x(), star());
    vec![
        hyp("h", h),
        hyp("y", phi_at(fp, xp.clone(), x())),
        hyp("e", left),
        Step::new(Rule::OrIL, vec![2], Payload::None).stating(phi_at(fp, fix.clone(), x())),
        hyp("z", Formula::atom(xp.clone(), vec![x()])),
        Step::new(Rule::AllE, vec![0], Payload::Witness(x())),
        Step::new(Rule::ImpE, vec![5, 4], Payload::None),
        Step::new(Rule::OrIR, vec![6], Payload::None).stating(phi_at(fp, fix.clone(), x())),
        Step::new(Rule::OrE, vec![1, 3, 7], Payload::Branches(name("e"), name("z"))),
        Step::new(Rule::MuI, vec![8], Payload::Fold { fix: fp.clone(), args: vec![x()] }),
        Step::new(Rule::ImpI, vec![9], Payload::Hyp { name: name("y"), formula: None }),
        Step::new(Rule::AllI, vec![10], Payload::Obj(name("x"))),
        Step::new(Rule::ImpI, vec![11], Payload::Hyp { name: name("h"), formula: None }),
        Step::new(Rule::All2I, vec![12], Payload::Pred2(name("X"), 1)),
    ]
}

#[test]
fn iteration_with_identity_motive() {
    let (sig, fp) = nats();
    let mut steps = identity_step(&fp);
    let s = steps.len() - 1;
    steps.push(hyp("n", nat(&fp, Term::var("t"))));
    steps.push(Step::new(
        Rule::MIt,
        vec![s, s + 1],
        Payload::Motive { fix: None, motive: Pred::Fix(fp.clone()), fns: vec![UnaryFn::identity()] },
    ));
    let j = check_script(&script(&sig, EquationSet::new(), steps)).unwrap();
    assert_eq!(j.formula(), &nat(&fp, Term::var("t")));
    assert_eq!(j.context().len(), 1);
    assert!(matches!(j.term(), ProofTerm::MIt(..)));
}

#[test]
fn recursion_rejects_the_iteration_step() {
    let (sig, fp) = nats();
    let mut steps = identity_step(&fp);
    let s = steps.len() - 1;
    steps.push(hyp("n", nat(&fp, Term::var("t"))));
    steps.push(Step::new(
        Rule::MuE,
        vec![s, s + 1],
        Payload::Motive { fix: None, motive: Pred::Fix(fp.clone()), fns: vec![UnaryFn::identity()] },
    ));
    let err = check_script(&script(&sig, EquationSet::new(), steps)).unwrap_err();
    assert!(matches!(err.kind, ErrorKind::Mismatch { .. }), "{err}");
}

#[test]
fn weakening_keeps_every_step_valid() {
    let (sig, fp) = nats();
    let s = script(&sig, EquationSet::new(), identity_step(&fp));
    let plain = check_steps(&s, &CheckOptions::default()).unwrap();
    // An unrelated hypothesis that does not mention the eigenvariables.
    let options = CheckOptions {
        base_context: vec![(name("w"), p(Term::var("u")))],
        ..CheckOptions::default()
    };
    let weak = check_steps(&s, &options).unwrap();
    for (a, b) in plain.iter().zip(&weak) {
        assert!(equivalent(a.formula(), b.formula()));
    }
}

#[test]
fn weakening_by_a_clashing_hypothesis_blocks_generalization() {
    let (sig, fp) = nats();
    let s = script(&sig, EquationSet::new(), identity_step(&fp));
    let options = CheckOptions {
        base_context: vec![(name("w"), p(x()))],
        ..CheckOptions::default()
    };
    let err = check_steps(&s, &options).unwrap_err();
    assert_eq!(err.rule, Rule::AllI);
}

#[test]
fn restriction_supplies_equations() {
    // v : P(x) |> x = zero  gives  P(zero) via res-e and eq with v as donor.
    let (sig, _) = nats();
    let z = Term::constant("zero");
    let steps = vec![
        hyp("v", Formula::restrict(p(x()), x(), z.clone())),
        Step::new(Rule::ResE, vec![0], Payload::None),
        Step::new(Rule::Eq, vec![1], Payload::Convert).stating(p(z.clone())),
    ];
    let j = check_script(&script(&sig, EquationSet::new(), steps)).unwrap();
    assert_eq!(j.formula(), &p(z));
}

#[test]
fn equation_sugar_is_leibniz() {
    // From e : x = zero and P(x) derive P(zero) by the rules for the sugar.
    let (sig, _) = nats();
    let z = Term::constant("zero");
    let motive = Pred::comp(&["y"], p(Term::var("y")));
    let steps = vec![
        hyp("e", Formula::equation(x(), z.clone())),
        Step::new(Rule::All2E, vec![0], Payload::PredWitness(motive)),
        hyp("q", p(x())),
        Step::new(Rule::ImpE, vec![1, 2], Payload::None),
    ];
    let j = check_script(&script(&sig, EquationSet::new(), steps)).unwrap();
    assert!(equivalent(j.formula(), &p(z)));
}

#[test]
fn stated_formula_must_agree() {
    let (sig, _) = nats();
    let steps = vec![hyp("h", p(x())).stating(p(star()))];
    let err = check_script(&script(&sig, EquationSet::new(), steps)).unwrap_err();
    assert!(matches!(err.kind, ErrorKind::Mismatch { .. }));
}

#[test]
fn coverage_counts_rules() {
    let (_, fp) = nats();
    let (sig, _) = nats();
    let s = script(&sig, EquationSet::new(), identity_step(&fp));
    let mut cov = Coverage::new();
    coverage(&s, &mut cov);
    assert_eq!(cov.get(&Rule::Var), Some(&4));
    assert_eq!(cov.get(&Rule::All2I), Some(&1));
}
