use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

use super::{
    context_equations, conv, equivalent, CheckOptions, CheckedJudgment, Context, DerivationScript,
    EqObligation, ErrorKind, Payload, Rule, Step,
};
use crate::equational::{check_evidence, derive_eq, EqEvidence, EquationSet};
use crate::proof::ProofTerm;
use crate::syntax::{
    apply_transformer, fresh_name, name, subst_formula_pred, FixKind, FixPoint, Formula, Name,
    Pred, Term, UnaryFn,
};

pub(super) struct Env<'a> {
    pub script: &'a DerivationScript,
    pub options: &'a CheckOptions,
    pub donors: &'a [&'a CheckedJudgment],
    pub log: &'a RefCell<Vec<EqObligation>>,
    pub step: usize,
}

type R<T> = Result<T, ErrorKind>;

fn merge_into(ctx: &mut Context, extra: &[(Name, Formula)]) -> R<()> {
    for (x, a) in extra {
        match ctx.iter().find(|(y, _)| y == x) {
            Some((_, b)) => {
                if !equivalent(a, b) {
                    return Err(ErrorKind::ContextClash(x.clone()));
                }
            }
            None => ctx.push((x.clone(), a.clone())),
        }
    }
    Ok(())
}

fn without(ctx: &[(Name, Formula)], x: &Name) -> Context {
    ctx.iter().filter(|(y, _)| y != x).cloned().collect()
}

fn lookup<'c>(ctx: &'c [(Name, Formula)], x: &Name) -> Option<&'c Formula> {
    ctx.iter().find(|(y, _)| y == x).map(|(_, a)| a)
}

fn ctx_free_obj(ctx: &[(Name, Formula)]) -> BTreeSet<Name> {
    ctx.iter().flat_map(|(_, a)| a.free_obj_vars()).collect()
}

fn ctx_free_pred(ctx: &[(Name, Formula)]) -> BTreeSet<Name> {
    ctx.iter().flat_map(|(_, a)| a.free_pred_vars()).collect()
}

impl Env<'_> {
    /// Adds the donor and base hypotheses to a step context.
    fn finish_ctx(&self, mut ctx: Context) -> R<Context> {
        for d in self.donors {
            merge_into(&mut ctx, &d.ctx)?;
        }
        merge_into(&mut ctx, &self.options.base_context)?;
        Ok(ctx)
    }

    fn judgment(&self, ctx: Context, term: ProofTerm, formula: Formula) -> R<CheckedJudgment> {
        self.script.signature.check_formula(&formula)?;
        Ok(CheckedJudgment { ctx: self.finish_ctx(ctx)?, eqs: self.script.eqs.clone(), term, formula })
    }

    /// Script equations followed by the rigid equations of the context.
    pub(super) fn pool(&self, ctx: &[(Name, Formula)]) -> R<EquationSet> {
        let full = self.finish_ctx(ctx.to_vec())?;
        let mut pool = self.script.eqs.clone();
        for e in context_equations(&full) {
            if !pool.equations.contains(&e) {
                pool.push(e);
            }
        }
        Ok(pool)
    }

    /// Validates or searches for evidence of `r = s` over the pool.
    pub(super) fn prove_eq(
        &self,
        ctx: &[(Name, Formula)],
        r: &Term,
        s: &Term,
        evidence: Option<&EqEvidence>,
    ) -> R<()> {
        let sig = &*self.script.signature;
        sig.check_term(r)?;
        sig.check_term(s)?;
        let pool = self.pool(ctx)?;
        let ev = match evidence {
            Some(ev) => ev.clone(),
            None => derive_eq(&pool, r, s, &self.options.rewrite)?,
        };
        check_evidence(&pool, Some(sig), &ev, r, s)?;
        self.log.borrow_mut().push(EqObligation {
            step: self.step,
            pool,
            lhs: r.clone(),
            rhs: s.clone(),
            evidence: ev,
            searched: evidence.is_none(),
        });
        Ok(())
    }
}

fn expect_premises(premises: &[&CheckedJudgment], n: usize) -> R<()> {
    if premises.len() != n {
        return Err(ErrorKind::PremiseCount { expected: n, found: premises.len() });
    }
    Ok(())
}

fn same(expected: &Formula, found: &Formula) -> R<()> {
    if equivalent(expected, found) {
        Ok(())
    } else {
        Err(ErrorKind::Mismatch { expected: Box::new(expected.clone()), found: Box::new(found.clone()) })
    }
}

fn shape(expected: &'static str, found: &Formula) -> ErrorKind {
    ErrorKind::Shape { expected, found: Box::new(found.clone()) }
}

/// `P ⊆_g R ≝ ∀x1...xn. P(x1, ..., xn) -> R(g1(x1), ..., gn(xn))`.
pub(crate) fn subset(p: &Pred, gs: &[UnaryFn], r: &Pred) -> Formula {
    let mut avoid: BTreeSet<Name> = p.free_obj_vars();
    avoid.extend(r.free_obj_vars());
    for g in gs {
        avoid.extend(g.free_vars());
    }
    let mut xs: Vec<Name> = Vec::with_capacity(gs.len());
    for i in 0..gs.len() {
        let base = alloc::format!("x{}", i + 1);
        let x = fresh_name(&base, |c| avoid.contains(c) || xs.iter().any(|y| &**y == c));
        xs.push(x);
    }
    let vars: Vec<Term> = xs.iter().map(|x| Term::Var(x.clone())).collect();
    let images: Vec<Term> = gs.iter().zip(&vars).map(|(g, v)| g.apply(v)).collect();
    let body = Formula::imp(p.apply(vars), r.apply(images));
    xs.into_iter().rev().fold(body, |acc, x| Formula::All(x, alloc::boxed::Box::new(acc)))
}

fn identity_tuple(n: usize) -> Vec<UnaryFn> {
    (0..n).map(|_| UnaryFn::identity()).collect()
}

fn symbol_tuple(fp: &FixPoint) -> Vec<UnaryFn> {
    fp.symbols.iter().map(|s| UnaryFn::symbol(s)).collect()
}

fn fix_atom(a: &Formula) -> Option<(&Arc<FixPoint>, &[Term])> {
    match a {
        Formula::Atom(Pred::Fix(fp), args) => Some((fp, args)),
        _ => None,
    }
}

fn fresh_pred_var(motive: &Pred, ctx: &[(Name, Formula)]) -> Name {
    let taken: BTreeSet<Name> = motive.free_pred_vars().into_iter().chain(ctx_free_pred(ctx)).collect();
    fresh_name("X", |c| taken.contains(c))
}

/// The formula required of the step term `s` of the recursion rules.
fn recursion_step_formula(
    kind: Rule,
    fp: &Arc<FixPoint>,
    motive: &Pred,
    fns: &[UnaryFn],
    x: &Name,
) -> R<Formula> {
    let n = fp.arity();
    let xv = Pred::Var(x.clone(), n);
    let fix = Pred::Fix(fp.clone());
    let phi_x = apply_transformer(&fp.phi, &xv)?;
    let syms = symbol_tuple(fp);
    let body = match kind {
        Rule::MuE | Rule::MIt => {
            let comp: Vec<UnaryFn> = fns.iter().zip(&syms).map(|(f, c)| f.compose(c)).collect();
            let inner = Formula::imp(subset(&xv, fns, motive), subset(&phi_x, &comp, motive));
            if kind == Rule::MuE {
                Formula::imp(subset(&xv, &identity_tuple(n), &fix), inner)
            } else {
                inner
            }
        }
        _ => {
            let comp: Vec<UnaryFn> = syms.iter().zip(fns).map(|(d, f)| d.compose(f)).collect();
            let inner = Formula::imp(subset(motive, fns, &xv), subset(motive, &comp, &phi_x));
            if kind == Rule::NuI {
                Formula::imp(subset(&fix, &identity_tuple(n), &xv), inner)
            } else {
                inner
            }
        }
    };
    Ok(Formula::All2(x.clone(), n, alloc::boxed::Box::new(body)))
}

pub(super) fn check_rule(env: &Env<'_>, step: &Step, premises: &[&CheckedJudgment]) -> R<CheckedJudgment> {
    let sig = &*env.script.signature;
    match (step.rule, &step.payload) {
        (Rule::Var, Payload::Hyp { name, formula: Some(a) }) => {
            expect_premises(premises, 0)?;
            sig.check_formula(a)?;
            env.judgment(alloc::vec![(name.clone(), a.clone())], ProofTerm::Var(name.clone()), a.clone())
        }
        (Rule::Var, _) => Err(ErrorKind::MissingPayload("hypothesis `x : A`")),

        (Rule::Lemma, Payload::Lemma(j)) => {
            expect_premises(premises, 0)?;
            if !j.eqs.is_subset(&env.script.eqs) {
                return Err(ErrorKind::LemmaEquations);
            }
            env.judgment(j.ctx.clone(), j.term.clone(), j.formula.clone())
        }
        (Rule::Lemma, _) => Err(ErrorKind::MissingPayload("lemma")),

        (Rule::ImpI, Payload::Hyp { name, formula }) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let a = match (formula, lookup(&p.ctx, name)) {
                (Some(a), Some(b)) => {
                    same(a, b)?;
                    a.clone()
                }
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => return Err(ErrorKind::MissingPayload("formula of the discharged hypothesis")),
            };
            env.judgment(
                without(&p.ctx, name),
                ProofTerm::Lam(name.clone(), alloc::boxed::Box::new(p.term.clone())),
                Formula::imp(a, p.formula.clone()),
            )
        }
        (Rule::ImpI, _) => Err(ErrorKind::MissingPayload("hypothesis name")),

        (Rule::ImpE, _) => {
            expect_premises(premises, 2)?;
            let (f, a) = (premises[0], premises[1]);
            let fa = f.formula.beta_normal();
            let Formula::Imp(dom, cod) = &fa else {
                return Err(shape("an implication", &f.formula));
            };
            same(dom, &a.formula)?;
            let mut ctx = f.ctx.clone();
            merge_into(&mut ctx, &a.ctx)?;
            env.judgment(ctx, ProofTerm::app(f.term.clone(), a.term.clone()), (**cod).clone())
        }

        (Rule::AllI, Payload::Obj(x)) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let full = env.finish_ctx(p.ctx.clone())?;
            if ctx_free_obj(&full).contains(x) {
                return Err(ErrorKind::Freshness {
                    var: x.clone(),
                    reason: String::from("it occurs free in the context"),
                });
            }
            env.judgment(p.ctx.clone(), p.term.clone(), Formula::All(x.clone(), alloc::boxed::Box::new(p.formula.clone())))
        }
        (Rule::AllI, _) => Err(ErrorKind::MissingPayload("variable")),

        (Rule::AllE, Payload::Witness(t)) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            sig.check_term(t)?;
            let a = p.formula.beta_normal();
            let Formula::All(x, body) = &a else {
                return Err(shape("a first-order universal", &p.formula));
            };
            env.judgment(p.ctx.clone(), p.term.clone(), body.subst_obj(x, t))
        }
        (Rule::AllE, _) => Err(ErrorKind::MissingPayload("witness term")),

        (Rule::All2I, Payload::Pred2(x, n)) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let full = env.finish_ctx(p.ctx.clone())?;
            if ctx_free_pred(&full).contains(x) {
                return Err(ErrorKind::Freshness {
                    var: x.clone(),
                    reason: String::from("it occurs free in the context"),
                });
            }
            env.judgment(
                p.ctx.clone(),
                p.term.clone(),
                Formula::All2(x.clone(), *n, alloc::boxed::Box::new(p.formula.clone())),
            )
        }
        (Rule::All2I, _) => Err(ErrorKind::MissingPayload("predicate variable")),

        (Rule::All2E, Payload::PredWitness(w)) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            sig.check_pred(w)?;
            all2_elim(env, p, w)
        }
        (Rule::All2E, _) => Err(ErrorKind::MissingPayload("witness predicate")),

        (Rule::Eq, Payload::Rewrite { template, var, lhs, rhs, evidence }) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let ctx = env.finish_ctx(p.ctx.clone())?;
            let conclusion = rewrite_step(env, &ctx, &p.formula, template, var, lhs, rhs, evidence.as_ref())?;
            env.judgment(p.ctx.clone(), p.term.clone(), conclusion)
        }
        (Rule::Eq, Payload::Convert) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let Some(target) = &step.formula else {
                return Err(ErrorKind::MissingPayload("stated conclusion"));
            };
            sig.check_formula(target)?;
            let ctx = env.finish_ctx(p.ctx.clone())?;
            conv::convert(env, &ctx, &p.formula, target)?;
            env.judgment(p.ctx.clone(), p.term.clone(), target.clone())
        }
        (Rule::Eq, _) => Err(ErrorKind::MissingPayload("rewrite template")),

        (Rule::EqAx, payload) => {
            expect_premises(premises, 0)?;
            let (r, s, ev) = equation_payload(payload, step.formula.as_ref(), false)?;
            env.prove_eq(&[], &r, &s, ev.as_ref())?;
            env.judgment(Context::new(), ProofTerm::Unit, Formula::equation(r, s))
        }

        (Rule::MuI, Payload::Fold { fix, args }) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            if fix.kind != FixKind::Mu {
                return Err(ErrorKind::WrongFixKind(fix.name.clone()));
            }
            for t in args {
                sig.check_term(t)?;
            }
            let unfolded = apply_transformer(&fix.phi, &Pred::Fix(fix.clone()))?;
            if args.len() != fix.arity() {
                return Err(ErrorKind::Syntax(crate::syntax::SyntaxError::ArityMismatch {
                    name: fix.name.clone(),
                    expected: fix.arity(),
                    found: args.len(),
                }));
            }
            same(&unfolded.apply(args.clone()), &p.formula)?;
            let images: Vec<Term> = symbol_tuple(fix).iter().zip(args).map(|(c, t)| c.apply(t)).collect();
            env.judgment(
                p.ctx.clone(),
                ProofTerm::in_(p.term.clone()),
                Formula::Atom(Pred::Fix(fix.clone()), images),
            )
        }
        (Rule::MuI, _) => Err(ErrorKind::MissingPayload("fixed point and arguments")),

        (Rule::NuE, _) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let a = p.formula.beta_normal();
            let Some((fp, args)) = fix_atom(&a) else {
                return Err(shape("a coinductive atom", &p.formula));
            };
            if fp.kind != FixKind::Nu {
                return Err(ErrorKind::WrongFixKind(fp.name.clone()));
            }
            let unfolded = apply_transformer(&fp.phi, &Pred::Fix(fp.clone()))?;
            let images: Vec<Term> = symbol_tuple(fp).iter().zip(args).map(|(d, t)| d.apply(t)).collect();
            env.judgment(p.ctx.clone(), ProofTerm::out(p.term.clone()), unfolded.apply(images))
        }

        (rule @ (Rule::MuE | Rule::NuI), Payload::Motive { fix, motive, fns }) => {
            expect_premises(premises, 2)?;
            let stated = step.formula.as_ref();
            recursion(env, rule, fix.as_ref(), stated, premises[0], premises[1], motive, fns)
        }
        (rule @ (Rule::MIt | Rule::MCoIt), Payload::Motive { fix, motive, fns }) => {
            expect_premises(premises, 2)?;
            let stated = step.formula.as_ref();
            iteration(env, rule, fix.as_ref(), stated, premises[0], premises[1], motive, fns)
        }
        (Rule::MuE | Rule::NuI | Rule::MIt | Rule::MCoIt, _) => {
            Err(ErrorKind::MissingPayload("motive and function tuple"))
        }

        (Rule::AndI, _) => {
            expect_premises(premises, 2)?;
            let (a, b) = (premises[0], premises[1]);
            let mut ctx = a.ctx.clone();
            merge_into(&mut ctx, &b.ctx)?;
            env.judgment(
                ctx,
                ProofTerm::pair(a.term.clone(), b.term.clone()),
                Formula::and(a.formula.clone(), b.formula.clone()),
            )
        }
        (Rule::AndEL | Rule::AndER, _) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let a = p.formula.beta_normal();
            let Formula::And(l, r) = &a else {
                return Err(shape("a conjunction", &p.formula));
            };
            let (term, formula) = if step.rule == Rule::AndEL {
                (ProofTerm::Fst(alloc::boxed::Box::new(p.term.clone())), (**l).clone())
            } else {
                (ProofTerm::Snd(alloc::boxed::Box::new(p.term.clone())), (**r).clone())
            };
            env.judgment(p.ctx.clone(), term, formula)
        }
        (Rule::OrIL | Rule::OrIR, _) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let Some(stated) = &step.formula else {
                return Err(ErrorKind::MissingPayload("stated disjunction"));
            };
            let a = stated.beta_normal();
            let Formula::Or(l, r) = &a else {
                return Err(shape("a disjunction", stated));
            };
            let (term, side) = if step.rule == Rule::OrIL {
                (ProofTerm::Inl(alloc::boxed::Box::new(p.term.clone())), l)
            } else {
                (ProofTerm::Inr(alloc::boxed::Box::new(p.term.clone())), r)
            };
            same(side, &p.formula)?;
            env.judgment(p.ctx.clone(), term, stated.clone())
        }
        (Rule::OrE, Payload::Branches(x, y)) => {
            expect_premises(premises, 3)?;
            let (d, s, t) = (premises[0], premises[1], premises[2]);
            let a = d.formula.beta_normal();
            let Formula::Or(l, r) = &a else {
                return Err(shape("a disjunction", &d.formula));
            };
            if let Some(h) = lookup(&s.ctx, x) {
                same(l, h)?;
            }
            if let Some(h) = lookup(&t.ctx, y) {
                same(r, h)?;
            }
            same(&s.formula, &t.formula)?;
            let mut ctx = d.ctx.clone();
            merge_into(&mut ctx, &without(&s.ctx, x))?;
            merge_into(&mut ctx, &without(&t.ctx, y))?;
            let term = ProofTerm::Case(
                alloc::boxed::Box::new(d.term.clone()),
                x.clone(),
                alloc::boxed::Box::new(s.term.clone()),
                y.clone(),
                alloc::boxed::Box::new(t.term.clone()),
            );
            env.judgment(ctx, term, s.formula.clone())
        }
        (Rule::OrE, _) => Err(ErrorKind::MissingPayload("branch hypothesis names")),

        (Rule::ExI, Payload::Witness(w)) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            sig.check_term(w)?;
            let Some(stated) = &step.formula else {
                return Err(ErrorKind::MissingPayload("stated existential"));
            };
            let a = stated.beta_normal();
            let Formula::Ex(x, body) = &a else {
                return Err(shape("an existential", stated));
            };
            same(&body.subst_obj(x, w), &p.formula)?;
            env.judgment(p.ctx.clone(), ProofTerm::Pack(alloc::boxed::Box::new(p.term.clone())), stated.clone())
        }
        (Rule::ExI, _) => Err(ErrorKind::MissingPayload("witness term")),

        (Rule::ExE, Payload::Unpack { eigen, hyp }) => {
            expect_premises(premises, 2)?;
            let (e, b) = (premises[0], premises[1]);
            let a = e.formula.beta_normal();
            let Formula::Ex(x, body) = &a else {
                return Err(shape("an existential", &e.formula));
            };
            let opened = body.subst_obj(x, &Term::Var(eigen.clone()));
            if let Some(h) = lookup(&b.ctx, hyp) {
                same(&opened, h)?;
            }
            let mut ctx = e.ctx.clone();
            merge_into(&mut ctx, &without(&b.ctx, hyp))?;
            let full = env.finish_ctx(ctx.clone())?;
            if ctx_free_obj(&full).contains(eigen) {
                return Err(ErrorKind::Freshness {
                    var: eigen.clone(),
                    reason: String::from("it occurs free in the context"),
                });
            }
            if b.formula.free_obj_vars().contains(eigen) {
                return Err(ErrorKind::Freshness {
                    var: eigen.clone(),
                    reason: String::from("it occurs free in the conclusion"),
                });
            }
            let term = ProofTerm::Open(
                alloc::boxed::Box::new(e.term.clone()),
                hyp.clone(),
                alloc::boxed::Box::new(b.term.clone()),
            );
            env.judgment(ctx, term, b.formula.clone())
        }
        (Rule::ExE, _) => Err(ErrorKind::MissingPayload("eigenvariable and hypothesis")),

        (Rule::ResI, payload) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let (r, s, ev) = equation_payload(payload, step.formula.as_ref(), true)?;
            let ctx = env.finish_ctx(p.ctx.clone())?;
            env.prove_eq(&ctx, &r, &s, ev.as_ref())?;
            env.judgment(p.ctx.clone(), p.term.clone(), Formula::restrict(p.formula.clone(), r, s))
        }
        (Rule::ResE, _) => {
            expect_premises(premises, 1)?;
            let p = premises[0];
            let a = p.formula.beta_normal();
            let Formula::Restrict(inner, _, _) = &a else {
                return Err(shape("a restricted formula", &p.formula));
            };
            env.judgment(p.ctx.clone(), p.term.clone(), (**inner).clone())
        }
    }
}

/// Equation of `eq-ax` / `res-i`, from the payload or the stated conclusion.
fn equation_payload(
    payload: &Payload,
    stated: Option<&Formula>,
    restricted: bool,
) -> R<(Term, Term, Option<EqEvidence>)> {
    if let Payload::Equation { lhs, rhs, evidence } = payload {
        return Ok((lhs.clone(), rhs.clone(), evidence.clone()));
    }
    let found = stated.map(Formula::beta_normal);
    let pair = match (&found, restricted) {
        (Some(Formula::Restrict(_, r, s)), true) => Some((r.clone(), s.clone())),
        (Some(a), false) => a.as_equation().map(|(r, s)| (r.clone(), s.clone())),
        _ => None,
    };
    pair.map(|(r, s)| (r, s, None)).ok_or(ErrorKind::MissingPayload("equation"))
}

fn all2_elim(env: &Env<'_>, p: &CheckedJudgment, w: &Pred) -> R<CheckedJudgment> {
    let a = p.formula.beta_normal();
    let Formula::All2(x, n, body) = &a else {
        return Err(shape("a second-order universal", &p.formula));
    };
    if w.arity() != *n {
        return Err(ErrorKind::Syntax(crate::syntax::SyntaxError::ArityMismatch {
            name: x.clone(),
            expected: *n,
            found: w.arity(),
        }));
    }
    let inst = subst_formula_pred(body, x, w)?;
    env.judgment(p.ctx.clone(), p.term.clone(), inst)
}

#[allow(clippy::too_many_arguments)]
pub(super) fn rewrite_step(
    env: &Env<'_>,
    ctx: &[(Name, Formula)],
    premise: &Formula,
    template: &Formula,
    var: &Name,
    lhs: &Term,
    rhs: &Term,
    evidence: Option<&EqEvidence>,
) -> R<Formula> {
    env.script.signature.check_formula(template)?;
    same(&template.subst_obj(var, lhs), premise)?;
    env.prove_eq(ctx, lhs, rhs, evidence)?;
    Ok(template.subst_obj(var, rhs))
}

fn check_motive(env: &Env<'_>, fp: &FixPoint, motive: &Pred, fns: &[UnaryFn]) -> R<()> {
    let sig = &*env.script.signature;
    sig.check_pred(motive)?;
    for f in fns {
        sig.check_term(&f.body)?;
    }
    let n = fp.arity();
    if motive.arity() != n || fns.len() != n {
        return Err(ErrorKind::Syntax(crate::syntax::SyntaxError::ArityMismatch {
            name: fp.name.clone(),
            expected: n,
            found: if motive.arity() != n { motive.arity() } else { fns.len() },
        }));
    }
    Ok(())
}

/// `mu-e` and `nu-i`.
#[allow(clippy::too_many_arguments)]
fn recursion(
    env: &Env<'_>,
    rule: Rule,
    fix: Option<&Arc<FixPoint>>,
    stated: Option<&Formula>,
    s: &CheckedJudgment,
    r: &CheckedJudgment,
    motive: &Pred,
    fns: &[UnaryFn],
) -> R<CheckedJudgment> {
    let mut ctx = s.ctx.clone();
    merge_into(&mut ctx, &r.ctx)?;
    let rf = r.formula.beta_normal();
    let (fp, args): (Arc<FixPoint>, Vec<Term>) = if rule == Rule::MuE {
        let Some((fp, args)) = fix_atom(&rf) else {
            return Err(shape("an inductive atom", &r.formula));
        };
        if fp.kind != FixKind::Mu {
            return Err(ErrorKind::WrongFixKind(fp.name.clone()));
        }
        (fp.clone(), args.to_vec())
    } else {
        let fp = coinductive_fix(fix, stated, s)?;
        check_motive(env, &fp, motive, fns)?;
        let args = motive_args(motive, &rf).ok_or_else(|| ErrorKind::Mismatch {
            expected: Box::new(motive.apply(generic_args(motive.arity()))),
            found: Box::new(r.formula.clone()),
        })?;
        (fp, args)
    };
    check_motive(env, &fp, motive, fns)?;
    let x = fresh_pred_var(motive, &ctx);
    let expected = recursion_step_formula(rule, &fp, motive, fns, &x)?;
    same(&expected, &s.formula)?;
    let images: Vec<Term> = fns.iter().zip(&args).map(|(f, t)| f.apply(t)).collect();
    let (term, formula) = if rule == Rule::MuE {
        (ProofTerm::mrec(s.term.clone(), r.term.clone()), motive.apply(images))
    } else {
        (ProofTerm::mcorec(s.term.clone(), r.term.clone()), Formula::Atom(Pred::Fix(fp), images))
    };
    env.judgment(ctx, term, formula)
}

/// Recovers `t` from `K(t)` when the premise formula is an instance of the motive.
fn motive_args(motive: &Pred, found: &Formula) -> Option<Vec<Term>> {
    match motive {
        Pred::Comp(xs, body) => {
            let mut sigma = crate::syntax::Subst::new();
            if conv::match_formula(&body.beta_normal(), found, xs, &mut sigma) {
                Some(xs.iter().map(|x| sigma.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()))).collect())
            } else {
                None
            }
        }
        _ => match found {
            Formula::Atom(p, args) if crate::syntax::pred_alpha_eq(p, motive) => Some(args.clone()),
            _ => None,
        },
    }
}

/// The coinductive fixed point mentioned in the step formula `∀X(νΦ ⊆ X -> ...)`
/// or, for coiteration, inside `K ⊆ Φ(X)`: the first fixed point found.
fn fix_of_step(a: &Formula) -> Option<Arc<FixPoint>> {
    fn walk(a: &Formula) -> Option<Arc<FixPoint>> {
        match a {
            Formula::Atom(Pred::Fix(fp), _) => Some(fp.clone()),
            Formula::Atom(Pred::Comp(_, b), _) => walk(b),
            Formula::Atom(..) => None,
            Formula::Imp(l, r) | Formula::And(l, r) | Formula::Or(l, r) => walk(l).or_else(|| walk(r)),
            Formula::All(_, b) | Formula::Ex(_, b) | Formula::All2(_, _, b) | Formula::Restrict(b, _, _) => walk(b),
        }
    }
    walk(&a.beta_normal())
}

/// `mit` and `mcoit`: elaborated to `mu-e` / `nu-i` with the step `\_. s`.
#[allow(clippy::too_many_arguments)]
fn iteration(
    env: &Env<'_>,
    rule: Rule,
    fix: Option<&Arc<FixPoint>>,
    stated: Option<&Formula>,
    s: &CheckedJudgment,
    r: &CheckedJudgment,
    motive: &Pred,
    fns: &[UnaryFn],
) -> R<CheckedJudgment> {
    let fp = if rule == Rule::MIt {
        let _ = fix;
        let rf = r.formula.beta_normal();
        match fix_atom(&rf) {
            Some((fp, _)) if fp.kind == FixKind::Mu => fp.clone(),
            Some((fp, _)) => return Err(ErrorKind::WrongFixKind(fp.name.clone())),
            None => return Err(shape("an inductive atom", &r.formula)),
        }
    } else {
        coinductive_fix(fix, stated, s)?
    };
    check_motive(env, &fp, motive, fns)?;
    let mut ctx = s.ctx.clone();
    merge_into(&mut ctx, &r.ctx)?;
    let x = fresh_pred_var(motive, &ctx);
    let expected = recursion_step_formula(rule, &fp, motive, fns, &x)?;
    same(&expected, &s.formula)?;

    // s : ∀X(A -> B)  ~>  λ_. s : ∀X((X ⊆ μΦ) -> A -> B), resp. (νΦ ⊆ X) for coiteration.
    let inst = all2_elim(env, s, &Pred::Var(x.clone(), fp.arity()))?;
    let n = fp.arity();
    let xv = Pred::Var(x.clone(), n);
    let fix = Pred::Fix(fp.clone());
    let guard = if rule == Rule::MIt {
        subset(&xv, &identity_tuple(n), &fix)
    } else {
        subset(&fix, &identity_tuple(n), &xv)
    };
    let taken: BTreeSet<Name> = inst.ctx.iter().map(|(h, _)| h.clone()).chain(s.term.free_vars()).collect();
    let dummy = fresh_name("_", |c| taken.contains(c));
    let weakened = CheckedJudgment {
        ctx: inst.ctx.clone(),
        eqs: inst.eqs.clone(),
        term: ProofTerm::Lam(dummy, alloc::boxed::Box::new(inst.term.clone())),
        formula: Formula::imp(guard, inst.formula.clone()),
    };
    let generalized = CheckedJudgment {
        formula: Formula::All2(x, n, alloc::boxed::Box::new(weakened.formula.clone())),
        ..weakened
    };
    let primitive = if rule == Rule::MIt { Rule::MuE } else { Rule::NuI };
    let elaborated = recursion(env, primitive, Some(&fp), stated, &generalized, r, motive, fns)?;
    let term = if rule == Rule::MIt {
        ProofTerm::mit(s.term.clone(), r.term.clone())
    } else {
        ProofTerm::mcoit(s.term.clone(), r.term.clone())
    };
    Ok(CheckedJudgment { term, ..elaborated })
}

/// The coinductive fixed point of `nu-i` / `mcoit`: given explicitly, or the
/// head of the stated conclusion, or the one mentioned by the step formula.
fn coinductive_fix(
    fix: Option<&Arc<FixPoint>>,
    stated: Option<&Formula>,
    s: &CheckedJudgment,
) -> R<Arc<FixPoint>> {
    let from_stated = stated.and_then(|a| match a.beta_normal() {
        Formula::Atom(Pred::Fix(fp), _) => Some(fp),
        _ => None,
    });
    let found = fix.cloned().or(from_stated).or_else(|| fix_of_step(&s.formula));
    match found {
        Some(fp) if fp.kind == FixKind::Nu => Ok(fp),
        Some(fp) => Err(ErrorKind::WrongFixKind(fp.name.clone())),
        None => Err(ErrorKind::MissingPayload("coinductive fixed point")),
    }
}

fn generic_args(n: usize) -> Vec<Term> {
    (1..=n).map(|i| Term::Var(name(&alloc::format!("t{i}")))).collect()
}
