use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::term::{Subst, Term};
use super::{fresh_name, name, Name, SyntaxError};

/// Name of the bound predicate variable in `r = s ≝ ∀E/1. E(r) -> E(s)`.
pub const EQUATION_VAR: &str = "E";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FixKind {
    /// Least fixed point; its symbols are constructors.
    Mu,
    /// Greatest fixed point; its symbols are destructors.
    Nu,
}

/// A predicate transformer `λX.P`. It must be closed apart from `X`; there is no
/// positivity requirement on the occurrences of `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformer {
    pub var: Name,
    pub arity: usize,
    pub body: Pred,
}

/// A declared `μ(Φ)` or `ν(Φ)` together with its constructor (destructor) tuple.
/// `name` is only used for display.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixPoint {
    pub kind: FixKind,
    pub name: Name,
    pub phi: Transformer,
    pub symbols: Vec<Name>,
}

impl FixPoint {
    pub fn arity(&self) -> usize {
        self.phi.arity
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pred {
    /// Second-order variable with its declared arity.
    Var(Name, usize),
    /// Predicate symbol of the signature.
    Sym(Name, usize),
    /// Comprehension `λx1...xn.A`.
    Comp(Vec<Name>, Box<Formula>),
    Fix(Arc<FixPoint>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom(Pred, Vec<Term>),
    Imp(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    All(Name, Box<Formula>),
    All2(Name, usize, Box<Formula>),
    Ex(Name, Box<Formula>),
    /// `A |> r = s`: `A` restricted by an equation without computational content.
    Restrict(Box<Formula>, Term, Term),
}

impl Pred {
    pub fn arity(&self) -> usize {
        match self {
            Pred::Var(_, n) | Pred::Sym(_, n) => *n,
            Pred::Comp(xs, _) => xs.len(),
            Pred::Fix(fp) => fp.arity(),
        }
    }

    pub fn var(x: &str, arity: usize) -> Pred {
        Pred::Var(name(x), arity)
    }

    pub fn comp(binders: &[&str], body: Formula) -> Pred {
        Pred::Comp(binders.iter().map(|b| name(b)).collect(), Box::new(body))
    }

    fn collect_free_obj(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        if let Pred::Comp(xs, body) = self {
            let depth = bound.len();
            bound.extend(xs.iter().cloned());
            body.collect_free_obj(bound, out);
            bound.truncate(depth);
        }
    }

    fn collect_free_pred(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Pred::Var(x, _) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Pred::Sym(..) | Pred::Fix(_) => {}
            Pred::Comp(_, body) => body.collect_free_pred(bound, out),
        }
    }

    pub fn free_obj_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_obj(&mut Vec::new(), &mut out);
        out
    }

    pub fn free_pred_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_pred(&mut Vec::new(), &mut out);
        out
    }

    pub fn subst_obj_many(&self, sigma: &Subst) -> Pred {
        match self {
            Pred::Comp(xs, body) => {
                let (xs, body) = subst_under_binders(xs, body, sigma);
                Pred::Comp(xs, Box::new(body))
            }
            _ => self.clone(),
        }
    }

    /// `self[X := p]` inside a predicate.
    pub fn subst_pred(&self, x: &str, p: &Pred) -> Pred {
        match self {
            Pred::Var(y, _) if &**y == x => p.clone(),
            Pred::Var(..) | Pred::Sym(..) | Pred::Fix(_) => self.clone(),
            Pred::Comp(xs, body) => {
                if !body.free_pred_vars().contains(x) {
                    return self.clone();
                }
                let avoid = p.free_obj_vars();
                let (xs, body) = rename_binders_avoiding(xs, body, &avoid);
                Pred::Comp(xs, Box::new(body.subst_pred(x, p)))
            }
        }
    }

    /// `P(t1, ..., tn)` with comprehension redexes contracted at the root.
    pub fn apply(&self, args: Vec<Term>) -> Formula {
        match self {
            Pred::Comp(xs, body) => instantiate(xs, body, &args),
            _ => Formula::Atom(self.clone(), args),
        }
    }
}

/// Renames the comprehension binders `xs` that occur in `avoid`.
fn rename_binders_avoiding(
    xs: &[Name],
    body: &Formula,
    avoid: &BTreeSet<Name>,
) -> (Vec<Name>, Formula) {
    if xs.iter().all(|x| !avoid.contains(x)) {
        return (xs.to_vec(), body.clone());
    }
    let body_free = body.free_obj_vars();
    let mut renaming = Subst::new();
    let mut new_xs: Vec<Name> = Vec::with_capacity(xs.len());
    for x in xs {
        if avoid.contains(x) {
            let fresh = fresh_name(x, |c| {
                avoid.contains(c)
                    || body_free.contains(c)
                    || xs.iter().any(|y| &**y == c)
                    || new_xs.iter().any(|y| &**y == c)
            });
            renaming.insert(x.clone(), Term::Var(fresh.clone()));
            new_xs.push(fresh);
        } else {
            new_xs.push(x.clone());
        }
    }
    let body = body.subst_obj_many(&renaming);
    (new_xs, body)
}

/// Applies `sigma` under the binders `xs`, renaming binders that would capture.
fn subst_under_binders(xs: &[Name], body: &Formula, sigma: &Subst) -> (Vec<Name>, Formula) {
    let mut inner: Subst = sigma.clone();
    for x in xs {
        inner.remove(x);
    }
    let free = body.free_obj_vars();
    inner.retain(|k, _| free.contains(k));
    if inner.is_empty() {
        return (xs.to_vec(), body.clone());
    }
    let mut avoid = BTreeSet::new();
    for t in inner.values() {
        t.collect_vars(&mut avoid);
    }
    let (xs, body) = rename_binders_avoiding(xs, body, &avoid);
    (xs, body.subst_obj_many(&inner))
}

fn instantiate(xs: &[Name], body: &Formula, args: &[Term]) -> Formula {
    let sigma: Subst = xs.iter().cloned().zip(args.iter().cloned()).collect();
    body.subst_obj_many(&sigma)
}

impl Formula {
    pub fn atom(p: Pred, args: Vec<Term>) -> Formula {
        Formula::Atom(p, args)
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn all(x: &str, a: Formula) -> Formula {
        Formula::All(name(x), Box::new(a))
    }

    pub fn all2(x: &str, arity: usize, a: Formula) -> Formula {
        Formula::All2(name(x), arity, Box::new(a))
    }

    pub fn ex(x: &str, a: Formula) -> Formula {
        Formula::Ex(name(x), Box::new(a))
    }

    pub fn restrict(a: Formula, r: Term, s: Term) -> Formula {
        Formula::Restrict(Box::new(a), r, s)
    }

    /// The Leibniz equation `r = s`, i.e. `∀E. E(r) -> E(s)`.
    pub fn equation(r: Term, s: Term) -> Formula {
        let e = Pred::var(EQUATION_VAR, 1);
        Formula::all2(
            EQUATION_VAR,
            1,
            Formula::imp(Formula::Atom(e.clone(), alloc::vec![r]), Formula::Atom(e, alloc::vec![s])),
        )
    }

    /// Recognizes the shape `∀X/1. X(r) -> X(s)` under any bound name.
    pub fn as_equation(&self) -> Option<(&Term, &Term)> {
        if let Formula::All2(x, 1, body) = self {
            if let Formula::Imp(a, b) = &**body {
                if let (Formula::Atom(Pred::Var(p, 1), ra), Formula::Atom(Pred::Var(q, 1), sa)) =
                    (&**a, &**b)
                {
                    if p == x && q == x && ra.len() == 1 && sa.len() == 1 {
                        return Some((&ra[0], &sa[0]));
                    }
                }
            }
        }
        None
    }

    fn collect_free_obj(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let add_term = |t: &Term, bound: &Vec<Name>, out: &mut BTreeSet<Name>| {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            for v in vs {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Atom(p, args) => {
                p.collect_free_obj(bound, out);
                for a in args {
                    add_term(a, bound, out);
                }
            }
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free_obj(bound, out);
                b.collect_free_obj(bound, out);
            }
            Formula::All(x, a) | Formula::Ex(x, a) => {
                bound.push(x.clone());
                a.collect_free_obj(bound, out);
                bound.pop();
            }
            Formula::All2(_, _, a) => a.collect_free_obj(bound, out),
            Formula::Restrict(a, r, s) => {
                a.collect_free_obj(bound, out);
                add_term(r, bound, out);
                add_term(s, bound, out);
            }
        }
    }

    fn collect_free_pred(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Atom(p, _) => p.collect_free_pred(bound, out),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free_pred(bound, out);
                b.collect_free_pred(bound, out);
            }
            Formula::All(_, a) | Formula::Ex(_, a) | Formula::Restrict(a, _, _) => {
                a.collect_free_pred(bound, out)
            }
            Formula::All2(x, _, a) => {
                bound.push(x.clone());
                a.collect_free_pred(bound, out);
                bound.pop();
            }
        }
    }

    pub fn free_obj_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_obj(&mut Vec::new(), &mut out);
        out
    }

    pub fn free_pred_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_pred(&mut Vec::new(), &mut out);
        out
    }

    /// First- and second-order free variables.
    pub fn free_vars(&self) -> (BTreeSet<Name>, BTreeSet<Name>) {
        (self.free_obj_vars(), self.free_pred_vars())
    }

    pub fn subst_obj(&self, x: &str, r: &Term) -> Formula {
        let mut sigma = Subst::new();
        sigma.insert(name(x), r.clone());
        self.subst_obj_many(&sigma)
    }

    /// Simultaneous capture-avoiding substitution of object variables.
    pub fn subst_obj_many(&self, sigma: &Subst) -> Formula {
        if sigma.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom(p, args) => Formula::Atom(
                p.subst_obj_many(sigma),
                args.iter().map(|a| a.subst_many(sigma)).collect(),
            ),
            Formula::Imp(a, b) => Formula::imp(a.subst_obj_many(sigma), b.subst_obj_many(sigma)),
            Formula::And(a, b) => Formula::and(a.subst_obj_many(sigma), b.subst_obj_many(sigma)),
            Formula::Or(a, b) => Formula::or(a.subst_obj_many(sigma), b.subst_obj_many(sigma)),
            Formula::All(x, a) => {
                let (xs, body) = subst_under_binders(core::slice::from_ref(x), a, sigma);
                Formula::All(xs[0].clone(), Box::new(body))
            }
            Formula::Ex(x, a) => {
                let (xs, body) = subst_under_binders(core::slice::from_ref(x), a, sigma);
                Formula::Ex(xs[0].clone(), Box::new(body))
            }
            Formula::All2(x, n, a) => Formula::All2(x.clone(), *n, Box::new(a.subst_obj_many(sigma))),
            Formula::Restrict(a, r, s) => Formula::Restrict(
                Box::new(a.subst_obj_many(sigma)),
                r.subst_many(sigma),
                s.subst_many(sigma),
            ),
        }
    }

    /// `self[X := p]`; atoms `X(t)` become `p(t)` with comprehension redexes
    /// at those spots contracted. The arity of `p` is not checked here.
    pub fn subst_pred(&self, x: &str, p: &Pred) -> Formula {
        match self {
            Formula::Atom(Pred::Var(y, _), args) if &**y == x => p.apply(args.clone()),
            Formula::Atom(q, args) => Formula::Atom(q.subst_pred(x, p), args.clone()),
            Formula::Imp(a, b) => Formula::imp(a.subst_pred(x, p), b.subst_pred(x, p)),
            Formula::And(a, b) => Formula::and(a.subst_pred(x, p), b.subst_pred(x, p)),
            Formula::Or(a, b) => Formula::or(a.subst_pred(x, p), b.subst_pred(x, p)),
            Formula::Restrict(a, r, s) => {
                Formula::Restrict(Box::new(a.subst_pred(x, p)), r.clone(), s.clone())
            }
            Formula::All(y, a) | Formula::Ex(y, a) => {
                if !a.free_pred_vars().contains(x) {
                    return self.clone();
                }
                let avoid = p.free_obj_vars();
                let (ys, body) = rename_binders_avoiding(core::slice::from_ref(y), a, &avoid);
                let body = Box::new(body.subst_pred(x, p));
                match self {
                    Formula::All(..) => Formula::All(ys[0].clone(), body),
                    _ => Formula::Ex(ys[0].clone(), body),
                }
            }
            Formula::All2(y, n, a) => {
                if &**y == x || !a.free_pred_vars().contains(x) {
                    return self.clone();
                }
                let p_free = p.free_pred_vars();
                if p_free.contains(y) {
                    let a_free = a.free_pred_vars();
                    let fresh = fresh_name(y, |c| {
                        p_free.contains(c) || a_free.contains(c) || c == x
                    });
                    let renamed = a.subst_pred(y, &Pred::Var(fresh.clone(), *n));
                    Formula::All2(fresh, *n, Box::new(renamed.subst_pred(x, p)))
                } else {
                    Formula::All2(y.clone(), *n, Box::new(a.subst_pred(x, p)))
                }
            }
        }
    }

    /// Contracts every comprehension redex `(λx.A)(t)`. Fixed-point bodies are
    /// left untouched.
    pub fn beta_normal(&self) -> Formula {
        match self {
            Formula::Atom(Pred::Comp(xs, body), args) => instantiate(xs, body, args).beta_normal(),
            Formula::Atom(..) => self.clone(),
            Formula::Imp(a, b) => Formula::imp(a.beta_normal(), b.beta_normal()),
            Formula::And(a, b) => Formula::and(a.beta_normal(), b.beta_normal()),
            Formula::Or(a, b) => Formula::or(a.beta_normal(), b.beta_normal()),
            Formula::All(x, a) => Formula::All(x.clone(), Box::new(a.beta_normal())),
            Formula::Ex(x, a) => Formula::Ex(x.clone(), Box::new(a.beta_normal())),
            Formula::All2(x, n, a) => Formula::All2(x.clone(), *n, Box::new(a.beta_normal())),
            Formula::Restrict(a, r, s) => {
                Formula::Restrict(Box::new(a.beta_normal()), r.clone(), s.clone())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::All(_, a) | Formula::Ex(_, a) | Formula::All2(_, _, a) => 1 + a.size(),
            Formula::Restrict(a, r, s) => 1 + a.size() + r.size() + s.size(),
        }
    }
}

/// `A[x := r]`, capture-avoiding.
pub fn subst_formula_obj(a: &Formula, x: &str, r: &Term) -> Formula {
    a.subst_obj(x, r)
}

/// `A[X := P]`, checking that the arity of `P` matches every occurrence of `X`.
pub fn subst_formula_pred(a: &Formula, x: &str, p: &Pred) -> Result<Formula, SyntaxError> {
    if let Some(found) = occurrence_arity(a, x, &mut Vec::new()) {
        if found != p.arity() {
            return Err(SyntaxError::ArityMismatch {
                name: name(x),
                expected: found,
                found: p.arity(),
            });
        }
    }
    Ok(a.subst_pred(x, p))
}

fn occurrence_arity(a: &Formula, x: &str, bound: &mut Vec<Name>) -> Option<usize> {
    let in_pred = |p: &Pred, bound: &mut Vec<Name>| -> Option<usize> {
        match p {
            Pred::Var(y, n) if &**y == x && !bound.iter().any(|b| &**b == x) => Some(*n),
            Pred::Comp(_, body) => occurrence_arity(body, x, bound),
            _ => None,
        }
    };
    match a {
        Formula::Atom(p, _) => in_pred(p, bound),
        Formula::Imp(l, r) | Formula::And(l, r) | Formula::Or(l, r) => {
            occurrence_arity(l, x, bound).or_else(|| occurrence_arity(r, x, bound))
        }
        Formula::All(_, b) | Formula::Ex(_, b) | Formula::Restrict(b, _, _) => {
            occurrence_arity(b, x, bound)
        }
        Formula::All2(y, _, b) => {
            bound.push(y.clone());
            let r = occurrence_arity(b, x, bound);
            bound.pop();
            r
        }
    }
}

/// `F(t1, ..., tn)` for a comprehension `F = λx1...xn.A`: `A[x := t]`.
pub fn apply_comprehension(f: &Pred, args: &[Term]) -> Result<Formula, SyntaxError> {
    match f {
        Pred::Comp(xs, body) => {
            if xs.len() != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    name: name("comprehension"),
                    expected: xs.len(),
                    found: args.len(),
                });
            }
            Ok(instantiate(xs, body, args))
        }
        _ => Err(SyntaxError::NotComprehension),
    }
}

/// `Φ(R) ≝ P[X := R]` for `Φ = λX.P`.
pub fn apply_transformer(phi: &Transformer, r: &Pred) -> Result<Pred, SyntaxError> {
    if phi.arity != r.arity() {
        return Err(SyntaxError::ArityMismatch {
            name: phi.var.clone(),
            expected: phi.arity,
            found: r.arity(),
        });
    }
    Ok(phi.body.subst_pred(&phi.var, r))
}
