//! The `eq` rule with a computed template: the premise and the stated
//! conclusion are aligned, their differing object terms are collected, and
//! one primitive rewrite is checked per difference.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::rules::{rewrite_step, Env};
use super::{equivalent, ErrorKind};
use crate::equational::derive_eq;
use crate::syntax::{fresh_name, pred_alpha_eq, Formula, Name, Pred, Subst, Term};

type R<T> = Result<T, ErrorKind>;

/// Bound variable pairs (left, right), innermost last.
#[derive(Default, Clone)]
struct Binders {
    obj: Vec<(Name, Name)>,
    pred: Vec<(Name, Name)>,
}

fn paired(stack: &[(Name, Name)], x: &Name, y: &Name) -> bool {
    for (l, r) in stack.iter().rev() {
        if l == x || r == y {
            return l == x && r == y;
        }
    }
    x == y
}

fn bound_left(stack: &[(Name, Name)], x: &Name) -> bool {
    stack.iter().any(|(l, _)| l == x)
}

fn bound_right(stack: &[(Name, Name)], y: &Name) -> bool {
    stack.iter().any(|(_, r)| r == y)
}

fn term_eq(b: &Binders, l: &Term, r: &Term) -> bool {
    match (l, r) {
        (Term::Var(x), Term::Var(y)) => paired(&b.obj, x, y),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(b, x, y))
        }
        _ => false,
    }
}

fn mentions_bound(b: &Binders, l: &Term, r: &Term) -> bool {
    l.vars().iter().any(|x| bound_left(&b.obj, x)) || r.vars().iter().any(|y| bound_right(&b.obj, y))
}

/// Location of a difference: the index of the term slot in the formula
/// (atom arguments and restriction sides, in order) and a path inside it.
#[derive(Clone, Debug)]
struct Diff {
    slot: usize,
    path: Vec<usize>,
    lhs: Term,
    rhs: Term,
}

struct Collector<'e, 'a> {
    env: &'e Env<'a>,
    ctx: &'e [(Name, Formula)],
    slot: usize,
    diffs: Vec<Diff>,
}

impl Collector<'_, '_> {
    fn joinable(&self, l: &Term, r: &Term) -> bool {
        match self.env.pool(self.ctx) {
            Ok(pool) => derive_eq(&pool, l, r, &self.env.options.rewrite).is_ok(),
            Err(_) => false,
        }
    }

    fn term(&mut self, b: &Binders, l: &Term, r: &Term, path: &mut Vec<usize>) -> R<()> {
        if term_eq(b, l, r) {
            return Ok(());
        }
        let free = !mentions_bound(b, l, r);
        if free && self.joinable(l, r) {
            self.diffs.push(Diff { slot: self.slot, path: path.clone(), lhs: l.clone(), rhs: r.clone() });
            return Ok(());
        }
        match (l, r) {
            (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
                for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                    path.push(i);
                    self.term(b, x, y, path)?;
                    path.pop();
                }
                Ok(())
            }
            _ if !free => Err(ErrorKind::BoundDifference(l.clone())),
            _ => {
                // Not derivable; report it as an ordinary rewrite failure.
                self.diffs.push(Diff { slot: self.slot, path: path.clone(), lhs: l.clone(), rhs: r.clone() });
                Ok(())
            }
        }
    }

    fn slot_term(&mut self, b: &Binders, l: &Term, r: &Term) -> R<()> {
        self.term(b, l, r, &mut Vec::new())?;
        self.slot += 1;
        Ok(())
    }

    fn formula(&mut self, b: &mut Binders, l: &Formula, r: &Formula) -> R<()> {
        let mismatch = || ErrorKind::Mismatch { expected: Box::new(r.clone()), found: Box::new(l.clone()) };
        match (l, r) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                if xs.len() != ys.len() || !self.pred(b, p, q)? {
                    return Err(mismatch());
                }
                for (x, y) in xs.iter().zip(ys) {
                    self.slot_term(b, x, y)?;
                }
                Ok(())
            }
            (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
            | (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2)) => {
                self.formula(b, a1, b1)?;
                self.formula(b, a2, b2)
            }
            (Formula::All(x, p), Formula::All(y, q)) | (Formula::Ex(x, p), Formula::Ex(y, q)) => {
                b.obj.push((x.clone(), y.clone()));
                let res = self.formula(b, p, q);
                b.obj.pop();
                res
            }
            (Formula::All2(x, n, p), Formula::All2(y, m, q)) if n == m => {
                b.pred.push((x.clone(), y.clone()));
                let res = self.formula(b, p, q);
                b.pred.pop();
                res
            }
            (Formula::Restrict(p, r1, s1), Formula::Restrict(q, r2, s2)) => {
                self.formula(b, p, q)?;
                self.slot_term(b, r1, r2)?;
                self.slot_term(b, s1, s2)
            }
            _ => Err(mismatch()),
        }
    }

    /// Predicates must agree exactly; comprehensions are compared with their
    /// bodies, which may contain slots.
    fn pred(&mut self, b: &mut Binders, p: &Pred, q: &Pred) -> R<bool> {
        Ok(match (p, q) {
            (Pred::Var(x, n), Pred::Var(y, m)) => n == m && paired(&b.pred, x, y),
            (Pred::Sym(x, n), Pred::Sym(y, m)) => x == y && n == m,
            (Pred::Fix(_), Pred::Fix(_)) => pred_alpha_eq(p, q),
            (Pred::Comp(xs, a), Pred::Comp(ys, c)) if xs.len() == ys.len() => {
                let depth = b.obj.len();
                b.obj.extend(xs.iter().cloned().zip(ys.iter().cloned()));
                let res = self.formula(b, a, c);
                b.obj.truncate(depth);
                res?;
                true
            }
            _ => false,
        })
    }
}

/// Rebuilds `a` with the term at (`slot`, `path`) replaced.
fn replace_slot(a: &Formula, slot: usize, path: &[usize], new: &Term) -> Formula {
    fn go(a: &Formula, counter: &mut usize, slot: usize, path: &[usize], new: &Term) -> Formula {
        let term = |t: &Term, counter: &mut usize| {
            let out = if *counter == slot { t.replace_at(path, new.clone()) } else { t.clone() };
            *counter += 1;
            out
        };
        match a {
            Formula::Atom(p, args) => {
                let p = match p {
                    Pred::Comp(xs, body) => {
                        Pred::Comp(xs.clone(), alloc::boxed::Box::new(go(body, counter, slot, path, new)))
                    }
                    _ => p.clone(),
                };
                let args = args.iter().map(|t| term(t, counter)).collect();
                Formula::Atom(p, args)
            }
            Formula::Imp(l, r) => {
                let l = go(l, counter, slot, path, new);
                Formula::imp(l, go(r, counter, slot, path, new))
            }
            Formula::And(l, r) => {
                let l = go(l, counter, slot, path, new);
                Formula::and(l, go(r, counter, slot, path, new))
            }
            Formula::Or(l, r) => {
                let l = go(l, counter, slot, path, new);
                Formula::or(l, go(r, counter, slot, path, new))
            }
            Formula::All(x, b) => Formula::All(x.clone(), alloc::boxed::Box::new(go(b, counter, slot, path, new))),
            Formula::Ex(x, b) => Formula::Ex(x.clone(), alloc::boxed::Box::new(go(b, counter, slot, path, new))),
            Formula::All2(x, n, b) => {
                Formula::All2(x.clone(), *n, alloc::boxed::Box::new(go(b, counter, slot, path, new)))
            }
            Formula::Restrict(b, r, s) => {
                let b = go(b, counter, slot, path, new);
                let r = term(r, counter);
                let s = term(s, counter);
                Formula::Restrict(alloc::boxed::Box::new(b), r, s)
            }
        }
    }
    go(a, &mut 0, slot, path, new)
}

fn all_names(a: &Formula, out: &mut BTreeSet<Name>) {
    let terms = |ts: &[Term], out: &mut BTreeSet<Name>| ts.iter().for_each(|t| t.collect_vars(out));
    match a {
        Formula::Atom(p, args) => {
            if let Pred::Comp(xs, body) = p {
                out.extend(xs.iter().cloned());
                all_names(body, out);
            }
            terms(args, out);
        }
        Formula::Imp(l, r) | Formula::And(l, r) | Formula::Or(l, r) => {
            all_names(l, out);
            all_names(r, out);
        }
        Formula::All(x, b) | Formula::Ex(x, b) => {
            out.insert(x.clone());
            all_names(b, out);
        }
        Formula::All2(_, _, b) => all_names(b, out),
        Formula::Restrict(b, r, s) => {
            all_names(b, out);
            r.collect_vars(out);
            s.collect_vars(out);
        }
    }
}

/// Checks that `premise` rewrites to `target` by a sequence of primitive `eq`
/// steps, one per maximal differing term.
pub(super) fn convert(
    env: &Env<'_>,
    ctx: &[(Name, Formula)],
    premise: &Formula,
    target: &Formula,
) -> R<()> {
    let a = premise.beta_normal();
    let b = target.beta_normal();
    let mut collector = Collector { env, ctx, slot: 0, diffs: Vec::new() };
    collector.formula(&mut Binders::default(), &a, &b)?;
    let mut current = a;
    for d in collector.diffs {
        let mut taken = BTreeSet::new();
        all_names(&current, &mut taken);
        d.lhs.collect_vars(&mut taken);
        d.rhs.collect_vars(&mut taken);
        let v = fresh_name("v", |c| taken.contains(c));
        let template = replace_slot(&current, d.slot, &d.path, &Term::Var(v.clone()));
        current = rewrite_step(env, ctx, &current, &template, &v, &d.lhs, &d.rhs, None)?;
    }
    if equivalent(&current, &b) {
        Ok(())
    } else {
        Err(ErrorKind::Mismatch { expected: Box::new(b), found: Box::new(current) })
    }
}

/// First-order matching of `found` against `pattern`, where the variables
/// `vars` of the pattern are instantiated; other names must agree up to
/// renaming of bound variables.
pub(super) fn match_formula(pattern: &Formula, found: &Formula, vars: &[Name], sigma: &mut Subst) -> bool {
    let mut b = Binders::default();
    match_f(&mut b, pattern, found, vars, sigma)
}

fn match_t(b: &Binders, p: &Term, t: &Term, vars: &[Name], sigma: &mut Subst) -> bool {
    match p {
        Term::Var(x) if vars.contains(x) && !bound_left(&b.obj, x) => {
            if t.vars().iter().any(|y| bound_right(&b.obj, y)) {
                return false;
            }
            match sigma.get(x) {
                Some(prev) => prev == t,
                None => {
                    sigma.insert(x.clone(), t.clone());
                    true
                }
            }
        }
        Term::Var(x) => matches!(t, Term::Var(y) if paired(&b.obj, x, y)),
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, t)| match_t(b, p, t, vars, sigma))
            }
            _ => false,
        },
    }
}

fn match_f(b: &mut Binders, p: &Formula, f: &Formula, vars: &[Name], sigma: &mut Subst) -> bool {
    match (p, f) {
        (Formula::Atom(q, ps), Formula::Atom(r, ts)) => {
            let heads = match (q, r) {
                (Pred::Var(x, n), Pred::Var(y, m)) => n == m && paired(&b.pred, x, y),
                (Pred::Comp(xs, pb), Pred::Comp(ys, fb)) if xs.len() == ys.len() => {
                    let depth = b.obj.len();
                    b.obj.extend(xs.iter().cloned().zip(ys.iter().cloned()));
                    let ok = match_f(b, pb, fb, vars, sigma);
                    b.obj.truncate(depth);
                    ok
                }
                _ => pred_alpha_eq(q, r),
            };
            heads && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| match_t(b, p, t, vars, sigma))
        }
        (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
        | (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2)) => {
            match_f(b, a1, b1, vars, sigma) && match_f(b, a2, b2, vars, sigma)
        }
        (Formula::All(x, q), Formula::All(y, r)) | (Formula::Ex(x, q), Formula::Ex(y, r)) => {
            b.obj.push((x.clone(), y.clone()));
            let ok = match_f(b, q, r, vars, sigma);
            b.obj.pop();
            ok
        }
        (Formula::All2(x, n, q), Formula::All2(y, m, r)) if n == m => {
            b.pred.push((x.clone(), y.clone()));
            let ok = match_f(b, q, r, vars, sigma);
            b.pred.pop();
            ok
        }
        (Formula::Restrict(q, r1, s1), Formula::Restrict(r, r2, s2)) => {
            match_f(b, q, r, vars, sigma)
                && match_t(b, r1, r2, vars, sigma)
                && match_t(b, s1, s2, vars, sigma)
        }
        _ => false,
    }
}
