use alloc::sync::Arc;
use alloc::vec::Vec;

use super::formula::{FixPoint, Formula, Pred, Transformer};
use super::term::Term;
use super::Name;

/// Pairs of binders currently in scope, innermost last.
#[derive(Default)]
struct Env {
    obj: Vec<(Name, Name)>,
    pred: Vec<(Name, Name)>,
}

fn lookup(stack: &[(Name, Name)], x: &Name, y: &Name) -> bool {
    for (l, r) in stack.iter().rev() {
        let hit_l = l == x;
        let hit_r = r == y;
        if hit_l || hit_r {
            return hit_l && hit_r;
        }
    }
    x == y
}

fn term_eq(env: &Env, a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => lookup(&env.obj, x, y),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(env, x, y))
        }
        _ => false,
    }
}

fn terms_eq(env: &Env, a: &[Term], b: &[Term]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| term_eq(env, x, y))
}

fn pred_eq(env: &mut Env, a: &Pred, b: &Pred) -> bool {
    match (a, b) {
        (Pred::Var(x, n), Pred::Var(y, m)) => n == m && lookup(&env.pred, x, y),
        (Pred::Sym(x, n), Pred::Sym(y, m)) => x == y && n == m,
        (Pred::Comp(xs, p), Pred::Comp(ys, q)) => {
            if xs.len() != ys.len() {
                return false;
            }
            let depth = env.obj.len();
            env.obj.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            let r = formula_eq(env, p, q);
            env.obj.truncate(depth);
            r
        }
        (Pred::Fix(f), Pred::Fix(g)) => fix_eq(f, g),
        _ => false,
    }
}

fn fix_eq(f: &Arc<FixPoint>, g: &Arc<FixPoint>) -> bool {
    Arc::ptr_eq(f, g)
        || (f.kind == g.kind && f.symbols == g.symbols && transformer_alpha_eq(&f.phi, &g.phi))
}

fn formula_eq(env: &mut Env, a: &Formula, b: &Formula) -> bool {
    match (a, b) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) => pred_eq(env, p, q) && terms_eq(env, xs, ys),
        (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
        | (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2)) => {
            formula_eq(env, a1, b1) && formula_eq(env, a2, b2)
        }
        (Formula::All(x, p), Formula::All(y, q)) | (Formula::Ex(x, p), Formula::Ex(y, q)) => {
            env.obj.push((x.clone(), y.clone()));
            let r = formula_eq(env, p, q);
            env.obj.pop();
            r
        }
        (Formula::All2(x, n, p), Formula::All2(y, m, q)) => {
            if n != m {
                return false;
            }
            env.pred.push((x.clone(), y.clone()));
            let r = formula_eq(env, p, q);
            env.pred.pop();
            r
        }
        (Formula::Restrict(p, r1, s1), Formula::Restrict(q, r2, s2)) => {
            formula_eq(env, p, q) && term_eq(env, r1, r2) && term_eq(env, s1, s2)
        }
        _ => false,
    }
}

/// Equality of formulas up to renaming of bound variables of both orders.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    formula_eq(&mut Env::default(), a, b)
}

pub fn pred_alpha_eq(a: &Pred, b: &Pred) -> bool {
    pred_eq(&mut Env::default(), a, b)
}

pub fn transformer_alpha_eq(a: &Transformer, b: &Transformer) -> bool {
    if a.arity != b.arity {
        return false;
    }
    let mut env = Env::default();
    env.pred.push((a.var.clone(), b.var.clone()));
    pred_eq(&mut env, &a.body, &b.body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{name, Term};
    use alloc::vec;

    fn nat_like() -> Formula {
        // forall x. X(x) -> (y => X(y))(x)
        Formula::all(
            "x",
            Formula::imp(
                Formula::atom(Pred::var("X", 1), vec![Term::var("x")]),
                Formula::atom(
                    Pred::comp(&["y"], Formula::atom(Pred::var("X", 1), vec![Term::var("y")])),
                    vec![Term::var("x")],
                ),
            ),
        )
    }

    #[test]
    fn renaming_bound_variables() {
        let a = nat_like();
        let b = Formula::all(
            "z",
            Formula::imp(
                Formula::atom(Pred::var("X", 1), vec![Term::var("z")]),
                Formula::atom(
                    Pred::comp(&["w"], Formula::atom(Pred::var("X", 1), vec![Term::var("w")])),
                    vec![Term::var("z")],
                ),
            ),
        );
        assert!(alpha_eq(&a, &b));
        let c = a.subst_pred("X", &Pred::var("Y", 1));
        assert!(!alpha_eq(&a, &c));
        assert!(alpha_eq(&Formula::all2("X", 1, a.clone()), &Formula::all2("Y", 1, c)));
    }

    #[test]
    fn free_versus_bound() {
        let a = Formula::all("x", Formula::atom(Pred::Sym(name("P"), 2), vec![Term::var("x"), Term::var("y")]));
        let b = Formula::all("y", Formula::atom(Pred::Sym(name("P"), 2), vec![Term::var("y"), Term::var("y")]));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn equations_with_different_binder() {
        let r = Term::var("r");
        let s = Term::var("s");
        let e = Formula::equation(r.clone(), s.clone());
        let f = Formula::all2(
            "Q",
            1,
            Formula::imp(
                Formula::atom(Pred::var("Q", 1), vec![r.clone()]),
                Formula::atom(Pred::var("Q", 1), vec![s.clone()]),
            ),
        );
        assert!(alpha_eq(&e, &f));
        assert_eq!(f.as_equation(), Some((&r, &s)));
    }
}
