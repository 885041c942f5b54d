use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{name, Name};

/// First-order object term: a variable or an application `f(t1, ..., tn)`.
/// Constants are applications with no arguments.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Name),
    App(Name, Vec<Term>),
}

/// Simultaneous substitution of object variables.
pub type Subst = BTreeMap<Name, Term>;

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(name(x))
    }

    pub fn constant(c: &str) -> Term {
        Term::App(name(c), Vec::new())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(name(f), args)
    }

    pub fn unary(f: &str, arg: Term) -> Term {
        Term::App(name(f), alloc::vec![arg])
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains_var(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn subst(&self, x: &str, r: &Term) -> Term {
        match self {
            Term::Var(y) if &**y == x => r.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(x, r)).collect()),
        }
    }

    pub fn subst_many(&self, sigma: &Subst) -> Term {
        match self {
            Term::Var(y) => sigma.get(y).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.subst_many(sigma)).collect())
            }
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Term::App(_, args) => args.get(i)?.at_path(rest),
                Term::Var(_) => None,
            },
        }
    }

    /// Replaces the subterm at `path`; the path must exist.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match self {
                Term::App(f, args) => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, new);
                    Term::App(f.clone(), args)
                }
                Term::Var(_) => panic!("replace_at: path runs through a variable"),
            },
        }
    }
}

/// `t[x := r]`. Object terms have no binders, so this is plain replacement.
pub fn subst_obj(t: &Term, x: &str, r: &Term) -> Term {
    t.subst(x, r)
}

/// An object-level unary function `x => body`, used for the function tuples of
/// the (co)recursion rules (`f`, `c`, `d` and their compositions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryFn {
    pub param: Name,
    pub body: Term,
}

impl UnaryFn {
    pub fn new(param: &str, body: Term) -> UnaryFn {
        UnaryFn { param: name(param), body }
    }

    pub fn identity() -> UnaryFn {
        UnaryFn::new("x", Term::var("x"))
    }

    pub fn symbol(f: &str) -> UnaryFn {
        UnaryFn::new("x", Term::unary(f, Term::var("x")))
    }

    pub fn apply(&self, arg: &Term) -> Term {
        self.body.subst(&self.param, arg)
    }

    /// `self ∘ inner`, i.e. `x => self(inner(x))`.
    pub fn compose(&self, inner: &UnaryFn) -> UnaryFn {
        let outer_free = self.free_vars();
        let inner_free = inner.free_vars();
        let param = super::fresh_name(&inner.param, |c| {
            outer_free.contains(c) || inner_free.contains(c)
        });
        let body = self.apply(&inner.apply(&Term::Var(param.clone())));
        UnaryFn { param, body }
    }

    /// Free variables other than the parameter.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut vs = self.body.vars();
        vs.remove(&self.param);
        vs
    }

    /// Extensional equality on the parameter, i.e. equality up to renaming it.
    pub fn same_as(&self, other: &UnaryFn) -> bool {
        let probe = Term::var("\u{0}probe");
        self.apply(&probe) == other.apply(&probe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn substitution_cases() {
        let zero = Term::constant("0");
        assert_eq!(subst_obj(&Term::var("x"), "x", &zero), zero);
        let t = Term::unary("suc", Term::var("x"));
        let r = Term::unary("suc", Term::var("y"));
        assert_eq!(
            subst_obj(&t, "x", &r),
            Term::unary("suc", Term::unary("suc", Term::var("y")))
        );
    }

    // Independent structural oracle: walk the tree by paths and rebuild.
    fn oracle_subst(t: &Term, x: &str, r: &Term) -> Term {
        let mut out = t.clone();
        let mut paths = Vec::new();
        fn collect(t: &Term, x: &str, path: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
            match t {
                Term::Var(y) if &**y == x => acc.push(path.clone()),
                Term::Var(_) => {}
                Term::App(_, args) => {
                    for (i, a) in args.iter().enumerate() {
                        path.push(i);
                        collect(a, x, path, acc);
                        path.pop();
                    }
                }
            }
        }
        collect(t, x, &mut Vec::new(), &mut paths);
        for p in paths {
            out = out.replace_at(&p, r.clone());
        }
        out
    }

    #[test]
    fn substitution_matches_path_oracle() {
        let t = Term::app("sum", vec![Term::var("n"), Term::var("x")]);
        let r = Term::unary("suc", Term::var("m"));
        let expected = oracle_subst(&t, "x", &r);
        assert_eq!(expected, Term::app("sum", vec![Term::var("n"), Term::unary("suc", Term::var("m"))]));
        assert_eq!(subst_obj(&t, "x", &r), expected);
    }

    #[test]
    fn unary_fn_composition() {
        let f = UnaryFn::new("y", Term::app("sum", vec![Term::var("n"), Term::var("y")]));
        let c = UnaryFn::symbol("suc");
        let fc = f.compose(&c);
        assert_eq!(
            fc.apply(&Term::var("z")),
            Term::app("sum", vec![Term::var("n"), Term::unary("suc", Term::var("z"))])
        );
        assert!(UnaryFn::identity().same_as(&UnaryFn::new("q", Term::var("q"))));
    }
}
