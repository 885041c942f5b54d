use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::formula::{FixKind, FixPoint, Formula, Pred, Transformer};
use super::term::Term;
use super::{name, Name};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyntaxError {
    UnknownFunction(Name),
    UnknownPredicate(Name),
    UnknownFixPoint(Name),
    Duplicate(Name),
    ArityMismatch { name: Name, expected: usize, found: usize },
    NotComprehension,
    /// A transformer mentions free variables besides its own parameter.
    OpenTransformer { fixpoint: Name, free: Vec<Name> },
    /// The constructor/destructor tuple does not fit the fixed point.
    BadSymbols { fixpoint: Name, reason: String },
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxError::UnknownFunction(x) => write!(f, "unknown function symbol `{x}`"),
            SyntaxError::UnknownPredicate(x) => write!(f, "unknown predicate symbol `{x}`"),
            SyntaxError::UnknownFixPoint(x) => write!(f, "unknown fixed point `{x}`"),
            SyntaxError::Duplicate(x) => write!(f, "`{x}` is declared twice"),
            SyntaxError::ArityMismatch { name, expected, found } => {
                write!(f, "`{name}` expects {expected} argument(s), found {found}")
            }
            SyntaxError::NotComprehension => write!(f, "predicate is not a comprehension"),
            SyntaxError::OpenTransformer { fixpoint, free } => {
                write!(f, "transformer of `{fixpoint}` has free variables:")?;
                for x in free {
                    write!(f, " {x}")?;
                }
                Ok(())
            }
            SyntaxError::BadSymbols { fixpoint, reason } => {
                write!(f, "symbols of `{fixpoint}`: {reason}")
            }
        }
    }
}

/// Function symbols, predicate symbols and declared fixed points with arities.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    functions: BTreeMap<Name, usize>,
    predicates: BTreeMap<Name, usize>,
    fixpoints: BTreeMap<Name, Arc<FixPoint>>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_function(&mut self, f: &str, arity: usize) -> Result<(), SyntaxError> {
        let key = name(f);
        if self.functions.contains_key(&key) {
            return Err(SyntaxError::Duplicate(key));
        }
        self.functions.insert(key, arity);
        Ok(())
    }

    pub fn add_predicate(&mut self, p: &str, arity: usize) -> Result<(), SyntaxError> {
        let key = name(p);
        if self.predicates.contains_key(&key) || self.fixpoints.contains_key(&key) {
            return Err(SyntaxError::Duplicate(key));
        }
        self.predicates.insert(key, arity);
        Ok(())
    }

    pub fn function_arity(&self, f: &str) -> Option<usize> {
        self.functions.get(f).copied()
    }

    pub fn predicate_arity(&self, p: &str) -> Option<usize> {
        self.predicates.get(p).copied()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.functions.iter().map(|(k, v)| (k, *v))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.predicates.iter().map(|(k, v)| (k, *v))
    }

    pub fn fixpoint(&self, n: &str) -> Option<&Arc<FixPoint>> {
        self.fixpoints.get(n)
    }

    pub fn fixpoints(&self) -> impl Iterator<Item = &Arc<FixPoint>> {
        self.fixpoints.values()
    }

    /// Validates and registers `μ(Φ)` / `ν(Φ)` with its symbol tuple. Each symbol
    /// must be a declared unary function and the tuple must match the arity.
    pub fn add_fixpoint(
        &mut self,
        kind: FixKind,
        label: &str,
        phi: Transformer,
        symbols: Vec<Name>,
    ) -> Result<Arc<FixPoint>, SyntaxError> {
        let key = name(label);
        if self.fixpoints.contains_key(&key) || self.predicates.contains_key(&key) {
            return Err(SyntaxError::Duplicate(key));
        }
        if symbols.len() != phi.arity {
            return Err(SyntaxError::BadSymbols {
                fixpoint: key,
                reason: alloc::format!("expected {} symbol(s), found {}", phi.arity, symbols.len()),
            });
        }
        for s in &symbols {
            match self.function_arity(s) {
                Some(1) => {}
                Some(n) => {
                    return Err(SyntaxError::BadSymbols {
                        fixpoint: key,
                        reason: alloc::format!("`{s}` has arity {n}, expected 1"),
                    })
                }
                None => return Err(SyntaxError::UnknownFunction(s.clone())),
            }
        }
        let mut free_pred = phi.body.free_pred_vars();
        free_pred.remove(&phi.var);
        let free_obj = phi.body.free_obj_vars();
        if !free_pred.is_empty() || !free_obj.is_empty() {
            return Err(SyntaxError::OpenTransformer {
                fixpoint: key,
                free: free_pred.into_iter().chain(free_obj).collect(),
            });
        }
        if phi.body.arity() != phi.arity {
            return Err(SyntaxError::ArityMismatch {
                name: key,
                expected: phi.arity,
                found: phi.body.arity(),
            });
        }
        let fp = Arc::new(FixPoint { kind, name: key.clone(), phi, symbols });
        self.check_pred_inner(&Pred::Fix(fp.clone()), &mut Vec::new())?;
        self.fixpoints.insert(key, fp.clone());
        Ok(fp)
    }

    pub fn check_term(&self, t: &Term) -> Result<(), SyntaxError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let arity = self
                    .function_arity(f)
                    .ok_or_else(|| SyntaxError::UnknownFunction(f.clone()))?;
                if arity != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: f.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// Well-formedness: symbols declared, arities respected, and every
    /// occurrence of a bound predicate variable used at its declared arity.
    pub fn check_formula(&self, a: &Formula) -> Result<(), SyntaxError> {
        self.check_formula_inner(a, &mut Vec::new())
    }

    pub fn check_pred(&self, p: &Pred) -> Result<(), SyntaxError> {
        self.check_pred_inner(p, &mut Vec::new())
    }

    fn check_pred_inner(&self, p: &Pred, bound: &mut Vec<(Name, usize)>) -> Result<(), SyntaxError> {
        match p {
            Pred::Var(x, n) => match bound.iter().rev().find(|(y, _)| y == x) {
                Some((_, m)) if m != n => Err(SyntaxError::ArityMismatch {
                    name: x.clone(),
                    expected: *m,
                    found: *n,
                }),
                _ => Ok(()),
            },
            Pred::Sym(x, n) => match self.predicate_arity(x) {
                Some(m) if m == *n => Ok(()),
                Some(m) => Err(SyntaxError::ArityMismatch { name: x.clone(), expected: m, found: *n }),
                None => Err(SyntaxError::UnknownPredicate(x.clone())),
            },
            Pred::Comp(_, body) => self.check_formula_inner(body, bound),
            Pred::Fix(fp) => {
                let depth = bound.len();
                bound.push((fp.phi.var.clone(), fp.phi.arity));
                let r = self.check_pred_inner(&fp.phi.body, bound);
                bound.truncate(depth);
                r
            }
        }
    }

    fn check_formula_inner(
        &self,
        a: &Formula,
        bound: &mut Vec<(Name, usize)>,
    ) -> Result<(), SyntaxError> {
        match a {
            Formula::Atom(p, args) => {
                self.check_pred_inner(p, bound)?;
                if p.arity() != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        name: pred_label(p),
                        expected: p.arity(),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|t| self.check_term(t))
            }
            Formula::Imp(l, r) | Formula::And(l, r) | Formula::Or(l, r) => {
                self.check_formula_inner(l, bound)?;
                self.check_formula_inner(r, bound)
            }
            Formula::All(_, b) | Formula::Ex(_, b) => self.check_formula_inner(b, bound),
            Formula::All2(x, n, b) => {
                bound.push((x.clone(), *n));
                let r = self.check_formula_inner(b, bound);
                bound.pop();
                r
            }
            Formula::Restrict(b, r, s) => {
                self.check_formula_inner(b, bound)?;
                self.check_term(r)?;
                self.check_term(s)
            }
        }
    }
}

fn pred_label(p: &Pred) -> Name {
    match p {
        Pred::Var(x, _) | Pred::Sym(x, _) => x.clone(),
        Pred::Comp(..) => name("comprehension"),
        Pred::Fix(fp) => fp.name.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn nat_sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_function("0", 0).unwrap();
        sig.add_function("suc", 1).unwrap();
        sig.add_function("sum", 2).unwrap();
        sig
    }

    #[test]
    fn arity_errors() {
        let mut sig = nat_sig();
        assert!(sig.check_term(&Term::app("sum", vec![Term::var("x")])).is_err());
        assert_eq!(
            sig.check_term(&Term::constant("one")),
            Err(SyntaxError::UnknownFunction(name("one")))
        );
        assert!(sig.add_function("suc", 1).is_err());
    }

    #[test]
    fn fixpoints_must_be_closed() {
        let mut sig = nat_sig();
        sig.add_function("id", 1).unwrap();
        let open = Transformer {
            var: name("X"),
            arity: 1,
            body: Pred::comp(&["x"], Formula::atom(Pred::var("Y", 1), vec![Term::var("x")])),
        };
        assert!(matches!(
            sig.add_fixpoint(FixKind::Mu, "Bad", open, vec![name("id")]),
            Err(SyntaxError::OpenTransformer { .. })
        ));
        let closed = Transformer {
            var: name("X"),
            arity: 1,
            body: Pred::comp(&["x"], Formula::atom(Pred::var("X", 1), vec![Term::var("x")])),
        };
        assert!(sig.add_fixpoint(FixKind::Mu, "Ok", closed.clone(), vec![name("suc")]).is_ok());
        assert!(sig.add_fixpoint(FixKind::Nu, "Two", closed, vec![name("suc"), name("id")]).is_err());
    }
}
