//! ASCII surface syntax, the same one the companion parser reads.
//!
//! Precedence from loosest to tightest: quantifiers, `->` (right), `\/` (right),
//! `/\` (right), `|>` (postfix), atoms.

use core::fmt;

use super::formula::{Formula, Pred, Transformer};
use super::term::{Term, UnaryFn};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                write_terms(f, args)?;
                write!(f, ")")
            }
        }
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, ts: &[Term]) -> fmt::Result {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for UnaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.param, self.body)
    }
}

fn write_comp_head(f: &mut fmt::Formatter<'_>, xs: &[super::Name]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    if xs.is_empty() {
        write!(f, "=> ")
    } else {
        write!(f, " => ")
    }
}

/// Predicate in head position of an atom.
fn write_pred_head(f: &mut fmt::Formatter<'_>, p: &Pred) -> fmt::Result {
    match p {
        Pred::Var(x, _) | Pred::Sym(x, _) => write!(f, "{x}"),
        Pred::Fix(fp) => write!(f, "{}", fp.name),
        Pred::Comp(xs, body) => {
            write!(f, "(")?;
            write_comp_head(f, xs)?;
            write!(f, "{body})")
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Comp(xs, body) => {
                write_comp_head(f, xs)?;
                write!(f, "{body}")
            }
            _ => write_pred_head(f, self),
        }
    }
}

impl fmt::Display for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} => ", self.var, self.arity)?;
        write_pred_head(f, &self.body)
    }
}

const QUANT: u8 = 0;
const OR: u8 = 1;
const AND: u8 = 2;
const RESTRICT: u8 = 3;
const ATOM: u8 = 4;

fn level(a: &Formula) -> u8 {
    if a.as_equation().is_some() {
        return ATOM;
    }
    match a {
        Formula::All(..) | Formula::All2(..) | Formula::Ex(..) | Formula::Imp(..) => QUANT,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Restrict(..) => RESTRICT,
        Formula::Atom(..) => ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, a: &Formula, min: u8) -> fmt::Result {
    let quantifier = matches!(a, Formula::All(..) | Formula::All2(..) | Formula::Ex(..))
        && a.as_equation().is_none();
    if level(a) < min || (quantifier && min > QUANT) {
        write!(f, "(")?;
        write_formula(f, a)?;
        write!(f, ")")
    } else {
        write_formula(f, a)
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, a: &Formula) -> fmt::Result {
    if let Some((r, s)) = a.as_equation() {
        return write!(f, "{r} = {s}");
    }
    match a {
        Formula::Atom(p, args) => {
            write_pred_head(f, p)?;
            if !args.is_empty() || matches!(p, Pred::Comp(..)) {
                write!(f, "(")?;
                write_terms(f, args)?;
                write!(f, ")")?;
            }
            Ok(())
        }
        Formula::Imp(l, r) => {
            write_at(f, l, OR)?;
            write!(f, " -> ")?;
            write_at(f, r, QUANT)
        }
        Formula::Or(l, r) => {
            write_at(f, l, AND)?;
            write!(f, " \\/ ")?;
            write_at(f, r, OR)
        }
        Formula::And(l, r) => {
            write_at(f, l, RESTRICT)?;
            write!(f, " /\\ ")?;
            write_at(f, r, AND)
        }
        Formula::Restrict(b, r, s) => {
            write_at(f, b, RESTRICT)?;
            write!(f, " |> {r} = {s}")
        }
        Formula::All(x, b) => {
            write!(f, "forall {x}. ")?;
            write_formula(f, b)
        }
        Formula::Ex(x, b) => {
            write!(f, "exists {x}. ")?;
            write_formula(f, b)
        }
        Formula::All2(x, n, b) => {
            write!(f, "forall {x}/{n}. ")?;
            write_formula(f, b)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}
