//! Reduction of proof terms.
//!
//! Full one-step reduction closes the axioms under every term former;
//! `normalize` follows the leftmost-outermost redex. Weak-head reduction
//! contracts the redex in the hole of an evaluation context
//!
//! ```text
//! E ::= [] | E s | out E | MRec s E | MIt s E | fst E | snd E | case(E, x.s, y.t) | open(E, u.r)
//! ```
//!
//! The formers after `MRec s E` extend the grammar to the derived
//! eliminators. `MIt` and `MCoIt` reduce directly (`MIt s (in t)` to
//! `s (MIt s) t`), which agrees with unfolding them to `MRec (\_. s)`.

mod sn;
mod oracle;

pub use oracle::{sat_closure, sn_oracle, sn_oracle_flat, OracleVerdict, SatError, DEFAULT_ORACLE_BUDGET};
pub use sn::{
    classify, ist, is_neutral, prt, sn_certify, SnDerivation, SnError, SnRule, TermClass, DEFAULT_SN_FUEL,
};

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use crate::proof::ProofTerm;

use ProofTerm as P;

/// The contraction rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Beta,
    MRec,
    MCoRecOut,
    MIt,
    MCoItOut,
    Fst,
    Snd,
    CaseInl,
    CaseInr,
    OpenPack,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::Beta,
        Axiom::MRec,
        Axiom::MCoRecOut,
        Axiom::MIt,
        Axiom::MCoItOut,
        Axiom::Fst,
        Axiom::Snd,
        Axiom::CaseInl,
        Axiom::CaseInr,
        Axiom::OpenPack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Beta => "beta",
            Axiom::MRec => "mrec",
            Axiom::MCoRecOut => "mcorec-out",
            Axiom::MIt => "mit",
            Axiom::MCoItOut => "mcoit-out",
            Axiom::Fst => "fst",
            Axiom::Snd => "snd",
            Axiom::CaseInl => "case-inl",
            Axiom::CaseInr => "case-inr",
            Axiom::OpenPack => "open-pack",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One contraction: the redex at `path` (child indices, see
/// [`ProofTerm::children`]) is replaced by `contractum`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub path: Vec<usize>,
    pub axiom: Axiom,
    pub contractum: ProofTerm,
}

impl ReductionStep {
    /// Re-contracts the redex of `source` at the recorded path and returns the
    /// result, or `None` when the step does not apply.
    pub fn replay(&self, source: &ProofTerm) -> Option<ProofTerm> {
        let redex = at_path(source, &self.path)?;
        let (axiom, contractum) = contract(redex)?;
        if axiom != self.axiom || !contractum.alpha_eq(&self.contractum) {
            return None;
        }
        Some(self.apply(source))
    }

    /// The result of the step, without checking it.
    pub fn apply(&self, source: &ProofTerm) -> ProofTerm {
        replace_at(source, &self.path, self.contractum.clone())
    }
}

pub fn at_path<'t>(t: &'t ProofTerm, path: &[usize]) -> Option<&'t ProofTerm> {
    match path.split_first() {
        None => Some(t),
        Some((&i, rest)) => at_path(t.children().get(i).copied()?, rest),
    }
}

/// `t` with the subterm at `path` replaced; `t` itself when the path is invalid.
pub fn replace_at(t: &ProofTerm, path: &[usize], new: ProofTerm) -> ProofTerm {
    let Some((&i, rest)) = path.split_first() else {
        return new;
    };
    let mut new = Some(new);
    let mut k = 0;
    t.map_children(|c| {
        let out = if k == i { replace_at(c, rest, new.take().expect("one hole")) } else { c.clone() };
        k += 1;
        out
    })
}

fn identity() -> ProofTerm {
    ProofTerm::lam("x", ProofTerm::var("x"))
}

/// Contracts `t` if it is a redex.
pub fn contract(t: &ProofTerm) -> Option<(Axiom, ProofTerm)> {
    match t {
        P::App(f, s) => match &**f {
            P::Lam(x, r) => Some((Axiom::Beta, r.subst(x, s))),
            _ => None,
        },
        P::MRec(s, r) => match &**r {
            P::In(t) => {
                let rec = ProofTerm::unapplied((**s).clone(), P::MRec);
                Some((Axiom::MRec, ProofTerm::apps((**s).clone(), alloc::vec![identity(), rec, (**t).clone()])))
            }
            _ => None,
        },
        P::MIt(s, r) => match &**r {
            P::In(t) => {
                let rec = ProofTerm::unapplied((**s).clone(), P::MIt);
                Some((Axiom::MIt, ProofTerm::apps((**s).clone(), alloc::vec![rec, (**t).clone()])))
            }
            _ => None,
        },
        P::Out(r) => match &**r {
            P::MCoRec(s, t) => {
                let rec = ProofTerm::unapplied((**s).clone(), P::MCoRec);
                Some((Axiom::MCoRecOut, ProofTerm::apps((**s).clone(), alloc::vec![identity(), rec, (**t).clone()])))
            }
            P::MCoIt(s, t) => {
                let rec = ProofTerm::unapplied((**s).clone(), P::MCoIt);
                Some((Axiom::MCoItOut, ProofTerm::apps((**s).clone(), alloc::vec![rec, (**t).clone()])))
            }
            _ => None,
        },
        P::Fst(r) => match &**r {
            P::Pair(a, _) => Some((Axiom::Fst, (**a).clone())),
            _ => None,
        },
        P::Snd(r) => match &**r {
            P::Pair(_, b) => Some((Axiom::Snd, (**b).clone())),
            _ => None,
        },
        P::Case(r, x, s, y, u) => match &**r {
            P::Inl(a) => Some((Axiom::CaseInl, s.subst(x, a))),
            P::Inr(a) => Some((Axiom::CaseInr, u.subst(y, a))),
            _ => None,
        },
        P::Open(t, u, r) => match &**t {
            P::Pack(a) => Some((Axiom::OpenPack, r.subst(u, a))),
            _ => None,
        },
        _ => None,
    }
}

pub fn is_redex(t: &ProofTerm) -> bool {
    contract(t).is_some()
}

/// All one-step reducts, outermost first and left to right.
pub fn one_step(t: &ProofTerm) -> Vec<ReductionStep> {
    fn go(t: &ProofTerm, path: &mut Vec<usize>, out: &mut Vec<ReductionStep>) {
        if let Some((axiom, contractum)) = contract(t) {
            out.push(ReductionStep { path: path.clone(), axiom, contractum });
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// The leftmost-outermost step, without enumerating the others.
pub fn leftmost_outermost(t: &ProofTerm) -> Option<ReductionStep> {
    fn go(t: &ProofTerm, path: &mut Vec<usize>) -> Option<ReductionStep> {
        if let Some((axiom, contractum)) = contract(t) {
            return Some(ReductionStep { path: path.clone(), axiom, contractum });
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            if let Some(s) = go(c, path) {
                return Some(s);
            }
            path.pop();
        }
        None
    }
    go(t, &mut Vec::new())
}

pub fn is_normal(t: &ProofTerm) -> bool {
    leftmost_outermost(t).is_none()
}

/// The child index of the hole when `t` is an evaluation-context former.
pub(crate) fn spine_child(t: &ProofTerm) -> Option<usize> {
    match t {
        P::App(..) | P::Out(_) | P::Fst(_) | P::Snd(_) | P::Case(..) | P::Open(..) => Some(0),
        P::MRec(..) | P::MIt(..) => Some(1),
        _ => None,
    }
}

/// Splits `t` as `E[u]` where `u` is a redex, returning the path to `u`.
pub fn whd_redex(t: &ProofTerm) -> Option<Vec<usize>> {
    let mut path = Vec::new();
    let mut cur = t;
    loop {
        if is_redex(cur) {
            return Some(path);
        }
        let i = spine_child(cur)?;
        path.push(i);
        cur = cur.children()[i];
    }
}

/// Weak-head step: contraction of the redex in the hole.
pub fn whd_step(t: &ProofTerm) -> Option<ReductionStep> {
    let path = whd_redex(t)?;
    let (axiom, contractum) = contract(at_path(t, &path)?)?;
    Some(ReductionStep { path, axiom, contractum })
}

/// Step budget of [`normalize`].
pub const DEFAULT_FUEL: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: ProofTerm,
    pub steps: Vec<ReductionStep>,
}

impl Trace {
    /// Every intermediate term, the start included.
    pub fn states(&self) -> Vec<ProofTerm> {
        let mut cur = self.start.clone();
        let mut out = alloc::vec![cur.clone()];
        for s in &self.steps {
            cur = s.apply(&cur);
            out.push(cur.clone());
        }
        out
    }

    /// Replays every step and returns the final term, or the index of the
    /// first step that does not replay.
    pub fn replay(&self) -> Result<ProofTerm, usize> {
        let mut cur = self.start.clone();
        for (i, s) in self.steps.iter().enumerate() {
            cur = s.replay(&cur).ok_or(i)?;
        }
        Ok(cur)
    }

    pub fn passes_through(&self, t: &ProofTerm) -> bool {
        let key = t.canonical();
        self.states().iter().any(|s| s.canonical() == key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: ProofTerm,
    pub trace: Trace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuelExhausted {
    pub fuel: usize,
    pub reached: ProofTerm,
    pub trace: Trace,
}

impl fmt::Display for FuelExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no normal form within {} steps", self.fuel)
    }
}

/// Leftmost-outermost normalization with at most `fuel` steps.
pub fn normalize(t: &ProofTerm, fuel: usize) -> Result<Normalized, Box<FuelExhausted>> {
    let mut cur = t.clone();
    let mut steps = Vec::new();
    while let Some(step) = leftmost_outermost(&cur) {
        if steps.len() == fuel {
            let trace = Trace { start: t.clone(), steps };
            return Err(Box::new(FuelExhausted { fuel, reached: cur, trace }));
        }
        cur = step.apply(&cur);
        steps.push(step);
    }
    Ok(Normalized { term: cur, trace: Trace { start: t.clone(), steps } })
}

#[cfg(test)]
mod tests;
