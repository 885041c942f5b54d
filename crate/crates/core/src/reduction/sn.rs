//! Term classification and the inductive characterization of strongly
//! normalizing terms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{at_path, contract, spine_child, whd_step, Axiom, ReductionStep};
use crate::proof::{Canonical, ProofTerm};

use ProofTerm as P;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermClass {
    Variable,
    /// Built by an introduction former.
    Intro,
    /// Built by an elimination former.
    Elim,
}

pub fn classify(t: &ProofTerm) -> TermClass {
    match t {
        P::Var(_) => TermClass::Variable,
        P::Lam(..)
        | P::In(_)
        | P::MCoRec(..)
        | P::MCoIt(..)
        | P::Pair(..)
        | P::Inl(_)
        | P::Inr(_)
        | P::Pack(_)
        | P::Unit => TermClass::Intro,
        P::App(..) | P::Out(_) | P::MRec(..) | P::MIt(..) | P::Fst(_) | P::Snd(_) | P::Case(..) | P::Open(..) => {
            TermClass::Elim
        }
    }
}

/// Immediate subterms.
pub fn ist(t: &ProofTerm) -> Vec<ProofTerm> {
    t.children().into_iter().cloned().collect()
}

/// `E[x]`: following the evaluation-context spine ends in a variable.
pub fn is_neutral(t: &ProofTerm) -> bool {
    let mut cur = t;
    loop {
        if let P::Var(_) = cur {
            return true;
        }
        match spine_child(cur) {
            Some(i) => cur = cur.children()[i],
            None => return false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotARedex(pub ProofTerm);

impl fmt::Display for NotARedex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` is not a redex", self.0)
    }
}

/// The subterms a contraction may discard. Their strong normalization is not
/// implied by that of the contractum.
pub fn prt(redex: &ProofTerm) -> Result<Vec<ProofTerm>, NotARedex> {
    let (axiom, _) = contract(redex).ok_or_else(|| NotARedex(redex.clone()))?;
    let c = redex.children();
    let inner = |t: &ProofTerm| -> Vec<ProofTerm> { t.children().into_iter().cloned().collect() };
    Ok(match axiom {
        Axiom::Beta => alloc::vec![c[1].clone()],
        Axiom::MRec | Axiom::MCoRecOut | Axiom::MIt | Axiom::MCoItOut => Vec::new(),
        // fst <r, s> drops s; snd drops r.
        Axiom::Fst => alloc::vec![inner(c[0])[1].clone()],
        Axiom::Snd => alloc::vec![inner(c[0])[0].clone()],
        // The injected term may be dropped by the branch, the other branch always is.
        Axiom::CaseInl => alloc::vec![inner(c[0])[0].clone(), c[2].clone()],
        Axiom::CaseInr => alloc::vec![inner(c[0])[0].clone(), c[1].clone()],
        Axiom::OpenPack => alloc::vec![inner(c[0])[0].clone()],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnRule {
    Var,
    Intro,
    Neutral,
    WeakHead,
}

impl SnRule {
    pub fn name(self) -> &'static str {
        match self {
            SnRule::Var => "sn-var",
            SnRule::Intro => "sn-i",
            SnRule::Neutral => "sn-e",
            SnRule::WeakHead => "sn-w",
        }
    }
}

/// A derivation of `term ∈ SN`.
///
/// `sn-i` and `sn-e` have one premise per immediate subterm. `sn-w` has the
/// derivation for the weak-head reduct first, then one per problematic
/// subterm of the contracted redex.
///
/// Premises are shared: a term met twice (up to α) is derived once, so a
/// derivation is a DAG and its size counts distinct nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnDerivation {
    pub rule: SnRule,
    pub term: ProofTerm,
    pub step: Option<ReductionStep>,
    pub premises: Vec<Arc<SnDerivation>>,
}

impl SnDerivation {
    fn nodes(&self) -> Vec<&SnDerivation> {
        let mut seen: BTreeSet<*const SnDerivation> = BTreeSet::new();
        let mut out = Vec::new();
        let mut stack = alloc::vec![self];
        while let Some(d) = stack.pop() {
            if seen.insert(d as *const _) {
                out.push(d);
                stack.extend(d.premises.iter().map(|p| &**p));
            }
        }
        out
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        self.nodes().len()
    }

    /// Checks every node against its rule schema.
    pub fn is_valid(&self) -> bool {
        self.nodes().into_iter().all(SnDerivation::node_valid)
    }

    fn node_valid(&self) -> bool {
        let terms: Vec<&ProofTerm> = self.premises.iter().map(|p| &p.term).collect();
        let same = |xs: &[ProofTerm], ys: &[&ProofTerm]| {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.alpha_eq(y))
        };
        match self.rule {
            SnRule::Var => matches!(self.term, P::Var(_)) && self.premises.is_empty(),
            SnRule::Intro => classify(&self.term) == TermClass::Intro && same(&ist(&self.term), &terms),
            SnRule::Neutral => {
                classify(&self.term) == TermClass::Elim && is_neutral(&self.term) && same(&ist(&self.term), &terms)
            }
            SnRule::WeakHead => {
                let Some(step) = &self.step else { return false };
                let Some(expected) = whd_step(&self.term) else { return false };
                if expected != *step || terms.is_empty() {
                    return false;
                }
                let Some(redex) = at_path(&self.term, &step.path) else { return false };
                let Ok(problems) = prt(redex) else { return false };
                terms[0].alpha_eq(&step.apply(&self.term)) && same(&problems, &terms[1..])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SnError {
    /// No rule applies: an elimination whose principal argument is an
    /// introduction of the wrong kind.
    Stuck(ProofTerm),
    FuelExhausted { fuel: usize },
}

impl fmt::Display for SnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnError::Stuck(t) => write!(f, "no rule applies to `{t}`"),
            SnError::FuelExhausted { fuel } => write!(f, "derivation exceeds {fuel} nodes"),
        }
    }
}

struct Certifier {
    fuel: usize,
    used: usize,
    done: BTreeMap<Canonical, Arc<SnDerivation>>,
}

impl Certifier {
    fn tick(&mut self) -> Result<(), SnError> {
        self.used += 1;
        if self.used > self.fuel {
            Err(SnError::FuelExhausted { fuel: self.fuel })
        } else {
            Ok(())
        }
    }

    fn all(&mut self, ts: Vec<ProofTerm>) -> Result<Vec<Arc<SnDerivation>>, SnError> {
        ts.iter().map(|t| self.certify(t)).collect()
    }

    fn certify(&mut self, t: &ProofTerm) -> Result<Arc<SnDerivation>, SnError> {
        // Weak-head chains are followed iteratively and assembled afterwards.
        let mut chain: Vec<(Canonical, ProofTerm, ReductionStep, Vec<Arc<SnDerivation>>)> = Vec::new();
        let mut cur = t.clone();
        let last = loop {
            let key = cur.canonical();
            if let Some(d) = self.done.get(&key) {
                break d.clone();
            }
            self.tick()?;
            let d = match classify(&cur) {
                TermClass::Variable => SnDerivation { rule: SnRule::Var, term: cur, step: None, premises: Vec::new() },
                TermClass::Intro => {
                    let premises = self.all(ist(&cur))?;
                    SnDerivation { rule: SnRule::Intro, term: cur, step: None, premises }
                }
                TermClass::Elim if is_neutral(&cur) => {
                    let premises = self.all(ist(&cur))?;
                    SnDerivation { rule: SnRule::Neutral, term: cur, step: None, premises }
                }
                TermClass::Elim => {
                    let Some(step) = whd_step(&cur) else {
                        return Err(SnError::Stuck(cur));
                    };
                    let redex = at_path(&cur, &step.path).expect("whd path");
                    let problems = prt(redex).expect("whd redex");
                    let discharged = self.all(problems)?;
                    let next = step.apply(&cur);
                    chain.push((key, cur, step, discharged));
                    cur = next;
                    continue;
                }
            };
            let d = Arc::new(d);
            self.done.insert(key, d.clone());
            break d;
        };
        let mut acc = last;
        for (key, term, step, discharged) in chain.into_iter().rev() {
            let mut premises = alloc::vec![acc];
            premises.extend(discharged);
            acc = Arc::new(SnDerivation { rule: SnRule::WeakHead, term, step: Some(step), premises });
            self.done.insert(key, acc.clone());
        }
        Ok(acc)
    }
}

/// Default node budget of [`sn_certify`].
pub const DEFAULT_SN_FUEL: usize = 1_000_000;

/// Builds an SN derivation, using at most `fuel` nodes.
pub fn sn_certify(t: &ProofTerm, fuel: usize) -> Result<Arc<SnDerivation>, SnError> {
    Certifier { fuel, used: 0, done: BTreeMap::new() }.certify(t)
}
