//! Strong normalization decided by exploring the reduction graph, and the
//! saturated-set closure over a finite universe of terms.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use super::sn::{classify, is_neutral, prt, TermClass};
use super::{at_path, one_step, whd_step};
use crate::proof::{Canonical, ProofTerm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    /// Every explored graph is finite and acyclic; `nodes` terms modulo α.
    Sn { nodes: usize },
    /// A reduction cycle of the term or of one of its subterms: each term
    /// reduces to the next and the last to the first.
    Cycle(Vec<ProofTerm>),
    /// Each term reduces to the next or has it as an immediate subterm, and
    /// the last leads back to the first: the first term reduces to a
    /// context around itself.
    Expanding(Vec<ProofTerm>),
    /// The node budget ran out first.
    Inconclusive { explored: usize },
}

impl OracleVerdict {
    pub fn is_sn(&self) -> bool {
        matches!(self, OracleVerdict::Sn { .. })
    }

    /// A witness of an infinite reduction was found.
    pub fn is_non_sn(&self) -> bool {
        matches!(self, OracleVerdict::Cycle(_) | OracleVerdict::Expanding(_))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Open,
    Done,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Link {
    Reduct,
    Subterm,
}

struct Frame {
    key: Canonical,
    term: ProofTerm,
    link: Link,
    next: Vec<ProofTerm>,
}

fn reducts(t: &ProofTerm) -> Vec<ProofTerm> {
    one_step(t).iter().map(|s| s.apply(t)).rev().collect()
}

/// What the strong normalization of `t` reduces to. A term that can never
/// be a redex at its root (variables, introductions, neutral and stuck
/// eliminations) reduces only inside its immediate subterms, so its graph
/// is the product of theirs and it is SN iff they all are. Otherwise the
/// term's own one-step reducts are explored.
fn split(t: &ProofTerm) -> (Link, Vec<ProofTerm>) {
    let root_fixed = match classify(t) {
        TermClass::Variable | TermClass::Intro => true,
        TermClass::Elim => is_neutral(t) || whd_step(t).is_none(),
    };
    if root_fixed {
        (Link::Subterm, t.children().into_iter().rev().cloned().collect())
    } else {
        (Link::Reduct, reducts(t))
    }
}

fn search(t: &ProofTerm, budget: usize, deps: impl Fn(&ProofTerm) -> (Link, Vec<ProofTerm>)) -> OracleVerdict {
    let mut marks: BTreeMap<Canonical, Mark> = BTreeMap::new();
    let mut stack: Vec<Frame> = Vec::new();
    let key = t.canonical();
    marks.insert(key.clone(), Mark::Open);
    let (link, next) = deps(t);
    stack.push(Frame { key, term: t.clone(), link, next });
    while let Some(top) = stack.last_mut() {
        let Some(u) = top.next.pop() else {
            let done = stack.pop().expect("non-empty");
            marks.insert(done.key, Mark::Done);
            continue;
        };
        let key = u.canonical();
        match marks.get(&key) {
            Some(Mark::Done) => {}
            Some(Mark::Open) => {
                let from = stack.iter().position(|f| f.key == key).expect("open node is on the stack");
                let path: Vec<ProofTerm> = stack[from..].iter().map(|f| f.term.clone()).collect();
                return if stack[from..].iter().all(|f| f.link == Link::Reduct) {
                    OracleVerdict::Cycle(path)
                } else {
                    OracleVerdict::Expanding(path)
                };
            }
            None => {
                if marks.len() >= budget {
                    return OracleVerdict::Inconclusive { explored: marks.len() };
                }
                marks.insert(key.clone(), Mark::Open);
                let (link, next) = deps(&u);
                stack.push(Frame { key, term: u, link, next });
            }
        }
    }
    OracleVerdict::Sn { nodes: marks.len() }
}

/// Decides strong normalization by depth-first search of the one-step
/// reduction graph modulo α, visiting at most `budget` distinct terms.
/// Terms whose root can never reduce are split into their immediate
/// subterms instead of being explored whole, which avoids enumerating the
/// interleavings of independent redexes.
pub fn sn_oracle(t: &ProofTerm, budget: usize) -> OracleVerdict {
    search(t, budget, split)
}

/// The same search over the whole reduction graph of `t`, without
/// splitting. Exponential in the number of independent redexes; used to
/// cross-check [`sn_oracle`] on small terms.
pub fn sn_oracle_flat(t: &ProofTerm, budget: usize) -> OracleVerdict {
    search(t, budget, |u| (Link::Reduct, reducts(u)))
}

/// Default node budget of [`sn_oracle`].
pub const DEFAULT_ORACLE_BUDGET: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatError {
    /// The universe misses this immediate subterm or reduct.
    NotClosed { term: Box<ProofTerm>, missing: Box<ProofTerm> },
    /// The oracle could not decide this term within its budget.
    Undecided(ProofTerm),
}

impl fmt::Display for SatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatError::NotClosed { term, missing } => {
                write!(f, "universe contains `{term}` but not `{missing}`")
            }
            SatError::Undecided(t) => write!(f, "strong normalization of `{t}` undecided"),
        }
    }
}

/// The least set containing the strongly normalizing members of `m` and
/// the neutral strongly normalizing terms of `universe`, closed under
/// weak-head expansion inside `universe`. The universe must be closed under
/// immediate subterms and one-step reduction.
pub fn sat_closure(m: &[ProofTerm], universe: &[ProofTerm], budget: usize) -> Result<Vec<ProofTerm>, SatError> {
    let keys: BTreeSet<Canonical> = universe.iter().map(ProofTerm::canonical).collect();
    for u in universe {
        let reducts = one_step(u).iter().map(|s| s.apply(u)).collect::<Vec<_>>();
        for v in u.children().into_iter().cloned().chain(reducts) {
            if !keys.contains(&v.canonical()) {
                return Err(SatError::NotClosed { term: Box::new(u.clone()), missing: Box::new(v) });
            }
        }
    }
    let mut sn_memo: BTreeMap<Canonical, bool> = BTreeMap::new();
    let mut is_sn = |t: &ProofTerm| -> Result<bool, SatError> {
        let k = t.canonical();
        if let Some(&b) = sn_memo.get(&k) {
            return Ok(b);
        }
        let b = match sn_oracle(t, budget) {
            OracleVerdict::Sn { .. } => true,
            OracleVerdict::Cycle(_) | OracleVerdict::Expanding(_) => false,
            OracleVerdict::Inconclusive { .. } => return Err(SatError::Undecided(t.clone())),
        };
        sn_memo.insert(k, b);
        Ok(b)
    };
    let mut out: BTreeMap<Canonical, ProofTerm> = BTreeMap::new();
    for t in m {
        if is_sn(t)? {
            out.insert(t.canonical(), t.clone());
        }
    }
    for u in universe {
        if is_neutral(u) && is_sn(u)? {
            out.insert(u.canonical(), u.clone());
        }
    }
    loop {
        let mut grew = false;
        for u in universe {
            let k = u.canonical();
            if out.contains_key(&k) {
                continue;
            }
            let Some(step) = whd_step(u) else { continue };
            if !out.contains_key(&step.apply(u).canonical()) {
                continue;
            }
            let redex = at_path(u, &step.path).expect("whd path");
            let mut ok = true;
            for p in prt(redex).expect("whd redex") {
                if !is_sn(&p)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.insert(k, u.clone());
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    Ok(out.into_values().collect())
}
