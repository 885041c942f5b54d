//! Equational side conditions `E |> r = s`.
//!
//! An [`EquationSet`] holds schematic equations (their variables may be
//! instantiated) and rigid ones, which come from hypotheses and are used as
//! stated. Evidence is a small proof object built from reflexivity, instances
//! in either orientation, transitivity and congruence. [`replay_evidence`]
//! re-derives the equation an evidence proves; [`derive_eq`] searches for
//! evidence by rewriting both sides with the equations read left to right.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{Name, Signature, Subst, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    /// Schematic equations can be instantiated; rigid ones only used verbatim.
    pub schematic: bool,
}

impl Equation {
    pub fn schematic(lhs: Term, rhs: Term) -> Equation {
        Equation { lhs, rhs, schematic: true }
    }

    pub fn rigid(lhs: Term, rhs: Term) -> Equation {
        Equation { lhs, rhs, schematic: false }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquationSet {
    pub equations: Vec<Equation>,
}

impl EquationSet {
    pub fn new() -> EquationSet {
        EquationSet::default()
    }

    pub fn from_pairs(pairs: Vec<(Term, Term)>) -> EquationSet {
        EquationSet {
            equations: pairs.into_iter().map(|(l, r)| Equation::schematic(l, r)).collect(),
        }
    }

    pub fn push(&mut self, e: Equation) {
        self.equations.push(e);
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// `self ∪ other`, keeping the indices of `self`.
    pub fn union(&self, other: &EquationSet) -> EquationSet {
        let mut out = self.clone();
        for e in &other.equations {
            if !out.equations.contains(e) {
                out.equations.push(e.clone());
            }
        }
        out
    }

    /// Every equation of `self` occurs in `other`.
    pub fn is_subset(&self, other: &EquationSet) -> bool {
        self.equations.iter().all(|e| other.equations.contains(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqEvidence {
    Refl(Term),
    /// `σ(lhs) = σ(rhs)` for equation `index`, or the reverse when `Backward`.
    Instance { index: usize, subst: Subst, orientation: Orientation },
    /// `r = mid` and `mid = s` give `r = s`.
    Trans { left: Box<EqEvidence>, right: Box<EqEvidence>, mid: Term },
    Cong { symbol: Name, args: Vec<EqEvidence> },
}

impl EqEvidence {
    /// Number of instance leaves.
    pub fn steps(&self) -> usize {
        match self {
            EqEvidence::Refl(_) => 0,
            EqEvidence::Instance { .. } => 1,
            EqEvidence::Trans { left, right, .. } => left.steps() + right.steps(),
            EqEvidence::Cong { args, .. } => args.iter().map(EqEvidence::steps).sum(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    LeftmostInnermost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RewriteConfig {
    /// Rewrite steps allowed per side.
    pub fuel: usize,
    pub strategy: Strategy,
    /// On failure, retry with the other strategy.
    pub fallback: bool,
}

impl Default for RewriteConfig {
    fn default() -> RewriteConfig {
        RewriteConfig { fuel: 10_000, strategy: Strategy::LeftmostOutermost, fallback: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqError {
    UnknownEquation(usize),
    /// A rigid equation was used with a non-empty substitution.
    RigidInstantiated(usize),
    TransMismatch { left_ends: Term, right_starts: Term },
    BadCongruence { symbol: Name, reason: String },
    FuelExhausted { fuel: usize, reached: Term },
    NotJoinable { left: Term, right: Term },
    Proves { expected: Box<(Term, Term)>, found: Box<(Term, Term)> },
}

impl fmt::Display for EqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqError::UnknownEquation(i) => write!(f, "no equation with index {i}"),
            EqError::RigidInstantiated(i) => {
                write!(f, "equation {i} comes from a hypothesis and cannot be instantiated")
            }
            EqError::TransMismatch { left_ends, right_starts } => {
                write!(f, "transitivity gap: `{left_ends}` vs `{right_starts}`")
            }
            EqError::BadCongruence { symbol, reason } => write!(f, "congruence on `{symbol}`: {reason}"),
            EqError::FuelExhausted { fuel, reached } => {
                write!(f, "rewriting ran out of fuel after {fuel} steps at `{reached}`")
            }
            EqError::NotJoinable { left, right } => {
                write!(f, "normal forms differ: `{left}` vs `{right}`")
            }
            EqError::Proves { expected, found } => write!(
                f,
                "evidence proves `{} = {}`, expected `{} = {}`",
                found.0, found.1, expected.0, expected.1
            ),
        }
    }
}

/// Recomputes the equation proved by `ev`. With a signature, congruence
/// steps are also checked against the declared arity.
pub fn replay_evidence(
    eqs: &EquationSet,
    sig: Option<&Signature>,
    ev: &EqEvidence,
) -> Result<(Term, Term), EqError> {
    match ev {
        EqEvidence::Refl(t) => Ok((t.clone(), t.clone())),
        EqEvidence::Instance { index, subst, orientation } => {
            let eq = eqs.equations.get(*index).ok_or(EqError::UnknownEquation(*index))?;
            if !eq.schematic && !subst.is_empty() {
                return Err(EqError::RigidInstantiated(*index));
            }
            let l = eq.lhs.subst_many(subst);
            let r = eq.rhs.subst_many(subst);
            Ok(match orientation {
                Orientation::Forward => (l, r),
                Orientation::Backward => (r, l),
            })
        }
        EqEvidence::Trans { left, right, mid } => {
            let (l, m1) = replay_evidence(eqs, sig, left)?;
            let (m2, r) = replay_evidence(eqs, sig, right)?;
            if &m1 != mid {
                return Err(EqError::TransMismatch { left_ends: m1, right_starts: mid.clone() });
            }
            if &m2 != mid {
                return Err(EqError::TransMismatch { left_ends: mid.clone(), right_starts: m2 });
            }
            Ok((l, r))
        }
        EqEvidence::Cong { symbol, args } => {
            if let Some(sig) = sig {
                match sig.function_arity(symbol) {
                    Some(n) if n == args.len() => {}
                    Some(n) => {
                        return Err(EqError::BadCongruence {
                            symbol: symbol.clone(),
                            reason: alloc::format!("arity {n}, {} argument(s) given", args.len()),
                        })
                    }
                    None => {
                        return Err(EqError::BadCongruence {
                            symbol: symbol.clone(),
                            reason: String::from("undeclared symbol"),
                        })
                    }
                }
            }
            let mut ls = Vec::with_capacity(args.len());
            let mut rs = Vec::with_capacity(args.len());
            for a in args {
                let (l, r) = replay_evidence(eqs, sig, a)?;
                ls.push(l);
                rs.push(r);
            }
            Ok((Term::App(symbol.clone(), ls), Term::App(symbol.clone(), rs)))
        }
    }
}

/// Checks that `ev` proves exactly `r = s`.
pub fn check_evidence(
    eqs: &EquationSet,
    sig: Option<&Signature>,
    ev: &EqEvidence,
    r: &Term,
    s: &Term,
) -> Result<(), EqError> {
    let found = replay_evidence(eqs, sig, ev)?;
    if &found.0 == r && &found.1 == s {
        Ok(())
    } else {
        Err(EqError::Proves { expected: Box::new((r.clone(), s.clone())), found: Box::new(found) })
    }
}

/// One rewrite: the subterm at `path` was replaced using equation `index`
/// instantiated by `subst`, read left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub path: Vec<usize>,
    pub index: usize,
    pub subst: Subst,
    pub before: Term,
    pub after: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: Term,
    pub trace: Vec<RewriteStep>,
}

fn match_pattern(pat: &Term, t: &Term, sigma: &mut Subst) -> bool {
    match pat {
        Term::Var(x) => match sigma.get(x) {
            Some(bound) => bound == t,
            None => {
                sigma.insert(x.clone(), t.clone());
                true
            }
        },
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, u)| match_pattern(p, u, sigma))
            }
            _ => false,
        },
    }
}

/// A substitution making `r = s` an instance of `eq` in either orientation.
/// Rigid equations only match verbatim.
pub fn match_instance(eq: &Equation, r: &Term, s: &Term) -> Option<(Subst, Orientation)> {
    for (orientation, (a, b)) in
        [(Orientation::Forward, (r, s)), (Orientation::Backward, (s, r))]
    {
        if !eq.schematic {
            if &eq.lhs == a && &eq.rhs == b {
                return Some((Subst::new(), orientation));
            }
            continue;
        }
        let mut sigma = Subst::new();
        if match_pattern(&eq.lhs, a, &mut sigma) && match_pattern(&eq.rhs, b, &mut sigma) {
            return Some((sigma, orientation));
        }
    }
    None
}

/// Tries every equation at the root of `t`.
fn rewrite_root(eqs: &EquationSet, t: &Term) -> Option<(usize, Subst, Term)> {
    for (i, eq) in eqs.equations.iter().enumerate() {
        if eq.schematic {
            let mut sigma = Subst::new();
            if match_pattern(&eq.lhs, t, &mut sigma) {
                // Variables only on the right would be left unbound.
                let rhs_vars = eq.rhs.vars();
                if rhs_vars.iter().all(|v| sigma.contains_key(v)) {
                    let out = eq.rhs.subst_many(&sigma);
                    return Some((i, sigma, out));
                }
            }
        } else if &eq.lhs == t {
            return Some((i, Subst::new(), eq.rhs.clone()));
        }
    }
    None
}

fn find_redex(
    eqs: &EquationSet,
    t: &Term,
    strategy: Strategy,
    path: &mut Vec<usize>,
) -> Option<(Vec<usize>, usize, Subst, Term)> {
    if strategy == Strategy::LeftmostOutermost {
        if let Some((i, s, out)) = rewrite_root(eqs, t) {
            return Some((path.clone(), i, s, out));
        }
    }
    if let Term::App(_, args) = t {
        for (k, a) in args.iter().enumerate() {
            path.push(k);
            let found = find_redex(eqs, a, strategy, path);
            path.pop();
            if found.is_some() {
                return found;
            }
        }
    }
    if strategy == Strategy::LeftmostInnermost {
        if let Some((i, s, out)) = rewrite_root(eqs, t) {
            return Some((path.clone(), i, s, out));
        }
    }
    None
}

/// Rewrites `t` to normal form with the equations read left to right.
pub fn normalize_obj(
    eqs: &EquationSet,
    t: &Term,
    config: &RewriteConfig,
) -> Result<Normalized, EqError> {
    let (fuel, strategy) = (config.fuel, config.strategy);
    let mut current = t.clone();
    let mut trace = Vec::new();
    loop {
        match find_redex(eqs, &current, strategy, &mut Vec::new()) {
            None => return Ok(Normalized { term: current, trace }),
            Some((path, index, subst, replacement)) => {
                if trace.len() >= fuel {
                    return Err(EqError::FuelExhausted { fuel, reached: current });
                }
                let next = current.replace_at(&path, replacement);
                trace.push(RewriteStep {
                    path,
                    index,
                    subst,
                    before: current,
                    after: next.clone(),
                });
                current = next;
            }
        }
    }
}

/// Wraps `inner`, an equation between subterms at `path` of `t`, into one
/// between the whole terms.
fn wrap_in_context(t: &Term, path: &[usize], inner: EqEvidence) -> EqEvidence {
    match path.split_first() {
        None => inner,
        Some((&k, rest)) => match t {
            Term::App(f, args) => EqEvidence::Cong {
                symbol: f.clone(),
                args: args
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        if j == k {
                            wrap_in_context(a, rest, inner.clone())
                        } else {
                            EqEvidence::Refl(a.clone())
                        }
                    })
                    .collect(),
            },
            Term::Var(_) => unreachable!("rewrite path runs through a variable"),
        },
    }
}

fn step_evidence(step: &RewriteStep, orientation: Orientation) -> (EqEvidence, Term, Term) {
    let leaf = EqEvidence::Instance { index: step.index, subst: step.subst.clone(), orientation };
    let ev = wrap_in_context(&step.before, &step.path, leaf);
    match orientation {
        Orientation::Forward => (ev, step.before.clone(), step.after.clone()),
        Orientation::Backward => (ev, step.after.clone(), step.before.clone()),
    }
}

/// Chains evidences `t0 = t1`, `t1 = t2`, ... given with their endpoints.
fn chain(parts: Vec<(EqEvidence, Term, Term)>) -> Option<EqEvidence> {
    let mut it = parts.into_iter();
    let (first, _, mut end) = it.next()?;
    let mut acc = first;
    for (ev, start, stop) in it {
        debug_assert_eq!(start, end);
        acc = EqEvidence::Trans { left: Box::new(acc), right: Box::new(ev), mid: start };
        end = stop;
    }
    Some(acc)
}

fn derive_with(
    eqs: &EquationSet,
    r: &Term,
    s: &Term,
    fuel: usize,
    strategy: Strategy,
) -> Result<EqEvidence, EqError> {
    let config = RewriteConfig { fuel, strategy, fallback: false };
    let left = normalize_obj(eqs, r, &config)?;
    let right = normalize_obj(eqs, s, &config)?;
    if left.term != right.term {
        return Err(EqError::NotJoinable { left: left.term, right: right.term });
    }
    let mut parts: Vec<(EqEvidence, Term, Term)> =
        left.trace.iter().map(|st| step_evidence(st, Orientation::Forward)).collect();
    parts.extend(right.trace.iter().rev().map(|st| step_evidence(st, Orientation::Backward)));
    Ok(chain(parts).unwrap_or_else(|| EqEvidence::Refl(r.clone())))
}

/// Searches for evidence of `r = s`: both sides are rewritten to normal form
/// and the two traces are joined.
pub fn derive_eq(
    eqs: &EquationSet,
    r: &Term,
    s: &Term,
    config: &RewriteConfig,
) -> Result<EqEvidence, EqError> {
    match derive_with(eqs, r, s, config.fuel, config.strategy) {
        Ok(ev) => Ok(ev),
        Err(first) if config.fallback => {
            let other = match config.strategy {
                Strategy::LeftmostOutermost => Strategy::LeftmostInnermost,
                Strategy::LeftmostInnermost => Strategy::LeftmostOutermost,
            };
            derive_with(eqs, r, s, config.fuel, other).map_err(|_| first)
        }
        Err(e) => Err(e),
    }
}
