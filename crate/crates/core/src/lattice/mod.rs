//! Finite complete lattices and operators on them.
//!
//! Elements are indices `0..n`. Operators are total tables. Everything is
//! decided by exhaustion, so the functions here are meant for small carriers.

mod generate;

pub use generate::{all_lattices, chain, powerset, random_lattice, random_monotone_operator, random_operator};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    Empty,
    NotReflexive(usize),
    NotAntisymmetric(usize, usize),
    NotTransitive(usize, usize, usize),
    NoMeet(usize, usize),
    NoJoin(usize, usize),
    /// Operator table of the wrong length or with out-of-range entries.
    BadTable,
    NotMonotone { below: usize, above: usize },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::Empty => write!(f, "empty carrier"),
            LatticeError::NotReflexive(a) => write!(f, "order is not reflexive at {a}"),
            LatticeError::NotAntisymmetric(a, b) => write!(f, "{a} and {b} are mutually below each other"),
            LatticeError::NotTransitive(a, b, c) => write!(f, "{a} <= {b} <= {c} but not {a} <= {c}"),
            LatticeError::NoMeet(a, b) => write!(f, "{a} and {b} have no greatest lower bound"),
            LatticeError::NoJoin(a, b) => write!(f, "{a} and {b} have no least upper bound"),
            LatticeError::BadTable => write!(f, "operator table does not match the carrier"),
            LatticeError::NotMonotone { below, above } => {
                write!(f, "operator is not monotone: {below} <= {above} but images are not ordered")
            }
        }
    }
}

/// A finite lattice given by its order; binary meets and joins are tabulated.
/// A finite lattice is complete: the infimum of a subset is the fold of
/// binary meets starting from the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    n: usize,
    leq: Vec<bool>,
    meet: Vec<usize>,
    join: Vec<usize>,
    bottom: usize,
    top: usize,
    labels: Vec<String>,
}

impl FiniteLattice {
    /// Validates the order and computes binary meets and joins.
    pub fn from_order(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<FiniteLattice, LatticeError> {
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let table: Vec<bool> = (0..n * n).map(|k| leq(k / n, k % n)).collect();
        let le = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            if !le(a, a) {
                return Err(LatticeError::NotReflexive(a));
            }
            for b in 0..n {
                if a != b && le(a, b) && le(b, a) {
                    return Err(LatticeError::NotAntisymmetric(a, b));
                }
                if !le(a, b) {
                    continue;
                }
                for c in 0..n {
                    if le(b, c) && !le(a, c) {
                        return Err(LatticeError::NotTransitive(a, b, c));
                    }
                }
            }
        }
        let mut meet = alloc::vec![0; n * n];
        let mut join = alloc::vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower = (0..n).filter(|&c| le(c, a) && le(c, b));
                meet[a * n + b] = greatest(lower, &le).ok_or(LatticeError::NoMeet(a, b))?;
                let upper = (0..n).filter(|&c| le(a, c) && le(b, c));
                join[a * n + b] = least(upper, &le).ok_or(LatticeError::NoJoin(a, b))?;
            }
        }
        let bottom = (1..n).fold(0, |acc, x| meet[acc * n + x]);
        let top = (1..n).fold(0, |acc, x| join[acc * n + x]);
        let labels = (0..n).map(|i| alloc::format!("{i}")).collect();
        Ok(FiniteLattice { n, leq: table, meet, join, bottom, top, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> FiniteLattice {
        assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.n
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Infimum of a subset; the top for the empty subset.
    pub fn inf(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Supremum of a subset; the bottom for the empty subset.
    pub fn sup(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn check_operator(&self, phi: &Operator) -> Result<(), LatticeError> {
        if phi.len() != self.n || phi.iter().any(|&y| y >= self.n) {
            Err(LatticeError::BadTable)
        } else {
            Ok(())
        }
    }
}

fn greatest(xs: impl Iterator<Item = usize> + Clone, le: &impl Fn(usize, usize) -> bool) -> Option<usize> {
    xs.clone().find(|&c| xs.clone().all(|d| le(d, c)))
}

fn least(xs: impl Iterator<Item = usize> + Clone, le: &impl Fn(usize, usize) -> bool) -> Option<usize> {
    xs.clone().find(|&c| xs.clone().all(|d| le(c, d)))
}

/// An operator as its table: `phi[x]` is the image of `x`.
pub type Operator = Vec<usize>;

pub fn identity(l: &FiniteLattice) -> Operator {
    l.elements().collect()
}

pub fn constant(l: &FiniteLattice, c: usize) -> Operator {
    alloc::vec![c; l.size()]
}

/// First pair `x <= y` with `phi(x) </= phi(y)`.
pub fn monotonicity_witness(l: &FiniteLattice, phi: &Operator) -> Option<(usize, usize)> {
    for x in l.elements() {
        for y in l.elements() {
            if l.leq(x, y) && !l.leq(phi[x], phi[y]) {
                return Some((x, y));
            }
        }
    }
    None
}

pub fn is_monotone(l: &FiniteLattice, phi: &Operator) -> bool {
    monotonicity_witness(l, phi).is_none()
}

fn require_monotone(l: &FiniteLattice, phi: &Operator) -> Result<(), LatticeError> {
    l.check_operator(phi)?;
    match monotonicity_witness(l, phi) {
        Some((below, above)) => Err(LatticeError::NotMonotone { below, above }),
        None => Ok(()),
    }
}

/// Infimum of the prefixed points.
fn kt_lfp(l: &FiniteLattice, phi: &Operator) -> usize {
    l.inf(l.elements().filter(|&x| l.leq(phi[x], x)))
}

/// Supremum of the postfixed points.
fn kt_gfp(l: &FiniteLattice, phi: &Operator) -> usize {
    l.sup(l.elements().filter(|&x| l.leq(x, phi[x])))
}

pub fn lfp(l: &FiniteLattice, phi: &Operator) -> Result<usize, LatticeError> {
    require_monotone(l, phi)?;
    Ok(kt_lfp(l, phi))
}

pub fn gfp(l: &FiniteLattice, phi: &Operator) -> Result<usize, LatticeError> {
    require_monotone(l, phi)?;
    Ok(kt_gfp(l, phi))
}

/// Kleene iteration from the bottom; reaches the least fixed point of a
/// monotone operator on a finite lattice.
pub fn lfp_by_iteration(l: &FiniteLattice, phi: &Operator) -> Result<usize, LatticeError> {
    require_monotone(l, phi)?;
    Ok(iterate(phi, l.bottom()))
}

pub fn gfp_by_iteration(l: &FiniteLattice, phi: &Operator) -> Result<usize, LatticeError> {
    require_monotone(l, phi)?;
    Ok(iterate(phi, l.top()))
}

fn iterate(phi: &Operator, mut x: usize) -> usize {
    // Monotone chains in a finite lattice stabilize within |L| steps.
    for _ in 0..=phi.len() {
        if phi[x] == x {
            return x;
        }
        x = phi[x];
    }
    x
}

/// `M |-> sup { phi(X) | X <= M }`.
pub fn upper_mono(l: &FiniteLattice, phi: &Operator) -> Operator {
    l.elements().map(|m| l.sup(l.elements().filter(|&x| l.leq(x, m)).map(|x| phi[x]))).collect()
}

/// `M |-> inf { phi(X) | M <= X }`.
pub fn lower_mono(l: &FiniteLattice, phi: &Operator) -> Operator {
    l.elements().map(|m| l.inf(l.elements().filter(|&x| l.leq(m, x)).map(|x| phi[x]))).collect()
}

/// The principles checked by [`check_conventional_principles`] and
/// [`check_mendler_principles`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Principle {
    Induction,
    ExtendedInduction,
    Coinduction,
    ExtendedCoinduction,
    MendlerInduction,
    MendlerExtendedInduction,
    MendlerCoinduction,
    MendlerExtendedCoinduction,
    /// `phi(lfp(upper)) <= lfp(upper)`.
    UpperPrefixed,
    /// `gfp(lower) <= phi(gfp(lower))`.
    LowerPostfixed,
}

impl Principle {
    pub const ALL: [Principle; 10] = [
        Principle::Induction,
        Principle::ExtendedInduction,
        Principle::Coinduction,
        Principle::ExtendedCoinduction,
        Principle::MendlerInduction,
        Principle::MendlerExtendedInduction,
        Principle::MendlerCoinduction,
        Principle::MendlerExtendedCoinduction,
        Principle::UpperPrefixed,
        Principle::LowerPostfixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Principle::Induction => "induction",
            Principle::ExtendedInduction => "extended-induction",
            Principle::Coinduction => "coinduction",
            Principle::ExtendedCoinduction => "extended-coinduction",
            Principle::MendlerInduction => "mendler-induction",
            Principle::MendlerExtendedInduction => "mendler-extended-induction",
            Principle::MendlerCoinduction => "mendler-coinduction",
            Principle::MendlerExtendedCoinduction => "mendler-extended-coinduction",
            Principle::UpperPrefixed => "upper-prefixed",
            Principle::LowerPostfixed => "lower-postfixed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The hypothesis is false, so nothing was checked.
    Vacuous,
    Holds,
    /// Hypothesis true, conclusion false.
    Violated,
}

fn implication(hyp: bool, concl: bool) -> Outcome {
    match (hyp, concl) {
        (false, _) => Outcome::Vacuous,
        (true, true) => Outcome::Holds,
        (true, false) => Outcome::Violated,
    }
}

pub type Report = Vec<(Principle, Outcome)>;

pub fn violations(r: &Report) -> impl Iterator<Item = Principle> + '_ {
    r.iter().filter(|(_, o)| *o == Outcome::Violated).map(|(p, _)| *p)
}

/// The four conventional principles for a monotone `phi` at `m`.
pub fn check_conventional_principles(
    l: &FiniteLattice,
    phi: &Operator,
    m: usize,
) -> Result<Report, LatticeError> {
    require_monotone(l, phi)?;
    let mu = kt_lfp(l, phi);
    let nu = kt_gfp(l, phi);
    Ok(alloc::vec![
        (Principle::Induction, implication(l.leq(phi[m], m), l.leq(mu, m))),
        (Principle::ExtendedInduction, implication(l.leq(phi[l.meet(mu, m)], m), l.leq(mu, m))),
        (Principle::Coinduction, implication(l.leq(m, phi[m]), l.leq(m, nu))),
        (Principle::ExtendedCoinduction, implication(l.leq(m, phi[l.join(nu, m)]), l.leq(m, nu))),
    ])
}

/// The Mendler principles for an arbitrary `phi` at `m`, plus the two
/// pre/postfixed point facts. `X` ranges over the whole carrier.
pub fn check_mendler_principles(l: &FiniteLattice, phi: &Operator, m: usize) -> Result<Report, LatticeError> {
    l.check_operator(phi)?;
    let up = upper_mono(l, phi);
    let down = lower_mono(l, phi);
    let mu = kt_lfp(l, &up);
    let nu = kt_gfp(l, &down);
    let all = |p: &dyn Fn(usize) -> bool| l.elements().all(p);
    let ind = all(&|x| !l.leq(x, m) || l.leq(phi[x], m));
    let ext_ind = all(&|x| !l.leq(x, mu) || !l.leq(x, m) || l.leq(phi[x], m));
    let coind = all(&|x| !l.leq(m, x) || l.leq(m, phi[x]));
    let ext_coind = all(&|x| !l.leq(nu, x) || !l.leq(m, x) || l.leq(m, phi[x]));
    Ok(alloc::vec![
        (Principle::MendlerInduction, implication(ind, l.leq(mu, m))),
        (Principle::MendlerExtendedInduction, implication(ext_ind, l.leq(mu, m))),
        (Principle::MendlerCoinduction, implication(coind, l.leq(m, nu))),
        (Principle::MendlerExtendedCoinduction, implication(ext_coind, l.leq(m, nu))),
        (Principle::UpperPrefixed, implication(true, l.leq(phi[mu], mu))),
        (Principle::LowerPostfixed, implication(true, l.leq(nu, phi[nu]))),
    ])
}
