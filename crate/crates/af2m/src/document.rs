//! Parsed `.af2` files.

use std::collections::BTreeMap;
use std::sync::Arc;

use af2m_core::equational::EquationSet;
use af2m_core::kernel::Payload;
use af2m_core::syntax::{FixPoint, Name, Pred, Term};
use af2m_core::{Formula, ProofTerm, Rule, Signature};

use crate::lexer::Pos;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

// Most steps carry a kernel payload, so boxing it would not save space.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum StepPayload {
    Kernel(Payload),
    /// A theorem of the same file, resolved once it has been checked.
    Lemma(Name),
}

#[derive(Clone, Debug)]
pub struct ScriptStep {
    pub label: Name,
    pub pos: Pos,
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub using: Vec<usize>,
    pub payload: StepPayload,
    pub formula: Option<Formula>,
}

#[derive(Clone, Debug)]
pub struct Theorem {
    pub name: Name,
    pub pos: Pos,
    /// Names of the equation blocks the script is checked under.
    pub under: Vec<Name>,
    pub steps: Vec<ScriptStep>,
}

#[derive(Clone, Debug)]
pub struct Expect {
    pub name: Name,
    pub pos: Pos,
    pub lhs: ProofTerm,
    pub rhs: ProofTerm,
    /// Theorems typing the left-hand side and its normal form.
    pub typed: Option<(Name, Name)>,
}

#[derive(Clone, Debug)]
pub enum Item {
    Functions(Vec<(Name, usize)>),
    Predicates(Vec<(Name, usize)>),
    /// Predicate abbreviation, expanded where it is used.
    Let { name: Name, params: Vec<(Name, usize)>, body: Pred },
    Fix(Arc<FixPoint>),
    Eqs { name: Name, eqs: Vec<(Term, Term)> },
    /// Rewrite fuel for equational search in this file.
    Fuel(usize),
    /// Proof-term definition; free names may refer to earlier definitions and theorems.
    Def { name: Name, term: ProofTerm },
    Theorem(Theorem),
    Expect(Expect),
}

#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub items: Vec<(Pos, Item)>,
    pub signature: Signature,
    pub equations: BTreeMap<Name, EquationSet>,
}

impl SourceFile {
    pub fn theorems(&self) -> impl Iterator<Item = &Theorem> {
        self.items.iter().filter_map(|(_, i)| match i {
            Item::Theorem(t) => Some(t),
            _ => None,
        })
    }

    pub fn expects(&self) -> impl Iterator<Item = &Expect> {
        self.items.iter().filter_map(|(_, i)| match i {
            Item::Expect(e) => Some(e),
            _ => None,
        })
    }

    pub fn fuel(&self) -> Option<usize> {
        self.items.iter().rev().find_map(|(_, i)| match i {
            Item::Fuel(n) => Some(*n),
            _ => None,
        })
    }
}

/// Result of parsing: whatever items parsed, plus diagnostics for the rest.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub file: SourceFile,
    pub diagnostics: Vec<Diagnostic>,
}
