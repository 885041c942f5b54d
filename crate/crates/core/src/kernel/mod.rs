//! Checker for explicit derivation scripts.
//!
//! A script is a list of steps in topological order; each step names a rule,
//! the indices of its premises and the data the Curry-style rule leaves
//! implicit (witnesses, templates, motives). Checking a script yields a
//! [`CheckedJudgment`] `Γ ⊢_E t : A` whose proof term is assembled from the
//! steps. Contexts are the hypotheses actually used, merged across premises.
//!
//! Formulas are compared up to α-equivalence after contracting comprehension
//! redexes. Equations are never applied implicitly: only the `eq`, `eq-ax`
//! and `res-i` rules consult the equation pool, which consists of the script
//! equations plus the equations stated by hypotheses in the current context
//! (equation-shaped hypotheses and the equation part of restricted ones).

mod conv;
mod rules;
#[cfg(test)]
mod tests;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use crate::equational::{EqError, EqEvidence, Equation, EquationSet, RewriteConfig};
use crate::proof::ProofTerm;
use crate::syntax::{alpha_eq, FixPoint, Formula, Name, Pred, Signature, SyntaxError, Term, UnaryFn};

/// Rule names, also used as the keys of the coverage counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Var,
    Lemma,
    ImpI,
    ImpE,
    AllI,
    AllE,
    All2I,
    All2E,
    Eq,
    EqAx,
    MuI,
    NuE,
    MuE,
    NuI,
    MIt,
    MCoIt,
    AndI,
    AndEL,
    AndER,
    OrIL,
    OrIR,
    OrE,
    ExI,
    ExE,
    ResI,
    ResE,
}

impl Rule {
    pub const ALL: [Rule; 26] = [
        Rule::Var,
        Rule::Lemma,
        Rule::ImpI,
        Rule::ImpE,
        Rule::AllI,
        Rule::AllE,
        Rule::All2I,
        Rule::All2E,
        Rule::Eq,
        Rule::EqAx,
        Rule::MuI,
        Rule::NuE,
        Rule::MuE,
        Rule::NuI,
        Rule::MIt,
        Rule::MCoIt,
        Rule::AndI,
        Rule::AndEL,
        Rule::AndER,
        Rule::OrIL,
        Rule::OrIR,
        Rule::OrE,
        Rule::ExI,
        Rule::ExE,
        Rule::ResI,
        Rule::ResE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Var => "var",
            Rule::Lemma => "lemma",
            Rule::ImpI => "imp-i",
            Rule::ImpE => "imp-e",
            Rule::AllI => "all-i",
            Rule::AllE => "all-e",
            Rule::All2I => "all2-i",
            Rule::All2E => "all2-e",
            Rule::Eq => "eq",
            Rule::EqAx => "eq-ax",
            Rule::MuI => "mu-i",
            Rule::NuE => "nu-e",
            Rule::MuE => "mu-e",
            Rule::NuI => "nu-i",
            Rule::MIt => "mit",
            Rule::MCoIt => "mcoit",
            Rule::AndI => "and-i",
            Rule::AndEL => "and-el",
            Rule::AndER => "and-er",
            Rule::OrIL => "or-il",
            Rule::OrIR => "or-ir",
            Rule::OrE => "or-e",
            Rule::ExI => "ex-i",
            Rule::ExE => "ex-e",
            Rule::ResI => "res-i",
            Rule::ResE => "res-e",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.iter().copied().find(|r| r.name() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Rule-specific data.
#[derive(Clone, Debug)]
pub enum Payload {
    None,
    /// `var` and `imp-i`: the hypothesis. For `imp-i` the formula may be
    /// omitted when the premise context already records it.
    Hyp { name: Name, formula: Option<Formula> },
    /// `all-i`: the generalized variable.
    Obj(Name),
    /// `all2-i`: the generalized predicate variable and its arity.
    Pred2(Name, usize),
    /// `all-e` and `ex-i`: the witness term.
    Witness(Term),
    /// `all2-e`: the witness predicate.
    PredWitness(Pred),
    /// `eq`: premise is `template[var := lhs]`, conclusion `template[var := rhs]`.
    /// Without evidence, the checker searches for it.
    Rewrite { template: Formula, var: Name, lhs: Term, rhs: Term, evidence: Option<EqEvidence> },
    /// `eq` with the template computed from the stated conclusion.
    Convert,
    /// `eq-ax` and `res-i`: the equation, optionally with evidence.
    Equation { lhs: Term, rhs: Term, evidence: Option<EqEvidence> },
    /// `mu-i`: the fixed point and the arguments `t` of the premise `Φ(μΦ)(t)`.
    Fold { fix: Arc<FixPoint>, args: Vec<Term> },
    /// `mu-e`, `nu-i`, `mit`, `mcoit`: the motive and the function tuple. The
    /// fixed point of the coinductive rules can be given explicitly; otherwise it
    /// is read off the stated conclusion or the step formula.
    Motive { fix: Option<Arc<FixPoint>>, motive: Pred, fns: Vec<UnaryFn> },
    /// `or-e`: the hypothesis names of the two branches.
    Branches(Name, Name),
    /// `ex-e`: the eigenvariable and the hypothesis name.
    Unpack { eigen: Name, hyp: Name },
    /// `lemma`: a previously checked judgment.
    Lemma(Box<CheckedJudgment>),
}

#[derive(Clone, Debug)]
pub struct Step {
    pub rule: Rule,
    pub premises: Vec<usize>,
    /// Extra steps whose hypotheses are added to the context, which makes
    /// their equations available to this step.
    pub using: Vec<usize>,
    pub payload: Payload,
    /// Stated conclusion; checked against the computed one when present.
    pub formula: Option<Formula>,
}

impl Step {
    pub fn new(rule: Rule, premises: Vec<usize>, payload: Payload) -> Step {
        Step { rule, premises, using: Vec::new(), payload, formula: None }
    }

    pub fn stating(mut self, formula: Formula) -> Step {
        self.formula = Some(formula);
        self
    }

    pub fn using(mut self, donors: Vec<usize>) -> Step {
        self.using = donors;
        self
    }
}

#[derive(Clone, Debug)]
pub struct DerivationScript {
    pub signature: Arc<Signature>,
    pub eqs: EquationSet,
    pub steps: Vec<Step>,
}

pub type Context = Vec<(Name, Formula)>;

/// `Γ ⊢_E t : A`. Only the checker constructs these.
#[derive(Clone, Debug)]
pub struct CheckedJudgment {
    ctx: Context,
    eqs: EquationSet,
    term: ProofTerm,
    formula: Formula,
}

impl CheckedJudgment {
    pub fn context(&self) -> &[(Name, Formula)] {
        &self.ctx
    }

    pub fn equations(&self) -> &EquationSet {
        &self.eqs
    }

    pub fn term(&self) -> &ProofTerm {
        &self.term
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }
}

impl fmt::Display for CheckedJudgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, a)) in self.ctx.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} : {a}")?;
        }
        write!(f, " |- {} : {}", self.term, self.formula)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    EmptyScript,
    PremiseCount { expected: usize, found: usize },
    /// Premises must refer to earlier steps.
    ForwardReference(usize),
    MissingPayload(&'static str),
    Shape { expected: &'static str, found: Box<Formula> },
    Mismatch { expected: Box<Formula>, found: Box<Formula> },
    Freshness { var: Name, reason: String },
    ContextClash(Name),
    WrongFixKind(Name),
    Syntax(SyntaxError),
    Equation(EqError),
    LemmaEquations,
    /// A rewrite difference mentions a variable bound in the formula.
    BoundDifference(Term),
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::EmptyScript => write!(f, "script has no steps"),
            ErrorKind::PremiseCount { expected, found } => {
                write!(f, "expected {expected} premise(s), found {found}")
            }
            ErrorKind::ForwardReference(i) => write!(f, "premise {i} is not an earlier step"),
            ErrorKind::MissingPayload(what) => write!(f, "missing {what}"),
            ErrorKind::Shape { expected, found } => write!(f, "expected {expected}, found `{found}`"),
            ErrorKind::Mismatch { expected, found } => {
                write!(f, "formula mismatch: expected `{expected}`, found `{found}`")
            }
            ErrorKind::Freshness { var, reason } => write!(f, "`{var}` is not fresh: {reason}"),
            ErrorKind::ContextClash(x) => {
                write!(f, "hypothesis `{x}` is used with two different formulas")
            }
            ErrorKind::WrongFixKind(x) => write!(f, "`{x}` is the wrong kind of fixed point"),
            ErrorKind::Syntax(e) => write!(f, "{e}"),
            ErrorKind::Equation(e) => write!(f, "equation rejected: {e}"),
            ErrorKind::LemmaEquations => {
                write!(f, "lemma depends on equations that are not available here")
            }
            ErrorKind::BoundDifference(t) => {
                write!(f, "cannot rewrite `{t}`: it mentions a bound variable")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelError {
    /// Zero-based step index.
    pub step: usize,
    pub rule: Rule,
    pub kind: ErrorKind,
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} ({}): {}", self.step + 1, self.rule, self.kind)
    }
}

impl From<SyntaxError> for ErrorKind {
    fn from(e: SyntaxError) -> ErrorKind {
        ErrorKind::Syntax(e)
    }
}

impl From<EqError> for ErrorKind {
    fn from(e: EqError) -> ErrorKind {
        ErrorKind::Equation(e)
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    /// Hypotheses added to every step context (used to test weakening).
    pub base_context: Context,
    pub rewrite: RewriteConfig,
}

/// Per-rule usage counts.
pub type Coverage = BTreeMap<Rule, usize>;

/// Checks every step and returns the judgment of the last one.
pub fn check_script(script: &DerivationScript) -> Result<CheckedJudgment, KernelError> {
    check_script_with(script, &CheckOptions::default())
}

pub fn check_script_with(
    script: &DerivationScript,
    options: &CheckOptions,
) -> Result<CheckedJudgment, KernelError> {
    let mut all = check_steps(script, options)?;
    Ok(all.pop().expect("non-empty"))
}

/// An equation the checker had to establish, with the evidence it used.
#[derive(Clone, Debug)]
pub struct EqObligation {
    pub step: usize,
    /// Script equations plus the rigid equations of the step context.
    pub pool: EquationSet,
    pub lhs: Term,
    pub rhs: Term,
    pub evidence: EqEvidence,
    /// The evidence was found by search rather than supplied.
    pub searched: bool,
}

/// Judgments of all steps, in order.
pub fn check_steps(
    script: &DerivationScript,
    options: &CheckOptions,
) -> Result<Vec<CheckedJudgment>, KernelError> {
    check_steps_traced(script, options).map(|(js, _)| js)
}

/// Like [`check_steps`], also returning every equation proved on the way.
pub fn check_steps_traced(
    script: &DerivationScript,
    options: &CheckOptions,
) -> Result<(Vec<CheckedJudgment>, Vec<EqObligation>), KernelError> {
    let log = RefCell::new(Vec::new());
    if script.steps.is_empty() {
        return Err(KernelError { step: 0, rule: Rule::Var, kind: ErrorKind::EmptyScript });
    }
    let mut done: Vec<CheckedJudgment> = Vec::with_capacity(script.steps.len());
    for (i, step) in script.steps.iter().enumerate() {
        let fail = |kind: ErrorKind| KernelError { step: i, rule: step.rule, kind };
        for &p in step.premises.iter().chain(step.using.iter()) {
            if p >= i {
                return Err(fail(ErrorKind::ForwardReference(p)));
            }
        }
        let premises: Vec<&CheckedJudgment> = step.premises.iter().map(|&p| &done[p]).collect();
        let donors: Vec<&CheckedJudgment> = step.using.iter().map(|&p| &done[p]).collect();
        let env = rules::Env { script, options, donors: &donors, log: &log, step: i };
        let mut j = rules::check_rule(&env, step, &premises).map_err(fail)?;
        if let Some(stated) = &step.formula {
            script.signature.check_formula(stated).map_err(|e| fail(e.into()))?;
            if !equivalent(stated, &j.formula) {
                return Err(fail(ErrorKind::Mismatch { expected: Box::new(stated.clone()), found: Box::new(j.formula) }));
            }
            j.formula = stated.clone();
        }
        done.push(j);
    }
    Ok((done, log.into_inner()))
}

/// Rule usage of a script, counting each step once.
pub fn coverage(script: &DerivationScript, into: &mut Coverage) {
    for s in &script.steps {
        *into.entry(s.rule).or_insert(0) += 1;
    }
}

/// α-equivalence after contracting comprehension redexes.
pub fn equivalent(a: &Formula, b: &Formula) -> bool {
    a == b || alpha_eq(&a.beta_normal(), &b.beta_normal())
}

/// The rigid equations stated by hypotheses: equation-shaped formulas and
/// the equation of each restriction, looking through nested restrictions.
pub fn context_equations(ctx: &[(Name, Formula)]) -> Vec<Equation> {
    fn collect(a: &Formula, out: &mut Vec<Equation>) {
        match a {
            Formula::Restrict(inner, r, s) => {
                out.push(Equation::rigid(r.clone(), s.clone()));
                collect(inner, out);
            }
            _ => {
                if let Some((r, s)) = a.as_equation() {
                    out.push(Equation::rigid(r.clone(), s.clone()));
                }
            }
        }
    }
    let mut out = Vec::new();
    for (_, a) in ctx {
        collect(&a.beta_normal(), &mut out);
    }
    out
}
