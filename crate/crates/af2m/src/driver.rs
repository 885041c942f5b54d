//! Checking a parsed file: scripts through the kernel, then the reduction
//! assertions.

use std::collections::BTreeMap;

use af2m_core::equational::{EquationSet, RewriteConfig};
use af2m_core::kernel::{
    check_steps_traced, coverage, equivalent, CheckOptions, Coverage, EqObligation, Payload,
};
use af2m_core::reduction::{normalize, DEFAULT_FUEL};
use af2m_core::{CheckedJudgment, DerivationScript, Name, ProofTerm, Step};

use crate::document::{Diagnostic, Expect, Item, SourceFile, StepPayload, Theorem};
use crate::parser::parse;

#[derive(Clone, Debug)]
pub struct TheoremOutcome {
    pub name: Name,
    pub result: Result<CheckedJudgment, Diagnostic>,
    pub script: Option<DerivationScript>,
    pub obligations: Vec<EqObligation>,
}

/// Subject reduction for one assertion: the normal form is typed at the
/// formula of the start term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubjectReduction {
    pub lhs_theorem: Name,
    pub nf_theorem: Name,
    pub holds: Result<(), String>,
    /// Trace states (start and end included) that are the term of some checked
    /// theorem with the start formula.
    pub typed_states: usize,
    pub states: usize,
}

#[derive(Clone, Debug)]
pub struct ExpectOutcome {
    pub name: Name,
    pub lhs: ProofTerm,
    pub normal_form: Option<ProofTerm>,
    pub steps: usize,
    pub result: Result<(), String>,
    pub subject_reduction: Option<SubjectReduction>,
    pub trace: Vec<af2m_core::reduction::ReductionStep>,
}

#[derive(Clone, Debug)]
pub struct CheckedFile {
    pub source: SourceFile,
    pub diagnostics: Vec<Diagnostic>,
    pub theorems: Vec<TheoremOutcome>,
    pub expects: Vec<ExpectOutcome>,
    /// Definitions and theorem terms with every reference expanded.
    pub terms: BTreeMap<Name, ProofTerm>,
}

impl CheckedFile {
    pub fn judgment(&self, n: &str) -> Option<&CheckedJudgment> {
        self.theorems.iter().find(|t| &*t.name == n).and_then(|t| t.result.as_ref().ok())
    }

    pub fn judgments(&self) -> impl Iterator<Item = (&Name, &CheckedJudgment)> {
        self.theorems.iter().filter_map(|t| t.result.as_ref().ok().map(|j| (&t.name, j)))
    }

    pub fn coverage(&self) -> Coverage {
        let mut c = Coverage::new();
        for t in &self.theorems {
            if let (Some(s), Ok(_)) = (&t.script, &t.result) {
                coverage(s, &mut c);
            }
        }
        c
    }

    pub fn all_passed(&self) -> bool {
        self.diagnostics.is_empty()
            && self.theorems.iter().all(|t| t.result.is_ok())
            && self.expects.iter().all(|e| {
                e.result.is_ok() && e.subject_reduction.as_ref().is_none_or(|s| s.holds.is_ok())
            })
    }

    /// Replaces free names of definitions and theorems by their terms.
    pub fn expand(&self, t: &ProofTerm) -> ProofTerm {
        expand(t, &self.terms)
    }
}

fn expand(t: &ProofTerm, env: &BTreeMap<Name, ProofTerm>) -> ProofTerm {
    let mut out = t.clone();
    for x in t.free_vars() {
        if let Some(u) = env.get(&x) {
            out = out.subst(&x, u);
        }
    }
    out
}

pub fn rewrite_config(file: &SourceFile) -> RewriteConfig {
    let mut c = RewriteConfig::default();
    if let Some(f) = file.fuel() {
        c.fuel = f;
    }
    c
}

fn build_script(file: &SourceFile, th: &Theorem, done: &[TheoremOutcome]) -> Result<DerivationScript, Diagnostic> {
    let mut eqs = EquationSet::new();
    for u in &th.under {
        eqs = eqs.union(&file.equations[u]);
    }
    let mut steps = Vec::with_capacity(th.steps.len());
    for s in &th.steps {
        let payload = match &s.payload {
            StepPayload::Kernel(p) => p.clone(),
            StepPayload::Lemma(n) => {
                let j = done
                    .iter()
                    .find(|t| &t.name == n)
                    .and_then(|t| t.result.as_ref().ok())
                    .ok_or_else(|| Diagnostic { pos: s.pos, message: format!("`{n}` is not a checked theorem") })?;
                Payload::Lemma(Box::new(j.clone()))
            }
        };
        let mut step = Step::new(s.rule, s.premises.clone(), payload).using(s.using.clone());
        step.formula = s.formula.clone();
        steps.push(step);
    }
    Ok(DerivationScript { signature: std::sync::Arc::new(file.signature.clone()), eqs, steps })
}

fn check_theorem(file: &SourceFile, th: &Theorem, done: &[TheoremOutcome], options: &CheckOptions) -> TheoremOutcome {
    let script = match build_script(file, th, done) {
        Ok(s) => s,
        Err(d) => return TheoremOutcome { name: th.name.clone(), result: Err(d), script: None, obligations: Vec::new() },
    };
    match check_steps_traced(&script, options) {
        Ok((mut js, obligations)) => TheoremOutcome {
            name: th.name.clone(),
            result: Ok(js.pop().expect("non-empty")),
            script: Some(script),
            obligations,
        },
        Err(e) => {
            let s = &th.steps[e.step.min(th.steps.len() - 1)];
            let message = format!("theorem `{}`, step {} ({}): {}", th.name, s.label, e.rule, e.kind);
            TheoremOutcome {
                name: th.name.clone(),
                result: Err(Diagnostic { pos: s.pos, message }),
                script: Some(script),
                obligations: Vec::new(),
            }
        }
    }
}

fn context_within(small: &CheckedJudgment, big: &CheckedJudgment) -> bool {
    small.context().iter().all(|(x, a)| big.context().iter().any(|(y, b)| x == y && equivalent(a, b)))
}

fn run_expect(e: &Expect, f: &CheckedFile, fuel: usize) -> ExpectOutcome {
    let lhs = f.expand(&e.lhs);
    let rhs = f.expand(&e.rhs);
    let mut out = ExpectOutcome {
        name: e.name.clone(),
        lhs: lhs.clone(),
        normal_form: None,
        steps: 0,
        result: Ok(()),
        subject_reduction: None,
        trace: Vec::new(),
    };
    let n = match normalize(&lhs, fuel) {
        Ok(n) => n,
        Err(x) => {
            out.steps = x.trace.steps.len();
            out.result = Err(format!("no normal form within {} steps", x.fuel));
            return out;
        }
    };
    out.steps = n.trace.steps.len();
    out.normal_form = Some(n.term.clone());
    let reached = n.trace.passes_through(&rhs)
        || normalize(&rhs, fuel).map(|r| r.term.alpha_eq(&n.term)).unwrap_or(false);
    if !reached {
        out.result = Err(format!("normal form `{}` does not match `{}`", n.term, rhs));
    }
    if let Some((a, b)) = &e.typed {
        let holds = (|| -> Result<(), String> {
            let ja = f.judgment(a).ok_or_else(|| format!("`{a}` is not a checked theorem"))?;
            let jb = f.judgment(b).ok_or_else(|| format!("`{b}` is not a checked theorem"))?;
            if !ja.term().alpha_eq(&lhs) {
                return Err(format!("`{a}` types `{}`, not the start term", ja.term()));
            }
            if !jb.term().alpha_eq(&n.term) {
                return Err(format!("`{b}` types `{}`, not the normal form", jb.term()));
            }
            if !equivalent(ja.formula(), jb.formula()) {
                return Err(format!("`{b}` proves `{}`, not `{}`", jb.formula(), ja.formula()));
            }
            if !context_within(jb, ja) || !jb.equations().is_subset(ja.equations()) {
                return Err(format!("`{b}` needs hypotheses or equations `{a}` does not have"));
            }
            Ok(())
        })();
        let states = n.trace.states();
        let typed_states = match f.judgment(a) {
            Some(ja) => states
                .iter()
                .filter(|s| {
                    f.judgments().any(|(_, j)| {
                        j.term().alpha_eq(s) && equivalent(j.formula(), ja.formula()) && context_within(j, ja)
                    })
                })
                .count(),
            None => 0,
        };
        out.subject_reduction = Some(SubjectReduction {
            lhs_theorem: a.clone(),
            nf_theorem: b.clone(),
            holds,
            typed_states,
            states: states.len(),
        });
    }
    out.trace = n.trace.steps;
    out
}

/// Checks every theorem in order, then runs the assertions. `fuel` bounds
/// each normalization.
pub fn check_source(src: &str, fuel: Option<usize>) -> CheckedFile {
    let parsed = parse(src);
    let file = parsed.file;
    let options = CheckOptions { rewrite: rewrite_config(&file), ..CheckOptions::default() };
    let mut theorems: Vec<TheoremOutcome> = Vec::new();
    let mut terms: BTreeMap<Name, ProofTerm> = BTreeMap::new();
    for (_, item) in &file.items {
        match item {
            Item::Def { name, term } => {
                let t = expand(term, &terms);
                terms.insert(name.clone(), t);
            }
            Item::Theorem(th) => {
                let o = check_theorem(&file, th, &theorems, &options);
                if let Ok(j) = &o.result {
                    terms.insert(th.name.clone(), j.term().clone());
                }
                theorems.push(o);
            }
            _ => {}
        }
    }
    let mut out = CheckedFile { source: file, diagnostics: parsed.diagnostics, theorems, expects: Vec::new(), terms };
    let fuel = fuel.unwrap_or(DEFAULT_FUEL);
    let expects: Vec<ExpectOutcome> = out.source.expects().map(|e| run_expect(e, &out, fuel)).collect();
    out.expects = expects;
    out
}
