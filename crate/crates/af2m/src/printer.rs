//! Pretty-printer producing source the parser reads back.
//!
//! Abbreviations are printed but their uses were expanded by the parser, so
//! printing then parsing gives the same document up to α-equivalence, not
//! the same text as the original.

use std::fmt::Write;

use af2m_core::kernel::Payload;
use af2m_core::syntax::{FixKind, Pred, UnaryFn};

use crate::document::{Item, ScriptStep, SourceFile, StepPayload, Theorem};

/// Predicates outside atoms: free variables carry their arity.
pub fn pred(p: &Pred) -> String {
    match p {
        Pred::Var(x, n) => format!("{x}/{n}"),
        _ => p.to_string(),
    }
}

fn fns(fs: &[UnaryFn]) -> String {
    fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

fn arities(ds: &[(af2m_core::Name, usize)]) -> String {
    ds.iter().map(|(n, a)| format!("{n}/{a}")).collect::<Vec<_>>().join(", ")
}

fn payload(p: &StepPayload) -> Option<String> {
    let p = match p {
        StepPayload::Lemma(n) => return Some(n.to_string()),
        StepPayload::Kernel(p) => p,
    };
    Some(match p {
        Payload::None | Payload::Convert => return None,
        Payload::Hyp { name, formula: None } => name.to_string(),
        Payload::Hyp { name, formula: Some(a) } => format!("{name} : {a}"),
        Payload::Obj(x) => x.to_string(),
        Payload::Pred2(x, n) => format!("{x}/{n}"),
        Payload::Witness(t) => t.to_string(),
        Payload::PredWitness(q) => pred(q),
        Payload::Rewrite { template, var, lhs, rhs, .. } => format!("{var} => {template} ; {lhs} = {rhs}"),
        Payload::Equation { lhs, rhs, .. } => format!("{lhs} = {rhs}"),
        Payload::Fold { fix, args } => {
            let ts: Vec<String> = args.iter().map(|t| t.to_string()).collect();
            if ts.is_empty() {
                fix.name.to_string()
            } else {
                format!("{} ; {}", fix.name, ts.join(", "))
            }
        }
        Payload::Motive { fix, motive, fns: fs } => {
            let head = fix.as_ref().map(|f| format!("fix {} ; ", f.name)).unwrap_or_default();
            format!("{head}{} ; {}", pred(motive), fns(fs))
        }
        Payload::Branches(x, y) => format!("{x}, {y}"),
        Payload::Unpack { eigen, hyp } => format!("{eigen}, {hyp}"),
        Payload::Lemma(j) => format!("{}", j.term()),
    })
}

pub fn step(steps: &[ScriptStep], s: &ScriptStep) -> String {
    let mut out = format!("{}. {}", s.label, s.rule);
    if let StepPayload::Kernel(Payload::Hyp { name, formula: Some(a) }) = &s.payload {
        if s.rule == af2m_core::Rule::Var {
            let _ = write!(out, " {name} : {a}");
            return out;
        }
    }
    for &p in &s.premises {
        let _ = write!(out, " {}", steps[p].label);
    }
    if let Some(p) = payload(&s.payload) {
        let _ = write!(out, " [{p}]");
    }
    if !s.using.is_empty() {
        out.push_str(" using");
        for &p in &s.using {
            let _ = write!(out, " {}", steps[p].label);
        }
    }
    if let Some(a) = &s.formula {
        let _ = write!(out, " : {a}");
    }
    out
}

pub fn theorem(t: &Theorem) -> String {
    let mut out = format!("theorem {}", t.name);
    if !t.under.is_empty() {
        let names: Vec<&str> = t.under.iter().map(|n| &**n).collect();
        let _ = write!(out, " under {}", names.join(", "));
    }
    out.push_str(" {\n");
    for s in &t.steps {
        let _ = writeln!(out, "  {}", step(&t.steps, s));
    }
    out.push('}');
    out
}

pub fn item(i: &Item) -> String {
    match i {
        Item::Functions(ds) => format!("sig {};", arities(ds)),
        Item::Predicates(ds) => format!("pred {};", arities(ds)),
        Item::Let { name, params, body } if params.is_empty() => format!("let {name} := {};", pred(body)),
        Item::Let { name, params, body } => format!("let {name}({}) := {};", arities(params), pred(body)),
        Item::Fix(fp) => {
            let kw = if fp.kind == FixKind::Mu { "mu" } else { "nu" };
            let syms: Vec<&str> = fp.symbols.iter().map(|s| &**s).collect();
            format!("{kw} {} := {} with {};", fp.name, fp.phi, syms.join(", "))
        }
        Item::Eqs { name, eqs } => {
            let mut out = format!("eqs {name} {{\n");
            for (l, r) in eqs {
                let _ = writeln!(out, "  {l} = {r};");
            }
            out.push('}');
            out
        }
        Item::Fuel(n) => format!("fuel {n};"),
        Item::Def { name, term } => format!("def {name} := {term};"),
        Item::Theorem(t) => theorem(t),
        Item::Expect(e) => {
            let typed = e.typed.as_ref().map(|(a, b)| format!(" [typed {a}, {b}]")).unwrap_or_default();
            format!("expect {} : {} ->* {}{typed};", e.name, e.lhs, e.rhs)
        }
    }
}

pub fn file(f: &SourceFile) -> String {
    let mut out = String::new();
    for (_, i) in &f.items {
        out.push_str(&item(i));
        out.push_str("\n\n");
    }
    out
}
