//! Recursive-descent parser for `.af2` files.
//!
//! Names are resolved while parsing, so declarations must precede their
//! uses. An identifier without arguments is a constant when the signature
//! declares it with arity 0 and a variable otherwise. In predicate position a
//! name is, in order of preference, a bound predicate variable, an
//! abbreviation, a fixed point, a declared predicate symbol, or else a free
//! predicate variable whose arity is the number of arguments.
//!
//! On an error the parser records a diagnostic and resumes at the next
//! top-level keyword that starts a line.

use std::collections::{BTreeMap, BTreeSet};

use af2m_core::equational::{Equation, EquationSet};
use af2m_core::kernel::Payload;
use af2m_core::syntax::{apply_comprehension, name, FixKind, Name, Pred, Term, Transformer, UnaryFn};
use af2m_core::{Formula, ProofTerm, Rule, Signature};

use crate::document::{Diagnostic, Expect, Item, Parsed, ScriptStep, SourceFile, StepPayload, Theorem};
use crate::lexer::{lex, Pos, Tok, Token};

const TOP_LEVEL: [&str; 10] = ["sig", "pred", "let", "mu", "nu", "eqs", "fuel", "def", "theorem", "expect"];

const PROOF_KEYWORDS: [&str; 15] = [
    "in", "out", "fst", "snd", "inl", "inr", "pack", "MRec", "MCoRec", "MIt", "MCoIt", "case", "open", "unit",
    "typed",
];

type PResult<T> = Result<T, Diagnostic>;

type Binary = fn(Box<ProofTerm>, Box<ProofTerm>) -> ProofTerm;

struct Macro {
    params: Vec<(Name, usize)>,
    body: Pred,
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    sig: Signature,
    macros: BTreeMap<Name, Macro>,
    eqs: BTreeMap<Name, EquationSet>,
    /// Definitions and theorems, which share one namespace.
    items: BTreeSet<Name>,
    obj_bound: Vec<Name>,
    pred_bound: Vec<(Name, usize)>,
}

pub fn parse(src: &str) -> Parsed {
    let toks = match lex(src) {
        Ok(t) => t,
        Err(e) => {
            return Parsed {
                file: SourceFile::default(),
                diagnostics: vec![Diagnostic { pos: e.pos, message: e.message }],
            }
        }
    };
    let mut p = Parser {
        toks,
        i: 0,
        sig: Signature::new(),
        macros: BTreeMap::new(),
        eqs: BTreeMap::new(),
        items: BTreeSet::new(),
        obj_bound: Vec::new(),
        pred_bound: Vec::new(),
    };
    let mut items = Vec::new();
    let mut diagnostics = Vec::new();
    while p.peek() != &Tok::Eof {
        let pos = p.pos();
        match p.item() {
            Ok(item) => items.push((pos, item)),
            Err(d) => {
                diagnostics.push(d);
                p.recover();
            }
        }
    }
    Parsed { file: SourceFile { items, signature: p.sig, equations: p.eqs }, diagnostics }
}

/// Parses a standalone proof term against the names declared in `file`.
pub fn parse_proof_term(src: &str, file: &SourceFile) -> Result<ProofTerm, Diagnostic> {
    let toks = lex(src).map_err(|e| Diagnostic { pos: e.pos, message: e.message })?;
    let mut p = Parser {
        toks,
        i: 0,
        sig: file.signature.clone(),
        macros: BTreeMap::new(),
        eqs: BTreeMap::new(),
        items: BTreeSet::new(),
        obj_bound: Vec::new(),
        pred_bound: Vec::new(),
    };
    let t = p.proof_term()?;
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected("end of the term"));
    }
    Ok(t)
}

fn diag(pos: Pos, message: impl Into<String>) -> Diagnostic {
    Diagnostic { pos, message: message.into() }
}

fn canonical_rule(s: &str) -> Option<Rule> {
    let s = s.replace('_', "-");
    let s = match s.as_str() {
        "arrow-i" => "imp-i",
        "arrow-e" => "imp-e",
        other => other,
    };
    Rule::from_name(s)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        diag(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(name(&s))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn number(&mut self) -> PResult<usize> {
        let pos = self.pos();
        let s = self.ident()?;
        s.parse().map_err(|_| diag(pos, format!("expected a number, found `{s}`")))
    }

    fn recover(&mut self) {
        self.obj_bound.clear();
        self.pred_bound.clear();
        self.bump();
        loop {
            let t = &self.toks[self.i];
            match &t.tok {
                Tok::Eof => return,
                Tok::Ident(s) if t.pos.col == 1 && TOP_LEVEL.contains(&s.as_str()) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    // ---- items ----

    fn item(&mut self) -> PResult<Item> {
        let pos = self.pos();
        let kw = match self.peek() {
            Tok::Ident(s) if TOP_LEVEL.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.unexpected("a declaration")),
        };
        self.bump();
        match kw.as_str() {
            "sig" | "pred" => {
                let decls = self.arity_list()?;
                self.expect_sym(";")?;
                for (n, a) in &decls {
                    let r = if kw == "sig" { self.sig.add_function(n, *a) } else { self.sig.add_predicate(n, *a) };
                    r.map_err(|e| diag(pos, e.to_string()))?;
                }
                Ok(if kw == "sig" { Item::Functions(decls) } else { Item::Predicates(decls) })
            }
            "let" => self.let_item(),
            "mu" | "nu" => self.fix_item(if kw == "mu" { FixKind::Mu } else { FixKind::Nu }),
            "eqs" => self.eqs_item(),
            "fuel" => {
                let n = self.number()?;
                self.expect_sym(";")?;
                Ok(Item::Fuel(n))
            }
            "def" => {
                let n = self.fresh_item_name()?;
                self.expect_sym(":=")?;
                let term = self.proof_term()?;
                self.expect_sym(";")?;
                Ok(Item::Def { name: n, term })
            }
            "theorem" => self.theorem(pos),
            _ => self.expect_item(pos),
        }
    }

    fn fresh_item_name(&mut self) -> PResult<Name> {
        let pos = self.pos();
        let n = self.ident()?;
        if !self.items.insert(n.clone()) {
            return Err(diag(pos, format!("`{n}` is defined twice")));
        }
        Ok(n)
    }

    /// `a/1, b/2`
    fn arity_list(&mut self) -> PResult<Vec<(Name, usize)>> {
        let mut out = Vec::new();
        loop {
            let n = self.ident()?;
            self.expect_sym("/")?;
            out.push((n, self.number()?));
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    fn let_item(&mut self) -> PResult<Item> {
        let pos = self.pos();
        let n = self.ident()?;
        if self.macros.contains_key(&n) {
            return Err(diag(pos, format!("`{n}` is defined twice")));
        }
        let params = if self.eat_sym("(") {
            let ps = self.arity_list()?;
            self.expect_sym(")")?;
            ps
        } else {
            Vec::new()
        };
        self.expect_sym(":=")?;
        let mark = self.pred_bound.len();
        self.pred_bound.extend(params.iter().cloned());
        let body = self.pred();
        self.pred_bound.truncate(mark);
        let body = body?;
        self.expect_sym(";")?;
        self.macros.insert(n.clone(), Macro { params: params.clone(), body: body.clone() });
        Ok(Item::Let { name: n, params, body })
    }

    /// `mu N := X/1 => P with c;`
    fn fix_item(&mut self, kind: FixKind) -> PResult<Item> {
        let pos = self.pos();
        let n = self.ident()?;
        self.expect_sym(":=")?;
        let var = self.ident()?;
        let arity = if self.eat_sym("/") {
            self.number()?
        } else {
            self.binders_ahead(1)
        };
        self.expect_sym("=>")?;
        self.pred_bound.push((var.clone(), arity));
        let body = self.pred();
        self.pred_bound.pop();
        let body = body?;
        if body.arity() != arity {
            return Err(diag(pos, format!("transformer of `{n}` has arity {}, expected {arity}", body.arity())));
        }
        self.expect_kw("with")?;
        let _ = self.eat_kw("ctor") || self.eat_kw("dtor");
        let mut symbols = vec![self.ident()?];
        while self.eat_sym(",") {
            symbols.push(self.ident()?);
        }
        self.expect_sym(";")?;
        let phi = Transformer { var, arity, body };
        let fp = self.sig.add_fixpoint(kind, &n, phi, symbols).map_err(|e| diag(pos, e.to_string()))?;
        Ok(Item::Fix(fp))
    }

    fn eqs_item(&mut self) -> PResult<Item> {
        let pos = self.pos();
        let n = self.ident()?;
        if self.eqs.contains_key(&n) {
            return Err(diag(pos, format!("equation block `{n}` is defined twice")));
        }
        self.expect_sym("{")?;
        let mut eqs = Vec::new();
        while !self.eat_sym("}") {
            let l = self.term()?;
            self.expect_sym("=")?;
            let r = self.term()?;
            self.expect_sym(";")?;
            eqs.push((l, r));
        }
        let set = EquationSet { equations: eqs.iter().map(|(l, r)| Equation::schematic(l.clone(), r.clone())).collect() };
        self.eqs.insert(n.clone(), set);
        Ok(Item::Eqs { name: n, eqs })
    }

    fn expect_item(&mut self, pos: Pos) -> PResult<Item> {
        let n = self.ident()?;
        self.expect_sym(":")?;
        let lhs = self.proof_term()?;
        self.expect_sym("->*")?;
        let rhs = self.proof_term()?;
        let typed = if self.eat_sym("[") {
            self.expect_kw("typed")?;
            let a = self.ident()?;
            self.expect_sym(",")?;
            let b = self.ident()?;
            self.expect_sym("]")?;
            Some((a, b))
        } else {
            None
        };
        self.expect_sym(";")?;
        Ok(Item::Expect(Expect { name: n, pos, lhs, rhs, typed }))
    }

    // ---- scripts ----

    fn theorem(&mut self, pos: Pos) -> PResult<Item> {
        let n = self.fresh_item_name()?;
        let mut under = Vec::new();
        if self.eat_kw("under") {
            loop {
                let p = self.pos();
                let e = self.ident()?;
                if !self.eqs.contains_key(&e) {
                    return Err(diag(p, format!("unknown equation block `{e}`")));
                }
                under.push(e);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym("{")?;
        let mut steps: Vec<ScriptStep> = Vec::new();
        while !self.eat_sym("}") {
            let s = self.step(&steps)?;
            steps.push(s);
        }
        if steps.is_empty() {
            return Err(diag(pos, format!("theorem `{n}` has no steps")));
        }
        Ok(Item::Theorem(Theorem { name: n, pos, under, steps }))
    }

    fn label_ref(&mut self, earlier: &[ScriptStep]) -> PResult<usize> {
        let pos = self.pos();
        let l = self.ident()?;
        earlier
            .iter()
            .rposition(|s| s.label == l)
            .ok_or_else(|| diag(pos, format!("no earlier step labelled `{l}`")))
    }

    /// A label is an identifier followed by `.`; anything else ends a list of references.
    fn at_label_ref(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s != "using") && !matches!(self.peek_at(1), Tok::Sym("."))
    }

    fn step(&mut self, earlier: &[ScriptStep]) -> PResult<ScriptStep> {
        let pos = self.pos();
        let label = self.ident()?;
        self.expect_sym(".")?;
        let rpos = self.pos();
        let rname = self.ident()?;
        let rule = canonical_rule(&rname).ok_or_else(|| diag(rpos, format!("unknown rule `{rname}`")))?;
        if rule == Rule::Var {
            let h = self.ident()?;
            self.expect_sym(":")?;
            let a = self.formula()?;
            return Ok(ScriptStep {
                label,
                pos,
                rule,
                premises: Vec::new(),
                using: Vec::new(),
                payload: StepPayload::Kernel(Payload::Hyp { name: h, formula: Some(a) }),
                formula: None,
            });
        }
        let mut premises = Vec::new();
        while self.at_label_ref() {
            premises.push(self.label_ref(earlier)?);
        }
        let payload = if self.eat_sym("[") {
            let p = self.payload(rule)?;
            self.expect_sym("]")?;
            p
        } else {
            match rule {
                Rule::Eq => StepPayload::Kernel(Payload::Convert),
                _ => StepPayload::Kernel(Payload::None),
            }
        };
        let mut using = Vec::new();
        if self.eat_kw("using") {
            while self.at_label_ref() {
                using.push(self.label_ref(earlier)?);
            }
        }
        let formula = if self.eat_sym(":") { Some(self.formula()?) } else { None };
        Ok(ScriptStep { label, pos, rule, premises, using, payload, formula })
    }

    fn payload(&mut self, rule: Rule) -> PResult<StepPayload> {
        let k = |p: Payload| Ok(StepPayload::Kernel(p));
        match rule {
            Rule::ImpI => {
                let h = self.ident()?;
                let formula = if self.eat_sym(":") { Some(self.formula()?) } else { None };
                k(Payload::Hyp { name: h, formula })
            }
            Rule::AllI => k(Payload::Obj(self.ident()?)),
            Rule::All2I => {
                let x = self.ident()?;
                self.expect_sym("/")?;
                k(Payload::Pred2(x, self.number()?))
            }
            Rule::AllE | Rule::ExI => k(Payload::Witness(self.term()?)),
            Rule::All2E => k(Payload::PredWitness(self.pred()?)),
            Rule::Eq => {
                let v = self.ident()?;
                self.expect_sym("=>")?;
                self.obj_bound.push(v.clone());
                let template = self.formula();
                self.obj_bound.pop();
                let template = template?;
                self.expect_sym(";")?;
                let (lhs, rhs) = self.equation()?;
                k(Payload::Rewrite { template, var: v, lhs, rhs, evidence: None })
            }
            Rule::EqAx | Rule::ResI => {
                let (lhs, rhs) = self.equation()?;
                k(Payload::Equation { lhs, rhs, evidence: None })
            }
            Rule::MuI => {
                let pos = self.pos();
                let f = self.ident()?;
                let fix = self.sig.fixpoint(&f).cloned().ok_or_else(|| diag(pos, format!("unknown fixed point `{f}`")))?;
                let mut args = Vec::new();
                if self.eat_sym(";") {
                    args = self.terms()?;
                }
                k(Payload::Fold { fix, args })
            }
            Rule::MuE | Rule::NuI | Rule::MIt | Rule::MCoIt => {
                let mut fix = None;
                if self.eat_kw("fix") {
                    let pos = self.pos();
                    let f = self.ident()?;
                    fix = Some(self.sig.fixpoint(&f).cloned().ok_or_else(|| diag(pos, format!("unknown fixed point `{f}`")))?);
                    self.expect_sym(";")?;
                }
                let motive = self.pred()?;
                self.expect_sym(";")?;
                let mut fns = vec![self.unary_fn()?];
                while self.eat_sym(",") {
                    fns.push(self.unary_fn()?);
                }
                k(Payload::Motive { fix, motive, fns })
            }
            Rule::OrE => {
                let x = self.ident()?;
                self.expect_sym(",")?;
                k(Payload::Branches(x, self.ident()?))
            }
            Rule::ExE => {
                let eigen = self.ident()?;
                self.expect_sym(",")?;
                k(Payload::Unpack { eigen, hyp: self.ident()? })
            }
            Rule::Lemma => Ok(StepPayload::Lemma(self.ident()?)),
            _ => Err(diag(self.pos(), format!("rule `{rule}` takes no bracketed data"))),
        }
    }

    /// `x => t`, or a unary function symbol `f` for `x => f(x)`.
    fn unary_fn(&mut self) -> PResult<UnaryFn> {
        let pos = self.pos();
        let x = self.ident()?;
        if self.eat_sym("=>") {
            self.obj_bound.push(x.clone());
            let body = self.term();
            self.obj_bound.pop();
            return Ok(UnaryFn { param: x, body: body? });
        }
        match self.sig.function_arity(&x) {
            Some(1) => Ok(UnaryFn::symbol(&x)),
            _ => Err(diag(pos, format!("`{x}` is not a unary function symbol; write `x => ...`"))),
        }
    }

    // ---- terms ----

    fn terms(&mut self) -> PResult<Vec<Term>> {
        let mut out = vec![self.term()?];
        while self.eat_sym(",") {
            out.push(self.term()?);
        }
        Ok(out)
    }

    fn equation(&mut self) -> PResult<(Term, Term)> {
        let l = self.term()?;
        self.expect_sym("=")?;
        Ok((l, self.term()?))
    }

    fn term(&mut self) -> PResult<Term> {
        let pos = self.pos();
        let f = self.ident()?;
        if self.eat_sym("(") {
            let args = if self.is_sym(")") { Vec::new() } else { self.terms()? };
            self.expect_sym(")")?;
            return match self.sig.function_arity(&f) {
                Some(n) if n == args.len() => Ok(Term::App(f, args)),
                Some(n) => Err(diag(pos, format!("`{f}` expects {n} argument(s), found {}", args.len()))),
                None => Err(diag(pos, format!("unknown function symbol `{f}`"))),
            };
        }
        if self.obj_bound.contains(&f) {
            return Ok(Term::Var(f));
        }
        match self.sig.function_arity(&f) {
            Some(0) => Ok(Term::App(f, Vec::new())),
            Some(n) => Err(diag(pos, format!("`{f}` expects {n} argument(s), found 0"))),
            None => Ok(Term::Var(f)),
        }
    }

    // ---- formulas ----

    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        if self.is_kw("forall") || self.is_kw("exists") {
            let all = self.is_kw("forall");
            self.bump();
            let x = self.ident()?;
            if all && self.eat_sym("/") {
                let n = self.number()?;
                self.expect_sym(".")?;
                self.pred_bound.push((x.clone(), n));
                let body = self.formula();
                self.pred_bound.pop();
                return Ok(Formula::All2(x, n, Box::new(body?)));
            }
            self.expect_sym(".")?;
            self.obj_bound.push(x.clone());
            let body = self.formula();
            self.obj_bound.pop();
            let body = Box::new(body?);
            return Ok(if all { Formula::All(x, body) } else { Formula::Ex(x, body) });
        }
        let l = self.disjunction()?;
        if self.eat_sym("->") {
            return Ok(Formula::imp(l, self.formula()?));
        }
        Ok(l)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let l = self.conjunction()?;
        if self.eat_sym("\\/") {
            return Ok(Formula::or(l, self.disjunction()?));
        }
        Ok(l)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let l = self.restriction()?;
        if self.eat_sym("/\\") {
            return Ok(Formula::and(l, self.conjunction()?));
        }
        Ok(l)
    }

    fn restriction(&mut self) -> PResult<Formula> {
        let mut a = self.atom()?;
        while self.eat_sym("|>") {
            let (r, s) = self.equation()?;
            a = Formula::restrict(a, r, s);
        }
        Ok(a)
    }

    /// Number of binders of the comprehension starting `k` tokens ahead, or 1
    /// when no comprehension starts there.
    fn binders_ahead(&self, mut k: usize) -> usize {
        let mut n = 0;
        loop {
            match (self.peek_at(k), self.peek_at(k + 1)) {
                (Tok::Sym("=>"), _) => return n,
                (Tok::Ident(_), Tok::Sym(",")) => k += 2,
                (Tok::Ident(_), Tok::Sym("=>")) => return n + 1,
                _ => return 1,
            }
            n += 1;
        }
    }

    /// After `(`: does a comprehension follow?
    fn comprehension_ahead(&self) -> bool {
        let mut k = 0;
        loop {
            match (self.peek_at(k), self.peek_at(k + 1)) {
                (Tok::Sym("=>"), _) if k == 0 => return true,
                (Tok::Ident(_), Tok::Sym("=>")) => return true,
                (Tok::Ident(_), Tok::Sym(",")) => k += 2,
                _ => return false,
            }
        }
    }

    fn atom(&mut self) -> PResult<Formula> {
        if self.eat_sym("(") {
            if self.comprehension_ahead() {
                let p = self.comprehension()?;
                self.expect_sym(")")?;
                let pos = self.pos();
                self.expect_sym("(")?;
                let args = if self.is_sym(")") { Vec::new() } else { self.terms()? };
                self.expect_sym(")")?;
                return self.apply(p, args, pos);
            }
            let a = self.formula()?;
            self.expect_sym(")")?;
            return Ok(a);
        }
        // An equation `r = s`, tried first without committing.
        let save = self.i;
        if let Ok(r) = self.term() {
            if self.is_sym("=") {
                self.bump();
                let s = self.term()?;
                return Ok(Formula::equation(r, s));
            }
        }
        self.i = save;
        let pos = self.pos();
        let (head, arity) = self.pred_head()?;
        let args = if self.eat_sym("(") {
            let a = if self.is_sym(")") { Vec::new() } else { self.terms()? };
            self.expect_sym(")")?;
            a
        } else {
            Vec::new()
        };
        let head = match head {
            Some(p) => p,
            None => Pred::Var(self.toks[save].tok_name(), args.len()),
        };
        if let Some(n) = arity {
            if n != args.len() {
                return Err(diag(pos, format!("`{}` expects {n} argument(s), found {}", self.toks[save].tok_name(), args.len())));
            }
        }
        self.apply(head, args, pos)
    }

    fn apply(&self, p: Pred, args: Vec<Term>, pos: Pos) -> PResult<Formula> {
        match &p {
            Pred::Comp(xs, _) if xs.len() != args.len() => {
                Err(diag(pos, format!("predicate expects {} argument(s), found {}", xs.len(), args.len())))
            }
            Pred::Comp(..) => apply_comprehension(&p, &args).map_err(|e| diag(pos, e.to_string())),
            _ => Ok(Formula::Atom(p, args)),
        }
    }

    /// A named predicate. Returns `None` for a free predicate variable, whose
    /// arity is fixed by its arguments; otherwise the predicate and its arity.
    fn pred_head(&mut self) -> PResult<(Option<Pred>, Option<usize>)> {
        let pos = self.pos();
        let x = self.ident()?;
        if let Some((_, n)) = self.pred_bound.iter().rev().find(|(y, _)| *y == x) {
            let n = *n;
            return Ok((Some(Pred::Var(x, n)), Some(n)));
        }
        if let Some(m) = self.macros.get(&x) {
            let params = m.params.clone();
            let mut body = m.body.clone();
            if !params.is_empty() {
                self.expect_sym("(")?;
                let mut actual = Vec::new();
                for (i, (_, n)) in params.iter().enumerate() {
                    if i > 0 {
                        self.expect_sym(",")?;
                    }
                    let ppos = self.pos();
                    let a = self.pred()?;
                    if a.arity() != *n {
                        return Err(diag(ppos, format!("argument {} of `{x}` must have arity {n}", i + 1)));
                    }
                    actual.push(a);
                }
                self.expect_sym(")")?;
                for ((v, _), a) in params.iter().zip(&actual) {
                    body = body.subst_pred(v, a);
                }
            }
            let n = body.arity();
            return Ok((Some(body), Some(n)));
        }
        if let Some(fp) = self.sig.fixpoint(&x) {
            let n = fp.arity();
            return Ok((Some(Pred::Fix(fp.clone())), Some(n)));
        }
        if let Some(n) = self.sig.predicate_arity(&x) {
            return Ok((Some(Pred::Sym(x, n)), Some(n)));
        }
        if self.sig.function_arity(&x).is_some() {
            return Err(diag(pos, format!("`{x}` is a function symbol, not a predicate")));
        }
        Ok((None, None))
    }

    /// `x, y => A` or `=> A`.
    fn comprehension(&mut self) -> PResult<Pred> {
        let mut xs = Vec::new();
        if !self.is_sym("=>") {
            xs.push(self.ident()?);
            while self.eat_sym(",") {
                xs.push(self.ident()?);
            }
        }
        self.expect_sym("=>")?;
        let mark = self.obj_bound.len();
        self.obj_bound.extend(xs.iter().cloned());
        let body = self.formula();
        self.obj_bound.truncate(mark);
        Ok(Pred::Comp(xs, Box::new(body?)))
    }

    /// A predicate outside an atom: a comprehension, a name, or `X/n` for a
    /// free predicate variable.
    pub(crate) fn pred(&mut self) -> PResult<Pred> {
        if self.eat_sym("(") {
            let p = self.pred()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        if self.comprehension_ahead() {
            return self.comprehension();
        }
        let pos = self.pos();
        let save = self.i;
        let (head, arity) = self.pred_head()?;
        let x = self.toks[save].tok_name();
        if self.eat_sym("/") {
            let n = self.number()?;
            return match (head, arity) {
                (None, _) => Ok(Pred::Var(x, n)),
                (Some(p), Some(m)) if m == n => Ok(p),
                _ => Err(diag(pos, format!("`{x}` does not have arity {n}"))),
            };
        }
        head.ok_or_else(|| diag(pos, format!("free predicate variable `{x}` needs an arity: `{x}/n`")))
    }

    // ---- proof terms ----

    pub(crate) fn proof_term(&mut self) -> PResult<ProofTerm> {
        if self.eat_sym("\\") {
            let mut xs = vec![self.ident()?];
            while !self.is_sym(".") {
                xs.push(self.ident()?);
            }
            self.expect_sym(".")?;
            let body = self.proof_term()?;
            return Ok(xs.into_iter().rev().fold(body, |b, x| ProofTerm::Lam(x, Box::new(b))));
        }
        let mut t = self.prefixed()?;
        while self.atom_ahead() {
            let a = self.proof_atom()?;
            t = ProofTerm::app(t, a);
        }
        Ok(t)
    }

    fn atom_ahead(&self) -> bool {
        match self.peek() {
            Tok::Sym("(") | Tok::Sym("<") => true,
            Tok::Ident(s) => {
                !PROOF_KEYWORDS.contains(&s.as_str()) || matches!(s.as_str(), "unit" | "case" | "open")
            }
            _ => false,
        }
    }

    fn prefixed(&mut self) -> PResult<ProofTerm> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.proof_atom(),
        };
        let one: Option<fn(Box<ProofTerm>) -> ProofTerm> = match kw.as_str() {
            "in" => Some(ProofTerm::In),
            "out" => Some(ProofTerm::Out),
            "fst" => Some(ProofTerm::Fst),
            "snd" => Some(ProofTerm::Snd),
            "inl" => Some(ProofTerm::Inl),
            "inr" => Some(ProofTerm::Inr),
            "pack" => Some(ProofTerm::Pack),
            _ => None,
        };
        if let Some(f) = one {
            self.bump();
            return Ok(f(Box::new(self.proof_atom()?)));
        }
        let two: Option<Binary> = match kw.as_str() {
            "MRec" => Some(ProofTerm::MRec),
            "MCoRec" => Some(ProofTerm::MCoRec),
            "MIt" => Some(ProofTerm::MIt),
            "MCoIt" => Some(ProofTerm::MCoIt),
            _ => None,
        };
        if let Some(f) = two {
            self.bump();
            let s = self.proof_atom()?;
            let r = self.proof_atom()?;
            return Ok(f(Box::new(s), Box::new(r)));
        }
        self.proof_atom()
    }

    fn proof_atom(&mut self) -> PResult<ProofTerm> {
        if self.eat_sym("(") {
            let t = self.proof_term()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        if self.eat_sym("<") {
            let a = self.proof_term()?;
            self.expect_sym(",")?;
            let b = self.proof_term()?;
            self.expect_sym(">")?;
            return Ok(ProofTerm::pair(a, b));
        }
        if self.eat_kw("unit") {
            return Ok(ProofTerm::Unit);
        }
        if self.eat_kw("case") {
            self.expect_sym("(")?;
            let r = self.proof_term()?;
            self.expect_sym(",")?;
            let x = self.ident()?;
            self.expect_sym(".")?;
            let s = self.proof_term()?;
            self.expect_sym(",")?;
            let y = self.ident()?;
            self.expect_sym(".")?;
            let t = self.proof_term()?;
            self.expect_sym(")")?;
            return Ok(ProofTerm::Case(Box::new(r), x, Box::new(s), y, Box::new(t)));
        }
        if self.eat_kw("open") {
            self.expect_sym("(")?;
            let t = self.proof_term()?;
            self.expect_sym(",")?;
            let u = self.ident()?;
            self.expect_sym(".")?;
            let r = self.proof_term()?;
            self.expect_sym(")")?;
            return Ok(ProofTerm::Open(Box::new(t), u, Box::new(r)));
        }
        match self.peek() {
            Tok::Ident(s) if !PROOF_KEYWORDS.contains(&s.as_str()) => Ok(ProofTerm::Var(self.ident()?)),
            _ => Err(self.unexpected("a proof term")),
        }
    }
}

trait TokName {
    fn tok_name(&self) -> Name;
}

impl TokName for Token {
    fn tok_name(&self) -> Name {
        match &self.tok {
            Tok::Ident(s) => name(s),
            _ => name("?"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn messages(src: &str) -> Vec<String> {
        parse(src).diagnostics.into_iter().map(|d| d.message).collect()
    }

    #[test]
    fn minimal_file() {
        let p = parse("sig a/0;");
        assert!(p.diagnostics.is_empty());
        assert_eq!(p.file.items.len(), 1);
        assert_eq!(p.file.signature.function_arity("a"), Some(0));
    }

    #[test]
    fn empty_file_is_fine() {
        let p = parse("-- nothing here\n");
        assert!(p.diagnostics.is_empty() && p.file.items.is_empty());
    }

    #[test]
    fn arity_mismatch_is_located() {
        let p = parse("pred P/1;\ntheorem t { 1. var h : P(x, x) }");
        assert_eq!(p.diagnostics.len(), 1);
        assert_eq!(p.diagnostics[0].pos.line, 2);
        assert!(p.diagnostics[0].message.contains("`P` expects 1 argument(s), found 2"));
    }

    #[test]
    fn bare_predicate_variable_needs_arity() {
        let m = messages("theorem t { 1. var h : X(x) 2. imp-i 1 [h] 3. all2-e 2 [X] }");
        assert!(m[0].contains("needs an arity"), "{m:?}");
        assert!(messages("theorem t { 1. var h : X(x) 2. imp-i 1 [h] 3. all2-e 2 [X/1] }").is_empty());
    }

    #[test]
    fn recovers_at_the_next_declaration() {
        let p = parse("sig a/0;\nbogus thing;\npred P/1;\ntheorem t { 1. var h : P(a) }");
        assert_eq!(p.diagnostics.len(), 1);
        assert!(p.diagnostics[0].message.contains("expected a declaration"));
        assert_eq!(p.file.theorems().count(), 1);
        assert_eq!(p.file.signature.predicate_arity("P"), Some(1));
    }

    #[test]
    fn duplicate_and_dangling_names() {
        assert!(messages("sig a/0; sig a/1;")[0].contains("declared twice"));
        assert!(messages("pred P/1; theorem t { 1. var h : P(x) 2. imp-e 1 7 }")[0].contains("no earlier step"));
        assert!(messages("eqs e { } eqs e { }")[0].contains("defined twice"));
    }

    #[test]
    fn macros_expand_with_predicate_arguments() {
        let src = "sig star/0, lf/1;\nlet Unit := x => x = star;\n\
                   let Inl(P/1) := x => exists z. P(z) |> x = lf(z);\n\
                   theorem t { 1. var h : Inl(Unit)(y) 2. var k : Inl(X/1)(y) }";
        let p = parse(src);
        assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
        let th = p.file.theorems().next().unwrap();
        let f = th.steps[0].formula.as_ref().map(|f| f.to_string());
        let shown = match &th.steps[0].payload {
            StepPayload::Kernel(af2m_core::kernel::Payload::Hyp { formula: Some(a), .. }) => a.to_string(),
            _ => f.unwrap_or_default(),
        };
        assert_eq!(shown, "exists z. z = star |> y = lf(z)");
    }

    #[test]
    fn proof_terms() {
        let file = parse("sig a/0;").file;
        let t = parse_proof_term("\\x y. case(x, a. <a, y>, b. open(b, u. MIt u (in unit)))", &file).unwrap();
        assert_eq!(t.to_string(), "\\x y. case(x, a. <a, y>, b. open(b, u. MIt u (in unit)))");
        assert!(parse_proof_term("\\x. x )", &file).is_err());
        assert!(parse_proof_term("fst", &file).is_err());
    }

    #[test]
    fn expectations_and_fuel() {
        let p = parse("fuel 50;\ndef i := \\x. x;\nexpect e : i i ->* i [typed a, b];");
        assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
        assert_eq!(p.file.fuel(), Some(50));
        let e = p.file.expects().next().unwrap();
        assert_eq!(e.typed.as_ref().map(|(a, b)| (a.to_string(), b.to_string())), Some(("a".into(), "b".into())));
    }
}
