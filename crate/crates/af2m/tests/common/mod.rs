//! Helpers shared by the integration tests: the bundled corpus, checked once
//! per test binary, and a generator of random well-typed theorems.
#![allow(dead_code)]

use std::fmt;
use std::sync::OnceLock;

use af2m::{check_source, corpus, CheckedFile};
use af2m_core::ProofTerm;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn checked_corpus() -> &'static [(&'static str, CheckedFile)] {
    static CELL: OnceLock<Vec<(&'static str, CheckedFile)>> = OnceLock::new();
    CELL.get_or_init(|| corpus::FILES.iter().map(|(n, src)| (*n, check_source(src, None))).collect())
}

pub fn corpus_file(name: &str) -> &'static CheckedFile {
    &checked_corpus().iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no corpus file {name}")).1
}

/// Header of the generated files. N are naturals with zero `suc(star)`; S is
/// a stream of P with the identity as destructor.
pub const RANDOM_HEADER: &str = "\
sig star/0, suc/1, id/1;
pred P/1, Q/1, R/1;
mu N := X/1 => (x => x = star \\/ X(x)) with suc;
nu S := X/1 => (x => P(x) /\\ X(x)) with id;
";

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Atom(&'static str, String),
    Star(String),
    Nat(String),
    Str(String),
    Imp(Box<Ty>, Box<Ty>),
    And(Box<Ty>, Box<Ty>),
    Or(Box<Ty>, Box<Ty>),
    /// Internal lines of a recursion step; never a premise of a random rule.
    Hidden,
}

impl Ty {
    fn atomic(&self) -> bool {
        !matches!(self, Ty::Imp(..) | Ty::And(..) | Ty::Or(..))
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = |f: &mut fmt::Formatter<'_>, t: &Ty| if t.atomic() { write!(f, "{t}") } else { write!(f, "({t})") };
        let bin = |f: &mut fmt::Formatter<'_>, a: &Ty, op: &str, b: &Ty| {
            arg(f, a)?;
            write!(f, " {op} ")?;
            arg(f, b)
        };
        match self {
            Ty::Atom(p, t) => write!(f, "{p}({t})"),
            Ty::Star(t) => write!(f, "{t} = star"),
            Ty::Nat(t) => write!(f, "N({t})"),
            Ty::Str(t) => write!(f, "S({t})"),
            Ty::Imp(a, b) => bin(f, a, "->", b),
            Ty::And(a, b) => bin(f, a, "/\\", b),
            Ty::Or(a, b) => bin(f, a, "\\/", b),
            Ty::Hidden => Ok(()),
        }
    }
}

struct Line {
    body: String,
    ty: Ty,
    stated: bool,
}

struct Gen {
    rng: ChaCha8Rng,
    lines: Vec<Line>,
    hyps: Vec<(String, Ty)>,
    fresh: usize,
}

impl Gen {
    fn push(&mut self, body: String, ty: Ty) -> usize {
        self.lines.push(Line { body, ty, stated: false });
        self.lines.len()
    }

    fn push_stated(&mut self, body: String, ty: Ty) -> usize {
        self.lines.push(Line { body, ty, stated: true });
        self.lines.len()
    }

    fn name(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn atom(&mut self) -> Ty {
        Ty::Atom(["P", "Q", "R"][self.rng.gen_range(0..3)], "x".into())
    }

    fn base_ty(&mut self) -> Ty {
        match self.rng.gen_range(0..6) {
            0 => Ty::Nat("x".into()),
            1 => Ty::Str("x".into()),
            2 => Ty::Imp(Box::new(self.atom()), Box::new(self.atom())),
            _ => self.atom(),
        }
    }

    /// A random visible step satisfying `ok`, as a 1-based label.
    fn pick(&mut self, ok: impl Fn(&Ty) -> bool) -> Option<usize> {
        let c: Vec<usize> = (0..self.lines.len()).filter(|&i| self.lines[i].ty != Ty::Hidden && ok(&self.lines[i].ty)).collect();
        c.choose(&mut self.rng).map(|i| i + 1)
    }

    fn ty(&self, label: usize) -> Ty {
        self.lines[label - 1].ty.clone()
    }

    fn var(&mut self) -> usize {
        let ty = self.base_ty();
        let h = self.name("h");
        self.hyps.push((h.clone(), ty.clone()));
        self.push_stated(format!("var {h} : {ty}"), ty)
    }

    /// One random rule application; false when the chosen rule does not apply.
    fn op(&mut self) -> bool {
        match self.rng.gen_range(0..11) {
            0 => {
                self.var();
            }
            1 | 2 => {
                let Some(e) = self.pick(|_| true) else { return false };
                let Some((h, a)) = self.hyps.choose(&mut self.rng).cloned() else { return false };
                let ty = Ty::Imp(Box::new(a.clone()), Box::new(self.ty(e)));
                self.push(format!("imp-i {e} [{h} : {a}]"), ty);
            }
            3 | 4 => {
                let vis: Vec<usize> = (0..self.lines.len()).filter(|&i| self.lines[i].ty != Ty::Hidden).collect();
                let pairs: Vec<(usize, usize)> = vis
                    .iter()
                    .flat_map(|&f| vis.iter().map(move |&a| (f, a)))
                    .filter(|&(f, a)| matches!(&self.lines[f].ty, Ty::Imp(x, _) if **x == self.lines[a].ty))
                    .collect();
                let Some(&(f, a)) = pairs.choose(&mut self.rng) else { return false };
                let Ty::Imp(_, b) = self.lines[f].ty.clone() else { unreachable!() };
                self.push(format!("imp-e {} {}", f + 1, a + 1), *b);
            }
            5 => {
                let (Some(a), Some(b)) = (self.pick(|_| true), self.pick(|_| true)) else { return false };
                let ty = Ty::And(Box::new(self.ty(a)), Box::new(self.ty(b)));
                self.push(format!("and-i {a} {b}"), ty);
            }
            6 => {
                let Some(p) = self.pick(|t| matches!(t, Ty::And(..))) else { return false };
                let Ty::And(a, b) = self.ty(p) else { unreachable!() };
                let (rule, ty) = if self.rng.gen() { ("and-el", *a) } else { ("and-er", *b) };
                self.push(format!("{rule} {p}"), ty);
            }
            7 => {
                let Some(p) = self.pick(|_| true) else { return false };
                let other = self.base_ty();
                let (rule, ty) = if self.rng.gen() {
                    ("or-il", Ty::Or(Box::new(self.ty(p)), Box::new(other)))
                } else {
                    ("or-ir", Ty::Or(Box::new(other), Box::new(self.ty(p))))
                };
                self.push(format!("{rule} {p}"), ty);
            }
            8 => self.numeral(),
            9 => {
                let Some(p) = self.pick(|t| matches!(t, Ty::Str(_))) else { return false };
                let Ty::Str(t) = self.ty(p) else { unreachable!() };
                let d = format!("id({t})");
                let ty = Ty::And(Box::new(Ty::Atom("P", d.clone())), Box::new(Ty::Str(d)));
                self.push(format!("nu-e {p}"), ty);
            }
            _ => return self.iteration(),
        }
        true
    }

    /// Zero, or a successor of something already known to be a natural.
    fn numeral(&mut self) {
        let nat = self.pick(|t| matches!(t, Ty::Nat(_)));
        let (prem, t, rule) = match nat {
            Some(n) if self.rng.gen_bool(0.7) => {
                let Ty::Nat(t) = self.ty(n) else { unreachable!() };
                (n, t, "or-ir")
            }
            _ => {
                let e = self.push("eq-ax [star = star]".into(), Ty::Star("star".into()));
                (e, "star".to_string(), "or-il")
            }
        };
        let phi = Ty::Or(Box::new(Ty::Star(t.clone())), Box::new(Ty::Nat(t.clone())));
        let p = self.push(format!("{rule} {prem}"), phi);
        self.push(format!("mu-i {p} [N ; {t}]"), Ty::Nat(format!("suc({t})")));
    }

    /// `MIt s r` with a constant step or one that recurses on the
    /// predecessor. The motive is the type of an existing step.
    fn iteration(&mut self) -> bool {
        let Some(r) = self.pick(|t| matches!(t, Ty::Nat(_))) else { return false };
        let Some(q) = self.pick(|_| true) else { return false };
        let b = self.ty(q);
        let (f, v) = (self.name("f"), self.name("v"));
        let hyp_f = format!("{f} : forall y. X(y) -> {b}");
        let hyp_v = format!("{v} : y = star \\/ X(y)");
        let body = if self.rng.gen() {
            q
        } else {
            let (a, w) = (self.name("a"), self.name("w"));
            let fv = self.push(format!("var {hyp_f}"), Ty::Hidden);
            let fy = self.push(format!("all-e {fv} [y]"), Ty::Hidden);
            let wv = self.push(format!("var {w} : X(y)"), Ty::Hidden);
            let rec = self.push(format!("imp-e {fy} {wv} : {b}"), Ty::Hidden);
            let vv = self.push(format!("var {hyp_v}"), Ty::Hidden);
            self.push(format!("or-e {vv} {q} {rec} [{a}, {w}] : {b}"), Ty::Hidden)
        };
        let i = self.push(format!("imp-i {body} [{hyp_v}]"), Ty::Hidden);
        let g = self.push(format!("all-i {i} [y]"), Ty::Hidden);
        let h = self.push(format!("imp-i {g} [{hyp_f}]"), Ty::Hidden);
        let s = self.push(format!("all2-i {h} [X/1]"), Ty::Hidden);
        self.push(format!("mit {s} {r} [y => {b} ; y => y]"), b);
        true
    }
}

/// `count` random theorems `t0, t1, ...` in surface syntax, each with up to
/// `ops` rule applications after a first hypothesis. Every visible step
/// states the type the generator expects, so the kernel checks the
/// generator's bookkeeping as well.
pub fn random_theorems(seed: u64, count: usize, ops: usize) -> String {
    let mut out = String::from(RANDOM_HEADER);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(rng.gen()), lines: Vec::new(), hyps: Vec::new(), fresh: 0 };
        g.var();
        let n = g.rng.gen_range(1..=ops);
        let (mut done, mut tries) = (0, 0);
        while done < n && tries < 20 * ops {
            tries += 1;
            if g.op() {
                done += 1;
            }
        }
        out.push_str(&format!("theorem t{k} {{\n"));
        for (i, l) in g.lines.iter().enumerate() {
            if l.stated || l.ty == Ty::Hidden {
                out.push_str(&format!("  {}. {}\n", i + 1, l.body));
            } else {
                out.push_str(&format!("  {}. {} : {}\n", i + 1, l.body, l.ty));
            }
        }
        out.push_str("}\n");
    }
    out
}

/// An arbitrary, usually ill-typed, proof term over the variables x, y, z.
pub fn random_term<R: Rng>(rng: &mut R, depth: usize) -> ProofTerm {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            3 => ProofTerm::Unit,
            i => ProofTerm::var(NAMES[i]),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..14) {
        0 | 1 => {
            let x = NAMES[rng.gen_range(0..3)];
            ProofTerm::lam(x, random_term(rng, d))
        }
        2..=4 => ProofTerm::app(random_term(rng, d), random_term(rng, d)),
        5 => ProofTerm::in_(random_term(rng, d)),
        6 => ProofTerm::out(random_term(rng, d)),
        7 => ProofTerm::mrec(random_term(rng, d), random_term(rng, d)),
        8 => ProofTerm::mcorec(random_term(rng, d), random_term(rng, d)),
        9 => ProofTerm::mit(random_term(rng, d), random_term(rng, d)),
        10 => ProofTerm::mcoit(random_term(rng, d), random_term(rng, d)),
        11 => ProofTerm::pair(random_term(rng, d), random_term(rng, d)),
        12 => ProofTerm::Fst(Box::new(random_term(rng, d))),
        _ => {
            let (x, y) = (NAMES[rng.gen_range(0..3)], NAMES[rng.gen_range(0..3)]);
            let r = random_term(rng, d);
            ProofTerm::case(r, x, random_term(rng, d), y, random_term(rng, d))
        }
    }
}
