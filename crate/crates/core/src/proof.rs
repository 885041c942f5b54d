//! Untyped proof terms.
//!
//! `MRec s r` and the other recursors are stored applied to their argument;
//! the unapplied form is the η-expansion `\x. MRec s x`.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::syntax::{fresh_name, name, Name};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofTerm {
    Var(Name),
    Lam(Name, Box<ProofTerm>),
    App(Box<ProofTerm>, Box<ProofTerm>),
    In(Box<ProofTerm>),
    Out(Box<ProofTerm>),
    MRec(Box<ProofTerm>, Box<ProofTerm>),
    MCoRec(Box<ProofTerm>, Box<ProofTerm>),
    MIt(Box<ProofTerm>, Box<ProofTerm>),
    MCoIt(Box<ProofTerm>, Box<ProofTerm>),
    Pair(Box<ProofTerm>, Box<ProofTerm>),
    Fst(Box<ProofTerm>),
    Snd(Box<ProofTerm>),
    Inl(Box<ProofTerm>),
    Inr(Box<ProofTerm>),
    /// `case(r, x. s, y. t)`
    Case(Box<ProofTerm>, Name, Box<ProofTerm>, Name, Box<ProofTerm>),
    Pack(Box<ProofTerm>),
    /// `open(t, u. r)`
    Open(Box<ProofTerm>, Name, Box<ProofTerm>),
    Unit,
}

use ProofTerm as P;

fn bx(t: ProofTerm) -> Box<ProofTerm> {
    Box::new(t)
}

impl ProofTerm {
    pub fn var(x: &str) -> ProofTerm {
        P::Var(name(x))
    }

    pub fn lam(x: &str, body: ProofTerm) -> ProofTerm {
        P::Lam(name(x), bx(body))
    }

    pub fn lams(xs: &[&str], body: ProofTerm) -> ProofTerm {
        xs.iter().rev().fold(body, |b, x| ProofTerm::lam(x, b))
    }

    pub fn app(f: ProofTerm, a: ProofTerm) -> ProofTerm {
        P::App(bx(f), bx(a))
    }

    pub fn apps(f: ProofTerm, args: Vec<ProofTerm>) -> ProofTerm {
        args.into_iter().fold(f, ProofTerm::app)
    }

    pub fn in_(t: ProofTerm) -> ProofTerm {
        P::In(bx(t))
    }

    pub fn out(t: ProofTerm) -> ProofTerm {
        P::Out(bx(t))
    }

    pub fn mrec(s: ProofTerm, r: ProofTerm) -> ProofTerm {
        P::MRec(bx(s), bx(r))
    }

    pub fn mcorec(s: ProofTerm, r: ProofTerm) -> ProofTerm {
        P::MCoRec(bx(s), bx(r))
    }

    pub fn mit(s: ProofTerm, r: ProofTerm) -> ProofTerm {
        P::MIt(bx(s), bx(r))
    }

    pub fn mcoit(s: ProofTerm, r: ProofTerm) -> ProofTerm {
        P::MCoIt(bx(s), bx(r))
    }

    pub fn pair(a: ProofTerm, b: ProofTerm) -> ProofTerm {
        P::Pair(bx(a), bx(b))
    }

    pub fn case(r: ProofTerm, x: &str, s: ProofTerm, y: &str, t: ProofTerm) -> ProofTerm {
        P::Case(bx(r), name(x), bx(s), name(y), bx(t))
    }

    pub fn open(t: ProofTerm, u: &str, r: ProofTerm) -> ProofTerm {
        P::Open(bx(t), name(u), bx(r))
    }

    /// `\x. K s x` for a recursor former `K`, with `x` fresh for `s`.
    pub fn unapplied(
        s: ProofTerm,
        former: fn(Box<ProofTerm>, Box<ProofTerm>) -> ProofTerm,
    ) -> ProofTerm {
        let fv = s.free_vars();
        let x = fresh_name("x", |c| fv.contains(c));
        P::Lam(x.clone(), bx(former(bx(s), bx(P::Var(x)))))
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&ProofTerm> {
        match self {
            P::Var(_) | P::Unit => Vec::new(),
            P::Lam(_, b) => alloc::vec![&**b],
            P::In(a) | P::Out(a) | P::Fst(a) | P::Snd(a) | P::Inl(a) | P::Inr(a) | P::Pack(a) => {
                alloc::vec![&**a]
            }
            P::App(a, b)
            | P::MRec(a, b)
            | P::MCoRec(a, b)
            | P::MIt(a, b)
            | P::MCoIt(a, b)
            | P::Pair(a, b)
            | P::Open(a, _, b) => alloc::vec![&**a, &**b],
            P::Case(a, _, b, _, c) => alloc::vec![&**a, &**b, &**c],
        }
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            P::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            P::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            P::Case(r, x, s, y, t) => {
                r.collect_free(bound, out);
                bound.push(x.clone());
                s.collect_free(bound, out);
                bound.pop();
                bound.push(y.clone());
                t.collect_free(bound, out);
                bound.pop();
            }
            P::Open(t, u, r) => {
                t.collect_free(bound, out);
                bound.push(u.clone());
                r.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Rebuilds the node with its immediate subterms mapped by `f` (binders kept).
    pub fn map_children(&self, mut f: impl FnMut(&ProofTerm) -> ProofTerm) -> ProofTerm {
        match self {
            P::Var(_) | P::Unit => self.clone(),
            P::Lam(x, b) => P::Lam(x.clone(), bx(f(b))),
            P::App(a, b) => P::App(bx(f(a)), bx(f(b))),
            P::In(a) => P::In(bx(f(a))),
            P::Out(a) => P::Out(bx(f(a))),
            P::MRec(a, b) => P::MRec(bx(f(a)), bx(f(b))),
            P::MCoRec(a, b) => P::MCoRec(bx(f(a)), bx(f(b))),
            P::MIt(a, b) => P::MIt(bx(f(a)), bx(f(b))),
            P::MCoIt(a, b) => P::MCoIt(bx(f(a)), bx(f(b))),
            P::Pair(a, b) => P::Pair(bx(f(a)), bx(f(b))),
            P::Fst(a) => P::Fst(bx(f(a))),
            P::Snd(a) => P::Snd(bx(f(a))),
            P::Inl(a) => P::Inl(bx(f(a))),
            P::Inr(a) => P::Inr(bx(f(a))),
            P::Pack(a) => P::Pack(bx(f(a))),
            P::Case(r, x, s, y, t) => P::Case(bx(f(r)), x.clone(), bx(f(s)), y.clone(), bx(f(t))),
            P::Open(t, u, r) => P::Open(bx(f(t)), u.clone(), bx(f(r))),
        }
    }

    /// `self[x := u]`, renaming binders that would capture free variables of `u`.
    pub fn subst(&self, x: &str, u: &ProofTerm) -> ProofTerm {
        let fv_u = u.free_vars();
        self.subst_inner(x, u, &fv_u)
    }

    fn subst_inner(&self, x: &str, u: &ProofTerm, fv_u: &BTreeSet<Name>) -> ProofTerm {
        match self {
            P::Var(y) if &**y == x => u.clone(),
            P::Var(_) | P::Unit => self.clone(),
            P::Lam(y, b) => {
                let (y, b) = under_binder(y, b, x, u, fv_u);
                P::Lam(y, bx(b))
            }
            P::Case(r, y, s, z, t) => {
                let r = r.subst_inner(x, u, fv_u);
                let (y, s) = under_binder(y, s, x, u, fv_u);
                let (z, t) = under_binder(z, t, x, u, fv_u);
                P::Case(bx(r), y, bx(s), z, bx(t))
            }
            P::Open(t, v, r) => {
                let t = t.subst_inner(x, u, fv_u);
                let (v, r) = under_binder(v, r, x, u, fv_u);
                P::Open(bx(t), v, bx(r))
            }
            _ => self.map_children(|c| c.subst_inner(x, u, fv_u)),
        }
    }

    /// Replaces `MIt s r` by `MRec (\_. s) r` and `MCoIt` likewise.
    pub fn desugar_iteration(&self) -> ProofTerm {
        match self {
            P::MIt(s, r) => P::MRec(bx(weaken(&s.desugar_iteration())), bx(r.desugar_iteration())),
            P::MCoIt(s, r) => {
                P::MCoRec(bx(weaken(&s.desugar_iteration())), bx(r.desugar_iteration()))
            }
            _ => self.map_children(ProofTerm::desugar_iteration),
        }
    }

    pub fn alpha_eq(&self, other: &ProofTerm) -> bool {
        self.canonical() == other.canonical()
    }

    /// Nameless form: bound variables become de Bruijn indices.
    pub fn canonical(&self) -> Canonical {
        to_canonical(self, &mut Vec::new())
    }

    /// Stable 64-bit hash of the α-equivalence class.
    pub fn alpha_hash(&self) -> u64 {
        let mut h = Fnv64::default();
        self.canonical().hash(&mut h);
        h.finish()
    }
}

/// `\v. s` with `v` fresh for `s`.
fn weaken(s: &ProofTerm) -> ProofTerm {
    let fv = s.free_vars();
    let v = fresh_name("_", |c| fv.contains(c));
    P::Lam(v, bx(s.clone()))
}

fn under_binder(
    y: &Name,
    body: &ProofTerm,
    x: &str,
    u: &ProofTerm,
    fv_u: &BTreeSet<Name>,
) -> (Name, ProofTerm) {
    if &**y == x {
        return (y.clone(), body.clone());
    }
    let fv_body = body.free_vars();
    if !fv_body.contains(x) {
        return (y.clone(), body.clone());
    }
    if fv_u.contains(y) {
        let fresh = fresh_name(y, |c| fv_u.contains(c) || fv_body.contains(c) || c == x);
        let renamed = body.subst(y, &P::Var(fresh.clone()));
        (fresh, renamed.subst_inner(x, u, fv_u))
    } else {
        (y.clone(), body.subst_inner(x, u, fv_u))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Canonical {
    Bound(usize),
    Free(Name),
    Node(u8, Vec<Canonical>),
}

fn tag(t: &ProofTerm) -> u8 {
    match t {
        P::Var(_) => 0,
        P::Lam(..) => 1,
        P::App(..) => 2,
        P::In(_) => 3,
        P::Out(_) => 4,
        P::MRec(..) => 5,
        P::MCoRec(..) => 6,
        P::MIt(..) => 7,
        P::MCoIt(..) => 8,
        P::Pair(..) => 9,
        P::Fst(_) => 10,
        P::Snd(_) => 11,
        P::Inl(_) => 12,
        P::Inr(_) => 13,
        P::Case(..) => 14,
        P::Pack(_) => 15,
        P::Open(..) => 16,
        P::Unit => 17,
    }
}

fn to_canonical(t: &ProofTerm, env: &mut Vec<Name>) -> Canonical {
    let under = |b: &ProofTerm, x: &Name, env: &mut Vec<Name>| {
        env.push(x.clone());
        let c = to_canonical(b, env);
        env.pop();
        c
    };
    match t {
        P::Var(x) => match env.iter().rev().position(|y| y == x) {
            Some(i) => Canonical::Bound(i),
            None => Canonical::Free(x.clone()),
        },
        P::Lam(x, b) => Canonical::Node(1, alloc::vec![under(b, x, env)]),
        P::Case(r, x, s, y, u) => {
            let r = to_canonical(r, env);
            let s = under(s, x, env);
            let u = under(u, y, env);
            Canonical::Node(14, alloc::vec![r, s, u])
        }
        P::Open(a, u, r) => {
            let a = to_canonical(a, env);
            let r = under(r, u, env);
            Canonical::Node(16, alloc::vec![a, r])
        }
        _ => Canonical::Node(tag(t), t.children().into_iter().map(|c| to_canonical(c, env)).collect()),
    }
}

/// FNV-1a, used only for the trace hashes.
struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Fnv64 {
        Fnv64(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for Fnv64 {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

// Printing: lambda extends to the right, application and the prefix formers
// take atomic arguments.
fn is_atomic(t: &ProofTerm) -> bool {
    matches!(t, P::Var(_) | P::Unit | P::Pair(..) | P::Case(..) | P::Open(..))
}

fn write_atom(f: &mut fmt::Formatter<'_>, t: &ProofTerm) -> fmt::Result {
    if is_atomic(t) {
        write!(f, "{t}")
    } else {
        write!(f, "({t})")
    }
}

fn write_app_head(f: &mut fmt::Formatter<'_>, t: &ProofTerm) -> fmt::Result {
    if matches!(t, P::App(..)) {
        write!(f, "{t}")
    } else {
        write_atom(f, t)
    }
}

impl fmt::Display for ProofTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix1 = |f: &mut fmt::Formatter<'_>, kw: &str, a: &ProofTerm| {
            write!(f, "{kw} ")?;
            write_atom(f, a)
        };
        let prefix2 = |f: &mut fmt::Formatter<'_>, kw: &str, a: &ProofTerm, b: &ProofTerm| {
            write!(f, "{kw} ")?;
            write_atom(f, a)?;
            write!(f, " ")?;
            write_atom(f, b)
        };
        match self {
            P::Var(x) => write!(f, "{x}"),
            P::Unit => write!(f, "unit"),
            P::Lam(..) => {
                let mut t = self;
                write!(f, "\\")?;
                let mut first = true;
                while let P::Lam(x, b) = t {
                    if !first {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                    first = false;
                    t = b;
                }
                write!(f, ". {t}")
            }
            P::App(a, b) => {
                write_app_head(f, a)?;
                write!(f, " ")?;
                write_atom(f, b)
            }
            P::In(a) => prefix1(f, "in", a),
            P::Out(a) => prefix1(f, "out", a),
            P::Fst(a) => prefix1(f, "fst", a),
            P::Snd(a) => prefix1(f, "snd", a),
            P::Inl(a) => prefix1(f, "inl", a),
            P::Inr(a) => prefix1(f, "inr", a),
            P::Pack(a) => prefix1(f, "pack", a),
            P::MRec(a, b) => prefix2(f, "MRec", a, b),
            P::MCoRec(a, b) => prefix2(f, "MCoRec", a, b),
            P::MIt(a, b) => prefix2(f, "MIt", a, b),
            P::MCoIt(a, b) => prefix2(f, "MCoIt", a, b),
            P::Pair(a, b) => write!(f, "<{a}, {b}>"),
            P::Case(r, x, s, y, t) => write!(f, "case({r}, {x}. {s}, {y}. {t})"),
            P::Open(t, u, r) => write!(f, "open({t}, {u}. {r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn v(x: &str) -> ProofTerm {
        ProofTerm::var(x)
    }

    #[test]
    fn capture_is_avoided() {
        // (\y. x y)[x := y]  must not capture
        let t = ProofTerm::lam("y", ProofTerm::app(v("x"), v("y")));
        let r = t.subst("x", &v("y"));
        assert!(r.free_vars().contains("y"));
        assert!(r.alpha_eq(&ProofTerm::lam("z", ProofTerm::app(v("y"), v("z")))));
    }

    #[test]
    fn shadowing_binders_block_substitution() {
        let t = ProofTerm::case(v("r"), "x", v("x"), "y", v("x"));
        let r = t.subst("x", &ProofTerm::Unit);
        assert_eq!(r, ProofTerm::case(v("r"), "x", v("x"), "y", ProofTerm::Unit));
    }

    #[test]
    fn alpha_hash_ignores_bound_names() {
        let a = ProofTerm::lams(&["x", "y"], ProofTerm::app(v("x"), v("y")));
        let b = ProofTerm::lams(&["p", "q"], ProofTerm::app(v("p"), v("q")));
        let c = ProofTerm::lams(&["p", "q"], ProofTerm::app(v("q"), v("p")));
        assert_eq!(a.alpha_hash(), b.alpha_hash());
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn printing() {
        let s = ProofTerm::lams(&["f", "x"], ProofTerm::app(v("f"), ProofTerm::in_(v("x"))));
        assert_eq!(s.to_string(), "\\f x. f (in x)");
        let t = ProofTerm::out(ProofTerm::mcorec(v("s"), ProofTerm::Unit));
        assert_eq!(t.to_string(), "out (MCoRec s unit)");
        let u = ProofTerm::apps(v("a"), vec![v("b"), ProofTerm::app(v("c"), v("d"))]);
        assert_eq!(u.to_string(), "a b (c d)");
    }

    #[test]
    fn iteration_desugars_to_recursion() {
        let t = ProofTerm::mit(v("s"), v("r"));
        match t.desugar_iteration() {
            P::MRec(s, r) => {
                assert_eq!(*r, v("r"));
                assert!(matches!(*s, P::Lam(ref x, ref b) if **b == v("s") && &**x != "s"));
            }
            other => panic!("unexpected {other}"),
        }
    }
}
