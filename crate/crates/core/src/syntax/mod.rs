//! Object language: first-order terms, predicates (including comprehension and
//! μ/ν fixed points of predicate transformers) and formulas.
//!
//! Binders use names. Substitution renames binders on demand so it is
//! capture-avoiding, and [`alpha_eq`] decides equality up to bound names.

mod alpha;
mod display;
mod formula;
mod signature;
mod term;

use alloc::format;
use alloc::sync::Arc;

pub use alpha::{alpha_eq, pred_alpha_eq, transformer_alpha_eq};
pub use formula::{
    apply_comprehension, apply_transformer, subst_formula_obj, subst_formula_pred, FixKind,
    FixPoint, Formula, Pred, Transformer, EQUATION_VAR,
};
pub use signature::{Signature, SyntaxError};
pub use term::{subst_obj, Subst, Term, UnaryFn};

/// Identifier shared by every syntactic category.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Returns `base` or the first `base'`, `base''`, `base1`... rejected by `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let stem = base.trim_end_matches('\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    if !taken(base) {
        return name(base);
    }
    let primed = format!("{stem}'");
    if !taken(&primed) {
        return name(&primed);
    }
    let mut i = 1usize;
    loop {
        let candidate = format!("{stem}{i}");
        if !taken(&candidate) {
            return name(&candidate);
        }
        i += 1;
    }
}
