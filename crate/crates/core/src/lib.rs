//! Proof kernel and proof-term evaluator for second-order logic extended with
//! Mendler-style iso-(co)inductive predicates.
//!
//! The crate is `no_std` (it only needs `alloc`) and is split into:
//!
//! * [`syntax`]: object terms, predicates, formulas, substitution and
//!   α-equivalence.
//! * [`equational`]: derivations of `E |> r = s` with replayable evidence.
//! * [`proof`]: untyped proof terms (Curry-style λ-terms with `in`, `out`,
//!   `MRec`, `MCoRec` and the derived formers).
//! * [`kernel`]: the checker for derivation scripts; it extracts the proof term.
//! * [`reduction`]: one-step, weak-head and normalizing reduction, the
//!   inductive strong-normalization certifier and an exhaustive oracle.
//! * [`lattice`]: finite complete lattices and brute-force checks of the
//!   (co)induction principles behind the (co)inductive rules.

#![no_std]

extern crate alloc;

pub mod equational;
pub mod kernel;
pub mod lattice;
pub mod proof;
pub mod reduction;
pub mod syntax;

pub use kernel::{check_script, CheckedJudgment, DerivationScript, KernelError, Rule, Step};
pub use proof::ProofTerm;
pub use syntax::{Formula, Name, Pred, Signature, Term};
