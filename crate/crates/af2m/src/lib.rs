//! Surface language, driver and reports for the `af2m` checker.
//!
//! A `.af2` file declares a signature, fixed points and named equation
//! blocks, then gives derivation scripts (`theorem`), proof-term definitions
//! (`def`) and reduction assertions (`expect`). See `corpus/` for examples.

pub mod commands;
pub mod corpus;
pub mod document;
pub mod driver;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod report;

pub use document::{Diagnostic, SourceFile};
pub use driver::{check_source, CheckedFile};
pub use parser::parse;
