//! Exact q-expansions of modular functions over cyclotomic fields, with
//! finite-window checks of Kronecker-type congruences.

pub mod arith;
pub mod cli;
pub mod cyclotomic;
pub mod error;
pub mod jreduce;
pub mod kronecker;
pub mod modforms;
pub mod qseries;
pub mod transform;
pub mod valuation;

pub use cyclotomic::CycNumber;
pub use error::{Error, Result};
pub use qseries::QSeries;
