#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod counting;
pub mod error;
pub mod errorfit;
pub mod explicit;
pub mod grid;
pub mod logint;
pub mod mertens;
pub mod par;
pub mod report;
pub mod scan;
pub mod shortint;
pub mod sieve;
pub mod sum;

pub use error::{LabError, Result};
