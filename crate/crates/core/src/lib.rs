//! Presentations of maximal subgroups of free idempotent generated
//! semigroups over `T_n` and `PT_n`, and their identification.

pub mod cli;
pub mod dclass;
pub mod error;
pub mod groupid;
pub mod perm;
pub mod presentation;
pub mod ptrans;
pub mod schreier;
pub mod squares;

pub use error::{Error, Result};
