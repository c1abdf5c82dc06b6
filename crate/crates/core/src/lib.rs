//! Swap-test interferometry on bosonic modes: closed-form witnesses and Fisher
//! information, a gate-level simulator, and open-system engines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod cqed;
pub mod error;
pub mod fock;
pub mod gatesim;
pub mod lindblad;
pub mod runner;
pub mod sweep;
pub mod toymodel;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
