//! Symbolic engine for the join product on `H_*(BG; F_p)` and the
//! lower-indexed Dyer-Lashof operations acting on it.
//!
//! The crate is organised bottom-up:
//!
//! - [`fp`]: prime-field scalars and binomial coefficients mod `p`.
//! - [`algebra`]: graded elements, generator families and join-product tables.
//! - [`dyer_lashof`]: operation words, admissibility and Adem rewriting.
//! - [`module`]: concrete module structures (the `S^1`, `p = 2` action) and
//!   word application.
//! - [`verify`]: exhaustive relation checks producing [`verify::VerificationReport`]s.
//! - [`solver`]: exact linear algebra over `F_p` searching for product tables
//!   compatible with the Cartan formula.
//! - [`schema`]: the JSON file formats.

pub mod algebra;
pub mod dyer_lashof;
pub mod error;
pub mod fp;
pub mod linalg;
pub mod module;
pub mod schema;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
