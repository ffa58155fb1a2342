//! Deterministic simultaneous number-on-the-forehead protocols for
//! symmetric composed functions.
//!
//! A `k × n` matrix over `Z_d` is distributed so that player `i` sees every
//! row except row `i`. Each player sends one message to a referee, who sees
//! nothing else. The crate simulates that model with exact bit accounting and
//! implements:
//!
//! * the equation-solving protocol for symmetric-of-symmetric functions
//!   ([`eqsolve`]), whose referee reconstructs column-type counts from their
//!   one-row-deletion deck ([`deck`]);
//! * the full protocol for distinct symmetric inner functions ([`composed`]),
//!   built on the monomial symmetric basis over `F_p` ([`symfun`]);
//! * the named functions GIP, DISJ, MAJ∘MAJ_t, MAJ∘THR^s_t and a direct
//!   evaluator ([`zoo`]).

pub mod comb;
pub mod composed;
pub mod deck;
pub mod eqsolve;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod smp;
pub mod symfun;
pub mod zoo;

pub use error::{Error, Result};
