//! Profile-vector coding for DNA storage.
//!
//! A word over the alphabet `{0, .., q-1}` is observed only through the
//! multiset of its length-`ell` substrings (its *profile*). This crate
//! provides the pieces needed to reason about and build codes for that
//! channel:
//!
//! - [`word`]: words, minimum periods, roots, rotations, Lyndon words.
//! - [`profile`]: gram profiles, profile equivalence, de Bruijn predicates.
//! - [`enumeration`]: exact counts, lower and upper bounds, rate sweeps,
//!   brute-force oracles.
//! - [`prefix_code`]: the short-word family (`ell <= n < 2 ell`) with a
//!   one-symbol redundancy.
//! - [`address`]: address-marked block codes.
//! - [`assembly`]: the lossy read channel and the assembler for addressable
//!   codewords.
//!
//! Batch workloads (oracles, censuses, sweeps, assembly trials) take an
//! [`Exec`] selector; with the default `parallel` feature they run on rayon.

pub mod address;
pub mod assembly;
pub mod enumeration;
mod error;
pub mod exec;
pub mod prefix_code;
pub mod profile;
pub mod word;

pub use error::{Error, Result};
pub use exec::Exec;
pub use word::Word;
