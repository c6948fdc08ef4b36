//! Beliefs conditioned on trusted data: formula syntax, finite models, two
//! model-checking engines, a Hilbert-style proof checker and randomized
//! property suites.

pub mod checker;
pub mod cli;
pub mod harness;
pub mod model;
pub mod proofs;
pub mod syntax;
