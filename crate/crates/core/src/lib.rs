//! Set-based decomposition of functional requirements.
//!
//! A top-level requirement maps input ranges to output ranges. An
//! architecture of sub-functions implements it. This crate classifies the
//! architecture's variables, narrows the design space until simulated outputs
//! stay inside the admissible performance space, trades off range margins
//! between producers and consumers, and emits one sub-requirement per
//! sub-function that provably composes back into the top-level requirement.

pub mod architecture;
pub mod error;
pub mod expr;
pub mod intervals;
pub mod narrowing;
pub mod pipeline;
pub mod requirements;
pub mod simulation;
pub mod tradeoff;

pub use error::{Error, Result};
