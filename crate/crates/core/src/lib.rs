//! Heegner-point rank diagnostics for the congruent-number twists `Dy^2 = x^3 - x`.
//!
//! The pipeline: [`curves`] classifies `D`, [`heegner`] builds the trace of CM points
//! on X0(32) or X0(64) and measures its distance to 2-torsion, and the independent
//! tools in [`search`], [`descent`] and [`tunnell`] confirm or bound the rank.
//! [`pipeline`] drives scans with checkpointing.

pub mod arith;
pub mod curves;
pub mod descent;
pub mod error;
pub mod heegner;
pub mod hp;
pub mod modform;
pub mod pipeline;
pub mod search;
pub mod torus;
pub mod tunnell;

pub use error::{Error, Result};
