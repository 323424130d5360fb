//! Machine teaching of bounded (F,G)-fragment temporal logic formulas.
//!
//! A teacher synthesizes labeled finite trajectories that drive a
//! preference-based version-space learner to a target formula. The crate
//! covers the formula language and its strong/weak finite-trace semantics,
//! learner models, the integer-programming demonstration synthesizer with
//! its baselines, and the concrete state domains used in experiments.

pub mod analysis;
pub mod domains;
pub mod formula;
pub mod learner;
pub mod parse;
pub mod semantics;
pub mod teacher;

pub use formula::{AtomicPredicate, DemoLabel, Formula, State, Symbol, TemporalOp};
pub use semantics::{Demonstration, Trajectory, Verdict};
