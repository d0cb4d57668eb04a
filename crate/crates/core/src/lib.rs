//! Mining of 4-input/1-output Boolean functions from multi-channel voltage
//! recordings, exact sum-of-products minimization, and complexity analysis of
//! the one-dimensional cellular automata those functions induce.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`signal`]: load recordings, cut them into the sixteen input-state
//!    windows using the sync channel, and find peaks outside a symmetric
//!    threshold band.
//! 2. [`mining`]: turn peak reports into [`TruthTable`]s, tally them into a
//!    distribution and build per-run state graphs.
//! 3. [`sop`] and [`minimize`]: parse, evaluate and exactly minimize
//!    sum-of-products expressions over `A`, `B`, `C`, `D`.
//! 4. [`ca`]: compile a function into a radius-2 automaton rule (the cell's
//!    own state is not an input) and evolve it with absorbing boundaries.
//! 5. [`complexity`]: PNG-size and LZ76 complexity, Wolfram-style classes
//!    and count/complexity correlation.
//!
//! Voltage-carrying types are generic over the sample scalar (see
//! [`Sample`]); the aliases below fix it to `f64` or `f32`.

pub mod ca;
pub mod complexity;
pub mod config;
pub mod corpus;
pub mod minimize;
pub mod mining;
pub mod num;
pub mod signal;
pub mod sop;
pub mod truth;

pub use ca::{AttractorInfo, AttractorKind, CaRule, Config, SpaceTime};
pub use complexity::{ComplexityReport, CorrelationResult, WolframClass};
pub use minimize::{canonicalize, minimize, prime_implicants};
pub use mining::{FunctionDistribution, MiningResult, StateGraph};
pub use num::Sample;
pub use sop::{Literal, ParseError, ProductTerm, SopExpr, Var};
pub use truth::TruthTable;

/// Recording with `f64` millivolt samples.
pub type Recording = signal::Recording<f64>;
/// Recording with `f32` millivolt samples.
pub type RecordingF32 = signal::Recording<f32>;
/// Threshold band in `f64` millivolts.
pub type ThresholdBand = signal::ThresholdBand<f64>;
/// Peak report with `f64` excursions.
pub type PeakReport = signal::PeakReport<f64>;
/// Pearson correlation computed in `f64`.
pub type Correlation = complexity::CorrelationResult<f64>;
