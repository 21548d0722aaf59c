//! Reverse-sampling design of shell-and-tube heat exchangers.
//!
//! Instead of optimizing a single design, the library samples the space of
//! designs whose rated heat-transfer area and pumping power match given
//! targets: a Bell–Delaware thermal-hydraulic model rates each candidate,
//! a delayed-rejection adaptive-Metropolis (DRAM) chain explores the
//! posterior over the seven design variables, and a decision stage
//! summarizes the chain and picks the design with the lowest total annual
//! cost.

pub mod config;
pub mod cost;
pub mod decision;
pub mod dram;
pub mod error;
pub mod pipeline;
pub mod posterior;
pub mod thermo;

pub use config::RunConfig;
pub use error::{DecisionError, ModelError, PipelineError, SamplerError};
pub use pipeline::{evaluate_design, run, DesignReport, RunOutcome};
pub use thermo::{size_exchanger, CaseSpec, DesignVector, LayoutConfig, SizingResult};
