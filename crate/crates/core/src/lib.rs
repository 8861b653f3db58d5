//! Constraint-based causal discovery with latent confounders.
//!
//! The crate learns partial ancestral graphs (PAGs) from conditional
//! independence (CI) tests. Two learners share one orientation engine and
//! one CI-test cache:
//!
//! * [`icd::icd_main`], the iterative learner, which grows the conditioning
//!   set size by one per iteration and returns a sound PAG after each.
//! * [`fci::fci`], the classic baseline.
//!
//! CI tests come either from a perfect d-separation oracle
//! ([`oracle::DSepOracle`]) or from Fisher's z-test on Gaussian data
//! ([`citest::FisherZ`]). [`simgen`] draws random benchmark instances and
//! [`experiment`] runs and reports full benchmarks.

pub mod citest;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod fci;
pub mod graph;
pub mod icd;
pub mod oracle;
pub mod orientation;
mod pds;
pub mod simgen;

pub use error::{Error, Result};
