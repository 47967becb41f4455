//! Positive-P simulation of quadrature squeezing of ultrashort pulses by
//! self-induced transparency in mercury vapour filling a hollow-core fiber.
//!
//! The crate is organised bottom-up:
//!
//! * [`atomic_data`], [`lineshape`], [`rates`]: the gas and its lines.
//! * [`field`]: grid, soliton input and pulse diagnostics.
//! * [`sde`]: the stochastic Maxwell–Bloch integrator.
//! * [`ensemble`], [`measurement`]: trajectory ensembles, homodyne moments and
//!   squeezing surfaces and scans.
//! * [`scans`]: detuning and pressure scans.
//! * [`config`], [`output`], [`plot`], [`run`]: the command-line workflow.

pub mod atomic_data;
pub mod config;
pub mod constants;
pub mod ensemble;
pub mod error;
pub mod field;
pub mod lineshape;
pub mod measurement;
pub mod output;
pub mod plot;
pub mod rates;
pub mod rng;
pub mod run;
pub mod scans;
pub mod scenario;
pub mod sde;

pub use error::{Error, Result};
