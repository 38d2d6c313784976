//! Interaction-free measurement on a Mach-Zehnder interferometer.
//!
//! The crate is organized bottom-up:
//!
//! - [`fock`]: truncated Fock-space oracle for the two-mode rotation `V(α)`
//! - [`optics`]: Householder reflections, port matrices, packet overlap
//! - [`interferometer`]: layouts, branch propagation, shot sampling, fringes
//! - [`soft`]: low-energy photon emission statistics and detector pollution
//! - [`dsl`]: the `.ifm` layout text format
//! - [`cli`]: the `ifm` command line and its JSON/CSV outputs

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dsl;
pub mod expm;
pub mod fock;
pub mod interferometer;
pub mod optics;
pub mod soft;
pub mod verify;

pub use interferometer::{propagate_analytic, run_shots, DetectionReport, Layout};
