//! Two-phase resilient resource allocation for C-V2X networks with unknown
//! imperfect CSI.
//!
//! An absorption phase holds powers and the V2I/V2V matching fixed while it
//! collects samples of the interference-CSI error and estimates its density
//! by deconvolution. An adaptation phase then sets per-slot powers from that
//! estimate. The crate also carries two benchmark allocators and a Monte
//! Carlo harness.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too, and
// per-link loops index several parallel arrays by the pair number.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod absorption;
pub mod adaptation;
pub mod baselines;
pub mod channel;
pub mod config;
pub mod error;
pub mod harness;
pub mod hungarian;
pub mod qos;
pub mod quad;
pub mod rng;
pub mod scenario;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
