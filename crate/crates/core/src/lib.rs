//! Coded caching for users that each place several requests at once.
//!
//! The crate covers the whole pipeline for a single server and `n` caching
//! users:
//!
//! * [`model`]: system parameters, the combinatorial packet placement and
//!   request matrices.
//! * [`conflict`]: the directed conflict graph over (packet, requester) pairs.
//! * [`coloring`]: the directed local chromatic number (exact search, a 0/1
//!   program over independent sets and its LP relaxation) plus a greedy
//!   heuristic.
//! * [`codec`]: GF(2^q) arithmetic, Vandermonde MDS generators, multicast
//!   encoding and per-user Gaussian-elimination decoding.
//! * [`bounds`]: closed-form achievable rates, the cut-set converse and gap
//!   reports.
//! * [`sweep`]: worst-case demand enumeration up to user and file symmetry,
//!   run in parallel when the `parallel` feature is enabled.
//!
//! All rates are exact rationals.

pub mod bounds;
pub mod codec;
pub mod coloring;
pub mod conflict;
mod error;
pub mod formats;
pub mod lp;
pub mod model;
pub mod rational;
pub mod sweep;

pub use error::{Error, Result};
pub use rational::Rational;
