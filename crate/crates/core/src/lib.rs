//! Percolation laboratory for the bunkbed conjecture.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds the weighted graphs, bunkbed instances, 3-uniform
//!   hypergraphs and the deterministic builders (fan gadget, Hollom's
//!   hypergraph, gadget substitution, clone construction) plus the
//!   edge-list and graph6 formats.
//! * [`exact`] computes connection probabilities by exhaustive subset
//!   enumeration and provides the closed forms for the fan gadget kernel.
//! * [`hyper`] evaluates the two hypergraph percolation models on bunkbed
//!   hypergraphs, exactly or with certified interval bounds.
//! * [`analysis`] ties the engines into gap reports, gap polynomials and the
//!   exhaustive small-graph scan.
//! * [`montecarlo`] holds the seeded samplers.
//! * [`verify`] runs the reproduction checklist used by the acceptance suite
//!   and the `verify-paper` command.

pub mod analysis;
pub mod certified;
pub mod dsu;
pub mod error;
pub mod exact;
pub mod graph;
pub mod hyper;
pub mod montecarlo;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
