//! Constructive experiments around Danzer sets.
//!
//! A Danzer set meets every convex set of some fixed volume. This crate grows
//! explicit convex witnesses showing that such a set must put arbitrarily many
//! points into convex sets of fixed volume (or returns an explicit empty convex
//! region proving the candidate is not Danzer), stress-tests ε-nets for convex
//! ranges, and provides the finite-window Chabauty–Fell machinery used to
//! study orbits of closed sets under volume-preserving affine maps.
//!
//! Modules:
//! - [`geometry`]: ellipsoids, unimodular affine maps, MVEE.
//! - [`pointset`]: point sets presented as region oracles.
//! - [`witness`]: the witness-growing algorithms and the ε-net stress test.
//! - [`chabauty`]: windowed closed sets, the Chabauty–Fell distance, group
//!   actions and the line-building procedure.
//! - [`harness`]: configs, experiment drivers and result emission.

pub mod chabauty;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod par;
pub mod pointset;
pub mod witness;

pub use error::{Error, Result};
pub use par::Exec;

/// Version tag written into every emitted document.
pub const FORMAT_VERSION: &str = "1.0";
