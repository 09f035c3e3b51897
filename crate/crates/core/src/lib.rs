//! Weak-label refinement with a promptable instance-mask oracle.
//!
//! Sparse or coarse semantic labels are split into connected instances,
//! each instance is prompted with points drawn from its distance field on a
//! uniform grid, and one of the oracle's three candidate masks is kept based
//! on how well it agrees with the weak label. The result is fused with the
//! weak labels and confident pseudo-labels into a per-pixel supervision map.

pub mod ablate;
pub mod config;
pub mod cost;
pub mod fusion;
pub mod metrics;
pub mod oracle;
pub mod raster;
pub mod refine;
pub mod sampling;
pub mod selection;
pub mod suite;
