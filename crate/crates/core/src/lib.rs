//! Simulator for ConvNet inference on a network of smart memory cubes.
//!
//! The crate is organized around the pipeline an experiment follows:
//!
//! * [`model`] — network descriptors, shape inference, MAC and storage
//!   accounting.
//! * [`tiling`] — 4D tile grids with halos, DRAM write plans, per-tile cost
//!   accounting and the tile-dimension search.
//! * [`nst`] — a value-accurate model of the NeuroStream coprocessor plus the
//!   golden layer oracle it is checked against.
//! * [`cluster`] — cycle-approximate simulation of one processing cluster
//!   (SPM bank conflicts, command issue, DMA) and the efficiency-table
//!   calibration used by the epoch simulator.
//! * [`smc`] — epoch-based simulation of a full network on one cube:
//!   time breakdown, roofline, energy and training estimates.
//! * [`mesh`] — multi-cube streaming with serial-link power states.

pub mod cluster;
pub mod mesh;
pub mod model;
pub mod nst;
pub mod smc;
pub mod tiling;

pub use model::{NetworkDescriptor, Shape3D, ShapedNetwork};
pub use smc::SimReport;
