//! Periodic 3D trajectory design for drone cells (DCs) relaying IoT uplink
//! data to a single base station.
//!
//! The joint design problem couples binary user association and TDMA slot
//! scheduling with continuous horizontal and vertical trajectories. It is
//! solved by block-coordinate descent over four exactly-solved blocks:
//!
//! - [`assign`]: association and scheduling integer programs, solved as
//!   min-cost flows, plus brute-force reference solvers;
//! - [`traj`]: per-slot horizontal projection and per-slot altitude search;
//! - [`bcd`]: the outer descent loop;
//! - [`baseline`]: a static hover-position baseline (per-drone iterated PSO).
//!
//! [`channel`] evaluates the air-to-ground and drone-to-BS pathloss models,
//! [`model`] holds scenarios, solutions and constraint checks, and
//! [`metrics`] computes the per-user statistics used for comparisons.

pub mod assign;
pub mod baseline;
pub mod bcd;
pub mod channel;
mod error;
pub mod geom;
pub mod metrics;
pub mod model;
pub mod traj;

pub use error::{Error, Result};
