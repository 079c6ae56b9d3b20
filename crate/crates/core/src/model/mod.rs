//! Scenario and solution data model.
//!
//! The base station sits at the origin of the plane. All indices (users,
//! DCs, slots) are zero-based; slot `num_slots - 1` wraps to slot `0`.

mod eval;
mod init;
pub mod io;
mod scenario;
mod solution;
mod validate;

pub use eval::{evaluate_objective, slot_pathloss};
pub use init::{initial_schedule, initial_trajectories};
pub use scenario::{generate_scenario, Scenario, ScenarioOverrides, SCHEMA_VERSION};
pub use solution::{Association, IterationRecord, Schedule, ScheduleFill, Solution, Trajectory};
pub use validate::{validate_solution, Constraint, Violation};
