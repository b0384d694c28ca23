//! Object-goal navigation over an incrementally observed landmark map.
//!
//! The crate simulates a robot searching a large multi-room workspace for a
//! single target object. Two geometric sensors feed a belief map: a
//! long-range landmark detector and a short-range target detector. Planners
//! decide where to go next:
//!
//! * [`planners::PlannerKind::Moon`] rebuilds a navigation graph whenever the
//!   landmark map grows and solves a set orienteering problem over it
//!   ([`sop`]), trading exploitation of known landmarks against exploration
//!   of frontier regions.
//! * [`planners::PlannerKind::Frontier`] is the classical nearest-frontier
//!   explorer that ignores landmarks.
//! * [`planners::PlannerKind::TspLandmarks`] tours every known landmark with
//!   a nearest-neighbour + 2-opt path.
//!
//! [`harness`] batches seeded trials and scores them with Success weighted
//! by Path Length. [`moo`] layers scalarization, epsilon-constraint and
//! Pareto enumeration on top of the exact solver.

pub mod grid;
pub mod harness;
pub mod moo;
pub mod navgraph;
pub mod par;
pub mod planners;
pub mod sensing;
pub mod sop;
pub mod world;

pub use grid::Cell;
pub use navgraph::{CostMatrix, SopInstance};
pub use par::Execution;
pub use sop::SopSolution;
pub use world::{Pose, Workspace};
