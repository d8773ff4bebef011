//! Core library of the `coplan` toolkit: agent-aware action costing,
//! capability maps, a cost-metric PDDL subset, and a cost-optimal planner
//! with a partial-order schedule lift.
//!
//! The crate is `no_std` (alloc only); everything here is a pure function
//! of its inputs. File IO and the command line live in the `coplan` binary
//! crate.
//!
//! The pipeline, end to end:
//!
//! 1. [`scenario`] ingests a declarative description of a collaborative
//!    cell (agents, parts, locations, paths, gains) or provides the
//!    built-in desk assembly benchmark.
//! 2. [`cost`] evaluates feasibility, reachability, safety and cooperation
//!    terms for every (agent, action, parameter) combination, producing a
//!    cost table on the extended non-negative reals.
//! 3. [`pddl`] compiles the scenario into a typed STRIPS domain/problem
//!    pair with numeric cost fluents and grounds it, dropping
//!    infinite-cost instantiations.
//! 4. [`planner`] runs cost-optimal forward search, lifts the sequential
//!    plan to a partial order, and schedules it into a timed plan.
//!
//! [`capability`] computes reachability indices over a discretized
//! workspace from a pluggable reachability oracle and classifies regions.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod capability;
pub mod cost;
pub mod model;
pub mod pddl;
pub mod planner;
pub mod scenario;

pub mod rng;

pub use cost::ExtCost;
pub use model::Point3;
