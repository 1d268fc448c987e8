//! Propulsion energy simulation for UAVs serving as flying access points.
//!
//! The crate models two airframe types (rotary-wing and fixed-wing), optimizes
//! per-segment cruise speeds along closed trajectories, and plans multi-FAP
//! deployments over ground-user scenarios: link budget and MCS capacity,
//! minimum-FAP grouping, coverage-sphere intersection areas, and selection of
//! the most energy-efficient trajectory per FAP and UAV type.

pub mod config;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod io;
pub mod planner;
pub mod radio;
pub mod scenario;
pub mod trajectory;

pub use error::{Error, Result};
