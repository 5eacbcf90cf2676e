//! # tuberrt
//!
//! Two-stage trajectory planning for a rigid payload carried by several UAVs
//! on cables.
//!
//! Stage I searches a collision-free *virtual tube* through a dense 3-D
//! obstacle field with an enhanced Tube-RRT*: Thompson-sampled Voronoi
//! subregions drive sampling ([`sampler`]), a superquadric potential field and
//! adaptive step sizing drive tree growth ([`extend`]), and a composite
//! length-plus-turning cost drives parent selection and rewiring
//! ([`planner`]).
//!
//! Stage II turns the waypoint path into a piecewise-polynomial payload
//! trajectory and jointly optimizes the cable tension vectors in one convex
//! conic program ([`trajopt`]); [`dynmodel`] audits the result.
//!
//! [`bench`] runs seeded multi-variant ablations and aggregates the metrics.
//!
//! ## Modules
//!
//! - [`env`]: workspace, box obstacles, clearance and density queries
//! - [`sampler`]: Bayesian active subregion sampling
//! - [`extend`]: potential-guided adaptive tree expansion
//! - [`planner`]: the Tube-RRT* loop and its ablation variants
//! - [`trajopt`]: spline + tension conic program
//! - [`dynmodel`]: system parameters, force/moment bookkeeping, verification
//! - [`bench`]: ablation harness and environment generation
//! - [`config`]: JSON pipeline configuration
//! - [`cli`]: the `tuberrt` command-line tool

pub mod bench;
pub mod cli;
pub mod config;
pub mod dynmodel;
pub mod env;
pub mod error;
pub mod extend;
pub mod planner;
pub mod sampler;
pub mod trajopt;

pub use error::{Error, Result};

/// 3-vector of `f64`, used for positions, directions, forces and moments.
pub type Vec3 = nalgebra::Vector3<f64>;

/// 3x3 matrix of `f64`.
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Standard gravity [m/s²].
pub const GRAVITY: f64 = 9.81;
