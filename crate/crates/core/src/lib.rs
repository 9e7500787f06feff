//! Lattice Boltzmann solver for two-dimensional linear elastodynamics.
//!
//! The D2Q9 scheme evolves distribution functions whose moments are the
//! density `ρ`, the momentum density `j` and the Poisson stress
//! `P = -σ + (λ-μ)(div u) I`. Walls may cut lattice links anywhere:
//! displacement (Dirichlet) and traction (Neumann) conditions are imposed by
//! interpolated bounce-back and anti-bounce-back rules, which reduce to the
//! half-way rules when the wall sits midway along the link.
//!
//! Module map:
//!
//! - [`lattice`], [`material`], [`fields`]: velocity set, Lamé parameters,
//!   storage and moments.
//! - [`dynamics`]: equilibrium, BGK collision with source term, streaming and
//!   the time loop ([`Simulation`]).
//! - [`geometry`], [`boundary`]: link classification against faces, holes and
//!   cracks, and the boundary rules.
//! - [`continuum`]: stress and displacement from the moments.
//! - [`fracture`]: analytical stress intensity factor of a suddenly loaded
//!   crack and the Rayleigh speed.
//! - [`scenario`]: config files, benchmark runs and output writers.
//! - [`verify`]: invariant checks.
//!
//! ```no_run
//! use elastolbm::scenario::{run_scenario, RunOptions, ScenarioConfig};
//!
//! let config = ScenarioConfig::builtin("plate_hole").unwrap();
//! let run = run_scenario(&config, &RunOptions::to_dir("out/plate")).unwrap();
//! let (t_peak, u_peak) = run.probe("P1").unwrap().max_by(|s| s.u[1]).unwrap();
//! println!("peak u2 = {u_peak:e} at t = {t_peak}");
//! ```

pub mod boundary;
pub mod continuum;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod fracture;
pub mod geometry;
pub mod lattice;
pub mod material;
pub mod scenario;
pub mod verify;

pub use boundary::{BoundaryCondition, Profile, Traction};
pub use dynamics::{ProbeSample, RelaxationSetting, Simulation};
pub use error::{Error, Result};
pub use geometry::{DomainSpec, Face, FaceConditions, Shape};
pub use lattice::LatticeSpec;
pub use material::MaterialParams;
