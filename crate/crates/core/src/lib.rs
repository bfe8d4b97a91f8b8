//! Reduced hydrodynamics of expanding non-relativistic fireballs.
//!
//! A Gaussian density Ansatz turns the ideal-gas fluid equations into
//! low-dimensional ODEs for the variances of the Gaussian. This crate
//! provides those ODE systems (1D, 2D, 3D and elliptic 3D), an adaptive
//! integrator for them, their first integrals (energy, Ermakov invariant,
//! scaling Noether invariant), closed-form solutions and quadratures,
//! numerical Noether-symmetry checks, and a reconstruction of the fluid
//! fields with PDE residual and total-energy evaluation.

pub mod analytic;
pub mod dynamics;
pub mod error;
pub mod hydro;
pub mod integrate;
pub mod invariants;
pub mod model;
pub mod ode;
pub mod quadrature;
pub mod symmetry;

pub use dynamics::EnergyPair;
pub use error::{Error, Result};
pub use integrate::{integrate, IntegratorConfig, Trajectory, TrajectorySample};
pub use invariants::{InvariantReport, InvariantRow};
pub use model::{ModelKind, PhysicalParams, PolarState, State};
