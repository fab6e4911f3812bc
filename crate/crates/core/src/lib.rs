//! Numerical construction of complete conformally hyperbolic metrics on the
//! 3-ball with scalar curvature -6 that contain horizon spheres (mean
//! curvature -2, 0, +2), modelled on the anti-de Sitter-Schwarzschild family.
//!
//! The crate is organized as a pipeline of independent layers:
//!
//! * [`geometry`] — charts, sampled radial profiles, quadrature, roots;
//! * [`family`] — the anti-de Sitter-Schwarzschild family and its horizons;
//! * [`gluing`] — capping the family with a round region, curvature checks;
//! * [`solver`] — radial semilinear solves (defect correction, Yamabe-type
//!   normalization, comparison checks);
//! * [`boundary_mass`] — collar gauge at the conformal boundary and the mass
//!   invariant;
//! * [`horizon`] — graph mean curvature on sphere grids and the CMC Newton
//!   solver.

pub mod boundary_mass;
pub mod error;
pub mod family;
pub mod geometry;
pub mod gluing;
pub mod horizon;
pub mod solver;

pub use error::{Error, Result};
