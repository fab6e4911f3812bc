//! Shared radial primitives: charts, sampled profiles, quadrature, root
//! finding, and the radial differential operators. Everything here is a pure
//! function of its inputs.

pub mod bump;
pub mod chart;
pub mod fit;
pub mod ops;
pub mod profile;
pub mod quad;
pub mod roots;

pub use chart::{rho_of_tau, tau_of_rho, ChartPoint};
pub use ops::{
    radial_laplacian, radial_laplacian_at_origin, radial_laplacian_parts, scalar_curvature_parts,
    scalar_curvature_radial,
};
pub use profile::{uniform_grid, RadialProfile};
pub use quad::{
    quad_adaptive, quad_adaptive_tol, quad_sqrt_lower, quad_sqrt_lower_tol, Quadrature,
};
pub use roots::find_root_monotone;
