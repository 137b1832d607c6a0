//! Numerical laboratory for stable self-similar blowup in the radial
//! parabolic-elliptic Keller-Segel system.
//!
//! The reduced-mass change of variable turns the radial system in R^3 into
//! a local semilinear heat equation in R^5 with the explicit static profile
//! phi(x) = 2/(2+|x|^2) in similarity variables. This crate implements, at
//! desk scale, every computable construct of the stability analysis around
//! that profile:
//!
//! * [`grid`] — radial grids, quadrature against r^{n-1}, and the operators
//!   Delta_rad, Lambda = r d/dr, D^k;
//! * [`profiles`] — closed-form profiles, the reduced-mass transform and
//!   its inverse, weighted inner products, Sobolev-type norms, the rank-one
//!   spectral projection, Hankel transforms, and the dimension-shift norm
//!   equivalence check;
//! * [`spectral`] — the half-line Schrodinger reductions of the linearized
//!   operator, their supersymmetric partner, the integral certificate that
//!   rules out nonpositive partner spectrum, eigenvalue computations, and
//!   the explicit free heat semigroup in similarity variables;
//! * [`resolvent`] — the resolvent ODE solved from both endpoints with a
//!   fundamental-system construction and variation of constants;
//! * [`evolution`] — the nonlinear similarity-variable flow, blowup-time
//!   shooting, decay-rate fits, and a physical-variable blowup run.

pub mod error;
pub mod evolution;
pub mod grid;
pub mod ode;
pub mod profiles;
pub mod quad;
pub mod resolvent;
pub mod spectral;

pub use error::{Error, Result};
