//! Numerical toolkit for the prescribed Weingarten curvature equation
//! `sigma_k(kappa(X)) = f(X, nu(X))` on convex star-shaped hypersurfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`symcalc`] evaluates elementary symmetric functions, their restricted
//!   variants and their eigenbasis derivatives, with brute-force oracles.
//! * [`geometry`] builds orthonormal frames on analytic and radial-graph
//!   surfaces and measures finite-difference residuals of the classical
//!   hypersurface identities.
//! * [`perturb`] implements the rank-(n-1) perturbation that makes the largest
//!   principal curvature simple, its eigenvalue jets, and the test quantities
//!   `Q = log kappa_1 - A u` and its perturbed counterpart.
//! * [`lemmas`] checks the constant-free inequalities of the curvature
//!   estimate on random admissible data and probes the constant-laden ones.
//! * [`solver`] solves the equation on axisymmetric radial graphs by damped
//!   Newton iteration and continuation, and runs the maximum-principle
//!   diagnostic on computed solutions.
//! * [`harness`] drives seeded verification suites, solves and sweeps, and
//!   serialises their reports.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod lemmas;
pub mod perturb;
pub mod sampling;
pub mod solver;
pub mod symcalc;
pub mod tolerance;

pub use error::{Error, Result};
