//! Numerical core for reaction-diffusion-ODE systems on an interval.
//!
//! The crate builds and analyzes stationary solutions of
//!
//! ```text
//! u_t = f(u, v),            x in [0, L]
//! v_t = D v_xx + g(u, v),   v_x(0) = v_x(L) = 0
//! ```
//!
//! where `u` does not diffuse. It provides:
//!
//! * [`kinetics`] — reaction nonlinearities with exact Jacobians, three
//!   built-in model families plus expression-defined custom models,
//! * [`steady`] — constant steady states, their kinetic/DDI classification and
//!   the touch inequality,
//! * [`profile1d`] — non-constant stationary profiles by branch reduction,
//!   shooting and finite-difference Newton, plus piecewise weak profiles,
//! * [`spectrum`] — the linearized operator, its essential interval, discrete
//!   eigenvalues through two independent routes and spectral-gap certificates,
//! * [`evolve`] — IMEX time integration, growth experiments and the
//!   three-to-two species model-reduction study.
//!
//! Everything is allocation-based but free of I/O; the companion CLI crate
//! carries configuration, file formats and plotting.

#![no_std]
#![forbid(unsafe_code)]

// In no_std builds the f64 transcendentals come from `num_traits::Float`
// (libm); test builds link std, whose inherent methods shadow the trait, so
// those imports carry `allow(unused_imports)`.
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod evolve;
pub mod fit;
pub mod grid;
pub mod interp;
pub mod ivp;
pub mod kinetics;
pub mod linalg;
pub mod profile1d;
pub mod roots;
pub mod spectrum;
pub mod steady;

pub use error::{Error, Result};
pub use grid::Grid;
