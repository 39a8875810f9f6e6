//! Numerical laboratory for inf-sup stable space-time variational
//! formulations of second-order evolution equations.
//!
//! The crate covers the scalar modal problem d_tt u + mu u = f with zero
//! initial conditions, its dual and graph norms measured through Riesz
//! representers on extended time intervals, discrete inf-sup constants of the
//! associated Petrov-Galerkin discretizations, and the tensor-product
//! space-time discretization of the wave equation d_tt u - d_xx u = f.

pub mod error;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod spacetime;
pub mod temporal;

pub use error::{Error, Result};
