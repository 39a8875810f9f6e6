//! Discrete inf-sup constant of the space-time form in H^{1,1} norms.
//!
//! beta_h^2 is the smallest eigenvalue of A^T N^{-1} A x = lambda M x with
//! A the Petrov-Galerkin operator and N, M the H^{1,1} Gram operators of
//! the test and ansatz spaces. Unlike the modal problem, no positive lower
//! bound survives refinement: beta_h decays as the grid resolves more modes.

use super::{assemble_spacetime, WaveSystem};
use crate::error::Result;
use crate::linalg::banded::{cholesky_banded, BandedCholesky, BandedLu};
use crate::linalg::pencil::{smallest_pencil_eig, PencilOptions, PencilPair};
use crate::mesh::TensorGrid;
use serde::Serialize;

/// Inf-sup measurement on one tensor grid.
#[derive(Debug, Clone, Serialize)]
pub struct WaveInfSupReport {
    pub n_t: usize,
    pub n_x: usize,
    pub beta_h: f64,
}

struct WavePencil<'a> {
    system: &'a WaveSystem,
    a_lu: BandedLu,
    n_chol: BandedCholesky,
}

impl PencilPair for WavePencil<'_> {
    fn dim(&self) -> usize {
        self.system.a.num_cols()
    }

    fn apply_s(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.system.a.apply(x);
        let z = self.n_chol.solve(&ax).expect("gram solve");
        self.system.a.apply_transpose(&z)
    }

    fn solve_s(&self, b: &[f64]) -> Result<Vec<f64>> {
        // (A^T N^{-1} A)^{-1} = A^{-1} N A^{-T}.
        let w = self.a_lu.solve_transpose(b)?;
        let v = self.system.n_test.apply(&w);
        self.a_lu.solve(&v)
    }

    fn apply_m(&self, x: &[f64]) -> Vec<f64> {
        self.system.m_ansatz.apply(x)
    }
}

/// Measures beta_h of the wave discretization on `grid`.
pub fn infsup_wave(grid: &TensorGrid, opts: &PencilOptions) -> Result<WaveInfSupReport> {
    let system = assemble_spacetime(grid)?;
    let a_lu = BandedLu::factor(&system.a.to_banded()?)?;
    let n_chol = cholesky_banded(&system.n_test.to_banded()?)?;
    let pencil = WavePencil {
        system: &system,
        a_lu,
        n_chol,
    };
    let eig = smallest_pencil_eig(&pencil, opts)?;
    Ok(WaveInfSupReport {
        n_t: grid.time.num_elements(),
        n_x: grid.space.num_elements(),
        beta_h: eig.lambda.max(0.0).sqrt(),
    })
}
