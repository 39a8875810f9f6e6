//! Discrete inf-sup constant of the modal Petrov-Galerkin pair.
//!
//! beta_h^2 is the smallest eigenvalue of A^T N^{-1} A x = lambda M x,
//! where A is the system matrix, N the test-space Gram matrix, and M the
//! ansatz-space Gram matrix (both in the derivative norm).

use super::assemble::assemble_temporal_matrices;
use super::{ModalParams, TemporalBc};
use crate::error::Result;
use crate::linalg::banded::{cholesky_banded, BandedCholesky, BandedLu, BandedMatrix};
use crate::linalg::pencil::{smallest_pencil_eig, PencilOptions, PencilPair};
use crate::mesh::Mesh1d;
use serde::Serialize;

/// Inf-sup measurement alongside the analytic constants it should obey.
#[derive(Debug, Clone, Serialize)]
pub struct InfSupReport {
    pub mu: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub n: usize,
    pub beta_h: f64,
    pub bound_infsup: f64,
    pub const_continuity: f64,
}

struct ModalPencil {
    a: BandedMatrix,
    a_lu: BandedLu,
    n_mat: BandedMatrix,
    n_chol: BandedCholesky,
    m: BandedMatrix,
}

impl PencilPair for ModalPencil {
    fn dim(&self) -> usize {
        self.m.num_rows()
    }

    fn apply_s(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.a.matvec(x);
        let z = self.n_chol.solve(&ax).expect("gram solve");
        self.a.matvec_transpose(&z)
    }

    fn solve_s(&self, b: &[f64]) -> Result<Vec<f64>> {
        // (A^T N^{-1} A)^{-1} = A^{-1} N A^{-T}.
        let w = self.a_lu.solve_transpose(b)?;
        let v = self.n_mat.matvec(&w);
        self.a_lu.solve(&v)
    }

    fn apply_m(&self, x: &[f64]) -> Vec<f64> {
        self.m.matvec(x)
    }
}

/// Measures beta_h on `mesh` and pairs it with the analytic lower bound
/// 2/(2 + sqrt(mu) T) and the continuity constant 1 + 4 mu T^2 / pi^2.
pub fn infsup_modal(
    params: &ModalParams,
    mesh: &Mesh1d,
    opts: &PencilOptions,
) -> Result<InfSupReport> {
    let tm = assemble_temporal_matrices(mesh);
    let a = tm.system_matrix(params.mu());
    let a_lu = BandedLu::factor(&a)?;
    let n_mat = tm.stiffness_restricted(TemporalBc::TestZeroEnd);
    let n_chol = cholesky_banded(&n_mat)?;
    let m = tm.stiffness_restricted(TemporalBc::AnsatzZeroStart);
    let pencil = ModalPencil {
        a,
        a_lu,
        n_mat,
        n_chol,
        m,
    };
    let eig = smallest_pencil_eig(&pencil, opts)?;
    Ok(InfSupReport {
        mu: params.mu(),
        t_final: mesh.end(),
        n: mesh.num_elements(),
        beta_h: eig.lambda.max(0.0).sqrt(),
        bound_infsup: params.infsup_lower_bound(),
        const_continuity: params.continuity_constant(),
    })
}
