//! Dual norms of temporal functionals, with and without extension of the
//! test space to negative times.
//!
//! Three norms share one mechanism: express the functional against the hat
//! basis of a test space, solve one Gram system, and read off
//! sqrt(F^T N^{-1} F). They differ in the test space. The plain dual norm
//! tests against functions on (0, T) vanishing at T; the extended dual norm
//! tests against functions on (-T, T) vanishing at both ends, where loads
//! supported on (0, T) act through the zero extension of the solution's
//! history; the graph norm is the dual norm of the residual pairing
//! v -> -int u' v' + mu int u v on a refined test mesh.

use super::assemble::{assemble_coupling_cross, assemble_rhs, assemble_temporal_matrices};
use super::rhs::RhsSpec;
use super::{FeFunction1d, TemporalBc};
use crate::error::{Error, Result};
use crate::linalg::banded::cholesky_banded;
use crate::mesh::Mesh1d;
use serde::Serialize;

/// Which dual norm a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WhichNorm {
    TestDual,
    ExtendedDual,
    Graph,
    /// Residual dual norm over test functions vanishing at both time ends.
    InteriorResidual,
}

/// Value of a dual norm together with its Riesz representer.
#[derive(Debug, Clone)]
pub struct DualNormReport {
    pub which: WhichNorm,
    pub value: f64,
    pub refinement: usize,
    pub representer: FeFunction1d,
}

fn dual_norm_in(
    gram: &crate::linalg::banded::BandedMatrix,
    f: &[f64],
    mesh: Mesh1d,
    bc: TemporalBc,
    which: WhichNorm,
    refinement: usize,
) -> Result<DualNormReport> {
    let chol = cholesky_banded(gram)?;
    let w = chol.solve(f)?;
    let value: f64 = f.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().sqrt();
    Ok(DualNormReport {
        which,
        value,
        refinement,
        representer: FeFunction1d::new(mesh, bc, w)?,
    })
}

/// Dual norm of a right-hand-side functional over the test space on a
/// `refine`-fold refinement of `mesh`.
pub fn dual_norm_test(mesh: &Mesh1d, spec: &RhsSpec, refine: usize) -> Result<DualNormReport> {
    let fine = mesh.refine(refine)?;
    let f = assemble_rhs(&fine, spec, TemporalBc::TestZeroEnd)?;
    let tm = assemble_temporal_matrices(&fine);
    let n = tm.stiffness_restricted(TemporalBc::TestZeroEnd);
    dual_norm_in(&n, &f, fine, TemporalBc::TestZeroEnd, WhichNorm::TestDual, refine)
}

/// Functional on the extended test space over (-T, T), stored as its action
/// on the free hats of the mirrored mesh.
///
/// For functionals induced by loads or residuals on (0, T) the entries at
/// negative-time nodes are exactly zero; the type keeps the full vector so
/// pairings stay plain dot products.
#[derive(Debug, Clone)]
pub struct ExtendedFunctional {
    mesh: Mesh1d,
    coeffs: Vec<f64>,
    origin: usize,
}

impl ExtendedFunctional {
    fn from_forward_action(forward_mesh: &Mesh1d, action: &[f64]) -> Result<Self> {
        let mirrored = forward_mesh.mirror()?;
        let m = forward_mesh.num_elements();
        debug_assert_eq!(action.len(), m);
        let mut coeffs = vec![0.0; 2 * m - 1];
        for (i, &v) in action.iter().enumerate() {
            // Forward node i sits at mirrored node m + i; free offset -1.
            coeffs[m + i - 1] = v;
        }
        Ok(Self {
            mesh: mirrored,
            coeffs,
            origin: m,
        })
    }

    /// The mirrored mesh over (-T, T).
    pub fn mesh(&self) -> &Mesh1d {
        &self.mesh
    }

    /// Action on the free hats of the mirrored mesh, in node order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Node index of t = 0 in the mirrored mesh.
    pub fn origin_index(&self) -> usize {
        self.origin
    }

    /// Applies the functional to a function on the extended mesh.
    pub fn pairing(&self, z: &FeFunction1d) -> Result<f64> {
        if z.bc() != TemporalBc::DirichletBothEnds
            || z.mesh().num_nodes() != self.mesh.num_nodes()
        {
            return Err(Error::ShapeMismatch(
                "pairing needs a function on the extended mesh vanishing at both ends".into(),
            ));
        }
        Ok(self.coeffs.iter().zip(z.coeffs()).map(|(a, b)| a * b).sum())
    }
}

/// Reflection extension: (Ev)(t) = v(|t|) on (-T, T).
pub fn extend_reflect(v: &FeFunction1d) -> Result<FeFunction1d> {
    if v.bc() != TemporalBc::TestZeroEnd {
        return Err(Error::InvalidArgument(
            "reflection extends test functions vanishing at T".into(),
        ));
    }
    let mirrored = v.mesh().mirror()?;
    let m = v.mesh().num_elements();
    let vals = v.node_values();
    let coeffs: Vec<f64> = (1..2 * m)
        .map(|j| if j >= m { vals[j - m] } else { vals[m - j] })
        .collect();
    FeFunction1d::new(mirrored, TemporalBc::DirichletBothEnds, coeffs)
}

/// Comparison extension: linear taper from v(0) at t = 0 down to zero at
/// t = -T, instead of the mirror image.
pub fn extend_hold(v: &FeFunction1d) -> Result<FeFunction1d> {
    if v.bc() != TemporalBc::TestZeroEnd {
        return Err(Error::InvalidArgument(
            "taper extends test functions vanishing at T".into(),
        ));
    }
    let mirrored = v.mesh().mirror()?;
    let m = v.mesh().num_elements();
    let t_final = v.mesh().end();
    let vals = v.node_values();
    let coeffs: Vec<f64> = (1..2 * m)
        .map(|j| {
            if j >= m {
                vals[j - m]
            } else {
                vals[0] * (1.0 + mirrored.nodes()[j] / t_final)
            }
        })
        .collect();
    FeFunction1d::new(mirrored, TemporalBc::DirichletBothEnds, coeffs)
}

/// Residual pairing of a discrete solution as an extended functional:
/// z -> -int u' z' + mu int u z over (0, T), zero action on the history.
pub fn box_functional(u: &FeFunction1d, mu: f64) -> Result<ExtendedFunctional> {
    if u.bc() != TemporalBc::AnsatzZeroStart {
        return Err(Error::InvalidArgument(
            "residual pairing expects an ansatz function vanishing at t = 0".into(),
        ));
    }
    let tm = assemble_temporal_matrices(u.mesh());
    let a = tm.system_matrix(mu);
    let action = a.matvec(u.coeffs());
    ExtendedFunctional::from_forward_action(u.mesh(), &action)
}

/// A load on (0, T) as a functional on the extended test space.
pub fn extended_functional_from_rhs(spec: &RhsSpec, mesh: &Mesh1d) -> Result<ExtendedFunctional> {
    let f = assemble_rhs(mesh, spec, TemporalBc::TestZeroEnd)?;
    ExtendedFunctional::from_forward_action(mesh, &f)
}

/// Dual norm of an extended functional over functions on (-T, T) vanishing
/// at both ends, with the derivative norm.
pub fn extended_dual_norm(g: &ExtendedFunctional) -> Result<DualNormReport> {
    let tm = assemble_temporal_matrices(g.mesh());
    let k = tm.stiffness_restricted(TemporalBc::DirichletBothEnds);
    dual_norm_in(
        &k,
        g.coeffs(),
        g.mesh().clone(),
        TemporalBc::DirichletBothEnds,
        WhichNorm::ExtendedDual,
        1,
    )
}

/// Graph norm of an ansatz function: the dual norm of its residual pairing
/// over the test space on a `refine`-fold refined mesh.
pub fn graph_norm(u: &FeFunction1d, mu: f64, refine: usize) -> Result<DualNormReport> {
    if u.bc() != TemporalBc::AnsatzZeroStart {
        return Err(Error::InvalidArgument(
            "graph norm expects an ansatz function vanishing at t = 0".into(),
        ));
    }
    let fine = u.mesh().refine(refine)?;
    let (d, c) = assemble_coupling_cross(&fine, u.mesh())?;
    let du = d.matvec(u.coeffs());
    let cu = c.matvec(u.coeffs());
    let f: Vec<f64> = du.iter().zip(&cu).map(|(d, c)| -d + mu * c).collect();
    let tm = assemble_temporal_matrices(&fine);
    let n = tm.stiffness_restricted(TemporalBc::TestZeroEnd);
    dual_norm_in(&n, &f, fine, TemporalBc::TestZeroEnd, WhichNorm::Graph, refine)
}
