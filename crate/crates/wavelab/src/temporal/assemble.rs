//! Assembly of temporal mass, stiffness, and Petrov-Galerkin couplings.

use super::rhs::{ResolvedRhs, RhsSpec};
use super::TemporalBc;
use crate::error::{Error, Result};
use crate::linalg::banded::BandedMatrix;
use crate::linalg::dense::DenseMatrix;
use crate::mesh::{eval_hat_basis, Mesh1d};
use crate::quadrature::gauss_rule;

/// Full-mesh Gram matrices and the Petrov-Galerkin coupling blocks.
///
/// `m` and `k` are the mass and stiffness matrices over all nodes. `d` and
/// `c` couple the ansatz hats (nodes 1..=n, zero initial trace) against the
/// test hats (nodes 0..n, zero terminal trace): d holds the derivative
/// pairings, c the mass pairings.
#[derive(Debug, Clone)]
pub struct TemporalMatrices {
    pub mesh: Mesh1d,
    pub m: BandedMatrix,
    pub k: BandedMatrix,
    pub d: BandedMatrix,
    pub c: BandedMatrix,
}

impl TemporalMatrices {
    /// Principal submatrix of the mass matrix on the free nodes of `bc`.
    pub fn mass_restricted(&self, bc: TemporalBc) -> BandedMatrix {
        let r = bc.free_nodes(self.mesh.num_nodes());
        self.m.submatrix(r.start, r.end, r.start, r.end).expect("valid range")
    }

    /// Principal submatrix of the stiffness matrix on the free nodes of `bc`.
    pub fn stiffness_restricted(&self, bc: TemporalBc) -> BandedMatrix {
        let r = bc.free_nodes(self.mesh.num_nodes());
        self.k.submatrix(r.start, r.end, r.start, r.end).expect("valid range")
    }

    /// System matrix -D + mu C of the Petrov-Galerkin discretization.
    pub fn system_matrix(&self, mu: f64) -> BandedMatrix {
        let n = self.d.num_rows();
        let mut a = BandedMatrix::zeros(n, n, 2, 0);
        for i in 0..n {
            let (lo, hi) = a.row_span(i);
            for j in lo..hi {
                let v = -self.d.get(i, j) + mu * self.c.get(i, j);
                a.set(i, j, v).expect("in band");
            }
        }
        a
    }
}

/// Assembles mass and stiffness over all nodes plus the coupling blocks.
pub fn assemble_temporal_matrices(mesh: &Mesh1d) -> TemporalMatrices {
    let n = mesh.num_nodes();
    let mut m = BandedMatrix::zeros_symmetric(n, 1);
    let mut k = BandedMatrix::zeros_symmetric(n, 1);
    for e in 0..mesh.num_elements() {
        let h = mesh.width(e);
        let (a, b) = (e, e + 1);
        m.add(a, a, h / 3.0).unwrap();
        m.add(b, b, h / 3.0).unwrap();
        m.add(a, b, h / 6.0).unwrap();
        m.add(b, a, h / 6.0).unwrap();
        k.add(a, a, 1.0 / h).unwrap();
        k.add(b, b, 1.0 / h).unwrap();
        k.add(a, b, -1.0 / h).unwrap();
        k.add(b, a, -1.0 / h).unwrap();
    }
    // Petrov-Galerkin blocks: test rows are nodes 0..n-1, ansatz columns are
    // nodes 1..=n-1+1; both are restrictions of the full pairings.
    let d = k.submatrix(0, n - 1, 1, n).expect("valid range");
    let c = m.submatrix(0, n - 1, 1, n).expect("valid range");
    TemporalMatrices {
        mesh: mesh.clone(),
        m,
        k,
        d,
        c,
    }
}

/// Load vector of the right-hand side against the free hats of `bc`.
///
/// Densities are integrated with a 5-point Gauss rule per element (panels
/// split at sample kinks); a point mass at t = 0 loads the hat that is 1
/// there, if that node is unconstrained.
pub fn assemble_rhs(mesh: &Mesh1d, spec: &RhsSpec, bc: TemporalBc) -> Result<Vec<f64>> {
    let free = bc.free_nodes(mesh.num_nodes());
    let mut load = vec![0.0; free.len()];
    let dof_of = |node: usize| -> Option<usize> {
        if free.contains(&node) {
            Some(node - free.start)
        } else {
            None
        }
    };
    match spec.resolve()? {
        ResolvedRhs::PointMass(w) => {
            // The functional v -> w v(start); only the hat at the first node
            // is nonzero there.
            if let Some(dof) = dof_of(0) {
                load[dof] += w;
            }
        }
        ResolvedRhs::Density(profile) => {
            let q = gauss_rule(5).expect("5-point rule");
            for e in 0..mesh.num_elements() {
                let (t0, t1) = (mesh.nodes()[e], mesh.nodes()[e + 1]);
                // Split the element at interpolation kinks so each panel is
                // polynomial times hat.
                let mut cuts = vec![t0];
                cuts.extend(profile.knots_within(t0, t1));
                cuts.push(t1);
                let h = t1 - t0;
                for w in cuts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let len = b - a;
                    for (&x, &wq) in q.points.iter().zip(&q.weights) {
                        let t = a + len * x;
                        let f = profile.eval(t)?;
                        let s = (t - t0) / h;
                        if let Some(dof) = dof_of(e) {
                            load[dof] += wq * len * f * (1.0 - s);
                        }
                        if let Some(dof) = dof_of(e + 1) {
                            load[dof] += wq * len * f * s;
                        }
                    }
                }
            }
        }
    }
    Ok(load)
}

/// Derivative and mass pairings of coarse ansatz hats against the test hats
/// of a nested refinement.
///
/// Rows index the test dofs of `test_mesh` (zero terminal trace), columns
/// the ansatz dofs of `ansatz_mesh` (zero initial trace). `test_mesh` must
/// refine `ansatz_mesh`: every test element must lie inside one ansatz
/// element. Returns (D, C) as dense matrices.
pub fn assemble_coupling_cross(
    test_mesh: &Mesh1d,
    ansatz_mesh: &Mesh1d,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let same_interval = (test_mesh.start() - ansatz_mesh.start()).abs()
        <= 1e-12 * ansatz_mesh.end().abs().max(1.0)
        && (test_mesh.end() - ansatz_mesh.end()).abs() <= 1e-12 * ansatz_mesh.end().abs().max(1.0);
    if !same_interval {
        return Err(Error::InvalidArgument(format!(
            "coupling meshes span different intervals: [{}, {}] vs [{}, {}]",
            test_mesh.start(),
            test_mesh.end(),
            ansatz_mesh.start(),
            ansatz_mesh.end()
        )));
    }
    let nt = test_mesh.num_nodes() - 1; // test dofs
    let na = ansatz_mesh.num_nodes() - 1; // ansatz dofs
    let mut d = DenseMatrix::zeros(nt, na);
    let mut c = DenseMatrix::zeros(nt, na);
    let q = gauss_rule(3).expect("3-point rule");
    for e in 0..test_mesh.num_elements() {
        let (t0, t1) = (test_mesh.nodes()[e], test_mesh.nodes()[e + 1]);
        let h = t1 - t0;
        let mid = 0.5 * (t0 + t1);
        let coarse = eval_hat_basis(ansatz_mesh, mid)?;
        for (&x, &wq) in q.points.iter().zip(&q.weights) {
            let t = t0 + h * x;
            let s = (t - ansatz_mesh.nodes()[coarse.element])
                / (ansatz_mesh.nodes()[coarse.element + 1] - ansatz_mesh.nodes()[coarse.element]);
            let cv = [1.0 - s, s];
            for (loc_t, &node_t) in [e, e + 1].iter().enumerate() {
                if node_t >= nt {
                    continue; // terminal test node constrained
                }
                let psi = if loc_t == 0 { 1.0 - x } else { x };
                let dpsi = if loc_t == 0 { -1.0 / h } else { 1.0 / h };
                for loc_a in 0..2 {
                    let node_a = coarse.nodes[loc_a];
                    if node_a == 0 {
                        continue; // initial ansatz node constrained
                    }
                    let col = node_a - 1;
                    d.add(node_t, col, wq * h * dpsi * coarse.derivs[loc_a]);
                    c.add(node_t, col, wq * h * psi * cv[loc_a]);
                }
            }
        }
    }
    Ok((d, c))
}
