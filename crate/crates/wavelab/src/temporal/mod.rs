//! The modal problem d_tt u + mu u = f on (0, T) with u(0) = d_t u(0) = 0:
//! Petrov-Galerkin solves, dual norms, extension operators, and discrete
//! inf-sup constants.
//!
//! The ansatz space vanishes at t = 0, the test space at t = T. Dual norms
//! of functionals on the test space are measured in |v|_{H1} = ||d_t v||;
//! functionals extended by zero to (-T, 0) are measured against the
//! H1-seminorm on the doubled interval.

mod assemble;
mod checks;
mod dualnorm;
mod infsup;
mod rhs;
mod solve;

pub use assemble::{
    assemble_coupling_cross, assemble_rhs, assemble_temporal_matrices, TemporalMatrices,
};
pub use checks::{equivalence_check, isometry_check, EquivalenceReport, IsometryReport};
pub use dualnorm::{
    box_functional, dual_norm_test, extend_hold, extend_reflect, extended_dual_norm,
    extended_functional_from_rhs, graph_norm, DualNormReport, ExtendedFunctional, WhichNorm,
};
pub use infsup::{infsup_modal, InfSupReport};
pub use rhs::{DensityProfile, ResolvedRhs, RhsSpec, SampleTable};
pub use solve::{duhamel_derivative_oracle, duhamel_oracle, pointmass_solution, solve_modal};

use crate::error::{Error, Result};
use crate::mesh::{eval_hat_basis, Mesh1d};
use crate::quadrature::gauss_rule;

/// Parameters of the modal problem: mu > 0 and the final time T > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalParams {
    mu: f64,
    t_final: f64,
}

impl ModalParams {
    pub fn new(mu: f64, t_final: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "modal parameter mu must be strictly positive, got {mu}"
            )));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "final time T must be strictly positive, got {t_final}"
            )));
        }
        Ok(Self { mu, t_final })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Lower bound 2 / (2 + sqrt(mu) T) for the continuous inf-sup constant.
    pub fn infsup_lower_bound(&self) -> f64 {
        2.0 / (2.0 + self.mu.sqrt() * self.t_final)
    }

    /// Continuity constant 1 + 4 mu T^2 / pi^2 of the bilinear form.
    pub fn continuity_constant(&self) -> f64 {
        1.0 + 4.0 * self.mu * self.t_final * self.t_final / (std::f64::consts::PI.powi(2))
    }

    /// Sharp stability factor 1 + sqrt(mu) T / 2 for the derivative norm
    /// against the test-dual norm of the datum.
    pub fn stability_constant(&self) -> f64 {
        1.0 + 0.5 * self.mu.sqrt() * self.t_final
    }
}

/// Essential boundary condition attached to a temporal FE function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemporalBc {
    /// Vanishes at the left end (ansatz space).
    AnsatzZeroStart,
    /// Vanishes at the right end (test space).
    TestZeroEnd,
    /// Vanishes at both ends (extended-interval space).
    DirichletBothEnds,
}

impl TemporalBc {
    /// Index range of unconstrained nodes on a mesh with `n + 1` nodes.
    pub fn free_nodes(&self, num_nodes: usize) -> std::ops::Range<usize> {
        match self {
            TemporalBc::AnsatzZeroStart => 1..num_nodes,
            TemporalBc::TestZeroEnd => 0..num_nodes - 1,
            TemporalBc::DirichletBothEnds => 1..num_nodes - 1,
        }
    }

    pub fn num_free(&self, num_nodes: usize) -> usize {
        self.free_nodes(num_nodes).len()
    }
}

/// Piecewise-linear finite element function with an essential boundary
/// condition; coefficients are stored over the unconstrained nodes only.
#[derive(Debug, Clone)]
pub struct FeFunction1d {
    mesh: Mesh1d,
    bc: TemporalBc,
    coeffs: Vec<f64>,
}

impl FeFunction1d {
    pub fn new(mesh: Mesh1d, bc: TemporalBc, coeffs: Vec<f64>) -> Result<Self> {
        let expect = bc.num_free(mesh.num_nodes());
        if coeffs.len() != expect {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for {} free nodes",
                coeffs.len(),
                expect
            )));
        }
        Ok(Self { mesh, bc, coeffs })
    }

    /// Nodal interpolant of `f`; constrained nodes are forced to zero.
    pub fn interpolate<F: FnMut(f64) -> f64>(
        mesh: Mesh1d,
        bc: TemporalBc,
        mut f: F,
    ) -> Result<Self> {
        let coeffs: Vec<f64> = bc
            .free_nodes(mesh.num_nodes())
            .map(|i| f(mesh.nodes()[i]))
            .collect();
        Self::new(mesh, bc, coeffs)
    }

    pub fn mesh(&self) -> &Mesh1d {
        &self.mesh
    }

    pub fn bc(&self) -> TemporalBc {
        self.bc
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Values at all mesh nodes, zeros filled in at constrained nodes.
    pub fn node_values(&self) -> Vec<f64> {
        let mut vals = vec![0.0; self.mesh.num_nodes()];
        for (off, i) in self.bc.free_nodes(self.mesh.num_nodes()).enumerate() {
            vals[i] = self.coeffs[off];
        }
        vals
    }

    /// Point evaluation; exact zero at constrained end points.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let e = eval_hat_basis(&self.mesh, t)?;
        let vals = self.node_values();
        Ok(vals[e.nodes[0]] * e.values[0] + vals[e.nodes[1]] * e.values[1])
    }

    /// L2(0, T) norm, exact for the piecewise-linear function.
    pub fn l2_norm(&self) -> f64 {
        let vals = self.node_values();
        let mut acc = 0.0;
        for k in 0..self.mesh.num_elements() {
            let (a, b) = (vals[k], vals[k + 1]);
            acc += self.mesh.width(k) * (a * a + a * b + b * b) / 3.0;
        }
        acc.sqrt()
    }

    /// H1 seminorm ||d_t u||, exact for the piecewise-linear function.
    pub fn h1_seminorm(&self) -> f64 {
        let vals = self.node_values();
        let mut acc = 0.0;
        for k in 0..self.mesh.num_elements() {
            let d = vals[k + 1] - vals[k];
            acc += d * d / self.mesh.width(k);
        }
        acc.sqrt()
    }

    /// L2 error against a reference function, by 5-point Gauss per element.
    pub fn l2_error<F: FnMut(f64) -> f64>(&self, mut reference: F) -> f64 {
        let vals = self.node_values();
        let q = gauss_rule(5).expect("5-point rule");
        let mut acc = 0.0;
        for k in 0..self.mesh.num_elements() {
            let (t0, h) = (self.mesh.nodes()[k], self.mesh.width(k));
            for (&x, &w) in q.points.iter().zip(&q.weights) {
                let t = t0 + h * x;
                let uh = vals[k] * (1.0 - x) + vals[k + 1] * x;
                let d = uh - reference(t);
                acc += w * h * d * d;
            }
        }
        acc.sqrt()
    }

    /// H1-seminorm error against a reference derivative.
    pub fn h1_seminorm_error<F: FnMut(f64) -> f64>(&self, mut reference_deriv: F) -> f64 {
        let vals = self.node_values();
        let q = gauss_rule(5).expect("5-point rule");
        let mut acc = 0.0;
        for k in 0..self.mesh.num_elements() {
            let (t0, h) = (self.mesh.nodes()[k], self.mesh.width(k));
            let du = (vals[k + 1] - vals[k]) / h;
            for (&x, &w) in q.points.iter().zip(&q.weights) {
                let d = du - reference_deriv(t0 + h * x);
                acc += w * h * d * d;
            }
        }
        acc.sqrt()
    }
}
