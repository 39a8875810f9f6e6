//! The wave equation d_tt u - d_xx u = f on Q = (0, L) x (0, T) with
//! homogeneous Dirichlet data in space and zero initial conditions:
//! sine-eigenbasis modal decomposition, a spectral oracle, the tensor-product
//! Petrov-Galerkin solver, energy and graph norms, the discrete inf-sup
//! constant in H^{1,1} norms, and the demos showing where uniform stability
//! fails.
//!
//! The ansatz space vanishes at t = 0 and on the lateral boundary, the test
//! space at t = T and on the lateral boundary. Functions on the time-extended
//! domain Q_- = (0, L) x (-T, T) vanish on all of its boundary.

mod assemble;
mod demos;
mod infsup;
mod modal;
mod norms;
mod solve;

pub use assemble::{
    assemble_spacetime, assemble_wave_rhs, spatial_cross_matrices, spatial_mode_load, GridSamples,
    WaveSystem,
};
pub use demos::{
    cfl_demo, stability_sweep, theorem1_demo, CflReport, CflRow, ModeRatio, Theorem1Report,
};
pub use infsup::{infsup_wave, WaveInfSupReport};
pub use modal::{modal_decompose, modal_reconstruct, sine_eigenpairs, spectral_solve, ModalField};
pub use norms::{
    energy_norm, interior_residual_dual_norm, wave_extended_dual_norm, wave_graph_norm,
    WaveDualNormReport,
};
pub use solve::{density_l2_norm, rhs_l2_norm, solve_wave, wave_stability_report};

use crate::error::{Error, Result};
use crate::mesh::{eval_hat_basis, TensorGrid};
use crate::quadrature::gauss_rule;
use crate::temporal::{DensityProfile, TemporalBc};
use serde::Serialize;

/// Space-time cylinder (0, L) x (0, T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveDomain {
    length: f64,
    t_final: f64,
}

impl WaveDomain {
    pub fn new(length: f64, t_final: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "spatial length must be strictly positive, got {length}"
            )));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "final time T must be strictly positive, got {t_final}"
            )));
        }
        Ok(Self { length, t_final })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Uniform tensor grid with `nt` time and `nx` space elements.
    pub fn uniform_grid(&self, nt: usize, nx: usize) -> Result<TensorGrid> {
        Ok(TensorGrid::new(
            crate::mesh::make_uniform_mesh(0.0, self.t_final, nt)?,
            crate::mesh::make_uniform_mesh(0.0, self.length, nx)?,
        ))
    }
}

/// Essential boundary condition of a space-time FE function. Space is always
/// constrained at x = 0 and x = L; the variants differ in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceTimeBc {
    /// Zero at t = 0 (ansatz space).
    Ansatz,
    /// Zero at t = T (test space).
    Test,
    /// Zero at both time ends (extended-domain space).
    Extended,
}

impl SpaceTimeBc {
    pub fn temporal(&self) -> TemporalBc {
        match self {
            SpaceTimeBc::Ansatz => TemporalBc::AnsatzZeroStart,
            SpaceTimeBc::Test => TemporalBc::TestZeroEnd,
            SpaceTimeBc::Extended => TemporalBc::DirichletBothEnds,
        }
    }
}

/// Piecewise-bilinear function on a tensor grid with an essential boundary
/// condition; coefficients are stored time-major over free nodes only, the
/// unknown at free time node i and free space node j at index
/// `i * num_space_free + j`.
#[derive(Debug, Clone)]
pub struct SpaceTimeFunction {
    grid: TensorGrid,
    bc: SpaceTimeBc,
    coeffs: Vec<f64>,
}

impl SpaceTimeFunction {
    pub fn new(grid: TensorGrid, bc: SpaceTimeBc, coeffs: Vec<f64>) -> Result<Self> {
        let nt_free = bc.temporal().num_free(grid.time.num_nodes());
        let expect = nt_free * grid.num_space_free();
        if coeffs.len() != expect {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for {} free nodes ({} time x {} space)",
                coeffs.len(),
                expect,
                nt_free,
                grid.num_space_free()
            )));
        }
        Ok(Self { grid, bc, coeffs })
    }

    /// Nodal interpolant of `f(x, t)`; constrained nodes are forced to zero.
    pub fn interpolate<F: FnMut(f64, f64) -> f64>(
        grid: TensorGrid,
        bc: SpaceTimeBc,
        mut f: F,
    ) -> Result<Self> {
        let mut coeffs =
            Vec::with_capacity(bc.temporal().num_free(grid.time.num_nodes()) * grid.num_space_free());
        for it in bc.temporal().free_nodes(grid.time.num_nodes()) {
            let t = grid.time.nodes()[it];
            for ix in 1..grid.space.num_nodes() - 1 {
                coeffs.push(f(grid.space.nodes()[ix], t));
            }
        }
        Self::new(grid, bc, coeffs)
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn bc(&self) -> SpaceTimeBc {
        self.bc
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Values over the full node grid, zeros filled at constrained nodes;
    /// flat time-major with stride `num_space_nodes`.
    pub fn node_values(&self) -> Vec<f64> {
        let nxn = self.grid.space.num_nodes();
        let nsf = self.grid.num_space_free();
        let mut vals = vec![0.0; self.grid.time.num_nodes() * nxn];
        for (row, it) in self
            .bc
            .temporal()
            .free_nodes(self.grid.time.num_nodes())
            .enumerate()
        {
            for jx in 0..nsf {
                vals[it * nxn + 1 + jx] = self.coeffs[row * nsf + jx];
            }
        }
        vals
    }

    /// Point evaluation; exact zero on the constrained boundary.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let et = eval_hat_basis(&self.grid.time, t)?;
        let ex = eval_hat_basis(&self.grid.space, x)?;
        let vals = self.node_values();
        let nxn = self.grid.space.num_nodes();
        let mut acc = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                acc += et.values[a] * ex.values[b] * vals[et.nodes[a] * nxn + ex.nodes[b]];
            }
        }
        Ok(acc)
    }

    /// L2(Q) norm, exact for the piecewise-bilinear function.
    pub fn l2_norm(&self) -> f64 {
        let vals = self.node_values();
        let nxn = self.grid.space.num_nodes();
        let mut acc = 0.0;
        for kt in 0..self.grid.time.num_elements() {
            let ht = self.grid.time.width(kt);
            for kx in 0..self.grid.space.num_elements() {
                let hx = self.grid.space.width(kx);
                // Corner values of the bilinear patch.
                let v00 = vals[kt * nxn + kx];
                let v01 = vals[kt * nxn + kx + 1];
                let v10 = vals[(kt + 1) * nxn + kx];
                let v11 = vals[(kt + 1) * nxn + kx + 1];
                // Integral of the squared bilinear over the cell: the 1D mass
                // pairing (a^2 + a b + b^2)/3 applied in each direction.
                let q = |a: f64, b: f64, c: f64, d: f64| {
                    (2.0 * (a * c) + a * d + b * c + 2.0 * (b * d)) / 6.0
                };
                let row0 = q(v00, v01, v00, v01);
                let row_cross = q(v00, v01, v10, v11);
                let row1 = q(v10, v11, v10, v11);
                acc += ht * hx * (row0 + row_cross + row1) / 3.0;
            }
        }
        acc.sqrt()
    }

    /// L2(Q) error against a reference, by 5x5 Gauss per cell.
    pub fn l2_error<F: FnMut(f64, f64) -> f64>(&self, mut reference: F) -> f64 {
        let vals = self.node_values();
        let nxn = self.grid.space.num_nodes();
        let q = gauss_rule(5).expect("5-point rule");
        let mut acc = 0.0;
        for kt in 0..self.grid.time.num_elements() {
            let (t0, ht) = (self.grid.time.nodes()[kt], self.grid.time.width(kt));
            for kx in 0..self.grid.space.num_elements() {
                let (x0, hx) = (self.grid.space.nodes()[kx], self.grid.space.width(kx));
                let v00 = vals[kt * nxn + kx];
                let v01 = vals[kt * nxn + kx + 1];
                let v10 = vals[(kt + 1) * nxn + kx];
                let v11 = vals[(kt + 1) * nxn + kx + 1];
                for (&st, &wt) in q.points.iter().zip(&q.weights) {
                    for (&sx, &wx) in q.points.iter().zip(&q.weights) {
                        let uh = (1.0 - st) * ((1.0 - sx) * v00 + sx * v01)
                            + st * ((1.0 - sx) * v10 + sx * v11);
                        let d = uh - reference(x0 + hx * sx, t0 + ht * st);
                        acc += wt * wx * ht * hx * d * d;
                    }
                }
            }
        }
        acc.sqrt()
    }
}

/// Right-hand side of the wave problem. Modal variants are expressed in the
/// L2-normalized eigenbasis phi_k(x) = sqrt(2/L) sin(k pi x / L).
#[derive(Debug, Clone)]
pub enum WaveRhsSpec {
    /// f(x, t) = g(t) * phi_k(x).
    ModalDensity { k: usize, density: DensityProfile },
    /// Initial kick v -> amp * <phi_k, v(., 0)>, realizing u_t(0) = amp phi_k.
    InitialVelocity { k: usize, amplitude: f64 },
    /// Bilinear interpolant of a rectangular sample table f(t_i, x_j).
    GridDensity(GridSamples),
}

/// Energy estimate ||u_h||_{H^{1,1}} against the bound (T/sqrt(2)) ||f||_{L2(Q)};
/// `satisfied` allows 5% slack on the bound.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub norm_h11: f64,
    pub norm_f_l2: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl StabilityReport {
    pub fn new(norm_h11: f64, norm_f_l2: f64, t_final: f64) -> Self {
        let bound = t_final / std::f64::consts::SQRT_2 * norm_f_l2;
        Self {
            norm_h11,
            norm_f_l2,
            bound,
            satisfied: norm_h11 <= bound * 1.05,
        }
    }

    /// How far above the bound the measured norm sits (1 = exactly at it).
    pub fn violation_factor(&self) -> f64 {
        if self.bound == 0.0 {
            if self.norm_h11 == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.norm_h11 / self.bound
        }
    }
}
