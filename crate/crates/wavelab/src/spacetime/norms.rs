//! Energy, graph, and extended-domain dual norms of space-time functions.
//!
//! The energy norm is the H^{1,1} quadratic form of the function's own
//! boundary condition. The graph norm is the test-space dual norm of the
//! residual pairing v -> a(u, v) on an r-refined test grid; the extended
//! dual norm tests the same pairing against functions on the time-mirrored
//! cylinder (0, L) x (-T, T) vanishing on its whole boundary, where the
//! pre-history action is exactly zero. All Riesz solves run conjugate
//! gradients with diagonal preconditioning at relative tolerance 1e-10.

use super::{
    assemble_spacetime, spatial_cross_matrices, SpaceTimeBc, SpaceTimeFunction,
};
use crate::error::{Error, Result};
use crate::linalg::{cg_solve, DenseMatrix, KronTerm, KroneckerOperator};
use crate::mesh::{Mesh1d, TensorGrid};
use crate::temporal::{
    assemble_coupling_cross, assemble_temporal_matrices, TemporalBc, TemporalMatrices, WhichNorm,
};

/// Value of a space-time dual norm together with its Riesz representer.
#[derive(Debug, Clone)]
pub struct WaveDualNormReport {
    pub which: WhichNorm,
    pub value: f64,
    pub refinement: usize,
    pub representer: SpaceTimeFunction,
}

const CG_TOL: f64 = 1e-10;

/// H^{1,1} Gram K_t kron M_x + M_t kron K_x on the free nodes of `tbc`.
fn h11_gram(
    time: &TemporalMatrices,
    space: &TemporalMatrices,
    tbc: TemporalBc,
) -> KroneckerOperator {
    let m_x = space.mass_restricted(TemporalBc::DirichletBothEnds);
    let k_x = space.stiffness_restricted(TemporalBc::DirichletBothEnds);
    KroneckerOperator::new(vec![
        KronTerm {
            coeff: 1.0,
            time: time.stiffness_restricted(tbc),
            space: m_x,
        },
        KronTerm {
            coeff: 1.0,
            time: time.mass_restricted(tbc),
            space: k_x,
        },
    ])
    .expect("two terms with consistent shapes")
}

/// sqrt(F^T G^{-1} F) by preconditioned CG; returns the value and G^{-1} F.
fn dual_norm_by_cg(gram: &KroneckerOperator, f: &[f64]) -> Result<(f64, Vec<f64>)> {
    let diag = gram.diagonal()?;
    let max_iter = 2 * f.len() + 10_000;
    let res = cg_solve(|x| gram.apply(x), f, CG_TOL, max_iter, Some(&diag))?;
    let value = f
        .iter()
        .zip(&res.x)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt();
    Ok((value, res.x))
}

/// H^{1,1} norm sqrt(||d_t u||^2 + ||d_x u||^2), exact for the bilinear
/// function through the Gram quadratic form of its own boundary condition.
pub fn energy_norm(u: &SpaceTimeFunction) -> f64 {
    let time = assemble_temporal_matrices(&u.grid().time);
    let space = assemble_temporal_matrices(&u.grid().space);
    let gram = h11_gram(&time, &space, u.bc().temporal());
    let gu = gram.apply(u.coeffs());
    u.coeffs()
        .iter()
        .zip(&gu)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

/// Residual pairings F[(it, jx)] = a(u, psi_it hat_jx) against the hats of
/// the r-refined grid, over all fine test time nodes 0..nt_f and interior
/// fine space nodes. Returns the fine meshes and the flat time-major vector.
fn residual_action_refined(
    u: &SpaceTimeFunction,
    refine: usize,
) -> Result<(Mesh1d, Mesh1d, Vec<f64>)> {
    if u.bc() != SpaceTimeBc::Ansatz {
        return Err(Error::InvalidArgument(
            "residual norms expect an ansatz function vanishing at t = 0".into(),
        ));
    }
    if refine == 0 {
        return Err(Error::InvalidArgument(
            "test-grid refinement must be at least 1".into(),
        ));
    }
    let grid = u.grid();
    let fine_time = grid.time.refine(refine)?;
    let fine_space = grid.space.refine(refine)?;
    // a(u, v) = -(d_t u, d_t v) + (d_x u, d_x v) splits into cross pairings:
    // F = -D_t U M_x^T + C_t U K_x^T with U the coarse coefficient matrix.
    let (d_t, c_t) = assemble_coupling_cross(&fine_time, &grid.time)?;
    let (m_x, k_x) = spatial_cross_matrices(&fine_space, &grid.space)?;
    let nt_c = u.bc().temporal().num_free(grid.time.num_nodes());
    let nx_c = grid.num_space_free();
    let mut u_rows = Vec::with_capacity(nt_c);
    for row in u.coeffs().chunks(nx_c) {
        u_rows.push(row.to_vec());
    }
    let u_mat = DenseMatrix::from_rows(&u_rows)?;
    let f_mass = d_t.matmul(&u_mat)?.matmul(&m_x.transpose())?;
    let f_stiff = c_t.matmul(&u_mat)?.matmul(&k_x.transpose())?;
    let (rows, cols) = (f_mass.num_rows(), f_mass.num_cols());
    let mut f = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            f.push(-f_mass.get(i, j) + f_stiff.get(i, j));
        }
    }
    Ok((fine_time, fine_space, f))
}

/// Graph norm: test-space dual norm of the residual pairing v -> a(u, v) on
/// an r-refined test grid.
pub fn wave_graph_norm(u: &SpaceTimeFunction, refine: usize) -> Result<WaveDualNormReport> {
    let (fine_time, fine_space, f) = residual_action_refined(u, refine)?;
    let time = assemble_temporal_matrices(&fine_time);
    let space = assemble_temporal_matrices(&fine_space);
    let gram = h11_gram(&time, &space, TemporalBc::TestZeroEnd);
    let (value, w) = dual_norm_by_cg(&gram, &f)?;
    Ok(WaveDualNormReport {
        which: WhichNorm::Graph,
        value,
        refinement: refine,
        representer: SpaceTimeFunction::new(
            TensorGrid::new(fine_time, fine_space),
            SpaceTimeBc::Test,
            w,
        )?,
    })
}

/// Dual norm of the residual pairing over test functions vanishing at both
/// t = 0 and t = T. For an exact solution of the wave equation this drops
/// the initial-trace sheet of the residual, so smooth interpolants score
/// near zero here while their graph norm stays bounded away from it.
pub fn interior_residual_dual_norm(
    u: &SpaceTimeFunction,
    refine: usize,
) -> Result<WaveDualNormReport> {
    let (fine_time, fine_space, f) = residual_action_refined(u, refine)?;
    // Fine test hats at time nodes 1..nt_f vanish at both ends; the hat at
    // node 0 is the only one alive at t = 0. Drop its block row.
    let nx_f = fine_space.num_nodes() - 2;
    let g = f[nx_f..].to_vec();
    let time = assemble_temporal_matrices(&fine_time);
    let space = assemble_temporal_matrices(&fine_space);
    let gram = h11_gram(&time, &space, TemporalBc::DirichletBothEnds);
    let (value, w) = dual_norm_by_cg(&gram, &g)?;
    Ok(WaveDualNormReport {
        which: WhichNorm::InteriorResidual,
        value,
        refinement: refine,
        representer: SpaceTimeFunction::new(
            TensorGrid::new(fine_time, fine_space),
            SpaceTimeBc::Extended,
            w,
        )?,
    })
}

/// Residual pairing of `u` as a functional on the time-mirrored cylinder,
/// expressed against the free hats of the extended grid. Entries at
/// negative-time nodes are exactly zero: reflected test functions act on
/// (0, T) only through their forward part.
fn extended_action(u: &SpaceTimeFunction) -> Result<(Mesh1d, Vec<f64>)> {
    if u.bc() != SpaceTimeBc::Ansatz {
        return Err(Error::InvalidArgument(
            "the extended dual norm expects an ansatz function vanishing at t = 0".into(),
        ));
    }
    let grid = u.grid();
    let system = assemble_spacetime(grid)?;
    let forward = system.a.apply(u.coeffs());
    let mirrored = grid.time.mirror()?;
    let m = grid.time.num_elements();
    let nsf = grid.num_space_free();
    // Forward time node i sits at mirrored node m + i; free offset -1.
    let mut g = vec![0.0; (2 * m - 1) * nsf];
    for i in 0..m {
        g[(m + i - 1) * nsf..(m + i) * nsf].copy_from_slice(&forward[i * nsf..(i + 1) * nsf]);
    }
    Ok((mirrored, g))
}

/// Extended dual norm sqrt(G^T K_ext^{-1} G) over the H^1_0 space of the
/// mirrored cylinder (0, L) x (-T, T), with the full-gradient Gram.
pub fn wave_extended_dual_norm(u: &SpaceTimeFunction) -> Result<WaveDualNormReport> {
    let (mirrored, g) = extended_action(u)?;
    let time = assemble_temporal_matrices(&mirrored);
    let space = assemble_temporal_matrices(&u.grid().space);
    let gram = h11_gram(&time, &space, TemporalBc::DirichletBothEnds);
    let (value, w) = dual_norm_by_cg(&gram, &g)?;
    Ok(WaveDualNormReport {
        which: WhichNorm::ExtendedDual,
        value,
        refinement: 1,
        representer: SpaceTimeFunction::new(
            TensorGrid::new(mirrored, u.grid().space.clone()),
            SpaceTimeBc::Extended,
            w,
        )?,
    })
}
