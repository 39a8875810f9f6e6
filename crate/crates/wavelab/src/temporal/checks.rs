//! Consistency checks tying the norms together: graph-norm equivalence and
//! the load-to-solution isometry.

use super::dualnorm::{dual_norm_test, graph_norm};
use super::rhs::RhsSpec;
use super::solve::solve_modal;
use super::{FeFunction1d, ModalParams};
use crate::error::Result;
use crate::mesh::Mesh1d;
use serde::Serialize;

/// Graph norm of a function against the two-sided equivalence with its
/// derivative norm.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub mu: f64,
    pub graph_norm: f64,
    pub derivative_norm: f64,
    pub lower_constant: f64,
    pub upper_constant: f64,
    pub refinement: usize,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Checks lower * ||u'|| <= |||u||| <= upper * ||u'|| with the analytic
/// constants 2/(2 + sqrt(mu) T) and 1 + 4 mu T^2 / pi^2. The discrete sup
/// under-estimates the graph norm, so the lower inequality carries a 5%
/// slack on the graph-norm side; the upper one only tightens discretely.
pub fn equivalence_check(
    params: &ModalParams,
    u: &FeFunction1d,
    refine: usize,
) -> Result<EquivalenceReport> {
    let graph = graph_norm(u, params.mu(), refine)?.value;
    let deriv = u.h1_seminorm();
    let lower = params.infsup_lower_bound();
    let upper = params.continuity_constant();
    let roundoff = 1e-10 * deriv.max(1.0);
    Ok(EquivalenceReport {
        mu: params.mu(),
        graph_norm: graph,
        derivative_norm: deriv,
        lower_constant: lower,
        upper_constant: upper,
        refinement: refine,
        lower_ok: 1.05 * graph >= lower * deriv - roundoff,
        upper_ok: graph <= upper * deriv + roundoff,
    })
}

/// Dual norm of the load against the graph norm of the discrete solution,
/// both measured over the same refined test mesh.
#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    pub rhs_dual_norm: f64,
    pub solution_graph_norm: f64,
    pub ratio: f64,
    pub refinement: usize,
}

/// Solves the modal problem and compares ||f||_dual with |||u_h|||; at
/// refinement 1 the two coincide because the residual represents the load
/// on the discrete test space.
pub fn isometry_check(
    params: &ModalParams,
    mesh: &Mesh1d,
    spec: &RhsSpec,
    refine: usize,
) -> Result<IsometryReport> {
    let u = solve_modal(params, mesh, spec)?;
    let rhs_dual = dual_norm_test(mesh, spec, refine)?.value;
    let graph = graph_norm(&u, params.mu(), refine)?.value;
    Ok(IsometryReport {
        rhs_dual_norm: rhs_dual,
        solution_graph_norm: graph,
        ratio: graph / rhs_dual,
        refinement: refine,
    })
}
