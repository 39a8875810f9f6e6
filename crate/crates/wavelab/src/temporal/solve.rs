//! Petrov-Galerkin solver for the modal oscillator and its quadrature oracle.

use super::assemble::{assemble_rhs, assemble_temporal_matrices};
use super::rhs::{DensityProfile, ResolvedRhs, RhsSpec};
use super::{FeFunction1d, ModalParams, TemporalBc};
use crate::error::{Error, Result};
use crate::linalg::banded::BandedLu;
use crate::quadrature::gauss_rule;

fn check_mesh_spans(params: &ModalParams, mesh: &crate::mesh::Mesh1d) -> Result<()> {
    let t = params.t_final();
    let tol = 1e-12 * t.max(1.0);
    if mesh.start().abs() > tol || (mesh.end() - t).abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "mesh spans [{}, {}], expected [0, {}]",
            mesh.start(),
            mesh.end(),
            t
        )));
    }
    Ok(())
}

/// Solves u'' + mu u = f with zero initial value and velocity on `mesh`.
///
/// Ansatz functions vanish at t = 0, test functions at t = T; the initial
/// velocity enters weakly, so no extra constraint is imposed.
pub fn solve_modal(
    params: &ModalParams,
    mesh: &crate::mesh::Mesh1d,
    spec: &RhsSpec,
) -> Result<FeFunction1d> {
    check_mesh_spans(params, mesh)?;
    let tm = assemble_temporal_matrices(mesh);
    let a = tm.system_matrix(params.mu());
    let lu = BandedLu::factor(&a).map_err(|e| match e {
        Error::SingularSystem(_) => Error::SingularSystem(format!(
            "modal system singular at mu = {}, {} elements",
            params.mu(),
            mesh.num_elements()
        )),
        other => other,
    })?;
    let f = assemble_rhs(mesh, spec, TemporalBc::TestZeroEnd)?;
    let u = lu.solve(&f)?;
    FeFunction1d::new(mesh.clone(), TemporalBc::AnsatzZeroStart, u)
}

/// Gauss panels for the convolution in [0, t], split at profile kinks and
/// fine enough to resolve the sin(sqrt(mu) s) kernel.
fn convolution_cuts(profile: &DensityProfile, mu: f64, t: f64) -> Vec<f64> {
    let mut cuts = vec![0.0];
    cuts.extend(profile.knots_within(0.0, t));
    cuts.push(t);
    // At least three panels per kernel period inside each smooth piece.
    let max_len = (2.0 * std::f64::consts::PI / mu.sqrt() / 3.0).min(t.max(1e-300));
    let mut refined = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        refined.push(a);
        let parts = ((b - a) / max_len).ceil().max(1.0) as usize;
        for p in 1..parts {
            refined.push(a + (b - a) * p as f64 / parts as f64);
        }
    }
    refined.push(t);
    refined
}

fn density_profile_of(spec: &RhsSpec) -> Result<DensityProfile> {
    match spec.resolve()? {
        ResolvedRhs::Density(p) => Ok(p),
        ResolvedRhs::PointMass(_) => Err(Error::InvalidArgument(
            "duhamel_oracle handles density loads; use pointmass_solution".into(),
        )),
    }
}

/// Adaptive composite Gauss evaluation of int_0^t kernel(t - s) f(s) ds at
/// each point, halving the panels until two passes agree to 1e-12.
fn convolve_kernel<K: Fn(f64) -> f64>(
    profile: &DensityProfile,
    mu: f64,
    points: &[f64],
    kernel: K,
) -> Result<Vec<f64>> {
    let q = gauss_rule(10).expect("10-point rule");
    let mut out = Vec::with_capacity(points.len());
    for &t in points {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "evaluation time {t} is negative"
            )));
        }
        if t == 0.0 {
            out.push(0.0);
            continue;
        }
        let mut cuts = convolution_cuts(profile, mu, t);
        let integrate = |cuts: &[f64]| -> Result<f64> {
            let mut acc = 0.0;
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let len = b - a;
                for (&x, &wq) in q.points.iter().zip(&q.weights) {
                    let s = a + len * x;
                    acc += wq * len * kernel(t - s) * profile.eval(s)?;
                }
            }
            Ok(acc)
        };
        let mut prev = integrate(&cuts)?;
        let mut converged = false;
        let mut diff = f64::INFINITY;
        for _ in 0..8 {
            let mut next = Vec::with_capacity(cuts.len() * 2);
            for w in cuts.windows(2) {
                next.push(w[0]);
                next.push(0.5 * (w[0] + w[1]));
            }
            next.push(*cuts.last().unwrap());
            cuts = next;
            let cur = integrate(&cuts)?;
            diff = (cur - prev).abs();
            prev = cur;
            if diff <= 1e-12 * prev.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                iterations: 8,
                residual: diff,
                tol: 1e-12,
            });
        }
        out.push(prev);
    }
    Ok(out)
}

/// Reference solution u(t) = (1/sqrt(mu)) int_0^t sin(sqrt(mu)(t-s)) f(s) ds
/// by adaptive composite Gauss quadrature, for density right-hand sides.
///
/// Point masses have the closed form in [`pointmass_solution`]; passing one
/// here is an error so the oracle stays a genuine quadrature.
pub fn duhamel_oracle(params: &ModalParams, spec: &RhsSpec, points: &[f64]) -> Result<Vec<f64>> {
    let profile = density_profile_of(spec)?;
    let root_mu = params.mu().sqrt();
    let vals = convolve_kernel(&profile, params.mu(), points, |d| (root_mu * d).sin())?;
    Ok(vals.into_iter().map(|v| v / root_mu).collect())
}

/// Reference derivative u'(t) = int_0^t cos(sqrt(mu)(t-s)) f(s) ds, the
/// companion of [`duhamel_oracle`] for H1-seminorm error measurement.
pub fn duhamel_derivative_oracle(
    params: &ModalParams,
    spec: &RhsSpec,
    points: &[f64],
) -> Result<Vec<f64>> {
    let profile = density_profile_of(spec)?;
    let root_mu = params.mu().sqrt();
    convolve_kernel(&profile, params.mu(), points, |d| (root_mu * d).cos())
}

/// Exact response to an initial momentum kick: u(t) = w sin(sqrt(mu) t)/sqrt(mu).
pub fn pointmass_solution(params: &ModalParams, weight: f64, points: &[f64]) -> Vec<f64> {
    let root_mu = params.mu().sqrt();
    points
        .iter()
        .map(|&t| weight * (root_mu * t).sin() / root_mu)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_uniform_mesh;
    use crate::temporal::rhs::SampleTable;
    use std::f64::consts::PI;

    #[test]
    fn duhamel_matches_constant_load_closed_form() {
        // f = 1: u(t) = (1 - cos(sqrt(mu) t)) / mu.
        let params = ModalParams::new(PI * PI, 1.0).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Const(1.0));
        let pts = [0.0, 0.3, 0.5, 1.0];
        let u = duhamel_oracle(&params, &spec, &pts).unwrap();
        for (&t, &v) in pts.iter().zip(&u) {
            let exact = (1.0 - (PI * t).cos()) / (PI * PI);
            assert!((v - exact).abs() < 1e-11, "t={t}: {v} vs {exact}");
        }
        // u(1) = 2/pi^2 at mu = pi^2.
        assert!((u[3] - 2.0 / (PI * PI)).abs() < 1e-11);
    }

    #[test]
    fn duhamel_derivative_matches_constant_load_closed_form() {
        // f = 1: u'(t) = sin(sqrt(mu) t) / sqrt(mu).
        let params = ModalParams::new(PI * PI, 1.0).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Const(1.0));
        let pts = [0.0, 0.3, 0.5, 1.0];
        let du = duhamel_derivative_oracle(&params, &spec, &pts).unwrap();
        for (&t, &v) in pts.iter().zip(&du) {
            let exact = (PI * t).sin() / PI;
            assert!((v - exact).abs() < 1e-11, "t={t}: {v} vs {exact}");
        }
    }

    #[test]
    fn duhamel_derivative_rejects_point_masses() {
        let params = ModalParams::new(1.0, 1.0).unwrap();
        let spec = RhsSpec::PointMass { weight: 1.0 };
        assert!(duhamel_derivative_oracle(&params, &spec, &[0.5]).is_err());
    }

    #[test]
    fn duhamel_matches_resonant_load_closed_form() {
        // mu = 1, f = sin t: u(t) = (sin t - t cos t)/2, u(pi) = pi/2.
        let params = ModalParams::new(1.0, PI).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Sine { omega: 1.0 });
        let pts = [0.5, 1.0, 2.0, PI];
        let u = duhamel_oracle(&params, &spec, &pts).unwrap();
        for (&t, &v) in pts.iter().zip(&u) {
            let exact = (t.sin() - t * t.cos()) / 2.0;
            assert!((v - exact).abs() < 1e-11, "t={t}");
        }
        assert!((u[3] - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn duhamel_handles_sampled_profiles_with_kinks() {
        // Piecewise-linear hat load; compare against a very fine trapezoid
        // of the same convolution computed independently.
        let table = SampleTable::new(
            vec![0.0, 0.25, 0.5, 1.0],
            vec![0.0, 1.0, 0.0, 0.0],
        )
        .unwrap();
        let params = ModalParams::new(4.0, 1.0).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Samples(table.clone()));
        let t = 0.9;
        let u = duhamel_oracle(&params, &spec, &[t]).unwrap()[0];
        let n = 400_000;
        let mut acc = 0.0;
        for i in 0..n {
            let s0 = t * i as f64 / n as f64;
            let s1 = t * (i + 1) as f64 / n as f64;
            let g = |s: f64| (2.0 * (t - s)).sin() * table.interp(s).unwrap() / 2.0;
            acc += 0.5 * (s1 - s0) * (g(s0) + g(s1));
        }
        assert!((u - acc).abs() < 1e-8, "{u} vs {acc}");
    }

    #[test]
    fn duhamel_rejects_point_masses() {
        let params = ModalParams::new(1.0, 1.0).unwrap();
        let err = duhamel_oracle(&params, &RhsSpec::PointMass { weight: 1.0 }, &[0.5]);
        assert!(err.is_err());
    }

    #[test]
    fn solver_reproduces_constant_load_solution_at_second_order() {
        let params = ModalParams::new(4.0, 1.0).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Const(1.0));
        let exact = |t: f64| (1.0 - (2.0 * t).cos()) / 4.0;
        let mut errs = Vec::new();
        for n in [16, 32, 64] {
            let mesh = make_uniform_mesh(0.0, 1.0, n).unwrap();
            let u = solve_modal(&params, &mesh, &spec).unwrap();
            errs.push(u.l2_error(exact));
        }
        for w in errs.windows(2) {
            let rate = w[0] / w[1];
            assert!((3.5..=4.5).contains(&rate), "L2 rate {rate}");
        }
    }

    #[test]
    fn solver_matches_duhamel_for_resonant_load() {
        let params = ModalParams::new(1.0, PI).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Sine { omega: 1.0 });
        let mesh = make_uniform_mesh(0.0, PI, 256).unwrap();
        let u = solve_modal(&params, &mesh, &spec).unwrap();
        let pts: Vec<f64> = (1..=8).map(|i| PI * i as f64 / 8.0).collect();
        let reference = duhamel_oracle(&params, &spec, &pts).unwrap();
        for (&t, &r) in pts.iter().zip(&reference) {
            let v = u.eval(t).unwrap();
            assert!((v - r).abs() < 4e-4, "t={t}: {v} vs {r}");
        }
    }

    #[test]
    fn solver_handles_point_mass_kick() {
        // w delta_0 gives u = w sin(sqrt(mu) t)/sqrt(mu); the discrete
        // solution converges to it at second order in L2.
        let params = ModalParams::new(9.0, 1.0).unwrap();
        let spec = RhsSpec::PointMass { weight: 2.0 };
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let mesh = make_uniform_mesh(0.0, 1.0, n).unwrap();
            let u = solve_modal(&params, &mesh, &spec).unwrap();
            errs.push(u.l2_error(|t| 2.0 * (3.0 * t).sin() / 3.0));
        }
        for w in errs.windows(2) {
            let rate = w[0] / w[1];
            assert!((3.5..=4.5).contains(&rate), "L2 rate {rate}");
        }
        let exact = pointmass_solution(&params, 2.0, &[0.5]);
        assert!((exact[0] - 2.0 * 1.5f64.sin() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn solver_stays_regular_for_stiff_modes() {
        // The system matrix is triangular with positive diagonal, so even
        // severely underresolved oscillators produce a finite solution.
        let params = ModalParams::new(1e6, 1.0).unwrap();
        let mesh = make_uniform_mesh(0.0, 1.0, 8).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Const(1.0));
        let u = solve_modal(&params, &mesh, &spec).unwrap();
        assert!(u.coeffs().iter().all(|c| c.is_finite()));
    }

    #[test]
    fn solver_rejects_mismatched_mesh_interval() {
        let params = ModalParams::new(1.0, 2.0).unwrap();
        let mesh = make_uniform_mesh(0.0, 1.0, 8).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Const(1.0));
        assert!(solve_modal(&params, &mesh, &spec).is_err());
    }

    #[test]
    fn solution_vanishes_at_initial_time() {
        let params = ModalParams::new(7.0, 1.5).unwrap();
        let mesh = make_uniform_mesh(0.0, 1.5, 24).unwrap();
        let spec = RhsSpec::Density(DensityProfile::Cosine { omega: 3.0 });
        let u = solve_modal(&params, &mesh, &spec).unwrap();
        assert_eq!(u.eval(0.0).unwrap(), 0.0);
    }
}
