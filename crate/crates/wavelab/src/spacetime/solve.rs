//! Direct solution of the space-time Petrov-Galerkin system.

use super::norms::energy_norm;
use super::{SpaceTimeBc, SpaceTimeFunction, StabilityReport, WaveRhsSpec, WaveSystem};
use crate::error::{Error, Result};
use crate::linalg::BandedLu;
use crate::temporal::DensityProfile;

fn grid_ratio(system: &WaveSystem) -> f64 {
    system.grid.time.max_width() / system.grid.space.max_width()
}

/// Solves A u = F for the ansatz coefficients by banded LU and verifies the
/// residual against 1e-10 ||F||.
pub fn solve_wave(system: &WaveSystem, f: &[f64]) -> Result<SpaceTimeFunction> {
    if f.len() != system.a.num_rows() {
        return Err(Error::ShapeMismatch(format!(
            "load length {} vs {} test unknowns",
            f.len(),
            system.a.num_rows()
        )));
    }
    let q = grid_ratio(system);
    let banded = system.a.to_banded()?;
    let lu = BandedLu::factor(&banded).map_err(|e| match e {
        Error::SingularSystem(msg) => Error::SingularSystem(format!(
            "{msg} (space-time system at grid ratio h_t/h_x = {q:.3})"
        )),
        other => other,
    })?;
    let u = lu.solve(f)?;
    let au = system.a.apply(&u);
    let fnorm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rnorm = au
        .iter()
        .zip(f)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if rnorm > 1e-10 * fnorm.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularSystem(format!(
            "direct solve left residual {rnorm:.3e} above 1e-10 * ||F|| = {:.3e} \
             (ill-conditioned space-time system at grid ratio h_t/h_x = {q:.3})",
            1e-10 * fnorm
        )));
    }
    SpaceTimeFunction::new(system.grid.clone(), SpaceTimeBc::Ansatz, u)
}

/// L2(Q) norm of the right-hand side density; errors on loads that are not
/// L2 densities (initial-velocity kicks).
pub fn rhs_l2_norm(spec: &WaveRhsSpec, t_final: f64) -> Result<f64> {
    match spec {
        WaveRhsSpec::ModalDensity { density, .. } => {
            // The normalized eigenfunction has unit L2(0, L) norm, so the
            // space-time norm reduces to the temporal one.
            density_l2_norm(density, t_final)
        }
        WaveRhsSpec::InitialVelocity { .. } => Err(Error::InvalidArgument(
            "an initial-velocity kick is not an L2(Q) density".into(),
        )),
        WaveRhsSpec::GridDensity(samples) => Ok(samples.l2_norm()),
    }
}

/// L2(0, t_final) norm of a density profile by panel quadrature aligned with
/// its kinks.
pub fn density_l2_norm(density: &DensityProfile, t_final: f64) -> Result<f64> {
    let q = crate::quadrature::gauss_rule(10)?;
    let mut cuts = vec![0.0];
    cuts.extend(density.knots_within(0.0, t_final));
    cuts.push(t_final);
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let panels = ((w[1] - w[0]) / t_final * 64.0).ceil().max(1.0) as usize;
        for p in 0..panels {
            let a = w[0] + (w[1] - w[0]) * p as f64 / panels as f64;
            let b = w[0] + (w[1] - w[0]) * (p + 1) as f64 / panels as f64;
            let mut err = None;
            acc += q.integrate(a, b, |t| match density.eval(t) {
                Ok(v) => v * v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(acc.sqrt())
}

/// Solves the wave problem and reports the H^{1,1} energy of the solution
/// against the stability bound (T/sqrt 2) ||f||_{L2(Q)}.
pub fn wave_stability_report(
    system: &WaveSystem,
    spec: &WaveRhsSpec,
) -> Result<(SpaceTimeFunction, StabilityReport)> {
    let f = super::assemble_wave_rhs(&system.grid, spec)?;
    let u = solve_wave(system, &f)?;
    let t_final = system.grid.time.end();
    let norm_f = rhs_l2_norm(spec, t_final)?;
    let report = StabilityReport::new(energy_norm(&u), norm_f, t_final);
    Ok((u, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseLu;
    use crate::mesh::{make_uniform_mesh, TensorGrid};
    use crate::spacetime::{assemble_spacetime, assemble_wave_rhs, spectral_solve, WaveDomain};
    use crate::temporal::DensityProfile;
    use std::f64::consts::PI;

    fn unit_grid(nt: usize, nx: usize) -> TensorGrid {
        TensorGrid::new(
            make_uniform_mesh(0.0, 1.0, nt).unwrap(),
            make_uniform_mesh(0.0, 1.0, nx).unwrap(),
        )
    }

    #[test]
    fn zero_load_produces_the_zero_field() {
        let sys = assemble_spacetime(&unit_grid(4, 4)).unwrap();
        let u = solve_wave(&sys, &vec![0.0; 12]).unwrap();
        assert!(u.coeffs().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn banded_route_matches_a_dense_factorization() {
        let grid = unit_grid(5, 4);
        let sys = assemble_spacetime(&grid).unwrap();
        let f = assemble_wave_rhs(
            &grid,
            &WaveRhsSpec::ModalDensity {
                k: 1,
                density: DensityProfile::Const(1.0),
            },
        )
        .unwrap();
        let u = solve_wave(&sys, &f).unwrap();
        let dense = sys.a.to_dense();
        let lu = DenseLu::factor(&dense).unwrap();
        let u_dense = lu.solve(&f).unwrap();
        for (a, b) in u.coeffs().iter().zip(&u_dense) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn modal_density_solution_converges_to_the_spectral_oracle() {
        let domain = WaveDomain::new(1.0, 1.0).unwrap();
        let spec = WaveRhsSpec::ModalDensity {
            k: 1,
            density: DensityProfile::Const(1.0),
        };
        let mut errs = Vec::new();
        for n in [8usize, 16, 32] {
            let grid = domain.uniform_grid(n, n).unwrap();
            let sys = assemble_spacetime(&grid).unwrap();
            let f = assemble_wave_rhs(&grid, &spec).unwrap();
            let u = solve_wave(&sys, &f).unwrap();
            let err = u.l2_error(|x, t| {
                (1.0 - (PI * t).cos()) / (PI * PI) * 2.0f64.sqrt() * (PI * x).sin()
            });
            errs.push(err);
        }
        for w in errs.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!((1.5..=2.6).contains(&rate), "rate {rate}, errors {errs:?}");
        }
        // Spot check against the oracle at the finest level's final time.
        let times: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
        let field = spectral_solve(&domain, &spec, 2, &times).unwrap();
        let expect = field.eval(0.5, 32);
        let grid = domain.uniform_grid(32, 32).unwrap();
        let sys = assemble_spacetime(&grid).unwrap();
        let u = solve_wave(&sys, &assemble_wave_rhs(&grid, &spec).unwrap()).unwrap();
        assert!((u.eval(0.5, 1.0).unwrap() - expect).abs() < 3e-3);
    }

    #[test]
    fn temporal_columns_match_the_modal_reduction_at_matched_meshes() {
        // With f = g(t) phi_k, the mass-projected mode-k column of the full
        // solve satisfies the 1D system with the discrete eigenvalue of the
        // uniform spatial pencil, so both routes agree to solver roundoff.
        let grid = unit_grid(12, 12);
        let sys = assemble_spacetime(&grid).unwrap();
        let k = 2usize;
        let density = DensityProfile::Sine { omega: 2.0 };
        let f = assemble_wave_rhs(
            &grid,
            &WaveRhsSpec::ModalDensity {
                k,
                density: density.clone(),
            },
        )
        .unwrap();
        let u = solve_wave(&sys, &f).unwrap();

        let nx = 12usize;
        let h = 1.0 / nx as f64;
        let omega = k as f64 * PI;
        // Discrete pencil eigenvalue of (K_x, M_x) on the uniform mesh.
        let lam = 6.0 / (h * h) * (1.0 - (omega * h).cos()) / (2.0 + (omega * h).cos());
        // Mode vector at interior nodes and its mass image.
        let phi: Vec<f64> = (1..nx)
            .map(|j| 2.0f64.sqrt() * (omega * (j as f64) * h).sin())
            .collect();
        let m_x = sys.space.mass_restricted(crate::temporal::TemporalBc::DirichletBothEnds);
        let m_phi = m_x.matvec(&phi);
        let phi_m_phi: f64 = phi.iter().zip(&m_phi).map(|(a, b)| a * b).sum();

        // Projected temporal column of the space-time solution.
        let nsf = grid.num_space_free();
        let mut projected = Vec::new();
        for it in 0..grid.num_time_ansatz() {
            let row = &u.coeffs()[it * nsf..(it + 1) * nsf];
            let num: f64 = row.iter().zip(&m_phi).map(|(a, b)| a * b).sum();
            projected.push(num / phi_m_phi);
        }

        // 1D solve with mu = discrete eigenvalue; the modal load scale is the
        // ratio of the sine hat-load to the mass image, constant over nodes.
        let sx = crate::spacetime::spatial_mode_load(&grid.space, k).unwrap();
        let scale = sx[0] / m_phi[0];
        let params = crate::temporal::ModalParams::new(lam, 1.0).unwrap();
        let mut reduced = crate::temporal::solve_modal(
            &params,
            &grid.time,
            &crate::temporal::RhsSpec::Density(density),
        )
        .unwrap();
        let coeffs: Vec<f64> = reduced.coeffs().iter().map(|c| c * scale).collect();
        reduced = crate::temporal::FeFunction1d::new(
            grid.time.clone(),
            crate::temporal::TemporalBc::AnsatzZeroStart,
            coeffs,
        )
        .unwrap();

        for (a, b) in projected.iter().zip(reduced.coeffs()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn initial_velocity_reproduces_the_separable_standing_wave() {
        let domain = WaveDomain::new(1.0, 1.0).unwrap();
        let grid = domain.uniform_grid(64, 64).unwrap();
        let sys = assemble_spacetime(&grid).unwrap();
        let amp = PI / 2.0f64.sqrt();
        let f = assemble_wave_rhs(&grid, &WaveRhsSpec::InitialVelocity { k: 1, amplitude: amp })
            .unwrap();
        let u = solve_wave(&sys, &f).unwrap();
        let err = u.l2_error(|x, t| (PI * x).sin() * (PI * t).sin());
        let norm = 0.5; // L2(Q) norm of sin(pi x) sin(pi t)
        assert!(err / norm <= 0.02, "relative error {}", err / norm);
    }

    #[test]
    fn stability_report_for_a_smooth_modal_density() {
        let grid = unit_grid(16, 16);
        let sys = assemble_spacetime(&grid).unwrap();
        let spec = WaveRhsSpec::ModalDensity {
            k: 1,
            density: DensityProfile::Sine { omega: PI },
        };
        let (_, report) = wave_stability_report(&sys, &spec).unwrap();
        assert!(report.satisfied, "{report:?}");
        assert!((report.norm_f_l2 - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(report.bound > 0.0);
    }

    #[test]
    fn rhs_norm_rejects_initial_velocity_kicks() {
        assert!(rhs_l2_norm(&WaveRhsSpec::InitialVelocity { k: 1, amplitude: 1.0 }, 1.0).is_err());
    }

    #[test]
    fn density_norm_is_exact_for_polynomials_and_samples() {
        // ||t||_{L2(0,1)} = 1/sqrt(3).
        let p = DensityProfile::Poly(vec![0.0, 1.0]);
        assert!((density_l2_norm(&p, 1.0).unwrap() - 1.0 / 3.0f64.sqrt()).abs() < 1e-14);
        // Piecewise-linear hat peaking at 1/2: per-element mass gives 1/3.
        let table = crate::temporal::SampleTable::new(
            vec![0.0, 0.5, 1.0],
            vec![0.0, 1.0, 0.0],
        )
        .unwrap();
        let s = DensityProfile::Samples(table);
        assert!((density_l2_norm(&s, 1.0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }
}
