//! Demonstrations of where uniform stability holds and where it fails:
//! the adversarial modal family, random-density stability sweeps, and the
//! grid-ratio diagnostic.

use super::{
    assemble_spacetime, assemble_wave_rhs, sine_eigenpairs, solve_wave, GridSamples,
    StabilityReport, WaveDomain, WaveRhsSpec,
};
use crate::error::{Error, Result};
use crate::mesh::make_uniform_mesh;
use crate::spacetime::norms::energy_norm;
use crate::spacetime::solve::density_l2_norm;
use crate::temporal::{dual_norm_test, solve_modal, DensityProfile, ModalParams, RhsSpec};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One adversarial mode: the energy-to-data ratio that no constant bounds
/// across k.
#[derive(Debug, Clone, Serialize)]
pub struct ModeRatio {
    pub k: usize,
    pub mu_k: f64,
    pub r_k: f64,
    pub r_k_over_sqrt_mu: f64,
}

/// Growth table of r_k = ||d_t u_k|| / ||f_k||_dual for f_k = cos(sqrt(mu_k) t).
#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub length: f64,
    pub t_final: f64,
    pub n_t: usize,
    /// Temporal elements the worst requested mode needs under the rule below.
    pub required_n_t: usize,
    /// Dispersion stays below one percent in r_k under this resolution rule.
    pub resolution_rule: String,
    pub modes: Vec<ModeRatio>,
}

/// Solves the modal problems for the resonant loads f_k(t) = cos(sqrt(mu_k) t)
/// and tabulates the ratio r_k, which grows like sqrt(mu_k).
pub fn theorem1_demo(domain: &WaveDomain, ks: &[usize], n_t: usize) -> Result<Theorem1Report> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("need at least one mode index".into()));
    }
    let max_k = *ks.iter().max().expect("nonempty");
    let field = sine_eigenpairs(domain.length(), max_k)?;
    let t_final = domain.t_final();
    let mut required_n_t = 0usize;
    for &k in ks {
        let need = (16.0 * field.eigenvalue(k).sqrt() * t_final / std::f64::consts::PI).ceil();
        required_n_t = required_n_t.max(need as usize);
        if (n_t as f64) < need {
            return Err(Error::InvalidArgument(format!(
                "mode {k} is under-resolved: {n_t} temporal elements given, rule \
                 n_t >= 16 sqrt(mu_k) T / pi needs {need}"
            )));
        }
    }
    let mesh = make_uniform_mesh(0.0, t_final, n_t)?;
    let mut modes = Vec::with_capacity(ks.len());
    for &k in ks {
        let mu_k = field.eigenvalue(k);
        let spec = RhsSpec::Density(DensityProfile::Cosine {
            omega: mu_k.sqrt(),
        });
        let params = ModalParams::new(mu_k, t_final)?;
        let u = solve_modal(&params, &mesh, &spec)?;
        let dual = dual_norm_test(&mesh, &spec, 2)?.value;
        let r_k = u.h1_seminorm() / dual;
        modes.push(ModeRatio {
            k,
            mu_k,
            r_k,
            r_k_over_sqrt_mu: r_k / mu_k.sqrt(),
        });
    }
    Ok(Theorem1Report {
        length: domain.length(),
        t_final,
        n_t,
        required_n_t,
        resolution_rule: "n_t >= 16 sqrt(mu_k) T / pi".into(),
        modes,
    })
}

/// Stability check of one grid level at a fixed time-to-space mesh ratio.
#[derive(Debug, Clone, Serialize)]
pub struct CflRow {
    pub level: usize,
    pub n_t: usize,
    pub n_x: usize,
    pub norm_h11: f64,
    pub norm_f_l2: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub violation_factor: f64,
}

/// Diagnostic sweep over refinements at fixed grid ratio q = h_t / h_x.
#[derive(Debug, Clone, Serialize)]
pub struct CflReport {
    pub ratio: f64,
    pub rows: Vec<CflRow>,
}

/// Refines grids at fixed ratio q = h_t / h_x and records the energy of the
/// response to a spatially constant density against the stability bound.
///
/// The constant load excites every odd sine mode with 1/k weights. Modes in
/// the upper half of the spatial spectrum turn exponentially unstable once
/// q > 1, so their violation factors grow with refinement; at q <= 1 all
/// modes stay oscillatory and the bound holds. Levels are capped at the
/// point where the direct solver's conditioning check trips (the
/// amplification reaches the residual tolerance past n_t = 16 at q = 2).
pub fn cfl_demo(domain: &WaveDomain, ratio: f64, levels: &[usize]) -> Result<CflReport> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "grid ratio must be positive and finite, got {ratio}"
        )));
    }
    if levels.is_empty() {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    let (length, t_final) = (domain.length(), domain.t_final());
    let samples = GridSamples::new(
        vec![0.0, t_final],
        vec![0.0, length],
        vec![1.0; 4],
    )?;
    let spec = WaveRhsSpec::GridDensity(samples);
    let mut rows = Vec::with_capacity(levels.len());
    for (level, &n_t) in levels.iter().enumerate() {
        if n_t < 2 {
            return Err(Error::InvalidArgument(format!(
                "level {level} needs at least 2 temporal elements, got {n_t}"
            )));
        }
        // q = h_t / h_x with h_t = T / n_t fixes n_x = round(q L n_t / T).
        let n_x = ((ratio * length * n_t as f64 / t_final).round() as usize).max(2);
        let grid = domain.uniform_grid(n_t, n_x)?;
        let system = assemble_spacetime(&grid)?;
        let (_, report) = super::solve::wave_stability_report(&system, &spec)?;
        rows.push(CflRow {
            level,
            n_t,
            n_x,
            norm_h11: report.norm_h11,
            norm_f_l2: report.norm_f_l2,
            bound: report.bound,
            satisfied: report.satisfied,
            violation_factor: report.violation_factor(),
        });
    }
    Ok(CflReport { ratio, rows })
}

/// Solves `num_cases` random band-limited densities (modes 1..=4, cubic
/// temporal profiles) on `grid` and reports each energy against the bound
/// (T / sqrt 2) ||f||_{L2(Q)}.
pub fn stability_sweep(
    grid: &crate::mesh::TensorGrid,
    num_cases: usize,
    seed: u64,
) -> Result<Vec<StabilityReport>> {
    const MAX_MODE: usize = 4;
    if grid.space.num_elements() < 4 * MAX_MODE {
        return Err(Error::InvalidArgument(format!(
            "{} spatial elements under-resolve mode {MAX_MODE}; need at least {}",
            grid.space.num_elements(),
            4 * MAX_MODE
        )));
    }
    let system = assemble_spacetime(grid)?;
    let t_final = grid.time.end();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(num_cases);
    for _ in 0..num_cases {
        let mut f = vec![0.0; system.a.num_rows()];
        let mut norm_sq = 0.0;
        for k in 1..=MAX_MODE {
            let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let density = DensityProfile::Poly(coeffs);
            // Orthonormal modes: ||f||^2 adds the temporal norms directly.
            norm_sq += density_l2_norm(&density, t_final)?.powi(2);
            let fk = assemble_wave_rhs(grid, &WaveRhsSpec::ModalDensity { k, density })?;
            for (acc, v) in f.iter_mut().zip(&fk) {
                *acc += v;
            }
        }
        let u = solve_wave(&system, &f)?;
        reports.push(StabilityReport::new(
            energy_norm(&u),
            norm_sq.sqrt(),
            t_final,
        ));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::TensorGrid;

    #[test]
    fn adversarial_ratio_grows_linearly_in_the_mode_index() {
        let domain = WaveDomain::new(1.0, 1.0).unwrap();
        let report = theorem1_demo(&domain, &[2, 8], 128).unwrap();
        let (r2, r8) = (report.modes[0].r_k, report.modes[1].r_k);
        assert!(r2 > 0.0);
        let ratio = r8 / r2;
        assert!(
            (3.0..=5.0).contains(&ratio),
            "r_8 / r_2 = {ratio}, expected near 4"
        );
        // Normalized ratios collapse onto T / (2 sqrt 3) ~ 0.289.
        for m in &report.modes {
            assert!(
                (0.2..=0.4).contains(&m.r_k_over_sqrt_mu),
                "mode {}: normalized ratio {}",
                m.k,
                m.r_k_over_sqrt_mu
            );
        }
        assert_eq!(report.required_n_t, 128);
    }

    #[test]
    fn under_resolved_mode_is_rejected() {
        let domain = WaveDomain::new(1.0, 1.0).unwrap();
        let err = theorem1_demo(&domain, &[32], 256).unwrap_err();
        assert!(err.to_string().contains("under-resolved"), "{err}");
    }

    #[test]
    fn unit_ratio_satisfies_the_bound_on_every_level() {
        let domain = WaveDomain::new(1.0, 1.0).unwrap();
        let report = cfl_demo(&domain, 1.0, &[8, 16]).unwrap();
        assert!((report.ratio - 1.0).abs() < 1e-15);
        for row in &report.rows {
            assert!(row.satisfied, "level {} violated: {row:?}", row.level);
            assert_eq!(row.n_t, row.n_x);
        }
    }

    #[test]
    fn double_ratio_amplifies_under_refinement() {
        // Time steps twice the space width: the upper half of the spatial
        // spectrum amplifies exponentially, so refining makes it worse.
        let domain = WaveDomain::new(1.0, 1.0).unwrap();
        let report = cfl_demo(&domain, 2.0, &[4, 8, 12, 16]).unwrap();
        let f: Vec<f64> = report.rows.iter().map(|r| r.violation_factor).collect();
        for w in f.windows(2) {
            assert!(w[1] >= w[0], "factors should not decrease: {f:?}");
        }
        assert!(f[3] > 1.05, "deep levels should violate: {f:?}");
        assert!(!report.rows[3].satisfied);
        assert_eq!(report.rows[0].n_x, 8);
    }

    #[test]
    fn random_band_limited_densities_respect_the_energy_bound() {
        let grid = TensorGrid::new(
            make_uniform_mesh(0.0, 1.0, 24).unwrap(),
            make_uniform_mesh(0.0, 1.0, 24).unwrap(),
        );
        let reports = stability_sweep(&grid, 10, 7).unwrap();
        assert_eq!(reports.len(), 10);
        for (i, r) in reports.iter().enumerate() {
            assert!(r.satisfied, "case {i}: {r:?}");
            assert!(r.norm_f_l2 > 0.0);
        }
    }

    #[test]
    fn sweep_rejects_grids_that_cannot_carry_the_band() {
        let grid = TensorGrid::new(
            make_uniform_mesh(0.0, 1.0, 8).unwrap(),
            make_uniform_mesh(0.0, 1.0, 8).unwrap(),
        );
        assert!(stability_sweep(&grid, 1, 0).is_err());
    }
}
