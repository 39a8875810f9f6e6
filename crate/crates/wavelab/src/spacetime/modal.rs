//! Sine eigenbasis of -d_xx on (0, L) and the per-mode spectral oracle.
//!
//! Eigenfunctions are L2-normalized, phi_k(x) = sqrt(2/L) sin(k pi x / L)
//! with eigenvalue mu_k = (k pi / L)^2. Every eigenvalue is computed as
//! k^2 times the stored scale (pi/L)^2, so mu_k / scale recovers the exact
//! integer square without drift.

use super::{WaveDomain, WaveRhsSpec};
use crate::error::{Error, Result};
use crate::temporal::{duhamel_oracle, pointmass_solution, ModalParams, RhsSpec};

/// Modal expansion container: eigenvalues plus per-mode temporal traces
/// sampled at shared time points. Traces are coefficients of the normalized
/// eigenfunctions.
#[derive(Debug, Clone)]
pub struct ModalField {
    length: f64,
    eigenvalue_scale: f64,
    times: Vec<f64>,
    traces: Vec<Vec<f64>>,
}

impl ModalField {
    fn validated(length: f64, num_modes: usize) -> Result<(f64, f64)> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "spatial length must be strictly positive, got {length}"
            )));
        }
        if num_modes == 0 {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        let s = std::f64::consts::PI / length;
        Ok((length, s * s))
    }

    /// Eigenpairs only; traces are empty until filled by an oracle.
    pub fn skeleton(length: f64, num_modes: usize) -> Result<Self> {
        let (length, eigenvalue_scale) = Self::validated(length, num_modes)?;
        Ok(Self {
            length,
            eigenvalue_scale,
            times: Vec::new(),
            traces: vec![Vec::new(); num_modes],
        })
    }

    pub fn with_traces(
        length: f64,
        times: Vec<f64>,
        traces: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let (length, eigenvalue_scale) = Self::validated(length, traces.len().max(1))?;
        if traces.is_empty() {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        for (k, tr) in traces.iter().enumerate() {
            if tr.len() != times.len() {
                return Err(Error::ShapeMismatch(format!(
                    "mode {} has {} samples for {} time points",
                    k + 1,
                    tr.len(),
                    times.len()
                )));
            }
        }
        Ok(Self {
            length,
            eigenvalue_scale,
            times,
            traces,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn num_modes(&self) -> usize {
        self.traces.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// (pi / L)^2, the factor relating eigenvalues to integer squares.
    pub fn eigenvalue_scale(&self) -> f64 {
        self.eigenvalue_scale
    }

    /// mu_k = k^2 (pi/L)^2 for 1-based k.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        ((k * k) as f64) * self.eigenvalue_scale
    }

    /// Normalized eigenfunction phi_k(x) = sqrt(2/L) sin(k pi x / L).
    pub fn eval_mode(&self, k: usize, x: f64) -> f64 {
        (2.0 / self.length).sqrt() * (k as f64 * std::f64::consts::PI * x / self.length).sin()
    }

    /// Temporal trace of 1-based mode k.
    pub fn trace(&self, k: usize) -> &[f64] {
        &self.traces[k - 1]
    }

    /// Sum over modes at spatial point x and time sample index `it`.
    pub fn eval(&self, x: f64, it: usize) -> f64 {
        (1..=self.num_modes())
            .map(|k| self.traces[k - 1][it] * self.eval_mode(k, x))
            .sum()
    }
}

/// Eigenpair skeleton for -d_xx on (0, L) with zero Dirichlet data.
pub fn sine_eigenpairs(length: f64, num_modes: usize) -> Result<ModalField> {
    ModalField::skeleton(length, num_modes)
}

/// Coefficients of the normalized sine expansion from values at the interior
/// nodes of a uniform grid with n = values.len() + 1 elements. Requires at
/// least 4 elements per resolved mode.
pub fn modal_decompose(values: &[f64], length: f64, num_modes: usize) -> Result<Vec<f64>> {
    let n = values.len() + 1;
    if num_modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if n < 4 * num_modes {
        return Err(Error::InvalidArgument(format!(
            "grid with {n} elements under-resolves mode {num_modes}; need at least {}",
            4 * num_modes
        )));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "spatial length must be strictly positive, got {length}"
        )));
    }
    // Discrete sine orthogonality: sum_j sin(jk pi/n) sin(jl pi/n) = n/2 delta_kl,
    // so the nodal sine coefficient is (2/n) sum_j v_j sin(jk pi/n); the factor
    // sqrt(L/2) converts it to the normalized basis.
    let mut coeffs = Vec::with_capacity(num_modes);
    let norm = (length / 2.0).sqrt();
    for k in 1..=num_modes {
        let mut s = 0.0;
        for (j, &v) in values.iter().enumerate() {
            s += v * (((j + 1) * k) as f64 * std::f64::consts::PI / n as f64).sin();
        }
        coeffs.push(norm * 2.0 / n as f64 * s);
    }
    Ok(coeffs)
}

/// Interior nodal values on a uniform grid with `n` elements from normalized
/// sine coefficients; inverse of `modal_decompose` on resolved content.
pub fn modal_reconstruct(coeffs: &[f64], length: f64, n: usize) -> Result<Vec<f64>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 elements, got {n}"
        )));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "spatial length must be strictly positive, got {length}"
        )));
    }
    let scale = (2.0 / length).sqrt();
    let mut values = vec![0.0; n - 1];
    for (j, v) in values.iter_mut().enumerate() {
        for (km1, &c) in coeffs.iter().enumerate() {
            *v += c * scale * (((j + 1) * (km1 + 1)) as f64 * std::f64::consts::PI / n as f64).sin();
        }
    }
    Ok(values)
}

/// Per-mode oracle solution of d_tt u_k + mu_k u_k = g_k with zero initial
/// conditions, sampled at `times`. Modal loads are taken in the normalized
/// basis, so ModalDensity(k, g) contributes g itself to mode k.
pub fn spectral_solve(
    domain: &WaveDomain,
    spec: &WaveRhsSpec,
    num_modes: usize,
    times: &[f64],
) -> Result<ModalField> {
    let field = ModalField::skeleton(domain.length(), num_modes)?;
    let mut traces = vec![vec![0.0; times.len()]; num_modes];
    match spec {
        WaveRhsSpec::ModalDensity { k, density } => {
            if *k == 0 || *k > num_modes {
                return Err(Error::InvalidArgument(format!(
                    "modal density mode {k} outside resolved range 1..={num_modes}"
                )));
            }
            let params = ModalParams::new(field.eigenvalue(*k), end_time(times)?)?;
            traces[*k - 1] =
                duhamel_oracle(&params, &RhsSpec::Density(density.clone()), times)?;
        }
        WaveRhsSpec::InitialVelocity { k, amplitude } => {
            if *k == 0 || *k > num_modes {
                return Err(Error::InvalidArgument(format!(
                    "initial velocity mode {k} outside resolved range 1..={num_modes}"
                )));
            }
            let params = ModalParams::new(field.eigenvalue(*k), end_time(times)?)?;
            traces[*k - 1] = pointmass_solution(&params, *amplitude, times);
        }
        WaveRhsSpec::GridDensity(_) => {
            return Err(Error::InvalidArgument(
                "spectral oracle needs a modal right-hand side, not grid samples".into(),
            ));
        }
    }
    ModalField::with_traces(domain.length(), times.to_vec(), traces)
}

fn end_time(times: &[f64]) -> Result<f64> {
    let t = times.iter().copied().fold(0.0f64, f64::max);
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(
            "spectral solve needs at least one positive sample time".into(),
        ));
    }
    Ok(t)
}
