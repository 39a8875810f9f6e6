//! Assembly of the tensor-product wave system, its H^{1,1} Gram operators,
//! load vectors, and the cross matrices used by refined dual norms.

use super::WaveRhsSpec;
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, KronTerm, KroneckerOperator};
use crate::mesh::{Mesh1d, TensorGrid};
use crate::quadrature::gauss_rule;
use crate::temporal::{
    assemble_rhs, assemble_temporal_matrices, RhsSpec, TemporalBc, TemporalMatrices,
};
use std::path::Path;

/// Assembled wave problem on one tensor grid: the Petrov-Galerkin operator
/// A = -(D_t kron M_x) + (C_t kron K_x) together with the H^{1,1} Gram
/// operators of the test and ansatz spaces.
#[derive(Debug, Clone)]
pub struct WaveSystem {
    pub grid: TensorGrid,
    /// 1D matrices of the time mesh.
    pub time: TemporalMatrices,
    /// 1D matrices of the space mesh.
    pub space: TemporalMatrices,
    /// Petrov-Galerkin operator, test rows by ansatz columns.
    pub a: KroneckerOperator,
    /// H^{1,1} Gram of the test space: K_t kron M_x + M_t kron K_x.
    pub n_test: KroneckerOperator,
    /// H^{1,1} Gram of the ansatz space.
    pub m_ansatz: KroneckerOperator,
}

/// Assembles the wave operator and both Gram operators on `grid`.
pub fn assemble_spacetime(grid: &TensorGrid) -> Result<WaveSystem> {
    if grid.num_space_free() == 0 {
        return Err(Error::InvalidArgument(
            "space mesh needs at least 2 elements for one interior node".into(),
        ));
    }
    let time = assemble_temporal_matrices(&grid.time);
    let space = assemble_temporal_matrices(&grid.space);
    let m_x = space.mass_restricted(TemporalBc::DirichletBothEnds);
    let k_x = space.stiffness_restricted(TemporalBc::DirichletBothEnds);
    let a = KroneckerOperator::new(vec![
        KronTerm {
            coeff: -1.0,
            time: time.d.clone(),
            space: m_x.clone(),
        },
        KronTerm {
            coeff: 1.0,
            time: time.c.clone(),
            space: k_x.clone(),
        },
    ])?;
    let n_test = KroneckerOperator::new(vec![
        KronTerm {
            coeff: 1.0,
            time: time.stiffness_restricted(TemporalBc::TestZeroEnd),
            space: m_x.clone(),
        },
        KronTerm {
            coeff: 1.0,
            time: time.mass_restricted(TemporalBc::TestZeroEnd),
            space: k_x.clone(),
        },
    ])?;
    let m_ansatz = KroneckerOperator::new(vec![
        KronTerm {
            coeff: 1.0,
            time: time.stiffness_restricted(TemporalBc::AnsatzZeroStart),
            space: m_x,
        },
        KronTerm {
            coeff: 1.0,
            time: time.mass_restricted(TemporalBc::AnsatzZeroStart),
            space: k_x,
        },
    ])?;
    Ok(WaveSystem {
        grid: grid.clone(),
        time,
        space,
        a,
        n_test,
        m_ansatz,
    })
}

/// Exact loads <phi_k, hat_i> of the normalized eigenfunction against the
/// interior hats of `mesh`.
pub fn spatial_mode_load(mesh: &Mesh1d, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("mode index must be >= 1".into()));
    }
    let length = mesh.end() - mesh.start();
    let a0 = mesh.start();
    let scale = (2.0 / length).sqrt();
    let omega = k as f64 * std::f64::consts::PI / length;
    let q = gauss_rule(10)?;
    let n = mesh.num_nodes();
    let mut full = vec![0.0; n];
    for e in 0..mesh.num_elements() {
        let (x0, h) = (mesh.nodes()[e], mesh.width(e));
        for (&p, &w) in q.points.iter().zip(&q.weights) {
            let x = x0 + h * p;
            let f = scale * (omega * (x - a0)).sin();
            full[e] += w * h * f * (1.0 - p);
            full[e + 1] += w * h * f * p;
        }
    }
    Ok(full[1..n - 1].to_vec())
}

/// Rectangular table of density samples f(t_i, x_j) on its own grid, read
/// row-per-time-node, evaluated by bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    xs: Vec<f64>,
    ts: Vec<f64>,
    /// Row-major values, values[i * xs.len() + j] = f(t_i, x_j).
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(ts: Vec<f64>, xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ts.len() < 2 || xs.len() < 2 {
            return Err(Error::MalformedSamples(
                "grid samples need at least 2 time and 2 space abscissae".into(),
            ));
        }
        if values.len() != ts.len() * xs.len() {
            return Err(Error::MalformedSamples(format!(
                "{} values for a {} x {} grid",
                values.len(),
                ts.len(),
                xs.len()
            )));
        }
        for w in ts.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::MalformedSamples(format!(
                    "time abscissae must be strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::MalformedSamples(format!(
                    "space abscissae must be strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if ts
            .iter()
            .chain(xs.iter())
            .chain(values.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::MalformedSamples("non-finite grid sample entry".into()));
        }
        Ok(Self { xs, ts, values })
    }

    /// Parses CSV text: a header row `t,x_0,...,x_m`, then one row per time
    /// node `t_i,f(t_i,x_0),...,f(t_i,x_m)`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| {
            Error::MalformedSamples("grid sample file is empty".into())
        })?;
        let head: Vec<&str> = header.split(',').map(str::trim).collect();
        if head.len() < 3 {
            return Err(Error::MalformedSamples(format!(
                "header needs a label plus at least 2 x-coordinates, found {} cells",
                head.len()
            )));
        }
        let xs: Vec<f64> = head[1..]
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| {
                    Error::MalformedSamples(format!("header x-coordinate '{c}' is not a number"))
                })
            })
            .collect::<Result<_>>()?;
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in lines {
            let cells: Vec<&str> = raw.split(',').map(str::trim).collect();
            if cells.len() != xs.len() + 1 {
                return Err(Error::MalformedSamples(format!(
                    "line {}: expected {} columns, found {}",
                    lineno + 1,
                    xs.len() + 1,
                    cells.len()
                )));
            }
            let mut nums = cells.iter().map(|c| {
                c.parse::<f64>().map_err(|_| {
                    Error::MalformedSamples(format!(
                        "line {}: cannot parse '{c}' as a number",
                        lineno + 1
                    ))
                })
            });
            ts.push(nums.next().unwrap()?);
            for v in nums {
                values.push(v?);
            }
        }
        Self::new(ts, xs, values)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_str(&text)
    }

    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn points(&self) -> &[f64] {
        &self.xs
    }

    fn bracket(grid: &[f64], v: f64) -> usize {
        grid.partition_point(|&s| s <= v)
            .saturating_sub(1)
            .min(grid.len() - 2)
    }

    /// Bilinear interpolation; (t, x) must lie within the sampled rectangle.
    pub fn eval(&self, t: f64, x: f64) -> Result<f64> {
        let in_t = t >= self.ts[0] && t <= *self.ts.last().unwrap();
        let in_x = x >= self.xs[0] && x <= *self.xs.last().unwrap();
        if !in_t || !in_x {
            return Err(Error::InvalidArgument(format!(
                "grid sample evaluation at (t={t}, x={x}) outside sampled rectangle"
            )));
        }
        let i = Self::bracket(&self.ts, t);
        let j = Self::bracket(&self.xs, x);
        let st = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i]);
        let sx = (x - self.xs[j]) / (self.xs[j + 1] - self.xs[j]);
        let m = self.xs.len();
        let v00 = self.values[i * m + j];
        let v01 = self.values[i * m + j + 1];
        let v10 = self.values[(i + 1) * m + j];
        let v11 = self.values[(i + 1) * m + j + 1];
        Ok((1.0 - st) * ((1.0 - sx) * v00 + sx * v01) + st * ((1.0 - sx) * v10 + sx * v11))
    }

    /// L2 norm of the bilinear interpolant over its sampled rectangle, exact.
    pub fn l2_norm(&self) -> f64 {
        let m = self.xs.len();
        let q = |a: f64, b: f64, c: f64, d: f64| (2.0 * a * c + a * d + b * c + 2.0 * b * d) / 6.0;
        let mut acc = 0.0;
        for i in 0..self.ts.len() - 1 {
            let ht = self.ts[i + 1] - self.ts[i];
            for j in 0..m - 1 {
                let hx = self.xs[j + 1] - self.xs[j];
                let v00 = self.values[i * m + j];
                let v01 = self.values[i * m + j + 1];
                let v10 = self.values[(i + 1) * m + j];
                let v11 = self.values[(i + 1) * m + j + 1];
                let row0 = q(v00, v01, v00, v01);
                let cross = q(v00, v01, v10, v11);
                let row1 = q(v10, v11, v10, v11);
                acc += ht * hx * (row0 + cross + row1) / 3.0;
            }
        }
        acc.sqrt()
    }

    /// Sample abscissae strictly inside (lo, hi) along time or space.
    fn knots_within(grid: &[f64], lo: f64, hi: f64) -> Vec<f64> {
        grid.iter().copied().filter(|&s| s > lo && s < hi).collect()
    }
}

/// Load vector <f, psi_i> over the test space of `grid`, time-major.
pub fn assemble_wave_rhs(grid: &TensorGrid, spec: &WaveRhsSpec) -> Result<Vec<f64>> {
    let nsf = grid.num_space_free();
    let ntf = grid.num_time_test();
    match spec {
        WaveRhsSpec::ModalDensity { k, density } => {
            let temporal = assemble_rhs(
                &grid.time,
                &RhsSpec::Density(density.clone()),
                TemporalBc::TestZeroEnd,
            )?;
            let spatial = spatial_mode_load(&grid.space, *k)?;
            let mut f = vec![0.0; ntf * nsf];
            for (it, &gt) in temporal.iter().enumerate() {
                for (ix, &sx) in spatial.iter().enumerate() {
                    f[it * nsf + ix] = gt * sx;
                }
            }
            Ok(f)
        }
        WaveRhsSpec::InitialVelocity { k, amplitude } => {
            if !amplitude.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "initial velocity amplitude must be finite, got {amplitude}"
                )));
            }
            // Temporal test hats evaluated at t = 0: only the node-0 hat is
            // active there, with value one.
            let spatial = spatial_mode_load(&grid.space, *k)?;
            let mut f = vec![0.0; ntf * nsf];
            for (ix, &sx) in spatial.iter().enumerate() {
                f[ix] = amplitude * sx;
            }
            Ok(f)
        }
        WaveRhsSpec::GridDensity(samples) => assemble_grid_density(grid, samples),
    }
}

fn assemble_grid_density(grid: &TensorGrid, samples: &GridSamples) -> Result<Vec<f64>> {
    let nsf = grid.num_space_free();
    let nxn = grid.space.num_nodes();
    let q = gauss_rule(3)?;
    let mut f = vec![0.0; grid.num_time_test() * nsf];
    let mut add = |node_t: usize, node_x: usize, v: f64| {
        // Test space drops the t = T node; space keeps interior nodes only.
        if node_t + 1 < grid.time.num_nodes() && node_x > 0 && node_x + 1 < nxn {
            f[node_t * nsf + (node_x - 1)] += v;
        }
    };
    for et in 0..grid.time.num_elements() {
        let (t0, t1) = (grid.time.nodes()[et], grid.time.nodes()[et + 1]);
        let mut t_cuts = vec![t0];
        t_cuts.extend(GridSamples::knots_within(&samples.ts, t0, t1));
        t_cuts.push(t1);
        for ex in 0..grid.space.num_elements() {
            let (x0, x1) = (grid.space.nodes()[ex], grid.space.nodes()[ex + 1]);
            let mut x_cuts = vec![x0];
            x_cuts.extend(GridSamples::knots_within(&samples.xs, x0, x1));
            x_cuts.push(x1);
            for tw in t_cuts.windows(2) {
                for xw in x_cuts.windows(2) {
                    for (&pt, &wt) in q.points.iter().zip(&q.weights) {
                        let t = tw[0] + (tw[1] - tw[0]) * pt;
                        let st = (t - t0) / (t1 - t0);
                        for (&px, &wx) in q.points.iter().zip(&q.weights) {
                            let x = xw[0] + (xw[1] - xw[0]) * px;
                            let sx = (x - x0) / (x1 - x0);
                            let val = samples.eval(t, x)?;
                            let w = wt * wx * (tw[1] - tw[0]) * (xw[1] - xw[0]) * val;
                            add(et, ex, w * (1.0 - st) * (1.0 - sx));
                            add(et, ex + 1, w * (1.0 - st) * sx);
                            add(et + 1, ex, w * st * (1.0 - sx));
                            add(et + 1, ex + 1, w * st * sx);
                        }
                    }
                }
            }
        }
    }
    Ok(f)
}

/// Cross mass and stiffness matrices pairing interior hats of a nested fine
/// mesh (rows) against interior hats of the coarse mesh (columns).
pub fn spatial_cross_matrices(
    fine: &Mesh1d,
    coarse: &Mesh1d,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let tol = 1e-12 * (coarse.end() - coarse.start()).abs().max(1.0);
    if (fine.start() - coarse.start()).abs() > tol || (fine.end() - coarse.end()).abs() > tol {
        return Err(Error::InvalidArgument(format!(
            "meshes cover different intervals: [{}, {}] vs [{}, {}]",
            fine.start(),
            fine.end(),
            coarse.start(),
            coarse.end()
        )));
    }
    let nf = fine.num_nodes();
    let nc = coarse.num_nodes();
    let mut mass = DenseMatrix::zeros(nf - 2, nc - 2);
    let mut stiff = DenseMatrix::zeros(nf - 2, nc - 2);
    let q = gauss_rule(3)?;
    for e in 0..fine.num_elements() {
        let (a, h) = (fine.nodes()[e], fine.width(e));
        // Each fine element lies inside one coarse element when the meshes
        // nest; locate it once by the midpoint.
        let ec = coarse.locate(a + 0.5 * h)?;
        let (ca, ch) = (coarse.nodes()[ec], coarse.width(ec));
        for (&p, &w) in q.points.iter().zip(&q.weights) {
            let x = a + h * p;
            let s = (x - ca) / ch;
            let fine_vals = [(e, 1.0 - p, -1.0 / h), (e + 1, p, 1.0 / h)];
            let coarse_vals = [(ec, 1.0 - s, -1.0 / ch), (ec + 1, s, 1.0 / ch)];
            for &(ni, vi, di) in &fine_vals {
                if ni == 0 || ni + 1 == nf {
                    continue;
                }
                for &(nj, vj, dj) in &coarse_vals {
                    if nj == 0 || nj + 1 == nc {
                        continue;
                    }
                    mass.add(ni - 1, nj - 1, w * h * vi * vj);
                    stiff.add(ni - 1, nj - 1, w * h * di * dj);
                }
            }
        }
    }
    Ok((mass, stiff))
}
