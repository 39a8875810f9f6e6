//! Smallest eigenvalue of a symmetric positive pencil (S, M) by inverse
//! power iteration with M-orthonormalization.

use super::dense::{DenseLu, DenseMatrix};
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Operator access to the pencil: S and M symmetric, M positive definite.
pub trait PencilPair {
    fn dim(&self) -> usize;
    fn apply_s(&self, x: &[f64]) -> Vec<f64>;
    fn solve_s(&self, b: &[f64]) -> Result<Vec<f64>>;
    fn apply_m(&self, x: &[f64]) -> Vec<f64>;
}

/// Result of the inverse power iteration.
#[derive(Debug, Clone)]
pub struct PencilEigResult {
    pub lambda: f64,
    /// Eigenvector with x^T M x = 1.
    pub eigenvector: Vec<f64>,
    /// Relative residual ||S x - lambda M x|| / ||S x||.
    pub residual: f64,
    pub iterations: usize,
    /// Rayleigh quotient after each iteration; non-increasing.
    pub rayleigh_history: Vec<f64>,
}

/// Iteration controls. Defaults: tol 1e-8, 500 iterations, seed 42, no shift.
#[derive(Debug, Clone)]
pub struct PencilOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PencilOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
            seed: 42,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Block size of the inverse iteration; clusters narrower than this are
/// resolved by the Rayleigh-Ritz step instead of slowing the iteration.
const BLOCK: usize = 4;

/// Modified Gram-Schmidt in the M inner product, two passes per vector.
fn m_orthonormalize(pencil: &dyn PencilPair, vecs: &mut [Vec<f64>]) -> Result<()> {
    let mut mimages: Vec<Vec<f64>> = Vec::with_capacity(vecs.len());
    for k in 0..vecs.len() {
        let mut cur = std::mem::take(&mut vecs[k]);
        for _ in 0..2 {
            for j in 0..k {
                let c = dot(&cur, &mimages[j]);
                cur.iter_mut().zip(&vecs[j]).for_each(|(a, b)| *a -= c * b);
            }
        }
        let mv = pencil.apply_m(&cur);
        let nrm2 = dot(&cur, &mv);
        if !(nrm2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "M is not positive definite along the iteration (x^T M x = {nrm2:.3e})"
            )));
        }
        let s = nrm2.sqrt();
        cur.iter_mut().for_each(|v| *v /= s);
        mimages.push(mv.iter().map(|v| v / s).collect());
        vecs[k] = cur;
    }
    Ok(())
}

/// Eigendecomposition of a small symmetric matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues ascending with matching orthonormal columns.
fn jacobi_symmetric(h: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let p = h.num_rows();
    let mut a = h.clone();
    let mut v = DenseMatrix::identity(p);
    for _ in 0..60 {
        let mut off = 0.0;
        let mut total = 0.0;
        for i in 0..p {
            for j in 0..p {
                let x = a.get(i, j) * a.get(i, j);
                total += x;
                if i != j {
                    off += x;
                }
            }
        }
        if off <= 1e-28 * total.max(1e-300) {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a.get(i, j);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(j, j) - a.get(i, i)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..p {
                    let aki = a.get(k, i);
                    let akj = a.get(k, j);
                    a.set(k, i, c * aki - s * akj);
                    a.set(k, j, s * aki + c * akj);
                }
                for k in 0..p {
                    let aik = a.get(i, k);
                    let ajk = a.get(j, k);
                    a.set(i, k, c * aik - s * ajk);
                    a.set(j, k, s * aik + c * ajk);
                }
                for k in 0..p {
                    let vki = v.get(k, i);
                    let vkj = v.get(k, j);
                    v.set(k, i, c * vki - s * vkj);
                    v.set(k, j, s * vki + c * vkj);
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&x, &y| a.get(x, x).partial_cmp(&a.get(y, y)).unwrap());
    let values: Vec<f64> = idx.iter().map(|&k| a.get(k, k)).collect();
    let mut sorted = DenseMatrix::zeros(p, p);
    for (newcol, &oldcol) in idx.iter().enumerate() {
        for k in 0..p {
            sorted.set(k, newcol, v.get(k, oldcol));
        }
    }
    (values, sorted)
}

/// Smallest eigenvalue of S x = lambda M x by block inverse iteration
/// Y = S^{-1} M X with M-orthonormalization and a Rayleigh-Ritz step per
/// sweep. The smallest Ritz value is non-increasing; iteration stops when
/// the relative eigenresidual of the smallest pair drops below `opts.tol`.
pub fn smallest_pencil_eig(pencil: &dyn PencilPair, opts: &PencilOptions) -> Result<PencilEigResult> {
    let n = pencil.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("pencil dimension is zero".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pencil tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let p = n.min(BLOCK);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    m_orthonormalize(pencil, &mut basis)?;

    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let mut ys: Vec<Vec<f64>> = Vec::with_capacity(p);
        for x in &basis {
            ys.push(pencil.solve_s(&pencil.apply_m(x))?);
        }
        m_orthonormalize(pencil, &mut ys)?;
        let sys: Vec<Vec<f64>> = ys.iter().map(|y| pencil.apply_s(y)).collect();
        let mut h = DenseMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..=i {
                let v = 0.5 * (dot(&ys[i], &sys[j]) + dot(&ys[j], &sys[i]));
                h.set(i, j, v);
                h.set(j, i, v);
            }
        }
        let (theta, rot) = jacobi_symmetric(&h);
        let combine = |cols: &[Vec<f64>], k: usize| -> Vec<f64> {
            let mut acc = vec![0.0; n];
            for (i, col) in cols.iter().enumerate() {
                let w = rot.get(i, k);
                acc.iter_mut().zip(col).for_each(|(a, c)| *a += w * c);
            }
            acc
        };
        basis = (0..p).map(|k| combine(&ys, k)).collect();
        let rho = theta[0];
        if let Some(&prev) = history.last() {
            debug_assert!(
                rho <= prev * (1.0 + 1e-10) + 1e-300,
                "Rayleigh quotient increased: {prev} -> {rho}"
            );
        }
        history.push(rho);

        let sy = combine(&sys, 0);
        let my = pencil.apply_m(&basis[0]);
        let resid: Vec<f64> = sy.iter().zip(&my).map(|(a, b)| a - rho * b).collect();
        let denom = norm2(&sy).max(1e-300);
        let rel = norm2(&resid) / denom;
        // A numerically zero eigenvalue leaves the relative residual pinned
        // near 1 (0/0); detect it by the Rayleigh quotient collapsing far
        // below its starting scale.
        let collapsed = rho.abs() <= 1e-12 * history[0].abs();
        if rel <= opts.tol || collapsed {
            return Ok(PencilEigResult {
                lambda: rho,
                eigenvector: basis.swap_remove(0),
                residual: rel,
                iterations: it,
                rayleigh_history: history,
            });
        }
    }
    let last = history.last().copied().unwrap_or(f64::NAN);
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: last,
        tol: opts.tol,
    })
}

/// Dense pencil with S factorized up front. A singular S is regularized by
/// the shift 1e-14 * trace(S) for the inner solves only; Rayleigh quotients
/// still use the unshifted S, so a zero eigenvalue is reported as zero.
pub struct DensePencil {
    s: DenseMatrix,
    m: DenseMatrix,
    lu: DenseLu,
}

impl DensePencil {
    pub fn new(s: DenseMatrix, m: DenseMatrix) -> Result<Self> {
        if s.num_rows() != s.num_cols() || m.num_rows() != m.num_cols() || s.num_rows() != m.num_rows()
        {
            return Err(Error::ShapeMismatch(
                "pencil matrices must be square with equal dimension".into(),
            ));
        }
        let lu = match DenseLu::factor(&s) {
            Ok(lu) => lu,
            Err(Error::SingularSystem(_)) => {
                let n = s.num_rows();
                let trace: f64 = (0..n).map(|i| s.get(i, i)).sum();
                let shift = 1e-14 * trace.abs().max(1.0);
                let mut shifted = s.clone();
                for i in 0..n {
                    shifted.add(i, i, shift);
                }
                DenseLu::factor(&shifted)?
            }
            Err(e) => return Err(e),
        };
        Ok(Self { s, m, lu })
    }
}

impl PencilPair for DensePencil {
    fn dim(&self) -> usize {
        self.s.num_rows()
    }

    fn apply_s(&self, x: &[f64]) -> Vec<f64> {
        self.s.matvec(x)
    }

    fn solve_s(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.lu.solve(b)
    }

    fn apply_m(&self, x: &[f64]) -> Vec<f64> {
        self.m.matvec(x)
    }
}

/// Convenience wrapper for explicitly formed dense pencils.
pub fn smallest_pencil_eig_dense(
    s: &DenseMatrix,
    m: &DenseMatrix,
    opts: &PencilOptions,
) -> Result<PencilEigResult> {
    let pencil = DensePencil::new(s.clone(), m.clone())?;
    smallest_pencil_eig(&pencil, opts)
}
