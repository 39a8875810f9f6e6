//! Banded matrices, banded Cholesky, and banded LU with partial pivoting.

use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Rectangular banded matrix in row-major band storage.
///
/// Row i stores columns j with i - kl <= j <= i + ku at
/// `data[i * (kl + ku + 1) + (j - i + kl)]`. Entries outside the band are
/// implicitly zero; writes outside the band are rejected.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    rows: usize,
    cols: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(rows: usize, cols: usize, kl: usize, ku: usize) -> Self {
        Self {
            rows,
            cols,
            kl,
            ku,
            data: vec![0.0; rows * (kl + ku + 1)],
        }
    }

    /// Square symmetric-bandwidth convenience constructor.
    pub fn zeros_symmetric(n: usize, bandwidth: usize) -> Self {
        Self::zeros(n, n, bandwidth, bandwidth)
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.rows && j < self.cols && j + self.kl >= i && i + self.ku >= j
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    /// Entry (i, j); zero outside the band.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Sets entry (i, j); writing outside the band is an error.
    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if !self.in_band(i, j) {
            return Err(Error::InvalidArgument(format!(
                "entry ({i}, {j}) outside band kl={} ku={} of {}x{} matrix",
                self.kl, self.ku, self.rows, self.cols
            )));
        }
        let s = self.slot(i, j);
        self.data[s] = v;
        Ok(())
    }

    /// Adds to entry (i, j); writing outside the band is an error.
    pub fn add(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if !self.in_band(i, j) {
            return Err(Error::InvalidArgument(format!(
                "entry ({i}, {j}) outside band kl={} ku={} of {}x{} matrix",
                self.kl, self.ku, self.rows, self.cols
            )));
        }
        let s = self.slot(i, j);
        self.data[s] += v;
        Ok(())
    }

    /// Column range [lo, hi) of stored entries in row i.
    #[inline]
    pub fn row_span(&self, i: usize) -> (usize, usize) {
        let lo = i.saturating_sub(self.kl);
        let hi = (i + self.ku + 1).min(self.cols);
        (lo, hi)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let (lo, hi) = self.row_span(i);
            let base = self.slot(i, lo);
            let mut s = 0.0;
            for (off, &xj) in x[lo..hi].iter().enumerate() {
                s += self.data[base + off] * xj;
            }
            y[i] = s;
        }
        y
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_transpose dimension mismatch");
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let (lo, hi) = self.row_span(i);
            let base = self.slot(i, lo);
            for (off, yj) in y[lo..hi].iter_mut().enumerate() {
                *yj += self.data[base + off] * xi;
            }
        }
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (lo, hi) = self.row_span(i);
            for j in lo..hi {
                d.set(i, j, self.get(i, j));
            }
        }
        d
    }

    /// Contiguous submatrix on rows [r0, r1) and columns [c0, c1); the band
    /// offsets shift with the index origins.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Result<BandedMatrix> {
        if r1 > self.rows || c1 > self.cols || r0 >= r1 || c0 >= c1 {
            return Err(Error::InvalidArgument(format!(
                "submatrix rows {r0}..{r1} cols {c0}..{c1} out of range for {}x{}",
                self.rows, self.cols
            )));
        }
        // New offset j' - i' = (j - c0) - (i - r0); shift the band accordingly.
        let shift = c0 as isize - r0 as isize;
        let kl = (self.kl as isize + shift).max(0) as usize;
        let ku = (self.ku as isize - shift).max(0) as usize;
        let mut out = BandedMatrix::zeros(r1 - r0, c1 - c0, kl, ku);
        for i in r0..r1 {
            let (lo, hi) = self.row_span(i);
            for j in lo.max(c0)..hi.min(c1) {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.set(i - r0, j - c0, v)?;
                }
            }
        }
        Ok(out)
    }

    /// Maximum relative symmetry defect over the stored band (square only).
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        for i in 0..self.rows {
            let (lo, hi) = self.row_span(i);
            for j in lo..hi.min(self.rows) {
                defect = defect.max((self.get(i, j) - self.get(j, i)).abs() / scale);
            }
        }
        defect
    }
}

/// Cholesky factorization A = L L^T of a symmetric positive-definite banded
/// matrix; L is banded lower triangular with the same bandwidth.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    l: BandedMatrix,
}

/// Factorizes a symmetric positive-definite banded matrix.
pub fn cholesky_banded(a: &BandedMatrix) -> Result<BandedCholesky> {
    if a.rows != a.cols {
        return Err(Error::ShapeMismatch(format!(
            "cholesky requires a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if a.kl != a.ku {
        return Err(Error::ShapeMismatch(format!(
            "cholesky requires symmetric bandwidths, got kl={} ku={}",
            a.kl, a.ku
        )));
    }
    if a.symmetry_defect() > 1e-10 {
        return Err(Error::InvalidArgument(
            "cholesky input is not symmetric".into(),
        ));
    }
    let n = a.rows;
    let bw = a.kl;
    let mut l = BandedMatrix::zeros(n, n, bw, 0);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in j.saturating_sub(bw)..j {
            let v = l.get(j, k);
            d -= v * v;
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let dj = d.sqrt();
        l.set(j, j, dj)?;
        let hi = (j + bw + 1).min(n);
        for i in (j + 1)..hi {
            let mut s = a.get(i, j);
            for k in i.saturating_sub(bw)..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / dj)?;
        }
    }
    Ok(BandedCholesky { l })
}

impl BandedCholesky {
    pub fn dim(&self) -> usize {
        self.l.num_rows()
    }

    /// Solves A x = b via the two triangular sweeps.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "cholesky solve: rhs length {} vs dimension {n}",
                b.len()
            )));
        }
        let bw = self.l.lower_bandwidth();
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for j in i.saturating_sub(bw)..i {
                s -= self.l.get(i, j) * x[j];
            }
            x[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            let hi = (i + bw + 1).min(n);
            for j in (i + 1)..hi {
                s -= self.l.get(j, i) * x[j];
            }
            x[i] = s / self.l.get(i, i);
        }
        Ok(x)
    }

    /// Reconstructs L L^T (for verification).
    pub fn reconstruct(&self) -> DenseMatrix {
        let ld = self.l.to_dense();
        ld.matmul(&ld.transpose()).unwrap()
    }
}

/// LU factorization with partial pivoting of a square banded matrix.
///
/// Pivoting widens the stored upper bandwidth to kl + ku. Storage follows the
/// classic compact band scheme: `u` holds the upper factor with the diagonal
/// in column 0 of each row, `mult` the elimination multipliers.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    u: Vec<f64>,
    mult: Vec<f64>,
    pivot: Vec<usize>,
}

impl BandedLu {
    pub fn factor(a: &BandedMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::ShapeMismatch(format!(
                "banded LU requires a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let kl = a.kl;
        let width = kl + a.ku + 1;
        // Working rows aligned so each row's leftmost stored column sits at 0.
        let mut w = vec![0.0; n * width];
        for i in 0..n {
            let (lo, hi) = a.row_span(i);
            for j in lo..hi {
                w[i * width + (j - lo)] = a.get(i, j);
            }
        }
        let mut mult = vec![0.0; n * kl];
        let mut pivot = vec![0usize; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = w[k * width].abs();
            for i in (k + 1)..=last {
                let v = w[i * width].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularSystem(format!(
                    "zero pivot column at banded elimination step {k}"
                )));
            }
            pivot[k] = piv;
            if piv != k {
                for c in 0..width {
                    w.swap(k * width + c, piv * width + c);
                }
            }
            let inv = 1.0 / w[k * width];
            for i in (k + 1)..=last {
                let m = w[i * width] * inv;
                mult[k * kl + (i - k - 1)] = m;
                // Eliminate and shift the row left one slot; the freed right
                // slot absorbs pivoting fill-in.
                for c in 1..width {
                    w[i * width + c - 1] = w[i * width + c] - m * w[k * width + c];
                }
                w[i * width + width - 1] = 0.0;
            }
        }
        Ok(Self {
            n,
            kl,
            width,
            u: w,
            mult,
            pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "banded LU solve: rhs length {} vs dimension {n}",
                b.len()
            )));
        }
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivot[k]);
            let last = (k + self.kl).min(n - 1);
            for i in (k + 1)..=last {
                x[i] -= self.mult[k * self.kl + (i - k - 1)] * x[k];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            let hi = (self.width - 1).min(n - 1 - i);
            for c in 1..=hi {
                s -= self.u[i * self.width + c] * x[i + c];
            }
            x[i] = s / self.u[i * self.width];
        }
        Ok(x)
    }

    /// Solves A^T x = b using the factorization of A.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "banded LU transpose solve: rhs length {} vs dimension {n}",
                b.len()
            )));
        }
        let mut x = b.to_vec();
        // U^T y = b, forward: column i of U is row entries u[c, i - c].
        for i in 0..n {
            let mut s = x[i];
            let lo = i.saturating_sub(self.width - 1);
            for c in lo..i {
                s -= self.u[c * self.width + (i - c)] * x[c];
            }
            x[i] = s / self.u[i * self.width];
        }
        // Transposed elimination sequence, applied in reverse.
        for k in (0..n).rev() {
            let last = (k + self.kl).min(n - 1);
            let mut s = x[k];
            for i in (k + 1)..=last {
                s -= self.mult[k * self.kl + (i - k - 1)] * x[i];
            }
            x[k] = s;
            x.swap(k, self.pivot[k]);
        }
        Ok(x)
    }
}
