//! Sums of Kronecker products of banded 1D factor matrices.
//!
//! An operator sum_i c_i (A_i kron B_i) acts on vectors stored time-major:
//! the coefficient at time index i and space index j sits at i * n_space + j.
//! The apply never materializes the product matrix.

use super::banded::BandedMatrix;
use super::dense::DenseMatrix;
use crate::error::{Error, Result};

/// One term c * (A kron B): `time` is the factor acting on the time index,
/// `space` the factor acting on the space index.
#[derive(Debug, Clone)]
pub struct KronTerm {
    pub coeff: f64,
    pub time: BandedMatrix,
    pub space: BandedMatrix,
}

/// Operator sum_i c_i (A_i kron B_i) with consistent factor shapes.
#[derive(Debug, Clone)]
pub struct KroneckerOperator {
    terms: Vec<KronTerm>,
}

impl KroneckerOperator {
    pub fn new(terms: Vec<KronTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "kronecker operator needs at least one term".into(),
            ));
        }
        let (rt, ct) = (terms[0].time.num_rows(), terms[0].time.num_cols());
        let (rs, cs) = (terms[0].space.num_rows(), terms[0].space.num_cols());
        for (k, t) in terms.iter().enumerate() {
            if t.time.num_rows() != rt
                || t.time.num_cols() != ct
                || t.space.num_rows() != rs
                || t.space.num_cols() != cs
            {
                return Err(Error::ShapeMismatch(format!(
                    "kronecker term {k} has inconsistent factor shapes"
                )));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[KronTerm] {
        &self.terms
    }

    pub fn num_rows(&self) -> usize {
        self.terms[0].time.num_rows() * self.terms[0].space.num_rows()
    }

    pub fn num_cols(&self) -> usize {
        self.terms[0].time.num_cols() * self.terms[0].space.num_cols()
    }

    /// y = (sum_i c_i A_i kron B_i) x without forming the product matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.num_cols(), "kron apply dimension mismatch");
        let rs = self.terms[0].space.num_rows();
        let cs = self.terms[0].space.num_cols();
        let ct = self.terms[0].time.num_cols();
        let rt = self.terms[0].time.num_rows();
        let mut y = vec![0.0; self.num_rows()];
        let mut tmp = vec![0.0; ct * rs];
        for term in &self.terms {
            // tmp[j_t, :] = B x[j_t, :]
            for jt in 0..ct {
                let bx = term.space.matvec(&x[jt * cs..(jt + 1) * cs]);
                tmp[jt * rs..(jt + 1) * rs].copy_from_slice(&bx);
            }
            // y[i_t, :] += c * sum_{j_t} A[i_t, j_t] tmp[j_t, :]
            for it in 0..rt {
                let (lo, hi) = term.time.row_span(it);
                for jt in lo..hi {
                    let a = term.coeff * term.time.get(it, jt);
                    if a != 0.0 {
                        let src = &tmp[jt * rs..(jt + 1) * rs];
                        let dst = &mut y[it * rs..(it + 1) * rs];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += a * s;
                        }
                    }
                }
            }
        }
        y
    }

    /// y = (sum_i c_i A_i kron B_i)^T x.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.num_rows(), "kron apply_transpose dimension mismatch");
        let rs = self.terms[0].space.num_rows();
        let cs = self.terms[0].space.num_cols();
        let rt = self.terms[0].time.num_rows();
        let mut y = vec![0.0; self.num_cols()];
        let mut tmp = vec![0.0; rt * cs];
        for term in &self.terms {
            for it in 0..rt {
                let btx = term.space.matvec_transpose(&x[it * rs..(it + 1) * rs]);
                tmp[it * cs..(it + 1) * cs].copy_from_slice(&btx);
            }
            for it in 0..rt {
                let (lo, hi) = term.time.row_span(it);
                for jt in lo..hi {
                    let a = term.coeff * term.time.get(it, jt);
                    if a != 0.0 {
                        let src = &tmp[it * cs..(it + 1) * cs];
                        let dst = &mut y[jt * cs..(jt + 1) * cs];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += a * s;
                        }
                    }
                }
            }
        }
        y
    }

    /// Diagonal of the operator (square factors only), for preconditioning.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if self.num_rows() != self.num_cols() {
            return Err(Error::ShapeMismatch(
                "diagonal requires a square operator".into(),
            ));
        }
        let nt = self.terms[0].time.num_rows();
        let ns = self.terms[0].space.num_rows();
        let mut d = vec![0.0; nt * ns];
        for term in &self.terms {
            let dt = term.time.diagonal();
            let ds = term.space.diagonal();
            for it in 0..nt {
                for js in 0..ns {
                    d[it * ns + js] += term.coeff * dt[it] * ds[js];
                }
            }
        }
        Ok(d)
    }

    /// Materializes the full matrix (tests and small systems only).
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.num_rows(), self.num_cols());
        let rs = self.terms[0].space.num_rows();
        let cs = self.terms[0].space.num_cols();
        for term in &self.terms {
            let td = term.time.to_dense();
            let sd = term.space.to_dense();
            for it in 0..td.num_rows() {
                for jt in 0..td.num_cols() {
                    let a = term.coeff * td.get(it, jt);
                    if a == 0.0 {
                        continue;
                    }
                    for is in 0..rs {
                        for js in 0..cs {
                            out.add(it * rs + is, jt * cs + js, a * sd.get(is, js));
                        }
                    }
                }
            }
        }
        out
    }

    /// Assembles the operator into a banded matrix (square factors only).
    pub fn to_banded(&self) -> Result<BandedMatrix> {
        let ns = self.terms[0].space.num_cols();
        let mut kl = 0usize;
        let mut ku = 0usize;
        for t in &self.terms {
            kl = kl.max(t.time.lower_bandwidth() * ns + t.space.lower_bandwidth());
            ku = ku.max(t.time.upper_bandwidth() * ns + t.space.upper_bandwidth());
        }
        if self.num_rows() != self.num_cols() {
            return Err(Error::ShapeMismatch(
                "banded materialization requires a square operator".into(),
            ));
        }
        let rs = self.terms[0].space.num_rows();
        let mut out = BandedMatrix::zeros(self.num_rows(), self.num_cols(), kl, ku);
        for term in &self.terms {
            for it in 0..term.time.num_rows() {
                let (tlo, thi) = term.time.row_span(it);
                for jt in tlo..thi {
                    let a = term.coeff * term.time.get(it, jt);
                    if a == 0.0 {
                        continue;
                    }
                    for is in 0..rs {
                        let (slo, shi) = term.space.row_span(is);
                        for js in slo..shi {
                            let v = a * term.space.get(is, js);
                            if v != 0.0 {
                                out.add(it * rs + is, jt * ns + js, v)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn random_banded(
        rows: usize,
        cols: usize,
        kl: usize,
        ku: usize,
        rng: &mut ChaCha8Rng,
    ) -> BandedMatrix {
        let mut a = BandedMatrix::zeros(rows, cols, kl, ku);
        for i in 0..rows {
            let (lo, hi) = a.row_span(i);
            for j in lo..hi {
                a.set(i, j, rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
        a
    }

    #[test]
    fn apply_matches_dense_kronecker_five_by_seven() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let op = KroneckerOperator::new(vec![
            KronTerm {
                coeff: -1.0,
                time: random_banded(5, 5, 2, 0, &mut rng),
                space: random_banded(7, 7, 1, 1, &mut rng),
            },
            KronTerm {
                coeff: 2.5,
                time: random_banded(5, 5, 1, 1, &mut rng),
                space: random_banded(7, 7, 1, 1, &mut rng),
            },
        ])
        .unwrap();
        let dense = op.to_dense();
        assert_eq!(dense.num_rows(), 35);
        for _ in 0..100 {
            let x: Vec<f64> = (0..35).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y1 = op.apply(&x);
            let y2 = dense.matvec(&x);
            for (u, v) in y1.iter().zip(&y2) {
                assert!((u - v).abs() < 1e-12);
            }
            let z1 = op.apply_transpose(&x);
            let z2 = dense.matvec_transpose(&x);
            for (u, v) in z1.iter().zip(&z2) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn banded_materialization_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let op = KroneckerOperator::new(vec![
            KronTerm {
                coeff: 1.0,
                time: random_banded(4, 4, 2, 0, &mut rng),
                space: random_banded(5, 5, 1, 1, &mut rng),
            },
            KronTerm {
                coeff: -0.5,
                time: random_banded(4, 4, 1, 1, &mut rng),
                space: random_banded(5, 5, 1, 1, &mut rng),
            },
        ])
        .unwrap();
        let bd = op.to_banded().unwrap().to_dense();
        let dd = op.to_dense();
        for i in 0..20 {
            for j in 0..20 {
                assert!((bd.get(i, j) - dd.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_matches_dense_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let op = KroneckerOperator::new(vec![
            KronTerm {
                coeff: 2.0,
                time: random_banded(6, 6, 1, 1, &mut rng),
                space: random_banded(4, 4, 1, 1, &mut rng),
            },
            KronTerm {
                coeff: 1.0,
                time: random_banded(6, 6, 1, 1, &mut rng),
                space: random_banded(4, 4, 1, 1, &mut rng),
            },
        ])
        .unwrap();
        let d = op.diagonal().unwrap();
        let dd = op.to_dense();
        for i in 0..24 {
            assert!((d[i] - dd.get(i, i)).abs() < 1e-14);
        }
    }

    #[test]
    fn inconsistent_term_shapes_rejected() {
        let t1 = BandedMatrix::zeros(3, 3, 1, 1);
        let s1 = BandedMatrix::zeros(4, 4, 1, 1);
        let t2 = BandedMatrix::zeros(2, 2, 1, 1);
        let s2 = BandedMatrix::zeros(4, 4, 1, 1);
        assert!(KroneckerOperator::new(vec![
            KronTerm { coeff: 1.0, time: t1, space: s1 },
            KronTerm { coeff: 1.0, time: t2, space: s2 },
        ])
        .is_err());
    }

    proptest! {
        // Rank-1 identity: (A kron B)(u kron v) = (A u) kron (B v).
        #[test]
        fn rank_one_identity(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_banded(4, 4, 1, 1, &mut rng);
            let b = random_banded(3, 3, 1, 1, &mut rng);
            let u: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let op = KroneckerOperator::new(vec![KronTerm {
                coeff: 1.0,
                time: a.clone(),
                space: b.clone(),
            }]).unwrap();
            let mut uv = vec![0.0; 12];
            for i in 0..4 {
                for j in 0..3 {
                    uv[i * 3 + j] = u[i] * v[j];
                }
            }
            let lhs = op.apply(&uv);
            let au = a.matvec(&u);
            let bv = b.matvec(&v);
            for i in 0..4 {
                for j in 0..3 {
                    prop_assert!((lhs[i * 3 + j] - au[i] * bv[j]).abs() < 1e-12);
                }
            }
        }
    }
}
