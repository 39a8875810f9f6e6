//! Conjugate gradients with optional diagonal preconditioning.

use crate::error::{Error, Result};

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final unpreconditioned residual 2-norm.
    pub residual_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves A x = b for symmetric positive-definite A given as an operator.
///
/// Converges when ||b - A x|| <= tol * ||b||. `precond_diag`, when given,
/// applies Jacobi preconditioning with those diagonal entries.
pub fn cg_solve<F>(
    apply: F,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    precond_diag: Option<&[f64]>,
) -> Result<CgResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    cg_solve_observed(apply, b, tol, max_iter, precond_diag, |_| {})
}

/// As `cg_solve`, invoking `observe` with the iterate after every step.
pub fn cg_solve_observed<F, O>(
    apply: F,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    precond_diag: Option<&[f64]>,
    mut observe: O,
) -> Result<CgResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
    O: FnMut(&[f64]),
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("cg tolerance must be positive, got {tol}")));
    }
    let n = b.len();
    if let Some(d) = precond_diag {
        if d.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "preconditioner length {} vs system dimension {n}",
                d.len()
            )));
        }
        if d.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidArgument(
                "preconditioner diagonal must be strictly positive".into(),
            ));
        }
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(CgResult {
            x: vec![0.0; n],
            iterations: 0,
            residual_norm: 0.0,
        });
    }
    let precond = |r: &[f64]| -> Vec<f64> {
        match precond_diag {
            Some(d) => r.iter().zip(d).map(|(v, di)| v / di).collect(),
            None => r.to_vec(),
        }
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = apply(&p);
        if ap.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "operator returned length {} vs {n}",
                ap.len()
            )));
        }
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "operator is not positive definite: p^T A p = {pap:.3e}"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        observe(&x);
        let rnorm = norm2(&r);
        if rnorm <= tol * bnorm {
            return Ok(CgResult {
                x,
                iterations: it,
                residual_norm: rnorm,
            });
        }
        z = precond(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rnorm = norm2(&r);
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: rnorm,
        tol: tol * bnorm,
    })
}
