//! Gauss-Legendre quadrature on the reference interval [0, 1].

use crate::error::{Error, Result};

/// Nodes and weights of a quadrature rule on [0, 1]. Weights sum to the
/// reference measure 1.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    /// Integrates `f` over [a, b] by mapping the reference rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for (&x, &w) in self.points.iter().zip(&self.weights) {
            acc += w * f(a + len * x);
        }
        acc * len
    }
}

/// Evaluates the Legendre polynomial P_n and its derivative at x in (-1, 1).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre rule with `n` points mapped to [0, 1].
///
/// Exact for polynomials of degree 2n-1. Supported orders: 1..=10.
pub fn gauss_rule(n: usize) -> Result<Quadrature> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidArgument(format!(
            "gauss rule order must be in 1..=10, got {n}"
        )));
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Roots come in symmetric pairs on (-1, 1); Newton from the Chebyshev guess.
    for i in 0..(n + 1) / 2 {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = x;
        weights[i] = w;
        points[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    // Map (-1, 1) to (0, 1); the Jacobian halves the weights.
    for i in 0..n {
        points[i] = 0.5 * (points[i] + 1.0);
        weights[i] *= 0.5;
    }
    Ok(Quadrature { points, weights })
}
