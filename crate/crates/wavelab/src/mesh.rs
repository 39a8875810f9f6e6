//! One-dimensional meshes, hat-basis evaluation, and tensor-product grids.

use crate::error::{Error, Result};

/// Partition of an interval into elements with strictly ascending nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1d {
    nodes: Vec<f64>,
}

impl Mesh1d {
    /// Builds a mesh from an ascending node list (at least two nodes).
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "mesh needs at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidArgument(format!(
                    "mesh nodes must be strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Width of element `k` spanning (node k, node k+1).
    pub fn width(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn max_width(&self) -> f64 {
        (0..self.num_elements())
            .map(|k| self.width(k))
            .fold(0.0, f64::max)
    }

    /// True when all element widths agree to relative 1e-12.
    pub fn is_uniform(&self) -> bool {
        let h0 = self.width(0);
        (0..self.num_elements()).all(|k| (self.width(k) - h0).abs() <= 1e-12 * h0.abs())
    }

    /// Index of the element containing `x`; interior nodes resolve to the
    /// element on their right, the end node to the last element.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(x >= self.start() && x <= self.end()) {
            return Err(Error::InvalidArgument(format!(
                "point {x} outside mesh interval [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        let k = self.nodes.partition_point(|&t| t <= x);
        Ok(k.saturating_sub(1).min(self.num_elements() - 1))
    }

    /// Splits every element into `r` equal parts. Coarse nodes are copied
    /// bit-exactly, so refined meshes nest.
    pub fn refine(&self, r: usize) -> Result<Mesh1d> {
        if r == 0 {
            return Err(Error::InvalidArgument("refinement factor must be >= 1".into()));
        }
        if r == 1 {
            return Ok(self.clone());
        }
        let mut nodes = Vec::with_capacity(self.num_elements() * r + 1);
        for k in 0..self.num_elements() {
            let (a, b) = (self.nodes[k], self.nodes[k + 1]);
            nodes.push(a);
            for j in 1..r {
                nodes.push(a + (b - a) * (j as f64) / (r as f64));
            }
        }
        nodes.push(self.end());
        Mesh1d::from_nodes(nodes)
    }

    /// Mesh on (-b, b) obtained by mirroring this mesh (which must start at 0)
    /// across the origin. The origin is kept as an exact node.
    pub fn mirror(&self) -> Result<Mesh1d> {
        if self.start() != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "mirror extension requires a mesh starting at 0, got {}",
                self.start()
            )));
        }
        let mut nodes: Vec<f64> = self.nodes.iter().rev().map(|&t| -t).collect();
        nodes.extend_from_slice(&self.nodes[1..]);
        Mesh1d::from_nodes(nodes)
    }
}

/// Uniform mesh with `n` elements on [a, b]; endpoints are exact.
pub fn make_uniform_mesh(a: f64, b: f64, n: usize) -> Result<Mesh1d> {
    if !(b > a) {
        return Err(Error::InvalidArgument(format!(
            "interval must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("mesh needs at least 1 element".into()));
    }
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(a);
    for i in 1..n {
        nodes.push(a + (b - a) * (i as f64) / (n as f64));
    }
    nodes.push(b);
    Mesh1d::from_nodes(nodes)
}

/// Values and derivatives of the two hat functions active on the element
/// containing `x`.
#[derive(Debug, Clone, Copy)]
pub struct HatEval {
    /// Element index.
    pub element: usize,
    /// Global node indices (left, right) of the active hats.
    pub nodes: [usize; 2],
    /// Hat values at x, ordered (left, right); they sum to 1.
    pub values: [f64; 2],
    /// Hat derivatives on the element, ordered (left, right).
    pub derivs: [f64; 2],
}

/// Evaluates the piecewise-linear hat basis at `x`.
pub fn eval_hat_basis(mesh: &Mesh1d, x: f64) -> Result<HatEval> {
    let k = mesh.locate(x)?;
    let (a, b) = (mesh.nodes()[k], mesh.nodes()[k + 1]);
    let h = b - a;
    let s = (x - a) / h;
    Ok(HatEval {
        element: k,
        nodes: [k, k + 1],
        values: [1.0 - s, s],
        derivs: [-1.0 / h, 1.0 / h],
    })
}

/// Tensor-product space-time grid: time mesh on (0, T), space mesh on (0, L).
///
/// Degrees of freedom are numbered time-major: the unknown at time node i and
/// space node j sits at flat index `i * n_space + j` within its block.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    pub time: Mesh1d,
    pub space: Mesh1d,
}

impl TensorGrid {
    pub fn new(time: Mesh1d, space: Mesh1d) -> Self {
        Self { time, space }
    }

    /// Interior space node count (homogeneous Dirichlet in space).
    pub fn num_space_free(&self) -> usize {
        self.space.num_nodes() - 2
    }

    /// Time nodes carrying ansatz unknowns (zero initial trace dropped).
    pub fn num_time_ansatz(&self) -> usize {
        self.time.num_nodes() - 1
    }

    /// Time nodes carrying test unknowns (zero terminal trace dropped).
    pub fn num_time_test(&self) -> usize {
        self.time.num_nodes() - 1
    }

    pub fn num_ansatz(&self) -> usize {
        self.num_time_ansatz() * self.num_space_free()
    }

    pub fn num_test(&self) -> usize {
        self.num_time_test() * self.num_space_free()
    }
}
