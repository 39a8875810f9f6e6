//! Dense, banded, and Kronecker-structured linear algebra kernels.

pub mod banded;
pub mod cg;
pub mod dense;
pub mod kron;
pub mod pencil;

pub use banded::{cholesky_banded, BandedCholesky, BandedLu, BandedMatrix};
pub use cg::{cg_solve, cg_solve_observed, CgResult};
pub use dense::{DenseLu, DenseMatrix};
pub use kron::{KronTerm, KroneckerOperator};
pub use pencil::{
    smallest_pencil_eig, smallest_pencil_eig_dense, DensePencil, PencilEigResult, PencilOptions,
    PencilPair,
};
