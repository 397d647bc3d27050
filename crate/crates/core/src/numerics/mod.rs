//! Shared numerical kernel: seeded random streams, complex Gaussian sampling,
//! Hadamard codes, integer-order incomplete Gamma functions, dB conversion and
//! the small dense linear algebra the simulator needs.

mod hadamard;
mod matrix;
mod rng;
mod special;

pub use hadamard::{hadamard, OrthogonalCode};
pub use matrix::{
    dot, inner, norm_sqr, orthonormal_real_basis, pseudo_inverse_left, ComplexMatrix,
    HermitianCholesky, RealMatrix, MAX_CONDITION,
};
pub use rng::{complex_gaussian, fill_complex_gaussian, sample_complex_gaussian, RngStream};
pub use special::{
    db_to_linear, factorial, linear_to_db, lower_incomplete_gamma_int, upper_incomplete_gamma_int,
};
