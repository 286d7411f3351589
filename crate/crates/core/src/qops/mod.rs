//! Minimal dense complex-matrix engine for multi-qubit density matrices,
//! unitaries, and POVMs.
//!
//! All values are immutable; every operation returns a fresh value, so the
//! whole module is safe to drive from parallel parameter sweeps.

mod density;
mod eigen;
mod matrix;
mod povm;

pub use density::DensityMatrix;
pub use eigen::{hermitian_eigenvalues, min_eigenvalue, trace_distance};
pub use matrix::{gates, ComplexMatrix, MAX_QUBITS};
pub use povm::{povm_probabilities, PovmElement};

/// Kronecker product with the leftmost factor as the most significant qubit.
pub fn kron<T: crate::scalar::Scalar>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    a.kron(b)
}
