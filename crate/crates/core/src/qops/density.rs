//! Multi-qubit density matrices.
//!
//! Post-selection bookkeeping keeps unnormalized states (trace < 1) around;
//! construction distinguishes normalized states from post-selected weights.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qops::eigen::min_eigenvalue;
use crate::qops::matrix::{ComplexMatrix, MAX_QUBITS};
use crate::scalar::{check_tol, lit, Scalar};

/// A Hermitian, positive-semidefinite operator on `n_qubits` qubits with
/// trace in (0, 1]. Trace strictly below 1 is only valid for states carrying
/// post-selection weight, flagged by `normalized = false`.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Scalar> {
    mat: ComplexMatrix<T>,
    n_qubits: usize,
    normalized: bool,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates and wraps a normalized state (trace ≈ 1).
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        Self::validated(mat, true)
    }

    /// Validates and wraps a post-selected state with trace in (0, 1].
    pub fn new_unnormalized(mat: ComplexMatrix<T>) -> Result<Self> {
        Self::validated(mat, false)
    }

    fn validated(mat: ComplexMatrix<T>, normalized: bool) -> Result<Self> {
        let n_qubits = mat.n_qubits().ok_or_else(|| {
            Error::DimensionMismatch(format!("dimension {} is not a power of two", mat.dim()))
        })?;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let tol = check_tol::<T>();
        let herm = mat.hermiticity_deviation();
        if herm > tol {
            return Err(Error::NotHermitian {
                deviation: herm.to_f64().unwrap_or(f64::NAN),
            });
        }
        // Eigenvalue floor rather than a Cholesky attempt, so rank-deficient
        // post-selected states are admitted.
        let min_eig = min_eigenvalue(&mat)?;
        if min_eig < -tol {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig.to_f64().unwrap_or(f64::NAN),
            });
        }
        let trace = mat.trace();
        let tr = trace.re;
        if trace.im.abs() > tol
            || tr <= T::zero()
            || tr > T::one() + tol
            || (normalized && (tr - T::one()).abs() > tol)
        {
            return Err(Error::InvalidTrace {
                trace: tr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            mat,
            n_qubits,
            normalized,
        })
    }

    /// Wraps a matrix known to satisfy the invariants, e.g. the output of a
    /// trace-preserving map applied to an already-valid state. Skips the
    /// O(dim³) positivity check; callers are responsible for validity.
    pub fn from_matrix_unchecked(mat: ComplexMatrix<T>, normalized: bool) -> Self {
        let n_qubits = mat
            .n_qubits()
            .expect("unchecked density matrix dimension must be a power of two");
        Self {
            mat,
            n_qubits,
            normalized,
        }
    }

    /// Computational basis state |index⟩⟨index| on `n_qubits` qubits.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        assert!((1..=MAX_QUBITS).contains(&n_qubits));
        let dim = 1usize << n_qubits;
        assert!(index < dim);
        let mut m = ComplexMatrix::zeros(dim);
        m.set(index, index, Complex::new(T::one(), T::zero()));
        Self {
            mat: m,
            n_qubits,
            normalized: true,
        }
    }

    /// Maximally mixed state I/2ⁿ.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let w = T::one() / T::from_usize(dim).unwrap();
        Self {
            mat: ComplexMatrix::identity(dim).scaled(w),
            n_qubits,
            normalized: true,
        }
    }

    /// The two-qubit maximally entangled state (|00⟩ + |11⟩)/√2.
    pub fn bell_phi_plus() -> Self {
        let h = lit::<T>(0.5);
        let mut m = ComplexMatrix::zeros(4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m.set(i, j, Complex::new(h, T::zero()));
            }
        }
        Self {
            mat: m,
            n_qubits: 2,
            normalized: true,
        }
    }

    /// Isotropic two-qubit mixture of the ebit with white noise:
    /// F·|φ⁺⟩⟨φ⁺| + (1−F)/3·(I − |φ⁺⟩⟨φ⁺|). Valid for F ∈ [0, 1];
    /// entangled iff F > 1/2.
    pub fn werner(fidelity: T) -> Result<Self> {
        if fidelity < T::zero() || fidelity > T::one() {
            return Err(Error::InvalidParameter(format!(
                "Werner fidelity {fidelity} outside [0, 1]"
            )));
        }
        let bell = Self::bell_phi_plus().mat;
        let rest_weight = (T::one() - fidelity) / lit(3.0);
        let m = bell
            .scaled(fidelity - rest_weight)
            .plus(&ComplexMatrix::identity(4).scaled(rest_weight));
        Ok(Self {
            mat: m,
            n_qubits: 2,
            normalized: true,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> T {
        self.mat.trace().re
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.mat.get(row, col)
    }

    /// Population of the all-zeros basis state, normalized by the trace.
    pub fn ground_population(&self) -> T {
        self.mat.get(0, 0).re / self.trace()
    }

    /// tr(ρ · op).
    pub fn expectation(&self, op: &ComplexMatrix<T>) -> Complex<T> {
        self.mat.trace_product(op)
    }

    /// Overlap with another state: tr(ρ · σ); for σ a pure-state projector
    /// this is the fidelity ⟨ψ|ρ|ψ⟩.
    pub fn overlap(&self, other: &Self) -> T {
        self.mat.trace_product(&other.mat).re
    }

    /// Tensor product; `self` is the more significant register.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n_qubits = self.n_qubits + other.n_qubits;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Self {
            mat: self.mat.kron(&other.mat),
            n_qubits,
            normalized: self.normalized && other.normalized,
        })
    }

    /// n-fold tensor power.
    pub fn tensor_power(&self, copies: usize) -> Result<Self> {
        assert!(copies >= 1);
        let mut out = self.clone();
        for _ in 1..copies {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Conjugation UρU† by a full-dimension unitary.
    pub fn apply_unitary(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary of dim {} applied to state of dim {}",
                u.dim(),
                self.dim()
            )));
        }
        let dev = u.unitarity_deviation();
        if dev > check_tol::<T>() {
            return Err(Error::NotUnitary {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            mat: u.matmul(&self.mat).matmul(&u.dagger()),
            n_qubits: self.n_qubits,
            normalized: self.normalized,
        })
    }

    /// Conjugation by a two-qubit unitary embedded at (`a`, `b`); O(4ⁿ).
    pub fn apply_two_qubit_unitary(
        &self,
        u4: &ComplexMatrix<T>,
        a: usize,
        b: usize,
    ) -> Result<Self> {
        let dev = u4.unitarity_deviation();
        if dev > check_tol::<T>() {
            return Err(Error::NotUnitary {
                deviation: dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            mat: self.mat.conjugate_two_qubit(u4, a, b)?,
            n_qubits: self.n_qubits,
            normalized: self.normalized,
        })
    }

    /// Reduced state on the listed qubits (in the listed order); preserves
    /// the trace and the normalization flag.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial trace must keep at least one qubit".into(),
            ));
        }
        Ok(Self {
            mat: self.mat.partial_trace(keep)?,
            n_qubits: keep.len(),
            normalized: self.normalized,
        })
    }

    /// Post-selection weighting by a diagonal single-qubit effect
    /// diag(e0, e1) on `qubit`; the result is an unnormalized state.
    pub fn weight_by_diagonal_effect(&self, qubit: usize, e0: T, e1: T) -> Result<Self> {
        Ok(Self {
            mat: self.mat.weight_by_diagonal_effect(qubit, e0, e1)?,
            n_qubits: self.n_qubits,
            normalized: false,
        })
    }

    /// Returns a normalized copy (trace scaled to 1).
    pub fn normalize(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= T::zero() {
            return Err(Error::InvalidTrace {
                trace: tr.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            mat: self.mat.scaled(T::one() / tr),
            n_qubits: self.n_qubits,
            normalized: true,
        })
    }
}
