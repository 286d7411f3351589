//! POVM effects and Born-rule outcome probabilities.

use crate::error::{Error, Result};
use crate::qops::density::DensityMatrix;
use crate::qops::eigen::hermitian_eigenvalues;
use crate::qops::matrix::ComplexMatrix;
use crate::scalar::{check_tol, Scalar};

/// A measurement effect: Hermitian with spectrum inside [0, 1].
#[derive(Debug, Clone)]
pub struct PovmElement<T: Scalar> {
    mat: ComplexMatrix<T>,
}

impl<T: Scalar> PovmElement<T> {
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        let tol = check_tol::<T>();
        let herm = mat.hermiticity_deviation();
        if herm > tol {
            return Err(Error::NotHermitian {
                deviation: herm.to_f64().unwrap_or(f64::NAN),
            });
        }
        let eigs = hermitian_eigenvalues(&mat)?;
        let min = eigs[0];
        let max = eigs[eigs.len() - 1];
        if min < -tol || max > T::one() + tol {
            return Err(Error::InvalidEffect(format!(
                "spectrum [{min}, {max}] escapes [0, 1]"
            )));
        }
        Ok(Self { mat })
    }

    /// Diagonal effect diag(e0, e1) on a single qubit.
    pub fn diagonal_qubit(e0: T, e1: T) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, num_complex::Complex::new(e0, T::zero()));
        m.set(1, 1, num_complex::Complex::new(e1, T::zero()));
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Diagonal entry ⟨k|E|k⟩.
    pub fn diagonal(&self, k: usize) -> T {
        self.mat.get(k, k).re
    }

    /// Tensor product of effects; `self` is the more significant factor.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kron(&other.mat),
        }
    }

    /// Largest off-diagonal magnitude; zero for classical (diagonal) effects.
    pub fn max_offdiagonal(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if i != j {
                    let v = self.mat.get(i, j).norm();
                    if v > worst {
                        worst = v;
                    }
                }
            }
        }
        worst
    }
}

/// Born-rule outcome probabilities tr(ρ·E_k) for a complete POVM.
///
/// Errors if the effects do not sum to the identity within tolerance. The
/// entries are returned unclamped and sum to tr(ρ).
pub fn povm_probabilities<T: Scalar>(
    rho: &DensityMatrix<T>,
    povm: &[PovmElement<T>],
) -> Result<Vec<T>> {
    if povm.is_empty() {
        return Err(Error::IncompletePovm { deviation: 1.0 });
    }
    let dim = rho.dim();
    for e in povm {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "effect of dim {} measured on state of dim {}",
                e.dim(),
                dim
            )));
        }
    }
    let mut sum = ComplexMatrix::zeros(dim);
    for e in povm {
        sum = sum.plus(&e.mat);
    }
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if deviation > check_tol::<T>() {
        return Err(Error::IncompletePovm {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(povm.iter().map(|e| rho.expectation(&e.mat).re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::lit;

    type P = PovmElement<f64>;

    fn noisy_pair(q: f64) -> Vec<P> {
        vec![
            P::diagonal_qubit(1.0 - q, q).unwrap(),
            P::diagonal_qubit(q, 1.0 - q).unwrap(),
        ]
    }

    #[test]
    fn ideal_measurement_of_ground_state() {
        let rho = DensityMatrix::<f64>::basis_state(1, 0);
        let p = povm_probabilities(&rho, &noisy_pair(0.0)).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn noisy_measurement_of_ground_state() {
        let rho = DensityMatrix::<f64>::basis_state(1, 0);
        let p = povm_probabilities(&rho, &noisy_pair(0.05)).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-15);
        assert!((p[1] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn complete_povm_on_mixed_state_sums_to_one() {
        let rho = DensityMatrix::<f64>::maximally_mixed(1);
        let p = povm_probabilities(&rho, &noisy_pair(0.3)).unwrap();
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incomplete_povm_is_rejected() {
        let rho = DensityMatrix::<f64>::basis_state(1, 0);
        let lonely = vec![P::diagonal_qubit(0.9, 0.1).unwrap()];
        assert!(matches!(
            povm_probabilities(&rho, &lonely),
            Err(Error::IncompletePovm { .. })
        ));
    }

    #[test]
    fn effect_spectrum_is_validated() {
        let too_big = ComplexMatrix::identity(2).scaled(lit::<f64>(1.5));
        assert!(P::new(too_big).is_err());
        let negative = ComplexMatrix::from_real_rows(&[&[-0.2, 0.0], &[0.0, 0.5]]);
        assert!(P::new(negative).is_err());
    }
}
