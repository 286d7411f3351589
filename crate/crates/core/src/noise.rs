//! The three noise resources of the protocol: imperfect state preparation,
//! imperfect two-outcome measurement, and a depolarizing CNOT.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qops::{gates, ComplexMatrix, DensityMatrix, PovmElement};
use crate::scalar::{check_tol, lit, Scalar};

/// The noise triple governing every closed form in this crate.
///
/// * `prep_fidelity` — overlap f = ⟨0|ρ|0⟩ of the noisy preparation with the
///   ideal fiducial state, constrained to [1/2, 1].
/// * `meas_noise` — probability q ∈ [0, 1/2) that a measurement reports the
///   flipped outcome.
/// * `gate_noise` — fraction ε ∈ [0, 1] with which a CNOT replaces its two
///   qubits by the maximally mixed pair.
///
/// The constraint q < 1/2 (together with f ≥ 1/2) keeps the effective bias
/// α = f(1−q) + (1−f)q at or above 1/2, which is what drives purification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpamParams<T: Scalar> {
    prep_fidelity: T,
    meas_noise: T,
    gate_noise: T,
}

impl<T: Scalar> SpamParams<T> {
    pub fn new(prep_fidelity: T, meas_noise: T, gate_noise: T) -> Result<Self> {
        let half = lit::<T>(0.5);
        if !(prep_fidelity >= half && prep_fidelity <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "preparation fidelity {prep_fidelity} outside [1/2, 1]"
            )));
        }
        if !(meas_noise >= T::zero() && meas_noise < half) {
            return Err(Error::InvalidParameter(format!(
                "measurement noise fraction {meas_noise} outside [0, 1/2)"
            )));
        }
        if !(gate_noise >= T::zero() && gate_noise <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "CNOT noise fraction {gate_noise} outside [0, 1]"
            )));
        }
        Ok(Self {
            prep_fidelity,
            meas_noise,
            gate_noise,
        })
    }

    /// Balanced errors with noiseless gates: 1 − f = q, ε = 0.
    pub fn balanced(error_rate: T) -> Result<Self> {
        Self::new(T::one() - error_rate, error_rate, T::zero())
    }

    pub fn prep_fidelity(&self) -> T {
        self.prep_fidelity
    }

    pub fn meas_noise(&self) -> T {
        self.meas_noise
    }

    pub fn gate_noise(&self) -> T {
        self.gate_noise
    }

    /// Effective outcome bias α = f(1−q) + (1−f)q; exceeds 1/2 whenever
    /// f > 1/2.
    pub fn effective_bias(&self) -> T {
        let f = self.prep_fidelity;
        let q = self.meas_noise;
        f * (T::one() - q) + (T::one() - f) * q
    }

    /// Whether α = 1/2 exactly, i.e. repeated SPAM carries no information.
    pub fn is_degenerate(&self) -> bool {
        self.effective_bias() == lit::<T>(0.5)
    }
}

/// Noisy single-qubit preparation: diagonal (f, 1−f) plus an optional
/// coherence on the off-diagonal. The closed forms depend only on f; the
/// coherence is accepted so the brute-force oracle can confirm that.
pub fn noisy_prep<T: Scalar>(fidelity: T, coherence: Complex<T>) -> Result<DensityMatrix<T>> {
    if fidelity < T::zero() || fidelity > T::one() {
        return Err(Error::InvalidParameter(format!(
            "preparation fidelity {fidelity} outside [0, 1]"
        )));
    }
    // PSD requires |c|² ≤ f(1−f)
    let limit = fidelity * (T::one() - fidelity);
    if coherence.norm_sqr() > limit + check_tol::<T>() {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: (limit - coherence.norm_sqr()).to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut m = ComplexMatrix::zeros(2);
    m.set(0, 0, Complex::new(fidelity, T::zero()));
    m.set(0, 1, coherence);
    m.set(1, 0, coherence.conj());
    m.set(1, 1, Complex::new(T::one() - fidelity, T::zero()));
    DensityMatrix::new(m)
}

/// Symmetrized noisy computational-basis measurement:
/// M̃_k = (1−q)·M_k + q·M_{k⊕1}. Accepts the full q ∈ [0, 1] range; protocol
/// entry points restrict to q < 1/2 through [`SpamParams`].
pub fn noisy_meas<T: Scalar>(noise_fraction: T) -> Result<(PovmElement<T>, PovmElement<T>)> {
    if noise_fraction < T::zero() || noise_fraction > T::one() {
        return Err(Error::InvalidParameter(format!(
            "measurement noise fraction {noise_fraction} outside [0, 1]"
        )));
    }
    let q = noise_fraction;
    Ok((
        PovmElement::diagonal_qubit(T::one() - q, q)?,
        PovmElement::diagonal_qubit(q, T::one() - q)?,
    ))
}

/// Classical symmetrization of an effect: (E + ZEZ)/2 with Z = Z^{⊗k}.
/// For single-qubit effects this kills the off-diagonal and leaves the
/// diagonal untouched, which is the form every closed form assumes.
pub fn z_symmetrize<T: Scalar>(effect: &PovmElement<T>) -> PovmElement<T> {
    let n = effect
        .matrix()
        .n_qubits()
        .expect("POVM effects act on qubit registers");
    if n == 0 {
        return effect.clone();
    }
    let mut z = gates::pauli_z::<T>();
    for _ in 1..n {
        z = z.kron(&gates::pauli_z());
    }
    let mixed = effect
        .matrix()
        .plus(&z.matmul(effect.matrix()).matmul(&z))
        .scaled(lit(0.5));
    PovmElement::new(mixed).expect("symmetrization preserves effect validity")
}

/// Depolarizing CNOT acting on (`control`, `target`) of a multi-qubit state:
/// with probability 1−ε the ideal CNOT conjugation, with probability ε the
/// two gate qubits are replaced by I/2 ⊗ I/2 while the remaining qubits keep
/// their joint marginal. Trace-preserving and completely positive.
pub fn noisy_cnot_apply<T: Scalar>(
    rho: &DensityMatrix<T>,
    gate_noise: T,
    control: usize,
    target: usize,
) -> Result<DensityMatrix<T>> {
    if control == target {
        return Err(Error::InvalidParameter(
            "CNOT control and target must differ".into(),
        ));
    }
    if gate_noise < T::zero() || gate_noise > T::one() {
        return Err(Error::InvalidParameter(format!(
            "CNOT noise fraction {gate_noise} outside [0, 1]"
        )));
    }
    let n = rho.n_qubits();
    for &q in &[control, target] {
        if q >= n {
            return Err(Error::InvalidQubitIndex {
                index: q,
                n_qubits: n,
            });
        }
    }
    let ideal = rho
        .matrix()
        .conjugate_two_qubit(&gates::cnot(), control, target)?;
    let mat = if gate_noise == T::zero() {
        ideal
    } else {
        let mixed = if n == 2 {
            ComplexMatrix::identity(4).scaled(lit::<T>(0.25) * rho.trace())
        } else {
            let keep: Vec<usize> = (0..n).filter(|q| *q != control && *q != target).collect();
            let marginal = rho.matrix().partial_trace(&keep)?;
            ComplexMatrix::insert_mixed_pair(&marginal, n, control, target)?
        };
        ideal
            .scaled(T::one() - gate_noise)
            .plus(&mixed.scaled(gate_noise))
    };
    Ok(DensityMatrix::from_matrix_unchecked(
        mat,
        rho.is_normalized(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::povm_probabilities;

    #[test]
    fn spam_params_validate_ranges() {
        assert!(SpamParams::<f64>::new(0.95, 0.05, 0.05).is_ok());
        assert!(SpamParams::<f64>::new(0.4, 0.05, 0.0).is_err());
        assert!(SpamParams::<f64>::new(0.95, 0.5, 0.0).is_err());
        assert!(SpamParams::<f64>::new(0.95, 0.05, 1.5).is_err());
        assert!(SpamParams::<f64>::new(0.95, -0.01, 0.0).is_err());
    }

    #[test]
    fn effective_bias_examples() {
        let p = SpamParams::<f64>::new(0.95, 0.05, 0.0).unwrap();
        assert!((p.effective_bias() - 0.905).abs() < 1e-15);
        assert!(SpamParams::<f64>::new(0.5, 0.1, 0.0)
            .unwrap()
            .is_degenerate());
    }

    #[test]
    fn noisy_prep_examples() {
        let pure = noisy_prep::<f64>(1.0, Complex::new(0.0, 0.0)).unwrap();
        assert_eq!(pure.entry(0, 0).re, 1.0);

        let diag = noisy_prep::<f64>(0.95, Complex::new(0.0, 0.0)).unwrap();
        assert_eq!(diag.entry(0, 0).re, 0.95);
        assert!((diag.entry(1, 1).re - 0.05).abs() < 1e-15);

        // pure-state boundary |+⟩⟨+|
        let plus = noisy_prep::<f64>(0.5, Complex::new(0.5, 0.0)).unwrap();
        assert!((plus.entry(0, 1).re - 0.5).abs() < 1e-15);

        // PSD violation: |c|² > f(1−f)
        assert!(noisy_prep::<f64>(0.9, Complex::new(0.4, 0.0)).is_err());
    }

    #[test]
    fn noisy_meas_examples() {
        let (m0, m1) = noisy_meas::<f64>(0.0).unwrap();
        assert_eq!(m0.diagonal(0), 1.0);
        assert_eq!(m1.diagonal(1), 1.0);

        let (m0, m1) = noisy_meas::<f64>(0.05).unwrap();
        assert_eq!(m0.diagonal(0), 0.95);
        assert_eq!(m0.diagonal(1), 0.05);
        assert_eq!(m1.diagonal(0), 0.05);

        // q = 1/2 carries no information
        let (m0, m1) = noisy_meas::<f64>(0.5).unwrap();
        assert_eq!(m0.diagonal(0), 0.5);
        assert_eq!(m1.diagonal(0), 0.5);
    }

    #[test]
    fn noisy_meas_complete_for_any_q() {
        for q in [0.0, 0.2, 0.5, 0.8, 1.0] {
            let (m0, m1) = noisy_meas::<f64>(q).unwrap();
            let rho = DensityMatrix::<f64>::maximally_mixed(1);
            let p = povm_probabilities(&rho, &[m0, m1]).unwrap();
            assert!((p[0] + p[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn z_symmetrize_kills_offdiagonals() {
        let plus =
            PovmElement::<f64>::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]))
                .unwrap();
        let sym = z_symmetrize(&plus);
        assert_eq!(sym.max_offdiagonal(), 0.0);
        assert_eq!(sym.diagonal(0), 0.5);

        let e = PovmElement::<f64>::new(ComplexMatrix::from_real_rows(&[&[0.9, 0.1], &[0.1, 0.1]]))
            .unwrap();
        let sym = z_symmetrize(&e);
        assert_eq!(sym.diagonal(0), 0.9);
        assert_eq!(sym.diagonal(1), 0.1);
        // idempotent on its own output
        let twice = z_symmetrize(&sym);
        assert!(twice.matrix().approx_eq(sym.matrix(), 0.0));
    }

    #[test]
    fn noisy_cnot_limits() {
        let rho = DensityMatrix::<f64>::basis_state(2, 0b10);

        let ideal = noisy_cnot_apply(&rho, 0.0, 0, 1).unwrap();
        assert_eq!(ideal.entry(0b11, 0b11).re, 1.0);

        let fully_mixed = noisy_cnot_apply(&rho, 1.0, 0, 1).unwrap();
        assert!(fully_mixed
            .matrix()
            .approx_eq(&ComplexMatrix::identity(4).scaled(0.25), 1e-15));

        let partly = noisy_cnot_apply(&rho, 0.05, 0, 1).unwrap();
        assert!((partly.entry(0b11, 0b11).re - (0.95 + 0.05 * 0.25)).abs() < 1e-15);
        assert!((partly.entry(0b00, 0b00).re - 0.0125).abs() < 1e-15);
        assert!((partly.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn noisy_cnot_keeps_spectator_marginal() {
        // three qubits: spectator 2 in |1⟩, gate on (0, 1) fully depolarizing
        let rho = DensityMatrix::<f64>::basis_state(2, 0b01)
            .tensor(&DensityMatrix::basis_state(1, 1))
            .unwrap();
        let out = noisy_cnot_apply(&rho, 1.0, 0, 1).unwrap();
        let spectator = out.partial_trace(&[2]).unwrap();
        assert!((spectator.entry(1, 1).re - 1.0).abs() < 1e-14);
        let pair = out.partial_trace(&[0, 1]).unwrap();
        assert!(pair
            .matrix()
            .approx_eq(&ComplexMatrix::identity(4).scaled(0.25), 1e-14));
    }

    #[test]
    fn noisy_cnot_rejects_bad_indices() {
        let rho = DensityMatrix::<f64>::basis_state(2, 0);
        assert!(noisy_cnot_apply(&rho, 0.0, 0, 0).is_err());
        assert!(noisy_cnot_apply(&rho, 0.0, 0, 2).is_err());
    }
}
