//! Brute-force circuit simulator used to validate every closed form.
//!
//! Everything here is explicit tensor arithmetic over `qops`/`noise`
//! primitives. None of the closed forms from `purify` or `netapps` are
//! called; the whole point is an independent code path, so agreement between
//! the two is evidence rather than tautology.

use crate::error::{Error, Result};
use crate::noise::{self, SpamParams};
use crate::qops::{gates, povm_probabilities, ComplexMatrix, DensityMatrix, PovmElement};
use crate::scalar::{lit, Scalar};

/// Ancilla cap for the preparation circuit (an 11-qubit register).
pub const MAX_PREP_ANCILLAS: usize = 10;
/// Ancilla cap for the measurement circuit (a 10-qubit register).
pub const MAX_MEAS_ANCILLAS: usize = 9;
/// Ancilla cap per repeater measurement in the swap circuit; the ancillas
/// enter only through the effective purified POVM, never the register.
pub const MAX_SWAP_ANCILLAS: usize = 4;

/// Outcome of a post-selected purification circuit.
#[derive(Debug, Clone)]
pub struct CircuitOutcome<T: Scalar> {
    /// The accepted state, kept unnormalized: its trace is the acceptance
    /// probability.
    pub accepted_state: DensityMatrix<T>,
    pub acceptance_prob: T,
    /// ⟨0|ρ⁽ⁿ⁾|0⟩ of the normalized accepted state.
    pub conditional_fidelity: T,
}

/// Runs the preparation-purification circuit: `rho0 ⊗ rho0^{⊗n}`, a noisy
/// CNOT from the system onto each ancilla, a noisy measurement on every
/// ancilla, post-selected on the all-zeros string.
pub fn simulate_prep_purification<T: Scalar>(
    rho0: &DensityMatrix<T>,
    meas_noise: T,
    gate_noise: T,
    n_ancillas: usize,
) -> Result<CircuitOutcome<T>> {
    if rho0.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(
            "preparation purification starts from a single-qubit state".into(),
        ));
    }
    if n_ancillas > MAX_PREP_ANCILLAS {
        return Err(Error::QubitCapExceeded {
            requested: n_ancillas + 1,
            max: MAX_PREP_ANCILLAS + 1,
        });
    }
    if meas_noise < T::zero() || meas_noise > T::one() {
        return Err(Error::InvalidParameter(format!(
            "measurement noise fraction {meas_noise} outside [0, 1]"
        )));
    }
    let mut state = rho0.tensor_power(n_ancillas + 1)?;
    for target in 1..=n_ancillas {
        state = noise::noisy_cnot_apply(&state, gate_noise, 0, target)?;
    }
    for target in 1..=n_ancillas {
        state = state.weight_by_diagonal_effect(target, T::one() - meas_noise, meas_noise)?;
    }
    let accepted = state.matrix().partial_trace(&[0])?;
    let acceptance_prob = accepted.trace().re;
    let conditional_fidelity = accepted.get(0, 0).re / acceptance_prob;
    Ok(CircuitOutcome {
        accepted_state: DensityMatrix::from_matrix_unchecked(accepted, false),
        acceptance_prob,
        conditional_fidelity,
    })
}

/// Effective purified measurement computed by full tensor contraction.
#[derive(Debug, Clone)]
pub struct EffectivePovm<T: Scalar> {
    /// Normalized purified pair (Ñ₀⁽ᵐ⁾, Ñ₁⁽ᵐ⁾).
    pub effects: (PovmElement<T>, PovmElement<T>),
    /// Unnormalized diagonals of M̃₀⁽ᵐ⁾: (⟨0|·|0⟩, ⟨1|·|1⟩).
    pub raw_keep: T,
    pub raw_flip: T,
    /// Probability that all m+1 outcomes agree (state-independent).
    pub success_prob: T,
}

/// Heisenberg adjoint of the depolarizing CNOT on (`control`, `target`):
/// E ↦ (1−ε)·V†EV + ε·I_{ct} ⊗ tr_{ct}[E]/4.
fn depolarizing_cnot_adjoint<T: Scalar>(
    effect: &ComplexMatrix<T>,
    gate_noise: T,
    control: usize,
    target: usize,
) -> Result<ComplexMatrix<T>> {
    let v_dagger = gates::cnot::<T>().dagger();
    let conjugated = effect.conjugate_two_qubit(&v_dagger, control, target)?;
    if gate_noise == T::zero() {
        return Ok(conjugated);
    }
    let n = effect.n_qubits().expect("effect acts on qubits");
    let keep: Vec<usize> = (0..n).filter(|q| *q != control && *q != target).collect();
    let spill = if keep.is_empty() {
        ComplexMatrix::identity(4).scaled(effect.trace().re * lit::<T>(0.25))
    } else {
        let reduced = effect.partial_trace(&keep)?;
        ComplexMatrix::insert_mixed_pair(&reduced, n, control, target)?
    };
    Ok(conjugated
        .scaled(T::one() - gate_noise)
        .plus(&spill.scaled(gate_noise)))
}

/// Runs the measurement-purification circuit in the Heisenberg picture:
/// evolves M̃ₖ^{⊗(m+1)} back through the noisy CNOTs, contracts the ancillas
/// with ρ^{⊗m}, and normalizes by the all-identical acceptance probability.
pub fn simulate_meas_purification<T: Scalar>(
    params: &SpamParams<T>,
    m_ancillas: usize,
) -> Result<EffectivePovm<T>> {
    if m_ancillas > MAX_MEAS_ANCILLAS {
        return Err(Error::QubitCapExceeded {
            requested: m_ancillas + 1,
            max: MAX_MEAS_ANCILLAS + 1,
        });
    }
    let q = params.meas_noise();
    let n_qubits = m_ancillas + 1;

    let ancilla_weights = if m_ancillas > 0 {
        let rho = noise::noisy_prep(
            params.prep_fidelity(),
            num_complex::Complex::new(T::zero(), T::zero()),
        )?;
        Some(ComplexMatrix::identity(2).kron(rho.tensor_power(m_ancillas)?.matrix()))
    } else {
        None
    };

    let mut contracted = Vec::with_capacity(2);
    for outcome in 0..2u8 {
        let (e0, e1) = if outcome == 0 {
            (T::one() - q, q)
        } else {
            (q, T::one() - q)
        };
        let single = {
            let mut d = ComplexMatrix::zeros(2);
            d.set(0, 0, num_complex::Complex::new(e0, T::zero()));
            d.set(1, 1, num_complex::Complex::new(e1, T::zero()));
            d
        };
        let mut effect = single.clone();
        for _ in 1..n_qubits {
            effect = effect.kron(&single);
        }
        // the last CNOT acts first on the effect
        for target in (1..=m_ancillas).rev() {
            effect = depolarizing_cnot_adjoint(&effect, params.gate_noise(), 0, target)?;
        }
        let reduced = match &ancilla_weights {
            Some(w) => w.matmul(&effect).partial_trace(&[0])?,
            None => effect,
        };
        contracted.push(reduced);
    }

    let raw_keep = contracted[0].get(0, 0).re;
    let raw_flip = contracted[0].get(1, 1).re;
    let success_prob = raw_keep + raw_flip;
    let scale = T::one() / success_prob;
    let effects = (
        PovmElement::new(contracted[0].scaled(scale))?,
        PovmElement::new(contracted[1].scaled(scale))?,
    );
    Ok(EffectivePovm {
        effects,
        raw_keep,
        raw_flip,
        success_prob,
    })
}

/// Outcome of an entanglement swap with purified repeater measurements.
#[derive(Debug, Clone)]
pub struct SwapOutcome<T: Scalar> {
    /// Normalized post-swap state shared by the end nodes.
    pub state: DensityMatrix<T>,
    /// ⟨φ⁺|σ⁽ᵐ⁾|φ⁺⟩.
    pub fidelity: T,
    pub acceptance_prob: T,
}

/// Projects the repeater pair of |φ⁺⟩^{AR₁} ⊗ |φ⁺⟩^{R₂B} with the purified
/// effect Ñ₀⁽ᵐ⁾ ⊗ Ñ₀⁽ᵐ⁾ conjugated into the Bell basis.
pub fn simulate_swap<T: Scalar>(
    params: &SpamParams<T>,
    m_ancillas: usize,
) -> Result<SwapOutcome<T>> {
    if m_ancillas > MAX_SWAP_ANCILLAS {
        return Err(Error::QubitCapExceeded {
            requested: m_ancillas,
            max: MAX_SWAP_ANCILLAS,
        });
    }
    let purified = simulate_meas_purification(params, m_ancillas)?;
    let n0 = purified.effects.0.matrix();

    let bell = DensityMatrix::<T>::bell_phi_plus();
    let state = bell.tensor(&bell)?; // qubit order: A, R1, R2, B

    let h1 = gates::hadamard::<T>().kron(&ComplexMatrix::identity(2));
    let v2 = gates::cnot::<T>();
    let projector4 = v2
        .matmul(&h1)
        .matmul(&n0.kron(n0))
        .matmul(&h1)
        .matmul(&v2.dagger());
    let projector = ComplexMatrix::embed_two_qubit_op(&projector4, 4, 1, 2)?;

    let kept = state.matrix().matmul(&projector).partial_trace(&[0, 3])?;
    let acceptance_prob = kept.trace().re;
    let normalized = DensityMatrix::new(kept.scaled(T::one() / acceptance_prob))?;
    let fidelity = normalized.overlap(&DensityMatrix::bell_phi_plus());
    Ok(SwapOutcome {
        state: normalized,
        fidelity,
        acceptance_prob,
    })
}

/// One twirl-free distillation round on two Werner pairs, measuring the
/// second pair with the supplied effect pair on both sides and accepting
/// identical outcomes. Returns (F′, acceptance probability).
pub fn simulate_distill_round<T: Scalar>(
    werner_fidelity: T,
    effects: (&PovmElement<T>, &PovmElement<T>),
) -> Result<(T, T)> {
    if werner_fidelity < lit::<T>(0.25) || werner_fidelity > T::one() {
        return Err(Error::InvalidParameter(format!(
            "Werner fidelity {werner_fidelity} outside [1/4, 1]"
        )));
    }
    for e in [effects.0, effects.1] {
        if e.dim() != 2 {
            return Err(Error::DimensionMismatch(
                "distillation measures single-qubit effects".into(),
            ));
        }
    }
    let pair = DensityMatrix::<T>::werner(werner_fidelity)?;
    // qubit order: A1, B1, A2, B2
    let mut state = pair.tensor(&pair)?;
    state = state.apply_two_qubit_unitary(&gates::cnot(), 0, 2)?;
    state = state.apply_two_qubit_unitary(&gates::cnot(), 1, 3)?;

    let mut kept = ComplexMatrix::zeros(4);
    for e in [effects.0, effects.1] {
        let both = ComplexMatrix::embed_two_qubit_op(&e.matrix().kron(e.matrix()), 4, 2, 3)?;
        kept = kept.plus(&state.matrix().matmul(&both).partial_trace(&[0, 1])?);
    }
    let acceptance = kept.trace().re;
    let bell = DensityMatrix::<T>::bell_phi_plus();
    let new_fidelity = kept.trace_product(bell.matrix()).re / acceptance;
    Ok((new_fidelity, acceptance))
}

/// The two-qubit SPAM-verification experiment: noisy prep ⊗ noisy prep,
/// one noisy CNOT, noisy measurement on both qubits. Returns the outcome
/// distribution (p00, p01, p10, p11).
pub fn simulate_verification_probs<T: Scalar>(params: &SpamParams<T>) -> Result<[T; 4]> {
    let rho = noise::noisy_prep(
        params.prep_fidelity(),
        num_complex::Complex::new(T::zero(), T::zero()),
    )?;
    let state = noise::noisy_cnot_apply(&rho.tensor(&rho)?, params.gate_noise(), 0, 1)?;
    let (m0, m1) = noise::noisy_meas(params.meas_noise())?;
    let povm = [
        m0.tensor(&m0),
        m0.tensor(&m1),
        m1.tensor(&m0),
        m1.tensor(&m1),
    ];
    let probs = povm_probabilities(&state, &povm)?;
    Ok([probs[0], probs[1], probs[2], probs[3]])
}
