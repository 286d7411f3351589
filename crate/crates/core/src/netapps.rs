//! Network applications of purified measurements: two-way entanglement
//! distillation (thresholds and copy counts) and repeater entanglement
//! swapping.
//!
//! Measurement quality enters every formula through the unnormalized
//! purified-effect diagonals (r₀, r₁): the even/odd coincidence weights are
//! r_even = r₀² + r₁² and r_odd = 2r₀r₁, and both the purification acceptance
//! and the coincidence acceptance are folded into the success probability.

use crate::error::{Error, Result};
use crate::noise::SpamParams;
use crate::purify::{effect_diagonal, fixed_point};
use crate::scalar::{lit, Scalar};

/// Default fidelity target for distilling one usable ebit.
pub const DISTILL_TARGET: f64 = 0.999;

/// Unnormalized diagonals (⟨k|M̃ₖ⁽ⁿ⁾|k⟩, ⟨k̄|M̃ₖ⁽ⁿ⁾|k̄⟩) of the purified
/// effect after `n` ancillas: closed form (1−q)αⁿ, q(1−α)ⁿ for noiseless
/// gates, iterated recurrence otherwise.
pub fn povm_diag_recurrence<T: Scalar>(params: &SpamParams<T>, n: usize) -> (T, T) {
    effect_diagonal(params, n)
}

/// Shared polynomial pieces of one distillation round on a Werner pair.
fn round_brackets<T: Scalar>(fidelity: T) -> (T, T, T) {
    let w = (T::one() - fidelity) / lit::<T>(3.0);
    let even = fidelity * fidelity + lit::<T>(2.0) * fidelity * w + lit::<T>(5.0) * w * w;
    let keep = fidelity * fidelity + w * w;
    let cross = fidelity * w + w * w;
    (keep, even, cross)
}

fn validate_round_inputs<T: Scalar>(fidelity: T, r0: T, r1: T) -> Result<()> {
    if fidelity < lit::<T>(0.25) || fidelity > T::one() {
        return Err(Error::InvalidParameter(format!(
            "Werner fidelity {fidelity} outside [1/4, 1]"
        )));
    }
    if r1 < T::zero() || r0 <= r1 {
        return Err(Error::NoMeasurementContrast);
    }
    // the pair (diag(r0, r1), diag(r1, r0)) must stay a sub-POVM
    if r0 + r1 > T::one() + crate::scalar::check_tol::<T>() {
        return Err(Error::InvalidParameter(format!(
            "effect diagonals sum to {}, above 1",
            r0 + r1
        )));
    }
    Ok(())
}

/// Post-round Werner fidelity F′ under measurements with effect diagonals
/// (r₀, r₁); at r₁ = 0 this is the ideal two-copy distillation map.
pub fn distill_map<T: Scalar>(fidelity: T, r0: T, r1: T) -> Result<T> {
    validate_round_inputs(fidelity, r0, r1)?;
    let (keep, even, cross) = round_brackets(fidelity);
    let r_even = r0 * r0 + r1 * r1;
    let r_odd = lit::<T>(2.0) * r0 * r1;
    Ok((keep * r_even + cross * r_odd) / (even * r_even + lit::<T>(4.0) * cross * r_odd))
}

/// Probability that one round accepts: coincidence of the two measured
/// outcomes weighted by the unnormalized purified effects, so the
/// purification acceptance is included.
pub fn distill_success<T: Scalar>(fidelity: T, r0: T, r1: T) -> Result<T> {
    validate_round_inputs(fidelity, r0, r1)?;
    let (_, even, cross) = round_brackets(fidelity);
    let r_even = r0 * r0 + r1 * r1;
    let r_odd = lit::<T>(2.0) * r0 * r1;
    Ok(even * r_even + lit::<T>(4.0) * cross * r_odd)
}

/// Distillability threshold L⁽ⁿ⁾ = ½((r₀+r₁)/(r₀−r₁))² for `n`-ancilla
/// purified measurements, together with its n → ∞ limit: 1/2 for noiseless
/// gates, ½((1+d)/(1−d))² otherwise.
pub fn distill_threshold<T: Scalar>(params: &SpamParams<T>, n: usize) -> (T, T) {
    let (r0, r1) = povm_diag_recurrence(params, n);
    let half = lit::<T>(0.5);
    let ratio = (r0 + r1) / (r0 - r1);
    let level = half * ratio * ratio;
    let limit = if params.gate_noise() == T::zero() {
        half
    } else {
        let d = fixed_point(params).limit_ratio;
        let r = (T::one() + d) / (T::one() - d);
        half * r * r
    };
    (level, limit)
}

/// One accepted distillation round: input fidelity and its acceptance
/// probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistillRound<T: Scalar> {
    pub index: usize,
    pub fidelity: T,
    pub success_prob: T,
}

/// Full record of an iterated distillation run.
#[derive(Debug, Clone)]
pub struct DistillationTrace<T: Scalar> {
    pub params: SpamParams<T>,
    pub ancilla_depth: usize,
    pub rounds: Vec<DistillRound<T>>,
    pub final_fidelity: T,
    /// Expected number of input copies: ∏ⱼ 2/p_succ(Fⱼ).
    pub copies: T,
}

impl<T: Scalar> DistillationTrace<T> {
    /// Recomputes the copy count from the stored rounds; must equal `copies`
    /// exactly.
    pub fn reconstruct_copies(&self) -> T {
        self.rounds
            .iter()
            .map(|r| lit::<T>(2.0) / r.success_prob)
            .fold(T::one(), |acc, x| acc * x)
    }
}

/// Outcome of asking for a target fidelity from a given start.
#[derive(Debug, Clone)]
pub enum DistillOutcome<T: Scalar> {
    /// The start fidelity does not exceed the threshold L⁽ⁿ⁾.
    Undistillable {
        threshold: T,
    },
    Converged(DistillationTrace<T>),
}

/// Iterates the distillation map from `start_fidelity` until the fidelity
/// strictly exceeds `target`, accumulating the expected copy count.
/// Starting at or below the threshold is reported as a marker, not an error.
pub fn copies_needed<T: Scalar>(
    params: &SpamParams<T>,
    n: usize,
    start_fidelity: T,
    target: T,
) -> Result<DistillOutcome<T>> {
    if start_fidelity < lit::<T>(0.25) || start_fidelity > T::one() {
        return Err(Error::InvalidParameter(format!(
            "start fidelity {start_fidelity} outside [1/4, 1]"
        )));
    }
    if target <= lit::<T>(0.5) || target >= T::one() {
        return Err(Error::InvalidParameter(format!(
            "target fidelity {target} outside (1/2, 1)"
        )));
    }
    let (r0, r1) = povm_diag_recurrence(params, n);
    let (threshold, _) = distill_threshold(params, n);
    if start_fidelity <= threshold && start_fidelity <= target {
        return Ok(DistillOutcome::Undistillable { threshold });
    }
    const ROUND_LIMIT: usize = 10_000;
    let mut fidelity = start_fidelity;
    let mut copies = T::one();
    let mut rounds = Vec::new();
    let mut index = 0;
    while fidelity <= target {
        if index >= ROUND_LIMIT {
            return Err(Error::IterationLimit { limit: ROUND_LIMIT });
        }
        let success_prob = distill_success(fidelity, r0, r1)?;
        rounds.push(DistillRound {
            index,
            fidelity,
            success_prob,
        });
        copies = copies * (lit::<T>(2.0) / success_prob);
        fidelity = distill_map(fidelity, r0, r1)?;
        index += 1;
    }
    Ok(DistillOutcome::Converged(DistillationTrace {
        params: *params,
        ancilla_depth: n,
        rounds,
        final_fidelity: fidelity,
        copies,
    }))
}

/// End-to-end fidelity of entanglement swapping with `m`-ancilla purified
/// repeater measurements: [1 + ((1−α)/α)ᵐ · q/(1−q)]⁻². The closed form
/// holds for noiseless gates only and is rejected otherwise.
pub fn swap_fidelity<T: Scalar>(params: &SpamParams<T>, m: usize) -> Result<T> {
    if params.gate_noise() != T::zero() {
        return Err(Error::InvalidParameter(
            "swap fidelity closed form requires noiseless CNOT gates".into(),
        ));
    }
    let q = params.meas_noise();
    if q == T::zero() {
        return Ok(T::one());
    }
    let bias = params.effective_bias();
    let ratio = ((T::one() - bias) / bias).powi(m as i32) * q / (T::one() - q);
    let base = T::one() + ratio;
    Ok(T::one() / (base * base))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(f: f64, q: f64, eps: f64) -> SpamParams<f64> {
        SpamParams::new(f, q, eps).unwrap()
    }

    #[test]
    fn effect_diagonals_closed_form() {
        let p = params(0.95, 0.05, 0.0);
        assert_eq!(povm_diag_recurrence(&p, 0), (0.95, 0.05));
        let (r0, r1) = povm_diag_recurrence(&p, 1);
        assert!((r0 - 0.95 * 0.905).abs() < 1e-15);
        assert!((r1 - 0.05 * 0.095).abs() < 1e-15);
    }

    #[test]
    fn effect_ratio_converges_to_limit_ratio() {
        let p = params(0.95, 0.05, 0.05);
        let (r0, r1) = povm_diag_recurrence(&p, 200);
        let d = fixed_point(&p).limit_ratio;
        assert!((r1 / r0 - d).abs() < 1e-12);
    }

    #[test]
    fn map_fixed_point_at_unit_fidelity() {
        assert_eq!(distill_map::<f64>(1.0, 0.95, 0.05).unwrap(), 1.0);
    }

    #[test]
    fn ideal_map_matches_two_copy_formula() {
        let f = distill_map::<f64>(0.7, 1.0, 0.0).unwrap();
        assert!((f - 0.7352941176470589).abs() < 1e-15);
    }

    #[test]
    fn map_improves_above_threshold_and_degrades_below() {
        let p = params(0.95, 0.05, 0.0);
        let (r0, r1) = povm_diag_recurrence(&p, 0);
        let (level, _) = distill_threshold(&p, 0);
        let above = level + 1e-3;
        let below = level - 1e-3;
        assert!(distill_map(above, r0, r1).unwrap() > above);
        assert!(distill_map(below, r0, r1).unwrap() < below);
    }

    #[test]
    fn threshold_values() {
        let ideal = params(0.95, 0.0, 0.0);
        let (level, limit) = distill_threshold(&ideal, 0);
        assert_eq!(level, 0.5);
        assert_eq!(limit, 0.5);

        let p = params(0.95, 0.05, 0.0);
        let (level, limit) = distill_threshold(&p, 0);
        assert!((level - 0.5 * (1.0 / 0.9f64).powi(2)).abs() < 1e-15);
        assert_eq!(limit, 0.5);

        let noisy = params(0.95, 0.05, 0.05);
        let (_, limit) = distill_threshold(&noisy, 0);
        let d = fixed_point(&noisy).limit_ratio;
        assert!((limit - 0.5 * ((1.0 + d) / (1.0 - d)).powi(2)).abs() < 1e-15);
        assert!(limit > 0.5);
    }

    #[test]
    fn success_probability_values() {
        let p = params(0.95, 0.05, 0.0);
        let (r0, r1) = povm_diag_recurrence(&p, 0);
        let succ = distill_success(0.9, r0, r1).unwrap();
        assert!((succ - 0.8042).abs() < 1e-12);

        let (r0, r1) = povm_diag_recurrence(&p, 1);
        let succ = distill_success(0.7, r0, r1).unwrap();
        assert!((succ - 0.505).abs() < 5e-4);

        // ideal measurement of a perfect pair always accepts
        assert!((distill_success::<f64>(1.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equal_diagonals_are_rejected() {
        assert!(matches!(
            distill_map::<f64>(0.7, 0.5, 0.5),
            Err(Error::NoMeasurementContrast)
        ));
        assert!(matches!(
            distill_success::<f64>(0.7, 0.3, 0.5),
            Err(Error::NoMeasurementContrast)
        ));
    }

    #[test]
    fn copies_zero_rounds_above_target() {
        let p = params(0.95, 0.0, 0.0);
        match copies_needed(&p, 0, 0.9995, 0.999).unwrap() {
            DistillOutcome::Converged(trace) => {
                assert!(trace.rounds.is_empty());
                assert_eq!(trace.copies, 1.0);
                assert_eq!(trace.final_fidelity, 0.9995);
            }
            _ => panic!("expected convergence"),
        }
    }

    #[test]
    fn copies_flags_undistillable_start() {
        let p = params(0.95, 0.05, 0.0);
        match copies_needed(&p, 0, 0.6, 0.999).unwrap() {
            DistillOutcome::Undistillable { threshold } => {
                assert!((threshold - 0.6172839506172839).abs() < 1e-12);
            }
            _ => panic!("expected undistillable marker"),
        }
    }

    #[test]
    fn copies_table_cell() {
        let p = params(0.95, 0.05, 0.0);
        match copies_needed(&p, 1, 0.7, 0.999).unwrap() {
            DistillOutcome::Converged(trace) => {
                assert!((trace.copies - 1.323e9).abs() / 1.323e9 < 5e-3);
                assert!((trace.rounds[0].success_prob - 0.505).abs() < 5e-4);
                assert!(trace.final_fidelity > 0.999);
                assert_eq!(trace.reconstruct_copies(), trace.copies);
            }
            _ => panic!("expected convergence"),
        }
    }

    #[test]
    fn trace_fidelities_strictly_increase() {
        let p = params(0.95, 0.05, 0.0);
        match copies_needed(&p, 2, 0.65, 0.999).unwrap() {
            DistillOutcome::Converged(trace) => {
                for pair in trace.rounds.windows(2) {
                    assert!(pair[1].fidelity > pair[0].fidelity);
                }
                assert!(trace.final_fidelity > trace.rounds.last().unwrap().fidelity);
            }
            _ => panic!("expected convergence"),
        }
    }

    #[test]
    fn swap_fidelity_values() {
        let ideal = params(0.95, 0.0, 0.0);
        for m in 0..5 {
            assert_eq!(swap_fidelity(&ideal, m).unwrap(), 1.0);
        }
        let p = params(0.95, 0.05, 0.0);
        assert!((swap_fidelity(&p, 0).unwrap() - 0.9025).abs() < 1e-15);
        assert!((swap_fidelity(&p, 3).unwrap() - 0.9998782520057344).abs() < 1e-12);
        // monotone increasing in the ancilla count
        let mut prev = 0.0;
        for m in 0..10 {
            let f = swap_fidelity(&p, m).unwrap();
            assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn swap_closed_form_rejects_noisy_gates() {
        assert!(swap_fidelity(&params(0.95, 0.05, 0.05), 1).is_err());
    }
}
