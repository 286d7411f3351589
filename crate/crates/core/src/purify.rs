//! Closed-form recurrences, fixed points, and thresholds for purifying noisy
//! preparation and measurement, with ideal or depolarizing CNOT gates.
//!
//! With noiseless gates the post-selected diagonals obey
//! R₀₀ → α·R₀₀ and R₁₁ → (1−α)·R₁₁ per ancilla, where α is the effective
//! bias; with gate noise ε both components pick up an ε/4 feed of the total
//! weight. Everything here iterates or solves that one linear map.

use crate::error::{Error, Result};
use crate::noise::SpamParams;
use crate::qops::PovmElement;
use crate::scalar::{lit, Scalar};

/// One step of the shared diagonal recurrence. The same linear map drives the
/// post-selected state diagonals (seed (f, 1−f)) and the purified effect
/// diagonals (seed (1−q, q)).
pub(crate) fn diag_step<T: Scalar>(pair: (T, T), bias: T, gate_noise: T) -> (T, T) {
    let total = pair.0 + pair.1;
    let keep = T::one() - gate_noise;
    let feed = gate_noise * lit::<T>(0.25) * total;
    (
        keep * bias * pair.0 + feed,
        keep * (T::one() - bias) * pair.1 + feed,
    )
}

/// Unnormalized purified-effect diagonals (⟨k|M̃ₖ⁽ⁿ⁾|k⟩, ⟨k̄|M̃ₖ⁽ⁿ⁾|k̄⟩).
/// Noiseless gates use the closed form (1−q)αⁿ and q(1−α)ⁿ; otherwise the
/// recurrence is iterated, which is exact.
pub(crate) fn effect_diagonal<T: Scalar>(params: &SpamParams<T>, depth: usize) -> (T, T) {
    let q = params.meas_noise();
    let bias = params.effective_bias();
    if params.gate_noise() == T::zero() {
        let n = depth as i32;
        ((T::one() - q) * bias.powi(n), q * (T::one() - bias).powi(n))
    } else {
        let mut pair = (T::one() - q, q);
        for _ in 0..depth {
            pair = diag_step(pair, bias, params.gate_noise());
        }
        pair
    }
}

fn reject_degenerate<T: Scalar>(params: &SpamParams<T>) -> Result<()> {
    if params.is_degenerate() {
        Err(Error::DegenerateBias)
    } else {
        Ok(())
    }
}

/// Result of purifying a noisy preparation with `n` ancillas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepPurification<T: Scalar> {
    /// Fidelity f⁽ⁿ⁾ of the accepted state.
    pub fidelity: T,
    /// Probability that all n ancilla outcomes read zero.
    pub success_prob: T,
}

/// Purified preparation fidelity f⁽ⁿ⁾ and acceptance probability with `n`
/// ancillas.
///
/// Noiseless gates evaluate the closed form through the log-domain ratio
/// ((1−α)/α)ⁿ·(1−f)/f so large n cannot underflow; gate noise ε > 0 iterates
/// the diagonal recurrence in ratio form with a log-accumulated trace.
pub fn prep_fidelity<T: Scalar>(params: &SpamParams<T>, n: usize) -> Result<PrepPurification<T>> {
    reject_degenerate(params)?;
    let f = params.prep_fidelity();
    if n == 0 {
        return Ok(PrepPurification {
            fidelity: f,
            success_prob: T::one(),
        });
    }
    let bias = params.effective_bias();
    let eps = params.gate_noise();
    let steps = T::from_usize(n).unwrap();
    if eps == T::zero() {
        let ratio_ln =
            steps * ((T::one() - bias).ln() - bias.ln()) + ((T::one() - f).ln() - f.ln());
        let fidelity = T::one() / (T::one() + ratio_ln.exp());
        let success_prob = (steps * bias.ln() + f.ln()).exp()
            + (steps * (T::one() - bias).ln() + (T::one() - f).ln()).exp();
        return Ok(PrepPurification {
            fidelity,
            success_prob,
        });
    }
    // ratio u = R₁₁/R₀₀ stays bounded; the trace is tracked in log scale
    let keep = T::one() - eps;
    let quarter_eps = eps * lit::<T>(0.25);
    let mut u = (T::one() - f) / f;
    let mut log_trace = T::zero();
    for _ in 0..n {
        let spill = quarter_eps * (T::one() + u);
        let trace_ratio = (keep * (bias + (T::one() - bias) * u)
            + eps * lit::<T>(0.5) * (T::one() + u))
            / (T::one() + u);
        log_trace = log_trace + trace_ratio.ln();
        u = (keep * (T::one() - bias) * u + spill) / (keep * bias + spill);
    }
    Ok(PrepPurification {
        fidelity: T::one() / (T::one() + u),
        success_prob: log_trace.exp(),
    })
}

/// Result of purifying a noisy measurement with `m` ancillas.
#[derive(Debug, Clone)]
pub struct MeasPurification<T: Scalar> {
    /// Residual noise fraction q⁽ᵐ⁾ = ⟨k̄|Ñₖ⁽ᵐ⁾|k̄⟩; also the trace distance
    /// of the purified effect to the ideal projector.
    pub noise_fraction: T,
    /// Probability that all m+1 outcomes agree.
    pub success_prob: T,
    /// The normalized purified POVM pair (Ñ₀⁽ᵐ⁾, Ñ₁⁽ᵐ⁾).
    pub effects: (PovmElement<T>, PovmElement<T>),
}

/// Purified measurement with `m` ancillas: residual noise fraction q⁽ᵐ⁾,
/// acceptance probability, and the purified POVM pair.
///
/// q = 0 is already perfect and returns q⁽ᵐ⁾ = 0 exactly; the degenerate bias
/// α = 1/2 (f = 1/2) is a typed error.
pub fn meas_purified<T: Scalar>(params: &SpamParams<T>, m: usize) -> Result<MeasPurification<T>> {
    reject_degenerate(params)?;
    let q = params.meas_noise();
    let bias = params.effective_bias();
    let eps = params.gate_noise();
    let (noise_fraction, success_prob) = if m == 0 {
        (q, T::one())
    } else if eps == T::zero() {
        let steps = T::from_usize(m).unwrap();
        let (r0, r1) = effect_diagonal(params, m);
        let noise = if q == T::zero() {
            T::zero()
        } else {
            // log-domain form of [1 + (α/(1−α))^m (1−q)/q]^{-1}
            let ln_ratio =
                steps * (bias.ln() - (T::one() - bias).ln()) + ((T::one() - q).ln() - q.ln());
            T::one() / (T::one() + ln_ratio.exp())
        };
        (noise, r0 + r1)
    } else {
        let (r0, r1) = effect_diagonal(params, m);
        (r1 / (r0 + r1), r0 + r1)
    };
    let effect_zero = PovmElement::diagonal_qubit(T::one() - noise_fraction, noise_fraction)?;
    let effect_one = PovmElement::diagonal_qubit(noise_fraction, T::one() - noise_fraction)?;
    Ok(MeasPurification {
        noise_fraction,
        success_prob,
        effects: (effect_zero, effect_one),
    })
}

/// Where the recurrences converge when CNOT gates carry noise ε > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint<T: Scalar> {
    /// Signal-to-gate-noise contrast D = 2(2f−1)(1−2q)(1−ε)/ε; infinite for
    /// noiseless gates.
    pub contrast: T,
    /// Limiting diagonal ratio d = √(D²+1) − D ∈ (0, 1].
    pub limit_ratio: T,
    /// lim f_ε⁽ⁿ⁾ = 1/(1 − D + √(D²+1)).
    pub prep_fidelity_limit: T,
    /// lim q_ε⁽ᵐ⁾ = 1/(1 + D + √(D²+1)) = 1 − prep limit.
    pub meas_noise_limit: T,
}

/// Fixed point of the noisy-gate recurrences. Noiseless gates return the
/// symbolic limit (infinite contrast, ratio 0, fidelity 1, noise 0).
pub fn fixed_point<T: Scalar>(params: &SpamParams<T>) -> FixedPoint<T> {
    let eps = params.gate_noise();
    if eps == T::zero() {
        return FixedPoint {
            contrast: T::infinity(),
            limit_ratio: T::zero(),
            prep_fidelity_limit: T::one(),
            meas_noise_limit: T::zero(),
        };
    }
    let two = lit::<T>(2.0);
    let f = params.prep_fidelity();
    let q = params.meas_noise();
    let contrast = two * (two * f - T::one()) * (T::one() - two * q) * (T::one() - eps) / eps;
    // d = √(D²+1) − D computed as 1/(√(D²+1) + D) to stay stable for large D
    let root = contrast.hypot(T::one());
    let limit_ratio = T::one() / (root + contrast);
    let prep_fidelity_limit = T::one() / (T::one() + limit_ratio);
    let meas_noise_limit = limit_ratio / (T::one() + limit_ratio);
    FixedPoint {
        contrast,
        limit_ratio,
        prep_fidelity_limit,
        meas_noise_limit,
    }
}

/// Whether a single protocol round strictly improves the preparation
/// fidelity: f < f_ε⁽¹⁾.
pub fn purification_condition<T: Scalar>(params: &SpamParams<T>) -> bool {
    let f = params.prep_fidelity();
    let (r0, r1) = diag_step(
        (f, T::one() - f),
        params.effective_bias(),
        params.gate_noise(),
    );
    f < r0 / (r0 + r1)
}

/// Critical CNOT error rate for balanced SPAM errors (1−f = q): purification
/// helps iff ε < ε_c = (8f³ − 12f² + 4f)/(8f³ − 12f² + 4f − 1).
pub fn critical_epsilon<T: Scalar>(prep_fidelity: T) -> Result<T> {
    let half = lit::<T>(0.5);
    if prep_fidelity < half || prep_fidelity > T::one() {
        return Err(Error::InvalidParameter(format!(
            "balanced fidelity {prep_fidelity} outside [1/2, 1]"
        )));
    }
    let f = prep_fidelity;
    let cubic = lit::<T>(8.0) * f * f * f - lit::<T>(12.0) * f * f + lit::<T>(4.0) * f;
    let ratio = cubic / (cubic - T::one());
    // f = 1 and f = 1/2 both zero the cubic; return an unsigned zero
    Ok(if ratio == T::zero() { T::zero() } else { ratio })
}

/// What a purification curve tracks per ancilla count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// Preparation fidelity f⁽ⁿ⁾ per depth.
    Prep,
    /// Measurement noise fraction q⁽ᵐ⁾ per depth.
    Meas,
}

/// One (depth, value, success probability) sample of a purification sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T: Scalar> {
    pub depth: usize,
    pub value: T,
    pub success_prob: T,
}

/// Per-depth fidelity or noise-fraction sequence for one parameter set.
#[derive(Debug, Clone)]
pub struct PurificationCurve<T: Scalar> {
    pub params: SpamParams<T>,
    pub kind: CurveKind,
    pub points: Vec<CurvePoint<T>>,
}

impl<T: Scalar> PurificationCurve<T> {
    pub fn for_prep(params: SpamParams<T>, depths: &[usize]) -> Result<Self> {
        let points = depths
            .iter()
            .map(|&n| {
                prep_fidelity(&params, n).map(|p| CurvePoint {
                    depth: n,
                    value: p.fidelity,
                    success_prob: p.success_prob,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            kind: CurveKind::Prep,
            points,
        })
    }

    pub fn for_meas(params: SpamParams<T>, depths: &[usize]) -> Result<Self> {
        let points = depths
            .iter()
            .map(|&m| {
                meas_purified(&params, m).map(|p| CurvePoint {
                    depth: m,
                    value: p.noise_fraction,
                    success_prob: p.success_prob,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            kind: CurveKind::Meas,
            points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(f: f64, q: f64, eps: f64) -> SpamParams<f64> {
        SpamParams::new(f, q, eps).unwrap()
    }

    #[test]
    fn prep_with_ideal_gates_case_one() {
        // f = 0.9, q = 0.1: fidelity climbs 0.976, 0.995, 0.999
        let p = params(0.9, 0.1, 0.0);
        let expected = [0.976, 0.995, 0.999];
        for (n, want) in (1..=3).zip(expected) {
            let out = prep_fidelity(&p, n).unwrap();
            assert!(
                (out.fidelity - want).abs() < 5e-4,
                "n={n}: {} vs {want}",
                out.fidelity
            );
        }
    }

    #[test]
    fn prep_acceptance_realistic_scenario() {
        let p = params(0.95, 0.05, 0.0);
        let out = prep_fidelity(&p, 2).unwrap();
        assert!((out.success_prob - 0.778525).abs() < 1e-12);
    }

    #[test]
    fn prep_with_noisy_gates_realistic_scenario() {
        let p = params(0.95, 0.05, 0.05);
        let out = prep_fidelity(&p, 2).unwrap();
        assert!((out.fidelity - 0.983533196080).abs() < 1e-10);
        assert!((out.success_prob - 0.7356506875).abs() < 1e-12);
    }

    #[test]
    fn prep_depth_zero_is_identity() {
        let p = params(0.87, 0.03, 0.2);
        let out = prep_fidelity(&p, 0).unwrap();
        assert_eq!(out.fidelity, 0.87);
        assert_eq!(out.success_prob, 1.0);
    }

    #[test]
    fn prep_rejects_degenerate_bias() {
        let p = params(0.5, 0.1, 0.0);
        assert!(matches!(prep_fidelity(&p, 1), Err(Error::DegenerateBias)));
    }

    #[test]
    fn prep_large_depth_does_not_underflow() {
        let p = params(0.95, 0.05, 0.0);
        let out = prep_fidelity(&p, 5000).unwrap();
        assert_eq!(out.fidelity, 1.0);
        assert!(out.success_prob > 0.0);
        let noisy = params(0.95, 0.05, 0.05);
        let out = prep_fidelity(&noisy, 5000).unwrap();
        let fp = fixed_point(&noisy);
        assert!((out.fidelity - fp.prep_fidelity_limit).abs() < 1e-14);
    }

    #[test]
    fn meas_purified_table_rows() {
        let p = params(0.95, 0.05, 0.0);
        let out = meas_purified(&p, 1).unwrap();
        assert!((out.noise_fraction - 1.0 / 182.0).abs() < 1e-14);
        assert!((out.success_prob - 0.8645).abs() < 1e-12);

        let p = params(0.9, 0.1, 0.0);
        let out = meas_purified(&p, 2).unwrap();
        assert!((out.noise_fraction - 0.005).abs() < 5e-4);
        assert!((out.success_prob - 0.6084).abs() < 1e-12);
    }

    #[test]
    fn meas_depth_zero_matches_raw_noise() {
        let p = params(0.9, 0.07, 0.3);
        let out = meas_purified(&p, 0).unwrap();
        assert_eq!(out.noise_fraction, 0.07);
        assert_eq!(out.success_prob, 1.0);
        assert!((out.effects.0.diagonal(0) - 0.93).abs() < 1e-15);
    }

    #[test]
    fn meas_perfect_input_stays_perfect() {
        let p = params(0.9, 0.0, 0.0);
        let out = meas_purified(&p, 3).unwrap();
        assert_eq!(out.noise_fraction, 0.0);
        assert!((out.success_prob - 0.9f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn purified_effects_form_a_povm() {
        let p = params(0.95, 0.05, 0.05);
        let out = meas_purified(&p, 3).unwrap();
        let sum = out.effects.0.matrix().plus(out.effects.1.matrix());
        assert!(sum.approx_eq(&crate::qops::ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn fixed_point_realistic_scenario() {
        let fp = fixed_point(&params(0.95, 0.05, 0.05));
        assert!((fp.contrast - 30.78).abs() < 1e-12);
        assert!((fp.prep_fidelity_limit - 0.984).abs() < 5e-4);
        assert!((fp.meas_noise_limit - 0.016).abs() < 5e-4);
        assert!((fp.prep_fidelity_limit + fp.meas_noise_limit - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_contrast_example() {
        let fp = fixed_point(&params(0.9, 0.05, 0.05));
        assert!((fp.contrast - 27.36).abs() < 1e-12);
        let d = (fp.contrast * fp.contrast + 1.0).sqrt() - fp.contrast;
        assert!((fp.limit_ratio - d).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_noiseless_limit() {
        let fp = fixed_point(&params(0.95, 0.05, 0.0));
        assert!(fp.contrast.is_infinite());
        assert_eq!(fp.limit_ratio, 0.0);
        assert_eq!(fp.prep_fidelity_limit, 1.0);
        assert_eq!(fp.meas_noise_limit, 0.0);
    }

    #[test]
    fn condition_examples() {
        assert!(!purification_condition(&params(0.99, 0.05, 0.1)));
        assert!(purification_condition(&params(0.95, 0.05, 0.05)));
        assert!(purification_condition(&params(0.95, 0.05, 0.0)));
        // already perfect: no strict improvement possible
        assert!(!purification_condition(&params(1.0, 0.05, 0.0)));
    }

    #[test]
    fn critical_epsilon_table() {
        let table = [
            (1.0, 0.0),
            (0.99, 0.0374),
            (0.97, 0.0986),
            (0.95, 0.1460),
            (0.93, 0.1830),
            (0.9, 0.2236),
        ];
        for (f, want) in table {
            let got = critical_epsilon::<f64>(f).unwrap();
            assert!((got - want).abs() < 5e-5, "f={f}: {got} vs {want}");
        }
        assert_eq!(critical_epsilon::<f64>(0.5).unwrap(), 0.0);
        assert!(critical_epsilon::<f64>(0.49).is_err());
    }

    #[test]
    fn curves_collect_requested_depths() {
        let p = params(0.95, 0.05, 0.0);
        let curve = PurificationCurve::for_meas(p, &[0, 1, 2]).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert_eq!(curve.points[0].depth, 0);
        assert!((curve.points[1].value - 1.0 / 182.0).abs() < 1e-14);
        assert!((curve.points[2].success_prob - 0.778525).abs() < 1e-12);
    }
}
