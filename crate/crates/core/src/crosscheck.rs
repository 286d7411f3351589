//! Closed-form-vs-oracle equivalence sweep.
//!
//! Runs every closed form against the brute-force tensor oracle over a fixed
//! parameter grid and reports the worst deviation per quantity. Used by the
//! acceptance suite and the `oracle-check` CLI command.

use crate::error::Result;
use crate::netapps;
use crate::noise::{self, SpamParams};
use crate::oracle;
use crate::purify;
use crate::qops::{gates, ComplexMatrix, PovmElement};
use crate::scalar::Scalar;

/// Worst absolute deviation observed per cross-checked quantity.
#[derive(Debug, Clone, Copy)]
pub struct Deviations<T: Scalar> {
    pub prep_fidelity: T,
    pub prep_acceptance: T,
    pub meas_noise_fraction: T,
    pub meas_acceptance: T,
    pub povm_diagonals: T,
    pub distill_fidelity: T,
    pub distill_acceptance: T,
    pub swap_fidelity: T,
    pub collective_vs_pairwise: T,
}

impl<T: Scalar> Deviations<T> {
    pub fn entries(&self) -> [(&'static str, T); 9] {
        [
            ("prep fidelity", self.prep_fidelity),
            ("prep acceptance", self.prep_acceptance),
            ("meas noise fraction", self.meas_noise_fraction),
            ("meas acceptance", self.meas_acceptance),
            ("povm diagonals", self.povm_diagonals),
            ("distill fidelity", self.distill_fidelity),
            ("distill acceptance", self.distill_acceptance),
            ("swap fidelity", self.swap_fidelity),
            ("collective vs pairwise", self.collective_vs_pairwise),
        ]
    }

    pub fn max(&self) -> T {
        self.entries()
            .iter()
            .map(|(_, v)| *v)
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    }
}

/// The parameter grid the equivalence claims are made over.
pub fn grid<T: Scalar>() -> Vec<SpamParams<T>> {
    let fs = [0.75, 0.9, 0.95, 0.99];
    let qs = [0.01, 0.05, 0.1, 0.25];
    let es = [0.0, 0.01, 0.05];
    let mut out = Vec::new();
    for f in fs {
        for q in qs {
            for e in es {
                out.push(
                    SpamParams::new(
                        crate::scalar::lit(f),
                        crate::scalar::lit(q),
                        crate::scalar::lit(e),
                    )
                    .expect("grid parameters are valid"),
                );
            }
        }
    }
    out
}

fn bump<T: Scalar>(worst: &mut T, value: T) {
    let v = value.abs();
    if v > *worst {
        *worst = v;
    }
}

/// Runs the full sweep; depths run 0..=`max_depth` (the contract uses 5).
pub fn run_equivalence_sweep<T: Scalar>(max_depth: usize) -> Result<Deviations<T>> {
    let mut dev = Deviations {
        prep_fidelity: T::zero(),
        prep_acceptance: T::zero(),
        meas_noise_fraction: T::zero(),
        meas_acceptance: T::zero(),
        povm_diagonals: T::zero(),
        distill_fidelity: T::zero(),
        distill_acceptance: T::zero(),
        swap_fidelity: T::zero(),
        collective_vs_pairwise: T::zero(),
    };

    for params in grid::<T>() {
        let rho = noise::noisy_prep(
            params.prep_fidelity(),
            num_complex::Complex::new(T::zero(), T::zero()),
        )?;
        for depth in 0..=max_depth {
            let closed = purify::prep_fidelity(&params, depth)?;
            let simulated = oracle::simulate_prep_purification(
                &rho,
                params.meas_noise(),
                params.gate_noise(),
                depth,
            )?;
            bump(
                &mut dev.prep_fidelity,
                closed.fidelity - simulated.conditional_fidelity,
            );
            bump(
                &mut dev.prep_acceptance,
                closed.success_prob - simulated.acceptance_prob,
            );

            let closed = purify::meas_purified(&params, depth)?;
            let simulated = oracle::simulate_meas_purification(&params, depth)?;
            bump(
                &mut dev.meas_noise_fraction,
                closed.noise_fraction - simulated.effects.0.diagonal(1),
            );
            bump(
                &mut dev.meas_acceptance,
                closed.success_prob - simulated.success_prob,
            );
            let (r0, r1) = netapps::povm_diag_recurrence(&params, depth);
            bump(&mut dev.povm_diagonals, r0 - simulated.raw_keep);
            bump(&mut dev.povm_diagonals, r1 - simulated.raw_flip);
        }

        // one distillation round against the closed-form map
        for depth in 0..=2usize {
            let (r0, r1) = netapps::povm_diag_recurrence(&params, depth);
            let effects = (
                PovmElement::diagonal_qubit(r0, r1)?,
                PovmElement::diagonal_qubit(r1, r0)?,
            );
            for f in [0.55, 0.7, 0.85] {
                let fidelity = crate::scalar::lit::<T>(f);
                let (oracle_f, oracle_p) =
                    oracle::simulate_distill_round(fidelity, (&effects.0, &effects.1))?;
                bump(
                    &mut dev.distill_fidelity,
                    netapps::distill_map(fidelity, r0, r1)? - oracle_f,
                );
                bump(
                    &mut dev.distill_acceptance,
                    netapps::distill_success(fidelity, r0, r1)? - oracle_p,
                );
            }
        }

        if params.gate_noise() == T::zero() {
            for m in 0..=3usize {
                let simulated = oracle::simulate_swap(&params, m)?;
                bump(
                    &mut dev.swap_fidelity,
                    netapps::swap_fidelity(&params, m)? - simulated.fidelity,
                );
            }
        }
    }

    for n in 1..=max_depth.max(1) {
        let collective = gates::collective_cnot::<T>(n);
        let mut product = ComplexMatrix::identity(1 << (n + 1));
        for i in 1..=n {
            let embedded = ComplexMatrix::embed_two_qubit_op(&gates::cnot(), n + 1, 0, i)?;
            product = embedded.matmul(&product);
        }
        bump(
            &mut dev.collective_vs_pairwise,
            collective.max_abs_diff(&product),
        );
    }

    Ok(dev)
}
