//! Reproduction of the four reference tables as CSV files.

use std::path::{Path, PathBuf};

use spam_purify::netapps::{self, DistillOutcome};
use spam_purify::noise::SpamParams;
use spam_purify::purify;
use spam_purify::verify;

use crate::config::{resolve_output, ConfigFile};
use crate::emit::{format_sig, to_csv, write_output, Record};
use crate::error::CliError;
use crate::Shared;

fn meas_purification_table() -> Vec<Record> {
    [0.25, 0.20, 0.15, 0.10, 0.05]
        .into_iter()
        .map(|q| {
            let params = SpamParams::balanced(q).expect("balanced rates are valid");
            let mut record = Record::new().num("error_rate", q);
            for m in 0..=2usize {
                let out = purify::meas_purified(&params, m).expect("valid parameters");
                record = match m {
                    0 => record
                        .num_with_display("t0", "t0_display", out.noise_fraction, 3)
                        .num_with_display("ps0", "ps0_display", out.success_prob, 3),
                    1 => record
                        .num_with_display("t1", "t1_display", out.noise_fraction, 3)
                        .num_with_display("ps1", "ps1_display", out.success_prob, 3),
                    _ => record
                        .num_with_display("t2", "t2_display", out.noise_fraction, 3)
                        .num_with_display("ps2", "ps2_display", out.success_prob, 3),
                };
            }
            record
        })
        .collect()
}

fn critical_epsilon_table() -> Vec<Record> {
    [0.0, 0.01, 0.03, 0.05, 0.07, 0.10]
        .into_iter()
        .map(|prep_error| {
            let eps_c = purify::critical_epsilon(1.0 - prep_error).expect("valid fidelity");
            Record::new()
                .num("prep_error", prep_error)
                .num_with_display("eps_c", "eps_c_display", eps_c, 4)
        })
        .collect()
}

fn verification_table() -> Vec<Record> {
    let cases = [
        (0.90, 0.10, 0.00),
        (0.90, 0.05, 0.01),
        (0.97, 0.05, 0.03),
        (0.95, 0.05, 0.05),
        (0.99, 0.05, 0.10),
    ];
    cases
        .into_iter()
        .enumerate()
        .map(|(idx, (f, q, eps))| {
            let params = SpamParams::new(f, q, eps).expect("case parameters are valid");
            let predicted = verify::predict_probs(&params);
            let inferred = verify::infer_params(&predicted).expect("cases are on-model");
            let limit = purify::fixed_point(&params).prep_fidelity_limit;
            let mut record = Record::new()
                .int("case", idx + 1)
                .num("f", f)
                .num("q", q)
                .num("eps", eps)
                .num("p00", predicted.p00)
                .num_with_display("p01", "p01_display", predicted.p01, 4)
                .num_with_display("p10", "p10_display", predicted.p10, 4)
                .num_with_display("p11", "p11_display", predicted.p11, 4)
                .num("inferred_f", inferred.params.prep_fidelity())
                .num("inferred_q", inferred.params.meas_noise())
                .num("inferred_eps", inferred.params.gate_noise())
                .num("residual", inferred.residual);
            for depth in 1..=3usize {
                let fidelity = purify::prep_fidelity(&params, depth)
                    .expect("valid parameters")
                    .fidelity;
                record = match depth {
                    1 => record.num_with_display("f1", "f1_display", fidelity, 3),
                    2 => record.num_with_display("f2", "f2_display", fidelity, 3),
                    _ => record.num_with_display("f3", "f3_display", fidelity, 3),
                };
            }
            record.num_with_display("f_limit", "f_limit_display", limit, 3)
        })
        .collect()
}

fn distillation_copies_table() -> Vec<Record> {
    let params = SpamParams::new(0.95, 0.05, 0.0).expect("valid parameters");
    let mut records = Vec::new();
    for f0 in [0.6, 0.7, 0.8, 0.9] {
        for n in 0..=4usize {
            let (threshold, _) = netapps::distill_threshold(&params, n);
            let outcome = netapps::copies_needed(&params, n, f0, netapps::DISTILL_TARGET)
                .expect("valid start fidelity");
            let record = Record::new()
                .num("start_fidelity", f0)
                .int("depth", n)
                .num("threshold", threshold);
            records.push(match outcome {
                DistillOutcome::Undistillable { .. } => record
                    .text("status", "undistillable")
                    .text("copies", "")
                    .text("copies_display", "")
                    .text("first_round_success", "")
                    .text("first_round_success_display", "")
                    .text("rounds", "")
                    .text("final_fidelity", ""),
                DistillOutcome::Converged(trace) => {
                    let first = trace.rounds.first().expect("at least one round");
                    record
                        .text("status", "ok")
                        .num("copies", trace.copies)
                        .text("copies_display", format_sig(trace.copies, 4))
                        .num("first_round_success", first.success_prob)
                        .text(
                            "first_round_success_display",
                            crate::emit::display_decimals(first.success_prob, 3),
                        )
                        .text("rounds", trace.rounds.len().to_string())
                        .text("final_fidelity", format_sig(trace.final_fidelity, 12))
                }
            });
        }
    }
    records
}

pub fn tables(shared: &Shared) -> Result<(), CliError> {
    let config = ConfigFile::load(shared.config.as_deref())?;
    let dir =
        resolve_output(shared.output.clone(), &config)?.unwrap_or_else(|| PathBuf::from("tables"));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;

    let files: [(&str, &str, &[&str], Vec<Record>); 4] = [
        (
            "measurement_purification.csv",
            "mirrors: measurement-purification table - residual noise fraction T(m) and success probability p_s(m) for m = 0..2 ancillas, balanced SPAM errors, ideal gates",
            &[
                "error_rate", "t0", "t0_display", "ps0", "ps0_display",
                "t1", "t1_display", "ps1", "ps1_display",
                "t2", "t2_display", "ps2", "ps2_display",
            ],
            meas_purification_table(),
        ),
        (
            "critical_epsilon.csv",
            "mirrors: critical CNOT error rates - purification threshold eps_c vs balanced preparation/measurement error",
            &["prep_error", "eps_c", "eps_c_display"],
            critical_epsilon_table(),
        ),
        (
            "verification.csv",
            "mirrors: SPAM verification table - predicted two-qubit outcome probabilities, recovered parameters, and purified fidelities for five parameter sets",
            &[
                "case", "f", "q", "eps",
                "p00", "p01", "p01_display", "p10", "p10_display", "p11", "p11_display",
                "inferred_f", "inferred_q", "inferred_eps", "residual",
                "f1", "f1_display", "f2", "f2_display", "f3", "f3_display",
                "f_limit", "f_limit_display",
            ],
            verification_table(),
        ),
        (
            "distillation_copies.csv",
            "mirrors: distillation copy-count table - expected copies N_c and first-round success vs start fidelity and purification depth, 5% balanced errors, ideal gates",
            &[
                "start_fidelity", "depth", "threshold", "status",
                "copies", "copies_display",
                "first_round_success", "first_round_success_display",
                "rounds", "final_fidelity",
            ],
            distillation_copies_table(),
        ),
    ];
    for (name, comment, columns, records) in files {
        let path: &Path = &dir.join(name);
        write_output(&to_csv(columns, &records, Some(comment)), Some(path))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
