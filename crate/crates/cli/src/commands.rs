//! Subcommand implementations. Every command exercises public library
//! operations only and produces deterministic output.

use std::path::PathBuf;

use spam_purify::netapps::{self, DistillOutcome};
use spam_purify::noise::SpamParams;
use spam_purify::purify;
use spam_purify::verify;
use spam_purify::{crosscheck, SpamParams64};

use crate::config::{resolve, resolve_output, ConfigFile, DepthRange, OutputFormat};
use crate::emit::{display_decimals, format_sig, to_csv, to_json, write_output, Record};
use crate::error::CliError;
use crate::Shared;

pub struct Resolved {
    pub params: SpamParams64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub config: ConfigFile,
}

pub fn resolve_shared(shared: &Shared) -> Result<Resolved, CliError> {
    let config = ConfigFile::load(shared.config.as_deref())?;
    let f = resolve(shared.f, &config, "f", None)?;
    let q = resolve(shared.q, &config, "q", None)?;
    let eps = resolve(shared.eps, &config, "eps", Some(0.0))?;
    let params = SpamParams::new(f, q, eps).map_err(CliError::from)?;
    let format = resolve(shared.format, &config, "format", Some(OutputFormat::Csv))?;
    let output = resolve_output(shared.output.clone(), &config)?;
    Ok(Resolved {
        params,
        format,
        output,
        config,
    })
}

fn emit_records(
    columns: &[&str],
    records: &[Record],
    resolved: &Resolved,
    comment: Option<&str>,
) -> Result<(), CliError> {
    let content = match resolved.format {
        OutputFormat::Csv => to_csv(columns, records, comment),
        OutputFormat::Json => to_json(records),
    };
    write_output(&content, resolved.output.as_deref())
}

pub fn purify_prep(shared: &Shared, depths: Option<DepthRange>) -> Result<(), CliError> {
    let resolved = resolve_shared(shared)?;
    let range = resolve(
        depths,
        &resolved.config,
        "n",
        Some(DepthRange { start: 0, end: 4 }),
    )?;
    let records: Vec<Record> = range
        .iter()
        .map(|n| {
            let out = purify::prep_fidelity(&resolved.params, n)?;
            Ok(Record::new()
                .int("n", n)
                .num_with_display("fidelity", "fidelity_display", out.fidelity, 3)
                .num_with_display("success_prob", "success_display", out.success_prob, 4))
        })
        .collect::<Result<_, spam_purify::Error>>()
        .map_err(CliError::from)?;
    emit_records(
        &[
            "n",
            "fidelity",
            "fidelity_display",
            "success_prob",
            "success_display",
        ],
        &records,
        &resolved,
        Some("purified preparation fidelity and acceptance probability per ancilla count"),
    )
}

pub fn purify_meas(shared: &Shared, depths: Option<DepthRange>) -> Result<(), CliError> {
    let resolved = resolve_shared(shared)?;
    let range = resolve(
        depths,
        &resolved.config,
        "m",
        Some(DepthRange { start: 0, end: 4 }),
    )?;
    let records: Vec<Record> = range
        .iter()
        .map(|m| {
            let out = purify::meas_purified(&resolved.params, m)?;
            Ok(Record::new()
                .int("m", m)
                .num_with_display("noise_fraction", "noise_display", out.noise_fraction, 3)
                .num_with_display("success_prob", "success_display", out.success_prob, 3))
        })
        .collect::<Result<_, spam_purify::Error>>()
        .map_err(CliError::from)?;
    emit_records(
        &[
            "m",
            "noise_fraction",
            "noise_display",
            "success_prob",
            "success_display",
        ],
        &records,
        &resolved,
        Some("purified measurement noise fraction and acceptance probability per ancilla count"),
    )
}

pub fn fixed_point(shared: &Shared) -> Result<(), CliError> {
    let resolved = resolve_shared(shared)?;
    let fp = purify::fixed_point(&resolved.params);
    let record = Record::new()
        .num("f", resolved.params.prep_fidelity())
        .num("q", resolved.params.meas_noise())
        .num("eps", resolved.params.gate_noise())
        .num("contrast", fp.contrast)
        .num("limit_ratio", fp.limit_ratio)
        .num_with_display(
            "prep_fidelity_limit",
            "prep_limit_display",
            fp.prep_fidelity_limit,
            3,
        )
        .num_with_display(
            "meas_noise_limit",
            "meas_limit_display",
            fp.meas_noise_limit,
            3,
        );
    emit_records(
        &[
            "f",
            "q",
            "eps",
            "contrast",
            "limit_ratio",
            "prep_fidelity_limit",
            "prep_limit_display",
            "meas_noise_limit",
            "meas_limit_display",
        ],
        &[record],
        &resolved,
        Some("noisy-gate purification fixed point"),
    )
}

pub fn condition(shared: &Shared) -> Result<(), CliError> {
    let resolved = resolve_shared(shared)?;
    let params = resolved.params;
    let holds = purify::purification_condition(&params);
    let one_round = purify::prep_fidelity(&params, 1)
        .map(|p| p.fidelity)
        .map_err(CliError::from)?;
    let balanced = ((1.0 - params.prep_fidelity()) - params.meas_noise()).abs() < 1e-9;
    let eps_c_note = if balanced {
        let eps_c = purify::critical_epsilon(params.prep_fidelity()).map_err(CliError::from)?;
        format!(" (eps_c = {})", display_decimals(eps_c, 4))
    } else {
        String::new()
    };
    let line = if holds {
        format!(
            "purifiable{eps_c_note}: one round raises the fidelity from {} to {}",
            format_sig(params.prep_fidelity(), 12),
            format_sig(one_round, 12),
        )
    } else {
        format!(
            "not purifiable{eps_c_note}: one round moves the fidelity from {} to {}",
            format_sig(params.prep_fidelity(), 12),
            format_sig(one_round, 12),
        )
    };
    println!("{line}");
    if resolved.output.is_some() {
        let record = Record::new()
            .num("f", params.prep_fidelity())
            .num("q", params.meas_noise())
            .num("eps", params.gate_noise())
            .text("purifiable", if holds { "yes" } else { "no" })
            .num("one_round_fidelity", one_round);
        emit_records(
            &["f", "q", "eps", "purifiable", "one_round_fidelity"],
            &[record],
            &resolved,
            Some("purification condition"),
        )?;
    }
    Ok(())
}

fn parse_probs(raw: &str) -> Result<verify::OutcomeDistribution<f64>, CliError> {
    let value: serde_json::Value = serde_json::from_str(raw)
        .map_err(|e| CliError::Invalid(format!("--probs is not valid JSON: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| CliError::Invalid("--probs must be a JSON object".into()))?;
    let mut weights = [0.0f64; 4];
    let keys = ["p00", "p01", "p10", "p11"];
    for (slot, key) in weights.iter_mut().zip(keys) {
        *slot = object.get(key).and_then(|v| v.as_f64()).ok_or_else(|| {
            CliError::Invalid(format!("--probs must contain a numeric {key:?} entry"))
        })?;
    }
    for key in object.keys() {
        if !keys.contains(&key.as_str()) {
            return Err(CliError::Invalid(format!(
                "--probs contains unknown key {key:?}"
            )));
        }
    }
    verify::OutcomeDistribution::from_weights(weights[0], weights[1], weights[2], weights[3])
        .map_err(CliError::from)
}

pub fn verify_cmd(shared: &Shared, probs: Option<String>) -> Result<(), CliError> {
    // verify only needs the distribution; SPAM parameters are its output.
    let config = ConfigFile::load(shared.config.as_deref())?;
    let format = resolve(shared.format, &config, "format", Some(OutputFormat::Csv))?;
    let output = resolve_output(shared.output.clone(), &config)?;
    let seed = resolve(shared.seed, &config, "seed", Some(0))?;
    let raw = probs.ok_or_else(|| {
        CliError::Invalid("missing --probs '{\"p00\":..,\"p01\":..,\"p10\":..,\"p11\":..}'".into())
    })?;
    let dist = parse_probs(&raw)?;
    let inference = verify::infer_params_seeded(&dist, seed).map_err(CliError::from)?;
    let params = inference.params;
    println!(
        "f = {}  q = {}  eps = {}  (residual {}{})",
        display_decimals(params.prep_fidelity(), 4),
        display_decimals(params.meas_noise(), 4),
        display_decimals(params.gate_noise(), 4),
        format_sig(inference.residual, 3),
        if inference.ambiguous {
            ", ambiguous: a distinct minimum ties"
        } else {
            ""
        },
    );
    if output.is_some() {
        let record = Record::new()
            .num("f", params.prep_fidelity())
            .num("q", params.meas_noise())
            .num("eps", params.gate_noise())
            .num("residual", inference.residual)
            .text("ambiguous", if inference.ambiguous { "yes" } else { "no" });
        let content = match format {
            OutputFormat::Csv => to_csv(
                &["f", "q", "eps", "residual", "ambiguous"],
                &[record],
                Some("verified SPAM parameters"),
            ),
            OutputFormat::Json => to_json(&[record]),
        };
        write_output(&content, output.as_deref())?;
    }
    Ok(())
}

pub fn distill(
    shared: &Shared,
    f0: Option<f64>,
    n: Option<usize>,
    target: Option<f64>,
) -> Result<(), CliError> {
    let resolved = resolve_shared(shared)?;
    let f0 = resolve(f0, &resolved.config, "f0", None)?;
    let n = resolve(n, &resolved.config, "n", Some(0))?;
    let target = resolve(
        target,
        &resolved.config,
        "target",
        Some(netapps::DISTILL_TARGET),
    )?;
    let (threshold, limit) = netapps::distill_threshold(&resolved.params, n);
    match netapps::copies_needed(&resolved.params, n, f0, target).map_err(CliError::from)? {
        DistillOutcome::Undistillable { threshold } => Err(CliError::Flagged(format!(
            "undistillable: start fidelity {} is at or below the threshold L({n}) = {}",
            format_sig(f0, 12),
            format_sig(threshold, 12),
        ))),
        DistillOutcome::Converged(trace) => {
            println!(
                "threshold L({n}) = {} (limit {})",
                format_sig(threshold, 12),
                format_sig(limit, 12)
            );
            println!(
                "rounds = {}, final fidelity = {}",
                trace.rounds.len(),
                format_sig(trace.final_fidelity, 12)
            );
            if let Some(first) = trace.rounds.first() {
                println!(
                    "first-round success = {}",
                    format_sig(first.success_prob, 12)
                );
            }
            println!("expected copies = {}", format_sig(trace.copies, 4));
            if resolved.output.is_some() {
                let records: Vec<Record> = trace
                    .rounds
                    .iter()
                    .map(|r| {
                        let next = trace
                            .rounds
                            .get(r.index + 1)
                            .map(|after| after.fidelity)
                            .unwrap_or(trace.final_fidelity);
                        Record::new()
                            .int("round", r.index)
                            .num_with_display("fidelity", "fidelity_display", r.fidelity, 3)
                            .num_with_display("success_prob", "success_display", r.success_prob, 3)
                            .num_with_display("next_fidelity", "next_display", next, 3)
                    })
                    .collect();
                emit_records(
                    &[
                        "round",
                        "fidelity",
                        "fidelity_display",
                        "success_prob",
                        "success_display",
                        "next_fidelity",
                        "next_display",
                    ],
                    &records,
                    &resolved,
                    Some("distillation trace: per-round fidelity, acceptance, and output fidelity"),
                )?;
            }
            Ok(())
        }
    }
}

pub fn swap(shared: &Shared, depths: Option<DepthRange>) -> Result<(), CliError> {
    let resolved = resolve_shared(shared)?;
    let range = resolve(
        depths,
        &resolved.config,
        "m",
        Some(DepthRange { start: 0, end: 4 }),
    )?;
    let records: Vec<Record> = range
        .iter()
        .map(|m| {
            let fidelity = netapps::swap_fidelity(&resolved.params, m)?;
            Ok(Record::new().int("m", m).num_with_display(
                "fidelity",
                "fidelity_display",
                fidelity,
                4,
            ))
        })
        .collect::<Result<_, spam_purify::Error>>()
        .map_err(CliError::from)?;
    emit_records(
        &["m", "fidelity", "fidelity_display"],
        &records,
        &resolved,
        Some("entanglement-swap fidelity per repeater purification depth"),
    )
}

pub fn oracle_check(shared: &Shared, depth: Option<usize>) -> Result<(), CliError> {
    let config = ConfigFile::load(shared.config.as_deref())?;
    let depth = resolve(depth, &config, "n", Some(5))?;
    let deviations = crosscheck::run_equivalence_sweep::<f64>(depth).map_err(CliError::from)?;
    for (name, value) in deviations.entries() {
        println!(
            "{name:<24} max |closed - oracle| = {}",
            format_sig(value, 3)
        );
    }
    let worst = deviations.max();
    println!("worst deviation          {}", format_sig(worst, 3));
    let pass = worst < 1e-10 && deviations.collective_vs_pairwise < 1e-12;
    if pass {
        println!("oracle-check: PASS");
        Ok(())
    } else {
        Err(CliError::Flagged(format!(
            "oracle-check: FAIL (worst deviation {})",
            format_sig(worst, 3)
        )))
    }
}
