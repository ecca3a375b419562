use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::config::{Command, RunConfig, SourceSpec};
use super::report::{float, Report, Verdict};
use super::CliError;
use crate::protocol::{run_session, Cooperation, SessionTranscript};
use crate::rng::stream_rng;
use crate::security::{
    assess_channel, check_probe_separability, detection_curve, eve_outcome_probabilities,
    exact_parity_means, parity_test, z_all_equal_probability, z_basis_test, ChannelSource,
    ChannelVerdict, CorrelationStats, ParityOperator, ParityStats,
};

// Stream indices per phase, so phases never share draws.
const SESSION_STREAM: u64 = 0;
const Z_TEST_STREAM: u64 = 1;
const PARITY_STREAM: u64 = 2;
const SWEEP_STREAM: u64 = 3;

fn config_echo(config: &RunConfig) -> Value {
    let mut echo = json!({
        "command": config.command.as_str(),
        "source": config.source.label(),
        "seed": config.seed,
        "seed_generated": config.seed_generated,
    });
    let obj = echo.as_object_mut().expect("object literal");
    if let Some(m) = &config.message {
        obj.insert("message".into(), json!(m));
    }
    match config.command {
        Command::Send => {
            let coop = match config.cooperation {
                Cooperation::Cooperative => "cooperative",
                Cooperation::Refused => "refused",
            };
            obj.insert("cooperation".into(), json!(coop));
        }
        Command::TestChannel | Command::Attack => {
            obj.insert("samples".into(), json!(config.samples));
        }
        Command::DetectionSweep => {
            obj.insert("k_max".into(), json!(config.k_max));
            obj.insert("trials".into(), json!(config.trials));
        }
    }
    echo
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn transcript_summary(transcript: &SessionTranscript) -> Value {
    let mut bell: BTreeMap<String, usize> = BTreeMap::new();
    let mut charlie: BTreeMap<String, usize> = BTreeMap::new();
    for r in &transcript.records {
        *bell.entry(format!("{}{}", r.bell.bits()[0], r.bell.bits()[1])).or_default() += 1;
        if let Some(c) = r.charlie {
            *charlie.entry(c.code().to_string()).or_default() += 1;
        }
    }
    json!({
        "records": transcript.len(),
        "classical_bits_per_record": transcript.records.first().map_or(0, |r| r.classical_bits().len()),
        "digest_sha256": transcript.digest(),
        "bell_counts": bell,
        "charlie_counts": charlie,
    })
}

fn session_payload(
    message: &[u8],
    source: &ChannelSource,
    cooperation: Cooperation,
    seed: u64,
) -> crate::Result<(Value, bool)> {
    let (recovered, transcript) = run_session(message, source, cooperation, &mut stream_rng(seed, SESSION_STREAM))?;
    let errors = recovered.iter().zip(message).filter(|(a, b)| a != b).count();
    Ok((
        json!({
            "recovered": bits_to_string(&recovered),
            "message_length": message.len(),
            "bit_errors": errors,
            "transcript": transcript_summary(&transcript),
        }),
        errors == 0,
    ))
}

fn z_payload(z: &CorrelationStats) -> Value {
    json!({
        "samples": z.samples,
        "all_equal_count": z.all_equal_count,
        "fraction": float(z.fraction()),
    })
}

fn parity_payload(stats: &ParityStats) -> Value {
    let per_op: BTreeMap<&str, Value> = stats
        .tallies
        .iter()
        .map(|(op, t)| {
            let triples: BTreeMap<String, usize> = t
                .triples
                .iter()
                .map(|(tr, n)| (format!("{},{},{}", tr[0], tr[1], tr[2]), *n))
                .collect();
            (
                op.letters(),
                json!({
                    "samples": t.samples,
                    "mean": float(t.mean()),
                    "honest_value": op.honest_value(),
                    "triples": triples,
                }),
            )
        })
        .collect();
    json!(per_op)
}

fn channel_tests(source: &ChannelSource, config: &RunConfig) -> crate::Result<(Value, ChannelVerdict)> {
    let z = z_basis_test(source, config.samples, &mut stream_rng(config.seed, Z_TEST_STREAM))?;
    let parity = parity_test(source, config.samples, &mut stream_rng(config.seed, PARITY_STREAM))?;
    let assessment = assess_channel(&z, &parity);
    let deviating: Vec<&str> = assessment.deviating_operators.iter().map(|o| o.letters()).collect();
    Ok((
        json!({
            "z_test": z_payload(&z),
            "parity_test": parity_payload(&parity),
            "assessment": {
                "z_violations": assessment.z_violations,
                "parity_violations": assessment.parity_violations,
                "deviating_operators": deviating,
                "verdict": assessment.verdict.as_str(),
            },
        }),
        assessment.verdict,
    ))
}

fn exact_payload(source: &ChannelSource, spec: &SourceSpec) -> crate::Result<Value> {
    let means = exact_parity_means(source)?;
    let means: BTreeMap<&str, Value> = ParityOperator::ALL
        .iter()
        .zip(means)
        .map(|(op, m)| (op.letters(), float(m)))
        .collect();
    let mut out = json!({
        "description": source.description,
        "z_all_equal_probability": float(z_all_equal_probability(source)?),
        "parity_means": means,
    });
    let obj = out.as_object_mut().expect("object literal");
    match spec {
        SourceSpec::GhzIntercept => {
            let outcomes: BTreeMap<String, Value> = eve_outcome_probabilities()
                .into_iter()
                .map(|(name, p)| (name, float(p)))
                .collect();
            obj.insert("eve_outcome_probabilities".into(), json!(outcomes));
        }
        SourceSpec::Probe { .. } => {
            let state = source.sample(&mut stream_rng(0, 0))?;
            let sep = check_probe_separability(&state, 1e-8)?;
            obj.insert(
                "separability".into(),
                json!({
                    "verdict": sep.verdict.as_str(),
                    "ghz_fidelity": float(sep.ghz_fidelity),
                    "parities": sep.parities.iter().map(|v| float(*v)).collect::<Vec<_>>(),
                }),
            );
        }
        SourceSpec::Honest => {}
    }
    Ok(out)
}

fn channel_verdict(v: ChannelVerdict) -> Verdict {
    match v {
        ChannelVerdict::ChannelOk => Verdict::ChannelOk,
        ChannelVerdict::EavesdropperDetected => Verdict::EavesdropperDetected,
    }
}

fn execute(config: &RunConfig, source: &ChannelSource) -> crate::Result<(Value, Verdict)> {
    match config.command {
        Command::Send => {
            let message = config.message_bits().unwrap_or_default();
            let (payload, exact) = session_payload(&message, source, config.cooperation, config.seed)?;
            Ok((payload, if exact { Verdict::Pass } else { Verdict::MessageCorrupted }))
        }
        Command::TestChannel => {
            let (payload, verdict) = channel_tests(source, config)?;
            Ok((payload, channel_verdict(verdict)))
        }
        Command::Attack => {
            let (mut payload, verdict) = channel_tests(source, config)?;
            let obj = payload.as_object_mut().expect("object literal");
            obj.insert("exact".into(), exact_payload(source, &config.source)?);
            if let Some(message) = config.message_bits() {
                let (session, _) = session_payload(&message, source, Cooperation::Cooperative, config.seed)?;
                obj.insert("session".into(), session);
            }
            Ok((payload, channel_verdict(verdict)))
        }
        Command::DetectionSweep => {
            let curve = detection_curve(source, config.k_max, config.trials, &mut stream_rng(config.seed, SWEEP_STREAM))?;
            let escape = z_all_equal_probability(source)?;
            let points: Vec<Value> = curve
                .iter()
                .map(|p| {
                    json!({
                        "k": p.k,
                        "trials": p.trials,
                        "detections": p.detections,
                        "probability": float(p.probability()),
                        "exact": float(1.0 - escape.powi(p.k as i32)),
                    })
                })
                .collect();
            let detected = curve.iter().any(|p| p.detections > 0);
            Ok((
                json!({
                    "per_triplet_escape_probability": float(escape),
                    "curve": points,
                }),
                if detected { Verdict::EavesdropperDetected } else { Verdict::ChannelOk },
            ))
        }
    }
}

/// Dispatches a resolved configuration and builds its report.
pub fn run_command(config: &RunConfig) -> Result<Report, CliError> {
    let wrap = |source| CliError::Run {
        command: config.command.as_str(),
        source,
    };
    let source = match &config.source {
        SourceSpec::Honest => ChannelSource::honest(),
        SourceSpec::GhzIntercept => ChannelSource::ghz_intercept(),
        SourceSpec::Probe { probe, signs, .. } => {
            ChannelSource::probe_coupled(probe.clone(), *signs).map_err(wrap)?
        }
    };
    let (result, verdict) = execute(config, &source).map_err(wrap)?;
    Ok(Report {
        config: config_echo(config),
        result,
        verdict,
    })
}
