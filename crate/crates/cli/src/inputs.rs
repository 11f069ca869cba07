//! Input parsing shared by the subcommands: distribution specs, joint
//! matrices, procedure specs, and sample CSV files.

use crate::CliError;
use mia_core::brute_force::Procedure;
use mia_core::{DiscreteDistribution, JointDistribution};
use std::path::Path;

/// Parse a distribution spec. Precedence:
/// 1. `uniform:K` shorthand;
/// 2. a path to a JSON file (`{"atoms": [...], "probs": [...]}` or a bare
///    probability array);
/// 3. an inline comma-separated probability list.
pub fn parse_distribution(spec: &str) -> Result<DiscreteDistribution, CliError> {
    if let Some(k) = spec.strip_prefix("uniform:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::invalid_input(format!("bad uniform atom count {k:?}")))?;
        return DiscreteDistribution::uniform(k).map_err(CliError::from);
    }
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::io(format!("reading {spec}: {e}")))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::malformed_json(format!("{spec}: {e}")))?;
        if value.is_array() {
            let probs: Vec<f64> = serde_json::from_value(value)
                .map_err(|e| CliError::malformed_json(format!("{spec}: {e}")))?;
            return DiscreteDistribution::from_probs(probs).map_err(CliError::from);
        }
        return serde_json::from_value(value)
            .map_err(|e| CliError::invalid_input(format!("{spec}: {e}")));
    }
    let probs: Vec<f64> = spec
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::invalid_input(format!("bad probability {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    DiscreteDistribution::from_probs(probs).map_err(CliError::from)
}

fn read_inline_or_file(spec: &str, what: &str) -> Result<String, CliError> {
    if spec.trim_start().starts_with(['{', '[']) {
        return Ok(spec.to_string());
    }
    std::fs::read_to_string(spec).map_err(|e| CliError::io(format!("reading {what} {spec}: {e}")))
}

/// Parse JSON text in two stages so the error taxonomy distinguishes
/// syntax (`malformed_json`) from invalid values (`invalid_input`).
fn parse_json_value<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::malformed_json(e.to_string()))?;
    serde_json::from_value(value).map_err(|e| CliError::invalid_input(e.to_string()))
}

/// A joint distribution given inline as JSON or as a path to a JSON file.
pub fn parse_joint(spec: &str) -> Result<JointDistribution, CliError> {
    let text = read_inline_or_file(spec, "joint distribution")?;
    parse_json_value(&text)
}

/// A learning-procedure spec given inline as JSON or as a file path.
pub fn parse_procedure(spec: &str) -> Result<Procedure, CliError> {
    let text = read_inline_or_file(spec, "procedure")?;
    parse_json_value(&text)
}

/// Samples as CSV: one vector per row, comma-separated.
pub fn parse_samples_csv(path: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading samples {path}: {e}")))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    CliError::invalid_input(format!(
                        "{path}:{}: bad number {cell:?}",
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Write fraction curves as CSV with a fixed header; values carry 17
/// significant digits so the file round-trips through the JSON report.
pub fn write_fraction_csv(
    path: &str,
    eps: &[f64],
    train: &[f64],
    validation: &[f64],
) -> Result<(), CliError> {
    let mut out = String::from("eps,train_fraction,validation_fraction\n");
    for ((e, t), v) in eps.iter().zip(train).zip(validation) {
        out.push_str(&format!("{e:.16e},{t:.16e},{v:.16e}\n"));
    }
    std::fs::write(path, out).map_err(|e| CliError::io(format!("writing {path}: {e}")))
}
