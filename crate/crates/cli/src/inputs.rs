//! Loading models, systems and `X` channels from JSON files or the casebook.

use mtsc::model::{casebook, AuxSystem, CaseInstance, Casebook, SourceModel, XChannel};
use std::fs;

use crate::CliError;

/// `casebook:toy`, `casebook:toy-bt-gamma`, `casebook:appendix-c`, `casebook:erasure:P,L,D`.
fn case(source: &str) -> Result<Option<CaseInstance>, CliError> {
    let Some(name) = source.strip_prefix("casebook:") else {
        return Ok(None);
    };
    let which = match name {
        "toy" => Casebook::Toy,
        "toy-bt-gamma" => Casebook::ToyBtGamma,
        "appendix-c" => Casebook::AppendixC,
        _ => {
            let args = name
                .strip_prefix("erasure:")
                .ok_or_else(|| CliError::usage(format!("unknown casebook entry `{name}`")))?;
            let parts: Vec<&str> = args.split(',').collect();
            let bad = || CliError::usage(format!("expected casebook:erasure:P,L,D, got `{name}`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            Casebook::Erasure {
                p: parts[0].trim().parse().map_err(|_| bad())?,
                encoders: parts[1].trim().parse().map_err(|_| bad())?,
                distortion: parts[2].trim().parse().map_err(|_| bad())?,
            }
        }
    };
    casebook(which).map(Some).map_err(CliError::from)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {what} `{path}`: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid {what} `{path}`: {e}")))
}

pub fn model(source: &str) -> Result<SourceModel, CliError> {
    match case(source)? {
        Some(c) => Ok(c.model),
        None => read_json(source, "model"),
    }
}

pub fn gamma(source: &str) -> Result<AuxSystem, CliError> {
    match case(source)? {
        Some(c) => Ok(c.gamma),
        None => read_json(source, "auxiliary system"),
    }
}

/// A file, a casebook entry, or one of `hidden`, `observations`, `constant`.
pub fn x(source: &str, model: &SourceModel) -> Result<XChannel, CliError> {
    let built = match source {
        "hidden" => XChannel::hidden(model),
        "observations" => XChannel::observations(model),
        "constant" => XChannel::constant(model),
        _ => {
            return match case(source)? {
                Some(c) => c
                    .x
                    .ok_or_else(|| CliError::usage(format!("casebook entry `{source}` has no X channel"))),
                None => read_json(source, "X channel"),
            }
        }
    };
    built.map_err(CliError::from)
}
