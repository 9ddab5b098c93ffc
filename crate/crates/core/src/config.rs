//! Flat `key=value` experiment configuration files.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Keys are
//! `x`, `omega`, `window`, `weighting`, `seed` and the experiment parameters.

use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ExperimentConfig, PARAM_KEYS};

/// Parses an integer that may be written as `10000000`, `1e7` or `1_000_000`.
pub fn parse_count(s: &str) -> Result<u64> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(Error::Parse(format!("`{s}` is not a nonnegative integer"))),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: Vec<(String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |e: Error| match e {
            Error::Parse(m) | Error::Domain(m) => Error::Parse(format!("line {line_no}: {m}")),
            other => other,
        };
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Parse(format!("line {line_no}: expected key=value, found `{line}`")))?;
        if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
            return Err(Error::Parse(format!(
                "line {line_no}: duplicate key `{key}` (first set on line {first})"
            )));
        }
        seen.push((key.to_string(), line_no));
        match key {
            "x" => cfg.x = parse_count(value).map_err(at)?,
            "seed" => cfg.seed = parse_count(value).map_err(at)?,
            "omega" => cfg.omega = value.parse().map_err(at)?,
            "window" => cfg.window = value.parse().map_err(at)?,
            "weighting" => cfg.weighting = Some(value.parse().map_err(at)?),
            k if PARAM_KEYS.contains(&k) => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {line_no}: bad value `{value}` for `{key}`")))?;
                cfg.params.insert(k.to_string(), v);
            }
            _ => return Err(Error::Parse(format!("line {line_no}: unknown key `{key}`"))),
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
