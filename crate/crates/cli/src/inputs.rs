//! Parsers for the `kind:params` flag values and JSON input files.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qnet_core::schrodinger::{InitialState, Potential};
use qnet_core::{Amplitude, Operator};
use serde_json::Value;

fn numbers(params: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let vals = params
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| anyhow!("bad number '{p}' in {what}")))
        .collect::<Result<Vec<_>>>()?;
    if vals.len() != count {
        bail!("{what} takes {count} parameter(s), got {}", vals.len());
    }
    if vals.iter().any(|v| !v.is_finite()) {
        bail!("{what} parameters must be finite");
    }
    Ok(vals)
}

fn read_json(path: &str) -> Result<Value> {
    let text = fs::read_to_string(Path::new(path)).with_context(|| format!("reading {path}"))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
}

/// `zero | const:c | harmonic:omega | well:depth,width | file:path`.
pub fn parse_potential(s: &str) -> Result<Potential> {
    let (kind, params) = s.split_once(':').unwrap_or((s, ""));
    Ok(match kind {
        "zero" => Potential::Zero,
        "const" => Potential::Constant {
            value: numbers(params, 1, "const")?[0],
        },
        "harmonic" => Potential::Harmonic {
            omega: numbers(params, 1, "harmonic")?[0],
        },
        "well" => {
            let v = numbers(params, 2, "well")?;
            Potential::Well {
                depth: v[0],
                width: v[1],
            }
        }
        "file" => Potential::Tabulated {
            values: serde_json::from_value(read_json(params)?).context("potential file must be an array of numbers")?,
        },
        other => bail!("unknown potential '{other}'"),
    })
}

/// `gaussian:x0,sigma,k0 | basis:m | file:path`.
pub fn parse_initial(s: &str) -> Result<InitialState> {
    let (kind, params) = s.split_once(':').unwrap_or((s, ""));
    Ok(match kind {
        "gaussian" => {
            let v = numbers(params, 3, "gaussian")?;
            InitialState::Gaussian {
                x0: v[0],
                sigma: v[1],
                k0: v[2],
            }
        }
        "basis" => InitialState::Basis {
            m: params.trim().parse().map_err(|_| anyhow!("bad basis index '{params}'"))?,
        },
        "file" => InitialState::Amplitudes {
            values: serde_json::from_value(read_json(params)?)
                .context("initial-state file must be an array of [re, im] pairs")?,
        },
        other => bail!("unknown initial state '{other}'"),
    })
}

/// Either `{"rows", "cols", "entries"}` or an array of rows of `[re, im]`
/// pairs (plain numbers are read as real).
pub fn read_matrix(path: &str) -> Result<Operator> {
    let value = read_json(path)?;
    match value {
        Value::Object(_) => Ok(serde_json::from_value(value)?),
        Value::Array(rows) => {
            let parsed = rows
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| anyhow!("matrix rows must be arrays"))?
                        .iter()
                        .map(entry)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let n_rows = parsed.len();
            let n_cols = parsed.first().map_or(0, Vec::len);
            if parsed.iter().any(|r| r.len() != n_cols) {
                bail!("matrix rows have different lengths");
            }
            Ok(Operator::from_vec(n_rows, n_cols, parsed.concat())?)
        }
        _ => bail!("matrix file must hold an object or an array of rows"),
    }
}

fn entry(v: &Value) -> Result<Amplitude> {
    if let Some(x) = v.as_f64() {
        return Ok(Amplitude::new(x, 0.0));
    }
    Ok(serde_json::from_value(v.clone()).context("matrix entries must be numbers or [re, im] pairs")?)
}
