//! Textual state descriptions used on the command line.
//!
//! ```text
//! gaussian:<mean>,<variance>
//! cat:<separation>,<variance>
//! file:<path>            two-column CSV: x, real amplitude (uniform x)
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::grid::Grid;
use super::state::{build_cat, build_gaussian, GaussianSpec, WaveFunction};
use super::GridPolicy;
use crate::error::{QndError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Gaussian(GaussianSpec),
    Cat { separation: f64, variance: f64 },
    File(PathBuf),
}

impl StateSpec {
    /// Builds the state on the lattice the policy prescribes for it.
    pub fn build(&self, policy: &GridPolicy) -> Result<WaveFunction> {
        match self {
            StateSpec::Gaussian(spec) => build_gaussian(*spec, policy.grid_for_gaussian(spec)?),
            StateSpec::Cat {
                separation,
                variance,
            } => build_cat(
                *separation,
                *variance,
                policy.grid_for_cat(*separation, *variance)?,
            ),
            StateSpec::File(path) => load_amplitude_csv(path),
        }
    }
}

fn parse_pair(body: &str, what: &str) -> Result<(f64, f64)> {
    let mut parts = body.split(',');
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(QndError::Parse(format!(
            "{what} expects two comma-separated numbers, got '{body}'"
        )));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| QndError::Parse(format!("'{s}' is not a number")))
    };
    Ok((num(a)?, num(b)?))
}

impl FromStr for StateSpec {
    type Err = QndError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| QndError::Parse(format!("state '{s}' lacks a '<kind>:' prefix")))?;
        match kind.trim() {
            "gaussian" => {
                let (mean, variance) = parse_pair(body, "gaussian")?;
                Ok(StateSpec::Gaussian(GaussianSpec::new(mean, variance)?))
            }
            "cat" => {
                let (separation, variance) = parse_pair(body, "cat")?;
                if !(variance > 0.0) || !separation.is_finite() {
                    return Err(QndError::Parse(format!("invalid cat parameters '{body}'")));
                }
                Ok(StateSpec::Cat {
                    separation,
                    variance,
                })
            }
            "file" if !body.is_empty() => Ok(StateSpec::File(PathBuf::from(body))),
            other => Err(QndError::Parse(format!("unknown state kind '{other}'"))),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Gaussian(g) => write!(f, "gaussian:{},{}", g.mean, g.variance),
            StateSpec::Cat {
                separation,
                variance,
            } => write!(f, "cat:{separation},{variance}"),
            StateSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl Serialize for StateSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Reads `x, amplitude` rows. A non-numeric first row is treated as a header
/// and `#` lines are comments. The x column must be uniformly spaced.
pub fn load_amplitude_csv(path: &Path) -> Result<WaveFunction> {
    let io_err = |e: &dyn fmt::Display| QndError::Parse(format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(&e))?;
    let mut xs = Vec::new();
    let mut amps = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| io_err(&e))?;
        if record.len() < 2 {
            return Err(io_err(&format!(
                "row {} has fewer than two columns",
                row + 1
            )));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(x), Ok(a)) => {
                xs.push(x);
                amps.push(a);
            }
            _ if row == 0 => continue,
            _ => return Err(io_err(&format!("row {} is not numeric", row + 1))),
        }
    }
    if xs.len() < 2 {
        return Err(io_err(&"too few rows"));
    }
    let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len())?;
    let h = grid.step();
    for (k, &x) in xs.iter().enumerate() {
        if (x - grid.point(k)).abs() > 1e-6 * h {
            return Err(io_err(&format!("x column is not uniform at row {}", k + 1)));
        }
    }
    WaveFunction::from_real(grid, &amps)
}
