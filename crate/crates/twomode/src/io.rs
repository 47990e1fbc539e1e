//! Plain-text covariance matrix files ("cmv1").
//!
//! ```text
//! # any number of comment lines, anywhere
//! cmv1 2
//! 0.33 0 0 0
//! 0 7.94 0 0
//! 0 0 7.94 0
//! 0 0 0 0.33
//! ```
//!
//! Line 1 (ignoring comments/blanks) is `cmv1 <n>` with `n` the mode count;
//! the following `2n` data lines carry `2n` whitespace-separated entries
//! each, row-major. Values are written with shortest-round-trip formatting,
//! so write/read cycles are lossless. Symmetry is enforced on load by
//! averaging `(M + M^T)/2`; asymmetry beyond
//! [`ASYMMETRY_WARN_THRESHOLD`] is surfaced via [`LoadedCm::max_asymmetry`]
//! for callers to warn about.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::CovarianceMatrix;

/// Asymmetry (max `|M - M^T|` entry) beyond which loaders should warn.
pub const ASYMMETRY_WARN_THRESHOLD: f64 = 1e-6;

/// A covariance matrix parsed from text, with loader diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedCm {
    pub cm: CovarianceMatrix,
    /// Largest `|M[i,j] - M[j,i]|` seen before symmetrization.
    pub max_asymmetry: f64,
}

impl LoadedCm {
    pub fn asymmetry_exceeds_threshold(&self) -> bool {
        self.max_asymmetry > ASYMMETRY_WARN_THRESHOLD
    }
}

/// Parses the cmv1 text format.
pub fn parse_cm(text: &str) -> Result<LoadedCm> {
    let mut data_lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = data_lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty file: expected a `cmv1 <n>` header".into(),
    })?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("cmv1") {
        return Err(Error::Parse {
            line: header_line,
            message: format!("expected `cmv1 <n>` header, found `{header}`"),
        });
    }
    let n_modes: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Parse {
            line: header_line,
            message: "header needs a positive mode count, e.g. `cmv1 2`".into(),
        })?;
    if tokens.next().is_some() {
        return Err(Error::Parse {
            line: header_line,
            message: "unexpected extra tokens after the mode count".into(),
        });
    }

    let dim = 2 * n_modes;
    let mut mat: DMatrix<f64> = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        let (line_no, line) = data_lines.next().ok_or_else(|| Error::Parse {
            line: header_line,
            message: format!("expected {dim} data rows, found {r}"),
        })?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != dim {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {dim} entries in this row, found {}", entries.len()),
            });
        }
        for (c, token) in entries.iter().enumerate() {
            mat[(r, c)] = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{token}` is not a number"),
            })?;
        }
    }
    if let Some((line_no, _)) = data_lines.next() {
        return Err(Error::Parse {
            line: line_no,
            message: "trailing content after the matrix rows".into(),
        });
    }

    let mut max_asymmetry = 0.0f64;
    for i in 0..dim {
        for j in (i + 1)..dim {
            max_asymmetry = max_asymmetry.max((mat[(i, j)] - mat[(j, i)]).abs());
        }
    }
    let sym = (&mat + mat.transpose()) * 0.5;
    Ok(LoadedCm {
        cm: CovarianceMatrix::new(sym)?,
        max_asymmetry,
    })
}

/// Reads and parses a cmv1 file.
pub fn read_cm_file(path: &Path) -> Result<LoadedCm> {
    parse_cm(&std::fs::read_to_string(path)?)
}

/// Formats a covariance matrix in cmv1, with optional leading `#` comments.
pub fn format_cm(cm: &CovarianceMatrix, comments: &[String]) -> String {
    let dim = cm.dim();
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("cmv1 {}\n", cm.n_modes()));
    for r in 0..dim {
        let row: Vec<String> = (0..dim).map(|c| format!("{}", cm.matrix()[(r, c)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Writes a cmv1 file.
pub fn write_cm_file(path: &Path, cm: &CovarianceMatrix, comments: &[String]) -> Result<()> {
    std::fs::write(path, format_cm(cm, comments))?;
    Ok(())
}
