//! Sweep result files.
//!
//! CSV: `#`-prefixed metadata lines, then a header row and one row per grid
//! cell. Floats use 9 significant digits in scientific notation, so output is
//! locale independent and byte-stable. JSON carries the same metadata and
//! rows as a single object.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::sweep::{SweepRecord, SEED_RULE};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const COLUMNS: [&str; 13] = [
    "alpha",
    "k_bob",
    "beta",
    "c_bob",
    "c_eve",
    "c_secrecy",
    "c_bob_random",
    "c_eve_random",
    "c_secrecy_random",
    "objective_bob",
    "objective_eve",
    "passes",
    "phase_bits",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    pub seed_rule: String,
    pub baseline_draws: usize,
}

impl SweepMeta {
    pub fn new(seed: u64, config_hash: String, baseline_draws: usize) -> Self {
        Self {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            seed,
            config_hash,
            seed_rule: SEED_RULE.to_string(),
            baseline_draws,
        }
    }
}

/// One output row, as written and as read back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub k_bob: usize,
    pub beta: f64,
    pub c_bob: f64,
    pub c_eve: f64,
    pub c_secrecy: f64,
    pub c_bob_random: f64,
    pub c_eve_random: f64,
    pub c_secrecy_random: f64,
    pub objective_bob: f64,
    pub objective_eve: f64,
    pub passes: usize,
    pub phase_bits: String,
}

impl From<&SweepRecord> for SweepRow {
    fn from(r: &SweepRecord) -> Self {
        Self {
            alpha: r.alpha,
            k_bob: r.k_bob,
            beta: r.beta,
            c_bob: r.metrics.c_bob,
            c_eve: r.metrics.c_eve,
            c_secrecy: r.metrics.c_secrecy,
            c_bob_random: r.baseline.c_bob,
            c_eve_random: r.baseline.c_eve,
            c_secrecy_random: r.baseline.c_secrecy,
            objective_bob: r.objective_bob,
            objective_eve: r.objective_eve,
            passes: r.passes,
            phase_bits: r.phase_bits.clone(),
        }
    }
}

/// 9 significant digits, e.g. `1.00000000e-2`.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn write_csv<W: Write>(mut w: W, meta: &SweepMeta, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "# tool = {} {}", meta.tool, meta.version)?;
    writeln!(w, "# seed = {}", meta.seed)?;
    writeln!(w, "# config_hash = {}", meta.config_hash)?;
    writeln!(w, "# seed_rule = {}", meta.seed_rule)?;
    writeln!(w, "# baseline_draws = {}", meta.baseline_draws)?;
    writeln!(w, "{}", COLUMNS.join(","))?;
    for r in records {
        let row = SweepRow::from(r);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_sig(row.alpha),
            row.k_bob,
            fmt_sig(row.beta),
            fmt_sig(row.c_bob),
            fmt_sig(row.c_eve),
            fmt_sig(row.c_secrecy),
            fmt_sig(row.c_bob_random),
            fmt_sig(row.c_eve_random),
            fmt_sig(row.c_secrecy_random),
            fmt_sig(row.objective_bob),
            fmt_sig(row.objective_eve),
            row.passes,
            row.phase_bits,
        )?;
    }
    w.flush()
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    meta: SweepMeta,
    records: Vec<SweepRow>,
}

pub fn write_json<W: Write>(mut w: W, meta: &SweepMeta, records: &[SweepRecord]) -> io::Result<()> {
    let doc = JsonDoc { meta: meta.clone(), records: records.iter().map(SweepRow::from).collect() };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Reads a sweep file in either format (JSON is detected by a leading `{`).
pub fn read_sweep<R: BufRead>(mut r: R) -> Result<Vec<SweepRow>, ReadError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    if text.trim_start().starts_with('{') {
        let doc: JsonDoc =
            serde_json::from_str(&text).map_err(|e| ReadError::Malformed { line: e.line(), message: e.to_string() })?;
        return Ok(doc.records);
    }
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if !saw_header {
            if fields != COLUMNS {
                return Err(ReadError::Malformed { line: lineno, message: "unexpected column header".into() });
            }
            saw_header = true;
            continue;
        }
        if fields.len() != COLUMNS.len() {
            return Err(ReadError::Malformed {
                line: lineno,
                message: format!("expected {} fields, found {}", COLUMNS.len(), fields.len()),
            });
        }
        let f = |j: usize| -> Result<f64, ReadError> {
            fields[j].parse().map_err(|_| ReadError::Malformed {
                line: lineno,
                message: format!("column {} is not a number: {:?}", COLUMNS[j], fields[j]),
            })
        };
        let u = |j: usize| -> Result<usize, ReadError> {
            fields[j].parse().map_err(|_| ReadError::Malformed {
                line: lineno,
                message: format!("column {} is not an integer: {:?}", COLUMNS[j], fields[j]),
            })
        };
        let bits = fields[12];
        if !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(ReadError::Malformed { line: lineno, message: "phase_bits must be 0/1".into() });
        }
        rows.push(SweepRow {
            alpha: f(0)?,
            k_bob: u(1)?,
            beta: f(2)?,
            c_bob: f(3)?,
            c_eve: f(4)?,
            c_secrecy: f(5)?,
            c_bob_random: f(6)?,
            c_eve_random: f(7)?,
            c_secrecy_random: f(8)?,
            objective_bob: f(9)?,
            objective_eve: f(10)?,
            passes: u(11)?,
            phase_bits: bits.to_string(),
        });
    }
    if !saw_header {
        return Err(ReadError::Malformed { line: 0, message: "no column header found".into() });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(0.01), "1.00000000e-2");
        assert_eq!(fmt_sig(0.0), "0.00000000e0");
        assert_eq!(fmt_sig(123456789.4), "1.23456789e8");
        assert_eq!(fmt_sig(0.07).parse::<f64>().unwrap(), 0.07);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_sweep("hello\n".as_bytes()).is_err());
        let header = COLUMNS.join(",");
        assert!(read_sweep(format!("{header}\n1,2\n").as_bytes()).is_err());
        assert!(read_sweep("".as_bytes()).is_err());
    }
}
