use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use boundary_steering::oracle::QuadratureSpec;
use boundary_steering::sweep::{DifferenceTable, SweepRow, SweepTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const STEERING_HEADER: &str = "axis,p_a,p_b,abs_c,abs_x,s_ab,s_ba,asymmetry,concurrence";
pub const REFERENCE_COLUMNS: &str = "ref_s_ab,ref_s_ba";
pub const DIFFERENCE_HEADER: &str = "axis,delta_s_ab,delta_s_ba";

/// Where a file came from; attached to every JSON document and echoed as
/// `#` comments in CSV.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    /// Parameters that were not given explicitly, with the value used.
    pub defaults: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
}

impl Provenance {
    pub fn new(command: &'static str, config: &impl Serialize, defaults: Vec<String>) -> Result<Self> {
        Ok(Self { version: VERSION, command, config_hash: config_hash(config)?, defaults, quadrature: None })
    }
}

/// SHA-256 of the compact JSON serialisation of `config`.
pub fn config_hash(config: &impl Serialize) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// `#` comment block followed by nothing else.
pub fn comment_block(provenance: &Provenance, parameters: &[(String, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# boundary-steering {}", provenance.version);
    let _ = writeln!(out, "# command: {}", provenance.command);
    let _ = writeln!(out, "# config_hash: {}", provenance.config_hash);
    for (k, v) in parameters {
        let _ = writeln!(out, "# {k}: {v}");
    }
    for d in &provenance.defaults {
        let _ = writeln!(out, "# default: {d}");
    }
    out
}

fn steering_fields(r: &SweepRow) -> [f64; 9] {
    [r.axis, r.p_a, r.p_b, r.abs_c, r.abs_x, r.s_ab, r.s_ba, r.asymmetry, r.concurrence]
}

fn csv_line(values: &[f64]) -> String {
    values.iter().map(|&v| number(v)).collect::<Vec<_>>().join(",")
}

pub fn steering_csv(table: &SweepTable, provenance: &Provenance, parameters: &[(String, String)]) -> String {
    let mut out = comment_block(provenance, parameters);
    let reference = table.reference.map(|r| [r.s_ab, r.s_ba]);
    match reference {
        Some(_) => {
            let _ = writeln!(out, "{STEERING_HEADER},{REFERENCE_COLUMNS}");
        }
        None => {
            let _ = writeln!(out, "{STEERING_HEADER}");
        }
    }
    for row in &table.rows {
        let mut values = steering_fields(row).to_vec();
        if let Some(r) = reference {
            values.extend(r);
        }
        let _ = writeln!(out, "{}", csv_line(&values));
    }
    out
}

pub fn difference_csv(table: &DifferenceTable, provenance: &Provenance, parameters: &[(String, String)]) -> String {
    let mut out = comment_block(provenance, parameters);
    let _ = writeln!(out, "{DIFFERENCE_HEADER}");
    for row in &table.rows {
        let _ = writeln!(out, "{}", csv_line(&[row.axis, row.delta_s_ab, row.delta_s_ba]));
    }
    out
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
        Some(path) => write_atomic(path, contents),
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
