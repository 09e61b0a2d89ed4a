//! Report plumbing: exact-number fields and atomic file output.

use std::io::Write;
use std::path::Path;

use hahn_paths::{Rational, Scalar};
use serde_json::{json, Value};

use crate::config::Mode;
use crate::error::CliResult;

/// Version of every JSON document this tool writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A probability or kernel entry: decimal always, the rational string in
/// exact mode.
pub fn number(q: &Rational, mode: Mode) -> Value {
    match mode {
        Mode::Exact => json!({ "decimal": Scalar::to_f64(q), "exact": q.to_string() }),
        Mode::Float => json!({ "decimal": Scalar::to_f64(q) }),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Sends a document to `out`, or to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
