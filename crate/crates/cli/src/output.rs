//! CSV artifacts: one `# seed=...` metadata line, then the table. Files are
//! written to a temporary sibling and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use ultraspec::monocalc::ExtReal;

use crate::error::{CliError, Result};

/// Sentinels serialize as the literal `inf`.
pub fn ext(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => x.to_string(),
        ExtReal::PosInf => "inf".into(),
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), |x| x.to_string())
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e| CliError::Io { path: path.to_owned(), source: e };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| CliError::Io { path: tmp.clone(), source: e })?;
    fs::rename(&tmp, path).map_err(io)
}

/// Writes `body` (header row included) under the seed line.
pub fn write_csv(dir: &Path, name: &str, seed: u64, body: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    write_atomic(&path, &format!("# seed={seed}\n{body}"))?;
    Ok(path)
}
