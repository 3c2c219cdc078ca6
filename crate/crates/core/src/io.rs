//! Artifact output helpers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Who wrote an artifact and from which configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
}

impl Provenance {
    /// `# tool=… version=… config_hash=…`, for CSV and plot scripts.
    pub fn comment_line(&self) -> String {
        format!(
            "# tool={} version={} config_hash={}\n",
            self.tool, self.version, self.config_hash
        )
    }

    /// Prefixes CSV bytes with [`Provenance::comment_line`].
    pub fn prefix_csv(&self, csv: &[u8]) -> Vec<u8> {
        let mut out = self.comment_line().into_bytes();
        out.extend_from_slice(csv);
        out
    }
}

/// Formats with 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
