//! File formats, bundled fixtures and atomic output.

mod csv;
pub mod fixtures;
mod manifest;

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

pub use csv::{
    parse_coalition_csv, parse_paired_csv, parse_task_matrix_csv, render_coalition_csv, render_task_matrix_csv,
};
pub use manifest::{
    gen_manifest, manifest_from_json, manifest_to_json, Manifest, ManifestEntry, ManifestMode,
    MANIFEST_SCHEMA_VERSION,
};

use crate::error::Result;
use crate::lattice::{CoalitionTable, Universe};
use crate::matrix::TaskMatrix;
use crate::submod::SubmodularityAudit;

pub fn load_coalition_csv(path: impl AsRef<Path>) -> Result<CoalitionTable> {
    parse_coalition_csv(&std::fs::read_to_string(path)?)
}

pub fn save_coalition_csv(path: impl AsRef<Path>, table: &CoalitionTable) -> Result<()> {
    write_atomic(path, render_coalition_csv(table).as_bytes())
}

pub fn load_task_matrix_csv(path: impl AsRef<Path>, universe: &Arc<Universe>) -> Result<TaskMatrix> {
    parse_task_matrix_csv(&std::fs::read_to_string(path)?, universe)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    manifest_from_json(&std::fs::read_to_string(path)?)
}

/// One triple per row, in enumeration order.
pub fn render_audit_csv(audit: &SubmodularityAudit) -> String {
    let u = &audit.universe;
    let mut out = String::from("S,T,component,gain_S,gain_T,gap,violation,sign_flip\n");
    for t in &audit.triples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            u.label(t.sub),
            u.label(t.sup),
            u.name(t.component),
            t.gain_sub,
            t.gain_sup,
            t.gap,
            t.violation as u8,
            t.sign_flip as u8
        ));
    }
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
