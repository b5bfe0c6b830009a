//! Evaluation manifests: which configurations to run, in which component
//! orderings, under which seeds.

use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ComponentSet, Universe, MAX_COMPONENTS};
use crate::stats::resample::keyed_stream;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum ManifestMode {
    /// All 2^k coalitions in canonical order.
    FullFactorial,
    Listed(Vec<ComponentSet>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub label: String,
    pub mask: u32,
    /// Active components in the order they are applied.
    pub ordering: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub universe: Vec<String>,
    pub mode: String,
    pub orderings: usize,
    pub seeds: Vec<u64>,
    pub configurations: Vec<ManifestEntry>,
    pub notes: Vec<String>,
}

/// Ordering 0 is the universe order of the active components; orderings
/// 1.. are shuffles drawn from the stream keyed by the row index.
pub fn gen_manifest(universe: &Arc<Universe>, mode: &ManifestMode, orderings: usize, seed: u64) -> Result<Manifest> {
    if universe.len() > MAX_COMPONENTS {
        return Err(Error::UniverseTooLarge(universe.len()));
    }
    if orderings == 0 {
        return Err(Error::InvalidArgument("orderings must be at least 1".into()));
    }
    let (mode_name, masks): (&str, Vec<u32>) = match mode {
        ManifestMode::FullFactorial => ("full-factorial", (0..universe.size() as u32).collect()),
        ManifestMode::Listed(sets) => {
            let mut masks = Vec::with_capacity(sets.len());
            for s in sets {
                if **s.universe() != **universe {
                    return Err(Error::UniverseMismatch);
                }
                if masks.contains(&s.mask()) {
                    return Err(Error::DuplicateCoalition(s.label()));
                }
                masks.push(s.mask());
            }
            ("listed", masks)
        }
    };
    let width = masks.len().max(1).to_string().len();
    let mut configurations = Vec::with_capacity(masks.len() * orderings);
    for (c, &mask) in masks.iter().enumerate() {
        let active: Vec<usize> = universe.members(mask).collect();
        for o in 0..orderings {
            let mut order = active.clone();
            if o > 0 {
                let row = (c * orderings + o) as u64;
                order.shuffle(&mut keyed_stream(seed, row));
            }
            configurations.push(ManifestEntry {
                id: format!("c{c:0width$}-o{o}"),
                label: universe.label(mask),
                mask,
                ordering: order.iter().map(|&i| universe.name(i).to_string()).collect(),
            });
        }
    }
    Ok(Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        universe: universe.names().to_vec(),
        mode: mode_name.to_string(),
        orderings,
        seeds: vec![seed],
        configurations,
        notes: Vec::new(),
    })
}

pub fn manifest_to_json(m: &Manifest) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("manifest serializes");
    s.push('\n');
    s
}

pub fn manifest_from_json(text: &str) -> Result<Manifest> {
    let m: Manifest =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line().max(1), e.to_string()))?;
    if m.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(Error::parse(1, format!("unsupported manifest schema version {}", m.schema_version)));
    }
    let mut ids: Vec<&str> = m.configurations.iter().map(|c| c.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::parse(1, format!("duplicate configuration id `{}`", w[0])));
    }
    Ok(m)
}
