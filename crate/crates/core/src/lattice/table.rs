use std::collections::BTreeMap;
use std::sync::Arc;

use super::{ComponentSet, Universe};
use crate::error::{Error, Result};

/// Free-form labels such as model, benchmark or seed.
pub type Metadata = BTreeMap<String, String>;

/// Map from coalition mask to a finite scalar value.
#[derive(Debug, Clone, PartialEq)]
pub struct CoalitionTable {
    universe: Arc<Universe>,
    values: Vec<f64>,
    present: Vec<bool>,
    count: usize,
    pub metadata: Metadata,
}

impl CoalitionTable {
    /// An empty (entirely partial) table.
    pub fn new(universe: Arc<Universe>) -> Self {
        let size = universe.size();
        Self {
            universe,
            values: vec![0.0; size],
            present: vec![false; size],
            count: 0,
            metadata: Metadata::new(),
        }
    }

    /// A complete table from a dense vector in canonical mask order.
    pub fn from_values(universe: Arc<Universe>, values: Vec<f64>) -> Result<Self> {
        if values.len() != universe.size() {
            return Err(Error::IncompleteTable { present: values.len(), required: universe.size() });
        }
        if let Some(m) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(universe.label(m as u32)));
        }
        let size = values.len();
        Ok(Self { universe, values, present: vec![true; size], count: size, metadata: Metadata::new() })
    }

    /// A complete table evaluating `f` on every mask.
    pub fn from_fn(universe: Arc<Universe>, f: impl Fn(u32) -> f64) -> Result<Self> {
        let values = (0..universe.size() as u32).map(f).collect();
        Self::from_values(universe, values)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn k(&self) -> usize {
        self.universe.len()
    }

    /// Inserts or overwrites a value; returns the previous one.
    pub fn insert(&mut self, mask: u32, value: f64) -> Result<Option<f64>> {
        if mask & !self.universe.full_mask() != 0 {
            return Err(Error::InvalidArgument(format!("mask {mask:#b} outside universe")));
        }
        if !value.is_finite() {
            return Err(Error::NonFiniteValue(self.universe.label(mask)));
        }
        let m = mask as usize;
        let prev = self.present[m].then_some(self.values[m]);
        if prev.is_none() {
            self.count += 1;
        }
        self.present[m] = true;
        self.values[m] = value;
        Ok(prev)
    }

    pub fn get(&self, mask: u32) -> Option<f64> {
        let m = mask as usize;
        (m < self.values.len() && self.present[m]).then(|| self.values[m])
    }

    pub fn value(&self, mask: u32) -> Result<f64> {
        self.get(mask).ok_or_else(|| Error::MissingCoalition(self.universe.label(mask)))
    }

    pub fn value_of(&self, set: &ComponentSet) -> Result<f64> {
        self.check_universe(set)?;
        self.value(set.mask())
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_complete(&self) -> bool {
        self.count == self.values.len()
    }

    /// Dense values in canonical mask order, or `IncompleteTable`.
    pub fn complete_values(&self) -> Result<&[f64]> {
        if self.is_complete() {
            Ok(&self.values)
        } else {
            Err(Error::IncompleteTable { present: self.count, required: self.values.len() })
        }
    }

    /// Present `(mask, value)` pairs in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.present)
            .enumerate()
            .filter(|(_, (_, p))| **p)
            .map(|(m, (v, _))| (m as u32, *v))
    }

    pub(crate) fn check_universe(&self, set: &ComponentSet) -> Result<()> {
        if Arc::ptr_eq(&self.universe, set.universe()) || *self.universe == **set.universe() {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }
}

/// f(S ∪ {i}) − f(S).
pub fn marginal(table: &CoalitionTable, set: &ComponentSet, component: usize) -> Result<f64> {
    table.check_universe(set)?;
    if component >= table.k() {
        return Err(Error::InvalidArgument(format!("component index {component} out of range")));
    }
    if set.contains(component) {
        return Err(Error::MemberAlreadyPresent(table.universe().name(component).to_string()));
    }
    let base = table.value(set.mask())?;
    let grown = table.value(set.mask() | 1 << component)?;
    Ok(grown - base)
}
