//! Coalitions of binary components and the value tables defined over them.
//!
//! A coalition is a bitmask over an ordered [`Universe`]; bit `i` is set when
//! the `i`-th declared component is active. Masks are only meaningful relative
//! to their universe, so [`ComponentSet`] carries a shared handle to it.

mod harsanyi;
mod shapley;
mod table;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use harsanyi::{dividend_over, mobius_transform, HarsanyiSpectrum};
pub use shapley::{
    abs_mass_share, shapley, shapley_methods, shapley_with, DividendShare, PermutationWeights,
    ShapleyMethod, ShapleyReport,
};
pub use table::{marginal, CoalitionTable, Metadata};

/// Largest supported universe; a complete table then holds 2^20 values.
pub const MAX_COMPONENTS: usize = 20;

pub const EMPTY_LABEL: &str = "Bare";
pub const FULL_LABEL: &str = "All-In";

/// Ordered list of unique component names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Universe {
    names: Vec<String>,
}

impl Universe {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_COMPONENTS {
            return Err(Error::UniverseTooLarge(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains('+') || n.contains(',') || n != n.trim() {
                return Err(Error::InvalidArgument(format!("invalid component name `{n}`")));
            }
            if n == EMPTY_LABEL || n == FULL_LABEL {
                return Err(Error::InvalidArgument(format!("`{n}` is a reserved label")));
            }
            if names[..i].contains(n) {
                return Err(Error::DuplicateComponent(n.clone()));
            }
        }
        Ok(Self { names })
    }

    /// The five agent components used by the bundled datasets.
    pub fn agent_components() -> Self {
        Self::new(["P", "T", "M", "SR", "R"]).expect("static universe is valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownComponent(name.to_string()))
    }

    /// Number of coalitions, 2^k.
    pub fn size(&self) -> usize {
        1usize << self.names.len()
    }

    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.names.len()) - 1) as u32
    }

    /// Display label: `Bare`, `All-In`, or `+`-joined names in universe order.
    pub fn label(&self, mask: u32) -> String {
        if mask == 0 {
            return EMPTY_LABEL.to_string();
        }
        if mask == self.full_mask() {
            return FULL_LABEL.to_string();
        }
        self.members(mask).map(|i| self.names[i].as_str()).collect::<Vec<_>>().join("+")
    }

    /// Like [`label`](Self::label) but never uses the `All-In` alias.
    pub fn explicit_label(&self, mask: u32) -> String {
        if mask == 0 {
            return EMPTY_LABEL.to_string();
        }
        self.members(mask).map(|i| self.names[i].as_str()).collect::<Vec<_>>().join("+")
    }

    pub fn parse_mask(&self, expr: &str) -> Result<u32> {
        let expr = expr.trim();
        if expr.is_empty() || expr == EMPTY_LABEL {
            return Ok(0);
        }
        if expr == FULL_LABEL {
            return Ok(self.full_mask());
        }
        let mut mask = 0u32;
        for part in expr.split('+') {
            let part = part.trim();
            let i = self.index_of(part)?;
            if mask >> i & 1 == 1 {
                return Err(Error::DuplicateComponent(part.to_string()));
            }
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// Indices of the components in `mask`, ascending.
    pub fn members(&self, mask: u32) -> impl Iterator<Item = usize> {
        let k = self.names.len();
        (0..k).filter(move |i| mask >> i & 1 == 1)
    }
}

impl TryFrom<Vec<String>> for Universe {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Universe::new(v)
    }
}

impl From<Universe> for Vec<String> {
    fn from(u: Universe) -> Self {
        u.names
    }
}

/// A subset of a universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComponentSet {
    universe: Arc<Universe>,
    mask: u32,
}

impl ComponentSet {
    pub fn new(universe: Arc<Universe>, mask: u32) -> Result<Self> {
        if mask & !universe.full_mask() != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask {mask:#b} has bits outside a {}-component universe",
                universe.len()
            )));
        }
        Ok(Self { universe, mask })
    }

    pub fn empty(universe: Arc<Universe>) -> Self {
        Self { universe, mask: 0 }
    }

    pub fn full(universe: Arc<Universe>) -> Self {
        let mask = universe.full_mask();
        Self { universe, mask }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// |C|.
    pub fn cardinality(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, component: usize) -> bool {
        self.mask >> component & 1 == 1
    }

    pub fn with(&self, component: usize) -> Self {
        Self { universe: self.universe.clone(), mask: self.mask | 1 << component }
    }

    pub fn members(&self) -> Vec<usize> {
        self.universe.members(self.mask).collect()
    }

    pub fn label(&self) -> String {
        self.universe.label(self.mask)
    }

    pub fn is_subset_of(&self, other: &ComponentSet) -> Result<bool> {
        self.check_same_universe(other)?;
        Ok(self.mask & other.mask == self.mask)
    }

    pub fn check_same_universe(&self, other: &ComponentSet) -> Result<()> {
        if Arc::ptr_eq(&self.universe, &other.universe) || self.universe == other.universe {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }
}

impl fmt::Debug for ComponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.universe.explicit_label(self.mask))
    }
}

impl fmt::Display for ComponentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `Bare`, `All-In`, the empty string, or `+`-joined component names.
pub fn parse_component_set(expr: &str, universe: &Arc<Universe>) -> Result<ComponentSet> {
    let mask = universe.parse_mask(expr)?;
    Ok(ComponentSet { universe: universe.clone(), mask })
}
