use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CoalitionTable, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// Presence as 1, absence as 0.
    Binary,
    /// Presence as +1, absence as −1.
    Spin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Main,
    Pairwise,
    /// Every interaction up to order k (saturated).
    Full,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Binary => "binary",
            Encoding::Spin => "spin",
        })
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Main => "main",
            Order::Pairwise => "pairwise",
            Order::Full => "full",
        })
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Encoding::Binary),
            "spin" => Ok(Encoding::Spin),
            _ => Err(Error::InvalidArgument(format!("unknown encoding `{s}`"))),
        }
    }
}

impl std::str::FromStr for Order {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(Order::Main),
            "pairwise" => Ok(Order::Pairwise),
            "full" => Ok(Order::Full),
            _ => Err(Error::InvalidArgument(format!("unknown model order `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignSpec {
    pub encoding: Encoding,
    pub order: Order,
}

impl DesignSpec {
    pub fn new(encoding: Encoding, order: Order) -> Self {
        Self { encoding, order }
    }

    /// Binary main effects.
    pub fn main_effects() -> Self {
        Self::new(Encoding::Binary, Order::Main)
    }

    /// Spin-encoded pairwise couplings.
    pub fn pairwise() -> Self {
        Self::new(Encoding::Spin, Order::Pairwise)
    }

    pub fn n_columns(&self, k: usize) -> usize {
        match self.order {
            Order::Main => 1 + k,
            Order::Pairwise => 1 + k + k * k.saturating_sub(1) / 2,
            Order::Full => 1 << k,
        }
    }

    /// Column terms as component masks: intercept (0), mains in universe
    /// order, then higher orders by size with members in lexicographic order.
    pub fn terms(&self, k: usize) -> Vec<u32> {
        let max_order = match self.order {
            Order::Main => 1,
            Order::Pairwise => 2,
            Order::Full => k,
        };
        let mut terms = vec![0u32];
        for size in 1..=max_order.min(k) {
            push_combinations(k, size, 0, 0, &mut terms);
        }
        terms
    }
}

fn push_combinations(k: usize, size: usize, start: usize, acc: u32, out: &mut Vec<u32>) {
    if size == 0 {
        out.push(acc);
        return;
    }
    for i in start..k {
        push_combinations(k, size - 1, i + 1, acc | 1 << i, out);
    }
}

pub fn term_name(universe: &Universe, term: u32) -> String {
    if term == 0 {
        "(intercept)".to_string()
    } else {
        universe.members(term).map(|i| universe.name(i)).collect::<Vec<_>>().join(":")
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub spec: DesignSpec,
    pub universe: Arc<Universe>,
    pub terms: Vec<u32>,
    pub row_masks: Vec<u32>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl Design {
    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.x.ncols()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.terms.iter().map(|&t| term_name(&self.universe, t)).collect()
    }
}

fn encode(mask: u32, term: u32, encoding: Encoding) -> f64 {
    match encoding {
        Encoding::Binary => {
            if mask & term == term {
                1.0
            } else {
                0.0
            }
        }
        Encoding::Spin => {
            // product of ±1 over the term's members
            if (term & !mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        }
    }
}

fn assemble(universe: Arc<Universe>, rows: Vec<(u32, f64)>, spec: DesignSpec) -> Design {
    let terms = spec.terms(universe.len());
    let x = DMatrix::from_fn(rows.len(), terms.len(), |r, c| encode(rows[r].0, terms[c], spec.encoding));
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    Design { spec, universe, terms, row_masks: rows.iter().map(|r| r.0).collect(), x, y }
}

/// Design matrix over a complete table, rows in canonical mask order.
pub fn build_design(table: &CoalitionTable, spec: DesignSpec) -> Result<Design> {
    let values = table.complete_values()?;
    let rows = values.iter().enumerate().map(|(m, v)| (m as u32, *v)).collect();
    Ok(assemble(table.universe().clone(), rows, spec))
}

/// Design over whatever coalitions are present; needs at least p + 1 rows.
pub fn build_design_partial(table: &CoalitionTable, spec: DesignSpec) -> Result<Design> {
    let params = spec.n_columns(table.k());
    if table.len() < params + 1 {
        return Err(Error::TooFewRows { rows: table.len(), params });
    }
    Ok(assemble(table.universe().clone(), table.entries().collect(), spec))
}
