//! Per-unit (task or seed) scores for a set of coalitions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{CoalitionTable, Universe};

#[derive(Debug, Clone, PartialEq)]
pub struct TaskMatrix {
    universe: Arc<Universe>,
    units: Vec<String>,
    columns: Vec<u32>,
    /// Row-major, `units.len() × columns.len()`.
    data: Vec<f64>,
}

impl TaskMatrix {
    pub fn new(
        universe: Arc<Universe>,
        units: Vec<String>,
        columns: Vec<u32>,
        data: Vec<f64>,
    ) -> Result<Self> {
        if data.len() != units.len() * columns.len() {
            return Err(Error::InvalidArgument(format!(
                "matrix data has {} cells, expected {}",
                data.len(),
                units.len() * columns.len()
            )));
        }
        for (j, &m) in columns.iter().enumerate() {
            if m & !universe.full_mask() != 0 {
                return Err(Error::InvalidArgument(format!("column mask {m:#b} outside universe")));
            }
            if columns[..j].contains(&m) {
                return Err(Error::DuplicateCoalition(universe.label(m)));
            }
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            let col = columns[pos % columns.len()];
            return Err(Error::NonFiniteValue(universe.label(col)));
        }
        Ok(Self { universe, units, columns, data })
    }

    /// One row per unit, every coalition present, built from per-unit tables.
    pub fn from_tables(units: Vec<String>, tables: &[CoalitionTable]) -> Result<Self> {
        let first = tables.first().ok_or(Error::TooFewUnits { got: 0, min: 1 })?;
        let universe = first.universe().clone();
        let columns: Vec<u32> = (0..universe.size() as u32).collect();
        let mut data = Vec::with_capacity(tables.len() * columns.len());
        for t in tables {
            if **t.universe() != *universe {
                return Err(Error::UniverseMismatch);
            }
            data.extend_from_slice(t.complete_values()?);
        }
        Self::new(universe, units, columns, data)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn row(&self, unit: usize) -> &[f64] {
        let w = self.columns.len();
        &self.data[unit * w..(unit + 1) * w]
    }

    pub fn column_index(&self, mask: u32) -> Option<usize> {
        self.columns.iter().position(|&m| m == mask)
    }

    /// Column positions for every sub-coalition of `coalition`, indexed by
    /// the submask itself (entries for non-submasks are unused).
    pub fn sub_lattice_columns(&self, coalition: u32) -> Result<Vec<usize>> {
        let mut idx = vec![usize::MAX; coalition as usize + 1];
        let mut sub = coalition;
        loop {
            idx[sub as usize] = self
                .column_index(sub)
                .ok_or_else(|| Error::IncompleteMatrix(self.universe.label(sub)))?;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & coalition;
        }
        Ok(idx)
    }

    /// Column positions in canonical mask order when every coalition is present.
    pub fn dense_columns(&self) -> Result<Vec<usize>> {
        (0..self.universe.size() as u32)
            .map(|m| self.column_index(m).ok_or_else(|| Error::IncompleteMatrix(self.universe.label(m))))
            .collect()
    }

    /// Column means over the given unit indices (with repetition).
    pub fn column_means_into(&self, indices: &[usize], out: &mut [f64]) {
        let w = self.columns.len();
        out[..w].iter_mut().for_each(|x| *x = 0.0);
        for &u in indices {
            for (o, v) in out.iter_mut().zip(self.row(u)) {
                *o += v;
            }
        }
        let n = indices.len() as f64;
        out[..w].iter_mut().for_each(|x| *x /= n);
    }

    /// Mean table across all units (partial when columns are missing).
    pub fn mean_table(&self) -> CoalitionTable {
        let all: Vec<usize> = (0..self.n_units()).collect();
        self.mean_table_of(&all)
    }

    pub fn mean_table_of(&self, indices: &[usize]) -> CoalitionTable {
        let mut means = vec![0.0; self.columns.len()];
        self.column_means_into(indices, &mut means);
        let mut t = CoalitionTable::new(self.universe.clone());
        for (&m, &v) in self.columns.iter().zip(&means) {
            t.insert(m, v).expect("means of finite values are finite");
        }
        t
    }
}
