//! Exact Shapley values.
//!
//! Two algebraically distinct routes are registered:
//!
//! * `permutation`: the permutation average written as a weighted sum over
//!   coalitions, φ_i = Σ_{S∌i} |S|!(k−|S|−1)!/k! · (f(S∪i) − f(S)).
//! * `dividend`: φ_i = Σ_{S∋i} d(S)/|S|, where d is the Harsanyi dividend.
//!
//! They agree to rounding on every complete table, which the test suite
//! uses as a cross-check.

use std::sync::Arc;

use super::{mobius_transform, CoalitionTable, Universe};
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

pub trait ShapleyMethod: Named + Send + Sync {
    fn compute(&self, table: &CoalitionTable) -> Result<Vec<f64>>;
}

pub struct PermutationWeights;

impl Named for PermutationWeights {
    fn name(&self) -> &'static str {
        "permutation"
    }
    fn summary(&self) -> &'static str {
        "weighted marginal contributions over all coalitions"
    }
}

impl ShapleyMethod for PermutationWeights {
    fn compute(&self, table: &CoalitionTable) -> Result<Vec<f64>> {
        let values = table.complete_values()?;
        let k = table.k();
        if k == 0 {
            return Ok(Vec::new());
        }
        // weight[s] = s!(k-s-1)!/k! = 1 / (k * C(k-1, s))
        let mut weight = Vec::with_capacity(k);
        let mut binom = 1.0f64;
        for s in 0..k {
            weight.push(1.0 / (k as f64 * binom));
            binom = binom * (k - 1 - s) as f64 / (s + 1) as f64;
        }
        let mut phi = vec![0.0; k];
        for (i, p) in phi.iter_mut().enumerate() {
            let bit = 1usize << i;
            let mut acc = 0.0;
            for m in 0..values.len() {
                if m & bit == 0 {
                    acc += weight[m.count_ones() as usize] * (values[m | bit] - values[m]);
                }
            }
            *p = acc;
        }
        Ok(phi)
    }
}

pub struct DividendShare;

impl Named for DividendShare {
    fn name(&self) -> &'static str {
        "dividend"
    }
    fn summary(&self) -> &'static str {
        "equal split of each Harsanyi dividend among its members"
    }
}

impl ShapleyMethod for DividendShare {
    fn compute(&self, table: &CoalitionTable) -> Result<Vec<f64>> {
        let spectrum = mobius_transform(table)?;
        let k = table.k();
        let mut phi = vec![0.0; k];
        for (m, d) in spectrum.dividends().iter().enumerate().skip(1) {
            let share = d / m.count_ones() as f64;
            for (i, p) in phi.iter_mut().enumerate() {
                if m >> i & 1 == 1 {
                    *p += share;
                }
            }
        }
        Ok(phi)
    }
}

/// Registered Shapley backends; `dividend` is the default.
pub fn shapley_methods() -> Registry<dyn ShapleyMethod> {
    Registry::<dyn ShapleyMethod>::new().with(Box::new(DividendShare)).with(Box::new(PermutationWeights))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyReport {
    pub universe: Arc<Universe>,
    pub method: &'static str,
    pub phi: Vec<f64>,
    /// Σφ_i − (f(N) − f(∅)).
    pub efficiency_gap: f64,
    /// |φ_i| / Σ|φ_j|, absent when every φ is zero.
    pub abs_mass_share: Option<Vec<f64>>,
}

impl ShapleyReport {
    pub fn phi_of(&self, name: &str) -> Result<f64> {
        Ok(self.phi[self.universe.index_of(name)?])
    }
}

pub fn shapley(table: &CoalitionTable) -> Result<ShapleyReport> {
    shapley_with(table, &DividendShare)
}

pub fn shapley_with(table: &CoalitionTable, method: &dyn ShapleyMethod) -> Result<ShapleyReport> {
    let phi = method.compute(table)?;
    let values = table.complete_values()?;
    let total = values[values.len() - 1] - values[0];
    let efficiency_gap = phi.iter().sum::<f64>() - total;
    let mut report = ShapleyReport {
        universe: table.universe().clone(),
        method: method.name(),
        phi,
        efficiency_gap,
        abs_mass_share: None,
    };
    report.abs_mass_share = abs_mass_share(&report).ok();
    Ok(report)
}

pub fn abs_mass_share(report: &ShapleyReport) -> Result<Vec<f64>> {
    let mass: f64 = report.phi.iter().map(|p| p.abs()).sum();
    if mass == 0.0 {
        return Err(Error::AllZero);
    }
    Ok(report.phi.iter().map(|p| p.abs() / mass).collect())
}
