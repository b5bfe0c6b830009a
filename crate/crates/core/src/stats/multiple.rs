//! Multiplicity corrections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub procedure: String,
    pub alpha: f64,
    /// Adjusted p values, in input order.
    pub adjusted: Vec<f64>,
    pub reject: Vec<bool>,
}

impl Correction {
    pub fn n_rejected(&self) -> usize {
        self.reject.iter().filter(|r| **r).count()
    }
}

fn check(pvalues: &[f64], alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} not in (0, 1)")));
    }
    if let Some(p) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("p value {p} not in [0, 1]")));
    }
    Ok(())
}

fn ascending_order(pvalues: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pvalues.len()).collect();
    order.sort_by(|&i, &j| pvalues[i].total_cmp(&pvalues[j]).then(i.cmp(&j)));
    order
}

fn finish(procedure: &str, alpha: f64, adjusted: Vec<f64>) -> Correction {
    let reject = adjusted.iter().map(|&p| p <= alpha).collect();
    Correction { procedure: procedure.into(), alpha, adjusted, reject }
}

pub fn bonferroni(pvalues: &[f64], alpha: f64) -> Result<Correction> {
    check(pvalues, alpha)?;
    let m = pvalues.len() as f64;
    Ok(finish("bonferroni", alpha, pvalues.iter().map(|p| (p * m).min(1.0)).collect()))
}

/// Holm step-down.
pub fn holm(pvalues: &[f64], alpha: f64) -> Result<Correction> {
    check(pvalues, alpha)?;
    let m = pvalues.len();
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in ascending_order(pvalues).iter().enumerate() {
        running = running.max(((m - rank) as f64 * pvalues[i]).min(1.0));
        adjusted[i] = running;
    }
    Ok(finish("holm", alpha, adjusted))
}

/// Benjamini–Hochberg step-up.
pub fn bh(pvalues: &[f64], alpha: f64) -> Result<Correction> {
    check(pvalues, alpha)?;
    let m = pvalues.len();
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    let order = ascending_order(pvalues);
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min((m as f64 * pvalues[i] / (rank + 1) as f64).min(1.0));
        adjusted[i] = running;
    }
    Ok(finish("benjamini-hochberg", alpha, adjusted))
}
