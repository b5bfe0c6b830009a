//! Factorial-design regression: main-effects and pairwise interaction
//! models, leave-one-out validation, information criteria, and the
//! eigen-structure of the pairwise coupling matrix.

mod design;
mod fit;

use serde::Serialize;

pub use design::{build_design, build_design_partial, term_name, Design, DesignSpec, Encoding, Order};
pub use fit::{
    coupling_eigen, coupling_matrix, fit_ols, information_criteria, loocv_r2, CouplingScale,
    CouplingSpectrum, InformationCriteria, RegressionFit, Term, EIGEN_SIGN_THRESHOLD,
};

use crate::error::Result;
use crate::lattice::CoalitionTable;

/// Main-effects versus pairwise comparison on one table.
#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub main: RegressionFit,
    pub pairwise: RegressionFit,
    pub coupling_spectrum: CouplingSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriteriaDelta {
    /// pairwise − main; positive favours the main-effects model.
    pub delta_aic: f64,
    pub delta_bic: f64,
}

impl ModelComparison {
    pub fn deltas(&self) -> Option<CriteriaDelta> {
        let (a, b) = (self.main.criteria?, self.pairwise.criteria?);
        Some(CriteriaDelta { delta_aic: b.aic - a.aic, delta_bic: b.bic - a.bic })
    }
}

pub fn compare_models(table: &CoalitionTable, main: DesignSpec, pairwise: DesignSpec) -> Result<ModelComparison> {
    let main = fit_ols(&build_design(table, main)?)?;
    let pairwise = fit_ols(&build_design(table, pairwise)?)?;
    let coupling_spectrum = coupling_eigen(&pairwise, CouplingScale::Presence)?;
    Ok(ModelComparison { main, pairwise, coupling_spectrum })
}
