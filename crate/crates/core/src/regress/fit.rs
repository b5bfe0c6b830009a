use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::design::{term_name, Design, DesignSpec, Encoding, Order};
use crate::error::{Error, Result};
use crate::lattice::Universe;

/// |R_jj| below this fraction of the largest |R_ii| marks a dependent column.
const RANK_TOLERANCE: f64 = 1e-10;
/// 1 − h_ii below this is treated as leverage one.
const LEVERAGE_TOLERANCE: f64 = 1e-10;
/// Eigenvalues with |λ| at or below this count as zero in sign summaries.
pub const EIGEN_SIGN_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub mask: u32,
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
    /// Regression coefficients plus the profiled error variance.
    pub n_params: usize,
}

#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub spec: DesignSpec,
    pub universe: Arc<Universe>,
    pub terms: Vec<Term>,
    pub n: usize,
    pub p: usize,
    pub rss: f64,
    pub tss: f64,
    pub r2: f64,
    /// Undefined for saturated fits (n = p).
    pub adj_r2: Option<f64>,
    /// Undefined when n ≤ p or some observation has leverage one.
    pub loocv_r2: Option<f64>,
    /// Undefined when the residual sum of squares is zero.
    pub criteria: Option<InformationCriteria>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub leverage: Vec<f64>,
}

struct Solved {
    beta: DVector<f64>,
    leverage: Vec<f64>,
}

fn solve(design: &Design) -> Result<Solved> {
    let (n, p) = (design.n_rows(), design.n_params());
    if n < p {
        return Err(Error::TooFewRows { rows: n, params: p });
    }
    let qr = design.x.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    for j in 0..p {
        if r[(j, j)].abs() <= RANK_TOLERANCE * scale || scale == 0.0 {
            return Err(Error::RankDeficient(term_name(&design.universe, design.terms[j])));
        }
    }
    let q = qr.q();
    let qty = q.transpose() * &design.y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(term_name(&design.universe, design.terms[p - 1])))?;
    let leverage = (0..n).map(|i| q.row(i).norm_squared()).collect();
    Ok(Solved { beta, leverage })
}

fn total_sum_of_squares(y: &DVector<f64>) -> f64 {
    let mean = y.mean();
    y.iter().map(|v| (v - mean).powi(2)).sum()
}

fn press_r2(residuals: &[f64], leverage: &[f64], tss: f64) -> Result<f64> {
    let mut press = 0.0;
    for (i, (e, h)) in residuals.iter().zip(leverage).enumerate() {
        let denom = 1.0 - h;
        if denom <= LEVERAGE_TOLERANCE {
            return Err(Error::LeverageOne(i));
        }
        press += (e / denom).powi(2);
    }
    Ok(1.0 - press / tss)
}

/// Ordinary least squares via Householder QR; rank deficiency is an error.
pub fn fit_ols(design: &Design) -> Result<RegressionFit> {
    let Solved { beta, leverage } = solve(design)?;
    let (n, p) = (design.n_rows(), design.n_params());
    let fitted_v = &design.x * &beta;
    let residuals: Vec<f64> = design.y.iter().zip(fitted_v.iter()).map(|(y, f)| y - f).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let tss = total_sum_of_squares(&design.y);
    if tss == 0.0 {
        return Err(Error::InvalidArgument("response is constant; R² is undefined".into()));
    }
    let r2 = 1.0 - rss / tss;
    let adj_r2 = (n > p).then(|| 1.0 - (1.0 - r2) * (n - 1) as f64 / (n - p) as f64);
    let loocv_r2 = if n > p { press_r2(&residuals, &leverage, tss).ok() } else { None };
    let terms = design
        .terms
        .iter()
        .zip(beta.iter())
        .map(|(&mask, &value)| Term { mask, name: term_name(&design.universe, mask), value })
        .collect();
    let mut fit = RegressionFit {
        spec: design.spec,
        universe: design.universe.clone(),
        terms,
        n,
        p,
        rss,
        tss,
        r2,
        adj_r2,
        loocv_r2,
        criteria: None,
        fitted: fitted_v.iter().copied().collect(),
        residuals,
        leverage,
    };
    fit.criteria = information_criteria(&fit).ok();
    Ok(fit)
}

/// Leave-one-out R² via the hat-matrix shortcut e_i / (1 − h_ii).
pub fn loocv_r2(design: &Design) -> Result<f64> {
    let (n, p) = (design.n_rows(), design.n_params());
    if n <= p {
        return Err(Error::TooFewRows { rows: n, params: p });
    }
    let Solved { beta, leverage } = solve(design)?;
    let fitted = &design.x * &beta;
    let residuals: Vec<f64> = design.y.iter().zip(fitted.iter()).map(|(y, f)| y - f).collect();
    press_r2(&residuals, &leverage, total_sum_of_squares(&design.y))
}

/// Gaussian log-likelihood criteria with the variance profiled out:
/// AIC = n ln(RSS/n) + n(1 + ln 2π) + 2q and BIC with q ln n, where q counts
/// the regression coefficients plus the variance.
pub fn information_criteria(fit: &RegressionFit) -> Result<InformationCriteria> {
    if fit.n <= fit.p {
        return Err(Error::TooFewRows { rows: fit.n, params: fit.p });
    }
    if fit.rss <= 1e-24 * fit.tss.max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroRss);
    }
    let n = fit.n as f64;
    let q = fit.p + 1;
    let base = n * (fit.rss / n).ln() + n * (1.0 + (2.0 * std::f64::consts::PI).ln());
    Ok(InformationCriteria {
        aic: base + 2.0 * q as f64,
        bic: base + q as f64 * n.ln(),
        n_params: q,
    })
}

impl RegressionFit {
    pub fn intercept(&self) -> f64 {
        self.terms[0].value
    }

    pub fn coefficient(&self, mask: u32) -> Option<f64> {
        self.terms.iter().find(|t| t.mask == mask).map(|t| t.value)
    }

    pub fn main_effect(&self, component: usize) -> f64 {
        self.coefficient(1 << component).expect("every order has main effects")
    }

    /// (i, j, J_ij) in the fit's own encoding.
    pub fn couplings(&self) -> Vec<(usize, usize, f64)> {
        self.terms
            .iter()
            .filter(|t| t.mask.count_ones() == 2)
            .map(|t| {
                let i = t.mask.trailing_zeros() as usize;
                let j = 31 - t.mask.leading_zeros() as usize;
                (i, j, t.value)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingScale {
    /// Coefficient of s_i s_j in the fit's own encoding.
    Native,
    /// Coefficient of the 0/1 presence product x_i x_j. For a spin-encoded
    /// pairwise fit this is exactly four times the native coupling.
    Presence,
}

/// Symmetric J with zero diagonal and J_ij = J_ji = coupling.
pub fn coupling_matrix(fit: &RegressionFit, scale: CouplingScale) -> Result<DMatrix<f64>> {
    if fit.spec.order != Order::Pairwise {
        return Err(Error::NotPairwiseFit);
    }
    let k = fit.universe.len();
    let factor = match (scale, fit.spec.encoding) {
        (CouplingScale::Presence, Encoding::Spin) => 4.0,
        _ => 1.0,
    };
    let mut j = DMatrix::zeros(k, k);
    for (a, b, v) in fit.couplings() {
        j[(a, b)] = v * factor;
        j[(b, a)] = v * factor;
    }
    Ok(j)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingSpectrum {
    pub scale: CouplingScale,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub n_negative: usize,
    pub n_positive: usize,
    pub n_zero: usize,
}

pub fn coupling_eigen(fit: &RegressionFit, scale: CouplingScale) -> Result<CouplingSpectrum> {
    let j = coupling_matrix(fit, scale)?;
    if j.nrows() < 2 {
        return Err(Error::NotPairwiseFit);
    }
    let eig = SymmetricEigen::try_new(j, 1e-14, 10_000)
        .ok_or_else(|| Error::IntegrationFailure("symmetric eigensolver did not converge".into()))?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let n_negative = eigenvalues.iter().filter(|l| **l < -EIGEN_SIGN_THRESHOLD).count();
    let n_positive = eigenvalues.iter().filter(|l| **l > EIGEN_SIGN_THRESHOLD).count();
    Ok(CouplingSpectrum {
        scale,
        n_zero: eigenvalues.len() - n_negative - n_positive,
        eigenvalues,
        n_negative,
        n_positive,
    })
}
