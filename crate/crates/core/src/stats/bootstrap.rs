//! Percentile and BCa bootstrap intervals over observations or clusters.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::resample::{jackknife, replicates};
use crate::error::{Error, Result};
use crate::lattice::{dividend_over, ComponentSet};
use crate::matrix::TaskMatrix;
use crate::registry::{Named, Registry};

pub const WARN_DEGENERATE_JACKKNIFE: &str = "degenerate-jackknife";
pub const WARN_UNDEFINED_BIAS: &str = "undefined-bias-correction";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleUnit {
    Observation,
    Cluster,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { resamples: 2_000, level: 0.95, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub method: String,
    pub unit: ResampleUnit,
    pub level: f64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub resamples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_one_sided: Option<f64>,
}

impl BootstrapCI {
    pub fn label(&self) -> String {
        match self.unit {
            ResampleUnit::Observation => self.method.clone(),
            ResampleUnit::Cluster => format!("cluster-{}", self.method),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

pub struct IntervalInput<'a> {
    pub estimate: f64,
    /// Sorted ascending.
    pub replicates: &'a [f64],
    pub jackknife: Option<&'a [f64]>,
    pub level: f64,
}

pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub warnings: Vec<String>,
}

/// A rule turning bootstrap replicates into a confidence interval.
pub trait IntervalMethod: Named + Send + Sync {
    fn needs_jackknife(&self) -> bool {
        false
    }
    fn interval(&self, input: &IntervalInput<'_>) -> Interval;
}

pub struct Percentile;

impl Named for Percentile {
    fn name(&self) -> &'static str {
        "percentile"
    }
    fn summary(&self) -> &'static str {
        "empirical quantiles of the replicates"
    }
}

impl IntervalMethod for Percentile {
    fn interval(&self, input: &IntervalInput<'_>) -> Interval {
        let alpha = 1.0 - input.level;
        Interval {
            lo: quantile_sorted(input.replicates, alpha / 2.0),
            hi: quantile_sorted(input.replicates, 1.0 - alpha / 2.0),
            warnings: Vec::new(),
        }
    }
}

pub struct Bca;

impl Named for Bca {
    fn name(&self) -> &'static str {
        "bca"
    }
    fn summary(&self) -> &'static str {
        "bias-corrected and accelerated quantiles"
    }
}

impl IntervalMethod for Bca {
    fn needs_jackknife(&self) -> bool {
        true
    }

    fn interval(&self, input: &IntervalInput<'_>) -> Interval {
        let fallback = |warning: &str| {
            let mut iv = Percentile.interval(input);
            iv.warnings.push(warning.to_string());
            iv
        };
        let reps = input.replicates;
        let below = reps.iter().filter(|&&x| x < input.estimate).count();
        if below == 0 || below == reps.len() {
            return fallback(WARN_UNDEFINED_BIAS);
        }
        let jk = input.jackknife.expect("bca requested a jackknife");
        let mean = jk.iter().sum::<f64>() / jk.len() as f64;
        let (mut s2, mut s3) = (0.0, 0.0);
        for &v in jk {
            let d = mean - v;
            s2 += d * d;
            s3 += d * d * d;
        }
        if s2 == 0.0 {
            return fallback(WARN_DEGENERATE_JACKKNIFE);
        }
        let accel = s3 / (6.0 * s2.powf(1.5));
        let normal = standard_normal();
        let z0 = normal.inverse_cdf(below as f64 / reps.len() as f64);
        let alpha = 1.0 - input.level;
        let adjust = |q: f64| {
            let zq = normal.inverse_cdf(q);
            normal.cdf(z0 + (z0 + zq) / (1.0 - accel * (z0 + zq)))
        };
        Interval {
            lo: quantile_sorted(reps, adjust(alpha / 2.0)),
            hi: quantile_sorted(reps, adjust(1.0 - alpha / 2.0)),
            warnings: Vec::new(),
        }
    }
}

/// Registered interval constructions; `percentile` first.
pub fn interval_methods() -> Registry<dyn IntervalMethod> {
    Registry::<dyn IntervalMethod>::new().with(Box::new(Percentile)).with(Box::new(Bca))
}

pub(crate) fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Linear-interpolation quantile (Hyndman–Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn validate(n: usize, cfg: &BootstrapConfig, method: &dyn IntervalMethod) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewUnits { got: n, min: 2 });
    }
    if method.needs_jackknife() && n < 3 {
        return Err(Error::TooFewUnits { got: n, min: 3 });
    }
    if cfg.resamples < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 resamples, got {}",
            cfg.resamples
        )));
    }
    if !(cfg.level > 0.0 && cfg.level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {} not in (0, 1)", cfg.level)));
    }
    Ok(())
}

/// Bootstrap over `n` exchangeable units given a statistic on a multiset of
/// unit indices.
pub fn bootstrap_units<F>(
    n: usize,
    statistic: F,
    method: &dyn IntervalMethod,
    unit: ResampleUnit,
    cfg: &BootstrapConfig,
) -> Result<BootstrapCI>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    validate(n, cfg, method)?;
    let all: Vec<usize> = (0..n).collect();
    let estimate = statistic(&all);
    let mut reps = replicates(n, cfg.resamples, cfg.seed, &statistic);
    reps.sort_by(f64::total_cmp);
    let jk = method.needs_jackknife().then(|| jackknife(n, &statistic));
    let iv = method.interval(&IntervalInput {
        estimate,
        replicates: &reps,
        jackknife: jk.as_deref(),
        level: cfg.level,
    });
    Ok(BootstrapCI {
        method: method.name().to_string(),
        unit,
        level: cfg.level,
        estimate,
        lo: iv.lo,
        hi: iv.hi,
        resamples: cfg.resamples,
        seed: cfg.seed,
        warnings: iv.warnings,
        p_one_sided: None,
    })
}

/// Interval for a statistic of a scalar sample.
pub fn bootstrap_ci<S>(
    data: &[f64],
    statistic: S,
    method: &dyn IntervalMethod,
    cfg: &BootstrapConfig,
) -> Result<BootstrapCI>
where
    S: Fn(&[f64]) -> f64 + Sync,
{
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("bootstrap data must be finite".into()));
    }
    bootstrap_units(
        data.len(),
        |idx: &[usize]| {
            let sample: Vec<f64> = idx.iter().map(|&i| data[i]).collect();
            statistic(&sample)
        },
        method,
        ResampleUnit::Observation,
        cfg,
    )
}

/// Cluster bootstrap: whole units (rows) of a task matrix are resampled and
/// the statistic sees the column means in matrix column order.
pub fn cluster_bootstrap_ci<S>(
    matrix: &TaskMatrix,
    statistic: S,
    method: &dyn IntervalMethod,
    cfg: &BootstrapConfig,
) -> Result<BootstrapCI>
where
    S: Fn(&[f64]) -> f64 + Sync,
{
    let width = matrix.columns().len();
    bootstrap_units(
        matrix.n_units(),
        |idx: &[usize]| {
            let mut means = vec![0.0; width];
            matrix.column_means_into(idx, &mut means);
            statistic(&means)
        },
        method,
        ResampleUnit::Cluster,
        cfg,
    )
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Cluster-bootstrap interval for the Harsanyi dividend of `coalition`,
/// evaluated on the mean table of each resample. The one-sided p value is a
/// t-test of the per-unit dividends against zero (alternative: positive).
pub fn harsanyi_bootstrap(
    matrix: &TaskMatrix,
    coalition: &ComponentSet,
    method: &dyn IntervalMethod,
    cfg: &BootstrapConfig,
) -> Result<BootstrapCI> {
    if **coalition.universe() != **matrix.universe() {
        return Err(Error::UniverseMismatch);
    }
    let target = coalition.mask();
    let cols = matrix.sub_lattice_columns(target)?;
    let dividend_of_means = |means: &[f64]| {
        dividend_over(target, |w| Ok(means[cols[w as usize]])).expect("sub-lattice is present")
    };
    let mut ci = cluster_bootstrap_ci(matrix, dividend_of_means, method, cfg)?;

    let per_unit: Vec<f64> = (0..matrix.n_units())
        .map(|u| {
            let row = matrix.row(u);
            dividend_over(target, |w| Ok(row[cols[w as usize]])).expect("sub-lattice is present")
        })
        .collect();
    ci.p_one_sided = one_sample_upper_p(&per_unit);
    Ok(ci)
}

/// P(T ≥ t) for the one-sample t statistic of `xs` against zero.
fn one_sample_upper_p(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 {
        return None;
    }
    let t = m / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).ok()?;
    Some(dist.sf(t))
}
