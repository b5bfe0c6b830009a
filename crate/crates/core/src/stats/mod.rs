//! Inference battery: paired tests, effect sizes, Bayes factors,
//! multiplicity corrections and bootstrap intervals.

mod bayes;
mod bootstrap;
mod multiple;
mod paired;
pub mod quadrature;
pub mod resample;

pub use bayes::{jzs_bf10, jzs_log_integrand, DEFAULT_CAUCHY_SCALE};
pub use bootstrap::{
    bootstrap_ci, bootstrap_units, cluster_bootstrap_ci, harsanyi_bootstrap, interval_methods, mean,
    median, quantile_sorted, Bca, BootstrapCI, BootstrapConfig, Interval, IntervalInput,
    IntervalMethod, Percentile, ResampleUnit, WARN_DEGENERATE_JACKKNIFE, WARN_UNDEFINED_BIAS,
};
pub use multiple::{bh, bonferroni, holm, Correction};
pub use paired::{
    cohens_dz, mcnemar_exact, paired_t, student_t_sf, wilcoxon_exact, PairedSample, Sidedness,
    TestResult, WILCOXON_EXACT_MAX_N,
};
