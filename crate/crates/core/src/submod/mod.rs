//! Submodularity audit over every (S, T, i) triple with S ⊊ T and i ∉ T.
//!
//! A triple violates diminishing returns when the gain of `i` at the larger
//! coalition exceeds its gain at the smaller one. Gains and gaps within
//! [`TIE_TOLERANCE`] (relative to the table's magnitude) of zero are treated
//! as exact zeros, so ties never count as violations or sign flips.

mod gamma;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{CoalitionTable, ComponentSet, Universe};
use crate::matrix::TaskMatrix;
use crate::stats::{cluster_bootstrap_ci, BootstrapCI, BootstrapConfig, Percentile};

pub use gamma::{gamma_variants, BothPositive, GammaVariant, ViolatingOnly};

pub const TIE_TOLERANCE: f64 = 1e-12;

/// Audits refuse to materialise more triples than this (k = 11 gives 649,539).
pub const MAX_AUDIT_TRIPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    /// Mask of S.
    pub sub: u32,
    /// Mask of T.
    pub sup: u32,
    pub component: usize,
    /// Δ(i|S)
    pub gain_sub: f64,
    /// Δ(i|T)
    pub gain_sup: f64,
    /// Δ(i|T) − Δ(i|S)
    pub gap: f64,
    pub violation: bool,
    pub sign_flip: bool,
}

impl Triple {
    pub fn sub_set(&self, universe: &Arc<Universe>) -> ComponentSet {
        ComponentSet::new(universe.clone(), self.sub).expect("mask from enumeration")
    }

    pub fn sup_set(&self, universe: &Arc<Universe>) -> ComponentSet {
        ComponentSet::new(universe.clone(), self.sup).expect("mask from enumeration")
    }
}

/// k · (3^{k−1} − 2^{k−1}), the number of (S, T, i) triples over k components.
pub fn triple_count(k: usize) -> u64 {
    if k == 0 {
        return 0;
    }
    k as u64 * (3u64.pow(k as u32 - 1) - 2u64.pow(k as u32 - 1))
}

/// Proper submasks of `mask` in ascending order.
struct ProperSubmasks {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for ProperSubmasks {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        let cur = self.next?;
        if cur == self.mask {
            self.next = None;
            return None;
        }
        self.next = Some(((cur | !self.mask).wrapping_add(1)) & self.mask);
        Some(cur)
    }
}

/// Every `(S, T, i)` in canonical order: by i, then T, then S.
pub fn enumerate_triples(k: usize) -> (u64, impl Iterator<Item = (u32, u32, usize)>) {
    let size = 1u32 << k;
    let iter = (0..k).flat_map(move |i| {
        (0..size).filter(move |t| t >> i & 1 == 0).flat_map(move |t| {
            ProperSubmasks { mask: t, next: Some(0) }.map(move |s| (s, t, i))
        })
    });
    (triple_count(k), iter)
}

fn snap(x: f64, tol: f64) -> f64 {
    if x.abs() <= tol {
        0.0
    } else {
        x
    }
}

fn tolerance(values: &[f64]) -> f64 {
    TIE_TOLERANCE * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

#[inline]
fn evaluate(values: &[f64], tol: f64, s: u32, t: u32, i: usize) -> Triple {
    let bit = 1usize << i;
    let (s, t) = (s as usize, t as usize);
    let raw_sub = values[s | bit] - values[s];
    let raw_sup = values[t | bit] - values[t];
    let gain_sub = snap(raw_sub, tol);
    let gain_sup = snap(raw_sup, tol);
    let gap = snap(raw_sup - raw_sub, tol);
    Triple {
        sub: s as u32,
        sup: t as u32,
        component: i,
        gain_sub,
        gain_sup,
        gap,
        violation: gap > 0.0,
        sign_flip: (gain_sub < 0.0 && gain_sup > 0.0) || (gain_sub > 0.0 && gain_sup < 0.0),
    }
}

/// Violation count of a dense table without materialising triples.
pub fn count_violations(values: &[f64], k: usize) -> u64 {
    let tol = tolerance(values);
    let (_, triples) = enumerate_triples(k);
    triples.filter(|&(s, t, i)| evaluate(values, tol, s, t, i).violation).count() as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBin {
    pub threshold: f64,
    /// Violations with gap strictly above the threshold.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSummary {
    pub variant: &'static str,
    pub values: Vec<f64>,
    pub median: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityAudit {
    pub universe: Arc<Universe>,
    pub triples: Vec<Triple>,
    pub n_triples: usize,
    pub n_violations: usize,
    /// Triples with gap < 0 (strict diminishing returns).
    pub n_antiviolations: usize,
    pub n_sign_flips: usize,
    pub gap_histogram: Vec<GapBin>,
    pub gamma: GammaSummary,
}

impl SubmodularityAudit {
    pub fn violation_rate(&self) -> f64 {
        if self.n_triples == 0 {
            0.0
        } else {
            self.n_violations as f64 / self.n_triples as f64
        }
    }
}

pub fn audit(table: &CoalitionTable, gap_thresholds: &[f64]) -> Result<SubmodularityAudit> {
    audit_with(table, gap_thresholds, &BothPositive)
}

pub fn audit_with(
    table: &CoalitionTable,
    gap_thresholds: &[f64],
    gamma: &dyn GammaVariant,
) -> Result<SubmodularityAudit> {
    let values = table.complete_values()?;
    if gap_thresholds.iter().any(|t| !t.is_finite() || *t < 0.0)
        || gap_thresholds.windows(2).any(|w| w[0] > w[1])
    {
        return Err(Error::InvalidThresholds);
    }
    let k = table.k();
    let (count, iter) = enumerate_triples(k);
    if count > MAX_AUDIT_TRIPLES {
        return Err(Error::TooManyTriples(count));
    }
    let tol = tolerance(values);
    let triples: Vec<Triple> = iter.map(|(s, t, i)| evaluate(values, tol, s, t, i)).collect();
    debug_assert_eq!(triples.len() as u64, count);

    let n_violations = triples.iter().filter(|t| t.violation).count();
    let n_antiviolations = triples.iter().filter(|t| t.gap < 0.0).count();
    let n_sign_flips = triples.iter().filter(|t| t.sign_flip).count();
    let gap_histogram = gap_thresholds
        .iter()
        .map(|&threshold| GapBin {
            threshold,
            count: triples.iter().filter(|t| t.violation && t.gap > threshold).count(),
        })
        .collect();
    let values: Vec<f64> = triples.iter().filter_map(|t| gamma.ratio(t)).collect();
    let median = (!values.is_empty()).then(|| crate::stats::median(&values));

    Ok(SubmodularityAudit {
        universe: table.universe().clone(),
        n_triples: triples.len(),
        triples,
        n_violations,
        n_antiviolations,
        n_sign_flips,
        gap_histogram,
        gamma: GammaSummary { variant: gamma.name(), values, median },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopViolations {
    pub triples: Vec<Triple>,
    pub n_sign_flips: usize,
    pub sign_flip_fraction: f64,
    pub designated: Option<usize>,
    /// Fraction of the selected triples whose context T (⊇ S) contains the
    /// designated component.
    pub designated_context_fraction: Option<f64>,
}

impl TopViolations {
    pub fn min_gap(&self) -> Option<f64> {
        self.triples.iter().map(|t| t.gap).reduce(f64::min)
    }
}

/// The `n` violations with the largest gap. Ties are broken by |T|, then by
/// T, S and i in canonical order.
pub fn top_violations(audit: &SubmodularityAudit, n: usize, designated: Option<usize>) -> TopViolations {
    let mut v: Vec<Triple> = audit.triples.iter().filter(|t| t.violation).copied().collect();
    v.sort_by(|a, b| {
        b.gap
            .total_cmp(&a.gap)
            .then(a.sup.count_ones().cmp(&b.sup.count_ones()))
            .then(a.sup.cmp(&b.sup))
            .then(a.sub.cmp(&b.sub))
            .then(a.component.cmp(&b.component))
    });
    v.truncate(n);
    let n_sign_flips = v.iter().filter(|t| t.sign_flip).count();
    let frac = |count: usize| if v.is_empty() { 0.0 } else { count as f64 / v.len() as f64 };
    let designated_context_fraction =
        designated.map(|d| frac(v.iter().filter(|t| t.sup >> d & 1 == 1).count()));
    TopViolations {
        sign_flip_fraction: frac(n_sign_flips),
        n_sign_flips,
        designated,
        designated_context_fraction,
        triples: v,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationRate {
    pub rate: f64,
    pub n_triples: u64,
    pub ci: BootstrapCI,
}

/// Task-level cluster bootstrap of the violation rate of the mean table.
pub fn cluster_bootstrap_violation_rate(matrix: &TaskMatrix, cfg: &BootstrapConfig) -> Result<ViolationRate> {
    let dense = matrix.dense_columns()?;
    if matrix.n_units() < 2 {
        return Err(Error::TooFewUnits { got: matrix.n_units(), min: 2 });
    }
    let k = matrix.universe().len();
    let n_triples = triple_count(k);
    if n_triples == 0 {
        return Err(Error::InvalidArgument("violation rate needs at least two components".into()));
    }
    let rate_of = |means: &[f64]| {
        let values: Vec<f64> = dense.iter().map(|&c| means[c]).collect();
        count_violations(&values, k) as f64 / n_triples as f64
    };
    let ci = cluster_bootstrap_ci(matrix, rate_of, &Percentile, cfg)?;
    Ok(ViolationRate { rate: ci.estimate, n_triples, ci })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe(k: usize) -> Arc<Universe> {
        Arc::new(Universe::new((0..k).map(|i| format!("c{i}"))).unwrap())
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(triple_count(0), 0);
        assert_eq!(triple_count(1), 0);
        assert_eq!(triple_count(3), 15);
        assert_eq!(triple_count(5), 325);
        for k in 0..=6 {
            assert_eq!(enumerate_triples(k).1.count() as u64, triple_count(k));
        }
    }

    #[test]
    fn enumeration_respects_membership() {
        for (s, t, i) in enumerate_triples(4).1 {
            assert!(s & t == s && s != t);
            assert_eq!(t >> i & 1, 0);
        }
    }

    #[test]
    fn budget_coverage_is_submodular() {
        let t = CoalitionTable::from_fn(universe(3), |m| m.count_ones().min(1) as f64).unwrap();
        let a = audit(&t, &[]).unwrap();
        assert_eq!(a.n_triples, 15);
        assert_eq!(a.n_violations, 0);
    }

    #[test]
    fn additive_table_has_only_ties() {
        let w = [0.1, 0.2, 0.3, -0.7];
        let t = CoalitionTable::from_fn(universe(4), |m| {
            (0..4).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum()
        })
        .unwrap();
        let a = audit(&t, &[0.0]).unwrap();
        assert_eq!(a.n_violations, 0);
        assert_eq!(a.n_antiviolations, 0);
        assert!(a.triples.iter().all(|t| t.gap == 0.0));
    }

    #[test]
    fn supermodular_square() {
        // f = |S|^2 is strictly supermodular
        let t = CoalitionTable::from_fn(universe(3), |m| (m.count_ones() as f64).powi(2)).unwrap();
        let a = audit(&t, &[1.5, 2.5]).unwrap();
        assert_eq!(a.n_violations, 15);
        // gap = 2(|T| - |S|) ∈ {2, 4}
        assert_eq!(a.gap_histogram[0].count, 15);
        assert_eq!(a.gap_histogram[1].count, 3);
        assert_eq!(a.n_sign_flips, 0);
    }

    #[test]
    fn sign_flip_without_violation_is_tracked_independently() {
        // f(∅)=0, f(a)=1, f(b)=0, f(ab)=-1: Δ(a|∅)=1, Δ(a|b)=-1, gap -2
        let t = CoalitionTable::from_values(universe(2), vec![0.0, 1.0, 0.0, -1.0]).unwrap();
        let a = audit(&t, &[]).unwrap();
        let tr = a.triples.iter().find(|t| t.component == 0).unwrap();
        assert!(tr.sign_flip && !tr.violation);
    }

    #[test]
    fn threshold_validation() {
        let t = CoalitionTable::from_fn(universe(2), |_| 0.0).unwrap();
        assert_eq!(audit(&t, &[0.1, 0.05]).unwrap_err(), Error::InvalidThresholds);
        assert_eq!(audit(&t, &[-0.1]).unwrap_err(), Error::InvalidThresholds);
    }

    #[test]
    fn gamma_variants_differ_in_support() {
        let t = CoalitionTable::from_fn(universe(3), |m| (m.count_ones() as f64).powi(2) + 0.5 * m as f64)
            .unwrap();
        let both = audit_with(&t, &[], &BothPositive).unwrap();
        let viol = audit_with(&t, &[], &ViolatingOnly).unwrap();
        assert_eq!(both.gamma.variant, "both-positive");
        assert!(viol.gamma.values.len() <= both.gamma.values.len());
    }

    #[test]
    fn large_universe_rejected() {
        let t = CoalitionTable::from_fn(universe(12), |_| 0.0).unwrap();
        assert!(matches!(audit(&t, &[]), Err(Error::TooManyTriples(_))));
    }
}
