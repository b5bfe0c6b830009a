//! Paired-design tests: Student t, exact Wilcoxon signed-rank, exact McNemar.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, StudentsT};

use super::bootstrap::standard_normal;
use crate::error::{Error, Result};

/// Largest n for which the Wilcoxon null distribution is enumerated exactly.
pub const WILCOXON_EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub labels: Vec<String>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl PairedSample {
    pub fn new(labels: Vec<String>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        if !labels.is_empty() && labels.len() != a.len() {
            return Err(Error::LengthMismatch(labels.len(), a.len()));
        }
        if a.is_empty() {
            return Err(Error::TooFewUnits { got: 0, min: 1 });
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("paired values must be finite".into()));
        }
        let labels = if labels.is_empty() {
            (1..=a.len()).map(|i| i.to_string()).collect()
        } else {
            labels
        };
        Ok(Self { labels, a, b })
    }

    /// A sample whose differences `a − b` are exactly `diffs`.
    pub fn from_differences(diffs: &[f64]) -> Result<Self> {
        Self::new(Vec::new(), diffs.to_vec(), vec![0.0; diffs.len()])
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn differences(&self) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(x, y)| x - y).collect()
    }

    pub fn swapped(&self) -> Self {
        Self { labels: self.labels.clone(), a: self.b.clone(), b: self.a.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: String,
    pub n: usize,
    pub statistic: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df: Option<f64>,
    /// One-sided p in the direction of the observed effect.
    pub p_one_sided: f64,
    pub p_two_sided: f64,
    pub sidedness: Sidedness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effect_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bf10: Option<f64>,
    /// True when an asymptotic approximation replaced exact enumeration.
    #[serde(default)]
    pub approximate: bool,
}

impl TestResult {
    pub fn p(&self) -> f64 {
        match self.sidedness {
            Sidedness::OneSided => self.p_one_sided,
            Sidedness::TwoSided => self.p_two_sided,
        }
    }
}

/// Paired t-test on `a − b`; effect size is Cohen's d_z = t/√n.
pub fn paired_t(sample: &PairedSample) -> Result<TestResult> {
    let d = sample.differences();
    let n = d.len();
    if n < 2 {
        return Err(Error::TooFewUnits { got: n, min: 2 });
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 || d.iter().all(|&x| x == d[0]) {
        return Err(Error::ZeroVariance);
    }
    let t = mean / (var / n as f64).sqrt();
    let df = (n - 1) as f64;
    let tail = student_t_sf(t.abs(), df);
    Ok(TestResult {
        test: "paired-t".into(),
        n,
        statistic: t,
        df: Some(df),
        p_one_sided: tail,
        p_two_sided: (2.0 * tail).min(1.0),
        sidedness: Sidedness::TwoSided,
        effect_size: Some(cohens_dz(t, n)),
        bf10: None,
        approximate: false,
    })
}

pub fn cohens_dz(t: f64, n: usize) -> f64 {
    t / (n as f64).sqrt()
}

/// Upper tail of Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).expect("df > 0").sf(t)
}

/// Midranks of `values` (1-based), doubled so tied ranks stay integral.
fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tie = 1e-12 * scale;
    let mut ranks = vec![0u64; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && values[order[end + 1]] - values[order[start]] <= tie {
            end += 1;
        }
        // positions start+1 ..= end+1 share rank (start+end+2)/2
        let doubled = (start + end + 2) as u64;
        for &i in &order[start..=end] {
            ranks[i] = doubled;
        }
        start = end + 1;
    }
    ranks
}

/// Number of sign assignments giving each doubled positive-rank sum.
fn signed_rank_counts(doubled_ranks: &[u64]) -> Vec<u64> {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

/// Wilcoxon signed-rank test on `a − b`. Zero differences are dropped and
/// ties receive midranks. W is the smaller of the two signed-rank sums; up to
/// [`WILCOXON_EXACT_MAX_N`] nonzero differences the null distribution is
/// enumerated exactly, beyond that a normal approximation with continuity
/// and tie corrections is used and `approximate` is set.
pub fn wilcoxon_exact(sample: &PairedSample, sidedness: Sidedness) -> Result<TestResult> {
    let diffs: Vec<f64> = sample.differences().into_iter().filter(|&d| d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(Error::AllZeroDifferences);
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = doubled_midranks(&abs);
    let total: u64 = ranks.iter().sum();
    let w_plus: u64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let w = w_plus.min(total - w_plus);
    let statistic = w as f64 / 2.0;

    let (p_one, approximate) = if n <= WILCOXON_EXACT_MAX_N {
        let counts = signed_rank_counts(&ranks);
        let below: u64 = counts[..=w as usize].iter().sum();
        (below as f64 / 2f64.powi(n as i32), false)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = {
            let mut sorted = ranks.clone();
            sorted.sort_unstable();
            let mut sum = 0.0;
            let mut i = 0;
            while i < sorted.len() {
                let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
                let t = j as f64;
                sum += t * t * t - t;
                i += j;
            }
            sum
        };
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (statistic - mean + 0.5) / var.sqrt();
        (standard_normal().cdf(z).min(0.5), true)
    };
    Ok(TestResult {
        test: "wilcoxon-signed-rank".into(),
        n,
        statistic,
        df: None,
        p_one_sided: p_one,
        p_two_sided: (2.0 * p_one).min(1.0),
        sidedness,
        effect_size: None,
        bf10: None,
        approximate,
    })
}

/// Exact McNemar test from the two discordant counts.
pub fn mcnemar_exact(b: u64, c: u64) -> Result<TestResult> {
    let n = b + c;
    if n == 0 {
        return Err(Error::NoDiscordantPairs);
    }
    let k = b.min(c);
    let binom = Binomial::new(0.5, n).expect("p = 1/2");
    let tail = binom.cdf(k);
    Ok(TestResult {
        test: "mcnemar-exact".into(),
        n: n as usize,
        statistic: k as f64,
        df: None,
        p_one_sided: tail.min(1.0),
        p_two_sided: (2.0 * tail).min(1.0),
        sidedness: Sidedness::TwoSided,
        effect_size: None,
        bf10: None,
        approximate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_on_one_to_four() {
        let s = PairedSample::from_differences(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let r = paired_t(&s).unwrap();
        // mean 2.5, sd sqrt(5/3), t = 2.5 / (sd/2)
        let expect = 2.5 / ((5.0f64 / 3.0).sqrt() / 2.0);
        assert!((r.statistic - expect).abs() < 1e-12);
        assert!((r.statistic - 3.873).abs() < 1e-3);
        assert_eq!(r.df, Some(3.0));
        assert!((r.effect_size.unwrap() - expect / 2.0).abs() < 1e-12);
        // two-sided p for t = sqrt(15), df 3: 0.030466 (reference value)
        assert!((r.p_two_sided - 0.030466).abs() < 1e-5);
    }

    #[test]
    fn dz_of_reported_t() {
        assert!((cohens_dz(2.74, 10) - 0.86646).abs() < 1e-4);
    }

    #[test]
    fn zero_variance_rejected() {
        let s = PairedSample::from_differences(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(paired_t(&s).unwrap_err(), Error::ZeroVariance);
        let s = PairedSample::from_differences(&[0.2, 0.2]).unwrap();
        assert_eq!(paired_t(&s).unwrap_err(), Error::ZeroVariance);
        let s = PairedSample::from_differences(&[0.2]).unwrap();
        assert!(matches!(paired_t(&s), Err(Error::TooFewUnits { .. })));
    }

    #[test]
    fn wilcoxon_extremes() {
        let s = PairedSample::from_differences(&[0.5]).unwrap();
        let r = wilcoxon_exact(&s, Sidedness::OneSided).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p(), 0.5);

        let diffs: Vec<f64> = (1..=10).map(|i| i as f64 * 0.01).collect();
        let r = wilcoxon_exact(&PairedSample::from_differences(&diffs).unwrap(), Sidedness::OneSided)
            .unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_one_sided, 1.0 / 1024.0);
    }

    #[test]
    fn wilcoxon_w6_n10() {
        // ranks 1 and 5 negative: W- = 6
        let diffs: Vec<f64> =
            (1..=10).map(|i| if i == 1 || i == 5 { -(i as f64) } else { i as f64 }).collect();
        let r = wilcoxon_exact(&PairedSample::from_differences(&diffs).unwrap(), Sidedness::OneSided)
            .unwrap();
        assert_eq!(r.statistic, 6.0);
        assert_eq!(r.p_one_sided, 14.0 / 1024.0);
        assert_eq!(r.p_two_sided, 28.0 / 1024.0);
    }

    #[test]
    fn wilcoxon_drops_zeros_and_midranks_ties() {
        let s = PairedSample::from_differences(&[0.0, 1.0, -1.0, 2.0]).unwrap();
        let r = wilcoxon_exact(&s, Sidedness::TwoSided).unwrap();
        assert_eq!(r.n, 3);
        // ranks 1.5, 1.5, 3 ; W- = 1.5
        assert_eq!(r.statistic, 1.5);
        // sums ≤ 1.5 among 8 assignments: {}, {a}, {b} → 3/8
        assert_eq!(r.p_one_sided, 3.0 / 8.0);
        let z = PairedSample::from_differences(&[0.0, 0.0]).unwrap();
        assert_eq!(wilcoxon_exact(&z, Sidedness::TwoSided).unwrap_err(), Error::AllZeroDifferences);
    }

    #[test]
    fn wilcoxon_large_n_is_flagged() {
        let diffs: Vec<f64> = (1..=40).map(|i| if i % 3 == 0 { -(i as f64) } else { i as f64 }).collect();
        let r = wilcoxon_exact(&PairedSample::from_differences(&diffs).unwrap(), Sidedness::TwoSided)
            .unwrap();
        assert!(r.approximate);
        assert!(r.p_two_sided > 0.0 && r.p_two_sided <= 1.0);
    }

    #[test]
    fn mcnemar_cases() {
        assert_eq!(mcnemar_exact(5, 5).unwrap().p_two_sided, 1.0);
        assert!((mcnemar_exact(1, 9).unwrap().p_two_sided - 22.0 / 1024.0).abs() < 1e-12);
        assert!((mcnemar_exact(0, 8).unwrap().p_two_sided - 2.0 / 256.0).abs() < 1e-12);
        assert_eq!(mcnemar_exact(0, 0).unwrap_err(), Error::NoDiscordantPairs);
    }

    #[test]
    fn sample_validation() {
        assert!(PairedSample::new(vec![], vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(PairedSample::new(vec![], vec![], vec![]).is_err());
        assert!(PairedSample::new(vec![], vec![f64::NAN], vec![1.0]).is_err());
    }
}
