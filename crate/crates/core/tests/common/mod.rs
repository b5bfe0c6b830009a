//! Brute-force oracles shared by the integration suites. None of these call
//! the library routine they are compared against.
#![allow(dead_code)]

use std::sync::Arc;

use coalition_core::lattice::{CoalitionTable, Universe};
use coalition_core::regress::{build_design, DesignSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn universe(k: usize) -> Arc<Universe> {
    Arc::new(Universe::new((0..k).map(|i| format!("c{i}"))).unwrap())
}

pub fn random_table(rng: &mut impl Rng, k: usize) -> CoalitionTable {
    let values = (0..1usize << k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    CoalitionTable::from_values(universe(k), values).unwrap()
}

/// Average marginal contribution over every one of the k! orderings.
pub fn shapley_by_permutations(values: &[f64], k: usize) -> Vec<f64> {
    let mut phi = vec![0.0; k];
    let mut perm: Vec<usize> = (0..k).collect();
    let mut count = 0u64;
    fn visit(perm: &mut Vec<usize>, depth: usize, values: &[f64], phi: &mut [f64], count: &mut u64) {
        if depth == perm.len() {
            let mut mask = 0usize;
            for &i in perm.iter() {
                phi[i] += values[mask | 1 << i] - values[mask];
                mask |= 1 << i;
            }
            *count += 1;
            return;
        }
        for j in depth..perm.len() {
            perm.swap(depth, j);
            visit(perm, depth + 1, values, phi, count);
            perm.swap(depth, j);
        }
    }
    visit(&mut perm, 0, values, &mut phi, &mut count);
    phi.iter().map(|p| p / count as f64).collect()
}

/// Midranks of |d| for nonzero d, then P(W+ ≤ min(W+, W−)) by enumerating
/// all 2^n sign vectors.
pub fn wilcoxon_brute_p(diffs: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()));
    let mut rank = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[order[j + 1]].abs() == d[order[i]].abs() {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            rank[o] = mid;
        }
        i = j + 1;
    }
    let w_plus: f64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| rank[i]).sum();
    let total: f64 = rank.iter().sum();
    let w = w_plus.min(total - w_plus);
    let mut hits = 0u64;
    for signs in 0..1u64 << n {
        let s: f64 = (0..n).filter(|&i| signs >> i & 1 == 1).map(|i| rank[i]).sum();
        if s <= w + 1e-9 {
            hits += 1;
        }
    }
    (w, hits as f64 / (1u64 << n) as f64)
}

/// 1 − PRESS/TSS with every row deleted and the normal equations re-solved.
pub fn refit_loocv(table: &CoalitionTable, spec: DesignSpec) -> f64 {
    let d = build_design(table, spec).unwrap();
    let (n, p) = (d.n_rows(), d.n_params());
    let mean = d.y.iter().sum::<f64>() / n as f64;
    let tss: f64 = d.y.iter().map(|v| (v - mean).powi(2)).sum();
    let mut press = 0.0;
    for r in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != r).collect();
        let x = DMatrix::from_fn(n - 1, p, |i, j| d.x[(keep[i], j)]);
        let y = DVector::from_fn(n - 1, |i, _| d.y[keep[i]]);
        let beta = (x.transpose() * &x).lu().solve(&(x.transpose() * y)).unwrap();
        let pred = (d.x.row(r) * beta)[0];
        press += (d.y[r] - pred).powi(2);
    }
    1.0 - press / tss
}

/// Weighted coverage: component i covers a random subset of a ground set.
pub fn coverage_table(rng: &mut impl Rng, k: usize) -> CoalitionTable {
    let ground = 12;
    let weights: Vec<f64> = (0..ground).map(|_| rng.gen_range(0.0..1.0)).collect();
    let covers: Vec<u32> = (0..k).map(|_| rng.gen_range(0..1u32 << ground)).collect();
    CoalitionTable::from_fn(universe(k), |m| {
        let covered = (0..k).filter(|i| m >> i & 1 == 1).fold(0u32, |acc, i| acc | covers[i]);
        (0..ground).filter(|g| covered >> g & 1 == 1).map(|g| weights[g]).sum()
    })
    .unwrap()
}

/// min(B, Σ w_i): budget-additive.
pub fn budget_table(rng: &mut impl Rng, k: usize) -> CoalitionTable {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
    let budget = rng.gen_range(0.2..2.0);
    CoalitionTable::from_fn(universe(k), |m| {
        let s: f64 = (0..k).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum();
        s.min(budget)
    })
    .unwrap()
}

/// g(Σ w_i) with g concave and w ≥ 0.
pub fn concave_table(rng: &mut impl Rng, k: usize) -> CoalitionTable {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
    let scale = rng.gen_range(0.5..2.0);
    CoalitionTable::from_fn(universe(k), |m| {
        let s: f64 = (0..k).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum();
        scale * s.sqrt()
    })
    .unwrap()
}

/// JZS BF10 by a fine trapezoid rule on g ∈ (0, G], independent of the
/// adaptive integrator.
pub fn bf10_trapezoid(t: f64, n: usize, r: f64) -> f64 {
    let nu = n as f64 - 1.0;
    let nf = n as f64;
    let null = (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0);
    let integrand = |g: f64| {
        if g <= 0.0 {
            return 0.0;
        }
        let a = 1.0 + nf * g * r * r;
        a.powf(-0.5)
            * (1.0 + t * t / (a * nu)).powf(-(nu + 1.0) / 2.0)
            * (2.0 * std::f64::consts::PI).powf(-0.5)
            * g.powf(-1.5)
            * (-1.0 / (2.0 * g)).exp()
    };
    // substitute g = u^2 to tame the left tail, integrate u on (0, 400]
    let steps = 400_000;
    let hi: f64 = 400.0;
    let h = hi / steps as f64;
    let mut sum = 0.0;
    for s in 1..=steps {
        let u = s as f64 * h;
        let f = integrand(u * u) * 2.0 * u;
        sum += if s == steps { f / 2.0 } else { f };
    }
    sum * h / null
}
