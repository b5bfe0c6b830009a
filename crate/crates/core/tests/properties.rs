mod common;

use coalition_core::io::fixtures;
use coalition_core::lattice::{mobius_transform, shapley, shapley_methods, shapley_with, CoalitionTable};
use coalition_core::matrix::TaskMatrix;
use coalition_core::regress::{
    build_design, coupling_eigen, coupling_matrix, fit_ols, loocv_r2, CouplingScale, DesignSpec, Encoding, Order,
};
use coalition_core::select::{best_per_k, greedy_forward};
use coalition_core::stats::resample::{draw_indices, keyed_stream};
use coalition_core::stats::{
    bh, bonferroni, bootstrap_ci, cluster_bootstrap_ci, harsanyi_bootstrap, holm, jzs_bf10, mean, paired_t,
    wilcoxon_exact, Bca, BootstrapConfig, PairedSample, Percentile, Sidedness,
};
use coalition_core::submod::{audit, cluster_bootstrap_violation_rate, top_violations, triple_count};
use coalition_core::ComponentSet;
use proptest::prelude::*;
use rand::Rng;

fn table_strategy(max_k: usize) -> impl Strategy<Value = CoalitionTable> {
    (0..=max_k).prop_flat_map(|k| {
        prop::collection::vec(-1.0f64..1.0, 1usize << k)
            .prop_map(move |v| CoalitionTable::from_values(common::universe(k), v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mobius_round_trip(t in table_strategy(8)) {
        let back = mobius_transform(&t).unwrap().reconstruct();
        for (m, v) in t.entries() {
            prop_assert!((back.value(m).unwrap() - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn shapley_backends_match_permutation_oracle(t in table_strategy(6)) {
        let oracle = common::shapley_by_permutations(t.complete_values().unwrap(), t.k());
        for m in shapley_methods().iter() {
            let r = shapley_with(&t, m).unwrap();
            prop_assert!(r.efficiency_gap.abs() < 1e-12);
            for (a, b) in r.phi.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negation_swaps_violations_and_strict_gains(t in table_strategy(5)) {
        let neg = CoalitionTable::from_fn(t.universe().clone(), |m| -t.value(m).unwrap()).unwrap();
        let (a, b) = (audit(&t, &[]).unwrap(), audit(&neg, &[]).unwrap());
        prop_assert_eq!(a.n_violations, b.n_antiviolations);
        prop_assert_eq!(a.n_antiviolations, b.n_violations);
        prop_assert_eq!(a.n_sign_flips, b.n_sign_flips);
    }

    #[test]
    fn triple_enumeration_matches_brute_force(k in 0usize..=6) {
        let mut brute = 0u64;
        for t in 0u32..1 << k {
            for s in 0u32..1 << k {
                if s & t == s && s != t {
                    brute += (0..k).filter(|i| t >> i & 1 == 0).count() as u64;
                }
            }
        }
        prop_assert_eq!(triple_count(k), brute);
        let t = CoalitionTable::from_fn(common::universe(k), |m| m as f64).unwrap();
        let a = audit(&t, &[]).unwrap();
        prop_assert_eq!(a.n_triples as u64, brute);
        for tr in &a.triples {
            prop_assert!(tr.sub & tr.sup == tr.sub && tr.sub != tr.sup);
            prop_assert!(tr.sup >> tr.component & 1 == 0);
        }
    }

    #[test]
    fn encodings_give_identical_fits(t in table_strategy(5).prop_filter("k >= 2", |t| t.k() >= 2)) {
        for order in [Order::Main, Order::Pairwise] {
            let b = fit_ols(&build_design(&t, DesignSpec::new(Encoding::Binary, order)).unwrap()).unwrap();
            let s = fit_ols(&build_design(&t, DesignSpec::new(Encoding::Spin, order)).unwrap()).unwrap();
            prop_assert!((b.r2 - s.r2).abs() < 1e-10);
            for (x, y) in b.fitted.iter().zip(&s.fitted) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn main_effects_are_group_mean_differences(t in table_strategy(6).prop_filter("k >= 1", |t| t.k() >= 1)) {
        let fit = fit_ols(&build_design(&t, DesignSpec::main_effects()).unwrap()).unwrap();
        let v = t.complete_values().unwrap();
        for i in 0..t.k() {
            let (mut on, mut off) = (Vec::new(), Vec::new());
            for (m, x) in v.iter().enumerate() {
                if m >> i & 1 == 1 { on.push(*x) } else { off.push(*x) }
            }
            let diff = mean(&on) - mean(&off);
            prop_assert!((fit.main_effect(i) - diff).abs() < 1e-10);
        }
    }

    #[test]
    fn coupling_spectrum_has_zero_trace(t in table_strategy(6).prop_filter("k >= 2", |t| t.k() >= 2)) {
        let fit = fit_ols(&build_design(&t, DesignSpec::pairwise()).unwrap()).unwrap();
        let s = coupling_eigen(&fit, CouplingScale::Native).unwrap();
        prop_assert!(s.eigenvalues.iter().sum::<f64>().abs() < 1e-10);
        let j = coupling_matrix(&fit, CouplingScale::Presence).unwrap();
        let n = coupling_matrix(&fit, CouplingScale::Native).unwrap();
        prop_assert!((j - n * 4.0).abs().max() < 1e-12);
    }

    #[test]
    fn hat_loocv_matches_refit(t in table_strategy(5).prop_filter("k >= 3", |t| t.k() >= 3), spin in any::<bool>()) {
        let enc = if spin { Encoding::Spin } else { Encoding::Binary };
        for order in [Order::Main, Order::Pairwise] {
            let spec = DesignSpec::new(enc, order);
            let got = loocv_r2(&build_design(&t, spec).unwrap()).unwrap();
            prop_assert!((got - common::refit_loocv(&t, spec)).abs() <= 1e-10);
        }
    }

    #[test]
    fn wilcoxon_matches_enumeration(diffs in prop::collection::vec(-5i32..=5, 1..=12)) {
        let d: Vec<f64> = diffs.iter().map(|x| *x as f64).collect();
        prop_assume!(d.iter().any(|x| *x != 0.0));
        let got = wilcoxon_exact(&PairedSample::from_differences(&d).unwrap(), Sidedness::OneSided).unwrap();
        let (w, p) = common::wilcoxon_brute_p(&d);
        prop_assert_eq!(got.statistic, w);
        prop_assert!((got.p_one_sided - p).abs() < 1e-12);
        prop_assert!((got.p_two_sided - (2.0 * p).min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn paired_t_is_antisymmetric(a in prop::collection::vec(0.0f64..1.0, 3..30), shift in -0.5f64..0.5) {
        let b: Vec<f64> = a.iter().enumerate().map(|(i, x)| x * 0.7 + shift + (i % 3) as f64 * 0.01).collect();
        let s = PairedSample::new(Vec::new(), a, b).unwrap();
        let (x, y) = (paired_t(&s).unwrap(), paired_t(&s.swapped()).unwrap());
        prop_assert!((x.statistic + y.statistic).abs() < 1e-12);
        prop_assert!((x.p_two_sided - y.p_two_sided).abs() < 1e-12);
        prop_assert!((x.effect_size.unwrap() + y.effect_size.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn corrections_are_nested(p in prop::collection::vec(0.0f64..0.2, 1..20), alpha in 0.01f64..0.1) {
        let (bf, ho, b) = (bonferroni(&p, alpha).unwrap(), holm(&p, alpha).unwrap(), bh(&p, alpha).unwrap());
        for i in 0..p.len() {
            prop_assert!(!bf.reject[i] || ho.reject[i]);
            prop_assert!(!ho.reject[i] || p[i] <= alpha);
            prop_assert!(!ho.reject[i] || b.reject[i]);
            prop_assert!(ho.adjusted[i] >= p[i] && ho.adjusted[i] <= bf.adjusted[i] + 1e-15);
        }
    }

    #[test]
    fn bayes_factor_grows_with_t(t in 0.0f64..5.0, dt in 0.05f64..1.0, n in 3usize..60) {
        let (a, b) = (jzs_bf10(t, n, 0.707).unwrap(), jzs_bf10(t + dt, n, 0.707).unwrap());
        prop_assert!(b > a);
        prop_assert!((jzs_bf10(-t, n, 0.707).unwrap() - a).abs() <= 1e-9 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bootstrap_is_thread_count_invariant(data in prop::collection::vec(-1.0f64..1.0, 5..40), seed in any::<u64>()) {
        let cfg = BootstrapConfig { resamples: 300, level: 0.9, seed };
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                (bootstrap_ci(&data, mean, &Percentile, &cfg).unwrap(), bootstrap_ci(&data, mean, &Bca, &cfg).unwrap())
            })
        };
        prop_assert_eq!(run(1), run(8));
    }
}

#[test]
fn bayes_factor_matches_trapezoid_oracle() {
    for &(t, n) in &[(0.5, 8), (1.5, 20), (2.74, 10), (3.5, 30), (0.0, 5)] {
        let got = jzs_bf10(t, n, 0.707).unwrap();
        let want = common::bf10_trapezoid(t, n, 0.707);
        assert!((got - want).abs() <= 1e-4 * want.max(1.0), "t={t} n={n}: {got} vs {want}");
    }
}

#[test]
fn submodular_oracles_have_no_violations() {
    let mut rng = common::rng(3);
    for n in 0..300 {
        let k = rng.gen_range(1..=6);
        let t = match n % 3 {
            0 => common::coverage_table(&mut rng, k),
            1 => common::budget_table(&mut rng, k),
            _ => common::concave_table(&mut rng, k),
        };
        assert_eq!(audit(&t, &[]).unwrap().n_violations, 0, "oracle {n}");
    }
}

#[test]
fn greedy_meets_the_cardinality_bound_on_monotone_submodular() {
    let mut rng = common::rng(5);
    for _ in 0..200 {
        let k = rng.gen_range(1..=6);
        let t = common::coverage_table(&mut rng, k);
        let best = best_per_k(&t).unwrap();
        let g = greedy_forward(&t, &ComponentSet::empty(t.universe().clone())).unwrap();
        let base = t.value(0).unwrap();
        for (size, value) in g.trajectory() {
            if size == 0 {
                continue;
            }
            let bound = 1.0 - (1.0 - 1.0 / size as f64).powi(size as i32);
            assert!(value - base >= bound * (best.per_k[size].value - base) - 1e-12);
        }
    }
}

#[test]
fn pure_sign_flip_interaction() {
    // A and B each hurt alone and help together; C is inert
    let u = common::universe(3);
    let t = CoalitionTable::from_fn(u, |m| match m & 3 {
        0 | 3 => 0.0,
        _ => -0.5,
    })
    .unwrap();
    let a = audit(&t, &[]).unwrap();
    let top = top_violations(&a, 100, None);
    assert!(a.n_violations > 0);
    assert_eq!(top.triples.len(), a.n_violations);
    assert!(top.triples.iter().all(|t| t.gap == 1.0 && t.sign_flip));
    assert_eq!(top.sign_flip_fraction, 1.0);
}

#[test]
fn bca_shifts_right_on_right_skewed_data() {
    let mut rng = common::rng(17);
    let trials = 200;
    let mut right = 0;
    for trial in 0..trials {
        let data: Vec<f64> = (0..40).map(|_| (rng.gen_range(-1.0f64..1.0) * 1.5).exp()).collect();
        let cfg = BootstrapConfig { resamples: 2000, level: 0.95, seed: trial };
        let p = bootstrap_ci(&data, mean, &Percentile, &cfg).unwrap();
        let b = bootstrap_ci(&data, mean, &Bca, &cfg).unwrap();
        if b.lo + b.hi > p.lo + p.hi {
            right += 1;
        }
    }
    assert!(right as f64 >= 0.95 * trials as f64, "{right}/{trials}");
}

/// Percentile cluster bootstrap written out longhand.
#[test]
fn cluster_bootstrap_matches_longhand() {
    let mut rng = common::rng(23);
    let tables: Vec<CoalitionTable> = (0..30).map(|_| common::random_table(&mut rng, 2)).collect();
    let units: Vec<String> = (0..30).map(|i| i.to_string()).collect();
    let m = TaskMatrix::from_tables(units, &tables).unwrap();
    let cfg = BootstrapConfig { resamples: 500, level: 0.9, seed: 99 };
    let stat = |means: &[f64]| means[3] - means[1] - means[2] + means[0];
    let ci = cluster_bootstrap_ci(&m, stat, &Percentile, &cfg).unwrap();

    let mut reps = Vec::new();
    let mut idx = Vec::new();
    for r in 0..cfg.resamples {
        draw_indices(&mut keyed_stream(cfg.seed, r as u64), 30, &mut idx);
        let mut means = [0.0; 4];
        for &u in &idx {
            for (c, v) in means.iter_mut().enumerate() {
                *v += tables[u].value(c as u32).unwrap() / 30.0;
            }
        }
        reps.push(stat(&means));
    }
    reps.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (reps.len() - 1) as f64 * p;
        let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
        reps[lo] + (h - lo as f64) * (reps[hi] - reps[lo])
    };
    assert!((ci.lo - q(0.05)).abs() < 1e-12);
    assert!((ci.hi - q(0.95)).abs() < 1e-12);
}

#[test]
fn identical_tasks_give_degenerate_intervals() {
    let t = fixtures::hotpotqa_8b();
    let n = 25;
    let m = TaskMatrix::from_tables((0..n).map(|i| format!("q{i}")).collect(), &vec![t.clone(); n]).unwrap();
    let cfg = BootstrapConfig { resamples: 400, level: 0.95, seed: 1 };
    let rate = cluster_bootstrap_violation_rate(&m, &cfg).unwrap();
    assert_eq!(rate.rate, 181.0 / 325.0);
    assert_eq!(rate.ci.width(), 0.0);
    let set = coalition_core::lattice::parse_component_set("T+SR+R", t.universe()).unwrap();
    let h = harsanyi_bootstrap(&m, &set, &Percentile, &cfg).unwrap();
    assert!((h.estimate - 0.174).abs() < 1e-9);
    assert!(h.width().abs() < 1e-12);
}

#[test]
fn shapley_of_fixture_sums_to_total() {
    let t = fixtures::hotpotqa_8b();
    let r = shapley(&t).unwrap();
    let total = t.value(31).unwrap() - t.value(0).unwrap();
    assert!((r.phi.iter().sum::<f64>() - total).abs() < 1e-12);
}
