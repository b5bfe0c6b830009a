//! Subset selection over a coalition table: exhaustive per-size optima and the
//! optimal component count, greedy forward selection, and a comparison of the
//! registered strategies.

use std::sync::Arc;

use crate::error::Result;
use crate::lattice::{CoalitionTable, ComponentSet, Universe};
use crate::registry::{Named, Registry};

/// Stated in every report: equal values go to the smaller coalition size,
/// then to the lower mask.
pub const TIE_RULE: &str = "smallest K, then canonical mask order";

const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeOptimum {
    pub size: usize,
    pub mask: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestPerK {
    pub universe: Arc<Universe>,
    /// Entry K is the best coalition of size K.
    pub per_k: Vec<SizeOptimum>,
    pub k_star: usize,
}

impl BestPerK {
    pub fn best(&self) -> SizeOptimum {
        self.per_k[self.k_star]
    }
}

fn tie_tolerance(values: &[f64]) -> f64 {
    TIE_TOLERANCE * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

pub fn best_per_k(table: &CoalitionTable) -> Result<BestPerK> {
    let values = table.complete_values()?;
    let k = table.k();
    let tol = tie_tolerance(values);
    let mut per_k: Vec<Option<SizeOptimum>> = vec![None; k + 1];
    for (m, &v) in values.iter().enumerate() {
        let size = m.count_ones() as usize;
        let slot = &mut per_k[size];
        // masks visited ascending, so only a strictly larger value replaces
        if slot.is_none_or(|b| v > b.value + tol) {
            *slot = Some(SizeOptimum { size, mask: m as u32, value: v });
        }
    }
    let per_k: Vec<SizeOptimum> = per_k.into_iter().map(|s| s.expect("every size occurs")).collect();
    let mut k_star = 0;
    for (size, opt) in per_k.iter().enumerate() {
        if opt.value > per_k[k_star].value + tol {
            k_star = size;
        }
    }
    Ok(BestPerK { universe: table.universe().clone(), per_k, k_star })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyStep {
    pub from_mask: u32,
    pub from_value: f64,
    /// Marginal of every absent component, in universe order.
    pub candidates: Vec<(usize, f64)>,
    /// Added component, or `None` when no marginal is strictly positive.
    pub chosen: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyPath {
    pub universe: Arc<Universe>,
    pub start: u32,
    pub steps: Vec<GreedyStep>,
    pub final_mask: u32,
    pub final_value: f64,
}

impl GreedyPath {
    /// (size, value) after each accepted addition, beginning with the start.
    pub fn trajectory(&self) -> Vec<(usize, f64)> {
        let mut out = vec![(self.start.count_ones() as usize, self.steps.first().map_or(self.final_value, |s| s.from_value))];
        for s in &self.steps {
            if let Some(c) = s.chosen {
                let mask = s.from_mask | 1 << c;
                let gain = s.candidates.iter().find(|(i, _)| *i == c).expect("chosen is a candidate").1;
                out.push((mask.count_ones() as usize, s.from_value + gain));
            }
        }
        out
    }
}

/// Adds the component with the largest strictly positive marginal until none
/// remains. Equal marginals go to the lower component index.
pub fn greedy_forward(table: &CoalitionTable, start: &ComponentSet) -> Result<GreedyPath> {
    let values = table.complete_values()?;
    table.check_universe(start)?;
    let start_mask = start.mask();
    let k = table.k();
    let mut mask = start_mask;
    let mut steps = Vec::new();
    loop {
        let here = values[mask as usize];
        let candidates: Vec<(usize, f64)> = (0..k)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| (i, values[(mask | 1 << i) as usize] - here))
            .collect();
        if candidates.is_empty() {
            break;
        }
        let chosen = candidates
            .iter()
            .filter(|(_, g)| *g > 0.0)
            .fold(None::<(usize, f64)>, |best, &(i, g)| match best {
                Some((_, bg)) if bg >= g => best,
                _ => Some((i, g)),
            })
            .map(|(i, _)| i);
        steps.push(GreedyStep { from_mask: mask, from_value: here, candidates, chosen });
        match chosen {
            Some(i) => mask |= 1 << i,
            None => break,
        }
    }
    Ok(GreedyPath {
        universe: table.universe().clone(),
        start: start_mask,
        steps,
        final_mask: mask,
        final_value: values[mask as usize],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome {
    pub strategy: &'static str,
    pub mask: u32,
    pub value: f64,
    /// Coalitions evaluated.
    pub evaluations: usize,
}

pub trait SelectionStrategy: Named + Send + Sync {
    fn select(&self, table: &CoalitionTable) -> Result<StrategyOutcome>;
}

pub struct Exhaustive;

impl Named for Exhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }
    fn summary(&self) -> &'static str {
        "scan every coalition"
    }
}

impl SelectionStrategy for Exhaustive {
    fn select(&self, table: &CoalitionTable) -> Result<StrategyOutcome> {
        let best = best_per_k(table)?.best();
        Ok(StrategyOutcome {
            strategy: self.name(),
            mask: best.mask,
            value: best.value,
            evaluations: table.universe().size(),
        })
    }
}

pub struct GreedyForward;

impl Named for GreedyForward {
    fn name(&self) -> &'static str {
        "greedy"
    }
    fn summary(&self) -> &'static str {
        "forward selection from the empty coalition"
    }
}

impl SelectionStrategy for GreedyForward {
    fn select(&self, table: &CoalitionTable) -> Result<StrategyOutcome> {
        let path = greedy_forward(table, &ComponentSet::empty(table.universe().clone()))?;
        let evaluations = 1 + path.steps.iter().map(|s| s.candidates.len()).sum::<usize>();
        Ok(StrategyOutcome {
            strategy: self.name(),
            mask: path.final_mask,
            value: path.final_value,
            evaluations,
        })
    }
}

pub fn selection_strategies() -> Registry<dyn SelectionStrategy> {
    Registry::<dyn SelectionStrategy>::new().with(Box::new(Exhaustive)).with(Box::new(GreedyForward))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub best: BestPerK,
    pub greedy: GreedyPath,
    /// Best overall value minus the greedy value (≥ 0).
    pub optimality_gap: f64,
    /// Gap relative to the greedy value, in percent; absent when that value is 0.
    pub improvement_pct: Option<f64>,
    pub tie_rule: &'static str,
    pub strategies: Vec<StrategyOutcome>,
}

pub fn compare_strategies(table: &CoalitionTable) -> Result<SelectionReport> {
    let best = best_per_k(table)?;
    let greedy = greedy_forward(table, &ComponentSet::empty(table.universe().clone()))?;
    let optimality_gap = (best.best().value - greedy.final_value).max(0.0);
    let improvement_pct = (greedy.final_value != 0.0).then(|| 100.0 * optimality_gap / greedy.final_value.abs());
    let strategies = selection_strategies().iter().map(|s| s.select(table)).collect::<Result<_>>()?;
    Ok(SelectionReport { best, greedy, optimality_gap, improvement_pct, tie_rule: TIE_RULE, strategies })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe(k: usize) -> Arc<Universe> {
        Arc::new(Universe::new((0..k).map(|i| format!("c{i}"))).unwrap())
    }

    /// f(∅)=0, f(a)=1, other singletons and pairs ≤ 1, f(abc)=2.
    fn sign_flip_table() -> CoalitionTable {
        CoalitionTable::from_values(universe(3), vec![0.0, 1.0, 0.5, 0.9, 0.4, 0.8, 0.3, 2.0]).unwrap()
    }

    #[test]
    fn constant_table_prefers_bare() {
        let t = CoalitionTable::from_fn(universe(4), |_| 0.5).unwrap();
        let b = best_per_k(&t).unwrap();
        assert_eq!(b.k_star, 0);
        assert_eq!(b.best().mask, 0);
    }

    #[test]
    fn greedy_stalls_on_sign_flip() {
        let t = sign_flip_table();
        let g = greedy_forward(&t, &ComponentSet::empty(t.universe().clone())).unwrap();
        assert_eq!(g.final_mask, 0b001);
        assert_eq!(g.final_value, 1.0);
        let r = compare_strategies(&t).unwrap();
        assert_eq!(r.best.best().value, 2.0);
        assert_eq!(r.best.k_star, 3);
        assert_eq!(r.optimality_gap, 1.0);
        assert_eq!(r.improvement_pct, Some(100.0));
    }

    #[test]
    fn additive_positive_reaches_full_set() {
        let w = [0.3, 0.1, 0.2];
        let t = CoalitionTable::from_fn(universe(3), |m| {
            (0..3).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum()
        })
        .unwrap();
        let r = compare_strategies(&t).unwrap();
        assert_eq!(r.greedy.final_mask, 0b111);
        assert_eq!(r.best.best().mask, 0b111);
        assert_eq!(r.optimality_gap, 0.0);
        // order of additions follows weight
        let chosen: Vec<usize> = r.greedy.steps.iter().filter_map(|s| s.chosen).collect();
        assert_eq!(chosen, vec![0, 2, 1]);
    }

    #[test]
    fn zero_marginal_is_not_taken() {
        let t = CoalitionTable::from_values(universe(1), vec![0.2, 0.2]).unwrap();
        let g = greedy_forward(&t, &ComponentSet::empty(t.universe().clone())).unwrap();
        assert_eq!(g.final_mask, 0);
        assert_eq!(g.steps.len(), 1);
        assert_eq!(g.steps[0].chosen, None);
    }

    #[test]
    fn registry_strategies_agree_with_report() {
        let t = sign_flip_table();
        let reg = selection_strategies();
        assert_eq!(reg.names(), vec!["exhaustive", "greedy"]);
        assert_eq!(reg.get("exhaustive").unwrap().select(&t).unwrap().value, 2.0);
        assert_eq!(reg.get("greedy").unwrap().select(&t).unwrap().value, 1.0);
    }

    #[test]
    fn trajectory_lists_sizes() {
        let t = sign_flip_table();
        let g = greedy_forward(&t, &ComponentSet::empty(t.universe().clone())).unwrap();
        assert_eq!(g.trajectory(), vec![(0, 0.0), (1, 1.0)]);
    }
}
