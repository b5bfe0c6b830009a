use std::sync::Arc;

use super::{CoalitionTable, ComponentSet, Universe};
use crate::error::{Error, Result};

/// Möbius coefficients (Harsanyi dividends) of a complete table.
#[derive(Debug, Clone, PartialEq)]
pub struct HarsanyiSpectrum {
    universe: Arc<Universe>,
    dividends: Vec<f64>,
}

impl HarsanyiSpectrum {
    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn dividends(&self) -> &[f64] {
        &self.dividends
    }

    pub fn dividend(&self, mask: u32) -> f64 {
        self.dividends[mask as usize]
    }

    pub fn dividend_of(&self, set: &ComponentSet) -> Result<f64> {
        if *set.universe().as_ref() != *self.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(self.dividend(set.mask()))
    }

    /// Rebuilds f(S) = Σ_{W⊆S} dividend(W) for every S.
    pub fn reconstruct(&self) -> CoalitionTable {
        let mut v = self.dividends.clone();
        let k = self.universe.len();
        for i in 0..k {
            let bit = 1usize << i;
            for m in 0..v.len() {
                if m & bit != 0 {
                    v[m] += v[m ^ bit];
                }
            }
        }
        CoalitionTable::from_values(self.universe.clone(), v).expect("dividends are finite")
    }

    /// Dividends of a given order |S|, in mask order.
    pub fn of_order(&self, order: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.dividends
            .iter()
            .enumerate()
            .filter(move |(m, _)| m.count_ones() as usize == order)
            .map(|(m, d)| (m as u32, *d))
    }
}

/// In-place subset Möbius transform, O(k·2^k).
pub fn mobius_transform(table: &CoalitionTable) -> Result<HarsanyiSpectrum> {
    let mut v = table.complete_values()?.to_vec();
    let k = table.k();
    for i in 0..k {
        let bit = 1usize << i;
        for m in 0..v.len() {
            if m & bit != 0 {
                v[m] -= v[m ^ bit];
            }
        }
    }
    Ok(HarsanyiSpectrum { universe: table.universe().clone(), dividends: v })
}

/// Dividend of one coalition by inclusion–exclusion over its sub-lattice,
/// Σ_{W⊆S} (−1)^{|S|−|W|} f(W). Only the 2^|S| sub-coalitions need to exist.
pub fn dividend_over(coalition: u32, mut value: impl FnMut(u32) -> Result<f64>) -> Result<f64> {
    let size = coalition.count_ones();
    let mut total = 0.0;
    let mut sub = coalition;
    loop {
        let sign = if (size - sub.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * value(sub)?;
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & coalition;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agents() -> Arc<Universe> {
        Arc::new(Universe::agent_components())
    }

    #[test]
    fn additive_table_has_no_interactions() {
        let w = [0.25, -0.5, 0.125, 1.0, -0.75];
        let t = CoalitionTable::from_fn(agents(), |m| {
            2.0 + (0..5).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum::<f64>()
        })
        .unwrap();
        let h = mobius_transform(&t).unwrap();
        assert_eq!(h.dividend(0), 2.0);
        for i in 0..5 {
            assert!((h.dividend(1 << i) - w[i]).abs() < 1e-15);
        }
        for (m, d) in h.dividends().iter().enumerate() {
            if (m as u32).count_ones() >= 2 {
                assert!(d.abs() < 1e-15, "mask {m} dividend {d}");
            }
        }
    }

    #[test]
    fn sub_lattice_dividend_matches_full_transform() {
        let t = CoalitionTable::from_fn(agents(), |m| ((m * 37 + 11) % 17) as f64 / 17.0).unwrap();
        let h = mobius_transform(&t).unwrap();
        for m in 0..32u32 {
            let d = dividend_over(m, |w| t.value(w)).unwrap();
            assert!((d - h.dividend(m)).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_table_rejected() {
        let t = CoalitionTable::new(agents());
        assert!(matches!(mobius_transform(&t), Err(Error::IncompleteTable { .. })));
    }

    #[test]
    fn pure_interaction_puts_mass_on_one_coalition() {
        // unanimity game on {0,2}
        let t = CoalitionTable::from_fn(agents(), |m| if m & 0b101 == 0b101 { 1.0 } else { 0.0 }).unwrap();
        let h = mobius_transform(&t).unwrap();
        for (m, d) in h.dividends().iter().enumerate() {
            let expect = if m == 0b101 { 1.0 } else { 0.0 };
            assert_eq!(*d, expect);
        }
    }
}
