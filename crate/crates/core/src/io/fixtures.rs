//! Bundled datasets: the 8B and 70B HotpotQA coalition tables and the
//! reference Shapley values used as assertion data.

use crate::error::Result;
use crate::lattice::CoalitionTable;

pub const HOTPOTQA_8B: &str = include_str!("../../data/hotpotqa_8b.csv");
pub const HOTPOTQA_70B: &str = include_str!("../../data/hotpotqa_70b.csv");
pub const REFERENCE_SHAPLEY: &str = include_str!("../../data/reference_shapley.csv");

pub const NAMES: [&str; 2] = ["hotpotqa_8b", "hotpotqa_70b"];

/// Raw text of a bundled coalition table.
pub fn source(name: &str) -> Option<&'static str> {
    match name.trim_end_matches(".csv") {
        "hotpotqa_8b" => Some(HOTPOTQA_8B),
        "hotpotqa_70b" => Some(HOTPOTQA_70B),
        _ => None,
    }
}

pub fn hotpotqa_8b() -> CoalitionTable {
    super::parse_coalition_csv(HOTPOTQA_8B).expect("bundled fixture parses")
}

pub fn hotpotqa_70b() -> CoalitionTable {
    super::parse_coalition_csv(HOTPOTQA_70B).expect("bundled fixture parses")
}

/// Reference φ per component: (component, hotpotqa, gsm8k).
pub fn reference_shapley() -> Result<Vec<(String, f64, f64)>> {
    let mut out = Vec::new();
    for (n, line) in REFERENCE_SHAPLEY.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| crate::error::Error::parse(n + 1, e.to_string()));
        if f.len() != 3 {
            return Err(crate::error::Error::parse(n + 1, "expected 3 fields"));
        }
        out.push((f[0].to_string(), num(f[1])?, num(f[2])?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load_complete() {
        for name in NAMES {
            let t = super::super::parse_coalition_csv(source(name).unwrap()).unwrap();
            assert!(t.is_complete(), "{name}");
        }
        assert_eq!(reference_shapley().unwrap().len(), 5);
    }
}
