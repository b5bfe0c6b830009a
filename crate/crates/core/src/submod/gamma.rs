use super::Triple;
use crate::registry::{Named, Registry};

/// Which triples enter the submodularity-ratio distribution. The ratio is
/// always Δ(i|S) / Δ(i|T); submodularity implies it is ≥ 1 wherever both
/// gains are positive.
pub trait GammaVariant: Named + Send + Sync {
    fn qualifies(&self, triple: &Triple) -> bool;

    fn ratio(&self, triple: &Triple) -> Option<f64> {
        self.qualifies(triple).then(|| triple.gain_sub / triple.gain_sup)
    }
}

pub struct BothPositive;

impl Named for BothPositive {
    fn name(&self) -> &'static str {
        "both-positive"
    }
    fn summary(&self) -> &'static str {
        "all triples with Δ(i|S) > 0 and Δ(i|T) > 0"
    }
}

impl GammaVariant for BothPositive {
    fn qualifies(&self, t: &Triple) -> bool {
        t.gain_sub > 0.0 && t.gain_sup > 0.0
    }
}

pub struct ViolatingOnly;

impl Named for ViolatingOnly {
    fn name(&self) -> &'static str {
        "violations"
    }
    fn summary(&self) -> &'static str {
        "violating triples with both gains positive"
    }
}

impl GammaVariant for ViolatingOnly {
    fn qualifies(&self, t: &Triple) -> bool {
        t.violation && t.gain_sub > 0.0 && t.gain_sup > 0.0
    }
}

/// Registered γ variants; `both-positive` is the default.
pub fn gamma_variants() -> Registry<dyn GammaVariant> {
    Registry::<dyn GammaVariant>::new().with(Box::new(BothPositive)).with(Box::new(ViolatingOnly))
}
