use super::{Cell, Document, Table};
use crate::io::Manifest;
use crate::lattice::{CoalitionTable, HarsanyiSpectrum, ShapleyReport};
use crate::regress::{ModelComparison, RegressionFit};
use crate::select::{BestPerK, GreedyPath, SelectionReport};
use crate::stats::{BootstrapCI, Correction, TestResult};
use crate::submod::{SubmodularityAudit, TopViolations, ViolationRate};

pub fn shapley_document(r: &ShapleyReport) -> Document {
    let mut t = Table::new("Shapley values", &["component", "phi", "abs_share"]);
    for (i, phi) in r.phi.iter().enumerate() {
        let share = r.abs_mass_share.as_ref().map(|s| Cell::Value(s[i])).unwrap_or(Cell::Empty);
        t.push(vec![r.universe.name(i).into(), Cell::Value(*phi), share]);
    }
    Document::new("shapley", "Exact Shapley values")
        .field("method", r.method)
        .field("components", r.universe.len())
        .field("sum_phi", Cell::Value(r.phi.iter().sum()))
        .field("efficiency_gap", Cell::Small(r.efficiency_gap))
        .table(t)
}

/// Dividends up to `max_order` (all orders when `None`), by order then mask.
pub fn mobius_document(h: &HarsanyiSpectrum, max_order: Option<usize>) -> Document {
    let u = h.universe();
    let top = max_order.unwrap_or(u.len()).min(u.len());
    let mut t = Table::new("Harsanyi dividends", &["coalition", "order", "dividend"]);
    for order in 0..=top {
        for (mask, d) in h.of_order(order) {
            t.push(vec![u.explicit_label(mask).into(), order.into(), Cell::Value(d)]);
        }
    }
    let mass = |o: usize| h.of_order(o).map(|(_, d)| d.abs()).sum::<f64>();
    let mut doc = Document::new("mobius", "Harsanyi dividends").field("components", u.len());
    for o in 1..=u.len() {
        doc = doc.field(&format!("abs_mass_order_{o}"), Cell::Value(mass(o)));
    }
    doc.table(t)
}

/// Marginal gains f(S ∪ {i}) − f(S) for the chosen components (all when empty).
/// Negative marginals are interference events.
pub fn marginals_document(table: &CoalitionTable, components: &[usize]) -> crate::error::Result<Document> {
    let values = table.complete_values()?;
    let u = table.universe();
    let chosen: Vec<usize> = if components.is_empty() { (0..u.len()).collect() } else { components.to_vec() };
    let mut t = Table::new("Marginal gains", &["component", "context", "f_context", "f_with", "marginal"]);
    let mut summary = Table::new("Per component", &["component", "mean_marginal", "negative", "contexts"]);
    let mut total_negative = 0usize;
    for &i in &chosen {
        let mut sum = 0.0;
        let mut negative = 0usize;
        let mut contexts = 0usize;
        for s in 0..values.len() as u32 {
            if s >> i & 1 == 1 {
                continue;
            }
            let (a, b) = (values[s as usize], values[(s | 1 << i) as usize]);
            let m = b - a;
            sum += m;
            contexts += 1;
            negative += (m < 0.0) as usize;
            t.push(vec![u.name(i).into(), u.explicit_label(s).into(), Cell::Value(a), Cell::Value(b), Cell::Value(m)]);
        }
        total_negative += negative;
        summary.push(vec![u.name(i).into(), Cell::Value(sum / contexts as f64), negative.into(), contexts.into()]);
    }
    Ok(Document::new("marginals", "Marginal contributions")
        .field("interference_events", total_negative)
        .table(summary)
        .table(t))
}

pub fn audit_document(a: &SubmodularityAudit, top: &TopViolations) -> Document {
    let u = &a.universe;
    let mut hist = Table::new("Violation gaps", &["gap_above", "count"]);
    for b in &a.gap_histogram {
        hist.push(vec![Cell::Value(b.threshold), b.count.into()]);
    }
    let mut tv = Table::new("Top violations", &["S", "T", "component", "gain_S", "gain_T", "gap", "sign_flip"]);
    for t in &top.triples {
        tv.push(vec![
            u.explicit_label(t.sub).into(),
            u.explicit_label(t.sup).into(),
            u.name(t.component).into(),
            Cell::Value(t.gain_sub),
            Cell::Value(t.gain_sup),
            Cell::Value(t.gap),
            t.sign_flip.into(),
        ]);
    }
    let mut doc = Document::new("audit", "Submodularity audit")
        .field("triples", a.n_triples)
        .field("violations", a.n_violations)
        .field("violation_rate", Cell::Value(a.violation_rate()))
        .field("strict_diminishing", a.n_antiviolations)
        .field("sign_flips", a.n_sign_flips)
        .field("gamma_variant", a.gamma.variant)
        .field("gamma_count", a.gamma.values.len())
        .field("gamma_median", a.gamma.median.map(Cell::Value))
        .field("top_n", top.triples.len())
        .field("top_sign_flips", top.n_sign_flips)
        .field("top_min_gap", top.min_gap().map(Cell::Value));
    if let (Some(d), Some(f)) = (top.designated, top.designated_context_fraction) {
        doc = doc.field("designated", u.name(d)).field("designated_context_fraction", Cell::Value(f));
    }
    doc.table(hist).table(tv).note(format!(
        "gap = Δ(i|T) − Δ(i|S); gaps within the tie tolerance count as 0; γ = Δ(i|S)/Δ(i|T) over {} triples",
        a.gamma.variant
    ))
}

pub fn violation_rate_document(v: &ViolationRate) -> Document {
    bootstrap_fields(Document::new("violation-rate", "Violation rate, cluster bootstrap"), &v.ci)
        .field("triples", v.n_triples as usize)
}

fn fit_rows(t: &mut Table, label: &str, f: &RegressionFit) {
    let c = f.criteria;
    t.push(vec![
        label.into(),
        f.p.into(),
        Cell::Value(f.r2),
        f.adj_r2.map(Cell::Value).into(),
        f.loocv_r2.map(Cell::Value).into(),
        c.map(|c| Cell::Value(c.aic)).into(),
        c.map(|c| Cell::Value(c.bic)).into(),
    ]);
}

const FIT_COLUMNS: [&str; 7] = ["model", "params", "r2", "adj_r2", "loocv_r2", "aic", "bic"];

pub fn fit_document(f: &RegressionFit) -> Document {
    let label = format!("{}/{}", f.spec.encoding, f.spec.order);
    let mut summary = Table::new("Fit", &FIT_COLUMNS);
    fit_rows(&mut summary, &label, f);
    let mut coef = Table::new("Coefficients", &["term", "estimate"]);
    for t in &f.terms {
        coef.push(vec![t.name.clone().into(), Cell::Value(t.value)]);
    }
    Document::new("fit", format!("OLS fit ({label})"))
        .field("n", f.n)
        .field("rss", Cell::Value(f.rss))
        .table(summary)
        .table(coef)
        .note("AIC = n ln(RSS/n) + n(1 + ln 2π) + 2q, BIC uses q ln n; q counts coefficients and σ²")
}

pub fn comparison_document(m: &ModelComparison) -> Document {
    let mut summary = Table::new("Models", &FIT_COLUMNS);
    fit_rows(&mut summary, &format!("{}/{}", m.main.spec.encoding, m.main.spec.order), &m.main);
    fit_rows(&mut summary, &format!("{}/{}", m.pairwise.spec.encoding, m.pairwise.spec.order), &m.pairwise);
    let u = &m.pairwise.universe;
    let mut j = Table::new("Couplings (presence scale)", &["pair", "J"]);
    let factor = if m.pairwise.spec.encoding == crate::regress::Encoding::Spin { 4.0 } else { 1.0 };
    for (a, b, v) in m.pairwise.couplings() {
        j.push(vec![format!("{}:{}", u.name(a), u.name(b)).into(), Cell::Value(v * factor)]);
    }
    let mut eig = Table::new("Coupling eigenvalues", &["index", "eigenvalue"]);
    for (i, l) in m.coupling_spectrum.eigenvalues.iter().enumerate() {
        eig.push(vec![i.into(), Cell::Value(*l)]);
    }
    let d = m.deltas();
    Document::new("icompare", "Main effects vs pairwise interactions")
        .field("delta_aic", d.map(|d| Cell::Value(d.delta_aic)))
        .field("delta_bic", d.map(|d| Cell::Value(d.delta_bic)))
        .field("eigen_negative", m.coupling_spectrum.n_negative)
        .field("eigen_positive", m.coupling_spectrum.n_positive)
        .table(summary)
        .table(j)
        .table(eig)
        .note("deltas are pairwise minus main; positive favours main effects")
}

pub fn test_document(r: &TestResult) -> Document {
    let mut doc = Document::new("test", format!("{} test", r.test))
        .field("test", r.test.clone())
        .field("n", r.n)
        .field("statistic", Cell::Value(r.statistic))
        .field("df", r.df.map(Cell::Value))
        .field("p_one_sided", Cell::P(r.p_one_sided))
        .field("p_two_sided", Cell::P(r.p_two_sided))
        .field("effect_size", r.effect_size.map(Cell::Value))
        .field("bf10", r.bf10.map(Cell::Value));
    if r.approximate {
        doc = doc.note("normal approximation; exact enumeration not used");
    }
    doc
}

pub fn bf_document(t: f64, n: usize, r: f64, bf10: f64) -> Document {
    Document::new("bf", "JZS Bayes factor")
        .field("t", Cell::Value(t))
        .field("n", n)
        .field("cauchy_scale", Cell::Value(r))
        .field("bf10", Cell::Value(bf10))
        .field("bf01", Cell::Value(1.0 / bf10))
}

pub fn correction_document(c: &Correction, raw: &[f64]) -> Document {
    let mut t = Table::new("Hypotheses", &["index", "p", "adjusted", "reject"]);
    for (i, (p, (a, r))) in raw.iter().zip(c.adjusted.iter().zip(&c.reject)).enumerate() {
        t.push(vec![(i + 1).into(), Cell::P(*p), Cell::P(*a), (*r).into()]);
    }
    Document::new("correction", format!("{} correction", c.procedure))
        .field("procedure", c.procedure.clone())
        .field("alpha", Cell::Value(c.alpha))
        .field("rejected", c.n_rejected())
        .field("hypotheses", raw.len())
        .table(t)
}

fn bootstrap_fields(doc: Document, ci: &BootstrapCI) -> Document {
    let mut doc = doc
        .field("method", ci.label())
        .field("level", Cell::Value(ci.level))
        .field("estimate", Cell::Value(ci.estimate))
        .field("lo", Cell::Value(ci.lo))
        .field("hi", Cell::Value(ci.hi))
        .field("resamples", ci.resamples)
        .field("seed", ci.seed.to_string())
        .field("p_one_sided", ci.p_one_sided.map(Cell::P));
    for w in &ci.warnings {
        doc = doc.note(format!("warning: {w}"));
    }
    doc
}

pub fn bootstrap_document(title: &str, ci: &BootstrapCI) -> Document {
    bootstrap_fields(Document::new("bootstrap", title), ci)
}

fn best_table(b: &BestPerK) -> Table {
    let u = &b.universe;
    let mut t = Table::new("Best per size", &["K", "coalition", "value", "k_star"]);
    for o in &b.per_k {
        t.push(vec![o.size.into(), u.label(o.mask).into(), Cell::Value(o.value), (o.size == b.k_star).into()]);
    }
    t
}

pub fn best_document(b: &BestPerK) -> Document {
    let best = b.best();
    Document::new("select-best", "Per-size optima")
        .field("k_star", b.k_star)
        .field("best", b.universe.label(best.mask))
        .field("best_value", Cell::Value(best.value))
        .field("tie_rule", crate::select::TIE_RULE)
        .table(best_table(b))
}

fn greedy_table(g: &GreedyPath) -> Table {
    let u = &g.universe;
    let mut t = Table::new("Greedy path", &["step", "from", "from_value", "best_candidate", "marginal", "added"]);
    for (n, s) in g.steps.iter().enumerate() {
        let top = s.candidates.iter().copied().reduce(|a, b| if b.1 > a.1 { b } else { a });
        t.push(vec![
            (n + 1).into(),
            u.label(s.from_mask).into(),
            Cell::Value(s.from_value),
            top.map(|(i, _)| Cell::from(u.name(i))).unwrap_or(Cell::Empty),
            top.map(|(_, m)| Cell::Value(m)).unwrap_or(Cell::Empty),
            s.chosen.is_some().into(),
        ]);
    }
    t
}

pub fn greedy_document(g: &GreedyPath) -> Document {
    Document::new("select-greedy", "Greedy forward selection")
        .field("start", g.universe.label(g.start))
        .field("final", g.universe.label(g.final_mask))
        .field("final_value", Cell::Value(g.final_value))
        .table(greedy_table(g))
}

pub fn selection_document(r: &SelectionReport) -> Document {
    let u = &r.best.universe;
    let mut s = Table::new("Strategies", &["strategy", "coalition", "value", "evaluations"]);
    for o in &r.strategies {
        s.push(vec![o.strategy.into(), u.label(o.mask).into(), Cell::Value(o.value), o.evaluations.into()]);
    }
    Document::new("select-compare", "Selection strategies compared")
        .field("k_star", r.best.k_star)
        .field("best", u.label(r.best.best().mask))
        .field("best_value", Cell::Value(r.best.best().value))
        .field("greedy", u.label(r.greedy.final_mask))
        .field("greedy_value", Cell::Value(r.greedy.final_value))
        .field("optimality_gap", Cell::Value(r.optimality_gap))
        .field("improvement_pct", r.improvement_pct.map(Cell::Value))
        .field("tie_rule", r.tie_rule)
        .table(s)
        .table(best_table(&r.best))
        .table(greedy_table(&r.greedy))
}

pub fn manifest_document(m: &Manifest) -> Document {
    let mut t = Table::new("Configurations", &["id", "coalition", "ordering"]);
    for c in &m.configurations {
        t.push(vec![c.id.clone().into(), c.label.clone().into(), c.ordering.join(" > ").into()]);
    }
    Document::new("manifest", "Evaluation manifest")
        .field("mode", m.mode.clone())
        .field("orderings", m.orderings)
        .field("rows", m.configurations.len())
        .table(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures;
    use crate::lattice::{shapley, Universe};
    use crate::report::{render_report, Format};
    use std::sync::Arc;

    #[test]
    fn shapley_markdown_lists_components() {
        let md = render_report(&shapley_document(&shapley(&fixtures::hotpotqa_8b()).unwrap()), Format::Markdown);
        assert!(md.contains("| component | phi | abs_share |"));
        assert!(md.contains("| T | 0.17"));
    }

    #[test]
    fn empty_audit_renders() {
        let t = CoalitionTable::from_values(Arc::new(Universe::new(["A"]).unwrap()), vec![0.0, 1.0]).unwrap();
        let a = crate::submod::audit(&t, &[0.05]).unwrap();
        let top = crate::submod::top_violations(&a, 20, None);
        for f in [Format::Text, Format::Json, Format::Markdown] {
            let s = render_report(&audit_document(&a, &top), f);
            assert!(s.contains("triples"), "{f}");
        }
        let v: serde_json::Value =
            serde_json::from_str(&render_report(&audit_document(&a, &top), Format::Json)).unwrap();
        assert_eq!(v["fields"]["triples"], 0);
        assert_eq!(v["fields"]["violations"], 0);
    }
}
