use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coalition_core::io::{self, fixtures, ManifestMode};
use coalition_core::lattice::{
    mobius_transform, parse_component_set, shapley_methods, shapley_with, CoalitionTable, Universe,
};
use coalition_core::regress::{build_design, compare_models, fit_ols, DesignSpec, Encoding, Order};
use coalition_core::report::{self, render_report, Document, Format};
use coalition_core::select::{best_per_k, compare_strategies, greedy_forward};
use coalition_core::stats::{
    self, bh, bootstrap_ci, cluster_bootstrap_ci, harsanyi_bootstrap, holm, interval_methods, jzs_bf10, mcnemar_exact,
    paired_t, wilcoxon_exact, BootstrapConfig, PairedSample, Sidedness,
};
use coalition_core::submod::{audit_with, cluster_bootstrap_violation_rate, gamma_variants, top_violations};
use coalition_core::{ComponentSet, Error, ErrorClass, TaskMatrix};

/// Sets the default worker count; `--threads` overrides it.
const THREADS_ENV: &str = "COALITION_THREADS";

#[derive(Parser)]
#[command(name = "coalition", version, about = "Attribution and interaction analysis over coalition tables")]
struct Cli {
    /// Seed for every resampling and shuffling step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Bootstrap resamples.
    #[arg(long, global = true, default_value_t = 2000)]
    resamples: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the report here (atomically) instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to $COALITION_THREADS, then to the core count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Markdown,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
            OutputFormat::Markdown => Format::Markdown,
        }
    }
}

#[derive(Args)]
struct TableInput {
    /// Coalition CSV path, or `fixture:hotpotqa_8b` / `fixture:hotpotqa_70b`.
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Shapley values.
    Shapley {
        #[command(flatten)]
        table: TableInput,
        #[arg(long, default_value = "dividend")]
        method: String,
    },
    /// Harsanyi dividends (Möbius transform).
    Mobius {
        #[command(flatten)]
        table: TableInput,
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Marginal gains of components across contexts.
    Marginals {
        #[command(flatten)]
        table: TableInput,
        /// Restrict to these components (repeatable).
        #[arg(long = "component")]
        components: Vec<String>,
    },
    /// Submodularity audit over all (S, T, i) triples.
    Audit {
        #[command(flatten)]
        table: TableInput,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.10")]
        thresholds: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Component whose presence in top-violation contexts is reported.
        #[arg(long)]
        designated: Option<String>,
        #[arg(long, default_value = "both-positive")]
        gamma: String,
        /// Also write every triple to this CSV.
        #[arg(long)]
        triples_csv: Option<PathBuf>,
        /// Task matrix CSV for a cluster-bootstrap violation rate.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// OLS fit of one factorial model.
    Fit {
        #[command(flatten)]
        table: TableInput,
        #[arg(long, default_value = "binary")]
        encoding: String,
        #[arg(long, default_value = "main")]
        order: String,
    },
    /// Main-effects versus pairwise-interaction comparison.
    Icompare {
        #[command(flatten)]
        table: TableInput,
    },
    /// Paired statistics, corrections and bootstrap intervals.
    Stats {
        #[command(subcommand)]
        test: StatsCommand,
    },
    /// Subset selection.
    Select {
        #[command(subcommand)]
        strategy: SelectCommand,
    },
    /// Evaluation manifest (JSON) for a factorial or listed design.
    GenManifest {
        /// Component names in universe order.
        #[arg(long, value_delimiter = ',', default_value = "P,T,M,SR,R")]
        components: Vec<String>,
        /// Listed configurations separated by ';' (e.g. "T;T+R"); full factorial when absent.
        #[arg(long)]
        listed: Option<String>,
        #[arg(long, default_value_t = 1)]
        orderings: usize,
    },
    /// Re-render a JSON report in another format.
    Report {
        input: PathBuf,
    },
}

#[derive(Args)]
struct PairedInput {
    /// CSV with `unit,a,b` (or `a,b`) columns.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pairs: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', requires = "b")]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',', requires = "a")]
    b: Vec<f64>,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Paired t-test with Cohen's d_z and the JZS Bayes factor.
    T {
        #[command(flatten)]
        input: PairedInput,
        #[arg(long, default_value_t = stats::DEFAULT_CAUCHY_SCALE)]
        scale: f64,
    },
    /// Exact Wilcoxon signed-rank test.
    Wilcoxon {
        #[command(flatten)]
        input: PairedInput,
        #[arg(long)]
        two_sided: bool,
    },
    /// Exact McNemar test from discordant counts.
    Mcnemar {
        #[arg(long = "b")]
        b: u64,
        #[arg(long = "c")]
        c: u64,
    },
    /// JZS Bayes factor from a t statistic.
    Bf {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = stats::DEFAULT_CAUCHY_SCALE)]
        scale: f64,
    },
    /// Holm step-down correction.
    Holm {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Benjamini–Hochberg step-up correction.
    Bh {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Bootstrap interval for a sample statistic, a matrix column mean or a dividend.
    Boot {
        /// Scalar sample.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        data: Vec<f64>,
        /// Task matrix CSV (cluster bootstrap over tasks).
        #[arg(long, conflicts_with = "data")]
        matrix: Option<PathBuf>,
        /// Components of the matrix universe.
        #[arg(long, value_delimiter = ',', default_value = "P,T,M,SR,R")]
        components: Vec<String>,
        /// Harsanyi dividend of this coalition (with --matrix).
        #[arg(long, requires = "matrix", conflicts_with = "column")]
        dividend: Option<String>,
        /// Mean of this coalition column (with --matrix).
        #[arg(long, requires = "matrix")]
        column: Option<String>,
        #[arg(long, default_value = "percentile")]
        method: String,
        #[arg(long, value_enum, default_value_t = Statistic::Mean)]
        statistic: Statistic,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Statistic {
    Mean,
    Median,
}

#[derive(Subcommand)]
enum SelectCommand {
    /// Best coalition of every size and k*.
    Best {
        #[command(flatten)]
        table: TableInput,
    },
    /// Greedy forward selection.
    Greedy {
        #[command(flatten)]
        table: TableInput,
        /// Starting coalition.
        #[arg(long, default_value = "Bare")]
        start: String,
    },
    /// Exhaustive versus greedy.
    Compare {
        #[command(flatten)]
        table: TableInput,
    },
}

struct Failure {
    class: ErrorClass,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { class: e.class(), message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { class: ErrorClass::Input, message: message.into() }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn load_table(spec: &str) -> Outcome<CoalitionTable> {
    match spec.strip_prefix("fixture:") {
        Some(name) => {
            let text = fixtures::source(name).ok_or_else(|| {
                input_error(format!("unknown fixture `{name}` (available: {})", fixtures::NAMES.join(", ")))
            })?;
            Ok(io::parse_coalition_csv(text)?)
        }
        None => Ok(io::load_coalition_csv(spec)?),
    }
}

fn load_paired(input: &PairedInput) -> Outcome<PairedSample> {
    match &input.pairs {
        Some(p) => Ok(io::parse_paired_csv(&std::fs::read_to_string(p).map_err(Error::from)?)?),
        None if !input.a.is_empty() => Ok(PairedSample::new(Vec::new(), input.a.clone(), input.b.clone())?),
        None => Err(input_error("give --pairs FILE or both --a and --b")),
    }
}

fn universe_of(names: &[String]) -> Outcome<Arc<Universe>> {
    Ok(Arc::new(Universe::new(names.iter().map(|s| s.trim()))?))
}

enum Output {
    Report(Document),
    /// Already serialized (manifest JSON).
    Raw(String),
}

fn run(cli: &Cli) -> Outcome<Output> {
    let cfg = |level: f64| BootstrapConfig { resamples: cli.resamples, level, seed: cli.seed };
    Ok(Output::Report(match &cli.command {
        Command::Shapley { table, method } => {
            let t = load_table(&table.input)?;
            let methods = shapley_methods();
            report::shapley_document(&shapley_with(&t, methods.get(method)?)?)
        }
        Command::Mobius { table, max_order } => {
            report::mobius_document(&mobius_transform(&load_table(&table.input)?)?, *max_order)
        }
        Command::Marginals { table, components } => {
            let t = load_table(&table.input)?;
            let idx = components.iter().map(|c| t.universe().index_of(c)).collect::<Result<Vec<_>, _>>()?;
            report::marginals_document(&t, &idx)?
        }
        Command::Audit { table, thresholds, top, designated, gamma, triples_csv, matrix } => {
            let t = load_table(&table.input)?;
            let variants = gamma_variants();
            let a = audit_with(&t, thresholds, variants.get(gamma)?)?;
            let designated = designated.as_deref().map(|d| t.universe().index_of(d)).transpose()?;
            let tv = top_violations(&a, *top, designated);
            if let Some(path) = triples_csv {
                io::write_atomic(path, io::render_audit_csv(&a).as_bytes())?;
            }
            let mut doc = report::audit_document(&a, &tv);
            if let Some(path) = matrix {
                let m = io::load_task_matrix_csv(path, t.universe())?;
                let rate = cluster_bootstrap_violation_rate(&m, &cfg(0.95))?;
                doc = doc
                    .field("bootstrap_rate_lo", report::Cell::Value(rate.ci.lo))
                    .field("bootstrap_rate_hi", report::Cell::Value(rate.ci.hi))
                    .field("bootstrap_resamples", rate.ci.resamples);
            }
            doc
        }
        Command::Fit { table, encoding, order } => {
            let spec = DesignSpec::new(encoding.parse::<Encoding>()?, order.parse::<Order>()?);
            report::fit_document(&fit_ols(&build_design(&load_table(&table.input)?, spec)?)?)
        }
        Command::Icompare { table } => report::comparison_document(&compare_models(
            &load_table(&table.input)?,
            DesignSpec::main_effects(),
            DesignSpec::pairwise(),
        )?),
        Command::Stats { test } => run_stats(test, &cfg)?,
        Command::Select { strategy } => match strategy {
            SelectCommand::Best { table } => report::best_document(&best_per_k(&load_table(&table.input)?)?),
            SelectCommand::Greedy { table, start } => {
                let t = load_table(&table.input)?;
                let s = parse_component_set(start, t.universe())?;
                report::greedy_document(&greedy_forward(&t, &s)?)
            }
            SelectCommand::Compare { table } => {
                report::selection_document(&compare_strategies(&load_table(&table.input)?)?)
            }
        },
        Command::GenManifest { components, listed, orderings } => {
            let u = universe_of(components)?;
            let mode = match listed {
                None => ManifestMode::FullFactorial,
                Some(list) => ManifestMode::Listed(
                    list.split(';')
                        .map(|e| parse_component_set(e, &u))
                        .collect::<Result<Vec<ComponentSet>, _>>()?,
                ),
            };
            let m = io::gen_manifest(&u, &mode, *orderings, cli.seed)?;
            if matches!(cli.format, OutputFormat::Json) {
                return Ok(Output::Raw(io::manifest_to_json(&m)));
            }
            report::manifest_document(&m)
        }
        Command::Report { input } => {
            let text = std::fs::read_to_string(input).map_err(Error::from)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", input.display())))?;
            Document::from_json(&value)?
        }
    }))
}

fn run_stats(test: &StatsCommand, cfg: &dyn Fn(f64) -> BootstrapConfig) -> Outcome<Document> {
    Ok(match test {
        StatsCommand::T { input, scale } => {
            let s = load_paired(input)?;
            let mut r = paired_t(&s)?;
            r.bf10 = Some(jzs_bf10(r.statistic, r.n, *scale)?);
            report::test_document(&r)
        }
        StatsCommand::Wilcoxon { input, two_sided } => {
            let side = if *two_sided { Sidedness::TwoSided } else { Sidedness::OneSided };
            report::test_document(&wilcoxon_exact(&load_paired(input)?, side)?)
        }
        StatsCommand::Mcnemar { b, c } => report::test_document(&mcnemar_exact(*b, *c)?),
        StatsCommand::Bf { t, n, scale } => report::bf_document(*t, *n, *scale, jzs_bf10(*t, *n, *scale)?),
        StatsCommand::Holm { p, alpha } => report::correction_document(&holm(p, *alpha)?, p),
        StatsCommand::Bh { p, alpha } => report::correction_document(&bh(p, *alpha)?, p),
        StatsCommand::Boot { data, matrix, components, dividend, column, method, statistic, level } => {
            let methods = interval_methods();
            let method = methods.get(method)?;
            let cfg = cfg(*level);
            let stat = match statistic {
                Statistic::Mean => stats::mean,
                Statistic::Median => stats::median,
            };
            match matrix {
                None => {
                    if data.is_empty() {
                        return Err(input_error("give --data or --matrix"));
                    }
                    report::bootstrap_document("Bootstrap interval", &bootstrap_ci(data, stat, method, &cfg)?)
                }
                Some(path) => {
                    let m: TaskMatrix = io::load_task_matrix_csv(path, &universe_of(components)?)?;
                    if let Some(expr) = dividend {
                        let set = parse_component_set(expr, m.universe())?;
                        let ci = harsanyi_bootstrap(&m, &set, method, &cfg)?;
                        report::bootstrap_document(&format!("Dividend of {}", set.label()), &ci)
                    } else {
                        let label = column.as_deref().ok_or_else(|| input_error("give --dividend or --column"))?;
                        let mask = m.universe().parse_mask(label)?;
                        let col = m
                            .column_index(mask)
                            .ok_or_else(|| Error::IncompleteMatrix(m.universe().label(mask)))?;
                        let ci = cluster_bootstrap_ci(&m, |means: &[f64]| means[col], method, &cfg)?;
                        report::bootstrap_document(&format!("Mean of {}", m.universe().label(mask)), &ci)
                    }
                }
            }
        }
    })
}

fn emit(cli: &Cli, text: &str) -> Outcome<()> {
    match &cli.out {
        Some(path) => Ok(io::write_atomic(path, text.as_bytes())?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn configure_threads(cli: &Cli) -> Outcome<()> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| input_error(format!("{THREADS_ENV}=`{v}` is not a count")))?),
        Err(_) => None,
    };
    if let Some(n) = cli.threads.or(from_env).filter(|n| *n > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| input_error(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(&cli).and_then(|_| run(&cli)).and_then(|out| match out {
        Output::Report(doc) => emit(&cli, &render_report(&doc, cli.format.into())),
        Output::Raw(text) => emit(&cli, &text),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, class) = match f.class {
                ErrorClass::Input => (2, "input"),
                ErrorClass::Numerical => (3, "numerical"),
            };
            if matches!(cli.format, OutputFormat::Json) {
                eprintln!("{}", serde_json::json!({ "error": { "class": class, "message": f.message, "exit_code": code } }));
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(code)
        }
    }
}
