//! Command-line interface.
//!
//! Exit codes: 0 success (or "identifiable" / "valid ordering"), 1 a negative answer
//! (not identifiable, no or invalid ordering), 2 usage, parse or IO errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};
use mdimp_core::experiment::method_seed;
use mdimp_core::experiment::{resolve_factorization, ExperimentError, Factorization};
use mdimp_core::graph::MissingDataGraph;
use mdimp_core::identify::{
    find_decomposable_ordering, full_law_identifiable, verify_ordering, Ordering, SearchLimits,
    DEFAULT_MAX_VARIABLES, DEFAULT_WARN_VARIABLES,
};
use mdimp_core::impute::{
    impute_chained, impute_decomposable, impute_miri, plug_in_target_law, CompletedDataset,
    PredictorMatrix,
};
use mdimp_core::presets::example_spec;
use mdimp_core::simulate::simulate_dataset;
use mdimp_core::{target_law_factorization, Method, Seed};

use crate::config::{parse_methods, ExperimentConfig, ModelSource, DEFAULT_N, DEFAULT_SEED};
use crate::graph_doc::{read_graph, render_graph};
use crate::io::{
    columns_csv, provenance_toml, read_dataset, table_csv, table_markdown, write_atomic,
    write_dataset,
};
use crate::model_doc::render_model;
use crate::run::{run_experiment, RunError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mdimp",
    version,
    about = "Identifiability checks and imputation for missing-data DAGs"
)]
pub struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the full law of a graph is identifiable.
    Check(GraphSource),
    /// Find (or verify) an ordering that licenses decomposable imputation.
    Order(OrderArgs),
    /// Simulate a dataset with missing values from a model.
    Simulate(SimulateArgs),
    /// Impute a dataset CSV with one method.
    Impute(ImputeArgs),
    /// Simulate, run the requested methods and write the bias table.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Graph document.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Built-in example 1 to 4 (its graph).
    #[arg(long)]
    example: Option<u32>,
}

impl GraphSource {
    fn load(&self) -> Result<MissingDataGraph> {
        match (&self.graph, self.example) {
            (Some(p), _) => Ok(read_graph(p)?),
            (None, Some(id)) => Ok(example_spec(id)?.graph),
            (None, None) => bail!("give --graph or --example"),
        }
    }
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Largest number of substantive variables the ordering search accepts.
    #[arg(long, env = "MDIMP_MAX_ORDER_VARS", default_value_t = DEFAULT_MAX_VARIABLES)]
    max_order_vars: usize,
}

impl SearchArgs {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            warn_above: DEFAULT_WARN_VARIABLES.min(self.max_order_vars),
            max_variables: self.max_order_vars,
        }
    }
}

#[derive(Args, Debug)]
struct OrderArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Ordering to verify instead of searching, e.g. `X,Y`.
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<String>>,
    /// Drop conditioning variables the target is independent of.
    #[arg(long)]
    prune: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Built-in example 1 to 4.
    #[arg(long, conflicts_with_all = ["graph", "sem", "response"])]
    example: Option<u32>,
    /// Graph document (with --sem and --response).
    #[arg(long, requires_all = ["sem", "response"])]
    graph: Option<PathBuf>,
    /// TOML file with `[equations.*]`.
    #[arg(long, requires = "graph")]
    sem: Option<PathBuf>,
    /// TOML file with `[responses.*]`.
    #[arg(long, requires = "graph")]
    response: Option<PathBuf>,
}

impl ModelArgs {
    fn source(&self) -> Option<ModelSource> {
        if let Some(id) = self.example {
            return Some(ModelSource::Example(id));
        }
        match (&self.graph, &self.sem, &self.response) {
            (Some(g), Some(s), Some(r)) => Some(ModelSource::Files {
                graph: g.clone(),
                sem: s.clone(),
                response: r.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of rows.
    #[arg(long, default_value_t = DEFAULT_N)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory for data.csv, truth.csv, model.graph, model.toml, provenance.toml.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ImputeArgs {
    /// Dataset CSV as written by `simulate`.
    #[arg(long)]
    data: PathBuf,
    /// Graph document; needed by `decomp` and `plugin`.
    #[arg(long, conflicts_with = "example")]
    graph: Option<PathBuf>,
    /// Use the graph of a built-in example.
    #[arg(long)]
    example: Option<u32>,
    /// One of mi, miri, decomp, plugin.
    #[arg(long)]
    method: String,
    /// Number of imputations.
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Chained-equation sweeps.
    #[arg(long, default_value_t = 5)]
    iters: usize,
    /// Plug-in sample size (default: rows in the data).
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<String>>,
    #[arg(long)]
    prune: bool,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment TOML; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated method ids: mi, miri, cca, aca, plugin, decomp.
    #[arg(long, alias = "method", value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    ordering: Option<Vec<String>>,
    #[arg(long)]
    prune: bool,
    /// Output directory for table.csv, table.md and provenance.toml.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Methods run concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    search: SearchArgs,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    let negative = |x: &ExperimentError| {
        matches!(
            x,
            ExperimentError::NoOrdering { .. } | ExperimentError::InvalidOrdering { .. }
        )
    };
    let hit = e.chain().any(|cause| {
        cause
            .downcast_ref::<ExperimentError>()
            .is_some_and(negative)
            || match cause.downcast_ref::<RunError>() {
                Some(RunError::Experiment(x)) | Some(RunError::Method { source: x, .. }) => {
                    negative(x)
                }
                _ => false,
            }
    });
    if hit {
        EXIT_NEGATIVE
    } else {
        EXIT_ERROR
    }
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Check(src) => cmd_check(&src),
        Command::Order(args) => cmd_order(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Impute(args) => cmd_impute(&args),
        Command::Experiment(args) => cmd_experiment(&args),
    }
}

fn cmd_check(src: &GraphSource) -> Result<i32> {
    let g = src.load()?;
    println!("graph: {} nodes, {} edges", g.len(), g.edge_count());
    let decision = full_law_identifiable(&g);
    if decision.identifiable() {
        println!("full law: identifiable");
        Ok(EXIT_OK)
    } else {
        println!("full law: not identifiable");
        for w in decision.witnesses() {
            println!("  {w}");
        }
        Ok(EXIT_NEGATIVE)
    }
}

fn print_factorization(f: &Factorization) {
    println!("ordering: {}", f.certificate.ordering());
    for c in f.certificate.checks() {
        println!("  {c}");
    }
    println!("target law factorization:");
    for t in &f.terms {
        println!("  {t}");
    }
}

fn cmd_order(args: &OrderArgs) -> Result<i32> {
    let g = args.source.load()?;
    let cert = match &args.ordering {
        Some(names) => verify_ordering(&g, &Ordering::new(&g, names)?),
        None => match find_decomposable_ordering(&g, args.search.limits())? {
            Some(cert) => cert,
            None => {
                println!("no decomposable ordering");
                let d = full_law_identifiable(&g);
                if d.identifiable() {
                    println!("full law: identifiable");
                } else {
                    println!("full law: not identifiable");
                    for w in d.witnesses() {
                        println!("  {w}");
                    }
                }
                return Ok(EXIT_NEGATIVE);
            }
        },
    };
    if !cert.is_valid() {
        println!("ordering: {} (invalid)", cert.ordering());
        for c in cert.checks() {
            println!("  {c}");
        }
        return Ok(EXIT_NEGATIVE);
    }
    let terms = target_law_factorization(&g, &cert, args.prune)?;
    print_factorization(&Factorization {
        certificate: cert,
        terms,
    });
    Ok(EXIT_OK)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let source = args
        .model
        .source()
        .context("give --example or --graph with --sem and --response")?;
    let spec = source.load()?;
    let seed = Seed(args.seed);
    let sim = simulate_dataset(&spec.graph, &spec.sem, &spec.response, args.n, seed)?;
    let out = &args.out;
    write_dataset(&out.join("data.csv"), &sim.dataset)?;
    write_atomic(
        &out.join("truth.csv"),
        &columns_csv(&sim.truth.names, &sim.truth.columns),
    )?;
    write_atomic(
        &out.join("model.graph"),
        render_graph(&spec.graph).as_bytes(),
    )?;
    write_atomic(
        &out.join("model.toml"),
        render_model(&spec.sem, &spec.response).as_bytes(),
    )?;
    let example = matches!(source, ModelSource::Example(_)).then_some(spec.id);
    write_atomic(
        &out.join("provenance.toml"),
        provenance_toml(&sim.dataset.provenance, example, args.n).as_bytes(),
    )?;
    println!(
        "wrote {} rows ({} missing cells) to {}",
        sim.dataset.n_rows(),
        sim.dataset.n_missing(),
        out.display()
    );
    Ok(EXIT_OK)
}

fn write_completed(out: &Path, sets: &[CompletedDataset]) -> Result<()> {
    for s in sets {
        let path = out.join(format!("completed_m{}.csv", s.index));
        write_atomic(&path, &columns_csv(&s.names, &s.columns))?;
    }
    Ok(())
}

fn cmd_impute(args: &ImputeArgs) -> Result<i32> {
    let method = Method::from_id(args.method.trim())
        .with_context(|| format!("unknown method `{}`", args.method))?;
    let d = read_dataset(&args.data)?;
    let seed = method_seed(Seed(args.seed), method);
    let factorization = || -> Result<Factorization> {
        let g = match (&args.graph, args.example) {
            (Some(p), _) => read_graph(p)?,
            (None, Some(id)) => example_spec(id)?.graph,
            (None, None) => bail!("method `{}` needs --graph or --example", method.id()),
        };
        let settings = mdimp_core::experiment::Settings {
            prune: args.prune,
            limits: args.search.limits(),
            ..Default::default()
        };
        let choice = match &args.ordering {
            Some(o) => mdimp_core::experiment::OrderingChoice::Explicit(o.clone()),
            None => mdimp_core::experiment::OrderingChoice::Search,
        };
        Ok(resolve_factorization(&g, &choice, &settings)?)
    };
    match method {
        Method::Mi => {
            let pm = PredictorMatrix::standard(&d);
            write_completed(
                &args.out,
                &impute_chained(&d, &pm, args.m, args.iters, seed)?,
            )?;
        }
        Method::Miri => write_completed(&args.out, &impute_miri(&d, args.m, args.iters, seed)?)?,
        Method::DecompMi => {
            let f = factorization()?;
            print_factorization(&f);
            let sets = impute_decomposable(&d, &f.certificate, &f.terms, args.m, seed)?;
            write_completed(&args.out, &sets)?;
        }
        Method::PlugIn => {
            let f = factorization()?;
            print_factorization(&f);
            let draws = args.draws.unwrap_or(d.n_rows());
            let sample = plug_in_target_law(&d, &f.terms, draws, seed)?;
            write_atomic(
                &args.out.join("plugin_sample.csv"),
                &columns_csv(&sample.names, &sample.columns),
            )?;
        }
        Method::Cca | Method::Aca => {
            bail!("`{}` does not impute; use `experiment`", method.id())
        }
    }
    println!("wrote {} output to {}", method.label(), args.out.display());
    Ok(EXIT_OK)
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<i32> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::read(p)?,
        None => {
            let mut c = ExperimentConfig::for_example(1);
            c.model = args
                .model
                .source()
                .context("give --config, --example, or --graph with --sem and --response")?;
            c
        }
    };
    if let Some(src) = args.model.source() {
        cfg.model = src;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(ms) = &args.methods {
        cfg.methods = parse_methods(ms)?;
    }
    if let Some(m) = args.m {
        cfg.m = m;
    }
    if let Some(i) = args.iters {
        cfg.iters = i;
    }
    if args.draws.is_some() {
        cfg.draws = args.draws;
    }
    if args.ordering.is_some() {
        cfg.ordering = args.ordering.clone();
    }
    cfg.prune |= args.prune;
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }

    let result = run_experiment(&cfg, args.search.limits())?;
    if let Some(f) = &result.factorization {
        print_factorization(f);
        println!();
    }
    let md = table_markdown(&result.table);
    print!("{md}");
    if let Some(out) = &cfg.out {
        write_atomic(&out.join("table.csv"), &table_csv(&result.table))?;
        write_atomic(&out.join("table.md"), md.as_bytes())?;
        let example = matches!(cfg.model, ModelSource::Example(_)).then_some(result.spec.id);
        write_atomic(
            &out.join("provenance.toml"),
            provenance_toml(&result.dataset.provenance, example, cfg.n).as_bytes(),
        )?;
    }
    Ok(EXIT_OK)
}
