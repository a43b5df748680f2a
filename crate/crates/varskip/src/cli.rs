//! Command-line front end: `synth`, `ingest`, `train`, `estimate`, `bench`,
//! `text-train` and `text-bench`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use varskip_core::armodel::{train, ArModel, EpochLog, MaskMode, ModelConfig, Ordering, Prepared, TrainConfig};
use varskip_core::bench::{
    exact_selectivity, gen_workload, run_bench, BenchReport, Estimator, ModelSet, Op, WorkloadSpec,
};
use varskip_core::data::{synth_table, synth_urls, SynthSpec, Table};
use varskip_core::inference::{
    ensemble_estimate, format_query, naive_sample_query, parse_query, progressive_sample, Estimate, RangeQuery,
};
use varskip_core::seed;
use varskip_core::textmatch::{contains_prob, run_text_bench, sample_patterns, Pattern};

use crate::checkpoint::{Checkpoint, ModelKind};
use crate::config::Layers;
use crate::parallel::RayonRunner;
use crate::report::{render_summary, write_bench_csv, write_json};
use crate::workload_file::{read_workload, write_workload};
use crate::{ingest, tablefile, AppError, AppResult};

#[derive(Parser, Debug)]
#[command(name = "varskip", version, about = "Range-density estimation with masked autoregressive models")]
pub struct Cli {
    /// Flat `key = value` config file; VARSKIP_* environment variables
    /// override it and flags override both.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for query evaluation (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic correlated table (or a URL-like corpus).
    Synth(SynthArgs),
    /// Encode a CSV file into a table cache.
    Ingest(IngestArgs),
    /// Train a model on a table cache.
    Train(TrainArgs),
    /// Estimate the selectivity of one query.
    Estimate(EstimateArgs),
    /// Benchmark estimators over a query workload.
    Bench(BenchArgs),
    /// Train a character model on a corpus (one string per line).
    TextTrain(TextTrainArgs),
    /// Estimate CONTAINS probabilities for one pattern or a pattern workload.
    TextBench(TextBenchArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long)]
    pub min_domain: Option<usize>,
    #[arg(long)]
    pub max_domain: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    /// Columns per latent factor chain; 1 makes every column a function of one factor.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub data_seed: Option<u64>,
    /// Write a URL-like text corpus (`rows` lines) instead of a table.
    #[arg(long)]
    pub urls: bool,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated subset of columns to keep, in order.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub d_emb: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub warmup_epochs: Option<usize>,
    /// none, random, prefix or fixed:<p>.
    #[arg(long)]
    pub mask_mode: Option<String>,
    #[arg(long)]
    pub orders: Option<usize>,
    /// Rows used for the per-epoch evaluation NLL (0 = all).
    #[arg(long)]
    pub eval_rows: Option<usize>,
    /// Parameter initialisation seed.
    #[arg(long)]
    pub model_seed: Option<u64>,
    /// Batch shuffling and masking seed.
    #[arg(long)]
    pub train_seed: Option<u64>,
    /// Seed for the random column orderings.
    #[arg(long)]
    pub order_seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-epoch log as CSV.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Conjunction such as `col3 >= 5 AND col7 == 2`.
    #[arg(long, allow_hyphen_values = true)]
    pub query: String,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Variable skipping (needs a mask-trained model).
    #[arg(long)]
    pub skip: bool,
    /// Unconstrained sampling followed by filtering.
    #[arg(long, conflicts_with = "skip")]
    pub naive: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// Plain maximum-likelihood checkpoints, one per ordering repetition.
    #[arg(long, value_delimiter = ',')]
    pub baseline: Vec<PathBuf>,
    /// Mask-trained single-order checkpoints, one per repetition.
    #[arg(long, value_delimiter = ',')]
    pub masked: Vec<PathBuf>,
    /// Mask-trained multi-order checkpoints, one per repetition.
    #[arg(long, value_delimiter = ',')]
    pub multi: Vec<PathBuf>,
    /// Read queries from a workload file instead of generating them.
    #[arg(long)]
    pub workload: Option<PathBuf>,
    /// Save the generated workload.
    #[arg(long)]
    pub save_workload: Option<PathBuf>,
    #[arg(long)]
    pub queries: Option<usize>,
    #[arg(long)]
    pub min_constraints: Option<usize>,
    #[arg(long)]
    pub max_constraints: Option<usize>,
    /// Comma-separated subset of `==,<=,>=`.
    #[arg(long)]
    pub ops: Option<String>,
    #[arg(long)]
    pub workload_seed: Option<u64>,
    /// Inference seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated sample budgets.
    #[arg(long)]
    pub budgets: Option<String>,
    /// Comma-separated estimators: baseline, skipping, multiorder,
    /// multiorder+skipping, naive (default: all the given checkpoints allow).
    #[arg(long)]
    pub estimators: Option<String>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_text: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TextTrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug)]
pub struct TextBenchArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Corpus the truths are computed on.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Estimate this single pattern and print its breakdown.
    #[arg(long, allow_hyphen_values = true)]
    pub pattern: Option<String>,
    /// Patterns file, one per line.
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    #[arg(long)]
    pub n_patterns: Option<usize>,
    #[arg(long)]
    pub min_len: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub pattern_seed: Option<u64>,
    /// Inference seed (required).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated sample budgets; a single `--pattern` uses the first.
    #[arg(long)]
    pub budgets: Option<String>,
    /// Comma-separated: skipping, naive.
    #[arg(long)]
    pub estimators: Option<String>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_text: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and maps the
/// outcome to an exit code: 0 success, 1 usage, 2 runtime failure.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> AppResult<()> {
    let mut layers = Layers::load(cli.config.as_deref())?;
    let workers = layers.opt(cli.workers, "workers")?;
    match cli.command {
        Command::Synth(a) => cmd_synth(a, &mut layers),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Train(a) => cmd_train(a, &mut layers),
        Command::Estimate(a) => cmd_estimate(a, &mut layers),
        Command::Bench(a) => cmd_bench(a, &mut layers, workers),
        Command::TextTrain(a) => cmd_text_train(a, &mut layers),
        Command::TextBench(a) => cmd_text_bench(a, &mut layers, workers),
    }
}

fn cmd_synth(a: SynthArgs, l: &mut Layers) -> AppResult<()> {
    let rows = l.get(a.rows, "rows", 100_000)?;
    let data_seed = l.get(a.data_seed, "data_seed", 0)?;
    if a.urls {
        let urls = synth_urls(rows, &mut seed::stream(data_seed, &[0x55]));
        let mut text = urls.join("\n");
        text.push('\n');
        return fs::write(&a.out, text).map_err(|e| AppError::io(&a.out, e));
    }
    let spec = SynthSpec::with_random_domains(
        l.get(a.cols, "cols", 16)?,
        l.get(a.min_domain, "min_domain", 8)?,
        l.get(a.max_domain, "max_domain", 64)?,
        rows,
        l.get(a.depth, "depth", 2)?,
        l.get(a.noise, "noise", 0.05)?,
        data_seed,
    );
    let table = synth_table(&spec)?;
    tablefile::write_table(&a.out, &table)
}

fn cmd_ingest(a: IngestArgs) -> AppResult<()> {
    let name = a.name.unwrap_or_else(|| a.csv.file_stem().and_then(|s| s.to_str()).unwrap_or("table").to_string());
    let table = ingest::read_csv(&a.csv, &name, a.columns.as_deref())?;
    tablefile::write_table(&a.out, &table)?;
    println!("{}: {} rows × {} columns", table.name(), table.n_rows(), table.n_cols());
    Ok(())
}

struct Resolved {
    model: ModelConfig,
    train: TrainConfig,
    order_seed: u64,
}

fn resolve_model(a: &ModelArgs, l: &mut Layers, mode: MaskMode, tied: bool) -> AppResult<Resolved> {
    let md = ModelConfig::default();
    let td = TrainConfig::default();
    let model_seed = l.get(a.model_seed, "model_seed", 0)?;
    let model = ModelConfig {
        blocks: l.get(a.blocks, "blocks", md.blocks)?,
        hidden: l.get(a.hidden, "hidden", md.hidden)?,
        d_emb: l.get(a.d_emb, "d_emb", md.d_emb)?,
        orders: l.get(a.orders, "orders", md.orders)?,
        tied_embeddings: tied,
        seed: model_seed,
    };
    let mask_text = l.get(a.mask_mode.clone(), "mask_mode", mode.to_string())?;
    let train = TrainConfig {
        epochs: l.get(a.epochs, "epochs", td.epochs)?,
        batch_size: l.get(a.batch_size, "batch_size", td.batch_size)?,
        lr: l.get(a.lr, "lr", td.lr)?,
        warmup_epochs: l.get(a.warmup_epochs, "warmup_epochs", td.warmup_epochs)?,
        mask_mode: MaskMode::parse(&mask_text).map_err(|e| AppError::Usage(e.to_string()))?,
        eval_rows: l.get(a.eval_rows, "eval_rows", td.eval_rows)?,
        seed: l.get(a.train_seed, "train_seed", 0)?,
    };
    model.validate().and(train.validate()).map_err(|e| AppError::Usage(e.to_string()))?;
    let order_seed = l.get(a.order_seed, "order_seed", model_seed)?;
    Ok(Resolved { model, train, order_seed })
}

fn fit(
    table: &Table,
    r: &Resolved,
    orderings: Vec<Ordering>,
    log: Option<&Path>,
) -> AppResult<(ArModel, Vec<EpochLog>)> {
    let mut model = ArModel::new(&table.vocab_sizes(), r.model.clone(), orderings)?;
    let mut out = std::io::stdout().lock();
    let logs = train(&mut model, table, &r.train, &mut |e| {
        let _ = writeln!(out, "epoch {:>3}  train {:.4} bits  eval {:.4} bits", e.epoch + 1, e.train_bits, e.eval_bits);
    })?;
    if let Some(path) = log {
        let mut w = csv::Writer::from_path(path).map_err(|e| AppError::format(path, e.to_string()))?;
        w.write_record(["epoch", "steps", "train_bits", "eval_bits", "lr"])?;
        for e in &logs {
            w.write_record([
                (e.epoch + 1).to_string(),
                e.steps.to_string(),
                e.train_bits.to_string(),
                e.eval_bits.to_string(),
                e.lr.to_string(),
            ])?;
        }
        w.flush().map_err(|e| AppError::io(path, e))?;
    }
    Ok((model, logs))
}

fn cmd_train(a: TrainArgs, l: &mut Layers) -> AppResult<()> {
    let table = tablefile::read_table(&a.table)?;
    let r = resolve_model(&a.model, l, MaskMode::Random, false)?;
    let orderings = Ordering::random_set(table.n_cols(), r.model.orders, r.order_seed);
    let (model, logs) = fit(&table, &r, orderings, a.log.as_deref())?;
    Checkpoint::new(ModelKind::Tabular, table.name(), table.columns().to_vec(), r.train, logs, model).save(&a.out)
}

fn cmd_text_train(a: TextTrainArgs, l: &mut Layers) -> AppResult<()> {
    let width = l.get(a.width, "width", 40)?;
    let text = ingest::read_corpus(&a.corpus, width)?;
    let r = resolve_model(&a.model, l, MaskMode::Prefix, true)?;
    if r.model.orders != 1 {
        return Err(AppError::Usage("text models use a single left-to-right ordering".into()));
    }
    let (model, logs) = fit(text.table(), &r, vec![Ordering::identity(width)], a.log.as_deref())?;
    let table = text.table();
    Checkpoint::new(ModelKind::Text { width }, table.name(), table.columns().to_vec(), r.train, logs, model)
        .save(&a.out)
}

#[derive(Debug, Serialize)]
struct EstimateOutput<'a> {
    query: String,
    estimator: &'a str,
    selectivity: f64,
    budget: usize,
    forward_passes: u64,
    std_error: f64,
}

/// The estimate `varskip estimate` prints for these inputs.
pub fn estimate_query(
    model: &ArModel,
    query: &RangeQuery,
    budget: usize,
    skip: bool,
    naive: bool,
    seed: u64,
) -> AppResult<Estimate> {
    let mut rng = seed::stream(seed, &[]);
    let est = if naive {
        naive_sample_query(&model.prepare(0)?, query, budget, &mut rng)?
    } else if model.orderings().len() > 1 {
        let members = (0..model.orderings().len()).map(|k| model.prepare(k)).collect::<Result<Vec<_>, _>>()?;
        ensemble_estimate(&members, query, budget, skip, &mut rng)?
    } else {
        progressive_sample(&model.prepare(0)?, query, budget, skip, &mut rng)?
    };
    Ok(est.without_weights())
}

fn cmd_estimate(a: EstimateArgs, l: &mut Layers) -> AppResult<()> {
    let ck = Checkpoint::load(&a.checkpoint)?;
    if ck.meta.kind != ModelKind::Tabular {
        return Err(AppError::Usage("estimate needs a tabular checkpoint; use text-bench for text".into()));
    }
    let budget = l.get(a.budget, "budget", 1000)?;
    let seed = l.get(a.seed, "seed", 0)?;
    let query = parse_query(&a.query, &ck.meta.schema)?;
    if a.skip && !ck.model.mask_mode().is_masking() {
        return Err(AppError::Core(varskip_core::Error::EstimatorMismatch {
            estimator: "skipping".into(),
            reason: "checkpoint was trained without masking".into(),
        }));
    }
    let est = estimate_query(&ck.model, &query, budget, a.skip, a.naive, seed)?;
    let estimator = match (a.naive, a.skip, ck.model.orderings().len() > 1) {
        (true, _, _) => "naive",
        (_, true, true) => "multiorder+skipping",
        (_, true, false) => "skipping",
        (_, false, true) => "multiorder",
        _ => "baseline",
    };
    let out = EstimateOutput {
        query: format_query(&query, &ck.meta.schema).unwrap_or_else(|_| a.query.clone()),
        estimator,
        selectivity: est.selectivity,
        budget: est.budget,
        forward_passes: est.forward_passes,
        std_error: est.std_error,
    };
    println!("{}", serde_json::to_string(&out)?);
    Ok(())
}

fn parse_list<T>(text: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> AppResult<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| f(s).ok_or_else(|| AppError::Usage(format!("bad {what} `{s}`"))))
        .collect()
}

fn load_group(paths: &[PathBuf], table: &Table) -> AppResult<Vec<Checkpoint>> {
    paths
        .iter()
        .map(|p| {
            let ck = Checkpoint::load(p)?;
            if ck.meta.vocab_sizes != table.vocab_sizes() {
                return Err(AppError::Usage(format!("{} was trained on a different schema", p.display())));
            }
            Ok(ck)
        })
        .collect()
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    config: &'a BTreeMap<String, String>,
    table: &'a str,
    workload: Vec<String>,
    report: &'a BenchReport,
}

fn emit_report(
    report: &BenchReport,
    l: &Layers,
    table: &str,
    workload: Vec<String>,
    json: Option<&Path>,
    csv: Option<&Path>,
    text: Option<&Path>,
) -> AppResult<()> {
    let summary = render_summary(report);
    print!("{summary}");
    if let Some(p) = json {
        write_json(p, &BenchOutput { config: l.resolved(), table, workload, report })?;
    }
    if let Some(p) = csv {
        write_bench_csv(p, report)?;
    }
    if let Some(p) = text {
        fs::write(p, summary).map_err(|e| AppError::io(p, e))?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs, l: &mut Layers, workers: Option<usize>) -> AppResult<()> {
    let table = tablefile::read_table(&a.table)?;
    let seed = l.require(a.seed, "seed")?;
    let budgets =
        parse_list(&l.get(a.budgets, "budgets", "100,1000,10000".to_string())?, "budget", |s| s.parse().ok())?;
    let workload = match &a.workload {
        Some(p) => read_workload(p, table.columns())?.1,
        None => {
            let ops = parse_list(&l.get(a.ops, "ops", "==,<=,>=".to_string())?, "operator", |s| Op::parse(s).ok())?;
            let spec = WorkloadSpec {
                n_queries: l.get(a.queries, "queries", 200)?,
                min_constraints: l.get(a.min_constraints, "min_constraints", 5)?,
                max_constraints: l.get(a.max_constraints, "max_constraints", 12)?,
                ops,
                seed: l.require(a.workload_seed, "workload_seed")?,
            };
            let queries = gen_workload(&table, &spec)?;
            if let Some(p) = &a.save_workload {
                write_workload(p, &spec, table.name(), &queries, table.columns())?;
            }
            queries
        }
    };
    let groups = [load_group(&a.baseline, &table)?, load_group(&a.masked, &table)?, load_group(&a.multi, &table)?];
    let reps = groups.iter().map(Vec::len).max().unwrap_or(0);
    if reps == 0 {
        return Err(AppError::Usage("bench needs at least one checkpoint".into()));
    }
    if groups.iter().any(|g| !g.is_empty() && g.len() != reps && g.len() != 1) {
        return Err(AppError::Usage("each checkpoint group needs one entry or one per repetition".into()));
    }
    let nth = |g: &'_ [Checkpoint], r: usize| -> Option<usize> { (!g.is_empty()).then(|| r.min(g.len() - 1)) };
    let mut sets: Vec<ModelSet<Prepared<'_>>> = Vec::with_capacity(reps);
    for r in 0..reps {
        let baseline = nth(&groups[0], r).map(|i| groups[0][i].model.prepare(0)).transpose()?;
        let masked = nth(&groups[1], r).map(|i| groups[1][i].model.prepare(0)).transpose()?;
        let multi = match nth(&groups[2], r) {
            Some(i) => {
                let m = &groups[2][i].model;
                (0..m.orderings().len()).map(|k| m.prepare(k)).collect::<Result<Vec<_>, _>>()?
            }
            None => Vec::new(),
        };
        sets.push(ModelSet { baseline, masked, multi });
    }
    let estimators = match l.opt(a.estimators, "estimators")? {
        Some(text) => parse_list(&text, "estimator", |s| Estimator::parse(s).ok())?,
        None => Estimator::ALL.into_iter().filter(|&e| sets.iter().all(|s| s.check(e).is_ok())).collect(),
    };
    let truths: Vec<f64> = workload.iter().map(|q| exact_selectivity(&table, q)).collect();
    let runner = RayonRunner::new(workers)?;
    let report = run_bench(&sets, &workload, &truths, table.n_rows(), &budgets, &estimators, seed, &runner)?;
    let texts = workload.iter().map(|q| format_query(q, table.columns())).collect::<Result<Vec<_>, _>>()?;
    emit_report(&report, l, table.name(), texts, a.out_json.as_deref(), a.out_csv.as_deref(), a.out_text.as_deref())
}

#[derive(Serialize)]
struct PatternOutput<'a> {
    pattern: &'a str,
    truth: f64,
    probability: f64,
    per_position_first_terms: Vec<f64>,
    budget: usize,
    budget_used: usize,
    forward_passes: u64,
}

fn cmd_text_bench(a: TextBenchArgs, l: &mut Layers, workers: Option<usize>) -> AppResult<()> {
    let ck = Checkpoint::load(&a.checkpoint)?;
    let ModelKind::Text { width } = ck.meta.kind else {
        return Err(AppError::Usage("text-bench needs a text checkpoint".into()));
    };
    let text = ingest::read_corpus(&a.corpus, width)?;
    if text.table().vocab_sizes() != ck.meta.vocab_sizes || text.table().columns() != ck.meta.schema.as_slice() {
        return Err(AppError::Usage("corpus alphabet differs from the checkpoint's".into()));
    }
    let seed = l.require(a.seed, "seed")?;
    let prepared = ck.model.prepare(0)?;
    let budgets = parse_list(&l.get(a.budgets, "budgets", "1000".to_string())?, "budget", |s| s.parse().ok())?;
    if let Some(p) = &a.pattern {
        let budget = *budgets.first().ok_or_else(|| AppError::Usage("no budget given".into()))?;
        let pattern = Pattern::encode(&text, p)?;
        let est = contains_prob(&prepared, &pattern, budget, &mut seed::stream(seed, &[]))?;
        let out = PatternOutput {
            pattern: p,
            truth: text.contains_fraction(pattern.chars()),
            probability: est.probability,
            per_position_first_terms: est.first_terms,
            budget,
            budget_used: est.budget_used,
            forward_passes: est.forward_passes,
        };
        println!("{}", serde_json::to_string(&out)?);
        return Ok(());
    }
    let raw: Vec<String> = match &a.patterns {
        Some(p) => ingest::read_lines(p)?.into_iter().filter(|s| !s.is_empty()).collect(),
        None => sample_patterns(
            &text,
            l.get(a.n_patterns, "n_patterns", 50)?,
            l.get(a.min_len, "min_len", 3)?,
            l.get(a.max_len, "max_len", 5)?,
            l.require(a.pattern_seed, "pattern_seed")?,
        )?,
    };
    let patterns = raw.iter().map(|p| Pattern::encode(&text, p)).collect::<Result<Vec<_>, _>>()?;
    let truths: Vec<f64> = patterns.iter().map(|p| text.contains_fraction(p.chars())).collect();
    let estimators = parse_list(&l.get(a.estimators, "estimators", "skipping,naive".to_string())?, "estimator", |s| {
        Estimator::parse(s).ok()
    })?;
    let runner = RayonRunner::new(workers)?;
    let report =
        run_text_bench(&prepared, &patterns, &truths, text.table().n_rows(), &budgets, &estimators, seed, &runner)?;
    emit_report(
        &report,
        l,
        text.table().name(),
        raw,
        a.out_json.as_deref(),
        a.out_csv.as_deref(),
        a.out_text.as_deref(),
    )
}
