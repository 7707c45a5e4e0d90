//! Command-line surface: argument parsing, run manifests, and the
//! plumbing between files and the library modules.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bpr::{bpr_score, bpr_train, BprConfig, BprModel, NegativeSampling};
use crate::error::{Error, Result};
use crate::eval::{
    self, evaluate, evaluate_with, global_classification_error, mean_rank_score,
    median_rank_score, EvalReport,
};
use crate::gen::{generate_graph_from_degrees, DegreeDistributionSpec, DegreeFamily};
use crate::graph::BipartiteGraph;
use crate::model::{HyperPriors, Posterior};
use crate::predict::{rank_items, ScoreMode};
use crate::sampling::{positive_negative_ratio, sample_hidden_graph, ItemHistogram};
use crate::engine::{train, TrainConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;
pub const EXIT_GENERATION: i32 = 4;

/// Stable mapping from error kind to process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::Io { .. } | Error::ModelFormat(_) | Error::Numerical { .. } => {
            EXIT_IO
        }
        Error::Contract(_) | Error::Consistency(_) => EXIT_CONSISTENCY,
        Error::Generation(_) => EXIT_GENERATION,
    }
}

#[derive(Parser, Debug)]
#[command(name = "rgcf", about = "One-class collaborative filtering over sampled hidden graphs", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hold out one random liked item per user (degree >= 2).
    Split(SplitArgs),
    /// Train the variational model on an edge list.
    Train(TrainArgs),
    /// Train the BPR matrix-factorization baseline.
    TrainBpr(TrainBprArgs),
    /// Rank-score and classification reports on a held-out split.
    Evaluate(EvaluateArgs),
    /// Top-k recommendations per user.
    Predict(PredictArgs),
    /// Generate a random bipartite graph from degree distributions.
    SampleGraph(SampleGraphArgs),
    /// Degree statistics of an edge list.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Input edge-list file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub train_out: PathBuf,
    #[arg(long)]
    pub test_out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Model output path; the iteration log, ratio table and manifest are
    /// written next to it.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(short, long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    /// Negative-sampling rate parameter.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Iterations with full step size before decay starts.
    #[arg(long, default_value_t = 10)]
    pub t_eps: usize,
    /// Hyperparameters are frozen through this iteration.
    #[arg(long, default_value_t = 3)]
    pub t_tau: usize,
    /// Partial-update block size (defaults to all K coordinates).
    #[arg(long)]
    pub kappa: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Item blocks for the distributed-update simulation.
    #[arg(long, default_value_t = 1)]
    pub blocks: usize,
    /// Pin user biases at zero (the default).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub clamp_user_bias: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct TrainBprArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(short, long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.01)]
    pub regularization: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    /// Negative sampling: uniform or popularity.
    #[arg(long, default_value = "uniform")]
    pub sampling: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    /// Directory the four report files are written into (one set per mode,
    /// prefixed by the mode name).
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Comma-separated score modes: like, popularity, popularity-like.
    #[arg(long, default_value = "like")]
    pub modes: String,
    /// Histogram adjustment for popularity modes.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Interpret the model file as a BPR point estimate.
    #[arg(long, default_value_t = false)]
    pub bpr: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Training edge list; liked items are excluded from recommendations.
    #[arg(long)]
    pub train: PathBuf,
    /// Restrict output to one user id (default: all users).
    #[arg(long)]
    pub user: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long, default_value = "like")]
    pub mode: String,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Output TSV (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleGraphArgs {
    #[arg(short, long)]
    pub users: usize,
    #[arg(short = 'n', long)]
    pub items: usize,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.4)]
    pub user_exponent: f64,
    /// Exponential cutoff for the user degree law (none by default).
    #[arg(long)]
    pub user_cutoff: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub user_min: u32,
    #[arg(long, default_value_t = 100)]
    pub user_max: u32,
    #[arg(long, default_value_t = 0.77)]
    pub item_exponent: f64,
    #[arg(long)]
    pub item_cutoff: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub item_min: u32,
    #[arg(long, default_value_t = 100)]
    pub item_max: u32,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
}

/// Reproducibility sidecar written next to every command's main output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub artifacts: Vec<PathBuf>,
    pub duration_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

fn digest(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(InputDigest {
        path: path.to_path_buf(),
        sha256: format!("{:x}", Sha256::digest(&bytes)),
    })
}

fn manifest_path(primary: &Path) -> PathBuf {
    let mut os = primary.as_os_str().to_owned();
    os.push(".manifest.json");
    PathBuf::from(os)
}

fn write_manifest(primary: &Path, manifest: &RunManifest) -> Result<()> {
    let path = manifest_path(primary);
    let json = serde_json::to_string_pretty(manifest).expect("manifest is serializable");
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

fn load_graph(path: &Path) -> Result<BipartiteGraph> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let (g, _) = BipartiteGraph::load_edges(BufReader::new(f))?;
    Ok(g)
}

fn load_posterior(path: &Path) -> Result<Posterior> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Posterior::load(BufReader::new(f))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

/// Held-out edges as `user item` id pairs resolved against the training
/// graph's index maps.
fn load_test_edges(path: &Path, train: &BipartiteGraph) -> Result<Vec<(u32, u32)>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut edges = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (user, item) = match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(n), None) => (u, n),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    content: line.clone(),
                })
            }
        };
        let m = train.user_index(user).ok_or_else(|| {
            Error::Consistency(format!("test user {user:?} is not in the training graph"))
        })?;
        let n = train.item_index(item).ok_or_else(|| {
            Error::Consistency(format!("test item {item:?} is not in the training graph"))
        })?;
        edges.push((m, n));
    }
    Ok(edges)
}

fn check_id_maps(q: &Posterior, train: &BipartiteGraph) -> Result<()> {
    if q.user_ids() != train.user_ids() || q.item_ids() != train.item_ids() {
        return Err(Error::Consistency(
            "model and training graph disagree on vertex id maps".into(),
        ));
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Split(args) => cmd_split(args),
        Command::Train(args) => cmd_train(args),
        Command::TrainBpr(args) => cmd_train_bpr(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Predict(args) => cmd_predict(args),
        Command::SampleGraph(args) => cmd_sample_graph(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

fn cmd_split(args: SplitArgs) -> Result<()> {
    let started = Instant::now();
    let graph = load_graph(&args.input)?;
    let split = graph.leave_one_out_split(args.seed);
    let mut w = create(&args.train_out)?;
    split
        .train
        .write_edges(&mut w)
        .map_err(|e| Error::io(&args.train_out, e))?;
    let mut w = create(&args.test_out)?;
    for &(m, n) in &split.test {
        writeln!(w, "{} {}", graph.user_id(m), graph.item_id(n))
            .map_err(|e| Error::io(&args.test_out, e))?;
    }
    w.flush().map_err(|e| Error::io(&args.test_out, e))?;
    eprintln!(
        "split: {} train edges, {} test edges, {} users excluded (degree < 2)",
        split.train.num_edges(),
        split.test.len(),
        split.excluded_users.len()
    );
    write_manifest(
        &args.train_out,
        &RunManifest {
            command: "split".into(),
            config: serde_json::json!({ "seed": args.seed }),
            inputs: vec![digest(&args.input)?],
            seed: args.seed,
            artifacts: vec![args.train_out.clone(), args.test_out.clone()],
            duration_seconds: started.elapsed().as_secs_f64(),
        },
    )
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let started = Instant::now();
    let graph = load_graph(&args.input)?;
    let cfg = TrainConfig {
        k: args.k,
        hyper: HyperPriors::new(args.alpha, args.beta)?,
        r: args.r,
        t_max: args.iters,
        t_eps: args.t_eps,
        t_tau: args.t_tau,
        kappa: args.kappa,
        clamp_user_bias: args.clamp_user_bias,
        seed: args.seed,
        block_count: args.blocks,
        ..TrainConfig::default()
    };
    let out = train(&graph, &cfg)?;
    let mut w = create(&args.output)?;
    out.posterior
        .save(&mut w)
        .map_err(|e| Error::io(&args.output, e))?;
    w.flush().map_err(|e| Error::io(&args.output, e))?;

    let log_path = args.output.with_extension("log.tsv");
    let mut w = create(&log_path)?;
    (|| -> std::io::Result<()> {
        writeln!(w, "# t\teps\telbo\te_tau_u\te_tau_v\te_tau_bu\te_tau_bv")?;
        for rec in &out.log {
            writeln!(
                w,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                rec.t, rec.eps, rec.elbo, rec.e_tau_u, rec.e_tau_v, rec.e_tau_bu, rec.e_tau_bv
            )?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(&log_path, e))?;

    // Positive/negative ratio table over a few fresh samples so the effect
    // of r is inspectable.
    let ratio_path = args.output.with_extension("ratios.tsv");
    if graph.num_edges() > 0 {
        let hist = ItemHistogram::build(&graph.degree_stats(), args.r)?;
        let samples: Vec<_> = (1..=10)
            .map(|t| sample_hidden_graph(&graph, &hist, args.seed, t))
            .collect();
        let mut w = create(&ratio_path)?;
        (|| -> std::io::Result<()> {
            writeln!(w, "# item_id\tdegree\tpositives\tnegatives\tratio")?;
            for entry in positive_negative_ratio(&graph, &samples) {
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}\t{:.6}",
                    graph.item_id(entry.item),
                    graph.item_degree(entry.item),
                    entry.positives,
                    entry.negatives,
                    entry.ratio
                )?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(&ratio_path, e))?;
    }

    if let Some(last) = out.log.last() {
        eprintln!(
            "train: {} iterations, final elbo {:.4}, E[tau_u] {:.3}, E[tau_v] {:.3}",
            last.t, last.elbo, last.e_tau_u, last.e_tau_v
        );
    }
    write_manifest(
        &args.output,
        &RunManifest {
            command: "train".into(),
            config: serde_json::to_value(&args).expect("args serialize"),
            inputs: vec![digest(&args.input)?],
            seed: args.seed,
            artifacts: vec![args.output.clone(), log_path, ratio_path],
            duration_seconds: started.elapsed().as_secs_f64(),
        },
    )
}

fn cmd_train_bpr(args: TrainBprArgs) -> Result<()> {
    let started = Instant::now();
    let graph = load_graph(&args.input)?;
    let cfg = BprConfig {
        k: args.k,
        learning_rate: args.learning_rate,
        regularization: args.regularization,
        epochs: args.epochs,
        sampling: NegativeSampling::parse(&args.sampling)?,
        seed: args.seed,
        ..BprConfig::default()
    };
    let model = bpr_train(&graph, &cfg)?;
    let mut w = create(&args.output)?;
    model.save(&mut w).map_err(|e| Error::io(&args.output, e))?;
    w.flush().map_err(|e| Error::io(&args.output, e))?;
    write_manifest(
        &args.output,
        &RunManifest {
            command: "train-bpr".into(),
            config: serde_json::to_value(&args).expect("args serialize"),
            inputs: vec![digest(&args.input)?],
            seed: args.seed,
            artifacts: vec![args.output.clone()],
            duration_seconds: started.elapsed().as_secs_f64(),
        },
    )
}

fn parse_modes(s: &str) -> Result<Vec<ScoreMode>> {
    s.split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(ScoreMode::parse)
        .collect()
}

fn mode_name(mode: ScoreMode) -> &'static str {
    match mode {
        ScoreMode::Like => "like",
        ScoreMode::Popularity => "popularity",
        ScoreMode::PopularityLike => "popularity-like",
    }
}

fn write_report_files(dir: &Path, report: &EvalReport) -> Result<Vec<PathBuf>> {
    let prefix = mode_name(report.mode);
    let mut artifacts = Vec::new();
    let mut emit = |name: &str,
                    f: &dyn Fn(&mut BufWriter<File>, &EvalReport) -> std::io::Result<()>|
     -> Result<()> {
        let path = dir.join(format!("{prefix}_{name}"));
        let mut w = create(&path)?;
        f(&mut w, report).map_err(|e| Error::io(&path, e))?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        artifacts.push(path);
        Ok(())
    };
    emit("rank_by_user_bin.tsv", &|w, r| {
        eval::write_rank_by_user_bin(w, r)
    })?;
    emit("rank_by_item_bin.tsv", &|w, r| {
        eval::write_rank_by_item_bin(w, r)
    })?;
    emit("classification_by_user_bin.tsv", &|w, r| {
        eval::write_classification_by_user_bin(w, r)
    })?;
    emit("like_histograms.tsv", &|w, r| {
        eval::write_like_histograms(w, r)
    })?;
    Ok(artifacts)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let started = Instant::now();
    let train_graph = load_graph(&args.train)?;
    let test = load_test_edges(&args.test, &train_graph)?;
    let modes = parse_modes(&args.modes)?;
    if modes.is_empty() {
        return Err(Error::Config("no score modes given".into()));
    }
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let needs_hist = modes
        .iter()
        .any(|m| matches!(m, ScoreMode::Popularity | ScoreMode::PopularityLike));
    let hist = if needs_hist {
        Some(ItemHistogram::build(&train_graph.degree_stats(), args.r)?)
    } else {
        None
    };

    let mut artifacts = Vec::new();
    let mut run_mode = |mode: ScoreMode, report: EvalReport| -> Result<()> {
        println!(
            "{}\tmean_s_rank={:.4}\tmedian_s_rank={:.4}\tclassification_error={:.4}",
            mode_name(mode),
            mean_rank_score(&report.records),
            median_rank_score(&report.records),
            global_classification_error(&report.records)
        );
        artifacts.extend(write_report_files(&args.out_dir, &report)?);
        Ok(())
    };

    if args.bpr {
        let f = File::open(&args.model).map_err(|e| Error::io(&args.model, e))?;
        let model = BprModel::load(BufReader::new(f))?;
        if model.user_ids != train_graph.user_ids() || model.item_ids != train_graph.item_ids() {
            return Err(Error::Consistency(
                "model and training graph disagree on vertex id maps".into(),
            ));
        }
        for &mode in &modes {
            let report = match mode {
                ScoreMode::Like => evaluate_with(
                    &train_graph,
                    &test,
                    |m, n| bpr_score(&model, m, n),
                    |m, n| crate::model::sigmoid(bpr_score(&model, m, n)),
                    mode,
                )?,
                _ => {
                    return Err(Error::Config(
                        "popularity modes apply to the generative model only".into(),
                    ))
                }
            };
            run_mode(mode, report)?;
        }
    } else {
        let q = load_posterior(&args.model)?;
        check_id_maps(&q, &train_graph)?;
        for &mode in &modes {
            let report = evaluate(&train_graph, &test, &q, mode, hist.as_ref())?;
            run_mode(mode, report)?;
        }
    }
    write_manifest(
        &args.out_dir.join("evaluate"),
        &RunManifest {
            command: "evaluate".into(),
            config: serde_json::to_value(&args).expect("args serialize"),
            inputs: vec![digest(&args.model)?, digest(&args.train)?, digest(&args.test)?],
            seed: 0,
            artifacts,
            duration_seconds: started.elapsed().as_secs_f64(),
        },
    )
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let started = Instant::now();
    let train_graph = load_graph(&args.train)?;
    let q = load_posterior(&args.model)?;
    check_id_maps(&q, &train_graph)?;
    let mode = ScoreMode::parse(&args.mode)?;
    let hist = match mode {
        ScoreMode::Like => None,
        _ => Some(ItemHistogram::build(&train_graph.degree_stats(), args.r)?),
    };
    let users: Vec<u32> = match &args.user {
        Some(id) => vec![train_graph.user_index(id).ok_or_else(|| {
            Error::Consistency(format!("user {id:?} is not in the training graph"))
        })?],
        None => (0..train_graph.num_users() as u32).collect(),
    };

    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let io_err = |e: std::io::Error| match &args.output {
        Some(path) => Error::io(path, e),
        None => Error::io("<stdout>", e),
    };
    writeln!(out, "# user_id\titem_id\tscore\tmode").map_err(io_err)?;
    for m in users {
        let candidates: Vec<u32> = (0..train_graph.num_items() as u32)
            .filter(|&n| !train_graph.has_edge(m, n))
            .collect();
        let ranked = rank_items(&q, m, &candidates, mode, hist.as_ref())?;
        for &(n, s) in ranked.iter().take(args.top) {
            writeln!(
                out,
                "{}\t{}\t{:.6}\t{}",
                train_graph.user_id(m),
                train_graph.item_id(n),
                s,
                mode_name(mode)
            )
            .map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    if let Some(path) = &args.output {
        write_manifest(
            path,
            &RunManifest {
                command: "predict".into(),
                config: serde_json::to_value(&args).expect("args serialize"),
                inputs: vec![digest(&args.model)?, digest(&args.train)?],
                seed: 0,
                artifacts: vec![path.clone()],
                duration_seconds: started.elapsed().as_secs_f64(),
            },
        )?;
    }
    Ok(())
}

fn degree_spec(
    exponent: f64,
    cutoff: Option<f64>,
    d_min: u32,
    d_max: u32,
) -> DegreeDistributionSpec {
    DegreeDistributionSpec {
        family: match cutoff {
            Some(cutoff) => DegreeFamily::PowerLawWithCutoff { exponent, cutoff },
            None => DegreeFamily::PowerLaw { exponent },
        },
        d_min,
        d_max,
    }
}

fn cmd_sample_graph(args: SampleGraphArgs) -> Result<()> {
    let started = Instant::now();
    let user_spec = degree_spec(args.user_exponent, args.user_cutoff, args.user_min, args.user_max);
    let item_spec = degree_spec(args.item_exponent, args.item_cutoff, args.item_min, args.item_max);
    let graph = generate_graph_from_degrees(
        &user_spec,
        &item_spec,
        args.users,
        args.items,
        args.seed,
        crate::gen::DEFAULT_REDRAW_BUDGET,
    )?;
    let mut w = create(&args.output)?;
    graph
        .write_edges(&mut w)
        .map_err(|e| Error::io(&args.output, e))?;

    let degrees_path = args.output.with_extension("degrees.tsv");
    let stats = graph.degree_stats();
    let mut w = create(&degrees_path)?;
    (|| -> std::io::Result<()> {
        writeln!(w, "# side\tbin_lo\tbin_hi\tcount")?;
        for bin in &stats.user_histogram {
            writeln!(w, "user\t{}\t{}\t{}", bin.lo, bin.hi, bin.count)?;
        }
        for bin in &stats.item_histogram {
            writeln!(w, "item\t{}\t{}\t{}", bin.lo, bin.hi, bin.count)?;
        }
        w.flush()
    })()
    .map_err(|e| Error::io(&degrees_path, e))?;
    eprintln!(
        "sample-graph: {} users, {} items, {} edges, mean user degree {:.3}",
        graph.num_users(),
        graph.num_items(),
        graph.num_edges(),
        stats.mu
    );
    write_manifest(
        &args.output,
        &RunManifest {
            command: "sample-graph".into(),
            config: serde_json::to_value(&args).expect("args serialize"),
            inputs: vec![],
            seed: args.seed,
            artifacts: vec![args.output.clone(), degrees_path],
            duration_seconds: started.elapsed().as_secs_f64(),
        },
    )
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let stats = graph.degree_stats();
    println!("users\t{}", graph.num_users());
    println!("items\t{}", graph.num_items());
    println!("edges\t{}", graph.num_edges());
    println!("mean_user_degree\t{:.6}", stats.mu);
    println!("mean_item_degree\t{:.6}", stats.nu);
    println!("max_item_degree\t{}", stats.d_max);
    for bin in &stats.user_histogram {
        println!("user_bin\t{}\t{}\t{}", bin.lo, bin.hi, bin.count);
    }
    for bin in &stats.item_histogram {
        println!("item_bin\t{}\t{}\t{}", bin.lo, bin.hi, bin.count);
    }
    Ok(())
}
