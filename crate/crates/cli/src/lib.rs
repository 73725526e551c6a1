//! `collabrec` command line: data generation and ingestion, the evaluation
//! experiment, one-off recommendations and the matching service.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 runtime
//! failure.

pub mod config;
pub mod manifest;
pub mod serve;
pub mod setup;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use collabrec_core::corpus::{generate_synthetic, load_profiles, write_profiles_csv, ProfileId};
use collabrec_core::evalmetrics::{RelevanceOracle, RelevanceThresholds};
use collabrec_core::experiment::{run_experiment, write_artifacts, ExperimentConfig, ExperimentError};
use collabrec_core::recommender::{recommend, Filters, RecommendError, RecommendationQuery};
use collabrec_core::vectorize::Technique;

use crate::config::{Config, CorpusSource, EmbeddingSource, PreferenceSetting};
use crate::manifest::Manifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(1),
            CliError::Runtime(_) => ExitCode::from(2),
        }
    }
}

fn runtime(context: impl std::fmt::Display) -> impl FnOnce(std::io::Error) -> CliError {
    move |e| CliError::Runtime(format!("{context}: {e}"))
}

#[derive(Debug, Parser)]
#[command(
    name = "collabrec",
    version,
    about = "Academic collaborator recommendation: experiments and matching service"
)]
pub struct Cli {
    /// TOML configuration file; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Log level: error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info", value_name = "LEVEL")]
    pub log_level: tracing::Level,

    /// Where to write the run manifest. Defaults to next to the command's
    /// output; commands that write no files need this to leave a manifest.
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic profiles from the skill pool.
    Generate(GenerateArgs),
    /// Validate a profile file and optionally write it back normalized.
    Ingest(IngestArgs),
    /// Run the three-technique clustering and ranking evaluation.
    Experiment(ExperimentArgs),
    /// Print top-k recommendations for one profile.
    Recommend(RecommendArgs),
    /// Serve the matching HTTP API.
    Serve(ServeArgs),
}

/// Corpus and representation overrides shared by several commands.
#[derive(Debug, Args, Default)]
pub struct CorpusArgs {
    /// `demo`, `synthetic`, or a CSV/JSON-lines profile file.
    #[arg(long, value_name = "SOURCE")]
    pub corpus: Option<String>,
    /// JSON-lines embeddings file (`{"id": .., "vector": [..]}` per line).
    #[arg(long, value_name = "FILE")]
    pub embeddings: Option<PathBuf>,
    /// Embedding provider: demo, file or hashed.
    #[arg(long, value_name = "KIND")]
    pub provider: Option<String>,
    /// Width of hashed-projection embeddings.
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Seed for synthetic corpora and hashed embeddings.
    #[arg(long)]
    pub seed: Option<u64>,
    /// TF-IDF weight in the hybrid representation.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Profiles to generate when the corpus is `synthetic`.
    #[arg(long)]
    pub count: Option<usize>,
}

impl CorpusArgs {
    fn apply(&self, c: &mut Config) -> Result<(), CliError> {
        if let Some(s) = &self.corpus {
            c.corpus.source = CorpusSource::parse(s);
        }
        if let Some(p) = &self.embeddings {
            c.embeddings.path = Some(p.clone());
            if self.provider.is_none() {
                c.embeddings.provider = Some(EmbeddingSource::File);
            }
        }
        if let Some(p) = &self.provider {
            c.embeddings.provider = Some(EmbeddingSource::parse(p)?);
        }
        if let Some(d) = self.dimension {
            c.embeddings.dimension = d;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(a) = self.alpha {
            c.vectorize.alpha = a;
        }
        if let Some(n) = self.count {
            c.corpus.synthetic_count = n;
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of profiles to generate.
    #[arg(long, default_value_t = collabrec_core::demo::SIZE)]
    pub count: usize,
    /// Generator seed; the configured seed when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skill pool JSON; the builtin pool when absent.
    #[arg(long, value_name = "FILE")]
    pub pool: Option<PathBuf>,
    /// Output file, `.csv` or `.jsonl`.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// CSV or JSON-lines profile file.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Write the validated profiles, with ids, as CSV.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Comma-separated techniques: tfidf, embedding, hybrid.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Technique>>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Profiles whose top-k lists are exported (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<String>>,
    /// Rank cut-off for NDCG.
    #[arg(long)]
    pub ndcg_depth: Option<usize>,
    /// Length of the exported recommendation lists.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Affinity propagation damping, in [0.5, 1).
    #[arg(long)]
    pub damping: Option<f64>,
    /// Maximum affinity propagation sweeps.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Sweeps with an unchanged exemplar set that count as converged.
    #[arg(long)]
    pub convergence_iter: Option<usize>,
    /// `median` or a number.
    #[arg(long)]
    pub preference: Option<String>,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Id of the profile to recommend for.
    #[arg(long)]
    pub target: String,
    /// Technique: tfidf, embedding or hybrid.
    #[arg(long, default_value = "hybrid")]
    pub method: Technique,
    /// Number of recommendations.
    #[arg(long, default_value_t = collabrec_core::recommender::DEFAULT_K)]
    pub k: usize,
    /// Keep only candidates with this profession.
    #[arg(long)]
    pub profession: Option<String>,
    /// Keep only candidates with this interest.
    #[arg(long)]
    pub interest: Option<String>,
    /// Keep only candidates whose profession is the target's preferred
    /// collaborator kind.
    #[arg(long)]
    pub collaboration: bool,
    /// Ignore all filters.
    #[arg(long)]
    pub no_filters: bool,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Also write recommendations.json and a manifest into this directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Listen address, e.g. 127.0.0.1:8080 (port 0 picks a free port).
    #[arg(long)]
    pub addr: Option<String>,
    /// Store directory, created when missing.
    #[arg(long, value_name = "DIR")]
    pub store: Option<PathBuf>,
    /// Import the configured corpus as account-less profiles.
    #[arg(long)]
    pub import_corpus: bool,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = Config::load(cli.config.as_deref())?;
    let to = cli.manifest.as_deref();
    match cli.command {
        Command::Generate(args) => generate(&mut config, args, to),
        Command::Ingest(args) => ingest(&config, args, to),
        Command::Experiment(args) => experiment(&mut config, args, to),
        Command::Recommend(args) => recommend_cmd(&mut config, args, to),
        Command::Serve(args) => {
            args.corpus.apply(&mut config)?;
            if let Some(a) = args.addr {
                config.serve.addr = a;
            }
            if let Some(s) = args.store {
                config.serve.store = s;
            }
            config.serve.import_corpus |= args.import_corpus;
            config.validate()?;
            serve::serve(&config, to)
        }
    }
}

/// Writes `manifest` to the `--manifest` path if given, else to `default`.
fn save_manifest(manifest: &Manifest, to: Option<&Path>, default: Option<PathBuf>) -> Result<(), CliError> {
    match to.map(Path::to_path_buf).or(default) {
        Some(path) => manifest.write(&path),
        None => Ok(()),
    }
}

fn generate(config: &mut Config, args: GenerateArgs, to: Option<&Path>) -> Result<(), CliError> {
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(p) = args.pool {
        config.corpus.pool = Some(p);
    }
    config.corpus.source = CorpusSource::Synthetic;
    config.corpus.synthetic_count = args.count;
    config.validate()?;
    let pool = setup::load_pool(config)?;
    let profiles = generate_synthetic(&pool, args.count, config.seed).map_err(setup::corpus_error)?;
    write_profiles(&args.out, &profiles)?;
    let mut manifest = Manifest::new("generate", config, None);
    manifest.add_artifacts(std::slice::from_ref(&args.out))?;
    save_manifest(&manifest, to, Some(sidecar(&args.out)))?;
    println!("wrote {} profiles to {}", profiles.len(), args.out.display());
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn write_profiles(path: &Path, profiles: &[collabrec_core::corpus::Profile]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(runtime(dir.display()))?;
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let file = std::fs::File::create(path).map_err(runtime(path.display()))?;
    match ext.as_str() {
        "csv" => write_profiles_csv(file, profiles).map_err(setup::corpus_error),
        "jsonl" | "ndjson" => {
            let mut out = std::io::BufWriter::new(file);
            for p in profiles {
                serde_json::to_writer(&mut out, p).map_err(|e| CliError::Runtime(e.to_string()))?;
                std::io::Write::write_all(&mut out, b"\n").map_err(runtime(path.display()))?;
            }
            std::io::Write::flush(&mut out).map_err(runtime(path.display()))
        }
        other => Err(CliError::Validation(format!("output must end in .csv or .jsonl, got `.{other}`"))),
    }
}

fn ingest(config: &Config, args: IngestArgs, to: Option<&Path>) -> Result<(), CliError> {
    setup::require_file(&args.input)?;
    let profiles = load_profiles(&args.input).map_err(setup::corpus_error)?;
    let synthetic = profiles.iter().filter(|p| p.is_synthetic).count();
    let mut professions: BTreeMap<String, usize> = BTreeMap::new();
    for p in &profiles {
        *professions.entry(p.profession.trim().to_lowercase()).or_default() += 1;
    }
    println!("{} valid profiles ({} synthetic)", profiles.len(), synthetic);
    for (k, v) in &professions {
        println!("  {k}: {v}");
    }
    let mut config = config.clone();
    config.corpus.source = CorpusSource::File(args.input.clone());
    let mut artifacts = vec![args.input.clone()];
    if let Some(out) = &args.out {
        write_profiles(out, &profiles)?;
        artifacts.push(out.clone());
        println!("wrote {}", out.display());
    }
    let mut manifest = Manifest::new("ingest", &config, None);
    manifest.add_artifacts(&artifacts)?;
    save_manifest(&manifest, to, args.out.as_deref().map(sidecar))
}

fn experiment(config: &mut Config, args: ExperimentArgs, to: Option<&Path>) -> Result<(), CliError> {
    args.corpus.apply(config)?;
    if let Some(m) = args.methods {
        config.experiment.methods = m;
    }
    if let Some(o) = args.out {
        config.experiment.out = o;
    }
    if let Some(t) = args.targets {
        config.experiment.targets = t;
    }
    if let Some(d) = args.ndcg_depth {
        config.experiment.ndcg_depth = d;
    }
    if let Some(k) = args.top_k {
        config.experiment.top_k = k;
    }
    if let Some(d) = args.damping {
        config.cluster.damping = d;
    }
    if let Some(m) = args.max_iter {
        config.cluster.max_iter = m;
    }
    if let Some(c) = args.convergence_iter {
        config.cluster.convergence_iter = c;
    }
    if let Some(p) = args.preference {
        config.cluster.preference = PreferenceSetting::parse(&p)?;
    }
    config.validate()?;
    let started = Instant::now();
    let (mut index, info) = setup::build_index(config)?;
    let stopwords = setup::load_stopwords(config)?;
    let oracle = RelevanceOracle::new(stopwords, RelevanceThresholds::default());
    let exp = ExperimentConfig {
        methods: config.experiment.methods.clone(),
        affinity: config.cluster.affinity(),
        ndcg_depth: config.experiment.ndcg_depth,
        top_k: config.experiment.top_k,
        targets: config.experiment.targets.iter().map(|t| ProfileId::new(t.as_str())).collect(),
        thresholds: RelevanceThresholds::default(),
    };
    let result = run_experiment(&mut index, &oracle, &exp).map_err(experiment_error)?;
    let out = &config.experiment.out;
    let files = write_artifacts(&result, &index, out).map_err(experiment_error)?;
    let mut manifest = Manifest::new("experiment", config, Some(&info));
    manifest.add_artifacts(&files)?;
    save_manifest(&manifest, to, Some(out.join("manifest.json")))?;
    print!("{}", result.report().to_text());
    tracing::info!(elapsed_ms = started.elapsed().as_millis() as u64, out = %out.display(), "experiment finished");
    Ok(())
}

fn experiment_error(e: ExperimentError) -> CliError {
    match e {
        ExperimentError::Io { .. } | ExperimentError::Json(_) => CliError::Runtime(e.to_string()),
        ExperimentError::Recommend { source: RecommendError::UnknownTarget(_), .. }
        | ExperimentError::NoMethods
        | ExperimentError::TooSmall(_)
        | ExperimentError::Index(_) => CliError::Validation(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

fn recommend_cmd(config: &mut Config, args: RecommendArgs, to: Option<&Path>) -> Result<(), CliError> {
    args.corpus.apply(config)?;
    config.validate()?;
    let (mut index, info) = setup::build_index(config)?;
    index.cluster(args.method, &config.cluster.affinity()).map_err(|e| CliError::Runtime(e.to_string()))?;
    let filters = Filters {
        profession: args.profession.clone(),
        interest: args.interest.clone(),
        collaboration: args.collaboration,
        disabled: args.no_filters,
    };
    let query = RecommendationQuery::new(args.target.as_str(), args.method).with_k(args.k).with_filters(filters);
    let recs = recommend(&index, &query).map_err(|e| CliError::Validation(e.to_string()))?;

    let rows: Vec<serde_json::Value> = recs
        .iter()
        .map(|r| {
            let p = index.profile(index.position(&r.candidate_id).expect("candidate from index"));
            serde_json::json!({
                "rank": r.rank,
                "candidate_id": r.candidate_id,
                "name": p.name,
                "summary": p.summary(),
                "similarity": r.similarity,
                "cluster": r.cluster,
            })
        })
        .collect();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("json"));
    } else {
        print!("{}", recommendation_table(&rows));
    }
    let mut manifest = Manifest::new("recommend", config, Some(&info));
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(runtime(dir.display()))?;
        let path = dir.join("recommendations.json");
        let mut bytes = serde_json::to_vec_pretty(&rows).expect("json");
        bytes.push(b'\n');
        std::fs::write(&path, bytes).map_err(runtime(path.display()))?;
        manifest.add_artifacts(&[path])?;
    }
    save_manifest(&manifest, to, args.out.as_ref().map(|d| d.join("manifest.json")))
}

/// Name, Domain/Skillset, Similarity score, Cluster.
fn recommendation_table(rows: &[serde_json::Value]) -> String {
    let name_w = rows.iter().map(|r| r["name"].as_str().unwrap_or("").len()).max().unwrap_or(0).max(4);
    let sum_w = rows.iter().map(|r| r["summary"].as_str().unwrap_or("").len()).max().unwrap_or(0).max(15);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_w$}  {:<sum_w$}  {:>16}  {:>7}",
        "Name", "Domain/Skillset", "Similarity score", "Cluster"
    );
    for r in rows {
        let cluster = r["cluster"].as_u64().map_or("-".to_string(), |c| c.to_string());
        let _ = writeln!(
            out,
            "{:<name_w$}  {:<sum_w$}  {:>16.4}  {:>7}",
            r["name"].as_str().unwrap_or(""),
            r["summary"].as_str().unwrap_or(""),
            r["similarity"].as_f64().unwrap_or(f64::NAN),
            cluster
        );
    }
    out
}
