//! The `coclust` command line.
//!
//! Every command works inside a data directory chosen by `--data-dir`, then
//! `COCLUST_DATA_DIR`, then `./coclust-data`. Exit status is 0 on success,
//! 1 with a one-line diagnostic when a command fails and 2 on malformed
//! arguments.

use crate::coclustering::{self, FccStfConfig};
use crate::corpus::{self, Analyzer, BuildOptions, Document, StopWords, Vocabulary, Weighting};
use crate::search_index::{QueryFrameSet, ReplacementPolicy, SearchIndex, FRAME_CAPACITY};
use crate::store;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const DATA_DIR_ENV: &str = "COCLUST_DATA_DIR";
pub const DEFAULT_DATA_DIR: &str = "coclust-data";

pub const LINKS_FILE: &str = "links.store";
pub const MATRIX_FILE: &str = "correlation.csv";
pub const VOCABULARY_FILE: &str = "vocabulary.txt";
pub const DOCUMENTS_FILE: &str = "documents.txt";
pub const U_FILE: &str = "u.csv";
pub const V_FILE: &str = "v.csv";
pub const TRACE_FILE: &str = "trace.csv";

#[derive(Debug, Parser)]
#[command(name = "coclust", version, about = "Fuzzy co-clustering and priority-frame keyword search")]
pub struct Cli {
    /// Directory holding the link store, matrices and traces.
    #[arg(long, global = true, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Register a link and print its id.
    Register {
        #[arg(long)]
        name: String,
        #[arg(long)]
        desc: String,
        /// Comma-separated keywords.
        #[arg(long)]
        keywords: String,
    },
    /// Record one visit to a link and print its new visit count.
    Visit { id: u64 },
    /// Search registered links and print five priority frames plus the zero-priority frame.
    Query {
        text: String,
        #[arg(long, value_enum, default_value_t = PolicyArg::Priority)]
        policy: PolicyArg,
        /// Zero-based page of high-priority frames.
        #[arg(long, default_value_t = 0)]
        page: usize,
        #[arg(long)]
        json: bool,
    },
    /// Build the document-term matrix from every file in a directory.
    Ingest {
        #[arg(long, value_name = "DIR")]
        docs: PathBuf,
        #[arg(long, value_enum, default_value_t = WeightingArg::Tf)]
        weighting: WeightingArg,
        /// Stop-word file (one token per line, `#` comments); defaults to the built-in English list.
        #[arg(long, value_name = "FILE")]
        stopwords: Option<PathBuf>,
    },
    /// Run FCC_STF on the ingested matrix and save U, V and the iteration trace.
    Cluster {
        #[arg(long = "c", default_value_t = 2)]
        clusters: usize,
        #[arg(long, default_value_t = 1.0)]
        tu: f64,
        #[arg(long, default_value_t = 1.0)]
        tv: f64,
        #[arg(long = "e", default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write the saved iteration trace (iteration, J, max_delta_u, v_cj...) as CSV.
    Trace {
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Priority,
    Fifo,
    Lru,
}

impl From<PolicyArg> for ReplacementPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Priority => ReplacementPolicy::Priority,
            PolicyArg::Fifo => ReplacementPolicy::Fifo,
            PolicyArg::Lru => ReplacementPolicy::Lru,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Tf,
    Tfidf,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Tf => Weighting::Tf,
            WeightingArg::Tfidf => Weighting::TfIdf,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Store(#[from] store::StoreError),
    #[error(transparent)]
    Search(#[from] crate::search_index::SearchError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Cluster(#[from] coclustering::FccStfError),
    #[error("{0}")]
    Other(String),
}

/// Summary of a clustering run, as printed by `cluster --json`.
#[derive(Debug, Serialize)]
pub struct ClusterSummary {
    pub converged: bool,
    pub iterations_run: usize,
    pub final_objective: f64,
    pub final_max_delta_u: f64,
    pub constraint_residual: f64,
    pub clusters: usize,
    pub n_docs: usize,
    pub n_terms: usize,
    pub documents: Vec<DocAssignment>,
}

#[derive(Debug, Serialize)]
pub struct DocAssignment {
    pub doc: usize,
    pub name: String,
    pub cluster: usize,
    pub membership: f64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let data_dir = cli
        .data_dir
        .clone()
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR));

    match execute(cli.command, &data_dir) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        CliError::Store(store::StoreError::Io {
            path: dir.to_path_buf(),
            source,
        })
    })
}

fn open_index(dir: &Path) -> Result<SearchIndex, CliError> {
    let path = dir.join(LINKS_FILE);
    if path.exists() {
        Ok(store::load_store(&path, Analyzer::default())?)
    } else {
        Ok(SearchIndex::new())
    }
}

fn execute(command: Command, dir: &Path) -> Result<String, CliError> {
    match command {
        Command::Register { name, desc, keywords } => {
            let mut index = open_index(dir)?;
            let id = index.register_link(&name, &desc, &keywords)?;
            ensure_dir(dir)?;
            store::save_store(&dir.join(LINKS_FILE), &index)?;
            Ok(format!("{id}\n"))
        }
        Command::Visit { id } => {
            let mut index = open_index(dir)?;
            let count = index.record_visit(id)?;
            store::save_store(&dir.join(LINKS_FILE), &index)?;
            Ok(format!("{count}\n"))
        }
        Command::Query { text, policy, page, json } => {
            let index = open_index(dir)?;
            let result = index.query_page(&text, policy.into(), page);
            if json {
                let mut s = serde_json::to_string_pretty(&result)
                    .map_err(|e| CliError::Other(e.to_string()))?;
                s.push('\n');
                Ok(s)
            } else {
                Ok(render_frames(&text, &result))
            }
        }
        Command::Ingest { docs, weighting, stopwords } => ingest(dir, &docs, weighting.into(), stopwords.as_deref()),
        Command::Cluster { clusters, tu, tv, epsilon, seed, max_iters, json } => {
            let config = FccStfConfig {
                clusters,
                tu,
                tv,
                epsilon,
                max_iters,
                seed,
                ..FccStfConfig::default()
            };
            cluster(dir, &config, json)
        }
        Command::Trace { out } => {
            let trace = coclustering::parse_trace(&store::read_text(&dir.join(TRACE_FILE))?)?;
            store::write_atomic(&out, coclustering::export_trace(&trace)?.as_bytes())?;
            Ok(format!("wrote {} iterations to {}\n", trace.len(), out.display()))
        }
    }
}

/// Frames 1-5 hold high-priority pages, frame 6 the zero-priority pages.
pub fn render_frames(text: &str, r: &QueryFrameSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "query: {text}");
    let _ = writeln!(s, "keywords: {}", r.query_keywords.join(" "));
    let _ = writeln!(s, "policy: {}  page: {}", r.policy, r.page);
    let _ = writeln!(s, "total matches: {}", r.total_matches);
    for slot in 0..FRAME_CAPACITY {
        match r.high_frames.get(slot) {
            Some(e) => {
                let _ = writeln!(
                    s,
                    "frame {}: [{}] {}  visits={} level={}",
                    slot + 1,
                    e.id,
                    e.name,
                    e.visit_count,
                    e.match_level
                );
                if !e.description.is_empty() {
                    let _ = writeln!(s, "         {}", e.description.replace('\n', " "));
                }
            }
            None => {
                let _ = writeln!(s, "frame {}: (empty)", slot + 1);
            }
        }
    }
    let _ = writeln!(
        s,
        "frame {} (ZERO priority): {} page(s)",
        FRAME_CAPACITY + 1,
        r.zero_frame.len()
    );
    for e in &r.zero_frame {
        let _ = writeln!(s, "    [{}] {}  level={}", e.id, e.name, e.match_level);
    }
    s
}

fn ingest(dir: &Path, docs_dir: &Path, weighting: Weighting, stopwords: Option<&Path>) -> Result<String, CliError> {
    let analyzer = match stopwords {
        Some(p) => Analyzer::new(StopWords::parse(&store::read_text(p)?)),
        None => Analyzer::default(),
    };
    let entries = std::fs::read_dir(docs_dir).map_err(|source| store::StoreError::Io {
        path: docs_dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Other(format!("no documents found in {}", docs_dir.display())));
    }

    let mut docs = Vec::with_capacity(files.len());
    let mut listing = String::new();
    for (i, path) in files.iter().enumerate() {
        let id = i as u64 + 1;
        docs.push(Document::new(id, store::read_text(path)?));
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let _ = writeln!(listing, "{id}\t{name}");
    }
    let vocab = Vocabulary::build(&docs, &analyzer);
    let matrix = corpus::build_correlation_matrix(
        &docs,
        &vocab,
        &analyzer,
        BuildOptions { weighting, strict: false },
    )?;

    ensure_dir(dir)?;
    store::save_matrix(&dir.join(MATRIX_FILE), &matrix)?;
    let mut terms = vocab.terms().join("\n");
    terms.push('\n');
    store::write_atomic(&dir.join(VOCABULARY_FILE), terms.as_bytes())?;
    store::write_atomic(&dir.join(DOCUMENTS_FILE), listing.as_bytes())?;
    Ok(format!(
        "ingested {} documents, {} terms ({})\n",
        matrix.n_docs(),
        matrix.n_terms(),
        match weighting {
            Weighting::Tf => "tf",
            Weighting::TfIdf => "tfidf",
        }
    ))
}

fn document_names(dir: &Path, n: usize) -> Vec<String> {
    let listed: Vec<String> = store::read_text(&dir.join(DOCUMENTS_FILE))
        .map(|t| {
            t.lines()
                .filter_map(|l| l.split_once('\t').map(|(_, name)| name.to_string()))
                .collect()
        })
        .unwrap_or_default();
    if listed.len() == n {
        listed
    } else {
        (1..=n).map(|i| format!("doc{i}")).collect()
    }
}

fn cluster(dir: &Path, config: &FccStfConfig, json: bool) -> Result<String, CliError> {
    let d = store::load_matrix(&dir.join(MATRIX_FILE))?;
    let result = coclustering::run_fcc_stf(config, &d)?;
    store::write_atomic(&dir.join(U_FILE), result.u.to_csv().as_bytes())?;
    store::write_atomic(&dir.join(V_FILE), result.v.to_csv().as_bytes())?;
    store::write_atomic(&dir.join(TRACE_FILE), coclustering::export_trace(&result.trace)?.as_bytes())?;

    let names = document_names(dir, d.n_docs());
    let summary = ClusterSummary {
        converged: result.converged,
        iterations_run: result.iterations_run,
        final_objective: result.final_objective(),
        final_max_delta_u: result.final_max_delta_u(),
        constraint_residual: result.constraint_residual(),
        clusters: config.clusters,
        n_docs: d.n_docs(),
        n_terms: d.n_terms(),
        documents: (0..d.n_docs())
            .map(|i| {
                let c = result.u.argmax(i);
                DocAssignment {
                    doc: i + 1,
                    name: names[i].clone(),
                    cluster: c + 1,
                    membership: result.u.get(c, i),
                }
            })
            .collect(),
    };
    if json {
        let mut s = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Other(e.to_string()))?;
        s.push('\n');
        return Ok(s);
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} after {} iteration(s): max |dU| = {:.6e} (E = {:e})",
        if summary.converged { "converged" } else { "did not converge" },
        summary.iterations_run,
        summary.final_max_delta_u,
        config.epsilon
    );
    let _ = writeln!(s, "J = {:.6}", summary.final_objective);
    let _ = writeln!(s, "constraint residual = {:.3e}", summary.constraint_residual);
    let _ = writeln!(s, "C = {}, documents = {}, words = {}", summary.clusters, summary.n_docs, summary.n_terms);
    for a in &summary.documents {
        let _ = writeln!(s, "doc {} ({}): cluster {} membership {:.6}", a.doc, a.name, a.cluster, a.membership);
    }
    let _ = writeln!(s, "wrote {U_FILE}, {V_FILE}, {TRACE_FILE}");
    Ok(s)
}
