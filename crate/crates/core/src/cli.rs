//! Batch entry points behind the `esc` binary.
//!
//! Every input is an explicit flag and outputs are never overwritten without
//! `--force`. Exit codes: 0 success, 1 input error, 2 internal error. Errors
//! are written to stderr as one JSON object per run.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::dialogue::{load_corpus, Corpus, CorpusFormat};
use crate::flow::{progress_profile, transition_matrix, FlowConfig, Lexicon};
use crate::graph::{graph_stats, load_graph, GraphError, KnowledgeGraph};
use crate::metrics::corpus_report;
use crate::retrieval::{
    brute_force_retrieve, parse_query, ranked_cases, retrieve, EmbeddingSimilarity, LexicalSimilarity,
    QueryFile, RankedCase, RetrievalConfig, RetrievalError, RetrievalOutcome, SimilarityProvider,
    DEFAULT_ORACLE_CAP,
};
use crate::seq::{encode_input, encode_output, knowledge_sections, ContextTurn, FormatError, DEFAULT_BUDGET};
use crate::text::{StopwordList, TextPipeline};

#[derive(Debug, Parser)]
#[command(name = "esc", version, about = "Emotional support conversation analytics and knowledge retrieval")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute support metrics, dialogue flow and progress series for a corpus.
    Analyze(AnalyzeArgs),
    /// Validate a knowledge graph and write its statistics.
    Index(IndexArgs),
    /// Retrieve the top-ranked case subgraphs for a query.
    Retrieve(RetrieveArgs),
    /// Write model input/output sequences for every system turn of a corpus.
    Format(FormatArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusLayout {
    Native,
    Esconv,
}

impl From<CorpusLayout> for CorpusFormat {
    fn from(l: CorpusLayout) -> Self {
        match l {
            CorpusLayout::Native => CorpusFormat::Native,
            CorpusLayout::Esconv => CorpusFormat::EsConv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Similarity {
    Lexical,
    Embedding,
}

#[derive(Debug, clap::Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = CorpusLayout::Native)]
    pub corpus_format: CorpusLayout,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub greetings: Option<PathBuf>,
    #[arg(long)]
    pub farewells: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, clap::Args)]
pub struct IndexArgs {
    /// Node records, one JSON object per line.
    #[arg(long)]
    pub nodes: PathBuf,
    /// Edge list, one tab-separated id pair per line.
    #[arg(long)]
    pub edges: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, clap::Args)]
pub struct RetrieveArgs {
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long)]
    pub nodes: PathBuf,
    #[arg(long)]
    pub edges: PathBuf,
    /// Nodes kept per type before joining.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Subgraphs returned.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Score every subgraph instead of using the per-type index.
    #[arg(long)]
    pub oracle: bool,
    /// Largest graph, in enumerable subgraphs, accepted by `--oracle`.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    pub cap: u128,
    #[arg(long, value_enum, default_value_t = Similarity::Lexical)]
    pub similarity: Similarity,
    /// Query-slot vectors for `--similarity embedding`.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Output JSON file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, clap::Args)]
pub struct FormatArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = CorpusLayout::Native)]
    pub corpus_format: CorpusLayout,
    /// Retrieved knowledge per turn, one JSON object per line.
    #[arg(long)]
    pub knowledge: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug)]
pub enum CliError {
    Input(Vec<String>),
    Internal(String),
}

impl CliError {
    fn input(msg: impl ToString) -> Self {
        CliError::Input(vec![msg.to_string()])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (kind, errors) = match self {
            CliError::Input(e) => ("input", e.clone()),
            CliError::Internal(e) => ("internal", vec![e.clone()]),
        };
        serde_json::json!({ "status": "error", "kind": kind, "errors": errors })
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Invalid(issues) => CliError::Input(issues.iter().map(|i| i.to_string()).collect()),
            io => CliError::input(io),
        }
    }
}

impl From<RetrievalError> for CliError {
    fn from(e: RetrievalError) -> Self {
        CliError::input(e)
    }
}

/// Collects output files, refusing to clobber existing ones without `--force`.
struct Outputs {
    force: bool,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    fn new(force: bool) -> Self {
        Outputs { force, files: Vec::new() }
    }

    fn add(&mut self, path: PathBuf, content: impl Into<Vec<u8>>) {
        self.files.push((path, content.into()));
    }

    fn write(self) -> Result<(), CliError> {
        if !self.force {
            let existing: Vec<String> = self
                .files
                .iter()
                .filter(|(p, _)| p.exists())
                .map(|(p, _)| format!("{} exists; pass --force to overwrite", p.display()))
                .collect();
            if !existing.is_empty() {
                return Err(CliError::Input(existing));
            }
        }
        for (path, content) in self.files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
            }
            fs::write(&path, content).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn pretty(v: &impl serde::Serialize) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn pipeline(stopwords: Option<&Path>) -> Result<TextPipeline, CliError> {
    let list = match stopwords {
        Some(p) => StopwordList::from_file(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => StopwordList::default(),
    };
    Ok(TextPipeline::new(list))
}

fn lexicon(path: Option<&Path>, default: Lexicon) -> Result<Lexicon, CliError> {
    match path {
        Some(p) => Lexicon::from_file(p).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => Ok(default),
    }
}

fn corpus(path: &Path, layout: CorpusLayout) -> Result<Corpus, CliError> {
    load_corpus(path, layout.into()).map_err(CliError::input)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<Vec<String>, CliError> {
    let c = corpus(&args.corpus, args.corpus_format)?;
    let p = pipeline(args.stopwords.as_deref())?;
    let cfg = FlowConfig {
        greetings: lexicon(args.greetings.as_deref(), Lexicon::greetings())?,
        farewells: lexicon(args.farewells.as_deref(), Lexicon::farewells())?,
    };

    let report = corpus_report(&p, &c);
    let flow = transition_matrix(&c, &cfg);
    let progress = progress_profile(&c, &cfg);

    let mut out = Outputs::new(args.force);
    match args.format {
        ReportFormat::Json => out.add(args.out.join("metrics.json"), pretty(&report.to_json())?),
        ReportFormat::Csv => out.add(args.out.join("metrics.csv"), report.to_csv()),
    }
    out.add(args.out.join("flow.json"), pretty(&flow.to_json())?);
    out.add(args.out.join("flow.dot"), flow.to_dot());
    out.add(args.out.join("transitions.csv"), flow.to_csv());
    out.add(args.out.join("progress.json"), pretty(&progress.to_json())?);
    out.add(args.out.join("progress.csv"), progress.to_csv());
    out.write()?;

    let mut warnings: Vec<String> = report.issues.iter().map(|e| e.to_string()).collect();
    if report.skipped > 0 {
        warnings.push(format!(
            "{} system utterance(s) lacked an annotated user intensity before or after and were left out of relaxation",
            report.skipped
        ));
    }
    if flow.excluded_unlabeled > 0 {
        warnings.push(format!(
            "{} body utterance(s) without an initiative label were left out of the flow graph",
            flow.excluded_unlabeled
        ));
    }
    Ok(warnings)
}

pub fn cmd_index(args: &IndexArgs) -> Result<Vec<String>, CliError> {
    let g = load_graph(&args.nodes, &args.edges)?;
    let stats = graph_stats(&g);
    let mut out = Outputs::new(args.force);
    out.add(args.out.join("graph_stats.csv"), stats.to_table_csv());
    out.add(args.out.join("graph_edges.csv"), stats.to_edge_csv());
    out.add(args.out.join("graph_stats.json"), pretty(&stats.to_json())?);
    out.write()?;
    let mut warnings = Vec::new();
    if g.duplicate_edges() > 0 {
        warnings.push(format!("{} duplicate edge(s) ignored", g.duplicate_edges()));
    }
    Ok(warnings)
}

fn provider(args: &RetrieveArgs, g: &KnowledgeGraph) -> Result<Box<dyn SimilarityProvider>, CliError> {
    match args.similarity {
        Similarity::Lexical => Ok(Box::new(LexicalSimilarity::new(pipeline(args.stopwords.as_deref())?))),
        Similarity::Embedding => {
            let path = args
                .embeddings
                .as_deref()
                .ok_or_else(|| CliError::input("--similarity embedding requires --embeddings"))?;
            if g.embedding_dim().is_none() && !g.is_empty() {
                return Err(CliError::input("graph nodes carry no embeddings"));
            }
            Ok(Box::new(EmbeddingSimilarity::from_sidecar(&read(path)?)?))
        }
    }
}

/// Runs a retrieval and returns the graph alongside the outcome.
pub fn run_retrieval(args: &RetrieveArgs) -> Result<(KnowledgeGraph, RetrievalOutcome), CliError> {
    let q = parse_query(&read(&args.query)?)?;
    let g = load_graph(&args.nodes, &args.edges)?;
    let f = provider(args, &g)?;
    let outcome = if args.oracle {
        brute_force_retrieve(&q, &g, f.as_ref(), args.n, args.cap)?
    } else {
        retrieve(&q, &g, f.as_ref(), &RetrievalConfig::new(args.k, args.n)?)?
    };
    Ok((g, outcome))
}

pub fn cmd_retrieve(args: &RetrieveArgs) -> Result<Vec<String>, CliError> {
    let (g, outcome) = run_retrieval(args)?;
    let cases = ranked_cases(&outcome.results, &g);
    let mut out = Outputs::new(args.force);
    out.add(args.out.clone(), pretty(&cases)?);
    out.write()?;
    Ok(outcome.diagnostics)
}

/// One line of the `--knowledge` file for `format`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnowledgeRecord {
    pub dialogue: String,
    /// Index of the system utterance being generated.
    pub turn: usize,
    #[serde(default)]
    pub query: Option<QueryFile>,
    #[serde(default)]
    pub cases: Vec<RankedCase>,
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn load_knowledge(path: &Path) -> Result<HashMap<(String, usize), KnowledgeRecord>, CliError> {
    let mut map = HashMap::new();
    let mut errors = Vec::new();
    for (i, line) in read(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<KnowledgeRecord>(line) {
            Ok(r) => {
                if map.insert((r.dialogue.clone(), r.turn), r).is_some() {
                    errors.push(format!("{} line {}: duplicate (dialogue, turn)", path.display(), i + 1));
                }
            }
            Err(e) => errors.push(format!("{} line {}: {e}", path.display(), i + 1)),
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(CliError::Input(errors))
    }
}

pub fn cmd_format(args: &FormatArgs) -> Result<Vec<String>, CliError> {
    let c = corpus(&args.corpus, args.corpus_format)?;
    let knowledge = match &args.knowledge {
        Some(p) => load_knowledge(p)?,
        None => HashMap::new(),
    };

    let (mut x, mut y) = (String::new(), String::new());
    let mut index = String::from("dialogue\tturn\tdropped\n");
    let mut warnings = Vec::new();
    let mut used = 0;
    for d in &c.dialogues {
        for (t, u) in d.utterances.iter().enumerate().skip(1) {
            if !u.is_system() {
                continue;
            }
            let context: Vec<ContextTurn> = d.utterances[..t]
                .iter()
                .map(|p| ContextTurn::new(p.role, normalize(&p.text)))
                .collect();
            let sections = match knowledge.get(&(d.id.clone(), t)) {
                Some(r) => {
                    used += 1;
                    let q = r.query.as_ref().map(QueryFile::to_query_graph).transpose()?;
                    let mut s = knowledge_sections(q.as_ref(), &r.cases);
                    for k in &mut s {
                        for p in k.commonsense.iter_mut().chain(k.case.iter_mut()) {
                            *p = normalize(p);
                        }
                    }
                    s
                }
                None => Vec::new(),
            };
            let encoded = match encode_input(&normalize(&d.situation), &context, &sections, args.budget) {
                Ok(e) => e,
                Err(e @ FormatError::BudgetTooSmall { .. }) => {
                    return Err(CliError::input(format!("dialogue {} turn {t}: {e}", d.id)))
                }
                Err(e) => return Err(CliError::Internal(e.to_string())),
            };
            x.push_str(&encoded.text);
            x.push('\n');
            y.push_str(&encode_output(
                &normalize(u.strategy.as_deref().unwrap_or_default()),
                &normalize(&u.text),
            ));
            y.push('\n');
            index.push_str(&format!("{}\t{t}\t{}\n", d.id, encoded.dropped));
        }
    }
    if used < knowledge.len() {
        warnings.push(format!(
            "{} knowledge record(s) matched no system turn",
            knowledge.len() - used
        ));
    }

    let mut out = Outputs::new(args.force);
    out.add(args.out.join("x.txt"), x);
    out.add(args.out.join("y.txt"), y);
    out.add(args.out.join("index.tsv"), index);
    out.write()?;
    Ok(warnings)
}

pub fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Index(a) => cmd_index(a),
        Command::Retrieve(a) => cmd_retrieve(a),
        Command::Format(a) => cmd_format(a),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
