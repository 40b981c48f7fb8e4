//! Command-line front end: `stats`, `build`, `choose` and `evaluate`.
//!
//! Settings come from built-in defaults, then an optional TOML config file
//! (`--config`, or the `LEXCHOICE_CONFIG` environment variable), then
//! command-line flags. Relative paths inside a config file are resolved
//! against the file's directory.
//!
//! Every output file is written to a temporary file next to its target
//! and renamed into place.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::choice::{choose, Candidate, CandidateSet, GapSentence, ScoreOptions, GAP_SURFACE};
use crate::cooc_stats::{count_pairs, PairCounts, SignificanceThresholds, WindowConfig};
use crate::corpus::{
    build_vocabulary, read_corpus_files, CorpusConfig, TagFormat, Token, Vocabulary,
    DEFAULT_STOP_TAGS, DEFAULT_STOP_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::eval::{run_sweep, SweepGrid, SweepParams, SynonymSet};
use crate::network::{build_network, CoocNetwork, NetworkCaps};

pub const CONFIG_ENV: &str = "LEXCHOICE_CONFIG";
pub const VOCAB_FILE: &str = "vocab.tsv";
pub const PAIRS_FILE: &str = "pairs.tsv";
pub const NETWORK_EXT: &str = "net";

#[derive(Debug, Parser)]
#[command(name = "lexchoice", version, about = "Near-synonym choice with lexical co-occurrence networks")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count words and windowed word pairs in a tagged corpus.
    Stats(StatsArgs),
    /// Build co-occurrence networks for root words.
    Build(BuildArgs),
    /// Rank candidate words for the gap (`___`) in a sentence.
    Choose(ChooseArgs),
    /// Run the gap-fill evaluation over a window/order grid.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args, Default)]
pub struct CorpusFlags {
    /// Stop words: tokens with raw frequency above this.
    #[arg(long)]
    pub max_freq: Option<u64>,
    /// Corpus layout: `slash` or `tsv`.
    #[arg(long)]
    pub format: Option<TagFormat>,
}

#[derive(Debug, Args, Default)]
pub struct NetworkFlags {
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub mi_min: Option<f64>,
    /// Node and edge limits per network, as `NODES,EDGES`.
    #[arg(long, value_parser = parse_caps)]
    pub depth_caps: Option<NetworkCaps>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Tagged corpus files, concatenated in order.
    pub corpus: Vec<PathBuf>,
    /// Output directory for the vocabulary and pair counts.
    #[arg(long)]
    pub out: PathBuf,
    /// Window half-width (positions on each side).
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub cross_sentences: bool,
    #[command(flatten)]
    pub corpus_flags: CorpusFlags,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Directory written by `stats`.
    #[arg(long)]
    pub counts: PathBuf,
    /// Root word; repeat for several networks.
    #[arg(long = "root", required = true)]
    pub roots: Vec<String>,
    /// Maximum relation order (network depth).
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub network: NetworkFlags,
}

#[derive(Debug, Args)]
pub struct ChooseArgs {
    /// Directory holding one network file per candidate.
    #[arg(long)]
    pub networks: PathBuf,
    /// Comma-separated candidate words.
    #[arg(long, value_delimiter = ',', required = true)]
    pub candidates: Vec<String>,
    /// Sentence with `___` at the gap; tokens may be tagged `word/TAG`.
    #[arg(long)]
    pub sentence: String,
    /// Evidence words listed per candidate.
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    /// Only words within this many positions of the gap count.
    #[arg(long)]
    pub sentence_window: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Default)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub training: Vec<PathBuf>,
    #[arg(long)]
    pub held_out: Vec<PathBuf>,
    /// Accuracy table output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Per-instance JSON-lines log output.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Window half-width; repeat to sweep several.
    #[arg(long = "window")]
    pub windows: Vec<usize>,
    /// Maximum order; repeat to sweep several.
    #[arg(long = "order")]
    pub orders: Vec<u32>,
    #[arg(long)]
    pub sentence_window: Option<usize>,
    #[command(flatten)]
    pub corpus_flags: CorpusFlags,
    #[command(flatten)]
    pub network: NetworkFlags,
}

fn parse_caps(s: &str) -> std::result::Result<NetworkCaps, String> {
    let (n, e) = s
        .split_once(',')
        .ok_or_else(|| "expected NODES,EDGES".to_string())?;
    Ok(NetworkCaps {
        max_nodes: n.trim().parse().map_err(|_| format!("bad node cap `{n}`"))?,
        max_edges: e.trim().parse().map_err(|_| format!("bad edge cap `{e}`"))?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub format: TagFormat,
    pub stop_threshold: u64,
    pub stop_pos_tags: Vec<String>,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            format: TagFormat::Slash,
            stop_threshold: DEFAULT_STOP_THRESHOLD,
            stop_pos_tags: DEFAULT_STOP_TAGS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub order: u32,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection { order: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSection {
    pub id: String,
    pub pos: String,
    pub words: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub training: Vec<PathBuf>,
    pub held_out: Vec<PathBuf>,
    pub report: Option<PathBuf>,
    pub log: Option<PathBuf>,
    pub grid: Option<SweepGrid>,
    pub sentence_window: Option<usize>,
}

/// Everything a run can be configured with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: CorpusSection,
    pub window: WindowConfig,
    pub thresholds: SignificanceThresholds,
    pub caps: NetworkCaps,
    pub network: NetworkSection,
    pub evaluate: EvaluateSection,
    pub sets: Vec<SetSection>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: CorpusSection::default(),
            window: WindowConfig::narrow(),
            thresholds: SignificanceThresholds::default(),
            caps: NetworkCaps::default(),
            network: NetworkSection::default(),
            evaluate: EvaluateSection::default(),
            sets: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidInput(e.to_string()).in_file(path))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let ev = &mut cfg.evaluate;
        ev.training.iter_mut().for_each(resolve);
        ev.held_out.iter_mut().for_each(resolve);
        ev.report.iter_mut().for_each(resolve);
        ev.log.iter_mut().for_each(resolve);
        Ok(cfg)
    }

    pub fn corpus_config(&self) -> Result<CorpusConfig> {
        CorpusConfig::new(
            self.corpus.format,
            self.corpus.stop_threshold,
            self.corpus.stop_pos_tags.iter().cloned(),
        )
    }

    fn apply_corpus_flags(&mut self, f: &CorpusFlags) {
        if let Some(v) = f.max_freq {
            self.corpus.stop_threshold = v;
        }
        if let Some(v) = f.format {
            self.corpus.format = v;
        }
    }

    fn apply_network_flags(&mut self, f: &NetworkFlags) -> Result<()> {
        self.thresholds = SignificanceThresholds::new(
            f.t_min.unwrap_or(self.thresholds.t_min),
            f.mi_min.unwrap_or(self.thresholds.mi_min),
        )?;
        if let Some(c) = f.depth_caps {
            self.caps = c;
        }
        Ok(())
    }
}

/// Runs a parsed command line, writing normal output to `out` and
/// per-item diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Stats(args) => {
            cfg.apply_corpus_flags(&args.corpus_flags);
            if let Some(k) = args.window {
                cfg.window.half_width = k;
            }
            cfg.window.cross_sentences |= args.cross_sentences;
            cmd_stats(&args.corpus, &cfg, &args.out, out)
        }
        Command::Build(args) => {
            cfg.apply_network_flags(&args.network)?;
            if let Some(d) = args.order {
                cfg.network.order = d;
            }
            cmd_build(&args.counts, &args.roots, &cfg, &args.out, out, err)
        }
        Command::Choose(args) => cmd_choose(&args, &cfg, out),
        Command::Evaluate(args) => {
            cfg.apply_corpus_flags(&args.corpus_flags);
            cfg.apply_network_flags(&args.network)?;
            let ev = &mut cfg.evaluate;
            if !args.training.is_empty() {
                ev.training = args.training;
            }
            if !args.held_out.is_empty() {
                ev.held_out = args.held_out;
            }
            if args.report.is_some() {
                ev.report = args.report;
            }
            if args.log.is_some() {
                ev.log = args.log;
            }
            if args.sentence_window.is_some() {
                ev.sentence_window = args.sentence_window;
            }
            let mut grid = ev.grid.take().unwrap_or_default();
            if !args.windows.is_empty() {
                grid.windows = args.windows;
            }
            if !args.orders.is_empty() {
                grid.orders = args.orders;
            }
            ev.grid = Some(grid);
            cmd_evaluate(&cfg, out)
        }
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn render<F>(f: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

fn say(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_stats(corpus: &[PathBuf], cfg: &RunConfig, out_dir: &Path, out: &mut dyn Write) -> Result<()> {
    let ccfg = cfg.corpus_config()?;
    let window = WindowConfig::new(cfg.window.half_width, cfg.window.cross_sentences)?;
    let mut ts = read_corpus_files(corpus, &ccfg)?;
    let vocab = build_vocabulary(&mut ts, &ccfg);
    let counts = count_pairs(&ts, &vocab, window);
    write_atomic(&out_dir.join(VOCAB_FILE), &render(|b| vocab.write_to(b)))?;
    write_atomic(&out_dir.join(PAIRS_FILE), &render(|b| counts.write_to(b)))?;
    say(
        out,
        format_args!(
            "N={} vocabulary={} pairs={}",
            vocab.total_tokens(),
            vocab.len(),
            counts.pair_count()
        ),
    )
}

/// Reads the vocabulary and pair counts written by `stats`.
pub fn load_counts(dir: &Path) -> Result<(Vocabulary, PairCounts)> {
    let vpath = dir.join(VOCAB_FILE);
    let ppath = dir.join(PAIRS_FILE);
    let vfile = File::open(&vpath).map_err(|e| Error::io(&vpath, e))?;
    let vocab = Vocabulary::read_from(vfile).map_err(|e| e.in_file(&vpath))?;
    let pfile = File::open(&ppath).map_err(|e| Error::io(&ppath, e))?;
    let counts = PairCounts::read_from(pfile, &vocab).map_err(|e| e.in_file(&ppath))?;
    Ok((vocab, counts))
}

/// File name for a word's network. Bytes outside `[a-z0-9_-]` are
/// percent-encoded so any surface maps to a safe, distinct name.
pub fn network_file_name(word: &str) -> String {
    let mut name = String::new();
    for b in word.bytes() {
        match b {
            b'a'..=b'z' | b'0'..=b'9' | b'_' | b'-' => name.push(b as char),
            _ => name.push_str(&format!("%{b:02X}")),
        }
    }
    format!("{name}.{NETWORK_EXT}")
}

pub fn cmd_build(
    counts_dir: &Path,
    roots: &[String],
    cfg: &RunConfig,
    out_dir: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let (_, counts) = load_counts(counts_dir)?;
    let mut failed = Vec::new();
    for root in roots {
        let root = root.to_lowercase();
        match build_network(&root, &counts, &cfg.thresholds, cfg.network.order, cfg.caps) {
            Ok(net) => {
                let path = out_dir.join(network_file_name(&root));
                write_atomic(&path, &render(|b| net.write_to(b)))?;
                say(
                    out,
                    format_args!(
                        "{}\tnodes={}\tedges={}{}",
                        root,
                        net.node_count(),
                        net.edge_count(),
                        if net.is_truncated() { "\ttruncated" } else { "" }
                    ),
                )?;
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                failed.push(root);
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "no network built for: {}",
            failed.join(", ")
        )))
    }
}

pub fn load_network(dir: &Path, word: &str) -> Result<CoocNetwork> {
    let path = dir.join(network_file_name(word));
    let file = File::open(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::InvalidInput(format!(
            "no network for candidate `{word}` (expected {})",
            path.display()
        )),
        _ => Error::io(&path, e),
    })?;
    let net = CoocNetwork::read_from(BufReader::new(file)).map_err(|e| e.in_file(&path))?;
    if net.root() != word {
        return Err(Error::InvalidInput(format!(
            "{} holds the network of `{}`, not `{word}`",
            path.display(),
            net.root()
        ))
        .in_file(&path));
    }
    Ok(net)
}

/// Parses a command-line sentence. Tokens are `word/TAG` or bare words;
/// exactly one token must be the gap marker `___`.
pub fn parse_gap_sentence(text: &str, ccfg: &CorpusConfig) -> Result<GapSentence> {
    let mut tokens = Vec::new();
    let mut gap = None;
    for raw in text.split_whitespace() {
        let (surface, pos) = match raw.rsplit_once('/') {
            Some((s, t)) if !s.is_empty() && !t.is_empty() => (s, t),
            _ => (raw, ""),
        };
        if surface == GAP_SURFACE {
            if gap.replace(tokens.len()).is_some() {
                return Err(Error::InvalidInput("sentence has more than one gap".to_string()));
            }
        }
        tokens.push(Token {
            surface: surface.to_lowercase(),
            pos: pos.to_string(),
            is_stop: ccfg.is_stop_tag(pos),
            sentence_id: 0,
        });
    }
    let gap = gap.ok_or_else(|| {
        Error::InvalidInput(format!("sentence has no gap marker `{GAP_SURFACE}`"))
    })?;
    GapSentence::new(tokens, gap)
}

pub fn cmd_choose(args: &ChooseArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let ccfg = cfg.corpus_config()?;
    let members = args
        .candidates
        .iter()
        .map(|w| {
            let word = w.trim().to_lowercase();
            let net = load_network(&args.networks, &word)?;
            Ok(Candidate {
                frequency: net.meta().root_freq,
                word,
                network: Arc::new(net),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cands = CandidateSet::new(members)?;
    let sentence = parse_gap_sentence(&args.sentence, &ccfg)?;
    let opts = ScoreOptions {
        sentence_window: args.sentence_window.or(cfg.evaluate.sentence_window),
    };
    let ranking = choose(&cands, &sentence, &opts)?;

    if args.json {
        #[derive(Serialize)]
        struct Row<'a> {
            rank: usize,
            candidate: &'a str,
            score: f64,
            frequency: u64,
            evidence: Vec<EvidenceRow<'a>>,
        }
        #[derive(Serialize)]
        struct EvidenceRow<'a> {
            word: &'a str,
            sig: f64,
            order: u32,
            occurrences: usize,
        }
        #[derive(Serialize)]
        struct Report<'a> {
            winner: &'a str,
            baseline_fallback: bool,
            ranking: Vec<Row<'a>>,
        }
        let report = Report {
            winner: &ranking.winner().candidate,
            baseline_fallback: ranking.baseline_fallback,
            ranking: ranking
                .scores
                .iter()
                .enumerate()
                .map(|(i, s)| Row {
                    rank: i + 1,
                    candidate: &s.candidate,
                    score: s.total,
                    frequency: s.frequency,
                    evidence: s
                        .top_evidence(args.top)
                        .into_iter()
                        .map(|(w, e)| EvidenceRow {
                            word: w,
                            sig: e.sig,
                            order: e.order,
                            occurrences: e.occurrences,
                        })
                        .collect(),
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&report).expect("serializable report");
        return say(out, format_args!("{text}"));
    }

    for (i, s) in ranking.scores.iter().enumerate() {
        say(
            out,
            format_args!("{}\t{}\tM={:.6}\tfreq={}", i + 1, s.candidate, s.total, s.frequency),
        )?;
        for (w, e) in s.top_evidence(args.top) {
            say(
                out,
                format_args!(
                    "\t\t{w}\tsig={:.6}\torder={}\tx{}",
                    e.sig, e.order, e.occurrences
                ),
            )?;
        }
    }
    if ranking.baseline_fallback {
        say(
            out,
            format_args!(
                "winner: {} (baseline fallback: no candidate has evidence in this sentence)",
                ranking.winner().candidate
            ),
        )
    } else {
        say(out, format_args!("winner: {}", ranking.winner().candidate))
    }
}

fn check_disjoint(training: &[PathBuf], held_out: &[PathBuf]) -> Result<()> {
    let canon = |p: &PathBuf| fs::canonicalize(p).map_err(|e| Error::io(p, e));
    let train: BTreeSet<PathBuf> = training.iter().map(canon).collect::<Result<_>>()?;
    for p in held_out {
        if train.contains(&canon(p)?) {
            return Err(Error::InvalidInput(format!(
                "held-out corpus {} is also a training corpus; evaluation needs unseen text",
                p.display()
            )));
        }
    }
    Ok(())
}

/// Runs the evaluation sweep and returns the report table and the
/// per-instance log, without writing them.
pub fn evaluate_to_strings(cfg: &RunConfig) -> Result<(String, String)> {
    let ev = &cfg.evaluate;
    if ev.training.is_empty() || ev.held_out.is_empty() {
        return Err(Error::InvalidInput(
            "evaluation needs training and held-out corpora".to_string(),
        ));
    }
    if cfg.sets.is_empty() {
        return Err(Error::InvalidInput("no synonym sets configured".to_string()));
    }
    check_disjoint(&ev.training, &ev.held_out)?;
    let ccfg = cfg.corpus_config()?;
    let mut training = read_corpus_files(&ev.training, &ccfg)?;
    let vocab = build_vocabulary(&mut training, &ccfg);
    let mut held_out = read_corpus_files(&ev.held_out, &ccfg)?;
    vocab.apply_stop_policy(&mut held_out, &ccfg);

    let sets = cfg
        .sets
        .iter()
        .map(|s| SynonymSet::from_vocabulary(&s.id, &s.pos, &s.words, &vocab))
        .collect::<Result<Vec<_>>>()?;
    let params = SweepParams {
        grid: ev.grid.clone().unwrap_or_default(),
        cross_sentences: cfg.window.cross_sentences,
        thresholds: cfg.thresholds,
        caps: cfg.caps,
        score: ScoreOptions {
            sentence_window: ev.sentence_window,
        },
    };
    let result = run_sweep(&training, &vocab, &sets, &held_out, &params)?;

    let join = |ps: &[PathBuf]| {
        ps.iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut header = vec![
        "lexchoice evaluation".to_string(),
        format!("training: {}", join(&ev.training)),
        format!("held_out: {}", join(&ev.held_out)),
        format!(
            "training_tokens={} held_out_tokens={}",
            training.len(),
            held_out.len()
        ),
        format!(
            "t_min={} mi_min={} stop_threshold={} cross_sentences={} max_nodes={} max_edges={} sentence_window={}",
            cfg.thresholds.t_min,
            cfg.thresholds.mi_min,
            ccfg.stop_threshold,
            cfg.window.cross_sentences,
            cfg.caps.max_nodes,
            cfg.caps.max_edges,
            ev.sentence_window.map_or("all".to_string(), |k| k.to_string()),
        ),
    ];
    for set in &sets {
        let members: Vec<String> = set
            .members
            .iter()
            .map(|m| format!("{} ({})", m.word, m.frequency))
            .collect();
        header.push(format!("set {} {}: {}", set.id, set.pos, members.join(", ")));
    }
    if !result.empty_roots.is_empty() {
        let words: Vec<&str> = result.empty_roots.iter().map(String::as_str).collect();
        header.push(format!(
            "no network (unknown or stop word in training): {}",
            words.join(", ")
        ));
    }
    Ok((result.render_table(&header), result.render_log()))
}

pub fn cmd_evaluate(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let (table, log) = evaluate_to_strings(cfg)?;
    if let Some(path) = &cfg.evaluate.report {
        write_atomic(path, table.as_bytes())?;
    }
    if let Some(path) = &cfg.evaluate.log {
        write_atomic(path, log.as_bytes())?;
    }
    out.write_all(table.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}
