//! Tagged corpus ingestion, stop-word policy and vocabulary counts.
//!
//! Two input layouts are understood:
//!
//! * `slash`: one sentence per line, tokens written `surface/TAG` and
//!   separated by whitespace. The tag is everything after the last `/`, so
//!   `and/or/CC` has surface `and/or`.
//! * `tsv`: one token per line as `surface<TAB>TAG`, a blank line ends a
//!   sentence.
//!
//! Surfaces are lowercased; tags are kept verbatim. A token is a stop word
//! when its tag is in [`CorpusConfig::stop_pos_tags`] or, once a
//! [`Vocabulary`] is known, when the word's raw frequency exceeds the stop
//! threshold. Stop tokens stay in the stream so that window distances are
//! measured over the original text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency above which a word is a stop word in the default configuration.
pub const DEFAULT_STOP_THRESHOLD: u64 = 800;

/// Penn Treebank tags for numbers, symbols/punctuation and proper nouns.
pub const DEFAULT_STOP_TAGS: &[&str] = &[
    "CD", "SYM", "NNP", "NNPS", "$", "#", ".", ",", ":", "``", "''", "(", ")", "-LRB-", "-RRB-",
    "-NONE-", "LS",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagFormat {
    #[default]
    Slash,
    Tsv,
}

impl FromStr for TagFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slash" => Ok(TagFormat::Slash),
            "tsv" => Ok(TagFormat::Tsv),
            other => Err(Error::InvalidInput(format!(
                "unknown tag format `{other}` (expected `slash` or `tsv`)"
            ))),
        }
    }
}

impl fmt::Display for TagFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TagFormat::Slash => "slash",
            TagFormat::Tsv => "tsv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub format: TagFormat,
    /// Words with raw frequency strictly greater than this are stop words.
    pub stop_threshold: u64,
    pub stop_pos_tags: BTreeSet<String>,
}

impl CorpusConfig {
    pub fn new(
        format: TagFormat,
        stop_threshold: u64,
        stop_pos_tags: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        if stop_threshold == 0 {
            return Err(Error::InvalidInput(
                "stop threshold must be positive".to_string(),
            ));
        }
        Ok(CorpusConfig {
            format,
            stop_threshold,
            stop_pos_tags: stop_pos_tags.into_iter().map(Into::into).collect(),
        })
    }

    pub fn is_stop_tag(&self, tag: &str) -> bool {
        self.stop_pos_tags.contains(tag)
    }
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            format: TagFormat::Slash,
            stop_threshold: DEFAULT_STOP_THRESHOLD,
            stop_pos_tags: DEFAULT_STOP_TAGS.iter().map(|t| t.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub pos: String,
    pub is_stop: bool,
    pub sentence_id: usize,
}

/// Tokens in corpus order. Sentence ids are dense and ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenStream {
    tokens: Vec<Token>,
    sentence_count: usize,
}

impl TokenStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sentence; empty sentences are dropped.
    pub fn push_sentence<I>(&mut self, words: I)
    where
        I: IntoIterator<Item = (String, String, bool)>,
    {
        let id = self.sentence_count;
        let before = self.tokens.len();
        self.tokens
            .extend(words.into_iter().map(|(surface, pos, is_stop)| Token {
                surface,
                pos,
                is_stop,
                sentence_id: id,
            }));
        if self.tokens.len() > before {
            self.sentence_count += 1;
        }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentence_count
    }

    /// Contiguous token slices, one per sentence.
    pub fn sentences(&self) -> impl Iterator<Item = &[Token]> + '_ {
        self.tokens.chunk_by(|a, b| a.sentence_id == b.sentence_id)
    }

    /// Concatenates streams in order, renumbering sentences.
    pub fn concat(streams: impl IntoIterator<Item = TokenStream>) -> TokenStream {
        let mut out = TokenStream::new();
        for stream in streams {
            let offset = out.sentence_count;
            out.sentence_count += stream.sentence_count;
            out.tokens.extend(stream.tokens.into_iter().map(|mut t| {
                t.sentence_id += offset;
                t
            }));
        }
        out
    }

    /// Writes the stream back out in `format`. Stop flags are not written;
    /// they are recomputed on ingestion.
    pub fn write_to<W: Write>(&self, mut w: W, format: TagFormat) -> io::Result<()> {
        for sentence in self.sentences() {
            match format {
                TagFormat::Slash => {
                    let line: Vec<String> = sentence
                        .iter()
                        .map(|t| format!("{}/{}", t.surface, t.pos))
                        .collect();
                    writeln!(w, "{}", line.join(" "))?;
                }
                TagFormat::Tsv => {
                    for t in sentence {
                        writeln!(w, "{}\t{}", t.surface, t.pos)?;
                    }
                    writeln!(w)?;
                }
            }
        }
        Ok(())
    }
}

/// Parses tagged text into a token stream. Stop flags reflect only the tag
/// policy until [`build_vocabulary`] or [`Vocabulary::apply_stop_policy`]
/// runs over the stream.
pub fn ingest(raw: &str, cfg: &CorpusConfig) -> Result<TokenStream> {
    ingest_reader(raw.as_bytes(), cfg)
}

pub fn ingest_reader<R: BufRead>(reader: R, cfg: &CorpusConfig) -> Result<TokenStream> {
    let mut stream = TokenStream::new();
    match cfg.format {
        TagFormat::Slash => {
            for (idx, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| Error::format(idx + 1, 1, e.to_string()))?;
                let mut sentence = Vec::new();
                for (byte_off, raw) in split_with_offsets(&line) {
                    let column = line[..byte_off].chars().count() + 1;
                    let (surface, tag) = split_slash_token(raw)
                        .ok_or_else(|| {
                            Error::format(
                                idx + 1,
                                column,
                                format!("token `{raw}` is not of the form surface/TAG"),
                            )
                        })?;
                    sentence.push(make_token(surface, tag, cfg));
                }
                stream.push_sentence(sentence);
            }
        }
        TagFormat::Tsv => {
            let mut sentence = Vec::new();
            for (idx, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| Error::format(idx + 1, 1, e.to_string()))?;
                let trimmed = line.trim_end_matches('\r');
                if trimmed.trim().is_empty() {
                    stream.push_sentence(std::mem::take(&mut sentence));
                    continue;
                }
                let mut fields = trimmed.split('\t');
                let surface = fields.next().unwrap_or("");
                let tag = fields.next();
                match tag {
                    Some(tag) if !surface.is_empty() && !tag.is_empty() => {
                        sentence.push(make_token(surface, tag, cfg))
                    }
                    _ => {
                        let column = if surface.is_empty() {
                            1
                        } else {
                            surface.chars().count() + 1
                        };
                        return Err(Error::format(
                            idx + 1,
                            column,
                            format!("line `{trimmed}` is not of the form surface<TAB>TAG"),
                        ));
                    }
                }
            }
            stream.push_sentence(sentence);
        }
    }
    Ok(stream)
}

/// Reads several corpus files in parallel and concatenates them in the given
/// order.
pub fn read_corpus_files<P: AsRef<Path> + Sync>(
    paths: &[P],
    cfg: &CorpusConfig,
) -> Result<TokenStream> {
    let streams = paths
        .par_iter()
        .map(|p| {
            let path = p.as_ref();
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            ingest_reader(BufReader::new(file), cfg).map_err(|e| e.in_file(path))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TokenStream::concat(streams))
}

fn split_with_offsets(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let base = line.as_ptr() as usize;
    line.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - base, tok))
}

fn split_slash_token(raw: &str) -> Option<(&str, &str)> {
    let (surface, tag) = raw.rsplit_once('/')?;
    if surface.is_empty() || tag.is_empty() {
        None
    } else {
        Some((surface, tag))
    }
}

fn make_token(surface: &str, tag: &str, cfg: &CorpusConfig) -> (String, String, bool) {
    (surface.to_lowercase(), tag.to_string(), cfg.is_stop_tag(tag))
}

/// Per-word counts: every occurrence, and occurrences whose tag is not a
/// stop tag.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WordCount {
    pub total: u64,
    pub content: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    counts: BTreeMap<String, WordCount>,
    total_tokens: u64,
    stop_threshold: u64,
}

/// Counts every token of `ts` and recomputes its stop flags from the
/// resulting frequencies.
pub fn build_vocabulary(ts: &mut TokenStream, cfg: &CorpusConfig) -> Vocabulary {
    let vocab = Vocabulary::count(ts, cfg);
    vocab.apply_stop_policy(ts, cfg);
    vocab
}

impl Vocabulary {
    pub fn empty(stop_threshold: u64) -> Self {
        Vocabulary {
            counts: BTreeMap::new(),
            total_tokens: 0,
            stop_threshold,
        }
    }

    /// Counts tokens without touching the stream's flags.
    pub fn count(ts: &TokenStream, cfg: &CorpusConfig) -> Self {
        let mut vocab = Vocabulary::empty(cfg.stop_threshold);
        for t in ts.tokens() {
            let entry = vocab.counts.entry(t.surface.clone()).or_default();
            entry.total += 1;
            if !cfg.is_stop_tag(&t.pos) {
                entry.content += 1;
            }
        }
        vocab.total_tokens = ts.len() as u64;
        vocab
    }

    /// Sets `is_stop` on every token of `ts` from its tag and this
    /// vocabulary's frequencies.
    pub fn apply_stop_policy(&self, ts: &mut TokenStream, cfg: &CorpusConfig) {
        for t in &mut ts.tokens {
            t.is_stop = cfg.is_stop_tag(&t.pos) || self.freq(&t.surface) > self.stop_threshold;
        }
    }

    /// Adds another partial count. Both sides must use the same threshold.
    pub fn merge(&mut self, other: &Vocabulary) -> Result<()> {
        if self.stop_threshold != other.stop_threshold {
            return Err(Error::InvalidInput(format!(
                "cannot merge vocabularies with stop thresholds {} and {}",
                self.stop_threshold, other.stop_threshold
            )));
        }
        for (word, c) in &other.counts {
            let entry = self.counts.entry(word.clone()).or_default();
            entry.total += c.total;
            entry.content += c.content;
        }
        self.total_tokens += other.total_tokens;
        Ok(())
    }

    pub fn freq(&self, word: &str) -> u64 {
        self.counts.get(word).map_or(0, |c| c.total)
    }

    pub fn word_count(&self, word: &str) -> Option<WordCount> {
        self.counts.get(word).copied()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn stop_threshold(&self) -> u64 {
        self.stop_threshold
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn is_frequency_stopped(&self, word: &str) -> bool {
        self.freq(word) > self.stop_threshold
    }

    /// A word can take part in co-occurrence relations when it is known,
    /// under the frequency threshold, and occurs at least once with a
    /// non-stop tag.
    pub fn is_content_word(&self, word: &str) -> bool {
        match self.counts.get(word) {
            Some(c) => c.content > 0 && c.total <= self.stop_threshold,
            None => false,
        }
    }

    /// Words in lexicographic order with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (&str, WordCount)> + '_ {
        self.counts.iter().map(|(w, c)| (w.as_str(), *c))
    }

    /// Writes `N=<total>` and `F=<threshold>` header lines followed by one
    /// `word<TAB>count<TAB>content-count` line per word, sorted by word.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "N={}", self.total_tokens)?;
        writeln!(w, "F={}", self.stop_threshold)?;
        for (word, c) in &self.counts {
            writeln!(w, "{}\t{}\t{}", word, c.total, c.content)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines().enumerate();
        let mut header = |key: &str| -> Result<u64> {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| Error::format(1, 1, format!("missing `{key}=` header")))?;
            let line = line.map_err(|e| Error::format(idx + 1, 1, e.to_string()))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::format(idx + 1, 1, format!("expected `{key}=<count>`")))
        };
        let total_tokens = header("N")?;
        let stop_threshold = header("F")?;
        let mut counts = BTreeMap::new();
        let mut sum = 0u64;
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::format(idx + 1, 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let parse = |i: usize| -> Result<u64> {
                fields
                    .get(i)
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| Error::format(idx + 1, 1, "expected word<TAB>count<TAB>count"))
            };
            let total = parse(1)?;
            // The content column is optional; without it every occurrence counts.
            let content = if fields.len() > 2 { parse(2)? } else { total };
            if fields[0].is_empty() || content > total {
                return Err(Error::format(idx + 1, 1, "malformed vocabulary entry"));
            }
            sum += total;
            counts.insert(fields[0].to_string(), WordCount { total, content });
        }
        if sum != total_tokens {
            return Err(Error::format(
                1,
                1,
                format!("word counts sum to {sum}, header says N={total_tokens}"),
            ));
        }
        Ok(Vocabulary {
            counts,
            total_tokens,
            stop_threshold,
        })
    }
}
