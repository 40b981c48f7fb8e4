//! Windowed pair counting and the association statistics used to pick
//! network edges.
//!
//! With `k` positions on each side, a word has `2k` neighbour slots, so
//! the expected joint count of `x` and `y` under independence is
//! `E = f_x * f_y * 2k / N`. From it:
//!
//! * t-score: `(f_xy - E) / sqrt(f_xy)`
//! * mutual information: `log2(f_xy / E)` bits
//!
//! A pair is significant when both clear their thresholds.

use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Token, TokenStream, Vocabulary};
use crate::error::{Error, Result};

pub const DEFAULT_T_MIN: f64 = 2.0;
pub const DEFAULT_MI_MIN: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub half_width: usize,
    #[serde(default)]
    pub cross_sentences: bool,
}

impl WindowConfig {
    pub fn new(half_width: usize, cross_sentences: bool) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::InvalidInput(
                "window half-width must be at least 1".to_string(),
            ));
        }
        Ok(WindowConfig {
            half_width,
            cross_sentences,
        })
    }

    pub fn narrow() -> Self {
        WindowConfig {
            half_width: 4,
            cross_sentences: false,
        }
    }
}

/// Counts for one word pair plus the corpus-level quantities needed to
/// score it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairStats {
    pub f_xy: u64,
    pub f_x: u64,
    pub f_y: u64,
    pub n: u64,
    pub half_width: usize,
}

impl PairStats {
    pub fn expected(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::UndefinedStatistic("corpus size is zero"));
        }
        Ok(self.f_x as f64 * self.f_y as f64 * (2 * self.half_width) as f64 / self.n as f64)
    }
}

pub fn t_score(p: &PairStats) -> Result<f64> {
    if p.f_xy == 0 {
        return Err(Error::UndefinedStatistic("t-score of a pair that never co-occurs"));
    }
    let observed = p.f_xy as f64;
    Ok((observed - p.expected()?) / observed.sqrt())
}

/// Mutual information in bits. Negative when the pair is seen less often
/// than chance.
pub fn mutual_information(p: &PairStats) -> Result<f64> {
    if p.f_xy == 0 {
        return Err(Error::UndefinedStatistic(
            "mutual information of a pair that never co-occurs",
        ));
    }
    Ok((p.f_xy as f64 / p.expected()?).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceThresholds {
    pub t_min: f64,
    pub mi_min: f64,
}

impl SignificanceThresholds {
    pub fn new(t_min: f64, mi_min: f64) -> Result<Self> {
        if !(t_min > 0.0 && t_min.is_finite()) || mi_min.is_nan() {
            return Err(Error::InvalidInput(format!(
                "t_min must be a positive number (got {t_min}), mi_min must be a number"
            )));
        }
        Ok(SignificanceThresholds { t_min, mi_min })
    }
}

impl Default for SignificanceThresholds {
    fn default() -> Self {
        SignificanceThresholds {
            t_min: DEFAULT_T_MIN,
            mi_min: DEFAULT_MI_MIN,
        }
    }
}

pub fn is_significant(p: &PairStats, th: &SignificanceThresholds) -> bool {
    if p.f_xy == 0 {
        return false;
    }
    match (t_score(p), mutual_information(p)) {
        (Ok(t), Ok(mi)) => t >= th.t_min && mi >= th.mi_min,
        _ => false,
    }
}

type WordId = u32;

/// Symmetric co-occurrence counts over the words that can form pairs.
///
/// Word ids follow lexicographic order of the words, so iterating by id is
/// deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCounts {
    n_tokens: u64,
    window: WindowConfig,
    words: Vec<String>,
    freq: Vec<u64>,
    index: HashMap<String, WordId>,
    /// Neighbour lists sorted by id.
    adj: Vec<Vec<(WordId, u64)>>,
    pair_count: usize,
}

/// Counts every unordered pair of distinct non-stop words lying within
/// `w.half_width` positions of each other. Stop tokens hold their position
/// but pair with nothing.
pub fn count_pairs(ts: &TokenStream, vocab: &Vocabulary, w: WindowConfig) -> PairCounts {
    let mut counts = PairCounts::with_lexicon(vocab, w);
    let ids: Vec<Option<WordId>> = ts
        .tokens()
        .iter()
        .map(|t| if t.is_stop { None } else { counts.id(&t.surface) })
        .collect();

    let table = if w.cross_sentences {
        count_span(&ids, w.half_width)
    } else {
        let spans: Vec<(usize, usize)> = sentence_spans(ts.tokens());
        spans
            .par_iter()
            .fold(HashMap::new, |mut acc, &(start, end)| {
                for (key, c) in count_span(&ids[start..end], w.half_width) {
                    *acc.entry(key).or_insert(0) += c;
                }
                acc
            })
            .reduce(HashMap::new, merge_tables)
    };
    counts.fill(table);
    counts
}

fn sentence_spans(tokens: &[Token]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    for i in 1..=tokens.len() {
        if i == tokens.len() || tokens[i].sentence_id != tokens[start].sentence_id {
            if i > start {
                spans.push((start, i));
            }
            start = i;
        }
    }
    spans
}

fn pair_key(a: WordId, b: WordId) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

fn count_span(ids: &[Option<WordId>], k: usize) -> HashMap<u64, u64> {
    let mut table = HashMap::new();
    for (i, a) in ids.iter().enumerate() {
        let Some(a) = *a else { continue };
        let end = (i + k + 1).min(ids.len());
        for b in ids[i + 1..end].iter().flatten() {
            if *b != a {
                *table.entry(pair_key(a, *b)).or_insert(0) += 1;
            }
        }
    }
    table
}

fn merge_tables(mut a: HashMap<u64, u64>, b: HashMap<u64, u64>) -> HashMap<u64, u64> {
    if a.len() < b.len() {
        return merge_tables(b, a);
    }
    for (key, c) in b {
        *a.entry(key).or_insert(0) += c;
    }
    a
}

impl PairCounts {
    fn with_lexicon(vocab: &Vocabulary, window: WindowConfig) -> Self {
        let mut words = Vec::new();
        let mut freq = Vec::new();
        for (w, c) in vocab.iter() {
            if vocab.is_content_word(w) {
                words.push(w.to_string());
                freq.push(c.total);
            }
        }
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as WordId))
            .collect();
        PairCounts {
            n_tokens: vocab.total_tokens(),
            window,
            adj: vec![Vec::new(); words.len()],
            words,
            freq,
            index,
            pair_count: 0,
        }
    }

    fn fill(&mut self, table: HashMap<u64, u64>) {
        self.pair_count = table.len();
        for (key, c) in table {
            let (a, b) = ((key >> 32) as WordId, key as WordId);
            self.adj[a as usize].push((b, c));
            self.adj[b as usize].push((a, c));
        }
        for list in &mut self.adj {
            list.sort_unstable_by_key(|&(id, _)| id);
        }
    }

    fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn n_tokens(&self) -> u64 {
        self.n_tokens
    }

    pub fn window(&self) -> WindowConfig {
        self.window
    }

    /// Number of distinct pairs with a non-zero count.
    pub fn pair_count(&self) -> usize {
        self.pair_count
    }

    /// True when `word` can take part in pairs (known, content, not
    /// frequency-stopped).
    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn freq(&self, word: &str) -> u64 {
        self.id(word).map_or(0, |id| self.freq[id as usize])
    }

    pub fn count(&self, x: &str, y: &str) -> u64 {
        match (self.id(x), self.id(y)) {
            (Some(a), Some(b)) => self.adj[a as usize]
                .binary_search_by_key(&b, |&(id, _)| id)
                .map_or(0, |pos| self.adj[a as usize][pos].1),
            _ => 0,
        }
    }

    pub fn stats(&self, x: &str, y: &str) -> PairStats {
        PairStats {
            f_xy: self.count(x, y),
            f_x: self.freq(x),
            f_y: self.freq(y),
            n: self.n_tokens,
            half_width: self.window.half_width,
        }
    }

    /// Co-occurring words of `word` with their joint counts, in
    /// lexicographic order.
    pub fn neighbors<'a>(&'a self, word: &str) -> impl Iterator<Item = (&'a str, u64)> + 'a {
        let list = match self.id(word) {
            Some(id) => self.adj[id as usize].as_slice(),
            None => &[],
        };
        list.iter()
            .map(move |&(id, c)| (self.words[id as usize].as_str(), c))
    }

    /// All pairs `(w1, w2, f_xy)` with `w1 < w2`, sorted.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, u64)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(a, list)| {
            list.iter()
                .filter(move |&&(b, _)| b as usize > a)
                .map(move |&(b, c)| (self.words[a].as_str(), self.words[b as usize].as_str(), c))
        })
    }

    /// Header `N=<n>\tK=<k>\tCROSS=<bool>`, then `w1<TAB>w2<TAB>f_xy` lines
    /// with `w1 < w2`, sorted.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "N={}\tK={}\tCROSS={}",
            self.n_tokens, self.window.half_width, self.window.cross_sentences
        )?;
        for (a, b, c) in self.pairs() {
            writeln!(w, "{a}\t{b}\t{c}")?;
        }
        Ok(())
    }

    /// Reads a pair file; marginals come from `vocab`, which must describe
    /// the same corpus.
    pub fn read_from<R: Read>(r: R, vocab: &Vocabulary) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format(1, 1, "missing pair-count header"))?
            .map_err(|e| Error::format(1, 1, e.to_string()))?;
        let (n, k, cross) = parse_pair_header(&header)
            .ok_or_else(|| Error::format(1, 1, "expected header N=<n>\\tK=<k>\\tCROSS=<bool>"))?;
        if n != vocab.total_tokens() {
            return Err(Error::format(
                1,
                1,
                format!(
                    "pair counts were made from N={n} tokens, vocabulary has N={}",
                    vocab.total_tokens()
                ),
            ));
        }
        let window = WindowConfig::new(k, cross).map_err(|_| Error::format(1, 1, "K must be >= 1"))?;
        let mut counts = PairCounts::with_lexicon(vocab, window);
        let mut table = HashMap::new();
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line.map_err(|e| Error::format(lineno, 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(a), Some(b), Some(c), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::format(lineno, 1, "expected w1<TAB>w2<TAB>count"));
            };
            let c: u64 = c
                .parse()
                .map_err(|_| Error::format(lineno, a.len() + b.len() + 3, "bad count"))?;
            if a >= b {
                return Err(Error::format(lineno, 1, "pair words must be distinct and ordered"));
            }
            let (Some(ia), Some(ib)) = (counts.id(a), counts.id(b)) else {
                return Err(Error::format(
                    lineno,
                    1,
                    format!("pair ({a}, {b}) uses a word that cannot form pairs"),
                ));
            };
            if c > 0 && table.insert(pair_key(ia, ib), c).is_some() {
                return Err(Error::format(lineno, 1, format!("duplicate pair ({a}, {b})")));
            }
        }
        counts.fill(table);
        Ok(counts)
    }
}

fn parse_pair_header(line: &str) -> Option<(u64, usize, bool)> {
    let mut n = None;
    let mut k = None;
    let mut cross = None;
    for field in line.split('\t') {
        let (key, value) = field.split_once('=')?;
        match key {
            "N" => n = value.parse().ok(),
            "K" => k = value.parse().ok(),
            "CROSS" => cross = value.parse().ok(),
            _ => return None,
        }
    }
    Some((n?, k?, cross.unwrap_or(false)))
}
