//! Scoring near-synonym candidates for a gap.
//!
//! The evidence a sentence gives a candidate is the sum, over the
//! sentence's non-stop tokens other than the gap, of the significance of
//! each token in the candidate's own network. Repeated tokens count once
//! per occurrence.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::Token;
use crate::error::{Error, Result};
use crate::network::{significance, CoocNetwork};

/// Surface used for the blanked position.
pub const GAP_SURFACE: &str = "___";

#[derive(Clone, Debug, PartialEq)]
pub struct GapSentence {
    tokens: Vec<Token>,
    gap_index: usize,
}

impl GapSentence {
    /// Blanks `tokens[gap_index]`.
    pub fn new(mut tokens: Vec<Token>, gap_index: usize) -> Result<Self> {
        let Some(slot) = tokens.get_mut(gap_index) else {
            return Err(Error::InvalidInput(format!(
                "gap index {gap_index} outside a sentence of {} tokens",
                tokens.len()
            )));
        };
        slot.surface = GAP_SURFACE.to_string();
        slot.is_stop = true;
        Ok(GapSentence { tokens, gap_index })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn gap_index(&self) -> usize {
        self.gap_index
    }

    /// Tokens that count as evidence, with their positions.
    pub fn evidence(&self, opts: &ScoreOptions) -> impl Iterator<Item = (usize, &Token)> + '_ {
        let gap = self.gap_index;
        let window = opts.sentence_window;
        self.tokens.iter().enumerate().filter(move |(i, t)| {
            *i != gap && !t.is_stop && window.is_none_or(|k| i.abs_diff(gap) <= k)
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Only tokens within this many positions of the gap count as
    /// evidence. `None` uses the whole sentence.
    pub sentence_window: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub word: String,
    pub frequency: u64,
    pub network: Arc<CoocNetwork>,
}

/// Near-synonyms competing for a gap, each with its own network.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    members: Vec<Candidate>,
}

impl CandidateSet {
    pub fn new(members: Vec<Candidate>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a candidate set needs at least two members, got {}",
                members.len()
            )));
        }
        for m in &members {
            if m.network.root() != m.word {
                return Err(Error::InvalidInput(format!(
                    "candidate `{}` paired with the network of `{}`",
                    m.word,
                    m.network.root()
                )));
            }
        }
        let mut words: Vec<&str> = members.iter().map(|m| m.word.as_str()).collect();
        words.sort_unstable();
        if words.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate candidate".to_string()));
        }
        Ok(CandidateSet { members })
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn get(&self, word: &str) -> Option<&Candidate> {
        self.members.iter().find(|m| m.word == word)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub sig: f64,
    pub order: u32,
    pub occurrences: usize,
}

impl Evidence {
    pub fn contribution(&self) -> f64 {
        self.sig * self.occurrences as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoiceScore {
    pub candidate: String,
    pub frequency: u64,
    /// Total evidence, the sum of `per_word` contributions.
    pub total: f64,
    /// Sentence words with non-zero significance.
    pub per_word: BTreeMap<String, Evidence>,
}

impl ChoiceScore {
    /// Contributing words, strongest first.
    pub fn top_evidence(&self, n: usize) -> Vec<(&str, &Evidence)> {
        let mut v: Vec<(&str, &Evidence)> =
            self.per_word.iter().map(|(w, e)| (w.as_str(), e)).collect();
        v.sort_by(|a, b| {
            b.1.contribution()
                .total_cmp(&a.1.contribution())
                .then(a.0.cmp(b.0))
        });
        v.truncate(n);
        v
    }
}

pub fn score_candidate(net: &CoocNetwork, s: &GapSentence, opts: &ScoreOptions) -> ChoiceScore {
    let mut per_word: BTreeMap<String, Evidence> = BTreeMap::new();
    for (_, tok) in s.evidence(opts) {
        let sig = significance(net, &tok.surface);
        if sig.value > 0.0 {
            per_word
                .entry(tok.surface.clone())
                .or_insert(Evidence {
                    sig: sig.value,
                    order: sig.order,
                    occurrences: 0,
                })
                .occurrences += 1;
        }
    }
    let total = per_word.values().map(Evidence::contribution).fold(0.0, |acc, c| acc + c);
    ChoiceScore {
        candidate: net.root().to_string(),
        frequency: net.meta().root_freq,
        total,
        per_word,
    }
}

/// Candidates ranked best first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ranking {
    pub scores: Vec<ChoiceScore>,
    /// Set when no candidate received any evidence, so the order is the
    /// frequency fallback.
    pub baseline_fallback: bool,
}

impl Ranking {
    pub fn winner(&self) -> &ChoiceScore {
        &self.scores[0]
    }
}

fn rank_order(a: &ChoiceScore, b: &ChoiceScore) -> Ordering {
    b.total
        .total_cmp(&a.total)
        .then(b.frequency.cmp(&a.frequency))
        .then(a.candidate.cmp(&b.candidate))
}

/// Ranks candidates by evidence, breaking ties by higher training
/// frequency and then alphabetically.
pub fn choose(cands: &CandidateSet, s: &GapSentence, opts: &ScoreOptions) -> Result<Ranking> {
    if cands.members.is_empty() {
        return Err(Error::InvalidInput("empty candidate set".to_string()));
    }
    let mut scores: Vec<ChoiceScore> = cands
        .members
        .par_iter()
        .map(|c| {
            let mut score = score_candidate(&c.network, s, opts);
            score.candidate = c.word.clone();
            score.frequency = c.frequency;
            score
        })
        .collect();
    scores.sort_by(rank_order);
    let baseline_fallback = scores.iter().all(|s| s.total == 0.0);
    Ok(Ranking {
        scores,
        baseline_fallback,
    })
}
