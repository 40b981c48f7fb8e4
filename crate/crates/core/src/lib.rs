//! Picking the most typical near-synonym for a gap in a sentence.
//!
//! Lexical co-occurrence networks are grown from a part-of-speech tagged
//! training corpus: each candidate word is linked to the words it
//! significantly co-occurs with, those to theirs, and so on to a fixed
//! depth. A sentence then supports a candidate through every word it
//! shares with the candidate's network, weighted by how indirect the
//! relation is.
//!
//! The pipeline is
//! [`corpus`] → [`cooc_stats`] → [`network`] → [`choice`], with [`eval`]
//! running gap-fill experiments and [`cli`] wiring it all to files.

pub mod choice;
pub mod cli;
pub mod cooc_stats;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod network;

pub use choice::{choose, score_candidate, Candidate, CandidateSet, ChoiceScore, GapSentence, Ranking, ScoreOptions};
pub use cooc_stats::{
    count_pairs, is_significant, mutual_information, t_score, PairCounts, PairStats,
    SignificanceThresholds, WindowConfig,
};
pub use corpus::{build_vocabulary, ingest, CorpusConfig, TagFormat, Token, TokenStream, Vocabulary};
pub use error::{Error, Result};
pub use eval::{
    baseline_choose, chi_square, evaluate, make_gap_instances, EvalReport, GapInstance, SynonymSet,
};
pub use network::{
    build_network, max_sig_shortest_path, significance, CoocNetwork, NetworkCaps, NetworkMeta,
    SigPath, SigScore,
};
