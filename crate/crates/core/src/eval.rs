//! Gap-fill evaluation against the most-frequent-synonym baseline.
//!
//! Every occurrence of a synonym-set member in a held-out corpus becomes a
//! test instance: the occurrence is blanked and the system must restore
//! it. Accuracy is compared with always picking the member most frequent
//! in training, and the difference is tested with Pearson's chi-square on
//! the 2x2 table of (system x correct/incorrect), one degree of freedom,
//! no continuity correction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::{choose, Candidate, CandidateSet, GapSentence, ScoreOptions};
use crate::cooc_stats::{count_pairs, PairCounts, SignificanceThresholds, WindowConfig};
use crate::corpus::{TokenStream, Vocabulary};
use crate::error::{Error, Result};
use crate::network::{build_network, CoocNetwork, NetworkCaps, NetworkMeta};

/// Chi-square critical value for one degree of freedom at the 5% level.
pub const CHI2_CRITICAL_5PCT: f64 = 3.841;

/// Collapses Penn Treebank tags to the categories synonym sets are defined
/// over: inflected forms share a category, proper nouns stay apart from
/// common nouns.
pub fn coarse_pos(tag: &str) -> &str {
    match tag {
        "NNP" | "NNPS" => "NNP",
        t if t.starts_with("NN") => "NN",
        t if t.starts_with("VB") => "VB",
        t if t.starts_with("JJ") => "JJ",
        t if t.starts_with("RB") => "RB",
        t => t,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetMember {
    pub word: String,
    /// Training-corpus frequency.
    pub frequency: u64,
}

/// A synonym set as defined for an experiment, before networks exist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymSet {
    pub id: String,
    /// Coarse POS category shared by all members.
    pub pos: String,
    pub members: Vec<SetMember>,
}

impl SynonymSet {
    /// Builds a set whose member frequencies come from `vocab`.
    pub fn from_vocabulary(
        id: impl Into<String>,
        pos: &str,
        words: &[impl AsRef<str>],
        vocab: &Vocabulary,
    ) -> Result<Self> {
        let id = id.into();
        let mut seen = BTreeSet::new();
        let members: Vec<SetMember> = words
            .iter()
            .map(|w| {
                let word = w.as_ref().to_lowercase();
                SetMember {
                    frequency: vocab.freq(&word),
                    word,
                }
            })
            .collect();
        if members.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "synonym set {id} needs at least two members"
            )));
        }
        for m in &members {
            if !seen.insert(m.word.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "synonym set {id} lists `{}` twice",
                    m.word
                )));
            }
        }
        Ok(SynonymSet {
            pos: coarse_pos(pos).to_string(),
            id,
            members,
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.members.iter().any(|m| m.word == word)
    }

    /// Pairs each member with its network.
    pub fn bind(&self, mut network_of: impl FnMut(&str) -> Arc<CoocNetwork>) -> Result<CandidateSet> {
        CandidateSet::new(
            self.members
                .iter()
                .map(|m| Candidate {
                    word: m.word.clone(),
                    frequency: m.frequency,
                    network: network_of(&m.word),
                })
                .collect(),
        )
    }
}

/// The most frequent word, alphabetical on ties.
pub fn baseline_choose<'a, I>(members: I) -> Option<&'a str>
where
    I: IntoIterator<Item = (&'a str, u64)>,
{
    members
        .into_iter()
        .min_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)))
        .map(|(w, _)| w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapInstance {
    pub id: String,
    pub set_id: String,
    pub sentence: GapSentence,
    pub gold: String,
}

/// One instance per occurrence of a set member, matched on surface and
/// coarse POS. Other members in the same sentence stay visible.
pub fn make_gap_instances(held_out: &TokenStream, set: &SynonymSet) -> Vec<GapInstance> {
    let mut out = Vec::new();
    for sentence in held_out.sentences() {
        for (i, tok) in sentence.iter().enumerate() {
            if coarse_pos(&tok.pos) != set.pos || !set.contains(&tok.surface) {
                continue;
            }
            let gap = GapSentence::new(sentence.to_vec(), i).expect("index within sentence");
            out.push(GapInstance {
                id: format!("{}:{}:{}", set.id, tok.sentence_id, i),
                set_id: set.id.clone(),
                sentence: gap,
                gold: tok.surface.clone(),
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub chi2: f64,
    pub significant_at_5pct: bool,
}

/// Pearson's chi-square for two proportions `correct_a / n_a` and
/// `correct_b / n_b`. A table with an empty margin yields zero.
pub fn chi_square(correct_a: u64, n_a: u64, correct_b: u64, n_b: u64) -> Result<ChiSquare> {
    if n_a == 0 || n_b == 0 || correct_a > n_a || correct_b > n_b {
        return Err(Error::InvalidInput(format!(
            "chi-square needs 0 <= correct <= n and n >= 1 (got {correct_a}/{n_a}, {correct_b}/{n_b})"
        )));
    }
    let (a, b) = (correct_a as f64, (n_a - correct_a) as f64);
    let (c, d) = (correct_b as f64, (n_b - correct_b) as f64);
    let n = a + b + c + d;
    let correct = a + c;
    let incorrect = b + d;
    if correct == 0.0 || incorrect == 0.0 {
        return Ok(ChiSquare {
            chi2: 0.0,
            significant_at_5pct: false,
        });
    }
    let diff = a * d - b * c;
    let chi2 = n * diff * diff / ((a + b) * (c + d) * correct * incorrect);
    Ok(ChiSquare {
        chi2,
        significant_at_5pct: chi2 > CHI2_CRITICAL_5PCT,
    })
}

/// Settings a report was produced under.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RunSettings {
    pub half_width: usize,
    pub max_order: u32,
    pub t_min: f64,
    pub mi_min: f64,
}

impl RunSettings {
    fn of(net: &CoocNetwork) -> Self {
        let m = net.meta();
        RunSettings {
            half_width: m.half_width,
            max_order: net.max_order(),
            t_min: m.thresholds.t_min,
            mi_min: m.thresholds.mi_min,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub set_id: String,
    pub sample_size: usize,
    pub correct: usize,
    pub baseline_correct: usize,
    pub accuracy: f64,
    pub baseline_accuracy: f64,
    pub chi2: f64,
    pub significant_at_5pct: bool,
    pub config: RunSettings,
}

/// Outcome of one instance, as written to the per-instance log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub instance: String,
    pub gold: String,
    pub chosen: String,
    pub baseline: String,
    pub baseline_fallback: bool,
    pub scores: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub report: EvalReport,
    pub records: Vec<InstanceRecord>,
}

pub fn evaluate(
    cands: &CandidateSet,
    instances: &[GapInstance],
    opts: &ScoreOptions,
) -> Result<Evaluation> {
    if instances.is_empty() {
        return Err(Error::InvalidInput("no gap instances to evaluate".to_string()));
    }
    let baseline = baseline_choose(
        cands
            .members()
            .iter()
            .map(|m| (m.word.as_str(), m.frequency)),
    )
    .expect("candidate sets are non-empty")
    .to_string();

    let records = instances
        .par_iter()
        .map(|inst| {
            let ranking = choose(cands, &inst.sentence, opts)?;
            Ok(InstanceRecord {
                instance: inst.id.clone(),
                gold: inst.gold.clone(),
                chosen: ranking.winner().candidate.clone(),
                baseline: baseline.clone(),
                baseline_fallback: ranking.baseline_fallback,
                scores: ranking
                    .scores
                    .iter()
                    .map(|s| (s.candidate.clone(), s.total))
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = records.len();
    let correct = records.iter().filter(|r| r.chosen == r.gold).count();
    let baseline_correct = records.iter().filter(|r| r.baseline == r.gold).count();
    let chi = chi_square(correct as u64, n as u64, baseline_correct as u64, n as u64)?;
    Ok(Evaluation {
        report: EvalReport {
            set_id: instances[0].set_id.clone(),
            sample_size: n,
            correct,
            baseline_correct,
            accuracy: correct as f64 / n as f64,
            baseline_accuracy: baseline_correct as f64 / n as f64,
            chi2: chi.chi2,
            significant_at_5pct: chi.significant_at_5pct,
            config: RunSettings::of(&cands.members()[0].network),
        },
        records,
    })
}

/// Window sizes and maximum orders to evaluate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub windows: Vec<usize>,
    pub orders: Vec<u32>,
    /// (window, order) cells to skip.
    #[serde(default)]
    pub omit: Vec<(usize, u32)>,
}

impl Default for SweepGrid {
    /// Narrow, medium and wide windows at orders 1 to 3, without the
    /// wide/order-3 cell.
    fn default() -> Self {
        SweepGrid {
            windows: vec![4, 10, 50],
            orders: vec![1, 2, 3],
            omit: vec![(50, 3)],
        }
    }
}

impl SweepGrid {
    pub fn cells(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.windows.iter().flat_map(move |&k| {
            self.orders
                .iter()
                .filter(move |&&d| !self.omit.contains(&(k, d)))
                .map(move |&d| (k, d))
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepParams {
    pub grid: SweepGrid,
    pub cross_sentences: bool,
    pub thresholds: SignificanceThresholds,
    pub caps: NetworkCaps,
    pub score: ScoreOptions,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            grid: SweepGrid::default(),
            cross_sentences: false,
            thresholds: SignificanceThresholds::default(),
            caps: NetworkCaps::default(),
            score: ScoreOptions::default(),
        }
    }
}

/// Results of one (window, order) cell: one entry per set, `None` when the
/// set has no instances.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub half_width: usize,
    pub max_order: u32,
    pub evaluations: Vec<Option<Evaluation>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub sets: Vec<SynonymSet>,
    pub instance_counts: Vec<usize>,
    /// Baseline accuracy per set; `None` without instances.
    pub baseline: Vec<Option<f64>>,
    pub cells: Vec<SweepCell>,
    /// Candidate words that could not root a network (unknown or stop
    /// words in training); they were scored with a root-only network.
    pub empty_roots: BTreeSet<String>,
}

/// Builds networks for every set member at each grid cell from the
/// training stream and evaluates them on the held-out instances.
///
/// `training` must already carry stop flags from `vocab`.
pub fn run_sweep(
    training: &TokenStream,
    vocab: &Vocabulary,
    sets: &[SynonymSet],
    held_out: &TokenStream,
    params: &SweepParams,
) -> Result<SweepResult> {
    let instances: Vec<Vec<GapInstance>> =
        sets.iter().map(|s| make_gap_instances(held_out, s)).collect();
    let roots: BTreeSet<&str> = sets
        .iter()
        .flat_map(|s| s.members.iter().map(|m| m.word.as_str()))
        .collect();
    let mut empty_roots = BTreeSet::new();
    let baseline = sets
        .iter()
        .zip(&instances)
        .map(|(set, inst)| {
            if inst.is_empty() {
                return None;
            }
            let base = baseline_choose(set.members.iter().map(|m| (m.word.as_str(), m.frequency)))?;
            let hits = inst.iter().filter(|i| i.gold == base).count();
            Some(hits as f64 / inst.len() as f64)
        })
        .collect();

    let mut cells = Vec::new();
    let mut counts_cache: Option<(usize, PairCounts)> = None;
    for (k, order) in params.grid.cells() {
        let counts = match &counts_cache {
            Some((ck, c)) if *ck == k => c,
            _ => {
                let window = WindowConfig::new(k, params.cross_sentences)?;
                &counts_cache.insert((k, count_pairs(training, vocab, window))).1
            }
        };
        let networks: BTreeMap<&str, Arc<CoocNetwork>> = roots
            .par_iter()
            .map(|&root| {
                let net = match build_network(root, counts, &params.thresholds, order, params.caps) {
                    Ok(net) => net,
                    Err(Error::InvalidRoot { .. }) => CoocNetwork::root_only(
                        root,
                        order,
                        NetworkMeta {
                            n_tokens: counts.n_tokens(),
                            half_width: k,
                            thresholds: params.thresholds,
                            root_freq: vocab.freq(root),
                            truncated: false,
                        },
                    )?,
                    Err(e) => return Err(e),
                };
                Ok((root, Arc::new(net)))
            })
            .collect::<Result<_>>()?;
        for &root in &roots {
            if !counts.contains(root) {
                empty_roots.insert(root.to_string());
            }
        }
        let evaluations = sets
            .iter()
            .zip(&instances)
            .map(|(set, inst)| {
                if inst.is_empty() {
                    return Ok(None);
                }
                let cands = set.bind(|w| Arc::clone(&networks[w]))?;
                evaluate(&cands, inst, &params.score).map(Some)
            })
            .collect::<Result<Vec<_>>>()?;
        cells.push(SweepCell {
            half_width: k,
            max_order: order,
            evaluations,
        });
    }
    Ok(SweepResult {
        sets: sets.to_vec(),
        instance_counts: instances.iter().map(Vec::len).collect(),
        baseline,
        cells,
        empty_roots,
    })
}

pub fn window_label(k: usize) -> String {
    match k {
        4 => "Narrow".to_string(),
        10 => "Medium".to_string(),
        50 => "Wide".to_string(),
        k => format!("k={k}"),
    }
}

fn percent(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

impl SweepResult {
    /// Tab-separated accuracy table: a column per set, rows for sample
    /// size, baseline, then one row per (window, order). Cells whose
    /// difference from baseline is not significant carry `^a`.
    pub fn render_table(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(
            out,
            "# ^a: difference from baseline not significant (Pearson chi-square, 1 df, 5%)"
        );
        let mut row = |label: &str, cells: Vec<String>| {
            let _ = writeln!(out, "{label}\t{}", cells.join("\t"));
        };
        row("Set", self.sets.iter().map(|s| s.id.clone()).collect());
        row("Size", self.instance_counts.iter().map(|n| n.to_string()).collect());
        row(
            "Baseline",
            self.baseline
                .iter()
                .map(|b| b.map_or("---".to_string(), percent))
                .collect(),
        );
        for cell in &self.cells {
            let label = format!("{} {}", window_label(cell.half_width), cell.max_order);
            row(
                &label,
                cell.evaluations
                    .iter()
                    .map(|e| match e {
                        None => "---".to_string(),
                        Some(e) if e.report.significant_at_5pct => percent(e.report.accuracy),
                        Some(e) => format!("{}^a", percent(e.report.accuracy)),
                    })
                    .collect(),
            );
        }
        out
    }

    /// One JSON object per instance and cell.
    pub fn render_log(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            window: usize,
            order: u32,
            set: &'a str,
            #[serde(flatten)]
            record: &'a InstanceRecord,
        }
        let mut out = String::new();
        for cell in &self.cells {
            for (set, eval) in self.sets.iter().zip(&cell.evaluations) {
                let Some(eval) = eval else { continue };
                for record in &eval.records {
                    let line = Line {
                        window: cell.half_width,
                        order: cell.max_order,
                        set: &set.id,
                        record,
                    };
                    out.push_str(&serde_json::to_string(&line).expect("serializable record"));
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn cell(&self, half_width: usize, max_order: u32) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.half_width == half_width && c.max_order == max_order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocabulary, ingest, CorpusConfig};
    use proptest::prelude::*;

    fn held_out(raw: &str) -> TokenStream {
        let cfg = CorpusConfig::default();
        let mut ts = ingest(raw, &cfg).unwrap();
        build_vocabulary(&mut ts, &cfg);
        ts
    }

    fn set(id: &str, pos: &str, members: &[(&str, u64)]) -> SynonymSet {
        SynonymSet {
            id: id.to_string(),
            pos: pos.to_string(),
            members: members
                .iter()
                .map(|(w, f)| SetMember {
                    word: w.to_string(),
                    frequency: *f,
                })
                .collect(),
        }
    }

    fn errors() -> SynonymSet {
        set("2", "NN", &[("error", 64), ("mistake", 61), ("oversight", 37)])
    }

    #[test]
    fn coarse_categories() {
        assert_eq!(coarse_pos("VBD"), "VB");
        assert_eq!(coarse_pos("VBZ"), "VB");
        assert_eq!(coarse_pos("NNS"), "NN");
        assert_eq!(coarse_pos("NNP"), "NNP");
        assert_eq!(coarse_pos("JJR"), "JJ");
        assert_eq!(coarse_pos("DT"), "DT");
    }

    #[test]
    fn one_instance_per_occurrence() {
        let ts = held_out("it/PRP would/MD be/VB a/DT big/JJ mistake/NN ./.");
        let inst = make_gap_instances(&ts, &errors());
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].gold, "mistake");
        assert_eq!(inst[0].sentence.gap_index(), 5);
        assert_eq!(inst[0].id, "2:0:5");
    }

    #[test]
    fn other_member_stays_visible() {
        let ts = held_out("the/DT error/NN was/VBD a/DT mistake/NN");
        let inst = make_gap_instances(&ts, &errors());
        assert_eq!(inst.len(), 2);
        assert_eq!(inst[0].gold, "error");
        assert_eq!(inst[0].sentence.tokens()[4].surface, "mistake");
        assert_eq!(inst[1].gold, "mistake");
        assert_eq!(inst[1].sentence.tokens()[1].surface, "error");
    }

    #[test]
    fn pos_must_match() {
        let ts = held_out("Error/NNP mistake/VB");
        assert!(make_gap_instances(&ts, &errors()).is_empty());
    }

    #[test]
    fn baseline_examples() {
        let m = |s: &SynonymSet| baseline_choose(s.members.iter().map(|m| (m.word.as_str(), m.frequency))).map(str::to_string);
        assert_eq!(m(&errors()).as_deref(), Some("error"));
        assert_eq!(
            m(&set("3", "NN", &[("job", 418), ("task", 123), ("duty", 48)])).as_deref(),
            Some("job")
        );
        assert_eq!(m(&set("x", "NN", &[("b", 5), ("a", 5)])).as_deref(), Some("a"));
        assert_eq!(baseline_choose(std::iter::empty()), None);
    }

    #[test]
    fn set_from_vocabulary() {
        let cfg = CorpusConfig::default();
        let mut ts = ingest("error/NN error/NN mistake/NN", &cfg).unwrap();
        let vocab = build_vocabulary(&mut ts, &cfg);
        let s = SynonymSet::from_vocabulary("2", "NNS", &["Error", "mistake", "oversight"], &vocab).unwrap();
        assert_eq!(s.pos, "NN");
        let freqs: Vec<u64> = s.members.iter().map(|m| m.frequency).collect();
        assert_eq!(freqs, [2, 1, 0]);
        assert!(SynonymSet::from_vocabulary("2", "NN", &["a"], &vocab).is_err());
        assert!(SynonymSet::from_vocabulary("2", "NN", &["a", "A"], &vocab).is_err());
    }

    #[test]
    fn chi_square_examples() {
        let c = chi_square(60, 100, 40, 100).unwrap();
        assert!((c.chi2 - 8.0).abs() < 1e-9);
        assert!(c.significant_at_5pct);
        let c = chi_square(30, 100, 30, 100).unwrap();
        assert_eq!(c.chi2, 0.0);
        assert!(!c.significant_at_5pct);
        assert_eq!(chi_square(10, 10, 5, 5).unwrap().chi2, 0.0);
        assert_eq!(chi_square(0, 10, 0, 5).unwrap().chi2, 0.0);
        assert!(chi_square(1, 0, 1, 1).is_err());
        assert!(chi_square(3, 2, 1, 1).is_err());
    }

    #[test]
    fn close_proportions_are_not_significant() {
        // 61.9% vs 62.8% over 1828 instances
        let n = 1828;
        let a = (0.619 * n as f64).round() as u64;
        let b = (0.628 * n as f64).round() as u64;
        assert!(!chi_square(a, n, b, n).unwrap().significant_at_5pct);
    }

    fn pearson_oracle(table: [[f64; 2]; 2]) -> f64 {
        let n: f64 = table.iter().flatten().sum();
        let rows = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
        let cols = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
        let mut chi = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let e = rows[i] * cols[j] / n;
                if e > 0.0 {
                    chi += (table[i][j] - e).powi(2) / e;
                }
            }
        }
        chi
    }

    proptest! {
        #[test]
        fn chi_square_matches_definition(n_a in 1u64..=10, n_b in 1u64..=10, fa in 0.0f64..=1.0, fb in 0.0f64..=1.0) {
            let ca = (fa * n_a as f64).floor() as u64;
            let cb = (fb * n_b as f64).floor() as u64;
            let got = chi_square(ca, n_a, cb, n_b).unwrap().chi2;
            let want = pearson_oracle([
                [ca as f64, (n_a - ca) as f64],
                [cb as f64, (n_b - cb) as f64],
            ]);
            prop_assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
            let swapped = chi_square(cb, n_b, ca, n_a).unwrap().chi2;
            prop_assert!((got - swapped).abs() <= 1e-12);
        }
    }

    fn root_only_set(s: &SynonymSet) -> CandidateSet {
        s.bind(|w| Arc::new(CoocNetwork::root_only(w, 2, NetworkMeta::default()).unwrap()))
            .unwrap()
    }

    #[test]
    fn empty_networks_reproduce_baseline() {
        let ts = held_out(
            "the/DT error/NN was/VBD big/JJ\na/DT mistake/NN\nan/DT oversight/NN\nerror/NN again/RB",
        );
        let s = errors();
        let inst = make_gap_instances(&ts, &s);
        assert_eq!(inst.len(), 4);
        let e = evaluate(&root_only_set(&s), &inst, &ScoreOptions::default()).unwrap();
        assert_eq!(e.report.accuracy, e.report.baseline_accuracy);
        assert_eq!(e.report.accuracy, 0.5);
        assert_eq!(e.report.sample_size, 4);
        assert_eq!(e.report.chi2, 0.0);
        assert!(e.records.iter().all(|r| r.baseline_fallback));
    }

    #[test]
    fn three_of_four_correct() {
        // `mistake` wins whenever `big` is present, the baseline `error`
        // otherwise.
        let mistake = CoocNetwork::from_edges(
            "mistake",
            1,
            [("big".to_string(), "mistake".to_string(), 2.0)],
            NetworkMeta::default(),
        )
        .unwrap();
        let s = errors();
        let cands = s
            .bind(|w| {
                if w == "mistake" {
                    Arc::new(mistake.clone())
                } else {
                    Arc::new(CoocNetwork::root_only(w, 1, NetworkMeta::default()).unwrap())
                }
            })
            .unwrap();
        let ts = held_out(
            "a/DT big/JJ mistake/NN\nan/DT error/NN\na/DT big/JJ error/NN\nbig/JJ mistake/NN",
        );
        let inst = make_gap_instances(&ts, &s);
        let e = evaluate(&cands, &inst, &ScoreOptions::default()).unwrap();
        assert_eq!(e.report.accuracy, 0.75);
        assert_eq!(e.report.baseline_accuracy, 0.5);
        let chosen: Vec<&str> = e.records.iter().map(|r| r.chosen.as_str()).collect();
        assert_eq!(chosen, ["mistake", "error", "mistake", "mistake"]);
    }

    #[test]
    fn all_correct_and_empty() {
        let s = set("x", "NN", &[("a", 2), ("b", 1)]);
        let ts = held_out("a/NN\na/NN");
        let inst = make_gap_instances(&ts, &s);
        let e = evaluate(&root_only_set(&s), &inst, &ScoreOptions::default()).unwrap();
        assert_eq!(e.report.accuracy, 1.0);
        assert!(evaluate(&root_only_set(&s), &[], &ScoreOptions::default()).is_err());
    }

    #[test]
    fn default_grid_skips_wide_third_order() {
        let cells: Vec<(usize, u32)> = SweepGrid::default().cells().collect();
        assert_eq!(cells.len(), 8);
        assert!(!cells.contains(&(50, 3)));
        assert_eq!(cells[0], (4, 1));
    }
}
