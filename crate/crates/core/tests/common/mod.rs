//! Synthetic corpora with planted co-occurrence structure.
//!
//! Training text plants two chains:
//!
//! * `task` co-occurs with `difficult`, which co-occurs with `learn`;
//!   `task` and `learn` never share a sentence.
//! * `job` co-occurs with `safety`, which co-occurs with `training`;
//!   `job` and `training` never share a sentence.
//!
//! `job` is the more frequent candidate, so it is the baseline. Held-out
//! sentences pair `task` with `learn` only, or `job` with `training` only,
//! padded with high-frequency filler (stop) words. Evidence for the gold
//! word is therefore second-order only.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FILLERS: &[(&str, &str)] = &[
    ("the", "DT"), ("a", "DT"), ("of", "IN"), ("to", "TO"), ("in", "IN"), ("and", "CC"),
    ("is", "VBZ"), ("was", "VBD"), ("it", "PRP"), ("that", "IN"), ("for", "IN"), ("on", "IN"),
    ("with", "IN"), ("as", "IN"), ("by", "IN"), ("at", "IN"), ("from", "IN"), ("this", "DT"),
    ("be", "VB"), ("have", "VBP"),
];

pub struct Synthetic {
    pub training: String,
    pub held_out: String,
    /// Gold words of the held-out instances, in corpus order.
    pub gold: Vec<&'static str>,
}

fn filler(rng: &mut ChaCha8Rng) -> String {
    let (w, t) = FILLERS[rng.gen_range(0..FILLERS.len())];
    format!("{w}/{t}")
}

fn noise(rng: &mut ChaCha8Rng) -> String {
    format!("n{:03}/NN", rng.gen_range(0..400))
}

/// A sentence of filler and noise with `a` and `b` placed 1-3 positions
/// apart.
fn planted(rng: &mut ChaCha8Rng, a: &str, b: &str) -> String {
    let len = rng.gen_range(10..18);
    let mut toks: Vec<String> = (0..len)
        .map(|_| if rng.gen_bool(0.75) { filler(rng) } else { noise(rng) })
        .collect();
    let gap = rng.gen_range(1..4);
    let i = rng.gen_range(0..len - gap);
    let (first, second) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
    toks[i] = first.to_string();
    toks[i + gap] = second.to_string();
    toks.join(" ")
}

pub fn generate(seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut training = Vec::new();
    for _ in 0..60 {
        training.push(planted(&mut rng, "task/NN", "difficult/JJ"));
        training.push(planted(&mut rng, "difficult/JJ", "learn/VB"));
        training.push(planted(&mut rng, "safety/NN", "training/NN"));
    }
    for _ in 0..120 {
        training.push(planted(&mut rng, "job/NN", "safety/NN"));
    }
    for _ in 0..3000 {
        let len = rng.gen_range(10..18);
        let toks: Vec<String> = (0..len)
            .map(|_| if rng.gen_bool(0.8) { filler(&mut rng) } else { noise(&mut rng) })
            .collect();
        training.push(toks.join(" "));
    }
    training.shuffle(&mut rng);

    let mut held_out = Vec::new();
    let mut gold = Vec::new();
    for i in 0..100 {
        let (cand, evidence) = if i % 2 == 0 {
            ("task", "learn/VB")
        } else {
            ("job", "training/NN")
        };
        let len = rng.gen_range(6..12);
        let mut toks: Vec<String> = (0..len).map(|_| filler(&mut rng)).collect();
        let at = rng.gen_range(0..len);
        let mut ev = rng.gen_range(0..len);
        while ev == at {
            ev = rng.gen_range(0..len);
        }
        toks[at] = format!("{cand}/NN");
        toks[ev] = evidence.to_string();
        held_out.push(toks.join(" "));
        gold.push(cand);
    }
    Synthetic {
        training: training.join("\n") + "\n",
        held_out: held_out.join("\n") + "\n",
        gold,
    }
}

pub struct Fixture {
    pub dir: PathBuf,
    pub training: PathBuf,
    pub held_out: PathBuf,
    pub config: PathBuf,
}

/// Writes the synthetic corpora and an evaluation config into `dir`.
pub fn write_fixture(dir: &Path, seed: u64, grid: &str) -> Fixture {
    let s = generate(seed);
    let training = dir.join("training.txt");
    let held_out = dir.join("held_out.txt");
    fs::write(&training, s.training).unwrap();
    fs::write(&held_out, s.held_out).unwrap();
    let config = dir.join("eval.toml");
    fs::write(
        &config,
        format!(
            r#"[evaluate]
training = ["training.txt"]
held_out = ["held_out.txt"]
report = "report.tsv"
log = "instances.jsonl"
grid = {grid}

[[sets]]
id = "3"
pos = "NN"
words = ["job", "task"]
"#
        ),
    )
    .unwrap();
    Fixture {
        dir: dir.to_path_buf(),
        training,
        held_out,
        config,
    }
}
