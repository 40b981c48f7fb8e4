//! Per-root lexical co-occurrence networks.
//!
//! A network holds only first-order relations: an edge joins two words
//! whose pair passed [`is_significant`], weighted by the pair's t-score.
//! Higher-order relations are shortest paths through it. For a word at
//! depth `d` reached along `w0, w1, ..., wd`, the significance score is
//!
//! ```text
//! sig(w0, wd) = (1 / d^3) * sum_{i=1..d} t(w_{i-1}, w_i) / i
//! ```
//!
//! When several shortest paths exist the one with the largest sum is used.
//! Because the `1/i` weight depends on the position along the path, the
//! best path is found with a dynamic program over BFS layers rather than a
//! plain shortest-path search. Edges joining two words of the same depth
//! are kept but can never lie on a shortest path.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::{self, BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::cooc_stats::{is_significant, t_score, PairCounts, SignificanceThresholds};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkCaps {
    pub max_nodes: usize,
    pub max_edges: usize,
}

impl Default for NetworkCaps {
    fn default() -> Self {
        NetworkCaps {
            max_nodes: 50_000,
            max_edges: 500_000,
        }
    }
}

/// Provenance carried in the network file header.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkMeta {
    pub n_tokens: u64,
    pub half_width: usize,
    pub thresholds: SignificanceThresholds,
    /// Training-corpus frequency of the root word.
    pub root_freq: u64,
    pub truncated: bool,
}

impl Default for NetworkMeta {
    fn default() -> Self {
        NetworkMeta {
            n_tokens: 0,
            half_width: 0,
            thresholds: SignificanceThresholds::default(),
            root_freq: 0,
            truncated: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Best {
    sum: f64,
    pred: Option<usize>,
}

/// An immutable co-occurrence network rooted at one word.
#[derive(Clone, Debug, PartialEq)]
pub struct CoocNetwork {
    root: String,
    max_order: u32,
    meta: NetworkMeta,
    /// Sorted by (depth, word); index 0 is the root.
    words: Vec<String>,
    depth: Vec<u32>,
    index: HashMap<String, usize>,
    /// Neighbour lists sorted by node index.
    adj: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
    best: Vec<Best>,
}

/// A shortest path from the root, `words[0]` being the root.
#[derive(Clone, Debug, PartialEq)]
pub struct SigPath {
    pub words: Vec<String>,
    pub order: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigScore {
    pub value: f64,
    /// Relation order; 0 for the root itself and for unreachable words.
    pub order: u32,
}

impl SigScore {
    pub const NONE: SigScore = SigScore {
        value: 0.0,
        order: 0,
    };
}

/// Grows the network of `root` breadth-first over significant pairs, up to
/// `max_order` steps away. Every significant pair among the included words
/// becomes an edge. When a cap is hit the weakest candidates are dropped
/// and the network is marked truncated.
pub fn build_network(
    root: &str,
    counts: &PairCounts,
    th: &SignificanceThresholds,
    max_order: u32,
    caps: NetworkCaps,
) -> Result<CoocNetwork> {
    if !counts.contains(root) {
        return Err(Error::InvalidRoot {
            word: root.to_string(),
            reason: "not a content word of the training vocabulary (unknown or stop word)",
        });
    }
    let mut truncated = false;
    let edge_weight = |a: &str, b: &str| -> Option<f64> {
        let stats = counts.stats(a, b);
        if !is_significant(&stats, th) {
            return None;
        }
        let t = quantize(t_score(&stats).ok()?);
        (t > 0.0).then_some(t)
    };

    let mut included: HashMap<&str, u32> = HashMap::from([(root, 0)]);
    let mut frontier: Vec<&str> = vec![root];
    for d in 0..max_order {
        let mut next: BTreeMap<&str, f64> = BTreeMap::new();
        for &u in &frontier {
            for (v, _) in counts.neighbors(u) {
                if included.contains_key(v) {
                    continue;
                }
                if let Some(t) = edge_weight(u, v) {
                    let slot = next.entry(v).or_insert(t);
                    *slot = slot.max(t);
                }
            }
        }
        let room = caps.max_nodes.saturating_sub(included.len());
        let mut layer: Vec<(&str, f64)> = next.into_iter().collect();
        if layer.len() > room {
            layer.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
            layer.truncate(room);
            layer.sort_by(|a, b| a.0.cmp(b.0));
            truncated = true;
        }
        if layer.is_empty() {
            break;
        }
        for &(v, _) in &layer {
            included.insert(v, d + 1);
        }
        frontier = layer.into_iter().map(|(v, _)| v).collect();
        if truncated {
            break;
        }
    }

    let mut nodes: Vec<&str> = included.keys().copied().collect();
    nodes.sort_unstable();
    let mut edges = Vec::new();
    for &u in &nodes {
        for (v, _) in counts.neighbors(u) {
            if u < v && included.contains_key(v) {
                if let Some(t) = edge_weight(u, v) {
                    edges.push((u, v, t));
                }
            }
        }
    }
    if edges.len() > caps.max_edges {
        // Drop edges of the deepest layers first and, within a layer, the
        // weakest, so the links to shallower words survive.
        let layer = |e: &(&str, &str, f64)| included[e.0].min(included[e.1]);
        edges.sort_by(|a, b| {
            layer(a)
                .cmp(&layer(b))
                .then(b.2.total_cmp(&a.2))
                .then(a.0.cmp(b.0))
                .then(a.1.cmp(b.1))
        });
        edges.truncate(caps.max_edges);
        truncated = true;
    }

    let meta = NetworkMeta {
        n_tokens: counts.n_tokens(),
        half_width: counts.window().half_width,
        thresholds: *th,
        root_freq: counts.freq(root),
        truncated,
    };
    CoocNetwork::from_edges(
        root,
        max_order,
        edges.into_iter().map(|(a, b, t)| (a.to_string(), b.to_string(), t)),
        meta,
    )
}

/// Rounds a weight to the six decimals of the file format so that a
/// network read back from disk is identical to the one that was built.
fn quantize(t: f64) -> f64 {
    format!("{t:.6}").parse().unwrap_or(t)
}

impl CoocNetwork {
    /// Assembles a network from explicit edges. Depths are the BFS
    /// distances from `root`; words farther than `max_order` are dropped
    /// together with their edges.
    pub fn from_edges<I>(root: &str, max_order: u32, edges: I, meta: NetworkMeta) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String, f64)>,
    {
        if root.is_empty() {
            return Err(Error::InvalidInput("network root is empty".to_string()));
        }
        let mut graph: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (a, b, t) in edges {
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop on `{a}`")));
            }
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) has non-positive weight {t}"
                )));
            }
            if graph.entry(a.clone()).or_default().insert(b.clone(), t).is_some() {
                return Err(Error::InvalidInput(format!("duplicate edge ({a}, {b})")));
            }
            graph.entry(b).or_default().insert(a, t);
        }

        let mut dist: HashMap<&str, u32> = HashMap::from([(root, 0)]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u];
            if d == max_order {
                continue;
            }
            for v in graph.get(u).into_iter().flat_map(|n| n.keys()) {
                if !dist.contains_key(v.as_str()) {
                    dist.insert(v, d + 1);
                    queue.push_back(v);
                }
            }
        }

        let mut order: Vec<(u32, &str)> = dist.iter().map(|(w, d)| (*d, *w)).collect();
        order.sort_unstable();
        let words: Vec<String> = order.iter().map(|(_, w)| w.to_string()).collect();
        let depth: Vec<u32> = order.iter().map(|(d, _)| *d).collect();
        let index: HashMap<String, usize> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut adj = vec![Vec::new(); words.len()];
        let mut edge_count = 0;
        for (i, w) in words.iter().enumerate() {
            for (v, &t) in graph.get(w).into_iter().flatten() {
                if let Some(&j) = index.get(v) {
                    adj[i].push((j, t));
                    if i < j {
                        edge_count += 1;
                    }
                }
            }
            adj[i].sort_unstable_by_key(|&(j, _)| j);
        }

        let mut net = CoocNetwork {
            root: root.to_string(),
            max_order,
            meta,
            words,
            depth,
            index,
            adj,
            edge_count,
            best: Vec::new(),
        };
        net.best = net.layered_best_paths();
        Ok(net)
    }

    /// A network holding only its root.
    pub fn root_only(root: &str, max_order: u32, meta: NetworkMeta) -> Result<Self> {
        Self::from_edges(root, max_order, std::iter::empty(), meta)
    }

    /// For each node, the best position-weighted sum over shortest paths
    /// from the root and the predecessor achieving it. Nodes are visited in
    /// depth order; candidate predecessors in index order, which within a
    /// layer is lexicographic, and only a strictly better sum replaces the
    /// current choice.
    fn layered_best_paths(&self) -> Vec<Best> {
        let mut best = vec![
            Best {
                sum: 0.0,
                pred: None
            };
            self.words.len()
        ];
        for v in 1..self.words.len() {
            let d = self.depth[v];
            let step = d as f64;
            let mut chosen: Option<Best> = None;
            for &(u, t) in &self.adj[v] {
                if self.depth[u] + 1 != d {
                    continue;
                }
                let sum = best[u].sum + t / step;
                if chosen.is_none_or(|c| sum > c.sum) {
                    chosen = Some(Best { sum, pred: Some(u) });
                }
            }
            best[v] = chosen.expect("every non-root node has a parent in the previous layer");
        }
        best
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn meta(&self) -> &NetworkMeta {
        &self.meta
    }

    pub fn is_truncated(&self) -> bool {
        self.meta.truncated
    }

    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn depth(&self, word: &str) -> Option<u32> {
        self.index.get(word).map(|&i| self.depth[i])
    }

    /// Nodes with their depths, ordered by depth then word.
    pub fn nodes(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.words
            .iter()
            .zip(&self.depth)
            .map(|(w, d)| (w.as_str(), *d))
    }

    pub fn neighbors<'a>(&'a self, word: &str) -> impl Iterator<Item = (&'a str, f64)> + 'a {
        let list = match self.index.get(word) {
            Some(&i) => self.adj[i].as_slice(),
            None => &[],
        };
        list.iter().map(move |&(j, t)| (self.words[j].as_str(), t))
    }

    pub fn edge_weight(&self, a: &str, b: &str) -> Option<f64> {
        let (&i, &j) = (self.index.get(a)?, self.index.get(b)?);
        self.adj[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|pos| self.adj[i][pos].1)
    }

    /// Edges `(w1, w2, t)` with `w1 < w2`, ordered by the shallower
    /// endpoint's depth, the deeper endpoint's depth, then the words.
    pub fn edges(&self) -> Vec<(&str, &str, f64)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (i, list) in self.adj.iter().enumerate() {
            for &(j, t) in list {
                let (a, b) = (&self.words[i], &self.words[j]);
                if a < b {
                    let (lo, hi) = if self.depth[i] <= self.depth[j] {
                        (self.depth[i], self.depth[j])
                    } else {
                        (self.depth[j], self.depth[i])
                    };
                    out.push((lo, hi, a.as_str(), b.as_str(), t));
                }
            }
        }
        out.sort_by(|x, y| (x.0, x.1, x.2, x.3).cmp(&(y.0, y.1, y.2, y.3)));
        out.into_iter().map(|(_, _, a, b, t)| (a, b, t)).collect()
    }

    /// Writes the network in its line-oriented text format.
    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let m = &self.meta;
        writeln!(w, "ROOT {}", self.root)?;
        writeln!(w, "ORDER {}", self.max_order)?;
        writeln!(w, "N {}", m.n_tokens)?;
        writeln!(w, "K {}", m.half_width)?;
        writeln!(w, "TMIN {}", m.thresholds.t_min)?;
        writeln!(w, "MIMIN {}", m.thresholds.mi_min)?;
        writeln!(w, "FREQ {}", m.root_freq)?;
        writeln!(w, "TRUNCATED {}", m.truncated)?;
        for (word, d) in self.nodes() {
            writeln!(w, "NODE {word} {d}")?;
        }
        for (a, b, t) in self.edges() {
            writeln!(w, "EDGE {a} {b} {t:.6}")?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut header: HashMap<String, (usize, String)> = HashMap::new();
        let mut nodes: Vec<(usize, String, u32)> = Vec::new();
        let mut edges = Vec::new();
        for (idx, line) in BufReader::new(r).lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::format(lineno, 1, e.to_string()))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                ["NODE", word, d] => {
                    let d = d
                        .parse()
                        .map_err(|_| Error::format(lineno, 1, "bad NODE depth"))?;
                    nodes.push((lineno, word.to_string(), d));
                }
                ["EDGE", a, b, t] => {
                    if a >= b {
                        return Err(Error::format(lineno, 1, "EDGE words must be ordered w1 < w2"));
                    }
                    let t: f64 = t
                        .parse()
                        .map_err(|_| Error::format(lineno, 1, "bad EDGE weight"))?;
                    edges.push((a.to_string(), b.to_string(), t));
                }
                [key, value] if nodes.is_empty() && edges.is_empty() => {
                    header.insert(key.to_string(), (lineno, value.to_string()));
                }
                _ => return Err(Error::format(lineno, 1, format!("unexpected line `{line}`"))),
            }
        }
        fn field<T: std::str::FromStr>(
            header: &HashMap<String, (usize, String)>,
            key: &str,
            default: Option<T>,
        ) -> Result<T> {
            match header.get(key) {
                Some((lineno, v)) => v
                    .parse()
                    .map_err(|_| Error::format(*lineno, 1, format!("bad {key} value `{v}`"))),
                None => default.ok_or_else(|| Error::format(1, 1, format!("missing {key} header"))),
            }
        }
        let root: String = field(&header, "ROOT", None)?;
        let max_order: u32 = field(&header, "ORDER", None)?;
        let defaults = SignificanceThresholds::default();
        let meta = NetworkMeta {
            n_tokens: field(&header, "N", None)?,
            half_width: field(&header, "K", None)?,
            thresholds: SignificanceThresholds {
                t_min: field(&header, "TMIN", Some(defaults.t_min))?,
                mi_min: field(&header, "MIMIN", Some(defaults.mi_min))?,
            },
            root_freq: field(&header, "FREQ", Some(0))?,
            truncated: field(&header, "TRUNCATED", Some(false))?,
        };
        let net = CoocNetwork::from_edges(&root, max_order, edges, meta)
            .map_err(|e| Error::format(1, 1, e.to_string()))?;
        if nodes.len() != net.node_count() {
            return Err(Error::format(
                1,
                1,
                format!(
                    "file lists {} nodes, edges reach {} within order {max_order}",
                    nodes.len(),
                    net.node_count()
                ),
            ));
        }
        for (lineno, word, d) in nodes {
            if net.depth(&word) != Some(d) {
                return Err(Error::format(
                    lineno,
                    1,
                    format!("NODE {word} {d} disagrees with edge-derived depth {:?}", net.depth(&word)),
                ));
            }
        }
        Ok(net)
    }
}

/// The shortest path from the root to `w` with the largest
/// position-weighted t-score sum.
pub fn max_sig_shortest_path(net: &CoocNetwork, w: &str) -> Result<SigPath> {
    let &target = net
        .index
        .get(w)
        .ok_or_else(|| Error::NotFound(w.to_string()))?;
    let mut path = vec![net.words[target].clone()];
    let mut cur = target;
    while let Some(prev) = net.best[cur].pred {
        path.push(net.words[prev].clone());
        cur = prev;
    }
    path.reverse();
    Ok(SigPath {
        order: net.depth[target],
        words: path,
    })
}

/// Significance of the relation between the network root and `w`; zero for
/// the root itself and for words not reached within the network's order.
pub fn significance(net: &CoocNetwork, w: &str) -> SigScore {
    match net.index.get(w) {
        Some(&i) if i != 0 => {
            let d = net.depth[i];
            let cube = (d as f64).powi(3);
            SigScore {
                value: net.best[i].sum / cube,
                order: d,
            }
        }
        _ => SigScore::NONE,
    }
}
