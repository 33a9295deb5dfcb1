//! Immutable undirected surrogate network in CSR form.
//!
//! Self-loops are never stored. Every unit is treated as its own neighbor
//! (`G_ii = 1`), and the closed-neighborhood helpers merge it in on the fly.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Default ceiling on Σ_k |M_k|², the number of candidate pairs touched by
/// two-hop enumeration.
pub const DEFAULT_TWO_HOP_CAP: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

/// Input lines that were dropped while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    /// max_i |M_i|, self included.
    pub max_closed_degree: usize,
    pub mean_closed_degree: f64,
    pub edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Build from undirected edges. Self-loops and repeated edges (in either
    /// orientation) are dropped and counted.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Graph, BuildReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::InvalidGraph(format!("{n} nodes exceeds the u32 id space")));
        }
        let mut report = BuildReport::default();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
            }
            if a == b {
                report.self_loops += 1;
                continue;
            }
            pairs.push((a.min(b) as u32, a.max(b) as u32));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        report.duplicates = before - pairs.len();
        Ok((Self::from_unique_pairs(n, &pairs), report))
    }

    /// `pairs` must be distinct (lo, hi) with lo < hi.
    fn from_unique_pairs(n: usize, pairs: &[(u32, u32)]) -> Graph {
        let mut offsets = vec![0usize; n + 1];
        for &(a, b) in pairs {
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; 2 * pairs.len()];
        for &(a, b) in pairs {
            neighbors[fill[a as usize]] = b;
            fill[a as usize] += 1;
            neighbors[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        let g = Graph {
            n,
            offsets,
            neighbors,
        };
        debug_assert!(g.check_invariants().is_ok());
        g
    }

    /// Ring lattice where every node is joined to its `degree / 2` nearest
    /// nodes on each side. `degree` must be even and below `n`.
    pub fn ring(n: usize, degree: usize) -> Result<Graph> {
        if !degree.is_multiple_of(2) || degree >= n {
            return Err(Error::InvalidGraph(format!(
                "ring lattice needs an even degree below n, got degree {degree} with n {n}"
            )));
        }
        let half = degree / 2;
        let edges = (0..n).flat_map(|i| (1..=half).map(move |s| (i, (i + s) % n)));
        Graph::from_edges(n, edges).map(|(g, _)| g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Open neighbors of `i`, sorted.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// |M_i| = degree + 1.
    #[inline]
    pub fn closed_degree(&self, i: usize) -> usize {
        self.degree(i) + 1
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::NodeOutOfRange { node: i, n: self.n })
        } else {
            Ok(())
        }
    }

    /// M_i as a sorted id list.
    pub fn closed_neighborhood(&self, i: usize) -> Result<Vec<usize>> {
        self.check_node(i)?;
        Ok(self.closed(i).map(|j| j as usize).collect())
    }

    /// Iterator over M_i in ascending order. Panics on out-of-range ids.
    #[inline]
    pub fn closed(&self, i: usize) -> ClosedNeighbors<'_> {
        ClosedNeighbors {
            rest: self.neighbors(i),
            me: i as u32,
            me_pending: true,
        }
    }

    /// Whether M_i ∩ M_j is non-empty.
    pub fn intersection_nonempty(&self, i: usize, j: usize) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Ok(true);
        }
        let (mut a, mut b) = (self.closed(i).peekable(), self.closed(j).peekable());
        while let (Some(&x), Some(&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return Ok(true),
            }
        }
        Ok(false)
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let max_closed_degree = (0..self.n).map(|i| self.closed_degree(i)).max().unwrap_or(1);
        let mean_closed_degree = if self.n == 0 {
            1.0
        } else {
            1.0 + self.neighbors.len() as f64 / self.n as f64
        };
        DegreeStats {
            max_closed_degree,
            mean_closed_degree,
            edge_count: self.edge_count(),
        }
    }

    /// Σ_k |M_k|², which equals Σ_{i,j} |M_i ∩ M_j| and bounds the work of
    /// two-hop enumeration.
    pub fn closed_degree_square_sum(&self) -> f64 {
        (0..self.n)
            .map(|k| {
                let d = self.closed_degree(k) as f64;
                d * d
            })
            .sum()
    }

    /// Undirected edges as (lo, hi), lo < hi, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// O(E) structural check: sorted, duplicate-free, in range, no self
    /// entries and symmetric.
    pub fn check_invariants(&self) -> Result<()> {
        if self.offsets.len() != self.n + 1 || self.offsets[self.n] != self.neighbors.len() {
            return Err(Error::InvalidGraph("offset array inconsistent".into()));
        }
        for i in 0..self.n {
            let nb = self.neighbors(i);
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidGraph(format!("row {i} unsorted or duplicated")));
                }
            }
            for &j in nb {
                let j = j as usize;
                if j >= self.n {
                    return Err(Error::InvalidGraph(format!("row {i} holds id {j} out of range")));
                }
                if j == i {
                    return Err(Error::InvalidGraph(format!("row {i} stores a self-loop")));
                }
                if self.neighbors(j).binary_search(&(i as u32)).is_err() {
                    return Err(Error::InvalidGraph(format!("edge {i}-{j} is not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Relabel node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        Graph::from_edges(self.n, self.edges().map(|(a, b)| (perm[a], perm[b]))).map(|(g, _)| g)
    }

    /// Fill `scratch` with every j such that M_i ∩ M_j ≠ ∅ (the closed
    /// two-hop ball of i, i included) and return it, unordered.
    pub fn two_hop_neighbors<'s>(&self, i: usize, scratch: &'s mut TwoHopScratch) -> &'s [u32] {
        scratch.reset(self.n);
        for k in self.closed(i) {
            for j in self.closed(k as usize) {
                scratch.insert(j);
            }
        }
        &scratch.out
    }

    /// All unordered pairs (i, j), i ≤ j, with intersecting closed
    /// neighborhoods, each exactly once, ordered by i then j.
    pub fn two_hop_pairs(&self) -> Result<TwoHopPairs<'_>> {
        self.two_hop_pairs_with_cap(DEFAULT_TWO_HOP_CAP)
    }

    pub fn two_hop_pairs_with_cap(&self, cap: f64) -> Result<TwoHopPairs<'_>> {
        self.check_two_hop_cost(cap)?;
        Ok(TwoHopPairs {
            graph: self,
            scratch: TwoHopScratch::new(self.n),
            next_source: 0,
            current: Vec::new(),
            source: 0,
            pos: 0,
        })
    }

    pub fn check_two_hop_cost(&self, cap: f64) -> Result<()> {
        let estimate = self.closed_degree_square_sum();
        if estimate > cap {
            Err(Error::CostCap { estimate, cap })
        } else {
            Ok(())
        }
    }
}

/// Sorted merge of a neighbor list with the node itself.
#[derive(Debug, Clone)]
pub struct ClosedNeighbors<'a> {
    rest: &'a [u32],
    me: u32,
    me_pending: bool,
}

impl Iterator for ClosedNeighbors<'_> {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        match self.rest.split_first() {
            Some((&head, tail)) => {
                if self.me_pending && self.me < head {
                    self.me_pending = false;
                    Some(self.me)
                } else {
                    self.rest = tail;
                    Some(head)
                }
            }
            None if self.me_pending => {
                self.me_pending = false;
                Some(self.me)
            }
            None => None,
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.rest.len() + self.me_pending as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for ClosedNeighbors<'_> {}

/// Reusable membership set for two-hop enumeration, cleared by bumping an
/// epoch stamp instead of zeroing.
#[derive(Debug, Clone)]
pub struct TwoHopScratch {
    stamp: Vec<u32>,
    epoch: u32,
    out: Vec<u32>,
}

impl TwoHopScratch {
    pub fn new(n: usize) -> Self {
        TwoHopScratch {
            stamp: vec![0; n],
            epoch: 0,
            out: Vec::new(),
        }
    }

    fn reset(&mut self, n: usize) {
        if self.stamp.len() != n {
            self.stamp = vec![0; n];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.out.clear();
    }

    #[inline]
    fn insert(&mut self, j: u32) {
        let s = &mut self.stamp[j as usize];
        if *s != self.epoch {
            *s = self.epoch;
            self.out.push(j);
        }
    }
}

pub struct TwoHopPairs<'g> {
    graph: &'g Graph,
    scratch: TwoHopScratch,
    next_source: usize,
    current: Vec<u32>,
    source: usize,
    pos: usize,
}

impl Iterator for TwoHopPairs<'_> {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        while self.pos >= self.current.len() {
            if self.next_source >= self.graph.n {
                return None;
            }
            let i = self.next_source;
            self.next_source += 1;
            let ball = self.graph.two_hop_neighbors(i, &mut self.scratch);
            self.current.clear();
            self.current.extend(ball.iter().copied().filter(|&j| j as usize >= i));
            self.current.sort_unstable();
            self.source = i;
            self.pos = 0;
        }
        let j = self.current[self.pos] as usize;
        self.pos += 1;
        Some((self.source, j))
    }
}

/// Uniform random graph with exactly round(n · mean_degree / 2) edges, so the
/// mean open degree is `mean_degree`.
pub fn erdos_renyi(n: usize, mean_degree: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidGraph(format!("need at least 2 nodes, got {n}")));
    }
    if !(mean_degree.is_finite() && mean_degree >= 0.0) {
        return Err(Error::InvalidGraph(format!("mean degree must be finite and nonnegative, got {mean_degree}")));
    }
    let max = (n as u64) * (n as u64 - 1) / 2;
    let requested = (n as f64 * mean_degree / 2.0).round() as u64;
    if requested > max {
        return Err(Error::InfeasibleEdgeCount { requested, max, n });
    }
    let mut rng = seed::rng(seed);
    // Dense requests sample the complement instead.
    let sample = if requested * 2 > max { max - requested } else { requested };
    let mut seen: HashSet<u64> = HashSet::with_capacity(sample as usize);
    let mut picked: Vec<(u32, u32)> = Vec::with_capacity(sample as usize);
    while (picked.len() as u64) < sample {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if seen.insert(lo as u64 * n as u64 + hi as u64) {
            picked.push((lo as u32, hi as u32));
        }
    }
    if sample != requested {
        picked.clear();
        for lo in 0..n {
            for hi in lo + 1..n {
                if !seen.contains(&(lo as u64 * n as u64 + hi as u64)) {
                    picked.push((lo as u32, hi as u32));
                }
            }
        }
    }
    drop(seen);
    picked.sort_unstable();
    Ok(Graph::from_unique_pairs(n, &picked))
}

/// Planted-partition graph: nodes split into `k` contiguous, near-equal
/// blocks; round(n · mean_degree / 2) edges of which a `within_fraction`
/// share join nodes in the same block. Returns the graph and block labels.
pub fn planted_partition(
    n: usize,
    k: usize,
    mean_degree: f64,
    within_fraction: f64,
    seed: u64,
) -> Result<(Graph, Vec<u32>)> {
    if k == 0 || k > n / 2 {
        return Err(Error::InvalidGraph(format!("need 1 ≤ k ≤ n/2 blocks, got k = {k}, n = {n}")));
    }
    if !(0.0..=1.0).contains(&within_fraction) || !(mean_degree.is_finite() && mean_degree >= 0.0) {
        return Err(Error::InvalidGraph("within_fraction must lie in [0, 1] and mean degree be nonnegative".into()));
    }
    let labels: Vec<u32> = (0..n).map(|i| (i * k / n) as u32).collect();
    let block_start = |b: usize| (b * n).div_ceil(k);
    let requested = (n as f64 * mean_degree / 2.0).round() as u64;
    let within = (requested as f64 * within_fraction).round() as u64;
    let across = requested - within;
    let within_cap: u64 = (0..k)
        .map(|b| {
            let s = (block_start(b + 1) - block_start(b)) as u64;
            s * (s - 1) / 2
        })
        .sum();
    let total = (n as u64) * (n as u64 - 1) / 2;
    if within > within_cap / 2 || across > (total - within_cap) / 2 {
        return Err(Error::InfeasibleEdgeCount {
            requested,
            max: within_cap.min(total - within_cap),
            n,
        });
    }
    let mut rng = seed::rng(seed);
    let mut seen: HashSet<u64> = HashSet::with_capacity(requested as usize);
    let mut picked: Vec<(u32, u32)> = Vec::with_capacity(requested as usize);
    let push = |a: usize, b: usize, seen: &mut HashSet<u64>, picked: &mut Vec<(u32, u32)>| {
        let (lo, hi) = (a.min(b), a.max(b));
        if seen.insert(lo as u64 * n as u64 + hi as u64) {
            picked.push((lo as u32, hi as u32));
            true
        } else {
            false
        }
    };
    let mut placed = 0;
    while placed < within {
        let a = rng.random_range(0..n);
        let b_id = labels[a] as usize;
        let (lo, hi) = (block_start(b_id), block_start(b_id + 1));
        let b = rng.random_range(lo..hi);
        if a != b && push(a, b, &mut seen, &mut picked) {
            placed += 1;
        }
    }
    placed = 0;
    while placed < across {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if labels[a] != labels[b] && push(a, b, &mut seen, &mut picked) {
            placed += 1;
        }
    }
    picked.sort_unstable();
    Ok((Graph::from_unique_pairs(n, &picked), labels))
}

/// Read a TSV edge list: two 0-based ids per line, `#` comments. A
/// `# nodes <n>` comment fixes the node count (otherwise max id + 1).
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Graph, BuildReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut declared_n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            if parts.next() == Some("nodes") {
                if let Some(v) = parts.next() {
                    let v = v
                        .parse()
                        .map_err(|_| Error::parse(path, lineno, format!("bad node count {v:?}")))?;
                    declared_n = Some(v);
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(Error::parse(path, lineno, format!("expected 2 columns, found {}", cols.len())));
        }
        let mut ids = [0usize; 2];
        for (slot, col) in ids.iter_mut().zip(&cols) {
            let v: i64 = col
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("not an integer: {col:?}")))?;
            if v < 0 {
                return Err(Error::parse(path, lineno, format!("negative node id {v}")));
            }
            *slot = v as usize;
        }
        max_id = Some(max_id.map_or(ids[0].max(ids[1]), |m| m.max(ids[0]).max(ids[1])));
        edges.push((ids[0], ids[1]));
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let n = match declared_n {
        Some(d) if d < inferred => {
            return Err(Error::parse(path, 0, format!("declared {d} nodes but id {} appears", inferred - 1)))
        }
        Some(d) => d,
        None => inferred,
    };
    let (g, report) = Graph::from_edges(n, edges)?;
    if report.self_loops > 0 || report.duplicates > 0 {
        log::warn!(
            "{}: dropped {} self-loops and {} duplicate edges",
            path.display(),
            report.self_loops,
            report.duplicates
        );
    }
    Ok((g, report))
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "# nodes\t{}", g.n()).map_err(io)?;
    for (a, b) in g.edges() {
        writeln!(w, "{a}\t{b}").map_err(io)?;
    }
    w.flush().map_err(io)
}
