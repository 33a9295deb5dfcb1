//! Treatment assignment: uniform Bernoulli and cluster-level Bernoulli
//! designs, plus cluster label ingestion.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// Recommended marginal treatment probability.
pub const DEFAULT_P: f64 = 0.5;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Binary treatment vector with its marginal treatment probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    z: Vec<bool>,
    p: f64,
}

impl Assignment {
    pub fn new(z: Vec<bool>, p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Assignment { z, p })
    }

    pub fn z(&self) -> &[bool] {
        &self.z
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn treated_count(&self) -> usize {
        self.z.iter().filter(|&&b| b).count()
    }

    /// D_i = z_i/p − (1 − z_i)/(1 − p).
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        signed_weight(self.z[i], self.p)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.z.iter().map(|&b| signed_weight(b, self.p)).collect()
    }
}

#[inline]
pub(crate) fn signed_weight(treated: bool, p: f64) -> f64 {
    if treated {
        1.0 / p
    } else {
        -1.0 / (1.0 - p)
    }
}

/// Each unit treated independently with probability `p`.
pub fn bernoulli_assign(n: usize, p: f64, seed: u64) -> Result<Assignment> {
    check_probability(p)?;
    let mut rng = seed::rng(seed);
    let z = (0..n).map(|_| rng.random::<f64>() < p).collect();
    Ok(Assignment { z, p })
}

/// Cluster labels with ids compacted to `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    labels: Vec<u32>,
    k: usize,
}

impl Clustering {
    /// Compacts arbitrary labels to `0..k` in order of first appearance.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(raw: &[L]) -> Self {
        let mut map: HashMap<L, u32> = HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Clustering { labels, k: map.len() }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &l in &self.labels {
            s[l as usize] += 1;
        }
        s
    }

    /// Share of graph edges whose endpoints share a cluster.
    pub fn within_edge_fraction(&self, g: &Graph) -> f64 {
        let total = g.edge_count();
        if total == 0 {
            return 1.0;
        }
        let within = g
            .edges()
            .filter(|&(a, b)| self.labels[a] == self.labels[b])
            .count();
        within as f64 / total as f64
    }
}

/// One Bernoulli(p) coin per cluster; members inherit it.
pub fn cluster_assign(c: &Clustering, p: f64, seed: u64) -> Result<Assignment> {
    check_probability(p)?;
    let mut rng = seed::rng(seed);
    let coins: Vec<bool> = (0..c.k).map(|_| rng.random::<f64>() < p).collect();
    let z = c.labels.iter().map(|&l| coins[l as usize]).collect();
    Ok(Assignment { z, p })
}

/// Read `node_id \t cluster_id` lines; every node in `0..n` exactly once.
pub fn load_clusters(path: impl AsRef<Path>, n: usize) -> Result<Clustering> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut raw: Vec<Option<i64>> = vec![None; n];
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 2 {
            return Err(Error::parse(path, lineno, format!("expected 2 columns, found {}", cols.len())));
        }
        let node: i64 = cols[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("not an integer: {:?}", cols[0])))?;
        let label: i64 = cols[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("not an integer: {:?}", cols[1])))?;
        if node < 0 || node as usize >= n {
            return Err(Error::Clustering(format!("unknown node {node} (line {lineno}, n = {n})")));
        }
        let slot = &mut raw[node as usize];
        if slot.is_some() {
            return Err(Error::Clustering(format!("duplicate node {node} (line {lineno})")));
        }
        *slot = Some(label);
    }
    let mut labels = Vec::with_capacity(n);
    for (node, l) in raw.into_iter().enumerate() {
        match l {
            Some(l) => labels.push(l),
            None => return Err(Error::Clustering(format!("missing node {node}"))),
        }
    }
    Ok(Clustering::from_labels(&labels))
}

/// Seeded asynchronous label propagation. Demo plumbing for the cluster
/// arm when no clustering file is supplied; not a community-detection
/// method with any guarantees.
pub fn label_propagation(g: &Graph, seed: u64, max_sweeps: usize) -> Clustering {
    let n = g.n();
    let mut rng = seed::rng(seed);
    let mut labels: Vec<u32> = (0..n as u32).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for _ in 0..max_sweeps {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &i in &order {
            if g.degree(i) == 0 {
                continue;
            }
            counts.clear();
            for &j in g.neighbors(i) {
                *counts.entry(labels[j as usize]).or_insert(0) += 1;
            }
            let best = *counts.values().max().unwrap();
            let mut ties: Vec<u32> = counts.iter().filter(|(_, &c)| c == best).map(|(&l, _)| l).collect();
            ties.sort_unstable();
            let pick = if ties.contains(&labels[i]) {
                labels[i]
            } else {
                ties[rng.random_range(0..ties.len())]
            };
            if pick != labels[i] {
                labels[i] = pick;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Clustering::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_is_reproducible() {
        let a = bernoulli_assign(5, 0.5, 17).unwrap();
        let b = bernoulli_assign(5, 0.5, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn bernoulli_mean_within_three_standard_errors() {
        let n = 1_000_000;
        let z = bernoulli_assign(n, 0.5, 2024).unwrap();
        let frac = z.treated_count() as f64 / n as f64;
        // 3 * sqrt(0.25 / 1e6) = 0.0015
        assert!((frac - 0.5).abs() <= 0.0015, "{frac}");
    }

    #[test]
    fn invalid_probabilities_rejected() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(bernoulli_assign(3, p, 0), Err(Error::InvalidProbability(_))));
        }
        let c = Clustering::from_labels(&[0, 0]);
        assert!(cluster_assign(&c, 0.0, 1).is_err());
    }

    #[test]
    fn weights_are_signed_inverse_propensities() {
        let a = Assignment::new(vec![true, false], 0.25).unwrap();
        assert_eq!(a.weights(), vec![4.0, -1.0 / 0.75]);
    }

    #[test]
    fn cluster_assignment_constant_within_clusters() {
        let c = Clustering::from_labels(&[0, 0, 1, 1]);
        for s in 0..50 {
            let z = cluster_assign(&c, 0.5, s).unwrap();
            assert_eq!(z.z()[0], z.z()[1]);
            assert_eq!(z.z()[2], z.z()[3]);
        }
        let one = Clustering::from_labels(&[3; 7]);
        for s in 0..20 {
            let z = cluster_assign(&one, 0.5, s).unwrap();
            let t = z.treated_count();
            assert!(t == 0 || t == 7);
        }
    }

    #[test]
    fn cluster_treated_fraction_over_828_clusters() {
        let n = 10_000;
        let raw: Vec<usize> = (0..n).map(|i| i * 828 / n).collect();
        let c = Clustering::from_labels(&raw);
        assert_eq!(c.k(), 828);
        let z = cluster_assign(&c, 0.5, 8).unwrap();
        let mut coin: Vec<Option<bool>> = vec![None; 828];
        for (i, &l) in c.labels().iter().enumerate() {
            let first = *coin[l as usize].get_or_insert(z.z()[i]);
            assert_eq!(first, z.z()[i]);
        }
        let frac = coin.iter().filter(|&&t| t == Some(true)).count() as f64 / 828.0;
        assert!((frac - 0.5).abs() <= 0.053, "{frac}");
    }

    #[test]
    fn treated_fraction_converges_over_replications() {
        let (n, r, p) = (2000usize, 200u64, 0.3);
        let total: usize = (0..r)
            .map(|k| bernoulli_assign(n, p, seed::derive(5, &[k])).unwrap().treated_count())
            .sum();
        let mean = total as f64 / (n as u64 * r) as f64;
        assert!((mean - p).abs() <= 4.0 * (p * (1.0 - p) / (n as u64 * r) as f64).sqrt());
    }

    #[test]
    fn load_clusters_compacts_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.tsv");
        std::fs::write(&p, "0\t7\n1\t7\n2\t9\n").unwrap();
        let c = load_clusters(&p, 3).unwrap();
        assert_eq!(c.labels(), &[0, 0, 1]);
        assert_eq!(c.k(), 2);

        std::fs::write(&p, "0\t7\n1\t7\n").unwrap();
        let err = load_clusters(&p, 3).unwrap_err().to_string();
        assert!(err.contains("missing node 2"), "{err}");

        std::fs::write(&p, "0\t0\n0\t1\n").unwrap();
        let err = load_clusters(&p, 2).unwrap_err().to_string();
        assert!(err.contains("duplicate node 0"), "{err}");

        std::fs::write(&p, "0\t0\n5\t1\n").unwrap();
        let err = load_clusters(&p, 2).unwrap_err().to_string();
        assert!(err.contains("unknown node 5"), "{err}");
    }

    #[test]
    fn label_propagation_separates_components() {
        let (g, _) = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let c = label_propagation(&g, 1, 50);
        assert_eq!(c.k(), 2);
        assert_eq!(c.within_edge_fraction(&g), 1.0);
    }
}
