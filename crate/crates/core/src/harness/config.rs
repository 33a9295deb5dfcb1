//! Experiment configuration: flat `key = value` files, command-line
//! overrides, and reloading from a run manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcomes::Link;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    VarianceScaling,
    Normality,
    VarEstimatorEval,
    CompareEstimators,
    SutvaPower,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::VarianceScaling,
        Experiment::Normality,
        Experiment::VarEstimatorEval,
        Experiment::CompareEstimators,
        Experiment::SutvaPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::VarianceScaling => "variance_scaling",
            Experiment::Normality => "normality",
            Experiment::VarEstimatorEval => "var_estimator_eval",
            Experiment::CompareEstimators => "compare_estimators",
            Experiment::SutvaPower => "sutva_power",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                Error::Config(format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// How the surrogate graph of each replication is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphModel {
    ErdosRenyi,
    /// Equal contiguous blocks; `n_clusters` blocks with `within_fraction`
    /// of edges inside a block. The blocks double as the clustering.
    PlantedPartition,
}

impl GraphModel {
    fn name(self) -> &'static str {
        match self {
            GraphModel::ErdosRenyi => "erdos_renyi",
            GraphModel::PlantedPartition => "planted_partition",
        }
    }
}

impl FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erdos_renyi" => Ok(GraphModel::ErdosRenyi),
            "planted_partition" => Ok(GraphModel::PlantedPartition),
            _ => Err(Error::Config(format!(
                "unknown graph model {s:?}; expected erdos_renyi or planted_partition"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub p: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub link: Link,
    pub d_bar_list: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// 0 uses every available core.
    pub threads: usize,
    /// Draw graph and instance once per arm instead of per replication.
    pub fixed_instance: bool,
    pub alpha: f64,
    pub graph: GraphModel,
    pub n_clusters: usize,
    pub within_fraction: f64,
    /// Cluster file for the cluster-randomized arm.
    pub clusters: Option<PathBuf>,
    /// Cluster with label propagation when no cluster file is given and the
    /// graph has no planted blocks.
    pub label_propagation_fallback: bool,
    /// Histogram bins for the normality experiment.
    pub bins: usize,
}

pub const KEYS: [&str; 19] = [
    "experiment",
    "n",
    "p",
    "gamma1",
    "gamma2",
    "link",
    "d_bar_list",
    "replications",
    "master_seed",
    "output_dir",
    "threads",
    "fixed_instance",
    "alpha",
    "graph",
    "n_clusters",
    "within_fraction",
    "clusters",
    "label_propagation_fallback",
    "bins",
];

impl ExperimentConfig {
    /// Desk-scale defaults for an experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let (n, d_bar_list, replications) = match experiment {
            Experiment::VarianceScaling => (2000, vec![5.0, 10.0, 15.0, 20.0], 300),
            Experiment::Normality => (5000, vec![10.0], 2000),
            Experiment::VarEstimatorEval => (10_000, vec![10.0, 20.0, 40.0], 1000),
            Experiment::CompareEstimators => (10_000, vec![10.0], 1000),
            Experiment::SutvaPower => (5000, vec![10.0], 1000),
        };
        ExperimentConfig {
            experiment,
            n,
            p: 0.5,
            gamma1: 1.0,
            gamma2: 0.5,
            // The normality protocol uses the binary outcome.
            link: if experiment == Experiment::Normality {
                Link::Threshold(1.0)
            } else {
                Link::Sqrt
            },
            d_bar_list,
            replications,
            master_seed: 20_240_917,
            output_dir: PathBuf::from(format!("out/{}", experiment.name())),
            threads: 0,
            fixed_instance: false,
            alpha: 0.05,
            graph: if experiment == Experiment::CompareEstimators {
                GraphModel::PlantedPartition
            } else {
                GraphModel::ErdosRenyi
            },
            n_clusters: 828,
            within_fraction: 0.287,
            clusters: None,
            label_propagation_fallback: false,
            bins: 40,
        }
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::Config(format!("{key}: expected {what}, got {value:?}"));
        match key {
            "experiment" => self.experiment = value.parse()?,
            "n" => self.n = value.parse().map_err(|_| bad("a positive integer"))?,
            "p" => self.p = value.parse().map_err(|_| bad("a number"))?,
            "gamma1" => self.gamma1 = value.parse().map_err(|_| bad("a number"))?,
            "gamma2" => self.gamma2 = value.parse().map_err(|_| bad("a number"))?,
            "link" => self.link = value.parse()?,
            "d_bar_list" => {
                self.d_bar_list = value
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("a comma-separated list of numbers"))?
            }
            "replications" => self.replications = value.parse().map_err(|_| bad("a positive integer"))?,
            "master_seed" => self.master_seed = value.parse().map_err(|_| bad("an unsigned 64-bit integer"))?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "threads" => self.threads = value.parse().map_err(|_| bad("a nonnegative integer"))?,
            "fixed_instance" => self.fixed_instance = parse_bool(value).ok_or_else(|| bad("true or false"))?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad("a number"))?,
            "graph" => self.graph = value.parse()?,
            "n_clusters" => self.n_clusters = value.parse().map_err(|_| bad("a positive integer"))?,
            "within_fraction" => self.within_fraction = value.parse().map_err(|_| bad("a number"))?,
            "clusters" => self.clusters = (!value.is_empty()).then(|| PathBuf::from(value)),
            "label_propagation_fallback" => {
                self.label_propagation_fallback = parse_bool(value).ok_or_else(|| bad("true or false"))?
            }
            "bins" => self.bins = value.parse().map_err(|_| bad("a positive integer"))?,
            _ => {
                return Err(Error::Config(format!(
                    "unknown key {key:?}; valid keys are {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Build from key/value pairs. `experiment` picks the defaults; an
    /// explicit `fallback` is used when the pairs do not name one.
    pub fn from_pairs<'a, I>(pairs: I, fallback: Option<Experiment>) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pairs: Vec<(&str, &str)> = pairs.into_iter().collect();
        let named = pairs
            .iter()
            .rev()
            .find(|(k, _)| *k == "experiment")
            .map(|(_, v)| v.trim().parse::<Experiment>())
            .transpose()?;
        let experiment = named
            .or(fallback)
            .ok_or_else(|| Error::Config("no experiment given".into()))?;
        let mut cfg = ExperimentConfig::defaults(experiment);
        for (k, v) in pairs {
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }

    /// Every setting as a string, in `KEYS` order; `from_pairs` of the
    /// result reproduces the configuration exactly.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let d_bars: Vec<String> = self.d_bar_list.iter().map(|d| d.to_string()).collect();
        let values = [
            self.experiment.name().to_string(),
            self.n.to_string(),
            self.p.to_string(),
            self.gamma1.to_string(),
            self.gamma2.to_string(),
            self.link.to_string(),
            d_bars.join(","),
            self.replications.to_string(),
            self.master_seed.to_string(),
            self.output_dir.display().to_string(),
            self.threads.to_string(),
            self.fixed_instance.to_string(),
            self.alpha.to_string(),
            self.graph.name().to_string(),
            self.n_clusters.to_string(),
            self.within_fraction.to_string(),
            self.clusters.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            self.label_propagation_fallback.to_string(),
            self.bins.to_string(),
        ];
        KEYS.iter().map(|k| k.to_string()).zip(values).collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.to_pairs().into_iter().collect()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidProbability(self.p));
        }
        if self.n < 2 {
            return err(format!("n must be at least 2, got {}", self.n));
        }
        if self.replications < 2 {
            return err(format!(
                "replications must be at least 2 to form an empirical variance, got {}",
                self.replications
            ));
        }
        if self.d_bar_list.is_empty() {
            return err("d_bar_list must not be empty".into());
        }
        if let Some(d) = self.d_bar_list.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return err(format!("mean degree {d} is not a nonnegative number"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return err(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(0.0..0.9).contains(&self.gamma2) {
            return err(format!("gamma2 must lie in [0, 0.9), got {}", self.gamma2));
        }
        if !(self.gamma1.is_finite() && self.gamma1 >= 0.0) {
            return err(format!("gamma1 must be nonnegative, got {}", self.gamma1));
        }
        if self.graph == GraphModel::PlantedPartition && !(1..=self.n).contains(&self.n_clusters) {
            return err(format!("n_clusters must lie in 1..={}, got {}", self.n, self.n_clusters));
        }
        if !(0.0..=1.0).contains(&self.within_fraction) {
            return err(format!("within_fraction must lie in [0, 1], got {}", self.within_fraction));
        }
        if self.bins == 0 {
            return err("bins must be positive".into());
        }
        Ok(())
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

/// Parse a flat config file: `key = value` per line, `#` comments.
pub fn parse_config_text(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, lineno + 1, format!("expected key = value, got {line:?}")))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Config(format!(
                "{}:{}: unknown key {k:?}; valid keys are {}",
                path.display(),
                lineno + 1,
                KEYS.join(", ")
            )));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_pairs() {
        let mut cfg = ExperimentConfig::defaults(Experiment::SutvaPower);
        cfg.set("gamma2", "0.1").unwrap();
        cfg.set("link", "threshold:1.5").unwrap();
        cfg.set("d_bar_list", "5, 7.5").unwrap();
        cfg.set("clusters", "c.tsv").unwrap();
        let pairs = cfg.to_pairs();
        let back = ExperimentConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())), None).unwrap();
        assert_eq!(back.to_pairs(), pairs);
        assert_eq!(back.d_bar_list, vec![5.0, 7.5]);
        assert_eq!(pairs.len(), KEYS.len());
    }

    #[test]
    fn unknown_keys_list_valid_ones() {
        let err = parse_config_text("n = 10\nfoo = 3\n", Path::new("c.cfg")).unwrap_err().to_string();
        assert!(err.contains("foo") && err.contains("replications"), "{err}");
        let mut cfg = ExperimentConfig::defaults(Experiment::Normality);
        assert!(cfg.set("bar", "1").is_err());
    }

    #[test]
    fn config_text_parsing() {
        let pairs = parse_config_text("# comment\nexperiment = normality\n\nn = 300 # trailing\n", Path::new("x")).unwrap();
        assert_eq!(pairs, vec![("experiment".into(), "normality".into()), ("n".into(), "300".into())]);
        assert!(parse_config_text("n 300", Path::new("x")).is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::defaults(Experiment::VarianceScaling);
        assert!(cfg.validate().is_ok());
        cfg.replications = 1;
        assert!(cfg.validate().is_err());
        cfg.replications = 10;
        cfg.p = 1.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidProbability(_))));
        cfg.p = 0.5;
        cfg.d_bar_list.clear();
        assert!(cfg.validate().is_err());
    }
}
