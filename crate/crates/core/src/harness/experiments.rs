//! Monte Carlo experiment runners.
//!
//! Replications run in parallel and are collected in index order; every
//! random draw is seeded from (master seed, arm, replication, stream), so
//! results do not depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{difference_in_means, unit_statistics};
use crate::graph::{erdos_renyi, planted_partition, Graph};
use crate::harness::config::{Experiment, ExperimentConfig, GraphModel};
use crate::harness::output::{num, Table};
use crate::inference::{chebyshev_test, normal_test, variance_estimate, VarianceMode};
use crate::outcomes::{generate_instance, ground_truth_tte, realize, ExposureModel};
use crate::randomization::{bernoulli_assign, cluster_assign, label_propagation, load_clusters, Clustering};
use crate::seed::{self, stream};
use crate::stats::{self, LinearFit};

/// One Bernoulli replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub arm: usize,
    pub d_bar: f64,
    pub replication_index: usize,
    pub seed: u64,
    pub pi: f64,
    pub dim: f64,
    pub contrast: f64,
    pub var_pi: Option<f64>,
    pub var_contrast: Option<f64>,
    pub tte: f64,
}

impl ReplicationRecord {
    pub const HEADER: [&'static str; 10] = [
        "arm",
        "d_bar",
        "replication",
        "seed",
        "pi",
        "dim",
        "contrast",
        "var_pi",
        "var_contrast",
        "tte",
    ];

    fn row(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        vec![
            self.arm.to_string(),
            num(self.d_bar),
            self.replication_index.to_string(),
            self.seed.to_string(),
            num(self.pi),
            num(self.dim),
            num(self.contrast),
            opt(self.var_pi),
            opt(self.var_contrast),
            num(self.tte),
        ]
    }
}

pub fn records_table(records: &[ReplicationRecord]) -> Table {
    let mut t = Table::new(ReplicationRecord::HEADER);
    for r in records {
        t.push(r.row());
    }
    t
}

/// A surrogate graph with its outcome model.
pub struct Instance {
    pub graph: Graph,
    pub model: ExposureModel,
    pub tte: f64,
    /// Planted block labels, when the graph has them.
    pub blocks: Option<Vec<u32>>,
}

pub fn replication_seed(cfg: &ExperimentConfig, arm: usize, rep: usize) -> u64 {
    seed::derive(cfg.master_seed, &[arm as u64, rep as u64])
}

fn instance_root(cfg: &ExperimentConfig, arm: usize, rep: usize) -> u64 {
    if cfg.fixed_instance {
        seed::derive(cfg.master_seed, &[arm as u64])
    } else {
        replication_seed(cfg, arm, rep)
    }
}

pub fn build_instance(cfg: &ExperimentConfig, d_bar: f64, root: u64) -> Result<Instance> {
    let graph_seed = seed::derive(root, &[stream::GRAPH]);
    let (graph, blocks) = match cfg.graph {
        GraphModel::ErdosRenyi => (erdos_renyi(cfg.n, d_bar, graph_seed)?, None),
        GraphModel::PlantedPartition => {
            let (g, labels) = planted_partition(cfg.n, cfg.n_clusters, d_bar, cfg.within_fraction, graph_seed)?;
            (g, Some(labels))
        }
    };
    let model = generate_instance(
        &graph,
        cfg.gamma1,
        cfg.gamma2,
        cfg.link.clone(),
        seed::derive(root, &[stream::INSTANCE]),
    )?;
    let tte = ground_truth_tte(&model)?;
    Ok(Instance {
        graph,
        model,
        tte,
        blocks,
    })
}

struct Evaluation {
    pi: f64,
    dim: f64,
    contrast: f64,
    var_pi: Option<f64>,
    var_contrast: Option<f64>,
}

fn evaluate(inst: &Instance, z: &crate::randomization::Assignment, with_variance: bool) -> Result<Evaluation> {
    let y = realize(&inst.model, z)?;
    let s = unit_statistics(&inst.graph, &y, z)?;
    let pi = s.mean_t();
    let contrast = s.mean_t_prime();
    let (var_pi, var_contrast) = if with_variance {
        (
            Some(variance_estimate(&inst.graph, &s, pi, VarianceMode::Full)?.value),
            Some(variance_estimate(&inst.graph, &s, contrast, VarianceMode::NoSelf)?.value),
        )
    } else {
        (None, None)
    };
    Ok(Evaluation {
        pi,
        dim: difference_in_means(&y, z)?,
        contrast,
        var_pi,
        var_contrast,
    })
}

/// Bernoulli replications for one arm, fresh or fixed instance per `cfg`.
pub fn replicate_arm(cfg: &ExperimentConfig, arm: usize, d_bar: f64, with_variance: bool) -> Result<Vec<ReplicationRecord>> {
    let fixed = if cfg.fixed_instance {
        Some(build_instance(cfg, d_bar, instance_root(cfg, arm, 0))?)
    } else {
        None
    };
    (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = replication_seed(cfg, arm, rep);
            let fresh;
            let inst = match &fixed {
                Some(i) => i,
                None => {
                    fresh = build_instance(cfg, d_bar, instance_root(cfg, arm, rep))?;
                    &fresh
                }
            };
            let z = bernoulli_assign(cfg.n, cfg.p, seed::derive(rep_seed, &[stream::ASSIGNMENT]))?;
            let e = evaluate(inst, &z, with_variance)?;
            Ok(ReplicationRecord {
                arm,
                d_bar,
                replication_index: rep,
                seed: rep_seed,
                pi: e.pi,
                dim: e.dim,
                contrast: e.contrast,
                var_pi: e.var_pi,
                var_contrast: e.var_contrast,
                tte: inst.tte,
            })
        })
        .collect()
}

fn column(records: &[ReplicationRecord], f: impl Fn(&ReplicationRecord) -> f64) -> Vec<f64> {
    records.iter().map(f).collect()
}

fn warn_dense(cfg: &ExperimentConfig, d_bar: f64, notes: &mut Vec<String>) {
    if d_bar * d_bar > cfg.n as f64 / 10.0 {
        let msg = format!(
            "mean degree {d_bar} is large for n = {} (d_bar^2 > n/10); normal approximation not validated here",
            cfg.n
        );
        log::warn!("{msg}");
        notes.push(msg);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub d_bar: f64,
    pub d_bar_sq: f64,
    pub empirical_variance: f64,
    pub mean_estimate: f64,
    pub mean_tte: f64,
}

#[derive(Debug, Clone)]
pub struct VarianceScalingResult {
    pub rows: Vec<ScalingRow>,
    pub fit: LinearFit,
    pub records: Vec<ReplicationRecord>,
}

impl VarianceScalingResult {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["d_bar", "d_bar_sq", "empirical_variance", "mean_estimate", "mean_tte"]);
        for r in &self.rows {
            t.push(vec![num(r.d_bar), num(r.d_bar_sq), num(r.empirical_variance), num(r.mean_estimate), num(r.mean_tte)]);
        }
        t
    }
}

/// Empirical variance of the pseudo-inverse estimate per mean degree and a
/// least-squares fit of variance on d̄².
pub fn run_variance_scaling(cfg: &ExperimentConfig) -> Result<VarianceScalingResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (arm, &d_bar) in cfg.d_bar_list.iter().enumerate() {
        let recs = replicate_arm(cfg, arm, d_bar, false)?;
        let pis = column(&recs, |r| r.pi);
        rows.push(ScalingRow {
            d_bar,
            d_bar_sq: d_bar * d_bar,
            empirical_variance: stats::sample_variance(&pis),
            mean_estimate: stats::mean(&pis),
            mean_tte: stats::mean(&column(&recs, |r| r.tte)),
        });
        records.extend(recs);
    }
    let x: Vec<f64> = rows.iter().map(|r| r.d_bar_sq).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.empirical_variance).collect();
    let fit = stats::linear_fit(&x, &y);
    Ok(VarianceScalingResult { rows, fit, records })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
    pub density: f64,
    pub normal_density: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalityArm {
    pub d_bar: f64,
    pub mean: f64,
    pub sd: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    #[serde(skip)]
    pub standardized: Vec<f64>,
    #[serde(skip)]
    pub bins: Vec<HistogramBin>,
}

#[derive(Debug, Clone)]
pub struct NormalityResult {
    pub arms: Vec<NormalityArm>,
    pub records: Vec<ReplicationRecord>,
    pub notes: Vec<String>,
}

impl NormalityResult {
    pub fn samples_table(&self) -> Table {
        let mut t = Table::new(["d_bar", "replication", "standardized"]);
        for a in &self.arms {
            for (i, s) in a.standardized.iter().enumerate() {
                t.push(vec![num(a.d_bar), i.to_string(), num(*s)]);
            }
        }
        t
    }

    pub fn histogram_table(&self) -> Table {
        let mut t = Table::new(["d_bar", "bin_low", "bin_high", "count", "density", "normal_density"]);
        for a in &self.arms {
            for b in &a.bins {
                t.push(vec![num(a.d_bar), num(b.low), num(b.high), b.count.to_string(), num(b.density), num(b.normal_density)]);
            }
        }
        t
    }
}

const HISTOGRAM_RANGE: f64 = 4.0;

fn histogram(samples: &[f64], bins: usize) -> Vec<HistogramBin> {
    let width = 2.0 * HISTOGRAM_RANGE / bins as f64;
    let mut counts = vec![0usize; bins];
    for &s in samples {
        let b = ((s + HISTOGRAM_RANGE) / width).floor();
        if b >= 0.0 && (b as usize) < bins {
            counts[b as usize] += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, count)| {
            let low = -HISTOGRAM_RANGE + b as f64 * width;
            HistogramBin {
                low,
                high: low + width,
                count,
                density: count as f64 / (samples.len() as f64 * width),
                normal_density: stats::normal_pdf(low + width / 2.0),
            }
        })
        .collect()
}

/// Standardized pseudo-inverse estimates with a histogram and a
/// Kolmogorov-Smirnov comparison to the standard normal.
pub fn run_normality(cfg: &ExperimentConfig) -> Result<NormalityResult> {
    cfg.validate()?;
    let mut arms = Vec::new();
    let mut records = Vec::new();
    let mut notes = Vec::new();
    for (arm, &d_bar) in cfg.d_bar_list.iter().enumerate() {
        warn_dense(cfg, d_bar, &mut notes);
        let recs = replicate_arm(cfg, arm, d_bar, false)?;
        let pis = column(&recs, |r| r.pi);
        let (mean, sd) = (stats::mean(&pis), stats::sample_sd(&pis));
        if sd.is_nan() || sd <= 0.0 {
            return Err(Error::Precondition(format!("estimates have zero spread at d_bar = {d_bar}")));
        }
        let standardized: Vec<f64> = pis.iter().map(|x| (x - mean) / sd).collect();
        let ks = stats::ks_statistic(&standardized, stats::normal_cdf);
        arms.push(NormalityArm {
            d_bar,
            mean,
            sd,
            ks_statistic: ks,
            ks_p_value: stats::ks_p_value(ks, standardized.len()),
            bins: histogram(&standardized, cfg.bins),
            standardized,
        });
        records.extend(recs);
    }
    Ok(NormalityResult { arms, records, notes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarEvalRow {
    pub link: String,
    pub d_bar: f64,
    pub sigma2_empirical: f64,
    pub mean_var_hat: f64,
    pub std_var_hat: f64,
    pub relative_bias: f64,
    /// Monte Carlo standard error of sigma2_empirical.
    pub sigma2_se: f64,
}

#[derive(Debug, Clone)]
pub struct VarEvalResult {
    pub rows: Vec<VarEvalRow>,
    pub records: Vec<ReplicationRecord>,
}

impl VarEvalResult {
    pub fn table(&self) -> Table {
        let mut t = Table::new([
            "link",
            "d_bar",
            "sigma2_empirical",
            "mean_var_hat",
            "std_var_hat",
            "relative_bias",
            "sigma2_se",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.link.clone(),
                num(r.d_bar),
                num(r.sigma2_empirical),
                num(r.mean_var_hat),
                num(r.std_var_hat),
                num(r.relative_bias),
                num(r.sigma2_se),
            ]);
        }
        t
    }
}

/// Compare the variance estimator's mean and spread with the empirical
/// variance of the estimate.
pub fn run_var_estimator_eval(cfg: &ExperimentConfig) -> Result<VarEvalResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (arm, &d_bar) in cfg.d_bar_list.iter().enumerate() {
        let recs = replicate_arm(cfg, arm, d_bar, true)?;
        let pis = column(&recs, |r| r.pi);
        let vh = column(&recs, |r| r.var_pi.expect("variance requested"));
        let sigma2 = stats::sample_variance(&pis);
        let mean_vh = stats::mean(&vh);
        rows.push(VarEvalRow {
            link: cfg.link.to_string(),
            d_bar,
            sigma2_empirical: sigma2,
            mean_var_hat: mean_vh,
            std_var_hat: stats::sample_sd(&vh),
            relative_bias: (mean_vh - sigma2) / sigma2,
            sigma2_se: stats::variance_standard_error(&pis),
        });
        records.extend(recs);
    }
    Ok(VarEvalResult { rows, records })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub d_bar: f64,
    pub estimator: String,
    pub randomization: String,
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonResult {
    pub rows: Vec<ComparisonRow>,
    pub tte: Vec<f64>,
    pub notes: Vec<String>,
}

impl ComparisonResult {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["d_bar", "estimator", "randomization", "bias", "variance", "mse"]);
        for r in &self.rows {
            t.push(vec![
                num(r.d_bar),
                r.estimator.clone(),
                r.randomization.clone(),
                num(r.bias),
                num(r.variance),
                num(r.mse),
            ]);
        }
        t
    }

    pub fn row(&self, d_bar: f64, estimator: &str, randomization: &str) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.d_bar == d_bar && r.estimator == estimator && r.randomization == randomization)
    }
}

fn comparison_row(d_bar: f64, estimator: &str, randomization: &str, xs: &[f64], tte: f64) -> ComparisonRow {
    let bias = stats::mean(xs) - tte;
    let variance = stats::sample_variance(xs);
    ComparisonRow {
        d_bar,
        estimator: estimator.into(),
        randomization: randomization.into(),
        bias,
        variance,
        mse: bias * bias + variance,
    }
}

fn clustering_for(cfg: &ExperimentConfig, inst: &Instance, root: u64, notes: &mut Vec<String>) -> Result<Option<Clustering>> {
    if let Some(path) = &cfg.clusters {
        notes.push(format!("cluster arm: clusters read from {}", path.display()));
        return load_clusters(path, cfg.n).map(Some);
    }
    if let Some(blocks) = &inst.blocks {
        notes.push("cluster arm: planted partition blocks used as clusters".into());
        return Ok(Some(Clustering::from_labels(blocks)));
    }
    if cfg.label_propagation_fallback {
        notes.push("cluster arm: label propagation fallback (not a community-detection method with guarantees)".into());
        return Ok(Some(label_propagation(&inst.graph, seed::derive(root, &[stream::CLUSTERING]), 100)));
    }
    let msg = "cluster arm skipped: no clusters file and no planted blocks".to_string();
    log::warn!("{msg}");
    notes.push(msg);
    Ok(None)
}

/// Bias, variance and MSE of DIM under Bernoulli and cluster randomization
/// and of the pseudo-inverse estimate under Bernoulli randomization, on one
/// fixed graph and instance per mean degree.
pub fn run_compare_estimators(cfg: &ExperimentConfig) -> Result<ComparisonResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut ttes = Vec::new();
    let mut notes = Vec::new();
    for (arm, &d_bar) in cfg.d_bar_list.iter().enumerate() {
        let root = seed::derive(cfg.master_seed, &[arm as u64]);
        let inst = build_instance(cfg, d_bar, root)?;
        let clustering = clustering_for(cfg, &inst, root, &mut notes)?;
        if let Some(c) = &clustering {
            notes.push(format!(
                "d_bar {d_bar}: {} clusters, {:.4} of edges within clusters",
                c.k(),
                c.within_edge_fraction(&inst.graph)
            ));
        }
        let draws: Vec<(f64, f64, Option<f64>)> = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| {
                let rep_seed = replication_seed(cfg, arm, rep);
                let z = bernoulli_assign(cfg.n, cfg.p, seed::derive(rep_seed, &[stream::ASSIGNMENT]))?;
                let e = evaluate(&inst, &z, false)?;
                let cluster_dim = match &clustering {
                    Some(c) => {
                        let zc = cluster_assign(c, cfg.p, seed::derive(rep_seed, &[stream::CLUSTER_ASSIGNMENT]))?;
                        Some(difference_in_means(&realize(&inst.model, &zc)?, &zc)?)
                    }
                    None => None,
                };
                Ok((e.dim, e.pi, cluster_dim))
            })
            .collect::<Result<_>>()?;
        let dims: Vec<f64> = draws.iter().map(|d| d.0).collect();
        let pis: Vec<f64> = draws.iter().map(|d| d.1).collect();
        rows.push(comparison_row(d_bar, "dim", "bernoulli", &dims, inst.tte));
        if clustering.is_some() {
            let cl: Vec<f64> = draws.iter().map(|d| d.2.expect("cluster arm")).collect();
            rows.push(comparison_row(d_bar, "dim", "cluster", &cl, inst.tte));
        }
        rows.push(comparison_row(d_bar, "pseudo_inverse", "bernoulli", &pis, inst.tte));
        ttes.push(inst.tte);
    }
    Ok(ComparisonResult { rows, tte: ttes, notes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub gamma2: f64,
    pub d_bar: f64,
    pub replications: usize,
    pub rejection_rate: f64,
    pub rejection_rate_chebyshev: f64,
    pub mean_contrast: f64,
    pub sd_contrast: f64,
    pub mean_var_hat: f64,
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub rows: Vec<PowerRow>,
    pub records: Vec<ReplicationRecord>,
}

impl PowerResult {
    pub fn table(&self) -> Table {
        let mut t = Table::new([
            "gamma2",
            "d_bar",
            "replications",
            "rejection_rate",
            "rejection_rate_chebyshev",
            "mean_contrast",
            "sd_contrast",
            "mean_var_hat",
        ]);
        for r in &self.rows {
            t.push(vec![
                num(r.gamma2),
                num(r.d_bar),
                r.replications.to_string(),
                num(r.rejection_rate),
                num(r.rejection_rate_chebyshev),
                num(r.mean_contrast),
                num(r.sd_contrast),
                num(r.mean_var_hat),
            ]);
        }
        t
    }
}

/// Rejection rate of the no-interference test (normal and Chebyshev
/// versions) at level `alpha`.
pub fn run_sutva_power(cfg: &ExperimentConfig) -> Result<PowerResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (arm, &d_bar) in cfg.d_bar_list.iter().enumerate() {
        let recs = replicate_arm(cfg, arm, d_bar, true)?;
        let mut normal = 0usize;
        let mut cheb = 0usize;
        for r in &recs {
            let v = r.var_contrast.expect("variance requested");
            if normal_test(r.contrast, v, cfg.alpha)?.p_value < cfg.alpha {
                normal += 1;
            }
            if chebyshev_test(r.contrast, v, cfg.alpha)? {
                cheb += 1;
            }
        }
        let reps = recs.len() as f64;
        let contrasts = column(&recs, |r| r.contrast);
        rows.push(PowerRow {
            gamma2: cfg.gamma2,
            d_bar,
            replications: recs.len(),
            rejection_rate: normal as f64 / reps,
            rejection_rate_chebyshev: cheb as f64 / reps,
            mean_contrast: stats::mean(&contrasts),
            sd_contrast: stats::sample_sd(&contrasts),
            mean_var_hat: stats::mean(&column(&recs, |r| r.var_contrast.unwrap())),
        });
        records.extend(recs);
    }
    Ok(PowerResult { rows, records })
}

/// Files written by [`run`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub experiment: Experiment,
    pub outputs: Vec<std::path::PathBuf>,
    pub notes: Vec<String>,
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))
}

/// Run the configured experiment and write its tables, JSON summary and
/// manifest under `cfg.output_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    use crate::harness::output::{ensure_dir, write_json, Manifest};
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    ensure_dir(&dir)?;
    pool(cfg.threads)?.install(|| {
        let mut outputs: Vec<(String, Table)> = Vec::new();
        let mut json: Option<(String, serde_json::Value)> = None;
        let mut notes = Vec::new();
        match cfg.experiment {
            Experiment::VarianceScaling => {
                let r = run_variance_scaling(cfg)?;
                outputs.push(("variance_scaling.csv".into(), r.table()));
                outputs.push(("replications.csv".into(), records_table(&r.records)));
                json = Some(("fit.json".into(), serde_json::to_value(r.fit).expect("fit serializes")));
            }
            Experiment::Normality => {
                let r = run_normality(cfg)?;
                outputs.push(("standardized.csv".into(), r.samples_table()));
                outputs.push(("histogram.csv".into(), r.histogram_table()));
                outputs.push(("replications.csv".into(), records_table(&r.records)));
                json = Some(("ks.json".into(), serde_json::to_value(&r.arms).expect("arms serialize")));
                notes.extend(r.notes);
            }
            Experiment::VarEstimatorEval => {
                let r = run_var_estimator_eval(cfg)?;
                outputs.push(("var_estimator_eval.csv".into(), r.table()));
                outputs.push(("replications.csv".into(), records_table(&r.records)));
            }
            Experiment::CompareEstimators => {
                let r = run_compare_estimators(cfg)?;
                outputs.push(("compare_estimators.csv".into(), r.table()));
                json = Some(("tte.json".into(), serde_json::to_value(&r.tte).expect("tte serializes")));
                notes.extend(r.notes);
            }
            Experiment::SutvaPower => {
                let r = run_sutva_power(cfg)?;
                outputs.push(("sutva_power.csv".into(), r.table()));
                outputs.push(("replications.csv".into(), records_table(&r.records)));
            }
        }
        if cfg.fixed_instance {
            notes.push("graph and instance drawn once per arm (fixed_instance)".into());
        }
        let mut written = Vec::new();
        for (name, table) in &outputs {
            let path = dir.join(name);
            table.write_csv(&path)?;
            written.push(path);
        }
        if let Some((name, value)) = json {
            let path = dir.join(name);
            write_json(&path, &value)?;
            written.push(path);
        }
        let names = written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        let manifest = Manifest::new(cfg, notes.clone(), names);
        written.push(manifest.write(&dir)?);
        Ok(RunSummary {
            experiment: cfg.experiment,
            outputs: written,
            notes,
        })
    })
}
