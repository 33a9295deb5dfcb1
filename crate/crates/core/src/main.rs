use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;

use snipe::error::{Error, Result};
use snipe::estimators::EstimatorKind;
use snipe::graph::{erdos_renyi, load_edge_list, planted_partition, save_edge_list, Graph};
use snipe::harness::analyze::{analyze, report_table};
use snipe::harness::config::{read_config_file, ExperimentConfig};
use snipe::harness::experiments::run;
use snipe::harness::output::Manifest;
use snipe::oracle::{enumerate_estimator, exogenous_bias, joint_effects};
use snipe::outcomes::{generate_instance, ground_truth_tte, LinearModel, Link, PotentialOutcomes, SparseMatrix, WeightMatrix};
use snipe::seed;

#[derive(Parser)]
#[command(name = "snipe", version, about = "Total treatment effect estimation under network interference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random surrogate graph and write it as an edge list.
    GenGraph(GenGraph),
    /// Run a Monte Carlo experiment.
    Simulate(Simulate),
    /// Estimate effects from an observed experiment.
    Analyze(Analyze),
    /// Exact enumeration on a small instance (n <= 20).
    Oracle(Oracle),
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    ErdosRenyi,
    PlantedPartition,
}

#[derive(Args)]
struct GenGraph {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d_bar: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "erdos-renyi")]
    model: GraphKind,
    /// Number of blocks for the planted partition.
    #[arg(long, default_value_t = 828)]
    blocks: usize,
    /// Share of edges inside blocks for the planted partition.
    #[arg(long, default_value_t = 0.287)]
    within: f64,
    #[arg(long)]
    out: PathBuf,
    /// Where to write `node_id<TAB>block` for the planted partition.
    #[arg(long)]
    clusters_out: Option<PathBuf>,
}

#[derive(Args)]
struct Simulate {
    /// variance_scaling, normality, var_estimator_eval, compare_estimators or sutva_power
    experiment: Option<String>,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rerun the configuration recorded in a manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Override any config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    link: Option<String>,
    /// Comma-separated mean degrees.
    #[arg(long)]
    d_bar_list: Option<String>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    fixed_instance: bool,
    #[arg(long)]
    clusters: Option<PathBuf>,
}

#[derive(Args)]
struct Analyze {
    #[arg(long)]
    edges: PathBuf,
    /// TSV with node_id, z and one column per metric.
    #[arg(long)]
    metrics: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Report CSV; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write full reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleModel {
    /// Linear outcomes with random weights on the graph's closed neighborhoods.
    Linear,
    /// Exposure model generated on the graph.
    Exposure,
}

#[derive(Args)]
struct Oracle {
    /// Edge list; a random graph is generated when omitted.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    d_bar: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exposure")]
    model: OracleModel,
    #[arg(long, default_value = "sqrt")]
    link: String,
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma2: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
}

fn gen_graph(a: GenGraph) -> Result<()> {
    let (g, labels) = match a.model {
        GraphKind::ErdosRenyi => (erdos_renyi(a.n, a.d_bar, a.seed)?, None),
        GraphKind::PlantedPartition => {
            let (g, l) = planted_partition(a.n, a.blocks, a.d_bar, a.within, a.seed)?;
            (g, Some(l))
        }
    };
    save_edge_list(&g, &a.out)?;
    if let (Some(path), Some(labels)) = (&a.clusters_out, labels) {
        let text: String = labels.iter().enumerate().map(|(i, l)| format!("{i}\t{l}\n")).collect();
        std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    let s = g.degree_stats();
    eprintln!(
        "wrote {} nodes, {} edges (mean closed degree {:.3}) to {}",
        g.n(),
        s.edge_count,
        s.mean_closed_degree,
        a.out.display()
    );
    Ok(())
}

fn simulate(a: Simulate) -> Result<()> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    if let Some(m) = &a.manifest {
        pairs.extend(Manifest::read(m)?.config);
    }
    if let Some(c) = &a.config {
        pairs.extend(read_config_file(c)?);
    }
    if let Some(e) = &a.experiment {
        pairs.push(("experiment".into(), e.clone()));
    }
    let flags: [(&str, Option<String>); 11] = [
        ("n", a.n.map(|v| v.to_string())),
        ("p", a.p.map(|v| v.to_string())),
        ("gamma1", a.gamma1.map(|v| v.to_string())),
        ("gamma2", a.gamma2.map(|v| v.to_string())),
        ("link", a.link.clone()),
        ("d_bar_list", a.d_bar_list.clone()),
        ("replications", a.replications.map(|v| v.to_string())),
        ("master_seed", a.master_seed.map(|v| v.to_string())),
        ("output_dir", a.output_dir.as_ref().map(|v| v.display().to_string())),
        ("threads", a.threads.map(|v| v.to_string())),
        ("clusters", a.clusters.as_ref().map(|v| v.display().to_string())),
    ];
    pairs.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
    if a.fixed_instance {
        pairs.push(("fixed_instance".into(), "true".into()));
    }
    for s in &a.sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {s:?}")))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    let cfg = ExperimentConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())), None)?;
    let summary = run(&cfg)?;
    for note in &summary.notes {
        eprintln!("note: {note}");
    }
    for p in &summary.outputs {
        println!("{}", p.display());
    }
    Ok(())
}

fn analyze_cmd(a: Analyze) -> Result<()> {
    let reports = analyze(&a.edges, &a.metrics, a.p, a.alpha)?;
    let table = report_table(&reports);
    match &a.out {
        Some(path) => table.write_csv(path)?,
        None => {
            println!("{}", table.header.join(","));
            for r in &table.rows {
                println!("{}", r.join(","));
            }
        }
    }
    if let Some(path) = &a.json {
        snipe::harness::output::write_json(path, &reports)?;
    }
    Ok(())
}

fn random_linear(g: &Graph, seed: u64) -> Result<LinearModel> {
    let mut rng = seed::rng(seed);
    let n = g.n();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in g.closed(i) {
            entries.push((i, j as usize, rng.random::<f64>()));
        }
    }
    let baseline = (0..n).map(|_| rng.random::<f64>()).collect();
    LinearModel::new(baseline, WeightMatrix::new(SparseMatrix::from_triplets(n, n, entries)?)?)
}

fn oracle_report<M: PotentialOutcomes>(model: &M, g: &Graph, p: f64) -> Result<serde_json::Value> {
    let tte = ground_truth_tte(model)?;
    let mut estimators = serde_json::Map::new();
    for kind in EstimatorKind::ALL {
        let r = enumerate_estimator(model, g, p, kind)?;
        estimators.insert(
            kind.name().into(),
            json!({ "mean": r.mean, "variance": r.variance, "bias": r.mean - tte }),
        );
    }
    let truth = model.true_neighborhoods()?;
    let je = joint_effects(model, &truth)?;
    let same_graph = (0..g.n()).all(|i| g.closed_neighborhood(i).map(|m| m == truth[i]).unwrap_or(false));
    let mut out = json!({
        "n": g.n(),
        "p": p,
        "tte": tte,
        "estimators": estimators,
        "beta_sums": je.beta_sums,
        "surrogate_is_true_network": same_graph,
    });
    if same_graph {
        out["joint_effect_expected_estimate"] = json!(je.expected_estimate(p));
    }
    if let Some(lin) = model.as_linear() {
        out["exogenous_bias"] = json!(-exogenous_bias(lin, g)?);
    }
    Ok(out)
}

fn oracle_cmd(a: Oracle) -> Result<()> {
    let g = match &a.edges {
        Some(path) => load_edge_list(path)?.0,
        None => erdos_renyi(a.n, a.d_bar, a.seed)?,
    };
    let instance_seed = seed::derive(a.seed, &[seed::stream::INSTANCE]);
    let report = match a.model {
        OracleModel::Linear => oracle_report(&random_linear(&g, instance_seed)?, &g, a.p)?,
        OracleModel::Exposure => {
            let link: Link = a.link.parse()?;
            oracle_report(&generate_instance(&g, a.gamma1, a.gamma2, link, instance_seed)?, &g, a.p)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::GenGraph(a) => gen_graph(a),
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
