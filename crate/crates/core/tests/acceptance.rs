//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! SNIPE_ACCEPTANCE_ONLY=1,4 runs a subset. SNIPE_ACCEPTANCE_STRICT=1 makes
//! any FAIL exit nonzero; by default failures are reported and the process
//! exits 0 so the rest of the test suite still runs.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;

use snipe::estimators::{pseudo_inverse, unit_statistics, EstimatorKind};
use snipe::graph::{erdos_renyi, Graph};
use snipe::harness::config::{Experiment, ExperimentConfig};
use snipe::harness::experiments::{
    run_compare_estimators, run_normality, run_sutva_power, run_var_estimator_eval, run_variance_scaling,
};
use snipe::inference::{variance_estimate, VarianceMode};
use snipe::oracle::{endogenous_bias_check, enumerate_estimator, exogenous_bias, expected_pi_from_psi, expected_psi};
use snipe::outcomes::{generate_instance, realize, CustomModel, LinearModel, Link, PotentialOutcomes, SparseMatrix, WeightMatrix};
use snipe::randomization::{bernoulli_assign, Assignment};
use snipe::{seed, stats};

type Check = snipe::Result<(bool, String)>;

const EXACT_TOL: f64 = 1e-10;

// Independent brute force over all 2^n assignments: E[τ̂_PI] and the TTE
// straight from the model's outcome function.
fn brute_force<M: PotentialOutcomes>(model: &M, g: &Graph, p: f64) -> (f64, f64, f64) {
    let n = model.n();
    let mut mean = 0.0;
    let mut second = 0.0;
    for mask in 0u64..(1 << n) {
        let z: Vec<bool> = (0..n).map(|b| mask >> b & 1 == 1).collect();
        let k = z.iter().filter(|&&b| b).count() as i32;
        let prob = p.powi(k) * (1.0 - p).powi(n as i32 - k);
        let y = model.outcomes(&z).unwrap();
        let est = pseudo_inverse(g, &y, &Assignment::new(z, p).unwrap()).unwrap();
        mean += prob * est;
        second += prob * est * est;
    }
    let y1 = model.outcomes(&vec![true; n]).unwrap();
    let y0 = model.outcomes(&vec![false; n]).unwrap();
    let tte = y1.iter().zip(&y0).map(|(a, b)| a - b).sum::<f64>() / n as f64;
    (mean, second - mean * mean, tte)
}

fn random_graph(n: usize, edge_p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < edge_p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap().0
}

fn linear_on(n: usize, support: &[Vec<usize>], rng: &mut impl Rng) -> LinearModel {
    let mut entries = Vec::new();
    for (i, nb) in support.iter().enumerate() {
        for &k in nb {
            entries.push((i, k, 0.1 + rng.random::<f64>()));
        }
    }
    let baseline = (0..n).map(|_| rng.random::<f64>()).collect();
    LinearModel::new(baseline, WeightMatrix::new(SparseMatrix::from_triplets(n, n, entries).unwrap()).unwrap()).unwrap()
}

// Nonlinear outcomes over the given neighborhoods, including pairwise and
// higher-order interactions.
fn nonlinear_on(n: usize, support: Vec<Vec<usize>>, rng: &mut impl Rng) -> CustomModel {
    let w: Vec<Vec<f64>> = support.iter().map(|nb| nb.iter().map(|_| rng.random::<f64>()).collect()).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let nb = Arc::new(support.clone());
    CustomModel::new(n, support, move |i, z| {
        let e: f64 = nb[i].iter().zip(&w[i]).filter(|(&k, _)| z[k]).map(|(_, &w)| w).sum();
        let others = nb[i].iter().filter(|&&k| k != i && z[k]).count() as f64;
        b[i] + (1.0 + e).sqrt() + 0.3 * (z[i] as u8 as f64) * others * others
    })
    .unwrap()
}

fn closed_sets(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|i| g.closed_neighborhood(i).unwrap()).collect()
}

// The surrogate graph plus a few extra true edges.
fn with_extra_edges(g: &Graph, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut sets = closed_sets(g);
    for (i, set) in sets.iter_mut().enumerate() {
        let k = rng.random_range(0..n);
        if k != i && !set.contains(&k) && rng.random::<f64>() < 0.6 {
            set.push(k);
            set.sort_unstable();
        }
    }
    sets
}

fn criterion_1() -> Check {
    let mut rng = seed::rng(101);
    let mut worst = [0.0f64; 4];
    for inst in 0..50 {
        let n = 4 + inst % 7;
        let p = if inst % 2 == 0 { 0.3 } else { 0.5 };
        let g = random_graph(n, 0.35, &mut rng);

        // expectation identity, on a nonlinear model with edges missing from G
        let m = nonlinear_on(n, with_extra_edges(&g, &mut rng), &mut rng);
        let (mean, _, _) = brute_force(&m, &g, p);
        let via_psi = expected_pi_from_psi(&expected_psi(&m, p)?, &g);
        worst[0] = worst[0].max((mean - via_psi).abs());

        // unbiasedness for linear outcomes when G is the true network
        let lin = linear_on(n, &closed_sets(&g), &mut rng);
        let (mean, _, tte) = brute_force(&lin, &g, p);
        worst[1] = worst[1].max((mean - tte).abs());

        // exact bias from missing edges
        let lin = linear_on(n, &with_extra_edges(&g, &mut rng), &mut rng);
        let (mean, _, tte) = brute_force(&lin, &g, p);
        worst[2] = worst[2].max((mean - tte + exogenous_bias(&lin, &g)?).abs());

        // joint-effects identity for nonlinear outcomes on G
        let m = nonlinear_on(n, closed_sets(&g), &mut rng);
        let (lhs, rhs) = endogenous_bias_check(&m, &g, p)?;
        let (mean, _, _) = brute_force(&m, &g, p);
        worst[3] = worst[3].max((lhs - rhs).abs()).max((mean - rhs).abs());
    }
    Ok((
        worst.iter().all(|&w| w <= EXACT_TOL),
        format!(
            "max errors: psi identity {:.1e}, linear unbiased {:.1e}, exogenous bias {:.1e}, joint effects {:.1e} (tol 1e-10)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

fn criterion_2() -> Check {
    let mut rng = seed::rng(202);
    let c = 1.7;
    let mut graphs: Vec<Graph> = vec![Graph::ring(8, 2)?, Graph::ring(12, 2)?, Graph::ring(12, 4)?, Graph::ring(11, 6)?];
    for n in [6, 9, 12] {
        graphs.push(random_graph(n, 0.3, &mut rng));
    }
    let mut worst = 0.0f64;
    for g in &graphs {
        let n = g.n();
        let sq: f64 = (0..n).map(|k| (g.closed(k).count() as f64).powi(2)).sum();
        let model = CustomModel::new(n, vec![Vec::new(); n], move |_, _| c)?;
        for p in [0.3, 0.5] {
            let closed = c * c * sq / ((n * n) as f64 * p * (1.0 - p));
            let r = enumerate_estimator(&model, g, p, EstimatorKind::PseudoInverse)?;
            let (_, brute, _) = brute_force(&model, g, p);
            worst = worst.max((r.variance - closed).abs()).max((brute - closed).abs());
        }
    }

    let n = 10_000;
    let d = 10;
    let reps = 2000;
    let g = Graph::ring(n, d)?;
    let y = vec![1.0; n];
    let closed = ((d + 1) * (d + 1)) as f64 * n as f64 / ((n * n) as f64 * 0.25);
    let est: Vec<f64> = (0..reps)
        .map(|r| pseudo_inverse(&g, &y, &bernoulli_assign(n, 0.5, seed::derive(202, &[r as u64]))?))
        .collect::<snipe::Result<_>>()?;
    let emp = stats::sample_variance(&est);
    let se = stats::variance_standard_error(&est);
    let z = (emp - closed).abs() / se;
    Ok((
        worst <= EXACT_TOL && z <= 3.0,
        format!(
            "enumeration max error {worst:.1e} on {} graphs; ring n={n} d={d}: empirical {emp:.5} vs closed form {closed:.5} ({z:.2} SE)",
            graphs.len()
        ),
    ))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for link in [Link::Sqrt, Link::Threshold(1.0)] {
        let mut cfg = ExperimentConfig::defaults(Experiment::VarianceScaling);
        cfg.link = link.clone();
        let r = run_variance_scaling(&cfg)?;
        pass &= r.fit.r_squared >= 0.9;
        let vars: Vec<String> = r.rows.iter().map(|x| format!("{:.4}", x.empirical_variance)).collect();
        parts.push(format!("{link}: R²={:.4} var=[{}]", r.fit.r_squared, vars.join(", ")));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs <= 300.0;
    Ok((pass, format!("{}; {secs:.0} s on {} thread(s)", parts.join("; "), rayon::current_num_threads())))
}

fn criterion_4() -> Check {
    let cfg = ExperimentConfig::defaults(Experiment::Normality);
    let r = run_normality(&cfg)?;
    let a = &r.arms[0];
    Ok((
        a.ks_p_value >= 0.01,
        format!(
            "n={} d̄={} reps={} link={}: KS D={:.4}, p={:.3} (reject below 0.01)",
            cfg.n, a.d_bar, cfg.replications, cfg.link, a.ks_statistic, a.ks_p_value
        ),
    ))
}

fn criterion_5() -> Check {
    let mut cfg = ExperimentConfig::defaults(Experiment::VarEstimatorEval);
    cfg.d_bar_list = vec![10.0, 40.0];
    let r = run_var_estimator_eval(&cfg)?;
    let (lo, hi) = (&r.rows[0], &r.rows[1]);
    let pass = lo.relative_bias.abs() <= 0.10 && hi.relative_bias < 0.0 && (0.05..=0.30).contains(&-hi.relative_bias);
    Ok((
        pass,
        format!(
            "d̄=10: σ²={:.5} mean σ̂²={:.5} rel bias {:+.1}%; d̄=40: σ²={:.5} mean σ̂²={:.5} rel bias {:+.1}%",
            lo.sigma2_empirical,
            lo.mean_var_hat,
            100.0 * lo.relative_bias,
            hi.sigma2_empirical,
            hi.mean_var_hat,
            100.0 * hi.relative_bias
        ),
    ))
}

fn criterion_6() -> Check {
    let cfg = ExperimentConfig::defaults(Experiment::CompareEstimators);
    let r = run_compare_estimators(&cfg)?;
    let d = cfg.d_bar_list[0];
    let (Some(dim), Some(cl), Some(pi)) = (
        r.row(d, "dim", "bernoulli"),
        r.row(d, "dim", "cluster"),
        r.row(d, "pseudo_inverse", "bernoulli"),
    ) else {
        return Ok((false, format!("missing arm; notes: {:?}", r.notes)));
    };
    // "≫" read as at least an order of magnitude
    let pass = pi.bias.abs() < cl.bias.abs() && cl.bias.abs() < dim.bias.abs() && pi.variance >= 10.0 * dim.variance;
    Ok((
        pass,
        format!(
            "|bias| PI {:.4} < cluster {:.4} < DIM {:.4}; var PI {:.3e} vs DIM {:.3e} ({:.0}x)",
            pi.bias.abs(),
            cl.bias.abs(),
            dim.bias.abs(),
            pi.variance,
            dim.variance,
            pi.variance / dim.variance
        ),
    ))
}

fn criterion_7() -> Check {
    let mut rates = Vec::new();
    let mut detail = Vec::new();
    for gamma2 in [0.0, 0.5] {
        let mut cfg = ExperimentConfig::defaults(Experiment::SutvaPower);
        cfg.gamma2 = gamma2;
        let r = run_sutva_power(&cfg)?;
        let row = &r.rows[0];
        rates.push(row.rejection_rate);
        detail.push(format!(
            "γ₂={gamma2}: rejection {:.3} (contrast mean {:.4}, sd {:.4})",
            row.rejection_rate, row.mean_contrast, row.sd_contrast
        ));
    }
    let pass = (0.03..=0.07).contains(&rates[0]) && rates[1] >= 0.5;
    Ok((pass, format!("{}; need size in [0.03, 0.07] and power >= 0.5", detail.join("; "))))
}

fn peak_rss_gb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0 / 1024.0)
}

fn criterion_8() -> Check {
    let n = 1_000_000;
    let setup = Instant::now();
    let g = erdos_renyi(n, 20.0, 808)?;
    let model = generate_instance(&g, 1.0, 0.5, Link::Sqrt, 809)?;
    let z = bernoulli_assign(n, 0.5, 810)?;
    let y = realize(&model, &z)?;
    let setup = setup.elapsed().as_secs_f64();

    let start = Instant::now();
    let s = unit_statistics(&g, &y, &z)?;
    let point = s.mean_t();
    let v = variance_estimate(&g, &s, point, VarianceMode::Full)?;
    let secs = start.elapsed().as_secs_f64();
    let rss = peak_rss_gb();
    let pass = secs <= 600.0 && point.is_finite() && rss.is_none_or(|r| r <= 8.0);
    Ok((
        pass,
        format!(
            "n=1e6 d̄=20: τ̂={point:.4} σ̂²={:.4e} in {secs:.1} s (setup {setup:.1} s), peak RSS {}",
            v.value,
            rss.map_or("unknown".into(), |r| format!("{r:.2} GB"))
        ),
    ))
}

fn main() {
    // libtest-style flags from `cargo test` are accepted and ignored.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let only: Option<Vec<usize>> = std::env::var("SNIPE_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let strict = std::env::var("SNIPE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [(usize, &str, fn() -> Check); 8] = [
        (1, "oracle identities", criterion_1),
        (2, "constant-outcome variance", criterion_2),
        (3, "variance scaling", criterion_3),
        (4, "normality", criterion_4),
        (5, "variance estimator quality", criterion_5),
        (6, "estimator comparison", criterion_6),
        (7, "SUTVA test size and power", criterion_7),
        (8, "scale smoke test", criterion_8),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id} ({name}): {} [{:.1} s] {detail}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {failed} criterion(s) failed");
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
