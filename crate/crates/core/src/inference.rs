//! Variance estimation, confidence intervals and tests.
//!
//! The pseudo-inverse variance estimator is
//! σ̂² = (1/n²) Σ_{i,j} (T_i − τ̂)(T_j − τ̂) 1{M_i ∩ M_j ≠ ∅},
//! evaluated over closed two-hop balls. It is not a sum of squares and can
//! be negative; such values are clipped to zero and flagged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{unit_statistics, EstimatorKind, UnitStatistics};
use crate::graph::{Graph, TwoHopScratch, DEFAULT_TWO_HOP_CAP};
use crate::outcomes::check_finite;
use crate::randomization::Assignment;
use crate::stats;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    /// Uses T_i; pairs with the pseudo-inverse estimate.
    Full,
    /// Uses T'_i; pairs with the interference contrast.
    NoSelf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    /// max(raw, 0)
    pub value: f64,
    pub raw: f64,
    pub clipped: bool,
}

impl VarianceEstimate {
    fn from_raw(raw: f64) -> Self {
        let clipped = raw < 0.0;
        if clipped {
            log::warn!("variance estimate {raw:e} is negative; clipped to 0");
        }
        VarianceEstimate {
            value: raw.max(0.0),
            raw,
            clipped,
        }
    }
}

pub fn variance_estimate(g: &Graph, s: &UnitStatistics, point: f64, mode: VarianceMode) -> Result<VarianceEstimate> {
    variance_estimate_with_cap(g, s, point, mode, DEFAULT_TWO_HOP_CAP)
}

/// As [`variance_estimate`], refusing graphs whose Σ_k |M_k|² exceeds `cap`.
pub fn variance_estimate_with_cap(
    g: &Graph,
    s: &UnitStatistics,
    point: f64,
    mode: VarianceMode,
    cap: f64,
) -> Result<VarianceEstimate> {
    let n = g.n();
    if s.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.len() });
    }
    if !point.is_finite() {
        return Err(Error::NonFinite { index: 0, value: point });
    }
    g.check_two_hop_cost(cap)?;
    let t = match mode {
        VarianceMode::Full => &s.t,
        VarianceMode::NoSelf => &s.t_prime,
    };
    let c: Vec<f64> = t.iter().map(|&v| v - point).collect();
    let total = stats::sum_by_index_with(
        n,
        || TwoHopScratch::new(n),
        |scratch, i| {
            let ball = g.two_hop_neighbors(i, scratch);
            let mut inner = 0.0;
            for &j in ball {
                inner += c[j as usize];
            }
            c[i] * inner
        },
    );
    let nf = n as f64;
    Ok(VarianceEstimate::from_raw(total / (nf * nf)))
}

/// s₁²/n₁ + s₀²/n₀ with sample variances.
pub fn neyman_variance(y: &[f64], z: &Assignment) -> Result<f64> {
    if y.len() != z.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), found: y.len() });
    }
    check_finite(y)?;
    let (mut treated, mut control) = (Vec::new(), Vec::new());
    for (&v, &b) in y.iter().zip(z.z()) {
        if b {
            treated.push(v);
        } else {
            control.push(v);
        }
    }
    if treated.len() < 2 {
        return Err(Error::GroupTooSmall { group: "treated", size: treated.len() });
    }
    if control.len() < 2 {
        return Err(Error::GroupTooSmall { group: "control", size: control.len() });
    }
    Ok(stats::sample_variance(&treated) / treated.len() as f64
        + stats::sample_variance(&control) / control.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalTest {
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_var(var_hat: f64) -> Result<()> {
    if var_hat >= 0.0 && var_hat.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("variance must be finite and nonnegative, got {var_hat}")))
    }
}

/// Two-sided normal interval and p-value.
pub fn normal_test(point: f64, var_hat: f64, alpha: f64) -> Result<NormalTest> {
    check_alpha(alpha)?;
    check_var(var_hat)?;
    let sd = var_hat.sqrt();
    let half = stats::normal_quantile(1.0 - alpha / 2.0) * sd;
    let p_value = if sd == 0.0 {
        if point == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (2.0 * stats::normal_sf(point.abs() / sd)).min(1.0)
    };
    Ok(NormalTest {
        ci_low: point - half,
        ci_high: point + half,
        p_value,
    })
}

/// Reject when |point| > √(var_hat / α).
pub fn chebyshev_test(point: f64, var_hat: f64, alpha: f64) -> Result<bool> {
    check_alpha(alpha)?;
    check_var(var_hat)?;
    Ok(point.abs() > (var_hat / alpha).sqrt())
}

/// Smallest α at which the Chebyshev test rejects: min(1, var/point²).
pub fn chebyshev_p_value(point: f64, var_hat: f64) -> f64 {
    if point == 0.0 {
        return 1.0;
    }
    (var_hat / (point * point)).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: EstimatorKind,
    pub point: f64,
    pub var_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_normal: f64,
    pub p_chebyshev: f64,
    pub n: usize,
    /// Largest closed neighborhood the estimator sums over.
    pub d_max: usize,
    /// Set when the raw variance estimate was negative.
    pub clipped: bool,
}

impl EstimateReport {
    fn build(estimator: EstimatorKind, point: f64, var: VarianceEstimate, n: usize, d_max: usize, alpha: f64) -> Result<Self> {
        let t = normal_test(point, var.value, alpha)?;
        Ok(EstimateReport {
            estimator,
            point,
            var_hat: var.value,
            ci_low: t.ci_low,
            ci_high: t.ci_high,
            p_normal: t.p_value,
            p_chebyshev: chebyshev_p_value(point, var.value),
            n,
            d_max,
            clipped: var.clipped,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Pseudo-inverse estimate with the two-hop variance estimator.
pub fn pi_report(g: &Graph, y: &[f64], z: &Assignment, alpha: f64) -> Result<EstimateReport> {
    let s = unit_statistics(g, y, z)?;
    pi_report_from(g, &s, alpha)
}

fn pi_report_from(g: &Graph, s: &UnitStatistics, alpha: f64) -> Result<EstimateReport> {
    let point = s.mean_t();
    let var = variance_estimate(g, s, point, VarianceMode::Full)?;
    EstimateReport::build(EstimatorKind::PseudoInverse, point, var, g.n(), g.degree_stats().max_closed_degree, alpha)
}

/// Difference in means with the Neyman variance.
pub fn dim_report(y: &[f64], z: &Assignment, alpha: f64) -> Result<EstimateReport> {
    let point = crate::estimators::difference_in_means(y, z)?;
    let var = VarianceEstimate::from_raw(neyman_variance(y, z)?);
    EstimateReport::build(EstimatorKind::Dim, point, var, y.len(), 1, alpha)
}

/// Test of no interference: the contrast τ̂(G) − τ̂_DIM with the
/// self-excluded variance estimator.
pub fn sutva_test(g: &Graph, y: &[f64], z: &Assignment, alpha: f64) -> Result<EstimateReport> {
    let s = unit_statistics(g, y, z)?;
    sutva_report_from(g, &s, alpha)
}

fn sutva_report_from(g: &Graph, s: &UnitStatistics, alpha: f64) -> Result<EstimateReport> {
    let point = s.mean_t_prime();
    let var = variance_estimate(g, s, point, VarianceMode::NoSelf)?;
    EstimateReport::build(EstimatorKind::Contrast, point, var, g.n(), g.degree_stats().max_closed_degree, alpha)
}

/// One analyzed metric: DIM, pseudo-inverse and contrast reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    pub dim: EstimateReport,
    pub pi: EstimateReport,
    pub contrast: EstimateReport,
}

impl MetricReport {
    pub fn compute(metric: impl Into<String>, g: &Graph, y: &[f64], z: &Assignment, alpha: f64) -> Result<Self> {
        let s = unit_statistics(g, y, z)?;
        Ok(MetricReport {
            metric: metric.into(),
            dim: dim_report(y, z, alpha)?,
            pi: pi_report_from(g, &s, alpha)?,
            contrast: sutva_report_from(g, &s, alpha)?,
        })
    }

    pub const CSV_HEADER: [&'static str; 10] = [
        "metric",
        "dim_value",
        "dim_est_var",
        "dim_p_value",
        "pi_value",
        "pi_est_var",
        "pi_p_value",
        "contrast_value",
        "contrast_est_var",
        "contrast_p_value",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        let mut row = vec![self.metric.clone()];
        for r in [&self.dim, &self.pi, &self.contrast] {
            row.push(format!("{:e}", r.point));
            row.push(format!("{:e}", r.var_hat));
            row.push(format!("{:e}", r.p_normal));
        }
        row
    }
}
