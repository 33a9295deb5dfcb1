//! Point estimators of the total treatment effect.
//!
//! All three share the per-unit signed weights D_j = z_j/p − (1−z_j)/(1−p):
//!
//! * pseudo-inverse: (1/n) Σ_i Y_i Σ_{j∈M_i} D_j over closed neighborhoods M_i,
//! * difference in means (inverse-propensity form): (1/n) Σ_i Y_i D_i,
//! * interference contrast: (1/n) Σ_i Y_i Σ_{j∈M_i\{i}} D_j.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::outcomes::check_finite;
use crate::randomization::Assignment;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    PseudoInverse,
    Dim,
    Contrast,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::PseudoInverse, EstimatorKind::Dim, EstimatorKind::Contrast];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::PseudoInverse => "pseudo_inverse",
            EstimatorKind::Dim => "dim",
            EstimatorKind::Contrast => "contrast",
        }
    }

    /// Evaluate this estimator. `g` is ignored for `Dim`.
    pub fn estimate(self, g: &Graph, y: &[f64], z: &Assignment) -> Result<f64> {
        match self {
            EstimatorKind::PseudoInverse => pseudo_inverse(g, y, z),
            EstimatorKind::Dim => difference_in_means(y, z),
            EstimatorKind::Contrast => interference_contrast(g, y, z),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pseudo_inverse" | "pi" => Ok(EstimatorKind::PseudoInverse),
            "dim" => Ok(EstimatorKind::Dim),
            "contrast" => Ok(EstimatorKind::Contrast),
            _ => Err(Error::Config(format!(
                "unknown estimator {s:?} (expected pseudo_inverse, dim or contrast)"
            ))),
        }
    }
}

fn check_inputs(g: Option<&Graph>, y: &[f64], z: &Assignment) -> Result<()> {
    if y.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            found: y.len(),
        });
    }
    if let Some(g) = g {
        if g.n() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                found: y.len(),
            });
        }
    }
    check_finite(y)
}

/// Σ_{j∈M_i\{i}} D_j.
#[inline]
fn open_weight(g: &Graph, d: &[f64], i: usize) -> f64 {
    let mut s = 0.0;
    for &j in g.neighbors(i) {
        s += d[j as usize];
    }
    s
}

pub fn pseudo_inverse(g: &Graph, y: &[f64], z: &Assignment) -> Result<f64> {
    check_inputs(Some(g), y, z)?;
    let d = z.weights();
    let n = y.len();
    Ok(stats::sum_by_index(n, |i| y[i] * (d[i] + open_weight(g, &d, i))) / n as f64)
}

pub fn difference_in_means(y: &[f64], z: &Assignment) -> Result<f64> {
    check_inputs(None, y, z)?;
    let n = y.len();
    Ok(stats::sum_by_index(n, |i| y[i] * z.weight(i)) / n as f64)
}

pub fn interference_contrast(g: &Graph, y: &[f64], z: &Assignment) -> Result<f64> {
    check_inputs(Some(g), y, z)?;
    let d = z.weights();
    let n = y.len();
    Ok(stats::sum_by_index(n, |i| y[i] * open_weight(g, &d, i)) / n as f64)
}

/// Per-unit terms T_i, T'_i and D_i.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitStatistics {
    /// T_i = Y_i Σ_{j∈M_i} D_j
    pub t: Vec<f64>,
    /// T'_i = Y_i Σ_{j∈M_i\{i}} D_j
    pub t_prime: Vec<f64>,
    pub d: Vec<f64>,
}

impl UnitStatistics {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Mean of t, which is the pseudo-inverse estimate.
    pub fn mean_t(&self) -> f64 {
        stats::sum_by_index(self.t.len(), |i| self.t[i]) / self.t.len() as f64
    }

    /// Mean of t', which is the interference contrast.
    pub fn mean_t_prime(&self) -> f64 {
        stats::sum_by_index(self.t_prime.len(), |i| self.t_prime[i]) / self.t_prime.len() as f64
    }
}

pub fn unit_statistics(g: &Graph, y: &[f64], z: &Assignment) -> Result<UnitStatistics> {
    check_inputs(Some(g), y, z)?;
    let d = z.weights();
    let t_prime: Vec<f64> = (0..y.len()).map(|i| y[i] * open_weight(g, &d, i)).collect();
    let t = (0..y.len()).map(|i| t_prime[i] + y[i] * d[i]).collect();
    Ok(UnitStatistics { t, t_prime, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> (Graph, Vec<f64>, Assignment) {
        let (g, _) = Graph::from_edges(3, [(0, 1)]).unwrap();
        let z = Assignment::new(vec![true, false, true], 0.5).unwrap();
        (g, vec![2.0, 1.0, 3.0], z)
    }

    #[test]
    fn three_node_example() {
        let (g, y, z) = example();
        assert_eq!(z.weights(), vec![2.0, -2.0, 2.0]);
        assert_eq!(pseudo_inverse(&g, &y, &z).unwrap(), 2.0);
        assert!((interference_contrast(&g, &y, &z).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        let s = unit_statistics(&g, &y, &z).unwrap();
        assert_eq!(s.t, vec![0.0, 0.0, 6.0]);
        assert_eq!(s.t_prime, vec![-4.0, 2.0, 0.0]);
        assert_eq!(s.mean_t(), 2.0);
        for i in 0..3 {
            assert_eq!(s.t[i], s.t_prime[i] + y[i] * s.d[i]);
        }
    }

    #[test]
    fn dim_examples() {
        let z = Assignment::new(vec![true, false], 0.5).unwrap();
        assert_eq!(difference_in_means(&[1.0, 1.0], &z).unwrap(), 0.0);
        assert_eq!(difference_in_means(&[1.0, 0.0], &z).unwrap(), 1.0);
        let all = Assignment::new(vec![true; 4], 0.5).unwrap();
        assert_eq!(difference_in_means(&[1.0, 2.0, 3.0, 4.0], &all).unwrap(), 5.0);
    }

    #[test]
    fn empty_graph_reduces_to_dim() {
        let g = Graph::empty(4);
        let z = Assignment::new(vec![true, false, false, true], 0.3).unwrap();
        let y = [0.5, -1.0, 2.0, 7.0];
        assert_eq!(pseudo_inverse(&g, &y, &z).unwrap(), difference_in_means(&y, &z).unwrap());
        assert_eq!(interference_contrast(&g, &y, &z).unwrap(), 0.0);
        assert_eq!(pseudo_inverse(&g, &[0.0; 4], &z).unwrap(), 0.0);
    }

    #[test]
    fn bad_inputs_rejected() {
        let (g, _, z) = example();
        assert!(matches!(pseudo_inverse(&g, &[1.0, f64::NAN, 0.0], &z), Err(Error::NonFinite { index: 1, .. })));
        assert!(matches!(pseudo_inverse(&g, &[1.0, 0.0], &z), Err(Error::DimensionMismatch { .. })));
        assert!(difference_in_means(&[f64::INFINITY, 0.0, 0.0], &z).is_err());
    }

    #[test]
    fn kind_round_trip() {
        for k in EstimatorKind::ALL {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
    }

    fn arb_instance() -> impl Strategy<Value = (Graph, Vec<f64>, Assignment)> {
        (2usize..60, any::<u64>(), 0.05f64..0.95).prop_flat_map(|(n, seed, p)| {
            (
                proptest::collection::vec(-10.0f64..10.0, n),
                proptest::collection::vec(any::<bool>(), n),
            )
                .prop_map(move |(y, z)| {
                    let g = crate::graph::erdos_renyi(n, (n as f64 / 3.0).min(5.0), seed).unwrap();
                    (g, y, Assignment::new(z, p).unwrap())
                })
        })
    }

    proptest! {
        #[test]
        fn contrast_is_pi_minus_dim((g, y, z) in arb_instance()) {
            let pi = pseudo_inverse(&g, &y, &z).unwrap();
            let dim = difference_in_means(&y, &z).unwrap();
            let c = interference_contrast(&g, &y, &z).unwrap();
            prop_assert!((pi - dim - c).abs() <= 1e-12 * (1.0 + pi.abs()));
            let s = unit_statistics(&g, &y, &z).unwrap();
            prop_assert!((s.mean_t() - pi).abs() <= 1e-12 * (1.0 + pi.abs()));
            prop_assert!((s.mean_t_prime() - c).abs() <= 1e-12 * (1.0 + c.abs()));
        }

        #[test]
        fn scaling_equivariance((g, y, z) in arb_instance(), c in -4.0f64..4.0) {
            let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
            let a = pseudo_inverse(&g, &scaled, &z).unwrap();
            let b = c * pseudo_inverse(&g, &y, &z).unwrap();
            prop_assert!((a - b).abs() <= 1e-11 * (1.0 + b.abs()));
        }

        #[test]
        fn permutation_equivariance((g, y, z) in arb_instance(), shift in 1usize..100) {
            let n = g.n();
            let perm: Vec<usize> = (0..n).map(|i| (i * 7 + shift) % n).collect();
            // only a permutation when gcd(7, n) == 1
            prop_assume!({ let mut s = perm.clone(); s.sort_unstable(); s.dedup(); s.len() == n });
            let h = g.permuted(&perm).unwrap();
            let mut y2 = vec![0.0; n];
            let mut z2 = vec![false; n];
            for i in 0..n {
                y2[perm[i]] = y[i];
                z2[perm[i]] = z.z()[i];
            }
            let z2 = Assignment::new(z2, z.p()).unwrap();
            for k in EstimatorKind::ALL {
                let a = k.estimate(&g, &y, &z).unwrap();
                let b = k.estimate(&h, &y2, &z2).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
