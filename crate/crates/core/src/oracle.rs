//! Exact ground truth for small instances by exhaustive enumeration.
//!
//! Everything here is exponential in n (or in neighborhood size) and
//! refuses inputs above hard caps instead of truncating.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::graph::Graph;
use crate::outcomes::{check_finite, ground_truth_tte, LinearModel, PotentialOutcomes, SparseMatrix, WEIGHT_DROP_TOL};
use crate::randomization::{check_probability, signed_weight};
use crate::stats::NeumaierSum;

/// Largest n accepted by full enumeration.
pub const MAX_ENUMERATION_N: usize = 20;
/// Largest |N_i| accepted by the joint-effects decomposition.
pub const MAX_NEIGHBORHOOD: usize = 20;

const GRAY_BITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    pub mean: f64,
    pub variance: f64,
    /// E(T_i) for the estimator's per-unit terms.
    pub per_unit_means: Vec<f64>,
}

fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::OracleCap {
            what: "enumeration over units",
            size: n,
            cap: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

/// p^k (1−p)^{n−k} for k = 0..=n.
fn bernoulli_weights(n: usize, p: f64) -> Vec<f64> {
    (0..=n).map(|k| p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)).collect()
}

fn bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (mask >> i) & 1 == 1).collect()
}

/// Outcome source for a Gray-code walk: linear models are updated one
/// column at a time, anything else is re-evaluated.
enum Walker<'m, M: ?Sized> {
    Linear { lin: &'m LinearModel, cols: SparseMatrix, y: Vec<f64> },
    General(&'m M),
}

impl<'m, M: PotentialOutcomes + ?Sized> Walker<'m, M> {
    fn new(model: &'m M) -> Self {
        match model.as_linear() {
            Some(lin) => Walker::Linear {
                lin,
                cols: lin.weights().matrix().transpose(),
                y: Vec::new(),
            },
            None => Walker::General(model),
        }
    }

    /// Outcomes at `z`, which differs from the previous call's assignment
    /// in bit `flipped` (None: recompute from scratch).
    fn outcomes(&mut self, z: &[bool], flipped: Option<usize>) -> Result<Vec<f64>> {
        match self {
            Walker::General(m) => {
                let y = m.outcomes(z)?;
                check_finite(&y)?;
                Ok(y)
            }
            Walker::Linear { lin, cols, y } => {
                match flipped {
                    None => *y = lin.outcomes(z)?,
                    Some(k) => {
                        let sign = if z[k] { 1.0 } else { -1.0 };
                        let (rows, vals) = cols.row(k);
                        for (&i, &w) in rows.iter().zip(vals) {
                            y[i as usize] += sign * w;
                        }
                    }
                }
                Ok(y.clone())
            }
        }
    }
}

fn unit_terms(kind: EstimatorKind, g: &Graph, y: &[f64], d: &[f64], out: &mut [f64]) {
    for i in 0..y.len() {
        let open: f64 = g.neighbors(i).iter().map(|&j| d[j as usize]).sum();
        out[i] = y[i]
            * match kind {
                EstimatorKind::PseudoInverse => d[i] + open,
                EstimatorKind::Dim => d[i],
                EstimatorKind::Contrast => open,
            };
    }
}

struct BlockResult {
    estimates: Vec<f64>,
    weights: Vec<f64>,
    unit_sums: Vec<NeumaierSum>,
}

/// Exact mean and variance of an estimator over all 2ⁿ Bernoulli(p)
/// assignments.
pub fn enumerate_estimator<M: PotentialOutcomes + ?Sized>(
    model: &M,
    g: &Graph,
    p: f64,
    kind: EstimatorKind,
) -> Result<EnumerationResult> {
    let n = model.n();
    check_enumerable(n)?;
    check_probability(p)?;
    if g.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.n() });
    }
    let pw = bernoulli_weights(n, p);
    let low = n.min(GRAY_BITS);
    let blocks = 1u64 << (n - low);
    let results: Vec<BlockResult> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut walker = Walker::new(model);
            let mut z = bits(b << low, n);
            let mut d: Vec<f64> = z.iter().map(|&t| signed_weight(t, p)).collect();
            let mut terms = vec![0.0; n];
            let size = 1usize << low;
            let mut out = BlockResult {
                estimates: Vec::with_capacity(size),
                weights: Vec::with_capacity(size),
                unit_sums: vec![NeumaierSum::new(); n],
            };
            let mut treated = z.iter().filter(|&&t| t).count();
            for step in 0..size {
                let flipped = if step == 0 {
                    None
                } else {
                    let k = step.trailing_zeros() as usize;
                    z[k] = !z[k];
                    d[k] = signed_weight(z[k], p);
                    if z[k] {
                        treated += 1;
                    } else {
                        treated -= 1;
                    }
                    Some(k)
                };
                let y = walker.outcomes(&z, flipped)?;
                unit_terms(kind, g, &y, &d, &mut terms);
                let w = pw[treated];
                let est: NeumaierSum = terms.iter().copied().collect();
                out.estimates.push(est.total() / n as f64);
                out.weights.push(w);
                for (acc, &t) in out.unit_sums.iter_mut().zip(&terms) {
                    acc.add(w * t);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut mean = NeumaierSum::new();
    let mut unit = vec![NeumaierSum::new(); n];
    for r in &results {
        for (e, w) in r.estimates.iter().zip(&r.weights) {
            mean.add(w * e);
        }
        for (acc, s) in unit.iter_mut().zip(&r.unit_sums) {
            acc.add(s.total());
        }
    }
    let mean = mean.total();
    let mut var = NeumaierSum::new();
    for r in &results {
        for (e, w) in r.estimates.iter().zip(&r.weights) {
            var.add(w * (e - mean) * (e - mean));
        }
    }
    Ok(EnumerationResult {
        mean,
        variance: var.total(),
        per_unit_means: unit.into_iter().map(|s| s.total()).collect(),
    })
}

fn with_bit(z: &[bool], k: usize, v: bool) -> Vec<bool> {
    let mut z = z.to_vec();
    z[k] = v;
    z
}

fn check_unit<M: PotentialOutcomes + ?Sized>(model: &M, z: &[bool], idx: &[usize]) -> Result<()> {
    let n = model.n();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.len() });
    }
    match idx.iter().find(|&&i| i >= n) {
        Some(&i) => Err(Error::NodeOutOfRange { node: i, n }),
        None => Ok(()),
    }
}

/// ψ_i^k(z_{−k}) = f_i(z, z_k = 1) − f_i(z, z_k = 0). Entry k of `z` is ignored.
pub fn psi<M: PotentialOutcomes + ?Sized>(model: &M, i: usize, k: usize, z: &[bool]) -> Result<f64> {
    check_unit(model, z, &[i, k])?;
    let hi = model.outcomes(&with_bit(z, k, true))?;
    let lo = model.outcomes(&with_bit(z, k, false))?;
    Ok(hi[i] - lo[i])
}

/// φ_i^{kl}(z_{−{k,l}}) = ψ_i^k(z_l = 0) − ψ_i^k(z_l = 1).
pub fn phi<M: PotentialOutcomes + ?Sized>(model: &M, i: usize, k: usize, l: usize, z: &[bool]) -> Result<f64> {
    check_unit(model, z, &[i, k, l])?;
    if k == l {
        return Err(Error::Precondition(format!("phi needs distinct k and l, got {k} twice")));
    }
    Ok(psi(model, i, k, &with_bit(z, l, false))? - psi(model, i, k, &with_bit(z, l, true))?)
}

/// Matrix of E(ψ_i^k) under Bernoulli(p), indexed [i][k].
pub fn expected_psi<M: PotentialOutcomes + ?Sized>(model: &M, p: f64) -> Result<Vec<Vec<f64>>> {
    let n = model.n();
    check_enumerable(n)?;
    check_probability(p)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let pw = bernoulli_weights(n - 1, p);
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = vec![NeumaierSum::new(); n];
            for rest in 0..1u64 << (n - 1) {
                // spread the n−1 free bits around position k
                let low = rest & ((1 << k) - 1);
                let mask = low | ((rest >> k) << (k + 1));
                let z = bits(mask, n);
                let w = pw[rest.count_ones() as usize];
                let hi = model.outcomes(&with_bit(&z, k, true))?;
                let lo = model.outcomes(&z)?;
                for i in 0..n {
                    acc[i].add(w * (hi[i] - lo[i]));
                }
            }
            Ok(acc.into_iter().map(|s| s.total()).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..n).map(|i| (0..n).map(|k| columns[k][i]).collect()).collect())
}

/// (1/n) Σ_i Σ_{k∈M_i} E(ψ_i^k): the exact expectation of the pseudo-inverse
/// estimate.
pub fn expected_pi_from_psi(psi_means: &[Vec<f64>], g: &Graph) -> f64 {
    let n = g.n();
    let s: NeumaierSum = (0..n).flat_map(|i| g.closed(i).map(move |k| psi_means[i][k as usize])).collect();
    s.total() / n as f64
}

/// (1/n) Σ_{i,k} w_ik A_ik (1 − G_ik): the part of the TTE a linear model
/// loses to edges missing from the surrogate graph.
pub fn exogenous_bias(lin: &LinearModel, g: &Graph) -> Result<f64> {
    let n = lin.weights().n();
    if g.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.n() });
    }
    let mut s = NeumaierSum::new();
    for i in 0..n {
        let (c, v) = lin.weights().row(i);
        for (&k, &w) in c.iter().zip(v) {
            let k = k as usize;
            if k != i && w > WEIGHT_DROP_TOL && !g.contains_edge(i, k) {
                s.add(w);
            }
        }
    }
    Ok(s.total() / n as f64)
}

/// Var(τ̂) when every Y_i = c_i does not depend on z:
/// (1/(n² p(1−p))) Σ_k (Σ_{i∈M_k} c_i)².
pub fn constant_outcome_variance(g: &Graph, c: &[f64], p: f64) -> Result<f64> {
    check_probability(p)?;
    let n = g.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.len() });
    }
    let s: NeumaierSum = (0..n)
        .map(|k| {
            let inner: f64 = g.closed(k).map(|i| c[i as usize]).sum();
            inner * inner
        })
        .collect();
    let nf = n as f64;
    Ok(s.total() / (nf * nf * p * (1.0 - p)))
}

/// Möbius coefficients a_{i,S} of every unit over its neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEffects {
    neighborhoods: Vec<Vec<usize>>,
    /// coefficients[i][mask]: bit b of mask selects neighborhoods[i][b].
    coefficients: Vec<Vec<f64>>,
    /// ā_β for β = 0..=max |N_i|.
    pub beta_sums: Vec<f64>,
}

impl JointEffects {
    pub fn neighborhood(&self, i: usize) -> &[usize] {
        &self.neighborhoods[i]
    }

    /// a_{i,S} for S given as unit ids; zero when S ⊄ N_i.
    pub fn coefficient(&self, i: usize, s: &[usize]) -> f64 {
        let nb = &self.neighborhoods[i];
        let mut mask = 0usize;
        for k in s {
            match nb.binary_search(k) {
                Ok(b) => mask |= 1 << b,
                Err(_) => return 0.0,
            }
        }
        self.coefficients[i][mask]
    }

    /// Σ_S a_{i,S} Π_{k∈S} z_k.
    pub fn evaluate(&self, i: usize, z: &[bool]) -> f64 {
        let nb = &self.neighborhoods[i];
        let mut mask = 0usize;
        for (b, &k) in nb.iter().enumerate() {
            if z[k] {
                mask |= 1 << b;
            }
        }
        // sum over all submasks of mask
        let a = &self.coefficients[i];
        let mut s = NeumaierSum::new();
        let mut sub = mask;
        loop {
            s.add(a[sub]);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        s.total()
    }

    /// Σ_{β≥1} ā_β, which equals the TTE.
    pub fn tte(&self) -> f64 {
        self.beta_sums.iter().skip(1).copied().collect::<NeumaierSum>().total()
    }

    /// Σ_β β p^{β−1} ā_β, the expected pseudo-inverse estimate when the
    /// surrogate graph is the true network.
    pub fn expected_estimate(&self, p: f64) -> f64 {
        self.beta_sums
            .iter()
            .enumerate()
            .skip(1)
            .map(|(b, a)| b as f64 * p.powi(b as i32 - 1) * a)
            .collect::<NeumaierSum>()
            .total()
    }
}

/// Joint effects of each unit over the given neighborhoods (each sorted,
/// containing the unit). f_i(S) is read off the outcome at z = 1_S.
pub fn joint_effects<M: PotentialOutcomes + ?Sized>(model: &M, neighborhoods: &[Vec<usize>]) -> Result<JointEffects> {
    let n = model.n();
    if neighborhoods.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: neighborhoods.len() });
    }
    if let Some(big) = neighborhoods.iter().map(|nb| nb.len()).max().filter(|&m| m > MAX_NEIGHBORHOOD) {
        return Err(Error::OracleCap {
            what: "neighborhood",
            size: big,
            cap: MAX_NEIGHBORHOOD,
        });
    }
    for nb in neighborhoods {
        if let Some(&k) = nb.iter().find(|&&k| k >= n) {
            return Err(Error::NodeOutOfRange { node: k, n });
        }
        if nb.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("neighborhoods must be sorted without duplicates".into()));
        }
    }
    let coefficients: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let nb = &neighborhoods[i];
            let m = nb.len();
            let mut a = Vec::with_capacity(1 << m);
            let mut z = vec![false; n];
            for mask in 0..1usize << m {
                for (b, &k) in nb.iter().enumerate() {
                    z[k] = (mask >> b) & 1 == 1;
                }
                let y = model.outcomes(&z)?;
                check_finite(&y)?;
                a.push(y[i]);
            }
            // subset Möbius transform
            for b in 0..m {
                for mask in 0..1usize << m {
                    if mask & (1 << b) != 0 {
                        a[mask] -= a[mask ^ (1 << b)];
                    }
                }
            }
            Ok(a)
        })
        .collect::<Result<_>>()?;
    let max_order = neighborhoods.iter().map(|nb| nb.len()).max().unwrap_or(0);
    let mut sums = vec![NeumaierSum::new(); max_order + 1];
    for a in &coefficients {
        for (mask, &v) in a.iter().enumerate() {
            sums[mask.count_ones() as usize].add(v);
        }
    }
    Ok(JointEffects {
        neighborhoods: neighborhoods.to_vec(),
        coefficients,
        beta_sums: sums.into_iter().map(|s| s.total() / n as f64).collect(),
    })
}

/// Compare the enumerated mean of the pseudo-inverse estimate (lhs) with
/// Σ_β β p^{β−1} ā_β (rhs). Requires the surrogate graph to be the true
/// network.
pub fn endogenous_bias_check<M: PotentialOutcomes + ?Sized>(model: &M, g: &Graph, p: f64) -> Result<(f64, f64)> {
    check_enumerable(model.n())?;
    let truth = model.true_neighborhoods()?;
    if truth.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: truth.len() });
    }
    for (i, nb) in truth.iter().enumerate() {
        if *nb != g.closed_neighborhood(i)? {
            return Err(Error::Precondition(format!(
                "surrogate graph differs from the true network at unit {i}"
            )));
        }
    }
    let lhs = enumerate_estimator(model, g, p, EstimatorKind::PseudoInverse)?.mean;
    let rhs = joint_effects(model, &truth)?.expected_estimate(p);
    Ok((lhs, rhs))
}

/// Exact bias E(τ̂) − TTE of an estimator by enumeration.
pub fn exact_bias<M: PotentialOutcomes + ?Sized>(model: &M, g: &Graph, p: f64, kind: EstimatorKind) -> Result<f64> {
    Ok(enumerate_estimator(model, g, p, kind)?.mean - ground_truth_tte(model)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcomes::{generate_instance, CustomModel, Link, WeightMatrix};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn missing_edges_bias_example() {
        let w = WeightMatrix::from_dense(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let lin = LinearModel::new(vec![0.0; 2], w).unwrap();
        let g = Graph::empty(2);
        let r = enumerate_estimator(&lin, &g, 0.5, EstimatorKind::PseudoInverse).unwrap();
        assert!(close(r.mean, 0.5, 1e-15));
        assert_eq!(ground_truth_tte(&lin).unwrap(), 1.0);
        assert!(close(exact_bias(&lin, &g, 0.5, EstimatorKind::PseudoInverse).unwrap(), -0.5, 1e-15));
        assert_eq!(exogenous_bias(&lin, &g).unwrap(), 0.5);
    }

    #[test]
    fn constant_outcomes_match_closed_form() {
        let g = Graph::ring(9, 2).unwrap();
        let c = vec![1.5; 9];
        let model = CustomModel::new(9, vec![Vec::new(); 9], |_, _| 1.5).unwrap();
        for p in [0.3, 0.5] {
            let r = enumerate_estimator(&model, &g, p, EstimatorKind::PseudoInverse).unwrap();
            assert!(close(r.mean, 0.0, 1e-12));
            let exact = constant_outcome_variance(&g, &c, p).unwrap();
            let closed = 1.5 * 1.5 * g.closed_degree_square_sum() / (81.0 * p * (1.0 - p));
            assert!(close(exact, closed, 1e-12));
            assert!(close(r.variance, exact, 1e-10), "{} vs {exact}", r.variance);
        }
    }

    #[test]
    fn psi_and_phi_on_linear_model() {
        let w = WeightMatrix::from_dense(&[vec![1.0, 0.5, 0.0], vec![0.25, 2.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let lin = LinearModel::new(vec![1.0, 2.0, 3.0], w).unwrap();
        for mask in 0..8u64 {
            let z = bits(mask, 3);
            assert_eq!(psi(&lin, 0, 1, &z).unwrap(), 0.5);
            assert_eq!(psi(&lin, 1, 0, &z).unwrap(), 0.25);
            assert_eq!(phi(&lin, 0, 1, 2, &z).unwrap(), 0.0);
        }
        assert!(phi(&lin, 0, 1, 1, &[false; 3]).is_err());
        assert!(psi(&lin, 0, 3, &[false; 3]).is_err());
    }

    #[test]
    fn pure_interaction_coefficients() {
        let model = CustomModel::new(3, vec![vec![1, 2], vec![], vec![]], |i, z| {
            if i == 0 && z[1] && z[2] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let je = joint_effects(&model, &model.true_neighborhoods().unwrap()).unwrap();
        assert_eq!(je.coefficient(0, &[1, 2]), 1.0);
        assert_eq!(je.coefficient(0, &[1]), 0.0);
        assert_eq!(je.coefficient(0, &[2]), 0.0);
        assert_eq!(je.coefficient(0, &[]), 0.0);
        assert!(close(je.beta_sums[2], 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn linear_model_joint_effects_are_weights() {
        let w = WeightMatrix::from_dense(&[vec![1.0, 0.5], vec![0.25, 2.0]]).unwrap();
        let lin = LinearModel::new(vec![1.0, -1.0], w).unwrap();
        let je = joint_effects(&lin, &lin.true_neighborhoods().unwrap()).unwrap();
        assert_eq!(je.coefficient(0, &[1]), 0.5);
        assert_eq!(je.coefficient(1, &[0]), 0.25);
        assert_eq!(je.coefficient(0, &[0, 1]), 0.0);
        assert_eq!(je.beta_sums[0], 0.0);
        assert!(close(je.tte(), ground_truth_tte(&lin).unwrap(), 1e-15));
    }

    #[test]
    fn third_order_effect_is_underestimated_by_a_quarter() {
        let (g, _) = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let model = CustomModel::new(3, vec![vec![0, 1, 2]; 3], |_, z| if z.iter().all(|&b| b) { 1.0 } else { 0.0 }).unwrap();
        let (lhs, rhs) = endogenous_bias_check(&model, &g, 0.5).unwrap();
        assert!(close(lhs, rhs, 1e-12));
        let tte = ground_truth_tte(&model).unwrap();
        assert!(close(rhs, 0.75 * tte, 1e-12));

        let pair = CustomModel::new(3, vec![vec![0, 1, 2]; 3], |i, z| {
            let a = (i + 1) % 3;
            if z[i] && z[a] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let (lhs, rhs) = endogenous_bias_check(&pair, &g, 0.5).unwrap();
        assert!(close(lhs, rhs, 1e-12) && close(rhs, ground_truth_tte(&pair).unwrap(), 1e-12));
    }

    #[test]
    fn endogenous_check_requires_matching_graph() {
        let w = WeightMatrix::from_dense(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let lin = LinearModel::new(vec![0.0; 2], w).unwrap();
        assert!(matches!(endogenous_bias_check(&lin, &Graph::empty(2), 0.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn reconstruction_on_threshold_instance() {
        let g = crate::graph::erdos_renyi(8, 2.5, 11).unwrap();
        let model = generate_instance(&g, 1.0, 0.5, Link::Threshold(1.0), 12).unwrap();
        let nbs = model.true_neighborhoods().unwrap();
        let je = joint_effects(&model, &nbs).unwrap();
        for mask in 0..1u64 << 8 {
            let z = bits(mask, 8);
            let y = model.outcomes(&z).unwrap();
            for i in 0..8 {
                assert!(close(je.evaluate(i, &z), y[i], 1e-10));
            }
        }
        assert!(close(je.tte(), ground_truth_tte(&model).unwrap(), 1e-10));
    }

    #[test]
    fn caps_are_enforced() {
        let model = CustomModel::new(21, vec![Vec::new(); 21], |_, _| 0.0).unwrap();
        let g = Graph::empty(21);
        assert!(matches!(
            enumerate_estimator(&model, &g, 0.5, EstimatorKind::Dim),
            Err(Error::OracleCap { size: 21, .. })
        ));
        let all: Vec<usize> = (0..21).collect();
        assert!(matches!(joint_effects(&model, &vec![all; 21]), Err(Error::OracleCap { .. })));
    }

    #[test]
    fn gray_walk_matches_direct_evaluation_for_linear_models() {
        // n > 12 exercises more than one block
        let n = 14;
        let g = Graph::ring(n, 2).unwrap();
        let entries = (0..n).flat_map(|i| g.closed(i).map(move |j| (i, j as usize, 0.1 + ((i * 7 + j as usize) % 5) as f64 * 0.2))).collect();
        let w = WeightMatrix::new(SparseMatrix::from_triplets(n, n, entries).unwrap()).unwrap();
        let lin = LinearModel::new((0..n).map(|i| i as f64 * 0.3).collect(), w).unwrap();
        let wrapped = CustomModel::new(n, lin.true_neighborhoods().unwrap(), {
            let lin = lin.clone();
            move |i, z| lin.outcomes(z).unwrap()[i]
        })
        .unwrap();
        let a = enumerate_estimator(&lin, &g, 0.4, EstimatorKind::PseudoInverse).unwrap();
        let b = enumerate_estimator(&wrapped, &g, 0.4, EstimatorKind::PseudoInverse).unwrap();
        assert!(close(a.mean, b.mean, 1e-12) && close(a.variance, b.variance, 1e-12));
        assert!(close(a.mean, ground_truth_tte(&lin).unwrap(), 1e-10));
    }
}
