//! Potential-outcome models.
//!
//! Two generators are provided: the linear model `Y_i(z) = Y_i(0) + Σ_j w_ij z_j`
//! and the exposure model, where exposures solve `e = Δz + Pe + α` and
//! outcomes are `Y_i = f(e_i)` for a link `f`. Both expose the interference
//! weights `W` whose support is the true dependency network.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::randomization::Assignment;
use crate::seed;
use crate::stats;

/// Weights with magnitude below this are outside the support of `W`.
pub const WEIGHT_DROP_TOL: f64 = 1e-12;
/// Sup-norm residual accepted by the exposure fixed-point solve.
pub const SOLVE_TOL: f64 = 1e-10;
pub const SOLVE_MAX_ITER: usize = 1000;
/// Required bound on ‖P‖₁ and ‖P‖_∞.
pub const SHARING_NORM_BOUND: f64 = 0.9;

/// Row-major compressed sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Duplicate (row, col) entries are summed; explicit zeros dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(r, c, v) in &entries {
            if r >= n_rows {
                return Err(Error::NodeOutOfRange { node: r, n: n_rows });
            }
            if c >= n_cols {
                return Err(Error::NodeOutOfRange { node: c, n: n_cols });
            }
            if !v.is_finite() {
                return Err(Error::InvalidModel(format!("entry ({r}, {c}) is {v}")));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut offsets = vec![0usize; n_rows + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            offsets[r + 1] += 1;
            cols.push(c as u32);
            vals.push(v);
        }
        for i in 0..n_rows {
            offsets[i + 1] += offsets[i];
        }
        let mut m = SparseMatrix {
            n_rows,
            n_cols,
            offsets,
            cols,
            vals,
        };
        m.retain(|_, _, v| v != 0.0);
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().enumerate().filter(|(_, &v)| v != 0.0).map(|(j, &v)| (i, j, v)));
        }
        SparseMatrix::from_triplets(rows.len(), n_cols, entries)
    }

    fn retain<F: Fn(usize, usize, f64) -> bool>(&mut self, keep: F) {
        let mut offsets = vec![0usize; self.n_rows + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for i in 0..self.n_rows {
            for k in self.offsets[i]..self.offsets[i + 1] {
                let (c, v) = (self.cols[k] as usize, self.vals[k]);
                if keep(i, c, v) {
                    cols.push(c as u32);
                    vals.push(v);
                }
            }
            offsets[i + 1] = cols.len();
        }
        self.offsets = offsets;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        c.binary_search(&(j as u32)).map_or(0.0, |k| v[k])
    }

    pub fn transpose(&self) -> SparseMatrix {
        let entries = (0..self.n_rows)
            .flat_map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(move |(&j, &w)| (j as usize, i, w))
            })
            .collect();
        SparseMatrix::from_triplets(self.n_cols, self.n_rows, entries).expect("transpose of a valid matrix")
    }

    /// Max absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut col = vec![0.0; self.n_cols];
        for (&c, &v) in self.cols.iter().zip(&self.vals) {
            col[c as usize] += v.abs();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// out = b + self · x
    fn affine_into(&self, b: &[f64], x: &[f64], out: &mut [f64]) {
        let kernel = |(i, o): (usize, &mut f64)| {
            let (c, v) = self.row(i);
            let mut acc = b[i];
            for (&j, &w) in c.iter().zip(v) {
                acc += w * x[j as usize];
            }
            *o = acc;
        };
        if out.len() >= 16_384 {
            out.par_iter_mut().enumerate().for_each(kernel);
        } else {
            out.iter_mut().enumerate().for_each(kernel);
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows)
            .map(|i| (0..self.n_cols).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Solve x = b + M x by fixed-point (Neumann) iteration. Returns the first
/// iterate whose residual ‖b + Mx − x‖_∞ is at most `tol`.
pub fn solve_fixed_point(m: &SparseMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let mut x = b.to_vec();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..=max_iter {
        m.affine_into(b, &x, &mut next);
        residual = x.iter().zip(&next).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        if residual <= tol {
            return Ok(x);
        }
        std::mem::swap(&mut x, &mut next);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Nonnegative interference weights `w_ij`; the support (plus the diagonal)
/// is the true dependency network.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(SparseMatrix);

impl WeightMatrix {
    pub fn new(m: SparseMatrix) -> Result<Self> {
        if m.n_rows != m.n_cols {
            return Err(Error::DimensionMismatch {
                expected: m.n_rows,
                found: m.n_cols,
            });
        }
        if let Some(v) = m.vals.iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidModel(format!("negative weight {v}")));
        }
        Ok(WeightMatrix(m))
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        WeightMatrix::new(SparseMatrix::from_dense(rows)?)
    }

    pub fn n(&self) -> usize {
        self.0.n_rows
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        self.0.row(i)
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        stats::sum(self.0.row(i).1)
    }

    /// (1/n) Σ_i Σ_j w_ij.
    pub fn mean_row_sum(&self) -> f64 {
        stats::sum_by_index(self.n(), |i| self.row_sum(i)) / self.n() as f64
    }

    /// N_i = {i} ∪ {j : w_ij > drop tolerance}, sorted.
    pub fn neighborhoods(&self) -> Vec<Vec<usize>> {
        (0..self.n())
            .map(|i| {
                let (c, v) = self.row(i);
                let mut nb: Vec<usize> = c
                    .iter()
                    .zip(v)
                    .filter(|(_, &w)| w > WEIGHT_DROP_TOL)
                    .map(|(&j, _)| j as usize)
                    .collect();
                if let Err(pos) = nb.binary_search(&i) {
                    nb.insert(pos, i);
                }
                nb
            })
            .collect()
    }
}

/// Row access to a weight matrix, materialized or computed on demand.
pub trait WeightRows: Sync {
    fn n(&self) -> usize;
    fn row_entries(&self, i: usize) -> Result<Vec<(usize, f64)>>;
}

impl WeightRows for WeightMatrix {
    fn n(&self) -> usize {
        WeightMatrix::n(self)
    }

    fn row_entries(&self, i: usize) -> Result<Vec<(usize, f64)>> {
        let (c, v) = self.row(i);
        Ok(c.iter().map(|&j| j as usize).zip(v.iter().copied()).collect())
    }
}

/// Outcome link for the exposure model. Custom links must be pure
/// functions of the unit's own exposure.
#[derive(Clone)]
pub enum Link {
    Sqrt,
    /// 1{x > t}
    Threshold(f64),
    Identity,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Link {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Link::Sqrt => x.sqrt(),
            Link::Threshold(t) => {
                if x > *t {
                    1.0
                } else {
                    0.0
                }
            }
            Link::Identity => x,
            Link::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Link::Sqrt => write!(f, "sqrt"),
            Link::Threshold(t) => write!(f, "threshold:{t}"),
            Link::Identity => write!(f, "identity"),
            Link::Custom(_) => write!(f, "custom"),
        }
    }
}

impl FromStr for Link {
    type Err = Error;

    /// `sqrt`, `identity`, `threshold` (t = 1) or `threshold:<t>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sqrt" => return Ok(Link::Sqrt),
            "identity" => return Ok(Link::Identity),
            "threshold" => return Ok(Link::Threshold(1.0)),
            _ => {}
        }
        if let Some(t) = s.strip_prefix("threshold:") {
            let t: f64 = t
                .parse()
                .map_err(|_| Error::Config(format!("bad threshold in link {s:?}")))?;
            return Ok(Link::Threshold(t));
        }
        Err(Error::Config(format!(
            "unknown link {s:?} (expected sqrt, identity, threshold or threshold:<t>)"
        )))
    }
}

/// Outcome vector with every entry finite.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeVector(Vec<f64>);

impl OutcomeVector {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        check_finite(&y)?;
        Ok(OutcomeVector(y))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Observed outcome bound max_i |y_i|.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Deref for OutcomeVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_finite(y: &[f64]) -> Result<()> {
    match y.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index, value: y[index] }),
        None => Ok(()),
    }
}

/// A generator of potential outcomes Y(z) for every assignment z.
pub trait PotentialOutcomes: Send + Sync {
    fn n(&self) -> usize;

    /// Raw outcomes for a full assignment of length `n`.
    fn outcomes(&self, z: &[bool]) -> Result<Vec<f64>>;

    /// True neighborhoods N_i, each sorted and containing i.
    fn true_neighborhoods(&self) -> Result<Vec<Vec<usize>>>;

    fn as_linear(&self) -> Option<&LinearModel> {
        None
    }
}

/// Y(z) for a bit vector, checked for length and finiteness.
pub fn realize_bits<M: PotentialOutcomes + ?Sized>(model: &M, z: &[bool]) -> Result<OutcomeVector> {
    if z.len() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            found: z.len(),
        });
    }
    OutcomeVector::new(model.outcomes(z)?)
}

pub fn realize<M: PotentialOutcomes + ?Sized>(model: &M, z: &Assignment) -> Result<OutcomeVector> {
    realize_bits(model, z.z())
}

/// TTE = (1/n) Σ_i [Y_i(1) − Y_i(0)].
pub fn ground_truth_tte<M: PotentialOutcomes + ?Sized>(model: &M) -> Result<f64> {
    if let Some(lin) = model.as_linear() {
        return Ok(lin.weights.mean_row_sum());
    }
    let n = model.n();
    let y1 = realize_bits(model, &vec![true; n])?;
    let y0 = realize_bits(model, &vec![false; n])?;
    Ok(stats::sum_by_index(n, |i| y1[i] - y0[i]) / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    baseline: Vec<f64>,
    weights: WeightMatrix,
}

impl LinearModel {
    pub fn new(baseline: Vec<f64>, weights: WeightMatrix) -> Result<Self> {
        check_finite(&baseline)?;
        if baseline.len() != weights.n() {
            return Err(Error::DimensionMismatch {
                expected: weights.n(),
                found: baseline.len(),
            });
        }
        Ok(LinearModel { baseline, weights })
    }

    pub fn baseline(&self) -> &[f64] {
        &self.baseline
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }
}

impl PotentialOutcomes for LinearModel {
    fn n(&self) -> usize {
        self.baseline.len()
    }

    fn outcomes(&self, z: &[bool]) -> Result<Vec<f64>> {
        Ok((0..self.n())
            .map(|i| {
                let (c, v) = self.weights.row(i);
                let mut acc = stats::NeumaierSum::new();
                acc.add(self.baseline[i]);
                for (&j, &w) in c.iter().zip(v) {
                    if z[j as usize] {
                        acc.add(w);
                    }
                }
                acc.total()
            })
            .collect())
    }

    fn true_neighborhoods(&self) -> Result<Vec<Vec<usize>>> {
        Ok(self.weights.neighborhoods())
    }

    fn as_linear(&self) -> Option<&LinearModel> {
        Some(self)
    }
}

/// Exposure model e = Δz + Pe + α with outcomes Y_i = f(e_i).
#[derive(Debug, Clone)]
pub struct ExposureModel {
    delta: Vec<f64>,
    alpha: Vec<f64>,
    sharing: SparseMatrix,
    link: Link,
}

impl ExposureModel {
    /// Requires ‖P‖₁ < 0.9 and ‖P‖_∞ < 0.9, zero diagonal, nonnegative entries.
    pub fn new(delta: Vec<f64>, alpha: Vec<f64>, sharing: SparseMatrix, link: Link) -> Result<Self> {
        let one = sharing.one_norm();
        if one >= SHARING_NORM_BOUND {
            return Err(Error::InvalidModel(format!("‖P‖₁ = {one} is not below {SHARING_NORM_BOUND}")));
        }
        Self::new_relaxed(delta, alpha, sharing, link)
    }

    /// As [`ExposureModel::new`] but only ‖P‖_∞ < 0.9 is enforced, which is
    /// what convergence of the exposure solve needs. Row-normalized sharing
    /// on irregular graphs generally has column sums above 0.9.
    pub fn new_relaxed(delta: Vec<f64>, alpha: Vec<f64>, sharing: SparseMatrix, link: Link) -> Result<Self> {
        let n = delta.len();
        if alpha.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: alpha.len() });
        }
        if sharing.n_rows != n || sharing.n_cols != n {
            return Err(Error::DimensionMismatch { expected: n, found: sharing.n_rows });
        }
        check_finite(&delta)?;
        check_finite(&alpha)?;
        if let Some(d) = delta.iter().find(|d| **d < 0.0) {
            return Err(Error::InvalidModel(format!("negative direct effect {d}")));
        }
        for i in 0..n {
            let (c, v) = sharing.row(i);
            for (&j, &w) in c.iter().zip(v) {
                if j as usize == i {
                    return Err(Error::InvalidModel(format!("sharing matrix has diagonal entry at {i}")));
                }
                if w < 0.0 {
                    return Err(Error::InvalidModel(format!("negative sharing probability at ({i}, {j})")));
                }
            }
        }
        let inf = sharing.inf_norm();
        if inf >= SHARING_NORM_BOUND {
            return Err(Error::InvalidModel(format!("‖P‖_∞ = {inf} is not below {SHARING_NORM_BOUND}")));
        }
        Ok(ExposureModel {
            delta,
            alpha,
            sharing,
            link,
        })
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn sharing(&self) -> &SparseMatrix {
        &self.sharing
    }

    pub fn link(&self) -> &Link {
        &self.link
    }

    /// e = (I − P)⁻¹(Δz + α).
    pub fn solve_exposure(&self, z: &[bool]) -> Result<Vec<f64>> {
        if z.len() != self.delta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.delta.len(),
                found: z.len(),
            });
        }
        let b: Vec<f64> = (0..z.len())
            .map(|i| if z[i] { self.delta[i] + self.alpha[i] } else { self.alpha[i] })
            .collect();
        solve_fixed_point(&self.sharing, &b, SOLVE_TOL, SOLVE_MAX_ITER)
    }

    /// W = (I − P)⁻¹Δ, one column solve per unit, entries below the drop
    /// tolerance removed. Quadratic memory in the worst case; see
    /// [`ExposureModel::weight_rows`] for large n.
    pub fn effective_weights(&self) -> Result<WeightMatrix> {
        let n = self.delta.len();
        let columns: Vec<Vec<(usize, usize, f64)>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut b = vec![0.0; n];
                b[k] = self.delta[k];
                let w = solve_fixed_point(&self.sharing, &b, SOLVE_TOL * 1e-2, SOLVE_MAX_ITER)?;
                Ok(w.into_iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() >= WEIGHT_DROP_TOL)
                    .map(|(i, v)| (i, k, v))
                    .collect())
            })
            .collect::<Result<_>>()?;
        let m = SparseMatrix::from_triplets(n, n, columns.into_iter().flatten().collect())?;
        WeightMatrix::new(m)
    }

    /// On-demand rows of W via the transposed system.
    pub fn weight_rows(&self) -> WeightRowOracle<'_> {
        WeightRowOracle {
            model: self,
            sharing_t: self.sharing.transpose(),
        }
    }
}

impl PotentialOutcomes for ExposureModel {
    fn n(&self) -> usize {
        self.delta.len()
    }

    fn outcomes(&self, z: &[bool]) -> Result<Vec<f64>> {
        let e = self.solve_exposure(z)?;
        Ok(e.into_iter().map(|x| self.link.apply(x)).collect())
    }

    fn true_neighborhoods(&self) -> Result<Vec<Vec<usize>>> {
        Ok(self.effective_weights()?.neighborhoods())
    }
}

/// Row i of W = (I − P)⁻¹Δ computed as Δ-scaled solution of x = e_i + Pᵀx.
pub struct WeightRowOracle<'m> {
    model: &'m ExposureModel,
    sharing_t: SparseMatrix,
}

impl WeightRows for WeightRowOracle<'_> {
    fn n(&self) -> usize {
        self.model.delta.len()
    }

    fn row_entries(&self, i: usize) -> Result<Vec<(usize, f64)>> {
        let n = self.n();
        if i >= n {
            return Err(Error::NodeOutOfRange { node: i, n });
        }
        let mut b = vec![0.0; n];
        b[i] = 1.0;
        let x = solve_fixed_point(&self.sharing_t, &b, SOLVE_TOL * 1e-2, SOLVE_MAX_ITER)?;
        Ok(x.into_iter()
            .enumerate()
            .map(|(j, v)| (j, v * self.model.delta[j]))
            .filter(|(_, w)| w.abs() >= WEIGHT_DROP_TOL)
            .collect())
    }
}

type UnitFn = Box<dyn Fn(usize, &[bool]) -> f64 + Send + Sync>;

/// Model from a user closure `f(i, z)`. The caller declares the true
/// neighborhoods and is responsible for `f` depending only on them.
pub struct CustomModel {
    n: usize,
    f: UnitFn,
    neighborhoods: Vec<Vec<usize>>,
}

impl CustomModel {
    pub fn new<F>(n: usize, neighborhoods: Vec<Vec<usize>>, f: F) -> Result<Self>
    where
        F: Fn(usize, &[bool]) -> f64 + Send + Sync + 'static,
    {
        if neighborhoods.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: neighborhoods.len(),
            });
        }
        let neighborhoods = neighborhoods
            .into_iter()
            .enumerate()
            .map(|(i, mut nb)| {
                nb.push(i);
                nb.sort_unstable();
                nb.dedup();
                match nb.iter().find(|&&j| j >= n) {
                    Some(&j) => Err(Error::NodeOutOfRange { node: j, n }),
                    None => Ok(nb),
                }
            })
            .collect::<Result<_>>()?;
        Ok(CustomModel {
            n,
            f: Box::new(f),
            neighborhoods,
        })
    }
}

impl PotentialOutcomes for CustomModel {
    fn n(&self) -> usize {
        self.n
    }

    fn outcomes(&self, z: &[bool]) -> Result<Vec<f64>> {
        Ok((0..self.n).map(|i| (self.f)(i, z)).collect())
    }

    fn true_neighborhoods(&self) -> Result<Vec<Vec<usize>>> {
        Ok(self.neighborhoods.clone())
    }
}

/// Smallest δ with Σ_j w_ij A_ij (1 − G_ij) ≤ δ Σ_j w_ij for every i;
/// rows with zero total weight are skipped.
pub fn surrogate_gap<R: WeightRows + ?Sized>(w: &R, g: &Graph) -> Result<f64> {
    if w.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: w.n(),
        });
    }
    let gaps: Vec<f64> = (0..g.n())
        .into_par_iter()
        .map(|i| {
            let row = w.row_entries(i)?;
            let total: f64 = stats::sum(&row.iter().map(|e| e.1).collect::<Vec<_>>());
            if total <= 0.0 {
                return Ok(0.0);
            }
            let missed: Vec<f64> = row
                .iter()
                .filter(|&&(j, v)| v > WEIGHT_DROP_TOL && j != i && !g.contains_edge(i, j))
                .map(|e| e.1)
                .collect();
            Ok(stats::sum(&missed) / total)
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// Simulation instance on surrogate graph `g`: α_i ~ U(0,1), Δ_ii ~ U(0, γ₁)
/// and P_ij = γ₂ G_ij / Σ_k G_ik over open neighborhoods.
pub fn generate_instance(g: &Graph, gamma1: f64, gamma2: f64, link: Link, seed: u64) -> Result<ExposureModel> {
    if !(0.0..SHARING_NORM_BOUND).contains(&gamma2) {
        return Err(Error::InvalidModel(format!("gamma2 must lie in [0, 0.9), got {gamma2}")));
    }
    if !(gamma1.is_finite() && gamma1 >= 0.0) {
        return Err(Error::InvalidModel(format!("gamma1 must be finite and nonnegative, got {gamma1}")));
    }
    let n = g.n();
    let mut rng = seed::rng(seed);
    let alpha: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let delta: Vec<f64> = (0..n).map(|_| gamma1 * rng.random::<f64>()).collect();
    let mut entries = Vec::with_capacity(if gamma2 > 0.0 { 2 * g.edge_count() } else { 0 });
    if gamma2 > 0.0 {
        for i in 0..n {
            let d = g.degree(i);
            for &j in g.neighbors(i) {
                entries.push((i, j as usize, gamma2 / d as f64));
            }
        }
    }
    let sharing = SparseMatrix::from_triplets(n, n, entries)?;
    ExposureModel::new_relaxed(delta, alpha, sharing, link)
}

/// Read `node_id \t y` lines covering each node in `0..n` exactly once.
pub fn load_outcomes(path: impl AsRef<Path>, n: usize) -> Result<OutcomeVector> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut y: Vec<Option<f64>> = vec![None; n];
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
        let node: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad node id {:?}", cols[0])))?;
        let v: f64 = cols[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad outcome {:?}", cols[1])))?;
        if node >= n {
            return Err(Error::parse(path, lineno, format!("node {node} out of range (n = {n})")));
        }
        if y[node].replace(v).is_some() {
            return Err(Error::parse(path, lineno, format!("duplicate node {node}")));
        }
    }
    let y = y
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::parse(path, 0, format!("missing node {i}"))))
        .collect::<Result<Vec<_>>>()?;
    OutcomeVector::new(y)
}
