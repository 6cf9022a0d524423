//! Linear response of PageRank to weak perturbations.
//!
//! For a perturbed process `P = G(eps) F(eps, P)` the first-order correction
//! `P = P0 + eps * P1` solves the inhomogeneous equation
//! `P1 = G0 P1 + V0`. The source `V0` depends on the perturbation model:
//!
//! * pump model (`G(eps) = G0`, `F` rescales by `1 + eps * D` and
//!   renormalizes): `V0 = Q(G0 D P0)`;
//! * element sensitivity (column `j` of `G0` has entry `i` amplified by
//!   `1 + eps`, then renormalized): `V0 = G1 P0` with
//!   `(G1)_kl = delta_lj (G0)_kl (delta_ki - (G0)_ij)`.
//!
//! `Q(x) = x - sum(x) P0` removes the PageRank direction; it is reapplied
//! after every iteration step to stop rounding drift along `P0`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::gmatrix::{rank_order, Converged, GoogleOperator, IterOptions, RankIndex, RankVector};
use crate::vecops;

/// Default block size of a pathway subset.
pub const DEFAULT_PATHWAY_M: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    /// Source term of the inhomogeneous equation.
    Source,
    /// First-order PageRank correction.
    LinearResponse,
    /// Finite-difference quotient `(P(eps) - P0) / eps`.
    FiniteDifference,
}

/// Real vector over the nodes whose entries sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector {
    values: Vec<f64>,
    kind: ResponseKind,
}

impl ResponseVector {
    pub fn new(values: Vec<f64>, kind: ResponseKind) -> Self {
        ResponseVector { values, kind }
    }

    pub fn zeros(n: usize, kind: ResponseKind) -> Self {
        Self::new(vec![0.0; n], kind)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn kind(&self) -> ResponseKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        vecops::sum(&self.values)
    }

    /// K_L ordering by decreasing `|value|`.
    pub fn magnitude_ranking(&self) -> RankIndex {
        rank_order(&self.values, true)
    }
}

/// Sparse diagonal `D` of the pump model.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpSpec {
    entries: Vec<(usize, f64)>,
}

impl PumpSpec {
    /// Entries must have distinct nodes and nonzero finite values.
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("pump spec has no entries"));
        }
        let mut seen = HashSet::new();
        for &(node, d) in &entries {
            if !seen.insert(node) {
                return Err(Error::invalid(format!("node {node} repeated in pump spec")));
            }
            if d == 0.0 || !d.is_finite() {
                return Err(Error::invalid(format!(
                    "pump value for node {node} must be finite and nonzero, got {d}"
                )));
            }
        }
        let spec = PumpSpec { entries };
        if !spec.has_both_signs() {
            log::warn!("pump spec has only one sign: net probability is injected or absorbed");
        }
        Ok(spec)
    }

    /// Injection at `inject`, absorption at `absorb`, scaled so that
    /// `D P0 = e_inject - e_absorb`.
    pub fn balanced_pair(p0: &RankVector, inject: usize, absorb: usize) -> Result<Self> {
        check_node(inject, p0.len())?;
        check_node(absorb, p0.len())?;
        if inject == absorb {
            return Err(Error::invalid("injection and absorption node coincide"));
        }
        Self::new(vec![
            (inject, 1.0 / p0.get(inject)),
            (absorb, -1.0 / p0.get(absorb)),
        ])
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn has_both_signs(&self) -> bool {
        self.entries.iter().any(|e| e.1 > 0.0) && self.entries.iter().any(|e| e.1 < 0.0)
    }

    /// `e(P) = sum_j D_j P(j)`.
    pub fn excess(&self, p: &[f64]) -> f64 {
        vecops::sum_iter(self.entries.iter().map(|&(k, d)| d * p[k]))
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.entries.iter().map(|&(k, d)| (k, c * d)).collect())
    }

    fn check_range(&self, n: usize) -> Result<()> {
        self.entries.iter().try_for_each(|&(k, _)| check_node(k, n))
    }
}

/// Node pair `(i, j)` whose transition `j -> i` is amplified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensitivitySpec {
    pub target: usize,
    pub source: usize,
}

/// Options of the projected P1 iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseOptions {
    pub iter: IterOptions,
    /// Reproject onto the sum-zero subspace after every step.
    pub project_each_step: bool,
}

impl Default for ResponseOptions {
    fn default() -> Self {
        ResponseOptions {
            iter: IterOptions::default(),
            project_each_step: true,
        }
    }
}

fn check_node(id: usize, n: usize) -> Result<()> {
    if id >= n {
        return Err(Error::NodeOutOfRange {
            id: id as u64,
            n_nodes: n,
        });
    }
    Ok(())
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `x <- x - sum(x) P0`, in place.
pub fn project_in_place(x: &mut [f64], p0: &[f64]) {
    let s = vecops::sum(x);
    if s != 0.0 {
        x.iter_mut().zip(p0).for_each(|(v, p)| *v -= s * p);
    }
}

/// `Q(x) = x - sum(x) P0`.
pub fn project_biorthogonal(x: &[f64], p0: &RankVector) -> Result<ResponseVector> {
    check_len(p0.len(), x.len())?;
    let mut out = x.to_vec();
    project_in_place(&mut out, p0.values());
    Ok(ResponseVector::new(out, ResponseKind::Source))
}

/// Source for a balanced pump pair: `V0 = G0 (e_i - e_j)`, i.e. the
/// difference of columns `i` and `j` of `G0`.
pub fn pump_pair_v0(
    op: &GoogleOperator<'_>,
    p0: &RankVector,
    inject: usize,
    absorb: usize,
) -> Result<ResponseVector> {
    let n = op.n();
    check_len(n, p0.len())?;
    check_node(inject, n)?;
    check_node(absorb, n)?;
    let mut w = vec![0.0; n];
    w[inject] += 1.0;
    w[absorb] -= 1.0;
    let mut v = op.apply(&w)?;
    project_in_place(&mut v, p0.values());
    Ok(ResponseVector::new(v, ResponseKind::Source))
}

/// Source for a general pump diagonal: `V0 = G0 Q(D P0)`.
pub fn pump_general_v0(
    op: &GoogleOperator<'_>,
    p0: &RankVector,
    pump: &PumpSpec,
) -> Result<ResponseVector> {
    let n = op.n();
    check_len(n, p0.len())?;
    pump.check_range(n)?;
    let mut w = vec![0.0; n];
    for &(k, d) in pump.entries() {
        w[k] = d * p0.get(k);
    }
    project_in_place(&mut w, p0.values());
    let mut v = op.apply(&w)?;
    project_in_place(&mut v, p0.values());
    Ok(ResponseVector::new(v, ResponseKind::Source))
}

/// Source for the sensitivity of transition `j -> i`:
/// `V0(k) = (G0)_kj P0(j) (delta_ki - (G0)_ij)`.
pub fn sensitivity_v0(
    op: &GoogleOperator<'_>,
    p0: &RankVector,
    spec: SensitivitySpec,
) -> Result<ResponseVector> {
    let n = op.n();
    check_len(n, p0.len())?;
    check_node(spec.target, n)?;
    check_node(spec.source, n)?;
    let column = op.column(spec.source)?;
    let g_ij = column[spec.target];
    let pj = p0.get(spec.source);
    let mut v: Vec<f64> = column.iter().map(|&g| -g * pj * g_ij).collect();
    v[spec.target] += g_ij * pj;
    project_in_place(&mut v, p0.values());
    Ok(ResponseVector::new(v, ResponseKind::Source))
}

/// Iterates `P1 <- Q(G0 P1 + V0)` from `P1 = 0` until successive iterates
/// differ by at most `tol` in L1.
pub fn solve_linear_response(
    op: &GoogleOperator<'_>,
    p0: &RankVector,
    v0: &ResponseVector,
    opts: &ResponseOptions,
) -> Result<Converged<ResponseVector>> {
    let n = op.n();
    check_len(n, p0.len())?;
    check_len(n, v0.len())?;
    let v0 = v0.values();
    let drift = vecops::sum(v0).abs();
    if drift > 1e-12 * vecops::l1_norm(v0).max(1.0) {
        return Err(Error::invalid(format!(
            "source term must sum to zero (sum = {drift:e})"
        )));
    }
    let mut current = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut history = Vec::new();
    for it in 1..=opts.iter.max_iter {
        op.apply_into(&current, &mut next)?;
        next.iter_mut().zip(v0).for_each(|(x, v)| *x += v);
        if opts.project_each_step {
            project_in_place(&mut next, p0.values());
        }
        let residual = vecops::l1_dist(&next, &current);
        history.push(residual);
        std::mem::swap(&mut current, &mut next);
        if residual <= opts.iter.tol {
            log::debug!("linear response converged after {it} steps, residual {residual:e}");
            return Ok(Converged {
                value: ResponseVector::new(current, ResponseKind::LinearResponse),
                iterations: it,
                residual,
                history,
            });
        }
    }
    Err(Error::NotConverged {
        what: "linear response",
        iterations: opts.iter.max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// Fixed point of `P = G0 ((1 + eps D) P / (1 + eps e(P)))` at finite `eps`,
/// from the uniform start.
pub fn solve_perturbed_pump(
    op: &GoogleOperator<'_>,
    pump: &PumpSpec,
    eps: f64,
    opts: &IterOptions,
) -> Result<Converged<RankVector>> {
    let n = op.n();
    pump.check_range(n)?;
    if !eps.is_finite() {
        return Err(Error::invalid(format!("epsilon must be finite, got {eps}")));
    }
    let mut current = vec![1.0 / n as f64; n];
    let mut scaled = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let denominator = 1.0 + eps * pump.excess(&current);
        if denominator.is_nan() || denominator <= 0.0 {
            return Err(Error::NonPositiveNormalization {
                epsilon: eps,
                denominator,
            });
        }
        scaled.copy_from_slice(&current);
        for &(k, d) in pump.entries() {
            scaled[k] *= 1.0 + eps * d;
        }
        let inv = 1.0 / denominator;
        scaled.iter_mut().for_each(|x| *x *= inv);
        op.apply_into(&scaled, &mut next)?;
        vecops::normalize_sum(&mut next);
        let residual = vecops::l1_dist(&next, &current);
        history.push(residual);
        std::mem::swap(&mut current, &mut next);
        if residual <= opts.tol {
            return Ok(Converged {
                value: RankVector::from_values(current),
                iterations: it,
                residual,
                history,
            });
        }
    }
    Err(Error::NotConverged {
        what: "perturbed pump PageRank",
        iterations: opts.max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// `(P(eps) - P0) / eps`. Both vectors sum to one, so the rounding drift of
/// the difference, amplified by `1 / eps`, is projected out.
pub fn finite_difference(p_eps: &RankVector, p0: &RankVector, eps: f64) -> Result<ResponseVector> {
    check_len(p0.len(), p_eps.len())?;
    if !(eps.is_finite() && eps != 0.0) {
        return Err(Error::invalid(format!(
            "epsilon must be finite and nonzero, got {eps}"
        )));
    }
    let mut values: Vec<f64> = p_eps
        .values()
        .iter()
        .zip(p0.values())
        .map(|(a, b)| (a - b) / eps)
        .collect();
    project_in_place(&mut values, p0.values());
    Ok(ResponseVector::new(values, ResponseKind::FiniteDifference))
}

/// Relative sensitivities `P1(k) / P0(k)`.
pub fn sensitivity_values(p1: &ResponseVector, p0: &RankVector) -> Result<Vec<f64>> {
    check_len(p0.len(), p1.len())?;
    Ok(p1
        .values()
        .iter()
        .zip(p0.values())
        .map(|(a, b)| a / b)
        .collect())
}

/// One row of a pathway subset.
#[derive(Debug, Clone, PartialEq)]
pub struct PathwayEntry {
    /// 1-based position in the subset.
    pub index: usize,
    pub node: usize,
    /// 1-based rank by `|P1|`.
    pub k_l: usize,
    /// 1-based PageRank rank.
    pub k: usize,
    pub p1: f64,
}

/// The `m` most negative then the `m` most positive response nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PathwaySubset {
    pub entries: Vec<PathwayEntry>,
    pub requested: usize,
    pub n_negative: usize,
    pub n_positive: usize,
}

impl PathwaySubset {
    pub fn nodes(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.node).collect()
    }

    pub fn negative_block(&self) -> &[PathwayEntry] {
        &self.entries[..self.n_negative]
    }

    pub fn positive_block(&self) -> &[PathwayEntry] {
        &self.entries[self.n_negative..]
    }

    pub fn is_truncated(&self) -> bool {
        self.n_negative < self.requested || self.n_positive < self.requested
    }
}

/// Picks the pathway subset from `P1`: a negative block ordered by ascending
/// `P1` followed by a positive block ordered by descending `P1`.
pub fn select_pathway_subset(
    p1: &ResponseVector,
    pagerank_ranking: &RankIndex,
    m: usize,
) -> Result<PathwaySubset> {
    let n = p1.len();
    check_len(n, pagerank_ranking.len())?;
    let values = p1.values();
    let k_l = p1.magnitude_ranking();
    let mut negative: Vec<usize> = (0..n).filter(|&k| values[k] < 0.0).collect();
    let mut positive: Vec<usize> = (0..n).filter(|&k| values[k] > 0.0).collect();
    negative.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    positive.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    negative.truncate(m);
    positive.truncate(m);
    if negative.len() < m || positive.len() < m {
        log::warn!(
            "pathway subset truncated: requested {m} per block, found {} negative and {} positive",
            negative.len(),
            positive.len()
        );
    }
    let (n_negative, n_positive) = (negative.len(), positive.len());
    let entries = negative
        .into_iter()
        .chain(positive)
        .enumerate()
        .map(|(idx, node)| PathwayEntry {
            index: idx + 1,
            node,
            k_l: k_l.rank_of(node),
            k: pagerank_ranking.rank_of(node),
            p1: values[node],
        })
        .collect();
    Ok(PathwaySubset {
        entries,
        requested: m,
        n_negative,
        n_positive,
    })
}
