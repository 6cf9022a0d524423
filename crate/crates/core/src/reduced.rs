//! Reduced Google matrix over a node subset.
//!
//! With `r` the subset and `s` its complement,
//! `GR = Grr + Grs (1 - Gss)^-1 Gsr`. The resolvent is split with the
//! leading eigenpair `(lambda_c, psi_R, psi_L)` of `Gss`:
//!
//! ```text
//! (1 - Gss)^-1 = Pc / (1 - lambda_c) + sum_k (Qc Gss Qc)^k Qc
//! Pc = psi_R psi_L^T / (psi_L^T psi_R),  Qc = 1 - Pc
//! ```
//!
//! giving `GR = Grr + Gpr + Gqr` with `Gpr` rank one. Every product with
//! `Gss` is a full matrix-free `G` product with the subset entries zeroed,
//! so the cost per step is one sparse pass over the graph.

use rayon::prelude::*;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::gmatrix::{Converged, GoogleOperator, IterOptions, RankVector};
use crate::oracle::DEFAULT_DENSE_GUARD;
use crate::vecops;

/// Refinement passes applied to each resolvent column at most.
const MAX_REFINEMENTS: usize = 8;

/// Ordered list of distinct subset nodes; the order fixes the matrix axes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSpec {
    nodes: Vec<usize>,
}

impl SubsetSpec {
    pub fn new(nodes: Vec<usize>, n_nodes: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("subset is empty"));
        }
        let mut seen = vec![false; n_nodes];
        for &k in &nodes {
            if k >= n_nodes {
                return Err(Error::NodeOutOfRange {
                    id: k as u64,
                    n_nodes,
                });
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::invalid(format!("node {k} appears twice in subset")));
            }
        }
        if 2 * nodes.len() > n_nodes {
            log::warn!(
                "subset of {} nodes is more than half of the {n_nodes}-node graph",
                nodes.len()
            );
        }
        Ok(SubsetSpec { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedOptions {
    pub iter: IterOptions,
    /// Largest N for which a full-set subset may materialize `G`.
    pub dense_guard: usize,
}

impl Default for ReducedOptions {
    fn default() -> Self {
        ReducedOptions {
            iter: IterOptions::default(),
            dense_guard: DEFAULT_DENSE_GUARD,
        }
    }
}

/// Component weights: sum of all elements divided by `N_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentWeights {
    pub gr: f64,
    pub grr: f64,
    pub gpr: f64,
    pub gqr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMatrices {
    pub subset: Vec<usize>,
    pub gr: DenseMatrix,
    pub grr: DenseMatrix,
    pub gpr: DenseMatrix,
    pub gqr: DenseMatrix,
    /// Leading eigenvalue of the complement block; `None` when the subset is
    /// the whole graph.
    pub lambda_c: Option<f64>,
    /// Iterations used by the complement eigenpair.
    pub eigen_iterations: usize,
    /// Largest truncation order of the deflated series.
    pub series_order: usize,
    /// Largest final L1 residual of `(1 - Gss) X = Gsr` over the columns.
    pub resolvent_residual: f64,
}

impl ReducedMatrices {
    pub fn n_r(&self) -> usize {
        self.subset.len()
    }

    pub fn weights(&self) -> ComponentWeights {
        component_weights(self)
    }

    /// Count and most negative value of the negative `Gqr` entries.
    pub fn gqr_negative_stats(&self) -> (usize, f64) {
        self.gqr
            .as_slice()
            .iter()
            .filter(|&&v| v < 0.0)
            .fold((0, 0.0), |(c, m), &v| (c + 1, f64::min(m, v)))
    }
}

/// Leading eigenpair of `Gss` and the deflated resolvent built on it.
pub struct ComplementSolver<'a, 'g> {
    op: &'a GoogleOperator<'g>,
    in_subset: Vec<bool>,
    lambda: f64,
    right: Vec<f64>,
    left: Vec<f64>,
    overlap: f64,
    iterations: usize,
    opts: IterOptions,
}

/// Output of one resolvent solve.
pub struct ResolventColumn {
    /// `Pc X`, the part along the complement eigenvector.
    pub leading: Vec<f64>,
    /// `Qc X`.
    pub remainder: Vec<f64>,
    pub series_order: usize,
    pub residual: f64,
}

impl<'a, 'g> ComplementSolver<'a, 'g> {
    pub fn new(op: &'a GoogleOperator<'g>, subset: &SubsetSpec, opts: IterOptions) -> Result<Self> {
        let n = op.n();
        let mut in_subset = vec![false; n];
        for &k in subset.nodes() {
            in_subset[k] = true;
        }
        let n_s = n - subset.len();
        if n_s == 0 {
            return Err(Error::invalid("complement of the subset is empty"));
        }
        let mut solver = ComplementSolver {
            op,
            in_subset,
            lambda: 0.0,
            right: Vec::new(),
            left: Vec::new(),
            overlap: 0.0,
            iterations: 0,
            opts,
        };
        let start: Vec<f64> = solver
            .in_subset
            .iter()
            .map(|&r| if r { 0.0 } else { 1.0 / n_s as f64 })
            .collect();
        let (lambda_r, right, it_r) = solver.leading_vector(start.clone(), false)?;
        let (lambda_l, left, it_l) = solver.leading_vector(start, true)?;
        if (lambda_r - lambda_l).abs() > 1e3 * opts.tol.max(f64::EPSILON) {
            log::warn!("complement eigenvalues disagree: right {lambda_r}, left {lambda_l}");
        }
        if !(lambda_r > 0.0 && lambda_r < 1.0) {
            return Err(Error::invalid(format!(
                "complement eigenvalue {lambda_r} outside (0, 1)"
            )));
        }
        solver.overlap = vecops::dot(&left, &right);
        solver.lambda = lambda_r;
        solver.right = right;
        solver.left = left;
        solver.iterations = it_r.max(it_l);
        log::info!(
            "complement eigenvalue lambda_c = {lambda_r:.15} after {} iterations",
            solver.iterations
        );
        Ok(solver)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn right_vector(&self) -> &[f64] {
        &self.right
    }

    pub fn left_vector(&self) -> &[f64] {
        &self.left
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn zero_subset(&self, x: &mut [f64]) {
        x.iter_mut()
            .zip(&self.in_subset)
            .filter(|(_, &r)| r)
            .for_each(|(v, _)| *v = 0.0);
    }

    /// `Gss x` for `x` supported on the complement.
    pub fn gss(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.op.apply(x)?;
        self.zero_subset(&mut y);
        Ok(y)
    }

    fn gss_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.op.apply_transpose(x)?;
        self.zero_subset(&mut y);
        Ok(y)
    }

    /// Power iteration on the positive matrix `Gss` (or its transpose),
    /// keeping the iterate at unit sum.
    fn leading_vector(&self, mut v: Vec<f64>, transpose: bool) -> Result<(f64, Vec<f64>, usize)> {
        let mut lambda = 0.0;
        let mut residual = f64::INFINITY;
        for it in 1..=self.opts.max_iter {
            let mut y = if transpose {
                self.gss_transpose(&v)?
            } else {
                self.gss(&v)?
            };
            lambda = vecops::sum(&y);
            let inv = 1.0 / lambda;
            y.iter_mut().for_each(|x| *x *= inv);
            residual = vecops::l1_dist(&y, &v);
            v = y;
            if residual <= self.opts.tol {
                return Ok((lambda, v, it));
            }
        }
        log::debug!("last complement eigenvalue estimate {lambda}");
        Err(Error::NotConverged {
            what: "complement eigenvector",
            iterations: self.opts.max_iter,
            residual,
        })
    }

    /// `x - psi_R (psi_L . x) / (psi_L . psi_R)`.
    fn deflate(&self, x: &mut [f64]) {
        let c = vecops::dot(&self.left, x) / self.overlap;
        x.iter_mut().zip(&self.right).for_each(|(v, r)| *v -= c * r);
    }

    /// Approximate inverse of `1 - Gss` from the spectral split.
    fn deflated_inverse(&self, b: &[f64]) -> Result<(Vec<f64>, usize)> {
        let c = vecops::dot(&self.left, b) / self.overlap / (1.0 - self.lambda);
        let mut term = b.to_vec();
        self.deflate(&mut term);
        let mut acc = term.clone();
        // the deflated block contracts at roughly the damping factor
        let stop =
            self.opts.tol * (1.0 - self.op.alpha()).max(1e-3) * vecops::l1_norm(b).max(1e-300);
        let mut order = 0;
        loop {
            if vecops::l1_norm(&term) <= stop {
                break;
            }
            if order == self.opts.max_iter {
                return Err(Error::NotConverged {
                    what: "deflated resolvent series",
                    iterations: order,
                    residual: vecops::l1_norm(&term),
                });
            }
            term = self.gss(&term)?;
            self.deflate(&mut term);
            acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            order += 1;
        }
        acc.iter_mut()
            .zip(&self.right)
            .for_each(|(a, r)| *a += c * r);
        Ok((acc, order))
    }

    /// Solves `(1 - Gss) X = b` for `b` supported on the complement, by the
    /// deflated series plus iterative refinement, and splits `X` into its
    /// `Pc` and `Qc` parts.
    pub fn resolvent(&self, b: &[f64]) -> Result<ResolventColumn> {
        let (mut x, mut order) = self.deflated_inverse(b)?;
        let scale = vecops::l1_norm(b).max(1e-300);
        let mut residual = self.residual(&x, b)?;
        let mut prev = vecops::l1_norm(&residual);
        for _ in 0..MAX_REFINEMENTS {
            if prev <= self.opts.tol * scale * 1e-2 {
                break;
            }
            let (dx, o) = self.deflated_inverse(&residual)?;
            order = order.max(o);
            let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let r = self.residual(&candidate, b)?;
            let norm = vecops::l1_norm(&r);
            if norm >= prev {
                break;
            }
            x = candidate;
            residual = r;
            prev = norm;
        }
        let c = vecops::dot(&self.left, &x) / self.overlap;
        let leading: Vec<f64> = self.right.iter().map(|r| c * r).collect();
        let remainder: Vec<f64> = x.iter().zip(&leading).map(|(a, l)| a - l).collect();
        Ok(ResolventColumn {
            leading,
            remainder,
            series_order: order,
            residual: prev,
        })
    }

    /// `b - (1 - Gss) x`.
    fn residual(&self, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let gx = self.gss(x)?;
        Ok(b.iter()
            .zip(x)
            .zip(&gx)
            .map(|((b, x), g)| b - x + g)
            .collect())
    }
}

/// Computes `GR` and its three components over `subset`.
pub fn compute_reduced(
    op: &GoogleOperator<'_>,
    subset: &SubsetSpec,
    opts: &ReducedOptions,
) -> Result<ReducedMatrices> {
    let n = op.n();
    let nodes = subset.nodes();
    let n_r = nodes.len();
    if let Some(&k) = nodes.iter().find(|&&k| k >= n) {
        return Err(Error::NodeOutOfRange {
            id: k as u64,
            n_nodes: n,
        });
    }

    if n_r == n {
        if n > opts.dense_guard {
            return Err(Error::GuardExceeded {
                n,
                guard: opts.dense_guard,
            });
        }
        let mut grr = DenseMatrix::zeros(n_r, n_r);
        for (c, &l) in nodes.iter().enumerate() {
            let col = op.column(l)?;
            let picked: Vec<f64> = nodes.iter().map(|&k| col[k]).collect();
            grr.set_column(c, &picked);
        }
        return Ok(ReducedMatrices {
            subset: nodes.to_vec(),
            gr: grr.clone(),
            grr,
            gpr: DenseMatrix::zeros(n_r, n_r),
            gqr: DenseMatrix::zeros(n_r, n_r),
            lambda_c: None,
            eigen_iterations: 0,
            series_order: 0,
            resolvent_residual: 0.0,
        });
    }

    let solver = ComplementSolver::new(op, subset, opts.iter)?;
    let pick = |v: &[f64]| -> Vec<f64> { nodes.iter().map(|&k| v[k]).collect() };

    let columns: Vec<Result<ColumnParts>> = nodes
        .par_iter()
        .map(|&l| {
            let mut g = op.column(l)?;
            let direct = pick(&g);
            solver.zero_subset(&mut g);
            let res = solver.resolvent(&g)?;
            let leading = pick(&op.apply(&res.leading)?);
            let remainder = pick(&op.apply(&res.remainder)?);
            Ok(ColumnParts {
                direct,
                leading,
                remainder,
                series_order: res.series_order,
                residual: res.residual,
            })
        })
        .collect();

    let mut grr = DenseMatrix::zeros(n_r, n_r);
    let mut gpr = DenseMatrix::zeros(n_r, n_r);
    let mut gqr = DenseMatrix::zeros(n_r, n_r);
    let mut series_order = 0;
    let mut resolvent_residual: f64 = 0.0;
    for (c, parts) in columns.into_iter().enumerate() {
        let parts = parts?;
        grr.set_column(c, &parts.direct);
        gpr.set_column(c, &parts.leading);
        gqr.set_column(c, &parts.remainder);
        series_order = series_order.max(parts.series_order);
        resolvent_residual = resolvent_residual.max(parts.residual);
    }
    let gr = grr.add(&gpr).add(&gqr);
    Ok(ReducedMatrices {
        subset: nodes.to_vec(),
        gr,
        grr,
        gpr,
        gqr,
        lambda_c: Some(solver.lambda()),
        eigen_iterations: solver.iterations(),
        series_order,
        resolvent_residual,
    })
}

struct ColumnParts {
    direct: Vec<f64>,
    leading: Vec<f64>,
    remainder: Vec<f64>,
    series_order: usize,
    residual: f64,
}

pub fn component_weights(r: &ReducedMatrices) -> ComponentWeights {
    let n_r = r.n_r() as f64;
    ComponentWeights {
        gr: r.gr.total() / n_r,
        grr: r.grr.total() / n_r,
        gpr: r.gpr.total() / n_r,
        gqr: r.gqr.total() / n_r,
    }
}

/// `Gqr` without its diagonal and the combination `Grr + Gqr_nd`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrNondiagonal {
    pub gqr_nd: DenseMatrix,
    pub grr_plus_gqr_nd: DenseMatrix,
    /// Weight of `Grr + Gqr_nd`.
    pub weight: f64,
}

pub fn qr_nondiagonal(r: &ReducedMatrices) -> QrNondiagonal {
    let mut gqr_nd = r.gqr.clone();
    for i in 0..gqr_nd.rows() {
        gqr_nd[(i, i)] = 0.0;
    }
    let grr_plus_gqr_nd = r.grr.add(&gqr_nd);
    let weight = grr_plus_gqr_nd.total() / r.n_r() as f64;
    QrNondiagonal {
        gqr_nd,
        grr_plus_gqr_nd,
        weight,
    }
}

/// Power iteration on the dense `GR`, from the uniform vector.
pub fn reduced_pagerank(r: &ReducedMatrices, opts: &IterOptions) -> Result<Converged<RankVector>> {
    let n_r = r.n_r();
    let mut p = vec![1.0 / n_r as f64; n_r];
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        let mut next = r.gr.matvec(&p);
        vecops::normalize_sum(&mut next);
        let residual = vecops::l1_dist(&next, &p);
        history.push(residual);
        p = next;
        if residual <= opts.tol {
            return Ok(Converged {
                value: RankVector::from_values(p),
                iterations: it,
                residual,
                history,
            });
        }
    }
    Err(Error::NotConverged {
        what: "reduced PageRank",
        iterations: opts.max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}
