//! Matrix-free Google matrix and the PageRank / CheiRank power iteration.
//!
//! `G = alpha * S + (1 - alpha) / N`, where column `j` of `S` is
//! `A[:, j] / k_out(j)` or uniform `1/N` when `j` is dangling. The product
//! `G x` splits into a sparse pull over in-edges plus two rank-one terms
//! (dangling mass and teleportation), so `G` itself is never formed.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Csr, DirectedGraph};
use crate::vecops;

pub const DEFAULT_ALPHA: f64 = 0.85;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Rows per parallel work item in the sparse pull.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Links as given (PageRank).
    #[default]
    Forward,
    /// Links reversed (CheiRank).
    Transposed,
}

/// Stopping rule shared by the power-type iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    /// Bound on the L1 distance between successive iterates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl IterOptions {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Error::invalid(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(IterOptions { tol, max_iter })
    }
}

/// Result of an iterative solve together with its convergence record.
#[derive(Debug, Clone)]
pub struct Converged<T> {
    pub value: T,
    pub iterations: usize,
    pub residual: f64,
    /// L1 residual after each iteration.
    pub history: Vec<f64>,
}

/// The Google matrix of a graph in a given link direction.
#[derive(Debug, Clone)]
pub struct GoogleOperator<'g> {
    graph: &'g DirectedGraph,
    alpha: f64,
    direction: Direction,
    deterministic: bool,
    /// `1 / k_out(j)`, zero for dangling nodes.
    inv_out_degree: Vec<f64>,
    dangling: Vec<u32>,
}

impl<'g> GoogleOperator<'g> {
    /// `alpha` must lie in `(0, 1]`; `alpha = 1` drops teleportation and is
    /// only meant for analytic checks.
    pub fn new(graph: &'g DirectedGraph, alpha: f64, direction: Direction) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!(
                "damping factor must lie in (0, 1], got {alpha}"
            )));
        }
        let n = graph.n_nodes();
        let out_lists = match direction {
            Direction::Forward => graph.forward(),
            Direction::Transposed => graph.reverse(),
        };
        let mut inv_out_degree = vec![0.0; n];
        let mut dangling = Vec::new();
        for (j, inv) in inv_out_degree.iter_mut().enumerate() {
            match out_lists.degree(j) {
                0 => dangling.push(j as u32),
                d => *inv = 1.0 / d as f64,
            }
        }
        Ok(GoogleOperator {
            graph,
            alpha,
            direction,
            deterministic: true,
            inv_out_degree,
            dangling,
        })
    }

    pub fn forward(graph: &'g DirectedGraph, alpha: f64) -> Result<Self> {
        Self::new(graph, alpha, Direction::Forward)
    }

    /// Deterministic mode (the default) computes the global reductions
    /// serially so repeated runs are bit-identical.
    pub fn with_deterministic(mut self, deterministic: bool) -> Self {
        self.deterministic = deterministic;
        self
    }

    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Nodes without out-links in this direction.
    pub fn dangling_nodes(&self) -> &[u32] {
        &self.dangling
    }

    fn in_lists(&self) -> &Csr {
        match self.direction {
            Direction::Forward => self.graph.reverse(),
            Direction::Transposed => self.graph.forward(),
        }
    }

    fn out_lists(&self) -> &Csr {
        match self.direction {
            Direction::Forward => self.graph.forward(),
            Direction::Transposed => self.graph.reverse(),
        }
    }

    fn reduce(&self, xs: &[f64]) -> f64 {
        if self.deterministic {
            vecops::sum(xs)
        } else {
            xs.par_iter().sum()
        }
    }

    /// `G x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = G x`, reusing the output buffer.
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let n = self.n();
        check_len(n, x.len())?;
        check_len(n, y.len())?;
        if n == 0 {
            return Ok(());
        }
        let scaled: Vec<f64> = x
            .par_iter()
            .zip(self.inv_out_degree.par_iter())
            .map(|(v, w)| v * w)
            .collect();
        let dangling_mass = if self.deterministic {
            vecops::sum_iter(self.dangling.iter().map(|&j| x[j as usize]))
        } else {
            self.dangling.par_iter().map(|&j| x[j as usize]).sum()
        };
        let total = self.reduce(x);
        let nf = n as f64;
        let uniform = self.alpha * dangling_mass / nf + (1.0 - self.alpha) * total / nf;
        let alpha = self.alpha;
        let in_lists = self.in_lists();
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            let base = c * CHUNK;
            for (off, yk) in out.iter_mut().enumerate() {
                let pull: f64 = in_lists
                    .row(base + off)
                    .iter()
                    .map(|&j| scaled[j as usize])
                    .sum();
                *yk = alpha * pull + uniform;
            }
        });
        Ok(())
    }

    /// `G^T y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        check_len(n, y.len())?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let nf = n as f64;
        let total = self.reduce(y);
        let teleport = (1.0 - self.alpha) * total / nf;
        let dangling_value = self.alpha * total / nf + teleport;
        let alpha = self.alpha;
        let out_lists = self.out_lists();
        let mut out = vec![0.0; n];
        out.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let base = c * CHUNK;
                for (off, o) in chunk.iter_mut().enumerate() {
                    let l = base + off;
                    let row = out_lists.row(l);
                    *o = if row.is_empty() {
                        dangling_value
                    } else {
                        let s: f64 = row.iter().map(|&k| y[k as usize]).sum();
                        alpha * s / row.len() as f64 + teleport
                    };
                }
            });
        Ok(out)
    }

    /// Column `j` of `G`, i.e. `G e_j`.
    pub fn column(&self, j: usize) -> Result<Vec<f64>> {
        let n = self.n();
        if j >= n {
            return Err(Error::NodeOutOfRange {
                id: j as u64,
                n_nodes: n,
            });
        }
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        self.apply(&e)
    }

    /// Single matrix element `G_ij`, read off the sparse structure.
    pub fn element(&self, i: usize, j: usize) -> f64 {
        let nf = self.n() as f64;
        let teleport = (1.0 - self.alpha) / nf;
        let row = self.out_lists().row(j);
        if row.is_empty() {
            self.alpha / nf + teleport
        } else if row.binary_search(&(i as u32)).is_ok() {
            self.alpha * self.inv_out_degree[j] + teleport
        } else {
            teleport
        }
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Permutation listing nodes from highest to lowest value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankIndex {
    order: Vec<u32>,
    position: Vec<u32>,
}

impl RankIndex {
    /// Node holding 0-based rank `k`.
    pub fn node_at(&self, k: usize) -> usize {
        self.order[k] as usize
    }

    /// 1-based rank of `node` (K = 1 is the top).
    pub fn rank_of(&self, node: usize) -> usize {
        self.position[node] as usize + 1
    }

    pub fn order(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.order.iter().map(|&v| v as usize)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Orders nodes by decreasing `v` (or `|v|`), ties by ascending id.
pub fn rank_order(v: &[f64], by_magnitude: bool) -> RankIndex {
    let mut order: Vec<u32> = (0..v.len() as u32).collect();
    let key = |i: u32| {
        let x = v[i as usize];
        if by_magnitude {
            x.abs()
        } else {
            x
        }
    };
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    let mut position = vec![0u32; v.len()];
    for (k, &node) in order.iter().enumerate() {
        position[node as usize] = k as u32;
    }
    RankIndex { order, position }
}

/// Sum-normalized positive vector over the nodes.
#[derive(Debug, Clone)]
pub struct RankVector {
    values: Vec<f64>,
    ordering: OnceLock<RankIndex>,
}

impl PartialEq for RankVector {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl RankVector {
    /// Wraps `values`, rescaling them to unit sum.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        vecops::normalize_sum(&mut values);
        RankVector {
            values,
            ordering: OnceLock::new(),
        }
    }

    pub fn uniform(n: usize) -> Self {
        Self::from_values(vec![1.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Ranking K by decreasing probability, computed once.
    pub fn ranking(&self) -> &RankIndex {
        self.ordering
            .get_or_init(|| rank_order(&self.values, false))
    }
}

/// Power iteration `P <- G P` from the uniform vector.
pub fn pagerank(op: &GoogleOperator<'_>, opts: &IterOptions) -> Result<Converged<RankVector>> {
    let n = op.n();
    if n == 0 {
        return Ok(Converged {
            value: RankVector::from_values(Vec::new()),
            iterations: 0,
            residual: 0.0,
            history: Vec::new(),
        });
    }
    let mut current = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut history = Vec::new();
    for it in 1..=opts.max_iter {
        op.apply_into(&current, &mut next)?;
        vecops::normalize_sum(&mut next);
        let residual = vecops::l1_dist(&next, &current);
        history.push(residual);
        std::mem::swap(&mut current, &mut next);
        if residual <= opts.tol {
            log::debug!("power iteration converged after {it} steps, residual {residual:e}");
            return Ok(Converged {
                value: RankVector::from_values(current),
                iterations: it,
                residual,
                history,
            });
        }
    }
    Err(Error::NotConverged {
        what: "PageRank",
        iterations: opts.max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// PageRank of the link-reversed graph.
pub fn cheirank(
    graph: &DirectedGraph,
    alpha: f64,
    opts: &IterOptions,
) -> Result<Converged<RankVector>> {
    let op = GoogleOperator::new(graph, alpha, Direction::Transposed)?;
    pagerank(&op, opts)
}
