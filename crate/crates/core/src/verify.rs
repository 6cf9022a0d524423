//! Side-by-side run of the matrix-free solvers and the dense oracle.

use crate::error::{Error, Result};
use crate::gmatrix::{pagerank, Direction, GoogleOperator, IterOptions};
use crate::graph::DirectedGraph;
use crate::oracle;
use crate::reduced::{compute_reduced, ReducedOptions, SubsetSpec};
use crate::response::{pump_pair_v0, solve_linear_response, ResponseOptions};
use crate::vecops;

/// Deviation ceiling for every oracle comparison.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    fn push(&mut self, name: &'static str, deviation: f64) {
        self.checks.push(Check {
            name,
            deviation,
            tolerance: VERIFY_TOLERANCE,
        });
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub alpha: f64,
    pub iter: IterOptions,
    pub deterministic: bool,
    /// Pump pair; defaults to the two top PageRank nodes.
    pub pair: Option<(usize, usize)>,
    /// Subset size for the reduced-matrix check; the top `|P1|` nodes.
    pub subset_size: usize,
    pub dense_guard: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            alpha: crate::gmatrix::DEFAULT_ALPHA,
            iter: IterOptions::default(),
            deterministic: true,
            pair: None,
            subset_size: 5,
            dense_guard: oracle::DEFAULT_DENSE_GUARD,
        }
    }
}

pub fn verify(g: &DirectedGraph, opts: &VerifyOptions) -> Result<VerifyReport> {
    let n = g.n_nodes();
    if n < 2 {
        return Err(Error::invalid("verification needs at least two nodes"));
    }
    let mut report = VerifyReport::default();
    let op = GoogleOperator::forward(g, opts.alpha)?.with_deterministic(opts.deterministic);
    let dense = oracle::dense_google(g, opts.alpha, opts.dense_guard)?;

    let p0 = pagerank(&op, &opts.iter)?.value;
    let p0_dense = oracle::dense_pagerank(&dense)?;
    report.push("pagerank", vecops::linf_dist(p0.values(), &p0_dense));

    let op_t = GoogleOperator::new(g, opts.alpha, Direction::Transposed)?
        .with_deterministic(opts.deterministic);
    let chei = pagerank(&op_t, &opts.iter)?.value;
    let dense_t = oracle::dense_google(&g.transpose(), opts.alpha, opts.dense_guard)?;
    report.push(
        "cheirank",
        vecops::linf_dist(chei.values(), &oracle::dense_pagerank(&dense_t)?),
    );

    let (inject, absorb) = opts
        .pair
        .unwrap_or_else(|| (p0.ranking().node_at(0), p0.ranking().node_at(1)));
    let v0 = pump_pair_v0(&op, &p0, inject, absorb)?;
    let response_opts = ResponseOptions {
        iter: opts.iter,
        ..Default::default()
    };
    let p1 = solve_linear_response(&op, &p0, &v0, &response_opts)?.value;
    let v0_dense: Vec<f64> = (0..n)
        .map(|k| dense[(k, inject)] - dense[(k, absorb)])
        .collect();
    let p1_dense = oracle::dense_linear_response(&dense, &v0_dense)?;
    report.push("linear_response", vecops::linf_dist(p1.values(), &p1_dense));

    let size = opts.subset_size.clamp(1, n - 1);
    let nodes: Vec<usize> = p1.magnitude_ranking().order().take(size).collect();
    let subset = SubsetSpec::new(nodes.clone(), n)?;
    let reduced = compute_reduced(
        &op,
        &subset,
        &ReducedOptions {
            iter: opts.iter,
            dense_guard: opts.dense_guard,
        },
    )?;
    let gr_dense = oracle::dense_reduced(&dense, &nodes)?;
    report.push("reduced_matrix", reduced.gr.max_abs_diff(&gr_dense));
    let parts = reduced.grr.add(&reduced.gpr).add(&reduced.gqr);
    report.push("reduced_decomposition", parts.max_abs_diff(&reduced.gr));
    let colsum = reduced
        .gr
        .column_sums()
        .into_iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max);
    report.push("reduced_column_sums", colsum);
    Ok(report)
}
