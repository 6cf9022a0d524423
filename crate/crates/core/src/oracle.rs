//! Dense brute-force references for small graphs.
//!
//! Everything here forms `G` explicitly and solves with Gaussian
//! elimination. It shares no code path with the matrix-free solvers beyond
//! the graph structure itself, and is what the fast path is checked against.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Largest N accepted for O(N^3) dense work unless overridden.
pub const DEFAULT_DENSE_GUARD: usize = 2000;

fn check_guard(n: usize, guard: usize) -> Result<()> {
    if n > guard {
        return Err(Error::GuardExceeded { n, guard });
    }
    Ok(())
}

/// Explicit Google matrix, built entry by entry from the adjacency.
pub fn dense_google(g: &DirectedGraph, alpha: f64, guard: usize) -> Result<DenseMatrix> {
    let n = g.n_nodes();
    check_guard(n, guard)?;
    let nf = n as f64;
    let mut m = DenseMatrix::from_fn(n, n, |_, _| (1.0 - alpha) / nf);
    for j in 0..n {
        let targets = g.successors(j);
        if targets.is_empty() {
            for i in 0..n {
                m[(i, j)] += alpha / nf;
            }
        } else {
            let w = alpha / targets.len() as f64;
            for &i in targets {
                m[(i as usize, j)] += w;
            }
        }
    }
    Ok(m)
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::invalid("solve needs a square matrix"));
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mut x = solve_many(a, &DenseMatrix::from_rows(n, 1, b.to_vec())?)?;
    Ok((0..n).map(|i| std::mem::take(&mut x[(i, 0)])).collect())
}

/// Solves `a X = B` for a block of right-hand sides.
pub fn solve_many(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.rows();
    assert!(a.is_square() && b.rows() == n);
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| lu[(r, col)].abs().total_cmp(&lu[(s, col)].abs()))
            .unwrap();
        let pivot = lu[(pivot_row, col)];
        if pivot.abs() <= 1e-14 * scale {
            return Err(Error::Singular { column: col, pivot });
        }
        if pivot_row != col {
            for c in 0..n {
                let t = lu[(col, c)];
                lu[(col, c)] = lu[(pivot_row, c)];
                lu[(pivot_row, c)] = t;
            }
            for c in 0..m {
                let t = x[(col, c)];
                x[(col, c)] = x[(pivot_row, c)];
                x[(pivot_row, c)] = t;
            }
        }
        for r in col + 1..n {
            let f = lu[(r, col)] / pivot;
            if f == 0.0 {
                continue;
            }
            lu[(r, col)] = 0.0;
            for c in col + 1..n {
                lu[(r, c)] -= f * lu[(col, c)];
            }
            for c in 0..m {
                x[(r, c)] -= f * x[(col, c)];
            }
        }
    }
    for c in 0..m {
        for r in (0..n).rev() {
            let mut acc = x[(r, c)];
            for k in r + 1..n {
                acc -= lu[(r, k)] * x[(k, c)];
            }
            x[(r, c)] = acc / lu[(r, r)];
        }
    }
    Ok(x)
}

/// Stationary vector of a column-stochastic matrix: `(G - 1) P = 0` with
/// row 0 replaced by the normalization `sum(P) = 1`.
pub fn dense_pagerank(g: &DenseMatrix) -> Result<Vec<f64>> {
    let n = g.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = g.clone();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for c in 0..n {
        a[(0, c)] = 1.0;
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    solve(&a, &rhs)
}

/// `(1 - G) P1 = V0` with row 0 replaced by `sum(P1) = 0`.
pub fn dense_linear_response(g: &DenseMatrix, v0: &[f64]) -> Result<Vec<f64>> {
    let n = g.rows();
    if v0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: v0.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = DenseMatrix::from_fn(n, n, |r, c| kronecker(r, c) - g[(r, c)]);
    for c in 0..n {
        a[(0, c)] = 1.0;
    }
    let mut rhs = v0.to_vec();
    rhs[0] = 0.0;
    solve(&a, &rhs)
}

/// Reduced matrix `Grr + Grs (1 - Gss)^-1 Gsr` by direct inversion.
/// Row/column order of the result follows `subset`.
pub fn dense_reduced(g: &DenseMatrix, subset: &[usize]) -> Result<DenseMatrix> {
    let n = g.rows();
    let (r, s) = split_indices(n, subset)?;
    if s.is_empty() {
        return Err(Error::invalid("subset must leave a nonempty complement"));
    }
    let grr = g.select(&r, &r);
    let grs = g.select(&r, &s);
    let gsr = g.select(&s, &r);
    let one_minus_gss =
        DenseMatrix::from_fn(s.len(), s.len(), |a, b| kronecker(a, b) - g[(s[a], s[b])]);
    let resolvent_gsr = solve_many(&one_minus_gss, &gsr)?;
    Ok(grr.add(&grs.matmul(&resolvent_gsr)))
}

/// `(1 - Gss)^-1 Gsr` with rows in ascending complement order and columns in
/// subset order.
pub fn dense_complement_resolvent(g: &DenseMatrix, subset: &[usize]) -> Result<DenseMatrix> {
    let (r, s) = split_indices(g.rows(), subset)?;
    let gsr = g.select(&s, &r);
    let one_minus_gss =
        DenseMatrix::from_fn(s.len(), s.len(), |a, b| kronecker(a, b) - g[(s[a], s[b])]);
    solve_many(&one_minus_gss, &gsr)
}

fn kronecker(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn split_indices(n: usize, subset: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut member = vec![false; n];
    for &k in subset {
        if k >= n {
            return Err(Error::NodeOutOfRange {
                id: k as u64,
                n_nodes: n,
            });
        }
        if std::mem::replace(&mut member[k], true) {
            return Err(Error::invalid(format!("node {k} listed twice in subset")));
        }
    }
    let complement = (0..n).filter(|&k| !member[k]).collect();
    Ok((subset.to_vec(), complement))
}

/// `G(eps)`: element `(i, j)` scaled by `1 + eps`, column `j` renormalized.
pub fn dense_perturbed_google(
    g: &DenseMatrix,
    i: usize,
    j: usize,
    eps: f64,
) -> Result<DenseMatrix> {
    let n = g.rows();
    if i >= n || j >= n {
        return Err(Error::NodeOutOfRange {
            id: i.max(j) as u64,
            n_nodes: n,
        });
    }
    let denom = 1.0 + eps * g[(i, j)];
    let mut out = g.clone();
    for k in 0..n {
        let scale = if k == i { 1.0 + eps } else { 1.0 };
        out[(k, j)] = scale * g[(k, j)] / denom;
    }
    Ok(out)
}

/// Dense `G1` of the element-sensitivity model, from the first-order
/// expansion of [`dense_perturbed_google`]:
/// `(G1)_kl = delta_lj * G_kl * (delta_ki - G_ij)`.
pub fn dense_sensitivity_g1(g: &DenseMatrix, i: usize, j: usize) -> DenseMatrix {
    let n = g.rows();
    let gij = g[(i, j)];
    DenseMatrix::from_fn(n, n, |k, l| {
        if l != j {
            0.0
        } else {
            g[(k, l)] * (kronecker(k, i) - gij)
        }
    })
}
