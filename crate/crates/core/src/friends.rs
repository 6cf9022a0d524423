//! Friend and follower networks drawn from a reduced matrix.
//!
//! Starting from a few initial subset positions, each expanded node links to
//! the `n_friends` strongest off-diagonal elements (by modulus) of its column
//! (friends) or row (followers). Newly reached nodes are expanded at the next
//! level; nodes already present are linked but not expanded again.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FriendDirection {
    /// Strongest elements in the column: transitions out of the node.
    #[default]
    Friends,
    /// Strongest elements in the row: transitions into the node.
    Followers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    /// One of the initial nodes, by its position in the initial list.
    Initial(usize),
    /// Negative response block (absorption side).
    Negative,
    /// Positive response block (injection side).
    Positive,
    Neutral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriendNode {
    /// 0-based position on the subset axis.
    pub index: usize,
    /// 0 for initial nodes, otherwise the level at which it was reached.
    pub level: usize,
    pub class: NodeClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriendEdge {
    /// Expanded node.
    pub from: usize,
    /// Selected friend or follower.
    pub to: usize,
    pub level: usize,
    /// Matrix element behind the link.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriendNetwork {
    pub nodes: Vec<FriendNode>,
    pub edges: Vec<FriendEdge>,
    pub direction: FriendDirection,
}

impl FriendNetwork {
    pub fn contains(&self, index: usize) -> bool {
        self.nodes.iter().any(|n| n.index == index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FriendOptions {
    pub n_friends: usize,
    pub levels: usize,
    pub direction: FriendDirection,
}

impl Default for FriendOptions {
    fn default() -> Self {
        FriendOptions {
            n_friends: 4,
            levels: 2,
            direction: FriendDirection::Friends,
        }
    }
}

/// Builds the network. `signs`, when given, holds one value per subset
/// position whose sign picks the node class; initial nodes override it.
pub fn build_friend_network(
    m: &DenseMatrix,
    initial: &[usize],
    signs: Option<&[f64]>,
    opts: &FriendOptions,
) -> Result<FriendNetwork> {
    if !m.is_square() {
        return Err(Error::invalid("friend network needs a square matrix"));
    }
    let n = m.rows();
    if let Some(s) = signs {
        if s.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: s.len(),
            });
        }
    }
    let class_of = |idx: usize| -> NodeClass {
        match signs.map(|s| s[idx]) {
            Some(v) if v < 0.0 => NodeClass::Negative,
            Some(v) if v > 0.0 => NodeClass::Positive,
            _ => NodeClass::Neutral,
        }
    };

    let mut present = vec![false; n];
    let mut nodes = Vec::new();
    for (pos, &idx) in initial.iter().enumerate() {
        if idx >= n {
            return Err(Error::invalid(format!(
                "initial node {idx} is outside the {n}-node subset"
            )));
        }
        if std::mem::replace(&mut present[idx], true) {
            return Err(Error::invalid(format!("initial node {idx} listed twice")));
        }
        nodes.push(FriendNode {
            index: idx,
            level: 0,
            class: NodeClass::Initial(pos),
        });
    }

    let mut edges = Vec::new();
    let mut frontier: Vec<usize> = initial.to_vec();
    for level in 1..=opts.levels {
        let mut next = Vec::new();
        for &from in &frontier {
            for (to, weight) in strongest(m, from, opts) {
                edges.push(FriendEdge {
                    from,
                    to,
                    level,
                    weight,
                });
                if !std::mem::replace(&mut present[to], true) {
                    nodes.push(FriendNode {
                        index: to,
                        level,
                        class: class_of(to),
                    });
                    next.push(to);
                }
            }
        }
        frontier = next;
    }
    Ok(FriendNetwork {
        nodes,
        edges,
        direction: opts.direction,
    })
}

/// Top `n_friends` nonzero off-diagonal entries of column (or row) `l` by
/// modulus, ties to the lower index.
fn strongest(m: &DenseMatrix, l: usize, opts: &FriendOptions) -> Vec<(usize, f64)> {
    let value = |k: usize| match opts.direction {
        FriendDirection::Friends => m[(k, l)],
        FriendDirection::Followers => m[(l, k)],
    };
    let mut candidates: Vec<(usize, f64)> = (0..m.rows())
        .filter(|&k| k != l)
        .map(|k| (k, value(k)))
        .filter(|&(_, v)| v != 0.0)
        .collect();
    candidates.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    candidates.truncate(opts.n_friends);
    candidates
}
