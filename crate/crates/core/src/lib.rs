//! PageRank linear response and reduced Google matrix analysis.
//!
//! The crate computes, for a directed network:
//!
//! * PageRank and CheiRank with a matrix-free Google operator ([`gmatrix`]);
//! * the first-order response `P1` of PageRank to a weak perturbation, for
//!   the pump (injection/absorption) model and for single-element
//!   sensitivity ([`response`]);
//! * the reduced Google matrix of a node subset with its split into direct,
//!   rank-one, and indirect-pathway components ([`reduced`]);
//! * friend/follower networks and plot-ready exports ([`friends`],
//!   [`export`]).
//!
//! [`oracle`] holds dense brute-force versions of the same quantities for
//! small graphs.
//!
//! ```
//! use lirgomax::{graph, gmatrix, response};
//!
//! let g = graph::load_edge_list("0 1\n1 2\n2 0".as_bytes(), Default::default()).unwrap();
//! let op = gmatrix::GoogleOperator::forward(&g, 0.85).unwrap();
//! let p0 = gmatrix::pagerank(&op, &Default::default()).unwrap().value;
//! let v0 = response::pump_pair_v0(&op, &p0, 0, 1).unwrap();
//! let p1 = response::solve_linear_response(&op, &p0, &v0, &Default::default()).unwrap();
//! assert!((p1.value.values()[1] - 0.611273).abs() < 1e-6);
//! ```

pub mod cli;
pub mod dense;
pub mod error;
pub mod export;
pub mod friends;
pub mod gmatrix;
pub mod graph;
pub mod oracle;
pub mod reduced;
pub mod response;
pub mod vecops;
pub mod verify;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use gmatrix::{Converged, Direction, GoogleOperator, IterOptions, RankIndex, RankVector};
pub use graph::{DirectedGraph, LabelMap, LoadOptions};
pub use reduced::{ReducedMatrices, ReducedOptions, SubsetSpec};
pub use response::{PathwaySubset, PumpSpec, ResponseKind, ResponseVector, SensitivitySpec};
