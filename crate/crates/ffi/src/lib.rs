//! C interface to `lirgomax`.
//!
//! Graphs live behind the opaque [`LrgGraph`] handle. Every fallible call
//! returns an [`LrgStatus`]; on failure [`lrg_last_error`] gives a message for
//! the calling thread. Results are written into caller-owned buffers whose
//! lengths are passed alongside and checked.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use lirgomax::gmatrix::{pagerank, Direction, GoogleOperator, IterOptions};
use lirgomax::reduced::{compute_reduced, ReducedOptions, SubsetSpec};
use lirgomax::response::{self, PumpSpec, ResponseOptions, SensitivitySpec};
use lirgomax::{graph, DenseMatrix, DirectedGraph, Error, LoadOptions};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrgStatus {
    Ok = 0,
    /// Null pointer, bad length, out-of-range node or parameter.
    InvalidArgument = 1,
    Io = 2,
    Parse = 3,
    /// An iteration hit its limit, or a finite-strength normalization failed.
    NotConverged = 4,
    /// The problem is too large for a dense step.
    GuardExceeded = 5,
    Singular = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

impl From<&Error> for LrgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => LrgStatus::Parse,
            Error::Io(_) => LrgStatus::Io,
            Error::NotConverged { .. } | Error::NonPositiveNormalization { .. } => {
                LrgStatus::NotConverged
            }
            Error::GuardExceeded { .. } => LrgStatus::GuardExceeded,
            Error::Singular { .. } => LrgStatus::Singular,
            _ => LrgStatus::InvalidArgument,
        }
    }
}

/// Solver settings shared by all computations.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrgOptions {
    /// Damping factor in (0, 1].
    pub alpha: f64,
    /// L1 stopping tolerance between successive iterates.
    pub tol: f64,
    pub max_iter: usize,
    /// Serial reductions, bit-identical across runs.
    pub deterministic: bool,
}

impl Default for LrgOptions {
    fn default() -> Self {
        LrgOptions {
            alpha: lirgomax::gmatrix::DEFAULT_ALPHA,
            tol: lirgomax::gmatrix::DEFAULT_TOL,
            max_iter: lirgomax::gmatrix::DEFAULT_MAX_ITER,
            deterministic: true,
        }
    }
}

/// Opaque graph handle.
pub struct LrgGraph {
    inner: DirectedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LrgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(LrgStatus::from(&e), e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(LrgStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LrgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LrgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            LrgStatus::Panic
        }
    }
}

unsafe fn graph_ref<'a>(g: *const LrgGraph) -> Result<&'a DirectedGraph, Failure> {
    g.as_ref()
        .map(|g| &g.inner)
        .ok_or_else(|| invalid("graph handle is null"))
}

unsafe fn options(opts: *const LrgOptions) -> Result<(LrgOptions, IterOptions), Failure> {
    let o = if opts.is_null() {
        LrgOptions::default()
    } else {
        *opts
    };
    let iter = IterOptions::new(o.tol, o.max_iter)?;
    Ok((o, iter))
}

unsafe fn out_slice<'a>(
    buf: *mut f64,
    len: usize,
    need: usize,
    what: &str,
) -> Result<&'a mut [f64], Failure> {
    if buf.is_null() {
        return Err(invalid(format!("{what} buffer is null")));
    }
    if len < need {
        return Err(invalid(format!(
            "{what} buffer holds {len} values, {need} needed"
        )));
    }
    Ok(slice::from_raw_parts_mut(buf, need))
}

unsafe fn in_slice<'a, T>(buf: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if buf.is_null() {
        return Err(invalid(format!("{what} array is null")));
    }
    Ok(slice::from_raw_parts(buf, len))
}

fn operator<'g>(
    g: &'g DirectedGraph,
    o: &LrgOptions,
    direction: Direction,
) -> Result<GoogleOperator<'g>, Failure> {
    Ok(GoogleOperator::new(g, o.alpha, direction)?.with_deterministic(o.deterministic))
}

fn load_options(drop_self_loops: bool) -> LoadOptions {
    LoadOptions { drop_self_loops }
}

/// Default solver settings: alpha 0.85, tol 1e-12, 1000 iterations,
/// deterministic.
#[no_mangle]
pub extern "C" fn lrg_options_default() -> LrgOptions {
    LrgOptions::default()
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lrg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static string.
#[no_mangle]
pub extern "C" fn lrg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads an edge list file. On success `*out` owns a new graph that must be
/// released with [`lrg_graph_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lrg_graph_load(
    path: *const c_char,
    drop_self_loops: bool,
    out: *mut *mut LrgGraph,
) -> LrgStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return Err(invalid("null argument"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not valid UTF-8"))?;
        let file = File::open(path).map_err(Error::from)?;
        let g = graph::load_edge_list(BufReader::new(file), load_options(drop_self_loops))?;
        *out = Box::into_raw(Box::new(LrgGraph { inner: g }));
        Ok(())
    })
}

/// Builds a graph from parallel `sources` / `targets` arrays.
///
/// # Safety
/// Both arrays must hold `n_edges` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lrg_graph_from_edges(
    n_nodes: usize,
    sources: *const u32,
    targets: *const u32,
    n_edges: usize,
    drop_self_loops: bool,
    out: *mut *mut LrgGraph,
) -> LrgStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let s = in_slice(sources, n_edges, "sources")?;
        let t = in_slice(targets, n_edges, "targets")?;
        let edges = s.iter().copied().zip(t.iter().copied()).collect();
        let g = DirectedGraph::from_edges(n_nodes, edges, load_options(drop_self_loops))?;
        *out = Box::into_raw(Box::new(LrgGraph { inner: g }));
        Ok(())
    })
}

/// Releases a graph. Null is accepted.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lrg_graph_free(g: *mut LrgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lrg_graph_n_nodes(g: *const LrgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n_nodes())
}

/// Edge count after deduplication, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lrg_graph_n_edges(g: *const LrgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n_edges())
}

/// PageRank (or CheiRank when `transposed`) into `out[0..n]`.
/// `opts` may be null for defaults; `iterations` may be null.
///
/// # Safety
/// `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrg_pagerank(
    g: *const LrgGraph,
    opts: *const LrgOptions,
    transposed: bool,
    out: *mut f64,
    out_len: usize,
    iterations: *mut usize,
) -> LrgStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let (o, iter) = options(opts)?;
        let dest = out_slice(out, out_len, g.n_nodes(), "output")?;
        let direction = if transposed {
            Direction::Transposed
        } else {
            Direction::Forward
        };
        let r = pagerank(&operator(g, &o, direction)?, &iter)?;
        dest.copy_from_slice(r.value.values());
        if !iterations.is_null() {
            *iterations = r.iterations;
        }
        Ok(())
    })
}

/// Linear response `P1` to injection at `inject` and absorption at `absorb`
/// (balanced pair), into `p1[0..n]`.
///
/// # Safety
/// `p1` must hold `p1_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrg_linres_pump(
    g: *const LrgGraph,
    opts: *const LrgOptions,
    inject: usize,
    absorb: usize,
    p1: *mut f64,
    p1_len: usize,
) -> LrgStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let (o, iter) = options(opts)?;
        let dest = out_slice(p1, p1_len, g.n_nodes(), "p1")?;
        let op = operator(g, &o, Direction::Forward)?;
        let p0 = pagerank(&op, &iter)?.value;
        let v0 = if inject == absorb {
            response::pump_pair_v0(&op, &p0, inject, absorb)?
        } else {
            let pump = PumpSpec::balanced_pair(&p0, inject, absorb)?;
            response::pump_general_v0(&op, &p0, &pump)?
        };
        let ropts = ResponseOptions {
            iter,
            ..Default::default()
        };
        let r = response::solve_linear_response(&op, &p0, &v0, &ropts)?;
        dest.copy_from_slice(r.value.values());
        Ok(())
    })
}

/// Response `P1` to amplifying the transition `source -> target`, and the
/// relative sensitivities `P1 / P0`. `sensitivity` may be null.
///
/// # Safety
/// `p1` and a non-null `sensitivity` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lrg_linres_sensitivity(
    g: *const LrgGraph,
    opts: *const LrgOptions,
    target: usize,
    source: usize,
    p1: *mut f64,
    sensitivity: *mut f64,
    len: usize,
) -> LrgStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let (o, iter) = options(opts)?;
        let n = g.n_nodes();
        let dest = out_slice(p1, len, n, "p1")?;
        let sens_dest = if sensitivity.is_null() {
            None
        } else {
            Some(out_slice(sensitivity, len, n, "sensitivity")?)
        };
        let op = operator(g, &o, Direction::Forward)?;
        let p0 = pagerank(&op, &iter)?.value;
        let v0 = response::sensitivity_v0(&op, &p0, SensitivitySpec { target, source })?;
        let ropts = ResponseOptions {
            iter,
            ..Default::default()
        };
        let r = response::solve_linear_response(&op, &p0, &v0, &ropts)?.value;
        if let Some(s) = sens_dest {
            s.copy_from_slice(&response::sensitivity_values(&r, &p0)?);
        }
        dest.copy_from_slice(r.values());
        Ok(())
    })
}

/// Reduced Google matrix of `subset[0..n_r]` and its components, each
/// written row-major into an `n_r * n_r` buffer (`matrix_len` values each).
/// `gr` is required; `grr`, `gpr`, `gqr` and `lambda_c` may be null.
/// `lambda_c` receives the leading eigenvalue of the complement block, or
/// NaN when the subset is the whole graph.
///
/// # Safety
/// `subset` must hold `n_r` ids; every non-null matrix buffer must hold
/// `matrix_len` doubles.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn lrg_regomax(
    g: *const LrgGraph,
    opts: *const LrgOptions,
    subset: *const usize,
    n_r: usize,
    gr: *mut f64,
    grr: *mut f64,
    gpr: *mut f64,
    gqr: *mut f64,
    matrix_len: usize,
    lambda_c: *mut f64,
) -> LrgStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let (o, iter) = options(opts)?;
        let nodes = in_slice(subset, n_r, "subset")?.to_vec();
        let need = n_r * n_r;
        let gr_dest = out_slice(gr, matrix_len, need, "gr")?;
        let mut optional = Vec::new();
        for (buf, m) in [(grr, "grr"), (gpr, "gpr"), (gqr, "gqr")] {
            optional.push(if buf.is_null() {
                None
            } else {
                Some(out_slice(buf, matrix_len, need, m)?)
            });
        }
        let spec = SubsetSpec::new(nodes, g.n_nodes())?;
        let op = operator(g, &o, Direction::Forward)?;
        let r = compute_reduced(
            &op,
            &spec,
            &ReducedOptions {
                iter,
                ..Default::default()
            },
        )?;
        gr_dest.copy_from_slice(r.gr.as_slice());
        let parts: [&DenseMatrix; 3] = [&r.grr, &r.gpr, &r.gqr];
        for (dest, m) in optional.into_iter().zip(parts) {
            if let Some(d) = dest {
                d.copy_from_slice(m.as_slice());
            }
        }
        if !lambda_c.is_null() {
            *lambda_c = r.lambda_c.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}
