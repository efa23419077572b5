//! C ABI over `ust_graphon`.
//!
//! Objects cross the boundary as opaque handles created by `ug_*_new`-style
//! constructors and released with the matching `ug_*_free`. Every fallible
//! call returns a status code (`UG_OK` or an error class) and writes its result
//! through an out-pointer; the message of the last failure on the calling
//! thread is available from `ug_last_error_message`.
//!
//! Strings returned to the caller are owned by the caller and must be released
//! with `ug_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ust_graphon::electric::{effective_resistance, log_spanning_tree_count};
use ust_graphon::error::ErrorClass;
use ust_graphon::extremal::{degree_density_bound, optimize_lemma_max};
use ust_graphon::freq::freq_graphon;
use ust_graphon::graphon::sample_w_random_graph;
use ust_graphon::ust::wilson_sample;
use ust_graphon::{decompose, Error, MultiGraph, RootedTree, SpanningTree, StepGraphon};

/// Success.
pub const UG_OK: i32 = 0;
/// A required pointer was null or a string was not valid UTF-8.
pub const UG_ERR_NULL: i32 = 1;
/// Malformed input or invalid parameter.
pub const UG_ERR_CONFIG: i32 = 2;
/// A mathematical precondition failed (for example a disconnected graph).
pub const UG_ERR_PRECONDITION: i32 = 3;
/// Numerical failure.
pub const UG_ERR_NUMERIC: i32 = 4;
/// A size or work budget was exceeded.
pub const UG_ERR_BUDGET: i32 = 5;
/// The library panicked; this is a bug.
pub const UG_ERR_PANIC: i32 = 6;
/// An output buffer was too small; the required length was written.
pub const UG_ERR_BUFFER: i32 = 7;

/// Multigraph handle.
pub struct UgGraph(MultiGraph);
/// Step graphon handle.
pub struct UgGraphon(StepGraphon);
/// Rooted tree (pattern) handle.
pub struct UgTree(RootedTree);
/// Spanning tree handle.
pub struct UgSpanningTree(SpanningTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> i32 {
    match e.class() {
        ErrorClass::Config => UG_ERR_CONFIG,
        ErrorClass::Precondition => UG_ERR_PRECONDITION,
        ErrorClass::Numeric => UG_ERR_NUMERIC,
        ErrorClass::Budget => UG_ERR_BUDGET,
    }
}

enum Failure {
    Null(&'static str),
    Buffer(usize),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            UG_OK
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is null or invalid"));
            UG_ERR_NULL
        }
        Ok(Err(Failure::Buffer(need))) => {
            set_last_error(format!("buffer too small, {need} entries needed"));
            UG_ERR_BUFFER
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(format!("{}: {e}", e.kind()));
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            UG_ERR_PANIC
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ug_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ug_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ug_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an edge list (`n m` header, then `u v` lines).
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string and `out_graph` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_graph_from_edge_list(text_ptr: *const c_char, out_graph: *mut *mut UgGraph) -> i32 {
    guard(|| {
        let g = MultiGraph::parse_edge_list(text(text_ptr, "text")?)?;
        *out(out_graph, "out_graph")? = boxed(UgGraph(g));
        Ok(())
    })
}

/// Builds a graph on `n` vertices from `len` pairs `(us[i], vs[i])`; repeated pairs add multiplicity.
///
/// # Safety
/// `us` and `vs` must point to `len` elements each; `out_graph` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ug_graph_from_pairs(n: usize, us: *const usize, vs: *const usize, len: usize, out_graph: *mut *mut UgGraph) -> i32 {
    guard(|| {
        let us = slice(us, len, "us")?;
        let vs = slice(vs, len, "vs")?;
        let pairs: Vec<(usize, usize)> = us.iter().copied().zip(vs.iter().copied()).collect();
        *out(out_graph, "out_graph")? = boxed(UgGraph(MultiGraph::from_pairs(n, &pairs)?));
        Ok(())
    })
}

/// Complete graph `K_n`.
///
/// # Safety
/// `out_graph` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_graph_complete(n: usize, out_graph: *mut *mut UgGraph) -> i32 {
    guard(|| {
        *out(out_graph, "out_graph")? = boxed(UgGraph(MultiGraph::complete(n)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ug_graph_free(g: *mut UgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ug_graph_vertex_count(g: *const UgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Number of edges counted with multiplicity, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn ug_graph_edge_count(g: *const UgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Degree of `v`.
///
/// # Safety
/// `g` must be a valid handle and `out_degree` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_graph_degree(g: *const UgGraph, v: usize, out_degree: *mut usize) -> i32 {
    guard(|| {
        let g = &borrow(g, "graph")?.0;
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() }.into());
        }
        *out(out_degree, "out_degree")? = g.degree(v);
        Ok(())
    })
}

/// `R_eff(u ↔ v)`; infinity when `u` and `v` are in different components.
///
/// # Safety
/// `g` must be a valid handle and `out_value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_effective_resistance(g: *const UgGraph, u: usize, v: usize, out_value: *mut f64) -> i32 {
    guard(|| {
        let r = effective_resistance(&borrow(g, "graph")?.0, u, v)?;
        *out(out_value, "out_value")? = r;
        Ok(())
    })
}

/// Natural log of the number of spanning trees.
///
/// # Safety
/// `g` must be a valid handle and `out_value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_log_spanning_tree_count(g: *const UgGraph, out_value: *mut f64) -> i32 {
    guard(|| {
        let v = log_spanning_tree_count(&borrow(g, "graph")?.0)?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Expander decomposition with its verification report, as JSON.
///
/// # Safety
/// `g` must be a valid handle and `out_json` a valid pointer; free the string with `ug_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ug_expander_decompose_json(g: *const UgGraph, gamma: f64, eta: f64, eps: f64, out_json: *mut *mut c_char) -> i32 {
    guard(|| {
        let dec = decompose::expander_decompose(&borrow(g, "graph")?.0, gamma, eta, eps)?;
        *out(out_json, "out_json")? = owned_string(dec.to_json());
        Ok(())
    })
}

/// Step graphon from block measures `mu[k]` and a row-major kernel `w[k*k]`.
///
/// # Safety
/// `mu` must point to `k` and `w` to `k*k` doubles; `out_graphon` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ug_graphon_new(k: usize, mu: *const f64, w: *const f64, out_graphon: *mut *mut UgGraphon) -> i32 {
    guard(|| {
        let mu = slice(mu, k, "mu")?.to_vec();
        let flat = slice(w, k.checked_mul(k).ok_or(Failure::Null("k"))?, "w")?;
        let rows = flat.chunks(k.max(1)).map(<[f64]>::to_vec).collect();
        *out(out_graphon, "out_graphon")? = boxed(UgGraphon(StepGraphon::new(mu, rows)?));
        Ok(())
    })
}

/// Step graphon from JSON `{"mu": [...], "W": [[...]]}`.
///
/// # Safety
/// `json` must be NUL-terminated and `out_graphon` valid.
#[no_mangle]
pub unsafe extern "C" fn ug_graphon_from_json(json: *const c_char, out_graphon: *mut *mut UgGraphon) -> i32 {
    guard(|| {
        let w = StepGraphon::from_json(text(json, "json")?)?;
        *out(out_graphon, "out_graphon")? = boxed(UgGraphon(w));
        Ok(())
    })
}

/// # Safety
/// `w` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ug_graphon_free(w: *mut UgGraphon) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// W-random graph on `n` vertices. The same seed gives the same graph.
///
/// # Safety
/// `w` must be a valid handle and `out_graph` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_sample_w_random_graph(w: *const UgGraphon, n: usize, seed: u64, out_graph: *mut *mut UgGraph) -> i32 {
    guard(|| {
        let (g, _) = sample_w_random_graph(&borrow(w, "graphon")?.0, n, seed)?;
        *out(out_graph, "out_graph")? = boxed(UgGraph(g));
        Ok(())
    })
}

/// Rooted tree from a parent array (`-1` marks the root).
///
/// # Safety
/// `parents` must point to `len` elements and `out_tree` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ug_tree_from_parents(parents: *const i64, len: usize, out_tree: *mut *mut UgTree) -> i32 {
    guard(|| {
        let t = RootedTree::from_parent_array(slice(parents, len, "parents")?)?;
        *out(out_tree, "out_tree")? = boxed(UgTree(t));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ug_tree_free(t: *mut UgTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Canonical code of the rooted tree; equal codes mean root-isomorphic trees.
///
/// # Safety
/// `t` must be a valid handle and `out_code` valid; free the string with `ug_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ug_tree_canonical_code(t: *const UgTree, out_code: *mut *mut c_char) -> i32 {
    guard(|| {
        let code = borrow(t, "tree")?.0.canonical_code();
        *out(out_code, "out_code")? = owned_string(code);
        Ok(())
    })
}

/// `Freq(T; W)`: probability that the root ball of the limiting branching process is `T`.
///
/// # Safety
/// Handles and `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ug_freq_graphon(t: *const UgTree, w: *const UgGraphon, out_value: *mut f64) -> i32 {
    guard(|| {
        let r = freq_graphon(&borrow(t, "tree")?.0, &borrow(w, "graphon")?.0)?;
        *out(out_value, "out_value")? = r.value;
        Ok(())
    })
}

/// Uniform spanning tree by Wilson's algorithm. The same seed gives the same tree.
///
/// # Safety
/// `g` must be a valid handle and `out_tree` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_ust_sample(g: *const UgGraph, seed: u64, out_tree: *mut *mut UgSpanningTree) -> i32 {
    guard(|| {
        let t = wilson_sample(&borrow(g, "graph")?.0, seed)?;
        *out(out_tree, "out_tree")? = boxed(UgSpanningTree(t));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn ug_spanning_tree_free(t: *mut UgSpanningTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Degree of `v` in the spanning tree.
///
/// # Safety
/// `t` must be a valid handle and `out_degree` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ug_spanning_tree_degree(t: *const UgSpanningTree, v: usize, out_degree: *mut usize) -> i32 {
    guard(|| {
        let t = &borrow(t, "tree")?.0;
        if v >= t.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: t.n() }.into());
        }
        *out(out_degree, "out_degree")? = t.degree(v);
        Ok(())
    })
}

/// Copies the `n − 1` tree edges into `us`/`vs` (capacity `cap` each) and
/// writes the edge count to `out_len`. Returns `UG_ERR_BUFFER` when `cap` is too small.
///
/// # Safety
/// `us` and `vs` must have room for `cap` elements; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ug_spanning_tree_edges(t: *const UgSpanningTree, us: *mut usize, vs: *mut usize, cap: usize, out_len: *mut usize) -> i32 {
    guard(|| {
        let edges = borrow(t, "tree")?.0.edges();
        *out(out_len, "out_len")? = edges.len();
        if cap < edges.len() {
            return Err(Failure::Buffer(edges.len()));
        }
        if us.is_null() || vs.is_null() {
            return Err(Failure::Null("us/vs"));
        }
        for (i, e) in edges.iter().enumerate() {
            let (a, b) = e.pair();
            *us.add(i) = a;
            *vs.add(i) = b;
        }
        Ok(())
    })
}

/// Extremal degree-density bound for degree `k`; `out_upper` is 1 for an upper bound.
///
/// # Safety
/// Out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ug_degree_density_bound(k: usize, out_value: *mut f64, out_upper: *mut i32) -> i32 {
    guard(|| {
        let b = degree_density_bound(k)?;
        *out(out_value, "out_value")? = b.value;
        *out(out_upper, "out_upper")? = i32::from(b.direction == ust_graphon::extremal::Direction::Upper);
        Ok(())
    })
}

/// Maximum of `λ e^{−y} y^k` over `λ ∈ [0,1]`, `λ y ≤ 1`, cross-checked to `tol`.
///
/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ug_optimize_lemma_max(k: usize, tol: f64, out_value: *mut f64) -> i32 {
    guard(|| {
        let v = optimize_lemma_max(k, tol)?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}
