//! C ABI over `latent_hops`: opaque handles, status codes, caller-owned buffers.
//!
//! Every function returns an [`LhStatus`]; on failure the message is kept per
//! thread and can be copied out with [`lh_last_error`]. Handles come out of
//! the sampling, graph and hop functions and go back through `lh_*_free`.
//! Output arrays are supplied by the caller along with their length.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use latent_hops::embed::classical_mds;
use latent_hops::geometry::{pairwise_distances, sample_uniform, Coords, Domain, PointConfig, Provenance};
use latent_hops::hopdist::{all_pairs_hops, check_simple_bound, scale_hops, HopMatrix};
use latent_hops::linkgraph::{generate_graph, knn_graph, symmetrize, Adjacency, LinkFunction, Symmetrization};
use latent_hops::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeMismatch = 3,
    Disconnected = 4,
    NoPositiveSpectrum = 5,
    Io = 6,
    Panic = 7,
}

/// Hop count reported for disconnected pairs.
pub const LH_INF_HOPS: u16 = 0xFFFF;
const _: () = assert!(LH_INF_HOPS == latent_hops::hopdist::INF_HOPS);

pub struct LhPoints(PointConfig);
pub struct LhGraph(Adjacency);
pub struct LhHops(HopMatrix);

/// Outcome of the indicator-link bound `0 ≤ d̂ − d ≤ 4(ε/r)d + r`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LhBoundSummary {
    pub connected_pairs: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// 1 when `ε ≤ r/4`, the condition under which the upper bound is promised.
    pub hypothesis_met: i32,
    pub max_residual: f64,
    pub max_relative_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> LhStatus {
    match e {
        Error::InvalidArgument(_) | Error::DegenerateDomain(_) | Error::Empty(_) | Error::UnknownPreset(_) => {
            LhStatus::InvalidArgument
        }
        Error::DimensionMismatch { .. } | Error::SizeMismatch { .. } => LhStatus::SizeMismatch,
        Error::Disconnected(_) => LhStatus::Disconnected,
        Error::NoPositiveSpectrum(_) => LhStatus::NoPositiveSpectrum,
        Error::Io(_) | Error::Csv(_) | Error::Parse { .. } | Error::Format { .. } => LhStatus::Io,
    }
}

fn guard<F: FnOnce() -> Result<(), LhStatus>>(f: F) -> LhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LhStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            LhStatus::Panic
        }
    }
}

fn fail(e: Error) -> LhStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> LhStatus {
    set_error(format!("{what} is null"));
    LhStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, LhStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, need: usize) -> Result<&'a mut [f64], LhStatus> {
    if p.is_null() {
        return Err(null("output buffer"));
    }
    if len < need {
        set_error(format!("output buffer holds {len} values, need {need}"));
        return Err(LhStatus::SizeMismatch);
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), LhStatus> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// Copies the calling thread's last error message (NUL-terminated, truncated
/// to `len`) and returns its full length in bytes, excluding the terminator.
#[no_mangle]
pub unsafe extern "C" fn lh_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Samples `n` points uniformly from `[0,width]×[0,height]`.
#[no_mangle]
pub unsafe extern "C" fn lh_points_sample_rectangle(
    width: f64,
    height: f64,
    n: usize,
    seed: u64,
    out: *mut *mut LhPoints,
) -> LhStatus {
    guard(|| {
        let dom = Domain::rectangle(width, height).map_err(fail)?;
        let cfg = sample_uniform(&dom, n, seed).map_err(fail)?;
        put(out, LhPoints(cfg))
    })
}

/// Wraps `n` row-major points of dimension 1 or 2; the domain is their
/// bounding box.
#[no_mangle]
pub unsafe extern "C" fn lh_points_from_coords(
    data: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut LhPoints,
) -> LhStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let vals = std::slice::from_raw_parts(data, n * dim).to_vec();
        let coords = Coords::new(n, dim, vals).map_err(fail)?;
        let col = |k: usize| coords.rows().map(move |p| p[k]);
        let lo = |k| col(k).fold(f64::INFINITY, f64::min);
        let hi = |k| col(k).fold(f64::NEG_INFINITY, f64::max);
        let dom = match dim {
            1 => Domain::interval_between(lo(0), hi(0)),
            2 => Domain::rect([lo(0), lo(1)], [hi(0), hi(1)]),
            _ => Err(Error::InvalidArgument(format!("dimension {dim} not supported"))),
        }
        .map_err(fail)?;
        let cfg = PointConfig::new(coords, dom, Provenance::Loaded("ffi".into())).map_err(fail)?;
        put(out, LhPoints(cfg))
    })
}

#[no_mangle]
pub unsafe extern "C" fn lh_points_len(p: *const LhPoints) -> usize {
    p.as_ref().map_or(0, |p| p.0.n())
}

#[no_mangle]
pub unsafe extern "C" fn lh_points_dim(p: *const LhPoints) -> usize {
    p.as_ref().map_or(0, |p| p.0.dim())
}

/// Copies the coordinates row-major into `out` (`len ≥ n·dim`).
#[no_mangle]
pub unsafe extern "C" fn lh_points_copy(p: *const LhPoints, out: *mut f64, len: usize) -> LhStatus {
    guard(|| {
        let p = deref(p, "points")?;
        let src = p.0.coords.as_slice();
        out_slice(out, len, src.len())?.copy_from_slice(src);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lh_points_free(p: *mut LhPoints) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Random geometric graph with the indicator link `1{d ≤ r}`.
#[no_mangle]
pub unsafe extern "C" fn lh_graph_indicator(p: *const LhPoints, r: f64, seed: u64, out: *mut *mut LhGraph) -> LhStatus {
    guard(|| {
        let p = deref(p, "points")?;
        let link = LinkFunction::indicator(r).map_err(fail)?;
        put(out, LhGraph(generate_graph(&p.0, &link, seed)))
    })
}

/// Symmetrized `kappa`-nearest-neighbour graph; `mutual != 0` keeps only
/// reciprocated edges, otherwise either direction suffices.
#[no_mangle]
pub unsafe extern "C" fn lh_graph_knn(p: *const LhPoints, kappa: usize, mutual: i32, out: *mut *mut LhGraph) -> LhStatus {
    guard(|| {
        let p = deref(p, "points")?;
        let knn = knn_graph(&p.0, kappa).map_err(fail)?;
        let mode = if mutual != 0 { Symmetrization::Mutual } else { Symmetrization::Union };
        put(out, LhGraph(symmetrize(&knn, mode)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn lh_graph_edge_count(g: *const LhGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// 1 if connected, 0 if not or if `g` is null.
#[no_mangle]
pub unsafe extern "C" fn lh_graph_is_connected(g: *const LhGraph) -> i32 {
    g.as_ref().map_or(0, |g| i32::from(g.0.is_connected()))
}

#[no_mangle]
pub unsafe extern "C" fn lh_graph_free(g: *mut LhGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

#[no_mangle]
pub unsafe extern "C" fn lh_hops_compute(g: *const LhGraph, out: *mut *mut LhHops) -> LhStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        put(out, LhHops(all_pairs_hops(&g.0).map_err(fail)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn lh_hops_len(h: *const LhHops) -> usize {
    h.as_ref().map_or(0, |h| h.0.n())
}

/// Hop count between `i` and `j`; `LH_INF_HOPS` when disconnected or out of range.
#[no_mangle]
pub unsafe extern "C" fn lh_hops_get(h: *const LhHops, i: usize, j: usize) -> u16 {
    match h.as_ref() {
        Some(h) if i < h.0.n() && j < h.0.n() => h.0.get(i, j),
        _ => LH_INF_HOPS,
    }
}

/// Writes the `n×n` estimates `r·hops` row-major; disconnected pairs are `+inf`.
#[no_mangle]
pub unsafe extern "C" fn lh_hops_estimates(h: *const LhHops, r: f64, out: *mut f64, len: usize) -> LhStatus {
    guard(|| {
        let h = deref(h, "hops")?;
        let est = scale_hops(&h.0, r).map_err(fail)?;
        let n = est.n();
        out_slice(out, len, n * n)?.copy_from_slice(&est.to_dense());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lh_hops_free(h: *mut LhHops) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Classical scaling of `r·hops` into `dim` dimensions; writes `n·dim`
/// row-major coordinates. Fails with `Disconnected` if any pair is unreachable.
#[no_mangle]
pub unsafe extern "C" fn lh_classical_mds(h: *const LhHops, r: f64, dim: usize, out: *mut f64, len: usize) -> LhStatus {
    guard(|| {
        let h = deref(h, "hops")?;
        if !h.0.is_connected() {
            return Err(fail(Error::Disconnected("cannot embed infinite estimates".into())));
        }
        let est = scale_hops(&h.0, r).map_err(fail)?;
        let emb = classical_mds(&est, dim).map_err(fail)?;
        let src = emb.coords.as_slice();
        out_slice(out, len, src.len())?.copy_from_slice(src);
        Ok(())
    })
}

/// Checks `r·hops` against the points' true distances with coverage radius `eps`.
#[no_mangle]
pub unsafe extern "C" fn lh_check_simple_bound(
    p: *const LhPoints,
    h: *const LhHops,
    eps: f64,
    r: f64,
    out: *mut LhBoundSummary,
) -> LhStatus {
    guard(|| {
        let p = deref(p, "points")?;
        let h = deref(h, "hops")?;
        if out.is_null() {
            return Err(null("summary"));
        }
        let est = scale_hops(&h.0, r).map_err(fail)?;
        let rep = check_simple_bound(&est, &pairwise_distances(&p.0), eps, r).map_err(fail)?;
        *out = LhBoundSummary {
            connected_pairs: rep.connected_pairs,
            lower_violations: rep.lower_violations,
            upper_violations: rep.upper_violations,
            hypothesis_met: i32::from(rep.hypothesis_met),
            max_residual: rep.max_residual,
            max_relative_error: rep.max_relative_error,
        };
        Ok(())
    })
}
