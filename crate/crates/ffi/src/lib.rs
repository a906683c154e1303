//! C ABI for the backbone library.
//!
//! Handles are opaque pointers created and freed by this library; every
//! fallible call returns a [`BbStatus`] and writes its result through an out
//! pointer. After a non-OK status, [`bb_last_error_message`] returns a
//! human-readable description, valid on the calling thread until the next
//! failing call. Freeing a null handle is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use backbone::io;
use backbone::{
    backbone_correlation, backbone_extract, density, fdsm, hyperg, modularity, sdsm, universal,
    Backbone, BipartiteGraph, Error, FdsmConfig, Fwer, NullModelResult, Partition,
    ProbabilityMethod, ThresholdSpec,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArg = 1,
    /// Arguments failed validation (bad dimensions, labels, parameters).
    InvalidInput = 2,
    /// Reading or writing a file failed.
    Io = 3,
    /// An iterative solver did not reach its tolerance.
    NoConvergence = 4,
    /// A label does not occur in the graph or backbone.
    UnknownLabel = 5,
    /// A string argument was not valid UTF-8.
    Utf8 = 6,
    /// An internal invariant failed; the operation was aborted safely.
    Panic = 7,
}

/// SDSM probability matrix construction.
#[repr(C)]
pub enum BbMethod {
    Ratio = 0,
    Polytope = 1,
}

/// Familywise error rate correction.
#[repr(C)]
pub enum BbFwer {
    None = 0,
    Bonferroni = 1,
    Holm = 2,
}

/// Backbone serialization format.
#[repr(C)]
pub enum BbFormat {
    MatrixCsv = 0,
    SignedEdgelist = 1,
    Dot = 2,
}

/// A labeled binary bipartite graph (agents x artifacts).
pub struct BbGraph {
    inner: BipartiteGraph,
}

/// Per-edge tail probabilities produced by a null model.
pub struct BbResult {
    inner: NullModelResult,
}

/// An extracted backbone with signed or binary entries.
pub struct BbBackbone {
    inner: Backbone,
    labels: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl std::fmt::Display) {
    let message = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|cell| {
        *cell.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

fn fail(e: Error) -> BbStatus {
    let status = match &e {
        Error::InvalidInput(_) | Error::LabelMismatch(_) | Error::Parse { .. } => {
            BbStatus::InvalidInput
        }
        Error::UnknownLabel(_) => BbStatus::UnknownLabel,
        Error::NoConvergence { .. } => BbStatus::NoConvergence,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => BbStatus::Io,
    };
    set_error(e);
    status
}

fn null_arg(name: &str) -> BbStatus {
    set_error(format!("argument {name} must not be null"));
    BbStatus::NullArg
}

fn guarded(f: impl FnOnce() -> BbStatus) -> BbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            BbStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn utf8_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, BbStatus> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("argument {name} is not valid UTF-8"));
        BbStatus::Utf8
    })
}

unsafe fn emit<T>(out: *mut *mut T, name: &str, value: T) -> BbStatus {
    if out.is_null() {
        return null_arg(name);
    }
    *out = Box::into_raw(Box::new(value));
    BbStatus::Ok
}

fn backbone_handle(inner: Backbone) -> BbBackbone {
    let labels = inner
        .row_labels()
        .iter()
        .map(|l| CString::new(l.as_str()).unwrap_or_default())
        .collect();
    BbBackbone { inner, labels }
}

/// Message for the most recent failure on this thread. Never null; empty
/// before any failure. The pointer is invalidated by the next failing call.
#[no_mangle]
pub extern "C" fn bb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|cell| cell.borrow().as_ptr())
}

/// Read a biadjacency matrix CSV (column labels in the first row, row
/// labels in the first column, cells 0/1).
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_read_csv(
    path: *const c_char,
    out: *mut *mut BbGraph,
) -> BbStatus {
    guarded(|| {
        let path = match utf8_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match io::read_biadjacency_csv(path) {
            Ok(inner) => emit(out, "out", BbGraph { inner }),
            Err(e) => fail(e),
        }
    })
}

/// Read a two-column agent,artifact edgelist CSV.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_read_edgelist(
    path: *const c_char,
    out: *mut *mut BbGraph,
) -> BbStatus {
    guarded(|| {
        let path = match utf8_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match io::read_edgelist(path) {
            Ok(inner) => emit(out, "out", BbGraph { inner }),
            Err(e) => fail(e),
        }
    })
}

/// Build a graph from a row-major `rows * cols` array of 0/1 entries.
/// Label arrays may be null, in which case labels r0..r{rows-1} and
/// c0..c{cols-1} are generated.
///
/// # Safety
/// `entries` must point to `rows * cols` bytes; non-null label arrays must
/// hold `rows` (respectively `cols`) valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_new(
    rows: usize,
    cols: usize,
    entries: *const u8,
    row_labels: *const *const c_char,
    col_labels: *const *const c_char,
    out: *mut *mut BbGraph,
) -> BbStatus {
    guarded(|| {
        if entries.is_null() {
            return null_arg("entries");
        }
        let collect_labels = |ptr: *const *const c_char, prefix: &str, count: usize| {
            if ptr.is_null() {
                Ok((0..count).map(|i| format!("{prefix}{i}")).collect())
            } else {
                let mut labels = Vec::with_capacity(count);
                for i in 0..count {
                    labels.push(utf8_arg(*ptr.add(i), "label")?.to_string());
                }
                Ok::<Vec<String>, BbStatus>(labels)
            }
        };
        let row_labels = match collect_labels(row_labels, "r", rows) {
            Ok(l) => l,
            Err(s) => return s,
        };
        let col_labels = match collect_labels(col_labels, "c", cols) {
            Ok(l) => l,
            Err(s) => return s,
        };
        let cells = std::slice::from_raw_parts(entries, rows.saturating_mul(cols));
        let row_vecs: Vec<Vec<u8>> = cells.chunks(cols.max(1)).map(|c| c.to_vec()).collect();
        match BipartiteGraph::from_rows(row_labels, col_labels, &row_vecs) {
            Ok(inner) => emit(out, "out", BbGraph { inner }),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `g` must be a pointer returned by a `bb_graph_*` constructor, or null.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_free(g: *mut BbGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of agents; 0 when `g` is null.
///
/// # Safety
/// `g` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_rows(g: *const BbGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.rows())
}

/// Number of artifacts; 0 when `g` is null.
///
/// # Safety
/// `g` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_cols(g: *const BbGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.cols())
}

/// Fill `buf` (length `len` >= rows*rows) with the row-major weighted
/// projection of `g`.
///
/// # Safety
/// `g` must be a valid handle; `buf` must point to `len` writable u32.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_project_into(
    g: *const BbGraph,
    buf: *mut u32,
    len: usize,
) -> BbStatus {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return null_arg("g");
        };
        if buf.is_null() {
            return null_arg("buf");
        }
        let m = g.inner.rows();
        if len < m * m {
            set_error(format!("buffer holds {len} cells, need {}", m * m));
            return BbStatus::InvalidInput;
        }
        let projection = g.inner.project();
        let out = std::slice::from_raw_parts_mut(buf, m * m);
        for i in 0..m {
            for j in 0..m {
                out[i * m + j] = projection.weight(i, j);
            }
        }
        BbStatus::Ok
    })
}

/// Hypergeometric null model.
///
/// # Safety
/// `g` must be a valid handle; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_hyperg(g: *const BbGraph, out: *mut *mut BbResult) -> BbStatus {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return null_arg("g");
        };
        match hyperg(&g.inner) {
            Ok(inner) => emit(out, "out", BbResult { inner }),
            Err(e) => fail(e),
        }
    })
}

/// Stochastic degree sequence model.
///
/// # Safety
/// `g` must be a valid handle; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_sdsm(
    g: *const BbGraph,
    method: BbMethod,
    out: *mut *mut BbResult,
) -> BbStatus {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return null_arg("g");
        };
        let method = match method {
            BbMethod::Ratio => ProbabilityMethod::Ratio,
            BbMethod::Polytope => ProbabilityMethod::Polytope,
        };
        match sdsm(&g.inner, method) {
            Ok(inner) => emit(out, "out", BbResult { inner }),
            Err(e) => fail(e),
        }
    })
}

/// Fixed degree sequence model. `trades` is the number of curveball trades
/// between samples, 0 for the default of 5 * rows; `restart` restarts the
/// chain from the observed graph for every sample.
///
/// # Safety
/// `g` must be a valid handle; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_fdsm(
    g: *const BbGraph,
    trials: usize,
    seed: u64,
    trades: u64,
    restart: bool,
    out: *mut *mut BbResult,
) -> BbStatus {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return null_arg("g");
        };
        let config = FdsmConfig {
            trials,
            seed,
            trades_per_sample: (trades > 0).then_some(trades),
            dyad: None,
            restart,
        };
        match fdsm(&g.inner, &config) {
            Ok(r) => emit(out, "out", BbResult { inner: r.into_null_result() }),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `r` must be a pointer returned by a model call, or null.
#[no_mangle]
pub unsafe extern "C" fn bb_result_free(r: *mut BbResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of agents in the result; 0 when `r` is null.
///
/// # Safety
/// `r` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn bb_result_size(r: *const BbResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.size())
}

/// P(G*_ij >= G_ij) for the pair (i, j).
///
/// # Safety
/// `r` must be a valid handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn bb_result_positive(
    r: *const BbResult,
    i: usize,
    j: usize,
    out: *mut c_double,
) -> BbStatus {
    result_cell(r, i, j, out, true)
}

/// P(G*_ij <= G_ij) for the pair (i, j).
///
/// # Safety
/// `r` must be a valid handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn bb_result_negative(
    r: *const BbResult,
    i: usize,
    j: usize,
    out: *mut c_double,
) -> BbStatus {
    result_cell(r, i, j, out, false)
}

unsafe fn result_cell(
    r: *const BbResult,
    i: usize,
    j: usize,
    out: *mut c_double,
    positive: bool,
) -> BbStatus {
    guarded(|| {
        let Some(r) = r.as_ref() else {
            return null_arg("r");
        };
        if out.is_null() {
            return null_arg("out");
        }
        let n = r.inner.size();
        if i >= n || j >= n {
            set_error(format!("index ({i}, {j}) out of range for size {n}"));
            return BbStatus::InvalidInput;
        }
        let m = if positive { r.inner.positive() } else { r.inner.negative() };
        *out = m.get(i, j);
        BbStatus::Ok
    })
}

/// Persist a result as `<prefix>.positive.csv`, `<prefix>.negative.csv` and
/// `<prefix>.summary.json`.
///
/// # Safety
/// `r` must be a valid handle; `prefix` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bb_result_write(r: *const BbResult, prefix: *const c_char) -> BbStatus {
    guarded(|| {
        let Some(r) = r.as_ref() else {
            return null_arg("r");
        };
        let prefix = match utf8_arg(prefix, "prefix") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match io::write_null_result(&r.inner, prefix) {
            Ok(()) => BbStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Load a result persisted by `bb_result_write`.
///
/// # Safety
/// `prefix` must be a valid NUL-terminated string; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_result_read(
    prefix: *const c_char,
    out: *mut *mut BbResult,
) -> BbStatus {
    guarded(|| {
        let prefix = match utf8_arg(prefix, "prefix") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match io::read_null_result(prefix) {
            Ok(inner) => emit(out, "out", BbResult { inner }),
            Err(e) => fail(e),
        }
    })
}

/// Two-tailed backbone extraction at significance level `alpha`.
///
/// # Safety
/// `r` must be a valid handle; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_extract(
    r: *const BbResult,
    alpha: c_double,
    signed: bool,
    fwer: BbFwer,
    out: *mut *mut BbBackbone,
) -> BbStatus {
    guarded(|| {
        let Some(r) = r.as_ref() else {
            return null_arg("r");
        };
        let fwer = match fwer {
            BbFwer::None => Fwer::None,
            BbFwer::Bonferroni => Fwer::Bonferroni,
            BbFwer::Holm => Fwer::Holm,
        };
        match backbone_extract(&r.inner, alpha, signed, fwer) {
            Ok(b) => emit(out, "out", backbone_handle(b)),
            Err(e) => fail(e),
        }
    })
}

/// Universal-threshold backbone of the weighted projection of `g`. `upper`
/// is a number or an expression such as "mean+1sd" or "q0.9"; a non-null
/// `lower` makes the backbone signed.
///
/// # Safety
/// `g` must be a valid handle; `upper` a valid NUL-terminated string;
/// `lower` null or a valid NUL-terminated string; `out` a valid out pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_universal(
    g: *const BbGraph,
    upper: *const c_char,
    lower: *const c_char,
    out: *mut *mut BbBackbone,
) -> BbStatus {
    guarded(|| {
        let Some(g) = g.as_ref() else {
            return null_arg("g");
        };
        let upper = match utf8_arg(upper, "upper") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let upper: ThresholdSpec = match upper.parse() {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        let lower: Option<ThresholdSpec> = if lower.is_null() {
            None
        } else {
            match utf8_arg(lower, "lower") {
                Ok(s) => match s.parse() {
                    Ok(t) => Some(t),
                    Err(e) => return fail(e),
                },
                Err(s) => return s,
            }
        };
        match universal(&g.inner.project(), &upper, lower.as_ref()) {
            Ok(b) => emit(out, "out", backbone_handle(b)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `b` must be a pointer returned by an extraction call, or null.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_free(b: *mut BbBackbone) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Number of nodes; 0 when `b` is null.
///
/// # Safety
/// `b` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_size(b: *const BbBackbone) -> usize {
    b.as_ref().map_or(0, |b| b.inner.size())
}

/// Entry in {-1, 0, 1}; 0 when `b` is null or the indices are out of range.
///
/// # Safety
/// `b` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_entry(b: *const BbBackbone, i: usize, j: usize) -> i8 {
    match b.as_ref() {
        Some(b) if i < b.inner.size() && j < b.inner.size() => b.inner.entry(i, j),
        _ => 0,
    }
}

/// Node label; null when `b` is null or `i` is out of range. The pointer
/// stays valid until the handle is freed.
///
/// # Safety
/// `b` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_label(b: *const BbBackbone, i: usize) -> *const c_char {
    match b.as_ref() {
        Some(b) if i < b.labels.len() => b.labels[i].as_ptr(),
        _ => std::ptr::null(),
    }
}

/// Count of positive edges.
///
/// # Safety
/// `b` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_positive_edges(b: *const BbBackbone) -> usize {
    b.as_ref().map_or(0, |b| b.inner.positive_edge_count())
}

/// Write the backbone in the chosen format.
///
/// # Safety
/// `b` must be a valid handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_write(
    b: *const BbBackbone,
    path: *const c_char,
    format: BbFormat,
) -> BbStatus {
    guarded(|| {
        let Some(b) = b.as_ref() else {
            return null_arg("b");
        };
        let path = match utf8_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let format = match format {
            BbFormat::MatrixCsv => io::BackboneFormat::MatrixCsv,
            BbFormat::SignedEdgelist => io::BackboneFormat::SignedEdgelist,
            BbFormat::Dot => io::BackboneFormat::Dot,
        };
        match io::write_backbone(&b.inner, path, format) {
            Ok(()) => BbStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Positive edge count over the number of unordered pairs.
///
/// # Safety
/// `b` must be a valid handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_density(b: *const BbBackbone, out: *mut c_double) -> BbStatus {
    guarded(|| {
        let Some(b) = b.as_ref() else {
            return null_arg("b");
        };
        if out.is_null() {
            return null_arg("out");
        }
        *out = density(&b.inner);
        BbStatus::Ok
    })
}

/// Pearson correlation of the two backbones' upper-triangle entries,
/// aligned by node label.
///
/// # Safety
/// `a` and `b` must be valid handles; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_correlation(
    a: *const BbBackbone,
    b: *const BbBackbone,
    out: *mut c_double,
) -> BbStatus {
    guarded(|| {
        let (Some(a), Some(b)) = (a.as_ref(), b.as_ref()) else {
            return null_arg("a/b");
        };
        if out.is_null() {
            return null_arg("out");
        }
        match backbone_correlation(&a.inner, &b.inner) {
            Ok(r) => {
                *out = r;
                BbStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Newman-Girvan modularity of the positive subgraph under the partition
/// given as `len` parallel (label, community) string pairs.
///
/// # Safety
/// `b` must be a valid handle; `labels` and `communities` must each point
/// to `len` valid NUL-terminated strings; `out` must point to a writable
/// double.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_modularity(
    b: *const BbBackbone,
    labels: *const *const c_char,
    communities: *const *const c_char,
    len: usize,
    out: *mut c_double,
) -> BbStatus {
    guarded(|| {
        let Some(b) = b.as_ref() else {
            return null_arg("b");
        };
        if labels.is_null() || communities.is_null() {
            return null_arg("labels/communities");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let mut pairs = Vec::with_capacity(len);
        for i in 0..len {
            let label = match utf8_arg(*labels.add(i), "labels") {
                Ok(s) => s,
                Err(s) => return s,
            };
            let community = match utf8_arg(*communities.add(i), "communities") {
                Ok(s) => s,
                Err(s) => return s,
            };
            pairs.push((label.to_string(), community.to_string()));
        }
        let partition = match Partition::from_pairs(pairs) {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        match modularity(&b.inner, &partition) {
            Ok(q) => {
                *out = q;
                BbStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn graph_3x4() -> *mut BbGraph {
        let entries: [u8; 12] = [1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1];
        let mut g = ptr::null_mut();
        let status =
            unsafe { bb_graph_new(3, 4, entries.as_ptr(), ptr::null(), ptr::null(), &mut g) };
        assert_eq!(status, BbStatus::Ok);
        g
    }

    #[test]
    fn graph_accessors_and_projection() {
        let g = graph_3x4();
        unsafe {
            assert_eq!(bb_graph_rows(g), 3);
            assert_eq!(bb_graph_cols(g), 4);
            let mut buf = [0u32; 9];
            assert_eq!(bb_graph_project_into(g, buf.as_mut_ptr(), 9), BbStatus::Ok);
            assert_eq!(buf, [2, 2, 0, 2, 3, 1, 0, 1, 2]);
            assert_eq!(
                bb_graph_project_into(g, buf.as_mut_ptr(), 4),
                BbStatus::InvalidInput
            );
            bb_graph_free(g);
        }
    }

    #[test]
    fn model_extract_pipeline() {
        let g = graph_3x4();
        unsafe {
            let mut r = ptr::null_mut();
            assert_eq!(bb_hyperg(g, &mut r), BbStatus::Ok);
            assert_eq!(bb_result_size(r), 3);
            let mut p = 0.0;
            assert_eq!(bb_result_positive(r, 0, 1, &mut p), BbStatus::Ok);
            assert!((0.0..=1.0).contains(&p));
            assert_eq!(bb_result_positive(r, 0, 9, &mut p), BbStatus::InvalidInput);

            let mut b = ptr::null_mut();
            assert_eq!(bb_extract(r, 0.5, true, BbFwer::None, &mut b), BbStatus::Ok);
            assert_eq!(bb_backbone_size(b), 3);
            let mut d = 0.0;
            assert_eq!(bb_backbone_density(b, &mut d), BbStatus::Ok);
            assert!((0.0..=1.0).contains(&d));
            let label = bb_backbone_label(b, 0);
            assert_eq!(CStr::from_ptr(label).to_str().unwrap(), "r0");
            assert!(bb_backbone_label(b, 5).is_null());

            let labels: Vec<CString> =
                ["r0", "r1", "r2"].iter().map(|s| CString::new(*s).unwrap()).collect();
            let comms: Vec<CString> =
                ["x", "x", "y"].iter().map(|s| CString::new(*s).unwrap()).collect();
            let label_ptrs: Vec<*const c_char> = labels.iter().map(|c| c.as_ptr()).collect();
            let comm_ptrs: Vec<*const c_char> = comms.iter().map(|c| c.as_ptr()).collect();
            let mut q = f64::NAN;
            assert_eq!(
                bb_backbone_modularity(b, label_ptrs.as_ptr(), comm_ptrs.as_ptr(), 3, &mut q),
                BbStatus::Ok
            );
            assert!(q.is_finite());

            let mut r2 = ptr::null_mut();
            assert_eq!(bb_fdsm(g, 50, 7, 0, false, &mut r2), BbStatus::Ok);
            let mut b2 = ptr::null_mut();
            assert_eq!(bb_extract(r2, 0.5, true, BbFwer::Holm, &mut b2), BbStatus::Ok);
            let mut corr = f64::NAN;
            let status = bb_backbone_correlation(b, b2, &mut corr);
            assert_eq!(status, BbStatus::Ok);
            assert!((-1.0..=1.0).contains(&corr));

            bb_backbone_free(b2);
            bb_result_free(r2);
            bb_backbone_free(b);
            bb_result_free(r);
            bb_graph_free(g);
        }
    }

    #[test]
    fn errors_set_messages_and_codes() {
        unsafe {
            let mut g = ptr::null_mut();
            assert_eq!(
                bb_graph_read_csv(ptr::null(), &mut g),
                BbStatus::NullArg
            );
            let message = CStr::from_ptr(bb_last_error_message()).to_str().unwrap();
            assert!(message.contains("path"), "{message}");

            assert_eq!(
                bb_graph_read_csv(c"/nonexistent/x.csv".as_ptr(), &mut g),
                BbStatus::Io
            );

            let entries = [2u8];
            assert_eq!(
                bb_graph_new(1, 1, entries.as_ptr(), ptr::null(), ptr::null(), &mut g),
                BbStatus::InvalidInput
            );

            let good = graph_3x4();
            let mut r = ptr::null_mut();
            assert_eq!(bb_hyperg(good, &mut r), BbStatus::Ok);
            let mut b = ptr::null_mut();
            assert_eq!(
                bb_extract(r, 1.5, false, BbFwer::None, &mut b),
                BbStatus::InvalidInput
            );
            bb_result_free(r);
            bb_graph_free(good);
        }
    }

    #[test]
    fn universal_and_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = graph_3x4();
        unsafe {
            let mut b = ptr::null_mut();
            assert_eq!(
                bb_universal(g, c"mean".as_ptr(), ptr::null(), &mut b),
                BbStatus::Ok
            );
            let path = dir.path().join("bb.csv");
            let cpath = CString::new(path.to_str().unwrap()).unwrap();
            assert_eq!(
                bb_backbone_write(b, cpath.as_ptr(), BbFormat::MatrixCsv),
                BbStatus::Ok
            );
            assert!(path.exists());

            let mut r = ptr::null_mut();
            assert_eq!(bb_sdsm(g, BbMethod::Polytope, &mut r), BbStatus::Ok);
            let prefix = dir.path().join("run");
            let cprefix = CString::new(prefix.to_str().unwrap()).unwrap();
            assert_eq!(bb_result_write(r, cprefix.as_ptr()), BbStatus::Ok);
            let mut r2 = ptr::null_mut();
            assert_eq!(bb_result_read(cprefix.as_ptr(), &mut r2), BbStatus::Ok);
            assert_eq!(bb_result_size(r2), 3);

            bb_result_free(r2);
            bb_result_free(r);
            bb_backbone_free(b);
            bb_graph_free(g);
        }
    }

    #[test]
    fn header_lists_every_symbol() {
        let header = std::fs::read_to_string(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/backbone.h"),
        )
        .expect("generated header");
        for symbol in [
            "bb_last_error_message",
            "bb_graph_read_csv",
            "bb_graph_read_edgelist",
            "bb_graph_new",
            "bb_graph_free",
            "bb_graph_rows",
            "bb_graph_cols",
            "bb_graph_project_into",
            "bb_hyperg",
            "bb_sdsm",
            "bb_fdsm",
            "bb_result_free",
            "bb_result_size",
            "bb_result_positive",
            "bb_result_negative",
            "bb_result_write",
            "bb_result_read",
            "bb_extract",
            "bb_universal",
            "bb_backbone_free",
            "bb_backbone_size",
            "bb_backbone_entry",
            "bb_backbone_label",
            "bb_backbone_positive_edges",
            "bb_backbone_write",
            "bb_backbone_density",
            "bb_backbone_correlation",
            "bb_backbone_modularity",
        ] {
            assert!(header.contains(symbol), "header is missing {symbol}");
        }
        assert!(header.contains("BB_STATUS_OK"));
        assert!(header.contains("BB_METHOD_POLYTOPE"));
    }
}
