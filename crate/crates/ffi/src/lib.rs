//! C interface to `hypermat`.
//!
//! Objects are opaque handles created by `hm_*_new` / `hm_*_parse` and
//! released with the matching `hm_*_free`. Every fallible call returns an
//! [`HmStatus`]; on failure `hm_last_error_message` describes the error for
//! the calling thread. Strings returned through out-parameters are owned by
//! the caller and must be released with `hm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hypermat::gadgets::{self, Graph};
use hypermat::hyperdet::{bilinear_solve_222, det222};
use hypermat::hypermatrix::io::{parse_tensor, tensor_to_string, AnyTensor};
use hypermat::rank::flattening_ranks;
use hypermat::spectral::{best_rank1, spectral_norm};
use hypermat::{Error, SearchConfig, Tensor3};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NotCubical = 4,
    Parse = 5,
    SizeCap = 6,
    /// A numerical search failed to produce a usable answer.
    Numerical = 7,
    Io = 8,
    /// The operation needs exact (rational) entries.
    NotExact = 9,
    Panic = 10,
}

/// Opaque tensor, exact or floating point.
pub struct HmTensor {
    inner: AnyTensor,
}

/// Opaque simple graph on at most 64 vertices.
pub struct HmGraph {
    inner: Graph,
}

/// Multistart settings shared by the numerical searches.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HmSearchConfig {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl From<HmSearchConfig> for SearchConfig {
    fn from(c: HmSearchConfig) -> Self {
        SearchConfig {
            seed: c.seed,
            restarts: c.restarts,
            max_iters: c.max_iters,
            tol: c.tol,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HmSpectralResult {
    pub sigma: f64,
    /// Max-norm of the stationarity residuals at the returned triple.
    pub residual: f64,
    pub converged: bool,
    pub best_restart: usize,
    pub iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HmStatus {
    match e {
        Error::DimensionMismatch(_) => HmStatus::DimensionMismatch,
        Error::NotCubical(..) => HmStatus::NotCubical,
        Error::Parse { .. } => HmStatus::Parse,
        Error::SizeCap(_) => HmStatus::SizeCap,
        Error::Oracle(_) => HmStatus::Numerical,
        Error::Io(_) => HmStatus::Io,
        _ => HmStatus::InvalidInput,
    }
}

struct Failure(HmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HmStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HmStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(HmStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn exact(t: &HmTensor) -> Result<&Tensor3<hypermat::Rational>, Failure> {
    match &t.inner {
        AnyTensor::Exact(a) => Ok(a),
        AnyTensor::Float(_) => Err(Failure(
            HmStatus::NotExact,
            "operation needs an exact tensor".into(),
        )),
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn hm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn hm_search_config_default() -> HmSearchConfig {
    let d = SearchConfig::default();
    HmSearchConfig {
        seed: d.seed,
        restarts: d.restarts,
        max_iters: d.max_iters,
        tol: d.tol,
    }
}

/// Floating-point tensor from `l*m*n` entries, last index fastest.
///
/// # Safety
/// `entries` must point to `l*m*n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_new(
    l: usize,
    m: usize,
    n: usize,
    entries: *const f64,
    out: *mut *mut HmTensor,
) -> HmStatus {
    guard(|| {
        let len = l
            .checked_mul(m)
            .and_then(|v| v.checked_mul(n))
            .ok_or_else(|| Failure(HmStatus::InvalidInput, "dimensions overflow".into()))?;
        let data = slice(entries, len, "entries")?.to_vec();
        let t = Tensor3::new([l, m, n], data)?;
        write_out(
            out,
            Box::into_raw(Box::new(HmTensor {
                inner: AnyTensor::Float(t),
            })),
            "out",
        )
    })
}

/// Exact tensor from integer entries, last index fastest.
///
/// # Safety
/// `entries` must point to `l*m*n` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_from_integers(
    l: usize,
    m: usize,
    n: usize,
    entries: *const i64,
    out: *mut *mut HmTensor,
) -> HmStatus {
    guard(|| {
        let len = l
            .checked_mul(m)
            .and_then(|v| v.checked_mul(n))
            .ok_or_else(|| Failure(HmStatus::InvalidInput, "dimensions overflow".into()))?;
        let data = slice(entries, len, "entries")?;
        let t = Tensor3::from_integers([l, m, n], data)?;
        write_out(
            out,
            Box::into_raw(Box::new(HmTensor {
                inner: AnyTensor::Exact(t),
            })),
            "out",
        )
    })
}

/// Parse the JSON tensor format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_parse(json: *const c_char, out: *mut *mut HmTensor) -> HmStatus {
    guard(|| {
        let t = parse_tensor(c_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(HmTensor { inner: t })), "out")
    })
}

/// # Safety
/// `t` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_free(t: *mut HmTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_to_json(t: *const HmTensor, out: *mut *mut c_char) -> HmStatus {
    guard(|| {
        let t = borrow(t, "tensor")?;
        write_out(out, into_c_string(tensor_to_string(&t.inner)), "out")
    })
}

/// # Safety
/// `t` must be a live handle; `dims` must hold three values.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_dims(t: *const HmTensor, dims: *mut usize) -> HmStatus {
    guard(|| {
        let d = borrow(t, "tensor")?.inner.dims();
        if dims.is_null() {
            return Err(null("dims"));
        }
        ptr::copy_nonoverlapping(d.as_ptr(), dims, 3);
        Ok(())
    })
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_is_exact(t: *const HmTensor, out: *mut bool) -> HmStatus {
    guard(|| {
        write_out(
            out,
            matches!(borrow(t, "tensor")?.inner, AnyTensor::Exact(_)),
            "out",
        )
    })
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_tensor_frobenius_norm(t: *const HmTensor, out: *mut f64) -> HmStatus {
    guard(|| {
        write_out(
            out,
            borrow(t, "tensor")?.inner.to_f64().frobenius_norm(),
            "out",
        )
    })
}

/// Exact ranks of the three unfoldings.
///
/// # Safety
/// `t` must be a live exact handle; `ranks` must hold three values.
#[no_mangle]
pub unsafe extern "C" fn hm_flattening_ranks(t: *const HmTensor, ranks: *mut usize) -> HmStatus {
    guard(|| {
        let r = flattening_ranks(exact(borrow(t, "tensor")?)?);
        if ranks.is_null() {
            return Err(null("ranks"));
        }
        ptr::copy_nonoverlapping(r.as_ptr(), ranks, 3);
        Ok(())
    })
}

/// Multistart estimate of the spectral norm.
///
/// # Safety
/// `t` must be a live handle, `cfg` null (defaults) or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hm_spectral_norm(
    t: *const HmTensor,
    cfg: *const HmSearchConfig,
    out: *mut HmSpectralResult,
) -> HmStatus {
    guard(|| {
        let a = borrow(t, "tensor")?.inner.to_f64();
        let cfg = cfg
            .as_ref()
            .map_or_else(SearchConfig::default, |c| (*c).into());
        let c = spectral_norm(&a, &cfg)?;
        let res = HmSpectralResult {
            sigma: c.sigma,
            residual: c.residual,
            converged: c.converged,
            best_restart: c.best_restart,
            iterations: c.iterations,
        };
        write_out(out, res, "out")
    })
}

/// Best rank-1 approximation `sigma u⊗v⊗w` with unit factors. `u`, `v`, `w`
/// must hold `l`, `m`, `n` doubles.
///
/// # Safety
/// All pointers must be valid for the sizes above.
#[no_mangle]
pub unsafe extern "C" fn hm_best_rank1(
    t: *const HmTensor,
    cfg: *const HmSearchConfig,
    sigma: *mut f64,
    u: *mut f64,
    v: *mut f64,
    w: *mut f64,
    error: *mut f64,
) -> HmStatus {
    guard(|| {
        let a = borrow(t, "tensor")?.inner.to_f64();
        let cfg = cfg
            .as_ref()
            .map_or_else(SearchConfig::default, |c| (*c).into());
        let b = best_rank1(&a, &cfg)?;
        for (dst, src, what) in [(u, &b.u, "u"), (v, &b.v, "v"), (w, &b.w, "w")] {
            if dst.is_null() {
                return Err(null(what));
            }
            ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
        }
        write_out(sigma, b.sigma, "sigma")?;
        write_out(error, b.error, "error")
    })
}

/// 2x2x2 hyperdeterminant in floating point.
///
/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_det222(t: *const HmTensor, out: *mut f64) -> HmStatus {
    guard(|| write_out(out, det222(&borrow(t, "tensor")?.inner.to_f64())?, "out"))
}

/// 2x2x2 hyperdeterminant of an exact tensor as a rational string.
///
/// # Safety
/// `t` must be a live exact handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_det222_exact(t: *const HmTensor, out: *mut *mut c_char) -> HmStatus {
    guard(|| {
        let d = det222(exact(borrow(t, "tensor")?)?)?;
        write_out(out, into_c_string(d.to_string()), "out")
    })
}

/// Whether the 2x2x2 bilinear system has a solution with `x, y, z` nonzero.
///
/// # Safety
/// `t` must be a live exact handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_bilinear_solvable_222(t: *const HmTensor, out: *mut bool) -> HmStatus {
    guard(|| {
        write_out(
            out,
            bilinear_solve_222(exact(borrow(t, "tensor")?)?)?.is_some(),
            "out",
        )
    })
}

/// Graph from `m` 0-based edge pairs stored as `edges[2*i], edges[2*i+1]`.
///
/// # Safety
/// `edges` must hold `2*m` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_new(
    n: usize,
    edges: *const usize,
    m: usize,
    out: *mut *mut HmGraph,
) -> HmStatus {
    guard(|| {
        let len = m
            .checked_mul(2)
            .ok_or_else(|| Failure(HmStatus::InvalidInput, "edge count overflows".into()))?;
        let flat = slice(edges, len, "edges")?;
        let g = Graph::new(n, flat.chunks_exact(2).map(|e| (e[0], e[1])))?;
        write_out(out, Box::into_raw(Box::new(HmGraph { inner: g })), "out")
    })
}

/// Parse the text graph format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_parse(text: *const c_char, out: *mut *mut HmGraph) -> HmStatus {
    guard(|| {
        let g = Graph::parse(c_str(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(HmGraph { inner: g })), "out")
    })
}

/// # Safety
/// `g` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_free(g: *mut HmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_clique_number(g: *const HmGraph, out: *mut usize) -> HmStatus {
    guard(|| {
        write_out(
            out,
            gadgets::clique_number(&borrow(g, "graph")?.inner)?,
            "out",
        )
    })
}

/// Maximum of `Σ x_i x_j` over edges on the simplex, as a rational string.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_motzkin_straus(
    g: *const HmGraph,
    out: *mut *mut c_char,
) -> HmStatus {
    guard(|| {
        let v = gadgets::motzkin_straus_value(&borrow(g, "graph")?.inner)?;
        write_out(out, into_c_string(v.to_string()), "out")
    })
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_graph_three_colorable(g: *const HmGraph, out: *mut bool) -> HmStatus {
    guard(|| {
        write_out(
            out,
            borrow(g, "graph")?.inner.three_coloring().is_some(),
            "out",
        )
    })
}

/// Clique tensor of the graph at parameter `ell` (exact).
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_clique_tensor(
    g: *const HmGraph,
    ell: usize,
    out: *mut *mut HmTensor,
) -> HmStatus {
    guard(|| {
        let t = gadgets::clique_tensor(&borrow(g, "graph")?.inner, ell)?;
        write_out(
            out,
            Box::into_raw(Box::new(HmTensor {
                inner: AnyTensor::Exact(t),
            })),
            "out",
        )
    })
}

/// Tensor whose singular-vector system is solvable iff the graph is
/// 3-colorable (exact).
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hm_tqf_tensor(g: *const HmGraph, out: *mut *mut HmTensor) -> HmStatus {
    guard(|| {
        let t = gadgets::tqf_tensor(&borrow(g, "graph")?.inner);
        write_out(
            out,
            Box::into_raw(Box::new(HmTensor {
                inner: AnyTensor::Exact(t),
            })),
            "out",
        )
    })
}
