//! C ABI over `toruslab`.
//!
//! Every fallible call returns a [`TlStatus`]; on failure the message is
//! kept per thread and read back with [`tl_last_error_message`]. Handles are
//! opaque and owned by the caller until passed to the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use toruslab::exponents::{self, Exponent};
use toruslab::kernels::{decompose_diagonal, KernelOptions};
use toruslab::lattice::{count_band, enumerate_band, SpectralBand, SpectralCluster, TorusConfig};
use toruslab::mollifier::{build_mollifier, Mollifier, MollifierSpec};
use toruslab::schatten::{gram_matrix, schatten_norm, TestFunction};
use toruslab::Error;

/// Result codes; the nonzero library codes match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    InvalidArgument = 1,
    NumericFailure = 2,
    CapacityExceeded = 3,
    NullPointer = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> TlStatus {
    match err.exit_code() {
        2 => TlStatus::NumericFailure,
        3 => TlStatus::CapacityExceeded,
        _ => TlStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> TlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            TlStatus::Ok
        }
        Ok(Err(e)) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            TlStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(format!("{} is null", stringify!($p)));
            return TlStatus::NullPointer;
        })+
    };
}

/// Copies the last error of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    V.as_ptr()
}

/// Number of `k ∈ Z^n` with `λ ≤ |k| < λ+ε`.
///
/// # Safety
/// `out` must point to a writable `u64`.
#[no_mangle]
pub unsafe extern "C" fn tl_count_band(n: usize, lambda: f64, eps: f64, out: *mut u64) -> TlStatus {
    non_null!(out);
    guard(|| {
        let cfg = TorusConfig::new(n)?;
        let band = SpectralBand::new(lambda, eps)?;
        *out = count_band(&cfg, &band);
        Ok(())
    })
}

/// Enumerated band `λ ≤ |k| < λ+ε`.
pub struct TlCluster(SpectralCluster);

/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_cluster_new(n: usize, lambda: f64, eps: f64, out: *mut *mut TlCluster) -> TlStatus {
    non_null!(out);
    *out = std::ptr::null_mut();
    guard(|| {
        let cfg = TorusConfig::new(n)?;
        let cluster = enumerate_band(&cfg, &SpectralBand::new(lambda, eps)?)?;
        *out = Box::into_raw(Box::new(TlCluster(cluster)));
        Ok(())
    })
}

/// # Safety
/// `cluster` must be null or a live handle from [`tl_cluster_new`].
#[no_mangle]
pub unsafe extern "C" fn tl_cluster_free(cluster: *mut TlCluster) {
    if !cluster.is_null() {
        drop(Box::from_raw(cluster));
    }
}

/// Number of frequencies; 0 for a null handle.
///
/// # Safety
/// `cluster` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_cluster_len(cluster: *const TlCluster) -> usize {
    cluster.as_ref().map_or(0, |c| c.0.len())
}

/// Torus dimension; 0 for a null handle.
///
/// # Safety
/// `cluster` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_cluster_dim(cluster: *const TlCluster) -> usize {
    cluster.as_ref().map_or(0, |c| c.0.dim())
}

/// Writes frequency `index` into `out_k[0..len]`; `len` must equal the
/// dimension.
///
/// # Safety
/// `cluster` must be a live handle and `out_k` must point to `len` writable
/// `i64`s.
#[no_mangle]
pub unsafe extern "C" fn tl_cluster_frequency(
    cluster: *const TlCluster,
    index: usize,
    out_k: *mut i64,
    len: usize,
) -> TlStatus {
    non_null!(cluster, out_k);
    let c = &(*cluster).0;
    guard(|| {
        if len != c.dim() {
            return Err(Error::Shape {
                expected: c.dim(),
                got: len,
            });
        }
        let f = c.freqs.get(index).ok_or_else(|| {
            Error::InvalidConfig(format!("index {index} out of range for {} frequencies", c.len()))
        })?;
        std::slice::from_raw_parts_mut(out_k, len).copy_from_slice(&f.k);
        Ok(())
    })
}

/// Schatten-`alpha` norm of the cluster compression of `h χ h̄` for a
/// seeded random trigonometric polynomial `h`; `alpha` may be `INFINITY`.
///
/// # Safety
/// `cluster` must be a live handle, `out` a writable `f64`.
#[no_mangle]
pub unsafe extern "C" fn tl_cluster_schatten_norm(
    cluster: *const TlCluster,
    h_modes: usize,
    h_max_freq: i64,
    seed: u64,
    alpha: f64,
    out: *mut f64,
) -> TlStatus {
    non_null!(cluster, out);
    let c = &(*cluster).0;
    guard(|| {
        let h = TestFunction::random(c.dim(), h_modes, h_max_freq, seed)?;
        let g = gram_matrix(c, &h)?;
        *out = schatten_norm(&g, &h, alpha)?.norm;
        Ok(())
    })
}

/// Smooth band profile `a` with `â` supported in `(-1, 1)`.
pub struct TlMollifier(Mollifier);

/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_mollifier_new(sharpness: f64, out: *mut *mut TlMollifier) -> TlStatus {
    non_null!(out);
    *out = std::ptr::null_mut();
    guard(|| {
        if !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(Error::InvalidConfig(format!("sharpness must be positive, got {sharpness}")));
        }
        let m = build_mollifier(MollifierSpec {
            sharpness,
            ..MollifierSpec::default()
        })?;
        *out = Box::into_raw(Box::new(TlMollifier(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a live handle from [`tl_mollifier_new`].
#[no_mangle]
pub unsafe extern "C" fn tl_mollifier_free(m: *mut TlMollifier) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `a(τ)`; NaN for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_mollifier_a(m: *const TlMollifier, tau: f64) -> f64 {
    m.as_ref().map_or(f64::NAN, |m| m.0.a(tau))
}

/// `â(t)`; NaN for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tl_mollifier_a_hat(m: *const TlMollifier, t: f64) -> f64 {
    m.as_ref().map_or(f64::NAN, |m| m.0.a_hat(t))
}

/// Diagonal of the mollified band projector and its pieces.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TlKernelReport {
    pub total: f64,
    pub total_reassembled: f64,
    pub j: f64,
    pub i1_main: f64,
    pub i1_neighbor: f64,
    pub i2_local: f64,
    pub i22: f64,
    pub i21: f64,
    pub translates: u64,
    pub quadrature_error: f64,
    pub ratio_total: f64,
}

/// # Safety
/// `m` must be a live handle and `out` a writable [`TlKernelReport`].
#[no_mangle]
pub unsafe extern "C" fn tl_kernel_diagonal(
    m: *const TlMollifier,
    n: usize,
    lambda: f64,
    eps: f64,
    out: *mut TlKernelReport,
) -> TlStatus {
    non_null!(m, out);
    let m = &(*m).0;
    guard(|| {
        let cfg = TorusConfig::new(n)?;
        let r = decompose_diagonal(&cfg, lambda, eps, m, KernelOptions::default())?;
        *out = TlKernelReport {
            total: r.total,
            total_reassembled: r.total_reassembled,
            j: r.j,
            i1_main: r.i1_main,
            i1_neighbor: r.i1_neighbor,
            i2_local: r.i2_local,
            i22: r.i22,
            i21: r.i21,
            translates: r.translates,
            quadrature_error: r.quadrature_error,
            ratio_total: r.ratio_total,
        };
        Ok(())
    })
}

/// `σ(p)` and `α(p)` for `p ≥ 2`; pass `INFINITY` for `p = ∞`.
///
/// # Safety
/// `sigma` and `alpha` must point to writable `f64`s.
#[no_mangle]
pub unsafe extern "C" fn tl_exponents(n: usize, p: f64, sigma: *mut f64, alpha: *mut f64) -> TlStatus {
    non_null!(sigma, alpha);
    guard(|| {
        TorusConfig::new(n)?;
        let p = if p.is_infinite() && p > 0.0 {
            Exponent::Infinity
        } else {
            Exponent::new(p)?
        };
        *sigma = exponents::sigma(n, p)?;
        *alpha = exponents::alpha(n, p)?;
        Ok(())
    })
}
