//! C ABI for `photon-filter`.
//!
//! Every fallible function returns a [`PfStatus`] and writes results through
//! out-pointers. On failure a message is kept per thread and can be read with
//! [`pf_last_error_message`]. Density matrices are opaque handles that the
//! caller releases with [`pf_density_matrix_free`].
//!
//! Matrix entries cross the boundary row-major as [`PfComplex`] pairs.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use photon_filter::{Error, FilterMode, FockVector, KerrMedia, SuperpositionSpec};

use photon_filter::DensityMatrix;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    PfOk = 0,
    PfErrNullPointer = 1,
    PfErrInvalidParameter = 2,
    PfErrInvalidTruncation = 3,
    PfErrInvalidMatrix = 4,
    PfErrDimension = 5,
    PfErrNeverClicks = 6,
    PfErrCombAliasing = 7,
    PfErrBufferTooSmall = 8,
    PfErrPanic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for PfComplex {
    fn from(z: Complex64) -> Self {
        PfComplex { re: z.re, im: z.im }
    }
}

impl From<PfComplex> for Complex64 {
    fn from(z: PfComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Device settings; `n_kerr` is 1 or 2.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfCavityParams {
    pub tau: f64,
    pub chi_t: f64,
    pub psi: f64,
    pub eta: f64,
    pub n_kerr: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfFilterMode {
    PfModeExact = 0,
    PfModePaperLiteral = 1,
}

/// Opaque density matrix handle.
pub struct PfDensityMatrix {
    inner: DensityMatrix,
}

struct Failure {
    status: PfStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter { .. }
            | Error::NonFinite(_)
            | Error::InvalidProbability(_)
            | Error::KerrCount(_) => PfStatus::PfErrInvalidParameter,
            Error::InvalidTruncation { .. } | Error::InsufficientTruncation { .. } => {
                PfStatus::PfErrInvalidTruncation
            }
            Error::NotHermitian(_)
            | Error::InvalidTrace(_)
            | Error::NotPositive(_)
            | Error::NegativePopulation { .. } => PfStatus::PfErrInvalidMatrix,
            Error::DimensionMismatch { .. }
            | Error::NotSingleMode(_)
            | Error::NotTwoMode(_)
            | Error::InvalidModeIndex(_)
            | Error::ZeroNorm => PfStatus::PfErrDimension,
            Error::NeverClicks { .. } => PfStatus::PfErrNeverClicks,
            Error::CombAliasing { .. } => PfStatus::PfErrCombAliasing,
        };
        Failure {
            status,
            message: format!("{}: {e}", e.code()),
        }
    }
}

fn fail(status: PfStatus, message: &str) -> Failure {
    Failure {
        status,
        message: message.to_string(),
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PfStatus::PfOk
        }
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_last_error("internal panic");
            PfStatus::PfErrPanic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(PfStatus::PfErrNullPointer, &format!("{what} is null")))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(fail(PfStatus::PfErrNullPointer, &format!("{what} is null")));
    }
    p.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(PfStatus::PfErrNullPointer, &format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(
    p: *mut T,
    len: usize,
    need: usize,
    what: &str,
) -> Result<&'a mut [T], Failure> {
    if len < need {
        return Err(fail(
            PfStatus::PfErrBufferTooSmall,
            &format!("{what} holds {len} elements, {need} needed"),
        ));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(PfStatus::PfErrNullPointer, &format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

fn boxed(inner: DensityMatrix) -> *mut PfDensityMatrix {
    Box::into_raw(Box::new(PfDensityMatrix { inner }))
}

/// Hands a new matrix to the caller; nothing is allocated when `out` is null.
unsafe fn write_handle(out: *mut *mut PfDensityMatrix, rho: DensityMatrix) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(PfStatus::PfErrNullPointer, "out is null"));
    }
    out.write(boxed(rho));
    Ok(())
}

fn cavity(p: &PfCavityParams) -> Result<photon_filter::CavityParams, Failure> {
    let n_kerr = KerrMedia::try_from(p.n_kerr)?;
    Ok(photon_filter::CavityParams::new(
        p.tau, p.chi_t, p.psi, p.eta, n_kerr,
    )?)
}

fn filter_mode(m: PfFilterMode) -> FilterMode {
    match m {
        PfFilterMode::PfModeExact => FilterMode::Exact,
        PfFilterMode::PfModePaperLiteral => FilterMode::PaperLiteral,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
///
/// The pointer stays valid until the next `pf_*` call on the same thread.
#[no_mangle]
pub extern "C" fn pf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Truncated coherent state `|beta><beta|` (trace slightly below one).
#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_coherent(
    beta: PfComplex,
    n_trunc: usize,
    out: *mut *mut PfDensityMatrix,
) -> PfStatus {
    guard(|| {
        let rho = DensityMatrix::coherent(beta.into(), n_trunc)?;
        write_handle(out, rho)
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_fock(
    n: usize,
    n_trunc: usize,
    out: *mut *mut PfDensityMatrix,
) -> PfStatus {
    guard(|| {
        let rho = DensityMatrix::fock(n, n_trunc)?;
        write_handle(out, rho)
    })
}

/// Validated density matrix from `dim * dim` row-major entries.
///
/// `mode_dims` lists the dimension of each mode; their product must equal `dim`.
#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_from_entries(
    entries: *const PfComplex,
    dim: usize,
    mode_dims: *const usize,
    n_modes: usize,
    out: *mut *mut PfDensityMatrix,
) -> PfStatus {
    guard(|| {
        let len = dim
            .checked_mul(dim)
            .ok_or_else(|| fail(PfStatus::PfErrDimension, "dim overflows"))?;
        let data = slice(entries, len, "entries")?;
        let dims = slice(mode_dims, n_modes, "mode_dims")?.to_vec();
        let m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| Complex64::from(data[i * dim + j]));
        let rho = DensityMatrix::new(m, dims)?;
        write_handle(out, rho)
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_free(rho: *mut PfDensityMatrix) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_dim(
    rho: *const PfDensityMatrix,
    out: *mut usize,
) -> PfStatus {
    guard(|| write(out, borrow(rho, "rho")?.inner.dim(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_n_modes(
    rho: *const PfDensityMatrix,
    out: *mut usize,
) -> PfStatus {
    guard(|| write(out, borrow(rho, "rho")?.inner.n_modes(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_get(
    rho: *const PfDensityMatrix,
    row: usize,
    col: usize,
    out: *mut PfComplex,
) -> PfStatus {
    guard(|| {
        let rho = &borrow(rho, "rho")?.inner;
        if row >= rho.dim() || col >= rho.dim() {
            return Err(fail(PfStatus::PfErrDimension, "index out of range"));
        }
        write(out, rho.get(row, col).into(), "out")
    })
}

/// Copies all entries row-major into `buf`, which must hold at least `dim * dim` values.
#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_entries(
    rho: *const PfDensityMatrix,
    buf: *mut PfComplex,
    len: usize,
) -> PfStatus {
    guard(|| {
        let rho = &borrow(rho, "rho")?.inner;
        let d = rho.dim();
        let dst = slice_mut(buf, len, d * d, "buf")?;
        for i in 0..d {
            for j in 0..d {
                dst[i * d + j] = rho.get(i, j).into();
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_density_matrix_purity(
    rho: *const PfDensityMatrix,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        write(
            out,
            photon_filter::purity(&borrow(rho, "rho")?.inner),
            "out",
        )
    })
}

/// Photon-number distribution of a single-mode state into `buf` (at least `dim` values).
#[no_mangle]
pub unsafe extern "C" fn pf_photon_number_distribution(
    rho: *const PfDensityMatrix,
    buf: *mut f64,
    len: usize,
) -> PfStatus {
    guard(|| {
        let dist = photon_filter::photon_number_distribution(&borrow(rho, "rho")?.inner)?;
        slice_mut(buf, len, dist.len(), "buf")?.copy_from_slice(&dist);
        Ok(())
    })
}

/// `<psi|rho|psi> / <psi|psi>` for a state vector of length `dim`.
#[no_mangle]
pub unsafe extern "C" fn pf_fidelity_with_pure(
    rho: *const PfDensityMatrix,
    psi: *const PfComplex,
    len: usize,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        let rho = &borrow(rho, "rho")?.inner;
        let coeffs = slice(psi, len, "psi")?.iter().map(|&z| z.into()).collect();
        let psi = FockVector::new(coeffs)?;
        write(out, photon_filter::fidelity_with_pure(rho, &psi)?, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_partial_trace(
    rho: *const PfDensityMatrix,
    keep_mode: usize,
    out: *mut *mut PfDensityMatrix,
) -> PfStatus {
    guard(|| {
        let reduced = photon_filter::partial_trace(&borrow(rho, "rho")?.inner, keep_mode)?;
        write_handle(out, reduced)
    })
}

/// Conditional single-mode output state and its success probability.
#[no_mangle]
pub unsafe extern "C" fn pf_conditional_output(
    nu: *const PfDensityMatrix,
    alpha: PfComplex,
    params: *const PfCavityParams,
    mode: PfFilterMode,
    out_rho: *mut *mut PfDensityMatrix,
    out_p_on: *mut f64,
) -> PfStatus {
    guard(|| {
        let nu = borrow(nu, "nu")?.inner.clone();
        let params = cavity(borrow(params, "params")?)?;
        let input = photon_filter::FilterInput::new(nu, alpha.into(), params)?;
        let result = photon_filter::conditional_output_with(&input, filter_mode(mode))?;
        if out_rho.is_null() || out_p_on.is_null() {
            return Err(fail(PfStatus::PfErrNullPointer, "output pointer is null"));
        }
        out_p_on.write(result.p_on);
        out_rho.write(boxed(result.rho_out));
        Ok(())
    })
}

/// Conditional two-mode output; `params.n_kerr` must be 2.
#[no_mangle]
pub unsafe extern "C" fn pf_two_mode_conditional_output(
    nu1: *const PfDensityMatrix,
    nu2: *const PfDensityMatrix,
    alpha: PfComplex,
    params: *const PfCavityParams,
    mode: PfFilterMode,
    out_rho: *mut *mut PfDensityMatrix,
    out_p_on: *mut f64,
) -> PfStatus {
    guard(|| {
        let nu1 = &borrow(nu1, "nu1")?.inner;
        let nu2 = &borrow(nu2, "nu2")?.inner;
        let params = cavity(borrow(params, "params")?)?;
        let result = photon_filter::two_mode_conditional_output(
            nu1,
            nu2,
            alpha.into(),
            &params,
            filter_mode(mode),
        )?;
        if out_rho.is_null() || out_p_on.is_null() {
            return Err(fail(PfStatus::PfErrNullPointer, "output pointer is null"));
        }
        out_p_on.write(result.p_on);
        out_rho.write(boxed(result.rho_out));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pf_success_probability(
    nu: *const PfDensityMatrix,
    alpha: PfComplex,
    params: *const PfCavityParams,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        let nu = borrow(nu, "nu")?.inner.clone();
        let params = cavity(borrow(params, "params")?)?;
        let input = photon_filter::FilterInput::new(nu, alpha.into(), params)?;
        write(out, photon_filter::success_probability(&input), "out")
    })
}

#[no_mangle]
pub extern "C" fn pf_kappa(phi: f64, tau: f64) -> PfComplex {
    photon_filter::kappa(phi, tau).into()
}

#[no_mangle]
pub extern "C" fn pf_sigma(phi: f64, tau: f64) -> PfComplex {
    photon_filter::sigma(phi, tau).into()
}

/// Comb spacing `l*` and first peak `n*` of a cavity setting.
#[no_mangle]
pub unsafe extern "C" fn pf_comb(
    params: *const PfCavityParams,
    out_l_star: *mut f64,
    out_n_star: *mut f64,
) -> PfStatus {
    guard(|| {
        let c = photon_filter::comb(&cavity(borrow(params, "params")?)?);
        write(out_l_star, c.l_star, "out_l_star")?;
        write(out_n_star, c.n_star, "out_n_star")
    })
}

/// Coherent amplitude giving equal weight to `|n*>` and `|n*+l*>`.
#[no_mangle]
pub unsafe extern "C" fn pf_design_superposition(
    n_star: usize,
    l_star: usize,
    phase: f64,
    out: *mut PfComplex,
) -> PfStatus {
    guard(|| {
        let beta = photon_filter::design_superposition(&SuperpositionSpec {
            n_star,
            l_star,
            phase,
        })?;
        write(out, beta.into(), "out")
    })
}
