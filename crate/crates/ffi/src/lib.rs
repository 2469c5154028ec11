//! C ABI over `zenosim`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` style
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`ZsStatus`]; on failure `zs_last_error_message` describes the
//! most recent error on the calling thread. Matrices are passed row-major as
//! separate real and imaginary arrays of length `dim * dim`; a null imaginary
//! pointer means all-zero imaginary parts.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zenosim::channels::{evolve_unitary, release_branch_mixture, BranchConfig, DephasingChannel, Hamiltonian};
use zenosim::collapse::{apply_answer, probability_yes, process1, Answer};
use zenosim::estimates::{spread_at_trigger, IonParameters, ATOMIC_MASS_UNIT};
use zenosim::opalg::{ComplexMatrix, Projector, WeightOperator};
use zenosim::zeno::{run_expected, run_sampled, RunMode, ZenoProtocol};
use zenosim::{Complex64, Error};

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ZsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotHermitian = 4,
    NotIdempotent = 5,
    InvalidState = 6,
    DegenerateBranch = 7,
    Capacity = 8,
    Precondition = 9,
    BufferTooSmall = 10,
    Panic = 11,
    Other = 12,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ZsAnswer {
    No = 0,
    Yes = 1,
}

/// Ion estimate in SI units.
#[repr(C)]
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct ZsEstimate {
    pub delta_v: f64,
    pub v_thermal: f64,
    pub velocity_ratio: f64,
    pub transit_time: f64,
    pub spread_at_trigger: f64,
    pub spread_to_ion_size: f64,
}

/// Opaque weight operator.
pub struct ZsWeightOperator(WeightOperator);

/// Opaque projector.
pub struct ZsProjector(Projector);

/// Opaque Zeno protocol.
pub struct ZsProtocol(ZenoProtocol);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ZsStatus {
    match e {
        Error::DimensionMismatch { .. } => ZsStatus::DimensionMismatch,
        Error::NotHermitian { .. } => ZsStatus::NotHermitian,
        Error::NotIdempotent { .. } => ZsStatus::NotIdempotent,
        Error::InvalidState(_) => ZsStatus::InvalidState,
        Error::DegenerateBranch { .. } => ZsStatus::DegenerateBranch,
        Error::Capacity(_) => ZsStatus::Capacity,
        Error::Precondition(_) | Error::DegenerateFit { .. } => ZsStatus::Precondition,
        Error::MalformedMatrix(_) | Error::NotUnitary { .. } | Error::InvalidArgument { .. } | Error::Config { .. } => {
            ZsStatus::InvalidArgument
        }
        Error::Scenario { source, .. } => status_of(source),
        _ => ZsStatus::Other,
    }
}

enum Fail {
    Null(&'static str),
    Buffer(usize, usize),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> ZsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            ZsStatus::Ok
        }
        Ok(Err(Fail::Null(name))) => {
            set_last_error(format!("null pointer passed for `{name}`"));
            ZsStatus::NullPointer
        }
        Ok(Err(Fail::Buffer(needed, given))) => {
            set_last_error(format!("buffer holds {given} values, {needed} required"));
            ZsStatus::BufferTooSmall
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            ZsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_matrix(dim: usize, re: *const f64, im: *const f64) -> Result<ComplexMatrix, Fail> {
    if re.is_null() {
        return Err(Fail::Null("re"));
    }
    let n = dim
        .checked_mul(dim)
        .ok_or_else(|| Fail::Lib(Error::Capacity("dimension overflows".into())))?;
    let re = std::slice::from_raw_parts(re, n);
    let entries: Vec<Complex64> = if im.is_null() {
        re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    } else {
        let im = std::slice::from_raw_parts(im, n);
        re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
    };
    Ok(ComplexMatrix::from_row_major(dim, &entries)?)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zs_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Message for the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn zs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Validates and copies a `dim x dim` weight operator.
///
/// # Safety
/// `re` (and `im` unless null) must point to `dim * dim` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn zs_weight_operator_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut ZsWeightOperator,
) -> ZsStatus {
    guard(|| {
        let s = WeightOperator::new(read_matrix(dim, re, im)?)?;
        write_out(out, boxed(ZsWeightOperator(s)), "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_weight_operator_basis_state(
    dim: usize,
    index: usize,
    out: *mut *mut ZsWeightOperator,
) -> ZsStatus {
    guard(|| {
        let s = WeightOperator::basis_state(dim, index)?;
        write_out(out, boxed(ZsWeightOperator(s)), "out")
    })
}

/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zs_weight_operator_free(s: *mut ZsWeightOperator) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_weight_operator_dim(s: *const ZsWeightOperator, out: *mut usize) -> ZsStatus {
    guard(|| write_out(out, deref(s, "s")?.0.dim(), "out"))
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_weight_operator_trace(s: *const ZsWeightOperator, out: *mut f64) -> ZsStatus {
    guard(|| write_out(out, deref(s, "s")?.0.trace(), "out"))
}

/// Copies the entries row-major into `re` and `im`, each holding `len` doubles.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn zs_weight_operator_entries(
    s: *const ZsWeightOperator,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> ZsStatus {
    guard(|| {
        let entries = deref(s, "s")?.0.matrix().to_row_major();
        if re.is_null() || im.is_null() {
            return Err(Fail::Null("re/im"));
        }
        if len < entries.len() {
            return Err(Fail::Buffer(entries.len(), len));
        }
        for (k, z) in entries.iter().enumerate() {
            re.add(k).write(z.re);
            im.add(k).write(z.im);
        }
        Ok(())
    })
}

/// Validates and copies a `dim x dim` projector.
///
/// # Safety
/// `re` (and `im` unless null) must point to `dim * dim` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn zs_projector_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut ZsProjector,
) -> ZsStatus {
    guard(|| {
        let p = Projector::new(read_matrix(dim, re, im)?, "P")?;
        write_out(out, boxed(ZsProjector(p)), "out")
    })
}

/// Projector onto the listed computational basis vectors.
///
/// # Safety
/// `indices` must point to `count` readable values.
#[no_mangle]
pub unsafe extern "C" fn zs_projector_onto_basis(
    dim: usize,
    indices: *const usize,
    count: usize,
    out: *mut *mut ZsProjector,
) -> ZsStatus {
    guard(|| {
        if indices.is_null() && count > 0 {
            return Err(Fail::Null("indices"));
        }
        let idx = if count == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(indices, count)
        };
        let p = Projector::onto_basis(dim, idx, "P")?;
        write_out(out, boxed(ZsProjector(p)), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zs_projector_free(p: *mut ZsProjector) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `Tr(S P) / Tr S`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_probability_yes(
    s: *const ZsWeightOperator,
    p: *const ZsProjector,
    out: *mut f64,
) -> ZsStatus {
    guard(|| write_out(out, probability_yes(&deref(s, "s")?.0, &deref(p, "p")?.0)?, "out"))
}

/// `P S P + (1-P) S (1-P)` as a new handle.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_process1(
    s: *const ZsWeightOperator,
    p: *const ZsProjector,
    out: *mut *mut ZsWeightOperator,
) -> ZsStatus {
    guard(|| {
        let next = process1(&deref(s, "s")?.0, &deref(p, "p")?.0)?;
        write_out(out, boxed(ZsWeightOperator(next)), "out")
    })
}

/// Unnormalized `P S P` (Yes) or `(1-P) S (1-P)` (No) as a new handle.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_apply_answer(
    s: *const ZsWeightOperator,
    p: *const ZsProjector,
    answer: ZsAnswer,
    out: *mut *mut ZsWeightOperator,
) -> ZsStatus {
    guard(|| {
        let a = match answer {
            ZsAnswer::Yes => Answer::Yes,
            ZsAnswer::No => Answer::No,
        };
        let next = apply_answer(&deref(s, "s")?.0, &deref(p, "p")?.0, a)?;
        write_out(out, boxed(ZsWeightOperator(next)), "out")
    })
}

/// `exp(-iHd) S exp(iHd)` for a Hermitian `H` given row-major.
///
/// # Safety
/// `s` must be live, `h_re` (and `h_im` unless null) must hold `dim * dim`
/// doubles where `dim` is the state dimension, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_evolve_unitary(
    s: *const ZsWeightOperator,
    h_re: *const f64,
    h_im: *const f64,
    d: f64,
    out: *mut *mut ZsWeightOperator,
) -> ZsStatus {
    guard(|| {
        let s = &deref(s, "s")?.0;
        let h = Hamiltonian::new(read_matrix(s.dim(), h_re, h_im)?)?;
        write_out(out, boxed(ZsWeightOperator(evolve_unitary(s, &h, d)?)), "out")
    })
}

/// Protocol over `[0, total_time]` with `event_count` events. The Hamiltonian
/// has the projector's dimension.
///
/// # Safety
/// `p` must be live, `h_re` (and `h_im` unless null) must hold `dim * dim`
/// doubles, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_protocol_new(
    total_time: f64,
    event_count: usize,
    h_re: *const f64,
    h_im: *const f64,
    p: *const ZsProjector,
    out: *mut *mut ZsProtocol,
) -> ZsStatus {
    guard(|| {
        let p = deref(p, "p")?.0.clone();
        let h = Hamiltonian::new(read_matrix(p.dim(), h_re, h_im)?)?;
        let protocol = ZenoProtocol::new(total_time, event_count, h, p)?;
        write_out(out, boxed(ZsProtocol(protocol)), "out")
    })
}

/// Adds computational-basis dephasing at `rate`.
///
/// # Safety
/// `protocol` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn zs_protocol_set_dephasing(protocol: *mut ZsProtocol, rate: f64) -> ZsStatus {
    guard(|| {
        let handle = protocol.as_mut().ok_or(Fail::Null("protocol"))?;
        let channel = DephasingChannel::computational(handle.0.dim(), rate)?;
        handle.0 = handle.0.clone().with_dephasing(channel)?;
        Ok(())
    })
}

/// # Safety
/// `protocol` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zs_protocol_free(protocol: *mut ZsProtocol) {
    if !protocol.is_null() {
        drop(Box::from_raw(protocol));
    }
}

/// Survival probability from the answer-averaged evolution.
///
/// # Safety
/// Handles must be live and `survival` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_protocol_run_expected(
    protocol: *const ZsProtocol,
    initial: *const ZsWeightOperator,
    survival: *mut f64,
) -> ZsStatus {
    guard(|| {
        let run = run_expected(&deref(protocol, "protocol")?.0, &deref(initial, "initial")?.0)?;
        write_out(survival, run.point.survival, "survival")
    })
}

/// All-Yes fraction over `trajectories` sampled runs and its binomial
/// standard error. Identical arguments give identical results.
///
/// # Safety
/// Handles must be live and both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn zs_protocol_run_sampled(
    protocol: *const ZsProtocol,
    initial: *const ZsWeightOperator,
    trajectories: u64,
    root_seed: u64,
    survival: *mut f64,
    stderr: *mut f64,
) -> ZsStatus {
    guard(|| {
        let p = deref(protocol, "protocol")?.0.clone().with_mode(RunMode::Sampled {
            trajectories,
            root_seed,
        })?;
        let run = run_sampled(&p, &deref(initial, "initial")?.0)?;
        write_out(survival, run.point.survival, "survival")?;
        write_out(stderr, run.point.stderr.unwrap_or(f64::NAN), "stderr")
    })
}

/// Ion estimate from lab units (u, K, nm). Transit distance may be zero.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_ion_estimate(
    mass_u: f64,
    temperature_k: f64,
    channel_width_nm: f64,
    transit_distance_nm: f64,
    ion_diameter_nm: f64,
    out: *mut ZsEstimate,
) -> ZsStatus {
    guard(|| {
        let params = IonParameters::new(
            mass_u * ATOMIC_MASS_UNIT,
            temperature_k,
            channel_width_nm * 1e-9,
            transit_distance_nm * 1e-9,
            ion_diameter_nm * 1e-9,
        )?;
        let r = spread_at_trigger(&params);
        write_out(
            out,
            ZsEstimate {
                delta_v: r.delta_v,
                v_thermal: r.v_thermal,
                velocity_ratio: r.velocity_ratio,
                transit_time: r.transit_time,
                spread_at_trigger: r.spread_at_trigger,
                spread_to_ion_size: r.spread_to_ion_size,
            },
            "out",
        )
    })
}

/// Default calcium estimate.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_calcium_estimate(out: *mut ZsEstimate) -> ZsStatus {
    let ca = IonParameters::calcium();
    zs_ion_estimate(
        ca.mass / ATOMIC_MASS_UNIT,
        ca.temperature,
        ca.confinement_width * 1e9,
        ca.transit_distance * 1e9,
        ca.ion_diameter * 1e9,
        out,
    )
}

/// Writes the `2^terminal_count` release-pattern weights; bit `t` of the
/// index set means terminal `t` released.
///
/// # Safety
/// `weights` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn zs_branch_weights(
    terminal_count: u32,
    release_probability: f64,
    weights: *mut f64,
    len: usize,
) -> ZsStatus {
    guard(|| {
        let mixture = release_branch_mixture(&BranchConfig::new(terminal_count, release_probability)?);
        let w = mixture.weights();
        if weights.is_null() {
            return Err(Fail::Null("weights"));
        }
        if len < w.len() {
            return Err(Fail::Buffer(w.len(), len));
        }
        ptr::copy_nonoverlapping(w.as_ptr(), weights, w.len());
        Ok(())
    })
}
