//! C ABI for `cavity-cps`.
//!
//! Objects are opaque heap handles created by `*_new`/`*_compute` and
//! released with the matching `*_free`. Every fallible call returns a
//! [`CpsStatus`]; the message for the most recent failure on the calling
//! thread is available from [`cps_last_error`]. Matrices cross the boundary
//! in row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cavity_cps::analytic::k1_analytic;
use cavity_cps::fock::AtomLevel;
use cavity_cps::gates::{cps_interaction_time as interaction_time, epr_protocol, gate_report, CpsSimulation, FieldDensity};
use cavity_cps::propagator::kraus_at;
use cavity_cps::{CpsError, KrausSet, PhysParams, C64};
use nalgebra::DMatrix;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Regime = 3,
    Numerical = 4,
    DegenerateSector = 5,
    ZeroProbability = 6,
    Config = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for CpsComplex {
    fn from(z: C64) -> Self {
        CpsComplex { re: z.re, im: z.im }
    }
}

impl From<CpsComplex> for C64 {
    fn from(z: CpsComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Gate figures of merit for the conditional phase operation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpsGateReport {
    pub t_int: f64,
    pub probability: f64,
    /// NaN when the ground-state outcome has zero probability.
    pub fidelity: f64,
    pub deviation_diag: f64,
    pub deviation_offdiag: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpsEprReport {
    pub t_int: f64,
    pub probability: f64,
    pub fidelity: f64,
    pub concurrence: f64,
}

/// Opaque parameter set.
pub struct CpsParams(PhysParams);

/// Opaque set of Kraus field operators at one time.
pub struct CpsKraus(KrausSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &CpsError) -> CpsStatus {
    match e {
        CpsError::Domain(_) => CpsStatus::Domain,
        CpsError::Regime(_) => CpsStatus::Regime,
        CpsError::Numerical { .. } => CpsStatus::Numerical,
        CpsError::DegenerateSector(_) => CpsStatus::DegenerateSector,
        CpsError::ZeroProbability => CpsStatus::ZeroProbability,
        CpsError::Config(_) => CpsStatus::Config,
        CpsError::Io(_) => CpsStatus::Io,
    }
}

enum Failure {
    Status(CpsStatus, String),
    Core(CpsError),
}

impl From<CpsError> for Failure {
    fn from(e: CpsError) -> Self {
        Failure::Core(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(CpsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CpsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            CpsStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CpsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_matrix(m: &DMatrix<C64>, buf: *mut CpsComplex, len: usize) -> Result<(), Failure> {
    let needed = m.nrows() * m.ncols();
    if buf.is_null() {
        return Err(null("buf"));
    }
    if len < needed {
        return Err(Failure::Status(
            CpsStatus::BufferTooSmall,
            format!("buffer holds {len} entries, need {needed}"),
        ));
    }
    let out = std::slice::from_raw_parts_mut(buf, needed);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[i * m.ncols() + j] = m[(i, j)].into();
        }
    }
    Ok(())
}

/// Message for the most recent failure on this thread (empty after success).
/// Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn cps_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static description of a status code (any integer is accepted).
#[no_mangle]
pub extern "C" fn cps_status_message(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"ok",
        1 => c"null pointer argument",
        2 => c"argument outside the domain",
        3 => c"parameter regime assumption violated",
        4 => c"numerical check failed",
        5 => c"degenerate sector",
        6 => c"outcome has zero probability",
        7 => c"invalid configuration",
        8 => c"I/O error",
        9 => c"output buffer too small",
        10 => c"internal panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// Resonant parameters with `g_a = g_b = g_c = g`, `Ω_1 = Ω_2 = omega`
/// (real) and `N_max = 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cps_params_new_equal(g: f64, omega: f64, out: *mut *mut CpsParams) -> CpsStatus {
    guard(|| {
        let p = PhysParams::equal(g, omega);
        p.validate()?;
        write_out(out, Box::into_raw(Box::new(CpsParams(p))), "out")
    })
}

/// General parameter set.
///
/// # Safety
/// `g` must point to 3 values, `omega` to 2 and `detunings` to 6 (or be
/// null for resonance); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cps_params_new(
    g: *const CpsComplex,
    omega: *const CpsComplex,
    detunings: *const f64,
    n_max: usize,
    out: *mut *mut CpsParams,
) -> CpsStatus {
    guard(|| {
        if g.is_null() {
            return Err(null("g"));
        }
        if omega.is_null() {
            return Err(null("omega"));
        }
        let g = std::slice::from_raw_parts(g, 3);
        let omega = std::slice::from_raw_parts(omega, 2);
        let mut p = PhysParams::resonant(
            [g[0].into(), g[1].into(), g[2].into()],
            [omega[0].into(), omega[1].into()],
            n_max,
        );
        if !detunings.is_null() {
            p.detunings.copy_from_slice(std::slice::from_raw_parts(detunings, 6));
        }
        p.validate()?;
        write_out(out, Box::into_raw(Box::new(CpsParams(p))), "out")
    })
}

/// # Safety
/// `params` must come from a `cps_params_new*` call and not be used again.
#[no_mangle]
pub unsafe extern "C" fn cps_params_free(params: *mut CpsParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Dimension `(N_max + 1)^3` of the field space.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cps_params_field_dim(params: *const CpsParams, out: *mut usize) -> CpsStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        write_out(out, p.0.space()?.field_dim(), "out")
    })
}

/// Numerical Kraus operators at time `t`, atom starting in the ground state.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cps_kraus_compute(params: *const CpsParams, t: f64, out: *mut *mut CpsKraus) -> CpsStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let k = kraus_at(&p.0, t)?;
        write_out(out, Box::into_raw(Box::new(CpsKraus(k))), "out")
    })
}

/// # Safety
/// `kraus` must come from `cps_kraus_compute` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn cps_kraus_free(kraus: *mut CpsKraus) {
    if !kraus.is_null() {
        drop(Box::from_raw(kraus));
    }
}

/// Copy `K_level` (level 1..=6) row-major into `buf` of `len` entries.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cps_kraus_get(
    kraus: *const CpsKraus,
    level: u8,
    buf: *mut CpsComplex,
    len: usize,
) -> CpsStatus {
    guard(|| {
        let k = borrow(kraus, "kraus")?;
        let level = AtomLevel::new(level as usize)?;
        copy_matrix(k.0.get(level), buf, len)
    })
}

/// `‖Σ K_j† K_j − 1‖_max`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cps_kraus_completeness(kraus: *const CpsKraus, out: *mut f64) -> CpsStatus {
    guard(|| {
        let k = borrow(kraus, "kraus")?;
        write_out(out, k.0.completeness_residual(), "out")
    })
}

/// Diagonal of the closed-form `K_1(t)` (resonance required).
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cps_k1_analytic_diag(
    params: *const CpsParams,
    t: f64,
    buf: *mut f64,
    len: usize,
) -> CpsStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let k1 = k1_analytic(&p.0, t)?;
        let d = k1.nrows();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < d {
            return Err(Failure::Status(
                CpsStatus::BufferTooSmall,
                format!("buffer holds {len} entries, need {d}"),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buf, d);
        for (s, v) in out.iter_mut().enumerate() {
            *v = k1[(s, s)].re;
        }
        Ok(())
    })
}

/// Gate time `√2·π·|Ω|/|g|²·(1 + 2k)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cps_interaction_time(params: *const CpsParams, k: u32, out: *mut f64) -> CpsStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        write_out(out, interaction_time(&p.0, k)?, "out")
    })
}

/// Gate report at time `t` for an 8×8 row-major density `rho`
/// (null selects the default test state).
///
/// # Safety
/// `rho` must be null or point to 64 entries; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cps_gate_report(
    params: *const CpsParams,
    t: f64,
    rho: *const CpsComplex,
    out: *mut CpsGateReport,
) -> CpsStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let rho0 = if rho.is_null() {
            FieldDensity::xi()
        } else {
            let r = std::slice::from_raw_parts(rho, 64);
            FieldDensity::new(DMatrix::from_fn(8, 8, |i, j| r[i * 8 + j].into()))?
        };
        let t_int = interaction_time(&p.0, 0)?;
        let sim = CpsSimulation::new(&p.0)?;
        let r = gate_report(&sim.k1(t)?, &rho0, t_int)?;
        let report = CpsGateReport {
            t_int: r.t_int,
            probability: r.probability,
            fidelity: r.fidelity.unwrap_or(f64::NAN),
            deviation_diag: r.deviation_diag,
            deviation_offdiag: r.deviation_offdiag,
        };
        write_out(out, report, "out")
    })
}

/// Run the EPR preparation protocol (all couplings and Rabi magnitudes equal).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cps_epr_protocol(params: *const CpsParams, out: *mut CpsEprReport) -> CpsStatus {
    guard(|| {
        let p = borrow(params, "params")?;
        let o = epr_protocol(&p.0)?;
        let report = CpsEprReport {
            t_int: o.t_int,
            probability: o.probability,
            fidelity: o.fidelity,
            concurrence: o.concurrence,
        };
        write_out(out, report, "out")
    })
}
