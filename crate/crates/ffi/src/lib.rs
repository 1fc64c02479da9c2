//! C ABI for the steady Hall-MHD solver.
//!
//! Conventions:
//! * opaque handles (`HsConfig`, `HsSolveResult`) created and destroyed here;
//! * every fallible call returns an [`HsStatus`] code; `HS_OK` is zero;
//! * the last error message is kept in thread-local storage and retrieved
//!   with [`hs_last_error_message`];
//! * strings are NUL-terminated UTF-8.

use hall_steady::config::SolverConfig;
use hall_steady::driver::{smallness_report, solve_hall_mhd, HallState, IterationReport};
use hall_steady::elliptic::DirectSolver;
use hall_steady::error::Error;
use hall_steady::grid::{FaceField, Grid, NormKind};
use hall_steady::mms::ManufacturedSolution;

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;

/// Status codes; aligned with the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    HsOk = 0,
    /// Invalid configuration, malformed input, or I/O failure.
    HsErrConfig = 2,
    /// Solver failure: non-convergence of an inner solve, compatibility
    /// violation, or non-finite values.
    HsErrSolver = 3,
    /// A required pointer argument was NULL.
    HsErrNullArgument = 4,
    /// A string argument was not valid UTF-8.
    HsErrUtf8 = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> HsStatus {
    match err {
        Error::Config(_) | Error::InvalidGrid(_) | Error::InvalidSolution(_) | Error::Io(_) => {
            HsStatus::HsErrConfig
        }
        _ => HsStatus::HsErrSolver,
    }
}

/// Opaque solver configuration.
pub struct HsConfig {
    inner: SolverConfig,
}

/// Opaque solve artifacts: final state, iteration report, and the forcing
/// the run used.
pub struct HsSolveResult {
    state: HallState,
    report: IterationReport,
    f: FaceField,
    g: FaceField,
    config: SolverConfig,
}

/// Message of the most recent error on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// New configuration with the documented defaults.
#[no_mangle]
pub extern "C" fn hs_config_new() -> *mut HsConfig {
    Box::into_raw(Box::new(HsConfig {
        inner: SolverConfig::default(),
    }))
}

/// Parse a full key = value configuration text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn hs_config_parse(text: *const c_char, out: *mut *mut HsConfig) -> HsStatus {
    if text.is_null() || out.is_null() {
        set_error("NULL argument to hs_config_parse");
        return HsStatus::HsErrNullArgument;
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("configuration text is not UTF-8");
            return HsStatus::HsErrUtf8;
        }
    };
    match SolverConfig::parse(text) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(HsConfig { inner: cfg }));
            HsStatus::HsOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Set one key to a value, using the same keys as the configuration file.
///
/// # Safety
/// `cfg` must be a live handle from this library; `key` and `value` must be
/// valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn hs_config_set(
    cfg: *mut HsConfig,
    key: *const c_char,
    value: *const c_char,
) -> HsStatus {
    if cfg.is_null() || key.is_null() || value.is_null() {
        set_error("NULL argument to hs_config_set");
        return HsStatus::HsErrNullArgument;
    }
    let (key, value) = match (CStr::from_ptr(key).to_str(), CStr::from_ptr(value).to_str()) {
        (Ok(k), Ok(v)) => (k, v),
        _ => {
            set_error("key or value is not UTF-8");
            return HsStatus::HsErrUtf8;
        }
    };
    // Reuse the file parser: serialize the current config, override one key.
    let cfg = &mut *cfg;
    let mut text = cfg.inner.to_text();
    text.push_str(&format!("{key} = {value}\n"));
    match SolverConfig::parse(&text) {
        Ok(parsed) => {
            cfg.inner = parsed;
            HsStatus::HsOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// # Safety
/// `cfg` must be a handle previously returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_config_free(cfg: *mut HsConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Solve the steady problem with the configured forcing. On success the
/// result handle is written to `out`. Non-convergence within the iteration
/// cap is reported through the result handle, not as an error.
///
/// # Safety
/// `cfg` must be a live configuration handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hs_solve(cfg: *const HsConfig, out: *mut *mut HsSolveResult) -> HsStatus {
    if cfg.is_null() || out.is_null() {
        set_error("NULL argument to hs_solve");
        return HsStatus::HsErrNullArgument;
    }
    let cfg = (*cfg).inner;
    let run = || -> Result<HsSolveResult, Error> {
        cfg.validate_for_solve()?;
        let grid = Grid::new(cfg.n)?;
        let ds = DirectSolver::new(&grid);
        let (f, g) = match cfg.forcing.family {
            hall_steady::config::ForcingFamily::Zero => {
                (FaceField::zeros(&grid), FaceField::zeros(&grid))
            }
            hall_steady::config::ForcingFamily::Mms => {
                let sol = ManufacturedSolution::from_config(&cfg)?;
                sol.forcing(&grid, cfg.mu, cfg.forcing.mode, &ds)?
            }
        };
        let (state, report) = solve_hall_mhd(&f, &g, &cfg, None, &ds)?;
        Ok(HsSolveResult {
            state,
            report,
            f,
            g,
            config: cfg,
        })
    };
    match run() {
        Ok(res) => {
            *out = Box::into_raw(Box::new(res));
            HsStatus::HsOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// 1 if the Picard iteration converged, 0 otherwise.
///
/// # Safety
/// `res` must be a live result handle.
#[no_mangle]
pub unsafe extern "C" fn hs_result_converged(res: *const HsSolveResult) -> i32 {
    if res.is_null() {
        return 0;
    }
    (*res).report.converged as i32
}

/// Number of Picard iterations performed.
///
/// # Safety
/// `res` must be a live result handle.
#[no_mangle]
pub unsafe extern "C" fn hs_result_iterations(res: *const HsSolveResult) -> usize {
    if res.is_null() {
        return 0;
    }
    (*res).report.iterations
}

/// Relative nonlinear residual of the returned state.
///
/// # Safety
/// `res` must be a live result handle.
#[no_mangle]
pub unsafe extern "C" fn hs_result_final_residual(res: *const HsSolveResult) -> f64 {
    if res.is_null() {
        return f64::NAN;
    }
    (*res).report.final_residual
}

/// Named solution norms.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsNorm {
    HsNormUL2 = 0,
    HsNormUH1 = 1,
    HsNormBL2 = 2,
    HsNormBH1 = 3,
    HsNormBW1Q = 4,
    HsNormPL2 = 5,
}

/// Query a norm of the solution state; NaN on a bad handle.
///
/// # Safety
/// `res` must be a live result handle.
#[no_mangle]
pub unsafe extern "C" fn hs_result_norm(res: *const HsSolveResult, which: HsNorm) -> f64 {
    if res.is_null() {
        return f64::NAN;
    }
    let r = &*res;
    let q1 = r.config.q1();
    match which {
        HsNorm::HsNormUL2 => hall_steady::grid::norm(&r.state.u, NormKind::L2, 2.0),
        HsNorm::HsNormUH1 => hall_steady::grid::norm(&r.state.u, NormKind::H1, 2.0),
        HsNorm::HsNormBL2 => hall_steady::grid::norm(&r.state.b, NormKind::L2, 2.0),
        HsNorm::HsNormBH1 => hall_steady::grid::norm(&r.state.b, NormKind::H1, 2.0),
        HsNorm::HsNormBW1Q => hall_steady::grid::norm(&r.state.b, NormKind::W1q, q1),
        HsNorm::HsNormPL2 => hall_steady::grid::norm(&r.state.p, NormKind::L2, 2.0),
    }
}

/// Write u.dump, p.dump, b.dump, iterations.csv, report.txt, and
/// diagnostics.txt into `dir` (created if missing), same formats as the CLI.
///
/// # Safety
/// `res` must be a live result handle; `dir` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hs_result_write_outputs(
    res: *const HsSolveResult,
    dir: *const c_char,
) -> HsStatus {
    if res.is_null() || dir.is_null() {
        set_error("NULL argument to hs_result_write_outputs");
        return HsStatus::HsErrNullArgument;
    }
    let dir = match CStr::from_ptr(dir).to_str() {
        Ok(d) => PathBuf::from(d),
        Err(_) => {
            set_error("directory path is not UTF-8");
            return HsStatus::HsErrUtf8;
        }
    };
    let r = &*res;
    let write = || -> Result<(), Error> {
        std::fs::create_dir_all(&dir)?;
        hall_steady::io::write_face(&dir.join("u.dump"), &r.state.u)?;
        hall_steady::io::write_scalar(&dir.join("p.dump"), &r.state.p)?;
        hall_steady::io::write_edge(&dir.join("b.dump"), &r.state.b)?;
        hall_steady::io::write_text(&dir.join("iterations.csv"), &r.report.to_csv())?;
        hall_steady::io::write_report(&dir.join("report.txt"), &r.report.to_key_values())?;
        let grid = Grid::new(r.config.n)?;
        let ds = DirectSolver::new(&grid);
        let diag = smallness_report(&r.f, &r.g, &r.config, Some(&r.report), &ds);
        hall_steady::io::write_report(&dir.join("diagnostics.txt"), &diag.to_key_values())?;
        Ok(())
    };
    match write() {
        Ok(()) => HsStatus::HsOk,
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// # Safety
/// `res` must be a handle previously returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_result_free(res: *mut HsSolveResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Run the operator invariant suites at resolution `n`; returns `HS_OK` when
/// every check passes.
#[no_mangle]
pub extern "C" fn hs_check_operators(n: usize, seed: u64) -> HsStatus {
    match hall_steady::checks::run_operator_checks(n, seed, 100) {
        Ok(checks) => {
            for c in &checks {
                if !c.passed() {
                    set_error(&format!(
                        "operator check failed: {} (defect {:.3e}, bound {:.3e})",
                        c.name, c.defect, c.bound
                    ));
                    return HsStatus::HsErrSolver;
                }
            }
            HsStatus::HsOk
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}
