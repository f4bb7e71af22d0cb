//! C ABI over the rdbench library.
//!
//! Groups and balls are opaque handles created and destroyed by this library.
//! Every fallible call returns an [`RdbStatus`]; on anything but `RDB_OK` the
//! message is available from [`rdb_last_error`] on the same thread until the
//! next call. Strings returned through `char **` belong to the caller and
//! must be released with [`rdb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rdbench::relhyp::{verify_star, GeodesicMode, PeripheralStructure, StarConstants};
use rdbench::workbench::{load_ball, run_experiment, save_ball, ExperimentConfig, RunContext};
use rdbench::{enumerate_ball, BallIndex, Error, GroupModel};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdbStatus {
    RdbOk = 0,
    RdbInvalidArgument = 1,
    RdbPropertyFailure = 2,
    RdbResource = 3,
    RdbIo = 4,
    RdbNullPointer = 5,
    RdbInternal = 6,
}

/// A group model.
pub struct RdbGroup {
    model: GroupModel,
}

/// A ball around the identity, tied to the group it was built from.
pub struct RdbBall {
    model: GroupModel,
    ball: BallIndex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RdbStatus {
    match e.exit_code() {
        2 => RdbStatus::RdbPropertyFailure,
        3 => RdbStatus::RdbResource,
        4 => RdbStatus::RdbIo,
        _ => RdbStatus::RdbInvalidArgument,
    }
}

struct Fail(RdbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RdbStatus::RdbNullPointer, format!("{what} is null"))
}

/// Runs `f`, records its error message and converts panics to `RDB_INTERNAL`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RdbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RdbStatus::RdbOk
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            RdbStatus::RdbInternal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(RdbStatus::RdbInvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(RdbStatus::RdbInternal, "string holds a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last failing call on this thread, or an empty string.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn rdb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rdb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a family descriptor such as `free(2)`.
///
/// # Safety
/// `descriptor` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rdb_group_new(descriptor: *const c_char, out: *mut *mut RdbGroup) -> RdbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = GroupModel::parse(str_arg(descriptor, "descriptor")?)?;
        *out = Box::into_raw(Box::new(RdbGroup { model }));
        Ok(())
    })
}

/// # Safety
/// `g` must come from [`rdb_group_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rdb_group_free(g: *mut RdbGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Normal form of a word, e.g. `aBba` becomes `aa` in a free group.
///
/// # Safety
/// Pointers must be valid; the result must be freed with [`rdb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rdb_group_normal_form(
    g: *const RdbGroup,
    word: *const c_char,
    out: *mut *mut c_char,
) -> RdbStatus {
    guard(|| {
        let g = handle(g, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let e = g.model.element(str_arg(word, "word")?)?;
        put_string(out, g.model.format(&e))
    })
}

/// Product of two words in normal form.
///
/// # Safety
/// Pointers must be valid; the result must be freed with [`rdb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rdb_group_multiply(
    g: *const RdbGroup,
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> RdbStatus {
    guard(|| {
        let g = handle(g, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let x = g.model.element(str_arg(a, "a")?)?;
        let y = g.model.element(str_arg(b, "b")?)?;
        put_string(out, g.model.format(&g.model.mul(&x, &y)))
    })
}

/// Word length of the element a word represents.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rdb_group_word_length(g: *const RdbGroup, word: *const c_char, out: *mut usize) -> RdbStatus {
    guard(|| {
        let g = handle(g, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = g.model.element(str_arg(word, "word")?)?.len();
        Ok(())
    })
}

/// Enumerates `B(radius)`.
///
/// # Safety
/// Pointers must be valid; the ball must be freed with [`rdb_ball_free`].
#[no_mangle]
pub unsafe extern "C" fn rdb_ball_new(g: *const RdbGroup, radius: usize, out: *mut *mut RdbBall) -> RdbStatus {
    guard(|| {
        let g = handle(g, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ball = enumerate_ball(&g.model, radius)?;
        *out = Box::into_raw(Box::new(RdbBall {
            model: g.model.clone(),
            ball,
        }));
        Ok(())
    })
}

/// Loads a ball written by [`rdb_ball_save`] or the CLI cache.
///
/// # Safety
/// Pointers must be valid; the ball must be freed with [`rdb_ball_free`].
#[no_mangle]
pub unsafe extern "C" fn rdb_ball_load(g: *const RdbGroup, path: *const c_char, out: *mut *mut RdbBall) -> RdbStatus {
    guard(|| {
        let g = handle(g, "group")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let ball = load_ball(&g.model, Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(RdbBall {
            model: g.model.clone(),
            ball,
        }));
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rdb_ball_save(b: *const RdbBall, path: *const c_char) -> RdbStatus {
    guard(|| {
        let b = handle(b, "ball")?;
        save_ball(&b.ball, Path::new(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `b` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn rdb_ball_free(b: *mut RdbBall) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Number of elements in the ball.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rdb_ball_size(b: *const RdbBall, out: *mut usize) -> RdbStatus {
    guard(|| {
        let b = handle(b, "ball")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = b.ball.len();
        Ok(())
    })
}

/// Number of elements of length exactly `k`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rdb_ball_sphere_size(b: *const RdbBall, k: usize, out: *mut usize) -> RdbStatus {
    guard(|| {
        let b = handle(b, "ball")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if k > b.ball.radius() {
            return Err(Fail(
                RdbStatus::RdbInvalidArgument,
                format!("sphere {k} lies outside a ball of radius {}", b.ball.radius()),
            ));
        }
        *out = b.ball.sphere_size(k);
        Ok(())
    })
}

/// Element of the given ShortLex rank, as a normal-form word.
///
/// # Safety
/// Pointers must be valid; the result must be freed with [`rdb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rdb_ball_element(b: *const RdbBall, rank: usize, out: *mut *mut c_char) -> RdbStatus {
    guard(|| {
        let b = handle(b, "ball")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if rank >= b.ball.len() {
            return Err(Fail(
                RdbStatus::RdbInvalidArgument,
                format!("rank {rank} out of range for {} elements", b.ball.len()),
            ));
        }
        put_string(out, b.model.format(b.ball.element(rank)))
    })
}

/// Checks every canonical-geodesic triangle in `B(radius)` at `(sigma, delta)`.
///
/// Returns `RDB_OK` on pass and `RDB_PROPERTY_FAILURE` on failure, in which
/// case `counterexample` (if not null) receives the failing triangle as three
/// space-separated words.
///
/// # Safety
/// Pointers must be valid; `counterexample` may be null.
#[no_mangle]
pub unsafe extern "C" fn rdb_verify_star(
    b: *const RdbBall,
    peripheral: *const c_char,
    sigma: usize,
    delta: usize,
    radius: usize,
    counterexample: *mut *mut c_char,
) -> RdbStatus {
    guard(|| {
        let b = handle(b, "ball")?;
        let per = PeripheralStructure::parse(&b.model, str_arg(peripheral, "peripheral")?)?;
        let rep = verify_star(
            &b.model,
            &per,
            StarConstants::new(sigma, delta),
            &b.ball,
            radius,
            GeodesicMode::Canonical,
        )?;
        if !counterexample.is_null() {
            *counterexample = ptr::null_mut();
        }
        match rep.counterexample {
            None => Ok(()),
            Some(t) => {
                let words: Vec<String> = t.iter().map(|e| b.model.format(e)).collect();
                let msg = words.join(" ");
                if !counterexample.is_null() {
                    put_string(counterexample, msg.clone())?;
                }
                Err(Fail(RdbStatus::RdbPropertyFailure, format!("failing triangle {msg}")))
            }
        }
    })
}

/// Runs an experiment from TOML text and returns the JSON report.
///
/// The status is `RDB_OK` when the experiment passes and
/// `RDB_PROPERTY_FAILURE` when it fails; in both cases `report` receives the
/// report. `cache_dir` may be null.
///
/// # Safety
/// Pointers must be valid; the result must be freed with [`rdb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rdb_run_experiment(
    config_toml: *const c_char,
    cache_dir: *const c_char,
    report: *mut *mut c_char,
) -> RdbStatus {
    guard(|| {
        if report.is_null() {
            return Err(null("report"));
        }
        let cfg = ExperimentConfig::from_toml(str_arg(config_toml, "config")?, None)?;
        let ctx = RunContext {
            cache_dir: if cache_dir.is_null() {
                None
            } else {
                Some(str_arg(cache_dir, "cache_dir")?.into())
            },
        };
        let rep = run_experiment(&cfg, &ctx)?;
        put_string(report, rep.to_json())?;
        if rep.exit_code() == 0 {
            Ok(())
        } else {
            Err(Fail(
                RdbStatus::RdbPropertyFailure,
                format!("{} failed", cfg.kind.name()),
            ))
        }
    })
}
