//! C ABI over `correq`.
//!
//! Games and results are opaque heap handles released with their `_free`
//! function. Every fallible call returns a `CorreqStatus`; on failure the
//! message is available from `correq_last_error` on the same thread.
//! Panics never cross the boundary and are reported as `CORREQ_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use correq::game::{load_game, Game};
use correq::solvers::{solve, Engine, EquilibriumProblem, EquilibriumResult, Objective, Prepared, SolveOptions, SolverError};
use correq::triggers::Concept;
use correq::zoo::default_manifest;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorreqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LoadFailed = 3,
    BudgetExceeded = 4,
    CertificationFailed = 5,
    SolverFailed = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorreqConcept {
    Nfcce = 0,
    Efcce = 1,
    Efce = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorreqEngine {
    Dag = 0,
    Colgen = 1,
    Auto = 2,
}

/// Opaque game handle.
pub struct CorreqGame {
    game: Game,
}

/// Opaque solve result.
pub struct CorreqResult {
    result: EquilibriumResult,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let c = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: CorreqStatus, msg: impl ToString) -> CorreqStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> CorreqStatus) -> CorreqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CorreqStatus::Panic, msg)
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, CorreqStatus> {
    if s.is_null() {
        return Err(fail(CorreqStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(CorreqStatus::InvalidArgument, "string is not UTF-8"))
}

unsafe fn emit_game(out: *mut *mut CorreqGame, game: Game) -> CorreqStatus {
    *out = Box::into_raw(Box::new(CorreqGame { game }));
    CorreqStatus::Ok
}

/// Message of the last failure on this thread. Valid until the next failing
/// call on the same thread; never null.
#[no_mangle]
pub extern "C" fn correq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Generate a built-in benchmark such as "2RS12" or "3K3".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn correq_game_from_manifest(name: *const c_char, out: *mut *mut CorreqGame) -> CorreqStatus {
    guard(|| {
        if out.is_null() {
            return fail(CorreqStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let name = match text(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        match default_manifest().generate(name) {
            Ok(g) => emit_game(out, g),
            Err(e) => fail(CorreqStatus::LoadFailed, e),
        }
    })
}

/// Parse a game from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn correq_game_from_json(json: *const c_char, out: *mut *mut CorreqGame) -> CorreqStatus {
    guard(|| {
        if out.is_null() {
            return fail(CorreqStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let json = match text(json) {
            Ok(j) => j,
            Err(s) => return s,
        };
        match load_game(json.as_bytes()) {
            Ok(g) => emit_game(out, g),
            Err(e) => fail(CorreqStatus::LoadFailed, e),
        }
    })
}

/// # Safety
/// `game` must come from a `correq_game_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn correq_game_free(game: *mut CorreqGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// 0 for a null handle.
///
/// # Safety
/// `game` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn correq_game_num_players(game: *const CorreqGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.num_players())
}

/// 0 for a null handle.
///
/// # Safety
/// `game` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn correq_game_num_terminals(game: *const CorreqGame) -> usize {
    game.as_ref().map_or(0, |g| g.game.num_terminals())
}

/// Optimal equilibrium of `game`. With `weights` null the objective is
/// social welfare, otherwise `Σ weights[i] u_i` over `num_weights` players.
///
/// # Safety
/// `game` must be a live handle, `weights` null or readable for
/// `num_weights` doubles, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn correq_solve(
    game: *const CorreqGame,
    concept: CorreqConcept,
    engine: CorreqEngine,
    weights: *const f64,
    num_weights: usize,
    out: *mut *mut CorreqResult,
) -> CorreqStatus {
    guard(|| {
        if out.is_null() {
            return fail(CorreqStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(game) = game.as_ref() else {
            return fail(CorreqStatus::NullPointer, "null game");
        };
        let objective = if weights.is_null() {
            Objective::SocialWelfare
        } else {
            if num_weights != game.game.num_players() {
                return fail(
                    CorreqStatus::InvalidArgument,
                    format!("{num_weights} weights for {} players", game.game.num_players()),
                );
            }
            Objective::Weights(std::slice::from_raw_parts(weights, num_weights).to_vec())
        };
        let concept = match concept {
            CorreqConcept::Nfcce => Concept::Nfcce,
            CorreqConcept::Efcce => Concept::Efcce,
            CorreqConcept::Efce => Concept::Efce,
        };
        let engine = match engine {
            CorreqEngine::Dag => Engine::Dag,
            CorreqEngine::Colgen => Engine::Colgen,
            CorreqEngine::Auto => Engine::Auto,
        };
        let problem = EquilibriumProblem { game: game.game.clone(), concept, objective };
        let prep = match Prepared::new(&problem) {
            Ok(p) => p,
            Err(e) => return fail(CorreqStatus::LoadFailed, e),
        };
        match solve(&problem, &prep, engine, &SolveOptions::default()) {
            Ok(result) => {
                let json = CString::new(result.to_json(&prep, true).to_string()).unwrap_or_default();
                *out = Box::into_raw(Box::new(CorreqResult { result, json }));
                CorreqStatus::Ok
            }
            Err(e @ SolverError::Budget { .. }) => fail(CorreqStatus::BudgetExceeded, e),
            Err(e @ SolverError::Certification { .. }) => fail(CorreqStatus::CertificationFailed, e),
            Err(e) => fail(CorreqStatus::SolverFailed, e),
        }
    })
}

/// NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn correq_result_value(result: *const CorreqResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.result.value)
}

/// Largest gain of any trigger deviation; NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn correq_result_certified_benefit(result: *const CorreqResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.result.certified_benefit)
}

/// Expected utility of a 0-based player; NaN when out of range.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn correq_result_utility(result: *const CorreqResult, player: usize) -> f64 {
    result.as_ref().and_then(|r| r.result.utilities.get(player).copied()).unwrap_or(f64::NAN)
}

/// Result JSON including the plan. Owned by the result handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn correq_result_json(result: *const CorreqResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `result` must come from `correq_solve` or be null.
#[no_mangle]
pub unsafe extern "C" fn correq_result_free(result: *mut CorreqResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
