//! C interface. Every call returns a `CgStatus`; on failure the message is
//! kept per thread and read back with `cg_last_error_message`.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Slots and windows are 1-based as in the Rust API.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use charging_games::atomic::{AtomicGame, EnumerationOptions, EquilibriumSet};
use charging_games::model::{
    AtomicInstance, ChargingWindow, GridCostFunction, NonatomicInstance, PricingFunction, TimeHorizon,
    UserClass,
};
use charging_games::nonatomic::{efficiency_nonatomic, solve_equilibrium, solve_symmetric_invariant, SolverOptions};
use charging_games::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidInstance = 3,
    InvalidCost = 4,
    AssumptionViolated = 5,
    BudgetExceeded = 6,
    NonConvergence = 7,
    RouteMismatch = 8,
    ConditionViolated = 9,
    CertificateFailed = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

/// A grid cost function.
pub struct CgCost(GridCostFunction);

/// An atomic game with identity pricing.
pub struct CgAtomicGame(AtomicGame);

/// The equilibrium configurations of an atomic game.
pub struct CgEquilibriumSet(EquilibriumSet);

pub struct CgNonatomicInstance(NonatomicInstance);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidInstance(_) | Error::InvalidProfile(_) => CgStatus::InvalidInstance,
            Error::InvalidCost(_) => CgStatus::InvalidCost,
            Error::AssumptionViolated { .. } => CgStatus::AssumptionViolated,
            Error::BudgetExceeded { .. } | Error::IterationBudgetExceeded { .. } => CgStatus::BudgetExceeded,
            Error::NonConvergence { .. } => CgStatus::NonConvergence,
            Error::RouteMismatch { .. } => CgStatus::RouteMismatch,
            Error::ConditionViolated(_) => CgStatus::ConditionViolated,
            Error::CertificateFailed(_) => CgStatus::CertificateFailed,
            _ => CgStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CgStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            CgStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_slice<T: Copy>(out: *mut T, len: usize, values: &[T]) -> Result<(), Failure> {
    if len < values.len() {
        return Err(Failure(
            CgStatus::BufferTooSmall,
            format!("buffer holds {len} entries, {} needed", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("output buffer"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn write_value<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output"));
    }
    *out = value;
    Ok(())
}

unsafe fn windows(
    arrivals: *const usize,
    departures: *const usize,
    durations: *const usize,
    count: usize,
) -> Result<Vec<ChargingWindow>, Failure> {
    let a = slice(arrivals, count, "arrivals")?;
    let d = slice(departures, count, "departures")?;
    let c = slice(durations, count, "durations")?;
    Ok((0..count).map(|i| ChargingWindow::new(a[i], d[i], c[i])).collect())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Bytes needed to hold the last error message, including the terminating NUL.
#[no_mangle]
pub extern "C" fn cg_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_bytes_with_nul().len())
}

/// Copies the last error message of this thread into `buffer`.
///
/// # Safety
/// `buffer` must be valid for `length` bytes.
#[no_mangle]
pub unsafe extern "C" fn cg_last_error_message(buffer: *mut c_char, length: usize) -> CgStatus {
    let bytes = LAST_ERROR.with(|e| e.borrow().as_bytes_with_nul().to_vec());
    if buffer.is_null() {
        return CgStatus::NullPointer;
    }
    if length < bytes.len() {
        return CgStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buffer, bytes.len());
    CgStatus::Ok
}

/// `f(L) = L^exponent`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_cost_power(exponent: f64, out: *mut *mut CgCost) -> CgStatus {
    guard(|| write_out(out, CgCost(GridCostFunction::power(exponent)?)))
}

/// `f(L) = sqrt(L)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_cost_sqrt(out: *mut *mut CgCost) -> CgStatus {
    guard(|| write_out(out, CgCost(GridCostFunction::sqrt())))
}

/// # Safety
/// `cost` must come from a `cg_cost_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn cg_cost_free(cost: *mut CgCost) {
    if !cost.is_null() {
        drop(Box::from_raw(cost));
    }
}

/// Atomic game with one window per player.
///
/// # Safety
/// `exogenous` must hold `slots` values and the window arrays `players` values each.
#[no_mangle]
pub unsafe extern "C" fn cg_atomic_game_new(
    slots: usize,
    exogenous: *const f64,
    power: f64,
    arrivals: *const usize,
    departures: *const usize,
    durations: *const usize,
    players: usize,
    cost: *const CgCost,
    out: *mut *mut CgAtomicGame,
) -> CgStatus {
    guard(|| {
        let cost = handle(cost, "cost")?;
        let exo = slice(exogenous, slots, "exogenous")?.to_vec();
        let players = windows(arrivals, departures, durations, players)?;
        let instance = AtomicInstance::new(TimeHorizon::new(slots)?, players, power, exo)?;
        write_out(out, CgAtomicGame(AtomicGame::new(instance, cost.0.clone(), PricingFunction::Identity)))
    })
}

/// # Safety
/// `game` must come from `cg_atomic_game_new`, or be null.
#[no_mangle]
pub unsafe extern "C" fn cg_atomic_game_free(game: *mut CgAtomicGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

fn options(budget: u64) -> EnumerationOptions {
    EnumerationOptions::default().with_budget(budget)
}

/// Enumerates the pure equilibria, scanning at most `budget` candidates.
/// A truncated scan fails with `BudgetExceeded`.
///
/// # Safety
/// `game` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_atomic_enumerate(
    game: *const CgAtomicGame,
    budget: u64,
    out: *mut *mut CgEquilibriumSet,
) -> CgStatus {
    guard(|| {
        let game = handle(game, "game")?;
        let set = game.0.enumerate_equilibria(&options(budget))?;
        if !set.complete {
            return Err(Failure(CgStatus::BudgetExceeded, format!("scan stopped after {} candidates", set.examined)));
        }
        write_out(out, CgEquilibriumSet(set))
    })
}

/// # Safety
/// `set` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_equilibrium_set_len(set: *const CgEquilibriumSet, count: *mut usize) -> CgStatus {
    guard(|| write_value(count, handle(set, "set")?.0.len()))
}

/// Occupancy vector of equilibrium `index` into `out`, which holds `length` entries.
///
/// # Safety
/// `set` must be a live handle and `out` valid for `length` entries.
#[no_mangle]
pub unsafe extern "C" fn cg_equilibrium_set_occupancy(
    set: *const CgEquilibriumSet,
    index: usize,
    out: *mut u32,
    length: usize,
) -> CgStatus {
    guard(|| {
        let set = handle(set, "set")?;
        let e = set.0.equilibria.get(index).ok_or_else(|| {
            Failure(CgStatus::InvalidArgument, format!("index {index} out of {} equilibria", set.0.len()))
        })?;
        write_slice(out, length, &e.configuration.occupancy)
    })
}

/// # Safety
/// `set` must come from `cg_atomic_enumerate`, or be null.
#[no_mangle]
pub unsafe extern "C" fn cg_equilibrium_set_free(set: *mut CgEquilibriumSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Worst equilibrium cost over optimal cost.
///
/// # Safety
/// `game` must be a live handle and `efficiency` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_atomic_efficiency(game: *const CgAtomicGame, budget: u64, efficiency: *mut f64) -> CgStatus {
    guard(|| {
        let report = handle(game, "game")?.0.efficiency(&options(budget))?;
        write_value(efficiency, report.efficiency)
    })
}

/// Share of configurations that are equilibria.
///
/// # Safety
/// `game` must be a live handle and `proportion` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_atomic_ne_proportion(game: *const CgAtomicGame, budget: u64, proportion: *mut f64) -> CgStatus {
    guard(|| write_value(proportion, handle(game, "game")?.0.ne_proportion(&options(budget))?))
}

/// Nonatomic instance with `classes` user classes whose weights sum to one.
///
/// # Safety
/// `exogenous` must hold `slots` values and the class arrays `classes` values each.
#[no_mangle]
pub unsafe extern "C" fn cg_nonatomic_instance_new(
    slots: usize,
    exogenous: *const f64,
    power: f64,
    weights: *const f64,
    arrivals: *const usize,
    departures: *const usize,
    durations: *const usize,
    classes: usize,
    out: *mut *mut CgNonatomicInstance,
) -> CgStatus {
    guard(|| {
        let exo = slice(exogenous, slots, "exogenous")?.to_vec();
        let w = slice(weights, classes, "weights")?;
        let classes = windows(arrivals, departures, durations, classes)?
            .into_iter()
            .zip(w)
            .map(|(window, &weight)| UserClass { weight, window })
            .collect();
        write_out(out, CgNonatomicInstance(NonatomicInstance::new(TimeHorizon::new(slots)?, classes, power, exo)?))
    })
}

/// # Safety
/// `instance` must come from `cg_nonatomic_instance_new`, or be null.
#[no_mangle]
pub unsafe extern "C" fn cg_nonatomic_instance_free(instance: *mut CgNonatomicInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Wardrop equilibrium: start mass per slot into `start_mass` (`length >= slots`)
/// and the reached gap into `gap`, which may be null.
///
/// # Safety
/// Handles must be live and `start_mass` valid for `length` entries.
#[no_mangle]
pub unsafe extern "C" fn cg_nonatomic_equilibrium(
    instance: *const CgNonatomicInstance,
    cost: *const CgCost,
    tolerance: f64,
    start_mass: *mut f64,
    length: usize,
    gap: *mut f64,
) -> CgStatus {
    guard(|| {
        let instance = handle(instance, "instance")?;
        let cost = handle(cost, "cost")?;
        let ne = solve_equilibrium(&instance.0, &cost.0, &SolverOptions::default().with_tolerance(tolerance))?;
        write_slice(start_mass, length, ne.profile.start_mass())?;
        if !gap.is_null() {
            *gap = ne.wardrop_gap;
        }
        Ok(())
    })
}

/// Equilibrium cost over optimal cost; needs a differentiable, strictly convex cost.
///
/// # Safety
/// Handles must be live and `efficiency` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_nonatomic_efficiency(
    instance: *const CgNonatomicInstance,
    cost: *const CgCost,
    tolerance: f64,
    efficiency: *mut f64,
) -> CgStatus {
    guard(|| {
        let instance = handle(instance, "instance")?;
        let cost = handle(cost, "cost")?;
        let e = efficiency_nonatomic(&instance.0, &cost.0, &SolverOptions::default().with_tolerance(tolerance))?;
        write_value(efficiency, e.efficiency)
    })
}

/// Cost-independent equilibrium of the symmetric game on a convex increasing
/// load, from the window linear system. Writes `slots - duration + 1` start masses.
///
/// # Safety
/// `exogenous` must hold `slots` values and `start_mass` be valid for `length` entries.
#[no_mangle]
pub unsafe extern "C" fn cg_symmetric_invariant(
    exogenous: *const f64,
    slots: usize,
    duration: usize,
    start_mass: *mut f64,
    length: usize,
) -> CgStatus {
    guard(|| {
        let exo = slice(exogenous, slots, "exogenous")?;
        let eq = solve_symmetric_invariant(exo, duration)?;
        write_slice(start_mass, length, &eq.system.solution)
    })
}
