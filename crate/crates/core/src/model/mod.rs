//! Game data shared by the atomic and nonatomic charging games, plus the
//! load, cost, utility and potential formulas evaluated directly from it.
//!
//! Slots are numbered `1..=T` in every public API; vectors indexed by slot
//! store slot `t` at position `t - 1`. A charging session that starts at `s`
//! with duration `C` occupies slots `s..=s + C - 1`, and the start slots open
//! to a window `(a, d, C)` are `a..=d - C + 1`.

mod cost;
pub mod file;
mod value;

use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;

pub use cost::{GridCostFunction, PricingFunction, Term};
pub use value::Value;

use crate::error::{Error, Result};

/// Tolerance on the class weights summing to one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance on per-class start distributions summing to one.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TimeHorizon(usize);

impl TimeHorizon {
    pub fn new(slots: usize) -> Result<Self> {
        if slots == 0 {
            return Err(Error::InvalidInstance("time horizon needs at least one slot".into()));
        }
        Ok(Self(slots))
    }

    pub fn slots(self) -> usize {
        self.0
    }
}

/// Arrival slot, departure slot and charging duration of one EV or class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ChargingWindow {
    pub arrival: usize,
    pub departure: usize,
    pub duration: usize,
}

impl ChargingWindow {
    pub fn new(arrival: usize, departure: usize, duration: usize) -> Self {
        Self {
            arrival,
            departure,
            duration,
        }
    }

    fn validate(&self, horizon: TimeHorizon, who: &str) -> Result<()> {
        let t = horizon.slots();
        if self.duration == 0 {
            return Err(Error::InvalidInstance(format!("{who}: duration must be at least 1")));
        }
        if self.arrival == 0 || self.arrival > t || self.departure == 0 || self.departure > t {
            return Err(Error::InvalidInstance(format!(
                "{who}: arrival {} and departure {} must lie in 1..={t}",
                self.arrival, self.departure
            )));
        }
        if self.arrival + self.duration > self.departure + 1 {
            return Err(Error::InvalidInstance(format!(
                "{who}: empty action set (a={}, d={}, C={})",
                self.arrival, self.departure, self.duration
            )));
        }
        Ok(())
    }

    pub fn first_start(&self) -> usize {
        self.arrival
    }

    pub fn last_start(&self) -> usize {
        self.departure + 1 - self.duration
    }

    pub fn action_set(&self) -> RangeInclusive<usize> {
        self.first_start()..=self.last_start()
    }

    pub fn action_count(&self) -> usize {
        self.last_start() - self.first_start() + 1
    }

    /// Slots occupied when charging starts at `start`.
    pub fn charging_slots(&self, start: usize) -> RangeInclusive<usize> {
        start..=start + self.duration - 1
    }
}

/// Start slots `a..=d - C + 1`.
pub fn action_set(arrival: usize, departure: usize, duration: usize) -> RangeInclusive<usize> {
    ChargingWindow::new(arrival, departure, duration).action_set()
}

fn validate_exogenous(horizon: TimeHorizon, exogenous: &[f64]) -> Result<()> {
    if exogenous.len() != horizon.slots() {
        return Err(Error::InvalidInstance(format!(
            "exogenous load has {} entries, expected {}",
            exogenous.len(),
            horizon.slots()
        )));
    }
    if let Some(bad) = exogenous.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidInstance(format!(
            "exogenous load entries must be finite and non-negative, got {bad}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomicInstance {
    horizon: TimeHorizon,
    players: Vec<ChargingWindow>,
    power: f64,
    exogenous: Vec<f64>,
}

impl AtomicInstance {
    pub fn new(
        horizon: TimeHorizon,
        players: Vec<ChargingWindow>,
        power: f64,
        exogenous: Vec<f64>,
    ) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::InvalidInstance("at least one player is required".into()));
        }
        if !(power.is_finite() && power >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "charging power must be finite and non-negative, got {power}"
            )));
        }
        for (i, p) in players.iter().enumerate() {
            p.validate(horizon, &format!("player {}", i + 1))?;
        }
        validate_exogenous(horizon, &exogenous)?;
        Ok(Self {
            horizon,
            players,
            power,
            exogenous,
        })
    }

    /// `players` EVs sharing the window `(1, T, C)`.
    pub fn symmetric(
        slots: usize,
        players: usize,
        duration: usize,
        power: f64,
        exogenous: Vec<f64>,
    ) -> Result<Self> {
        let window = ChargingWindow::new(1, slots, duration);
        Self::new(
            TimeHorizon::new(slots)?,
            vec![window; players],
            power,
            exogenous,
        )
    }

    pub fn horizon(&self) -> TimeHorizon {
        self.horizon
    }

    pub fn slots(&self) -> usize {
        self.horizon.slots()
    }

    pub fn players(&self) -> &[ChargingWindow] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn exogenous(&self) -> &[f64] {
        &self.exogenous
    }

    /// Start slots of player `i` (zero-based player index).
    pub fn action_set(&self, i: usize) -> RangeInclusive<usize> {
        self.players[i].action_set()
    }

    pub fn is_symmetric(&self) -> bool {
        self.players.windows(2).all(|w| w[0] == w[1])
    }

    pub fn profile_space_size(&self) -> BigUint {
        self.players
            .iter()
            .fold(BigUint::one(), |acc, p| acc * BigUint::from(p.action_count()))
    }

    pub fn total_duration(&self) -> usize {
        self.players.iter().map(|p| p.duration).sum()
    }

    /// Integer exogenous loads and power, so every load `L^exo_t + P v` is an integer.
    pub fn has_integral_loads(&self) -> bool {
        let integral = |v: f64| v.fract() == 0.0 && v.abs() < 9.0e15;
        integral(self.power) && self.exogenous.iter().all(|&v| integral(v))
    }

    pub(crate) fn exact_load(&self, slot: usize, count: u32) -> BigInt {
        BigInt::from(self.exogenous[slot - 1] as i64) + BigInt::from(self.power as i64) * count
    }
}

/// Start slot chosen by each player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StrategyProfile {
    starts: Vec<usize>,
}

impl StrategyProfile {
    pub fn new(instance: &AtomicInstance, starts: Vec<usize>) -> Result<Self> {
        if starts.len() != instance.player_count() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} entries for {} players",
                starts.len(),
                instance.player_count()
            )));
        }
        for (i, &s) in starts.iter().enumerate() {
            if !instance.action_set(i).contains(&s) {
                return Err(Error::InvalidProfile(format!(
                    "player {} cannot start at slot {s} (allowed {:?})",
                    i + 1,
                    instance.action_set(i)
                )));
            }
        }
        Ok(Self { starts })
    }

    /// Every player at its earliest start.
    pub fn earliest(instance: &AtomicInstance) -> Self {
        Self {
            starts: instance.players.iter().map(|p| p.first_start()).collect(),
        }
    }

    pub(crate) fn from_starts_unchecked(starts: Vec<usize>) -> Self {
        Self { starts }
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn start(&self, i: usize) -> usize {
        self.starts[i]
    }

    /// The profile with player `i` moved to `start`; the caller keeps `start` in the action set.
    pub fn with_start(&self, i: usize, start: usize) -> Self {
        let mut starts = self.starts.clone();
        starts[i] = start;
        Self { starts }
    }

    pub(crate) fn set_start(&mut self, i: usize, start: usize) {
        self.starts[i] = start;
    }
}

/// Occupancy `n` and start counts `ñ`. Ordered by occupancy first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ChargingConfiguration {
    pub occupancy: Vec<u32>,
    pub start_counts: Vec<u32>,
}

impl ChargingConfiguration {
    /// Configuration of identical players with duration `duration` from start counts.
    pub fn from_start_counts(start_counts: Vec<u32>, duration: usize) -> Self {
        let slots = start_counts.len();
        let mut occupancy = vec![0u32; slots];
        let mut running = 0u32;
        for t in 0..slots {
            running += start_counts[t];
            if t >= duration {
                running -= start_counts[t - duration];
            }
            occupancy[t] = running;
        }
        Self {
            occupancy,
            start_counts,
        }
    }
}

pub fn occupancy(instance: &AtomicInstance, profile: &StrategyProfile) -> ChargingConfiguration {
    let slots = instance.slots();
    let mut start_counts = vec![0u32; slots];
    let mut occupancy = vec![0u32; slots];
    for (player, &s) in instance.players.iter().zip(&profile.starts) {
        start_counts[s - 1] += 1;
        for t in player.charging_slots(s) {
            occupancy[t - 1] += 1;
        }
    }
    ChargingConfiguration {
        occupancy,
        start_counts,
    }
}

pub fn load_atomic(instance: &AtomicInstance, configuration: &ChargingConfiguration) -> Vec<f64> {
    instance
        .exogenous
        .iter()
        .zip(&configuration.occupancy)
        .map(|(&exo, &n)| exo + instance.power * f64::from(n))
        .collect()
}

fn exact_inputs(instance: &AtomicInstance, f: &GridCostFunction) -> bool {
    f.is_integral() && instance.has_integral_loads()
}

fn slot_cost(instance: &AtomicInstance, f: &GridCostFunction, slot: usize, count: u32, exact: bool) -> Value {
    if exact {
        let load = instance.exact_load(slot, count);
        Value::Exact(f.eval_exact(&load).expect("integral cost"))
    } else {
        Value::Approx(f.eval(instance.exogenous[slot - 1] + instance.power * f64::from(count)))
    }
}

fn sum_values(values: impl Iterator<Item = Value>, exact: bool) -> Value {
    if exact {
        Value::Exact(values.map(|v| match v {
            Value::Exact(x) => x,
            Value::Approx(_) => unreachable!(),
        }).sum())
    } else {
        Value::Approx(values.map(|v| v.to_f64()).sum())
    }
}

/// Total grid cost `sum_t f(L_t)`; exact for integral cost and loads.
pub fn grid_total_cost(
    instance: &AtomicInstance,
    f: &GridCostFunction,
    configuration: &ChargingConfiguration,
) -> Value {
    let exact = exact_inputs(instance, f);
    sum_values(
        (1..=instance.slots()).map(|t| slot_cost(instance, f, t, configuration.occupancy[t - 1], exact)),
        exact,
    )
}

/// Utility of player `i`: minus the perceived cost of the grid cost over its own charging slots.
pub fn utility_atomic(
    instance: &AtomicInstance,
    f: &GridCostFunction,
    g: &PricingFunction,
    profile: &StrategyProfile,
    i: usize,
) -> Value {
    let config = occupancy(instance, profile);
    let exact = exact_inputs(instance, f);
    let own = sum_values(
        instance.players[i]
            .charging_slots(profile.starts[i])
            .map(|t| slot_cost(instance, f, t, config.occupancy[t - 1], exact)),
        exact,
    );
    match (own, g.is_identity()) {
        (Value::Exact(c), true) => Value::Exact(-c),
        (own, _) => Value::Approx(-g.apply(own.to_f64())),
    }
}

/// `-sum_t sum_{v=0}^{n_t} f(L^exo_t + P v)`.
pub fn potential_atomic(
    instance: &AtomicInstance,
    f: &GridCostFunction,
    configuration: &ChargingConfiguration,
) -> Value {
    let exact = exact_inputs(instance, f);
    let total = sum_values(
        (1..=instance.slots()).flat_map(|t| {
            (0..=configuration.occupancy[t - 1]).map(move |v| slot_cost(instance, f, t, v, exact))
        }),
        exact,
    );
    match total {
        Value::Exact(v) => Value::Exact(-v),
        Value::Approx(v) => Value::Approx(-v),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UserClass {
    pub weight: f64,
    pub window: ChargingWindow,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonatomicInstance {
    horizon: TimeHorizon,
    classes: Vec<UserClass>,
    power: f64,
    exogenous: Vec<f64>,
}

impl NonatomicInstance {
    pub fn new(
        horizon: TimeHorizon,
        classes: Vec<UserClass>,
        power: f64,
        exogenous: Vec<f64>,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidInstance("at least one class is required".into()));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "fleet power must be positive and finite, got {power}"
            )));
        }
        for (k, c) in classes.iter().enumerate() {
            if !(c.weight > 0.0 && c.weight <= 1.0) {
                return Err(Error::InvalidInstance(format!(
                    "class {}: weight {} outside (0, 1]",
                    k + 1,
                    c.weight
                )));
            }
            c.window.validate(horizon, &format!("class {}", k + 1))?;
        }
        let total: f64 = classes.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidInstance(format!("class weights sum to {total}, not 1")));
        }
        validate_exogenous(horizon, &exogenous)?;
        Ok(Self {
            horizon,
            classes,
            power,
            exogenous,
        })
    }

    /// One class with window `(1, T, C)`.
    pub fn symmetric(slots: usize, duration: usize, power: f64, exogenous: Vec<f64>) -> Result<Self> {
        Self::with_single_window(slots, ChargingWindow::new(1, slots, duration), power, exogenous)
    }

    pub fn with_single_window(
        slots: usize,
        window: ChargingWindow,
        power: f64,
        exogenous: Vec<f64>,
    ) -> Result<Self> {
        Self::new(
            TimeHorizon::new(slots)?,
            vec![UserClass { weight: 1.0, window }],
            power,
            exogenous,
        )
    }

    pub fn horizon(&self) -> TimeHorizon {
        self.horizon
    }

    pub fn slots(&self) -> usize {
        self.horizon.slots()
    }

    pub fn classes(&self) -> &[UserClass] {
        &self.classes
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn exogenous(&self) -> &[f64] {
        &self.exogenous
    }

    pub fn action_set(&self, k: usize) -> RangeInclusive<usize> {
        self.classes[k].window.action_set()
    }

    pub fn is_symmetric(&self) -> bool {
        self.classes.windows(2).all(|w| w[0].window == w[1].window)
    }

    /// `sum_k w_k C_k`
    pub fn total_mass(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.weight * c.window.duration as f64)
            .sum()
    }
}

/// Per-class start distributions with the derived start mass `x̃` and occupancy mass `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedProfile {
    starts: Vec<Vec<f64>>,
    start_mass: Vec<f64>,
    occupancy: Vec<f64>,
}

impl MixedProfile {
    pub fn new(instance: &NonatomicInstance, starts: Vec<Vec<f64>>) -> Result<Self> {
        if starts.len() != instance.classes.len() {
            return Err(Error::InvalidProfile(format!(
                "{} distributions for {} classes",
                starts.len(),
                instance.classes.len()
            )));
        }
        for (k, x) in starts.iter().enumerate() {
            if x.len() != instance.slots() {
                return Err(Error::InvalidProfile(format!(
                    "class {}: distribution has {} entries, expected {}",
                    k + 1,
                    x.len(),
                    instance.slots()
                )));
            }
            let allowed = instance.action_set(k);
            for (idx, &v) in x.iter().enumerate() {
                if !(v.is_finite() && (0.0..=1.0 + SIMPLEX_TOLERANCE).contains(&v)) {
                    return Err(Error::InvalidProfile(format!(
                        "class {}: mass {v} at slot {} outside [0, 1]",
                        k + 1,
                        idx + 1
                    )));
                }
                if v != 0.0 && !allowed.contains(&(idx + 1)) {
                    return Err(Error::InvalidProfile(format!(
                        "class {}: mass at slot {} outside its action set",
                        k + 1,
                        idx + 1
                    )));
                }
            }
            let total: f64 = x.iter().sum();
            if (total - 1.0).abs() > SIMPLEX_TOLERANCE {
                return Err(Error::InvalidProfile(format!(
                    "class {}: distribution sums to {total}",
                    k + 1
                )));
            }
        }
        Ok(Self::from_parts(instance, starts))
    }

    pub(crate) fn from_parts(instance: &NonatomicInstance, starts: Vec<Vec<f64>>) -> Self {
        let slots = instance.slots();
        let mut start_mass = vec![0.0; slots];
        let mut occupancy = vec![0.0; slots];
        for (class, x) in instance.classes.iter().zip(&starts) {
            for s in class.window.action_set() {
                let m = class.weight * x[s - 1];
                if m == 0.0 {
                    continue;
                }
                start_mass[s - 1] += m;
                for t in class.window.charging_slots(s) {
                    occupancy[t - 1] += m;
                }
            }
        }
        Self {
            starts,
            start_mass,
            occupancy,
        }
    }

    /// Uniform over every class's action set.
    pub fn uniform(instance: &NonatomicInstance) -> Self {
        let starts = instance
            .classes
            .iter()
            .map(|c| {
                let mut x = vec![0.0; instance.slots()];
                let share = 1.0 / c.window.action_count() as f64;
                for s in c.window.action_set() {
                    x[s - 1] = share;
                }
                x
            })
            .collect();
        Self::from_parts(instance, starts)
    }

    /// All of class `k`'s mass on `slots[k]`.
    pub fn concentrated(instance: &NonatomicInstance, slots: &[usize]) -> Result<Self> {
        let starts = slots
            .iter()
            .map(|&s| {
                let mut x = vec![0.0; instance.slots()];
                if s >= 1 && s <= instance.slots() {
                    x[s - 1] = 1.0;
                }
                x
            })
            .collect();
        Self::new(instance, starts)
    }

    pub fn class_distribution(&self, k: usize) -> &[f64] {
        &self.starts[k]
    }

    pub fn class_distributions(&self) -> &[Vec<f64>] {
        &self.starts
    }

    /// `x̃_t`, weighted mass starting at each slot.
    pub fn start_mass(&self) -> &[f64] {
        &self.start_mass
    }

    /// `x_t`, weighted mass charging at each slot.
    pub fn occupancy(&self) -> &[f64] {
        &self.occupancy
    }
}

pub fn load_nonatomic(instance: &NonatomicInstance, profile: &MixedProfile) -> Vec<f64> {
    instance
        .exogenous
        .iter()
        .zip(&profile.occupancy)
        .map(|(&exo, &x)| exo + instance.power * x)
        .collect()
}

pub fn grid_total_cost_nonatomic(
    instance: &NonatomicInstance,
    f: &GridCostFunction,
    profile: &MixedProfile,
) -> f64 {
    load_nonatomic(instance, profile).iter().map(|&l| f.eval(l)).sum()
}

/// Utility of an infinitesimal user of class `k` starting at `start` against the aggregate `profile`.
pub fn utility_nonatomic(
    instance: &NonatomicInstance,
    f: &GridCostFunction,
    g: &PricingFunction,
    k: usize,
    start: usize,
    profile: &MixedProfile,
) -> f64 {
    let cost: f64 = instance.classes[k]
        .window
        .charging_slots(start)
        .map(|t| f.eval(instance.exogenous[t - 1] + instance.power * profile.occupancy[t - 1]))
        .sum();
    -g.apply(cost)
}

/// `-sum_t ∫_0^{x_t} f(L^exo_t + P v) dv`, integrated in closed form.
pub fn potential_nonatomic(
    instance: &NonatomicInstance,
    f: &GridCostFunction,
    profile: &MixedProfile,
) -> f64 {
    let p = instance.power;
    -instance
        .exogenous
        .iter()
        .zip(&profile.occupancy)
        .map(|(&exo, &x)| (f.antiderivative(exo + p * x) - f.antiderivative(exo)) / p)
        .sum::<f64>()
}
