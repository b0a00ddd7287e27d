//! Equilibria of the finite charging game.
//!
//! [`AtomicGame`] bundles an instance with its grid cost and pricing function
//! and precomputes the per-slot cost tables. Comparisons between utilities are
//! exact whenever the cost function and loads are integral and the pricing
//! function is the identity; otherwise they happen in `f64` after pricing.

mod enumerate;
pub(crate) mod tables;

use std::cmp::Ordering;

use serde::Serialize;

pub use enumerate::{
    EfficiencyReport, EnumerationOptions, EnumerationStrategy, Equilibrium, EquilibriumSet,
    DEFAULT_BUDGET,
};

use crate::error::{Error, Result};
use crate::model::{
    occupancy, AtomicInstance, ChargingConfiguration, GridCostFunction, PricingFunction,
    StrategyProfile, Value,
};
use tables::{with_table, CostTable, Scalar, Tables};

#[derive(Clone, Debug)]
pub struct AtomicGame {
    instance: AtomicInstance,
    cost: GridCostFunction,
    pricing: PricingFunction,
    tables: Tables,
}

/// Order in which players get to revise their start slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum UpdateOrder {
    #[default]
    RoundRobin,
    /// A permutation of the zero-based player indices, repeated cyclically.
    Schedule(Vec<usize>),
}

#[derive(Clone, Debug, Serialize)]
pub struct Dynamics {
    pub profile: StrategyProfile,
    /// Potential after each accepted deviation, starting with the initial profile.
    pub trace: Vec<Value>,
    pub steps: u64,
}

impl AtomicGame {
    pub fn new(instance: AtomicInstance, cost: GridCostFunction, pricing: PricingFunction) -> Self {
        let tables = Tables::build(&instance, &cost);
        Self {
            instance,
            cost,
            pricing,
            tables,
        }
    }

    pub fn instance(&self) -> &AtomicInstance {
        &self.instance
    }

    pub fn cost(&self) -> &GridCostFunction {
        &self.cost
    }

    pub fn pricing(&self) -> &PricingFunction {
        &self.pricing
    }

    /// Whether utility comparisons are carried out exactly.
    pub fn is_exact(&self) -> bool {
        self.tables.is_exact() && self.pricing.is_identity()
    }

    pub fn total_cost(&self, configuration: &ChargingConfiguration) -> Value {
        with_table!(&self.tables, t => t.total_cost(&configuration.occupancy).to_value())
    }

    pub fn potential(&self, configuration: &ChargingConfiguration) -> Value {
        with_table!(&self.tables, t => t.potential_sum(&configuration.occupancy).neg_value())
    }

    pub fn utility(&self, profile: &StrategyProfile, i: usize) -> Value {
        let config = occupancy(&self.instance, profile);
        let window = &self.instance.players()[i];
        with_table!(&self.tables, t => {
            let own = t.window_cost(&config.occupancy, window, profile.start(i));
            self.perceived(&own)
        })
    }

    fn perceived<S: Scalar>(&self, own_cost: &S) -> Value {
        if self.pricing.is_identity() {
            own_cost.neg_value()
        } else {
            Value::Approx(-self.pricing.apply(own_cost.to_f64()))
        }
    }

    /// Whether a session costing `candidate` gives strictly higher utility than one costing `current`.
    #[inline]
    pub(crate) fn strictly_better<S: Scalar>(&self, candidate: &S, current: &S) -> bool {
        if self.pricing.is_identity() {
            candidate < current
        } else {
            self.pricing.apply(candidate.to_f64()) < self.pricing.apply(current.to_f64())
        }
    }

    fn best_response_in<S: Scalar>(
        &self,
        table: &CostTable<S>,
        occupancy: &[u32],
        profile: &StrategyProfile,
        i: usize,
    ) -> (usize, S, S) {
        let window = &self.instance.players()[i];
        let current = profile.start(i);
        let current_cost = table.window_cost(occupancy, window, current);
        let mut best: Option<(usize, S)> = None;
        for s in window.action_set() {
            let c = if s == current {
                current_cost.clone()
            } else {
                table.deviation_cost(occupancy, window, current, s)
            };
            match &best {
                Some((_, b)) if !self.strictly_better(&c, b) => {}
                _ => best = Some((s, c)),
            }
        }
        let (s, c) = best.expect("non-empty action set");
        (s, c, current_cost)
    }

    /// Start slot maximizing player `i`'s utility with the others fixed; smallest slot on ties.
    pub fn best_response(&self, profile: &StrategyProfile, i: usize) -> usize {
        let config = occupancy(&self.instance, profile);
        with_table!(&self.tables, t => self.best_response_in(t, &config.occupancy, profile, i).0)
    }

    pub fn is_nash(&self, profile: &StrategyProfile) -> bool {
        let config = occupancy(&self.instance, profile);
        with_table!(&self.tables, t => self.is_nash_in(t, &config.occupancy, profile))
    }

    fn is_nash_in<S: Scalar>(&self, table: &CostTable<S>, occupancy: &[u32], profile: &StrategyProfile) -> bool {
        self.instance.players().iter().enumerate().all(|(i, window)| {
            let current = profile.start(i);
            let own = table.window_cost(occupancy, window, current);
            window.action_set().filter(|&s| s != current).all(|s| {
                !self.strictly_better(&table.deviation_cost(occupancy, window, current, s), &own)
            })
        })
    }

    /// Sequential best-response dynamics. Each accepted move strictly raises the
    /// potential, so the run ends at a pure equilibrium; `budget` caps the
    /// number of accepted moves and defaults to the size of the profile space.
    pub fn best_response_dynamics(
        &self,
        initial: &StrategyProfile,
        order: &UpdateOrder,
        budget: Option<u64>,
    ) -> Result<Dynamics> {
        let players = self.instance.player_count();
        let schedule: Vec<usize> = match order {
            UpdateOrder::RoundRobin => (0..players).collect(),
            UpdateOrder::Schedule(s) => {
                let mut sorted = s.clone();
                sorted.sort_unstable();
                if sorted != (0..players).collect::<Vec<_>>() {
                    return Err(Error::InvalidProfile(format!(
                        "update schedule {s:?} is not a permutation of the {players} players"
                    )));
                }
                s.clone()
            }
        };
        let budget = budget.unwrap_or_else(|| {
            u64::try_from(self.instance.profile_space_size()).unwrap_or(u64::MAX)
        });
        with_table!(&self.tables, t => self.dynamics_in(t, initial, &schedule, budget))
    }

    fn dynamics_in<S: Scalar>(
        &self,
        table: &CostTable<S>,
        initial: &StrategyProfile,
        schedule: &[usize],
        budget: u64,
    ) -> Result<Dynamics> {
        let mut profile = initial.clone();
        let mut occ = occupancy(&self.instance, &profile).occupancy;
        let mut trace = vec![table.potential_sum(&occ).neg_value()];
        let mut steps = 0u64;
        let mut idle = 0usize;
        let mut pos = 0usize;
        while idle < schedule.len() {
            let i = schedule[pos];
            pos = (pos + 1) % schedule.len();
            let (target, target_cost, current_cost) = self.best_response_in(table, &occ, &profile, i);
            if !self.strictly_better(&target_cost, &current_cost) {
                idle += 1;
                continue;
            }
            if steps == budget {
                return Err(Error::IterationBudgetExceeded { steps });
            }
            let window = &self.instance.players()[i];
            for t in window.charging_slots(profile.start(i)) {
                occ[t - 1] -= 1;
            }
            for t in window.charging_slots(target) {
                occ[t - 1] += 1;
            }
            profile.set_start(i, target);
            steps += 1;
            idle = 0;
            trace.push(table.potential_sum(&occ).neg_value());
        }
        Ok(Dynamics {
            profile,
            trace,
            steps,
        })
    }
}

/// Whether `trace` is strictly increasing.
pub fn strictly_increasing(trace: &[Value]) -> bool {
    trace
        .windows(2)
        .all(|w| w[0].partial_cmp(&w[1]) == Some(Ordering::Less))
}
