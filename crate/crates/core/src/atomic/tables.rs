//! Precomputed per-slot costs `f(L^exo_t + P v)` for every reachable count `v`.
//!
//! All atomic quantities (own-window costs, total cost, potential) are sums of
//! these entries, so the scalar type decides exactness once, at construction.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::model::{AtomicInstance, ChargingWindow, GridCostFunction, Value};

pub(crate) trait Scalar: Clone + PartialOrd + Send + Sync + Debug + 'static {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
    fn to_value(&self) -> Value;
    fn neg_value(&self) -> Value;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn to_f64(&self) -> f64 {
        *self as f64
    }
    fn to_value(&self) -> Value {
        Value::Exact(BigInt::from(*self))
    }
    fn neg_value(&self) -> Value {
        Value::Exact(BigInt::from(-*self))
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::INFINITY)
    }
    fn to_value(&self) -> Value {
        Value::Exact(self.clone())
    }
    fn neg_value(&self) -> Value {
        Value::Exact(-self)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_value(&self) -> Value {
        Value::Approx(*self)
    }
    fn neg_value(&self) -> Value {
        Value::Approx(-*self)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CostTable<S> {
    levels: usize,
    cost: Vec<S>,
    /// `prefix[t][v] = sum_{u <= v} cost[t][u]`
    prefix: Vec<S>,
}

impl<S: Scalar> CostTable<S> {
    fn from_entries(slots: usize, levels: usize, cost: Vec<S>) -> Self {
        let mut prefix = Vec::with_capacity(cost.len());
        for t in 0..slots {
            let mut acc = S::zero();
            for v in 0..levels {
                acc = acc.add(&cost[t * levels + v]);
                prefix.push(acc.clone());
            }
        }
        Self {
            levels,
            cost,
            prefix,
        }
    }

    /// Cost of slot `t` (one-based) carrying `count` EVs.
    #[inline]
    pub fn slot(&self, t: usize, count: u32) -> &S {
        &self.cost[(t - 1) * self.levels + count as usize]
    }

    #[inline]
    fn prefix(&self, t: usize, count: u32) -> &S {
        &self.prefix[(t - 1) * self.levels + count as usize]
    }

    pub fn total_cost(&self, occupancy: &[u32]) -> S {
        occupancy
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, &n)| acc.add(self.slot(i + 1, n)))
    }

    /// `sum_t sum_{v <= n_t} f(...)`, the negated potential.
    pub fn potential_sum(&self, occupancy: &[u32]) -> S {
        occupancy
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, &n)| acc.add(self.prefix(i + 1, n)))
    }

    /// Cost over the charging slots of a session starting at `start`.
    #[inline]
    pub fn window_cost(&self, occupancy: &[u32], window: &ChargingWindow, start: usize) -> S {
        window
            .charging_slots(start)
            .fold(S::zero(), |acc, t| acc.add(self.slot(t, occupancy[t - 1])))
    }

    /// Cost of the session after moving it from `from` to `to`, with every other EV fixed.
    /// Only the slots of the new window are read; slots shared with the old window keep their count.
    #[inline]
    pub fn deviation_cost(
        &self,
        occupancy: &[u32],
        window: &ChargingWindow,
        from: usize,
        to: usize,
    ) -> S {
        let old_end = from + window.duration - 1;
        window.charging_slots(to).fold(S::zero(), |acc, t| {
            let n = occupancy[t - 1] + u32::from(t < from || t > old_end);
            acc.add(self.slot(t, n))
        })
    }
}

/// Cost tables in the narrowest scalar that keeps every sum exact.
#[derive(Clone, Debug)]
pub(crate) enum Tables {
    Small(CostTable<i128>),
    Big(CostTable<BigInt>),
    Float(CostTable<f64>),
}

impl Tables {
    pub fn build(instance: &AtomicInstance, f: &GridCostFunction) -> Self {
        let slots = instance.slots();
        let levels = instance.player_count() + 1;
        if f.is_integral() && instance.has_integral_loads() {
            let mut cost = Vec::with_capacity(slots * levels);
            for t in 1..=slots {
                for v in 0..levels {
                    let load = instance.exact_load(t, v as u32);
                    cost.push(f.eval_exact(&load).expect("integral cost"));
                }
            }
            // Largest sum ever formed is a full potential: slots * levels entries.
            let max = cost.iter().max().cloned().unwrap_or_default();
            let bound = max * BigInt::from(slots * levels);
            if bound.bits() < 120 {
                let small = cost.iter().map(|c| c.to_i128().expect("bounded")).collect();
                Tables::Small(CostTable::from_entries(slots, levels, small))
            } else {
                Tables::Big(CostTable::from_entries(slots, levels, cost))
            }
        } else {
            let mut cost = Vec::with_capacity(slots * levels);
            let p = instance.power();
            for (t, &exo) in instance.exogenous().iter().enumerate() {
                debug_assert_eq!(cost.len(), t * levels);
                for v in 0..levels {
                    cost.push(f.eval(exo + p * v as f64));
                }
            }
            Tables::Float(CostTable::from_entries(slots, levels, cost))
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Tables::Float(_))
    }
}

/// Runs `$body` with `$t` bound to the concrete table.
macro_rules! with_table {
    ($tables:expr, $t:ident => $body:expr) => {
        match $tables {
            $crate::atomic::tables::Tables::Small($t) => $body,
            $crate::atomic::tables::Tables::Big($t) => $body,
            $crate::atomic::tables::Tables::Float($t) => $body,
        }
    };
}
pub(crate) use with_table;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_scalar_by_bound() {
        let inst = AtomicInstance::symmetric(4, 3, 2, 1.0, vec![0.0; 4]).unwrap();
        assert!(matches!(Tables::build(&inst, &GridCostFunction::quadratic()), Tables::Small(_)));
        let huge = GridCostFunction::power(40.0).unwrap();
        let big_inst = AtomicInstance::symmetric(4, 3, 2, 1.0, vec![1000.0; 4]).unwrap();
        assert!(matches!(Tables::build(&big_inst, &huge), Tables::Big(_)));
        assert!(matches!(Tables::build(&inst, &GridCostFunction::sqrt()), Tables::Float(_)));
        let frac = AtomicInstance::symmetric(4, 3, 2, 0.5, vec![0.0; 4]).unwrap();
        assert!(!Tables::build(&frac, &GridCostFunction::quadratic()).is_exact());
    }

    #[test]
    fn deviation_cost_matches_recomputation() {
        let inst = AtomicInstance::symmetric(8, 3, 3, 1.0, vec![1.0, 0.0, 2.0, 3.0, 1.0, 0.0, 2.0, 1.0]).unwrap();
        let Tables::Small(table) = Tables::build(&inst, &GridCostFunction::quadratic()) else {
            panic!()
        };
        let w = inst.players()[0];
        let starts = [1usize, 2, 4];
        let mut occ = vec![0u32; 8];
        for &s in &starts {
            for t in w.charging_slots(s) {
                occ[t - 1] += 1;
            }
        }
        for to in w.action_set() {
            let mut moved = occ.clone();
            for t in w.charging_slots(starts[0]) {
                moved[t - 1] -= 1;
            }
            for t in w.charging_slots(to) {
                moved[t - 1] += 1;
            }
            assert_eq!(
                table.deviation_cost(&occ, &w, starts[0], to),
                table.window_cost(&moved, &w, to)
            );
        }
    }
}
