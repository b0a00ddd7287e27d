//! The two non-uniqueness examples and a constant-load invariance check, end to end.

use serde::Serialize;

use super::{DataSeries, SweepKind, SweepResult};
use crate::atomic::{AtomicGame, EnumerationOptions};
use crate::error::Result;
use crate::model::{
    AtomicInstance, ChargingWindow, GridCostFunction, NonatomicInstance, PricingFunction,
};
use crate::nonatomic::{solve_equilibrium, solve_symmetric_invariant, SolverOptions};

pub const ATOMIC_EXOGENOUS: [f64; 6] = [1.0, 2.0, 3.0, 2.0, 1.0, 3.0];
pub const NONATOMIC_EXOGENOUS: [f64; 11] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.2, 0.2, 0.3, 0.2, 0.1, 0.2];

#[derive(Clone, Debug, Serialize)]
pub struct AtomicCounterexample {
    /// Occupancy vectors of every equilibrium configuration.
    pub occupancies: Vec<Vec<u32>>,
    pub start_counts: Vec<Vec<u32>>,
    pub total_costs: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonatomicCounterexample {
    pub sqrt_start_mass: Vec<f64>,
    pub power8_start_mass: Vec<f64>,
    pub sqrt_gap: f64,
    pub power8_gap: f64,
    /// Both equilibria put all but `1e-6` of their mass on slots 1 and 6.
    pub supported_on_1_and_6: bool,
    pub first_component_difference: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub duration: usize,
    /// Largest occupancy difference between any probe cost's equilibrium and the linear-system solution.
    pub max_difference: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub atomic: AtomicCounterexample,
    pub nonatomic: NonatomicCounterexample,
    pub invariance: Vec<InvarianceReport>,
    pub passed: bool,
}

fn atomic_counterexample() -> Result<AtomicCounterexample> {
    let instance = AtomicInstance::symmetric(6, 3, 2, 1.0, ATOMIC_EXOGENOUS.to_vec())?;
    let game = AtomicGame::new(instance, GridCostFunction::quadratic(), PricingFunction::Identity);
    let set = game.enumerate_equilibria(&EnumerationOptions::default())?;
    Ok(AtomicCounterexample {
        occupancies: set.occupancies(),
        start_counts: set.equilibria.iter().map(|e| e.configuration.start_counts.clone()).collect(),
        total_costs: set.equilibria.iter().map(|e| e.total_cost.to_string()).collect(),
        passed: set.complete && set.len() >= 2,
    })
}

/// The continuum instance: one class with window `1..=10`, so that six start
/// slots are available for `C = 5` on eleven slots.
pub fn nonatomic_counterexample_instance() -> Result<NonatomicInstance> {
    NonatomicInstance::with_single_window(11, ChargingWindow::new(1, 10, 5), 1.0, NONATOMIC_EXOGENOUS.to_vec())
}

fn nonatomic_counterexample() -> Result<NonatomicCounterexample> {
    let instance = nonatomic_counterexample_instance()?;
    let options = SolverOptions::default();
    let sqrt = solve_equilibrium(&instance, &GridCostFunction::sqrt(), &options)?;
    let power8 = solve_equilibrium(&instance, &GridCostFunction::power(8.0)?, &options)?;
    let a = sqrt.profile.start_mass().to_vec();
    let b = power8.profile.start_mass().to_vec();
    let off_support = |x: &[f64]| -> f64 {
        x.iter()
            .enumerate()
            .filter(|(i, _)| *i != 0 && *i != 5)
            .map(|(_, v)| v)
            .sum()
    };
    let supported = off_support(&a) < 1e-6 && off_support(&b) < 1e-6;
    let difference = a[0] - b[0];
    let passed = supported
        && (a[0] - 0.45).abs() <= 0.01
        && (b[0] - 0.42).abs() <= 0.01
        && difference.abs() >= 0.01;
    Ok(NonatomicCounterexample {
        sqrt_start_mass: a,
        power8_start_mass: b,
        sqrt_gap: sqrt.wardrop_gap,
        power8_gap: power8.wardrop_gap,
        supported_on_1_and_6: supported,
        first_component_difference: difference,
        passed,
    })
}

fn invariance(duration: usize) -> Result<InvarianceReport> {
    let exogenous = vec![0.0; 10];
    let reference = solve_symmetric_invariant(&exogenous, duration)?;
    let instance = NonatomicInstance::symmetric(10, duration, 1.0, exogenous)?;
    let options = SolverOptions::default().with_tolerance(1e-12);
    let mut max_difference: f64 = 0.0;
    for f in [GridCostFunction::sqrt(), GridCostFunction::quadratic(), GridCostFunction::power(8.0)?] {
        let ne = solve_equilibrium(&instance, &f, &options)?;
        for (x, y) in ne.profile.occupancy().iter().zip(reference.profile.occupancy()) {
            max_difference = max_difference.max((x - y).abs());
        }
    }
    Ok(InvarianceReport {
        duration,
        max_difference,
        passed: max_difference <= 1e-6,
    })
}

/// Runs both counter-examples and the constant-load invariance check.
pub fn run_counterexamples() -> Result<CounterexampleReport> {
    let atomic = atomic_counterexample()?;
    let nonatomic = nonatomic_counterexample()?;
    let invariance = vec![invariance(3)?, invariance(5)?];
    let passed = atomic.passed && nonatomic.passed && invariance.iter().all(|r| r.passed);
    Ok(CounterexampleReport {
        atomic,
        nonatomic,
        invariance,
        passed,
    })
}

pub(super) fn as_series(kind: SweepKind) -> Result<SweepResult> {
    let by_slot = |label: &str, x: &[f64]| DataSeries {
        label: label.into(),
        points: x.iter().enumerate().map(|(t, &v)| ((t + 1) as f64, v)).collect(),
    };
    let series = match kind {
        SweepKind::AtomicCounterexample => {
            let report = atomic_counterexample()?;
            report
                .occupancies
                .iter()
                .enumerate()
                .map(|(j, n)| {
                    let x: Vec<f64> = n.iter().map(|&v| f64::from(v)).collect();
                    by_slot(&format!("ne{}", j + 1), &x)
                })
                .collect()
        }
        _ => {
            let report = nonatomic_counterexample()?;
            vec![
                by_slot("sqrt", &report.sqrt_start_mass),
                by_slot("L8", &report.power8_start_mass),
            ]
        }
    };
    Ok(SweepResult {
        series,
        gaps: Vec::new(),
    })
}
