//! Equilibria of the continuum charging game.
//!
//! Every solve first rescales the instance to unit power: `L^exo / P` and
//! `y -> f(P y)`, so that masses and loads share one unit. Costs, utilities and
//! gaps are the same in both coordinate systems; only the potential changes by
//! the factor `P` and is always reported for the original instance.

mod invariant;
mod solver;

use serde::Serialize;

pub use invariant::{
    check_invariance_condition, solve_symmetric_invariant, InvarianceCheck, InvariantEquilibrium,
    SymmetricLinearSystem,
};

use crate::error::{Error, Result};
use crate::model::{
    grid_total_cost_nonatomic, potential_nonatomic, ChargingWindow, GridCostFunction,
    MixedProfile, NonatomicInstance,
};

/// Mass above which a start slot counts as played.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

/// `T - C + 1 = q C + r` with `r < C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EuclideanSplit {
    pub q: usize,
    pub r: usize,
}

pub fn euclidean_split(slots: usize, duration: usize) -> Result<EuclideanSplit> {
    if duration == 0 || duration > slots {
        return Err(Error::InvalidInstance(format!(
            "duration {duration} outside 1..={slots}"
        )));
    }
    let starts = slots - duration + 1;
    Ok(EuclideanSplit {
        q: starts / duration,
        r: starts % duration,
    })
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Target Wardrop gap, in cost units.
    pub tolerance: f64,
    pub max_iterations: u64,
    /// Starting point; uniform over each action set when absent.
    pub initial: Option<MixedProfile>,
    /// Largest occupancy difference accepted between the two social-optimum routes.
    pub route_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 1_000_000,
            initial: None,
            route_tolerance: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_initial(mut self, initial: MixedProfile) -> Self {
        self.initial = Some(initial);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    ConcaveOptimizer,
    LinearSystem,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonatomicEquilibrium {
    pub profile: MixedProfile,
    pub potential_value: f64,
    /// Largest cost excess of a played start over the cheapest one of its class.
    pub wardrop_gap: f64,
    pub method: SolverMethod,
    pub iterations: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonatomicOptimum {
    pub profile: MixedProfile,
    pub cost: f64,
    /// Largest occupancy difference between the two routes.
    pub route_difference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonatomicEfficiency {
    pub equilibrium_cost: f64,
    pub optimum_cost: f64,
    pub efficiency: f64,
    pub equilibrium: MixedProfile,
    pub optimum: MixedProfile,
}

/// Unit-power view of an instance.
pub(crate) struct Normalized {
    pub exo: Vec<f64>,
    pub windows: Vec<ChargingWindow>,
    pub weights: Vec<f64>,
    pub cost: GridCostFunction,
}

impl Normalized {
    pub fn new(instance: &NonatomicInstance, f: &GridCostFunction) -> Self {
        let p = instance.power();
        Self {
            exo: instance.exogenous().iter().map(|&l| l / p).collect(),
            windows: instance.classes().iter().map(|c| c.window).collect(),
            weights: instance.classes().iter().map(|c| c.weight).collect(),
            cost: f.with_scaled_argument(p),
        }
    }

    pub fn slots(&self) -> usize {
        self.exo.len()
    }

    /// Weighted start masses of a profile.
    pub fn masses(&self, profile: &MixedProfile) -> Vec<Vec<f64>> {
        profile
            .class_distributions()
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| x.iter().map(|&v| v * w).collect())
            .collect()
    }

    pub fn occupancy(&self, masses: &[Vec<f64>]) -> Vec<f64> {
        let mut occ = vec![0.0; self.slots()];
        for (window, m) in self.windows.iter().zip(masses) {
            for s in window.action_set() {
                let v = m[s - 1];
                if v != 0.0 {
                    for t in window.charging_slots(s) {
                        occ[t - 1] += v;
                    }
                }
            }
        }
        occ
    }

    /// Back to per-class distributions on the simplex.
    pub fn profile(&self, instance: &NonatomicInstance, masses: Vec<Vec<f64>>) -> MixedProfile {
        let starts = masses
            .into_iter()
            .zip(&self.weights)
            .map(|(m, &w)| {
                let mut x: Vec<f64> = m.iter().map(|&v| (v / w).max(0.0)).collect();
                let total: f64 = x.iter().sum();
                x.iter_mut().for_each(|v| *v /= total);
                x
            })
            .collect();
        MixedProfile::from_parts(instance, starts)
    }
}

/// Wardrop check: every start played with mass above [`SUPPORT_THRESHOLD`]
/// costs at most `epsilon` more than the cheapest start of its class.
pub fn is_wardrop_equilibrium(
    instance: &NonatomicInstance,
    f: &GridCostFunction,
    profile: &MixedProfile,
    epsilon: f64,
) -> (bool, f64) {
    let gap = wardrop_gap(instance, f, profile);
    (gap <= epsilon, gap)
}

fn wardrop_gap(instance: &NonatomicInstance, f: &GridCostFunction, profile: &MixedProfile) -> f64 {
    let p = instance.power();
    let slot_cost: Vec<f64> = instance
        .exogenous()
        .iter()
        .zip(profile.occupancy())
        .map(|(&exo, &x)| f.eval(exo + p * x))
        .collect();
    let mut gap: f64 = 0.0;
    for (k, class) in instance.classes().iter().enumerate() {
        let window = class.window;
        let costs: Vec<(usize, f64)> = window
            .action_set()
            .map(|s| (s, window.charging_slots(s).map(|t| slot_cost[t - 1]).sum()))
            .collect();
        let min = costs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let x = profile.class_distribution(k);
        for &(s, c) in &costs {
            if x[s - 1] > SUPPORT_THRESHOLD {
                gap = gap.max(c - min);
            }
        }
    }
    gap
}

fn initial_masses(norm: &Normalized, instance: &NonatomicInstance, options: &SolverOptions) -> Result<Vec<Vec<f64>>> {
    let profile = match &options.initial {
        Some(p) => {
            MixedProfile::new(instance, p.class_distributions().to_vec())?;
            p.clone()
        }
        None => MixedProfile::uniform(instance),
    };
    Ok(norm.masses(&profile))
}

/// Maximizes the potential over the product of class simplices. The result is
/// the unique equilibrium in occupancy coordinates.
pub fn solve_equilibrium(
    instance: &NonatomicInstance,
    f: &GridCostFunction,
    options: &SolverOptions,
) -> Result<NonatomicEquilibrium> {
    let norm = Normalized::new(instance, f);
    let masses = initial_masses(&norm, instance, options)?;
    let run = solver::equilibrate(&norm, &norm.cost, masses, options.tolerance, options.max_iterations);
    let profile = norm.profile(instance, run.masses);
    if !run.converged {
        return Err(Error::NonConvergence {
            iterations: run.iterations,
            gap: run.gap,
            best: Box::new(profile),
        });
    }
    Ok(NonatomicEquilibrium {
        potential_value: potential_nonatomic(instance, f, &profile),
        wardrop_gap: wardrop_gap(instance, f, &profile),
        profile,
        method: SolverMethod::ConcaveOptimizer,
        iterations: run.iterations,
    })
}

fn max_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Minimizes the total grid cost. Computed twice: as the equilibrium of the
/// game with cost `f'`, and by projected gradient descent on the total cost;
/// the two occupancy vectors must agree within `route_tolerance`.
pub fn social_optimum_nonatomic(
    instance: &NonatomicInstance,
    f: &GridCostFunction,
    options: &SolverOptions,
) -> Result<NonatomicOptimum> {
    let norm = Normalized::new(instance, f);
    let derivative = norm.cost.derivative().ok_or(Error::AssumptionViolated {
        operation: "social_optimum_nonatomic",
        assumption: "a strictly convex, differentiable grid cost",
    })?;
    let masses = initial_masses(&norm, instance, options)?;

    let dual = solver::equilibrate(&norm, &derivative, masses.clone(), options.tolerance, options.max_iterations);
    let dual_profile = norm.profile(instance, dual.masses);
    if !dual.converged {
        return Err(Error::NonConvergence {
            iterations: dual.iterations,
            gap: dual.gap,
            best: Box::new(dual_profile),
        });
    }
    let direct = solver::projected_gradient(
        &norm,
        &derivative,
        masses,
        options.tolerance,
        SUPPORT_THRESHOLD,
        options.max_iterations,
    );
    let direct_profile = norm.profile(instance, direct.masses);
    if !direct.converged {
        return Err(Error::NonConvergence {
            iterations: direct.iterations,
            gap: direct.gap,
            best: Box::new(direct_profile),
        });
    }
    let difference = max_difference(dual_profile.occupancy(), direct_profile.occupancy());
    if difference > options.route_tolerance {
        return Err(Error::RouteMismatch {
            difference,
            tolerance: options.route_tolerance,
        });
    }
    Ok(NonatomicOptimum {
        cost: grid_total_cost_nonatomic(instance, f, &dual_profile),
        profile: dual_profile,
        route_difference: difference,
    })
}

/// Total cost at the equilibrium over the optimal total cost.
pub fn efficiency_nonatomic(
    instance: &NonatomicInstance,
    f: &GridCostFunction,
    options: &SolverOptions,
) -> Result<NonatomicEfficiency> {
    let ne = solve_equilibrium(instance, f, options)?;
    let opt = social_optimum_nonatomic(instance, f, options)?;
    let equilibrium_cost = grid_total_cost_nonatomic(instance, f, &ne.profile);
    // The equilibrium is feasible, so it bounds the optimum too.
    let optimum_cost = opt.cost.min(equilibrium_cost);
    let efficiency = if optimum_cost == 0.0 {
        1.0
    } else {
        equilibrium_cost / optimum_cost
    };
    Ok(NonatomicEfficiency {
        equilibrium_cost,
        optimum_cost,
        efficiency,
        equilibrium: ne.profile,
        optimum: opt.profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_examples() {
        assert_eq!(euclidean_split(11, 5).unwrap(), EuclideanSplit { q: 1, r: 2 });
        assert_eq!(euclidean_split(10, 5).unwrap(), EuclideanSplit { q: 1, r: 1 });
        assert_eq!(euclidean_split(10, 10).unwrap(), EuclideanSplit { q: 0, r: 1 });
        assert_eq!(euclidean_split(1, 1).unwrap(), EuclideanSplit { q: 1, r: 0 });
        assert!(euclidean_split(4, 5).is_err());
    }

    #[test]
    fn flat_equilibrium() {
        let inst = NonatomicInstance::symmetric(10, 5, 1.0, vec![0.0; 10]).unwrap();
        let ne = solve_equilibrium(&inst, &GridCostFunction::quadratic(), &SolverOptions::default()).unwrap();
        assert!(ne.wardrop_gap <= 1e-9);
        for &x in ne.profile.occupancy() {
            assert!((x - 0.5).abs() < 1e-7);
        }
        let x = ne.profile.start_mass();
        assert!((x[0] - 0.5).abs() < 1e-7 && (x[5] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn wardrop_examples() {
        let inst = NonatomicInstance::symmetric(10, 3, 1.0, vec![0.0; 10]).unwrap();
        let f = GridCostFunction::quadratic();
        let stacked = MixedProfile::concentrated(&inst, &[1]).unwrap();
        let (ok, gap) = is_wardrop_equilibrium(&inst, &f, &stacked, 1e-6);
        assert!(!ok && gap > 0.0);
        assert!(is_wardrop_equilibrium(&inst, &f, &stacked, f64::INFINITY).0);
    }

    #[test]
    fn power_scaling_leaves_equilibrium_unchanged() {
        let exo = vec![0.3, 0.1, 0.4, 0.2, 0.0, 0.5, 0.1, 0.2];
        let f = GridCostFunction::power(3.0).unwrap();
        let a = NonatomicInstance::symmetric(8, 3, 1.0, exo.clone()).unwrap();
        let b = NonatomicInstance::symmetric(8, 3, 2.0, exo.iter().map(|v| v * 2.0).collect()).unwrap();
        let opts = SolverOptions::default();
        let xa = solve_equilibrium(&a, &f, &opts).unwrap();
        let xb = solve_equilibrium(&b, &f, &opts).unwrap();
        assert!(max_difference(xa.profile.occupancy(), xb.profile.occupancy()) < 1e-6);
    }

    #[test]
    fn optimum_flat_and_efficient() {
        let inst = NonatomicInstance::symmetric(10, 5, 1.0, vec![0.0; 10]).unwrap();
        let f = GridCostFunction::quadratic();
        let opt = social_optimum_nonatomic(&inst, &f, &SolverOptions::default()).unwrap();
        assert!((opt.cost - 2.5).abs() < 1e-8);
        let eff = efficiency_nonatomic(&inst, &f, &SolverOptions::default()).unwrap();
        assert!((eff.efficiency - 1.0).abs() < 1e-6);
        assert!(social_optimum_nonatomic(&inst, &GridCostFunction::sqrt(), &SolverOptions::default()).is_err());
    }

    #[test]
    fn non_convergence_carries_best_iterate() {
        let inst = NonatomicInstance::symmetric(10, 3, 1.0, vec![0.0; 10]).unwrap();
        let opts = SolverOptions {
            max_iterations: 1,
            initial: Some(MixedProfile::concentrated(&inst, &[1]).unwrap()),
            ..SolverOptions::default()
        };
        match solve_equilibrium(&inst, &GridCostFunction::quadratic(), &opts) {
            Err(Error::NonConvergence { iterations, gap, best }) => {
                assert_eq!(iterations, 1);
                assert!(gap > 0.0);
                assert!((best.class_distribution(0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
