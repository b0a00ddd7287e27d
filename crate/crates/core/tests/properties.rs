use proptest::prelude::*;

use charging_games::atomic::{AtomicGame, EnumerationOptions, EnumerationStrategy, UpdateOrder};
use charging_games::model::{
    grid_total_cost_nonatomic, occupancy, potential_nonatomic, AtomicInstance, ChargingWindow,
    GridCostFunction, MixedProfile, NonatomicInstance, PricingFunction, StrategyProfile,
    TimeHorizon, UserClass,
};
use charging_games::nonatomic::{
    check_invariance_condition, efficiency_nonatomic, is_wardrop_equilibrium, solve_equilibrium,
    solve_symmetric_invariant, SolverOptions,
};

fn window(slots: usize) -> impl Strategy<Value = ChargingWindow> {
    (1..=slots.min(3)).prop_flat_map(move |c| {
        (1..=slots - c + 1).prop_flat_map(move |a| (Just(a), a + c - 1..=slots, Just(c)))
    })
    .prop_map(|(a, d, c)| ChargingWindow::new(a, d, c))
}

/// Small atomic instances with integral loads, plus one profile.
fn atomic_case() -> impl Strategy<Value = (AtomicInstance, Vec<usize>)> {
    (2..=7usize, 1..=4usize)
        .prop_flat_map(|(slots, players)| {
            (
                prop::collection::vec(window(slots), players),
                prop::collection::vec(0..4u8, slots),
                Just(slots),
            )
        })
        .prop_flat_map(|(windows, exo, slots)| {
            let starts: Vec<_> = windows.iter().map(|w| w.first_start()..=w.last_start()).collect();
            let inst = AtomicInstance::new(
                TimeHorizon::new(slots).unwrap(),
                windows,
                1.0,
                exo.into_iter().map(f64::from).collect(),
            )
            .unwrap();
            (Just(inst), starts)
        })
}

fn symmetric_atomic() -> impl Strategy<Value = AtomicInstance> {
    (1..=7usize, 1..=4usize)
        .prop_flat_map(|(slots, players)| (Just(slots), Just(players), 1..=slots, prop::collection::vec(0..3u8, slots)))
        .prop_map(|(slots, players, c, exo)| {
            AtomicInstance::symmetric(slots, players, c, 1.0, exo.into_iter().map(f64::from).collect()).unwrap()
        })
}

/// Nonatomic instances with up to three classes and two profiles built from raw weights.
fn nonatomic_case() -> impl Strategy<Value = (NonatomicInstance, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (3..=9usize, 1..=3usize)
        .prop_flat_map(|(slots, classes)| {
            (
                prop::collection::vec(window(slots), classes),
                prop::collection::vec(1u32..=10, classes),
                prop::collection::vec(0.0..1.0f64, slots),
                prop::collection::vec(prop::collection::vec(0.0..1.0f64, slots), classes),
                prop::collection::vec(prop::collection::vec(0.0..1.0f64, slots), classes),
                Just(slots),
            )
        })
        .prop_map(|(windows, raw, exo, first, second, slots)| {
            let total: u32 = raw.iter().sum();
            let mut weights: Vec<f64> = raw.iter().map(|&r| f64::from(r) / f64::from(total)).collect();
            let rest: f64 = weights[1..].iter().sum();
            weights[0] = 1.0 - rest;
            let classes = windows
                .iter()
                .zip(&weights)
                .map(|(&window, &weight)| UserClass { weight, window })
                .collect();
            let inst = NonatomicInstance::new(TimeHorizon::new(slots).unwrap(), classes, 1.0, exo).unwrap();
            let spread = |shares: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                windows
                    .iter()
                    .zip(shares)
                    .map(|(w, s)| {
                        let mut x = vec![0.0; slots];
                        for t in w.action_set() {
                            x[t - 1] = s[t - 1] + 1e-3;
                        }
                        let sum: f64 = x.iter().sum();
                        x.iter_mut().for_each(|v| *v /= sum);
                        x
                    })
                    .collect()
            };
            (inst.clone(), spread(first), spread(second))
        })
}

fn costs() -> impl Strategy<Value = GridCostFunction> {
    prop_oneof![
        Just(GridCostFunction::quadratic()),
        Just(GridCostFunction::power(3.0).unwrap()),
        Just(GridCostFunction::power(4.0).unwrap()),
    ]
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn charging_is_conserved((inst, starts) in atomic_case()) {
        let c = occupancy(&inst, &StrategyProfile::new(&inst, starts).unwrap());
        let total: u32 = c.occupancy.iter().sum();
        prop_assert_eq!(total as usize, inst.total_duration());
        prop_assert_eq!(c.start_counts.iter().sum::<u32>() as usize, inst.player_count());
    }

    #[test]
    fn deviations_move_the_potential_exactly((inst, starts) in atomic_case(), pick in any::<prop::sample::Index>(), to in any::<prop::sample::Index>()) {
        let game = AtomicGame::new(inst.clone(), GridCostFunction::quadratic(), PricingFunction::Identity);
        let p = StrategyProfile::new(&inst, starts).unwrap();
        let i = pick.index(inst.player_count());
        let choices: Vec<usize> = inst.action_set(i).collect();
        let q = p.with_start(i, choices[to.index(choices.len())]);
        let du = game.utility(&q, i).minus(&game.utility(&p, i));
        let dphi = game.potential(&occupancy(&inst, &q)).minus(&game.potential(&occupancy(&inst, &p)));
        prop_assert_eq!(du, dphi);
    }

    #[test]
    fn pricing_keeps_the_potential_ordinal((inst, starts) in atomic_case(), pick in any::<prop::sample::Index>(), to in any::<prop::sample::Index>(), rate in 0.05..1.0f64) {
        let plain = AtomicGame::new(inst.clone(), GridCostFunction::quadratic(), PricingFunction::Identity);
        let priced = AtomicGame::new(inst.clone(), GridCostFunction::quadratic(), PricingFunction::exp(rate).unwrap());
        let affine = AtomicGame::new(inst.clone(), GridCostFunction::quadratic(), PricingFunction::affine(2.5, 1.0).unwrap());
        let p = StrategyProfile::new(&inst, starts).unwrap();
        let i = pick.index(inst.player_count());
        let choices: Vec<usize> = inst.action_set(i).collect();
        let q = p.with_start(i, choices[to.index(choices.len())]);
        let dphi = plain.potential(&occupancy(&inst, &q)).minus(&plain.potential(&occupancy(&inst, &p)));
        for game in [&priced, &affine] {
            let du = game.utility(&q, i).minus(&game.utility(&p, i));
            prop_assert_eq!(du.signum(), dphi.signum());
        }
        prop_assert_eq!(plain.best_response(&p, i), priced.best_response(&p, i));
        prop_assert_eq!(plain.best_response(&p, i), affine.best_response(&p, i));
    }

    #[test]
    fn dynamics_end_at_an_enumerated_equilibrium((inst, starts) in atomic_case()) {
        let game = AtomicGame::new(inst.clone(), GridCostFunction::quadratic(), PricingFunction::Identity);
        let d = game.best_response_dynamics(&StrategyProfile::new(&inst, starts).unwrap(), &UpdateOrder::RoundRobin, None).unwrap();
        let set = game.enumerate_equilibria(&EnumerationOptions::default()).unwrap();
        prop_assert!(set.occupancies().contains(&occupancy(&inst, &d.profile).occupancy));
        for e in &set.equilibria {
            prop_assert!(game.is_nash(&e.witness));
        }
    }

    #[test]
    fn efficiency_at_least_one(inst in symmetric_atomic(), f in costs()) {
        let game = AtomicGame::new(inst, f, PricingFunction::Identity);
        let r = game.efficiency(&EnumerationOptions::default()).unwrap();
        prop_assert!(r.efficiency >= 1.0);
        prop_assert!(r.worst_ne_cost.to_f64() >= r.optimum_cost.to_f64());
        let p = game.ne_proportion(&EnumerationOptions::default()).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn enumeration_modes_agree(inst in symmetric_atomic()) {
        let game = AtomicGame::new(inst, GridCostFunction::quadratic(), PricingFunction::Identity);
        let by = |s| game.enumerate_equilibria(&EnumerationOptions::default().with_strategy(s)).unwrap();
        let (a, b) = (by(EnumerationStrategy::Configurations), by(EnumerationStrategy::Profiles));
        prop_assert_eq!(a.occupancies(), b.occupancies());
        prop_assert_eq!(a.profiles_represented, b.profiles_represented);
    }

    #[test]
    fn nonatomic_potential_is_concave((inst, x, y) in nonatomic_case(), lambda in 0.0..1.0f64, f in costs()) {
        let px = MixedProfile::new(&inst, x.clone());
        let py = MixedProfile::new(&inst, y.clone());
        let mix: Vec<Vec<f64>> = x.iter().zip(&y).map(|(a, b)| a.iter().zip(b).map(|(u, v)| lambda * u + (1.0 - lambda) * v).collect()).collect();
        let pm = MixedProfile::new(&inst, mix).unwrap();
        let (fx, fy, fm) = (potential_nonatomic(&inst, &f, &px.unwrap()), potential_nonatomic(&inst, &f, &py.unwrap()), potential_nonatomic(&inst, &f, &pm));
        prop_assert!(fm >= lambda * fx + (1.0 - lambda) * fy - 1e-12);
    }

    #[test]
    fn equilibrium_is_unique_and_maximizes_the_potential((inst, x, _) in nonatomic_case(), f in costs(), eps in 0.01..0.3f64) {
        let start = MixedProfile::new(&inst, x).unwrap();
        let a = solve_equilibrium(&inst, &f, &SolverOptions::default()).unwrap();
        let b = solve_equilibrium(&inst, &f, &SolverOptions::default().with_initial(start.clone())).unwrap();
        prop_assert!(max_diff(a.profile.occupancy(), b.profile.occupancy()) <= 1e-8);
        prop_assert!(is_wardrop_equilibrium(&inst, &f, &a.profile, 1e-9).0);
        prop_assert!(is_wardrop_equilibrium(&inst, &f, &a.profile, f64::INFINITY).0);
        for (k, dist) in a.profile.class_distributions().iter().enumerate() {
            prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() <= 1e-12, "class {}", k);
            prop_assert!(dist.iter().all(|&v| v >= 0.0));
        }
        // moving towards any other feasible profile cannot raise the potential
        let toward: Vec<Vec<f64>> = a.profile.class_distributions().iter().zip(start.class_distributions())
            .map(|(p, q)| p.iter().zip(q).map(|(u, v)| (1.0 - eps) * u + eps * v).collect()).collect();
        let moved = MixedProfile::new(&inst, toward).unwrap();
        prop_assert!(potential_nonatomic(&inst, &f, &moved) <= a.potential_value + 1e-9);
        let e = efficiency_nonatomic(&inst, &f, &SolverOptions::default()).unwrap();
        prop_assert!(e.efficiency >= 1.0);
        prop_assert!(grid_total_cost_nonatomic(&inst, &f, &moved) >= e.optimum_cost - 1e-9);
    }
}

/// Convex increasing loads of the form `a s + b s^2` with `s = t / T`.
fn convex_increasing() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (6..=14usize, 0.0..0.3f64, 0.0..0.3f64).prop_flat_map(|(slots, a, b)| {
        let exo: Vec<f64> = (1..=slots).map(|t| {
            let s = t as f64 / slots as f64;
            a * s + b * s * s
        }).collect();
        (Just(exo), 2..=4usize.min(slots - 1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Instances passing the sufficient condition share one equilibrium across
    /// cost functions, which is the linear-system solution whenever that is certified.
    #[test]
    fn equilibrium_is_cost_invariant((exo, c) in convex_increasing()) {
        prop_assume!(check_invariance_condition(&exo, c).unwrap().holds);
        let inst = NonatomicInstance::symmetric(exo.len(), c, 1.0, exo.clone()).unwrap();
        let options = SolverOptions::default().with_tolerance(1e-12);
        let occ: Vec<Vec<f64>> = [GridCostFunction::sqrt(), GridCostFunction::quadratic(), GridCostFunction::power(8.0).unwrap()]
            .iter()
            .map(|f| solve_equilibrium(&inst, f, &options).unwrap().profile.occupancy().to_vec())
            .collect();
        prop_assert!(max_diff(&occ[0], &occ[1]) <= 1e-6);
        prop_assert!(max_diff(&occ[0], &occ[2]) <= 1e-6);
        if let Ok(linear) = solve_symmetric_invariant(&exo, c) {
            prop_assert!(max_diff(&occ[1], linear.profile.occupancy()) <= 1e-6);
        }
    }
}

/// The sufficient condition does not force every start into the support. Here
/// the last start is unused, so the full-support system goes negative and its
/// certificate fails, while the equilibrium is still the same for every cost.
#[test]
fn sufficient_condition_without_full_support() {
    let (slots, c, a, b) = (13usize, 3usize, 0.239, 0.166);
    let exo: Vec<f64> = (1..=slots).map(|t| {
        let s = t as f64 / slots as f64;
        a * s + b * s * s
    }).collect();
    assert!(check_invariance_condition(&exo, c).unwrap().holds);
    assert!(matches!(
        solve_symmetric_invariant(&exo, c),
        Err(charging_games::Error::CertificateFailed(_))
    ));
    let inst = NonatomicInstance::symmetric(slots, c, 1.0, exo).unwrap();
    let options = SolverOptions::default().with_tolerance(1e-12);
    let sqrt = solve_equilibrium(&inst, &GridCostFunction::sqrt(), &options).unwrap();
    let l8 = solve_equilibrium(&inst, &GridCostFunction::power(8.0).unwrap(), &options).unwrap();
    assert!(max_diff(sqrt.profile.occupancy(), l8.profile.occupancy()) <= 1e-6);
    assert_eq!(sqrt.profile.start_mass()[10], 0.0);
    assert!(sqrt.profile.start_mass()[..10].iter().all(|&x| x > 1e-3));
}
