//! Exhaustive scans of the atomic game: Nash equilibria, social optimum,
//! efficiency and the proportion of equilibrium configurations.
//!
//! Symmetric instances are scanned over configurations, i.e. compositions of
//! the `I` players into the `A` start slots, of which there are
//! `binom(I + A - 1, A - 1)`. Any instance can also be scanned over the full
//! profile product space; both routes deduplicate by occupancy vector.
//!
//! The space is cut into chunks by fixing the leading coordinates. Chunks run
//! in parallel and are merged in their fixed order, so the result does not
//! depend on the thread count.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::tables::{with_table, CostTable, Scalar};
use super::AtomicGame;
use crate::error::{Error, Result};
use crate::model::{ChargingConfiguration, StrategyProfile, Value};

/// Candidate limit applied when none is given.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EnumerationStrategy {
    /// Configurations for symmetric instances, profiles otherwise.
    #[default]
    Auto,
    Configurations,
    Profiles,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Maximum number of candidates (configurations or profiles) examined.
    pub budget: u64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub strategy: EnumerationStrategy,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            threads: None,
            strategy: EnumerationStrategy::Auto,
        }
    }
}

impl EnumerationOptions {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_strategy(mut self, strategy: EnumerationStrategy) -> Self {
        self.strategy = strategy;
        self
    }
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct Equilibrium {
    pub configuration: ChargingConfiguration,
    /// One profile realizing the configuration.
    pub witness: StrategyProfile,
    /// Number of profiles realizing the configuration.
    #[serde(serialize_with = "decimal")]
    pub profiles: BigUint,
    pub total_cost: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumSet {
    /// Equilibrium configurations, ordered by occupancy vector.
    pub equilibria: Vec<Equilibrium>,
    /// Candidates examined.
    pub examined: u64,
    /// Distinct configurations in the space; exact only when `complete`.
    #[serde(serialize_with = "decimal")]
    pub configurations: BigUint,
    #[serde(serialize_with = "decimal")]
    pub profiles: BigUint,
    /// Profiles that are equilibria.
    #[serde(serialize_with = "decimal")]
    pub profiles_represented: BigUint,
    /// False when the budget cut the scan short.
    pub complete: bool,
}

impl EquilibriumSet {
    pub fn len(&self) -> usize {
        self.equilibria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equilibria.is_empty()
    }

    pub fn occupancies(&self) -> Vec<Vec<u32>> {
        self.equilibria
            .iter()
            .map(|e| e.configuration.occupancy.clone())
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EfficiencyReport {
    pub worst_ne_cost: Value,
    pub optimum_cost: Value,
    /// `worst_ne_cost / optimum_cost`
    pub efficiency: f64,
    pub optimum_configuration: ChargingConfiguration,
    pub worst_ne_configuration: ChargingConfiguration,
    pub equilibrium_count: usize,
}

#[derive(Clone, Copy)]
struct Needs {
    equilibria: bool,
    optimum: bool,
}

struct Found<S> {
    config: ChargingConfiguration,
    cost: S,
    witness: Vec<usize>,
    multiplicity: BigUint,
}

struct ChunkResult<S> {
    equilibria: Vec<Found<S>>,
    optimum: Option<(ChargingConfiguration, S)>,
    examined: u64,
    seen: BTreeSet<Vec<u32>>,
}

struct ScanResult<S> {
    equilibria: Vec<Found<S>>,
    optimum: Option<(ChargingConfiguration, S)>,
    examined: u64,
    configurations: BigUint,
    profiles: BigUint,
    complete: bool,
}

/// Keeps the lower cost; on ties the smaller configuration.
fn better_optimum<S: Scalar>(
    current: &Option<(ChargingConfiguration, S)>,
    config: &ChargingConfiguration,
    cost: &S,
) -> bool {
    match current {
        None => true,
        Some((c, v)) => cost < v || (cost == v && config < c),
    }
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Next composition in the order `[R, 0, .., 0]`, ..., `[0, .., 0, R]`.
fn next_composition(parts: &mut [u32]) -> bool {
    let m = parts.len();
    if m <= 1 {
        return false;
    }
    let tail = parts[m - 1];
    parts[m - 1] = 0;
    match (0..m - 1).rev().find(|&j| parts[j] > 0) {
        Some(j) => {
            parts[j] -= 1;
            parts[j + 1] = tail + 1;
            true
        }
        None => {
            parts[m - 1] = tail;
            false
        }
    }
}

/// Chunk sizes cut to the budget; returns per-chunk limits and whether everything fits.
fn apply_budget(sizes: &[BigUint], budget: u64) -> (Vec<u64>, bool) {
    let mut remaining = budget;
    let mut complete = true;
    let limits = sizes
        .iter()
        .map(|size| {
            let take = match size.to_u64() {
                Some(s) if s <= remaining => s,
                _ => {
                    complete = false;
                    remaining
                }
            };
            remaining -= take;
            take
        })
        .collect();
    (limits, complete)
}

impl AtomicGame {
    fn run_in_pool<T: Send>(&self, threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
        match threads {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(job),
                Err(_) => job(),
            },
            None => job(),
        }
    }

    fn use_configurations(&self, strategy: EnumerationStrategy) -> Result<bool> {
        match strategy {
            EnumerationStrategy::Auto => Ok(self.instance.is_symmetric()),
            EnumerationStrategy::Profiles => Ok(false),
            EnumerationStrategy::Configurations if self.instance.is_symmetric() => Ok(true),
            EnumerationStrategy::Configurations => Err(Error::InvalidInstance(
                "configuration enumeration needs identical players".into(),
            )),
        }
    }

    fn scan<S: Scalar>(&self, table: &CostTable<S>, options: &EnumerationOptions, needs: Needs) -> Result<ScanResult<S>> {
        let by_config = self.use_configurations(options.strategy)?;
        Ok(self.run_in_pool(options.threads, || {
            if by_config {
                self.scan_configurations(table, options.budget, needs)
            } else {
                self.scan_profiles(table, options.budget, needs)
            }
        }))
    }

    fn config_is_nash<S: Scalar>(&self, table: &CostTable<S>, counts: &[u32], occ: &[u32]) -> bool {
        let window = &self.instance.players()[0];
        window.action_set().filter(|&s| counts[s - 1] > 0).all(|s| {
            let own = table.window_cost(occ, window, s);
            window
                .action_set()
                .filter(|&alt| alt != s)
                .all(|alt| !self.strictly_better(&table.deviation_cost(occ, window, s, alt), &own))
        })
    }

    fn scan_configurations<S: Scalar>(&self, table: &CostTable<S>, budget: u64, needs: Needs) -> ScanResult<S> {
        let window = self.instance.players()[0];
        let players = self.instance.player_count() as u32;
        let slots = self.instance.slots();
        let actions = window.action_count();
        let first = window.first_start();
        let fixed = actions.saturating_sub(1).min(2);
        let free = actions - fixed;

        let mut prefixes: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..fixed {
            prefixes = prefixes
                .into_iter()
                .flat_map(|p| {
                    let used: u32 = p.iter().sum();
                    (0..=players - used).rev().map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        let sizes: Vec<BigUint> = prefixes
            .iter()
            .map(|p| {
                let rest = (players - p.iter().sum::<u32>()) as usize;
                binomial(rest + free - 1, free - 1)
            })
            .collect();
        let total = binomial(players as usize + actions - 1, actions - 1);
        let (limits, complete) = apply_budget(&sizes, budget);

        let chunks: Vec<ChunkResult<S>> = prefixes
            .par_iter()
            .zip(limits.par_iter())
            .map(|(prefix, &limit)| {
                let mut out = ChunkResult {
                    equilibria: Vec::new(),
                    optimum: None,
                    examined: 0,
                    seen: BTreeSet::new(),
                };
                if limit == 0 {
                    return out;
                }
                let rest = players - prefix.iter().sum::<u32>();
                let mut parts = vec![0u32; free];
                parts[0] = rest;
                let mut counts = vec![0u32; slots];
                let mut occ = vec![0u32; slots];
                loop {
                    for (j, &v) in prefix.iter().chain(parts.iter()).enumerate() {
                        counts[first - 1 + j] = v;
                    }
                    let mut running = 0u32;
                    for t in 0..slots {
                        running += counts[t];
                        if t >= window.duration {
                            running -= counts[t - window.duration];
                        }
                        occ[t] = running;
                    }
                    let cost = table.total_cost(&occ);
                    let make_config = || ChargingConfiguration {
                        occupancy: occ.clone(),
                        start_counts: counts.clone(),
                    };
                    if needs.equilibria && self.config_is_nash(table, &counts, &occ) {
                        let witness: Vec<usize> = counts
                            .iter()
                            .enumerate()
                            .flat_map(|(t, &c)| std::iter::repeat_n(t + 1, c as usize))
                            .collect();
                        let multiplicity = counts
                            .iter()
                            .fold(factorial(players), |acc, &c| acc / factorial(c));
                        out.equilibria.push(Found {
                            config: make_config(),
                            cost: cost.clone(),
                            witness,
                            multiplicity,
                        });
                    }
                    if needs.optimum {
                        let config = make_config();
                        if better_optimum(&out.optimum, &config, &cost) {
                            out.optimum = Some((config, cost));
                        }
                    }
                    out.examined += 1;
                    if out.examined == limit || !next_composition(&mut parts) {
                        break;
                    }
                }
                out
            })
            .collect();

        let mut result = ScanResult {
            equilibria: Vec::new(),
            optimum: None,
            examined: 0,
            configurations: total,
            profiles: self.instance.profile_space_size(),
            complete,
        };
        for chunk in chunks {
            result.examined += chunk.examined;
            result.equilibria.extend(chunk.equilibria);
            if let Some((c, v)) = chunk.optimum {
                if better_optimum(&result.optimum, &c, &v) {
                    result.optimum = Some((c, v));
                }
            }
        }
        result.equilibria.sort_by(|a, b| a.config.cmp(&b.config));
        result
    }

    fn scan_profiles<S: Scalar>(&self, table: &CostTable<S>, budget: u64, needs: Needs) -> ScanResult<S> {
        let players = self.instance.players();
        let slots = self.instance.slots();
        let fixed = players.len().min(2);

        let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
        for window in &players[..fixed] {
            prefixes = prefixes
                .into_iter()
                .flat_map(|p| {
                    window.action_set().map(move |s| {
                        let mut q = p.clone();
                        q.push(s);
                        q
                    })
                })
                .collect();
        }
        let tail_size = players[fixed..]
            .iter()
            .fold(BigUint::one(), |acc, w| acc * BigUint::from(w.action_count()));
        let sizes = vec![tail_size; prefixes.len()];
        let (limits, complete) = apply_budget(&sizes, budget);

        let chunks: Vec<ChunkResult<S>> = prefixes
            .par_iter()
            .zip(limits.par_iter())
            .map(|(prefix, &limit)| {
                let mut out = ChunkResult {
                    equilibria: Vec::new(),
                    optimum: None,
                    examined: 0,
                    seen: BTreeSet::new(),
                };
                if limit == 0 {
                    return out;
                }
                let mut starts: Vec<usize> = prefix.clone();
                starts.extend(players[fixed..].iter().map(|w| w.first_start()));
                let mut found: BTreeMap<Vec<u32>, Found<S>> = BTreeMap::new();
                let mut counts = vec![0u32; slots];
                let mut occ = vec![0u32; slots];
                loop {
                    counts.iter_mut().for_each(|c| *c = 0);
                    occ.iter_mut().for_each(|c| *c = 0);
                    for (w, &s) in players.iter().zip(&starts) {
                        counts[s - 1] += 1;
                        for t in w.charging_slots(s) {
                            occ[t - 1] += 1;
                        }
                    }
                    out.seen.insert(occ.clone());
                    let cost = table.total_cost(&occ);
                    let profile = StrategyProfile::from_starts_unchecked(starts.clone());
                    if needs.equilibria && self.is_nash_in(table, &occ, &profile) {
                        found
                            .entry(occ.clone())
                            .and_modify(|f| f.multiplicity += 1u32)
                            .or_insert_with(|| Found {
                                config: ChargingConfiguration {
                                    occupancy: occ.clone(),
                                    start_counts: counts.clone(),
                                },
                                cost: cost.clone(),
                                witness: starts.clone(),
                                multiplicity: BigUint::one(),
                            });
                    }
                    if needs.optimum {
                        let config = ChargingConfiguration {
                            occupancy: occ.clone(),
                            start_counts: counts.clone(),
                        };
                        if better_optimum(&out.optimum, &config, &cost) {
                            out.optimum = Some((config, cost));
                        }
                    }
                    out.examined += 1;
                    if out.examined == limit {
                        break;
                    }
                    // odometer over the free players, last player fastest
                    let mut advanced = false;
                    for i in (fixed..players.len()).rev() {
                        if starts[i] < players[i].last_start() {
                            starts[i] += 1;
                            advanced = true;
                            break;
                        }
                        starts[i] = players[i].first_start();
                    }
                    if !advanced {
                        break;
                    }
                }
                out.equilibria = found.into_values().collect();
                out
            })
            .collect();

        let mut merged: BTreeMap<Vec<u32>, Found<S>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut optimum = None;
        let mut examined = 0;
        for chunk in chunks {
            examined += chunk.examined;
            seen.extend(chunk.seen);
            for f in chunk.equilibria {
                match merged.get_mut(&f.config.occupancy) {
                    Some(existing) => existing.multiplicity += f.multiplicity,
                    None => {
                        merged.insert(f.config.occupancy.clone(), f);
                    }
                }
            }
            if let Some((c, v)) = chunk.optimum {
                if better_optimum(&optimum, &c, &v) {
                    optimum = Some((c, v));
                }
            }
        }
        ScanResult {
            equilibria: merged.into_values().collect(),
            optimum,
            examined,
            configurations: BigUint::from(seen.len()),
            profiles: self.instance.profile_space_size(),
            complete,
        }
    }

    fn budget_error<S>(&self, scan: &ScanResult<S>, budget: u64) -> Error {
        let required = if scan.configurations > BigUint::from(scan.examined) {
            scan.configurations.clone()
        } else {
            scan.profiles.clone()
        };
        Error::BudgetExceeded { required, budget }
    }

    /// All pure Nash equilibria, deduplicated by occupancy. When the budget
    /// cuts the scan short the set is partial and `complete` is false.
    pub fn enumerate_equilibria(&self, options: &EnumerationOptions) -> Result<EquilibriumSet> {
        let needs = Needs {
            equilibria: true,
            optimum: false,
        };
        with_table!(&self.tables, t => {
            let scan = self.scan(t, options, needs)?;
            let profiles_represented = scan.equilibria.iter().map(|f| &f.multiplicity).sum();
            Ok(EquilibriumSet {
                equilibria: scan
                    .equilibria
                    .into_iter()
                    .map(|f| Equilibrium {
                        configuration: f.config,
                        witness: StrategyProfile::from_starts_unchecked(f.witness),
                        profiles: f.multiplicity,
                        total_cost: f.cost.to_value(),
                    })
                    .collect(),
                examined: scan.examined,
                configurations: scan.configurations,
                profiles: scan.profiles,
                profiles_represented,
                complete: scan.complete,
            })
        })
    }

    /// Configuration minimizing the total grid cost; the smallest one on ties.
    pub fn social_optimum(&self, options: &EnumerationOptions) -> Result<(ChargingConfiguration, Value)> {
        let needs = Needs {
            equilibria: false,
            optimum: true,
        };
        with_table!(&self.tables, t => {
            let scan = self.scan(t, options, needs)?;
            if !scan.complete {
                return Err(self.budget_error(&scan, options.budget));
            }
            let (c, v) = scan.optimum.expect("non-empty space");
            Ok((c, v.to_value()))
        })
    }

    /// Worst equilibrium cost over optimal cost.
    pub fn efficiency(&self, options: &EnumerationOptions) -> Result<EfficiencyReport> {
        let needs = Needs {
            equilibria: true,
            optimum: true,
        };
        with_table!(&self.tables, t => {
            let scan = self.scan(t, options, needs)?;
            if !scan.complete {
                return Err(self.budget_error(&scan, options.budget));
            }
            let (opt_config, opt_cost) = scan.optimum.expect("non-empty space");
            let mut worst: Option<&Found<_>> = None;
            for f in &scan.equilibria {
                let replace = match worst {
                    None => true,
                    Some(w) => f.cost > w.cost || (f.cost == w.cost && f.config < w.config),
                };
                if replace {
                    worst = Some(f);
                }
            }
            // A finite ordinal potential game always has a pure equilibrium.
            let worst = worst.expect("pure equilibrium exists");
            let worst_value = worst.cost.to_value();
            let opt_value = opt_cost.to_value();
            Ok(EfficiencyReport {
                efficiency: ratio(&worst_value, &opt_value),
                worst_ne_cost: worst_value,
                optimum_cost: opt_value,
                optimum_configuration: opt_config,
                worst_ne_configuration: worst.config.clone(),
                equilibrium_count: scan.equilibria.len(),
            })
        })
    }

    /// Fraction of configurations that are equilibria.
    pub fn ne_proportion(&self, options: &EnumerationOptions) -> Result<f64> {
        let set = self.enumerate_equilibria(options)?;
        if !set.complete {
            return Err(Error::BudgetExceeded {
                required: set.configurations,
                budget: options.budget,
            });
        }
        let total = set.configurations.to_f64().unwrap_or(f64::INFINITY);
        Ok(set.len() as f64 / total)
    }
}

/// `worst / optimum`; exact inputs divide in integers first so equal costs give exactly one.
fn ratio(worst: &Value, optimum: &Value) -> f64 {
    if let (Some(w), Some(o)) = (worst.as_exact(), optimum.as_exact()) {
        if o.is_zero() {
            return if w.is_zero() { 1.0 } else { f64::INFINITY };
        }
        let scaled: BigInt = (w << 64u32) / o;
        return ToPrimitive::to_f64(&scaled).unwrap_or(f64::INFINITY) / 2f64.powi(64);
    }
    let (w, o) = (worst.to_f64(), optimum.to_f64());
    if o == 0.0 {
        if w == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        w / o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomicInstance, GridCostFunction, PricingFunction};

    fn quad(inst: AtomicInstance) -> AtomicGame {
        AtomicGame::new(inst, GridCostFunction::quadratic(), PricingFunction::Identity)
    }

    #[test]
    fn compositions_are_complete_and_distinct() {
        for (r, m) in [(0u32, 3usize), (3, 1), (4, 3), (5, 4)] {
            let mut parts = vec![0u32; m];
            parts[0] = r;
            let mut seen = BTreeSet::new();
            loop {
                assert_eq!(parts.iter().sum::<u32>(), r);
                assert!(seen.insert(parts.clone()));
                if !next_composition(&mut parts) {
                    break;
                }
            }
            assert_eq!(BigUint::from(seen.len()), binomial(r as usize + m - 1, m - 1));
        }
    }

    #[test]
    fn single_player_flat_load() {
        let g = quad(AtomicInstance::symmetric(7, 1, 3, 1.0, vec![2.0; 7]).unwrap());
        let set = g.enumerate_equilibria(&EnumerationOptions::default()).unwrap();
        assert!(set.complete);
        assert_eq!(set.len(), 5);
        assert_eq!(g.ne_proportion(&EnumerationOptions::default()).unwrap(), 1.0);
        let report = g.efficiency(&EnumerationOptions::default()).unwrap();
        assert_eq!(report.efficiency, 1.0);
        // any placement costs C f(P + L^exo) plus the idle slots
        assert_eq!(report.optimum_cost, Value::Exact((3 * 9 + 4 * 4).into()));
    }

    #[test]
    fn optimum_examples() {
        let g = quad(AtomicInstance::symmetric(4, 2, 2, 1.0, vec![0.0; 4]).unwrap());
        let (c, v) = g.social_optimum(&EnumerationOptions::default()).unwrap();
        assert_eq!(c.occupancy, vec![1, 1, 1, 1]);
        assert_eq!(v, Value::Exact(4.into()));

        for players in [2usize, 4, 6] {
            let g = quad(AtomicInstance::symmetric(10, players, 5, 1.0, vec![0.0; 10]).unwrap());
            let (c, _) = g.social_optimum(&EnumerationOptions::default()).unwrap();
            let mut expected = vec![0u32; 10];
            expected[0] = players as u32 / 2;
            expected[5] = players as u32 / 2;
            assert_eq!(c.start_counts, expected);
        }
    }

    #[test]
    fn budget_truncates_and_flags() {
        let g = quad(AtomicInstance::symmetric(8, 4, 2, 1.0, vec![0.0; 8]).unwrap());
        let opts = EnumerationOptions::default().with_budget(10);
        let set = g.enumerate_equilibria(&opts).unwrap();
        assert!(!set.complete);
        assert_eq!(set.examined, 10);
        assert!(matches!(g.efficiency(&opts), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(g.ne_proportion(&opts), Err(Error::BudgetExceeded { .. })));
        let full = g.enumerate_equilibria(&EnumerationOptions::default()).unwrap();
        assert!(full.complete);
        assert_eq!(BigUint::from(full.examined), full.configurations);
    }

    #[test]
    fn configuration_strategy_needs_symmetry() {
        let inst = AtomicInstance::new(
            crate::model::TimeHorizon::new(5).unwrap(),
            vec![
                crate::model::ChargingWindow::new(1, 5, 2),
                crate::model::ChargingWindow::new(2, 5, 3),
            ],
            1.0,
            vec![0.0; 5],
        )
        .unwrap();
        let g = quad(inst);
        let opts = EnumerationOptions::default().with_strategy(EnumerationStrategy::Configurations);
        assert!(g.enumerate_equilibria(&opts).is_err());
        let set = g.enumerate_equilibria(&EnumerationOptions::default()).unwrap();
        assert!(set.complete);
        for e in &set.equilibria {
            assert!(g.is_nash(&e.witness));
        }
    }

    #[test]
    fn multiplicities_add_up() {
        let g = quad(AtomicInstance::symmetric(6, 3, 2, 1.0, vec![1.0, 2.0, 3.0, 2.0, 1.0, 3.0]).unwrap());
        let by_config = g.enumerate_equilibria(&EnumerationOptions::default()).unwrap();
        let by_profile = g
            .enumerate_equilibria(&EnumerationOptions::default().with_strategy(EnumerationStrategy::Profiles))
            .unwrap();
        assert_eq!(by_config.occupancies(), by_profile.occupancies());
        assert_eq!(by_config.profiles_represented, by_profile.profiles_represented);
        assert_eq!(by_config.configurations, by_profile.configurations);
    }

    #[test]
    fn ratio_is_exact_on_ties() {
        let a = Value::Exact(BigInt::from(10).pow(40));
        assert_eq!(ratio(&a, &a), 1.0);
        assert_eq!(ratio(&Value::Exact(5.into()), &Value::Exact(4.into())), 1.25);
        assert_eq!(ratio(&Value::Exact(0.into()), &Value::Exact(0.into())), 1.0);
    }
}
