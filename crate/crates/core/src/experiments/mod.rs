//! Parameter sweeps over the atomic game, the two counter-examples, and
//! plot-data output.
//!
//! A sweep file names its kind, the base instance (`T`, `P`, `L_exo`, `cost`)
//! and inclusive ranges:
//!
//! ```toml
//! kind = "efficiency-vs-I"
//! T = 10
//! I = [1, 20]
//! C = [3, 5]
//! cost = { kind = "monomial", exponent = 2 }
//! ```
//!
//! Each series becomes `<name>_<label>.dat` with one `x y` line per point, and
//! `manifest.json` lists the files, parameters and any points that could not be
//! computed within the enumeration budget.

mod counterexamples;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use counterexamples::{
    nonatomic_counterexample_instance, run_counterexamples, AtomicCounterexample, CounterexampleReport, InvarianceReport,
    NonatomicCounterexample,
};

use crate::atomic::{AtomicGame, EnumerationOptions, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::model::file::CostSpec;
use crate::model::{AtomicInstance, GridCostFunction, PricingFunction};

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "CHARGE_GAME_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    NeProportion,
    #[serde(rename = "efficiency-vs-I")]
    EfficiencyVsI,
    #[serde(rename = "efficiency-vs-C")]
    EfficiencyVsC,
    EfficiencyVsPower,
    NonatomicCounterexample,
    AtomicCounterexample,
}

impl SweepKind {
    fn default_name(self) -> &'static str {
        match self {
            SweepKind::NeProportion => "ne_proportion",
            SweepKind::EfficiencyVsI => "efficiency_vs_I",
            SweepKind::EfficiencyVsC => "efficiency_vs_C",
            SweepKind::EfficiencyVsPower => "efficiency_vs_power",
            SweepKind::NonatomicCounterexample => "nonatomic_counterexample",
            SweepKind::AtomicCounterexample => "atomic_counterexample",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// File prefix; defaults to the kind in snake case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "T", default = "ten")]
    pub slots: usize,
    #[serde(rename = "P", default = "one")]
    pub power: f64,
    #[serde(rename = "L_exo", default, skip_serializing_if = "Option::is_none")]
    pub exogenous: Option<Vec<f64>>,
    /// Base grid cost; power sweeps replace it by `L^k`.
    #[serde(default = "quadratic")]
    pub cost: CostSpec,
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub players: Option<[usize; 2]>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub durations: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

fn ten() -> usize {
    10
}

fn one() -> f64 {
    1.0
}

fn quadratic() -> CostSpec {
    CostSpec::Monomial {
        coefficient: 1.0,
        exponent: 2.0,
    }
}

fn range(name: &str, r: Option<[usize; 2]>) -> Result<Vec<usize>> {
    match r {
        Some([a, b]) if a <= b => Ok((a..=b).collect()),
        Some([a, b]) => Err(Error::InvalidSweep(format!("{name} range [{a}, {b}] is empty"))),
        None => Err(Error::InvalidSweep(format!("{name} range is required"))),
    }
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or(self.kind.default_name())
    }

    pub fn exogenous_or_zero(&self) -> Vec<f64> {
        self.exogenous.clone().unwrap_or_else(|| vec![0.0; self.slots])
    }

    /// Budget from the environment, then the spec, then the default.
    pub fn effective_budget(&self) -> Result<u64> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSweep(format!("{BUDGET_ENV}={v} is not a count"))),
            Err(_) => Ok(self.budget.unwrap_or(DEFAULT_BUDGET)),
        }
    }

    fn points(&self) -> Result<Vec<Point>> {
        let cost = self.cost.build()?;
        let mut points = Vec::new();
        match self.kind {
            SweepKind::NeProportion | SweepKind::EfficiencyVsI => {
                for c in range("C", self.durations)? {
                    for i in range("I", self.players)? {
                        points.push(Point::new(format!("C{c}"), i as f64, i, c, cost.clone()));
                    }
                }
            }
            SweepKind::EfficiencyVsC => {
                for i in range("I", self.players)? {
                    for c in range("C", self.durations)? {
                        points.push(Point::new(format!("I{i}"), c as f64, i, c, cost.clone()));
                    }
                }
            }
            SweepKind::EfficiencyVsPower => {
                let players = range("I", self.players)?;
                let [lo, hi] = self
                    .exponent
                    .ok_or_else(|| Error::InvalidSweep("exponent range is required".into()))?;
                if lo == 0 || lo > hi {
                    return Err(Error::InvalidSweep(format!("exponent range [{lo}, {hi}] is invalid")));
                }
                for c in range("C", self.durations)? {
                    for &i in &players {
                        let label = if players.len() == 1 {
                            format!("C{c}")
                        } else {
                            format!("C{c}_I{i}")
                        };
                        for k in lo..=hi {
                            let f = GridCostFunction::power(k as f64)?;
                            points.push(Point::new(label.clone(), k as f64, i, c, f));
                        }
                    }
                }
            }
            SweepKind::NonatomicCounterexample | SweepKind::AtomicCounterexample => {}
        }
        for p in &points {
            if p.players == 0 || p.duration == 0 || p.duration > self.slots {
                return Err(Error::InvalidSweep(format!(
                    "I = {}, C = {} does not fit T = {}",
                    p.players, p.duration, self.slots
                )));
            }
        }
        Ok(points)
    }
}

struct Point {
    series: String,
    x: f64,
    players: usize,
    duration: usize,
    cost: GridCostFunction,
}

impl Point {
    fn new(series: String, x: f64, players: usize, duration: usize, cost: GridCostFunction) -> Self {
        Self {
            series,
            x,
            players,
            duration,
            cost,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DataSeries {
    pub label: String,
    /// `(x, y)`, x strictly increasing.
    pub points: Vec<(f64, f64)>,
}

/// A point left out of its series, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gap {
    pub series: String,
    pub x: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub series: Vec<DataSeries>,
    pub gaps: Vec<Gap>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    pub threads: Option<usize>,
    pub budget: Option<u64>,
}

/// Runs every point of the sweep. Points run in parallel; results are grouped
/// by series in the spec's order and sorted by `x`.
pub fn run_sweep(spec: &SweepSpec, options: &SweepOptions) -> Result<SweepResult> {
    match spec.kind {
        SweepKind::AtomicCounterexample | SweepKind::NonatomicCounterexample => {
            return counterexamples::as_series(spec.kind);
        }
        _ => {}
    }
    let points = spec.points()?;
    let budget = match options.budget {
        Some(b) => b,
        None => spec.effective_budget()?,
    };
    let exogenous = spec.exogenous_or_zero();
    if exogenous.len() != spec.slots {
        return Err(Error::InvalidSweep(format!(
            "L_exo has {} entries for T = {}",
            exogenous.len(),
            spec.slots
        )));
    }
    let enumeration = EnumerationOptions::default().with_budget(budget);
    let evaluate = |p: &Point| -> Result<std::result::Result<f64, String>> {
        let instance = AtomicInstance::symmetric(spec.slots, p.players, p.duration, spec.power, exogenous.clone())?;
        let game = AtomicGame::new(instance, p.cost.clone(), PricingFunction::Identity);
        let value = match spec.kind {
            SweepKind::NeProportion => game.ne_proportion(&enumeration),
            _ => game.efficiency(&enumeration).map(|r| r.efficiency),
        };
        match value {
            Ok(v) => Ok(Ok(v)),
            Err(e @ Error::BudgetExceeded { .. }) => Ok(Err(e.to_string())),
            Err(e) => Err(e),
        }
    };
    let job = || points.par_iter().map(evaluate).collect::<Result<Vec<_>>>();
    let values = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidSweep(e.to_string()))?
            .install(job)?,
        None => job()?,
    };

    let mut series: Vec<DataSeries> = Vec::new();
    let mut gaps = Vec::new();
    for (p, v) in points.iter().zip(values) {
        if series.last().is_none_or(|s| s.label != p.series) {
            series.push(DataSeries {
                label: p.series.clone(),
                points: Vec::new(),
            });
        }
        match v {
            Ok(y) => series.last_mut().expect("pushed above").points.push((p.x, y)),
            Err(reason) => gaps.push(Gap {
                series: p.series.clone(),
                x: p.x,
                reason,
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(SweepResult { series, gaps })
}

/// Seventeen significant digits.
pub fn render_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct ManifestFile<'a> {
    file: String,
    series: &'a str,
    points: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    sweep: &'a str,
    parameters: &'a SweepSpec,
    budget: u64,
    files: Vec<ManifestFile<'a>>,
    gaps: &'a [Gap],
}

/// Writes one `.dat` file per series and `manifest.json` into `dir`.
pub fn emit_data(spec: &SweepSpec, result: &SweepResult, budget: u64, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    for s in &result.series {
        let file = format!("{}_{}.dat", spec.name(), s.label);
        let mut text = String::new();
        for &(x, y) in &s.points {
            let _ = writeln!(text, "{} {}", render_number(x), render_number(y));
        }
        let path = dir.join(&file);
        fs::write(&path, text)?;
        written.push(path);
        files.push(ManifestFile {
            file,
            series: &s.label,
            points: s.points.len(),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        sweep: spec.name(),
        parameters: spec,
        budget,
        files,
        gaps: &result.gaps,
    };
    let path = dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SweepSpec {
        SweepSpec::from_toml_str(text).unwrap()
    }

    #[test]
    fn parses_and_names() {
        let s = spec("kind = \"ne-proportion\"\nI = [1, 3]\nC = [3, 3]");
        assert_eq!(s.name(), "ne_proportion");
        assert_eq!(s.slots, 10);
        let s = spec("kind = \"efficiency-vs-I\"\nname = \"fleet_runs\"\nI = [1, 2]\nC = [3, 4]");
        assert_eq!(s.name(), "fleet_runs");
        assert!(SweepSpec::from_toml_str("kind = \"bogus\"").is_err());
        assert!(SweepSpec::from_toml_str("kind = \"ne-proportion\"\nextra = 1").is_err());
    }

    #[test]
    fn rejects_bad_ranges() {
        let opts = SweepOptions::default();
        assert!(run_sweep(&spec("kind = \"ne-proportion\"\nI = [3, 1]\nC = [3, 3]"), &opts).is_err());
        assert!(run_sweep(&spec("kind = \"ne-proportion\"\nI = [1, 1]\nC = [11, 11]"), &opts).is_err());
        assert!(run_sweep(&spec("kind = \"efficiency-vs-power\"\nI = [2, 2]\nC = [3, 3]"), &opts).is_err());
    }

    #[test]
    fn small_sweep_groups_series() {
        let s = spec("kind = \"efficiency-vs-C\"\nI = [2, 3]\nC = [9, 10]");
        let r = run_sweep(&s, &SweepOptions::default()).unwrap();
        assert_eq!(r.series.len(), 2);
        assert_eq!(r.series[0].label, "I2");
        assert_eq!(r.series[0].points.len(), 2);
        assert_eq!(r.series[1].points[1], (10.0, 1.0));
        assert!(r.gaps.is_empty());
    }

    #[test]
    fn budget_failures_become_gaps() {
        let s = spec("kind = \"ne-proportion\"\nI = [1, 4]\nC = [3, 3]");
        let r = run_sweep(&s, &SweepOptions { threads: None, budget: Some(50) }).unwrap();
        let xs: Vec<f64> = r.series[0].points.iter().map(|p| p.0).collect();
        assert_eq!(xs, vec![1.0, 2.0]);
        assert_eq!(r.gaps.iter().map(|g| g.x).collect::<Vec<_>>(), vec![3.0, 4.0]);
    }

    #[test]
    fn rendering() {
        assert_eq!(render_number(1.0), "1.0000000000000000e0");
        assert_eq!(render_number(0.1), "1.0000000000000001e-1");
    }
}
