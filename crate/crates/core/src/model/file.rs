//! TOML instance files.
//!
//! ```toml
//! T = 6
//! P = 1
//! L_exo = [1, 2, 3, 2, 1, 3]
//! players = [{ a = 1, d = 6, C = 2, count = 3 }]
//! cost = { kind = "monomial", coefficient = 1, exponent = 2 }
//! ```
//!
//! A nonatomic instance lists `classes = [{ w = 1.0, a = 1, d = 6, C = 2 }]`
//! instead of `players`. `L_exo` defaults to zeros and `P` to one. The
//! optional `pricing` table takes `kind = "identity" | "affine" | "exp"`.

use serde::{Deserialize, Serialize};

use super::{
    AtomicInstance, ChargingWindow, GridCostFunction, NonatomicInstance, PricingFunction,
    TimeHorizon, UserClass,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CostSpec {
    Monomial {
        #[serde(default = "one")]
        coefficient: f64,
        exponent: f64,
    },
    Sqrt,
    Sum {
        terms: Vec<CostSpec>,
    },
}

fn one() -> f64 {
    1.0
}

impl CostSpec {
    pub fn build(&self) -> Result<GridCostFunction> {
        match self {
            CostSpec::Monomial {
                coefficient,
                exponent,
            } => GridCostFunction::monomial(*coefficient, *exponent),
            CostSpec::Sqrt => Ok(GridCostFunction::sqrt()),
            CostSpec::Sum { terms } => {
                GridCostFunction::sum(terms.iter().map(CostSpec::build).collect::<Result<_>>()?)
            }
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PricingSpec {
    #[default]
    Identity,
    Affine {
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
    Exp {
        rate: f64,
    },
}

impl PricingSpec {
    pub fn build(&self) -> Result<PricingFunction> {
        match *self {
            PricingSpec::Identity => Ok(PricingFunction::Identity),
            PricingSpec::Affine { scale, offset } => PricingFunction::affine(scale, offset),
            PricingSpec::Exp { rate } => PricingFunction::exp(rate),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlayerSpec {
    pub a: usize,
    pub d: usize,
    #[serde(rename = "C")]
    pub c: usize,
    /// Number of identical players with this window.
    #[serde(default = "one_usize")]
    pub count: usize,
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub w: f64,
    pub a: usize,
    pub d: usize,
    #[serde(rename = "C")]
    pub c: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(rename = "T")]
    pub slots: usize,
    #[serde(rename = "P", default = "one")]
    pub power: f64,
    #[serde(rename = "L_exo", default, skip_serializing_if = "Option::is_none")]
    pub exogenous: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub players: Option<Vec<PlayerSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<ClassSpec>>,
    pub cost: CostSpec,
    #[serde(default)]
    pub pricing: PricingSpec,
}

/// An instance file resolved into one of the two game versions.
#[derive(Clone, Debug)]
pub enum LoadedInstance {
    Atomic {
        instance: AtomicInstance,
        cost: GridCostFunction,
        pricing: PricingFunction,
    },
    Nonatomic {
        instance: NonatomicInstance,
        cost: GridCostFunction,
        pricing: PricingFunction,
    },
}

impl InstanceFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn exogenous_or_zero(&self) -> Vec<f64> {
        self.exogenous.clone().unwrap_or_else(|| vec![0.0; self.slots])
    }

    pub fn load(&self) -> Result<LoadedInstance> {
        let horizon = TimeHorizon::new(self.slots)?;
        let cost = self.cost.build()?;
        let pricing = self.pricing.build()?;
        match (&self.players, &self.classes) {
            (Some(players), None) => {
                let windows = players
                    .iter()
                    .flat_map(|p| std::iter::repeat_n(ChargingWindow::new(p.a, p.d, p.c), p.count))
                    .collect();
                let instance =
                    AtomicInstance::new(horizon, windows, self.power, self.exogenous_or_zero())?;
                Ok(LoadedInstance::Atomic {
                    instance,
                    cost,
                    pricing,
                })
            }
            (None, Some(classes)) => {
                let classes = classes
                    .iter()
                    .map(|c| UserClass {
                        weight: c.w,
                        window: ChargingWindow::new(c.a, c.d, c.c),
                    })
                    .collect();
                let instance =
                    NonatomicInstance::new(horizon, classes, self.power, self.exogenous_or_zero())?;
                Ok(LoadedInstance::Nonatomic {
                    instance,
                    cost,
                    pricing,
                })
            }
            _ => Err(Error::Parse(
                "an instance lists exactly one of `players` or `classes`".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_file() {
        let text = r#"
            T = 6
            P = 1
            L_exo = [1, 2, 3, 2, 1, 3]
            players = [{ a = 1, d = 6, C = 2, count = 3 }]
            cost = { kind = "monomial", coefficient = 1, exponent = 2 }
        "#;
        let LoadedInstance::Atomic { instance, cost, pricing } =
            InstanceFile::from_toml_str(text).unwrap().load().unwrap()
        else {
            panic!("expected atomic instance");
        };
        assert_eq!(instance.player_count(), 3);
        assert!(instance.is_symmetric());
        assert_eq!(cost, GridCostFunction::quadratic());
        assert!(pricing.is_identity());
    }

    #[test]
    fn nonatomic_file_with_composite_cost() {
        let text = r#"
            T = 4
            classes = [{ w = 0.25, a = 1, d = 4, C = 2 }, { w = 0.75, a = 2, d = 4, C = 1 }]
            cost = { kind = "sum", terms = [{ kind = "sqrt" }, { kind = "monomial", exponent = 3 }] }
            pricing = { kind = "affine", scale = 2 }
        "#;
        let LoadedInstance::Nonatomic { instance, cost, .. } =
            InstanceFile::from_toml_str(text).unwrap().load().unwrap()
        else {
            panic!("expected nonatomic instance");
        };
        assert_eq!(instance.exogenous(), &[0.0; 4]);
        assert_eq!(instance.classes().len(), 2);
        assert!(!cost.satisfies_a2());
    }

    #[test]
    fn rejects_ambiguous_and_malformed() {
        let both = r#"
            T = 4
            players = [{ a = 1, d = 4, C = 2 }]
            classes = [{ w = 1.0, a = 1, d = 4, C = 2 }]
            cost = { kind = "sqrt" }
        "#;
        assert!(InstanceFile::from_toml_str(both).unwrap().load().is_err());
        assert!(InstanceFile::from_toml_str("T = 4\ncost = { kind = \"cubic\" }").is_err());
        let bad_cost = "T = 4\nplayers = [{ a = 1, d = 4, C = 2 }]\ncost = { kind = \"monomial\", exponent = -1 }";
        assert!(InstanceFile::from_toml_str(bad_cost).unwrap().load().is_err());
    }
}
