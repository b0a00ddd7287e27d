//! Atomic and nonatomic EV charging games.
//!
//! Each EV picks the slot where it starts an uninterrupted charging session
//! inside its availability window, and pays a cost driven by the transformer
//! load over the slots it occupies. This crate computes pure Nash equilibria,
//! social optima and the worst-equilibrium efficiency of the finite game
//! ([`atomic`]), Wardrop equilibria of its continuum limit together with the
//! load-independent linear-system solution of the symmetric case
//! ([`nonatomic`]), and parameter sweeps producing plot data ([`experiments`]).
//!
//! ```
//! use charging_games::atomic::{AtomicGame, EnumerationOptions};
//! use charging_games::model::{AtomicInstance, GridCostFunction, PricingFunction};
//!
//! let instance = AtomicInstance::symmetric(6, 3, 2, 1.0, vec![1.0, 2.0, 3.0, 2.0, 1.0, 3.0])?;
//! let game = AtomicGame::new(instance, GridCostFunction::quadratic(), PricingFunction::Identity);
//! let equilibria = game.enumerate_equilibria(&EnumerationOptions::default())?;
//! assert!(equilibria.len() >= 2);
//! # Ok::<(), charging_games::Error>(())
//! ```

pub mod atomic;
pub mod error;
pub mod experiments;
pub mod model;
pub mod nonatomic;

pub use error::{Error, Result};
