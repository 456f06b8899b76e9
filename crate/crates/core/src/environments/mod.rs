//! Environments with rewards in `{0, −1}`.
//!
//! Bandit daimons are oblivious: payoffs are a fixed function of the round
//! and arm. Catch and cart pole are continuing tasks whose steps report a
//! continuation flag that is false when a ball lands or the pole falls.

mod bandit;
mod cartpole;
mod catch;

pub use bandit::{bandit_payoff, Daimon, STANDARD_TEN_ARM};
pub use cartpole::{cartpole_step, CartPole, CartPoleState, CARTPOLE_ACTIONS};
pub use catch::{catch_step, Catch, CatchState, CATCH_ACTIONS, CATCH_HEIGHT, CATCH_WIDTH};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::simplex::SeededRng;

/// Result of one environment transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Step<S> {
    pub state: S,
    pub observation: Vec<f64>,
    pub reward: f64,
    /// False when this transition ended a segment (ball landed, pole fell).
    pub continues: bool,
}

/// Common agent-facing interface.
pub trait Environment {
    fn num_actions(&self) -> usize;
    fn observation_width(&self) -> usize;
    fn observation(&self) -> Vec<f64>;
    /// Advance one step, returning `(reward, continues)`.
    fn step(&mut self, action: usize, rng: &mut SeededRng) -> Result<(f64, bool)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvKind {
    Catch,
    Cartpole,
}

impl EnvKind {
    pub fn tag(self) -> &'static str {
        match self {
            EnvKind::Catch => "catch",
            EnvKind::Cartpole => "cartpole",
        }
    }

    /// Fresh environment with its initial state drawn from `rng`.
    pub fn build(self, rng: &mut SeededRng) -> Box<dyn Environment + Send> {
        match self {
            EnvKind::Catch => Box::new(Catch::new(rng)),
            EnvKind::Cartpole => Box::new(CartPole::new(rng)),
        }
    }
}

impl std::str::FromStr for EnvKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "catch" => Ok(EnvKind::Catch),
            "cartpole" | "cart-pole" => Ok(EnvKind::Cartpole),
            other => Err(crate::error::Error::Config(format!("unknown environment `{other}`"))),
        }
    }
}
