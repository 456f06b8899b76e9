use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::environments::{Daimon, EnvKind};
use crate::error::{Error, Result};
use crate::reduction::EtaSchedule;
use crate::updates::UpdateRule;

/// Best SPG Adam learning rates, inherited by NeuRD and NeuRD-CIX.
pub const CATCH_LEARNING_RATE: f64 = 0.001797;
pub const CARTPOLE_LEARNING_RATE: f64 = 0.00005;

pub const DESK_SEEDS: u64 = 5;
pub const DESK_STEPS: u64 = 100_000;
pub const PAPER_SEEDS: u64 = 20;
pub const PAPER_STEPS: u64 = 300_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Bandit,
    Agent,
    Sweep,
    Bound,
    Gradcheck,
    LemmaCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Spg,
    Neurd,
    NeurdCix,
    Exp3Cix,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Spg => "spg",
            Algorithm::Neurd => "neurd",
            Algorithm::NeurdCix => "neurd-cix",
            Algorithm::Exp3Cix => "exp3-cix",
        }
    }

    /// Actor update rule; `eta` is used by NeuRD-CIX only.
    pub fn update_rule(self, eta: f64) -> Result<UpdateRule> {
        match self {
            Algorithm::Spg => Ok(UpdateRule::Spg),
            Algorithm::Neurd => Ok(UpdateRule::Neurd),
            Algorithm::NeurdCix => {
                if !(0.0..=1.0).contains(&eta) {
                    return Err(Error::InvalidEta(eta));
                }
                Ok(UpdateRule::NeurdCix { eta })
            }
            Algorithm::Exp3Cix => Err(Error::Config("exp3-cix is a bandit algorithm".into())),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spg" => Ok(Algorithm::Spg),
            "neurd" => Ok(Algorithm::Neurd),
            "neurd-cix" => Ok(Algorithm::NeurdCix),
            "exp3-cix" => Ok(Algorithm::Exp3Cix),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    Fixed,
    Stochastic,
    Shifting,
}

impl FromStr for AdversaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(AdversaryKind::Fixed),
            "stochastic" => Ok(AdversaryKind::Stochastic),
            "shifting" => Ok(AdversaryKind::Shifting),
            other => Err(Error::Config(format!("unknown adversary `{other}`"))),
        }
    }
}

/// Every knob of every experiment. Fields missing from a config file take
/// their defaults; command-line flags override both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub env: EnvKind,
    pub algo: Algorithm,
    /// Fixed η for NeuRD-CIX, or a constant bandit schedule when set there.
    pub eta: Option<f64>,
    /// η grid for sweeps.
    pub etas: Vec<f64>,
    /// Adam learning rate; `None` picks the environment default.
    pub lr: Option<f64>,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub log_every: u64,
    pub paper_scale: bool,
    pub parallel: bool,

    pub arms: usize,
    pub horizon: u64,
    pub xi: f64,
    pub delta: f64,
    pub g_max: f64,
    pub adversary: AdversaryKind,
    /// Explicit bandit instance; overrides `arms` and `adversary`.
    pub daimon: Option<Daimon>,
    pub shift_period: u64,
    /// Rounds at which `bound` reports; empty means `T/100, T/10, T`.
    pub checkpoints: Vec<u64>,

    pub trials: u64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            env: EnvKind::Catch,
            algo: Algorithm::NeurdCix,
            eta: None,
            etas: vec![0.0, 1.0],
            lr: None,
            steps: DESK_STEPS,
            seeds: (0..DESK_SEEDS).collect(),
            log_every: 1000,
            paper_scale: false,
            parallel: true,
            arms: 10,
            horizon: 100_000,
            xi: 1.0,
            delta: 0.05,
            g_max: 1.0,
            adversary: AdversaryKind::Fixed,
            daimon: None,
            shift_period: 10_000,
            checkpoints: Vec::new(),
            trials: 10_000,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn learning_rate(&self) -> f64 {
        self.lr.unwrap_or(match self.env {
            EnvKind::Catch => CATCH_LEARNING_RATE,
            EnvKind::Cartpole => CARTPOLE_LEARNING_RATE,
        })
    }

    /// Switch to the full protocol: 20 seeds × 300,000 steps.
    pub fn with_paper_scale(mut self) -> Self {
        self.paper_scale = true;
        self.steps = PAPER_STEPS;
        self.seeds = (0..PAPER_SEEDS).collect();
        self
    }

    /// η used by the actor rule (default 1 for NeuRD-CIX).
    pub fn actor_eta(&self) -> f64 {
        match self.algo {
            Algorithm::NeurdCix => self.eta.unwrap_or(1.0),
            _ => 0.0,
        }
    }

    pub fn eta_schedule(&self) -> Result<EtaSchedule> {
        match self.eta {
            Some(value) => EtaSchedule::constant(value),
            None => EtaSchedule::scaled(self.xi),
        }
    }

    /// The oblivious bandit instance for `seed`.
    pub fn bandit_daimon(&self, seed: u64) -> Result<Daimon> {
        if let Some(d) = &self.daimon {
            d.validate()?;
            return Ok(d.clone());
        }
        if self.arms == 0 {
            return Err(Error::Config("at least one arm is required".into()));
        }
        let table = Daimon::standard_table(self.arms);
        match self.adversary {
            AdversaryKind::Fixed => Daimon::fixed(table),
            AdversaryKind::Stochastic => Daimon::stochastic(table, seed),
            AdversaryKind::Shifting => {
                let k = self.arms;
                if k < 2 {
                    return Err(Error::Config("a shifting adversary needs two arms".into()));
                }
                // Cyclic rotation: the best arm's payoff moves to a new arm.
                let permutation = (0..k).map(|a| (a + 1) % k).collect();
                Daimon::shifting(table, self.shift_period, permutation)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.log_every == 0 {
            return Err(Error::Config("log_every must be positive".into()));
        }
        if let Some(lr) = self.lr {
            if !(lr >= 0.0 && lr.is_finite()) {
                return Err(Error::Config(format!("learning rate must be non-negative, got {lr}")));
            }
        }
        for &eta in &self.etas {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidEta(eta));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json_is_default() {
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn json_fields() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"agent","env":"cartpole","algo":"spg","seeds":[3,1],"steps":500}"#,
        )
        .unwrap();
        assert_eq!(c.kind, Some(ExperimentKind::Agent));
        assert_eq!(c.env, EnvKind::Cartpole);
        assert_eq!(c.algo, Algorithm::Spg);
        assert_eq!(c.seeds, vec![3, 1]);
        assert_eq!(c.learning_rate(), CARTPOLE_LEARNING_RATE);
        assert!(ExperimentConfig::from_json(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn paper_scale() {
        let c = ExperimentConfig::default().with_paper_scale();
        assert_eq!(c.seeds.len(), 20);
        assert_eq!(c.steps, 300_000);
    }

    #[test]
    fn daimons() {
        let mut c = ExperimentConfig::default();
        assert_eq!(c.bandit_daimon(0).unwrap().num_arms(), 10);
        c.adversary = AdversaryKind::Shifting;
        assert_eq!(c.bandit_daimon(0).unwrap().tag(), "shifting");
        c.arms = 1;
        assert!(c.bandit_daimon(0).is_err());
    }
}
