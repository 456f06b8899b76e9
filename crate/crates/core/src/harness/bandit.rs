use serde::Serialize;

use crate::environments::{bandit_payoff, Daimon};
use crate::error::{Error, Result};
use crate::hedge::{EstimatedRegretTracker, FullMonitoringLearner, HedgeState, LearningRate};
use crate::reduction::{BoundInputs, CixBandit, EtaSchedule, RegretTracker, SlackAccumulator};
use crate::simplex::{RewardBounds, SeededRng};

use super::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanditRecord {
    pub seed: u64,
    pub round: u64,
    pub arm: usize,
    pub payoff: f64,
    pub regret_best_arm: f64,
    pub h_running: f64,
}

/// Regret snapshot at one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretPoint {
    pub round: u64,
    /// True regret against the best fixed arm.
    pub true_regret: f64,
    /// Learner's regret on the estimated utilities (best arm).
    pub estimated_regret: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditRun {
    pub seed: u64,
    pub records: Vec<BanditRecord>,
    /// Snapshots at the requested checkpoint rounds, in order.
    pub checkpoints: Vec<RegretPoint>,
    /// `η¹ … ηᵀ` as used.
    pub etas: Vec<f64>,
    pub final_per_arm_regret: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditSpec {
    pub daimon: Daimon,
    pub horizon: u64,
    pub schedule: EtaSchedule,
    pub delta: f64,
    pub g_max: f64,
    pub log_every: u64,
    pub checkpoints: Vec<u64>,
}

impl BanditSpec {
    pub fn from_config(config: &ExperimentConfig, seed: u64) -> Result<Self> {
        Ok(Self {
            daimon: config.bandit_daimon(seed)?,
            horizon: config.horizon,
            schedule: config.eta_schedule()?,
            delta: config.delta,
            g_max: config.g_max,
            log_every: config.log_every,
            checkpoints: default_checkpoints(config),
        })
    }

    pub fn bound_inputs(&self) -> BoundInputs {
        BoundInputs {
            horizon: self.horizon,
            num_arms: self.daimon.num_arms(),
            g_max: self.g_max,
            delta: self.delta,
            schedule: self.schedule,
        }
    }
}

/// Explicit checkpoints, else `T/100, T/10, T` (deduplicated, non-zero).
pub fn default_checkpoints(config: &ExperimentConfig) -> Vec<u64> {
    let mut c = if config.checkpoints.is_empty() {
        vec![config.horizon / 100, config.horizon / 10, config.horizon]
    } else {
        config.checkpoints.clone()
    };
    c.retain(|&t| t > 0 && t <= config.horizon);
    c.sort_unstable();
    c.dedup();
    c
}

/// Exp3-CIX: exponential weights with anytime rate, fed CIX estimates.
///
/// The learner sees only the sampled arm's payoff through the `observe`
/// closure; regret bookkeeping reads the full payoff row on the harness side.
pub fn run_bandit(spec: &BanditSpec, seed: u64) -> Result<BanditRun> {
    if spec.log_every == 0 {
        return Err(Error::Config("log_every must be positive".into()));
    }
    let inputs = spec.bound_inputs();
    inputs.validate()?;
    let k = spec.daimon.num_arms();
    let bounds = RewardBounds::new(spec.g_max)?;
    let learner = HedgeState::new(k, LearningRate::Anytime)?;
    let mut bandit = CixBandit::new(learner, spec.schedule, bounds);
    let mut rng = SeededRng::new(seed);

    let mut regret = RegretTracker::new(k);
    let mut estimated = EstimatedRegretTracker::new(k);
    let mut slack = SlackAccumulator::default();
    let mut etas = Vec::with_capacity(spec.horizon as usize);
    let mut records = Vec::new();
    let mut checkpoints = Vec::with_capacity(spec.checkpoints.len());
    let mut next_checkpoint = spec.checkpoints.iter().peekable();

    for t in 1..=spec.horizon {
        let index = t - 1;
        let daimon = &spec.daimon;
        let round = bandit.step(|arm| bandit_payoff(daimon, index, arm).unwrap_or(f64::NAN), &mut rng)?;
        regret.record(&spec.daimon.payoff_row(index), round.arm)?;
        estimated.record(&round.policy, &round.estimate.values)?;
        slack.push(round.estimate.eta);
        etas.push(round.estimate.eta);

        let h = slack.slack(&inputs)?;
        if t % spec.log_every == 0 || t == spec.horizon {
            records.push(BanditRecord {
                seed,
                round: t,
                arm: round.arm,
                payoff: round.payoff,
                regret_best_arm: regret.against_best(),
                h_running: h,
            });
        }
        if next_checkpoint.peek() == Some(&&t) {
            next_checkpoint.next();
            checkpoints.push(RegretPoint {
                round: t,
                true_regret: regret.against_best(),
                estimated_regret: estimated.regret(),
                slack: h,
            });
        }
    }
    debug_assert_eq!(bandit.learner().num_arms(), k);
    Ok(BanditRun {
        seed,
        records,
        checkpoints,
        etas,
        final_per_arm_regret: regret.per_arm().to_vec(),
    })
}
