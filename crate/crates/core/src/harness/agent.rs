use serde::Serialize;

use crate::approximators::{ActorCriticMlp, AdamState, MlpArchitecture};
use crate::critic::{TdParameters, Target, TraceWindow, Transition};
use crate::environments::EnvKind;
use crate::error::{Error, Result};
use crate::simplex::{softmax, SeededRng};
use crate::updates::UpdateRule;

use super::config::{Algorithm, ExperimentConfig};

/// One logged point of an actor-critic run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentRecord {
    pub seed: u64,
    pub step: u64,
    pub eta: f64,
    pub algo: &'static str,
    pub env: &'static str,
    pub cum_reward: f64,
}

/// Settings of a single actor-critic run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSpec {
    pub env: EnvKind,
    pub algo: Algorithm,
    pub eta: f64,
    pub lr: f64,
    pub steps: u64,
    pub log_every: u64,
}

impl AgentSpec {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            env: config.env,
            algo: config.algo,
            eta: config.actor_eta(),
            lr: config.learning_rate(),
            steps: config.steps,
            log_every: config.log_every,
        }
    }
}

type Visit = (Vec<f64>, usize);

struct Learner {
    model: ActorCriticMlp,
    adam: AdamState,
    rule: UpdateRule,
    gradient: Vec<f64>,
}

impl Learner {
    /// Joint actor/critic ascent step for a transition leaving the window.
    /// The policy and baseline are re-evaluated under the current parameters.
    fn update(&mut self, target: Target<Visit>, step: u64) -> Result<()> {
        let (features, action) = target.payload;
        let cache = self.model.forward(&features)?;
        let policy = softmax(&cache.preferences)?;
        let advantage = target.target - cache.value;
        let coefficients = self.rule.coefficients(&policy, action, advantage)?;
        self.model
            .backward_into(&cache, &coefficients, advantage, &mut self.gradient)?;
        if let Some(i) = self.gradient.iter().position(|g| !g.is_finite()) {
            return Err(Error::Diverged {
                step,
                reason: format!("non-finite gradient entry {i}"),
            });
        }
        self.adam.apply(self.model.params_mut(), &self.gradient, true)?;
        if let Some(i) = self.model.params().iter().position(|p| !p.is_finite()) {
            return Err(Error::Diverged {
                step,
                reason: format!("non-finite parameter {i}"),
            });
        }
        Ok(())
    }
}

/// Actor-critic run: softmax policy over MLP preferences, λ-return critic on
/// a 32-step delay, actor coefficients from the configured rule with the
/// advantage in place of the return.
///
/// Random streams per seed: 0 initialises the network, 1 drives the
/// environment, 2 samples actions.
pub fn run_agent(spec: &AgentSpec, seed: u64) -> Result<Vec<AgentRecord>> {
    if spec.log_every == 0 {
        return Err(Error::Config("log_every must be positive".into()));
    }
    let rule = spec.algo.update_rule(spec.eta)?;
    let mut init_rng = SeededRng::with_stream(seed, 0);
    let mut env_rng = SeededRng::with_stream(seed, 1);
    let mut policy_rng = SeededRng::with_stream(seed, 2);

    let mut env = spec.env.build(&mut env_rng);
    let arch = MlpArchitecture::standard(env.observation_width(), env.num_actions());
    let model = ActorCriticMlp::new(arch, &mut init_rng);
    let adam = AdamState::new(arch.num_params(), spec.lr);
    let mut learner = Learner {
        model,
        adam,
        rule,
        gradient: vec![0.0; arch.num_params()],
    };
    let mut window: TraceWindow<Visit> = TraceWindow::new(TdParameters::default())?;

    let mut records = Vec::with_capacity((spec.steps / spec.log_every) as usize);
    let mut cum_reward = 0.0;
    for t in 1..=spec.steps {
        let features = env.observation();
        let cache = learner.model.forward(&features)?;
        let value = cache.value;
        let policy = softmax(&cache.preferences)?;
        // A full window bootstraps from the state just observed.
        if let Some(target) = window.pop_full(value)? {
            learner.update(target, t)?;
        }
        let action = policy.sample(&mut policy_rng);
        let (reward, continues) = env.step(action, &mut env_rng)?;
        cum_reward += reward;
        let flushed = window.push(Transition {
            payload: (features, action),
            value,
            reward,
            continues,
        })?;
        for target in flushed {
            learner.update(target, t)?;
        }
        if t % spec.log_every == 0 || t == spec.steps {
            records.push(AgentRecord {
                seed,
                step: t,
                eta: spec.eta,
                algo: spec.algo.tag(),
                env: spec.env.tag(),
                cum_reward,
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(algo: Algorithm, eta: f64, lr: f64, steps: u64) -> AgentSpec {
        AgentSpec {
            env: EnvKind::Catch,
            algo,
            eta,
            lr,
            steps,
            log_every: 100,
        }
    }

    #[test]
    fn neurd_cix_at_zero_is_neurd() {
        let a = run_agent(&spec(Algorithm::NeurdCix, 0.0, 0.001797, 600), 3).unwrap();
        let b = run_agent(&spec(Algorithm::Neurd, 0.0, 0.001797, 600), 3).unwrap();
        let ra: Vec<f64> = a.iter().map(|r| r.cum_reward).collect();
        let rb: Vec<f64> = b.iter().map(|r| r.cum_reward).collect();
        assert_eq!(ra, rb);
    }

    #[test]
    fn zero_learning_rate_matches_random_policy() {
        let steps = 20_000;
        let records = run_agent(&spec(Algorithm::Spg, 0.0, 0.0, steps), 1).unwrap();
        let landings = (steps / 9) as f64;
        let expected = -0.8 * landings;
        let sigma = (landings * 0.16).sqrt();
        let got = records.last().unwrap().cum_reward;
        assert!((got - expected).abs() < 3.0 * sigma, "{got} vs {expected}");
    }

    #[test]
    fn logging_cadence() {
        let s = AgentSpec {
            log_every: 40,
            ..spec(Algorithm::Spg, 0.0, 0.001, 130)
        };
        let steps: Vec<u64> = run_agent(&s, 0).unwrap().iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![40, 80, 120, 130]);
    }

    #[test]
    fn cartpole_runs() {
        let s = AgentSpec {
            env: EnvKind::Cartpole,
            ..spec(Algorithm::NeurdCix, 0.5, 0.00005, 300)
        };
        let r = run_agent(&s, 0).unwrap();
        assert!(r.last().unwrap().cum_reward <= 0.0);
        assert_eq!(r.last().unwrap().env, "cartpole");
    }

    #[test]
    fn rejects_exp3() {
        assert!(run_agent(&spec(Algorithm::Exp3Cix, 0.0, 0.001, 10), 0).is_err());
    }
}
