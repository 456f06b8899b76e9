//! Exponential weights over estimated utilities.
//!
//! This fills the full-monitoring slot of the bandit reduction. Anything that
//! implements [`FullMonitoringLearner`] can be dropped in instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::CixEstimate;
use crate::simplex::{softmax, MixedPolicy};

/// Learning-rate schedule as a function of the 1-based round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LearningRate {
    Constant(f64),
    /// `sqrt(ln K / (K t))`.
    Anytime,
}

impl LearningRate {
    pub fn at(&self, round: u64, num_arms: usize) -> f64 {
        match *self {
            LearningRate::Constant(rate) => rate,
            LearningRate::Anytime => {
                let k = num_arms as f64;
                (k.ln() / (k * round.max(1) as f64)).sqrt()
            }
        }
    }
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate::Anytime
    }
}

/// A learner that sees the whole (estimated) utility vector every round.
pub trait FullMonitoringLearner {
    fn num_arms(&self) -> usize;
    /// Mixed policy for the upcoming round. Must be strictly positive.
    fn policy(&self) -> MixedPolicy;
    fn ingest(&mut self, utilities: &[f64]) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedgeState {
    cumulative_estimated_utilities: Vec<f64>,
    round: u64,
    learning_rate: LearningRate,
}

impl HedgeState {
    pub fn new(num_arms: usize, learning_rate: LearningRate) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::InvalidArgument("hedge needs at least one arm".into()));
        }
        Ok(Self {
            cumulative_estimated_utilities: vec![0.0; num_arms],
            round: 0,
            learning_rate,
        })
    }

    pub fn from_cumulative(cumulative: Vec<f64>, round: u64, learning_rate: LearningRate) -> Result<Self> {
        if cumulative.is_empty() {
            return Err(Error::InvalidArgument("hedge needs at least one arm".into()));
        }
        Ok(Self {
            cumulative_estimated_utilities: cumulative,
            round,
            learning_rate,
        })
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative_estimated_utilities
    }

    /// Number of estimates ingested so far.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn learning_rate(&self) -> LearningRate {
        self.learning_rate
    }

    /// Rate used for the policy of the next round.
    pub fn current_rate(&self) -> f64 {
        self.learning_rate
            .at(self.round + 1, self.cumulative_estimated_utilities.len())
    }

    /// Functional form of [`FullMonitoringLearner::ingest`].
    pub fn ingested(&self, estimate: &CixEstimate) -> Result<Self> {
        let mut next = self.clone();
        next.ingest(&estimate.values)?;
        Ok(next)
    }
}

impl FullMonitoringLearner for HedgeState {
    fn num_arms(&self) -> usize {
        self.cumulative_estimated_utilities.len()
    }

    fn policy(&self) -> MixedPolicy {
        let rate = self.current_rate();
        let scaled: Vec<f64> = self
            .cumulative_estimated_utilities
            .iter()
            .map(|u| rate * u)
            .collect();
        softmax(&scaled).expect("cumulative utilities are finite")
    }

    fn ingest(&mut self, utilities: &[f64]) -> Result<()> {
        if utilities.len() != self.cumulative_estimated_utilities.len() {
            return Err(Error::LengthMismatch {
                expected: self.cumulative_estimated_utilities.len(),
                actual: utilities.len(),
            });
        }
        if utilities.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidArgument("non-finite utility estimate".into()));
        }
        for (c, u) in self.cumulative_estimated_utilities.iter_mut().zip(utilities) {
            *c += u;
        }
        self.round += 1;
        Ok(())
    }
}

pub fn hedge_policy(state: &HedgeState) -> MixedPolicy {
    state.policy()
}

pub fn hedge_ingest(state: &HedgeState, estimate: &CixEstimate) -> Result<HedgeState> {
    state.ingested(estimate)
}

/// `max_x Σ_t v̂ᵗ(x) − Σ_t ⟨πᵗ, v̂ᵗ⟩` over the given histories.
pub fn estimated_regret(estimates: &[Vec<f64>], policies: &[MixedPolicy]) -> Result<f64> {
    if estimates.len() != policies.len() {
        return Err(Error::LengthMismatch {
            expected: estimates.len(),
            actual: policies.len(),
        });
    }
    let mut tracker: Option<EstimatedRegretTracker> = None;
    for (est, pol) in estimates.iter().zip(policies) {
        tracker
            .get_or_insert_with(|| EstimatedRegretTracker::new(est.len()))
            .record(pol, est)?;
    }
    Ok(tracker.map_or(0.0, |t| t.regret()))
}

/// Running version of [`estimated_regret`] that does not keep the history.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedRegretTracker {
    per_arm: Vec<f64>,
    learner: f64,
}

impl EstimatedRegretTracker {
    pub fn new(num_arms: usize) -> Self {
        Self {
            per_arm: vec![0.0; num_arms],
            learner: 0.0,
        }
    }

    pub fn record(&mut self, policy: &MixedPolicy, estimate: &[f64]) -> Result<()> {
        if estimate.len() != self.per_arm.len() {
            return Err(Error::LengthMismatch {
                expected: self.per_arm.len(),
                actual: estimate.len(),
            });
        }
        self.learner += policy.expectation(estimate)?;
        for (c, v) in self.per_arm.iter_mut().zip(estimate) {
            *c += v;
        }
        Ok(())
    }

    pub fn regret_against(&self, arm: usize) -> f64 {
        self.per_arm[arm] - self.learner
    }

    pub fn regret(&self) -> f64 {
        self.per_arm
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            - self.learner
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn est(values: Vec<f64>) -> CixEstimate {
        CixEstimate {
            values,
            sampled_index: 0,
            eta: 0.0,
            beta: 1.0,
        }
    }

    #[test]
    fn policy_examples() {
        for rate in [0.1, 1.0, 7.0] {
            let s = HedgeState::new(2, LearningRate::Constant(rate)).unwrap();
            assert_eq!(hedge_policy(&s).probs(), &[0.5, 0.5]);
        }
        let s = HedgeState::from_cumulative(vec![1.0, 0.0], 0, LearningRate::Constant(1.0)).unwrap();
        let p = hedge_policy(&s);
        let e = std::f64::consts::E;
        assert!((p.probs()[0] - e / (1.0 + e)).abs() < 1e-15);
        assert!((p.probs()[0] - 0.731059).abs() < 1e-6);
        assert!((p.probs()[1] - 0.268941).abs() < 1e-6);
    }

    #[test]
    fn ingest_examples() {
        let s = HedgeState::new(2, LearningRate::Anytime).unwrap();
        let z = hedge_ingest(&s, &est(vec![0.0, 0.0])).unwrap();
        assert_eq!(z.cumulative(), s.cumulative());
        assert_eq!(z.round(), 1);

        let a = hedge_ingest(&s, &est(vec![-2.0, 0.0])).unwrap();
        assert_eq!(a.cumulative(), &[-2.0, 0.0]);

        let ab = hedge_ingest(&hedge_ingest(&s, &est(vec![-1.0, 0.0])).unwrap(), &est(vec![0.0, -1.0])).unwrap();
        let ba = hedge_ingest(&hedge_ingest(&s, &est(vec![0.0, -1.0])).unwrap(), &est(vec![-1.0, 0.0])).unwrap();
        assert_eq!(ab, ba);

        assert!(matches!(
            hedge_ingest(&s, &est(vec![0.0])),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn estimated_regret_examples() {
        assert_eq!(estimated_regret(&[], &[]).unwrap(), 0.0);
        let half = MixedPolicy::uniform(2).unwrap();
        let zeros = vec![vec![0.0, 0.0]; 5];
        assert_eq!(estimated_regret(&zeros, &vec![half.clone(); 5]).unwrap(), 0.0);
        let r = estimated_regret(&[vec![-2.0, 0.0]], &[half.clone()]).unwrap();
        assert!((r - 1.0).abs() < 1e-15);

        // Per-round best arm played as a point mass.
        let est = vec![vec![-1.0, 0.0], vec![0.0, -3.0], vec![-0.5, -0.2]];
        let pol = vec![
            MixedPolicy::pure(2, 1).unwrap(),
            MixedPolicy::pure(2, 0).unwrap(),
            MixedPolicy::pure(2, 1).unwrap(),
        ];
        assert!(estimated_regret(&est, &pol).unwrap() <= 0.0);
        assert!(estimated_regret(&est, &pol[..2]).is_err());
    }

    #[test]
    fn anytime_rate() {
        let r = LearningRate::Anytime.at(4, 10);
        assert!((r - (10f64.ln() / 40.0).sqrt()).abs() < 1e-15);
        // Round 0 is treated as round 1.
        assert_eq!(LearningRate::Anytime.at(0, 3), LearningRate::Anytime.at(1, 3));
    }

    proptest! {
        #[test]
        fn policy_translation_invariant(
            cum in prop::collection::vec(-50.0f64..0.0, 1..8),
            shift in -100.0f64..100.0,
            round in 0u64..1000,
        ) {
            let a = HedgeState::from_cumulative(cum.clone(), round, LearningRate::Anytime).unwrap();
            let b = HedgeState::from_cumulative(cum.iter().map(|c| c + shift).collect(), round, LearningRate::Anytime).unwrap();
            for (x, y) in a.policy().probs().iter().zip(b.policy().probs()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            prop_assert!(a.policy().is_strictly_positive());
        }
    }
}
