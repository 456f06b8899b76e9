//! Implicit-exploration estimates of utilities, action values and advantages.
//!
//! The capped (CIX) denominator is `β = min{1, π(X) + η}`; the original IX
//! denominator `π(X) + η` is kept as [`Denominator::Uncapped`] for comparisons.
//! With `η = 0` both reduce to plain importance sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{MixedPolicy, RewardBounds, PROB_SUM_TOLERANCE};

/// Which implicit-exploration denominator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Denominator {
    /// `min{1, π(X) + η}`.
    #[default]
    Capped,
    /// `π(X) + η`, the uncapped IX form.
    Uncapped,
}

impl Denominator {
    pub fn evaluate(self, prob_of_sampled: f64, eta: f64) -> Result<f64> {
        check_eta(eta)?;
        if !(prob_of_sampled > 0.0 && prob_of_sampled <= 1.0 + PROB_SUM_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "sampled probability {prob_of_sampled} outside (0, 1]"
            )));
        }
        Ok(match self {
            Denominator::Capped => (prob_of_sampled + eta).min(1.0),
            Denominator::Uncapped => prob_of_sampled + eta,
        })
    }
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidEta(eta))
    }
}

/// `β = min{1, π(X) + η}`.
pub fn cix_cap(prob_of_sampled: f64, eta: f64) -> Result<f64> {
    Denominator::Capped.evaluate(prob_of_sampled, eta)
}

/// Estimated payoff vector built from one sampled arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CixEstimate {
    pub values: Vec<f64>,
    pub sampled_index: usize,
    pub eta: f64,
    pub beta: f64,
}

/// CIX advantage estimate `(G/β)(1{a = A} − π(A))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimateVector {
    pub values: Vec<f64>,
    pub sampled_index: usize,
    pub eta: f64,
    pub beta: f64,
}

fn sampled_prob(policy: &MixedPolicy, index: usize) -> Result<f64> {
    let p = policy.prob(index)?;
    if p <= 0.0 {
        return Err(Error::ZeroProbability { index });
    }
    Ok(p)
}

fn denominator_for(
    kind: Denominator,
    policy: &MixedPolicy,
    sampled_index: usize,
    eta: f64,
) -> Result<f64> {
    let p = sampled_prob(policy, sampled_index)?;
    kind.evaluate(p, eta)
}

/// Utility estimate with an explicit denominator choice.
pub fn utility_estimate(
    kind: Denominator,
    policy: &MixedPolicy,
    sampled_index: usize,
    observed_payoff: f64,
    eta: f64,
    bounds: &RewardBounds,
) -> Result<CixEstimate> {
    bounds.check(observed_payoff)?;
    let beta = denominator_for(kind, policy, sampled_index, eta)?;
    let mut values = vec![0.0; policy.len()];
    if observed_payoff != 0.0 {
        values[sampled_index] = observed_payoff / beta;
    }
    Ok(CixEstimate {
        values,
        sampled_index,
        eta,
        beta,
    })
}

/// CIX estimate of the utility of every arm from the one arm that was played.
pub fn cix_utility_estimate(
    policy: &MixedPolicy,
    sampled_index: usize,
    observed_payoff: f64,
    eta: f64,
    bounds: &RewardBounds,
) -> Result<CixEstimate> {
    utility_estimate(
        Denominator::Capped,
        policy,
        sampled_index,
        observed_payoff,
        eta,
        bounds,
    )
}

/// Uncapped IX utility estimate; for comparison runs only.
pub fn ix_utility_estimate(
    policy: &MixedPolicy,
    sampled_index: usize,
    observed_payoff: f64,
    eta: f64,
    bounds: &RewardBounds,
) -> Result<CixEstimate> {
    utility_estimate(
        Denominator::Uncapped,
        policy,
        sampled_index,
        observed_payoff,
        eta,
        bounds,
    )
}

/// CIX action-value estimate at an agent state given the realized return `G`
/// of the sampled action.
pub fn cix_action_value_estimate(
    policy_at_state: &MixedPolicy,
    sampled_action: usize,
    sampled_return: f64,
    eta: f64,
    bounds: &RewardBounds,
) -> Result<CixEstimate> {
    cix_utility_estimate(policy_at_state, sampled_action, sampled_return, eta, bounds)
}

pub fn cix_advantage_estimate(
    policy_at_state: &MixedPolicy,
    sampled_action: usize,
    sampled_return: f64,
    eta: f64,
    bounds: &RewardBounds,
) -> Result<AdvantageEstimateVector> {
    bounds.check(sampled_return)?;
    let beta = denominator_for(Denominator::Capped, policy_at_state, sampled_action, eta)?;
    let k = policy_at_state.len();
    let mut values = vec![0.0; k];
    if sampled_return != 0.0 {
        let scale = sampled_return / beta;
        let p_sampled = policy_at_state.probs()[sampled_action];
        for (a, v) in values.iter_mut().enumerate() {
            let indicator = if a == sampled_action { 1.0 } else { 0.0 };
            *v = scale * (indicator - p_sampled);
        }
    }
    Ok(AdvantageEstimateVector {
        values,
        sampled_index: sampled_action,
        eta,
        beta,
    })
}

/// Exact first and second moments of an estimator, per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorMoments {
    pub mean: Vec<f64>,
    pub second_moment: Vec<f64>,
}

/// Exact moments of the utility estimate over the `K` possible sampled arms,
/// for deterministic per-arm payoffs.
pub fn enumerate_estimator_moments(
    policy: &MixedPolicy,
    true_payoffs: &[f64],
    eta: f64,
) -> Result<EstimatorMoments> {
    enumerate_moments_with(Denominator::Capped, policy, true_payoffs, eta)
}

pub fn enumerate_moments_with(
    kind: Denominator,
    policy: &MixedPolicy,
    true_payoffs: &[f64],
    eta: f64,
) -> Result<EstimatorMoments> {
    if true_payoffs.len() != policy.len() {
        return Err(Error::LengthMismatch {
            expected: policy.len(),
            actual: true_payoffs.len(),
        });
    }
    let k = policy.len();
    let mut mean = vec![0.0; k];
    let mut second_moment = vec![0.0; k];
    // Arm x is nonzero only in the outcome X = x.
    for x in 0..k {
        let p = policy.probs()[x];
        let beta = denominator_for(kind, policy, x, eta)?;
        let value = if true_payoffs[x] == 0.0 { 0.0 } else { true_payoffs[x] / beta };
        mean[x] = p * value;
        second_moment[x] = p * value * value;
    }
    Ok(EstimatorMoments {
        mean,
        second_moment,
    })
}
