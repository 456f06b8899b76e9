//! Monte-Carlo SPG, NeuRD and NeuRD-CIX update directions.
//!
//! Each rule is a coefficient per action; the parameter step is
//! `α Σ_a c_a ∇θ f(s, a; θ)`. With `A` the sampled action and `G` its return:
//!
//! | rule       | `c_a`                              |
//! |------------|------------------------------------|
//! | SPG        | `G (1{a=A} − π(a))`                |
//! | NeuRD      | `G/π(A) · (1{a=A} − π(A))`         |
//! | NeuRD-CIX  | `G/β(A, η) · (1{a=A} − π(A))`      |
//!
//! `G` may be any finite signal; actor-critic runs pass an advantage here.

use serde::{Deserialize, Serialize};

use crate::approximators::PreferenceModel;
use crate::error::{Error, Result};
use crate::estimators::{check_eta, Denominator};
use crate::simplex::MixedPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum UpdateRule {
    Spg,
    Neurd,
    NeurdCix { eta: f64 },
}

impl UpdateRule {
    pub fn coefficients(&self, policy: &MixedPolicy, sampled_action: usize, ret: f64) -> Result<Vec<f64>> {
        match *self {
            UpdateRule::Spg => spg_coefficients(policy, sampled_action, ret),
            UpdateRule::Neurd => neurd_coefficients(policy, sampled_action, ret),
            UpdateRule::NeurdCix { eta } => neurd_cix_coefficients(policy, sampled_action, ret, eta),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            UpdateRule::Spg => "spg",
            UpdateRule::Neurd => "neurd",
            UpdateRule::NeurdCix { .. } => "neurd-cix",
        }
    }
}

fn check_inputs(policy: &MixedPolicy, sampled_action: usize, ret: f64) -> Result<f64> {
    if !ret.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite return {ret}")));
    }
    policy.prob(sampled_action)
}

pub fn spg_coefficients(policy: &MixedPolicy, sampled_action: usize, ret: f64) -> Result<Vec<f64>> {
    check_inputs(policy, sampled_action, ret)?;
    Ok(policy
        .probs()
        .iter()
        .enumerate()
        .map(|(a, &p)| {
            let indicator = if a == sampled_action { 1.0 } else { 0.0 };
            ret * (indicator - p)
        })
        .collect())
}

/// Shared NeuRD-family form `scale · (1{a=A} − π(A))`.
fn replicator_coefficients(k: usize, sampled_action: usize, p_sampled: f64, scale: f64) -> Vec<f64> {
    (0..k)
        .map(|a| {
            let indicator = if a == sampled_action { 1.0 } else { 0.0 };
            scale * (indicator - p_sampled)
        })
        .collect()
}

pub fn neurd_coefficients(policy: &MixedPolicy, sampled_action: usize, ret: f64) -> Result<Vec<f64>> {
    let p = check_inputs(policy, sampled_action, ret)?;
    if p <= 0.0 {
        return Err(Error::ZeroProbability {
            index: sampled_action,
        });
    }
    Ok(replicator_coefficients(policy.len(), sampled_action, p, ret / p))
}

pub fn neurd_cix_coefficients(
    policy: &MixedPolicy,
    sampled_action: usize,
    ret: f64,
    eta: f64,
) -> Result<Vec<f64>> {
    let p = check_inputs(policy, sampled_action, ret)?;
    check_eta(eta)?;
    if p <= 0.0 && eta == 0.0 {
        return Err(Error::ZeroProbability {
            index: sampled_action,
        });
    }
    let beta = if p <= 0.0 {
        eta.min(1.0)
    } else {
        Denominator::Capped.evaluate(p, eta)?
    };
    Ok(replicator_coefficients(policy.len(), sampled_action, p, ret / beta))
}

/// `E_{A∼π}` of the rule's coefficients for deterministic action values `q`.
pub fn expected_coefficients(rule: &UpdateRule, policy: &MixedPolicy, action_values: &[f64]) -> Result<Vec<f64>> {
    Ok(coefficient_moments(rule, policy, action_values)?.mean)
}

/// Exact per-action mean and second moment of the coefficients by enumeration
/// over the sampled action.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMoments {
    pub mean: Vec<f64>,
    pub second_moment: Vec<f64>,
}

impl CoefficientMoments {
    pub fn variance(&self) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.second_moment)
            .map(|(m, s)| s - m * m)
            .collect()
    }
}

pub fn coefficient_moments(
    rule: &UpdateRule,
    policy: &MixedPolicy,
    action_values: &[f64],
) -> Result<CoefficientMoments> {
    let k = policy.len();
    if action_values.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: action_values.len(),
        });
    }
    let mut mean = vec![0.0; k];
    let mut second_moment = vec![0.0; k];
    for (sampled, (&p, &q)) in policy.probs().iter().zip(action_values).enumerate() {
        if p == 0.0 {
            continue;
        }
        let c = rule.coefficients(policy, sampled, q)?;
        for a in 0..k {
            mean[a] += p * c[a];
            second_moment[a] += p * c[a] * c[a];
        }
    }
    Ok(CoefficientMoments { mean, second_moment })
}

/// Coefficients pushed through a model: `Δθ = α Σ_a c_a ∇θ f(s, a; θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateDirection {
    pub coefficients: Vec<f64>,
    pub step_size: f64,
    pub parameter_delta: Vec<f64>,
}

impl UpdateDirection {
    pub fn through<M: PreferenceModel + ?Sized>(
        model: &M,
        features: &[f64],
        coefficients: Vec<f64>,
        step_size: f64,
    ) -> Result<Self> {
        let mut parameter_delta = model.accumulate_gradient(features, &coefficients)?;
        for d in &mut parameter_delta {
            *d *= step_size;
        }
        Ok(Self {
            coefficients,
            step_size,
            parameter_delta,
        })
    }

    pub fn apply<M: PreferenceModel + ?Sized>(&self, model: &mut M) -> Result<()> {
        let params = model.params_mut();
        if params.len() != self.parameter_delta.len() {
            return Err(Error::LengthMismatch {
                expected: params.len(),
                actual: self.parameter_delta.len(),
            });
        }
        for (p, d) in params.iter_mut().zip(&self.parameter_delta) {
            *p += d;
        }
        Ok(())
    }
}
