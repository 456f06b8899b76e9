//! Truncated TD(λ) critic targets.
//!
//! The target for the state `s_0` at the front of a window of up to 32
//! transitions is the forward-view λ-return
//!
//! ```text
//! G⁽ⁿ⁾   = Σ_{i<n} r_i + γ V(s_n)             (rewards undiscounted, γ = 0.9)
//! target = (1 − λ) Σ_{n=1}^{N−1} λ^{n−1} G⁽ⁿ⁾ + λ^{N−1} G⁽ᴺ⁾
//! ```
//!
//! A transition whose continuation flag is false ends the segment: later
//! n-step returns stop accumulating rewards and drop the bootstrap term.

use std::collections::VecDeque;

use crate::approximators::{AdamState, ValueModel};
use crate::error::{Error, Result};

pub const DEFAULT_HORIZON: usize = 32;
pub const DEFAULT_LAMBDA: f64 = 0.9;
pub const DEFAULT_BOOTSTRAP_DISCOUNT: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdParameters {
    pub horizon: usize,
    pub lambda: f64,
    pub bootstrap_discount: f64,
}

impl Default for TdParameters {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_HORIZON,
            lambda: DEFAULT_LAMBDA,
            bootstrap_discount: DEFAULT_BOOTSTRAP_DISCOUNT,
        }
    }
}

/// λ-return of the first state in a segment.
///
/// `rewards[i]` and `continues[i]` describe the transition out of `s_i`;
/// `next_values[i]` is `V(s_{i+1})`. The segment must either hold
/// `params.horizon` transitions or end with a break.
pub fn lambda_return(params: &TdParameters, rewards: &[f64], continues: &[bool], next_values: &[f64]) -> Result<f64> {
    let n = rewards.len();
    if continues.len() != n || next_values.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: continues.len().min(next_values.len()),
        });
    }
    if n == 0 || n > params.horizon {
        return Err(Error::WindowNotReady(format!("{n} transitions for horizon {}", params.horizon)));
    }
    let end = continues.iter().position(|c| !c).map(|j| j + 1);
    if end.is_none() && n < params.horizon {
        return Err(Error::WindowNotReady(format!(
            "{n} of {} transitions buffered and no break",
            params.horizon
        )));
    }
    let lambda = params.lambda;
    let mut partial = 0.0;
    let mut target = 0.0;
    for step in 1..=params.horizon {
        let g = match end {
            Some(e) if step >= e => {
                if step == e {
                    partial += rewards[step - 1];
                }
                partial
            }
            _ => {
                partial += rewards[step - 1];
                partial + params.bootstrap_discount * next_values[step - 1]
            }
        };
        let weight = if step < params.horizon {
            (1.0 - lambda) * lambda.powi(step as i32 - 1)
        } else {
            lambda.powi(step as i32 - 1)
        };
        target += weight * g;
    }
    Ok(target)
}

/// One buffered transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<T> {
    pub payload: T,
    /// `V(s)` when the state was visited.
    pub value: f64,
    pub reward: f64,
    pub continues: bool,
}

/// A λ-return target for a transition leaving the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Target<T> {
    pub payload: T,
    pub value: f64,
    pub target: f64,
}

impl<T> Target<T> {
    /// `target − V(s_0)` using the value stored at visit time.
    pub fn advantage(&self) -> f64 {
        advantage_signal(self.target, self.value)
    }
}

/// `λ-return − V(s_0)`.
pub fn advantage_signal(lambda_return: f64, value: f64) -> f64 {
    lambda_return - value
}

/// Delay line of up to `horizon` transitions.
#[derive(Debug, Clone)]
pub struct TraceWindow<T> {
    params: TdParameters,
    pending: VecDeque<Transition<T>>,
}

impl<T> TraceWindow<T> {
    pub fn new(params: TdParameters) -> Result<Self> {
        if params.horizon == 0 || !(0.0..=1.0).contains(&params.lambda) {
            return Err(Error::InvalidArgument("horizon must be positive and λ in [0, 1]".into()));
        }
        Ok(Self {
            params,
            pending: VecDeque::with_capacity(params.horizon + 1),
        })
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn params(&self) -> &TdParameters {
        &self.params
    }

    fn target_for_front(&self, bootstrap_value: f64) -> Result<f64> {
        let n = self.pending.len().min(self.params.horizon);
        let rewards: Vec<f64> = self.pending.iter().take(n).map(|t| t.reward).collect();
        let continues: Vec<bool> = self.pending.iter().take(n).map(|t| t.continues).collect();
        let next_values: Vec<f64> = self
            .pending
            .iter()
            .skip(1)
            .take(n - 1)
            .map(|t| t.value)
            .chain(std::iter::once(bootstrap_value))
            .collect();
        lambda_return(&self.params, &rewards, &continues, &next_values)
    }

    /// Buffer a transition. When it ends a segment every pending transition is
    /// complete and all of their targets are returned, oldest first.
    pub fn push(&mut self, transition: Transition<T>) -> Result<Vec<Target<T>>> {
        if self.pending.len() >= self.params.horizon {
            return Err(Error::WindowNotReady("window full; pop the front target first".into()));
        }
        let ends = !transition.continues;
        self.pending.push_back(transition);
        let mut out = Vec::new();
        if ends {
            while !self.pending.is_empty() {
                // The bootstrap value is never read across a break.
                let target = self.target_for_front(0.0)?;
                let front = self.pending.pop_front().expect("non-empty");
                out.push(Target {
                    payload: front.payload,
                    value: front.value,
                    target,
                });
            }
        }
        Ok(out)
    }

    /// When `horizon` transitions are pending, emit the front target using
    /// `bootstrap_value = V(s_horizon)` (the state after the last transition).
    pub fn pop_full(&mut self, bootstrap_value: f64) -> Result<Option<Target<T>>> {
        if self.pending.len() < self.params.horizon {
            return Ok(None);
        }
        let target = self.target_for_front(bootstrap_value)?;
        let front = self.pending.pop_front().expect("non-empty");
        Ok(Some(Target {
            payload: front.payload,
            value: front.value,
            target,
        }))
    }
}

/// One Adam descent step on `½(target − V(s))²`, target held fixed.
/// Returns the parameter delta that was applied.
pub fn critic_update<M: ValueModel + ?Sized>(
    model: &mut M,
    features: &[f64],
    target: f64,
    adam: &mut AdamState,
) -> Result<Vec<f64>> {
    if !target.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite critic target {target}")));
    }
    let residual = target - model.value(features)?;
    // −∇½(target − V)² = (target − V) ∇V
    let ascent = model.value_gradient(features, residual)?;
    let delta = adam.step(&ascent, true)?;
    for (p, d) in model.params_mut().iter_mut().zip(&delta) {
        *p += d;
    }
    Ok(delta)
}
