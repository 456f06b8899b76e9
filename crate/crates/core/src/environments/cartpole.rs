use crate::error::{Error, Result};
use crate::simplex::SeededRng;

use super::{Environment, Step};

/// Push left, push right.
pub const CARTPOLE_ACTIONS: usize = 2;

const GRAVITY: f64 = 9.8;
const CART_MASS: f64 = 1.0;
const POLE_MASS: f64 = 0.1;
const TOTAL_MASS: f64 = CART_MASS + POLE_MASS;
const HALF_LENGTH: f64 = 0.5;
const POLE_MASS_LENGTH: f64 = POLE_MASS * HALF_LENGTH;
const FORCE: f64 = 10.0;
const DT: f64 = 0.02;
const THETA_LIMIT: f64 = 12.0 * std::f64::consts::PI / 180.0;
const X_LIMIT: f64 = 2.4;
const RESET_NOISE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartPoleState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

impl CartPoleState {
    /// Uniform in `[−0.05, 0.05]⁴`.
    pub fn near_upright(rng: &mut SeededRng) -> Self {
        let mut draw = || rng.uniform_range(-RESET_NOISE, RESET_NOISE);
        Self {
            x: draw(),
            x_dot: draw(),
            theta: draw(),
            theta_dot: draw(),
        }
    }

    pub fn observation(&self) -> Vec<f64> {
        vec![self.x, self.x_dot, self.theta, self.theta_dot]
    }

    fn failed(&self) -> bool {
        self.theta.abs() > THETA_LIMIT || self.x.abs() > X_LIMIT
    }
}

pub fn cartpole_step(state: &CartPoleState, action: usize, rng: &mut SeededRng) -> Result<Step<CartPoleState>> {
    let force = match action {
        0 => -FORCE,
        1 => FORCE,
        _ => {
            return Err(Error::IndexOutOfRange {
                index: action,
                len: CARTPOLE_ACTIONS,
            })
        }
    };
    let s = *state;
    if !(s.x.is_finite() && s.x_dot.is_finite() && s.theta.is_finite() && s.theta_dot.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite cart-pole state {s:?}")));
    }
    let (sin, cos) = s.theta.sin_cos();
    let temp = (force + POLE_MASS_LENGTH * s.theta_dot * s.theta_dot * sin) / TOTAL_MASS;
    let theta_acc =
        (GRAVITY * sin - cos * temp) / (HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / TOTAL_MASS));
    let x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos / TOTAL_MASS;
    let next = CartPoleState {
        x: s.x + DT * s.x_dot,
        x_dot: s.x_dot + DT * x_acc,
        theta: s.theta + DT * s.theta_dot,
        theta_dot: s.theta_dot + DT * theta_acc,
    };
    let (next, reward, continues) = if next.failed() {
        (CartPoleState::near_upright(rng), -1.0, false)
    } else {
        (next, 0.0, true)
    };
    Ok(Step {
        observation: next.observation(),
        state: next,
        reward,
        continues,
    })
}

#[derive(Debug, Clone)]
pub struct CartPole {
    state: CartPoleState,
}

impl CartPole {
    pub fn new(rng: &mut SeededRng) -> Self {
        Self {
            state: CartPoleState::near_upright(rng),
        }
    }

    pub fn state(&self) -> CartPoleState {
        self.state
    }
}

impl Environment for CartPole {
    fn num_actions(&self) -> usize {
        CARTPOLE_ACTIONS
    }

    fn observation_width(&self) -> usize {
        4
    }

    fn observation(&self) -> Vec<f64> {
        self.state.observation()
    }

    fn step(&mut self, action: usize, rng: &mut SeededRng) -> Result<(f64, bool)> {
        let s = cartpole_step(&self.state, action, rng)?;
        self.state = s.state;
        Ok((s.reward, s.continues))
    }
}
