use crate::error::{Error, Result};

/// Adam with bias-corrected moments. No gradient clipping.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    /// `β1 = 0` (updates are online), `β2 = 0.999`, `ε = 1e-8`.
    pub fn new(num_params: usize, lr: f64) -> Self {
        Self::with_hyperparameters(num_params, lr, 0.0, 0.999, 1e-8)
    }

    pub fn with_hyperparameters(num_params: usize, lr: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            epsilon,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }

    /// Advance the moments with `gradient` and return the parameter delta.
    /// With `maximize` the step ascends along `gradient`.
    pub fn step(&mut self, gradient: &[f64], maximize: bool) -> Result<Vec<f64>> {
        let mut delta = vec![0.0; gradient.len()];
        self.step_into(gradient, maximize, &mut delta)?;
        Ok(delta)
    }

    /// Apply one step directly to `params`.
    pub fn apply(&mut self, params: &mut [f64], gradient: &[f64], maximize: bool) -> Result<()> {
        if params.len() != gradient.len() {
            return Err(Error::LengthMismatch {
                expected: params.len(),
                actual: gradient.len(),
            });
        }
        self.advance(gradient, maximize, |i, d| params[i] += d)
    }

    fn step_into(&mut self, gradient: &[f64], maximize: bool, delta: &mut [f64]) -> Result<()> {
        self.advance(gradient, maximize, |i, d| delta[i] = d)
    }

    fn advance(&mut self, gradient: &[f64], maximize: bool, mut emit: impl FnMut(usize, f64)) -> Result<()> {
        if gradient.len() != self.m.len() {
            return Err(Error::LengthMismatch {
                expected: self.m.len(),
                actual: gradient.len(),
            });
        }
        if let Some(index) = gradient.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient { index });
        }
        self.t += 1;
        let t = self.t as i32;
        let m_correction = 1.0 - self.beta1.powi(t);
        let v_correction = 1.0 - self.beta2.powi(t);
        let sign = if maximize { 1.0 } else { -1.0 };
        let (b1, b2) = (self.beta1, self.beta2);
        for (i, &g) in gradient.iter().enumerate() {
            let m = &mut self.m[i];
            let v = &mut self.v[i];
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            if *m == 0.0 {
                emit(i, 0.0);
                continue;
            }
            let m_hat = *m / m_correction;
            let v_hat = *v / v_correction;
            emit(i, sign * self.lr * m_hat / (v_hat.sqrt() + self.epsilon));
        }
        Ok(())
    }
}
