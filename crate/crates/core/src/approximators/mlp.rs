//! Shared-embedding actor-critic network.
//!
//! ```text
//! a1 = relu(W1 x + b1)
//! h1 = a1 + S x                 (skip connection, learned projection)
//! e  = relu(W2 h1 + b2)         (embedding)
//! f  = Wa e + ba                (actor head, one preference per action)
//! V  = wc · e + bc              (critic head)
//! ```
//!
//! The relu derivative is taken as 0 at exactly 0.

use super::{check_width, PreferenceModel, ValueModel};
use crate::error::Result;
use crate::simplex::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpArchitecture {
    pub input_width: usize,
    pub hidden1: usize,
    pub hidden2: usize,
    pub num_actions: usize,
}

impl MlpArchitecture {
    /// Two hidden layers of 256 units.
    pub fn standard(input_width: usize, num_actions: usize) -> Self {
        Self {
            input_width,
            hidden1: 256,
            hidden2: 256,
            num_actions,
        }
    }

    fn layout(&self) -> Layout {
        let (d, h1, h2, k) = (self.input_width, self.hidden1, self.hidden2, self.num_actions);
        let mut offset = 0;
        let mut take = |n: usize| {
            let start = offset;
            offset += n;
            start
        };
        let w1 = take(h1 * d);
        let b1 = take(h1);
        let skip = take(h1 * d);
        let w2 = take(h2 * h1);
        let b2 = take(h2);
        let wa = take(k * h2);
        let ba = take(k);
        let wc = take(h2);
        let bc = take(1);
        Layout {
            w1,
            b1,
            skip,
            w2,
            b2,
            wa,
            ba,
            wc,
            bc,
            total: offset,
        }
    }

    pub fn num_params(&self) -> usize {
        self.layout().total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    w1: usize,
    b1: usize,
    skip: usize,
    w2: usize,
    b2: usize,
    wa: usize,
    ba: usize,
    wc: usize,
    bc: usize,
    total: usize,
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpForward {
    pub preferences: Vec<f64>,
    pub value: f64,
    input: Vec<f64>,
    z1: Vec<f64>,
    h1: Vec<f64>,
    z2: Vec<f64>,
    embedding: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActorCriticMlp {
    arch: MlpArchitecture,
    layout: Layout,
    theta: Vec<f64>,
}

impl ActorCriticMlp {
    pub fn zeros(arch: MlpArchitecture) -> Self {
        let layout = arch.layout();
        Self {
            arch,
            layout,
            theta: vec![0.0; layout.total],
        }
    }

    /// Fan-in-scaled uniform hidden weights (`U(±1/sqrt(fan_in))`); heads and
    /// all biases start at zero, so the initial policy is exactly uniform.
    pub fn new(arch: MlpArchitecture, rng: &mut SeededRng) -> Self {
        let mut model = Self::zeros(arch);
        let l = model.layout;
        let (d, h1, h2) = (arch.input_width, arch.hidden1, arch.hidden2);
        let input_bound = 1.0 / (d as f64).sqrt();
        let hidden_bound = 1.0 / (h1 as f64).sqrt();
        for w in &mut model.theta[l.w1..l.w1 + h1 * d] {
            *w = rng.uniform_range(-input_bound, input_bound);
        }
        for w in &mut model.theta[l.skip..l.skip + h1 * d] {
            *w = rng.uniform_range(-input_bound, input_bound);
        }
        for w in &mut model.theta[l.w2..l.w2 + h2 * h1] {
            *w = rng.uniform_range(-hidden_bound, hidden_bound);
        }
        model
    }

    pub fn from_params(arch: MlpArchitecture, theta: Vec<f64>) -> Result<Self> {
        let layout = arch.layout();
        check_width(layout.total, theta.len())?;
        Ok(Self { arch, layout, theta })
    }

    pub fn architecture(&self) -> MlpArchitecture {
        self.arch
    }

    /// Shared actor/critic parameter vector.
    pub fn params(&self) -> &[f64] {
        &self.theta
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn forward(&self, features: &[f64]) -> Result<MlpForward> {
        let a = self.arch;
        check_width(a.input_width, features.len())?;
        let l = self.layout;
        let t = &self.theta;
        let (d, n1, n2, k) = (a.input_width, a.hidden1, a.hidden2, a.num_actions);

        // Observations are often sparse (one-hot grids).
        let active: Vec<(usize, f64)> = features
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &v)| (j, v))
            .collect();

        let mut z1 = t[l.b1..l.b1 + n1].to_vec();
        let mut h1 = vec![0.0; n1];
        for i in 0..n1 {
            let w1 = &t[l.w1 + i * d..l.w1 + (i + 1) * d];
            let s = &t[l.skip + i * d..l.skip + (i + 1) * d];
            let mut pre = 0.0;
            let mut proj = 0.0;
            for &(j, x) in &active {
                pre += w1[j] * x;
                proj += s[j] * x;
            }
            z1[i] += pre;
            h1[i] = relu(z1[i]) + proj;
        }

        let mut z2 = t[l.b2..l.b2 + n2].to_vec();
        for (i, z) in z2.iter_mut().enumerate() {
            *z += dot(&t[l.w2 + i * n1..l.w2 + (i + 1) * n1], &h1);
        }
        let embedding: Vec<f64> = z2.iter().map(|&z| relu(z)).collect();

        let preferences: Vec<f64> = (0..k)
            .map(|a| t[l.ba + a] + dot(&t[l.wa + a * n2..l.wa + (a + 1) * n2], &embedding))
            .collect();
        let value = t[l.bc] + dot(&t[l.wc..l.wc + n2], &embedding);

        Ok(MlpForward {
            preferences,
            value,
            input: features.to_vec(),
            z1,
            h1,
            z2,
            embedding,
        })
    }

    /// Gradient of `⟨c, f⟩ + c_v · V` into `out` (overwritten).
    pub fn backward_into(
        &self,
        cache: &MlpForward,
        actor_coefficients: &[f64],
        value_coefficient: f64,
        out: &mut [f64],
    ) -> Result<()> {
        let a = self.arch;
        check_width(a.num_actions, actor_coefficients.len())?;
        check_width(self.layout.total, out.len())?;
        let l = self.layout;
        let t = &self.theta;
        let (d, n1, n2) = (a.input_width, a.hidden1, a.hidden2);
        out.fill(0.0);

        // Heads.
        let mut g_e = vec![0.0; n2];
        for (act, &c) in actor_coefficients.iter().enumerate() {
            out[l.ba + act] = c;
            if c == 0.0 {
                continue;
            }
            let row = l.wa + act * n2;
            for i in 0..n2 {
                out[row + i] = c * cache.embedding[i];
                g_e[i] += c * t[row + i];
            }
        }
        out[l.bc] = value_coefficient;
        if value_coefficient != 0.0 {
            for i in 0..n2 {
                out[l.wc + i] = value_coefficient * cache.embedding[i];
                g_e[i] += value_coefficient * t[l.wc + i];
            }
        }

        // Second hidden layer.
        let mut g_h1 = vec![0.0; n1];
        for i in 0..n2 {
            if cache.z2[i] <= 0.0 || g_e[i] == 0.0 {
                continue;
            }
            let g = g_e[i];
            out[l.b2 + i] = g;
            let row = l.w2 + i * n1;
            let (w_row, g_row) = (&t[row..row + n1], &mut out[row..row + n1]);
            for j in 0..n1 {
                g_row[j] = g * cache.h1[j];
                g_h1[j] += g * w_row[j];
            }
        }

        // First hidden layer and skip projection.
        for i in 0..n1 {
            let g = g_h1[i];
            if g == 0.0 {
                continue;
            }
            let through_relu = cache.z1[i] > 0.0;
            if through_relu {
                out[l.b1 + i] = g;
            }
            for (j, &x) in cache.input.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                out[l.skip + i * d + j] = g * x;
                if through_relu {
                    out[l.w1 + i * d + j] = g * x;
                }
            }
        }
        Ok(())
    }

    pub fn backward(&self, cache: &MlpForward, actor_coefficients: &[f64], value_coefficient: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.layout.total];
        self.backward_into(cache, actor_coefficients, value_coefficient, &mut out)?;
        Ok(out)
    }
}

fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl PreferenceModel for ActorCriticMlp {
    fn num_actions(&self) -> usize {
        self.arch.num_actions
    }

    fn input_width(&self) -> usize {
        self.arch.input_width
    }

    fn params(&self) -> &[f64] {
        &self.theta
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn preferences(&self, features: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(features)?.preferences)
    }

    fn accumulate_gradient(&self, features: &[f64], coefficients: &[f64]) -> Result<Vec<f64>> {
        let cache = self.forward(features)?;
        self.backward(&cache, coefficients, 0.0)
    }
}

impl ValueModel for ActorCriticMlp {
    fn params(&self) -> &[f64] {
        &self.theta
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn value(&self, features: &[f64]) -> Result<f64> {
        Ok(self.forward(features)?.value)
    }

    fn value_gradient(&self, features: &[f64], coefficient: f64) -> Result<Vec<f64>> {
        let cache = self.forward(features)?;
        let zeros = vec![0.0; self.arch.num_actions];
        self.backward(&cache, &zeros, coefficient)
    }
}
