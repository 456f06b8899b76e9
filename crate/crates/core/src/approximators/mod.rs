//! Differentiable preference models and their optimizer.
//!
//! Gradients are exact reverse-mode derivatives written out by hand for each
//! fixed architecture; [`finite_difference_check`] validates them.

mod adam;
mod checkpoint;
mod mlp;

pub use adam::AdamState;
pub use checkpoint::{read_checkpoint, write_checkpoint, Architecture, Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use mlp::{ActorCriticMlp, MlpArchitecture, MlpForward};

use crate::error::{Error, Result};
use crate::simplex::SeededRng;

/// `f(s, ·; θ)` together with `Σ_a c_a ∇θ f(s, a; θ)`.
pub trait PreferenceModel {
    fn num_actions(&self) -> usize;
    fn input_width(&self) -> usize;
    fn params(&self) -> &[f64];
    fn params_mut(&mut self) -> &mut [f64];
    fn preferences(&self, features: &[f64]) -> Result<Vec<f64>>;
    fn accumulate_gradient(&self, features: &[f64], coefficients: &[f64]) -> Result<Vec<f64>>;
}

/// A scalar state-value function with its gradient.
pub trait ValueModel {
    fn params(&self) -> &[f64];
    fn params_mut(&mut self) -> &mut [f64];
    fn value(&self, features: &[f64]) -> Result<f64>;
    /// `coefficient · ∇θ V(s; θ)`.
    fn value_gradient(&self, features: &[f64], coefficient: f64) -> Result<Vec<f64>>;
}

pub(crate) fn check_width(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// One preference per (state, action). Features are a one-hot state encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularModel {
    num_states: usize,
    num_actions: usize,
    theta: Vec<f64>,
}

impl TabularModel {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        Self {
            num_states,
            num_actions,
            theta: vec![0.0; num_states * num_actions],
        }
    }

    pub fn from_params(num_states: usize, num_actions: usize, theta: Vec<f64>) -> Result<Self> {
        check_width(num_states * num_actions, theta.len())?;
        Ok(Self {
            num_states,
            num_actions,
            theta,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn one_hot(&self, state: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.num_states];
        x[state] = 1.0;
        x
    }

    fn state_of(&self, features: &[f64]) -> Result<usize> {
        check_width(self.num_states, features.len())?;
        let mut hot = features.iter().enumerate().filter(|(_, &v)| v != 0.0);
        match (hot.next(), hot.next()) {
            (Some((s, &v)), None) if v == 1.0 => Ok(s),
            _ => Err(Error::InvalidArgument("tabular features must be one-hot".into())),
        }
    }
}

impl PreferenceModel for TabularModel {
    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn input_width(&self) -> usize {
        self.num_states
    }

    fn params(&self) -> &[f64] {
        &self.theta
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn preferences(&self, features: &[f64]) -> Result<Vec<f64>> {
        let s = self.state_of(features)?;
        let k = self.num_actions;
        Ok(self.theta[s * k..(s + 1) * k].to_vec())
    }

    fn accumulate_gradient(&self, features: &[f64], coefficients: &[f64]) -> Result<Vec<f64>> {
        let s = self.state_of(features)?;
        check_width(self.num_actions, coefficients.len())?;
        let k = self.num_actions;
        let mut grad = vec![0.0; self.theta.len()];
        grad[s * k..(s + 1) * k].copy_from_slice(coefficients);
        Ok(grad)
    }
}

/// `f(x, a) = Σ_j θ[a, j] x_j`, row-major `K × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    input_width: usize,
    num_actions: usize,
    theta: Vec<f64>,
}

impl LinearModel {
    pub fn new(input_width: usize, num_actions: usize) -> Self {
        Self {
            input_width,
            num_actions,
            theta: vec![0.0; input_width * num_actions],
        }
    }

    pub fn from_params(input_width: usize, num_actions: usize, theta: Vec<f64>) -> Result<Self> {
        check_width(input_width * num_actions, theta.len())?;
        Ok(Self {
            input_width,
            num_actions,
            theta,
        })
    }
}

impl PreferenceModel for LinearModel {
    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn input_width(&self) -> usize {
        self.input_width
    }

    fn params(&self) -> &[f64] {
        &self.theta
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn preferences(&self, features: &[f64]) -> Result<Vec<f64>> {
        check_width(self.input_width, features.len())?;
        Ok(self
            .theta
            .chunks_exact(self.input_width)
            .map(|row| row.iter().zip(features).map(|(w, x)| w * x).sum())
            .collect())
    }

    fn accumulate_gradient(&self, features: &[f64], coefficients: &[f64]) -> Result<Vec<f64>> {
        check_width(self.input_width, features.len())?;
        check_width(self.num_actions, coefficients.len())?;
        let mut grad = Vec::with_capacity(self.theta.len());
        for c in coefficients {
            grad.extend(features.iter().map(|x| c * x));
        }
        Ok(grad)
    }
}

/// `V(x) = Σ_j w_j x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearValue {
    weights: Vec<f64>,
}

impl LinearValue {
    pub fn new(input_width: usize) -> Self {
        Self {
            weights: vec![0.0; input_width],
        }
    }
}

impl ValueModel for LinearValue {
    fn params(&self) -> &[f64] {
        &self.weights
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    fn value(&self, features: &[f64]) -> Result<f64> {
        check_width(self.weights.len(), features.len())?;
        Ok(self.weights.iter().zip(features).map(|(w, x)| w * x).sum())
    }

    fn value_gradient(&self, features: &[f64], coefficient: f64) -> Result<Vec<f64>> {
        check_width(self.weights.len(), features.len())?;
        Ok(features.iter().map(|x| coefficient * x).collect())
    }
}

/// A point at which the gradient is probed: input, action coefficients and a
/// direction in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientProbe {
    pub features: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub direction: Vec<f64>,
}

impl GradientProbe {
    /// Random probe with entries uniform in `[-1, 1)`.
    pub fn random<M: PreferenceModel + ?Sized>(model: &M, rng: &mut SeededRng) -> Self {
        let mut draw = |n: usize| (0..n).map(|_| rng.uniform_range(-1.0, 1.0)).collect::<Vec<_>>();
        Self {
            features: draw(model.input_width()),
            coefficients: draw(model.num_actions()),
            direction: draw(model.params().len()),
        }
    }
}

/// Max over probes of the relative error between the analytic directional
/// derivative `⟨Σ_a c_a ∇f_a, u⟩` and the central difference
/// `(F(θ + h u) − F(θ − h u)) / 2h` of `F(θ) = ⟨c, f(x; θ)⟩`.
pub fn finite_difference_check<M>(model: &M, probes: &[GradientProbe], step: f64) -> Result<f64>
where
    M: PreferenceModel + Clone,
{
    if probes.is_empty() {
        return Err(Error::InvalidArgument("at least one probe is required".into()));
    }
    let scalar = |m: &M, p: &GradientProbe| -> Result<f64> {
        let f = m.preferences(&p.features)?;
        Ok(f.iter().zip(&p.coefficients).map(|(a, b)| a * b).sum())
    };
    let mut worst: f64 = 0.0;
    for probe in probes {
        check_width(model.params().len(), probe.direction.len())?;
        let grad = model.accumulate_gradient(&probe.features, &probe.coefficients)?;
        let analytic: f64 = grad.iter().zip(&probe.direction).map(|(g, u)| g * u).sum();
        let mut plus = model.clone();
        let mut minus = model.clone();
        for ((p, m), u) in plus
            .params_mut()
            .iter_mut()
            .zip(minus.params_mut().iter_mut())
            .zip(&probe.direction)
        {
            *p += step * u;
            *m -= step * u;
        }
        let numeric = (scalar(&plus, probe)? - scalar(&minus, probe)?) / (2.0 * step);
        worst = worst.max(relative_error(analytic, numeric));
    }
    Ok(worst)
}

pub(crate) fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::softmax;
    use proptest::prelude::*;

    #[test]
    fn tabular_forward_and_gradient() {
        let m = TabularModel::new(4, 3);
        let prefs = m.preferences(&m.one_hot(2)).unwrap();
        assert_eq!(prefs, vec![0.0; 3]);
        assert_eq!(softmax(&prefs).unwrap().probs(), &[1.0 / 3.0; 3]);

        let theta: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let m = TabularModel::from_params(4, 3, theta).unwrap();
        assert_eq!(m.preferences(&m.one_hot(1)).unwrap(), vec![3.0, 4.0, 5.0]);
        let g = m.accumulate_gradient(&m.one_hot(3), &[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(&g[9..], &[1.0, -2.0, 0.5]);
        assert!(g[..9].iter().all(|&v| v == 0.0));
        assert!(m.accumulate_gradient(&m.one_hot(0), &[0.0; 3]).unwrap().iter().all(|&v| v == 0.0));
        assert!(m.preferences(&[1.0, 1.0, 0.0, 0.0]).is_err());
        assert!(m.preferences(&[1.0]).is_err());
    }

    #[test]
    fn linear_identity_features() {
        let theta: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let m = LinearModel::from_params(3, 2, theta.clone()).unwrap();
        for j in 0..3 {
            let mut e = vec![0.0; 3];
            e[j] = 1.0;
            assert_eq!(m.preferences(&e).unwrap(), vec![theta[j], theta[3 + j]]);
        }
        assert!(matches!(
            m.preferences(&[1.0]),
            Err(Error::LengthMismatch { expected: 3, actual: 1 })
        ));
    }

    #[test]
    fn tabular_finite_differences_exact() {
        // Dyadic parameters, coefficients, directions and step keep every
        // intermediate exactly representable.
        let mut rng = SeededRng::new(1);
        let dyadic = |rng: &mut SeededRng| (rng.below(64) as f64 - 32.0) / 16.0;
        let theta: Vec<f64> = (0..15).map(|_| dyadic(&mut rng)).collect();
        let m = TabularModel::from_params(5, 3, theta).unwrap();
        let probes: Vec<GradientProbe> = (0..20)
            .map(|_| GradientProbe {
                features: m.one_hot(rng.below(5)),
                coefficients: (0..3).map(|_| dyadic(&mut rng)).collect(),
                direction: (0..15).map(|_| dyadic(&mut rng)).collect(),
            })
            .collect();
        assert_eq!(finite_difference_check(&m, &probes, 1.0 / 1024.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_finite_differences() {
        let mut rng = SeededRng::new(2);
        let mut m = LinearModel::new(6, 4);
        for p in m.params_mut() {
            *p = rng.uniform_range(-1.0, 1.0);
        }
        let probes: Vec<_> = (0..50).map(|_| GradientProbe::random(&m, &mut rng)).collect();
        // Exactly linear, so the step only trades off roundoff.
        assert!(finite_difference_check(&m, &probes, 1e-3).unwrap() < 1e-10);
    }

    #[test]
    fn linear_value_gradient_sign() {
        let v = LinearValue::new(1);
        assert_eq!(v.value(&[1.0]).unwrap(), 0.0);
        // d/dw ½(target − V)² = −(target − V) x; descent moves w toward −1.
        let target = -1.0;
        let residual = target - v.value(&[1.0]).unwrap();
        let ascent = v.value_gradient(&[1.0], residual).unwrap();
        assert!(ascent[0] < 0.0);
    }

    proptest! {
        #[test]
        fn gradient_linear_in_coefficients(
            theta in prop::collection::vec(-2.0f64..2.0, 12),
            x in prop::collection::vec(-1.0f64..1.0, 4),
            c1 in prop::collection::vec(-1.0f64..1.0, 3),
            c2 in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let m = LinearModel::from_params(4, 3, theta).unwrap();
            let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let g1 = m.accumulate_gradient(&x, &c1).unwrap();
            let g2 = m.accumulate_gradient(&x, &c2).unwrap();
            let g = m.accumulate_gradient(&x, &sum).unwrap();
            for i in 0..g.len() {
                prop_assert!((g[i] - g1[i] - g2[i]).abs() <= 1e-10);
            }
        }
    }
}
