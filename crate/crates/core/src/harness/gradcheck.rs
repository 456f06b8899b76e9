use serde::Serialize;

use crate::approximators::{
    finite_difference_check, ActorCriticMlp, GradientProbe, LinearModel, MlpArchitecture, PreferenceModel,
    TabularModel,
};
use crate::environments::{CATCH_ACTIONS, CATCH_HEIGHT, CATCH_WIDTH};
use crate::error::Result;
use crate::simplex::SeededRng;

pub const MLP_TOLERANCE: f64 = 1e-4;
pub const LINEAR_TOLERANCE: f64 = 1e-10;

/// Max relative finite-difference error per architecture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradcheckReport {
    pub mlp: f64,
    pub linear: f64,
    pub tabular: f64,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.mlp < MLP_TOLERANCE && self.linear < LINEAR_TOLERANCE && self.tabular == 0.0
    }
}

/// Dyadic rationals on a 1/16 grid, so tabular differences are exact.
fn dyadic(rng: &mut SeededRng) -> f64 {
    (rng.below(64) as f64 - 32.0) / 16.0
}

/// Directional central differences against the analytic gradients of the
/// catch-sized MLP, a linear model and a tabular model.
pub fn gradcheck(seed: u64, probes: usize) -> Result<GradcheckReport> {
    let mut rng = SeededRng::new(seed);

    let arch = MlpArchitecture::standard(CATCH_HEIGHT * CATCH_WIDTH, CATCH_ACTIONS);
    let mlp = ActorCriticMlp::new(arch, &mut rng);
    let mlp_probes: Vec<_> = (0..probes).map(|_| GradientProbe::random(&mlp, &mut rng)).collect();
    let mlp_err = finite_difference_check(&mlp, &mlp_probes, 1e-5)?;

    let mut linear = LinearModel::new(8, 4);
    for p in linear.params_mut() {
        *p = rng.uniform_range(-1.0, 1.0);
    }
    let linear_probes: Vec<_> = (0..probes).map(|_| GradientProbe::random(&linear, &mut rng)).collect();
    let linear_err = finite_difference_check(&linear, &linear_probes, 1e-3)?;

    let (states, actions) = (6, 3);
    let theta = (0..states * actions).map(|_| dyadic(&mut rng)).collect();
    let tabular = TabularModel::from_params(states, actions, theta)?;
    let tabular_probes: Vec<_> = (0..probes)
        .map(|_| GradientProbe {
            features: tabular.one_hot(rng.below(states)),
            coefficients: (0..actions).map(|_| dyadic(&mut rng)).collect(),
            direction: (0..states * actions).map(|_| dyadic(&mut rng)).collect(),
        })
        .collect();
    let tabular_err = finite_difference_check(&tabular, &tabular_probes, 1.0 / 1024.0)?;

    Ok(GradcheckReport {
        mlp: mlp_err,
        linear: linear_err,
        tabular: tabular_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_architectures_pass() {
        for seed in 0..3 {
            let r = gradcheck(seed, 10).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
