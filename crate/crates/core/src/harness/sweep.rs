use serde::Serialize;

use crate::error::Result;

use super::agent::{run_agent, AgentSpec};
use super::config::{Algorithm, ExperimentConfig};
use super::map_seeds;

/// Which learner produced a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepArm {
    NeurdCix { eta: f64 },
    SpgBaseline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub arm: SweepArm,
    pub seed: u64,
    pub final_cum_reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eta: String,
    pub seed: String,
    pub final_cum_reward: f64,
}

/// Per-(η, seed) final rewards plus the SPG baseline, grouped by arm in grid
/// order and sorted by seed within each group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn finals(&self, arm: SweepArm) -> Vec<f64> {
        self.cells
            .iter()
            .filter(|c| c.arm == arm)
            .map(|c| c.final_cum_reward)
            .collect()
    }

    pub fn mean(&self, arm: SweepArm) -> Option<f64> {
        let v = self.finals(arm);
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// Unbiased cross-seed variance; `None` with fewer than two seeds.
    pub fn variance(&self, arm: SweepArm) -> Option<f64> {
        let v = self.finals(arm);
        if v.len() < 2 {
            return None;
        }
        let m = v.iter().sum::<f64>() / v.len() as f64;
        Some(v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64)
    }

    /// CSV rows: every cell, then one `mean` row per arm. The SPG baseline
    /// is labelled `spg` in the `eta` column.
    pub fn rows(&self) -> Vec<SweepRow> {
        let label = |arm: SweepArm| match arm {
            SweepArm::NeurdCix { eta } => format!("{eta}"),
            SweepArm::SpgBaseline => "spg".to_string(),
        };
        let mut arms: Vec<SweepArm> = Vec::new();
        let mut rows = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            if !arms.contains(&c.arm) {
                arms.push(c.arm);
            }
            rows.push(SweepRow {
                eta: label(c.arm),
                seed: c.seed.to_string(),
                final_cum_reward: c.final_cum_reward,
            });
        }
        for arm in arms {
            rows.push(SweepRow {
                eta: label(arm),
                seed: "mean".to_string(),
                final_cum_reward: self.mean(arm).expect("arm has cells"),
            });
        }
        rows
    }
}

/// NeuRD-CIX at every grid η plus an SPG baseline, on every seed.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepTable> {
    config.validate()?;
    let base = AgentSpec::from_config(config);
    let mut seeds = config.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let mut arms: Vec<SweepArm> = config.etas.iter().map(|&eta| SweepArm::NeurdCix { eta }).collect();
    if !seeds.is_empty() {
        arms.push(SweepArm::SpgBaseline);
    }
    let jobs: Vec<(SweepArm, u64)> = arms
        .iter()
        .flat_map(|&arm| seeds.iter().map(move |&s| (arm, s)))
        .collect();
    let finals = map_seeds(&jobs, config.parallel, |&(arm, seed)| {
        let spec = match arm {
            SweepArm::NeurdCix { eta } => AgentSpec {
                algo: Algorithm::NeurdCix,
                eta,
                ..base
            },
            SweepArm::SpgBaseline => AgentSpec {
                algo: Algorithm::Spg,
                eta: 0.0,
                ..base
            },
        };
        let records = run_agent(&spec, seed)?;
        Ok(records.last().map_or(0.0, |r| r.cum_reward))
    })?;
    Ok(SweepTable {
        cells: jobs
            .into_iter()
            .zip(finals)
            .map(|((arm, seed), final_cum_reward)| SweepCell {
                arm,
                seed,
                final_cum_reward,
            })
            .collect(),
    })
}
