use serde::Serialize;

use crate::error::{Error, Result};
use crate::reduction::{slack_h, slack_h_closed_form, BoundInputs};

use super::bandit::BanditRun;

/// Nearest-rank quantile of an ascending slice: the `⌈p n⌉`-th smallest value.
pub fn nearest_rank(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InvalidArgument("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("quantile level {p} outside [0, 1]")));
    }
    let rank = (p * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.max(1) - 1])
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub horizon: u64,
    pub seeds: usize,
    pub h: f64,
    pub h_closed_form: f64,
    pub est_regret_q50: f64,
    pub est_regret_q95: f64,
    pub est_regret_q100: f64,
    pub true_regret_mean: f64,
    pub true_regret_q50: f64,
    pub true_regret_q95: f64,
    pub true_regret_q100: f64,
    /// 95th percentile of `true − estimated − h`; non-positive when the
    /// high-probability bound held on at least 95% of seeds.
    pub excess_q95: f64,
}

/// One row per checkpoint, aggregated over runs sorted by seed.
///
/// `h` is recomputed from each run's recorded η prefix; all runs must share
/// the same checkpoints.
pub fn report_bound(runs: &[BanditRun], inputs: &BoundInputs) -> Result<Vec<BoundRow>> {
    let mut runs: Vec<&BanditRun> = runs.iter().collect();
    if runs.is_empty() {
        return Err(Error::Config("no completed bandit runs to report".into()));
    }
    runs.sort_by_key(|r| r.seed);
    let horizons: Vec<u64> = runs[0].checkpoints.iter().map(|c| c.round).collect();
    let mut rows = Vec::with_capacity(horizons.len());
    for (i, &horizon) in horizons.iter().enumerate() {
        let at = BoundInputs { horizon, ..*inputs };
        let mut hs = Vec::with_capacity(runs.len());
        let mut est = Vec::with_capacity(runs.len());
        let mut truth = Vec::with_capacity(runs.len());
        let mut excess = Vec::with_capacity(runs.len());
        for run in &runs {
            let point = run
                .checkpoints
                .get(i)
                .filter(|p| p.round == horizon)
                .ok_or_else(|| Error::Config(format!("run for seed {} is missing round {horizon}", run.seed)))?;
            let prefix = run
                .etas
                .get(..horizon as usize)
                .ok_or_else(|| Error::Config(format!("run for seed {} logged too few η values", run.seed)))?;
            let h = slack_h(&at, prefix)?;
            hs.push(h);
            est.push(point.estimated_regret);
            truth.push(point.true_regret);
            excess.push(point.true_regret - point.estimated_regret - h);
        }
        let h_closed_form = slack_h_closed_form(&at).unwrap_or(f64::NAN);
        let est = sorted(est);
        let truth_mean = truth.iter().sum::<f64>() / truth.len() as f64;
        let truth = sorted(truth);
        let excess = sorted(excess);
        rows.push(BoundRow {
            horizon,
            seeds: runs.len(),
            h: hs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            h_closed_form,
            est_regret_q50: nearest_rank(&est, 0.5)?,
            est_regret_q95: nearest_rank(&est, 0.95)?,
            est_regret_q100: nearest_rank(&est, 1.0)?,
            true_regret_mean: truth_mean,
            true_regret_q50: nearest_rank(&truth, 0.5)?,
            true_regret_q95: nearest_rank(&truth, 0.95)?,
            true_regret_q100: nearest_rank(&truth, 1.0)?,
            excess_q95: nearest_rank(&excess, 0.95)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::Daimon;
    use crate::harness::bandit::{run_bandit, BanditSpec};
    use crate::reduction::EtaSchedule;
    use proptest::prelude::*;

    #[test]
    fn nearest_rank_examples() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(nearest_rank(&v, 0.5).unwrap(), 3.0);
        assert_eq!(nearest_rank(&v, 0.95).unwrap(), 5.0);
        assert_eq!(nearest_rank(&v, 0.0).unwrap(), 1.0);
        assert_eq!(nearest_rank(&v, 0.2).unwrap(), 1.0);
        assert_eq!(nearest_rank(&v, 0.21).unwrap(), 2.0);
        assert!(nearest_rank(&[], 0.5).is_err());
    }

    proptest! {
        #[test]
        fn quantiles_monotone(v in prop::collection::vec(-1e3f64..1e3, 1..50)) {
            let s = sorted(v);
            let q50 = nearest_rank(&s, 0.5).unwrap();
            let q95 = nearest_rank(&s, 0.95).unwrap();
            let q100 = nearest_rank(&s, 1.0).unwrap();
            prop_assert!(q50 <= q95 && q95 <= q100);
        }
    }

    fn spec(daimon: Daimon) -> BanditSpec {
        BanditSpec {
            daimon,
            horizon: 2000,
            schedule: EtaSchedule::scaled(1.0).unwrap(),
            delta: 0.05,
            g_max: 1.0,
            log_every: 1000,
            checkpoints: vec![200, 2000],
        }
    }

    #[test]
    fn identical_arms_have_zero_regret() {
        let s = spec(Daimon::fixed(vec![-0.5; 4]).unwrap());
        let runs: Vec<_> = (0..5).map(|seed| run_bandit(&s, seed).unwrap()).collect();
        for run in &runs {
            assert!(run.final_per_arm_regret.iter().all(|&r| r == 0.0));
        }
        for row in report_bound(&runs, &s.bound_inputs()).unwrap() {
            assert_eq!(row.true_regret_q50, 0.0);
            assert_eq!(row.true_regret_q95, 0.0);
            assert_eq!(row.true_regret_q100, 0.0);
        }
    }

    #[test]
    fn h_column_matches_recomputation_and_closed_form_dominates() {
        let s = spec(Daimon::fixed(vec![-0.2, -0.7, -0.4]).unwrap());
        let runs: Vec<_> = (0..4).rev().map(|seed| run_bandit(&s, seed).unwrap()).collect();
        let rows = report_bound(&runs, &s.bound_inputs()).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            let inputs = BoundInputs {
                horizon: row.horizon,
                ..s.bound_inputs()
            };
            let etas = EtaSchedule::scaled(1.0).unwrap().realize(row.horizon, 3).unwrap();
            assert_eq!(row.h, slack_h(&inputs, &etas).unwrap());
            assert!(row.h_closed_form >= row.h);
            assert!(row.true_regret_q50 <= row.true_regret_q95);
        }
        assert!(report_bound(&[], &s.bound_inputs()).is_err());
    }
}
