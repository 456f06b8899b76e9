//! Bandit algorithm from a full-monitoring learner plus CIX estimates.
//!
//! Each round the learner's mixed policy is sampled, only the sampled arm's
//! payoff is observed, and the CIX estimate built from it is fed back as if it
//! were a full utility vector. The realized cumulative regret against any arm
//! is then at most the learner's regret on the estimates plus the slack
//! [`slack_h`], with probability `1 − δ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{utility_estimate, CixEstimate, Denominator};
use crate::hedge::{FullMonitoringLearner, HedgeState};
use crate::simplex::{MixedPolicy, RewardBounds, SeededRng};

/// Implicit-exploration schedule `ηᵗ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EtaSchedule {
    Constant { value: f64 },
    /// `ξ · sqrt(1 / (K t))`, clipped into `(0, 1]`.
    ScaledInverseSqrt { xi: f64 },
}

impl EtaSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::InvalidEta(value));
        }
        Ok(EtaSchedule::Constant { value })
    }

    pub fn scaled(xi: f64) -> Result<Self> {
        if !(xi.is_finite() && xi > 0.0) {
            return Err(Error::InvalidArgument(format!("xi must be positive, got {xi}")));
        }
        Ok(EtaSchedule::ScaledInverseSqrt { xi })
    }

    pub fn at(&self, t: u64, num_arms: usize) -> Result<f64> {
        eta_at(self, t, num_arms)
    }

    /// `η¹, …, ηᵀ`.
    pub fn realize(&self, horizon: u64, num_arms: usize) -> Result<Vec<f64>> {
        (1..=horizon).map(|t| self.at(t, num_arms)).collect()
    }
}

pub fn eta_at(schedule: &EtaSchedule, t: u64, num_arms: usize) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidArgument("rounds are numbered from 1".into()));
    }
    if num_arms == 0 {
        return Err(Error::InvalidArgument("at least one arm is required".into()));
    }
    let eta = match *schedule {
        EtaSchedule::Constant { value } => value,
        EtaSchedule::ScaledInverseSqrt { xi } => xi * (1.0 / (num_arms as f64 * t as f64)).sqrt(),
    };
    if !(eta > 0.0) {
        return Err(Error::InvalidEta(eta));
    }
    Ok(eta.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub horizon: u64,
    pub num_arms: usize,
    pub g_max: f64,
    pub delta: f64,
    pub schedule: EtaSchedule,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.num_arms == 0 {
            return Err(Error::InvalidArgument("horizon and arm count must be positive".into()));
        }
        if !(self.g_max > 0.0 && self.g_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("g_max must be positive, got {}", self.g_max)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must be in (0, 1), got {}", self.delta)));
        }
        Ok(())
    }

    fn log_term(&self) -> f64 {
        ((self.num_arms as f64 + 1.0) / self.delta).ln()
    }
}

/// `h = G K Σ ηᵗ + G/(2 η_min) ln((K+1)/δ) + G/2 ln((K+1)/δ)`.
///
/// `realized_etas` must hold exactly `inputs.horizon` values in `(0, 1]`.
pub fn slack_h(inputs: &BoundInputs, realized_etas: &[f64]) -> Result<f64> {
    inputs.validate()?;
    if realized_etas.len() as u64 != inputs.horizon {
        return Err(Error::LengthMismatch {
            expected: inputs.horizon as usize,
            actual: realized_etas.len(),
        });
    }
    if let Some(&bad) = realized_etas.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::InvalidEta(bad));
    }
    let sum: f64 = realized_etas.iter().sum();
    let eta_min = realized_etas.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(slack_from_parts(inputs, sum, eta_min))
}

fn slack_from_parts(inputs: &BoundInputs, eta_sum: f64, eta_min: f64) -> f64 {
    let g = inputs.g_max;
    let log = inputs.log_term();
    g * inputs.num_arms as f64 * eta_sum + g / (2.0 * eta_min) * log + g / 2.0 * log
}

/// Closed-form upper bound on [`slack_h`] for the scaled schedule:
/// `(2ξ + ln((K+1)/δ)/(2ξ)) G sqrt(K T) + G/2 ln((K+1)/δ)`.
pub fn slack_h_closed_form(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let xi = match inputs.schedule {
        EtaSchedule::ScaledInverseSqrt { xi } => xi,
        EtaSchedule::Constant { .. } => {
            return Err(Error::InvalidArgument("closed form needs the scaled schedule".into()))
        }
    };
    if !(xi > 0.0) {
        return Err(Error::InvalidArgument(format!("xi must be positive, got {xi}")));
    }
    let g = inputs.g_max;
    let log = inputs.log_term();
    let kt = inputs.num_arms as f64 * inputs.horizon as f64;
    Ok((2.0 * xi + log / (2.0 * xi)) * g * kt.sqrt() + g / 2.0 * log)
}

/// Running `Σ η` and `min η` so the slack can be reported at any round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackAccumulator {
    rounds: u64,
    eta_sum: f64,
    eta_min: f64,
}

impl Default for SlackAccumulator {
    fn default() -> Self {
        Self {
            rounds: 0,
            eta_sum: 0.0,
            eta_min: f64::INFINITY,
        }
    }
}

impl SlackAccumulator {
    pub fn push(&mut self, eta: f64) {
        self.rounds += 1;
        self.eta_sum += eta;
        self.eta_min = self.eta_min.min(eta);
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Slack over the rounds pushed so far; `inputs.horizon` is ignored.
    pub fn slack(&self, inputs: &BoundInputs) -> Result<f64> {
        if self.rounds == 0 {
            return Ok(0.0);
        }
        let inputs = BoundInputs {
            horizon: self.rounds,
            ..*inputs
        };
        inputs.validate()?;
        Ok(slack_from_parts(&inputs, self.eta_sum, self.eta_min))
    }
}

/// One round of the reduction, as seen from outside the learner.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditRound {
    pub round: u64,
    pub policy: MixedPolicy,
    pub arm: usize,
    pub payoff: f64,
    pub estimate: CixEstimate,
}

/// Exp3-style bandit learner: a full-monitoring learner driven by CIX estimates.
#[derive(Debug, Clone)]
pub struct CixBandit<L> {
    learner: L,
    schedule: EtaSchedule,
    bounds: RewardBounds,
    denominator: Denominator,
    round: u64,
}

impl<L: FullMonitoringLearner> CixBandit<L> {
    pub fn new(learner: L, schedule: EtaSchedule, bounds: RewardBounds) -> Self {
        Self {
            learner,
            schedule,
            bounds,
            denominator: Denominator::Capped,
            round: 0,
        }
    }

    /// Switch to the uncapped IX denominator (comparison runs only).
    pub fn with_denominator(mut self, denominator: Denominator) -> Self {
        self.denominator = denominator;
        self
    }

    pub fn learner(&self) -> &L {
        &self.learner
    }

    pub fn rounds_played(&self) -> u64 {
        self.round
    }

    pub fn schedule(&self) -> EtaSchedule {
        self.schedule
    }

    /// Play one round. `observe` is called exactly once, with the sampled arm;
    /// it is the learner's only access to the environment.
    pub fn step<F>(&mut self, observe: F, rng: &mut SeededRng) -> Result<BanditRound>
    where
        F: FnOnce(usize) -> f64,
    {
        let t = self.round + 1;
        let policy = self.learner.policy();
        if !policy.is_strictly_positive() {
            return Err(Error::InvalidPolicy("full-monitoring policy has a zero entry".into()));
        }
        let eta = self.schedule.at(t, policy.len())?;
        let arm = policy.sample(rng);
        let payoff = self.bounds.check(observe(arm))?;
        let estimate = utility_estimate(self.denominator, &policy, arm, payoff, eta, &self.bounds)?;
        self.learner.ingest(&estimate.values)?;
        self.round = t;
        Ok(BanditRound {
            round: t,
            policy,
            arm,
            payoff,
            estimate,
        })
    }
}

/// Functional single round on a [`HedgeState`]; the round index is taken from
/// the state.
pub fn bandit_round<F>(
    state: &HedgeState,
    observe: F,
    schedule: &EtaSchedule,
    bounds: &RewardBounds,
    rng: &mut SeededRng,
) -> Result<(usize, f64, CixEstimate, HedgeState)>
where
    F: FnOnce(usize) -> f64,
{
    let mut bandit = CixBandit {
        learner: state.clone(),
        schedule: *schedule,
        bounds: *bounds,
        denominator: Denominator::Capped,
        round: state.round(),
    };
    let r = bandit.step(observe, rng)?;
    Ok((r.arm, r.payoff, r.estimate, bandit.learner))
}

/// Cumulative regret against every fixed arm: `Σ_t v_t(x) − v_t(Xᵗ)`.
///
/// `payoffs[t]` is the full payoff vector of round `t`; only the harness has it.
pub fn true_regret(payoffs: &[Vec<f64>], played: &[usize]) -> Result<Vec<f64>> {
    if payoffs.len() != played.len() {
        return Err(Error::LengthMismatch {
            expected: payoffs.len(),
            actual: played.len(),
        });
    }
    let k = payoffs.first().map_or(0, Vec::len);
    let mut tracker = RegretTracker::new(k);
    for (row, &arm) in payoffs.iter().zip(played) {
        tracker.record(row, arm)?;
    }
    Ok(tracker.per_arm().to_vec())
}

/// Running per-arm cumulative regret.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTracker {
    per_arm: Vec<f64>,
}

impl RegretTracker {
    pub fn new(num_arms: usize) -> Self {
        Self {
            per_arm: vec![0.0; num_arms],
        }
    }

    pub fn record(&mut self, payoffs: &[f64], played: usize) -> Result<()> {
        if payoffs.len() != self.per_arm.len() {
            return Err(Error::LengthMismatch {
                expected: self.per_arm.len(),
                actual: payoffs.len(),
            });
        }
        let got = *payoffs.get(played).ok_or(Error::IndexOutOfRange {
            index: played,
            len: payoffs.len(),
        })?;
        for (r, v) in self.per_arm.iter_mut().zip(payoffs) {
            *r += v - got;
        }
        Ok(())
    }

    pub fn per_arm(&self) -> &[f64] {
        &self.per_arm
    }

    /// Regret against the best fixed arm in hindsight.
    pub fn against_best(&self) -> f64 {
        self.per_arm.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Weights `αᵗ_x` of the concentration check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaWeights {
    /// `αᵗ_x = 2 · 1{x = x*} · ηᵗ`.
    #[default]
    Comparator,
    /// `αᵗ_x = 0`.
    Zero,
}

/// A small bandit instance on which the concentration inequality is checked.
///
/// Policies come from exponential weights fed with CIX estimates, so `αᵗ` and
/// `λᵗ_x = ηᵗ / πᵗ(x)` depend only on earlier rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaInstance {
    /// Payoff of each arm, every round.
    pub payoffs: Vec<f64>,
    pub horizon: u64,
    pub comparator: usize,
    pub schedule: EtaSchedule,
    pub g_max: f64,
    #[serde(default)]
    pub weights: LemmaWeights,
}

impl LemmaInstance {
    /// Three arms, 100 rounds, scaled schedule with `ξ = 1`.
    pub fn small() -> Self {
        Self {
            payoffs: vec![-0.2, -0.5, -0.9],
            horizon: 100,
            comparator: 0,
            schedule: EtaSchedule::ScaledInverseSqrt { xi: 1.0 },
            g_max: 1.0,
            weights: LemmaWeights::Comparator,
        }
    }

    fn validate(&self) -> Result<()> {
        let k = self.payoffs.len();
        if k == 0 || k > 3 || self.horizon == 0 || self.horizon > 100 {
            return Err(Error::Config("instance must have 1..=3 arms and 1..=100 rounds".into()));
        }
        if self.comparator >= k {
            return Err(Error::Config(format!("comparator {} out of range", self.comparator)));
        }
        Ok(())
    }

    /// Left-hand side `Σ_t Σ_x (α/G)(v(x) − v̂(x; 0)/(1 + λ))` of one trial.
    pub fn statistic(&self, rng: &mut SeededRng) -> Result<f64> {
        self.validate()?;
        let k = self.payoffs.len();
        let bounds = RewardBounds::new(self.g_max).map_err(|e| Error::Config(e.to_string()))?;
        let mut learner = HedgeState::new(k, Default::default())?;
        let mut total = 0.0;
        for t in 1..=self.horizon {
            let policy = learner.policy();
            let eta = self.schedule.at(t, k)?;
            let played = policy.sample(rng);
            let payoff = self.payoffs[played];
            bounds.check(payoff).map_err(|e| Error::Config(e.to_string()))?;
            for x in 0..k {
                let alpha = match self.weights {
                    LemmaWeights::Comparator if x == self.comparator => 2.0 * eta,
                    _ => 0.0,
                };
                let p = policy.probs()[x];
                let lambda = eta / p;
                let iw = if played == x { self.payoffs[x] / p } else { 0.0 };
                let scaled = -(alpha / self.g_max) * iw;
                if !(scaled >= 0.0 && scaled <= 2.0 * lambda * (1.0 + 1e-12)) {
                    return Err(Error::Config(format!(
                        "weight precondition violated at round {t}, arm {x}: {scaled} vs 2λ = {}",
                        2.0 * lambda
                    )));
                }
                total += alpha / self.g_max * (self.payoffs[x] - iw / (1.0 + lambda));
            }
            let estimate = utility_estimate(Denominator::Capped, &policy, played, payoff, eta, &bounds)?;
            learner.ingest(&estimate.values)?;
        }
        Ok(total)
    }
}

/// Fraction of `trials` in which the statistic exceeds `ln(1/δ)`.
pub fn lemma_violation_rate(
    instance: &LemmaInstance,
    delta: f64,
    trials: u64,
    rng: &mut SeededRng,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must be in (0, 1), got {delta}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let threshold = (1.0 / delta).ln();
    let mut violations = 0u64;
    for _ in 0..trials {
        if instance.statistic(rng)? > threshold {
            violations += 1;
        }
    }
    Ok(violations as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hedge::LearningRate;
    use proptest::prelude::*;

    fn inputs(horizon: u64, num_arms: usize, g_max: f64, delta: f64, schedule: EtaSchedule) -> BoundInputs {
        BoundInputs {
            horizon,
            num_arms,
            g_max,
            delta,
            schedule,
        }
    }

    #[test]
    fn eta_examples() {
        let s = EtaSchedule::scaled(1.0).unwrap();
        assert!((s.at(1, 10).unwrap() - 0.1f64.sqrt()).abs() < 1e-15);
        assert!((s.at(1, 10).unwrap() - 0.316228).abs() < 1e-6);
        assert_eq!(s.at(1, 1).unwrap(), 1.0);
        let c = EtaSchedule::constant(0.5).unwrap();
        for t in [1, 10, 1_000_000] {
            assert_eq!(c.at(t, 4).unwrap(), 0.5);
        }
        assert!(s.at(0, 3).is_err());
        // Large ξ clips to 1.
        assert_eq!(EtaSchedule::scaled(100.0).unwrap().at(5, 2).unwrap(), 1.0);
        assert!(EtaSchedule::constant(0.0).is_err());
        assert!(EtaSchedule::scaled(-1.0).is_err());
    }

    #[test]
    fn eta_min_is_last_round() {
        let s = EtaSchedule::scaled(0.7).unwrap();
        let etas = s.realize(500, 6).unwrap();
        let min = etas.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, *etas.last().unwrap());
    }

    #[test]
    fn slack_examples() {
        let c = EtaSchedule::constant(1.0).unwrap();
        let h = slack_h(&inputs(1, 1, 1.0, 0.5, c), &[1.0]).unwrap();
        assert!((h - (1.0 + 4f64.ln())).abs() < 1e-12);
        assert!((h - 2.386294).abs() < 1e-6);
        let h2 = slack_h(&inputs(1, 1, 2.0, 0.5, c), &[1.0]).unwrap();
        assert_eq!(h2, 2.0 * h);

        let s = EtaSchedule::scaled(1.0).unwrap();
        let inp = inputs(10_000, 10, 1.0, 0.05, s);
        let generic = slack_h(&inp, &s.realize(10_000, 10).unwrap()).unwrap();
        assert!(generic <= slack_h_closed_form(&inp).unwrap());
    }

    #[test]
    fn slack_errors() {
        let c = EtaSchedule::constant(1.0).unwrap();
        assert!(slack_h(&inputs(2, 1, 1.0, 0.5, c), &[1.0, 0.0]).is_err());
        assert!(slack_h(&inputs(2, 1, 1.0, 0.5, c), &[1.0]).is_err());
        assert!(slack_h(&inputs(1, 1, 1.0, 1.0, c), &[1.0]).is_err());
        assert!(slack_h_closed_form(&inputs(1, 1, 1.0, 0.5, c)).is_err());
        let bad = BoundInputs {
            schedule: EtaSchedule::ScaledInverseSqrt { xi: 0.0 },
            ..inputs(1, 1, 1.0, 0.5, c)
        };
        assert!(slack_h_closed_form(&bad).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let s = EtaSchedule::scaled(1.0).unwrap();
        let h = slack_h_closed_form(&inputs(10_000, 10, 1.0, 0.05, s)).unwrap();
        assert!((h - 1488.0).abs() < 1.0, "{h}");
        let base = inputs(10_000, 10, 1.0, 0.05, s);
        let log = base.log_term();
        let sqrt_term = |t: u64| slack_h_closed_form(&BoundInputs { horizon: t, ..base }).unwrap() - log / 2.0;
        assert!((sqrt_term(40_000) / sqrt_term(10_000) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn accumulator_matches_slack() {
        let s = EtaSchedule::scaled(0.8).unwrap();
        let etas = s.realize(321, 4).unwrap();
        let mut acc = SlackAccumulator::default();
        etas.iter().for_each(|&e| acc.push(e));
        let inp = inputs(321, 4, 1.0, 0.1, s);
        assert_eq!(acc.slack(&inp).unwrap(), slack_h(&inp, &etas).unwrap());
    }

    proptest! {
        #[test]
        fn closed_form_dominates_generic(
            k in 1usize..20,
            t in 1u64..5_000,
            xi in 0.05f64..5.0,
            delta in 0.001f64..0.99,
        ) {
            let s = EtaSchedule::ScaledInverseSqrt { xi };
            let inp = inputs(t, k, 1.0, delta, s);
            let generic = slack_h(&inp, &s.realize(t, k).unwrap()).unwrap();
            prop_assert!(generic <= slack_h_closed_form(&inp).unwrap() * (1.0 + 1e-12));
        }

        #[test]
        fn slack_monotone(
            k in 1usize..10,
            t in 1u64..2_000,
            g in 0.1f64..5.0,
            delta in 0.01f64..0.9,
            xi in 0.1f64..3.0,
        ) {
            let s = EtaSchedule::ScaledInverseSqrt { xi };
            let h = |t: u64, k: usize, g: f64, d: f64| {
                slack_h(&inputs(t, k, g, d, s), &s.realize(t, k).unwrap()).unwrap()
            };
            let base = h(t, k, g, delta);
            prop_assert!(h(t + 1, k, g, delta) >= base);
            prop_assert!(h(t, k + 1, g, delta) >= base * (1.0 - 1e-12));
            prop_assert!(h(t, k, g * 1.5, delta) >= base);
            prop_assert!(h(t, k, g, delta * 1.05) <= base);
        }
    }

    #[test]
    fn closed_form_sqrt_growth() {
        for k in [2, 10, 50] {
            for xi in [0.5, 1.0, 2.0] {
                for t in [10_000u64, 100_000, 1_000_000] {
                    let s = EtaSchedule::ScaledInverseSqrt { xi };
                    let f = |t| slack_h_closed_form(&inputs(t, k, 1.0, 0.05, s)).unwrap();
                    assert!(f(4 * t) / f(t) <= 2.05);
                }
            }
        }
    }

    #[test]
    fn bandit_round_examples() {
        let b = RewardBounds::default();
        let mut rng = SeededRng::new(3);
        let state = HedgeState::new(2, LearningRate::Anytime).unwrap();
        // π = (0.5, 0.5), η = 0.5 ⇒ β = 1 regardless of the arm drawn.
        let sched = EtaSchedule::constant(0.5).unwrap();
        let (arm, payoff, est, next) = bandit_round(&state, |_| -1.0, &sched, &b, &mut rng).unwrap();
        assert_eq!(payoff, -1.0);
        assert_eq!(est.beta, 1.0);
        let mut expected = vec![0.0, 0.0];
        expected[arm] = -1.0;
        assert_eq!(est.values, expected);
        assert_eq!(next.cumulative(), &expected[..]);

        let (_, _, est, next) = bandit_round(&state, |_| 0.0, &sched, &b, &mut rng).unwrap();
        assert_eq!(est.values, vec![0.0, 0.0]);
        assert_eq!(next.cumulative(), state.cumulative());
        assert_eq!(next.round(), 1);

        assert!(matches!(
            bandit_round(&state, |_| 0.5, &sched, &b, &mut rng),
            Err(Error::PayoffOutOfRange { .. })
        ));
    }

    #[test]
    fn bandit_round_importance_sampling_limit() {
        // Cumulative (0, ln 3) at rate 1 gives π = (0.25, 0.75).
        let state = HedgeState::from_cumulative(vec![0.0, 3f64.ln()], 0, LearningRate::Constant(1.0)).unwrap();
        assert!((state.policy().probs()[1] - 0.75).abs() < 1e-15);
        let b = RewardBounds::default();
        let mut bandit = CixBandit::new(state, EtaSchedule::Constant { value: 1e-300 }, b);
        let mut rng = SeededRng::new(0);
        loop {
            let r = bandit.step(|_| -0.5, &mut rng).unwrap();
            if r.arm == 1 {
                assert!((r.estimate.values[1] + 2.0 / 3.0).abs() < 1e-12);
                assert_eq!(r.estimate.values[0], 0.0);
                break;
            }
        }
    }

    #[test]
    fn observe_called_once_with_sampled_arm() {
        let b = RewardBounds::default();
        let mut bandit = CixBandit::new(
            HedgeState::new(5, LearningRate::Anytime).unwrap(),
            EtaSchedule::scaled(1.0).unwrap(),
            b,
        );
        let mut rng = SeededRng::new(9);
        for _ in 0..200 {
            let mut seen = Vec::new();
            let r = bandit
                .step(
                    |arm| {
                        seen.push(arm);
                        -0.3
                    },
                    &mut rng,
                )
                .unwrap();
            assert_eq!(seen, vec![r.arm]);
        }
    }

    fn trajectory(table: &[Vec<f64>], seed: u64) -> Vec<(usize, Vec<u64>)> {
        let mut bandit = CixBandit::new(
            HedgeState::new(table[0].len(), LearningRate::Anytime).unwrap(),
            EtaSchedule::scaled(1.0).unwrap(),
            RewardBounds::default(),
        );
        let mut rng = SeededRng::new(seed);
        table
            .iter()
            .map(|row| {
                let r = bandit.step(|arm| row[arm], &mut rng).unwrap();
                (r.arm, r.policy.probs().iter().map(|p| p.to_bits()).collect())
            })
            .collect()
    }

    #[test]
    fn information_hygiene() {
        let mut gen = SeededRng::new(100);
        let table: Vec<Vec<f64>> = (0..2_000)
            .map(|_| (0..4).map(|_| -gen.uniform()).collect())
            .collect();
        let original = trajectory(&table, 5);
        let mut scrambled = table.clone();
        for (row, (played, _)) in scrambled.iter_mut().zip(&original) {
            for (arm, v) in row.iter_mut().enumerate() {
                if arm != *played {
                    *v = -gen.uniform();
                }
            }
        }
        assert_eq!(original, trajectory(&scrambled, 5));
    }

    #[test]
    fn true_regret_examples() {
        assert_eq!(true_regret(&[vec![-1.0, 0.0]], &[0]).unwrap(), vec![0.0, 1.0]);
        let payoffs = vec![vec![-0.2, -0.7]; 10];
        let r = true_regret(&payoffs, &[0; 10]).unwrap();
        assert_eq!(r[0], 0.0);

        let mut gen = SeededRng::new(8);
        let payoffs: Vec<Vec<f64>> = (0..300).map(|_| (0..3).map(|_| -gen.uniform()).collect()).collect();
        let played: Vec<usize> = (0..300).map(|_| gen.below(3)).collect();
        let r = true_regret(&payoffs, &played).unwrap();
        for x in 0..3 {
            let arm_total: f64 = payoffs.iter().map(|row| row[x]).sum();
            let got: f64 = payoffs.iter().zip(&played).map(|(row, &a)| row[a]).sum();
            assert!((r[x] - (arm_total - got)).abs() < 1e-9);
        }
        assert!(true_regret(&payoffs, &played[..5]).is_err());
    }

    #[test]
    fn estimated_regret_sublinear() {
        use crate::hedge::EstimatedRegretTracker;
        let payoffs = [-0.5, -0.6, -0.3, -0.8, -0.2, -0.7, -0.4, -0.9, -0.55, -0.65];
        let mut bandit = CixBandit::new(
            HedgeState::new(10, LearningRate::Anytime).unwrap(),
            EtaSchedule::scaled(1.0).unwrap(),
            RewardBounds::default(),
        );
        let mut rng = SeededRng::new(1);
        let mut tracker = EstimatedRegretTracker::new(10);
        let mut per_round = Vec::new();
        for t in 1..=100_000u64 {
            let r = bandit.step(|a| payoffs[a], &mut rng).unwrap();
            tracker.record(&r.policy, &r.estimate.values).unwrap();
            if [1_000, 10_000, 100_000].contains(&t) {
                per_round.push(tracker.regret() / t as f64);
            }
        }
        assert!(per_round[0] > per_round[1] && per_round[1] > per_round[2], "{per_round:?}");
    }

    #[test]
    fn lemma_degenerate_weights() {
        let inst = LemmaInstance {
            weights: LemmaWeights::Zero,
            ..LemmaInstance::small()
        };
        let mut rng = SeededRng::new(2);
        assert_eq!(lemma_violation_rate(&inst, 0.05, 500, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn lemma_precondition_violation() {
        let inst = LemmaInstance {
            payoffs: vec![-1.5, -0.2],
            g_max: 1.0,
            ..LemmaInstance::small()
        };
        let mut rng = SeededRng::new(2);
        assert!(matches!(
            lemma_violation_rate(&inst, 0.05, 10, &mut rng),
            Err(Error::Config(_))
        ));
        let too_big = LemmaInstance {
            payoffs: vec![-0.1; 4],
            ..LemmaInstance::small()
        };
        assert!(too_big.statistic(&mut rng).is_err());
    }

    #[test]
    fn lemma_rate_small_sample() {
        let mut rng = SeededRng::new(77);
        let rate = lemma_violation_rate(&LemmaInstance::small(), 0.5, 2_000, &mut rng).unwrap();
        assert!(rate <= 0.5 + 3.0 * (0.25f64 / 2_000.0).sqrt());
    }
}
