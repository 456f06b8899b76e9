//! Probability simplex arithmetic shared by every other module.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|Σ p − 1|` for a valid mixed policy.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// A probability vector over a finite action (or arm) set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedPolicy {
    probs: Vec<f64>,
}

impl MixedPolicy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPolicy("empty action set".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidPolicy(format!("entry {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidPolicy(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPolicy("empty action set".into()));
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
        })
    }

    /// Point mass on `index`.
    pub fn pure(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(Error::IndexOutOfRange { index, len: k });
        }
        let mut probs = vec![0.0; k];
        probs[index] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability of `index`, or an error when it is out of range.
    pub fn prob(&self, index: usize) -> Result<f64> {
        self.probs.get(index).copied().ok_or(Error::IndexOutOfRange {
            index,
            len: self.probs.len(),
        })
    }

    /// `⟨π, v⟩`.
    pub fn expectation(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.probs.len() {
            return Err(Error::LengthMismatch {
                expected: self.probs.len(),
                actual: values.len(),
            });
        }
        Ok(self.probs.iter().zip(values).map(|(p, v)| p * v).sum())
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    /// Draw an index with probability `probs[i]`.
    pub fn sample(&self, rng: &mut SeededRng) -> usize {
        let u = rng.uniform();
        let mut cumulative = 0.0;
        let mut last_positive = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            last_positive = i;
            cumulative += p;
            if u < cumulative {
                return i;
            }
        }
        // Rounding left the cumulative sum just below 1.
        last_positive
    }
}

/// Softmax with max-subtraction.
///
/// Errors on any non-finite preference.
pub fn softmax(preferences: &[f64]) -> Result<MixedPolicy> {
    if preferences.is_empty() {
        return Err(Error::InvalidPolicy("empty preference vector".into()));
    }
    if let Some((index, &value)) = preferences.iter().enumerate().find(|(_, p)| !p.is_finite()) {
        return Err(Error::NonFinitePreference { index, value });
    }
    let max = preferences.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = preferences.iter().map(|p| (p - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(MixedPolicy { probs })
}

/// Global reward-range convention: every reward lies in `[-g_max, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBounds {
    g_max: f64,
}

impl RewardBounds {
    pub fn new(g_max: f64) -> Result<Self> {
        if !(g_max.is_finite() && g_max > 0.0) {
            return Err(Error::InvalidArgument(format!("g_max must be positive, got {g_max}")));
        }
        Ok(Self { g_max })
    }

    pub fn g_max(&self) -> f64 {
        self.g_max
    }

    pub fn contains(&self, reward: f64) -> bool {
        (-self.g_max..=0.0).contains(&reward)
    }

    pub fn check(&self, reward: f64) -> Result<f64> {
        if self.contains(reward) {
            Ok(reward)
        } else {
            Err(Error::PayoffOutOfRange {
                value: reward,
                g_max: self.g_max,
            })
        }
    }
}

impl Default for RewardBounds {
    fn default() -> Self {
        Self { g_max: 1.0 }
    }
}

/// The one random source threaded through every stochastic operation.
///
/// ChaCha8 keyed by a 64-bit seed; identical seeds give bit-identical streams
/// on every platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` under the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn softmax_examples() {
        assert!(close(softmax(&[0.0, 0.0]).unwrap().probs(), &[0.5, 0.5], 1e-15));
        for c in [-1e6, -3.5, 0.0, 42.0, 1e6] {
            let p = softmax(&[c, c, c]).unwrap();
            assert!(close(p.probs(), &[1.0 / 3.0; 3], 1e-15));
        }
        let p = softmax(&[2f64.ln(), 0.0]).unwrap();
        assert!(close(p.probs(), &[2.0 / 3.0, 1.0 / 3.0], 1e-15));
    }

    #[test]
    fn softmax_rejects_non_finite() {
        assert!(matches!(
            softmax(&[0.0, f64::NAN]),
            Err(Error::NonFinitePreference { index: 1, .. })
        ));
        assert!(softmax(&[f64::INFINITY]).is_err());
        assert!(softmax(&[]).is_err());
    }

    #[test]
    fn policy_validation() {
        assert!(MixedPolicy::new(vec![0.5, 0.5]).is_ok());
        assert!(MixedPolicy::new(vec![0.5, 0.5 + 1e-10]).is_ok());
        assert!(MixedPolicy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedPolicy::new(vec![1.5, -0.5]).is_err());
        assert!(MixedPolicy::new(vec![]).is_err());
    }

    #[test]
    fn sample_point_mass() {
        let p = MixedPolicy::new(vec![0.0, 1.0, 0.0]).unwrap();
        let mut rng = SeededRng::new(7);
        for _ in 0..10_000 {
            assert_eq!(p.sample(&mut rng), 1);
        }
    }

    #[test]
    fn sample_uniform_frequency() {
        // 3σ of Binomial(10^6, 0.5)/10^6 is 0.0015; the tolerance is 0.002.
        let p = MixedPolicy::uniform(2).unwrap();
        let mut rng = SeededRng::new(1);
        let n = 1_000_000;
        let zeros = (0..n).filter(|_| p.sample(&mut rng) == 0).count();
        assert!((zeros as f64 / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn sample_is_deterministic() {
        let p = MixedPolicy::uniform(4).unwrap();
        let draw = || {
            let mut rng = SeededRng::new(42);
            (0..100).map(|_| p.sample(&mut rng)).collect::<Vec<_>>()
        };
        let a = draw();
        assert_eq!(a, draw());
        assert!(a.iter().any(|&i| i != a[0]));
    }

    #[test]
    fn streams_differ() {
        let mut a = SeededRng::with_stream(3, 0);
        let mut b = SeededRng::with_stream(3, 1);
        assert_ne!(a.uniform(), b.uniform());
    }

    proptest! {
        #[test]
        fn softmax_shift_invariant(
            prefs in prop::collection::vec(-50.0f64..50.0, 1..8),
            c in -100.0f64..100.0,
        ) {
            let a = softmax(&prefs).unwrap();
            let shifted: Vec<f64> = prefs.iter().map(|p| p + c).collect();
            let b = softmax(&shifted).unwrap();
            prop_assert!(close(a.probs(), b.probs(), 1e-12));
            prop_assert!((a.probs().iter().sum::<f64>() - 1.0).abs() <= PROB_SUM_TOLERANCE);
        }

        #[test]
        fn softmax_is_interior(prefs in prop::collection::vec(-15.0f64..15.0, 2..8)) {
            let p = softmax(&prefs).unwrap();
            prop_assert!(p.probs().iter().all(|&x| x > 0.0 && x < 1.0));
        }
    }

    #[test]
    fn sample_frequencies_converge() {
        for seed in 0..20u64 {
            let mut rng = SeededRng::new(seed);
            let k = 2 + rng.below(4);
            let raw: Vec<f64> = (0..k).map(|_| rng.uniform_range(0.05, 1.0)).collect();
            let total: f64 = raw.iter().sum();
            let policy = MixedPolicy::new(raw.iter().map(|r| r / total).collect()).unwrap();
            let n = 50_000;
            let mut counts = vec![0usize; k];
            for _ in 0..n {
                counts[policy.sample(&mut rng)] += 1;
            }
            for (c, &p) in counts.iter().zip(policy.probs()) {
                let freq = *c as f64 / n as f64;
                assert!((freq - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt());
            }
        }
    }
}
