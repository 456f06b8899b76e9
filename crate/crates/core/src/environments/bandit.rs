use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed ten-arm instance used by the regret experiments.
pub const STANDARD_TEN_ARM: [f64; 10] = [-0.5, -0.6, -0.3, -0.8, -0.2, -0.7, -0.4, -0.9, -0.55, -0.65];

/// Oblivious payoff source. `round` is 0-based throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Daimon {
    /// Same payoff vector every round.
    Fixed { payoffs: Vec<f64> },
    /// Arm `a` pays `−1` with probability `−means[a]`, else `0`. Draws are a
    /// pure function of `(seed, round, arm)`.
    Stochastic { means: Vec<f64>, seed: u64 },
    /// `payoff(t, a) = payoffs[σᵏ(a)]` with `k = t / period`.
    Shifting {
        payoffs: Vec<f64>,
        period: u64,
        permutation: Vec<usize>,
    },
    /// Explicit rows, repeated cyclically.
    ObliviousSequence { rows: Vec<Vec<f64>> },
}

fn check_table(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{what}: no arms")));
    }
    for &v in values {
        if !(-1.0..=0.0).contains(&v) {
            return Err(Error::PayoffOutOfRange { value: v, g_max: 1.0 });
        }
    }
    Ok(())
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl Daimon {
    pub fn fixed(payoffs: Vec<f64>) -> Result<Self> {
        check_table(&payoffs, "fixed daimon")?;
        Ok(Daimon::Fixed { payoffs })
    }

    pub fn stochastic(means: Vec<f64>, seed: u64) -> Result<Self> {
        check_table(&means, "stochastic daimon")?;
        Ok(Daimon::Stochastic { means, seed })
    }

    /// Rejects permutations that leave the best arm in place, so the best
    /// fixed arm differs between consecutive periods.
    pub fn shifting(payoffs: Vec<f64>, period: u64, permutation: Vec<usize>) -> Result<Self> {
        let d = Daimon::Shifting {
            payoffs,
            period,
            permutation,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn oblivious_sequence(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = Daimon::ObliviousSequence { rows };
        d.validate()?;
        Ok(d)
    }

    /// A `k`-arm table: the standard ten arms, extended by shifted copies.
    pub fn standard_table(k: usize) -> Vec<f64> {
        (0..k)
            .map(|i| (STANDARD_TEN_ARM[i % 10] - 0.01 * (i / 10) as f64).max(-1.0))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Daimon::Fixed { payoffs } => check_table(payoffs, "fixed daimon"),
            Daimon::Stochastic { means, .. } => check_table(means, "stochastic daimon"),
            Daimon::Shifting {
                payoffs,
                period,
                permutation,
            } => {
                check_table(payoffs, "shifting daimon")?;
                if *period == 0 {
                    return Err(Error::Config("shifting daimon: period must be positive".into()));
                }
                let k = payoffs.len();
                let mut seen = vec![false; k];
                if permutation.len() != k {
                    return Err(Error::LengthMismatch {
                        expected: k,
                        actual: permutation.len(),
                    });
                }
                for &p in permutation {
                    if p >= k || seen[p] {
                        return Err(Error::Config(format!("shifting daimon: {permutation:?} is not a permutation")));
                    }
                    seen[p] = true;
                }
                let shifted: Vec<f64> = permutation.iter().map(|&p| payoffs[p]).collect();
                if k > 1 && argmax(&shifted) == argmax(payoffs) {
                    return Err(Error::Config("shifting daimon: permutation keeps the best arm".into()));
                }
                Ok(())
            }
            Daimon::ObliviousSequence { rows } => {
                let first = rows
                    .first()
                    .ok_or_else(|| Error::Config("oblivious sequence: no rows".into()))?;
                for row in rows {
                    if row.len() != first.len() {
                        return Err(Error::LengthMismatch {
                            expected: first.len(),
                            actual: row.len(),
                        });
                    }
                    check_table(row, "oblivious sequence")?;
                }
                Ok(())
            }
        }
    }

    pub fn num_arms(&self) -> usize {
        match self {
            Daimon::Fixed { payoffs } | Daimon::Shifting { payoffs, .. } => payoffs.len(),
            Daimon::Stochastic { means, .. } => means.len(),
            Daimon::ObliviousSequence { rows } => rows.first().map_or(0, Vec::len),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Daimon::Fixed { .. } => "fixed",
            Daimon::Stochastic { .. } => "stochastic",
            Daimon::Shifting { .. } => "shifting",
            Daimon::ObliviousSequence { .. } => "oblivious-sequence",
        }
    }

    /// Every arm's payoff at `round`. Harness-side only.
    pub fn payoff_row(&self, round: u64) -> Vec<f64> {
        (0..self.num_arms())
            .map(|a| bandit_payoff(self, round, a).expect("arm in range"))
            .collect()
    }
}

/// Uniform in `[0, 1)` from the `(seed, arm)` stream at position `round`.
fn keyed_uniform(seed: u64, round: u64, arm: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(arm as u64);
    rng.set_word_pos(2 * round as u128);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn bandit_payoff(daimon: &Daimon, round: u64, arm: usize) -> Result<f64> {
    let k = daimon.num_arms();
    if arm >= k {
        return Err(Error::IndexOutOfRange { index: arm, len: k });
    }
    Ok(match daimon {
        Daimon::Fixed { payoffs } => payoffs[arm],
        Daimon::Stochastic { means, seed } => {
            if keyed_uniform(*seed, round, arm) < -means[arm] {
                -1.0
            } else {
                0.0
            }
        }
        Daimon::Shifting {
            payoffs,
            period,
            permutation,
        } => {
            let mut a = arm;
            for _ in 0..round / period {
                a = permutation[a];
            }
            payoffs[a]
        }
        Daimon::ObliviousSequence { rows } => rows[(round % rows.len() as u64) as usize][arm],
    })
}
