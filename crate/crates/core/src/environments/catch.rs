use crate::error::{Error, Result};
use crate::simplex::SeededRng;

use super::{Environment, Step};

pub const CATCH_HEIGHT: usize = 10;
pub const CATCH_WIDTH: usize = 5;
/// Left, stay, right.
pub const CATCH_ACTIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatchState {
    pub ball_row: usize,
    pub ball_col: usize,
    pub paddle_col: usize,
}

impl CatchState {
    /// Ball at the top in a uniform column, paddle centred.
    pub fn initial(rng: &mut SeededRng) -> Self {
        Self {
            ball_row: 0,
            ball_col: rng.below(CATCH_WIDTH),
            paddle_col: CATCH_WIDTH / 2,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ball_row >= CATCH_HEIGHT - 1 || self.ball_col >= CATCH_WIDTH || self.paddle_col >= CATCH_WIDTH {
            return Err(Error::InvalidArgument(format!("invalid catch state {self:?}")));
        }
        Ok(())
    }

    /// Flattened `height × width` grid with the ball and paddle cells set.
    pub fn observation(&self) -> Vec<f64> {
        let mut grid = vec![0.0; CATCH_HEIGHT * CATCH_WIDTH];
        grid[self.ball_row * CATCH_WIDTH + self.ball_col] = 1.0;
        grid[(CATCH_HEIGHT - 1) * CATCH_WIDTH + self.paddle_col] = 1.0;
        grid
    }
}

pub fn catch_step(state: &CatchState, action: usize, rng: &mut SeededRng) -> Result<Step<CatchState>> {
    state.validate()?;
    let paddle_col = match action {
        0 => state.paddle_col.saturating_sub(1),
        1 => state.paddle_col,
        2 => (state.paddle_col + 1).min(CATCH_WIDTH - 1),
        _ => {
            return Err(Error::IndexOutOfRange {
                index: action,
                len: CATCH_ACTIONS,
            })
        }
    };
    let ball_row = state.ball_row + 1;
    let (next, reward, continues) = if ball_row == CATCH_HEIGHT - 1 {
        let reward = if state.ball_col == paddle_col { 0.0 } else { -1.0 };
        let next = CatchState {
            ball_row: 0,
            ball_col: rng.below(CATCH_WIDTH),
            paddle_col,
        };
        (next, reward, false)
    } else {
        let next = CatchState {
            ball_row,
            ball_col: state.ball_col,
            paddle_col,
        };
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
pub struct Catch {
    state: CatchState,
}

impl Catch {
    pub fn new(rng: &mut SeededRng) -> Self {
        Self {
            state: CatchState::initial(rng),
        }
    }

    pub fn state(&self) -> CatchState {
        self.state
    }
}

impl Environment for Catch {
    fn num_actions(&self) -> usize {
        CATCH_ACTIONS
    }

    fn observation_width(&self) -> usize {
        CATCH_HEIGHT * CATCH_WIDTH
    }

    fn observation(&self) -> Vec<f64> {
        self.state.observation()
    }

    fn step(&mut self, action: usize, rng: &mut SeededRng) -> Result<(f64, bool)> {
        let s = catch_step(&self.state, action, rng)?;
        self.state = s.state;
        Ok((s.reward, s.continues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catch_at_bottom() {
        let mut rng = SeededRng::new(0);
        let s = CatchState {
            ball_row: CATCH_HEIGHT - 2,
            ball_col: 3,
            paddle_col: 3,
        };
        let out = catch_step(&s, 1, &mut rng).unwrap();
        assert_eq!(out.reward, 0.0);
        assert!(!out.continues);
        assert_eq!(out.state.ball_row, 0);
    }

    #[test]
    fn miss_at_bottom() {
        let mut rng = SeededRng::new(0);
        let s = CatchState {
            ball_row: CATCH_HEIGHT - 2,
            ball_col: 0,
            paddle_col: 3,
        };
        let out = catch_step(&s, 1, &mut rng).unwrap();
        assert_eq!(out.reward, -1.0);
        // Moving onto the ball's column on the landing step catches it.
        let s = CatchState { paddle_col: 1, ..s };
        assert_eq!(catch_step(&s, 0, &mut rng).unwrap().reward, 0.0);
    }

    #[test]
    fn paddle_clamped() {
        let mut rng = SeededRng::new(0);
        let s = CatchState {
            ball_row: 0,
            ball_col: 2,
            paddle_col: 0,
        };
        assert_eq!(catch_step(&s, 0, &mut rng).unwrap().state.paddle_col, 0);
        let s = CatchState { paddle_col: 4, ..s };
        assert_eq!(catch_step(&s, 2, &mut rng).unwrap().state.paddle_col, 4);
        assert!(catch_step(&s, 3, &mut rng).is_err());
    }

    #[test]
    fn observation_layout() {
        let s = CatchState {
            ball_row: 2,
            ball_col: 1,
            paddle_col: 4,
        };
        let obs = s.observation();
        assert_eq!(obs.len(), 50);
        assert_eq!(obs.iter().filter(|&&x| x == 1.0).count(), 2);
        assert_eq!(obs[2 * 5 + 1], 1.0);
        assert_eq!(obs[9 * 5 + 4], 1.0);
    }

    #[test]
    fn ball_descends_one_row_per_step() {
        let mut rng = SeededRng::new(5);
        let mut env = Catch::new(&mut rng);
        for _ in 0..1000 {
            let before = env.state();
            let (_, continues) = env.step(rng.below(3), &mut rng).unwrap();
            let after = env.state();
            if continues {
                assert_eq!(after.ball_row, before.ball_row + 1);
                assert_eq!(after.ball_col, before.ball_col);
            } else {
                assert_eq!(before.ball_row, CATCH_HEIGHT - 2);
                assert_eq!(after.ball_row, 0);
            }
        }
    }

    /// Exact catch probability of the uniform policy: propagate the paddle's
    /// distribution over the ball's fall and average over ball columns.
    pub(crate) fn random_policy_catch_probability() -> f64 {
        let mut total = 0.0;
        for ball in 0..CATCH_WIDTH {
            for start in 0..CATCH_WIDTH {
                let mut dist = [0.0; CATCH_WIDTH];
                dist[start] = 1.0;
                for _ in 0..CATCH_HEIGHT - 1 {
                    let mut next = [0.0; CATCH_WIDTH];
                    for (c, &p) in dist.iter().enumerate() {
                        next[c.saturating_sub(1)] += p / 3.0;
                        next[c] += p / 3.0;
                        next[(c + 1).min(CATCH_WIDTH - 1)] += p / 3.0;
                    }
                    dist = next;
                }
                // Averaged over any starting paddle column: the chain is
                // doubly stochastic, so the answer does not depend on it.
                total += dist[ball] / (CATCH_WIDTH * CATCH_WIDTH) as f64;
            }
        }
        total
    }

    #[test]
    fn random_policy_matches_dynamic_programme() {
        let p = random_policy_catch_probability();
        assert!((p - 0.2).abs() < 1e-12);
        let mut rng = SeededRng::new(11);
        let mut env = Catch::new(&mut rng);
        let (mut balls, mut caught) = (0u64, 0u64);
        for _ in 0..100_000 {
            let (r, c) = env.step(rng.below(3), &mut rng).unwrap();
            if !c {
                balls += 1;
                caught += (r == 0.0) as u64;
            }
        }
        let n = balls as f64;
        let sigma = (p * (1.0 - p) / n).sqrt();
        assert!((caught as f64 / n - p).abs() < 3.0 * sigma);
    }
}
