//! Capped implicit exploration (CIX) for bandits and policy updates.
//!
//! The crate is organised bottom-up:
//!
//! * [`simplex`]: mixed policies, softmax, categorical sampling and the seeded RNG.
//! * [`estimators`]: IX / CIX estimates of utilities, action values and advantages,
//!   plus exact enumeration of their moments.
//! * [`hedge`]: the full-monitoring exponential-weights learner.
//! * [`reduction`]: the bandit-to-full-monitoring reduction, η schedules, the
//!   high-probability slack bound and a Monte-Carlo check of the concentration lemma
//!   used to derive it.
//! * [`updates`]: SPG, NeuRD and NeuRD-CIX coefficient vectors.
//! * [`approximators`]: tabular, linear and MLP preference models, Adam, checkpoints.
//! * [`critic`]: truncated TD(λ) targets and the advantage signal.
//! * [`environments`]: bandit daimons, catch and continuing cart pole.
//! * [`harness`]: multi-seed experiment runs, sweeps, bound reports and CSV output.

pub mod approximators;
pub mod critic;
pub mod environments;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod hedge;
pub mod reduction;
pub mod simplex;
pub mod updates;

pub use error::{Error, Result};
pub use estimators::{AdvantageEstimateVector, CixEstimate, Denominator};
pub use hedge::{FullMonitoringLearner, HedgeState, LearningRate};
pub use reduction::{BoundInputs, EtaSchedule};
pub use simplex::{MixedPolicy, RewardBounds, SeededRng};
pub use updates::{UpdateDirection, UpdateRule};
