//! Calibrated noise channels and Monte-Carlo trial sampling.

mod exec;
mod model;
mod record;

pub use exec::{run_trials, trial_rng, ExecPlan, FinalState};
pub use model::NoiseModel;
pub use record::{TrialMeta, TrialRecord, RECORD_SCHEMA};
