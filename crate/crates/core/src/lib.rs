//! Online multiclass classification from partially labeled streams.
//!
//! Each round the learner sees an instance `x`, predicts a class, then
//! receives a candidate set `Y` known to contain the hidden true label.
//! [`learners`] implements Avg/Max Perceptron and Avg/Max Pegasos (plus
//! exact-label baselines), [`bounds`] evaluates their mistake and regret
//! bounds, and [`harness`] runs repeated seeded experiments and bound
//! conformance campaigns.

pub mod bounds;
pub mod cli;
pub mod data;
pub mod error;
pub mod harness;
pub mod learners;
pub mod losses;
pub mod model;

pub use error::{Error, Result};
pub use learners::{Algorithm, Learner, LearnerConfig, TrialRecord};
pub use model::{CandidateLabelSet, WeightMatrix};
