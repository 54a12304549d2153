//! Patient-pathway simulation and referral-threshold optimization.
//!
//! The toolkit models a population of patients, each carrying a single
//! syndrome drawn from a configurable world model. Syndromes express
//! symptoms over time (latent, permanently visible, or recurrent), a
//! random-forest predictor estimates the probability that an observed
//! symptom history belongs to a rare-disease patient, and a threshold
//! policy decides when to refer the patient to a specialist center. The
//! expected pathway cost of that policy is estimated by Monte Carlo and
//! minimized over a threshold grid.
//!
//! Module map:
//! - [`scenario`]: the syndrome–symptom world model (load, save, validate,
//!   procedural generation).
//! - [`simulator`]: ground-truth symptom timelines and daily observation
//!   streams at daily resolution.
//! - [`learner`]: feature extraction from observation histories and a
//!   from-scratch random-forest classifier.
//! - [`policy`]: the threshold alert policy, pathway costs, Monte Carlo
//!   cost estimation, and the threshold sweep.
//! - [`rng`]: splittable counter-based random streams; every stochastic
//!   result in the crate is a pure function of a 64-bit seed.
//! - [`dist`]: truncated-normal onset sampling and day-rounded exponential
//!   episode durations.
//! - [`report`]: SVG rendering of cost curves.
//!
//! All numeric kernels are generic over the [`Real`] scalar (`f32` or
//! `f64`); the aliases below fix the scalar for common instantiations.

pub mod canonical;
pub mod dist;
pub mod learner;
pub mod policy;
pub mod real;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod simulator;

pub use real::Real;

/// Scalar type used by the command-line pipeline and the file formats.
pub type Scalar = f64;

/// `f64` world model, as used by the pipeline.
pub type ScenarioConfig64 = scenario::ScenarioConfig<f64>;
/// `f32` world model.
pub type ScenarioConfig32 = scenario::ScenarioConfig<f32>;
/// `f64` random forest, as used by the pipeline.
pub type Forest64 = learner::Forest<f64>;
/// `f32` random forest.
pub type Forest32 = learner::Forest<f32>;
/// `f64` training set.
pub type TrainingSet64 = learner::TrainingSet<f64>;
/// `f64` cost parameters, as used by the pipeline.
pub type CostParams64 = policy::CostParams<f64>;
/// `f64` cost curve, as used by the pipeline.
pub type CostCurve64 = policy::CostCurve<f64>;
