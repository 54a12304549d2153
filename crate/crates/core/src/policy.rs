//! The threshold alert policy, pathway costs, Monte Carlo cost
//! estimation, and the threshold sweep.
//!
//! From the first observed symptom onward, the predictor is evaluated
//! once per day on the history including that day's observations; the
//! patient is referred on the first day the predicted rare-disease
//! probability strictly exceeds the threshold. A patient whose prediction
//! never crosses is not referred and wanders until the end of the window.

use rayon::prelude::*;
use thiserror::Error;

use crate::learner::{extract_features, predict_proba, Forest, LearnerError};
use crate::real::{real, Real};
use crate::rng::{purpose, RngStream};
use crate::scenario::ScenarioConfig;
use crate::simulator::{simulate_trajectory, ObservationHistory, SimulatorError, Trajectory};

/// Cost constants of the four-branch pathway cost.
///
/// The defaults are placeholders pending expert elicitation; they are
/// chosen so that referring true rare-disease patients early is worth the
/// specialist visit while referring everyone is not.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CostParams<F> {
    /// Cost per day between first symptom and the referral decision.
    pub cost_wandering_per_day: F,
    /// Cost of a specialist-center workup.
    pub cost_specialist: F,
    /// Cost of a non-specialist consultation.
    pub cost_non_specialist: F,
    /// Population-average wandering of an undetected rare-disease patient.
    pub mean_wandering_days: F,
    /// Average number of physicians such a patient consults.
    pub mean_physicians_consulted: F,
}

impl<F: Real> Default for CostParams<F> {
    fn default() -> Self {
        Self {
            cost_wandering_per_day: real(1.0),
            cost_specialist: real(2500.0),
            cost_non_specialist: real(500.0),
            mean_wandering_days: real(730.0),
            mean_physicians_consulted: real(8.0),
        }
    }
}

/// How one simulated pathway ended under the alert policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathwayOutcome {
    /// Event E: the patient's syndrome is rare.
    pub has_rare_disease: bool,
    /// Event A: the patient was referred to a specialist center.
    pub sent_to_center: bool,
    /// Days between the first observed symptom and the decision (or the
    /// last simulated day when no decision was taken); 0 when no symptom
    /// was ever observed.
    pub wandering_days: usize,
    pub decision_day: Option<usize>,
    pub first_observed_day: Option<usize>,
}

/// Per-threshold Monte Carlo cost estimates over a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CostCurve<F> {
    pub taus: Vec<F>,
    pub mean_costs: Vec<F>,
    pub std_errs: Vec<F>,
    /// Min-max rescaling of `mean_costs` to `[0, 1]`; all zeros for a
    /// constant curve.
    pub normalized_costs: Vec<F>,
}

impl<F> CostCurve<F> {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
}

/// Lazily walks a trajectory day by day from the first observation,
/// yielding `(day, predicted probability)` with the history including
/// each day's observations.
pub struct DailyPredictions<'a, F: Real> {
    trajectory: &'a Trajectory,
    forest: &'a Forest<F>,
    history: ObservationHistory,
    day: usize,
}

impl<'a, F: Real> DailyPredictions<'a, F> {
    /// `Ok(None)` when the trajectory never shows an observable symptom.
    pub fn new(
        trajectory: &'a Trajectory,
        forest: &'a Forest<F>,
    ) -> Result<Option<Self>, PolicyError> {
        let symptom_count = trajectory.observed.len();
        let row_width = crate::learner::FeatureVector::width(symptom_count);
        if forest.feature_count != row_width {
            return Err(LearnerError::DimensionMismatch {
                expected: forest.feature_count,
                found: row_width,
            }
            .into());
        }
        let Some(first) = trajectory.first_observed_day else {
            return Ok(None);
        };
        let mut history = ObservationHistory::empty(symptom_count);
        history.t = first;
        Ok(Some(Self {
            trajectory,
            forest,
            history,
            day: first,
        }))
    }
}

impl<F: Real> Iterator for DailyPredictions<'_, F> {
    type Item = (usize, F);

    fn next(&mut self) -> Option<Self::Item> {
        if self.day >= self.trajectory.horizon_days {
            return None;
        }
        let day = self.day;
        self.day += 1;
        for (symptom, days) in self.history.days_observed.iter_mut().enumerate() {
            if self.trajectory.observed[symptom][day] {
                days.push(day);
                if self.history.first_observed_day.is_none() {
                    self.history.first_observed_day = Some(day);
                }
            }
        }
        self.history.t = day + 1;
        let row = extract_features(&self.history)
            .expect("history starts at an observation")
            .to_row::<F>();
        let p = predict_proba(self.forest, &row).expect("dimensions checked at construction");
        Some((day, p))
    }
}

fn no_observation_outcome(has_rare_disease: bool) -> PathwayOutcome {
    PathwayOutcome {
        has_rare_disease,
        sent_to_center: false,
        wandering_days: 0,
        decision_day: None,
        first_observed_day: None,
    }
}

fn sent_outcome(has_rare_disease: bool, first: usize, decision_day: usize) -> PathwayOutcome {
    PathwayOutcome {
        has_rare_disease,
        sent_to_center: true,
        wandering_days: decision_day - first,
        decision_day: Some(decision_day),
        first_observed_day: Some(first),
    }
}

fn unsent_outcome(has_rare_disease: bool, first: usize, horizon: usize) -> PathwayOutcome {
    PathwayOutcome {
        has_rare_disease,
        sent_to_center: false,
        wandering_days: horizon - 1 - first,
        decision_day: None,
        first_observed_day: Some(first),
    }
}

/// Run the alert policy over one trajectory: refer on the first day the
/// prediction strictly exceeds `tau`.
pub fn run_alert_policy<F: Real>(
    config: &ScenarioConfig<F>,
    trajectory: &Trajectory,
    forest: &Forest<F>,
    tau: F,
) -> Result<PathwayOutcome, PolicyError> {
    if trajectory.syndrome_id >= config.syndrome_count() {
        return Err(SimulatorError::InvalidSyndrome {
            id: trajectory.syndrome_id,
            count: config.syndrome_count(),
        }
        .into());
    }
    let has_rare = config.syndromes[trajectory.syndrome_id].is_rare;
    let Some(predictions) = DailyPredictions::new(trajectory, forest)? else {
        return Ok(no_observation_outcome(has_rare));
    };
    let first = trajectory.first_observed_day.expect("predictions exist");
    for (day, p) in predictions {
        if p > tau {
            return Ok(sent_outcome(has_rare, first, day));
        }
    }
    Ok(unsent_outcome(has_rare, first, trajectory.horizon_days))
}

/// The four-branch pathway cost.
pub fn pathway_cost<F: Real>(outcome: &PathwayOutcome, params: &CostParams<F>) -> F {
    let wandering = F::from_usize(outcome.wandering_days).unwrap();
    match (outcome.has_rare_disease, outcome.sent_to_center) {
        // referred: specialist workup plus however long it took to react
        (_, true) => params.cost_wandering_per_day * wandering + params.cost_specialist,
        // missed rare disease: population-average wandering and repeated
        // non-specialist consultations
        (true, false) => {
            params.cost_wandering_per_day * params.mean_wandering_days
                + params.cost_non_specialist * params.mean_physicians_consulted
        }
        // non-rare, never referred: simulated wandering, one consultation
        (false, false) => params.cost_wandering_per_day * wandering + params.cost_non_specialist,
    }
}

/// Draw a syndrome id from the prevalence distribution.
fn draw_syndrome<F: Real>(config: &ScenarioConfig<F>, u: F) -> usize {
    let mut cum = F::zero();
    for s in &config.syndromes {
        cum += s.prevalence;
        if u < cum {
            return s.id;
        }
    }
    config.syndromes.len() - 1
}

/// The shared evaluation cohort: patient `i` draws its syndrome and
/// trajectory from the child stream `(seed, evaluation, i)`, disjoint
/// from every training stream.
fn evaluation_cohort<F: Real>(
    config: &ScenarioConfig<F>,
    n_eval: usize,
    seed: u64,
) -> Result<Vec<Trajectory>, SimulatorError> {
    let root = RngStream::new(seed).derive(purpose::EVALUATION);
    (0..n_eval)
        .into_par_iter()
        .map(|i| {
            let mut stream = root.derive(i as u64);
            let syndrome = draw_syndrome(config, stream.next_unit::<F>());
            simulate_trajectory(config, syndrome, &stream)
        })
        .collect()
}

/// Policy outcomes over a fresh evaluation cohort. Deterministic in
/// `seed` and independent of thread count.
pub fn evaluate_outcomes<F: Real>(
    config: &ScenarioConfig<F>,
    forest: &Forest<F>,
    tau: F,
    n_eval: usize,
    seed: u64,
) -> Result<Vec<PathwayOutcome>, PolicyError> {
    let cohort = evaluation_cohort(config, n_eval, seed)?;
    cohort
        .par_iter()
        .map(|trajectory| run_alert_policy(config, trajectory, forest, tau))
        .collect()
}

/// Sample mean and standard error; a single sample reports standard
/// error 0 by convention.
fn mean_and_stderr<F: Real>(values: &[F]) -> (F, F) {
    let n = values.len();
    let n_f = F::from_usize(n).unwrap();
    let mean = values.iter().fold(F::zero(), |acc, &v| acc + v) / n_f;
    if n < 2 {
        return (mean, F::zero());
    }
    let ss = values
        .iter()
        .fold(F::zero(), |acc, &v| acc + (v - mean) * (v - mean));
    let var = ss / F::from_usize(n - 1).unwrap();
    (mean, (var / n_f).sqrt())
}

/// Monte Carlo estimate of the expected pathway cost at one threshold.
pub fn estimate_expected_cost<F: Real>(
    config: &ScenarioConfig<F>,
    forest: &Forest<F>,
    tau: F,
    params: &CostParams<F>,
    n_eval: usize,
    seed: u64,
) -> Result<(F, F), PolicyError> {
    assert!(n_eval >= 1, "n_eval must be at least 1");
    let outcomes = evaluate_outcomes(config, forest, tau, n_eval, seed)?;
    let costs: Vec<F> = outcomes.iter().map(|o| pathway_cost(o, params)).collect();
    Ok(mean_and_stderr(&costs))
}

/// Running maxima of a trajectory's daily predictions: `peaks` is
/// strictly increasing and `days[k]` is the first day reaching
/// `peaks[k]`. The decision day at threshold `tau` is the first recorded
/// day whose peak strictly exceeds `tau`.
struct RecordProfile<F> {
    days: Vec<usize>,
    peaks: Vec<F>,
}

impl<F: Real> RecordProfile<F> {
    fn decision_day(&self, tau: F) -> Option<usize> {
        let idx = self.peaks.partition_point(|&p| p <= tau);
        self.days.get(idx).copied()
    }
}

struct EvalPatient<F> {
    has_rare_disease: bool,
    first_observed_day: Option<usize>,
    horizon_days: usize,
    profile: Option<RecordProfile<F>>,
}

impl<F: Real> EvalPatient<F> {
    fn from_trajectory(
        config: &ScenarioConfig<F>,
        forest: &Forest<F>,
        trajectory: &Trajectory,
    ) -> Result<Self, PolicyError> {
        let has_rare_disease = config.syndromes[trajectory.syndrome_id].is_rare;
        let profile = DailyPredictions::new(trajectory, forest)?.map(|predictions| {
            let mut days = Vec::new();
            let mut peaks: Vec<F> = Vec::new();
            for (day, p) in predictions {
                if peaks.last().is_none_or(|&top| p > top) {
                    days.push(day);
                    peaks.push(p);
                }
            }
            RecordProfile { days, peaks }
        });
        Ok(Self {
            has_rare_disease,
            first_observed_day: trajectory.first_observed_day,
            horizon_days: trajectory.horizon_days,
            profile,
        })
    }

    fn outcome_at(&self, tau: F) -> PathwayOutcome {
        let Some(first) = self.first_observed_day else {
            return no_observation_outcome(self.has_rare_disease);
        };
        let profile = self
            .profile
            .as_ref()
            .expect("observed patients carry a profile");
        match profile.decision_day(tau) {
            Some(day) => sent_outcome(self.has_rare_disease, first, day),
            None => unsent_outcome(self.has_rare_disease, first, self.horizon_days),
        }
    }
}

/// Sweep the threshold grid over one shared evaluation cohort (common
/// random numbers), so curve differences reflect the threshold only.
pub fn sweep_thresholds<F: Real>(
    config: &ScenarioConfig<F>,
    forest: &Forest<F>,
    params: &CostParams<F>,
    grid: &[F],
    n_eval: usize,
    seed: u64,
) -> Result<CostCurve<F>, PolicyError> {
    assert!(!grid.is_empty(), "threshold grid must be nonempty");
    assert!(
        grid.windows(2).all(|w| w[0] <= w[1]),
        "threshold grid must be sorted"
    );
    assert!(
        grid.iter().all(|&t| t >= F::zero() && t <= F::one()),
        "thresholds must lie in [0, 1]"
    );
    let cohort = evaluation_cohort(config, n_eval, seed)?;
    let patients: Vec<EvalPatient<F>> = cohort
        .par_iter()
        .map(|trajectory| EvalPatient::from_trajectory(config, forest, trajectory))
        .collect::<Result<_, _>>()?;

    let mut mean_costs = Vec::with_capacity(grid.len());
    let mut std_errs = Vec::with_capacity(grid.len());
    for &tau in grid {
        let costs: Vec<F> = patients
            .iter()
            .map(|p| pathway_cost(&p.outcome_at(tau), params))
            .collect();
        let (mean, se) = mean_and_stderr(&costs);
        mean_costs.push(mean);
        std_errs.push(se);
    }
    let normalized_costs = normalize(&mean_costs);
    Ok(CostCurve {
        taus: grid.to_vec(),
        mean_costs,
        std_errs,
        normalized_costs,
    })
}

fn normalize<F: Real>(means: &[F]) -> Vec<F> {
    let min = means.iter().cloned().fold(F::infinity(), F::min);
    let max = means.iter().cloned().fold(F::neg_infinity(), F::max);
    if max <= min {
        return vec![F::zero(); means.len()];
    }
    means.iter().map(|&m| (m - min) / (max - min)).collect()
}

/// The threshold with minimal mean cost; ties go to the smallest
/// threshold.
pub fn select_optimal_threshold<F: Real>(curve: &CostCurve<F>) -> F {
    assert!(!curve.is_empty(), "cannot select from an empty curve");
    let mut best = 0usize;
    for i in 1..curve.len() {
        if curve.mean_costs[i] < curve.mean_costs[best] {
            best = i;
        }
    }
    curve.taus[best]
}

/// Cost-curve CSV header.
pub const CURVE_CSV_HEADER: &str = "tau,mean_cost,std_err,normalized_cost";

/// Render the curve with fixed 6-decimal formatting so reruns are
/// byte-stable.
pub fn curve_to_csv<F: Real>(curve: &CostCurve<F>) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for i in 0..curve.len() {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6}\n",
            curve.taus[i], curve.mean_costs[i], curve.std_errs[i], curve.normalized_costs[i]
        ));
    }
    out
}
