//! Features summarizing an observation history: which symptoms have been
//! seen, when they first appeared relative to the very first one, how long
//! the patient has been symptomatic, and how many symptoms are active now.

use crate::real::Real;
use crate::scenario::ScenarioConfig;
use crate::simulator::{history_at, ObservationHistory, Trajectory};

use super::LearnerError;

/// Sentinel for "symptom never observed" in `days_since_first`; sorts
/// below every real offset, so tree splits can isolate it.
pub const NEVER_OBSERVED: i64 = -1;

/// Feature summary of one observation history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    /// Per symptom: observed at least once before `t`.
    pub ever_observed: Vec<bool>,
    /// Per symptom: day of first observation minus the overall first
    /// observed day; [`NEVER_OBSERVED`] if the symptom was never seen.
    pub days_since_first: Vec<i64>,
    /// `t` minus the overall first observed day.
    pub elapsed_days: i64,
    /// Symptoms observed on day `t - 1`.
    pub active_count: usize,
}

impl FeatureVector {
    /// Width of the flattened feature row for `symptom_count` symptoms.
    pub fn width(symptom_count: usize) -> usize {
        2 * symptom_count + 2
    }

    /// Flatten into the numeric row fed to the forest.
    pub fn to_row<F: Real>(&self) -> Vec<F> {
        let mut row = Vec::with_capacity(Self::width(self.ever_observed.len()));
        for &seen in &self.ever_observed {
            row.push(if seen { F::one() } else { F::zero() });
        }
        for &offset in &self.days_since_first {
            row.push(F::from_i64(offset).expect("day offset"));
        }
        row.push(F::from_i64(self.elapsed_days).expect("elapsed days"));
        row.push(F::from_usize(self.active_count).expect("active count"));
        row
    }
}

/// Extract features from a history with at least one observed symptom.
pub fn extract_features(history: &ObservationHistory) -> Result<FeatureVector, LearnerError> {
    let first = history
        .first_observed_day
        .ok_or(LearnerError::EmptyHistory)?;
    let symptom_count = history.days_observed.len();
    let mut ever_observed = vec![false; symptom_count];
    let mut days_since_first = vec![NEVER_OBSERVED; symptom_count];
    for (s, days) in history.days_observed.iter().enumerate() {
        if let Some(&d) = days.first() {
            ever_observed[s] = true;
            days_since_first[s] = (d - first) as i64;
        }
    }
    Ok(FeatureVector {
        ever_observed,
        days_since_first,
        elapsed_days: (history.t - first) as i64,
        active_count: history.active_count(),
    })
}

/// Labeled training rows in flattened form.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet<F> {
    /// One flattened feature row per snapshot.
    pub features: Vec<Vec<F>>,
    /// Whether the snapshot's syndrome is rare.
    pub labels: Vec<bool>,
    pub feature_count: usize,
}

impl<F> TrainingSet<F> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Snapshot days of one trajectory: every day the set of ever-observed
/// symptoms grows, plus every `stride`-th day from the first observation
/// to the horizon.
pub fn snapshot_days(trajectory: &Trajectory, stride: usize) -> Vec<usize> {
    assert!(stride >= 1, "stride must be at least 1");
    let Some(first) = trajectory.first_observed_day else {
        return Vec::new();
    };
    let mut days: Vec<usize> = trajectory
        .observed
        .iter()
        .filter_map(|symptom_days| symptom_days.iter().position(|&o| o))
        .collect();
    let mut day = first;
    while day < trajectory.horizon_days {
        days.push(day);
        day += stride;
    }
    days.sort_unstable();
    days.dedup();
    days
}

/// Build the snapshot training set of a cohort.
///
/// Each trajectory with at least one observed symptom contributes one row
/// per snapshot day; the row's history covers observations through that
/// day inclusive, and its label is the syndrome's rare flag. Trajectories
/// that never show a symptom contribute nothing.
pub fn build_training_set<F: Real>(
    config: &ScenarioConfig<F>,
    cohort: &[Trajectory],
    snapshot_stride_days: usize,
) -> TrainingSet<F> {
    let feature_count = FeatureVector::width(config.symptom_count());
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for trajectory in cohort {
        let label = config.syndromes[trajectory.syndrome_id].is_rare;
        for day in snapshot_days(trajectory, snapshot_stride_days) {
            let history = history_at(trajectory, day + 1).expect("snapshot day within horizon");
            let row = extract_features(&history)
                .expect("snapshot has observations")
                .to_row();
            features.push(row);
            labels.push(label);
        }
    }
    TrainingSet {
        features,
        labels,
        feature_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, SymptomKind};
    use crate::simulator::simulate_cohort;

    fn history(symptom_days: Vec<Vec<usize>>, t: usize) -> ObservationHistory {
        let first_observed_day = symptom_days.iter().filter_map(|d| d.first().copied()).min();
        ObservationHistory {
            days_observed: symptom_days,
            t,
            first_observed_day,
        }
    }

    #[test]
    fn single_symptom_base_case() {
        let h = history(vec![vec![], vec![], vec![5]], 6);
        let f = extract_features(&h).unwrap();
        assert!(f.ever_observed[2]);
        assert_eq!(f.days_since_first[2], 0);
        assert_eq!(f.elapsed_days, 1);
        assert_eq!(f.active_count, 1);
        assert_eq!(f.days_since_first[0], NEVER_OBSERVED);
        assert_eq!(f.days_since_first[1], NEVER_OBSERVED);
    }

    #[test]
    fn relative_onset_arithmetic() {
        // symptom 2 at day 5, symptom 9 at day 40, t = 41
        let mut per_symptom = vec![Vec::new(); 10];
        per_symptom[2] = vec![5];
        per_symptom[9] = vec![40];
        let f = extract_features(&history(per_symptom, 41)).unwrap();
        assert_eq!(f.days_since_first[2], 0);
        assert_eq!(f.days_since_first[9], 35);
        assert_eq!(f.elapsed_days, 36);
        assert_eq!(f.active_count, 1);
    }

    #[test]
    fn empty_history_is_rejected() {
        let h = history(vec![vec![], vec![]], 3);
        assert!(matches!(
            extract_features(&h),
            Err(LearnerError::EmptyHistory)
        ));
    }

    #[test]
    fn snapshot_days_follow_growth_and_stride() {
        let mut traj = Trajectory {
            syndrome_id: 0,
            horizon_days: 100,
            presence: vec![vec![false; 100]; 2],
            observed: vec![vec![false; 100]; 2],
            first_observed_day: Some(5),
        };
        traj.observed[0][5] = true;
        traj.presence[0][5] = true;
        traj.observed[1][40] = true;
        traj.presence[1][40] = true;
        assert_eq!(snapshot_days(&traj, 30), vec![5, 35, 40, 65, 95]);
    }

    #[test]
    fn quiet_cohort_yields_empty_training_set() {
        let config: crate::scenario::ScenarioConfig<f64> = generate_scenario(11);
        let cohort = simulate_cohort(&config, &[20, 0, 0, 0], 5).unwrap();
        let set = build_training_set(&config, &cohort, 30);
        assert!(set.is_empty());
    }

    #[test]
    fn study_cohort_contains_both_classes() {
        let config: crate::scenario::ScenarioConfig<f64> = generate_scenario(42);
        let cohort = simulate_cohort(&config, &[100, 100, 100, 100], 42).unwrap();
        let set = build_training_set(&config, &cohort, 30);
        assert!(set.labels.iter().any(|&l| l));
        assert!(set.labels.iter().any(|&l| !l));
        assert_eq!(set.feature_count, FeatureVector::width(10));
        assert!(set.features.iter().all(|r| r.len() == set.feature_count));
    }

    #[test]
    fn ever_observed_is_monotone_in_time() {
        let config: crate::scenario::ScenarioConfig<f64> = generate_scenario(13);
        let cohort = simulate_cohort(&config, &[0, 3, 3, 0], 8).unwrap();
        for traj in cohort.iter().filter(|t| t.first_observed_day.is_some()) {
            let first = traj.first_observed_day.unwrap();
            let mut previous = 0usize;
            for day in first..traj.horizon_days {
                let h = history_at(traj, day + 1).unwrap();
                let f = extract_features(&h).unwrap();
                let count = f.ever_observed.iter().filter(|&&b| b).count();
                assert!(count >= previous);
                previous = count;
            }
        }
    }

    #[test]
    fn latent_symptoms_never_enter_features() {
        let config: crate::scenario::ScenarioConfig<f64> = generate_scenario(42);
        let cohort = simulate_cohort(&config, &[0, 50, 0, 0], 21).unwrap();
        let latent: Vec<usize> = config
            .symptoms
            .iter()
            .filter(|s| s.kind == SymptomKind::Latent)
            .map(|s| s.id)
            .collect();
        for traj in cohort.iter().filter(|t| t.first_observed_day.is_some()) {
            let h = history_at(traj, traj.horizon_days).unwrap();
            let f = extract_features(&h).unwrap();
            for &s in &latent {
                assert!(!f.ever_observed[s]);
            }
        }
    }
}
