//! Ground-truth symptom timelines and daily observation streams.
//!
//! A trajectory records, for every symptom and every day of the horizon,
//! whether the symptom is present (ground truth, latent symptoms included)
//! and whether it is observed (latent symptoms masked out). Day 0 is the
//! day the syndrome sets in. Each trajectory owns an independent child
//! random stream, so cohort generation is embarrassingly parallel and
//! bit-identical to the serial run.

use rayon::prelude::*;
use thiserror::Error;

use crate::dist::{sample_episode_days, sample_onset_day};
use crate::real::Real;
use crate::rng::{purpose, RngStream};
use crate::scenario::{ScenarioConfig, SymptomKind};

/// One simulated patient pathway.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub syndrome_id: usize,
    pub horizon_days: usize,
    /// `presence[symptom][day]`: ground truth, latent symptoms included.
    pub presence: Vec<Vec<bool>>,
    /// `observed[symptom][day]`: presence masked to non-latent symptoms.
    pub observed: Vec<Vec<bool>>,
    /// Smallest day with any observed symptom.
    pub first_observed_day: Option<usize>,
}

/// The observable prefix of a trajectory: for each symptom, the sorted
/// days strictly before `t` on which it was observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationHistory {
    pub days_observed: Vec<Vec<usize>>,
    /// Exclusive upper bound: only days `< t` are recorded.
    pub t: usize,
    pub first_observed_day: Option<usize>,
}

impl ObservationHistory {
    /// Empty history over `symptom_count` symptoms at time 0.
    pub fn empty(symptom_count: usize) -> Self {
        Self {
            days_observed: vec![Vec::new(); symptom_count],
            t: 0,
            first_observed_day: None,
        }
    }

    /// Number of symptoms observed on day `t - 1`.
    pub fn active_count(&self) -> usize {
        if self.t == 0 {
            return 0;
        }
        let last = self.t - 1;
        self.days_observed
            .iter()
            .filter(|days| days.last() == Some(&last))
            .count()
    }
}

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error("syndrome id {id} out of range (scenario has {count} syndromes)")]
    InvalidSyndrome { id: usize, count: usize },
    #[error("day {t} out of range (horizon is {horizon})")]
    DayOutOfRange { t: usize, horizon: usize },
    #[error("expected one count per syndrome ({expected}), found {found}")]
    CountsMismatch { expected: usize, found: usize },
    #[error("malformed cohort CSV at line {line}: {message}")]
    MalformedCsv { line: usize, message: String },
}

/// Daily on/off timeline of a recurrent symptom.
///
/// The first episode is visible and starts exactly at `onset_day`;
/// episode lengths alternate between `Exponential(on_rate)` and
/// `Exponential(off_rate)`, rounded up to whole days.
pub fn sample_recurrent_timeline<F: Real>(
    onset_day: usize,
    on_rate: F,
    off_rate: F,
    horizon: usize,
    rng: &mut RngStream,
) -> Vec<bool> {
    let mut timeline = vec![false; horizon];
    let mut day = onset_day;
    let mut visible = true;
    while day < horizon {
        let len = sample_episode_days(if visible { on_rate } else { off_rate }, rng);
        if visible {
            let end = day.saturating_add(len).min(horizon);
            timeline[day..end].iter_mut().for_each(|d| *d = true);
        }
        day = day.saturating_add(len);
        visible = !visible;
    }
    timeline
}

/// Simulate one patient of the given syndrome.
///
/// Symptom occurrences are conditionally independent given the syndrome:
/// each link flips a Bernoulli coin for occurrence, draws a truncated
/// Gaussian onset day, and fills the timeline according to the symptom
/// kind. Every link consumes its own child stream derived from `stream`,
/// so the result does not depend on link order.
pub fn simulate_trajectory<F: Real>(
    config: &ScenarioConfig<F>,
    syndrome_id: usize,
    stream: &RngStream,
) -> Result<Trajectory, SimulatorError> {
    if syndrome_id >= config.syndrome_count() {
        return Err(SimulatorError::InvalidSyndrome {
            id: syndrome_id,
            count: config.syndrome_count(),
        });
    }
    let horizon = config.horizon_days;
    let symptom_count = config.symptom_count();
    let mut presence = vec![vec![false; horizon]; symptom_count];
    let mut observed = vec![vec![false; horizon]; symptom_count];

    for link in config.links_of(syndrome_id) {
        let mut lr = stream.derive(link.symptom_id as u64);
        if lr.next_unit::<F>() >= link.occur_prob {
            continue;
        }
        let onset = sample_onset_day(link.onset_mean_days, link.onset_sd_days, &mut lr);
        if onset >= horizon {
            continue;
        }
        let kind = config.symptoms[link.symptom_id].kind;
        let timeline = match kind {
            SymptomKind::Latent | SymptomKind::PermanentVisible => {
                let mut t = vec![false; horizon];
                t[onset..].iter_mut().for_each(|d| *d = true);
                t
            }
            SymptomKind::Recurrent => {
                let on = link.episode_on_rate.expect("validated recurrent link");
                let off = link.episode_off_rate.expect("validated recurrent link");
                sample_recurrent_timeline(onset, on, off, horizon, &mut lr)
            }
        };
        if kind != SymptomKind::Latent {
            observed[link.symptom_id] = timeline.clone();
        }
        presence[link.symptom_id] = timeline;
    }

    let first_observed_day = (0..horizon).find(|&d| observed.iter().any(|s| s[d]));
    Ok(Trajectory {
        syndrome_id,
        horizon_days: horizon,
        presence,
        observed,
        first_observed_day,
    })
}

/// The observable prefix of `trajectory` strictly before day `t`.
pub fn history_at(trajectory: &Trajectory, t: usize) -> Result<ObservationHistory, SimulatorError> {
    if t > trajectory.horizon_days {
        return Err(SimulatorError::DayOutOfRange {
            t,
            horizon: trajectory.horizon_days,
        });
    }
    let days_observed: Vec<Vec<usize>> = trajectory
        .observed
        .iter()
        .map(|days| (0..t).filter(|&d| days[d]).collect())
        .collect();
    let first_observed_day = days_observed
        .iter()
        .filter_map(|d| d.first().copied())
        .min();
    Ok(ObservationHistory {
        days_observed,
        t,
        first_observed_day,
    })
}

/// Syndrome of the i-th trajectory when counts are laid out block-wise.
pub fn syndrome_of_index(counts: &[usize], index: usize) -> Option<usize> {
    let mut cursor = 0;
    for (syndrome_id, &count) in counts.iter().enumerate() {
        cursor += count;
        if index < cursor {
            return Some(syndrome_id);
        }
    }
    None
}

/// Simulate `counts[s]` trajectories of each syndrome `s`.
///
/// Trajectory `i` draws from the child stream `(master_seed, cohort, i)`,
/// so the result is a pure function of the seed and identical whether the
/// loop runs serially or across threads.
pub fn simulate_cohort<F: Real>(
    config: &ScenarioConfig<F>,
    counts: &[usize],
    master_seed: u64,
) -> Result<Vec<Trajectory>, SimulatorError> {
    if counts.len() != config.syndrome_count() {
        return Err(SimulatorError::CountsMismatch {
            expected: config.syndrome_count(),
            found: counts.len(),
        });
    }
    let total: usize = counts.iter().sum();
    let root = RngStream::new(master_seed).derive(purpose::COHORT);
    (0..total)
        .into_par_iter()
        .map(|i| {
            let syndrome_id = syndrome_of_index(counts, i).expect("index within total");
            simulate_trajectory(config, syndrome_id, &root.derive(i as u64))
        })
        .collect()
}

/// Cohort CSV header.
pub const COHORT_CSV_HEADER: &str = "trajectory_id,syndrome_id,symptom_id,day,present,observed";

/// Render a cohort as CSV: one row per (trajectory, symptom, day) where
/// the symptom is present.
pub fn cohort_to_csv(cohort: &[Trajectory]) -> String {
    let mut out = String::from(COHORT_CSV_HEADER);
    out.push('\n');
    for (trajectory_id, traj) in cohort.iter().enumerate() {
        for (symptom_id, days) in traj.presence.iter().enumerate() {
            for (day, &present) in days.iter().enumerate() {
                if present {
                    let observed = u8::from(traj.observed[symptom_id][day]);
                    out.push_str(&format!(
                        "{trajectory_id},{},{symptom_id},{day},1,{observed}\n",
                        traj.syndrome_id
                    ));
                }
            }
        }
    }
    out
}

/// Rebuild trajectories from cohort CSV text.
///
/// Only trajectories with at least one present day appear in the file;
/// all-quiet ones are not representable and are simply absent from the
/// result (they contribute no training rows either way).
pub fn cohort_from_csv<F: Real>(
    text: &str,
    config: &ScenarioConfig<F>,
) -> Result<Vec<Trajectory>, SimulatorError> {
    let horizon = config.horizon_days;
    let symptom_count = config.symptom_count();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == COHORT_CSV_HEADER => {}
        _ => {
            return Err(SimulatorError::MalformedCsv {
                line: 1,
                message: "missing cohort header".into(),
            })
        }
    }

    // trajectory_id -> (syndrome_id, index into `out`)
    let mut index: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    let mut out: Vec<Trajectory> = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| SimulatorError::MalformedCsv {
            line: lineno,
            message,
        };
        let mut fields = line.split(',');
        let mut next_field = |name: &str| {
            fields
                .next()
                .ok_or_else(|| bad(format!("missing field {name}")))
        };
        let trajectory_id: usize = next_field("trajectory_id")?
            .parse()
            .map_err(|_| bad("bad trajectory_id".into()))?;
        let syndrome_id: usize = next_field("syndrome_id")?
            .parse()
            .map_err(|_| bad("bad syndrome_id".into()))?;
        let symptom_id: usize = next_field("symptom_id")?
            .parse()
            .map_err(|_| bad("bad symptom_id".into()))?;
        let day: usize = next_field("day")?
            .parse()
            .map_err(|_| bad("bad day".into()))?;
        let present = next_field("present")? == "1";
        let observed = next_field("observed")? == "1";
        if syndrome_id >= config.syndrome_count() {
            return Err(bad(format!("unknown syndrome {syndrome_id}")));
        }
        if symptom_id >= symptom_count {
            return Err(bad(format!("unknown symptom {symptom_id}")));
        }
        if day >= horizon {
            return Err(bad(format!("day {day} beyond horizon {horizon}")));
        }
        if observed && !present {
            return Err(bad("observed without presence".into()));
        }
        let slot = *index.entry(trajectory_id).or_insert_with(|| {
            out.push(Trajectory {
                syndrome_id,
                horizon_days: horizon,
                presence: vec![vec![false; horizon]; symptom_count],
                observed: vec![vec![false; horizon]; symptom_count],
                first_observed_day: None,
            });
            out.len() - 1
        });
        if out[slot].syndrome_id != syndrome_id {
            return Err(bad(format!(
                "trajectory {trajectory_id} listed under two syndromes"
            )));
        }
        if present {
            out[slot].presence[symptom_id][day] = true;
        }
        if observed {
            out[slot].observed[symptom_id][day] = true;
        }
    }
    for traj in &mut out {
        traj.first_observed_day = (0..horizon).find(|&d| traj.observed.iter().any(|s| s[d]));
    }
    Ok(out)
}
