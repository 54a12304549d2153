//! The syndrome–symptom world model: domain types, validation, JSON
//! persistence, and procedural generation.
//!
//! A scenario is a bipartite graph between syndromes and symptoms. Each
//! link carries the probability that the symptom ever occurs under the
//! syndrome, the truncated-Gaussian law of its onset day, and — for
//! recurrent symptoms — the exponential rates of the on/off episode
//! alternation. A scenario with no links for some syndrome is legal and
//! models a healthy "nothing to report" population.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical;
use crate::real::{real, Real};
use crate::rng::{purpose, RngStream};

/// Observability class of a symptom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymptomKind {
    /// Present but never observable without a targeted exam.
    Latent,
    /// Visible every day from onset onward.
    PermanentVisible,
    /// Alternates between visible episodes and silent gaps.
    Recurrent,
}

/// A symptom of the world model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymptomSpec {
    /// Contiguous 0-based index.
    pub id: usize,
    pub name: String,
    pub kind: SymptomKind,
}

/// A syndrome of the world model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyndromeSpec<F> {
    /// Contiguous 0-based index.
    pub id: usize,
    pub name: String,
    /// Whether this syndrome counts as a rare disease (the positive class).
    pub is_rare: bool,
    /// Probability mass under the syndrome distribution.
    pub prevalence: F,
}

/// A directed syndrome→symptom link with its occurrence law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymptomLink<F> {
    pub syndrome_id: usize,
    pub symptom_id: usize,
    /// Probability that the symptom ever occurs under the syndrome.
    pub occur_prob: F,
    /// Mean of the Gaussian onset law, in days.
    pub onset_mean_days: F,
    /// Standard deviation of the Gaussian onset law, in days.
    pub onset_sd_days: F,
    /// Exponential rate of visible-episode lengths (recurrent symptoms only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub episode_on_rate: Option<F>,
    /// Exponential rate of silent-gap lengths (recurrent symptoms only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub episode_off_rate: Option<F>,
}

/// The complete world model driving all simulation.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig<F> {
    pub syndromes: Vec<SyndromeSpec<F>>,
    pub symptoms: Vec<SymptomSpec>,
    pub links: Vec<SymptomLink<F>>,
    /// Simulation window length in days; day indices run in `[0, horizon)`.
    pub horizon_days: usize,
}

/// One violated invariant, with the field path that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn render_violations(violations: &[Violation]) -> String {
    let lines: Vec<String> = violations.iter().map(Violation::to_string).collect();
    format!("{} violation(s): {}", violations.len(), lines.join("; "))
}

/// Errors from loading or saving a scenario file.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid scenario: {}", render_violations(.0))]
    Invalid(Vec<Violation>),
}

impl<F: Real> ScenarioConfig<F> {
    pub fn syndrome_count(&self) -> usize {
        self.syndromes.len()
    }

    pub fn symptom_count(&self) -> usize {
        self.symptoms.len()
    }

    /// Links attached to one syndrome, in symptom order.
    pub fn links_of(&self, syndrome_id: usize) -> impl Iterator<Item = &SymptomLink<F>> {
        self.links
            .iter()
            .filter(move |l| l.syndrome_id == syndrome_id)
    }

    /// All invariant violations of this configuration; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let fail = |out: &mut Vec<Violation>, path: &str, message: String| {
            out.push(Violation {
                path: path.to_string(),
                message,
            });
        };

        if self.horizon_days == 0 {
            fail(&mut out, "horizon_days", "must be positive".into());
        }

        for (i, s) in self.symptoms.iter().enumerate() {
            if s.id != i {
                fail(
                    &mut out,
                    &format!("symptoms[{i}].id"),
                    format!("expected contiguous id {i}, found {}", s.id),
                );
            }
        }
        for (i, s) in self.syndromes.iter().enumerate() {
            if s.id != i {
                fail(
                    &mut out,
                    &format!("syndromes[{i}].id"),
                    format!("expected contiguous id {i}, found {}", s.id),
                );
            }
            if !(s.prevalence >= F::zero() && s.prevalence <= F::one()) {
                fail(
                    &mut out,
                    &format!("syndromes[{i}].prevalence"),
                    format!("must be in [0,1], found {}", s.prevalence),
                );
            }
        }

        if !self.syndromes.is_empty() {
            let total: F = self.syndromes.iter().map(|s| s.prevalence).sum();
            let err = (total - F::one()).abs().to_f64().unwrap_or(f64::INFINITY);
            if err > 1e-9 {
                fail(
                    &mut out,
                    "syndromes.prevalence",
                    format!("must sum to 1 within 1e-9, found {total}"),
                );
            }
            if !self.syndromes.iter().any(|s| s.is_rare) {
                fail(
                    &mut out,
                    "syndromes.is_rare",
                    "at least one syndrome must be rare".into(),
                );
            }
            if !self.syndromes.iter().any(|s| !s.is_rare) {
                fail(
                    &mut out,
                    "syndromes.is_rare",
                    "at least one syndrome must be non-rare".into(),
                );
            }
        } else {
            fail(&mut out, "syndromes", "must not be empty".into());
        }

        let mut seen_pairs = std::collections::BTreeSet::new();
        for (i, link) in self.links.iter().enumerate() {
            let path = format!("links[{i}]");
            if link.syndrome_id >= self.syndromes.len() {
                fail(
                    &mut out,
                    &format!("{path}.syndrome_id"),
                    format!("unknown syndrome {}", link.syndrome_id),
                );
                continue;
            }
            if link.symptom_id >= self.symptoms.len() {
                fail(
                    &mut out,
                    &format!("{path}.symptom_id"),
                    format!("unknown symptom {}", link.symptom_id),
                );
                continue;
            }
            if !seen_pairs.insert((link.syndrome_id, link.symptom_id)) {
                fail(
                    &mut out,
                    &path,
                    format!(
                        "duplicate link for (syndrome {}, symptom {})",
                        link.syndrome_id, link.symptom_id
                    ),
                );
            }
            if !(link.occur_prob >= F::zero() && link.occur_prob <= F::one()) {
                fail(
                    &mut out,
                    &format!("{path}.occur_prob"),
                    format!("must be in [0,1], found {}", link.occur_prob),
                );
            }
            if !(link.onset_mean_days >= F::zero() && link.onset_mean_days.is_finite()) {
                fail(
                    &mut out,
                    &format!("{path}.onset_mean_days"),
                    "must be finite and nonnegative".into(),
                );
            }
            if !(link.onset_sd_days > F::zero() && link.onset_sd_days.is_finite()) {
                fail(
                    &mut out,
                    &format!("{path}.onset_sd_days"),
                    "must be finite and positive".into(),
                );
            }
            let recurrent = self.symptoms[link.symptom_id].kind == SymptomKind::Recurrent;
            let has_rates = link.episode_on_rate.is_some() && link.episode_off_rate.is_some();
            let any_rate = link.episode_on_rate.is_some() || link.episode_off_rate.is_some();
            if recurrent && !has_rates {
                fail(&mut out, &path, format!("link to recurrent symptom {} must carry episode_on_rate and episode_off_rate", link.symptom_id));
            }
            if !recurrent && any_rate {
                fail(
                    &mut out,
                    &path,
                    format!(
                        "episode rates are only allowed on recurrent symptoms, symptom {} is not",
                        link.symptom_id
                    ),
                );
            }
            for (name, rate) in [
                ("episode_on_rate", link.episode_on_rate),
                ("episode_off_rate", link.episode_off_rate),
            ] {
                if let Some(r) = rate {
                    if !(r > F::zero() && r.is_finite()) {
                        fail(
                            &mut out,
                            &format!("{path}.{name}"),
                            "must be finite and positive".into(),
                        );
                    }
                }
            }
        }

        out
    }
}

/// All invariant violations of a configuration; empty means valid.
pub fn validate_scenario<F: Real>(config: &ScenarioConfig<F>) -> Vec<Violation> {
    config.validate()
}

/// A file may omit `prevalence` on every syndrome, in which case the
/// syndrome distribution defaults to uniform. Omitting it on only some
/// syndromes stays a parse error.
fn apply_uniform_prevalence_default(raw: &mut serde_json::Value) {
    let Some(syndromes) = raw.get_mut("syndromes").and_then(|s| s.as_array_mut()) else {
        return;
    };
    if syndromes.is_empty() || syndromes.iter().any(|s| s.get("prevalence").is_some()) {
        return;
    }
    let uniform = 1.0 / syndromes.len() as f64;
    for syndrome in syndromes {
        if let Some(obj) = syndrome.as_object_mut() {
            obj.insert("prevalence".to_string(), uniform.into());
        }
    }
}

/// Load and validate a scenario from a JSON file.
pub fn load_scenario<F: Real + for<'de> Deserialize<'de>>(
    path: &Path,
) -> Result<ScenarioConfig<F>, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let mut raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| ScenarioError::Parse {
            path: path.display().to_string(),
            source,
        })?;
    apply_uniform_prevalence_default(&mut raw);
    let config: ScenarioConfig<F> =
        serde_json::from_value(raw).map_err(|source| ScenarioError::Parse {
            path: path.display().to_string(),
            source,
        })?;
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(ScenarioError::Invalid(violations));
    }
    Ok(config)
}

/// Write a scenario in canonical form (sorted keys, 2-space indent), so
/// save → load → save round-trips byte-for-byte.
pub fn save_scenario<F: Real + Serialize>(
    config: &ScenarioConfig<F>,
    path: &Path,
) -> Result<(), ScenarioError> {
    canonical::write_canonical_json(path, config).map_err(|source| ScenarioError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Number of syndromes in a generated scenario.
pub const GENERATED_SYNDROMES: usize = 4;
/// Number of symptoms in a generated scenario.
pub const GENERATED_SYMPTOMS: usize = 10;
/// Horizon of a generated scenario: four years of daily steps.
pub const GENERATED_HORIZON_DAYS: usize = 1460;
/// Links with an occurrence probability below this value are dropped
/// during generation.
pub const LINK_PROB_CUTOFF: f64 = 0.15;
/// Upper bound on generated link occurrence probabilities.
pub const LINK_PROB_MAX: f64 = 0.95;

/// Procedurally generate the built-in study world: 4 syndromes (index 0
/// carries no links and models healthy patients, index 1 is the rare
/// disease, 2 and 3 are common), 10 symptoms mixing all three kinds, link
/// probabilities in `[0.15, 0.95]`, onset means spread over the first
/// year, and a four-year horizon. Pure function of the seed.
pub fn generate_scenario<F: Real>(seed: u64) -> ScenarioConfig<F> {
    let root = RngStream::new(seed).derive(purpose::SCENARIO);

    // Symptom kinds: one of each guaranteed, the rest drawn, then the
    // whole assignment shuffled.
    let mut kinds = vec![
        SymptomKind::Latent,
        SymptomKind::PermanentVisible,
        SymptomKind::Recurrent,
    ];
    let mut kind_rng = root.derive(1);
    for _ in kinds.len()..GENERATED_SYMPTOMS {
        kinds.push(match kind_rng.next_index(3) {
            0 => SymptomKind::Latent,
            1 => SymptomKind::PermanentVisible,
            _ => SymptomKind::Recurrent,
        });
    }
    for i in (1..kinds.len()).rev() {
        kinds.swap(i, kind_rng.next_index(i + 1));
    }

    let symptoms: Vec<SymptomSpec> = kinds
        .into_iter()
        .enumerate()
        .map(|(id, kind)| SymptomSpec {
            id,
            name: format!("symptom_{id}"),
            kind,
        })
        .collect();

    let prevalence = real::<F>(1.0 / GENERATED_SYNDROMES as f64);
    let syndromes: Vec<SyndromeSpec<F>> = (0..GENERATED_SYNDROMES)
        .map(|id| SyndromeSpec {
            id,
            name: if id == 0 {
                "healthy".to_string()
            } else {
                format!("syndrome_{id}")
            },
            is_rare: id == 1,
            prevalence,
        })
        .collect();

    let mut links: Vec<SymptomLink<F>> = Vec::new();
    // Syndrome 0 stays linkless; its patients never produce observations.
    for syndrome_id in 1..GENERATED_SYNDROMES {
        for symptom in &symptoms {
            let mut lr = root.derive(((syndrome_id as u64) << 32) | symptom.id as u64);
            let raw = lr.next_f64() * LINK_PROB_MAX;
            if raw < LINK_PROB_CUTOFF {
                continue;
            }
            links.push(make_link(syndrome_id, symptom, raw, &mut lr));
        }
        if !links.iter().any(|l| l.syndrome_id == syndrome_id) {
            // Vanishingly unlikely, but every disease syndrome must
            // express something.
            let symptom = &symptoms[syndrome_id % symptoms.len()];
            let mut lr = root.derive(0xF000_0000_0000_0000 | syndrome_id as u64);
            links.push(make_link(syndrome_id, symptom, 0.9, &mut lr));
        }
    }

    ScenarioConfig {
        syndromes,
        symptoms,
        links,
        horizon_days: GENERATED_HORIZON_DAYS,
    }
}

fn make_link<F: Real>(
    syndrome_id: usize,
    symptom: &SymptomSpec,
    occur_prob: f64,
    lr: &mut RngStream,
) -> SymptomLink<F> {
    let onset_mean = lr.next_f64() * 365.0;
    let onset_sd = 5.0 + lr.next_f64() * 40.0;
    let (on_rate, off_rate) = if symptom.kind == SymptomKind::Recurrent {
        let mean_on = 3.0 + lr.next_f64() * 27.0; // visible 3..30 days
        let mean_off = 10.0 + lr.next_f64() * 80.0; // silent 10..90 days
        (
            Some(real::<F>(1.0 / mean_on)),
            Some(real::<F>(1.0 / mean_off)),
        )
    } else {
        (None, None)
    };
    SymptomLink {
        syndrome_id,
        symptom_id: symptom.id,
        occur_prob: real::<F>(occur_prob),
        onset_mean_days: real::<F>(onset_mean),
        onset_sd_days: real::<F>(onset_sd),
        episode_on_rate: on_rate,
        episode_off_rate: off_rate,
    }
}
