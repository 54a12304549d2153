//! Exhaustive-enumeration oracle on a miniature deterministic world.
//!
//! With occurrence probabilities in {0, 1} and zero onset spread, every
//! syndrome produces exactly one trajectory, so the expected pathway cost
//! is a finite weighted sum that can be enumerated directly and compared
//! against the Monte Carlo estimator.

use pathway_core::learner::{build_training_set, train_forest, Forest, Hyperparameters};
use pathway_core::policy::{estimate_expected_cost, pathway_cost, run_alert_policy, CostParams};
use pathway_core::rng::RngStream;
use pathway_core::scenario::{ScenarioConfig, SymptomKind, SymptomLink, SymptomSpec, SyndromeSpec};
use pathway_core::simulator::{simulate_cohort, simulate_trajectory, Trajectory};

fn tiny_scenario() -> ScenarioConfig<f64> {
    let permanent_link = |syndrome_id: usize, symptom_id: usize, onset: f64| SymptomLink {
        syndrome_id,
        symptom_id,
        occur_prob: 1.0,
        onset_mean_days: onset,
        onset_sd_days: 0.0,
        episode_on_rate: None,
        episode_off_rate: None,
    };
    ScenarioConfig {
        syndromes: vec![
            SyndromeSpec {
                id: 0,
                name: "rare".into(),
                is_rare: true,
                prevalence: 0.3,
            },
            SyndromeSpec {
                id: 1,
                name: "common".into(),
                is_rare: false,
                prevalence: 0.7,
            },
        ],
        symptoms: vec![
            SymptomSpec {
                id: 0,
                name: "s0".into(),
                kind: SymptomKind::PermanentVisible,
            },
            SymptomSpec {
                id: 1,
                name: "s1".into(),
                kind: SymptomKind::PermanentVisible,
            },
        ],
        links: vec![
            permanent_link(0, 0, 0.0),
            permanent_link(0, 1, 2.0),
            permanent_link(1, 0, 1.0),
        ],
        horizon_days: 5,
    }
}

fn tiny_forest(config: &ScenarioConfig<f64>) -> Forest<f64> {
    let cohort = simulate_cohort(config, &[40, 40], 99).unwrap();
    let data = build_training_set(config, &cohort, 2);
    let hyper = Hyperparameters {
        tree_count: 15,
        max_depth: 4,
        min_leaf_size: 1,
        features_per_split: None,
    };
    train_forest(&data, &hyper, 5).unwrap()
}

fn params() -> CostParams<f64> {
    CostParams {
        cost_wandering_per_day: 10.0,
        cost_specialist: 1000.0,
        cost_non_specialist: 50.0,
        mean_wandering_days: 730.0,
        mean_physicians_consulted: 5.0,
    }
}

/// The single trajectory a syndrome can produce in this world.
fn canonical_trajectory(config: &ScenarioConfig<f64>, syndrome: usize) -> Trajectory {
    simulate_trajectory(config, syndrome, &RngStream::new(0)).unwrap()
}

#[test]
fn tiny_world_is_deterministic() {
    let config = tiny_scenario();
    for syndrome in 0..2 {
        let a = simulate_trajectory(&config, syndrome, &RngStream::new(1)).unwrap();
        let b = simulate_trajectory(&config, syndrome, &RngStream::new(987_654)).unwrap();
        assert_eq!(
            a, b,
            "occur_prob in {{0,1}} and sigma 0 leave no randomness"
        );
    }
    let rare = canonical_trajectory(&config, 0);
    assert_eq!(rare.first_observed_day, Some(0));
    assert!(rare.observed[1][2]);
    let common = canonical_trajectory(&config, 1);
    assert_eq!(common.first_observed_day, Some(1));
    assert!(!common.presence[1].iter().any(|&p| p));
}

#[test]
fn monte_carlo_matches_exhaustive_enumeration() {
    let config = tiny_scenario();
    let forest = tiny_forest(&config);
    let params = params();

    for (i, tau) in [0.1, 0.3, 0.5, 0.7, 0.9].into_iter().enumerate() {
        // exhaustive enumeration over the (finite) outcome space
        let expected: f64 = config
            .syndromes
            .iter()
            .map(|s| {
                let trajectory = canonical_trajectory(&config, s.id);
                let outcome = run_alert_policy(&config, &trajectory, &forest, tau).unwrap();
                s.prevalence * pathway_cost(&outcome, &params)
            })
            .sum();

        let (mean, se) =
            estimate_expected_cost(&config, &forest, tau, &params, 100_000, 7 + i as u64).unwrap();
        assert!(
            (mean - expected).abs() <= 3.0 * se + 1e-9,
            "tau {tau}: monte carlo {mean} vs enumeration {expected} (3se {})",
            3.0 * se
        );
    }
}
