//! Property tests over randomly generated worlds, trajectories, and
//! training sets.

use proptest::prelude::*;

use pathway_core::learner::{predict_proba, train_forest, Hyperparameters, TrainingSet};
use pathway_core::policy::{pathway_cost, CostParams, PathwayOutcome};
use pathway_core::rng::RngStream;
use pathway_core::scenario::{ScenarioConfig, SymptomKind, SymptomLink, SymptomSpec, SyndromeSpec};
use pathway_core::simulator::{history_at, simulate_trajectory};

fn arb_kind() -> impl Strategy<Value = SymptomKind> {
    prop_oneof![
        Just(SymptomKind::Latent),
        Just(SymptomKind::PermanentVisible),
        Just(SymptomKind::Recurrent),
    ]
}

type RawLink = (usize, usize, f64, f64, f64, f64, f64);

/// Valid scenarios: syndrome 0 rare, uniform prevalence, deduplicated
/// links whose episode rates follow the symptom kind.
fn arb_scenario() -> impl Strategy<Value = ScenarioConfig<f64>> {
    (
        2usize..5,
        prop::collection::vec(arb_kind(), 1..6),
        5usize..60,
    )
        .prop_flat_map(|(n_syn, kinds, horizon)| {
            let n_sym = kinds.len();
            let raw_link = (
                0..n_syn,
                0..n_sym,
                0.0f64..=1.0,
                0.0f64..50.0,
                0.5f64..20.0,
                0.05f64..2.0,
                0.05f64..2.0,
            );
            prop::collection::vec(raw_link, 0..=12).prop_map(move |raw: Vec<RawLink>| {
                let symptoms: Vec<SymptomSpec> = kinds
                    .iter()
                    .enumerate()
                    .map(|(id, &kind)| SymptomSpec {
                        id,
                        name: format!("s{id}"),
                        kind,
                    })
                    .collect();
                let syndromes: Vec<SyndromeSpec<f64>> = (0..n_syn)
                    .map(|id| SyndromeSpec {
                        id,
                        name: format!("y{id}"),
                        is_rare: id == 0,
                        prevalence: 1.0 / n_syn as f64,
                    })
                    .collect();
                let mut seen = std::collections::BTreeSet::new();
                let links: Vec<SymptomLink<f64>> = raw
                    .into_iter()
                    .filter(|&(syn, sym, ..)| seen.insert((syn, sym)))
                    .map(|(syn, sym, occur, mu, sd, on, off)| {
                        let recurrent = kinds[sym] == SymptomKind::Recurrent;
                        SymptomLink {
                            syndrome_id: syn,
                            symptom_id: sym,
                            occur_prob: occur,
                            onset_mean_days: mu,
                            onset_sd_days: sd,
                            episode_on_rate: recurrent.then_some(on),
                            episode_off_rate: recurrent.then_some(off),
                        }
                    })
                    .collect();
                ScenarioConfig {
                    syndromes,
                    symptoms,
                    links,
                    horizon_days: horizon,
                }
            })
        })
}

proptest! {
    #[test]
    fn generated_scenarios_validate(config in arb_scenario()) {
        prop_assert!(config.validate().is_empty(), "{:?}", config.validate());
    }

    #[test]
    fn scenario_json_round_trip_is_identity(config in arb_scenario()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        pathway_core::scenario::save_scenario(&config, &path).unwrap();
        let loaded: ScenarioConfig<f64> = pathway_core::scenario::load_scenario(&path).unwrap();
        prop_assert_eq!(&config, &loaded);
        // a second save emits identical bytes
        let path2 = dir.path().join("scenario2.json");
        pathway_core::scenario::save_scenario(&loaded, &path2).unwrap();
        prop_assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn trajectory_invariants_hold(
        config in arb_scenario(),
        seed in any::<u64>(),
        syndrome_sel in 0usize..100,
    ) {
        let syndrome = syndrome_sel % config.syndrome_count();
        let traj = simulate_trajectory(&config, syndrome, &RngStream::new(seed)).unwrap();
        prop_assert_eq!(traj.horizon_days, config.horizon_days);
        for (s, spec) in config.symptoms.iter().enumerate() {
            for d in 0..traj.horizon_days {
                prop_assert!(!traj.observed[s][d] || traj.presence[s][d], "observed without presence");
            }
            match spec.kind {
                SymptomKind::Latent => {
                    prop_assert!(traj.observed[s].iter().all(|&o| !o), "latent symptom observed");
                }
                SymptomKind::PermanentVisible => {
                    if let Some(onset) = traj.presence[s].iter().position(|&p| p) {
                        prop_assert!(traj.presence[s][onset..].iter().all(|&p| p), "permanent symptom gaps");
                        prop_assert_eq!(&traj.presence[s], &traj.observed[s]);
                    }
                }
                SymptomKind::Recurrent => {
                    prop_assert_eq!(&traj.presence[s], &traj.observed[s]);
                }
            }
        }
        let first = (0..traj.horizon_days).find(|&d| traj.observed.iter().any(|s| s[d]));
        prop_assert_eq!(traj.first_observed_day, first);
    }

    #[test]
    fn histories_are_prefix_monotone(
        config in arb_scenario(),
        seed in any::<u64>(),
        cut in 0usize..60,
    ) {
        let traj = simulate_trajectory(&config, 0, &RngStream::new(seed)).unwrap();
        let t2 = cut.min(traj.horizon_days);
        let t1 = t2 / 2;
        let early = history_at(&traj, t1).unwrap();
        let late = history_at(&traj, t2).unwrap();
        for s in 0..config.symptom_count() {
            prop_assert!(early.days_observed[s].iter().all(|d| late.days_observed[s].contains(d)));
            prop_assert!(early.days_observed[s].iter().all(|&d| d < t1));
        }
        if let Some(f) = late.first_observed_day {
            let min = late.days_observed.iter().filter_map(|d| d.first().copied()).min();
            prop_assert_eq!(Some(f), min);
        }
    }

    #[test]
    fn forest_probability_is_bounded_and_tree_order_free(
        rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 20..60),
        label_bits in prop::collection::vec(any::<bool>(), 20..60),
        seed in any::<u64>(),
        probe in prop::collection::vec(-20.0f64..20.0, 3),
    ) {
        let n = rows.len().min(label_bits.len());
        let mut labels: Vec<bool> = label_bits[..n].to_vec();
        labels[0] = true;
        labels[n - 1] = false;
        let data = TrainingSet { features: rows[..n].to_vec(), labels, feature_count: 3 };
        let hyper = Hyperparameters { tree_count: 7, max_depth: 4, min_leaf_size: 2, features_per_split: None };
        let forest = train_forest(&data, &hyper, seed).unwrap();
        let p = predict_proba(&forest, &probe).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let mut reversed = forest.clone();
        reversed.trees.reverse();
        prop_assert_eq!(p.to_bits(), predict_proba(&reversed, &probe).unwrap().to_bits());
    }

    #[test]
    fn sent_cost_is_affine_in_wandering(
        per_day in 0.0f64..100.0,
        specialist in 0.0f64..10_000.0,
        non_specialist in 0.0f64..1_000.0,
        w1 in 0usize..2_000,
        w2 in 0usize..2_000,
        has_rare in any::<bool>(),
    ) {
        let params = CostParams {
            cost_wandering_per_day: per_day,
            cost_specialist: specialist,
            cost_non_specialist: non_specialist,
            mean_wandering_days: 730.0,
            mean_physicians_consulted: 5.0,
        };
        let outcome = |sent: bool, w: usize| PathwayOutcome {
            has_rare_disease: has_rare,
            sent_to_center: sent,
            wandering_days: w,
            decision_day: sent.then_some(w),
            first_observed_day: Some(0),
        };
        let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        prop_assert!(pathway_cost(&outcome(true, lo), &params) <= pathway_cost(&outcome(true, hi), &params));
        if !has_rare {
            prop_assert!(pathway_cost(&outcome(false, lo), &params) <= pathway_cost(&outcome(false, hi), &params));
        } else {
            // missed-rare branch ignores simulated wandering
            prop_assert_eq!(
                pathway_cost(&outcome(false, lo), &params),
                pathway_cost(&outcome(false, hi), &params)
            );
        }
    }
}
