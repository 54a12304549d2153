//! Pipeline stages. Every stage is a pure function of the resolved
//! manifest: it reads its inputs from the run directory, writes its
//! outputs there, and rewrites `manifest.json` so a rerun reproduces the
//! same bytes.

use std::fs;

use pathway_core::learner::{
    build_training_set, load_forest, oob_accuracy, save_forest, train_forest, LearnerError,
};
use pathway_core::policy::{
    curve_to_csv, select_optimal_threshold, sweep_thresholds, DailyPredictions,
};
use pathway_core::report::cost_curve_svg;
use pathway_core::rng::{purpose, RngStream};
use pathway_core::scenario::save_scenario;
use pathway_core::simulator::{
    cohort_from_csv, cohort_to_csv, simulate_cohort, simulate_trajectory, syndrome_of_index,
};

use crate::error::CliError;
use crate::manifest::{
    RunManifest, COHORT_FILE, CURVE_FILE, CURVE_SVG_FILE, MODEL_FILE, SCENARIO_FILE,
    THRESHOLD_FILE, TRAIN_SUMMARY_FILE,
};

pub fn cmd_generate(manifest: &RunManifest) -> Result<(), CliError> {
    manifest.write()?;
    let config = manifest.generate_world()?;
    let path = manifest.out_path(SCENARIO_FILE);
    save_scenario(&config, &path)?;
    println!(
        "generate: wrote {} ({} syndromes, {} symptoms, {} links, horizon {} days)",
        path.display(),
        config.syndrome_count(),
        config.symptom_count(),
        config.links.len(),
        config.horizon_days
    );
    Ok(())
}

pub fn cmd_simulate(manifest: &RunManifest) -> Result<(), CliError> {
    manifest.write()?;
    let config = manifest.scenario()?;
    let counts = manifest.counts(&config);
    let cohort = simulate_cohort(&config, &counts, manifest.master_seed)?;
    let path = manifest.out_path(COHORT_FILE);
    fs::write(&path, cohort_to_csv(&cohort))?;
    println!(
        "simulate: wrote {} ({} trajectories over {} days)",
        path.display(),
        cohort.len(),
        config.horizon_days
    );
    Ok(())
}

pub fn cmd_train(manifest: &RunManifest) -> Result<(), CliError> {
    manifest.write()?;
    let config = manifest.scenario()?;
    let cohort_path = manifest.out_path(COHORT_FILE);
    let text = fs::read_to_string(&cohort_path).map_err(|e| {
        CliError::Io(format!(
            "cannot read {} ({e}); run `pathway simulate` first",
            cohort_path.display()
        ))
    })?;
    let cohort = cohort_from_csv(&text, &config)?;
    let data = build_training_set(&config, &cohort, manifest.snapshot_stride_days);
    let positives = data.labels.iter().filter(|&&l| l).count();
    let negatives = data.len() - positives;

    let forest = train_forest(&data, &manifest.hyper, manifest.master_seed).map_err(|e| match e {
        LearnerError::SingleClass { .. } | LearnerError::EmptyTrainingSet => CliError::Validation(format!(
            "cannot train on this cohort: {e}; the scenario must produce observable symptoms for both classes"
        )),
        other => other.into(),
    })?;
    let oob = oob_accuracy(&forest, &data);

    let model_path = manifest.out_path(MODEL_FILE);
    save_forest(&forest, &model_path)?;

    let mut summary = String::new();
    summary.push_str(&format!("training_rows {}\n", data.len()));
    summary.push_str(&format!("positive_rows {positives}\n"));
    summary.push_str(&format!("negative_rows {negatives}\n"));
    summary.push_str(&format!("feature_count {}\n", data.feature_count));
    summary.push_str(&format!("tree_count {}\n", forest.hyper.tree_count));
    match oob {
        Some(acc) => summary.push_str(&format!("oob_accuracy {acc:.6}\n")),
        None => summary.push_str("oob_accuracy n/a\n"),
    }
    fs::write(manifest.out_path(TRAIN_SUMMARY_FILE), &summary)?;

    println!(
        "train: wrote {} ({} rows: {} rare, {} common; out-of-bag accuracy {})",
        model_path.display(),
        data.len(),
        positives,
        negatives,
        oob.map_or_else(|| "n/a".to_string(), |a| format!("{a:.4}"))
    );
    Ok(())
}

pub fn cmd_sweep(manifest: &RunManifest) -> Result<(), CliError> {
    manifest.write()?;
    let config = manifest.scenario()?;
    let model_path = manifest.out_path(MODEL_FILE);
    if !model_path.is_file() {
        return Err(CliError::Io(format!(
            "cannot read {}; run `pathway train` first",
            model_path.display()
        )));
    }
    let forest = load_forest(&model_path)?;
    let grid = manifest.grid();
    let curve = sweep_thresholds(
        &config,
        &forest,
        &manifest.costs,
        &grid,
        manifest.n_eval,
        manifest.master_seed,
    )?;
    let tau_star = select_optimal_threshold(&curve);
    let best = curve
        .taus
        .iter()
        .position(|&t| t == tau_star)
        .expect("tau from curve");

    fs::write(manifest.out_path(CURVE_FILE), curve_to_csv(&curve))?;
    fs::write(manifest.out_path(CURVE_SVG_FILE), cost_curve_svg(&curve))?;
    fs::write(
        manifest.out_path(THRESHOLD_FILE),
        format!(
            "tau_star {tau_star:.6}\nmean_cost {:.6}\nstd_err {:.6}\n",
            curve.mean_costs[best], curve.std_errs[best]
        ),
    )?;

    println!(
        "sweep: wrote {} ({} thresholds, {} evaluation patients)",
        manifest.out_path(CURVE_FILE).display(),
        curve.len(),
        manifest.n_eval
    );
    println!(
        "optimal threshold {tau_star:.6} with mean cost {:.6} (std err {:.6})",
        curve.mean_costs[best], curve.std_errs[best]
    );
    Ok(())
}

pub fn cmd_trace(manifest: &RunManifest, trajectory_id: usize) -> Result<(), CliError> {
    manifest.write()?;
    let config = manifest.scenario()?;
    let model_path = manifest.out_path(MODEL_FILE);
    if !model_path.is_file() {
        return Err(CliError::Io(format!(
            "cannot read {}; run `pathway train` first",
            model_path.display()
        )));
    }
    let forest: pathway_core::Forest64 = load_forest(&model_path)?;
    let counts = manifest.counts(&config);
    let total: usize = counts.iter().sum();
    let Some(syndrome) = syndrome_of_index(&counts, trajectory_id) else {
        return Err(CliError::Validation(format!(
            "trajectory id {trajectory_id} out of range; the cohort has {total} trajectories"
        )));
    };

    // regenerate exactly the trajectory the cohort stage produced
    let stream = RngStream::new(manifest.master_seed)
        .derive(purpose::COHORT)
        .derive(trajectory_id as u64);
    let trajectory = simulate_trajectory(&config, syndrome, &stream)?;

    let mut csv = String::from("day,observed_symptoms,prediction\n");
    let mut rows = 0usize;
    if let Some(predictions) = DailyPredictions::new(&trajectory, &forest)? {
        for (day, p) in predictions {
            let observed: Vec<String> = (0..config.symptom_count())
                .filter(|&s| trajectory.observed[s][day])
                .map(|s| s.to_string())
                .collect();
            csv.push_str(&format!("{day},{},{p:.6}\n", observed.join(";")));
            rows += 1;
        }
    }
    let path = manifest.out_path(format!("trace_{trajectory_id}.csv").as_str());
    fs::write(&path, &csv)?;
    if rows == 0 {
        println!(
            "trace: trajectory {trajectory_id} (syndrome {syndrome}) never shows an observable symptom; wrote empty {}",
            path.display()
        );
    } else {
        println!(
            "trace: wrote {} ({rows} days, syndrome {syndrome})",
            path.display()
        );
    }
    Ok(())
}

pub fn cmd_all(manifest: &RunManifest) -> Result<(), CliError> {
    if manifest.scenario_path.is_none() {
        cmd_generate(manifest)?;
    }
    cmd_simulate(manifest)?;
    cmd_train(manifest)?;
    cmd_sweep(manifest)?;
    Ok(())
}
