use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hpgcn::data::{generate_synthetic, load_dataset, validate_stats, write_synthetic, DatasetManifest, SyntheticSpec};
use hpgcn::fixtures::{check_model_gradients, fixture_config, hetero_fixture, homo_fixture};
use hpgcn::graph::union_relations;
use hpgcn::model::{predict, HpGcnConfig, HpGcnModel, Mode, PreparedGraph};
use hpgcn::spectral::{
    bandpass_response, dense_eigendecompose_capped, frequency_response, spectral_energy_profile, FilterCoefficients,
};
use hpgcn::tensor::{load_checkpoint, save_checkpoint, GradCheckOptions};
use hpgcn::train::{k_sweep, make_splits, score_rows, train as run_training, TrainConfig};

use crate::svg::line_plot;
use crate::{
    EvaluateArgs, Failure, GradcheckArgs, KsweepArgs, SpectrumArgs, StatsArgs, SynthArgs, TrainArgs,
};

type Outcome = Result<String, Failure>;

fn out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| hpgcn::Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| hpgcn::Error::Io { path, source: e })?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(hpgcn::Error::from)?;
    text.push('\n');
    write(dir, name, text)
}

pub fn synth(a: SynthArgs) -> Outcome {
    let spec = SyntheticSpec {
        n_nodes: a.n,
        n_features: a.features,
        anomaly_fraction: a.anomaly,
        isolated_fraction: a.isolated,
        isolated_anomaly_fraction: a.isolated_anomaly,
        p_in: a.p_in,
        p_out: a.p_out,
        delta: a.delta,
        sigma: a.sigma,
        n_relations: a.relations,
        seed: a.seed,
    };
    let ds = generate_synthetic(&spec)?;
    let manifest = write_synthetic(&ds, &spec, &a.out.out_dir)?;
    Ok(format!(
        "wrote {} ({} nodes, {} anomalies, {} isolated)",
        manifest.display(),
        ds.graph.n_nodes(),
        ds.anomalies.len(),
        ds.isolated.len()
    ))
}

pub fn stats(a: StatsArgs) -> Outcome {
    let loaded = load_dataset(&a.manifest)?;
    let manifest = DatasetManifest::read(&a.manifest)?;
    let conventions = match manifest.effective_expected() {
        Some(expected) => validate_stats(&loaded.stats, &expected)?,
        None => Vec::new(),
    };
    out_dir(&a.out.out_dir)?;
    #[derive(Serialize)]
    struct StatsFile<'a> {
        #[serde(flatten)]
        stats: &'a hpgcn::data::DatasetStats,
        edge_conventions: Vec<hpgcn::data::EdgeConvention>,
    }
    write_json(
        &a.out.out_dir,
        "stats.json",
        &StatsFile {
            stats: &loaded.stats,
            edge_conventions: conventions,
        },
    )?;
    let s = &loaded.stats;
    Ok(format!(
        "{}: nodes={} edges={} features={} isolated={} ratio=1:{}",
        manifest.name,
        s.nodes,
        s.union_edges,
        s.features,
        s.isolated,
        s.neg_per_pos.map_or("-".into(), |r| format!("{r:.1}"))
    ))
}

pub fn spectrum(a: SpectrumArgs) -> Outcome {
    if !(0.0..=2.0).contains(&a.cutoff) {
        return Err(Failure::usage(format!("--cutoff {} is outside [0, 2]", a.cutoff)));
    }
    let g = load_dataset(&a.manifest)?.graph;
    let x: Vec<f64> = if a.signal == "labels" {
        g.labels().iter().map(|l| l.class().unwrap_or(0) as f64).collect()
    } else if let Some(col) = a.signal.strip_prefix("feature:") {
        let j: usize = col
            .parse()
            .map_err(|_| Failure::usage(format!("bad feature column '{col}'")))?;
        if j >= g.n_features() {
            return Err(Failure::usage(format!("feature {j} out of range ({} features)", g.n_features())));
        }
        g.features().col_vec(j)
    } else {
        return Err(Failure::usage(format!("unknown --signal '{}'", a.signal)));
    };
    let basis = dense_eigendecompose_capped(&union_relations(&g), a.cap)?;
    let report = spectral_energy_profile(&basis, &x, a.cutoff)?;
    out_dir(&a.out.out_dir)?;

    let mags = report.magnitudes();
    let mut csv = String::from("lambda,magnitude\n");
    for (l, m) in report.lambdas.iter().zip(&mags) {
        writeln!(csv, "{l},{m}").unwrap();
    }
    write(&a.out.out_dir, "spectrum.csv", csv)?;

    let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 100.0).collect();
    let highpass = frequency_response(&FilterCoefficients::pure_power(a.k)?, &grid);
    let band = bandpass_response(a.band_center, a.band_sigma, &grid);
    let mut csv = String::from("lambda,highpass,bandpass\n");
    for ((l, h), b) in grid.iter().zip(&highpass).zip(&band) {
        writeln!(csv, "{l},{h},{b}").unwrap();
    }
    write(&a.out.out_dir, "response.csv", csv)?;

    let summary = format!("energy_above_{:?}={}", a.cutoff, report.energy_above(a.cutoff));
    write(&a.out.out_dir, "spectrum.txt", format!("{summary}\n"))?;
    if a.svg {
        let points: Vec<(f64, f64)> = report.lambdas.iter().copied().zip(mags).collect();
        write(&a.out.out_dir, "spectrum.svg", line_plot(&points, "lambda", "|x̂|"))?;
    }
    Ok(if report.zero_signal {
        format!("{summary} (zero signal)")
    } else {
        summary
    })
}

/// Everything `evaluate` needs to rebuild a trained model.
#[derive(Debug, Serialize, Deserialize)]
struct RunConfig {
    model: HpGcnConfig,
    train: TrainConfig,
    n_features: usize,
    n_relations: usize,
}

#[derive(Debug, Serialize)]
struct TrainSummary {
    epochs: usize,
    lr: f64,
    h: usize,
    #[serde(rename = "K")]
    k: usize,
    mode: Mode,
    seed: u64,
    n_train: usize,
    n_val: usize,
    n_test: usize,
    best_epoch: usize,
    test_f1_macro: f64,
    test_auc: f64,
}

pub fn train(a: TrainArgs) -> Outcome {
    let g = load_dataset(&a.manifest)?.graph;
    let model_config = a.model.model_config(a.k);
    let train_config = a.model.train_config();
    let outcome = run_training(&g, &model_config, &train_config)?;
    let dir = &a.out.out_dir;
    out_dir(dir)?;

    let report = &outcome.report;
    write(dir, "report.csv", report.to_csv())?;
    save_checkpoint(&dir.join("model.ckpt"), &outcome.model.params().values())?;
    write_json(
        dir,
        "config.json",
        &RunConfig {
            model: model_config.clone(),
            train: train_config.clone(),
            n_features: g.n_features(),
            n_relations: g.relations().len(),
        },
    )?;
    write_json(
        dir,
        "summary.json",
        &TrainSummary {
            epochs: train_config.epochs,
            lr: train_config.lr,
            h: model_config.hidden_dim,
            k: model_config.k,
            mode: model_config.mode,
            seed: model_config.seed,
            n_train: outcome.splits.train.len(),
            n_val: outcome.splits.val.len(),
            n_test: outcome.splits.test.len(),
            best_epoch: report.best_epoch,
            test_f1_macro: report.test_f1_macro,
            test_auc: report.test_auc,
        },
    )?;
    // Timing varies between runs, so it stays out of the files above.
    write_json(
        dir,
        "timing.json",
        &serde_json::json!({
            "wall_clock_sec": report.wall_clock_sec,
            "epoch_seconds": report.epoch_seconds,
        }),
    )?;
    Ok(format!(
        "best_epoch={} test_f1_macro={:.4} test_auc={:.4} wall_clock_sec={:.2}",
        report.best_epoch, report.test_f1_macro, report.test_auc, report.wall_clock_sec
    ))
}

pub fn evaluate(a: EvaluateArgs) -> Outcome {
    let config_path = a.model_dir.join("config.json");
    let text = fs::read_to_string(&config_path).map_err(|e| hpgcn::Error::Io {
        path: config_path.clone(),
        source: e,
    })?;
    let run: RunConfig = serde_json::from_str(&text).map_err(hpgcn::Error::from)?;
    let g = load_dataset(&a.manifest)?.graph;
    if g.n_features() != run.n_features || g.relations().len() != run.n_relations {
        return Err(hpgcn::Error::Validation(format!(
            "model expects {} features and {} relations, dataset has {} and {}",
            run.n_features,
            run.n_relations,
            g.n_features(),
            g.relations().len()
        ))
        .into());
    }
    let mut model = HpGcnModel::for_graph(run.model.clone(), &g)?;
    model
        .params_mut()
        .load_values(&load_checkpoint(&a.model_dir.join("model.ckpt"))?)?;
    let prep = PreparedGraph::new(&g, &run.model)?;
    let logits = model.logits(&prep)?;

    let splits = make_splits(g.labels(), &run.train.split)?;
    let (test_f1, test_auc) = score_rows(&logits, g.labels(), &splits.test)?;
    let labeled: Vec<usize> = (0..g.n_nodes()).filter(|&i| g.labels()[i].class().is_some()).collect();
    let (all_f1, all_auc) = score_rows(&logits, g.labels(), &labeled)?;

    let dir = &a.out.out_dir;
    out_dir(dir)?;
    write_json(
        dir,
        "eval.json",
        &serde_json::json!({
            "n_test": splits.test.len(),
            "test_f1_macro": test_f1,
            "test_auc": test_auc,
            "n_labeled": labeled.len(),
            "labeled_f1_macro": all_f1,
            "labeled_auc": all_auc,
        }),
    )?;
    let mut csv = String::from("node,label,anomaly_score\n");
    for (i, p) in predict(&logits).iter().enumerate() {
        writeln!(csv, "{i},{},{}", p.label, p.anomaly_score).unwrap();
    }
    write(dir, "predictions.csv", csv)?;
    Ok(format!("test_f1_macro={test_f1:.4} test_auc={test_auc:.4}"))
}

pub fn gradcheck(a: GradcheckArgs) -> Outcome {
    let which: &[Mode] = match a.fixture.as_str() {
        "homo" => &[Mode::Homo],
        "hetero" => &[Mode::Hetero],
        "all" => &[Mode::Homo, Mode::Hetero],
        other => return Err(Failure::usage(format!("unknown --fixture '{other}'"))),
    };
    let opts = GradCheckOptions {
        h: a.h,
        coords_per_param: a.coords,
        seed: a.seed,
        ..GradCheckOptions::default()
    };
    let mut results = Vec::new();
    let mut worst: f64 = 0.0;
    for &mode in which {
        let g = match mode {
            Mode::Homo => homo_fixture(),
            Mode::Hetero => hetero_fixture(),
        };
        let r = check_model_gradients(&g, &fixture_config(mode), opts)?;
        worst = worst.max(r.max_rel_error);
        results.push(serde_json::json!({
            "fixture": mode.to_string(),
            "nodes": g.n_nodes(),
            "relations": g.relations().len(),
            "checked": r.checked,
            "max_rel_error": r.max_rel_error,
            "worst_parameter": r.worst.map(|(name, i)| format!("{name}[{i}]")),
        }));
    }
    out_dir(&a.out.out_dir)?;
    write_json(&a.out.out_dir, "gradcheck.json", &results)?;
    let summary = format!("max_rel_error={worst:e} tolerance={:e}", a.tolerance);
    if worst < a.tolerance {
        Ok(summary)
    } else {
        Err(Failure::check(format!("gradient check failed: {summary}")))
    }
}

pub fn ksweep(a: KsweepArgs) -> Outcome {
    if a.ks.is_empty() {
        return Err(Failure::usage("--k needs at least one value"));
    }
    let g = load_dataset(&a.manifest)?.graph;
    let rows = k_sweep(&g, &a.model.model_config(1), &a.model.train_config(), &a.ks, a.reps)?;
    out_dir(&a.out.out_dir)?;
    let mut csv = String::from("K,f1_macro,auc,wall_clock\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{}", r.k, r.f1_macro, r.auc, r.wall_clock_sec).unwrap();
    }
    write(&a.out.out_dir, "ksweep.csv", csv)?;
    Ok(rows
        .iter()
        .map(|r| format!("K={}:auc={:.4},t={:.2}s", r.k, r.auc, r.wall_clock_sec))
        .collect::<Vec<_>>()
        .join(" "))
}
