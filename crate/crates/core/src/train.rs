//! Stratified splits and the full-batch training loop with best-validation
//! model selection.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, Label};
use crate::metrics::{auc_roc, f1_macro};
use crate::model::{class_weights, predict, HpGcnConfig, HpGcnModel, PreparedGraph};
use crate::tensor::{Adam, DenseMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    /// Fraction of labeled nodes used for training; the rest is split 1:2
    /// into validation and test.
    pub train_ratio: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_ratio: 0.4,
            seed: 0,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Cuts a shuffled pool into train / val / test counts.
fn cut(pool: &[usize], train_ratio: f64) -> (usize, usize) {
    let n_train = (train_ratio * pool.len() as f64).round() as usize;
    let rest = pool.len() - n_train.min(pool.len());
    let n_val = (rest as f64 / 3.0).round() as usize;
    (n_train.min(pool.len()), n_val)
}

/// Splits labeled nodes into train/val/test. Unknown-label nodes are never
/// included. Each returned list is sorted.
pub fn make_splits(labels: &[Label], spec: &SplitSpec) -> Result<Splits> {
    if !(spec.train_ratio > 0.0 && spec.train_ratio < 1.0) {
        return Err(Error::InvalidSplit(format!(
            "train_ratio {} must lie strictly between 0 and 1",
            spec.train_ratio
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pools: Vec<Vec<usize>> = if spec.stratified {
        [Label::Normal, Label::Anomaly]
            .iter()
            .map(|&c| (0..labels.len()).filter(|&i| labels[i] == c).collect())
            .collect()
    } else {
        vec![(0..labels.len()).filter(|&i| labels[i] != Label::Unknown).collect()]
    };
    let mut splits = Splits {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for mut pool in pools {
        pool.shuffle(&mut rng);
        let (n_train, n_val) = cut(&pool, spec.train_ratio);
        splits.train.extend_from_slice(&pool[..n_train]);
        splits.val.extend_from_slice(&pool[n_train..n_train + n_val]);
        splits.test.extend_from_slice(&pool[n_train + n_val..]);
    }
    for (name, set) in [("train", &mut splits.train), ("val", &mut splits.val), ("test", &mut splits.test)] {
        set.sort_unstable();
        for class in [Label::Normal, Label::Anomaly] {
            if !set.iter().any(|&i| labels[i] == class) {
                return Err(Error::InvalidSplit(format!(
                    "{name} split has no {class:?} nodes at train_ratio {}",
                    spec.train_ratio
                )));
            }
        }
    }
    Ok(splits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub split: SplitSpec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            lr: 0.01,
            split: SplitSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub val_f1: f64,
    pub val_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    /// Epoch with the highest validation F1-macro, earliest on ties.
    pub best_epoch: usize,
    pub test_f1_macro: f64,
    pub test_auc: f64,
    pub epoch_seconds: Vec<f64>,
    pub wall_clock_sec: f64,
}

impl TrainReport {
    /// `epoch,loss,val_f1,val_auc` rows. Timing is kept out so the file is
    /// reproducible byte for byte.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,loss,val_f1,val_auc\n");
        for e in &self.epochs {
            s.push_str(&format!("{},{},{},{}\n", e.epoch, e.loss, e.val_f1, e.val_auc));
        }
        s
    }
}

pub struct TrainOutcome {
    pub report: TrainReport,
    /// Model holding the best-validation parameters.
    pub model: HpGcnModel,
    pub splits: Splits,
}

fn targets(labels: &[Label], rows: &[usize]) -> Vec<usize> {
    rows.iter()
        .map(|&i| labels[i].class().expect("split rows are labeled"))
        .collect()
}

/// Epoch, validation F1 and parameter values of the best epoch so far.
type BestSnapshot = (usize, f64, Vec<(String, DenseMatrix)>);

/// `(F1-macro, AUC)` of `logits` restricted to `rows`.
pub fn score_rows(logits: &DenseMatrix, labels: &[Label], rows: &[usize]) -> Result<(f64, f64)> {
    let preds = predict(&logits.select_rows(rows));
    let y = targets(labels, rows);
    let y_hat: Vec<usize> = preds.iter().map(|p| p.label).collect();
    let scores: Vec<f64> = preds.iter().map(|p| p.anomaly_score).collect();
    Ok((f1_macro(&y, &y_hat)?, auc_roc(&y, &scores)?))
}

/// Trains from scratch and returns the best-validation model with its
/// test metrics.
pub fn train(g: &AttributedGraph, model_config: &HpGcnConfig, config: &TrainConfig) -> Result<TrainOutcome> {
    let splits = make_splits(g.labels(), &config.split)?;
    let prep = PreparedGraph::new(g, model_config)?;
    let model = HpGcnModel::for_graph(model_config.clone(), g)?;
    train_prepared(g, &prep, model, splits, config)
}

/// Training loop over a prepared graph and explicit splits.
pub fn train_prepared(
    g: &AttributedGraph,
    prep: &PreparedGraph,
    mut model: HpGcnModel,
    splits: Splits,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    let labels = g.labels();
    let train_y = targets(labels, &splits.train);
    let weights = if model.config().weighted_loss {
        class_weights(&train_y)
    } else {
        [1.0, 1.0]
    };
    let adam = Adam::new(config.lr);
    let start = Instant::now();

    let mut epochs = Vec::with_capacity(config.epochs);
    let mut epoch_seconds = Vec::with_capacity(config.epochs);
    let mut best: Option<BestSnapshot> = None;
    for epoch in 0..config.epochs {
        let t0 = Instant::now();
        let loss = model.loss_and_grad(prep, &splits.train, &train_y, weights)?;
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch, loss });
        }
        adam.step(model.params_mut());

        let logits = model.logits(prep)?;
        if !logits.is_finite() {
            return Err(Error::Diverged { epoch, loss: f64::NAN });
        }
        let (val_f1, val_auc) = score_rows(&logits, labels, &splits.val)?;
        if best.as_ref().is_none_or(|(_, f, _)| val_f1 > *f) {
            best = Some((epoch, val_f1, model.params().values()));
        }
        epochs.push(EpochRecord {
            epoch,
            loss,
            val_f1,
            val_auc,
        });
        epoch_seconds.push(t0.elapsed().as_secs_f64());
    }

    let best_epoch = match best {
        Some((epoch, _, values)) => {
            model.params_mut().load_values(&values)?;
            epoch
        }
        None => 0,
    };
    let logits = model.logits(prep)?;
    let (test_f1_macro, test_auc) = score_rows(&logits, labels, &splits.test)?;
    Ok(TrainOutcome {
        report: TrainReport {
            epochs,
            best_epoch,
            test_f1_macro,
            test_auc,
            epoch_seconds,
            wall_clock_sec: start.elapsed().as_secs_f64(),
        },
        model,
        splits,
    })
}

/// One row of a K sweep: test metrics of the first repetition and the
/// median wall-clock over all repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweepRow {
    pub k: usize,
    pub f1_macro: f64,
    pub auc: f64,
    pub wall_clock_sec: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Trains once per `k` and repetition with everything else fixed. Rows come
/// back in the order of `ks`. Repetitions run round-robin over `ks` so that
/// slow drift in machine speed affects every `k` alike; they reuse the same
/// seeds, so only the timing varies between them.
pub fn k_sweep(
    g: &AttributedGraph,
    model_config: &HpGcnConfig,
    config: &TrainConfig,
    ks: &[usize],
    reps: usize,
) -> Result<Vec<KSweepRow>> {
    if reps == 0 {
        return Err(Error::InvalidConfig("k sweep needs at least one repetition".into()));
    }
    let splits = make_splits(g.labels(), &config.split)?;
    let configs: Vec<HpGcnConfig> = ks.iter().map(|&k| HpGcnConfig { k, ..model_config.clone() }).collect();
    let preps = configs
        .iter()
        .map(|mc| PreparedGraph::new(g, mc))
        .collect::<Result<Vec<_>>>()?;
    let mut times = vec![Vec::with_capacity(reps); ks.len()];
    let mut metrics = vec![(0.0, 0.0); ks.len()];
    for rep in 0..reps {
        for (i, (mc, prep)) in configs.iter().zip(&preps).enumerate() {
            let model = HpGcnModel::for_graph(mc.clone(), g)?;
            let out = train_prepared(g, prep, model, splits.clone(), config)?;
            times[i].push(out.report.wall_clock_sec);
            if rep == 0 {
                metrics[i] = (out.report.test_f1_macro, out.report.test_auc);
            }
        }
    }
    Ok(ks
        .iter()
        .zip(times)
        .zip(metrics)
        .map(|((&k, t), (f1_macro, auc))| KSweepRow {
            k,
            f1_macro,
            auc,
            wall_clock_sec: median(t),
        })
        .collect())
}
