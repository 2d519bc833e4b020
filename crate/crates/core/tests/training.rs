//! Training loop, mode equivalence and checkpoint behaviour on small graphs.

use hpgcn::data::{generate_synthetic, SyntheticSpec};
use hpgcn::fixtures::{duplicated_relations, tie_hetero_to_homo};
use hpgcn::model::{HpGcnConfig, HpGcnModel, Mode, PreparedGraph};
use hpgcn::tensor::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint};
use hpgcn::train::{k_sweep, make_splits, train, SplitSpec, TrainConfig};

fn small_spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        n_nodes: 300,
        n_features: 8,
        anomaly_fraction: 0.1,
        p_in: 0.04,
        p_out: 0.008,
        seed,
        ..SyntheticSpec::default()
    }
}

fn quick(epochs: usize, seed: u64) -> (HpGcnConfig, TrainConfig) {
    let model = HpGcnConfig {
        hidden_dim: 16,
        seed,
        ..HpGcnConfig::default()
    };
    let train = TrainConfig {
        epochs,
        lr: 0.01,
        split: SplitSpec {
            seed,
            ..SplitSpec::default()
        },
    };
    (model, train)
}

#[test]
fn identical_seeds_give_identical_runs() {
    let g = generate_synthetic(&small_spec(1)).unwrap().graph;
    let (mc, tc) = quick(15, 9);
    let a = train(&g, &mc, &tc).unwrap();
    let b = train(&g, &mc, &tc).unwrap();
    assert_eq!(a.report.to_csv(), b.report.to_csv());
    assert_eq!(a.report.best_epoch, b.report.best_epoch);
    assert_eq!(a.report.test_auc.to_bits(), b.report.test_auc.to_bits());
    assert_eq!(encode_checkpoint(&a.model.params().values()), encode_checkpoint(&b.model.params().values()));
    assert_eq!(a.splits, b.splits);
}

#[test]
fn different_seed_changes_the_run() {
    let g = generate_synthetic(&small_spec(1)).unwrap().graph;
    let (mc, tc) = quick(3, 9);
    let (mc2, tc2) = quick(3, 10);
    let a = train(&g, &mc, &tc).unwrap();
    let b = train(&g, &mc2, &tc2).unwrap();
    assert_ne!(encode_checkpoint(&a.model.params().values()), encode_checkpoint(&b.model.params().values()));
}

#[test]
fn best_epoch_has_the_highest_validation_f1() {
    let g = generate_synthetic(&small_spec(2)).unwrap().graph;
    let (mc, tc) = quick(20, 2);
    let out = train(&g, &mc, &tc).unwrap();
    let r = &out.report;
    assert_eq!(r.epochs.len(), 20);
    let best = r.epochs.iter().map(|e| e.val_f1).fold(f64::NEG_INFINITY, f64::max);
    let first_best = r.epochs.iter().find(|e| e.val_f1 == best).unwrap().epoch;
    assert_eq!(r.best_epoch, first_best);
    assert!((0.0..=1.0).contains(&r.test_auc) && (0.0..=1.0).contains(&r.test_f1_macro));
}

#[test]
fn homo_and_hetero_logits_match_bitwise_on_duplicated_relations() {
    let base = generate_synthetic(&small_spec(3)).unwrap().graph;
    for copies in [2, 3] {
        let g = duplicated_relations(&base, copies).unwrap();
        let homo_cfg = HpGcnConfig {
            hidden_dim: 8,
            seed: 4,
            ..HpGcnConfig::default()
        };
        let hetero_cfg = HpGcnConfig {
            mode: Mode::Hetero,
            ..homo_cfg.clone()
        };
        let homo = HpGcnModel::for_graph(homo_cfg.clone(), &g).unwrap();
        let mut hetero = HpGcnModel::for_graph(hetero_cfg.clone(), &g).unwrap();
        tie_hetero_to_homo(&homo, &mut hetero).unwrap();

        let a = homo.logits(&PreparedGraph::new(&g, &homo_cfg).unwrap()).unwrap();
        let b = hetero.logits(&PreparedGraph::new(&g, &hetero_cfg).unwrap()).unwrap();
        let bits = |m: &hpgcn::tensor::DenseMatrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b), "copies = {copies}");
    }
}

#[test]
fn checkpoint_roundtrip_restores_predictions() {
    let g = generate_synthetic(&small_spec(5)).unwrap().graph;
    let (mc, tc) = quick(5, 5);
    let out = train(&g, &mc, &tc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.ckpt");
    save_checkpoint(&path, &out.model.params().values()).unwrap();

    let mut fresh = HpGcnModel::for_graph(HpGcnConfig { seed: 99, ..mc.clone() }, &g).unwrap();
    fresh.params_mut().load_values(&load_checkpoint(&path).unwrap()).unwrap();
    let prep = PreparedGraph::new(&g, &mc).unwrap();
    assert_eq!(fresh.logits(&prep).unwrap(), out.model.logits(&prep).unwrap());

    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 3);
    assert!(decode_checkpoint(&bytes).is_err());
    // A checkpoint from a wider model does not load.
    let wide = HpGcnModel::for_graph(HpGcnConfig { hidden_dim: 17, ..mc }, &g).unwrap();
    assert!(fresh.params_mut().load_values(&wide.params().values()).is_err());
}

#[test]
fn splits_are_stratified_and_disjoint() {
    let g = generate_synthetic(&small_spec(6)).unwrap().graph;
    let s = make_splits(g.labels(), &SplitSpec::default()).unwrap();
    let mut all: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
    all.sort_unstable();
    all.dedup();
    assert_eq!(all.len(), s.train.len() + s.val.len() + s.test.len());
    assert_eq!(all.len(), 300);
    let pos = |rows: &[usize]| rows.iter().filter(|&&i| g.labels()[i].class() == Some(1)).count();
    // 30 anomalies: round(0.4 · 30) = 12 in train.
    assert_eq!(pos(&s.train), 12);
    assert_eq!(s.train.len(), 120);
}

#[test]
fn k_sweep_reports_each_k_in_order() {
    let g = generate_synthetic(&small_spec(7)).unwrap().graph;
    let (mc, tc) = quick(2, 1);
    let rows = k_sweep(&g, &mc, &tc, &[1, 3, 2], 2).unwrap();
    assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), [1, 3, 2]);
    assert!(rows.iter().all(|r| r.wall_clock_sec > 0.0));
    assert!(k_sweep(&g, &mc, &tc, &[1], 0).is_err());
}

#[test]
fn separable_features_on_edgeless_graph_reach_perfect_f1() {
    use hpgcn::graph::{AttributedGraph, Label, Relation, SparseAdjacency};
    use hpgcn::tensor::DenseMatrix;
    use rand::{Rng, SeedableRng};

    // Class decides the sign of the first feature with a margin of 1; the
    // second feature is noise. Every node is isolated, so only the MLP branch runs.
    let n = 200;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let labels: Vec<Label> = (0..n).map(|i| if i % 10 == 0 { Label::Anomaly } else { Label::Normal }).collect();
    let data = labels
        .iter()
        .flat_map(|l| {
            let sign = if *l == Label::Anomaly { 1.0 } else { -1.0 };
            [sign * rng.random_range(1.0..2.0), rng.random_range(-1.0..1.0)]
        })
        .collect();
    let g = AttributedGraph::new(
        vec![Relation {
            name: "none".into(),
            adjacency: SparseAdjacency::empty(n),
        }],
        DenseMatrix::from_vec(n, 2, data).unwrap(),
        labels,
    )
    .unwrap();
    let (mc, tc) = quick(100, 0);
    let out = train(&g, &mc, &tc).unwrap();
    assert_eq!(out.report.test_f1_macro, 1.0, "{:?}", out.report.best_epoch);
    assert_eq!(out.report.test_auc, 1.0);
}
