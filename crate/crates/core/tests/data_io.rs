//! Manifest ingestion, statistics and the synthetic generator's files.

use std::path::PathBuf;

use hpgcn::data::manifest::encode_features_binary;
use hpgcn::data::{
    generate_synthetic, load_dataset, validate_stats, write_synthetic, Benchmark, DatasetManifest, FeatureFile, FeatureFormat,
    SyntheticSpec,
};
use hpgcn::graph::{connected_components, partition_nodes, union_relations, Label};
use hpgcn::Error;
use proptest::prelude::*;

fn toy_manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy/manifest.json")
}

#[test]
fn toy_manifest_golden() {
    let ds = load_dataset(&toy_manifest()).unwrap();
    let g = &ds.graph;
    assert_eq!(g.features().as_slice(), &[0.5, -1.0, 2.0, 0.25, 0.0, 3.0]);
    assert_eq!(g.labels(), &[Label::Anomaly, Label::Normal, Label::Unknown]);

    let names: Vec<&str> = g.relations().iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["a", "b"]);
    assert_eq!(g.relations()[0].adjacency.weight(0, 1), Some(1.0));
    // Both directions of the same pair accumulate into one symmetric edge.
    assert_eq!(g.relations()[1].adjacency.weight(0, 1), Some(3.0));
    assert_eq!(g.relations()[1].adjacency.weight(1, 0), Some(3.0));
    assert_eq!(g.relations()[1].adjacency.n_edges(), 1);

    let s = &ds.stats;
    assert_eq!((s.nodes, s.union_edges, s.features, s.isolated), (3, 1, 2, 1));
    assert_eq!((s.positives, s.negatives, s.unlabeled), (1, 1, 1));
    assert_eq!(s.neg_per_pos, Some(1.0));
}

#[test]
fn mismatched_expected_stats_fail_with_both_numbers() {
    let mut m = DatasetManifest::read(&toy_manifest()).unwrap();
    m.expected_stats.as_mut().unwrap().isolated = Some(2);
    let base = toy_manifest().parent().unwrap().to_path_buf();
    let err = hpgcn::data::load_manifest(&m, &base).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Validation(_)), "{err:?}");
    assert!(msg.contains('1') && msg.contains('2'), "{msg}");
}

#[test]
fn binary_features_load_like_csv() {
    let src = toy_manifest();
    let base = src.parent().unwrap();
    let dir = tempfile::tempdir().unwrap();
    for f in ["labels.csv", "edges_a.tsv", "edges_b.tsv"] {
        std::fs::copy(base.join(f), dir.path().join(f)).unwrap();
    }
    let csv = load_dataset(&src).unwrap();
    std::fs::write(dir.path().join("features.bin"), encode_features_binary(csv.graph.features())).unwrap();

    let mut m = DatasetManifest::read(&src).unwrap();
    m.features = FeatureFile {
        path: "features.bin".into(),
        format: FeatureFormat::F64Binary,
    };
    let path = dir.path().join("manifest.json");
    m.write(&path).unwrap();
    assert_eq!(load_dataset(&path).unwrap().graph, csv.graph);
}

#[test]
fn malformed_edge_line_is_reported() {
    let src = toy_manifest();
    let dir = tempfile::tempdir().unwrap();
    for f in ["features.csv", "labels.csv", "edges_a.tsv", "manifest.json"] {
        std::fs::copy(src.parent().unwrap().join(f), dir.path().join(f)).unwrap();
    }
    std::fs::write(dir.path().join("edges_b.tsv"), "0 1\n1 x\n").unwrap();
    let err = load_dataset(&dir.path().join("manifest.json")).unwrap_err();
    assert!(matches!(err, Error::Parse { .. }), "{err:?}");
    assert!(err.to_string().contains("edges_b.tsv"), "{err}");
}

#[test]
fn synthetic_roundtrip_through_files() {
    let spec = SyntheticSpec {
        n_nodes: 300,
        n_relations: 2,
        p_in: 0.05,
        p_out: 0.01,
        seed: 4,
        ..SyntheticSpec::default()
    };
    let ds = generate_synthetic(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_synthetic(&ds, &spec, dir.path()).unwrap();
    let loaded = load_dataset(&manifest).unwrap();
    assert_eq!(loaded.graph.labels(), ds.graph.labels());
    assert_eq!(loaded.graph.relations(), ds.graph.relations());
    // Features pass through decimal text, which is exact for Rust's shortest round-trip format.
    assert_eq!(loaded.graph.features(), ds.graph.features());
    assert_eq!(loaded.stats.isolated as usize, ds.isolated.len());
}

#[test]
fn published_constants() {
    let y = Benchmark::YelpChi.expected();
    assert_eq!((y.nodes, y.edges, y.features, y.isolated), (Some(45_954), Some(3_846_979), Some(32), Some(22_123)));
    let a = Benchmark::Amazon.expected();
    assert_eq!((a.nodes, a.edges, a.features), (Some(11_944), Some(4_398_392), Some(25)));
    assert_eq!(a.relations.len(), 3);
    // A YelpChi-sized count check fails loudly against the wrong benchmark.
    let mut stats = load_dataset(&toy_manifest()).unwrap().stats;
    stats.nodes = 45_954;
    assert!(validate_stats(&stats, &a).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn synthetic_counts_hold(
        n in 20usize..200,
        anomaly in 0.0f64..0.3,
        isolated in 0.0f64..0.5,
        iaf in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let spec = SyntheticSpec {
            n_nodes: n,
            n_features: 2,
            anomaly_fraction: anomaly,
            isolated_fraction: isolated,
            isolated_anomaly_fraction: iaf,
            p_in: 0.2,
            p_out: 0.05,
            seed,
            ..SyntheticSpec::default()
        };
        let Ok(counts) = spec.counts() else { return Ok(()) };
        // Tiny connected sets can stay edgeless through every redraw; that is a
        // reported configuration error, never a silently isolated node.
        let ds = match generate_synthetic(&spec) {
            Ok(ds) => ds,
            Err(e) => {
                prop_assert!(matches!(e, Error::InvalidConfig(_)), "{e:?}");
                return Ok(());
            }
        };
        prop_assert_eq!(ds.anomalies.len(), counts.anomalies);
        let labelled_anomalies = ds.graph.labels().iter().filter(|l| **l == Label::Anomaly).count();
        prop_assert_eq!(labelled_anomalies, counts.anomalies);

        let part = partition_nodes(&connected_components(&union_relations(&ds.graph)), 1);
        prop_assert_eq!(part.isolated_nodes(), ds.isolated.as_slice());
        let iso_anom = ds.anomalies.iter().filter(|a| ds.isolated.binary_search(a).is_ok()).count();
        prop_assert_eq!(ds.isolated.len(), counts.isolated);
        prop_assert_eq!(iso_anom, counts.isolated_anomalies);
    }
}
