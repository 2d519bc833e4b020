//! Planted-anomaly graph generator.
//!
//! Nodes are split into an isolated set (no edges in any relation) and a
//! connected set. Within the connected set every relation is drawn
//! independently as a two-block random graph: same-class pairs link with
//! probability `p_in`, cross-class pairs with `p_out`. Features are Gaussian
//! with mean 0 for normal nodes and `delta` for anomalies.
//!
//! Counts are rounded down: `floor(isolated_fraction·n)` isolated nodes,
//! `floor(anomaly_fraction·n)` anomalies, and
//! `floor(isolated_anomaly_fraction·anomalies)` of those placed among the
//! isolated nodes. The remaining anomalies go to the connected side.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::benchmarks::{ExpectedStats, RelationStat};
use crate::data::manifest::{DatasetManifest, FeatureFile, FeatureFormat, RelationFile};
use crate::data::stats::dataset_stats;
use crate::error::{Error, Result};
use crate::graph::{build_adjacency, AttributedGraph, Label, Relation};
use crate::tensor::DenseMatrix;

/// Redraws allowed for a connected node that came out with no edges.
pub const MAX_REDRAWS: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n_nodes: usize,
    pub n_features: usize,
    pub anomaly_fraction: f64,
    pub isolated_fraction: f64,
    /// Share of anomalies placed among the isolated nodes.
    pub isolated_anomaly_fraction: f64,
    pub p_in: f64,
    pub p_out: f64,
    /// Mean offset of anomaly features in every dimension.
    pub delta: f64,
    /// Feature noise standard deviation.
    pub sigma: f64,
    pub n_relations: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_nodes: 2000,
            n_features: 16,
            anomaly_fraction: 0.05,
            isolated_fraction: 0.3,
            isolated_anomaly_fraction: 0.3,
            p_in: 0.01,
            p_out: 0.002,
            delta: 1.5,
            sigma: 1.0,
            n_relations: 1,
            seed: 0,
        }
    }
}

/// Node counts implied by a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticCounts {
    pub isolated: usize,
    pub connected: usize,
    pub anomalies: usize,
    pub isolated_anomalies: usize,
    pub connected_anomalies: usize,
}

impl SyntheticSpec {
    pub fn counts(&self) -> Result<SyntheticCounts> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        for (name, v) in [
            ("anomaly_fraction", self.anomaly_fraction),
            ("isolated_fraction", self.isolated_fraction),
            ("isolated_anomaly_fraction", self.isolated_anomaly_fraction),
            ("p_in", self.p_in),
            ("p_out", self.p_out),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        if self.p_in <= self.p_out {
            return bad(format!("p_in ({}) must exceed p_out ({})", self.p_in, self.p_out));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite() && self.delta.is_finite()) {
            return bad(format!("sigma ({}) and delta ({}) must be finite, sigma non-negative", self.sigma, self.delta));
        }
        if self.n_nodes == 0 || self.n_features == 0 || self.n_relations == 0 {
            return bad("n_nodes, n_features and n_relations must be positive".into());
        }
        let n = self.n_nodes as f64;
        let isolated = (self.isolated_fraction * n).floor() as usize;
        let anomalies = (self.anomaly_fraction * n).floor() as usize;
        let isolated_anomalies = (self.isolated_anomaly_fraction * anomalies as f64).floor() as usize;
        let c = SyntheticCounts {
            isolated,
            connected: self.n_nodes - isolated,
            anomalies,
            isolated_anomalies,
            connected_anomalies: anomalies - isolated_anomalies,
        };
        if c.isolated_anomalies > c.isolated {
            return bad(format!(
                "{} isolated anomalies requested but only {} isolated nodes",
                c.isolated_anomalies, c.isolated
            ));
        }
        if c.connected_anomalies > c.connected {
            return bad(format!(
                "{} connected anomalies requested but only {} connected nodes",
                c.connected_anomalies, c.connected
            ));
        }
        if c.connected == 1 {
            return bad("a single connected node cannot have an edge".into());
        }
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub graph: AttributedGraph,
    /// Sorted ids of nodes with no edges.
    pub isolated: Vec<usize>,
    /// Sorted ids of anomalies.
    pub anomalies: Vec<usize>,
}

// Independent ChaCha streams keep each stage's draws unaffected by the others.
const STREAM_ROLES: u64 = 0;
const STREAM_FEATURES: u64 = 1;
const STREAM_EDGES: u64 = 2;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Draws one Bernoulli trial per pair `(u, v)` with `v` from `pool`.
fn draw_row(
    rng: &mut ChaCha8Rng,
    spec: &SyntheticSpec,
    anomalous: &[bool],
    u: usize,
    pool: impl Iterator<Item = usize>,
    out: &mut Vec<(usize, usize, f64)>,
) {
    for v in pool {
        let p = if anomalous[u] == anomalous[v] { spec.p_in } else { spec.p_out };
        if rng.random_bool(p) {
            out.push((u, v, 1.0));
        }
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    let c = spec.counts()?;
    let n = spec.n_nodes;

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(spec.seed, STREAM_ROLES));
    let (iso, conn) = order.split_at(c.isolated);
    let mut anomalous = vec![false; n];
    for &v in iso[..c.isolated_anomalies].iter().chain(&conn[..c.connected_anomalies]) {
        anomalous[v] = true;
    }
    let mut isolated = iso.to_vec();
    isolated.sort_unstable();
    let mut connected = conn.to_vec();
    connected.sort_unstable();

    let mut edge_lists: Vec<Vec<(usize, usize, f64)>> = (0..spec.n_relations)
        .map(|r| {
            let mut rng = rng(spec.seed, STREAM_EDGES + r as u64);
            let mut edges = Vec::new();
            for (i, &u) in connected.iter().enumerate() {
                draw_row(&mut rng, spec, &anomalous, u, connected[i + 1..].iter().copied(), &mut edges);
            }
            edges
        })
        .collect();

    // Redraw whole rows of connected nodes that ended up with no edge in any
    // relation. Such a node has no pairs yet, so redrawing adds no duplicates.
    let mut degree = vec![0usize; n];
    for edges in &edge_lists {
        for &(u, v, _) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let mut redraw_rng = rng(spec.seed, STREAM_EDGES + spec.n_relations as u64);
    for &u in &connected {
        let mut attempts = 0;
        while degree[u] == 0 {
            if attempts == MAX_REDRAWS {
                return Err(Error::InvalidConfig(format!(
                    "node {u} stayed edgeless after {MAX_REDRAWS} redraws; raise p_in or p_out"
                )));
            }
            attempts += 1;
            for edges in edge_lists.iter_mut() {
                let start = edges.len();
                draw_row(&mut redraw_rng, spec, &anomalous, u, connected.iter().copied().filter(|&v| v != u), edges);
                for &(_, v, _) in &edges[start..] {
                    degree[u] += 1;
                    degree[v] += 1;
                }
            }
        }
    }

    let mut feature_rng = rng(spec.seed, STREAM_FEATURES);
    let noise = Normal::new(0.0, spec.sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut data = Vec::with_capacity(n * spec.n_features);
    for &is_anomaly in &anomalous {
        let mean = if is_anomaly { spec.delta } else { 0.0 };
        for _ in 0..spec.n_features {
            data.push(mean + noise.sample(&mut feature_rng));
        }
    }
    let features = DenseMatrix::from_vec(n, spec.n_features, data)?;

    let relations = edge_lists
        .into_iter()
        .enumerate()
        .map(|(r, edges)| {
            Ok(Relation {
                name: relation_name(r),
                adjacency: build_adjacency(n, edges)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = anomalous
        .iter()
        .map(|&a| if a { Label::Anomaly } else { Label::Normal })
        .collect();
    let anomalies = (0..n).filter(|&v| anomalous[v]).collect();
    Ok(SyntheticDataset {
        graph: AttributedGraph::new(relations, features, labels)?,
        isolated,
        anomalies,
    })
}

pub fn relation_name(r: usize) -> String {
    format!("rel{r}")
}

/// File name of the generator settings written next to a synthetic dataset.
pub const GENERATOR_FILE: &str = "generator.json";

/// Writes `manifest.json` and the files it references into `dir`, creating
/// it if needed. The manifest carries the exact statistics of the generated
/// graph so that reloading validates them. Returns the manifest path.
pub fn write_synthetic(ds: &SyntheticDataset, spec: &SyntheticSpec, dir: &Path) -> Result<std::path::PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    let g = &ds.graph;

    let mut features = String::new();
    for i in 0..g.n_nodes() {
        let row: Vec<String> = g.features().row(i).iter().map(|v| format!("{v}")).collect();
        features.push_str(&row.join(","));
        features.push('\n');
    }
    write("features.csv", features)?;

    let mut labels = String::from("node,label\n");
    for (i, l) in g.labels().iter().enumerate() {
        if let Some(c) = l.class() {
            labels.push_str(&format!("{i},{c}\n"));
        }
    }
    write("labels.csv", labels)?;

    let mut relation_files = Vec::new();
    for rel in g.relations() {
        let file = format!("edges_{}.tsv", rel.name);
        let mut text = String::new();
        for (u, v, _) in rel.adjacency.edges() {
            text.push_str(&format!("{u}\t{v}\n"));
        }
        write(&file, text)?;
        relation_files.push(RelationFile {
            name: rel.name.clone(),
            path: file.into(),
        });
    }

    let stats = dataset_stats(g);
    let manifest = DatasetManifest {
        name: format!("synthetic-seed{}", spec.seed),
        n_nodes: g.n_nodes(),
        features: FeatureFile {
            path: "features.csv".into(),
            format: FeatureFormat::Csv,
        },
        labels: "labels.csv".into(),
        relations: relation_files,
        expected_stats: Some(ExpectedStats {
            nodes: Some(stats.nodes),
            edges: None,
            neg_per_pos: stats.neg_per_pos,
            features: Some(stats.features),
            isolated: Some(stats.isolated),
            relations: stats
                .relations
                .iter()
                .map(|r| RelationStat {
                    name: r.name.clone(),
                    edges: r.edges,
                })
                .collect(),
        }),
        benchmark: None,
    };
    let mut generator = serde_json::to_string_pretty(spec)?;
    generator.push('\n');
    write(GENERATOR_FILE, generator)?;
    let path = dir.join("manifest.json");
    manifest.write(&path)?;
    Ok(path)
}
