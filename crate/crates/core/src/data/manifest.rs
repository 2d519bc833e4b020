//! JSON dataset manifests and the plain-text file formats they point to.
//!
//! Paths inside a manifest are resolved relative to the manifest's own
//! directory.
//!
//! * Edge files: one `u<TAB>v` pair per line, 0-indexed, with an optional
//!   third weight column. Blank lines and lines starting with `#` are skipped.
//! * Features: a header-less CSV with one row per node, or `f64-binary`:
//!   `u32 rows`, `u32 cols` (little-endian) followed by `rows·cols` f64 values.
//! * Labels: CSV lines `node,label` with `label` 0 (normal) or 1 (anomaly).
//!   A non-numeric first line is treated as a header. Nodes absent from the
//!   file are unlabeled.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::benchmarks::{Benchmark, ExpectedStats};
use crate::data::stats::{dataset_stats, validate_stats, DatasetStats};
use crate::error::{Error, Result};
use crate::graph::{build_adjacency, AttributedGraph, Label, Relation};
use crate::tensor::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureFormat {
    #[default]
    Csv,
    F64Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFile {
    pub path: PathBuf,
    #[serde(default)]
    pub format: FeatureFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationFile {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub n_nodes: usize,
    pub features: FeatureFile,
    pub labels: PathBuf,
    pub relations: Vec<RelationFile>,
    /// Reference statistics checked after loading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_stats: Option<ExpectedStats>,
    /// Shorthand for the published statistics of a known benchmark. Fields
    /// given in `expected_stats` take precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<Benchmark>,
}

impl DatasetManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Statistics to validate against, merging `benchmark` defaults with
    /// explicit `expected_stats`.
    pub fn effective_expected(&self) -> Option<ExpectedStats> {
        let base = self.benchmark.map(Benchmark::expected);
        match (base, &self.expected_stats) {
            (None, None) => None,
            (Some(b), None) => Some(b),
            (None, Some(e)) => Some(e.clone()),
            (Some(b), Some(e)) => Some(ExpectedStats {
                nodes: e.nodes.or(b.nodes),
                edges: e.edges.or(b.edges),
                neg_per_pos: e.neg_per_pos.or(b.neg_per_pos),
                features: e.features.or(b.features),
                isolated: e.isolated.or(b.isolated),
                relations: if e.relations.is_empty() {
                    b.relations
                } else {
                    e.relations.clone()
                },
            }),
        }
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses an edge list. Line numbers in errors are 1-based.
pub fn parse_edges(path: &Path, text: &str, n_nodes: usize) -> Result<Vec<(usize, usize, f64)>> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(path, i + 1, format!("expected 2 or 3 fields, found {}", fields.len())));
        }
        let node = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| parse_err(path, i + 1, format!("bad node id '{s}'")))?;
            if v >= n_nodes {
                return Err(parse_err(path, i + 1, format!("node {v} out of range for {n_nodes} nodes")));
            }
            Ok(v)
        };
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| parse_err(path, i + 1, format!("bad weight '{s}'")))?,
            None => 1.0,
        };
        edges.push((node(fields[0])?, node(fields[1])?, w));
    }
    Ok(edges)
}

pub fn parse_features_csv(path: &Path, text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(path, i + 1, format!("bad feature value '{}'", s.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_err(
                    path,
                    i + 1,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    DenseMatrix::from_vec(rows.len(), cols, rows.concat())
}

pub fn decode_features_binary(path: &Path, bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < 8 {
        return Err(parse_err(path, 0, "missing 8-byte shape header"));
    }
    let rows = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != rows * cols * 8 {
        return Err(parse_err(
            path,
            0,
            format!("header says {rows}x{cols} but body holds {} bytes", body.len()),
        ));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::from_vec(rows, cols, data)
}

pub fn encode_features_binary(m: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * m.as_slice().len());
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn parse_labels(path: &Path, text: &str, n_nodes: usize) -> Result<Vec<Label>> {
    let mut labels = vec![Label::Unknown; n_nodes];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (node, label) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, i + 1, "expected 'node,label'"))?;
        let Ok(node) = node.trim().parse::<usize>() else {
            if i == 0 {
                continue; // header
            }
            return Err(parse_err(path, i + 1, format!("bad node id '{}'", node.trim())));
        };
        if node >= n_nodes {
            return Err(parse_err(path, i + 1, format!("node {node} out of range for {n_nodes} nodes")));
        }
        labels[node] = match label.trim() {
            "0" => Label::Normal,
            "1" => Label::Anomaly,
            other => return Err(parse_err(path, i + 1, format!("label must be 0 or 1, found '{other}'"))),
        };
    }
    Ok(labels)
}

#[derive(Debug)]
pub struct LoadedDataset {
    pub graph: AttributedGraph,
    pub stats: DatasetStats,
}

/// Loads a manifest from disk and validates it against its reference
/// statistics when any are present.
pub fn load_dataset(manifest_path: &Path) -> Result<LoadedDataset> {
    let manifest = DatasetManifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    load_manifest(&manifest, base)
}

pub fn load_manifest(m: &DatasetManifest, base: &Path) -> Result<LoadedDataset> {
    let n = m.n_nodes;
    let feature_path = base.join(&m.features.path);
    let features = match m.features.format {
        FeatureFormat::Csv => parse_features_csv(&feature_path, &read_text(&feature_path)?)?,
        FeatureFormat::F64Binary => {
            let bytes = fs::read(&feature_path).map_err(|e| Error::io(&feature_path, e))?;
            decode_features_binary(&feature_path, &bytes)?
        }
    };
    if features.rows() != n {
        return Err(Error::Validation(format!(
            "{}: expected {n} feature rows, found {}",
            feature_path.display(),
            features.rows()
        )));
    }
    let label_path = base.join(&m.labels);
    let labels = parse_labels(&label_path, &read_text(&label_path)?, n)?;

    let mut relations = Vec::with_capacity(m.relations.len());
    for r in &m.relations {
        let path = base.join(&r.path);
        let edges = parse_edges(&path, &read_text(&path)?, n)?;
        relations.push(Relation {
            name: r.name.clone(),
            adjacency: build_adjacency(n, edges)?,
        });
    }
    let graph = AttributedGraph::new(relations, features, labels)?;
    let stats = dataset_stats(&graph);
    if let Some(expected) = m.effective_expected() {
        validate_stats(&stats, &expected)?;
    }
    Ok(LoadedDataset { graph, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t")
    }

    #[test]
    fn edges_with_comments_and_weights() {
        let e = parse_edges(p(), "# header\n0\t1\n\n1\t2\t0.5\n", 3).unwrap();
        assert_eq!(e, vec![(0, 1, 1.0), (1, 2, 0.5)]);
    }

    #[test]
    fn edge_errors_carry_line() {
        match parse_edges(p(), "0\t1\n0\t9\n", 3) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_edges(p(), "0\n", 3).is_err());
    }

    #[test]
    fn features_csv_ragged_rejected() {
        assert!(parse_features_csv(p(), "1,2\n3\n").is_err());
        let m = parse_features_csv(p(), "1,2\n3,4\n").unwrap();
        assert_eq!(m, DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]));
    }

    #[test]
    fn features_binary_roundtrip() {
        let m = DenseMatrix::from_rows(&[[1.0, -2.5, 3.0], [0.0, 1e-300, 7.0]]);
        let bytes = encode_features_binary(&m);
        assert_eq!(&bytes[..8], &[2, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(decode_features_binary(p(), &bytes).unwrap(), m);
        assert!(decode_features_binary(p(), &bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn labels_header_and_gaps() {
        let l = parse_labels(p(), "node,label\n0,1\n2,0\n", 4).unwrap();
        assert_eq!(l, vec![Label::Anomaly, Label::Unknown, Label::Normal, Label::Unknown]);
        assert!(parse_labels(p(), "0,2\n", 1).is_err());
        assert!(parse_labels(p(), "0,1\nx,0\n", 1).is_err());
    }

    #[test]
    fn benchmark_merge_prefers_explicit() {
        let m = DatasetManifest {
            name: "a".into(),
            n_nodes: 1,
            features: FeatureFile {
                path: "f".into(),
                format: FeatureFormat::Csv,
            },
            labels: "l".into(),
            relations: vec![],
            expected_stats: Some(ExpectedStats {
                nodes: Some(7),
                ..ExpectedStats::default()
            }),
            benchmark: Some(Benchmark::Amazon),
        };
        let e = m.effective_expected().unwrap();
        assert_eq!(e.nodes, Some(7));
        assert_eq!(e.features, Some(25));
        assert_eq!(e.relations.len(), 3);
    }
}
