use serde::{Deserialize, Serialize};

use crate::data::benchmarks::ExpectedStats;
use crate::error::{Error, Result};
use crate::graph::{connected_components, partition_nodes, union_relations, AttributedGraph, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationEdges {
    pub name: String,
    /// Undirected edge count after symmetrization and deduplication.
    pub edges: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub nodes: u64,
    pub relations: Vec<RelationEdges>,
    pub union_edges: u64,
    pub positives: u64,
    pub negatives: u64,
    pub unlabeled: u64,
    /// `negatives / positives`; `None` without positives.
    pub neg_per_pos: Option<f64>,
    pub features: u64,
    /// Nodes of degree zero in every relation.
    pub isolated: u64,
}

pub fn dataset_stats(g: &AttributedGraph) -> DatasetStats {
    let union = union_relations(g);
    let partition = partition_nodes(&connected_components(&union), 1);
    let count = |l: Label| g.labels().iter().filter(|&&x| x == l).count() as u64;
    let (positives, negatives) = (count(Label::Anomaly), count(Label::Normal));
    DatasetStats {
        nodes: g.n_nodes() as u64,
        relations: g
            .relations()
            .iter()
            .map(|r| RelationEdges {
                name: r.name.clone(),
                edges: r.adjacency.n_edges() as u64,
            })
            .collect(),
        union_edges: union.n_edges() as u64,
        positives,
        negatives,
        unlabeled: count(Label::Unknown),
        neg_per_pos: (positives > 0).then(|| negatives as f64 / positives as f64),
        features: g.n_features() as u64,
        isolated: partition.isolated_nodes().len() as u64,
    }
}

/// How an observed undirected count relates to a published one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeConvention {
    /// Published count equals the undirected count.
    Undirected,
    /// Published count lists both directions.
    Directed,
    /// Both directions plus one self-loop per node.
    DirectedWithSelfLoops,
    /// Both directions minus one per node.
    DirectedMinusNodes,
}

/// Matches `expected` against the accepted counting conventions for an
/// undirected graph with `undirected` edges on `n` nodes.
pub fn edge_convention(undirected: u64, n: u64, expected: u64) -> Option<EdgeConvention> {
    let two = 2 * undirected;
    if expected == undirected {
        Some(EdgeConvention::Undirected)
    } else if expected == two {
        Some(EdgeConvention::Directed)
    } else if expected == two + n {
        Some(EdgeConvention::DirectedWithSelfLoops)
    } else if two >= n && expected == two - n {
        Some(EdgeConvention::DirectedMinusNodes)
    } else {
        None
    }
}

/// Absolute tolerance on the negatives-per-positive ratio, which is
/// published to one decimal.
pub const RATIO_TOLERANCE: f64 = 0.05;

/// Checks computed statistics against reference values and returns the
/// convention each edge count matched, in relation order (total last, when
/// checked). Every mismatch is reported with both numbers.
pub fn validate_stats(stats: &DatasetStats, expected: &ExpectedStats) -> Result<Vec<EdgeConvention>> {
    let mut problems = Vec::new();
    let mut conventions = Vec::new();
    let mut exact = |what: &str, got: u64, want: Option<u64>| {
        if let Some(want) = want {
            if got != want {
                problems.push(format!("{what}: expected {want}, found {got}"));
            }
        }
    };
    exact("nodes", stats.nodes, expected.nodes);
    exact("features", stats.features, expected.features);
    exact("isolated nodes", stats.isolated, expected.isolated);

    if let Some(want) = expected.neg_per_pos {
        match stats.neg_per_pos {
            Some(got) if (got - want).abs() <= RATIO_TOLERANCE => {}
            got => problems.push(format!(
                "negative-per-positive ratio: expected 1:{want}, found {}",
                got.map_or("no positives".to_string(), |g| format!("1:{g:.3}"))
            )),
        }
    }

    let mut edge_checks = Vec::new();
    for rel in &expected.relations {
        match stats.relations.iter().find(|r| r.name == rel.name) {
            Some(found) => edge_checks.push((format!("edges of relation {}", rel.name), found.edges, rel.edges)),
            None => problems.push(format!("relation {} is missing", rel.name)),
        }
    }
    if let (Some(want), 1) = (expected.edges, stats.relations.len()) {
        edge_checks.push(("total edges".into(), stats.union_edges, want));
    }
    for (what, got, want) in edge_checks {
        match edge_convention(got, stats.nodes, want) {
            Some(c) => conventions.push(c),
            None => problems.push(format!(
                "{what}: expected {want}, found {got} undirected ({} directed)",
                2 * got
            )),
        }
    }

    if problems.is_empty() {
        Ok(conventions)
    } else {
        Err(Error::Validation(problems.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::benchmarks::RelationStat;
    use crate::graph::{build_adjacency, Relation};
    use crate::tensor::DenseMatrix;

    fn toy(n: usize, edges: &[(usize, usize)]) -> AttributedGraph {
        let adj = build_adjacency(n, edges.iter().map(|&(u, v)| (u, v, 1.0))).unwrap();
        let mut labels = vec![Label::Normal; n];
        labels[0] = Label::Anomaly;
        AttributedGraph::new(
            vec![Relation {
                name: "r".into(),
                adjacency: adj,
            }],
            DenseMatrix::zeros(n, 2),
            labels,
        )
        .unwrap()
    }

    #[test]
    fn edgeless_graph() {
        let s = dataset_stats(&toy(4, &[]));
        assert_eq!((s.nodes, s.union_edges, s.isolated), (4, 0, 4));
        assert_eq!(s.neg_per_pos, Some(3.0));
    }

    #[test]
    fn conventions() {
        assert_eq!(edge_convention(10, 4, 10), Some(EdgeConvention::Undirected));
        assert_eq!(edge_convention(10, 4, 20), Some(EdgeConvention::Directed));
        assert_eq!(edge_convention(10, 4, 24), Some(EdgeConvention::DirectedWithSelfLoops));
        assert_eq!(edge_convention(10, 4, 16), Some(EdgeConvention::DirectedMinusNodes));
        assert_eq!(edge_convention(10, 4, 11), None);
    }

    #[test]
    fn validation_reports_both_numbers() {
        let s = dataset_stats(&toy(4, &[(1, 2)]));
        let expected = ExpectedStats {
            nodes: Some(5),
            relations: vec![RelationStat {
                name: "r".into(),
                edges: 7,
            }],
            ..ExpectedStats::default()
        };
        let msg = validate_stats(&s, &expected).unwrap_err().to_string();
        assert!(msg.contains("expected 5, found 4"), "{msg}");
        assert!(msg.contains("expected 7, found 1"), "{msg}");
    }

    #[test]
    fn validation_accepts_directed_counts() {
        let s = dataset_stats(&toy(4, &[(1, 2), (2, 3)]));
        let expected = ExpectedStats {
            nodes: Some(4),
            edges: Some(4),
            neg_per_pos: Some(3.0),
            isolated: Some(1),
            ..ExpectedStats::default()
        };
        assert_eq!(validate_stats(&s, &expected).unwrap(), vec![EdgeConvention::Directed]);
    }
}
