#![allow(dead_code)]

use hpgcn::graph::{build_adjacency, SparseAdjacency};
use proptest::prelude::*;

/// Random weighted undirected graph on 1..=max_n nodes. Edges may repeat or
/// be self-loops; `build_adjacency` merges or drops them.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = SparseAdjacency> {
    (1..=max_n).prop_flat_map(|n| {
        let max_edges = 3 * n;
        proptest::collection::vec((0..n, 0..n, 0.1f64..3.0), 0..=max_edges)
            .prop_map(move |edges| build_adjacency(n, edges).unwrap())
    })
}

/// Graph plus a signal of matching length.
pub fn arb_graph_signal(max_n: usize) -> impl Strategy<Value = (SparseAdjacency, Vec<f64>)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.n_nodes();
        (Just(g), proptest::collection::vec(-10.0f64..10.0, n))
    })
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖a − b‖ / max(‖b‖, 1e-300)`.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(1e-300)
}
