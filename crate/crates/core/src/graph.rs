//! Undirected attributed graphs and the symmetric normalized Laplacian.
//!
//! Every relation of an [`AttributedGraph`] is stored as a [`SparseAdjacency`]
//! in CSR form. The Laplacian is never materialised: [`laplacian_matvec`] and
//! [`NormalizedLaplacian::apply_matrix`] compute
//!
//! ```text
//! L x = x − D^{-1/2} W D^{-1/2} x
//! ```
//!
//! directly from the CSR arrays. Nodes of degree zero get `D^{-1/2} = 0`, so
//! `L` acts as the identity on them.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::tensor::DenseMatrix;

/// Immutable symmetric adjacency in compressed sparse row form.
///
/// Rows hold strictly increasing column indices, there are no self-loops,
/// and entry `(i, j)` exists iff `(j, i)` exists with the same weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAdjacency {
    n_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    edge_weights: Vec<f64>,
}

impl SparseAdjacency {
    /// Graph with `n_nodes` nodes and no edges.
    pub fn empty(n_nodes: usize) -> Self {
        SparseAdjacency {
            n_nodes,
            row_offsets: vec![0; n_nodes + 1],
            col_indices: Vec::new(),
            edge_weights: Vec::new(),
        }
    }

    /// Unit-weight edges. See [`build_adjacency`].
    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        build_adjacency(n_nodes, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Stored entries, i.e. twice the number of undirected edges.
    #[inline]
    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    /// Undirected edge count.
    #[inline]
    pub fn n_edges(&self) -> usize {
        self.nnz() / 2
    }

    #[inline]
    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    #[inline]
    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    #[inline]
    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    /// Neighbours of `i` and the matching weights.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.edge_weights[lo..hi])
    }

    #[inline]
    pub fn neighbor_count(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, weights) = self.row(i);
        cols.binary_search(&j).ok().map(|p| weights[p])
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_nodes).flat_map(move |u| {
            let (cols, weights) = self.row(u);
            cols.iter()
                .zip(weights)
                .filter(move |(&v, _)| v > u)
                .map(move |(&v, &w)| (u, v, w))
        })
    }
}

/// Builds a symmetric CSR adjacency from `(u, v, weight)` triples.
///
/// Each edge is inserted in both directions, duplicates are merged by summing
/// their weights, and self-loops are dropped after range checking. Entries
/// whose merged weight is zero are not stored.
pub fn build_adjacency<I>(n_nodes: usize, edges: I) -> Result<SparseAdjacency>
where
    I: IntoIterator<Item = (usize, usize, f64)>,
{
    let mut triples: Vec<(usize, usize, f64)> = Vec::new();
    for (u, v, w) in edges {
        for index in [u, v] {
            if index >= n_nodes {
                return Err(Error::IndexOutOfRange { index, n_nodes });
            }
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidWeight { u, v, weight: w });
        }
        if u == v {
            continue;
        }
        triples.push((u, v, w));
        triples.push((v, u, w));
    }
    // Stable, so both directions of an edge sum their duplicates in the same
    // order and stay bitwise symmetric.
    triples.sort_by_key(|t| (t.0, t.1));

    let mut row_offsets = vec![0usize; n_nodes + 1];
    let mut col_indices = Vec::with_capacity(triples.len());
    let mut edge_weights = Vec::with_capacity(triples.len());
    let mut rows = Vec::with_capacity(triples.len());
    for (u, v, w) in triples {
        if rows.last() == Some(&u) && col_indices.last() == Some(&v) {
            *edge_weights.last_mut().unwrap() += w;
        } else {
            rows.push(u);
            col_indices.push(v);
            edge_weights.push(w);
        }
    }
    // Both directions of an edge accumulate the same summands, so dropping
    // zero-weight entries keeps the structure symmetric.
    let mut keep_rows = Vec::with_capacity(rows.len());
    let mut keep_cols = Vec::with_capacity(rows.len());
    let mut keep_weights = Vec::with_capacity(rows.len());
    for ((u, v), w) in rows.into_iter().zip(col_indices).zip(edge_weights) {
        if w > 0.0 {
            keep_rows.push(u);
            keep_cols.push(v);
            keep_weights.push(w);
        }
    }
    for &u in &keep_rows {
        row_offsets[u + 1] += 1;
    }
    for i in 0..n_nodes {
        row_offsets[i + 1] += row_offsets[i];
    }
    Ok(SparseAdjacency {
        n_nodes,
        row_offsets,
        col_indices: keep_cols,
        edge_weights: keep_weights,
    })
}

/// Weighted degrees `d_i = Σ_j W_ij` and `d_i^{-1/2}` (zero where `d_i = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector {
    pub d: Vec<f64>,
    pub d_inv_sqrt: Vec<f64>,
}

pub fn degrees(adj: &SparseAdjacency) -> DegreeVector {
    let d: Vec<f64> = (0..adj.n_nodes())
        .map(|i| adj.row(i).1.iter().sum())
        .collect();
    let d_inv_sqrt = d
        .iter()
        .map(|&di| if di > 0.0 { 1.0 / di.sqrt() } else { 0.0 })
        .collect();
    DegreeVector { d, d_inv_sqrt }
}

/// `L x` for the symmetric normalized Laplacian of `adj`.
pub fn laplacian_matvec(adj: &SparseAdjacency, deg: &DegreeVector, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != adj.n_nodes() {
        return Err(Error::LengthMismatch {
            expected: adj.n_nodes(),
            actual: x.len(),
        });
    }
    let mut out = vec![0.0; x.len()];
    apply_rows(adj, deg, x, 1, &mut out);
    Ok(out)
}

/// Row-major `L X` for an `n × cols` block. Each output row depends on one
/// CSR row only.
fn apply_rows(adj: &SparseAdjacency, deg: &DegreeVector, x: &[f64], cols: usize, out: &mut [f64]) {
    debug_assert_eq!(x.len(), adj.n_nodes() * cols);
    debug_assert_eq!(out.len(), x.len());
    for i in 0..adj.n_nodes() {
        let out_row = &mut out[i * cols..(i + 1) * cols];
        out_row.copy_from_slice(&x[i * cols..(i + 1) * cols]);
        let di = deg.d_inv_sqrt[i];
        if di == 0.0 {
            continue;
        }
        let (nbrs, weights) = adj.row(i);
        for (&j, &w) in nbrs.iter().zip(weights) {
            // `di * dj` commutes exactly, so coefficient (i, j) equals (j, i) bitwise.
            let coef = w * (di * deg.d_inv_sqrt[j]);
            let x_row = &x[j * cols..(j + 1) * cols];
            for (o, &xv) in out_row.iter_mut().zip(x_row) {
                *o -= coef * xv;
            }
        }
    }
}

/// An adjacency bundled with its degrees: the operator `L` itself.
#[derive(Debug, Clone)]
pub struct NormalizedLaplacian {
    adj: SparseAdjacency,
    deg: DegreeVector,
}

impl NormalizedLaplacian {
    pub fn new(adj: SparseAdjacency) -> Self {
        let deg = degrees(&adj);
        NormalizedLaplacian { adj, deg }
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.adj.n_nodes()
    }

    pub fn adjacency(&self) -> &SparseAdjacency {
        &self.adj
    }

    pub fn degrees(&self) -> &DegreeVector {
        &self.deg
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        laplacian_matvec(&self.adj, &self.deg, x)
    }

    /// `L H` for a node-feature matrix `H` (one row per node).
    pub fn apply_matrix(&self, h: &DenseMatrix) -> Result<DenseMatrix> {
        if h.rows() != self.n_nodes() {
            return Err(Error::LengthMismatch {
                expected: self.n_nodes(),
                actual: h.rows(),
            });
        }
        let mut out = DenseMatrix::zeros(h.rows(), h.cols());
        apply_rows(&self.adj, &self.deg, h.as_slice(), h.cols(), out.as_mut_slice());
        Ok(out)
    }

    /// Dense `n × n` copy of `L`; for oracles and small-graph analysis.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n_nodes();
        let mut m = DenseMatrix::identity(n);
        for i in 0..n {
            let (nbrs, weights) = self.adj.row(i);
            for (&j, &w) in nbrs.iter().zip(weights) {
                let v = m.get(i, j) - w * (self.deg.d_inv_sqrt[i] * self.deg.d_inv_sqrt[j]);
                m.set(i, j, v);
            }
        }
        m
    }
}

/// Per-node class label. Unknown nodes take part in propagation only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Normal,
    Anomaly,
    Unknown,
}

impl Label {
    pub fn class(self) -> Option<usize> {
        match self {
            Label::Normal => Some(0),
            Label::Anomaly => Some(1),
            Label::Unknown => None,
        }
    }

    pub fn from_class(class: usize) -> Self {
        match class {
            0 => Label::Normal,
            1 => Label::Anomaly,
            _ => Label::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub name: String,
    pub adjacency: SparseAdjacency,
}

/// Relations over a shared node set, node features, and partial labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    relations: Vec<Relation>,
    features: DenseMatrix,
    labels: Vec<Label>,
}

impl AttributedGraph {
    pub fn new(relations: Vec<Relation>, features: DenseMatrix, labels: Vec<Label>) -> Result<Self> {
        let first = relations
            .first()
            .ok_or_else(|| Error::InvalidGraph("at least one relation is required".into()))?;
        let n = first.adjacency.n_nodes();
        for (i, r) in relations.iter().enumerate() {
            if r.adjacency.n_nodes() != n {
                return Err(Error::InvalidGraph(format!(
                    "relation '{}' has {} nodes, expected {n}",
                    r.name,
                    r.adjacency.n_nodes()
                )));
            }
            if relations[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::InvalidGraph(format!("duplicate relation '{}'", r.name)));
            }
        }
        if features.rows() != n {
            return Err(Error::InvalidGraph(format!(
                "feature matrix has {} rows, graph has {n} nodes",
                features.rows()
            )));
        }
        if labels.len() != n {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {n} nodes",
                labels.len()
            )));
        }
        if !features.is_finite() {
            return Err(Error::InvalidGraph("non-finite feature value".into()));
        }
        Ok(AttributedGraph {
            relations,
            features,
            labels,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
}

/// Presence union of all relations: an edge exists iff it exists in any
/// relation, and every weight is 1.0.
pub fn union_relations(g: &AttributedGraph) -> SparseAdjacency {
    let n = g.n_nodes();
    let mut edges: Vec<(usize, usize)> = g
        .relations()
        .iter()
        .flat_map(|r| r.adjacency.edges().map(|(u, v, _)| (u, v)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    build_adjacency(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
        .expect("edges of valid relations are in range")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub component_id: Vec<usize>,
    pub component_sizes: Vec<usize>,
}

impl ComponentLabeling {
    pub fn n_components(&self) -> usize {
        self.component_sizes.len()
    }

    /// Member lists per component, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .component_sizes
            .iter()
            .map(|&s| Vec::with_capacity(s))
            .collect();
        for (node, &c) in self.component_id.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// Breadth-first connected components. Component ids follow the order in
/// which their smallest node index is first visited.
pub fn connected_components(adj: &SparseAdjacency) -> ComponentLabeling {
    let n = adj.n_nodes();
    let mut component_id = vec![usize::MAX; n];
    let mut component_sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if component_id[start] != usize::MAX {
            continue;
        }
        let id = component_sizes.len();
        component_id[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in adj.row(u).0 {
                if component_id[v] == usize::MAX {
                    component_id[v] = id;
                    queue.push_back(v);
                }
            }
        }
        component_sizes.push(size);
    }
    ComponentLabeling {
        component_id,
        component_sizes,
    }
}

/// Which branch of the model a node is routed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Isolated,
    Connected,
}

/// Split of the node set into isolated nodes and nodes of larger components.
///
/// `isolated_nodes[k]` and `connected_nodes[k]` are the global indices of the
/// `k`-th local node on each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePartition {
    isolated_nodes: Vec<usize>,
    connected_nodes: Vec<usize>,
    locate: Vec<(Side, usize)>,
}

impl NodePartition {
    fn from_sides(n: usize, isolated_nodes: Vec<usize>, connected_nodes: Vec<usize>) -> Self {
        let mut locate = vec![(Side::Connected, 0); n];
        for (k, &g) in isolated_nodes.iter().enumerate() {
            locate[g] = (Side::Isolated, k);
        }
        for (k, &g) in connected_nodes.iter().enumerate() {
            locate[g] = (Side::Connected, k);
        }
        NodePartition {
            isolated_nodes,
            connected_nodes,
            locate,
        }
    }

    /// Every node on the connected side; used when isolation is switched off.
    pub fn all_connected(n_nodes: usize) -> Self {
        Self::from_sides(n_nodes, Vec::new(), (0..n_nodes).collect())
    }

    pub fn n_nodes(&self) -> usize {
        self.locate.len()
    }

    pub fn isolated_nodes(&self) -> &[usize] {
        &self.isolated_nodes
    }

    pub fn connected_nodes(&self) -> &[usize] {
        &self.connected_nodes
    }

    /// Side and local index of global node `node`.
    pub fn locate(&self, node: usize) -> (Side, usize) {
        self.locate[node]
    }
}

/// Nodes in components of size `<= min_component_size` go to the isolated
/// side. With `min_component_size = 1` that is exactly the degree-0 nodes.
pub fn partition_nodes(labeling: &ComponentLabeling, min_component_size: usize) -> NodePartition {
    let threshold = min_component_size.max(1);
    let (isolated, connected): (Vec<usize>, Vec<usize>) = (0..labeling.component_id.len())
        .partition(|&i| labeling.component_sizes[labeling.component_id[i]] <= threshold);
    NodePartition::from_sides(labeling.component_id.len(), isolated, connected)
}

/// Subgraph induced by a sorted, duplicate-free node list. Local index `k`
/// corresponds to global node `nodes[k]`; the returned back-map is `nodes`.
pub fn induced_subgraph(adj: &SparseAdjacency, nodes: &[usize]) -> Result<(SparseAdjacency, Vec<usize>)> {
    if nodes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedNodes);
    }
    if let Some(&last) = nodes.last() {
        if last >= adj.n_nodes() {
            return Err(Error::IndexOutOfRange {
                index: last,
                n_nodes: adj.n_nodes(),
            });
        }
    }
    let mut local = vec![usize::MAX; adj.n_nodes()];
    for (k, &g) in nodes.iter().enumerate() {
        local[g] = k;
    }
    let mut row_offsets = Vec::with_capacity(nodes.len() + 1);
    let mut col_indices = Vec::new();
    let mut edge_weights = Vec::new();
    row_offsets.push(0);
    for &g in nodes {
        let (nbrs, weights) = adj.row(g);
        for (&j, &w) in nbrs.iter().zip(weights) {
            if local[j] != usize::MAX {
                // Global order is preserved by the sorted node list.
                col_indices.push(local[j]);
                edge_weights.push(w);
            }
        }
        row_offsets.push(col_indices.len());
    }
    Ok((
        SparseAdjacency {
            n_nodes: nodes.len(),
            row_offsets,
            col_indices,
            edge_weights,
        },
        nodes.to_vec(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> SparseAdjacency {
        SparseAdjacency::from_edges(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn single_edge_csr() {
        let a = SparseAdjacency::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.row(0).0, &[1]);
        assert_eq!(a.row(1).0, &[0]);
        assert!(a.row(2).0.is_empty());
        assert_eq!(a.row_offsets(), &[0, 1, 2, 2]);
    }

    #[test]
    fn self_loop_stripped() {
        let a = SparseAdjacency::from_edges(2, [(0, 0)]).unwrap();
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn duplicates_merge_by_sum() {
        let a = SparseAdjacency::from_edges(3, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(a.weight(0, 1), Some(3.0));
        assert_eq!(a.weight(1, 0), Some(3.0));
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            SparseAdjacency::from_edges(2, [(0, 2)]),
            Err(Error::IndexOutOfRange { index: 2, n_nodes: 2 })
        ));
        assert!(matches!(
            build_adjacency(2, [(0, 1, -1.0)]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(build_adjacency(2, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn degree_examples() {
        let d = degrees(&k2());
        assert_eq!(d.d, vec![1.0, 1.0]);
        assert_eq!(d.d_inv_sqrt, vec![1.0, 1.0]);

        let iso = degrees(&SparseAdjacency::empty(1));
        assert_eq!(iso.d, vec![0.0]);
        assert_eq!(iso.d_inv_sqrt, vec![0.0]);

        let star = SparseAdjacency::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let d = degrees(&star);
        assert_eq!(d.d[0], 3.0);
        assert!((d.d_inv_sqrt[0] - 0.57735).abs() < 1e-5);
    }

    #[test]
    fn laplacian_examples() {
        let a = k2();
        let d = degrees(&a);
        assert_eq!(laplacian_matvec(&a, &d, &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(laplacian_matvec(&a, &d, &[1.0, -1.0]).unwrap(), vec![2.0, -2.0]);

        let iso = SparseAdjacency::empty(1);
        assert_eq!(laplacian_matvec(&iso, &degrees(&iso), &[5.0]).unwrap(), vec![5.0]);

        assert!(matches!(
            laplacian_matvec(&a, &d, &[1.0]),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn dense_laplacian_matches_operator() {
        let a = SparseAdjacency::from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let lap = NormalizedLaplacian::new(a);
        let x = [0.3, -1.2, 2.0, 0.7];
        let dense = lap.to_dense().matmul(&DenseMatrix::column(&x)).unwrap();
        let sparse = lap.apply(&x).unwrap();
        for (a, b) in dense.as_slice().iter().zip(&sparse) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    fn graph_with(relations: Vec<SparseAdjacency>) -> AttributedGraph {
        let n = relations[0].n_nodes();
        let rels = relations
            .into_iter()
            .enumerate()
            .map(|(i, adjacency)| Relation {
                name: format!("r{i}"),
                adjacency,
            })
            .collect();
        AttributedGraph::new(rels, DenseMatrix::zeros(n, 1), vec![Label::Unknown; n]).unwrap()
    }

    #[test]
    fn union_examples() {
        let one = SparseAdjacency::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(union_relations(&graph_with(vec![one.clone()])), one);

        let a = SparseAdjacency::from_edges(3, [(0, 1)]).unwrap();
        let b = SparseAdjacency::from_edges(3, [(1, 2)]).unwrap();
        let u = union_relations(&graph_with(vec![a.clone(), b]));
        assert_eq!(u.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0), (1, 2, 1.0)]);

        let u = union_relations(&graph_with(vec![a.clone(), a]));
        assert_eq!(u.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0)]);
    }

    #[test]
    fn union_uses_presence_weights() {
        let heavy = build_adjacency(2, [(0, 1, 5.0)]).unwrap();
        let u = union_relations(&graph_with(vec![heavy]));
        assert_eq!(u.weight(0, 1), Some(1.0));
    }

    #[test]
    fn graph_validation() {
        let a = SparseAdjacency::empty(3);
        let b = SparseAdjacency::empty(4);
        let rels = vec![
            Relation { name: "a".into(), adjacency: a.clone() },
            Relation { name: "b".into(), adjacency: b },
        ];
        assert!(AttributedGraph::new(rels, DenseMatrix::zeros(3, 1), vec![Label::Unknown; 3]).is_err());
        assert!(AttributedGraph::new(vec![], DenseMatrix::zeros(3, 1), vec![Label::Unknown; 3]).is_err());
        let rels = vec![Relation { name: "a".into(), adjacency: a }];
        assert!(AttributedGraph::new(rels, DenseMatrix::zeros(2, 1), vec![Label::Unknown; 3]).is_err());
    }

    #[test]
    fn component_examples() {
        let a = SparseAdjacency::from_edges(3, [(0, 1)]).unwrap();
        let c = connected_components(&a);
        assert_eq!(c.component_id, vec![0, 0, 1]);
        assert_eq!(c.component_sizes, vec![2, 1]);

        let c = connected_components(&SparseAdjacency::empty(4));
        assert_eq!(c.component_sizes, vec![1, 1, 1, 1]);

        let path = SparseAdjacency::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(connected_components(&path).component_sizes, vec![4]);
    }

    #[test]
    fn partition_examples() {
        let a = SparseAdjacency::from_edges(3, [(0, 1)]).unwrap();
        let c = connected_components(&a);
        let p = partition_nodes(&c, 1);
        assert_eq!(p.isolated_nodes(), &[2]);
        assert_eq!(p.connected_nodes(), &[0, 1]);
        assert_eq!(p.locate(2), (Side::Isolated, 0));
        assert_eq!(p.locate(1), (Side::Connected, 1));

        let p = partition_nodes(&c, 2);
        assert_eq!(p.isolated_nodes(), &[0, 1, 2]);
        assert!(p.connected_nodes().is_empty());
    }

    #[test]
    fn induced_examples() {
        let path = SparseAdjacency::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let (sub, back) = induced_subgraph(&path, &[0, 1]).unwrap();
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0)]);
        assert_eq!(back, vec![0, 1]);

        let (sub, _) = induced_subgraph(&path, &[2]).unwrap();
        assert_eq!(sub.nnz(), 0);

        let cycle = SparseAdjacency::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (sub, _) = induced_subgraph(&cycle, &[0, 1, 2]).unwrap();
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0), (1, 2, 1.0)]);

        assert!(matches!(induced_subgraph(&cycle, &[1, 0]), Err(Error::UnsortedNodes)));
        assert!(matches!(induced_subgraph(&cycle, &[1, 1]), Err(Error::UnsortedNodes)));
    }
}
