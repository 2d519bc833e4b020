//! The high-pass graph convolutional anomaly detector.
//!
//! Nodes are split into an isolated side and a connected side. Connected
//! nodes go through a polynomial high-pass filter on their induced subgraph,
//! `[H, LH, …, L^{K-1}H]` concatenated and mapped by one linear layer, then
//! an MLP. Isolated nodes go through their own MLP on raw features. Both
//! sides produce `hidden_dim`-wide rows that are merged back into global node
//! order and classified by a per-row head MLP.
//!
//! In hetero mode each relation gets its own filter weights, the filtered
//! blocks are combined by an elementwise max, and the rest is shared.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    connected_components, induced_subgraph, partition_nodes, union_relations, AttributedGraph, NodePartition,
    NormalizedLaplacian,
};
use crate::tensor::{DenseMatrix, ParamId, ParamSet, Tape, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// All relations merged into one edge set.
    Homo,
    /// One filter per relation, combined by elementwise max.
    Hetero,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "homo" => Ok(Mode::Homo),
            "hetero" => Ok(Mode::Hetero),
            other => Err(format!("unknown mode '{other}' (expected homo or hetero)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Homo => "homo",
            Mode::Hetero => "hetero",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HpGcnConfig {
    /// Filter order: powers `0..k` of `L`.
    pub k: usize,
    pub hidden_dim: usize,
    /// Hidden layers after the filter on the connected side.
    pub mlp_layers_connected: usize,
    /// Layers of the isolated-side MLP (the first maps features to hidden).
    pub mlp_layers_isolated: usize,
    /// Hidden layers of the head before the 2-way output layer.
    pub mlp_layers_head: usize,
    pub mode: Mode,
    /// Components of at most this size are routed to the isolated side.
    pub min_component_size: usize,
    /// When false every node takes the filter path (isolation ablation).
    pub separate_isolated: bool,
    /// Inverse-frequency class weights in the loss.
    pub weighted_loss: bool,
    pub seed: u64,
}

impl Default for HpGcnConfig {
    fn default() -> Self {
        HpGcnConfig {
            k: 3,
            hidden_dim: 64,
            mlp_layers_connected: 2,
            mlp_layers_isolated: 2,
            mlp_layers_head: 1,
            mode: Mode::Homo,
            min_component_size: 1,
            separate_isolated: true,
            weighted_loss: true,
            seed: 0,
        }
    }
}

impl HpGcnConfig {
    pub fn validate(&self, n_relations: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if self.hidden_dim == 0 {
            return Err(Error::InvalidConfig("hidden_dim must be at least 1".into()));
        }
        if self.mlp_layers_isolated == 0 {
            return Err(Error::InvalidConfig("the isolated MLP needs at least one layer".into()));
        }
        if self.min_component_size == 0 {
            return Err(Error::InvalidConfig("min_component_size must be at least 1".into()));
        }
        if self.mode == Mode::Hetero && n_relations < 2 {
            return Err(Error::InvalidConfig(format!(
                "hetero mode needs at least two relations, graph has {n_relations}"
            )));
        }
        Ok(())
    }

    /// Filters per forward pass: one in homo mode, one per relation in hetero mode.
    pub fn n_filters(&self, n_relations: usize) -> usize {
        match self.mode {
            Mode::Homo => 1,
            Mode::Hetero => n_relations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Linear {
    pub weight: ParamId,
    pub bias: ParamId,
}

impl Linear {
    fn register(params: &mut ParamSet, name: &str, d_in: usize, d_out: usize, rng: &mut ChaCha8Rng) -> Self {
        Linear {
            weight: params.add(format!("{name}.weight"), DenseMatrix::glorot(d_in, d_out, rng)),
            bias: params.add(format!("{name}.bias"), DenseMatrix::zeros(1, d_out)),
        }
    }

    pub fn forward(&self, tape: &mut Tape<'_>, params: &ParamSet, x: Var) -> Result<Var> {
        let w = tape.param(params, self.weight);
        let b = tape.param(params, self.bias);
        let xw = tape.matmul(x, w)?;
        tape.add_bias(xw, b)
    }
}

/// One polynomial high-pass filter: the `K` propagated blocks
/// `H, LH, …, L^{K-1}H` are concatenated and mapped by a single
/// `(K·d_in) × d_out` weight plus bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChebHighPassLayer {
    pub k: usize,
    pub d_in: usize,
    pub linear: Linear,
}

impl ChebHighPassLayer {
    pub fn forward<'g>(
        &self,
        tape: &mut Tape<'g>,
        params: &ParamSet,
        lap: &'g NormalizedLaplacian,
        h: Var,
    ) -> Result<Var> {
        let (rows, cols) = tape.shape(h);
        if rows != lap.n_nodes() || cols != self.d_in {
            return Err(Error::ShapeMismatch {
                op: "cheb_highpass_forward",
                lhs: (rows, cols),
                rhs: (lap.n_nodes(), self.d_in),
            });
        }
        let mut blocks = Vec::with_capacity(self.k);
        blocks.push(h);
        for _ in 1..self.k {
            let prev = *blocks.last().unwrap();
            blocks.push(tape.laplacian(prev, lap)?);
        }
        let stacked = if self.k == 1 { h } else { tape.concat_cols(&blocks)? };
        self.linear.forward(tape, params, stacked)
    }
}

/// Graph-side inputs of a forward pass, built once and reused every epoch.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    n_nodes: usize,
    partition: NodePartition,
    /// Laplacians of the connected side: one (union) in homo mode, one per
    /// relation in hetero mode. Local index `k` is `partition.connected_nodes()[k]`.
    operators: Vec<NormalizedLaplacian>,
    connected_features: DenseMatrix,
    isolated_features: DenseMatrix,
}

impl PreparedGraph {
    pub fn new(g: &AttributedGraph, config: &HpGcnConfig) -> Result<Self> {
        config.validate(g.relations().len())?;
        let union = union_relations(g);
        let partition = if config.separate_isolated {
            partition_nodes(&connected_components(&union), config.min_component_size)
        } else {
            NodePartition::all_connected(g.n_nodes())
        };
        Self::with_partition(g, config.mode, partition)
    }

    /// Uses a caller-supplied partition (must cover the graph's nodes).
    pub fn with_partition(g: &AttributedGraph, mode: Mode, partition: NodePartition) -> Result<Self> {
        if partition.n_nodes() != g.n_nodes() {
            return Err(Error::LengthMismatch {
                expected: g.n_nodes(),
                actual: partition.n_nodes(),
            });
        }
        let connected = partition.connected_nodes();
        let operators = match mode {
            Mode::Homo => {
                let (sub, _) = induced_subgraph(&union_relations(g), connected)?;
                vec![NormalizedLaplacian::new(sub)]
            }
            Mode::Hetero => g
                .relations()
                .iter()
                .map(|r| induced_subgraph(&r.adjacency, connected).map(|(sub, _)| NormalizedLaplacian::new(sub)))
                .collect::<Result<_>>()?,
        };
        Ok(PreparedGraph {
            n_nodes: g.n_nodes(),
            connected_features: g.features().select_rows(connected),
            isolated_features: g.features().select_rows(partition.isolated_nodes()),
            partition,
            operators,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn partition(&self) -> &NodePartition {
        &self.partition
    }

    pub fn operators(&self) -> &[NormalizedLaplacian] {
        &self.operators
    }
}

/// Per-node prediction from a row of logits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// `argmax` of the logits, ties to class 0.
    pub label: usize,
    /// Softmax probability of the anomaly class.
    pub anomaly_score: f64,
}

pub fn predict(logits: &DenseMatrix) -> Vec<Prediction> {
    (0..logits.rows())
        .map(|r| {
            let (z0, z1) = (logits.get(r, 0), logits.get(r, 1));
            Prediction {
                label: usize::from(z1 > z0),
                anomaly_score: 1.0 / (1.0 + (z0 - z1).exp()),
            }
        })
        .collect()
}

/// Learnable parameters and layer layout of the detector.
#[derive(Debug, Clone, PartialEq)]
pub struct HpGcnModel {
    config: HpGcnConfig,
    n_features: usize,
    n_relations: usize,
    params: ParamSet,
    filters: Vec<ChebHighPassLayer>,
    connected_mlp: Vec<Linear>,
    isolated_mlp: Vec<Linear>,
    head: Vec<Linear>,
    output: Linear,
}

impl HpGcnModel {
    /// Seeded initialisation for graphs with `n_features` features and
    /// `n_relations` relations.
    pub fn new(config: HpGcnConfig, n_features: usize, n_relations: usize) -> Result<Self> {
        config.validate(n_relations)?;
        if n_features == 0 {
            return Err(Error::InvalidConfig("graph has no features".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = ParamSet::new();
        let h = config.hidden_dim;

        let filters = (0..config.n_filters(n_relations))
            .map(|r| ChebHighPassLayer {
                k: config.k,
                d_in: n_features,
                linear: Linear::register(&mut params, &format!("filter.{r}"), config.k * n_features, h, &mut rng),
            })
            .collect();
        let connected_mlp = (0..config.mlp_layers_connected)
            .map(|i| Linear::register(&mut params, &format!("connected.{i}"), h, h, &mut rng))
            .collect();
        let isolated_mlp = (0..config.mlp_layers_isolated)
            .map(|i| {
                let d_in = if i == 0 { n_features } else { h };
                Linear::register(&mut params, &format!("isolated.{i}"), d_in, h, &mut rng)
            })
            .collect();
        let head = (0..config.mlp_layers_head)
            .map(|i| Linear::register(&mut params, &format!("head.{i}"), h, h, &mut rng))
            .collect();
        let output = Linear::register(&mut params, "output", h, 2, &mut rng);

        Ok(HpGcnModel {
            config,
            n_features,
            n_relations,
            params,
            filters,
            connected_mlp,
            isolated_mlp,
            head,
            output,
        })
    }

    pub fn for_graph(config: HpGcnConfig, g: &AttributedGraph) -> Result<Self> {
        Self::new(config, g.n_features(), g.relations().len())
    }

    pub fn config(&self) -> &HpGcnConfig {
        &self.config
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_relations(&self) -> usize {
        self.n_relations
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    pub fn filters(&self) -> &[ChebHighPassLayer] {
        &self.filters
    }

    fn check_graph(&self, prep: &PreparedGraph) -> Result<()> {
        if prep.operators.len() != self.filters.len() {
            return Err(Error::InvalidConfig(format!(
                "model has {} filters, prepared graph has {} operators",
                self.filters.len(),
                prep.operators.len()
            )));
        }
        if prep.connected_features.cols() != self.n_features {
            return Err(Error::InvalidConfig(format!(
                "model expects {} features, graph has {}",
                self.n_features,
                prep.connected_features.cols()
            )));
        }
        Ok(())
    }

    fn mlp(&self, tape: &mut Tape<'_>, layers: &[Linear], mut x: Var) -> Result<Var> {
        for layer in layers {
            let z = layer.forward(tape, &self.params, x)?;
            x = tape.relu(z);
        }
        Ok(x)
    }

    /// Filtered representation of the connected side, before the
    /// post-filter MLP. In hetero mode the per-relation outputs are max-pooled.
    fn filter_connected<'g>(&self, tape: &mut Tape<'g>, prep: &'g PreparedGraph, x: Var) -> Result<Var> {
        let outs = self
            .filters
            .iter()
            .zip(&prep.operators)
            .map(|(f, lap)| f.forward(tape, &self.params, lap, x))
            .collect::<Result<Vec<_>>>()?;
        match self.config.mode {
            Mode::Homo => Ok(outs[0]),
            Mode::Hetero => tape.max_pool(&outs),
        }
    }

    /// Merged `n × hidden_dim` representation fed to the head.
    pub fn forward_hidden<'g>(&self, tape: &mut Tape<'g>, prep: &'g PreparedGraph) -> Result<Var> {
        self.check_graph(prep)?;
        let part = &prep.partition;
        let mut sides: Vec<(Var, &[usize])> = Vec::with_capacity(2);

        if !part.connected_nodes().is_empty() {
            let x = tape.constant(prep.connected_features.clone());
            let filtered = self.filter_connected(tape, prep, x)?;
            let activated = tape.relu(filtered);
            let hidden = self.mlp(tape, &self.connected_mlp, activated)?;
            sides.push((hidden, part.connected_nodes()));
        }
        if !part.isolated_nodes().is_empty() {
            let x = tape.constant(prep.isolated_features.clone());
            let hidden = self.mlp(tape, &self.isolated_mlp, x)?;
            sides.push((hidden, part.isolated_nodes()));
        }
        tape.merge_rows(prep.n_nodes, &sides)
    }

    /// `n × 2` logits for every node of the prepared graph.
    pub fn forward<'g>(&self, tape: &mut Tape<'g>, prep: &'g PreparedGraph) -> Result<Var> {
        let hidden = self.forward_hidden(tape, prep)?;
        let h = self.mlp(tape, &self.head, hidden)?;
        self.output.forward(tape, &self.params, h)
    }

    /// Logits without keeping the tape.
    pub fn logits(&self, prep: &PreparedGraph) -> Result<DenseMatrix> {
        let mut tape = Tape::new();
        let out = self.forward(&mut tape, prep)?;
        Ok(tape.value(out).clone())
    }

    /// Weighted cross-entropy of the forward pass over `rows`, with gradients
    /// written into the model's parameters. Returns the loss.
    pub fn loss_and_grad(
        &mut self,
        prep: &PreparedGraph,
        rows: &[usize],
        targets: &[usize],
        class_weights: [f64; 2],
    ) -> Result<f64> {
        let mut tape = Tape::new();
        let logits = self.forward(&mut tape, prep)?;
        let loss = tape.softmax_cross_entropy(logits, rows, targets, class_weights)?;
        let value = tape.value(loss).get(0, 0);
        tape.backward_params(loss, &mut self.params)?;
        Ok(value)
    }
}

/// Inverse-frequency weights `w_c = n / (2 n_c)` over the given targets.
pub fn class_weights(targets: &[usize]) -> [f64; 2] {
    let n = targets.len() as f64;
    let n1 = targets.iter().filter(|&&y| y == 1).count() as f64;
    let n0 = n - n1;
    let w = |c: f64| if c > 0.0 { n / (2.0 * c) } else { 1.0 };
    [w(n0), w(n1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Label, Relation, SparseAdjacency};

    fn tiny_graph() -> AttributedGraph {
        let adj = SparseAdjacency::from_edges(5, [(0, 1), (1, 2)]).unwrap();
        let features = DenseMatrix::from_rows(&[
            [0.1, 0.2],
            [0.3, -0.4],
            [0.5, 0.6],
            [-0.7, 0.8],
            [0.9, -1.0],
        ]);
        AttributedGraph::new(
            vec![Relation { name: "r".into(), adjacency: adj }],
            features,
            vec![Label::Normal, Label::Anomaly, Label::Normal, Label::Normal, Label::Anomaly],
        )
        .unwrap()
    }

    fn small_config() -> HpGcnConfig {
        HpGcnConfig {
            hidden_dim: 4,
            ..HpGcnConfig::default()
        }
    }

    #[test]
    fn defaults() {
        let c = HpGcnConfig::default();
        assert_eq!((c.k, c.hidden_dim, c.mode), (3, 64, Mode::Homo));
        assert_eq!(c.min_component_size, 1);
    }

    #[test]
    fn config_validation() {
        let bad = HpGcnConfig { k: 0, ..HpGcnConfig::default() };
        assert!(bad.validate(1).is_err());
        let hetero = HpGcnConfig { mode: Mode::Hetero, ..HpGcnConfig::default() };
        assert!(hetero.validate(1).is_err());
        assert!(hetero.validate(2).is_ok());
    }

    #[test]
    fn cheb_k1_is_linear() {
        let lap = NormalizedLaplacian::new(SparseAdjacency::from_edges(2, [(0, 1)]).unwrap());
        let mut params = ParamSet::new();
        let layer = ChebHighPassLayer {
            k: 1,
            d_in: 1,
            linear: Linear {
                weight: params.add("w", DenseMatrix::from_rows(&[[3.0]])),
                bias: params.add("b", DenseMatrix::from_rows(&[[0.5]])),
            },
        };
        let mut tape = Tape::new();
        let h = tape.constant(DenseMatrix::from_rows(&[[1.0], [-1.0]]));
        let out = layer.forward(&mut tape, &params, &lap, h).unwrap();
        assert_eq!(tape.value(out).as_slice(), &[3.5, -2.5]);
    }

    #[test]
    fn cheb_k2_stacks_propagated_block() {
        let lap = NormalizedLaplacian::new(SparseAdjacency::from_edges(2, [(0, 1)]).unwrap());
        let mut params = ParamSet::new();
        let layer = ChebHighPassLayer {
            k: 2,
            d_in: 1,
            linear: Linear {
                weight: params.add("w", DenseMatrix::identity(2)),
                bias: params.add("b", DenseMatrix::zeros(1, 2)),
            },
        };
        let mut tape = Tape::new();
        let h = tape.constant(DenseMatrix::from_rows(&[[1.0], [-1.0]]));
        let out = layer.forward(&mut tape, &params, &lap, h).unwrap();
        assert_eq!(tape.value(out), &DenseMatrix::from_rows(&[[1.0, 2.0], [-1.0, -2.0]]));
    }

    #[test]
    fn cheb_edgeless_repeats_input() {
        let lap = NormalizedLaplacian::new(SparseAdjacency::empty(2));
        let mut params = ParamSet::new();
        let layer = ChebHighPassLayer {
            k: 3,
            d_in: 1,
            linear: Linear {
                weight: params.add("w", DenseMatrix::identity(3)),
                bias: params.add("b", DenseMatrix::zeros(1, 3)),
            },
        };
        let mut tape = Tape::new();
        let h = tape.constant(DenseMatrix::from_rows(&[[2.0], [-3.0]]));
        let out = layer.forward(&mut tape, &params, &lap, h).unwrap();
        assert_eq!(tape.value(out), &DenseMatrix::from_rows(&[[2.0, 2.0, 2.0], [-3.0, -3.0, -3.0]]));
    }

    #[test]
    fn cheb_shape_error() {
        let lap = NormalizedLaplacian::new(SparseAdjacency::empty(3));
        let mut params = ParamSet::new();
        let layer = ChebHighPassLayer {
            k: 2,
            d_in: 1,
            linear: Linear {
                weight: params.add("w", DenseMatrix::zeros(2, 1)),
                bias: params.add("b", DenseMatrix::zeros(1, 1)),
            },
        };
        let mut tape = Tape::new();
        let h = tape.constant(DenseMatrix::zeros(2, 1));
        assert!(matches!(
            layer.forward(&mut tape, &params, &lap, h),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn forward_shapes_and_partition() {
        let g = tiny_graph();
        let cfg = small_config();
        let prep = PreparedGraph::new(&g, &cfg).unwrap();
        assert_eq!(prep.partition().isolated_nodes(), &[3, 4]);
        let model = HpGcnModel::for_graph(cfg, &g).unwrap();
        let logits = model.logits(&prep).unwrap();
        assert_eq!(logits.shape(), (5, 2));
        assert!(logits.is_finite());
    }

    #[test]
    fn ablation_routes_everything_through_filter() {
        let g = tiny_graph();
        let cfg = HpGcnConfig { separate_isolated: false, ..small_config() };
        let prep = PreparedGraph::new(&g, &cfg).unwrap();
        assert!(prep.partition().isolated_nodes().is_empty());
        assert_eq!(prep.operators()[0].n_nodes(), 5);
    }

    #[test]
    fn predict_examples() {
        let p = predict(&DenseMatrix::from_rows(&[[0.0, 0.0], [-10.0, 10.0]]));
        assert_eq!(p[0].label, 0);
        assert_eq!(p[0].anomaly_score, 0.5);
        assert_eq!(p[1].label, 1);
        assert!(p[1].anomaly_score > 0.999_999);

        let scores: Vec<f64> = [-1.0, 0.0, 0.5, 3.0]
            .iter()
            .map(|&z1| predict(&DenseMatrix::from_rows(&[[0.2, z1]]))[0].anomaly_score)
            .collect();
        assert!(scores.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn class_weight_formula() {
        let w = class_weights(&[0, 0, 0, 1]);
        assert_eq!(w, [4.0 / 6.0, 2.0]);
    }
}
