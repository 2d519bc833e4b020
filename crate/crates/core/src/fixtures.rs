//! Small seeded graphs for gradient checks and examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{build_adjacency, AttributedGraph, Label, Relation};
use crate::model::{class_weights, HpGcnConfig, HpGcnModel, PreparedGraph};
use crate::tensor::{grad_check, DenseMatrix, GradCheckOptions, GradCheckReport, ParamSet, Tape, Var};

pub const FIXTURE_NODES: usize = 12;
pub const FIXTURE_FEATURES: usize = 3;
/// Seed of the single-relation fixture used by `gradcheck`.
pub const HOMO_FIXTURE_SEED: u64 = 3;
/// Seed of the two-relation fixture used by `gradcheck`.
pub const HETERO_FIXTURE_SEED: u64 = 5;

/// 12 nodes, 3 features and `n_relations` independently drawn weighted
/// relations. Nodes 0–9 form a ring with random chords in every relation, so
/// they are connected; nodes 10 and 11 are isolated. Nodes 2, 7 and 11 are
/// anomalies.
pub fn fixture_graph(n_relations: usize, seed: u64) -> Result<AttributedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = FIXTURE_NODES;
    let mut relations = Vec::with_capacity(n_relations);
    for r in 0..n_relations {
        let mut edges = Vec::new();
        for u in 0..10 {
            edges.push((u, (u + 1) % 10, rng.random_range(0.5..2.0)));
            for v in u + 2..10 {
                if rng.random_bool(0.2) {
                    edges.push((u, v, rng.random_range(0.5..2.0)));
                }
            }
        }
        relations.push(Relation {
            name: format!("rel{r}"),
            adjacency: build_adjacency(n, edges)?,
        });
    }
    let data = (0..n * FIXTURE_FEATURES).map(|_| rng.random_range(-1.0..1.0)).collect();
    let features = DenseMatrix::from_vec(n, FIXTURE_FEATURES, data)?;
    let labels = (0..n)
        .map(|i| if [2, 7, 11].contains(&i) { Label::Anomaly } else { Label::Normal })
        .collect();
    AttributedGraph::new(relations, features, labels)
}

/// The single-relation gradient-check fixture.
pub fn homo_fixture() -> AttributedGraph {
    fixture_graph(1, HOMO_FIXTURE_SEED).expect("fixture is valid")
}

/// The two-relation gradient-check fixture.
pub fn hetero_fixture() -> AttributedGraph {
    fixture_graph(2, HETERO_FIXTURE_SEED).expect("fixture is valid")
}

/// Small model settings for fixtures: every branch present, narrow layers.
pub fn fixture_config(mode: crate::model::Mode) -> HpGcnConfig {
    HpGcnConfig {
        k: 3,
        hidden_dim: 5,
        mlp_layers_connected: 1,
        mlp_layers_isolated: 2,
        mlp_layers_head: 1,
        mode,
        ..HpGcnConfig::default()
    }
}

/// `g` with its first relation repeated `copies` times under new names, all
/// edge weights set to 1. Union and per-relation operators then coincide.
pub fn duplicated_relations(g: &AttributedGraph, copies: usize) -> Result<AttributedGraph> {
    let first = &g.relations()[0].adjacency;
    let relations = (0..copies)
        .map(|r| {
            Ok(Relation {
                name: format!("copy{r}"),
                adjacency: build_adjacency(g.n_nodes(), first.edges().map(|(u, v, _)| (u, v, 1.0)))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AttributedGraph::new(relations, g.features().clone(), g.labels().to_vec())
}

/// Copies every parameter of a homo model into a hetero model of the same
/// shape, giving each relation's filter the homo filter's weights.
pub fn tie_hetero_to_homo(homo: &HpGcnModel, hetero: &mut HpGcnModel) -> Result<()> {
    let source = homo.params();
    let records = hetero
        .params()
        .iter()
        .map(|p| {
            let name = match p.name.strip_prefix("filter.") {
                Some(rest) => format!("filter.0.{}", rest.split_once('.').map_or(rest, |(_, field)| field)),
                None => p.name.clone(),
            };
            let id = source
                .find(&name)
                .ok_or_else(|| Error::Checkpoint(format!("homo model has no tensor '{name}'")))?;
            Ok((p.name.clone(), source.get(id).value.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    hetero.params_mut().load_values(&records)
}

/// Finite-difference check of every parameter of a freshly initialised model
/// under the weighted cross-entropy over all labeled nodes.
pub fn check_model_gradients(g: &AttributedGraph, config: &HpGcnConfig, opts: GradCheckOptions) -> Result<GradCheckReport> {
    let prep = PreparedGraph::new(g, config)?;
    let mut model = HpGcnModel::for_graph(config.clone(), g)?;
    let rows: Vec<usize> = (0..g.n_nodes()).filter(|&i| g.labels()[i].class().is_some()).collect();
    let targets: Vec<usize> = rows.iter().map(|&i| g.labels()[i].class().unwrap()).collect();
    let weights = class_weights(&targets);

    // The checker perturbs a detached parameter set; each evaluation copies it
    // into the model before the forward pass.
    let mut params = model.params().clone();
    let report = grad_check(
        &mut params,
        |p| {
            model.params_mut().load_values(&p.values())?;
            let loss = model.loss_and_grad(&prep, &rows, &targets, weights)?;
            for (dst, src) in p.iter_mut().zip(model.params().iter()) {
                dst.grad = src.grad.clone();
            }
            Ok(loss)
        },
        opts,
    )?;
    Ok(report)
}

/// Finite-difference check of a single tape operation.
///
/// Every matrix in `inputs` becomes a parameter. `op` maps their tape
/// variables to an output, which is reduced to a scalar by a fixed random
/// linear functional `cᵀ Y w` so that every output entry carries a distinct
/// weight. The reduction is linear, so it adds no curvature of its own.
pub fn check_op_gradients<F>(inputs: Vec<DenseMatrix>, op: F, opts: GradCheckOptions) -> Result<GradCheckReport>
where
    F: for<'g> Fn(&mut Tape<'g>, &[Var]) -> Result<Var>,
{
    let mut params = ParamSet::new();
    let ids: Vec<_> = inputs
        .into_iter()
        .enumerate()
        .map(|(i, m)| params.add(format!("input{i}"), m))
        .collect();

    let shape = {
        let mut tape = Tape::new();
        let vars: Vec<Var> = ids.iter().map(|&id| tape.param(&params, id)).collect();
        let y = op(&mut tape, &vars)?;
        tape.shape(y)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut random = |r, c| {
        let data = (0..r * c).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::from_vec(r, c, data)
    };
    let left = random(1, shape.0)?;
    let right = random(shape.1, 1)?;

    grad_check(
        &mut params,
        |p| {
            let mut tape = Tape::new();
            let vars: Vec<Var> = ids.iter().map(|&id| tape.param(p, id)).collect();
            let y = op(&mut tape, &vars)?;
            let c = tape.constant(left.clone());
            let w = tape.constant(right.clone());
            let yw = tape.matmul(y, w)?;
            let out = tape.matmul(c, yw)?;
            tape.backward_params(out, p)?;
            Ok(tape.value(out).get(0, 0))
        },
        opts,
    )
}
