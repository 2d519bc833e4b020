use crate::error::{Error, Result};
use crate::graph::NormalizedLaplacian;
use crate::tensor::{DenseMatrix, ParamId, ParamSet};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

enum Op<'g> {
    Constant,
    Param(ParamId),
    MatMul(Var, Var),
    AddBias(Var, Var),
    Add(Var, Var),
    Relu(Var),
    ConcatCols(Vec<Var>),
    SelectRows(Var, Vec<usize>),
    MergeRows(Vec<(Var, Vec<usize>)>),
    MaxPool {
        inputs: Vec<Var>,
        argmax: Vec<usize>,
    },
    Laplacian(Var, &'g NormalizedLaplacian),
    CrossEntropy {
        logits: Var,
        probs: DenseMatrix,
        rows: Vec<usize>,
        targets: Vec<usize>,
        class_weights: [f64; 2],
    },
}

struct Node<'g> {
    value: DenseMatrix,
    op: Op<'g>,
    /// Whether a parameter is upstream of this value.
    depends_on_param: bool,
}

impl Op<'_> {
    fn inputs(&self) -> Vec<Var> {
        match self {
            Op::Constant | Op::Param(_) => Vec::new(),
            Op::MatMul(a, b) | Op::AddBias(a, b) | Op::Add(a, b) => vec![*a, *b],
            Op::Relu(x) | Op::SelectRows(x, _) | Op::Laplacian(x, _) => vec![*x],
            Op::ConcatCols(parts) => parts.clone(),
            Op::MergeRows(parts) => parts.iter().map(|(v, _)| *v).collect(),
            Op::MaxPool { inputs, .. } => inputs.clone(),
            Op::CrossEntropy { logits, .. } => vec![*logits],
        }
    }
}

/// Record of a forward computation.
///
/// Operations append nodes in execution order; [`Tape::backward`] visits them
/// in exactly the reverse order, summing gradients where a value fans out.
/// The lifetime ties the tape to the Laplacian operators it references.
#[derive(Default)]
pub struct Tape<'g> {
    nodes: Vec<Node<'g>>,
}

fn shape_err(op: &'static str, lhs: (usize, usize), rhs: (usize, usize)) -> Error {
    Error::ShapeMismatch { op, lhs, rhs }
}

impl<'g> Tape<'g> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: DenseMatrix, op: Op<'g>) -> Var {
        let depends_on_param =
            matches!(op, Op::Param(_)) || op.inputs().iter().any(|v| self.nodes[v.0].depends_on_param);
        self.nodes.push(Node {
            value,
            op,
            depends_on_param,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &DenseMatrix {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].value.shape()
    }

    /// A value that receives no parameter gradient (its gradient is still
    /// reported by [`Tape::backward`]).
    pub fn constant(&mut self, value: DenseMatrix) -> Var {
        self.push(value, Op::Constant)
    }

    /// Current value of a parameter, linked back to it for gradients.
    pub fn param(&mut self, params: &ParamSet, id: ParamId) -> Var {
        self.push(params.get(id).value.clone(), Op::Param(id))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.value(a).matmul(self.value(b))?;
        Ok(self.push(out, Op::MatMul(a, b)))
    }

    /// `x + 1·b` with `b` a `1 × d` row broadcast over rows.
    pub fn add_bias(&mut self, x: Var, bias: Var) -> Result<Var> {
        let (xs, bs) = (self.shape(x), self.shape(bias));
        if bs.0 != 1 || bs.1 != xs.1 {
            return Err(shape_err("add_bias", xs, bs));
        }
        let mut out = self.value(x).clone();
        let b = self.value(bias).row(0).to_vec();
        for r in 0..out.rows() {
            for (o, bv) in out.row_mut(r).iter_mut().zip(&b) {
                *o += bv;
            }
        }
        Ok(self.push(out, Op::AddBias(x, bias)))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let mut out = self.value(a).clone();
        out.add_assign(self.value(b))?;
        Ok(self.push(out, Op::Add(a, b)))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let mut out = self.value(x).clone();
        out.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0));
        self.push(out, Op::Relu(x))
    }

    /// Horizontal concatenation of blocks with equal row counts.
    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let first = *parts
            .first()
            .ok_or_else(|| Error::InvalidConfig("concat of zero blocks".into()))?;
        let rows = self.shape(first).0;
        for &p in parts {
            if self.shape(p).0 != rows {
                return Err(shape_err("concat_cols", self.shape(first), self.shape(p)));
            }
        }
        let cols: usize = parts.iter().map(|&p| self.shape(p).1).sum();
        let mut out = DenseMatrix::zeros(rows, cols);
        for r in 0..rows {
            let mut offset = 0;
            for &p in parts {
                let src = self.value(p).row(r);
                out.row_mut(r)[offset..offset + src.len()].copy_from_slice(src);
                offset += src.len();
            }
        }
        Ok(self.push(out, Op::ConcatCols(parts.to_vec())))
    }

    /// Rows `indices` of `x`, in order. Repeated indices are allowed.
    pub fn select_rows(&mut self, x: Var, indices: &[usize]) -> Result<Var> {
        let rows = self.shape(x).0;
        if let Some(&bad) = indices.iter().find(|&&i| i >= rows) {
            return Err(Error::IndexOutOfRange { index: bad, n_nodes: rows });
        }
        let out = self.value(x).select_rows(indices);
        Ok(self.push(out, Op::SelectRows(x, indices.to_vec())))
    }

    /// Scatters each block's rows to the given global rows of an
    /// `n_rows × d` output. Every output row must be written exactly once.
    pub fn merge_rows(&mut self, n_rows: usize, parts: &[(Var, &[usize])]) -> Result<Var> {
        let cols = parts
            .iter()
            .find(|(v, _)| self.shape(*v).0 > 0)
            .map(|(v, _)| self.shape(*v).1)
            .ok_or_else(|| Error::InvalidConfig("merge of zero rows".into()))?;
        let mut written = vec![false; n_rows];
        let mut out = DenseMatrix::zeros(n_rows, cols);
        for &(v, targets) in parts {
            let value = self.value(v);
            if value.rows() != targets.len() || (value.rows() > 0 && value.cols() != cols) {
                return Err(shape_err("merge_rows", value.shape(), (targets.len(), cols)));
            }
            for (local, &global) in targets.iter().enumerate() {
                if global >= n_rows {
                    return Err(Error::IndexOutOfRange { index: global, n_nodes: n_rows });
                }
                if std::mem::replace(&mut written[global], true) {
                    return Err(Error::InvalidConfig(format!("row {global} written twice")));
                }
                out.row_mut(global).copy_from_slice(value.row(local));
            }
        }
        if let Some(missing) = written.iter().position(|w| !w) {
            return Err(Error::InvalidConfig(format!("row {missing} never written")));
        }
        let parts = parts.iter().map(|&(v, t)| (v, t.to_vec())).collect();
        Ok(self.push(out, Op::MergeRows(parts)))
    }

    /// Elementwise maximum over same-shaped inputs. The gradient of each
    /// entry goes to the first input attaining the maximum.
    pub fn max_pool(&mut self, inputs: &[Var]) -> Result<Var> {
        let first = *inputs
            .first()
            .ok_or_else(|| Error::InvalidConfig("max pool over zero inputs".into()))?;
        let shape = self.shape(first);
        for &v in inputs {
            if self.shape(v) != shape {
                return Err(shape_err("max_pool", shape, self.shape(v)));
            }
        }
        let mut out = self.value(first).clone();
        let mut argmax = vec![0usize; out.as_slice().len()];
        for (k, &v) in inputs.iter().enumerate().skip(1) {
            for (e, (o, &x)) in out.as_mut_slice().iter_mut().zip(self.nodes[v.0].value.as_slice()).enumerate() {
                if x > *o {
                    *o = x;
                    argmax[e] = k;
                }
            }
        }
        Ok(self.push(
            out,
            Op::MaxPool {
                inputs: inputs.to_vec(),
                argmax,
            },
        ))
    }

    /// `L X` for a fixed normalized Laplacian.
    pub fn laplacian(&mut self, x: Var, lap: &'g NormalizedLaplacian) -> Result<Var> {
        let out = lap.apply_matrix(self.value(x))?;
        Ok(self.push(out, Op::Laplacian(x, lap)))
    }

    /// Weighted two-class softmax cross-entropy averaged over `rows`:
    /// `(1/|rows|) Σ_r w_{y_r} · (−log softmax(logits_r)[y_r])`.
    pub fn softmax_cross_entropy(
        &mut self,
        logits: Var,
        rows: &[usize],
        targets: &[usize],
        class_weights: [f64; 2],
    ) -> Result<Var> {
        let z = self.value(logits);
        if z.cols() != 2 {
            return Err(shape_err("softmax_cross_entropy", z.shape(), (z.rows(), 2)));
        }
        if rows.is_empty() {
            return Err(Error::InvalidConfig("loss mask is empty".into()));
        }
        if rows.len() != targets.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                actual: targets.len(),
            });
        }
        let mut probs = DenseMatrix::zeros(rows.len(), 2);
        let mut total = 0.0;
        for (k, (&r, &y)) in rows.iter().zip(targets).enumerate() {
            if r >= z.rows() {
                return Err(Error::IndexOutOfRange { index: r, n_nodes: z.rows() });
            }
            if y > 1 {
                return Err(Error::InvalidConfig(format!("label {y} is not binary")));
            }
            let row = z.row(r);
            let m = row[0].max(row[1]);
            let lse = m + ((row[0] - m).exp() + (row[1] - m).exp()).ln();
            probs.set(k, 0, (row[0] - lse).exp());
            probs.set(k, 1, (row[1] - lse).exp());
            total += class_weights[y] * (lse - row[y]);
        }
        let loss = DenseMatrix::from_rows(&[[total / rows.len() as f64]]);
        Ok(self.push(
            loss,
            Op::CrossEntropy {
                logits,
                probs,
                rows: rows.to_vec(),
                targets: targets.to_vec(),
                class_weights,
            },
        ))
    }

    /// Reverse pass from a `1 × 1` output.
    pub fn backward(&self, output: Var) -> Result<Gradients> {
        self.reverse(output, false)
    }

    /// With `params_only`, values with no parameter upstream receive no
    /// gradient, which skips backpropagating into fixed inputs.
    fn reverse(&self, output: Var, params_only: bool) -> Result<Gradients> {
        if self.shape(output) != (1, 1) {
            return Err(shape_err("backward", self.shape(output), (1, 1)));
        }
        let mut grads: Vec<Option<DenseMatrix>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[output.0] = Some(DenseMatrix::from_rows(&[[1.0]]));

        for idx in (0..=output.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            let wanted = |v: &Var| !params_only || self.nodes[v.0].depends_on_param;
            let accumulate = |grads: &mut [Option<DenseMatrix>], v: Var, gv: DenseMatrix| {
                if wanted(&v) {
                    accumulate(grads, v, gv);
                }
            };
            match &node.op {
                Op::Constant | Op::Param(_) => {}
                Op::MatMul(a, b) => {
                    if wanted(a) {
                        accumulate(&mut grads, *a, g.matmul_t(self.value(*b))?);
                    }
                    if wanted(b) {
                        accumulate(&mut grads, *b, self.value(*a).t_matmul(&g)?);
                    }
                }
                Op::AddBias(x, b) => {
                    let mut gb = DenseMatrix::zeros(1, g.cols());
                    for r in 0..g.rows() {
                        for (s, v) in gb.row_mut(0).iter_mut().zip(g.row(r)) {
                            *s += v;
                        }
                    }
                    accumulate(&mut grads, *b, gb);
                    accumulate(&mut grads, *x, g.clone());
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, g.clone());
                    accumulate(&mut grads, *b, g.clone());
                }
                Op::Relu(x) => {
                    let mut gx = g.clone();
                    for (gv, &y) in gx.as_mut_slice().iter_mut().zip(node.value.as_slice()) {
                        if y <= 0.0 {
                            *gv = 0.0;
                        }
                    }
                    accumulate(&mut grads, *x, gx);
                }
                Op::ConcatCols(parts) => {
                    let mut offset = 0;
                    for &p in parts {
                        let cols = self.shape(p).1;
                        if !wanted(&p) {
                            offset += cols;
                            continue;
                        }
                        let mut gp = DenseMatrix::zeros(g.rows(), cols);
                        for r in 0..g.rows() {
                            gp.row_mut(r).copy_from_slice(&g.row(r)[offset..offset + cols]);
                        }
                        offset += cols;
                        accumulate(&mut grads, p, gp);
                    }
                }
                Op::SelectRows(x, indices) => {
                    let (rows, cols) = self.shape(*x);
                    let mut gx = DenseMatrix::zeros(rows, cols);
                    for (k, &src) in indices.iter().enumerate() {
                        for (o, v) in gx.row_mut(src).iter_mut().zip(g.row(k)) {
                            *o += v;
                        }
                    }
                    accumulate(&mut grads, *x, gx);
                }
                Op::MergeRows(parts) => {
                    for (v, targets) in parts {
                        let gp = if targets.is_empty() {
                            DenseMatrix::zeros(0, self.shape(*v).1)
                        } else {
                            g.select_rows(targets)
                        };
                        accumulate(&mut grads, *v, gp);
                    }
                }
                Op::MaxPool { inputs, argmax } => {
                    let (rows, cols) = g.shape();
                    let mut routed: Vec<DenseMatrix> = inputs.iter().map(|_| DenseMatrix::zeros(rows, cols)).collect();
                    for (e, (&k, &gv)) in argmax.iter().zip(g.as_slice()).enumerate() {
                        routed[k].as_mut_slice()[e] = gv;
                    }
                    for (&v, gi) in inputs.iter().zip(routed) {
                        accumulate(&mut grads, v, gi);
                    }
                }
                Op::Laplacian(x, lap) => {
                    // L is symmetric, so the adjoint is L itself.
                    accumulate(&mut grads, *x, lap.apply_matrix(&g)?);
                }
                Op::CrossEntropy {
                    logits,
                    probs,
                    rows,
                    targets,
                    class_weights,
                } => {
                    let scale = g.get(0, 0) / rows.len() as f64;
                    let (n, c) = self.shape(*logits);
                    let mut gz = DenseMatrix::zeros(n, c);
                    for (k, (&r, &y)) in rows.iter().zip(targets).enumerate() {
                        let w = class_weights[y] * scale;
                        for class in 0..2 {
                            let onehot = if class == y { 1.0 } else { 0.0 };
                            let cur = gz.get(r, class);
                            gz.set(r, class, cur + w * (probs.get(k, class) - onehot));
                        }
                    }
                    accumulate(&mut grads, *logits, gz);
                }
            }
            grads[idx] = Some(g);
        }
        Ok(Gradients { grads })
    }

    /// Zeroes every parameter gradient, runs the reverse pass, and adds the
    /// gradient of each recorded parameter use into `params`. Values with no
    /// parameter upstream, such as propagated input features, get no gradient
    /// in the returned [`Gradients`].
    pub fn backward_params(&self, output: Var, params: &mut ParamSet) -> Result<Gradients> {
        params.zero_grad();
        let grads = self.reverse(output, true)?;
        for (idx, node) in self.nodes.iter().enumerate() {
            if let (Op::Param(id), Some(g)) = (&node.op, &grads.grads[idx]) {
                params.get_mut(*id).grad.add_assign(g)?;
            }
        }
        Ok(grads)
    }
}

fn accumulate(grads: &mut [Option<DenseMatrix>], v: Var, g: DenseMatrix) {
    match &mut grads[v.0] {
        Some(existing) => existing
            .add_assign(&g)
            .expect("gradient shape matches its value"),
        slot @ None => *slot = Some(g),
    }
}

/// Gradients of one output with respect to every recorded value.
pub struct Gradients {
    grads: Vec<Option<DenseMatrix>>,
}

impl Gradients {
    /// `None` when `v` does not influence the output.
    pub fn get(&self, v: Var) -> Option<&DenseMatrix> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }
}
