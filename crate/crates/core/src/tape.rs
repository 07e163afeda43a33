//! Reverse-mode differentiation over a recorded computation.
//!
//! A [`Tape`] records every primitive applied during a forward pass as a
//! linear sequence of nodes; [`Tape::backward`] replays the sequence in
//! reverse and accumulates the gradient of a designated scalar node into the
//! owning [`ParamStore`]. Recurrent models are differentiated by recording
//! the fully unrolled computation (sequence steps times attractor
//! iterations); nothing is truncated.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::matrix::Matrix;

/// Handle to a parameter registered in a [`ParamStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot(usize);

impl Slot {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StoreError {
    UnknownParam(String),
    DuplicateParam(String),
}

impl core::fmt::Display for StoreError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StoreError::UnknownParam(name) => write!(f, "unknown parameter `{name}`"),
            StoreError::DuplicateParam(name) => write!(f, "parameter `{name}` already registered"),
        }
    }
}

/// Named parameter matrices with per-parameter gradient accumulators.
///
/// Insertion order is part of the store's identity: snapshots and optimizer
/// traversals follow it, which keeps every run bit-reproducible.
#[derive(Clone, Debug)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Matrix>,
    grads: Vec<Matrix>,
}

impl ParamStore {
    pub fn new() -> Self {
        ParamStore { names: Vec::new(), values: Vec::new(), grads: Vec::new() }
    }

    pub fn add(&mut self, name: &str, value: Matrix) -> Result<Slot, StoreError> {
        if self.names.iter().any(|n| n == name) {
            return Err(StoreError::DuplicateParam(name.to_string()));
        }
        let slot = Slot(self.values.len());
        self.names.push(name.to_string());
        self.grads.push(Matrix::zeros(value.rows(), value.cols()));
        self.values.push(value);
        Ok(slot)
    }

    pub fn slot(&self, name: &str) -> Result<Slot, StoreError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(Slot)
            .ok_or_else(|| StoreError::UnknownParam(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self, slot: Slot) -> &str {
        &self.names[slot.0]
    }

    #[inline]
    pub fn value(&self, slot: Slot) -> &Matrix {
        &self.values[slot.0]
    }

    pub fn value_mut(&mut self, slot: Slot) -> &mut Matrix {
        &mut self.values[slot.0]
    }

    #[inline]
    pub fn grad(&self, slot: Slot) -> &Matrix {
        &self.grads[slot.0]
    }

    pub fn accumulate_grad(&mut self, slot: Slot, delta: &Matrix) {
        self.grads[slot.0]
            .add_assign(delta)
            .expect("gradient shape must match parameter shape");
    }

    pub fn clear_grads(&mut self) {
        for g in &mut self.grads {
            for v in g.data_mut() {
                *v = 0.0;
            }
        }
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        (0..self.values.len()).map(Slot)
    }

    /// Bit-exact copy of all parameter values, in insertion order.
    pub fn snapshot(&self) -> Vec<Matrix> {
        self.values.clone()
    }

    pub fn restore(&mut self, snapshot: &[Matrix]) {
        assert_eq!(snapshot.len(), self.values.len(), "snapshot size mismatch");
        for (v, s) in self.values.iter_mut().zip(snapshot) {
            assert_eq!(v.shape(), s.shape(), "snapshot shape mismatch");
            *v = s.clone();
        }
    }
}

impl Default for ParamStore {
    fn default() -> Self {
        Self::new()
    }
}

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

#[derive(Clone, Debug)]
enum Op {
    Const,
    Param(Slot),
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    /// Broadcast-add of a column vector (second input) over all columns.
    AddBias(Var, Var),
    /// Elementwise `alpha * x + beta`.
    ScaleAdd(Var, f64, f64),
    Tanh(Var),
    Sigmoid(Var),
    AtanhClamped(Var),
    /// `(x + x^T) / 2`.
    Symmetrize(Var),
    ConcatRows(Var, Var),
    /// Sum of all entries, a 1x1 node.
    SumAll(Var),
    /// Sum of squared differences of the two inputs, a 1x1 node.
    SqErr(Var, Var),
}

/// A recorded forward computation.
pub struct Tape {
    values: Vec<Matrix>,
    ops: Vec<Op>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { values: Vec::new(), ops: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    #[inline]
    pub fn value(&self, v: Var) -> &Matrix {
        &self.values[v.0]
    }

    fn push(&mut self, value: Matrix, op: Op) -> Var {
        let id = Var(self.values.len());
        self.values.push(value);
        self.ops.push(op);
        id
    }

    /// A leaf that receives no gradient.
    pub fn constant(&mut self, value: Matrix) -> Var {
        self.push(value, Op::Const)
    }

    /// A leaf bound to a store parameter; its gradient is accumulated into
    /// the store by [`Tape::backward`].
    pub fn param(&mut self, store: &ParamStore, slot: Slot) -> Var {
        self.push(store.value(slot).clone(), Op::Param(slot))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).matmul(self.value(b)).expect("tape matmul");
        self.push(value, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).add(self.value(b)).expect("tape add");
        self.push(value, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).sub(self.value(b)).expect("tape sub");
        self.push(value, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).hadamard(self.value(b)).expect("tape mul");
        self.push(value, Op::Mul(a, b))
    }

    pub fn add_bias(&mut self, a: Var, bias: Var) -> Var {
        let value = self.value(a).add_col_broadcast(self.value(bias)).expect("tape add_bias");
        self.push(value, Op::AddBias(a, bias))
    }

    pub fn scale_add(&mut self, a: Var, alpha: f64, beta: f64) -> Var {
        let value = self.value(a).scale_add(alpha, beta);
        self.push(value, Op::ScaleAdd(a, alpha, beta))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let value = self.value(a).map(math::tanh);
        self.push(value, Op::Tanh(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let value = self.value(a).map(math::sigmoid);
        self.push(value, Op::Sigmoid(a))
    }

    pub fn atanh_clamped(&mut self, a: Var) -> Var {
        let value = self.value(a).map(math::atanh_clamped);
        self.push(value, Op::AtanhClamped(a))
    }

    pub fn symmetrize(&mut self, a: Var) -> Var {
        let value = self.value(a).symmetrized().expect("tape symmetrize");
        self.push(value, Op::Symmetrize(a))
    }

    pub fn concat_rows(&mut self, a: Var, b: Var) -> Var {
        let value = self.value(a).concat_rows(self.value(b)).expect("tape concat_rows");
        self.push(value, Op::ConcatRows(a, b))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let value = Matrix::from_vec(1, 1, vec![self.value(a).sum()]);
        self.push(value, Op::SumAll(a))
    }

    pub fn sq_err(&mut self, a: Var, target: Var) -> Var {
        let diff = self.value(a).sub(self.value(target)).expect("tape sq_err");
        let value = Matrix::from_vec(1, 1, vec![diff.frob_sq()]);
        self.push(value, Op::SqErr(a, target))
    }

    /// Accumulate `d loss / d param` into the store for every parameter leaf.
    ///
    /// `loss` must be a 1x1 node. Gradients add onto whatever the store
    /// already holds, so clear between unrelated passes.
    pub fn backward(&self, loss: Var, store: &mut ParamStore) {
        assert_eq!(
            self.value(loss).shape(),
            (1, 1),
            "backward requires a scalar loss node"
        );
        let mut grads: Vec<Option<Matrix>> = vec![None; self.values.len()];
        grads[loss.0] = Some(Matrix::filled(1, 1, 1.0));

        for id in (0..self.ops.len()).rev() {
            let g = match grads[id].take() {
                Some(g) => g,
                None => continue,
            };
            match self.ops[id] {
                Op::Const => {}
                Op::Param(slot) => store.accumulate_grad(slot, &g),
                Op::MatMul(a, b) => {
                    let da = g.matmul_nt(self.value(b)).expect("matmul backward lhs");
                    let db = self.value(a).matmul_tn(&g).expect("matmul backward rhs");
                    accumulate(&mut grads, a, da);
                    accumulate(&mut grads, b, db);
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, a, g.clone());
                    accumulate(&mut grads, b, g);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, b, g.scale_add(-1.0, 0.0));
                    accumulate(&mut grads, a, g);
                }
                Op::Mul(a, b) => {
                    let da = g.hadamard(self.value(b)).expect("mul backward lhs");
                    let db = g.hadamard(self.value(a)).expect("mul backward rhs");
                    accumulate(&mut grads, a, da);
                    accumulate(&mut grads, b, db);
                }
                Op::AddBias(a, bias) => {
                    accumulate(&mut grads, bias, g.row_sums());
                    accumulate(&mut grads, a, g);
                }
                Op::ScaleAdd(a, alpha, _beta) => {
                    accumulate(&mut grads, a, g.scale_add(alpha, 0.0));
                }
                Op::Tanh(a) => {
                    let dy = self.value(id_of(id)).map(math::tanh_deriv_from_output);
                    accumulate(&mut grads, a, g.hadamard(&dy).expect("tanh backward"));
                }
                Op::Sigmoid(a) => {
                    let dy = self.value(id_of(id)).map(math::sigmoid_deriv_from_output);
                    accumulate(&mut grads, a, g.hadamard(&dy).expect("sigmoid backward"));
                }
                Op::AtanhClamped(a) => {
                    let dx = self.value(a).map(math::atanh_clamped_deriv);
                    accumulate(&mut grads, a, g.hadamard(&dx).expect("atanh backward"));
                }
                Op::Symmetrize(a) => {
                    let gt = g.transpose();
                    let sym = g.add(&gt).expect("symmetrize backward").scale_add(0.5, 0.0);
                    accumulate(&mut grads, a, sym);
                }
                Op::ConcatRows(a, b) => {
                    let (ra, cols) = (self.value(a).rows(), self.value(a).cols());
                    let rb = self.value(b).rows();
                    let mut ga = Matrix::zeros(ra, cols);
                    ga.data_mut().copy_from_slice(&g.data()[..ra * cols]);
                    let mut gb = Matrix::zeros(rb, cols);
                    gb.data_mut().copy_from_slice(&g.data()[ra * cols..]);
                    accumulate(&mut grads, a, ga);
                    accumulate(&mut grads, b, gb);
                }
                Op::SumAll(a) => {
                    let (r, c) = self.value(a).shape();
                    accumulate(&mut grads, a, Matrix::filled(r, c, g.scalar()));
                }
                Op::SqErr(a, target) => {
                    let diff = self
                        .value(a)
                        .sub(self.value(target))
                        .expect("sq_err backward");
                    let scale = 2.0 * g.scalar();
                    accumulate(&mut grads, a, diff.scale_add(scale, 0.0));
                    accumulate(&mut grads, target, diff.scale_add(-scale, 0.0));
                }
            }
        }
    }
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

#[inline]
fn id_of(id: usize) -> Var {
    Var(id)
}

fn accumulate(grads: &mut [Option<Matrix>], target: Var, delta: Matrix) {
    match &mut grads[target.0] {
        Some(existing) => existing.add_assign(&delta).expect("gradient accumulation"),
        slot @ None => *slot = Some(delta),
    }
}
