use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

use super::dense::DenseMatrix;

/// Handle to a parameter inside a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamId(usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Slot {
    name: String,
    value: DenseMatrix,
    grad: DenseMatrix,
    m: DenseMatrix,
    v: DenseMatrix,
}

/// Named trainable tensors with gradient accumulators and Adam moments.
///
/// Names are namespaced by convention (`"E.w1"`, `"G.w2"`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamStore {
    slots: Vec<Slot>,
    step: u64,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: DenseMatrix) -> Result<ParamId> {
        let name = name.into();
        if self.slots.iter().any(|s| s.name == name) {
            return Err(Error::Config(format!("duplicate parameter name {name}")));
        }
        let (r, c) = value.shape();
        self.slots.push(Slot {
            name,
            value,
            grad: DenseMatrix::zeros(r, c),
            m: DenseMatrix::zeros(r, c),
            v: DenseMatrix::zeros(r, c),
        });
        Ok(ParamId(self.slots.len() - 1))
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.slots.iter().position(|s| s.name == name).map(ParamId)
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> + '_ {
        (0..self.slots.len()).map(ParamId)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.slots[id.0].name
    }

    pub fn value(&self, id: ParamId) -> &DenseMatrix {
        &self.slots[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut DenseMatrix {
        &mut self.slots[id.0].value
    }

    pub fn grad(&self, id: ParamId) -> &DenseMatrix {
        &self.slots[id.0].grad
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn accumulate_grad(&mut self, id: ParamId, g: &DenseMatrix) -> Result<()> {
        self.slots[id.0].grad.add_assign(g)
    }

    pub fn zero_grads(&mut self) {
        for s in &mut self.slots {
            s.grad.fill(0.0);
        }
    }

    /// Squared L2 norm of the gradients of parameters whose name starts with
    /// `prefix`.
    pub fn grad_norm_sq(&self, prefix: &str) -> f64 {
        self.slots
            .iter()
            .filter(|s| s.name.starts_with(prefix))
            .map(|s| s.grad.data().iter().map(|g| g * g).sum::<f64>())
            .sum()
    }

    /// Copies values (not optimizer state) from `other`, matched by position.
    pub fn copy_values_from(&mut self, other: &ParamStore) {
        for (a, b) in self.slots.iter_mut().zip(&other.slots) {
            a.value = b.value.clone();
        }
    }

    pub fn num_scalars(&self) -> usize {
        self.slots.iter().map(|s| s.value.data().len()).sum()
    }
}

/// Glorot/Xavier uniform initialization: `U(-a, a)`, `a = sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform(rows: usize, cols: usize, rng: &mut Rng) -> DenseMatrix {
    let limit = (6.0 / (rows + cols).max(1) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-limit..=limit))
        .collect();
    DenseMatrix::new(rows, cols, data).expect("length matches shape")
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update over every parameter, then zeroes the
/// gradients. A non-finite gradient aborts before anything is modified.
pub fn adam_step(params: &mut ParamStore, cfg: &AdamConfig) -> Result<()> {
    for s in &params.slots {
        if !s.grad.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite gradient for parameter {}",
                s.name
            )));
        }
    }
    params.step += 1;
    let t = params.step as f64;
    let bc1 = 1.0 - cfg.beta1.powf(t);
    let bc2 = 1.0 - cfg.beta2.powf(t);
    for s in &mut params.slots {
        let n = s.value.data().len();
        let (value, grad, m, v) = (
            s.value.data_mut(),
            s.grad.data_mut(),
            s.m.data_mut(),
            s.v.data_mut(),
        );
        for k in 0..n {
            let g = grad[k];
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            value[k] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
            grad[k] = 0.0;
        }
    }
    Ok(())
}
