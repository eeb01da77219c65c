//! Policy and value networks: small dense MLPs with tanh hidden layers and
//! hand-written backpropagation in double precision.
//!
//! The policy head emits 4 logits, the value head a scalar. Final layers are
//! zero-initialized, so an untrained policy is exactly uniform.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::Action;
use crate::heuristics::RuleMask;

use super::LearnerError;

pub const ACTION_DIM: usize = 4;

/// One affine layer; `w` is (out, in).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl Dense {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        Self {
            w: Array2::zeros((out_dim, in_dim)),
            b: Array1::zeros(out_dim),
        }
    }

    fn uniform(out_dim: usize, in_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let scale = 1.0 / (in_dim as f64).sqrt();
        Self {
            w: Array2::from_shape_fn((out_dim, in_dim), |_| rng.random_range(-scale..scale)),
            b: Array1::zeros(out_dim),
        }
    }

    pub fn param_count(&self) -> usize {
        self.w.len() + self.b.len()
    }
}

/// Dense MLP with tanh on every layer except the last.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

impl Mlp {
    /// `dims` runs input -> hidden... -> output. The final layer starts at
    /// zero when `zero_last` is set.
    pub fn init(dims: &[usize], rng: &mut ChaCha8Rng, zero_last: bool) -> Self {
        assert!(dims.len() >= 2);
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, pair)| {
                if zero_last && i == dims.len() - 2 {
                    Dense::zeros(pair[1], pair[0])
                } else {
                    Dense::uniform(pair[1], pair[0], rng)
                }
            })
            .collect();
        Self { layers }
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut x = Array1::from_iter(input.iter().copied());
        for (i, layer) in self.layers.iter().enumerate() {
            x = layer.w.dot(&x) + &layer.b;
            if i + 1 < self.layers.len() {
                x.mapv_inplace(f64::tanh);
            }
        }
        x.to_vec()
    }

    /// Batched forward keeping every post-activation for backprop.
    /// `inputs` is (n, in_dim); the cache holds (n, dim) matrices.
    pub fn forward_batch(&self, inputs: &Array2<f64>) -> MlpCache {
        let mut activations = Vec::with_capacity(self.layers.len());
        let mut x = inputs.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            x = x.dot(&layer.w.t()) + &layer.b;
            if i + 1 < self.layers.len() {
                x.mapv_inplace(f64::tanh);
            }
            activations.push(x.clone());
        }
        MlpCache { activations }
    }

    /// Backpropagate `grad_out` (n, out_dim) through the cached forward
    /// pass, returning per-layer gradients.
    pub fn backward(
        &self,
        inputs: &Array2<f64>,
        cache: &MlpCache,
        grad_out: &Array2<f64>,
    ) -> Vec<Dense> {
        let n_layers = self.layers.len();
        let mut grads: Vec<Dense> = self
            .layers
            .iter()
            .map(|l| Dense::zeros(l.w.nrows(), l.w.ncols()))
            .collect();
        let mut delta = grad_out.clone();
        for i in (0..n_layers).rev() {
            let layer_input = if i == 0 {
                inputs
            } else {
                &cache.activations[i - 1]
            };
            grads[i].w = delta.t().dot(layer_input);
            grads[i].b = delta.sum_axis(Axis(0));
            if i > 0 {
                // Propagate through the preceding tanh.
                let upstream = delta.dot(&self.layers[i].w);
                let act = &cache.activations[i - 1];
                delta = upstream * act.mapv(|a| 1.0 - a * a);
            }
        }
        grads
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }
}

pub struct MlpCache {
    /// Post-activation outputs per layer; the last entry is the linear head.
    pub activations: Vec<Array2<f64>>,
}

impl MlpCache {
    pub fn output(&self) -> &Array2<f64> {
        self.activations.last().unwrap()
    }
}

/// Independent policy and value networks over a flattened observation.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub obs_dim: usize,
    pub hidden: Vec<usize>,
    pub policy: Mlp,
    pub value: Mlp,
}

impl PolicyParams {
    pub fn init(obs_dim: usize, hidden: &[usize], seed: u64) -> Self {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut policy_dims = vec![obs_dim];
        policy_dims.extend_from_slice(hidden);
        policy_dims.push(ACTION_DIM);
        let mut value_dims = vec![obs_dim];
        value_dims.extend_from_slice(hidden);
        value_dims.push(1);
        Self {
            obs_dim,
            hidden: hidden.to_vec(),
            policy: Mlp::init(&policy_dims, &mut rng, true),
            value: Mlp::init(&value_dims, &mut rng, true),
        }
    }

    /// Action probabilities (softmax over logits) and value estimate.
    pub fn forward(&self, obs: &[f64]) -> Result<([f64; ACTION_DIM], f64), LearnerError> {
        if obs.len() != self.obs_dim {
            return Err(LearnerError::ShapeMismatch {
                expected: self.obs_dim,
                got: obs.len(),
            });
        }
        let logits = self.policy.forward(obs);
        let (_, probs) = log_softmax(&logits.clone().try_into().unwrap(), &[true; 4]);
        let value = self.value.forward(obs)[0];
        Ok((probs, value))
    }

    /// Raw policy logits, for masked distributions.
    pub fn logits(&self, obs: &[f64]) -> Result<[f64; ACTION_DIM], LearnerError> {
        if obs.len() != self.obs_dim {
            return Err(LearnerError::ShapeMismatch {
                expected: self.obs_dim,
                got: obs.len(),
            });
        }
        Ok(self.policy.forward(obs).try_into().unwrap())
    }

    pub fn param_count(&self) -> usize {
        self.policy.param_count() + self.value.param_count()
    }

    /// Canonical flat layout: policy layers then value layers, each layer
    /// row-major weights followed by biases. Used by the checkpoint format
    /// and the finite-difference tests.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for net in [&self.policy, &self.value] {
            for layer in &net.layers {
                out.extend(layer.w.iter());
                out.extend(layer.b.iter());
            }
        }
        out
    }

    /// Rebuild parameters from the canonical flat layout.
    pub fn assign_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count());
        let mut offset = 0;
        for net in [&mut self.policy, &mut self.value] {
            for layer in &mut net.layers {
                for w in layer.w.iter_mut() {
                    *w = flat[offset];
                    offset += 1;
                }
                for b in layer.b.iter_mut() {
                    *b = flat[offset];
                    offset += 1;
                }
            }
        }
    }
}

/// Log-softmax restricted to the masked-in actions. Masked-out entries get
/// probability zero. An all-masked vector falls back to the full softmax,
/// mirroring the trapped-snake fallback in [`crate::heuristics::apply_mask`].
pub fn log_softmax(
    logits: &[f64; ACTION_DIM],
    valid: &[bool; ACTION_DIM],
) -> ([f64; ACTION_DIM], [f64; ACTION_DIM]) {
    let valid = if valid.iter().any(|&v| v) {
        *valid
    } else {
        [true; ACTION_DIM]
    };
    let max = logits
        .iter()
        .zip(&valid)
        .filter(|(_, &v)| v)
        .map(|(&l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for i in 0..ACTION_DIM {
        if valid[i] {
            total += (logits[i] - max).exp();
        }
    }
    let log_z = max + total.ln();
    let mut log_probs = [f64::NEG_INFINITY; ACTION_DIM];
    let mut probs = [0.0; ACTION_DIM];
    for i in 0..ACTION_DIM {
        if valid[i] {
            log_probs[i] = logits[i] - log_z;
            probs[i] = log_probs[i].exp();
        }
    }
    (log_probs, probs)
}

/// Sample an action index from a probability vector. Zero-probability
/// entries are never selected.
pub fn sample_action(probs: &[f64; ACTION_DIM], rng: &mut ChaCha8Rng) -> Action {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return Action::from_index(i).unwrap();
            }
        }
    }
    Action::from_index(last_positive).unwrap()
}

/// Convert a heuristics mask to the bool array used by the learner.
pub fn mask_bits(mask: &RuleMask) -> [bool; ACTION_DIM] {
    mask.valid
}
