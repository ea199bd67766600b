use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    Softmax,
    Linear,
}

/// Layer widths of a fully connected network with ReLU hidden layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden_layers: Vec<usize>,
    pub output_dim: usize,
    pub output_activation: OutputActivation,
}

impl MlpSpec {
    pub fn actor(n_cells: usize, hidden: &[usize]) -> Self {
        MlpSpec {
            input_dim: n_cells,
            hidden_layers: hidden.to_vec(),
            output_dim: n_cells,
            output_activation: OutputActivation::Softmax,
        }
    }

    pub fn critic(n_cells: usize, hidden: &[usize]) -> Self {
        MlpSpec {
            input_dim: n_cells,
            hidden_layers: hidden.to_vec(),
            output_dim: 1,
            output_activation: OutputActivation::Linear,
        }
    }

    /// (fan_in, fan_out) of every dense layer.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut widths = vec![self.input_dim];
        widths.extend(&self.hidden_layers);
        widths.push(self.output_dim);
        widths.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn param_count(&self) -> usize {
        self.layer_dims().iter().map(|(i, o)| i * o + o).sum()
    }
}

/// Network parameters stored flat: per layer, an `out × in` row-major weight
/// block followed by `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub spec: MlpSpec,
    pub params: Vec<f64>,
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Debug, Clone)]
pub struct Forward {
    /// Input of every layer (the network input, then post-ReLU activations).
    inputs: Vec<Vec<f64>>,
    /// Pre-activation of the output layer.
    pub logits: Vec<f64>,
}

impl Forward {
    pub fn probabilities(&self) -> Vec<f64> {
        softmax(&self.logits)
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    logits.iter().map(|z| z - lse).collect()
}

/// Shannon entropy of a categorical distribution given by its logits.
pub fn entropy(logits: &[f64]) -> f64 {
    let lp = log_softmax(logits);
    -lp.iter().map(|l| l.exp() * l).sum::<f64>()
}

impl Mlp {
    /// He-normal weights (std `sqrt(2/fan_in)`), zero biases; the output layer
    /// is further multiplied by `output_scale`.
    pub fn new(spec: MlpSpec, rng: &mut Rng, output_scale: f64) -> Self {
        let dims = spec.layer_dims();
        let last = dims.len() - 1;
        let mut params = Vec::with_capacity(spec.param_count());
        for (l, &(fan_in, fan_out)) in dims.iter().enumerate() {
            let mut std = (2.0 / fan_in as f64).sqrt();
            if l == last {
                std *= output_scale;
            }
            for _ in 0..fan_in * fan_out {
                let z: f64 = rng.sample(StandardNormal);
                params.push(z * std);
            }
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Mlp { spec, params }
    }

    pub fn zeros(spec: MlpSpec) -> Self {
        let params = vec![0.0; spec.param_count()];
        Mlp { spec, params }
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.params.iter().position(|p| !p.is_finite()) {
            None => Ok(()),
            Some(i) => Err(Error::Diverged(format!(
                "parameter {i} of {} is {}",
                self.params.len(),
                self.params[i]
            ))),
        }
    }

    /// Parameter range of `layer`: (weights, biases).
    fn layer_ranges(&self) -> Vec<(std::ops::Range<usize>, std::ops::Range<usize>)> {
        let mut offset = 0;
        self.spec
            .layer_dims()
            .into_iter()
            .map(|(i, o)| {
                let w = offset..offset + i * o;
                let b = w.end..w.end + o;
                offset = b.end;
                (w, b)
            })
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Forward {
        debug_assert_eq!(x.len(), self.spec.input_dim);
        let dims = self.spec.layer_dims();
        let ranges = self.layer_ranges();
        let mut inputs = Vec::with_capacity(dims.len());
        let mut current = x.to_vec();
        let last = dims.len() - 1;
        for (l, (&(fan_in, fan_out), (wr, br))) in dims.iter().zip(ranges).enumerate() {
            let w = &self.params[wr];
            let b = &self.params[br];
            let mut out = Vec::with_capacity(fan_out);
            for o in 0..fan_out {
                let row = &w[o * fan_in..(o + 1) * fan_in];
                let z = b[o] + row.iter().zip(&current).map(|(a, c)| a * c).sum::<f64>();
                out.push(if l == last { z } else { z.max(0.0) });
            }
            inputs.push(std::mem::replace(&mut current, out));
        }
        Forward {
            inputs,
            logits: current,
        }
    }

    /// Output after the output activation.
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let f = self.forward(x);
        match self.spec.output_activation {
            OutputActivation::Softmax => softmax(&f.logits),
            OutputActivation::Linear => f.logits,
        }
    }

    /// Accumulates `∂loss/∂θ` into `grad` given `∂loss/∂logits`.
    pub fn backward(&self, fwd: &Forward, grad_logits: &[f64], grad: &mut [f64]) {
        let dims = self.spec.layer_dims();
        let ranges = self.layer_ranges();
        let mut upstream = grad_logits.to_vec();
        for l in (0..dims.len()).rev() {
            let (fan_in, fan_out) = dims[l];
            let (wr, br) = ranges[l].clone();
            let input = &fwd.inputs[l];
            {
                let gb = &mut grad[br];
                for o in 0..fan_out {
                    gb[o] += upstream[o];
                }
            }
            let w_start = wr.start;
            {
                let gw = &mut grad[wr];
                for o in 0..fan_out {
                    let g = upstream[o];
                    if g != 0.0 {
                        let row = &mut gw[o * fan_in..(o + 1) * fan_in];
                        for (r, x) in row.iter_mut().zip(input) {
                            *r += g * x;
                        }
                    }
                }
            }
            if l == 0 {
                break;
            }
            let w = &self.params[w_start..w_start + fan_in * fan_out];
            let mut down = vec![0.0; fan_in];
            for o in 0..fan_out {
                let g = upstream[o];
                if g != 0.0 {
                    for (d, wv) in down.iter_mut().zip(&w[o * fan_in..(o + 1) * fan_in]) {
                        *d += g * wv;
                    }
                }
            }
            // ReLU mask: the layer input is the previous layer's rectified output.
            for (d, a) in down.iter_mut().zip(input) {
                if *a <= 0.0 {
                    *d = 0.0;
                }
            }
            upstream = down;
        }
    }

    /// `∇θ log π(action | x)` for a softmax network.
    pub fn log_prob_gradient(&self, x: &[f64], action: usize) -> Vec<f64> {
        let f = self.forward(x);
        let p = softmax(&f.logits);
        let g: Vec<f64> = p
            .iter()
            .enumerate()
            .map(|(k, pk)| if k == action { 1.0 - pk } else { -pk })
            .collect();
        let mut grad = vec![0.0; self.params.len()];
        self.backward(&f, &g, &mut grad);
        grad
    }

    /// `∇θ H(π(·|x))` for a softmax network.
    pub fn entropy_gradient(&self, x: &[f64]) -> Vec<f64> {
        let f = self.forward(x);
        let g = entropy_logit_gradient(&f.logits);
        let mut grad = vec![0.0; self.params.len()];
        self.backward(&f, &g, &mut grad);
        grad
    }

    /// `∇θ V(x)` for a scalar linear-output network.
    pub fn value_gradient(&self, x: &[f64]) -> Vec<f64> {
        let f = self.forward(x);
        let mut grad = vec![0.0; self.params.len()];
        self.backward(&f, &[1.0], &mut grad);
        grad
    }
}

/// `∂H/∂z_k = −p_k (log p_k + H)`.
pub(crate) fn entropy_logit_gradient(logits: &[f64]) -> Vec<f64> {
    let lp = log_softmax(logits);
    let h = -lp.iter().map(|l| l.exp() * l).sum::<f64>();
    lp.iter().map(|l| -l.exp() * (l + h)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::rng_from_seed;

    #[test]
    fn zero_output_layer_is_uniform() {
        let mut rng = rng_from_seed(1);
        let net = Mlp::new(MlpSpec::actor(21, &[128, 128]), &mut rng, 0.0);
        let p = net.predict(&[0.5; 21]);
        for pk in p {
            assert!((pk - 1.0 / 21.0).abs() < 1e-15);
        }
    }

    #[test]
    fn simplex_under_random_weights() {
        let mut rng = rng_from_seed(2);
        for k in 0..1000 {
            let scale = 0.5 + (k % 4) as f64 * 0.5;
            let mut net = Mlp::new(MlpSpec::actor(6, &[8, 8]), &mut rng, scale);
            for p in net.params.iter_mut() {
                *p *= scale;
            }
            let x: Vec<f64> = (0..6).map(|i| (i % 2) as f64).collect();
            let p = net.predict(&x);
            let s: f64 = p.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn param_layout() {
        let spec = MlpSpec::critic(21, &[64, 64]);
        assert_eq!(spec.layer_dims(), vec![(21, 64), (64, 64), (64, 1)]);
        assert_eq!(spec.param_count(), 21 * 64 + 64 + 64 * 64 + 64 + 64 + 1);
    }

    #[test]
    fn non_finite_weights_are_reported() {
        let mut net = Mlp::zeros(MlpSpec::actor(3, &[4]));
        assert!(net.check_finite().is_ok());
        net.params[2] = f64::NAN;
        assert!(matches!(net.check_finite(), Err(Error::Diverged(_))));
    }

    #[test]
    fn log_softmax_is_stable() {
        let lp = log_softmax(&[1000.0, 0.0]);
        assert!(lp[0].abs() < 1e-12);
        assert!((lp[1] + 1000.0).abs() < 1e-9);
        assert!((entropy(&[0.0; 4]) - 4f64.ln()).abs() < 1e-15);
    }
}
