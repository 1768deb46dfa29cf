//! Sine-activated MLP baseline trained with full-batch Adam on MSE.
//!
//! Forward pass for layers `0..L`:
//!
//! ```text
//! h_0 = sin(ω0 · (x W_0 + b_0))
//! h_i = sin(h_{i-1} W_i + b_i)        0 < i < L-1
//! out = h_{L-2} W_{L-1} + b_{L-1}     (affine, no activation)
//! ```
//!
//! Layer-0 weights are drawn from `U[-1/n_in, 1/n_in]`, deeper layers from
//! `U[-sqrt(6/n_in), sqrt(6/n_in)]`, biases start at zero. Gradients are
//! derived by hand (chain rule through `sin`, gated by `cos`).

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};

use crate::basis::SamplePoints;
use crate::error::{Error, Result};
use crate::rng::LegacyRng;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SirenConfig {
    pub layer_sizes: Vec<usize>,
    pub omega0: f64,
    pub learning_rate: f64,
    pub steps: usize,
    pub seed: u32,
}

impl Default for SirenConfig {
    fn default() -> Self {
        Self {
            layer_sizes: vec![2, 128, 128, 128, 1],
            omega0: 30.0,
            learning_rate: 5e-4,
            steps: 3000,
            seed: 42,
        }
    }
}

impl SirenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 2 {
            return Err(Error::Config(
                "SIREN needs at least an input and an output layer".into(),
            ));
        }
        if self.layer_sizes.contains(&0) {
            return Err(Error::Config("SIREN layer sizes must be positive".into()));
        }
        if self.layer_sizes.last() != Some(&1) {
            return Err(Error::Config("SIREN output dimension must be 1".into()));
        }
        if !self.omega0.is_finite() {
            return Err(Error::Config("omega0 must be finite".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be finite and > 0".into()));
        }
        Ok(())
    }
}

/// Parameter-shaped gradient or moment buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Params {
    fn zeros_like(other: &Params) -> Self {
        Self {
            weights: other
                .weights
                .iter()
                .map(|w| Array2::zeros(w.raw_dim()))
                .collect(),
            biases: other
                .biases
                .iter()
                .map(|b| Array1::zeros(b.raw_dim()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SirenNetwork {
    /// `weights[i]` is `n_in × n_out`.
    pub params: Params,
    pub omega0: f64,
    adam_m: Params,
    adam_v: Params,
    step_count: usize,
}

impl SirenNetwork {
    /// Initialises a network from `config.seed`.
    pub fn init(config: &SirenConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = LegacyRng::new(config.seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (i, pair) in config.layer_sizes.windows(2).enumerate() {
            let (n_in, n_out) = (pair[0], pair[1]);
            let limit = if i == 0 {
                1.0 / n_in as f64
            } else {
                (6.0 / n_in as f64).sqrt()
            };
            weights.push(Array2::from_shape_simple_fn((n_in, n_out), || {
                rng.uniform(-limit, limit)
            }));
            biases.push(Array1::zeros(n_out));
        }
        Ok(Self::from_params(Params { weights, biases }, config.omega0))
    }

    /// Wraps explicit parameters with fresh (zeroed) optimiser state.
    pub fn from_params(params: Params, omega0: f64) -> Self {
        let adam_m = Params::zeros_like(&params);
        let adam_v = Params::zeros_like(&params);
        Self {
            params,
            omega0,
            adam_m,
            adam_v,
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn adam_moments(&self) -> (&Params, &Params) {
        (&self.adam_m, &self.adam_v)
    }

    fn n_layers(&self) -> usize {
        self.params.weights.len()
    }

    /// Network output for each row of `points` (`M × n_in`).
    pub fn forward(&self, points: ArrayView2<f64>) -> Array1<f64> {
        let mut h = points.to_owned();
        let last = self.n_layers() - 1;
        for i in 0..last {
            let mut z = h.dot(&self.params.weights[i]) + &self.params.biases[i];
            if i == 0 {
                z *= self.omega0;
            }
            z.mapv_inplace(f64::sin);
            h = z;
        }
        let out = h.dot(&self.params.weights[last]) + &self.params.biases[last];
        out.column(0).to_owned()
    }

    pub fn predict(&self, pts: &SamplePoints) -> Array1<f64> {
        self.forward(points_matrix(pts).view())
    }

    pub fn loss(&self, points: ArrayView2<f64>, target: &Array1<f64>) -> f64 {
        let out = self.forward(points);
        (&out - target).mapv(|d| d * d).mean().unwrap_or(0.0)
    }

    /// Mean-squared-error loss and its gradient with respect to every parameter.
    pub fn loss_and_grad(&self, points: ArrayView2<f64>, target: &Array1<f64>) -> (f64, Params) {
        let m = points.nrows() as f64;
        let last = self.n_layers() - 1;

        // inputs[i] feeds layer i; pre[i] is the argument of sin for hidden layer i
        let mut inputs: Vec<Array2<f64>> = Vec::with_capacity(last + 1);
        let mut pre: Vec<Array2<f64>> = Vec::with_capacity(last);
        inputs.push(points.to_owned());
        for i in 0..last {
            let mut z = inputs[i].dot(&self.params.weights[i]) + &self.params.biases[i];
            if i == 0 {
                z *= self.omega0;
            }
            inputs.push(z.mapv(f64::sin));
            pre.push(z);
        }
        let out = inputs[last].dot(&self.params.weights[last]) + &self.params.biases[last];

        let residual = &out.column(0) - target;
        let loss = residual.mapv(|d| d * d).sum() / m;

        let mut grad = Params::zeros_like(&self.params);
        let mut delta = (residual * (2.0 / m)).insert_axis(Axis(1));
        for i in (0..=last).rev() {
            if i < last {
                let gate = pre[i].mapv(f64::cos);
                delta = delta * gate;
                if i == 0 {
                    delta *= self.omega0;
                }
            }
            grad.weights[i] = inputs[i].t().dot(&delta);
            grad.biases[i] = delta.sum_axis(Axis(0));
            if i > 0 {
                delta = delta.dot(&self.params.weights[i].t());
            }
        }
        (loss, grad)
    }

    fn adam_update(&mut self, grad: &Params, learning_rate: f64) {
        self.step_count += 1;
        let t = self.step_count as i32;
        let bc1 = 1.0 - ADAM_BETA1.powi(t);
        let bc2 = 1.0 - ADAM_BETA2.powi(t);
        let update = |p: &mut f64, m: &mut f64, v: &mut f64, g: &f64| {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
        };
        for i in 0..self.n_layers() {
            Zip::from(&mut self.params.weights[i])
                .and(&mut self.adam_m.weights[i])
                .and(&mut self.adam_v.weights[i])
                .and(&grad.weights[i])
                .for_each(update);
            Zip::from(&mut self.params.biases[i])
                .and(&mut self.adam_m.biases[i])
                .and(&mut self.adam_v.biases[i])
                .and(&grad.biases[i])
                .for_each(update);
        }
    }

    /// Runs `config.steps` Adam steps, calling `on_step(step, loss)` with the
    /// loss evaluated before each update.
    pub fn train_with<F>(
        &mut self,
        config: &SirenConfig,
        pts: &SamplePoints,
        u: &[f64],
        mut on_step: F,
    ) -> Result<f64>
    where
        F: FnMut(usize, f64),
    {
        config.validate()?;
        if config.layer_sizes[0] != 2 {
            return Err(Error::Config(format!(
                "SIREN input dimension must be 2 for planar samples, got {}",
                config.layer_sizes[0]
            )));
        }
        if u.len() != pts.len() {
            return Err(Error::Dimension {
                what: "training targets",
                expected: pts.len(),
                got: u.len(),
            });
        }
        let x = points_matrix(pts);
        let y = Array1::from(u.to_vec());

        let start = Instant::now();
        for step in 0..config.steps {
            let (loss, grad) = self.loss_and_grad(x.view(), &y);
            if !loss.is_finite() {
                return Err(Error::Diverged { step, loss });
            }
            on_step(step, loss);
            self.adam_update(&grad, config.learning_rate);
        }
        Ok(start.elapsed().as_secs_f64())
    }
}

/// Trains `net` and returns it with the wall-clock training time in seconds.
pub fn siren_train(
    mut net: SirenNetwork,
    config: &SirenConfig,
    pts: &SamplePoints,
    u: &[f64],
) -> Result<(SirenNetwork, f64)> {
    let seconds = net.train_with(config, pts, u, |_, _| {})?;
    Ok((net, seconds))
}

/// `M × 2` matrix of `(x, y)` rows.
pub fn points_matrix(pts: &SamplePoints) -> Array2<f64> {
    let mut out = Array2::zeros((pts.len(), 2));
    for (mut row, (x, y)) in out.rows_mut().into_iter().zip(pts.iter()) {
        row[0] = x;
        row[1] = y;
    }
    out
}
