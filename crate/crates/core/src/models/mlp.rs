use serde::{Deserialize, Serialize};

use super::loss::{batch_positive_weight, weighted_bce, weighted_bce_logit_grad};
use super::{check_dim, Classifier, ModelError};
use crate::datasets::Dataset;
use crate::numeric::{
    activation, adam_step, dropout_mask, sigmoid, Activation, AdamConfig, AdamState, Matrix,
    SeededRng,
};

/// Affine map `x·W + b` with `W` stored as `in × out` and `b` as `1 × out`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Matrix,
    pub bias: Matrix,
}

impl DenseLayer {
    /// Uniform init in `±1/√fan_in` for weights and bias.
    pub fn init(fan_in: usize, fan_out: usize, rng: &mut SeededRng) -> Self {
        let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| (2.0 * rng.uniform() - 1.0) * bound).collect()
        };
        let weights = Matrix::from_vec(fan_in, fan_out, draw(fan_in * fan_out))
            .expect("sized by construction");
        let bias = Matrix::row_vector(&draw(fan_out));
        Self { weights, bias }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            weights: Matrix::zeros(self.weights.rows(), self.weights.cols()),
            bias: Matrix::zeros(1, self.bias.cols()),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn forward(&self, x: &Matrix) -> Result<Matrix, ModelError> {
        let mut z = x.matmul(&self.weights)?;
        z.add_row_broadcast(&self.bias)?;
        Ok(z)
    }

    /// Parameter gradients and input gradient for upstream gradient `dz`.
    pub(crate) fn backward(
        &self,
        input: &Matrix,
        dz: &Matrix,
    ) -> Result<(DenseLayer, Matrix), ModelError> {
        let grads = DenseLayer {
            weights: input.t_matmul(dz)?,
            bias: dz.column_sums(),
        };
        let dx = dz.matmul_t(&self.weights)?;
        Ok((grads, dx))
    }

    pub(crate) fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Feed-forward binary classifier: ReLU hidden layers with inverted dropout
/// after each, and a single sigmoid output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<DenseLayer>,
    pub dropout: f64,
}

/// Activations kept from a forward pass for backprop.
struct ForwardCache {
    /// Input to each layer (the last entry feeds the output layer).
    inputs: Vec<Matrix>,
    /// ReLU derivative times dropout mask, per hidden layer.
    gates: Vec<Matrix>,
    logits: Vec<f64>,
}

impl MlpModel {
    pub fn new(
        input_dim: usize,
        hidden: &[usize],
        dropout: f64,
        rng: &mut SeededRng,
    ) -> Result<Self, ModelError> {
        if !(0.0..1.0).contains(&dropout) {
            return Err(ModelError::InvalidConfig(format!(
                "dropout rate must lie in [0, 1), got {dropout}"
            )));
        }
        if input_dim == 0 || hidden.contains(&0) {
            return Err(ModelError::InvalidConfig(
                "layer sizes must be positive".into(),
            ));
        }
        let mut sizes = vec![input_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let layers = sizes
            .windows(2)
            .map(|w| DenseLayer::init(w[0], w[1], rng))
            .collect();
        Ok(Self { layers, dropout })
    }

    pub fn hidden_sizes(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(DenseLayer::output_dim)
            .collect()
    }

    /// Fresh dropout masks for a batch of `rows` inputs, one per hidden layer.
    pub fn sample_masks(&self, rows: usize, rng: &mut SeededRng) -> Result<Vec<Matrix>, ModelError> {
        self.hidden_sizes()
            .into_iter()
            .map(|width| Ok(dropout_mask(rng, rows, width, self.dropout)?))
            .collect()
    }

    fn forward_cached(&self, x: &Matrix, masks: Option<&[Matrix]>) -> Result<ForwardCache, ModelError> {
        check_dim(self.input_dim(), x)?;
        let n_hidden = self.layers.len() - 1;
        if let Some(m) = masks {
            if m.len() != n_hidden {
                return Err(ModelError::InvalidConfig(format!(
                    "expected {n_hidden} dropout masks, got {}",
                    m.len()
                )));
            }
        }
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut gates = Vec::with_capacity(n_hidden);
        let mut h = x.clone();
        for (i, layer) in self.layers[..n_hidden].iter().enumerate() {
            let z = layer.forward(&h)?;
            let (a, da) = activation(Activation::Relu, &z);
            inputs.push(h);
            match masks {
                Some(m) => {
                    h = a.hadamard(&m[i])?;
                    gates.push(da.hadamard(&m[i])?);
                }
                None => {
                    h = a;
                    gates.push(da);
                }
            }
        }
        let out = self.layers[n_hidden].forward(&h)?;
        inputs.push(h);
        Ok(ForwardCache {
            inputs,
            gates,
            logits: out.into_vec(),
        })
    }

    /// Output logits; dropout applied only when masks are given.
    pub fn logits(&self, x: &Matrix, masks: Option<&[Matrix]>) -> Result<Vec<f64>, ModelError> {
        Ok(self.forward_cached(x, masks)?.logits)
    }

    /// Probabilities. With `dropout_rng`, fresh dropout masks are drawn from it.
    pub fn predict(&self, x: &Matrix, dropout_rng: Option<&mut SeededRng>) -> Result<Vec<f64>, ModelError> {
        let masks = match dropout_rng {
            Some(rng) => Some(self.sample_masks(x.rows(), rng)?),
            None => None,
        };
        let logits = self.logits(x, masks.as_deref())?;
        Ok(logits.into_iter().map(sigmoid).collect())
    }

    /// Weighted BCE of the batch and its gradient for every layer.
    pub fn loss_and_gradients(
        &self,
        x: &Matrix,
        labels: &[u8],
        positive_weight: f64,
        masks: Option<&[Matrix]>,
    ) -> Result<(f64, Vec<DenseLayer>), ModelError> {
        let cache = self.forward_cached(x, masks)?;
        let probs: Vec<f64> = cache.logits.iter().map(|&z| sigmoid(z)).collect();
        let loss = weighted_bce(&probs, labels, positive_weight);
        let dlogits = weighted_bce_logit_grad(&cache.logits, labels, positive_weight);

        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = Matrix::column_vector(&dlogits);
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let (g, dx) = layer.backward(&cache.inputs[i], &delta)?;
            grads.push(g);
            if i > 0 {
                delta = dx.hadamard(&cache.gates[i - 1])?;
            }
        }
        grads.reverse();
        Ok((loss, grads))
    }

    /// All parameters, layer by layer, weights before bias.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.layers.iter().map(DenseLayer::param_count).sum());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(l.bias.as_slice());
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) {
        let mut offset = 0;
        for l in &mut self.layers {
            for m in [&mut l.weights, &mut l.bias] {
                let n = m.len();
                m.as_mut_slice().copy_from_slice(&params[offset..offset + n]);
                offset += n;
            }
        }
        assert_eq!(offset, params.len(), "parameter vector length");
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.is_finite())
    }
}

impl Classifier for MlpModel {
    fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>, ModelError> {
        self.predict(x, None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub dropout: f64,
    pub adam: AdamConfig,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Patience in epochs; `None` trains for exactly `max_epochs`.
    pub early_stopping: Option<usize>,
    pub class_weighting: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: vec![100, 100],
            dropout: 0.5,
            adam: AdamConfig::default(),
            batch_size: 256,
            max_epochs: 100,
            early_stopping: Some(2),
            class_weighting: false,
        }
    }
}

impl TrainConfig {
    /// One hidden layer of 5 units, batches of 8, 20 fixed epochs.
    pub fn toy() -> Self {
        Self {
            hidden: vec![5],
            batch_size: 8,
            max_epochs: 20,
            early_stopping: None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.batch_size == 0 {
            return Err(ModelError::InvalidConfig("batch size must be ≥ 1".into()));
        }
        if self.early_stopping == Some(0) {
            return Err(ModelError::InvalidConfig("patience must be ≥ 1".into()));
        }
        if self.max_epochs == 0 {
            return Err(ModelError::InvalidConfig("max_epochs must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingReport {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    /// 1-based epoch whose parameters were returned.
    pub best_epoch: usize,
}

/// Minibatch Adam on the (optionally class-weighted) BCE.
pub fn train_mlp(
    train: &Dataset,
    val: Option<&Dataset>,
    cfg: &TrainConfig,
    rng: &SeededRng,
) -> Result<MlpModel, ModelError> {
    train_mlp_report(train, val, cfg, rng).map(|(m, _)| m)
}

/// [`train_mlp`] plus per-epoch losses.
///
/// Batches are reshuffled every epoch. With early stopping, the parameters of
/// the epoch with the lowest validation loss are returned once the loss has
/// not improved for `patience` epochs.
pub fn train_mlp_report(
    train: &Dataset,
    val: Option<&Dataset>,
    cfg: &TrainConfig,
    rng: &SeededRng,
) -> Result<(MlpModel, TrainingReport), ModelError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    if let Some(v) = val {
        if v.is_empty() {
            return Err(ModelError::EmptyValidationSet);
        }
        if v.n_features() != train.n_features() {
            return Err(ModelError::DimensionMismatch {
                expected: train.n_features(),
                found: v.n_features(),
            });
        }
    } else if cfg.early_stopping.is_some() {
        return Err(ModelError::EmptyValidationSet);
    }

    let mut model = MlpModel::new(train.n_features(), &cfg.hidden, cfg.dropout, &mut rng.split("init"))?;
    let mut shuffle_rng = rng.split("shuffle");
    let mut dropout_rng = rng.split("dropout");
    let mut states: Vec<[AdamState; 2]> = model
        .layers
        .iter()
        .map(|l| {
            [
                AdamState::for_params(&l.weights, cfg.adam),
                AdamState::for_params(&l.bias, cfg.adam),
            ]
        })
        .collect();

    let val_weight = match val {
        Some(v) if cfg.class_weighting => batch_positive_weight(v.labels()),
        _ => 1.0,
    };

    let mut report = TrainingReport::default();
    let mut best: Option<(f64, MlpModel)> = None;
    let mut stale = 0;
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=cfg.max_epochs {
        shuffle_rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = train.select_rows(chunk);
            let w = if cfg.class_weighting {
                batch_positive_weight(batch.labels())
            } else {
                1.0
            };
            let masks = model.sample_masks(batch.len(), &mut dropout_rng)?;
            let (loss, grads) =
                model.loss_and_gradients(batch.features(), batch.labels(), w, Some(&masks))?;
            if !loss.is_finite() {
                return Err(ModelError::Diverged { epoch });
            }
            epoch_loss += loss * chunk.len() as f64;
            for ((layer, g), st) in model.layers.iter_mut().zip(&grads).zip(&mut states) {
                adam_step(&mut layer.weights, &g.weights, &mut st[0])?;
                adam_step(&mut layer.bias, &g.bias, &mut st[1])?;
            }
        }
        if !model.is_finite() {
            return Err(ModelError::Diverged { epoch });
        }
        report.train_loss.push(epoch_loss / train.len() as f64);

        let Some(v) = val else { continue };
        let probs = model.predict(v.features(), None)?;
        let val_loss = weighted_bce(&probs, v.labels(), val_weight);
        if !val_loss.is_finite() {
            return Err(ModelError::Diverged { epoch });
        }
        report.val_loss.push(val_loss);
        let Some(patience) = cfg.early_stopping else { continue };
        match &best {
            Some((b, _)) if val_loss >= *b => {
                stale += 1;
                if stale >= patience {
                    break;
                }
            }
            _ => {
                best = Some((val_loss, model.clone()));
                report.best_epoch = epoch;
                stale = 0;
            }
        }
    }
    match best {
        Some((_, m)) => Ok((m, report)),
        None => {
            report.best_epoch = report.train_loss.len();
            Ok((model, report))
        }
    }
}
