//! Gaussian variational autoencoder with linear encoder and decoder.
//!
//! The encoder maps `x` to the mean and log-variance of a diagonal Gaussian
//! posterior over `z`; the decoder maps `z` to the mean and log-variance of a
//! diagonal Gaussian over `x`. Both log-variances are clamped to
//! `[-LOGVAR_LIMIT, LOGVAR_LIMIT]`. Training minimises the negative ELBO
//!
//! ```text
//! loss = NLL(x | μₓ(z), σₓ²(z)) + KL(q(z|x) ‖ N(0, I)),   z = μ_z + σ_z ⊙ ε
//! ```
//!
//! averaged over the batch, with one reparameterised sample per row. The
//! novelty score of a row is its decoder NLL averaged over several latent
//! samples; higher means less like the training data.

use serde::{Deserialize, Serialize};

use super::mlp::DenseLayer;
use super::{check_dim, ModelError};
use crate::datasets::Dataset;
use crate::numeric::{adam_step, AdamConfig, AdamState, Matrix, SeededRng};

pub const LOGVAR_LIMIT: f64 = 10.0;
const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VaeConfig {
    pub latent_dim: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub adam: AdamConfig,
    /// Latent samples averaged by [`vae_novelty_score`].
    pub samples: usize,
}

impl Default for VaeConfig {
    fn default() -> Self {
        Self {
            latent_dim: 500,
            batch_size: 256,
            epochs: 30,
            adam: AdamConfig::default(),
            samples: 10,
        }
    }
}

impl VaeConfig {
    /// Two latent dimensions for the 2-D toy data.
    pub fn toy() -> Self {
        Self {
            latent_dim: 2,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.latent_dim == 0 || self.batch_size == 0 || self.epochs == 0 {
            return Err(ModelError::InvalidConfig(
                "VAE latent_dim, batch_size and epochs must be ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VaeModel {
    pub encoder_mean: DenseLayer,
    pub encoder_logvar: DenseLayer,
    pub decoder_mean: DenseLayer,
    pub decoder_logvar: DenseLayer,
}

/// Gradients of the batch loss, laid out like [`VaeModel`].
#[derive(Clone, Debug, PartialEq)]
pub struct VaeGradients {
    pub encoder_mean: DenseLayer,
    pub encoder_logvar: DenseLayer,
    pub decoder_mean: DenseLayer,
    pub decoder_logvar: DenseLayer,
}

struct Decoded {
    mean: Matrix,
    logvar: Matrix,
    /// 1 where the log-variance was not clamped.
    logvar_live: Matrix,
}

fn clamp_logvar(raw: &Matrix) -> (Matrix, Matrix) {
    (
        raw.map(|v| v.clamp(-LOGVAR_LIMIT, LOGVAR_LIMIT)),
        raw.map(|v| if v.abs() < LOGVAR_LIMIT { 1.0 } else { 0.0 }),
    )
}

/// Per-row `0.5 Σ_d [ln 2π + lv + (x − μ)² e^{−lv}]`.
fn gaussian_nll_rows(x: &Matrix, mean: &Matrix, logvar: &Matrix) -> Vec<f64> {
    (0..x.rows())
        .map(|r| {
            0.5 * x
                .row(r)
                .iter()
                .zip(mean.row(r))
                .zip(logvar.row(r))
                .map(|((&xv, &m), &lv)| LN_2PI + lv + (xv - m).powi(2) * (-lv).exp())
                .sum::<f64>()
        })
        .collect()
}

impl VaeModel {
    pub fn new(input_dim: usize, latent_dim: usize, rng: &mut SeededRng) -> Result<Self, ModelError> {
        if input_dim == 0 || latent_dim == 0 {
            return Err(ModelError::InvalidConfig(
                "VAE dimensions must be positive".into(),
            ));
        }
        let zero_bias = |fan_in, fan_out, rng: &mut SeededRng| {
            let mut l = DenseLayer::init(fan_in, fan_out, rng);
            l.bias = Matrix::zeros(1, fan_out);
            l
        };
        Ok(Self {
            encoder_mean: DenseLayer::init(input_dim, latent_dim, rng),
            encoder_logvar: zero_bias(input_dim, latent_dim, rng),
            decoder_mean: DenseLayer::init(latent_dim, input_dim, rng),
            decoder_logvar: zero_bias(latent_dim, input_dim, rng),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.encoder_mean.input_dim()
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder_mean.output_dim()
    }

    /// Posterior mean and clamped log-variance.
    pub fn encode(&self, x: &Matrix) -> Result<(Matrix, Matrix), ModelError> {
        check_dim(self.input_dim(), x)?;
        let mean = self.encoder_mean.forward(x)?;
        let (logvar, _) = clamp_logvar(&self.encoder_logvar.forward(x)?);
        Ok((mean, logvar))
    }

    fn decode_full(&self, z: &Matrix) -> Result<Decoded, ModelError> {
        let mean = self.decoder_mean.forward(z)?;
        let (logvar, logvar_live) = clamp_logvar(&self.decoder_logvar.forward(z)?);
        Ok(Decoded {
            mean,
            logvar,
            logvar_live,
        })
    }

    /// Decoder mean and clamped log-variance.
    pub fn decode(&self, z: &Matrix) -> Result<(Matrix, Matrix), ModelError> {
        let d = self.decode_full(z)?;
        Ok((d.mean, d.logvar))
    }

    /// Negative ELBO of the batch for fixed noise `eps` (`rows × latent_dim`)
    /// and its gradient.
    pub fn loss_and_gradients(&self, x: &Matrix, eps: &Matrix) -> Result<(f64, VaeGradients), ModelError> {
        check_dim(self.input_dim(), x)?;
        let n = x.rows() as f64;
        let mu_z = self.encoder_mean.forward(x)?;
        let (lv_z, lv_z_live) = clamp_logvar(&self.encoder_logvar.forward(x)?);
        let std_z = lv_z.map(|v| (0.5 * v).exp());
        let z = mu_z.zip_map(&std_z.hadamard(eps)?, |m, s| m + s)?;
        let dec = self.decode_full(&z)?;

        let nll: f64 = gaussian_nll_rows(x, &dec.mean, &dec.logvar).iter().sum();
        let kl: f64 = 0.5
            * mu_z
                .as_slice()
                .iter()
                .zip(lv_z.as_slice())
                .map(|(&m, &lv)| lv.exp() + m * m - 1.0 - lv)
                .sum::<f64>();
        let loss = (nll + kl) / n;

        // decoder heads
        let inv_var = dec.logvar.map(|lv| (-lv).exp());
        let resid = x.zip_map(&dec.mean, |a, b| a - b)?;
        let d_mu_x = resid.hadamard(&inv_var)?.scale(-1.0 / n);
        let d_lv_x = resid
            .zip_map(&inv_var, |r, iv| 0.5 * (1.0 - r * r * iv) / n)?
            .hadamard(&dec.logvar_live)?;
        let (g_dec_mean, dz_mean) = self.decoder_mean.backward(&z, &d_mu_x)?;
        let (g_dec_logvar, dz_logvar) = self.decoder_logvar.backward(&z, &d_lv_x)?;
        let dz = dz_mean.zip_map(&dz_logvar, |a, b| a + b)?;

        // encoder heads: reparameterisation plus the closed-form KL
        let d_mu_z = dz.zip_map(&mu_z, |g, m| g + m / n)?;
        let mut d_lv_z = dz.hadamard(eps)?.hadamard(&std_z)?.scale(0.5);
        for (g, &lv) in d_lv_z.as_mut_slice().iter_mut().zip(lv_z.as_slice()) {
            *g += 0.5 * (lv.exp() - 1.0) / n;
        }
        let d_lv_z = d_lv_z.hadamard(&lv_z_live)?;
        let (g_enc_mean, _) = self.encoder_mean.backward(x, &d_mu_z)?;
        let (g_enc_logvar, _) = self.encoder_logvar.backward(x, &d_lv_z)?;

        Ok((
            loss,
            VaeGradients {
                encoder_mean: g_enc_mean,
                encoder_logvar: g_enc_logvar,
                decoder_mean: g_dec_mean,
                decoder_logvar: g_dec_logvar,
            },
        ))
    }

    fn layers_mut(&mut self) -> [&mut DenseLayer; 4] {
        [
            &mut self.encoder_mean,
            &mut self.encoder_logvar,
            &mut self.decoder_mean,
            &mut self.decoder_logvar,
        ]
    }

    fn layers(&self) -> [&DenseLayer; 4] {
        [
            &self.encoder_mean,
            &self.encoder_logvar,
            &self.decoder_mean,
            &self.decoder_logvar,
        ]
    }

    pub fn params_flat(&self) -> Vec<f64> {
        self.layers()
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().chain(l.bias.as_slice()).copied())
            .collect()
    }

    pub fn set_params_flat(&mut self, params: &[f64]) {
        let mut offset = 0;
        for l in self.layers_mut() {
            for m in [&mut l.weights, &mut l.bias] {
                let n = m.len();
                m.as_mut_slice().copy_from_slice(&params[offset..offset + n]);
                offset += n;
            }
        }
        assert_eq!(offset, params.len(), "parameter vector length");
    }

    fn is_finite(&self) -> bool {
        self.layers()
            .iter()
            .all(|l| l.weights.is_finite() && l.bias.is_finite())
    }
}

impl VaeGradients {
    pub fn flat(&self) -> Vec<f64> {
        [
            &self.encoder_mean,
            &self.encoder_logvar,
            &self.decoder_mean,
            &self.decoder_logvar,
        ]
        .iter()
        .flat_map(|l| l.weights.as_slice().iter().chain(l.bias.as_slice()).copied())
        .collect()
    }
}

pub fn train_vae(train: &Dataset, cfg: &VaeConfig, rng: &SeededRng) -> Result<VaeModel, ModelError> {
    train_vae_report(train, cfg, rng).map(|(m, _)| m)
}

/// [`train_vae`] plus the mean training loss of every epoch.
pub fn train_vae_report(
    train: &Dataset,
    cfg: &VaeConfig,
    rng: &SeededRng,
) -> Result<(VaeModel, Vec<f64>), ModelError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let mut model = VaeModel::new(train.n_features(), cfg.latent_dim, &mut rng.split("init"))?;
    let mut shuffle_rng = rng.split("shuffle");
    let mut noise_rng = rng.split("noise");
    let mut states: Vec<[AdamState; 2]> = model
        .layers()
        .iter()
        .map(|l| {
            [
                AdamState::for_params(&l.weights, cfg.adam),
                AdamState::for_params(&l.bias, cfg.adam),
            ]
        })
        .collect();

    let mut history = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=cfg.epochs {
        shuffle_rng.shuffle(&mut order);
        let mut total = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let x = train.features().select_rows(chunk);
            let eps = standard_normal(chunk.len(), cfg.latent_dim, &mut noise_rng);
            let (loss, g) = model.loss_and_gradients(&x, &eps)?;
            if !loss.is_finite() {
                return Err(ModelError::Diverged { epoch });
            }
            total += loss * chunk.len() as f64;
            let grads = [&g.encoder_mean, &g.encoder_logvar, &g.decoder_mean, &g.decoder_logvar];
            for ((layer, g), st) in model.layers_mut().into_iter().zip(grads).zip(&mut states) {
                adam_step(&mut layer.weights, &g.weights, &mut st[0])?;
                adam_step(&mut layer.bias, &g.bias, &mut st[1])?;
            }
        }
        if !model.is_finite() {
            return Err(ModelError::Diverged { epoch });
        }
        history.push(total / train.len() as f64);
    }
    Ok((model, history))
}

fn standard_normal(rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.normal()).collect();
    Matrix::from_vec(rows, cols, data).expect("sized by construction")
}

/// Decoder negative log-likelihood of each row, averaged over `samples`
/// latent draws.
///
/// The same `samples` noise vectors are used for every row, so a row's score
/// depends only on the row itself and the RNG state.
pub fn vae_novelty_score(
    model: &VaeModel,
    x: &Matrix,
    samples: usize,
    rng: &mut SeededRng,
) -> Result<Vec<f64>, ModelError> {
    if samples == 0 {
        return Err(ModelError::InvalidConfig(
            "novelty score needs at least one latent sample".into(),
        ));
    }
    let (mu_z, lv_z) = model.encode(x)?;
    let std_z = lv_z.map(|v| (0.5 * v).exp());
    let noise = standard_normal(samples, model.latent_dim(), rng);
    let mut scores = vec![0.0; x.rows()];
    for s in 0..samples {
        let eps = noise.row(s);
        let mut z = mu_z.clone();
        for r in 0..z.rows() {
            for ((zv, &sd), &e) in z.row_mut(r).iter_mut().zip(std_z.row(r)).zip(eps) {
                *zv += sd * e;
            }
        }
        let (mean, logvar) = model.decode(&z)?;
        for (acc, v) in scores.iter_mut().zip(gaussian_nll_rows(x, &mean, &logvar)) {
            *acc += v;
        }
    }
    Ok(scores.into_iter().map(|s| s / samples as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate_toy, ToyConfig, ToyMode};
    use crate::numeric::{finite_difference_gradient, max_relative_error};

    #[test]
    fn kl_vanishes_for_standard_posterior() {
        // zero encoder weights and biases give μ = 0, logσ² = 0
        let mut m = VaeModel::new(3, 2, &mut SeededRng::new(0)).unwrap();
        for l in [&mut m.encoder_mean, &mut m.encoder_logvar] {
            l.weights = Matrix::zeros(3, 2);
            l.bias = Matrix::zeros(1, 2);
        }
        let x = Matrix::from_rows(&[vec![0.5, -1.0, 2.0]]).unwrap();
        let eps = Matrix::from_rows(&[vec![0.3, -0.7]]).unwrap();
        let (loss, _) = m.loss_and_gradients(&x, &eps).unwrap();
        let z = eps.clone();
        let (mean, lv) = m.decode(&z).unwrap();
        let nll = gaussian_nll_rows(&x, &mean, &lv)[0];
        assert!((loss - nll).abs() < 1e-12);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = SeededRng::new(5);
        let m = VaeModel::new(4, 3, &mut rng).unwrap();
        let x = standard_normal(6, 4, &mut rng);
        let eps = standard_normal(6, 3, &mut rng);
        let (_, g) = m.loss_and_gradients(&x, &eps).unwrap();
        let theta = Matrix::row_vector(&m.params_flat());
        let numeric = finite_difference_gradient(
            |p| {
                let mut probe = m.clone();
                probe.set_params_flat(p.as_slice());
                probe.loss_and_gradients(&x, &eps).unwrap().0
            },
            &theta,
            1e-5,
        );
        assert!(max_relative_error(&g.flat(), numeric.as_slice(), 1e-6) < 1e-4);
    }

    #[test]
    fn loss_decreases_on_toy_data() {
        let d = generate_toy(&ToyConfig::new(ToyMode::Balanced), &mut SeededRng::new(0));
        let cfg = VaeConfig {
            batch_size: 8,
            epochs: 5,
            ..VaeConfig::toy()
        };
        let (_, history) = train_vae_report(&d, &cfg, &SeededRng::new(1)).unwrap();
        assert_eq!(history.len(), 5);
        assert!(history[4] < history[0], "{history:?}");
    }

    #[test]
    fn same_seed_same_parameters() {
        let d = generate_toy(&ToyConfig::new(ToyMode::Balanced), &mut SeededRng::new(0));
        let a = train_vae(&d, &VaeConfig::toy(), &SeededRng::new(2)).unwrap();
        let b = train_vae(&d, &VaeConfig::toy(), &SeededRng::new(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicated_rows_score_equally() {
        let d = generate_toy(&ToyConfig::new(ToyMode::Balanced), &mut SeededRng::new(0));
        let m = train_vae(&d, &VaeConfig::toy(), &SeededRng::new(2)).unwrap();
        let x = Matrix::from_rows(&[vec![0.3, 0.1], vec![5.0, -2.0], vec![0.3, 0.1]]).unwrap();
        let s = vae_novelty_score(&m, &x, 10, &mut SeededRng::new(9)).unwrap();
        assert_eq!(s[0].to_bits(), s[2].to_bits());
    }

    #[test]
    fn far_point_scores_above_training_cloud() {
        let mut rng = SeededRng::new(3);
        let x = standard_normal(400, 2, &mut rng).scale(0.5);
        let d = Dataset::from_parts(x, vec![0; 400]).unwrap();
        let cfg = VaeConfig {
            batch_size: 16,
            ..VaeConfig::toy()
        };
        let m = train_vae(&d, &cfg, &SeededRng::new(4)).unwrap();
        let train_scores = vae_novelty_score(&m, d.features(), 10, &mut SeededRng::new(1)).unwrap();
        let far = vae_novelty_score(&m, &Matrix::from_rows(&[vec![8.0, -8.0]]).unwrap(), 10, &mut SeededRng::new(1))
            .unwrap()[0];
        let max_train = train_scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(far > max_train, "{far} vs {max_train}");
    }

    #[test]
    fn dimension_mismatch() {
        let m = VaeModel::new(3, 2, &mut SeededRng::new(0)).unwrap();
        assert!(matches!(
            vae_novelty_score(&m, &Matrix::zeros(2, 4), 10, &mut SeededRng::new(0)),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }
}
