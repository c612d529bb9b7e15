use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::maskgen::MaskedExample;

use super::model::{loss_and_grad_encoded, mean_loss, EncodedExample, ToyMlm};
use super::vocab::Vocabulary;
use super::ToyError;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub init_scale: f64,
    pub dim: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 30,
            batch_size: 32,
            seed: 0,
            init_scale: 0.01,
            dim: 16,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ToyError> {
        // learning rate 0 is allowed: it freezes the model
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(ToyError::InvalidConfig(format!(
                "learning_rate must be finite and ≥ 0, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 || self.dim == 0 {
            return Err(ToyError::InvalidConfig(
                "epochs, batch_size and dim must be ≥ 1".into(),
            ));
        }
        Ok(())
    }

    /// Fresh model for `vocab` initialised from this config's seed.
    pub fn init_model(&self, vocab: &Vocabulary) -> ToyMlm {
        ToyMlm::new(vocab.len(), self.dim, self.seed, self.init_scale)
    }
}

/// Mean loss over the full training set, before training (entry 0) and after
/// each epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    pub losses: Vec<f64>,
}

impl LossCurve {
    pub fn initial(&self) -> f64 {
        self.losses[0]
    }

    pub fn last(&self) -> f64 {
        *self.losses.last().expect("curve has the initial entry")
    }

    /// `epoch,loss` lines.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,loss\n");
        for (e, l) in self.losses.iter().enumerate() {
            s.push_str(&format!("{e},{l}\n"));
        }
        s
    }
}

/// Plain minibatch gradient descent with a fixed learning rate. The example
/// order is reshuffled every epoch from `(seed, epoch)`.
pub fn train(
    mut model: ToyMlm,
    examples: &[MaskedExample],
    cfg: &TrainConfig,
    vocab: &Vocabulary,
) -> Result<(ToyMlm, LossCurve), ToyError> {
    cfg.validate()?;
    if examples.is_empty() {
        return Err(ToyError::EmptyInput);
    }
    let encoded: Vec<EncodedExample> = examples
        .iter()
        .map(|e| EncodedExample::encode(e, vocab))
        .filter(|e| !e.is_degenerate())
        .collect();
    if encoded.is_empty() {
        return Err(ToyError::AllDegenerate);
    }
    let all: Vec<&EncodedExample> = encoded.iter().collect();
    let mut losses = vec![mean_loss(&model, &all)?];

    let mut order: Vec<usize> = (0..encoded.len()).collect();
    for epoch in 1..=cfg.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(epoch as u64);
        order.sort_unstable();
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&EncodedExample> = chunk.iter().map(|&i| &encoded[i]).collect();
            let (_, grad) = loss_and_grad_encoded(&model, &batch)?;
            for (w, g) in model.embeddings.iter_mut().zip(&grad) {
                *w -= cfg.learning_rate * g;
            }
        }
        let loss = mean_loss(&model, &all)?;
        if !loss.is_finite() || !model.is_finite() {
            return Err(ToyError::NonFiniteLoss { epoch });
        }
        losses.push(loss);
    }
    model.trained = true;
    Ok((model, LossCurve { losses }))
}
