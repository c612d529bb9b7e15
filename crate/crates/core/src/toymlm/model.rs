use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::maskgen::{MaskedExample, Task};

use super::vocab::{Vocabulary, MASK_ID};
use super::ToyError;

/// Tied-embedding bag-of-context masked-word predictor.
///
/// The context vector is the mean embedding of every unmasked, known token
/// in the example; the score of word `v` at a masked position is
/// `embedding[v] · context`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyMlm {
    /// Row-major `vocab_size × dim`.
    pub embeddings: Vec<f64>,
    pub vocab_size: usize,
    pub dim: usize,
    pub seed: u64,
    pub trained: bool,
    /// Task the model was trained on, if any.
    pub task: Option<Task>,
}

impl ToyMlm {
    /// Uniform init in `[-init_scale, init_scale]`.
    pub fn new(vocab_size: usize, dim: usize, seed: u64, init_scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let embeddings = (0..vocab_size * dim)
            .map(|_| {
                if init_scale > 0.0 {
                    rng.gen_range(-init_scale..=init_scale)
                } else {
                    0.0
                }
            })
            .collect();
        ToyMlm {
            embeddings,
            vocab_size,
            dim,
            seed,
            trained: false,
            task: None,
        }
    }

    pub fn zeros(vocab_size: usize, dim: usize) -> Self {
        ToyMlm::new(vocab_size, dim, 0, 0.0)
    }

    pub fn row(&self, id: usize) -> &[f64] {
        &self.embeddings[id * self.dim..(id + 1) * self.dim]
    }

    pub fn row_mut(&mut self, id: usize) -> &mut [f64] {
        &mut self.embeddings[id * self.dim..(id + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.embeddings.iter().all(|x| x.is_finite())
    }
}

/// An example reduced to vocabulary ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedExample {
    /// Unmasked tokens that are neither `[UNK]` nor `[MASK]`.
    pub context: Vec<usize>,
    /// Target id for each masked position.
    pub targets: Vec<usize>,
}

impl EncodedExample {
    pub fn encode(ex: &MaskedExample, vocab: &Vocabulary) -> Self {
        let mut masked = ex.mask_positions.iter().peekable();
        let mut context = Vec::with_capacity(ex.tokens.len());
        for (i, t) in ex.tokens.iter().enumerate() {
            if masked.peek() == Some(&&i) {
                masked.next();
                continue;
            }
            let id = vocab.id(&t.surface);
            if id > MASK_ID {
                context.push(id);
            }
        }
        let targets = ex.targets.iter().map(|s| vocab.id(s)).collect();
        EncodedExample { context, targets }
    }

    pub fn is_degenerate(&self) -> bool {
        self.context.is_empty() || self.targets.is_empty()
    }
}

fn context_vector(model: &ToyMlm, context: &[usize]) -> Vec<f64> {
    let mut h = vec![0.0; model.dim];
    for &id in context {
        for (a, b) in h.iter_mut().zip(model.row(id)) {
            *a += b;
        }
    }
    let inv = 1.0 / context.len() as f64;
    h.iter_mut().for_each(|x| *x *= inv);
    h
}

/// Softmax over `E · h`.
fn distribution(model: &ToyMlm, h: &[f64]) -> Vec<f64> {
    let mut logits: Vec<f64> = (0..model.vocab_size)
        .map(|v| model.row(v).iter().zip(h).map(|(a, b)| a * b).sum())
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for l in &mut logits {
        *l = (*l - max).exp();
        z += *l;
    }
    logits.iter_mut().for_each(|p| *p /= z);
    logits
}

/// Probability rows, one per masked position.
pub fn forward(
    model: &ToyMlm,
    ex: &MaskedExample,
    vocab: &Vocabulary,
) -> Result<Vec<Vec<f64>>, ToyError> {
    let enc = EncodedExample::encode(ex, vocab);
    if enc.context.is_empty() {
        return Err(ToyError::DegenerateContext);
    }
    let p = distribution(model, &context_vector(model, &enc.context));
    Ok(vec![p; enc.targets.len()])
}

/// Summed loss, gradient accumulation and masked-position count over
/// encoded examples. Degenerate examples are skipped.
pub(crate) fn accumulate(
    model: &ToyMlm,
    batch: &[&EncodedExample],
    mut grad: Option<&mut [f64]>,
) -> (f64, usize) {
    let d = model.dim;
    let mut loss = 0.0;
    let mut positions = 0;
    for ex in batch.iter().filter(|e| !e.is_degenerate()) {
        let h = context_vector(model, &ex.context);
        let p = distribution(model, &h);
        for &t in &ex.targets {
            loss -= p[t].max(f64::MIN_POSITIVE).ln();
        }
        positions += ex.targets.len();
        let Some(g) = grad.as_deref_mut() else {
            continue;
        };
        // dL/dlogits summed over this example's masked positions
        let m = ex.targets.len() as f64;
        let mut dlogits: Vec<f64> = p.iter().map(|&pv| m * pv).collect();
        for &t in &ex.targets {
            dlogits[t] -= 1.0;
        }
        let mut dh = vec![0.0; d];
        for (v, &dl) in dlogits.iter().enumerate() {
            let row = model.row(v);
            let grow = &mut g[v * d..(v + 1) * d];
            for k in 0..d {
                grow[k] += dl * h[k];
                dh[k] += dl * row[k];
            }
        }
        let inv = 1.0 / ex.context.len() as f64;
        for &c in &ex.context {
            let grow = &mut g[c * d..(c + 1) * d];
            for k in 0..d {
                grow[k] += dh[k] * inv;
            }
        }
    }
    (loss, positions)
}

/// Mean cross-entropy over every masked position in the batch and its exact
/// gradient with respect to the (tied) embedding matrix.
pub fn loss_and_grad(
    model: &ToyMlm,
    batch: &[MaskedExample],
    vocab: &Vocabulary,
) -> Result<(f64, Vec<f64>), ToyError> {
    let encoded: Vec<EncodedExample> = batch
        .iter()
        .map(|e| EncodedExample::encode(e, vocab))
        .collect();
    let refs: Vec<&EncodedExample> = encoded.iter().collect();
    loss_and_grad_encoded(model, &refs)
}

pub fn loss_and_grad_encoded(
    model: &ToyMlm,
    batch: &[&EncodedExample],
) -> Result<(f64, Vec<f64>), ToyError> {
    let mut grad = vec![0.0; model.embeddings.len()];
    let (loss, n) = accumulate(model, batch, Some(&mut grad));
    if n == 0 {
        return Err(ToyError::AllDegenerate);
    }
    let inv = 1.0 / n as f64;
    grad.iter_mut().for_each(|g| *g *= inv);
    Ok((loss * inv, grad))
}

/// Mean cross-entropy only.
pub fn mean_loss(model: &ToyMlm, batch: &[&EncodedExample]) -> Result<f64, ToyError> {
    let (loss, n) = accumulate(model, batch, None);
    if n == 0 {
        return Err(ToyError::AllDegenerate);
    }
    Ok(loss / n as f64)
}
