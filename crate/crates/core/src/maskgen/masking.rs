use rand::seq::index;
use rand::Rng;

use super::{MaskgenError, MASK};

/// Number of positions masked out of `n_eligible` at `mask_rate`:
/// `max(1, floor(mask_rate * n_eligible))`.
pub fn mask_count(n_eligible: usize, mask_rate: f64) -> usize {
    // the epsilon keeps products like 0.15 * 20 from flooring to 2
    let m = (mask_rate * n_eligible as f64 + 1e-9).floor() as usize;
    m.clamp(1, n_eligible.max(1))
}

/// Picks `mask_count(eligible)` distinct positions uniformly without
/// replacement from `0..n_tokens` minus `protected`, sorted ascending.
pub fn select_mask_positions<R: Rng + ?Sized>(
    n_tokens: usize,
    mask_rate: f64,
    rng: &mut R,
    protected: &[usize],
) -> Result<Vec<usize>, MaskgenError> {
    let eligible: Vec<usize> = if protected.is_empty() {
        (0..n_tokens).collect()
    } else {
        let mut is_protected = vec![false; n_tokens];
        for &p in protected.iter().filter(|&&p| p < n_tokens) {
            is_protected[p] = true;
        }
        (0..n_tokens).filter(|&i| !is_protected[i]).collect()
    };
    if eligible.is_empty() {
        return Err(MaskgenError::NoEligiblePositions);
    }
    let m = mask_count(eligible.len(), mask_rate);
    let mut picked: Vec<usize> = index::sample(rng, eligible.len(), m)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// How selected positions are corrupted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskingScheme {
    /// Every selected token becomes the mask sentinel.
    #[default]
    Sentinel,
    /// 80% sentinel, 10% a random surface from the same example, 10% kept.
    BertMix,
}

/// Replaces the surfaces at `positions` and returns the originals.
pub fn apply_masks<R: Rng + ?Sized>(
    surfaces: &mut [String],
    positions: &[usize],
    scheme: MaskingScheme,
    rng: &mut R,
) -> Vec<String> {
    let targets: Vec<String> = positions.iter().map(|&p| surfaces[p].clone()).collect();
    match scheme {
        MaskingScheme::Sentinel => {
            for &p in positions {
                surfaces[p] = MASK.to_string();
            }
        }
        MaskingScheme::BertMix => {
            let pool: Vec<String> = surfaces.to_vec();
            for &p in positions {
                let roll: f64 = rng.gen();
                if roll < 0.8 {
                    surfaces[p] = MASK.to_string();
                } else if roll < 0.9 {
                    surfaces[p] = pool[rng.gen_range(0..pool.len())].clone();
                }
            }
        }
    }
    targets
}
