//! Class-signature uncertainty: instances of a class can lack attributes the
//! class-level signature asserts (occlusion and the like).
//!
//! The training path closes over this with a flip-probability expansion of
//! the soft propagation rates: the chance of passing a split is summed over
//! the possible true attribute values given the annotated bit. An explicit
//! sampled-copies construction is also provided; it converges to the
//! expansion and exists to cross-check it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{BankRow, SignatureBank};
use crate::roc::OperatingPoint;
use crate::signatures::SignatureSet;

/// Probability that an annotated bit differs from the instance's true
/// attribute value. Only positive bits flip by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipModel {
    /// P(true attribute absent | annotated 1).
    pub flip_pos: f64,
    /// P(true attribute present | annotated 0). Defaults to 0.
    pub flip_neg: f64,
}

impl FlipModel {
    pub fn identity() -> Self {
        FlipModel {
            flip_pos: 0.0,
            flip_neg: 0.0,
        }
    }

    /// Flips only positive bits, with probability `flip_pos`.
    pub fn positive_only(flip_pos: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip_pos) {
            return Err(Error::Config(format!(
                "flip fraction {flip_pos} not in [0,1]"
            )));
        }
        Ok(FlipModel {
            flip_pos,
            flip_neg: 0.0,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.flip_pos == 0.0 && self.flip_neg == 0.0
    }
}

/// Probability that an instance annotated `bit` for this attribute scores
/// above the operating point's threshold:
/// sum over true values s of P(score > t | a = s) P(a = s | annotated bit),
/// where P(score > t | a=1) is the TPR and P(score > t | a=0) the FPR.
///
/// With an identity flip model this is exactly the TPR (bit 1) or FPR
/// (bit 0); in general it lies between the two rates.
pub fn effective_pass_probability(bit: u8, op: &OperatingPoint, flip: &FlipModel) -> f64 {
    let flip_prob = if bit == 1 { flip.flip_pos } else { flip.flip_neg };
    let (rate_same, rate_other) = if bit == 1 {
        (op.tpr, op.fpr)
    } else {
        (op.fpr, op.tpr)
    };
    (1.0 - flip_prob) * rate_same + flip_prob * rate_other
}

/// Expands each signature into the original plus `copies` perturbed rows,
/// each with `ceil(rho * positive_bits)` randomly chosen positive bits
/// cleared. Every row of a class carries weight 1/(1+copies), so the class
/// keeps unit total mass. Flipped positions are drawn uniformly without
/// replacement.
pub fn perturbed_copies(
    signatures: &SignatureSet,
    rho: f64,
    copies: usize,
    rng: &mut impl Rng,
) -> Result<SignatureBank> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Config(format!("flip fraction {rho} not in [0,1]")));
    }
    let weight = 1.0 / (1 + copies) as f64;
    let mut rows = Vec::with_capacity(signatures.num_classes() * (1 + copies));
    for k in 0..signatures.num_classes() {
        let original = signatures.row(k).to_vec();
        let positive_positions: Vec<usize> = original
            .iter()
            .enumerate()
            .filter_map(|(m, &b)| (b == 1).then_some(m))
            .collect();
        let n_flip = (rho * positive_positions.len() as f64).ceil() as usize;
        let n_flip = n_flip.min(positive_positions.len());
        rows.push(BankRow {
            class: k,
            weight,
            bits: original.clone(),
        });
        for _ in 0..copies {
            let mut bits = original.clone();
            if n_flip > 0 {
                let chosen =
                    rand::seq::index::sample(rng, positive_positions.len(), n_flip);
                for idx in chosen {
                    bits[positive_positions[idx]] = 0;
                }
            }
            rows.push(BankRow {
                class: k,
                weight,
                bits,
            });
        }
    }
    Ok(SignatureBank::from_rows(
        rows,
        signatures.num_classes(),
        signatures.num_attributes(),
    ))
}
