//! Direct attribute prediction baseline: per-class likelihood ratio of the
//! attribute scores against the signature bits, with attribute priors.

use crate::error::{Error, Result};
use crate::signatures::SignatureSet;

/// Scores are clamped into `[EPS, 1-EPS]` before taking logs.
pub const DAP_SCORE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DapModel {
    signatures: SignatureSet,
    priors: Vec<f64>,
}

impl DapModel {
    pub fn new(signatures: SignatureSet, priors: Vec<f64>) -> Result<Self> {
        if priors.len() != signatures.num_attributes() {
            return Err(Error::Validation(format!(
                "{} priors for {} attributes",
                priors.len(),
                signatures.num_attributes()
            )));
        }
        for &p in &priors {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Validation(format!(
                    "attribute prior {p} not in (0,1)"
                )));
            }
        }
        Ok(DapModel { signatures, priors })
    }

    /// Uniform priors of 0.5 for every attribute.
    pub fn uniform(signatures: SignatureSet) -> Self {
        let m = signatures.num_attributes();
        DapModel {
            signatures,
            priors: vec![0.5; m],
        }
    }

    /// Priors from validation label frequencies, clamped into
    /// `[EPS, 1-EPS]` so degenerate attributes stay usable.
    pub fn from_validation_frequencies(
        signatures: SignatureSet,
        val: &crate::dataset::ScoredDataset,
    ) -> Result<Self> {
        if !val.has_attr_labels() {
            return Err(Error::Validation(
                "prior estimation requires attribute labels".into(),
            ));
        }
        if val.attribute_names() != signatures.attribute_names() {
            return Err(Error::Validation(
                "validation attribute names do not match the signature set".into(),
            ));
        }
        let m = signatures.num_attributes();
        let n = val.len().max(1);
        let priors = (0..m)
            .map(|a| {
                let ones = (0..val.len())
                    .filter(|&i| val.attr_label(i, a) == Some(1))
                    .count();
                (ones as f64 / n as f64).clamp(DAP_SCORE_EPS, 1.0 - DAP_SCORE_EPS)
            })
            .collect();
        Ok(DapModel { signatures, priors })
    }

    pub fn signatures(&self) -> &SignatureSet {
        &self.signatures
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Per-class log score:
    /// sum over attributes of `log(p_m / prior_m)` where the signature bit
    /// is 1 and `log((1-p_m) / (1-prior_m))` where it is 0, with the score
    /// `p_m` clamped away from {0, 1}.
    pub fn log_scores(&self, scores: &[f64]) -> Result<Vec<f64>> {
        let m = self.signatures.num_attributes();
        if scores.len() != m {
            return Err(Error::Validation(format!(
                "score vector has {} entries, model expects {m}",
                scores.len()
            )));
        }
        let k = self.signatures.num_classes();
        let mut out = vec![0.0; k];
        for (a, &raw) in scores.iter().enumerate() {
            let p = raw.clamp(DAP_SCORE_EPS, 1.0 - DAP_SCORE_EPS);
            let log_pos = p.ln() - self.priors[a].ln();
            let log_neg = (1.0 - p).ln() - (1.0 - self.priors[a]).ln();
            for (class, score) in out.iter_mut().enumerate() {
                *score += if self.signatures.bit(class, a) == 1 {
                    log_pos
                } else {
                    log_neg
                };
            }
        }
        Ok(out)
    }

    /// Argmax class (ties to the lowest index) and normalized posteriors.
    pub fn predict(&self, scores: &[f64]) -> Result<(usize, Vec<f64>)> {
        let log_scores = self.log_scores(scores)?;
        let mut best = 0;
        for (k, &s) in log_scores.iter().enumerate() {
            if s > log_scores[best] {
                best = k;
            }
        }
        let max = log_scores[best];
        let mut posteriors: Vec<f64> = log_scores.iter().map(|&s| (s - max).exp()).collect();
        let total: f64 = posteriors.iter().sum();
        for p in &mut posteriors {
            *p /= total;
        }
        Ok((best, posteriors))
    }
}
