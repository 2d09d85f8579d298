//! Attribute-classifier operating characteristics estimated on validation
//! data.
//!
//! Rates are computed over the node-local validation subset so that the
//! dependency between splits on the same attribute is captured: a node
//! reached through `score > t` sees only instances above `t`, so any lower
//! threshold on that attribute yields TPR = FPR = 1 there. When a subset is
//! too thin to estimate rates, both are recomputed over the full validation
//! set.

use crate::dataset::ScoredDataset;
use crate::error::{Error, Result};

/// TPR/FPR of one attribute at one threshold, with the support counts the
/// rates were computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub tpr: f64,
    pub fpr: f64,
    /// Positive / negative support behind the rates (post-fallback counts
    /// when `used_fallback` is set).
    pub n_pos: usize,
    pub n_neg: usize,
    /// Set iff the node-local subset had fewer than `min_support` positives
    /// or negatives and the full validation set was used instead.
    pub used_fallback: bool,
}

/// Indices into a validation dataset; the portion of it inherited at a node.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSubset(Vec<usize>);

impl ValidationSubset {
    /// The root subset: the full validation set.
    pub fn full(n: usize) -> Self {
        ValidationSubset((0..n).collect())
    }

    pub fn from_indices(indices: Vec<usize>, bound: usize) -> Result<Self> {
        let mut seen = vec![false; bound];
        for &i in &indices {
            if i >= bound {
                return Err(Error::Validation(format!(
                    "subset index {i} out of bounds for {bound} instances"
                )));
            }
            if seen[i] {
                return Err(Error::Validation(format!("duplicate subset index {i}")));
            }
            seen[i] = true;
        }
        Ok(ValidationSubset(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn count_rates(
    val: &ScoredDataset,
    indices: impl Iterator<Item = usize>,
    attr: usize,
    threshold: f64,
) -> (usize, usize, usize, usize) {
    let (mut above_pos, mut n_pos, mut above_neg, mut n_neg) = (0, 0, 0, 0);
    for i in indices {
        let label = val
            .attr_label(i, attr)
            .expect("operating_point requires attribute labels");
        if label == 1 {
            n_pos += 1;
            if val.score(i, attr) > threshold {
                above_pos += 1;
            }
        } else {
            n_neg += 1;
            if val.score(i, attr) > threshold {
                above_neg += 1;
            }
        }
    }
    (above_pos, n_pos, above_neg, n_neg)
}

/// TPR/FPR for `attr` at `threshold` over `subset`, falling back to the full
/// validation set when the subset holds fewer than `min_support` positives
/// or negatives. Scores strictly greater than the threshold count as fired.
///
/// Errors with a degenerate-attribute error when even the full set has no
/// positives or no negatives for this attribute; the candidate split must
/// then be discarded.
pub fn operating_point(
    val: &ScoredDataset,
    subset: &ValidationSubset,
    attr: usize,
    threshold: f64,
    min_support: usize,
) -> Result<OperatingPoint> {
    debug_assert!(min_support >= 1);
    debug_assert!((0.0..=1.0).contains(&threshold));
    let (above_pos, n_pos, above_neg, n_neg) =
        count_rates(val, subset.indices().iter().copied(), attr, threshold);
    let (above_pos, n_pos, above_neg, n_neg, used_fallback) =
        if n_pos < min_support || n_neg < min_support {
            let full = count_rates(val, 0..val.len(), attr, threshold);
            (full.0, full.1, full.2, full.3, true)
        } else {
            (above_pos, n_pos, above_neg, n_neg, false)
        };
    if n_pos == 0 {
        return Err(Error::DegenerateAttribute {
            attr,
            missing: "positive",
        });
    }
    if n_neg == 0 {
        return Err(Error::DegenerateAttribute {
            attr,
            missing: "negative",
        });
    }
    Ok(OperatingPoint {
        tpr: above_pos as f64 / n_pos as f64,
        fpr: above_neg as f64 / n_neg as f64,
        n_pos,
        n_neg,
        used_fallback,
    })
}

/// Partitions a subset by the split: instances with `score > t` go left, the
/// rest right. Left and right are disjoint and cover the input.
pub fn split_validation(
    val: &ScoredDataset,
    subset: &ValidationSubset,
    attr: usize,
    threshold: f64,
) -> (ValidationSubset, ValidationSubset) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &i in subset.indices() {
        if val.score(i, attr) > threshold {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    (ValidationSubset(left), ValidationSubset(right))
}

/// Attributes for which the full validation set has no positive or no
/// negative labels; no operating point exists for them at any threshold.
pub fn degenerate_attributes(val: &ScoredDataset) -> Vec<usize> {
    let m = val.num_attributes();
    let mut has_pos = vec![false; m];
    let mut has_neg = vec![false; m];
    for i in 0..val.len() {
        for a in 0..m {
            match val.attr_label(i, a) {
                Some(1) => has_pos[a] = true,
                Some(0) => has_neg[a] = true,
                _ => {}
            }
        }
    }
    (0..m).filter(|&a| !has_pos[a] || !has_neg[a]).collect()
}
