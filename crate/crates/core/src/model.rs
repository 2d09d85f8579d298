//! Trained model representation and its schema-versioned file format.
//!
//! The file is a single JSON document. Thresholds and posteriors are written
//! with shortest round-trip formatting, so save/load reproduces every
//! numeric field bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::GrowthConfig;
use crate::signatures::SignatureSet;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// A candidate or chosen split: compare attribute `attr`'s score against
/// `threshold`, strictly-greater goes left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitTest {
    pub attr: usize,
    pub threshold: f64,
}

/// One node of a decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        #[serde(rename = "split_attr")]
        attr: usize,
        #[serde(rename = "split_threshold")]
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        #[serde(rename = "leaf_posterior")]
        posterior: f64,
    },
}

impl TreeNode {
    pub fn split(test: SplitTest, left: TreeNode, right: TreeNode) -> Self {
        TreeNode::Split {
            attr: test.attr,
            threshold: test.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn leaf(posterior: f64) -> Self {
        TreeNode::Leaf { posterior }
    }

    /// Leaf posterior reached by routing `scores` down the tree.
    pub fn traverse(&self, scores: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { posterior } => return *posterior,
                TreeNode::Split {
                    attr,
                    threshold,
                    left,
                    right,
                } => {
                    node = if scores[*attr] > *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    fn validate(&self, num_attributes: usize, max_depth: usize) -> Result<()> {
        match self {
            TreeNode::Leaf { posterior } => {
                if !(0.0..=1.0).contains(posterior) {
                    return Err(Error::Validation(format!(
                        "leaf posterior {posterior} outside [0,1]"
                    )));
                }
            }
            TreeNode::Split {
                attr,
                threshold,
                left,
                right,
            } => {
                if *attr >= num_attributes {
                    return Err(Error::Validation(format!(
                        "split attribute {attr} out of range for {num_attributes} attributes"
                    )));
                }
                if !(*threshold > 0.0 && *threshold < 1.0) {
                    return Err(Error::Validation(format!(
                        "split threshold {threshold} not in (0,1)"
                    )));
                }
                if max_depth == 0 {
                    return Err(Error::Validation("tree exceeds max_depth".into()));
                }
                left.validate(num_attributes, max_depth - 1)?;
                right.validate(num_attributes, max_depth - 1)?;
            }
        }
        Ok(())
    }
}

/// The J trees of one one-vs-all forest.
pub type Forest = Vec<TreeNode>;

/// Per-class forests plus everything needed to reproduce and apply them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub config: GrowthConfig,
    pub signatures: SignatureSet,
    /// `forests[k][j]` is tree j of the forest for class k.
    pub forests: Vec<Forest>,
}

impl TrainedModel {
    pub fn num_classes(&self) -> usize {
        self.signatures.num_classes()
    }

    pub fn num_attributes(&self) -> usize {
        self.signatures.num_attributes()
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.forests.len() != self.signatures.num_classes() {
            return Err(Error::Validation(format!(
                "{} forests for {} classes",
                self.forests.len(),
                self.signatures.num_classes()
            )));
        }
        for (k, forest) in self.forests.iter().enumerate() {
            if forest.len() != self.config.n_trees {
                return Err(Error::Validation(format!(
                    "forest {k} has {} trees, config says {}",
                    forest.len(),
                    self.config.n_trees
                )));
            }
            for tree in forest {
                tree.validate(self.signatures.num_attributes(), self.config.max_depth)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    /// Candidate (m,t) sets are redrawn at every node.
    candidate_sampling: String,
    signature_digest: String,
    config: GrowthConfig,
    signatures: SignatureSet,
    forests: Vec<Forest>,
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    model.validate()?;
    let file = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        candidate_sampling: "per-node".to_string(),
        signature_digest: model.signatures.digest(),
        config: model.config.clone(),
        signatures: model.signatures.clone(),
        forests: model.forests.clone(),
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Parse(format!("model serialization failed: {e}")))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    // Check the version before decoding the full document so a future
    // schema fails with a version error, not a shape error.
    let probe: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let found = probe
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::Parse(format!("{}: missing schema_version", path.display())))?;
    if found != u64::from(MODEL_SCHEMA_VERSION) {
        return Err(Error::SchemaVersion {
            found: found as u32,
            expected: MODEL_SCHEMA_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_str(&raw)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if file.signature_digest != file.signatures.digest() {
        return Err(Error::Validation(format!(
            "{}: signature digest mismatch (file corrupted or edited)",
            path.display()
        )));
    }
    let model = TrainedModel {
        config: file.config,
        signatures: file.signatures,
        forests: file.forests,
    };
    model.validate()?;
    Ok(model)
}
