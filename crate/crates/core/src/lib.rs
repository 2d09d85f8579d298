//! Zero-shot and few-shot classifiers as random forests over class-attribute
//! signatures.
//!
//! A class with no labeled training instances is described only by its binary
//! attribute signature. Forests are trained one-vs-all on those signatures,
//! and split selection accounts for the unreliability of the upstream
//! attribute predictors: each candidate split is scored after fractionally
//! propagating the signatures according to the attribute classifier's
//! TPR/FPR at the candidate operating point, estimated on attribute-labeled
//! validation data that is itself propagated down the tree.
//!
//! The crate also ships the reference baselines (plain signature forests and
//! direct attribute prediction), a synthetic controlled-noise lab, and
//! evaluation / cross-validation utilities. All randomness flows from
//! explicit seeds; training and prediction are deterministic regardless of
//! worker count.

pub mod dap;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod forest;
pub mod model;
pub mod noise;
pub mod roc;
pub mod seed;
pub mod signatures;
pub mod uncertainty;

pub use dap::DapModel;
pub use dataset::{load_dataset, DatasetRole, ScoredDataset};
pub use error::{Error, Result};
pub use eval::{
    aggregate_trials, evaluate, grid_cv, CvOutcome, CvRow, EvalReport, ParamGrid, Predictor,
};
pub use forest::{
    entropy, grow_tree, ig_basic, ig_few, ig_instances, ig_zero, node_distribution, predict,
    propagate_hard, propagate_soft, sample_candidate_splits, split_hard, train_model, BankRow,
    CandidateSpace, FractionalState, GrowthConfig, RocMode, SignatureBank, TrainMode, TrainStats,
};
pub use model::{load_model, save_model, Forest, SplitTest, TrainedModel, TreeNode};
pub use noise::{
    apply_noise, corrupt_score, run_noise_sweep, sample_exponential, synth_instances, NoiseConfig,
    NoiseScenario, SweepMethod, SweepPlan, SweepResult,
};
pub use roc::{
    degenerate_attributes, operating_point, split_validation, OperatingPoint, ValidationSubset,
};
pub use signatures::{load_signatures, SignatureSet};
pub use uncertainty::{effective_pass_probability, perturbed_copies, FlipModel};
