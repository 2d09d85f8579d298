//! Accuracy evaluation, multi-trial aggregation, and grid cross-validation.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dap::DapModel;
use crate::dataset::{DatasetRole, ScoredDataset};
use crate::error::{Error, Result};
use crate::forest::{predict, train_model, GrowthConfig};
use crate::model::TrainedModel;
use crate::seed::{derive_rng, STREAM_CV_FOLDS};
use crate::signatures::SignatureSet;

/// Anything that maps a score vector to (argmax class, K posteriors).
pub trait Predictor {
    fn num_classes(&self) -> usize;
    fn predict_row(&self, scores: &[f64]) -> Result<(usize, Vec<f64>)>;
}

impl Predictor for TrainedModel {
    fn num_classes(&self) -> usize {
        self.signatures.num_classes()
    }
    fn predict_row(&self, scores: &[f64]) -> Result<(usize, Vec<f64>)> {
        predict(self, scores)
    }
}

impl Predictor for DapModel {
    fn num_classes(&self) -> usize {
        self.signatures().num_classes()
    }
    fn predict_row(&self, scores: &[f64]) -> Result<(usize, Vec<f64>)> {
        self.predict(scores)
    }
}

/// Accuracy and confusion counts on a class-labeled dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub per_class_accuracy: Vec<f64>,
    pub n_test: usize,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

impl EvalReport {
    /// One-line CSV summary (with header).
    pub fn csv_summary(&self, method: &str) -> String {
        format!(
            "method,n_test,accuracy\n{method},{},{}\n",
            self.n_test, self.accuracy
        )
    }
}

/// Runs a predictor over a class-labeled dataset.
pub fn evaluate(predictor: &dyn Predictor, test: &ScoredDataset) -> Result<EvalReport> {
    test.require_role(DatasetRole::Test)?;
    let k = predictor.num_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    for i in 0..test.len() {
        let truth = test.class_label(i).expect("role checked above");
        if truth >= k {
            return Err(Error::Validation(format!(
                "class label {truth} out of range for {k} classes"
            )));
        }
        let (pred, _) = predictor.predict_row(test.score_row(i))?;
        confusion[truth][pred] += 1;
    }
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class_accuracy = (0..k)
        .map(|c| {
            let total: usize = confusion[c].iter().sum();
            if total == 0 {
                0.0
            } else {
                confusion[c][c] as f64 / total as f64
            }
        })
        .collect();
    Ok(EvalReport {
        accuracy: correct as f64 / test.len().max(1) as f64,
        per_class_accuracy,
        n_test: test.len(),
        confusion,
    })
}

/// Mean and standard error (sample std / sqrt(T)) of trial accuracies.
pub fn aggregate_trials(accuracies: &[f64]) -> Result<(f64, f64)> {
    let t = accuracies.len();
    if t < 2 {
        return Err(Error::Validation(format!(
            "need at least 2 trials to aggregate, got {t}"
        )));
    }
    let mean = accuracies.iter().sum::<f64>() / t as f64;
    let var = accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
    Ok((mean, (var / t as f64).sqrt()))
}

/// Hyperparameter grid for cross-validation; the cross product of the five
/// axes is searched. Empty axes default to the base config's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub depths: Vec<usize>,
    pub n_attr: Vec<usize>,
    pub n_thresh: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub rhos: Vec<f64>,
}

impl ParamGrid {
    fn axis<T: Clone>(axis: &[T], base: T) -> Vec<T> {
        if axis.is_empty() {
            vec![base]
        } else {
            axis.to_vec()
        }
    }

    /// All configs in the grid, base config fields elsewhere.
    pub fn expand(&self, base: &GrowthConfig) -> Vec<GrowthConfig> {
        let mut out = Vec::new();
        for &depth in &Self::axis(&self.depths, base.max_depth) {
            for &na in &Self::axis(&self.n_attr, base.n_attr_candidates) {
                for &nt in &Self::axis(&self.n_thresh, base.n_thresh_candidates) {
                    for &lambda in &Self::axis(&self.lambdas, base.lambda) {
                        for &rho in &Self::axis(&self.rhos, base.flip_fraction) {
                            let mut cfg = base.clone();
                            cfg.max_depth = depth;
                            cfg.n_attr_candidates = na;
                            cfg.n_thresh_candidates = nt;
                            cfg.lambda = lambda;
                            cfg.flip_fraction = rho;
                            out.push(cfg);
                        }
                    }
                }
            }
        }
        out
    }
}

/// One grid point's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub max_depth: usize,
    pub n_attr_candidates: usize,
    pub n_thresh_candidates: usize,
    pub lambda: f64,
    pub flip_fraction: f64,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub best: GrowthConfig,
    pub table: Vec<CvRow>,
}

/// Grid cross-validation.
///
/// Accuracy needs class labels, so folding works on class-labeled data:
/// with `labeled` given (few-shot style data), it is folded; each grid
/// point trains on the out-fold instances as few-shot data (full validation
/// set as ROC source) and scores the held-out fold. Without it, the
/// validation set itself is folded: the out-fold part serves as ROC source
/// and held-out instances are scored after relabeling each to the class
/// whose signature equals its attribute-label row (instances matching no
/// signature are dropped).
///
/// Grid points whose training fails are excluded; every point failing is an
/// error. Ties prefer smaller depth, then lambda, then flip fraction, then
/// candidate counts. The winner is always a member of the grid.
pub fn grid_cv(
    signatures: &SignatureSet,
    val: &ScoredDataset,
    labeled: Option<&ScoredDataset>,
    base: &GrowthConfig,
    grid: &ParamGrid,
    folds: usize,
) -> Result<CvOutcome> {
    val.require_role(DatasetRole::Validation)?;
    let points = grid.expand(base);
    if points.is_empty() {
        return Err(Error::Config("empty cross-validation grid".into()));
    }
    let fold_source_len = labeled.map_or(val.len(), ScoredDataset::len);
    if folds < 2 || folds > fold_source_len {
        return Err(Error::Config(format!(
            "fold count {folds} not in 2..={fold_source_len}"
        )));
    }

    // Deterministic fold assignment: seeded shuffle, round-robin.
    let mut order: Vec<usize> = (0..fold_source_len).collect();
    let mut rng = derive_rng(base.seed, &[STREAM_CV_FOLDS]);
    order.shuffle(&mut rng);
    let fold_of: Vec<usize> = {
        let mut fold_of = vec![0usize; fold_source_len];
        for (pos, &idx) in order.iter().enumerate() {
            fold_of[idx] = pos % folds;
        }
        fold_of
    };

    // Case A (no labeled data): relabel validation instances by exact
    // signature match, once.
    let relabeled: Option<ScoredDataset> = if labeled.is_none() {
        let matched = relabel_by_signature(val, signatures)?;
        Some(matched)
    } else {
        None
    };

    let mut table = Vec::new();
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    let mut last_error: Option<Error> = None;
    for (point_idx, cfg) in points.iter().enumerate() {
        let mut fold_accuracies = Vec::with_capacity(folds);
        let mut failed = None;
        for fold in 0..folds {
            let out_fold: Vec<usize> = (0..fold_source_len)
                .filter(|&i| fold_of[i] != fold)
                .collect();
            let held: Vec<usize> = (0..fold_source_len)
                .filter(|&i| fold_of[i] == fold)
                .collect();
            let outcome = match labeled {
                Some(data) => {
                    let train_part = data.select(&out_fold);
                    let test_part = data.select(&held);
                    train_model(signatures, val, cfg, Some(&train_part))
                        .and_then(|(model, _)| evaluate(&model, &test_part))
                }
                None => {
                    let roc_part = val.select(&out_fold);
                    let test_part = relabeled.as_ref().unwrap().select(&held);
                    if test_part.is_empty() {
                        Err(Error::Validation(
                            "held-out fold has no signature-matched instances".into(),
                        ))
                    } else {
                        train_model(signatures, &roc_part, cfg, None)
                            .and_then(|(model, _)| evaluate(&model, &test_part))
                    }
                }
            };
            match outcome {
                Ok(report) => fold_accuracies.push(report.accuracy),
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        match failed {
            Some(e) => last_error = Some(e),
            None => {
                let mean = fold_accuracies.iter().sum::<f64>() / folds as f64;
                table.push(CvRow {
                    max_depth: cfg.max_depth,
                    n_attr_candidates: cfg.n_attr_candidates,
                    n_thresh_candidates: cfg.n_thresh_candidates,
                    lambda: cfg.lambda,
                    flip_fraction: cfg.flip_fraction,
                    mean_accuracy: mean,
                });
                candidates.push((mean, point_idx));
            }
        }
    }

    if candidates.is_empty() {
        return Err(Error::Growth(format!(
            "every grid point failed; last error: {}",
            last_error.map_or_else(|| "unknown".into(), |e| e.to_string())
        )));
    }
    let tie_key = |idx: usize| {
        let c = &points[idx];
        (
            c.max_depth,
            float_key(c.lambda),
            float_key(c.flip_fraction),
            c.n_attr_candidates,
            c.n_thresh_candidates,
        )
    };
    let mut best = candidates[0];
    for &(acc, idx) in &candidates[1..] {
        if acc > best.0 || (acc == best.0 && tie_key(idx) < tie_key(best.1)) {
            best = (acc, idx);
        }
    }
    Ok(CvOutcome {
        best: points[best.1].clone(),
        table,
    })
}

fn float_key(x: f64) -> u64 {
    // Orders non-negative finite floats; enough for lambda and rho.
    x.to_bits()
}

/// Builds a class-labeled copy of the matchable validation instances: an
/// instance whose attribute-label row equals signature row k gets class k.
fn relabel_by_signature(val: &ScoredDataset, signatures: &SignatureSet) -> Result<ScoredDataset> {
    let mut ids = Vec::new();
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    let mut classes = Vec::new();
    for i in 0..val.len() {
        let row = val.attr_label_row(i).expect("validation role checked");
        if let Some(k) = (0..signatures.num_classes()).find(|&k| signatures.row(k) == row) {
            ids.push(val.ids()[i].clone());
            scores.push(val.score_row(i).to_vec());
            labels.push(row.to_vec());
            classes.push(k);
        }
    }
    if ids.is_empty() {
        return Err(Error::Validation(
            "no validation instance matches any signature; cross-validation needs \
             class-labeled data"
                .into(),
        ));
    }
    ScoredDataset::new(
        ids,
        val.attribute_names().to_vec(),
        scores,
        Some(labels),
        Some(classes),
    )
}
