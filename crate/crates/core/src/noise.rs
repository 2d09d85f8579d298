//! Synthetic controlled-noise lab: ideal signature-valued attribute scores
//! corrupted by wrapped exponential noise, and the sweep comparing methods
//! across noise levels.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dap::DapModel;
use crate::dataset::ScoredDataset;
use crate::error::{Error, Result};
use crate::eval::{aggregate_trials, evaluate};
use crate::forest::{train_model, GrowthConfig, TrainMode};
use crate::seed::{derive_rng, derive_seed, STREAM_SWEEP_TRIAL};
use crate::signatures::SignatureSet;

/// How noise levels vary across attribute classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseScenario {
    /// Every attribute classifier equally noisy (mean eta).
    Uniform,
    /// Each attribute's mean noise drawn once per trial from Exp(eta).
    PerAttribute,
}

impl fmt::Display for NoiseScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseScenario::Uniform => write!(f, "uniform"),
            NoiseScenario::PerAttribute => write!(f, "per-attribute"),
        }
    }
}

impl FromStr for NoiseScenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(NoiseScenario::Uniform),
            "per-attribute" | "per_attribute" => Ok(NoiseScenario::PerAttribute),
            other => Err(Error::Config(format!("unknown noise scenario `{other}`"))),
        }
    }
}

/// Generation parameters for one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Mean noise level.
    pub eta: f64,
    pub scenario: NoiseScenario,
    pub n_val_per_class: usize,
    pub n_test_per_class: usize,
    pub trials: usize,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eta.is_nan() || self.eta < 0.0 {
            return Err(Error::Config(format!("eta {} must be >= 0", self.eta)));
        }
        if self.n_val_per_class < 1 || self.n_test_per_class < 1 || self.trials < 1 {
            return Err(Error::Config("counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// `n ~ Exp(mean)` by inverse CDF; zero mean gives zero noise.
pub fn sample_exponential(mean: f64, rng: &mut impl Rng) -> f64 {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        return 0.0;
    }
    let u: f64 = rng.random(); // [0, 1)
    -mean * (1.0 - u).ln()
}

/// The corruption rule: positive bits lose `n mod 1`, negative bits gain
/// it, keeping every score in [0,1].
pub fn apply_noise(bit: u8, n: f64) -> f64 {
    let wrapped = n % 1.0;
    if bit == 1 {
        1.0 - wrapped
    } else {
        wrapped
    }
}

/// Draws noise with mean `eta` and corrupts an ideal score equal to `bit`.
pub fn corrupt_score(bit: u8, eta: f64, rng: &mut impl Rng) -> f64 {
    apply_noise(bit, sample_exponential(eta, rng))
}

/// Synthesizes `n_per_class` instances per class: scores are the class's
/// signature bits corrupted with per-attribute noise means, attribute
/// labels are the exact bits, and class labels identify the class. The
/// result serves every dataset role.
pub fn synth_instances(
    signatures: &SignatureSet,
    per_attribute_eta: &[f64],
    n_per_class: usize,
    rng: &mut impl Rng,
) -> Result<ScoredDataset> {
    let m = signatures.num_attributes();
    if per_attribute_eta.len() != m {
        return Err(Error::Config(format!(
            "{} noise means for {m} attributes",
            per_attribute_eta.len()
        )));
    }
    if per_attribute_eta.iter().any(|&e| e.is_nan() || e < 0.0) {
        return Err(Error::Config("noise means must be >= 0".into()));
    }
    let mut ids = Vec::new();
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    let mut classes = Vec::new();
    for k in 0..signatures.num_classes() {
        for i in 0..n_per_class {
            ids.push(format!("synth_{k}_{i}"));
            let row: Vec<f64> = (0..m)
                .map(|a| corrupt_score(signatures.bit(k, a), per_attribute_eta[a], rng))
                .collect();
            scores.push(row);
            labels.push(signatures.row(k).to_vec());
            classes.push(k);
        }
    }
    ScoredDataset::new(
        ids,
        signatures.attribute_names().to_vec(),
        scores,
        Some(labels),
        Some(classes),
    )
}

/// Methods the sweep compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    /// Unreliability-aware forest.
    Ours,
    /// Plain signature forest (basic mode).
    SignatureRf,
    /// Direct attribute prediction with uniform priors.
    Dap,
}

impl fmt::Display for SweepMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepMethod::Ours => write!(f, "ours"),
            SweepMethod::SignatureRf => write!(f, "signature-rf"),
            SweepMethod::Dap => write!(f, "dap"),
        }
    }
}

impl FromStr for SweepMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" => Ok(SweepMethod::Ours),
            "signature-rf" | "signature_rf" => Ok(SweepMethod::SignatureRf),
            "dap" => Ok(SweepMethod::Dap),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Full sweep specification: the eta grid, scenario, methods, trial count,
/// per-class set sizes, and the forest configuration (its mode is
/// overridden per method; its seed is derived per trial).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub eta_grid: Vec<f64>,
    pub scenario: NoiseScenario,
    pub methods: Vec<SweepMethod>,
    pub trials: usize,
    pub n_val_per_class: usize,
    pub n_test_per_class: usize,
    pub growth: GrowthConfig,
    pub seed: u64,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        self.growth.validate()?;
        if self.eta_grid.is_empty() {
            return Err(Error::Config("empty eta grid".into()));
        }
        if self.eta_grid.iter().any(|&e| e.is_nan() || e < 0.0) {
            return Err(Error::Config("eta values must be >= 0".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.trials < 2 {
            return Err(Error::Config(
                "need at least 2 trials for standard errors".into(),
            ));
        }
        if self.n_val_per_class < 1 || self.n_test_per_class < 1 {
            return Err(Error::Config("per-class counts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scenario: NoiseScenario,
    pub eta: f64,
    pub method: SweepMethod,
    pub trial_count: usize,
    pub mean_accuracy: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, eta: f64, method: SweepMethod) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.eta == eta && r.method == method)
    }

    /// CSV with `#`-prefixed metadata lines before the header.
    pub fn to_csv(&self, metadata: &[String]) -> String {
        let mut out = String::new();
        for line in metadata {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("scenario,eta,method,trial_count,mean_accuracy,std_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.scenario, r.eta, r.method, r.trial_count, r.mean_accuracy, r.std_error
            ));
        }
        out
    }
}

/// Runs the controlled-noise comparison.
///
/// Per (eta, trial): the per-attribute noise means are drawn (scenario
/// dependent), disjoint validation and test sets are generated with the
/// same parameters, and every method is trained/applied on that shared
/// draw. Trials run in parallel; all randomness is derived from the plan
/// seed, so the result is identical regardless of worker count.
pub fn run_noise_sweep(signatures: &SignatureSet, plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let m = signatures.num_attributes();

    let jobs: Vec<(usize, usize)> = (0..plan.eta_grid.len())
        .flat_map(|e| (0..plan.trials).map(move |t| (e, t)))
        .collect();
    let per_trial: Result<Vec<Vec<f64>>> = jobs
        .par_iter()
        .map(|&(eta_idx, trial)| {
            let eta = plan.eta_grid[eta_idx];
            let tags = |sub: u64| [STREAM_SWEEP_TRIAL, eta_idx as u64, trial as u64, sub];
            let per_attr_eta: Vec<f64> = match plan.scenario {
                NoiseScenario::Uniform => vec![eta; m],
                NoiseScenario::PerAttribute => {
                    let mut rng = derive_rng(plan.seed, &tags(0));
                    (0..m).map(|_| sample_exponential(eta, &mut rng)).collect()
                }
            };
            let val = synth_instances(
                signatures,
                &per_attr_eta,
                plan.n_val_per_class,
                &mut derive_rng(plan.seed, &tags(1)),
            )?;
            let test = synth_instances(
                signatures,
                &per_attr_eta,
                plan.n_test_per_class,
                &mut derive_rng(plan.seed, &tags(2)),
            )?;
            plan.methods
                .iter()
                .enumerate()
                .map(|(mi, &method)| {
                    let accuracy = match method {
                        SweepMethod::Dap => {
                            let dap = DapModel::uniform(signatures.clone());
                            evaluate(&dap, &test)?.accuracy
                        }
                        SweepMethod::Ours | SweepMethod::SignatureRf => {
                            let mut cfg = plan.growth.clone();
                            cfg.mode = match method {
                                SweepMethod::Ours => TrainMode::Unreliable,
                                _ => TrainMode::Basic,
                            };
                            cfg.seed = derive_seed(plan.seed, &tags(10 + mi as u64));
                            let (model, _) = train_model(signatures, &val, &cfg, None)?;
                            evaluate(&model, &test)?.accuracy
                        }
                    };
                    Ok(accuracy)
                })
                .collect()
        })
        .collect();
    let per_trial = per_trial?;

    let mut rows = Vec::new();
    for (eta_idx, &eta) in plan.eta_grid.iter().enumerate() {
        for (mi, &method) in plan.methods.iter().enumerate() {
            let accuracies: Vec<f64> = (0..plan.trials)
                .map(|t| per_trial[eta_idx * plan.trials + t][mi])
                .collect();
            let (mean_accuracy, std_error) = aggregate_trials(&accuracies)?;
            rows.push(SweepRow {
                scenario: plan.scenario,
                eta,
                method,
                trial_count: plan.trials,
                mean_accuracy,
                std_error,
            });
        }
    }
    Ok(SweepResult { rows })
}
