//! One-vs-all zero-shot random forests over attribute signatures.
//!
//! Trees are grown from the class signatures themselves: each signature is
//! the lone training exemplar for its class. In `basic` mode signatures
//! route hard through candidate splits. In `unreliable` mode each signature
//! propagates fractionally according to the attribute classifier's TPR/FPR
//! at the candidate operating point, so split selection prefers attributes
//! that are both discriminative and actually learnable. Few-shot training
//! blends in the information gain of class-labeled instances, which route
//! hard (their scores are real classifier outputs and need no error model).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetRole, ScoredDataset};
use crate::error::{Error, Result};
use crate::model::{Forest, SplitTest, TrainedModel, TreeNode};
use crate::roc::{
    degenerate_attributes, operating_point, split_validation, OperatingPoint, ValidationSubset,
};
use crate::seed::{derive_rng, STREAM_NODE};
use crate::signatures::SignatureSet;
use crate::uncertainty::{effective_pass_probability, FlipModel};

/// How signatures propagate during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    /// Hard signature splits, no error model.
    Basic,
    /// Fractional propagation by validation-estimated TPR/FPR.
    Unreliable,
}

/// Where operating points are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocMode {
    /// Node-local validation subsets, capturing dependencies between splits.
    NodeLocal,
    /// Always the full validation set (the "w/o roc propagation" ablation).
    Global,
}

/// All knobs of forest training. Defaults follow the reference settings:
/// 100 trees of depth 9 with 10 attribute and 7 threshold candidates per
/// node, a 5% minimum mass fraction, and a fallback support of 10.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub max_depth: usize,
    pub n_trees: usize,
    pub n_attr_candidates: usize,
    pub n_thresh_candidates: usize,
    /// Branch terminates when node mass falls below this fraction of root
    /// mass.
    pub min_mass_fraction: f64,
    pub mode: TrainMode,
    pub roc_mode: RocMode,
    /// Few-shot weight on the signature gain; 1 = signatures only.
    pub lambda: f64,
    /// Probability that an annotated-positive signature bit is truly absent.
    pub flip_fraction: f64,
    /// Minimum positives and negatives a validation subset needs before
    /// rates fall back to the full set.
    pub min_support: usize,
    pub seed: u64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            max_depth: 9,
            n_trees: 100,
            n_attr_candidates: 10,
            n_thresh_candidates: 7,
            min_mass_fraction: 0.05,
            mode: TrainMode::Unreliable,
            roc_mode: RocMode::NodeLocal,
            lambda: 1.0,
            flip_fraction: 0.0,
            min_support: 10,
            seed: 0,
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 || self.max_depth > 60 {
            return Err(Error::Config(format!(
                "max_depth {} not in 1..=60",
                self.max_depth
            )));
        }
        if self.n_trees < 1 {
            return Err(Error::Config("n_trees must be at least 1".into()));
        }
        if self.n_attr_candidates < 1 || self.n_thresh_candidates < 1 {
            return Err(Error::Config(
                "candidate counts must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.min_mass_fraction) {
            return Err(Error::Config(format!(
                "min_mass_fraction {} not in [0,1]",
                self.min_mass_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda {} not in [0,1]", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.flip_fraction) {
            return Err(Error::Config(format!(
                "flip_fraction {} not in [0,1]",
                self.flip_fraction
            )));
        }
        if self.min_support < 1 {
            return Err(Error::Config("min_support must be at least 1".into()));
        }
        Ok(())
    }
}

/// One training row: a signature (or a perturbed copy of one) with the
/// class it stands for and its share of that class's unit mass.
#[derive(Debug, Clone, PartialEq)]
pub struct BankRow {
    pub class: usize,
    pub weight: f64,
    pub bits: Vec<u8>,
}

/// The training rows a tree is grown from. Plain mode carries one row per
/// class with weight 1; the sampled-copies uncertainty check expands each
/// class into weighted perturbed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureBank {
    rows: Vec<BankRow>,
    num_classes: usize,
    num_attributes: usize,
}

impl SignatureBank {
    pub fn plain(signatures: &SignatureSet) -> Self {
        let rows = (0..signatures.num_classes())
            .map(|k| BankRow {
                class: k,
                weight: 1.0,
                bits: signatures.row(k).to_vec(),
            })
            .collect();
        SignatureBank {
            rows,
            num_classes: signatures.num_classes(),
            num_attributes: signatures.num_attributes(),
        }
    }

    pub fn from_rows(rows: Vec<BankRow>, num_classes: usize, num_attributes: usize) -> Self {
        SignatureBank {
            rows,
            num_classes,
            num_attributes,
        }
    }

    pub fn rows(&self) -> &[BankRow] {
        &self.rows
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_attributes(&self) -> usize {
        self.num_attributes
    }

    pub fn root_masses(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.weight).collect()
    }
}

/// Per-node training state: fractional signature masses aligned with the
/// bank rows, the node's validation subset, the few-shot instances that
/// reached the node, and the node depth.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalState {
    pub masses: Vec<f64>,
    pub val_subset: ValidationSubset,
    pub fewshot_subset: Option<Vec<usize>>,
    pub depth: usize,
}

impl FractionalState {
    /// Root state: every signature fully present, full validation set,
    /// every few-shot instance.
    pub fn root(bank: &SignatureBank, val_len: usize, fewshot_len: Option<usize>) -> Self {
        FractionalState {
            masses: bank.root_masses(),
            val_subset: ValidationSubset::full(val_len),
            fewshot_subset: fewshot_len.map(|n| (0..n).collect()),
            depth: 0,
        }
    }
}

/// Shannon entropy in bits. The distribution must be non-negative and sum
/// to 1 within 1e-9; 0 log 0 counts as 0. Panics on a contract violation.
pub fn entropy(dist: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut h = 0.0;
    for &p in dist {
        assert!(p >= 0.0, "entropy: negative probability {p}");
        sum += p;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    assert!(
        (sum - 1.0).abs() <= 1e-9,
        "entropy: distribution sums to {sum}, not 1"
    );
    h
}

#[inline]
fn binary_entropy(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    let q = (total - pos) / total;
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if q > 0.0 {
        h -= q * q.log2();
    }
    h
}

/// Entropy drop of a weighted two-way partition; empty sides contribute 0.
/// Every information gain in this module funnels through here, so hard and
/// soft propagation agree bit for bit whenever their masses do.
#[inline]
fn weighted_gain(
    node: (f64, f64),
    left: (f64, f64),
    right: (f64, f64),
) -> f64 {
    let (node_pos, node_tot) = node;
    let (left_pos, left_tot) = left;
    let (right_pos, right_tot) = right;
    let mut gain = binary_entropy(node_pos, node_tot);
    if left_tot > 0.0 {
        gain -= (left_tot / node_tot) * binary_entropy(left_pos, left_tot);
    }
    if right_tot > 0.0 {
        gain -= (right_tot / node_tot) * binary_entropy(right_pos, right_tot);
    }
    gain
}

fn pos_total(bank: &SignatureBank, masses: &[f64], k: usize) -> (f64, f64) {
    let mut pos = 0.0;
    let mut tot = 0.0;
    for (row, &m) in bank.rows().iter().zip(masses) {
        tot += m;
        if row.class == k {
            pos += m;
        }
    }
    (pos, tot)
}

/// One-vs-all class distribution at a node: `[class k mass, rest] / total`.
pub fn node_distribution(bank: &SignatureBank, masses: &[f64], k: usize) -> Result<[f64; 2]> {
    let (pos, tot) = pos_total(bank, masses, k);
    if tot <= 0.0 {
        return Err(Error::EmptyNode);
    }
    Ok([pos / tot, (tot - pos) / tot])
}

/// Hard signature split: row i keeps its indicator on the left iff its bit
/// for the split attribute exceeds the threshold; the right side is the
/// remainder.
pub fn split_hard(
    bank: &SignatureBank,
    indicator: &[f64],
    split: SplitTest,
) -> (Vec<f64>, Vec<f64>) {
    let mut left = vec![0.0; indicator.len()];
    let mut right = vec![0.0; indicator.len()];
    for (i, row) in bank.rows().iter().enumerate() {
        if f64::from(row.bits[split.attr]) > split.threshold {
            left[i] = indicator[i];
        } else {
            right[i] = indicator[i];
        }
    }
    (left, right)
}

/// Information gain of a hard signature split for the one-vs-all problem of
/// class `k`.
pub fn ig_basic(bank: &SignatureBank, indicator: &[f64], split: SplitTest, k: usize) -> f64 {
    let mut node = (0.0, 0.0);
    let mut left = (0.0, 0.0);
    let mut right = (0.0, 0.0);
    for (i, row) in bank.rows().iter().enumerate() {
        let m = indicator[i];
        node.1 += m;
        let side = if f64::from(row.bits[split.attr]) > split.threshold {
            &mut left
        } else {
            &mut right
        };
        side.1 += m;
        if row.class == k {
            node.0 += m;
            side.0 += m;
        }
    }
    weighted_gain(node, left, right)
}

/// Information gain of a soft split: each row's mass divides between the
/// children by its effective probability of scoring above the threshold
/// (TPR for annotated-positive bits, FPR for annotated-negative, mixed by
/// the flip model).
pub fn ig_zero(
    bank: &SignatureBank,
    masses: &[f64],
    split: SplitTest,
    op: &OperatingPoint,
    flip: &FlipModel,
    k: usize,
) -> f64 {
    let mut node = (0.0, 0.0);
    let mut left = (0.0, 0.0);
    let mut right = (0.0, 0.0);
    for (i, row) in bank.rows().iter().enumerate() {
        let m = masses[i];
        let pass = effective_pass_probability(row.bits[split.attr], op, flip);
        let lm = m * pass;
        let rm = m - lm;
        node.1 += m;
        left.1 += lm;
        right.1 += rm;
        if row.class == k {
            node.0 += m;
            left.0 += lm;
            right.0 += rm;
        }
    }
    weighted_gain(node, left, right)
}

/// Information gain of a hard split of the few-shot instances at a node,
/// one-vs-all for class `k`. Instances route by `score > t`. An empty node
/// contributes zero gain.
pub fn ig_instances(
    fewshot: &ScoredDataset,
    subset: &[usize],
    split: SplitTest,
    k: usize,
) -> f64 {
    if subset.is_empty() {
        return 0.0;
    }
    let mut node = (0.0, 0.0);
    let mut left = (0.0, 0.0);
    let mut right = (0.0, 0.0);
    for &i in subset {
        let is_k = fewshot.class_label(i) == Some(k);
        node.1 += 1.0;
        let side = if fewshot.score(i, split.attr) > split.threshold {
            &mut left
        } else {
            &mut right
        };
        side.1 += 1.0;
        if is_k {
            node.0 += 1.0;
            side.0 += 1.0;
        }
    }
    weighted_gain(node, left, right)
}

/// Combined few-shot gain: `lambda` on the soft signature gain, the rest on
/// the instance gain. Exact at the endpoints: 1 returns the signature gain
/// unchanged, 0 the instance gain. Panics if `lambda` is outside [0,1].
#[allow(clippy::too_many_arguments)]
pub fn ig_few(
    bank: &SignatureBank,
    masses: &[f64],
    split: SplitTest,
    op: &OperatingPoint,
    flip: &FlipModel,
    k: usize,
    fewshot: &ScoredDataset,
    fewshot_subset: &[usize],
    lambda: f64,
) -> f64 {
    assert!(
        (0.0..=1.0).contains(&lambda),
        "ig_few: lambda {lambda} not in [0,1]"
    );
    if lambda == 1.0 {
        return ig_zero(bank, masses, split, op, flip, k);
    }
    let instance_gain = ig_instances(fewshot, fewshot_subset, split, k);
    if lambda == 0.0 {
        return instance_gain;
    }
    lambda * ig_zero(bank, masses, split, op, flip, k) + (1.0 - lambda) * instance_gain
}

/// Soft propagation of a node state through a split. Masses divide by the
/// effective pass probability; left plus right always equals the input mass
/// per row. Validation and few-shot subsets split by `score > t`.
pub fn propagate_soft(
    bank: &SignatureBank,
    state: &FractionalState,
    split: SplitTest,
    op: &OperatingPoint,
    flip: &FlipModel,
    val: &ScoredDataset,
    fewshot: Option<&ScoredDataset>,
) -> (FractionalState, FractionalState) {
    let mut left_masses = Vec::with_capacity(state.masses.len());
    let mut right_masses = Vec::with_capacity(state.masses.len());
    for (row, &m) in bank.rows().iter().zip(&state.masses) {
        let pass = effective_pass_probability(row.bits[split.attr], op, flip);
        let lm = m * pass;
        left_masses.push(lm);
        right_masses.push(m - lm);
    }
    finish_propagation(state, split, left_masses, right_masses, val, fewshot)
}

/// Hard propagation (basic mode): each row's whole mass follows its bit.
pub fn propagate_hard(
    bank: &SignatureBank,
    state: &FractionalState,
    split: SplitTest,
    val: &ScoredDataset,
    fewshot: Option<&ScoredDataset>,
) -> (FractionalState, FractionalState) {
    let (left_masses, right_masses) = split_hard(bank, &state.masses, split);
    finish_propagation(state, split, left_masses, right_masses, val, fewshot)
}

fn finish_propagation(
    state: &FractionalState,
    split: SplitTest,
    left_masses: Vec<f64>,
    right_masses: Vec<f64>,
    val: &ScoredDataset,
    fewshot: Option<&ScoredDataset>,
) -> (FractionalState, FractionalState) {
    let (val_left, val_right) =
        split_validation(val, &state.val_subset, split.attr, split.threshold);
    let (fs_left, fs_right) = match (&state.fewshot_subset, fewshot) {
        (Some(subset), Some(ds)) => {
            let mut l = Vec::new();
            let mut r = Vec::new();
            for &i in subset {
                if ds.score(i, split.attr) > split.threshold {
                    l.push(i);
                } else {
                    r.push(i);
                }
            }
            (Some(l), Some(r))
        }
        _ => (None, None),
    };
    (
        FractionalState {
            masses: left_masses,
            val_subset: val_left,
            fewshot_subset: fs_left,
            depth: state.depth + 1,
        },
        FractionalState {
            masses: right_masses,
            val_subset: val_right,
            fewshot_subset: fs_right,
            depth: state.depth + 1,
        },
    )
}

/// Per-attribute threshold ranges candidates are drawn from: the open
/// interval between the 1st and 99th percentile of the attribute's
/// validation scores. `None` marks attributes that cannot be sampled —
/// degenerate ones, and those whose score range is a single point.
#[derive(Debug, Clone)]
pub struct CandidateSpace {
    ranges: Vec<Option<(f64, f64)>>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
}

impl CandidateSpace {
    pub fn from_validation(val: &ScoredDataset, excluded: &[usize]) -> Self {
        let m = val.num_attributes();
        let mut ranges = vec![None; m];
        for (attr, range) in ranges.iter_mut().enumerate() {
            if excluded.contains(&attr) || val.is_empty() {
                continue;
            }
            let mut scores: Vec<f64> = (0..val.len()).map(|i| val.score(i, attr)).collect();
            scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let lo = quantile(&scores, 0.01);
            let hi = quantile(&scores, 0.99);
            if hi > lo {
                *range = Some((lo, hi));
            }
        }
        CandidateSpace { ranges }
    }

    pub fn sampleable(&self) -> Vec<usize> {
        self.ranges
            .iter()
            .enumerate()
            .filter_map(|(a, r)| r.map(|_| a))
            .collect()
    }

    pub fn range(&self, attr: usize) -> Option<(f64, f64)> {
        self.ranges.get(attr).copied().flatten()
    }
}

fn draw_open_interval(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    for _ in 0..16 {
        let t = lo + rng.random::<f64>() * (hi - lo);
        if t > lo && t < hi && t > 0.0 && t < 1.0 {
            return t;
        }
    }
    0.5 * (lo + hi)
}

/// Draws up to `n_attr` attributes uniformly without replacement from the
/// sampleable set, then `n_thresh` thresholds per attribute uniformly
/// within its percentile range, and returns the cross product.
pub fn sample_candidate_splits(
    rng: &mut impl Rng,
    n_attr: usize,
    n_thresh: usize,
    space: &CandidateSpace,
) -> Result<Vec<SplitTest>> {
    assert!(n_attr >= 1 && n_thresh >= 1);
    let available = space.sampleable();
    if available.is_empty() {
        return Err(Error::Growth(
            "no attribute admits a candidate split (all degenerate or constant-scored)".into(),
        ));
    }
    let take = n_attr.min(available.len());
    let chosen = rand::seq::index::sample(rng, available.len(), take);
    let mut out = Vec::with_capacity(take * n_thresh);
    for idx in chosen.iter() {
        let attr = available[idx];
        let (lo, hi) = space.range(attr).unwrap();
        for _ in 0..n_thresh {
            out.push(SplitTest {
                attr,
                threshold: draw_open_interval(rng, lo, hi),
            });
        }
    }
    Ok(out)
}

/// Aggregate training counters, reported in the training log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainStats {
    /// Attributes excluded up front: no positives or no negatives in the
    /// full validation set.
    pub degenerate_attributes: Vec<usize>,
    /// Operating-point evaluations, and how many fell back to the full set.
    pub roc_evaluations: u64,
    pub roc_fallbacks: u64,
    pub nodes: u64,
    pub leaves: u64,
}

impl TrainStats {
    pub fn fallback_rate(&self) -> f64 {
        if self.roc_evaluations == 0 {
            0.0
        } else {
            self.roc_fallbacks as f64 / self.roc_evaluations as f64
        }
    }
}

#[derive(Default, Clone, Copy)]
struct NodeCounters {
    roc_evaluations: u64,
    roc_fallbacks: u64,
    nodes: u64,
    leaves: u64,
}

struct TrainContext<'a> {
    bank: &'a SignatureBank,
    val: &'a ScoredDataset,
    fewshot: Option<&'a ScoredDataset>,
    config: &'a GrowthConfig,
    space: &'a CandidateSpace,
    flip: FlipModel,
    full_subset: ValidationSubset,
    root_mass: f64,
}

impl TrainContext<'_> {
    fn grow(&self, class: usize, tree: usize) -> Result<(TreeNode, NodeCounters)> {
        let state = FractionalState::root(self.bank, self.val.len(), self.fewshot.map(|d| d.len()));
        let mut counters = NodeCounters::default();
        if self.root_mass <= 0.0 {
            return Err(Error::EmptyNode);
        }
        let node = self.grow_node(class, tree as u64, 1, state, f64::NAN, &mut counters)?;
        Ok((node, counters))
    }

    fn grow_node(
        &self,
        class: usize,
        tree_tag: u64,
        node_id: u64,
        state: FractionalState,
        parent_posterior: f64,
        counters: &mut NodeCounters,
    ) -> Result<TreeNode> {
        counters.nodes += 1;
        let (pos, tot) = pos_total(self.bank, &state.masses, class);
        if tot <= 0.0 {
            // Instance-driven few-shot splits can drain a side of all
            // signature mass; the class distribution there is undefined, so
            // the leaf inherits the last defined posterior on the path.
            counters.leaves += 1;
            return Ok(TreeNode::leaf(parent_posterior));
        }
        let pure = pos == 0.0 || pos == tot;
        let too_small = tot / self.root_mass < self.config.min_mass_fraction;
        if state.depth < self.config.max_depth && !pure && !too_small {
            // A fresh stream per node position keeps growth independent of
            // traversal order: recursion produces the breadth-first tree.
            let mut rng = derive_rng(
                self.config.seed,
                &[STREAM_NODE, class as u64, tree_tag, node_id],
            );
            let candidates = sample_candidate_splits(
                &mut rng,
                self.config.n_attr_candidates,
                self.config.n_thresh_candidates,
                self.space,
            )?;
            let mut best: Option<(f64, SplitTest, Option<OperatingPoint>)> = None;
            for split in candidates {
                let (gain, op) = self.candidate_gain(class, &state, split, counters)?;
                if best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                    best = Some((gain, split, op));
                }
            }
            if let Some((gain, split, op)) = best {
                if gain > 0.0 {
                    let (left_state, right_state) = match self.config.mode {
                        TrainMode::Basic => {
                            propagate_hard(self.bank, &state, split, self.val, self.fewshot)
                        }
                        TrainMode::Unreliable => propagate_soft(
                            self.bank,
                            &state,
                            split,
                            &op.expect("unreliable candidates carry an operating point"),
                            &self.flip,
                            self.val,
                            self.fewshot,
                        ),
                    };
                    let posterior = pos / tot;
                    let left = self.grow_node(
                        class,
                        tree_tag,
                        node_id * 2,
                        left_state,
                        posterior,
                        counters,
                    )?;
                    let right = self.grow_node(
                        class,
                        tree_tag,
                        node_id * 2 + 1,
                        right_state,
                        posterior,
                        counters,
                    )?;
                    return Ok(TreeNode::split(split, left, right));
                }
            }
        }
        counters.leaves += 1;
        Ok(TreeNode::leaf(pos / tot))
    }

    /// Gain of one candidate; discarded candidates (degenerate attribute at
    /// this node) report negative infinity so they can never be selected.
    fn candidate_gain(
        &self,
        class: usize,
        state: &FractionalState,
        split: SplitTest,
        counters: &mut NodeCounters,
    ) -> Result<(f64, Option<OperatingPoint>)> {
        match self.config.mode {
            TrainMode::Basic => {
                let signature_gain = ig_basic(self.bank, &state.masses, split, class);
                Ok((self.blend(signature_gain, state, split, class), None))
            }
            TrainMode::Unreliable => {
                let subset = match self.config.roc_mode {
                    RocMode::NodeLocal => &state.val_subset,
                    RocMode::Global => &self.full_subset,
                };
                counters.roc_evaluations += 1;
                match operating_point(
                    self.val,
                    subset,
                    split.attr,
                    split.threshold,
                    self.config.min_support,
                ) {
                    Ok(op) => {
                        if op.used_fallback {
                            counters.roc_fallbacks += 1;
                        }
                        let signature_gain =
                            ig_zero(self.bank, &state.masses, split, &op, &self.flip, class);
                        Ok((self.blend(signature_gain, state, split, class), Some(op)))
                    }
                    Err(Error::DegenerateAttribute { .. }) => Ok((f64::NEG_INFINITY, None)),
                    Err(e) => Err(e),
                }
            }
        }
    }

    fn blend(
        &self,
        signature_gain: f64,
        state: &FractionalState,
        split: SplitTest,
        class: usize,
    ) -> f64 {
        match (&state.fewshot_subset, self.fewshot) {
            (Some(subset), Some(ds)) if self.config.lambda < 1.0 => {
                let instance_gain = ig_instances(ds, subset, split, class);
                if self.config.lambda == 0.0 {
                    instance_gain
                } else {
                    self.config.lambda * signature_gain
                        + (1.0 - self.config.lambda) * instance_gain
                }
            }
            _ => signature_gain,
        }
    }
}

fn check_training_inputs(
    signatures: &SignatureSet,
    val: &ScoredDataset,
    config: &GrowthConfig,
    fewshot: Option<&ScoredDataset>,
) -> Result<()> {
    config.validate()?;
    val.require_role(DatasetRole::Validation)?;
    if val.attribute_names() != signatures.attribute_names() {
        return Err(Error::Validation(
            "validation attribute names do not match the signature set".into(),
        ));
    }
    if let Some(fs) = fewshot {
        fs.require_role(DatasetRole::FewShot)?;
        if fs.attribute_names() != signatures.attribute_names() {
            return Err(Error::Validation(
                "few-shot attribute names do not match the signature set".into(),
            ));
        }
        if let Some(classes) = fs.class_labels() {
            if let Some(&bad) = classes.iter().find(|&&c| c >= signatures.num_classes()) {
                return Err(Error::Validation(format!(
                    "few-shot class index {bad} out of range"
                )));
            }
        }
    }
    Ok(())
}

/// Grows a single tree for class `k`. `tree_index` seeds the tree's RNG
/// streams, so a forest's trees can be grown independently in any order.
pub fn grow_tree(
    k: usize,
    signatures: &SignatureSet,
    val: &ScoredDataset,
    config: &GrowthConfig,
    fewshot: Option<&ScoredDataset>,
    tree_index: usize,
) -> Result<TreeNode> {
    check_training_inputs(signatures, val, config, fewshot)?;
    let degenerate = degenerate_attributes(val);
    let space = CandidateSpace::from_validation(val, &degenerate);
    if space.sampleable().is_empty() {
        return Err(Error::Growth(
            "every attribute is degenerate on the validation set".into(),
        ));
    }
    let bank = SignatureBank::plain(signatures);
    let ctx = TrainContext {
        bank: &bank,
        val,
        fewshot,
        config,
        space: &space,
        flip: FlipModel::positive_only(config.flip_fraction)?,
        full_subset: ValidationSubset::full(val.len()),
        root_mass: bank.root_masses().iter().sum(),
    };
    ctx.grow(k, tree_index).map(|(tree, _)| tree)
}

/// Trains K one-vs-all forests of J trees each. Tree (k, j) derives its RNG
/// from `(config.seed, k, j)`, so training is deterministic and independent
/// of scheduling; trees are grown in parallel.
pub fn train_model(
    signatures: &SignatureSet,
    val: &ScoredDataset,
    config: &GrowthConfig,
    fewshot: Option<&ScoredDataset>,
) -> Result<(TrainedModel, TrainStats)> {
    check_training_inputs(signatures, val, config, fewshot)?;
    let degenerate = degenerate_attributes(val);
    let space = CandidateSpace::from_validation(val, &degenerate);
    if space.sampleable().is_empty() {
        return Err(Error::Growth(
            "every attribute is degenerate on the validation set".into(),
        ));
    }
    let bank = SignatureBank::plain(signatures);
    let ctx = TrainContext {
        bank: &bank,
        val,
        fewshot,
        config,
        space: &space,
        flip: FlipModel::positive_only(config.flip_fraction)?,
        full_subset: ValidationSubset::full(val.len()),
        root_mass: bank.root_masses().iter().sum(),
    };

    let jobs: Vec<(usize, usize)> = (0..signatures.num_classes())
        .flat_map(|k| (0..config.n_trees).map(move |j| (k, j)))
        .collect();
    let grown: Result<Vec<(TreeNode, NodeCounters)>> = jobs
        .par_iter()
        .map(|&(k, j)| ctx.grow(k, j))
        .collect();
    let grown = grown?;

    let mut forests: Vec<Forest> = vec![Vec::with_capacity(config.n_trees); signatures.num_classes()];
    let mut stats = TrainStats {
        degenerate_attributes: degenerate,
        ..TrainStats::default()
    };
    for ((k, _), (tree, counters)) in jobs.into_iter().zip(grown) {
        forests[k].push(tree);
        stats.roc_evaluations += counters.roc_evaluations;
        stats.roc_fallbacks += counters.roc_fallbacks;
        stats.nodes += counters.nodes;
        stats.leaves += counters.leaves;
    }

    let model = TrainedModel {
        config: config.clone(),
        signatures: signatures.clone(),
        forests,
    };
    Ok((model, stats))
}

/// Class posteriors for one score vector: each forest's trees are traversed
/// by `score > threshold` and their leaf posteriors averaged. Returns the
/// argmax class (ties to the lowest index) and all K posteriors.
pub fn predict(model: &TrainedModel, scores: &[f64]) -> Result<(usize, Vec<f64>)> {
    if scores.len() != model.num_attributes() {
        return Err(Error::Validation(format!(
            "score vector has {} entries, model expects {}",
            scores.len(),
            model.num_attributes()
        )));
    }
    let posteriors: Vec<f64> = model
        .forests
        .iter()
        .map(|forest| {
            forest.iter().map(|tree| tree.traverse(scores)).sum::<f64>() / forest.len() as f64
        })
        .collect();
    let mut best = 0;
    for (k, &p) in posteriors.iter().enumerate() {
        if p > posteriors[best] {
            best = k;
        }
    }
    Ok((best, posteriors))
}
