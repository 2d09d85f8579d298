//! Shared fixtures for the criterion benchmarks.

use attriforest::{synth_instances, ScoredDataset, SignatureSet};

/// Random signatures plus matching synthetic validation/test draws at a
/// fixed noise level.
pub fn fixture(
    classes: usize,
    attributes: usize,
    eta: f64,
    per_class: usize,
    seed: u64,
) -> (SignatureSet, ScoredDataset, ScoredDataset) {
    let mut rng = attriforest::seed::derive_rng(seed, &[attriforest::seed::STREAM_SYNTH_SIGNATURES]);
    let signatures = SignatureSet::random(classes, attributes, 0.5, &mut rng).unwrap();
    let etas = vec![eta; attributes];
    let val = synth_instances(&signatures, &etas, per_class, &mut rng).unwrap();
    let test = synth_instances(&signatures, &etas, per_class, &mut rng).unwrap();
    (signatures, val, test)
}
