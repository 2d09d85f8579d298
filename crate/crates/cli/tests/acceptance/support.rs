//! Shared fixtures for the acceptance criteria.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use attriforest::seed::derive_rng;
use attriforest::{ScoredDataset, SignatureSet};

/// Prints the per-criterion verdict line and fails the test on FAIL.
pub fn verdict(name: &str, ok: bool, details: &str) {
    let state = if ok { "PASS" } else { "FAIL" };
    println!("[acceptance] {name}: {state} — {details}");
    assert!(ok, "{name}: {details}");
}

pub fn random_signatures(classes: usize, attributes: usize, seed: u64) -> SignatureSet {
    let mut rng = derive_rng(seed, &[attriforest::seed::STREAM_SYNTH_SIGNATURES]);
    SignatureSet::random(classes, attributes, 0.5, &mut rng).unwrap()
}

pub fn signatures_csv(signatures: &SignatureSet) -> String {
    let mut out = String::from("class");
    for a in signatures.attribute_names() {
        let _ = write!(out, ",{a}");
    }
    out.push('\n');
    for k in 0..signatures.num_classes() {
        let _ = write!(out, "{}", signatures.class_names()[k]);
        for a in 0..signatures.num_attributes() {
            let _ = write!(out, ",{}", signatures.bit(k, a));
        }
        out.push('\n');
    }
    out
}

pub fn dataset_csv(
    data: &ScoredDataset,
    signatures: &SignatureSet,
    with_labels: bool,
    with_class: bool,
) -> String {
    let mut out = String::from("id");
    for a in signatures.attribute_names() {
        let _ = write!(out, ",{a}_score");
    }
    if with_labels {
        for a in signatures.attribute_names() {
            let _ = write!(out, ",{a}_label");
        }
    }
    if with_class {
        out.push_str(",class");
    }
    out.push('\n');
    for i in 0..data.len() {
        let _ = write!(out, "{}", data.ids()[i]);
        for a in 0..data.num_attributes() {
            let _ = write!(out, ",{}", data.score(i, a));
        }
        if with_labels {
            for a in 0..data.num_attributes() {
                let _ = write!(out, ",{}", data.attr_label(i, a).unwrap());
            }
        }
        if with_class {
            let k = data.class_label(i).unwrap();
            let _ = write!(out, ",{}", signatures.class_names()[k]);
        }
        out.push('\n');
    }
    out
}

pub fn cli(dir: &Path) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_attriforest"));
    cmd.current_dir(dir);
    cmd
}
