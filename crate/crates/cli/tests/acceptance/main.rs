//! Acceptance suite. Each test prints one `[acceptance] ...: PASS/FAIL`
//! line (visible with `cargo test --test acceptance -- --nocapture`).

mod oracle;
mod support;

use std::time::Instant;

use attriforest::seed::derive_rng;
use attriforest::{
    evaluate, grid_cv, ig_basic, ig_few, ig_instances, ig_zero, operating_point, perturbed_copies,
    propagate_soft, run_noise_sweep, sample_candidate_splits, synth_instances, train_model,
    BankRow, CandidateSpace, FlipModel, FractionalState, GrowthConfig, NoiseScenario,
    OperatingPoint, ParamGrid, ScoredDataset, SignatureBank, SignatureSet, SplitTest, SweepMethod,
    SweepPlan, TrainMode, ValidationSubset,
};
use rand::Rng;
use support::{cli, dataset_csv, random_signatures, signatures_csv, verdict};

/// Criterion 1: an attribute whose positive and negative validation score
/// distributions coincide yields (near-)zero soft gain at every sampled
/// threshold, for every one-vs-all problem.
#[test]
fn criterion_1_zero_gain_lemma() {
    let start = Instant::now();
    let signatures = SignatureSet::new(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec!["m_star".into(), "m1".into(), "m2".into()],
        vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, 1],
        ],
    )
    .unwrap();
    // Positive and negative instances carry the same score multiset on
    // m_star; the other attributes are excluded from sampling.
    let shared: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let mut ids = Vec::new();
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for (i, &s) in shared.iter().enumerate() {
        for label in [1u8, 0] {
            ids.push(format!("v{i}_{label}"));
            scores.push(vec![s, 0.5, 0.5]);
            labels.push(vec![label, 0, 0]);
        }
    }
    let val = ScoredDataset::new(
        ids,
        signatures.attribute_names().to_vec(),
        scores,
        Some(labels),
        None,
    )
    .unwrap();

    let space = CandidateSpace::from_validation(&val, &[1, 2]);
    let mut rng = derive_rng(41, &[]);
    let candidates = sample_candidate_splits(&mut rng, 1, 200, &space).unwrap();
    assert_eq!(candidates.len(), 200);

    let bank = SignatureBank::plain(&signatures);
    let subset = ValidationSubset::full(val.len());
    let flip = FlipModel::identity();
    let mut worst: f64 = 0.0;
    for split in candidates {
        assert_eq!(split.attr, 0);
        let op = operating_point(&val, &subset, split.attr, split.threshold, 1).unwrap();
        for k in 0..4 {
            let gain = ig_zero(&bank, &[1.0; 4], split, &op, &flip, k);
            assert!(gain >= -1e-12, "negative gain {gain}");
            worst = worst.max(gain);
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "criterion 1 (zero-gain lemma)",
        worst <= 1e-9 && elapsed.as_secs_f64() < 1.0,
        &format!("max ig_zero {worst:.3e} over 200 thresholds x 4 classes, {elapsed:.2?}"),
    );
}

/// Criterion 2: soft splits conserve per-signature mass to 1e-12 across
/// 1,000 randomized ROC points and flip models.
#[test]
fn criterion_2_mass_conservation() {
    let start = Instant::now();
    let mut rng = derive_rng(42, &[]);
    let val = ScoredDataset::new(vec![], vec!["a0".into()], vec![], Some(vec![]), None).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let rows = rng.random_range(1..=16);
        let bank_rows: Vec<BankRow> = (0..rows)
            .map(|i| BankRow {
                class: i,
                weight: 1.0,
                bits: vec![u8::from(rng.random::<f64>() < 0.5)],
            })
            .collect();
        let bank = SignatureBank::from_rows(bank_rows, rows, 1);
        let masses: Vec<f64> = (0..rows).map(|_| rng.random::<f64>()).collect();
        let state = FractionalState {
            masses: masses.clone(),
            val_subset: ValidationSubset::full(0),
            fewshot_subset: None,
            depth: 0,
        };
        let op = OperatingPoint {
            tpr: rng.random(),
            fpr: rng.random(),
            n_pos: 10,
            n_neg: 10,
            used_fallback: false,
        };
        let flip = FlipModel {
            flip_pos: rng.random(),
            flip_neg: rng.random(),
        };
        let split = SplitTest {
            attr: 0,
            threshold: 0.5,
        };
        let (l, r) = propagate_soft(&bank, &state, split, &op, &flip, &val, None);
        for ((&lm, &rm), &m) in l.masses.iter().zip(&r.masses).zip(&masses) {
            worst = worst.max((lm + rm - m).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "criterion 2 (mass conservation)",
        worst <= 1e-12 && elapsed.as_secs_f64() < 1.0,
        &format!("max |left+right-mass| = {worst:.3e} over 1000 splits, {elapsed:.2?}"),
    );
}

/// Criterion 3: with a validation set whose scores equal its labels and no
/// signature flipping, unreliable mode grows exactly the trees basic mode
/// grows, and both are perfectly accurate on noise-free test scores.
#[test]
fn criterion_3_perfect_roc_reduction() {
    let start = Instant::now();
    let signatures = random_signatures(10, 30, 77);
    let mut rng = derive_rng(78, &[]);
    let zero_eta = vec![0.0; 30];
    let val = synth_instances(&signatures, &zero_eta, 5, &mut rng).unwrap();
    let test = synth_instances(&signatures, &zero_eta, 3, &mut rng).unwrap();

    let basic = GrowthConfig {
        n_trees: 10,
        max_depth: 6,
        n_attr_candidates: 10,
        n_thresh_candidates: 5,
        mode: TrainMode::Basic,
        flip_fraction: 0.0,
        seed: 1234,
        ..GrowthConfig::default()
    };
    let unreliable = GrowthConfig {
        mode: TrainMode::Unreliable,
        ..basic.clone()
    };
    let (model_b, _) = train_model(&signatures, &val, &basic, None).unwrap();
    let (model_u, _) = train_model(&signatures, &val, &unreliable, None).unwrap();
    let identical = model_b.forests == model_u.forests;
    let acc_b = evaluate(&model_b, &test).unwrap().accuracy;
    let acc_u = evaluate(&model_u, &test).unwrap().accuracy;
    let elapsed = start.elapsed();
    verdict(
        "criterion 3 (perfect-ROC reduction)",
        identical && acc_b == 1.0 && acc_u == 1.0 && elapsed.as_secs_f64() < 10.0,
        &format!(
            "identical trees: {identical}, basic accuracy {acc_b}, unreliable accuracy {acc_u}, {elapsed:.2?}"
        ),
    );
}

/// Criterion 4: on a K=3, M=4 instance, the library's gains match the
/// independent term-by-term oracle at every threshold of every attribute.
#[test]
fn criterion_4_brute_force_oracle_equivalence() {
    let start = Instant::now();
    let bits = vec![
        vec![1u8, 0, 1, 0],
        vec![0u8, 1, 1, 0],
        vec![0u8, 0, 0, 1],
    ];
    let signatures = SignatureSet::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["m0".into(), "m1".into(), "m2".into(), "m3".into()],
        bits.clone(),
    )
    .unwrap();
    // Hand-built validation data, all four attributes non-degenerate.
    let raw: Vec<(Vec<f64>, Vec<u8>)> = vec![
        (vec![0.9, 0.2, 0.8, 0.1], vec![1, 0, 1, 0]),
        (vec![0.7, 0.4, 0.6, 0.2], vec![1, 0, 1, 0]),
        (vec![0.3, 0.8, 0.7, 0.3], vec![0, 1, 1, 0]),
        (vec![0.2, 0.6, 0.4, 0.5], vec![0, 1, 0, 1]),
        (vec![0.4, 0.3, 0.2, 0.9], vec![0, 0, 0, 1]),
        (vec![0.6, 0.1, 0.3, 0.7], vec![1, 0, 0, 1]),
        (vec![0.1, 0.9, 0.9, 0.4], vec![0, 1, 1, 0]),
        (vec![0.8, 0.5, 0.1, 0.6], vec![1, 1, 0, 1]),
    ];
    let val = ScoredDataset::new(
        (0..raw.len()).map(|i| format!("v{i}")).collect(),
        signatures.attribute_names().to_vec(),
        raw.iter().map(|(s, _)| s.clone()).collect(),
        Some(raw.iter().map(|(_, l)| l.clone()).collect()),
        None,
    )
    .unwrap();

    let bank = SignatureBank::plain(&signatures);
    let subset = ValidationSubset::full(val.len());
    let full: Vec<usize> = (0..val.len()).collect();
    let class_of = vec![0usize, 1, 2];
    let masses = [1.0, 0.8, 0.6];
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    for attr in 0..4 {
        let mut scores: Vec<f64> = raw.iter().map(|(s, _)| s[attr]).collect();
        scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
        scores.dedup();
        let thresholds: Vec<f64> = scores
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .chain([0.05, 0.5, 0.95])
            .collect();
        for t in thresholds {
            let split = SplitTest { attr, threshold: t };
            let op = operating_point(&val, &subset, attr, t, 1).unwrap();
            let (otpr, ofpr) = oracle::rates_by_counting(
                &raw.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>(),
                &raw.iter().map(|(_, l)| l.clone()).collect::<Vec<_>>(),
                &full,
                attr,
                t,
            )
            .unwrap();
            assert_eq!((op.tpr, op.fpr), (otpr, ofpr), "rates disagree at ({attr},{t})");
            for k in 0..3 {
                for flip_pos in [0.0, 0.2] {
                    let flip = FlipModel {
                        flip_pos,
                        flip_neg: 0.0,
                    };
                    let got = ig_zero(&bank, &masses, split, &op, &flip, k);
                    let want =
                        oracle::ig_zero(&bits, &masses, &class_of, attr, otpr, ofpr, flip_pos, 0.0, k);
                    worst = worst.max((got - want).abs());
                }
                let got = ig_basic(&bank, &masses, split, k);
                let want = oracle::ig_basic(&bits, &masses, attr, t, k);
                worst = worst.max((got - want).abs());
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "criterion 4 (brute-force oracle equivalence)",
        worst <= 1e-10 && elapsed.as_secs_f64() < 1.0,
        &format!("max |impl - oracle| = {worst:.3e} over {checked} split/class pairs, {elapsed:.2?}"),
    );
}

/// Criterion 5: qualitative reproduction of the per-attribute-noise
/// comparison: perfect accuracy at zero noise, a >= 3-stderr advantage of
/// the unreliability-aware forest over the plain signature forest at
/// eta >= 0.2, and accuracies non-increasing in eta up to trial noise.
#[test]
fn criterion_5_noise_scenario_two() {
    let start = Instant::now();
    let signatures = random_signatures(10, 85, 2014);
    let plan = SweepPlan {
        eta_grid: vec![0.0, 0.1, 0.2, 0.3, 0.4],
        scenario: NoiseScenario::PerAttribute,
        methods: vec![
            SweepMethod::Ours,
            SweepMethod::SignatureRf,
            SweepMethod::Dap,
        ],
        trials: 20,
        n_val_per_class: 50,
        n_test_per_class: 50,
        growth: GrowthConfig {
            n_trees: 5,
            max_depth: 9,
            n_attr_candidates: 10,
            n_thresh_candidates: 7,
            ..GrowthConfig::default()
        },
        seed: 20140,
    };
    let result = run_noise_sweep(&signatures, &plan).unwrap();

    // (a) zero noise: every method exactly 1.0.
    let perfect_at_zero = plan
        .methods
        .iter()
        .all(|&m| result.row(0.0, m).unwrap().mean_accuracy == 1.0);

    // (b) ours beats signature-rf by >= 3 pooled standard errors at
    // every eta >= 0.2.
    let mut margins = Vec::new();
    let separated = [0.2, 0.3, 0.4].iter().all(|&eta| {
        let ours = result.row(eta, SweepMethod::Ours).unwrap();
        let rf = result.row(eta, SweepMethod::SignatureRf).unwrap();
        let pooled = (ours.std_error.powi(2) + rf.std_error.powi(2)).sqrt();
        let margin = ours.mean_accuracy - rf.mean_accuracy;
        margins.push(format!(
            "eta={eta}: ours {:.3} vs rf {:.3} (gap {:.3}, 3se {:.3})",
            ours.mean_accuracy,
            rf.mean_accuracy,
            margin,
            3.0 * pooled
        ));
        margin >= 3.0 * pooled
    });

    // (c) per method, mean accuracy non-increasing in eta up to one pooled
    // stderr per step.
    let monotone = plan.methods.iter().all(|&m| {
        plan.eta_grid.windows(2).all(|w| {
            let a = result.row(w[0], m).unwrap();
            let b = result.row(w[1], m).unwrap();
            let slack = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            b.mean_accuracy <= a.mean_accuracy + slack
        })
    });

    let elapsed = start.elapsed();
    verdict(
        "criterion 5 (controlled-noise scenario 2)",
        perfect_at_zero && separated && monotone && elapsed.as_secs_f64() < 600.0,
        &format!(
            "zero-noise perfect: {perfect_at_zero}; separation: {separated} [{}]; monotone: {monotone}; {elapsed:.2?}",
            margins.join("; ")
        ),
    );
}

/// Criterion 6: the combined gain is bitwise identical to its endpoints at
/// lambda 1 and 0, and cross-validated lambda blending is no worse than
/// either endpoint (within one standard error) on synthetic few-shot data.
#[test]
fn criterion_6_few_shot_endpoints_and_blending() {
    let start = Instant::now();

    // Bitwise endpoint identities on 100 random nodes.
    let mut rng = derive_rng(600, &[]);
    let mut endpoint_ok = true;
    for _ in 0..100 {
        let classes = rng.random_range(2..=6);
        let attrs = rng.random_range(3..=6);
        let rows: Vec<BankRow> = (0..classes)
            .map(|k| BankRow {
                class: k,
                weight: 1.0,
                bits: (0..attrs).map(|_| u8::from(rng.random::<f64>() < 0.5)).collect(),
            })
            .collect();
        let bank = SignatureBank::from_rows(rows, classes, attrs);
        let masses: Vec<f64> = (0..classes).map(|_| rng.random::<f64>().max(1e-3)).collect();
        let n = rng.random_range(4..=24);
        let fewshot = ScoredDataset::new(
            (0..n).map(|i| format!("f{i}")).collect(),
            (0..attrs).map(|a| format!("attr_{a}")).collect(),
            (0..n)
                .map(|_| (0..attrs).map(|_| rng.random::<f64>()).collect())
                .collect(),
            None,
            Some((0..n).map(|_| rng.random_range(0..classes)).collect()),
        )
        .unwrap();
        let subset: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() < 0.7).collect();
        let split = SplitTest {
            attr: rng.random_range(0..attrs),
            threshold: rng.random_range(0.05..0.95),
        };
        let op = OperatingPoint {
            tpr: rng.random(),
            fpr: rng.random(),
            n_pos: 20,
            n_neg: 20,
            used_fallback: false,
        };
        let flip = FlipModel {
            flip_pos: rng.random(),
            flip_neg: 0.0,
        };
        let k = rng.random_range(0..classes);
        let at_one = ig_few(&bank, &masses, split, &op, &flip, k, &fewshot, &subset, 1.0);
        let at_zero = ig_few(&bank, &masses, split, &op, &flip, k, &fewshot, &subset, 0.0);
        let zero_gain = ig_zero(&bank, &masses, split, &op, &flip, k);
        let inst_gain = ig_instances(&fewshot, &subset, split, k);
        if at_one.to_bits() != zero_gain.to_bits() || at_zero.to_bits() != inst_gain.to_bits() {
            endpoint_ok = false;
            break;
        }
    }

    // Blending at the CV-selected lambda vs the endpoints, over 5 trials of
    // synthetic data with 100 few-shot instances per class. The noise level
    // is high enough that neither endpoint dominates.
    let signatures = random_signatures(8, 20, 601);
    let lambda_grid = ParamGrid {
        lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        ..ParamGrid::default()
    };
    let mut selected_acc = Vec::new();
    let mut zero_acc = Vec::new();
    let mut one_acc = Vec::new();
    let mut selected_lambdas = Vec::new();
    for trial in 0..5u64 {
        let mut gen = derive_rng(602, &[trial]);
        let etas = vec![0.5; 20];
        let val = synth_instances(&signatures, &etas, 30, &mut gen).unwrap();
        let fewshot = synth_instances(&signatures, &etas, 100, &mut gen).unwrap();
        let test = synth_instances(&signatures, &etas, 50, &mut gen).unwrap();
        let base = GrowthConfig {
            n_trees: 10,
            max_depth: 5,
            n_attr_candidates: 8,
            n_thresh_candidates: 4,
            seed: 603 + trial,
            ..GrowthConfig::default()
        };
        let outcome = grid_cv(&signatures, &val, Some(&fewshot), &base, &lambda_grid, 2).unwrap();
        selected_lambdas.push(outcome.best.lambda);
        for (lambda, sink) in [
            (outcome.best.lambda, &mut selected_acc),
            (0.0, &mut zero_acc),
            (1.0, &mut one_acc),
        ] {
            let cfg = GrowthConfig {
                lambda,
                ..base.clone()
            };
            let (model, _) = train_model(&signatures, &val, &cfg, Some(&fewshot)).unwrap();
            sink.push(evaluate(&model, &test).unwrap().accuracy);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let se = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64 / v.len() as f64)
            .sqrt()
    };
    let blended_holds = mean(&selected_acc) >= mean(&zero_acc) - se(&zero_acc)
        && mean(&selected_acc) >= mean(&one_acc) - se(&one_acc);

    let elapsed = start.elapsed();
    verdict(
        "criterion 6 (few-shot endpoints and blending)",
        endpoint_ok && blended_holds && elapsed.as_secs_f64() < 300.0,
        &format!(
            "bitwise endpoints: {endpoint_ok}; selected lambda {:?} mean {:.3} vs lambda=0 {:.3} (se {:.3}), lambda=1 {:.3} (se {:.3}); {elapsed:.2?}",
            selected_lambdas,
            mean(&selected_acc),
            mean(&zero_acc),
            se(&zero_acc),
            mean(&one_acc),
            se(&one_acc)
        ),
    );
}

/// Criterion 7: Monte Carlo perturbed copies reproduce the closed-form
/// flip-expansion split masses within 0.02 at R = 10,000.
#[test]
fn criterion_7_uncertainty_expansion_equivalence() {
    let start = Instant::now();
    let signatures = SignatureSet::new(
        vec!["a".into(), "b".into()],
        vec!["m0".into(), "m1".into(), "m2".into()],
        vec![vec![1, 1, 0], vec![1, 0, 1]],
    )
    .unwrap();
    // Both classes have 2 positive bits; rho = 0.5 flips exactly one per
    // copy, so the per-bit flip probability is exactly 0.5.
    let rho = 0.5;
    let copies = 10_000;
    let mut rng = derive_rng(700, &[]);
    let expanded = perturbed_copies(&signatures, rho, copies, &mut rng).unwrap();
    let plain = SignatureBank::plain(&signatures);
    let val = ScoredDataset::new(vec![], vec!["x".into()], vec![], Some(vec![]), None).unwrap();
    let flip = FlipModel::positive_only(rho).unwrap();
    let identity = FlipModel::identity();

    let ops = [
        OperatingPoint { tpr: 0.8, fpr: 0.3, n_pos: 50, n_neg: 50, used_fallback: false },
        OperatingPoint { tpr: 0.7, fpr: 0.2, n_pos: 50, n_neg: 50, used_fallback: false },
        OperatingPoint { tpr: 0.9, fpr: 0.4, n_pos: 50, n_neg: 50, used_fallback: false },
    ];
    let mut worst: f64 = 0.0;
    for (attr, op) in ops.iter().enumerate() {
        let split = SplitTest {
            attr,
            threshold: 0.5,
        };
        // Closed form on the plain bank with the flip model.
        let closed_state = FractionalState::root(&plain, 0, None);
        let (closed_left, _) =
            propagate_soft(&plain, &closed_state, split, op, &flip, &val, None);
        // Monte Carlo on the expanded bank with no flip model.
        let mc_state = FractionalState::root(&expanded, 0, None);
        let (mc_left, _) =
            propagate_soft(&expanded, &mc_state, split, op, &identity, &val, None);
        for k in 0..2 {
            let closed: f64 = plain
                .rows()
                .iter()
                .zip(&closed_left.masses)
                .filter(|(r, _)| r.class == k)
                .map(|(_, &m)| m)
                .sum();
            let mc: f64 = expanded
                .rows()
                .iter()
                .zip(&mc_left.masses)
                .filter(|(r, _)| r.class == k)
                .map(|(_, &m)| m)
                .sum();
            worst = worst.max((closed - mc).abs());
        }
    }
    let elapsed = start.elapsed();
    verdict(
        "criterion 7 (uncertainty-expansion equivalence)",
        worst <= 0.02 && elapsed.as_secs_f64() < 30.0,
        &format!("max |closed - monte carlo| = {worst:.4} at R=10000, {elapsed:.2?}"),
    );
}

/// Criterion 8: train + predict + noise-sweep rerun with the same seed and
/// different worker counts produce byte-identical outputs.
#[test]
fn criterion_8_byte_identical_outputs() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path();

    let signatures = random_signatures(5, 12, 800);
    let mut gen = derive_rng(801, &[]);
    let etas = vec![0.2; 12];
    let val = synth_instances(&signatures, &etas, 10, &mut gen).unwrap();
    let test = synth_instances(&signatures, &etas, 6, &mut gen).unwrap();
    std::fs::write(path.join("sigs.csv"), signatures_csv(&signatures)).unwrap();
    std::fs::write(
        path.join("val.csv"),
        dataset_csv(&val, &signatures, true, false),
    )
    .unwrap();
    std::fs::write(
        path.join("test.csv"),
        dataset_csv(&test, &signatures, false, true),
    )
    .unwrap();

    let mut ok = true;
    let mut notes = Vec::new();
    for (tag, threads) in [("t1", "1"), ("t2", "2")] {
        let status = cli(path)
            .args([
                "train",
                "--signatures",
                "sigs.csv",
                "--validation",
                "val.csv",
                "--output",
                &format!("model_{tag}.json"),
                "--trees",
                "4",
                "--depth",
                "4",
                "--seed",
                "9",
                "--threads",
                threads,
            ])
            .status()
            .unwrap();
        ok &= status.success();
        let status = cli(path)
            .args([
                "predict",
                "--model",
                &format!("model_{tag}.json"),
                "--input",
                "test.csv",
                "--output",
                &format!("preds_{tag}.csv"),
                "--threads",
                threads,
            ])
            .status()
            .unwrap();
        ok &= status.success();
        let status = cli(path)
            .args([
                "noise-sweep",
                "--classes",
                "4",
                "--attributes",
                "10",
                "--eta-grid",
                "0,0.2",
                "--trials",
                "2",
                "--n-val",
                "8",
                "--n-test",
                "8",
                "--trees",
                "3",
                "--depth",
                "3",
                "--seed",
                "9",
                "--output",
                &format!("sweep_{tag}.csv"),
                "--threads",
                threads,
            ])
            .status()
            .unwrap();
        ok &= status.success();
    }
    for name in ["model", "preds", "sweep"] {
        let ext = if name == "model" { "json" } else { "csv" };
        let a = std::fs::read(path.join(format!("{name}_t1.{ext}"))).unwrap();
        let b = std::fs::read(path.join(format!("{name}_t2.{ext}"))).unwrap();
        let same = a == b;
        notes.push(format!("{name}: {}", if same { "identical" } else { "DIFFERS" }));
        ok &= same;
    }
    let elapsed = start.elapsed();
    verdict(
        "criterion 8 (seeded determinism across thread counts)",
        ok,
        &format!("{}; {elapsed:.2?}", notes.join(", ")),
    );
}
