//! Independent brute-force evaluators used to pin expected values.
//!
//! Everything here is written from the defining formulas with plain loops and
//! no calls into the library, so the acceptance checks compare two separate
//! derivations. Keep it that way: this module must not import from
//! `attriforest`.

/// Shannon entropy in bits of a distribution given as raw non-negative
/// weights (normalized internally; 0 log 0 = 0).
pub fn entropy_bits(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &w in weights {
        if w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    h
}

/// One-vs-all class distribution at a node: `[mass of class k, rest]`.
fn two_class(masses: &[f64], class_of: &[usize], k: usize) -> [f64; 2] {
    let mut pos = 0.0;
    let mut tot = 0.0;
    for (i, &m) in masses.iter().enumerate() {
        tot += m;
        if class_of[i] == k {
            pos += m;
        }
    }
    [pos, tot - pos]
}

/// Information gain of a hard signature split, expanded term by term:
/// left indicator keeps row i iff `bits[i][m] > t`, right is the remainder,
/// children are weighted by their share of the node's 1-norm, and each
/// side's entropy is taken over the one-vs-all distribution for class `k`.
pub fn ig_basic(bits: &[Vec<u8>], indicator: &[f64], m: usize, t: f64, k: usize) -> f64 {
    let w = indicator.len();
    let class_of: Vec<usize> = (0..w).collect();
    let mut left = vec![0.0; w];
    let mut right = vec![0.0; w];
    for i in 0..w {
        if f64::from(bits[i][m]) > t {
            left[i] = indicator[i];
        } else {
            right[i] = indicator[i];
        }
    }
    weighted_gain(indicator, &left, &right, &class_of, k)
}

/// Information gain of a soft (fractionally propagated) split.
///
/// Row i with annotated bit `bits[i][m]` sends `pass * mass` left and the
/// remainder right, where `pass` is the probability its attribute score
/// exceeds the threshold: TPR for an annotated-positive bit, FPR for an
/// annotated-negative one, optionally mixed by a flip probability that the
/// true attribute differs from the annotation.
#[allow(clippy::too_many_arguments)]
pub fn ig_zero(
    bits: &[Vec<u8>],
    masses: &[f64],
    class_of: &[usize],
    m: usize,
    tpr: f64,
    fpr: f64,
    flip_pos: f64,
    flip_neg: f64,
    k: usize,
) -> f64 {
    let w = masses.len();
    let mut left = vec![0.0; w];
    let mut right = vec![0.0; w];
    for i in 0..w {
        let pass = if bits[i][m] == 1 {
            (1.0 - flip_pos) * tpr + flip_pos * fpr
        } else {
            (1.0 - flip_neg) * fpr + flip_neg * tpr
        };
        left[i] = masses[i] * pass;
        right[i] = masses[i] - left[i];
    }
    weighted_gain(masses, &left, &right, class_of, k)
}

fn weighted_gain(
    node: &[f64],
    left: &[f64],
    right: &[f64],
    class_of: &[usize],
    k: usize,
) -> f64 {
    let node_tot: f64 = node.iter().sum();
    let left_tot: f64 = left.iter().sum();
    let right_tot: f64 = right.iter().sum();
    let h_node = entropy_bits(&two_class(node, class_of, k));
    let mut gain = h_node;
    if left_tot > 0.0 {
        gain -= (left_tot / node_tot) * entropy_bits(&two_class(left, class_of, k));
    }
    if right_tot > 0.0 {
        gain -= (right_tot / node_tot) * entropy_bits(&two_class(right, class_of, k));
    }
    gain
}

/// TPR and FPR for attribute `m` at threshold `t`, counted over `subset`.
/// Returns `None` when the subset lacks positives or negatives.
pub fn rates_by_counting(
    scores: &[Vec<f64>],
    labels: &[Vec<u8>],
    subset: &[usize],
    m: usize,
    t: f64,
) -> Option<(f64, f64)> {
    let (mut tp, mut np, mut fp, mut nn) = (0u64, 0u64, 0u64, 0u64);
    for &i in subset {
        if labels[i][m] == 1 {
            np += 1;
            if scores[i][m] > t {
                tp += 1;
            }
        } else {
            nn += 1;
            if scores[i][m] > t {
                fp += 1;
            }
        }
    }
    if np == 0 || nn == 0 {
        return None;
    }
    Some((tp as f64 / np as f64, fp as f64 / nn as f64))
}

/// Mean of `n mod 1` for `n ~ Exp(mean eta)`, by Simpson quadrature. The
/// integrand jumps at every integer, so each unit segment (where it is
/// smooth) is integrated separately. Used to cross-check the sampler.
pub fn wrapped_exp_mean(eta: f64) -> f64 {
    assert!(eta > 0.0);
    let segments = (60.0 * eta).ceil().max(8.0) as usize;
    let steps = 2000usize; // per segment, even
    let f = |n: f64| (n % 1.0) * (1.0 / eta) * (-n / eta).exp();
    let mut total = 0.0;
    for seg in 0..segments {
        let lo = seg as f64;
        let h = 1.0 / steps as f64;
        // Evaluate just inside the segment ends; the integrand is smooth
        // on (seg, seg+1).
        let mut acc = f(lo + 1e-12) + f(lo + 1.0 - 1e-12);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        total += acc * h / 3.0;
    }
    total
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn entropy_reference_points() {
        assert!((entropy_bits(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!(entropy_bits(&[1.0, 0.0]).abs() < 1e-15);
        // -0.25 log2 0.25 - 0.75 log2 0.75
        assert!((entropy_bits(&[0.25, 0.75]) - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn ig_basic_uniform_pair_is_one_bit() {
        let bits = vec![vec![1u8], vec![0u8]];
        let gain = ig_basic(&bits, &[1.0, 1.0], 0, 0.5, 0);
        assert!((gain - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ig_zero_worked_example() {
        // K=2, bits [1,0], tpr=0.6, fpr=0.2, unit masses:
        // left masses 0.6/0.2, right 0.4/0.8
        // 1 - 0.4*H(.75) - 0.6*H(1/3) = 0.124511...
        let bits = vec![vec![1u8], vec![0u8]];
        let gain = ig_zero(&bits, &[1.0, 1.0], &[0, 1], 0, 0.6, 0.2, 0.0, 0.0, 0);
        assert!((gain - 0.124_511_2).abs() < 1e-6);
    }

    #[test]
    fn wrapped_exp_mean_closed_form() {
        // E[n mod 1] = eta - q/(1-q), q = exp(-1/eta)
        let eta = 0.2;
        let q = (-1.0f64 / eta).exp();
        let closed = eta - q / (1.0 - q);
        assert!((wrapped_exp_mean(eta) - closed).abs() < 1e-9);
    }
}
