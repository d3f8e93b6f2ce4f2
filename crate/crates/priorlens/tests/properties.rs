//! Randomized invariants over the public surface.
//!
//! Each block pins a structural identity that must hold for every input in
//! its domain: combinatorial symmetries of output patterns, algebraic laws
//! of the aggregation types, analytic bounds on the kernel and correlation
//! maps, and round trips through the text formats. Case counts are tuned
//! per block so the whole file stays within a desk-test budget.

use nalgebra::DMatrix;
use proptest::collection::vec as pvec;
use proptest::prelude::*;

use priorlens::analytic::{
    infinitesimal_bias_law, relu_kernel_step, suggested_quadrature_order, tanh_correlation_step,
    uniform_law, CorrelationState, KernelMatrix,
};
use priorlens::complexity::{
    cnf, dnf, k_lz, kbool_bound_linear, kbool_bound_linear_loose, kbool_bound_recursive,
    lz76_phrases,
};
use priorlens::conditions::{enumerate_signatures, t_min, t_of_weights, Signature};
use priorlens::estimator::{rank_curve, zipf_fit, FreqTable, RankCurve, THistogram};
use priorlens::expressivity::{build_multi_layer, build_one_hidden, verify};
use priorlens::hypercube::{build_input_set, CubeKind, OutputPattern};
use priorlens::netsample::{run_campaign, NetSpec, WeightLaw};
use priorlens::oracle::bijectivity_check;

/// Naive positive-vertex count over {0,1}^n, summing coordinates in
/// ascending index order (the same order the subset-sum table extends),
/// plus the smallest nonzero |sum| so callers can exclude near-ties.
fn naive_t_and_margin(w: &[f64]) -> (u64, f64) {
    let n = w.len();
    let mut t = 0u64;
    let mut margin = f64::INFINITY;
    for mask in 0usize..(1 << n) {
        let mut s = 0.0;
        for (j, wj) in w.iter().enumerate() {
            if mask >> j & 1 == 1 {
                s += wj;
            }
        }
        if s > 0.0 {
            t += 1;
        }
        if mask != 0 && s.abs() < margin {
            margin = s.abs();
        }
    }
    (t, margin)
}

fn weights_strategy(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    (1usize..=max_n).prop_flat_map(|n| pvec(-10.0f64..10.0, n))
}

proptest! {
    // Cheap combinatorial properties: default-ish case count.
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn complement_flips_t_and_preserves_entropy(bits in pvec(any::<bool>(), 1..=256)) {
        let p = OutputPattern::from_bits(bits.iter().copied());
        let q = p.complement();
        let m = p.len() as u64;
        prop_assert_eq!(q.t_value(), m - p.t_value());
        prop_assert!((q.entropy() - p.entropy()).abs() < 1e-12);
        prop_assert_eq!(q.complement(), p);
    }

    #[test]
    fn hex_and_bit_text_round_trip(bits in pvec(any::<bool>(), 1..=256)) {
        let p = OutputPattern::from_bits(bits.iter().copied());
        prop_assert_eq!(p.len(), bits.len());
        for (i, &b) in bits.iter().enumerate() {
            prop_assert_eq!(p.bit(i), b);
        }
        let back = OutputPattern::from_hex(&p.to_hex(), p.len()).unwrap();
        prop_assert_eq!(&back, &p);
        let back = OutputPattern::from_bit_str(&p.to_bit_str()).unwrap();
        prop_assert_eq!(&back, &p);
    }

    #[test]
    fn lz_estimate_is_positive_and_finite(bits in pvec(any::<bool>(), 8..=256)) {
        let p = OutputPattern::from_bits(bits.iter().copied());
        prop_assert!(lz76_phrases(&p) >= 1);
        let k = k_lz(&p).unwrap();
        prop_assert!(k.is_finite() && k > 0.0);
    }

    #[test]
    fn description_bounds_are_symmetric_in_t(n in 1u32..=16, raw_t in any::<u64>()) {
        let full = 1u64 << n;
        let t = raw_t % (full + 1);
        prop_assert_eq!(kbool_bound_linear(n, t), kbool_bound_linear(n, full - t));
        prop_assert_eq!(kbool_bound_recursive(n, t), kbool_bound_recursive(n, full - t));
        prop_assert!(kbool_bound_linear(n, t) <= kbool_bound_linear_loose(n, t));
        prop_assert_eq!(kbool_bound_recursive(n, 0), 0);
        if n >= 1 {
            prop_assert_eq!(kbool_bound_recursive(n, 1), u64::from(n) - 1);
        }
    }

    #[test]
    fn normal_forms_reproduce_the_pattern(n in 1usize..=4, raw_mask in any::<u64>()) {
        let m = 1usize << n;
        let mask = raw_mask & ((1u64 << m) - 1);
        let p = OutputPattern::from_bits((0..m).map(|i| mask >> i & 1 == 1));
        let d = dnf(&p, n).unwrap();
        let c = cnf(&p, n).unwrap();
        for i in 0..m {
            prop_assert_eq!(d.eval_on_vertex(i, n), p.bit(i));
            prop_assert_eq!(c.eval_on_vertex(i, n), p.bit(i));
        }
    }
}

proptest! {
    // Weight-space properties: each case scans up to 2^9 vertices.
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn threshold_count_matches_vertex_scan(w in weights_strategy(9)) {
        prop_assume!(w.iter().all(|x| x.abs() > 1e-6));
        let (expect, margin) = naive_t_and_margin(&w);
        // Exclude near-ties so float summation order cannot flip a sign.
        prop_assume!(margin > 1e-9);
        prop_assert_eq!(t_of_weights(&w).unwrap(), expect);
    }

    #[test]
    fn threshold_count_negation_and_scale(w in weights_strategy(9), c in 0.01f64..100.0) {
        prop_assume!(w.iter().all(|x| x.abs() > 1e-6));
        let (_, margin) = naive_t_and_margin(&w);
        prop_assume!(margin > 1e-9);
        let full = 1u64 << w.len();
        let t = t_of_weights(&w).unwrap();
        let neg: Vec<f64> = w.iter().map(|x| -x).collect();
        prop_assert_eq!(t_of_weights(&neg).unwrap(), full - 1 - t);
        let scaled: Vec<f64> = w.iter().map(|x| c * x).collect();
        prop_assert_eq!(t_of_weights(&scaled).unwrap(), t);
    }

    #[test]
    fn distinct_magnitudes_pass_bijectivity(w in pvec(0.25f64..10.0, 2..=10)) {
        let (_, margin) = naive_t_and_margin(&w);
        prop_assume!(margin > 1e-6);
        // All-positive weights with well-separated subset sums: the
        // sign-to-count map over 2^n orthant choices must be injective.
        let mut sums: Vec<f64> = (0..(1usize << w.len()))
            .map(|mask| {
                w.iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 1)
                    .map(|(_, x)| x)
                    .sum()
            })
            .collect();
        sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let min_gap = sums.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
        prop_assume!(min_gap > 1e-6);
        prop_assert_eq!(bijectivity_check(&w).unwrap(), true);
    }

    #[test]
    fn signature_text_round_trips(bits in pvec(any::<bool>(), 1..=12)) {
        let text: String = bits.iter().map(|&b| if b { '+' } else { '-' }).collect();
        let sig: Signature = text.parse().unwrap();
        prop_assert_eq!(sig.to_string(), text);
        prop_assert!(t_min(&sig) <= (1u64 << bits.len()) - 1);
    }

    #[test]
    fn enumerated_signatures_are_feasible_and_distinct(n in 1usize..=5, raw_t in any::<u64>()) {
        let t = raw_t % (1u64 << n);
        let sigs = enumerate_signatures(n, t).unwrap();
        let mut seen = std::collections::HashSet::new();
        for s in &sigs {
            prop_assert_eq!(s.n(), n);
            prop_assert!(t_min(s) <= t);
            prop_assert!(seen.insert(s.to_string()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laws_are_probability_distributions(n in 1u32..=20) {
        let m = 1usize << n;
        let u = uniform_law(n).unwrap();
        prop_assert_eq!(u.len(), m + 1);
        prop_assert!((u.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert_eq!(u[m], 0.0);
        for &p in &u[..m] {
            prop_assert_eq!(p, 0.5f64.powi(n as i32));
        }
        let b = infinitesimal_bias_law(n).unwrap();
        prop_assert_eq!(b.len(), m + 1);
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert_eq!(b[0], 0.5f64.powi(n as i32 + 1));
        prop_assert_eq!(b[m], b[0]);
        for &p in &b[1..m] {
            prop_assert_eq!(p, 0.5f64.powi(n as i32));
        }
    }
}

proptest! {
    // Aggregation algebra.
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn histogram_merge_is_commutative_and_associative(
        len in 1usize..=40,
        seed_a in pvec(0u64..50, 40),
        seed_b in pvec(0u64..50, 40),
        seed_c in pvec(0u64..50, 40),
    ) {
        let ha = THistogram::from_counts(seed_a[..len].to_vec()).unwrap();
        let hb = THistogram::from_counts(seed_b[..len].to_vec()).unwrap();
        let hc = THistogram::from_counts(seed_c[..len].to_vec()).unwrap();

        let mut ab = ha.clone();
        ab.merge(&hb);
        let mut ba = hb.clone();
        ba.merge(&ha);
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(ab.samples(), ha.samples() + hb.samples());

        let mut ab_c = ab.clone();
        ab_c.merge(&hc);
        let mut bc = hb.clone();
        bc.merge(&hc);
        let mut a_bc = ha.clone();
        a_bc.merge(&bc);
        prop_assert_eq!(&ab_c, &a_bc);

        if ab_c.samples() > 0 {
            let total: f64 = (0..len).map(|t| ab_c.probability(t)).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rank_curve_is_sorted_and_censored(
        entries in pvec((pvec(any::<bool>(), 4..=6), 1u64..30), 1..=12),
        cutoff in 0u64..4,
    ) {
        let mut f = FreqTable::new();
        for (bits, count) in &entries {
            let p = OutputPattern::from_bits(bits.iter().copied());
            for _ in 0..*count {
                f.record(p.clone());
            }
        }
        let curve = rank_curve(&f, cutoff);
        prop_assert_eq!(curve.cutoff(), cutoff);
        let rows = curve.entries();
        let mut prev = f64::INFINITY;
        for (i, row) in rows.iter().enumerate() {
            prop_assert_eq!(row.rank, (i + 1) as u64);
            prop_assert!(row.count > cutoff);
            prop_assert!(row.probability > 0.0 && row.probability <= prev);
            prop_assert_eq!(row.count, f.count(&row.pattern));
            let expect = row.count as f64 / f.samples() as f64;
            prop_assert!((row.probability - expect).abs() < 1e-15);
            prev = row.probability;
        }
        let retained: u64 = rows.iter().map(|r| r.count).sum();
        prop_assert!(retained <= f.samples());
        // Rows the cutoff censored are exactly the distinct patterns missing.
        prop_assert!(rows.len() <= f.distinct());
    }

    #[test]
    fn merged_freq_tables_add_counts(
        entries in pvec((pvec(any::<bool>(), 4..=5), 1u64..10, any::<bool>()), 1..=16),
    ) {
        let mut left = FreqTable::new();
        let mut right = FreqTable::new();
        let mut whole = FreqTable::new();
        for (bits, count, goes_left) in &entries {
            let p = OutputPattern::from_bits(bits.iter().copied());
            let side = if *goes_left { &mut left } else { &mut right };
            for _ in 0..*count {
                side.record(p.clone());
                whole.record(p.clone());
            }
        }
        let mut merged = left.clone();
        merged.merge(&right);
        prop_assert_eq!(&merged, &whole);
    }
}

proptest! {
    // Kernel and correlation maps.
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relu_kernel_step_bounds(
        dim in 2usize..=6,
        entries in pvec(-1.0f64..1.0, 36),
        sigma_w in 0.5f64..2.0,
        sigma_b in 0.0f64..1.0,
    ) {
        let a = DMatrix::from_fn(dim, dim, |i, j| entries[i * dim + j]);
        let k0 = &a * a.transpose() + DMatrix::identity(dim, dim) * 0.5;
        let k = KernelMatrix::from_matrix(k0.clone(), 0, sigma_w, sigma_b).unwrap();
        let k1 = relu_kernel_step(&k, sigma_w, sigma_b).unwrap();
        prop_assert_eq!(k1.depth(), 1);
        let m = k1.matrix();
        for i in 0..dim {
            let expect = sigma_b * sigma_b + sigma_w * sigma_w * k0[(i, i)] / 2.0;
            prop_assert!((m[(i, i)] - expect).abs() <= 1e-12 * expect.max(1.0));
            for j in 0..dim {
                prop_assert!((m[(i, j)] - m[(j, i)]).abs() < 1e-12);
                // The post-activation second moment of nonnegative units
                // plus a bias variance can never go negative.
                prop_assert!(m[(i, j)] >= -1e-12);
                prop_assert!(k1.correlation(i, j).abs() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn relu_correlation_step_is_monotone(
        q in 0.2f64..5.0,
        r1 in -1.0f64..1.0,
        r2 in -1.0f64..1.0,
        sigma_w in 0.5f64..2.0,
        sigma_b in 0.0f64..1.0,
    ) {
        let step = |r: f64| {
            let mat = DMatrix::from_row_slice(2, 2, &[q, r * q, r * q, q]);
            let k = KernelMatrix::from_matrix(mat, 0, sigma_w, sigma_b).unwrap();
            relu_kernel_step(&k, sigma_w, sigma_b).unwrap().correlation(0, 1)
        };
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(step(lo) <= step(hi) + 1e-10);
    }
}

proptest! {
    // Saturating-map quadrature: few cases, each integrates thousands of nodes.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tanh_step_is_odd_and_contractive_at_the_top(
        q in 0.3f64..8.0,
        r in 0.0f64..1.0,
        sigma_w in 0.5f64..2.0,
    ) {
        let order = suggested_quadrature_order(q);
        let plus = CorrelationState::new(q, q, r).unwrap();
        let minus = CorrelationState::new(q, q, -r).unwrap();
        let sp = tanh_correlation_step(&plus, sigma_w, 0.0, order).unwrap();
        let sm = tanh_correlation_step(&minus, sigma_w, 0.0, order).unwrap();
        // Without a bias the map is odd in the input correlation.
        prop_assert!((sm.c12 + sp.c12).abs() < 1e-9);
        prop_assert!((sp.q11 - sp.q22).abs() < 1e-12 * sp.q11.max(1.0));
        prop_assert!(sp.c12.abs() <= 1.0);
        // tanh is bounded by 1, so the next-layer variance is at most sigma_w^2.
        prop_assert!(sp.q11 <= sigma_w * sigma_w * (1.0 + 1e-9));
        // Identical inputs stay identical.
        let top = CorrelationState::new(q, q, 1.0).unwrap();
        let st = tanh_correlation_step(&top, sigma_w, 0.0, order).unwrap();
        prop_assert!((st.c12 - 1.0).abs() < 1e-9);
        // And the map preserves the ordering at the endpoints.
        prop_assert!(sp.c12 <= st.c12 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_law_fit_round_trips(
        a in prop_oneof![0.35f64..0.95, 1.05f64..1.6],
        log_no in 3.0f64..7.0,
    ) {
        let n_o = 10f64.powf(log_no);
        let b = (1.0 - a) / (n_o.powf(1.0 - a) - 1.0);
        let points: Vec<(u64, f64)> =
            (1u64..=200).map(|r| (r, b * (r as f64).powf(-a))).collect();
        let curve = RankCurve::from_points(&points).unwrap();
        let fit = zipf_fit(&curve).unwrap();
        prop_assert!((fit.slope + a).abs() < 1e-8);
        prop_assert!((fit.n_o - n_o).abs() < 1e-6 * n_o);
        prop_assert!(fit.residual < 1e-16);
    }
}

proptest! {
    // Sampling determinism: few cases, each draws 512 networks twice.
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn campaigns_replay_exactly(seed in any::<u64>(), shards in 1usize..=4) {
        let inputs = build_input_set(3, CubeKind::ZeroOne, None).unwrap();
        let spec = NetSpec::perceptron(3, WeightLaw::gaussian(1.0)).unwrap();
        let first = run_campaign(&spec, &inputs, 512, seed, shards).unwrap();
        let second = run_campaign(&spec, &inputs, 512, seed, shards).unwrap();
        prop_assert_eq!(first.thist.counts(), second.thist.counts());
        prop_assert_eq!(&first.freq, &second.freq);
        prop_assert_eq!(first.thist.samples(), 512);
        prop_assert_eq!(first.freq.samples(), 512);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn compiled_networks_verify(n in 2usize..=4, raw_mask in any::<u64>(), l in 1usize..=4) {
        let m = 1usize << n;
        let mask = raw_mask & ((1u64 << m) - 1);
        let p = OutputPattern::from_bits((0..m).map(|i| mask >> i & 1 == 1));
        let (spec, params) = build_multi_layer(&p, n, l).unwrap();
        prop_assert!(verify(&spec, &params, &p).unwrap());
        let (spec1, params1) = build_one_hidden(&p, n).unwrap();
        prop_assert!(verify(&spec1, &params1, &p).unwrap());
    }
}

#[test]
fn t_min_hits_both_extremes() {
    let all_plus: Signature = "++++".parse().unwrap();
    assert_eq!(t_min(&all_plus), 15);
    let all_minus: Signature = "----".parse().unwrap();
    assert_eq!(t_min(&all_minus), 0);
}
