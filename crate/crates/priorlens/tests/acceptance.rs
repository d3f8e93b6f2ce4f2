//! Acceptance gate: fifteen end-to-end criteria, one test each, every test
//! printing a single `criterion NN <name>: PASS (...)` or `FAIL (...)` line
//! (visible under `--nocapture`; failures surface it in the panic message
//! too). Tolerances are pinned as consts below; seeds are pinned so every
//! statistical check is a deterministic replay, not a coin flip.
//!
//! Full-scale (1e8-sample) figure reproductions are out of desk reach; the
//! statistical criteria here run the same machinery at 1e5..1e7 samples with
//! correspondingly widened, pre-registered tolerances. The CLI `sample`
//! subcommand scales the same campaigns up unchanged.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use priorlens::analytic::{
    alternating_prob_uniform_weights, gp_depth_sweep, infinitesimal_bias_law,
    suggested_quadrature_order, tanh_correlation_step, CorrelationState,
};
use priorlens::complexity::{
    kbool_bound_linear, kbool_bound_recursive, minimal_connectives_table,
};
use priorlens::conditions::{build_condition_tree, t_of_weights};
use priorlens::estimator::{
    chi_square_homogeneity, chi_square_uniformity, mean_entropy, rank_curve, zipf_fit, RankCurve,
};
use priorlens::expressivity::{build_multi_layer, build_one_hidden, verify};
use priorlens::hypercube::{build_input_set, CubeKind, OutputPattern};
use priorlens::netsample::{
    run_campaign, Activation, BiasKind, CampaignResult, FanInRule, NetSpec, WeightKind, WeightLaw,
};
use priorlens::oracle::{bijectivity_check, class_sizes, enumerate_threshold_patterns};

// Pinned tolerances. Statistical bounds are classical: chi-square p-value
// floor for "indistinguishable", 3 standard errors for per-bin/pattern
// checks, 2 paired standard errors for per-step entropy drops.
const CHI2_P_FLOOR: f64 = 1e-3;
const Z_BOUND: f64 = 3.0;
const ASYMPTOTE_TOL: f64 = 0.05;
const STEP_SE_MULT: f64 = 2.0;
const SLOPE_RANGE: (f64, f64) = (-0.95, -0.70);
const SYNTH_SLOPE_RTOL: f64 = 0.01;
const SYNTH_NO_RTOL: f64 = 0.05;
const FLATNESS_BOUND: f64 = 0.05;
const ORDERED_FLOOR: f64 = 0.9;
const ANTIPODAL_TOL: f64 = 1e-6;

fn pass(num: u32, name: &str, detail: &str) {
    println!("criterion {num:02} {name}: PASS ({detail})");
}

fn check(num: u32, name: &str, ok: bool, msg: &str) {
    if !ok {
        println!("criterion {num:02} {name}: FAIL ({msg})");
        panic!("criterion {num:02} {name}: {msg}");
    }
}

fn cube01(n: usize) -> priorlens::hypercube::InputSet {
    build_input_set(n, CubeKind::ZeroOne, None).expect("cube")
}

fn perceptron_campaign(n: usize, law: WeightLaw, samples: u64, seed: u64) -> CampaignResult {
    let spec = NetSpec::perceptron(n, law).expect("spec");
    run_campaign(&spec, &cube01(n), samples, seed, 8).expect("campaign")
}

fn alternating_pattern(n: usize) -> OutputPattern {
    OutputPattern::from_bit_str(&"01".repeat(1 << (n - 1))).expect("pattern")
}

#[test]
fn criterion_01_uniform_t_law_under_two_weight_laws() {
    const NAME: &str = "uniform T-law under two weight laws";
    let start = Instant::now();
    let mut details = Vec::new();
    for (law, seed, label) in [
        (WeightLaw::gaussian(1.0), 1u64, "gaussian"),
        (WeightLaw::uniform(1.0), 2u64, "centered-uniform"),
    ] {
        let r = perceptron_campaign(7, law, 1_000_000, seed);
        let (stat, p) = chi_square_uniformity(&r.thist, 7).expect("chi2");
        check(
            1,
            NAME,
            p > CHI2_P_FLOOR,
            &format!("{label} weights: chi2 {stat:.1}, p {p:.2e} <= {CHI2_P_FLOOR:.0e}"),
        );
        details.push(format!("{label} p={p:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    check(1, NAME, secs < 60.0, &format!("runtime {secs:.1}s exceeds 60s"));
    pass(1, NAME, &format!("{}, {secs:.1}s", details.join(", ")));
}

#[test]
fn criterion_02_t_law_agnostic_but_pattern_law_sensitive() {
    const NAME: &str = "T-law agnostic, per-pattern law sensitive";
    let samples = 10_000_000u64;
    let g = perceptron_campaign(7, WeightLaw::gaussian(1.0), samples, 14);
    let u = perceptron_campaign(7, WeightLaw::uniform(1.0), samples, 15);
    let (stat, p) = chi_square_homogeneity(&g.thist, &u.thist).expect("chi2");
    check(
        2,
        NAME,
        p > CHI2_P_FLOOR,
        &format!("T-histograms distinguishable: chi2 {stat:.1}, p {p:.2e}"),
    );
    let alt = alternating_pattern(7);
    let nn = samples as f64;
    let (pg, pu) = (g.freq.count(&alt) as f64 / nn, u.freq.count(&alt) as f64 / nn);
    let se = (pg * (1.0 - pg) / nn + pu * (1.0 - pu) / nn).sqrt();
    let z = (pg - pu).abs() / se;
    check(
        2,
        NAME,
        z > Z_BOUND,
        &format!("alternating-pattern probabilities too close: z = {z:.1}"),
    );
    pass(
        2,
        NAME,
        &format!(
            "homogeneity p={p:.3}; alternating pattern {} vs {} counts, z={z:.1}",
            g.freq.count(&alt),
            u.freq.count(&alt)
        ),
    );
}

#[test]
fn criterion_03_exact_alternating_probability() {
    const NAME: &str = "exact alternating-pattern probability";
    let samples = 10_000_000u64;
    let r = perceptron_campaign(5, WeightLaw::uniform(1.0), samples, 3);
    let p_exact = alternating_prob_uniform_weights(5).expect("law");
    let count = r.freq.count(&alternating_pattern(5)) as f64;
    let mu = samples as f64 * p_exact;
    let sd = (samples as f64 * p_exact * (1.0 - p_exact)).sqrt();
    let z = (count - mu) / sd;
    check(
        3,
        NAME,
        z.abs() <= Z_BOUND,
        &format!("count {count} vs expected {mu:.1} (z = {z:.2})"),
    );
    pass(3, NAME, &format!("count {count} vs expected {mu:.1}, z={z:.2}"));
}

#[test]
fn criterion_04_infinitesimal_bias_law() {
    const NAME: &str = "infinitesimal-bias T-law";
    let samples = 1_000_000u64;
    let law = WeightLaw {
        weights: WeightKind::Gaussian { sigma: 1.0 },
        bias: BiasKind::Uniform { half_width: 1e-6 },
        fan_in: FanInRule::DivideByFanIn,
    };
    let r = perceptron_campaign(7, law, samples, 4);
    let expected = infinitesimal_bias_law(7).expect("law");
    let mut worst = 0.0f64;
    for (t, &p) in expected.iter().enumerate() {
        let mu = samples as f64 * p;
        let sd = (samples as f64 * p * (1.0 - p)).sqrt();
        let z = (r.thist.count(t) as f64 - mu) / sd;
        worst = worst.max(z.abs());
        check(
            4,
            NAME,
            z.abs() <= Z_BOUND,
            &format!("bin t={t}: count {} vs expected {mu:.1} (z = {z:.2})", r.thist.count(t)),
        );
    }
    pass(4, NAME, &format!("129 bins within 3 sigma, worst |z| = {worst:.2}"));
}

#[test]
fn criterion_05_bias_sweep_approaches_half_mass() {
    const NAME: &str = "bias sweep toward the half-mass asymptote";
    let samples = 200_000u64;
    let mut p0s = Vec::new();
    for sigma_b in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let r = perceptron_campaign(7, WeightLaw::gaussian_with_bias(1.0, sigma_b), samples, 5);
        let p0 = r.thist.probability(0);
        check(5, NAME, p0 < 0.5, &format!("P(T=0) = {p0} at sigma_b={sigma_b} not below 1/2"));
        if let Some(&prev) = p0s.last() {
            check(
                5,
                NAME,
                p0 > prev,
                &format!("P(T=0) not increasing at sigma_b={sigma_b}: {prev} -> {p0}"),
            );
        }
        p0s.push(p0);
    }
    let r = perceptron_campaign(7, WeightLaw::gaussian_with_bias(1.0, 1000.0), samples, 5);
    let p0 = r.thist.probability(0);
    check(
        5,
        NAME,
        (p0 - 0.5).abs() <= ASYMPTOTE_TOL,
        &format!("P(T=0) = {p0} at sigma_b=1000 not within {ASYMPTOTE_TOL} of 1/2"),
    );
    pass(
        5,
        NAME,
        &format!(
            "P(T=0) monotone {} -> {} below 1/2; {p0:.4} at sigma_b=1000",
            p0s[0], p0s[4]
        ),
    );
}

#[test]
fn criterion_06_entropy_decreases_with_depth() {
    const NAME: &str = "entropy decreases with depth";
    let start = Instant::now();
    let inputs = cube01(7);
    let layers: Vec<usize> = (0..=8).collect();
    let sweep = gp_depth_sweep(&inputs, &layers, 1.0, 0.0, 100_000, 6).expect("sweep");
    let ent: Vec<f64> =
        sweep.hists.iter().map(|h| mean_entropy(h).expect("entropy")).collect();
    let p0: Vec<f64> = sweep.hists.iter().map(|h| h.probability(0)).collect();
    for k in 0..layers.len() - 1 {
        check(
            6,
            NAME,
            sweep.step_mean[k] > STEP_SE_MULT * sweep.step_se[k],
            &format!(
                "entropy drop L{}->L{} = {:.5} not beyond {STEP_SE_MULT} paired SE ({:.5})",
                k,
                k + 1,
                sweep.step_mean[k],
                sweep.step_se[k]
            ),
        );
        check(
            6,
            NAME,
            ent[k + 1] < ent[k],
            &format!("mean entropy not strictly decreasing at L{}", k + 1),
        );
        check(
            6,
            NAME,
            p0[k + 1] > p0[k],
            &format!("P(T=0) not increasing at L{}: {} -> {}", k + 1, p0[k], p0[k + 1]),
        );
    }
    // Finite-width cross-check: width-64 sampled networks reproduce the
    // GP entropy ordering across depths 1, 2, 4.
    let mut finite = Vec::new();
    for (l, seed) in [(1usize, 61u64), (2, 62), (4, 63)] {
        let mut widths = vec![7usize];
        widths.extend(std::iter::repeat(64).take(l));
        widths.push(1);
        let spec =
            NetSpec::new(widths, Activation::Relu, WeightLaw::gaussian(1.0)).expect("spec");
        let r = run_campaign(&spec, &inputs, 30_000, seed, 8).expect("campaign");
        finite.push(mean_entropy(&r.thist).expect("entropy"));
    }
    check(
        6,
        NAME,
        finite[0] > finite[1] && finite[1] > finite[2],
        &format!("width-64 entropies not ordered like the GP: {finite:?}"),
    );
    let secs = start.elapsed().as_secs_f64();
    check(6, NAME, secs < 300.0, &format!("runtime {secs:.1}s exceeds 300s"));
    pass(
        6,
        NAME,
        &format!(
            "GP entropy {:.4} -> {:.4} over L=0..8, P(T=0) {:.4} -> {:.4}; \
             width-64 ordering {:.4} > {:.4} > {:.4}; {secs:.1}s",
            ent[0], ent[8], p0[0], p0[8], finite[0], finite[1], finite[2]
        ),
    );
}

#[test]
fn criterion_07_linear_depth_invariance() {
    const NAME: &str = "linear depth invariance";
    let samples = 100_000u64;
    let flat = perceptron_campaign(7, WeightLaw::gaussian(1.0), samples, 71);
    let deep_spec = NetSpec::new(
        vec![7, 16, 16, 16, 1],
        Activation::Linear,
        WeightLaw::gaussian(1.0),
    )
    .expect("spec");
    let deep = run_campaign(&deep_spec, &cube01(7), samples, 72, 8).expect("campaign");
    let (stat, p) = chi_square_homogeneity(&flat.thist, &deep.thist).expect("chi2");
    check(
        7,
        NAME,
        p > CHI2_P_FLOOR,
        &format!("depth-3 linear vs perceptron distinguishable: chi2 {stat:.1}, p {p:.2e}"),
    );
    pass(7, NAME, &format!("homogeneity p = {p:.3} at {samples} samples"));
}

#[test]
fn criterion_08_relu_floor_on_zero_mass() {
    const NAME: &str = "relu mass floor at T=0";
    let samples = 100_000u64;
    let floor_p = 0.5f64.powi(7);
    let se = (floor_p * (1.0 - floor_p) / samples as f64).sqrt();
    let floor = floor_p - Z_BOUND * se;
    let mut details = Vec::new();
    for (widths, sigma_b, seed) in [
        (vec![7usize, 64, 1], 0.0, 81u64),
        (vec![7, 64, 64, 1], 1.0, 82),
        (vec![7, 16, 16, 16, 16, 1], 2.0, 83),
    ] {
        let spec = NetSpec::new(
            widths.clone(),
            Activation::Relu,
            WeightLaw::gaussian_with_bias(1.0, sigma_b),
        )
        .expect("spec");
        let r = run_campaign(&spec, &cube01(7), samples, seed, 8).expect("campaign");
        let p0 = r.thist.probability(0);
        check(
            8,
            NAME,
            p0 >= floor,
            &format!("P(T=0) = {p0:.5} below floor {floor:.5} for widths {widths:?}"),
        );
        details.push(format!("{p0:.4}"));
    }
    pass(8, NAME, &format!("P(T=0) in {{{}}} all >= {floor:.5}", details.join(", ")));
}

#[test]
fn criterion_09_pattern_compiler_round_trip() {
    const NAME: &str = "pattern compiler round-trip";
    let start = Instant::now();
    // Exhaustive at n=3: every pattern, flat and layered forms.
    for mask in 0..256u64 {
        let p = OutputPattern::from_bits((0..8).map(|i| mask >> i & 1 == 1));
        let (spec, params) = build_one_hidden(&p, 3).expect("compile");
        check(
            9,
            NAME,
            verify(&spec, &params, &p).expect("verify"),
            &format!("flat form wrong on n=3 pattern {mask:08b}"),
        );
        for l in [1usize, 2, 4] {
            let (spec, params) = build_multi_layer(&p, 3, l).expect("compile");
            check(
                9,
                NAME,
                verify(&spec, &params, &p).expect("verify"),
                &format!("{l}-layer form wrong on n=3 pattern {mask:08b}"),
            );
        }
    }
    // 10^4 random patterns at n=7.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let patterns: Vec<OutputPattern> = (0..10_000)
        .map(|_| OutputPattern::from_bits((0..128).map(|_| rng.random::<bool>())))
        .collect();
    let failures: usize = patterns
        .par_iter()
        .map(|p| {
            let mut bad = 0usize;
            for l in [1usize, 2, 4] {
                let (spec, params) = build_multi_layer(p, 7, l).expect("compile");
                if !verify(&spec, &params, p).expect("verify") {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    check(9, NAME, failures == 0, &format!("{failures} layered compilations disagreed at n=7"));
    let secs = start.elapsed().as_secs_f64();
    check(9, NAME, secs < 60.0, &format!("runtime {secs:.1}s exceeds 60s"));
    pass(
        9,
        NAME,
        &format!("256 exhaustive n=3 + 10000 random n=7 patterns, l in {{1,2,4}}, {secs:.1}s"),
    );
}

#[test]
fn criterion_10_sampled_support_inside_exact_census() {
    const NAME: &str = "sampled support inside the exact census";
    for (n, seed) in [(2usize, 102u64), (3, 103), (4, 104)] {
        let census = enumerate_threshold_patterns(&cube01(n), false).expect("census");
        let r = perceptron_campaign(n, WeightLaw::gaussian(1.0), 1_000_000, seed);
        for (p, _) in r.freq.iter() {
            check(
                10,
                NAME,
                census.contains(p),
                &format!("sampled pattern {} at n={n} outside the census", p.to_bit_str()),
            );
        }
        if n == 3 {
            check(
                10,
                NAME,
                r.freq.distinct() == census.len(),
                &format!(
                    "n=3 support has {} patterns, census has {}",
                    r.freq.distinct(),
                    census.len()
                ),
            );
        }
    }
    let mut mid_class = 0u64;
    for n in 1..=5usize {
        let census = enumerate_threshold_patterns(&cube01(n), false).expect("census");
        let sizes = class_sizes(&census);
        check(10, NAME, sizes.get(&0) == Some(&1), &format!("|class t=0| != 1 at n={n}"));
        check(
            10,
            NAME,
            sizes.get(&1) == Some(&(n as u64)),
            &format!("|class t=1| != n at n={n}: {:?}", sizes.get(&1)),
        );
        if n == 5 {
            mid_class = *sizes.get(&16).expect("t=16 class");
            check(
                10,
                NAME,
                mid_class >= 370,
                &format!("n=5 t=16 class has {mid_class} patterns, below the sampled bound 370"),
            );
        }
    }
    pass(
        10,
        NAME,
        &format!(
            "support subset at n<=4, equality at n=3; |t=0|=1, |t=1|=n for n<=5; \
             exact n=5 t=16 class = {mid_class}"
        ),
    );
}

#[test]
fn criterion_11_magnitude_bijectivity() {
    const NAME: &str = "magnitude bijectivity";
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=10usize {
        for trial in 0..1000 {
            let a: Vec<f64> =
                (0..n).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
            check(
                11,
                NAME,
                matches!(bijectivity_check(&a), Ok(true)),
                &format!("generic vector #{trial} at n={n} not bijective: {a:?}"),
            );
        }
    }
    // Literal T-range check: the 2^n sign assignments hit {0,...,2^n-1}
    // exactly, spot-verified through the T evaluator.
    for n in 2..=8usize {
        for _ in 0..10 {
            let a: Vec<f64> =
                (0..n).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
            let mut ts: Vec<u64> = (0..1u64 << n)
                .map(|sig| {
                    let w: Vec<f64> = a
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| if sig >> i & 1 == 1 { v } else { -v })
                        .collect();
                    t_of_weights(&w).expect("t")
                })
                .collect();
            ts.sort_unstable();
            let expect: Vec<u64> = (0..1u64 << n).collect();
            check(11, NAME, ts == expect, &format!("sign T-values not 0..2^{n}-1 for {a:?}"));
        }
    }
    pass(11, NAME, "1000 vectors per n in 2..=10, plus literal T-range spot checks");
}

#[test]
fn criterion_12_complexity_bound_chain() {
    const NAME: &str = "complexity bound chain";
    for n in 1..=3usize {
        let table = minimal_connectives_table(n).expect("table");
        let census = enumerate_threshold_patterns(&cube01(n), false).expect("census");
        for p in &census {
            let mask = p.words()[0] as usize;
            let t = p.t_value();
            let minimal = u64::from(table[mask]);
            let rec = kbool_bound_recursive(n as u32, t);
            let lin = kbool_bound_linear(n as u32, t);
            check(
                12,
                NAME,
                minimal <= rec && rec <= lin,
                &format!(
                    "bound chain broken at n={n}, pattern {}: minimal {minimal}, \
                     recursive {rec}, linear {lin}",
                    p.to_bit_str()
                ),
            );
        }
    }
    for n in 2..=10u32 {
        for t in 0..1u64 << (n - 1) {
            check(
                12,
                NAME,
                kbool_bound_recursive(n, t) <= kbool_bound_recursive(n, t + 1),
                &format!("recursion not monotone at n={n}, t={t}"),
            );
        }
    }
    pass(12, NAME, "minimal <= recursive <= linear on all realizable n<=3; monotone to n=10");
}

#[test]
fn criterion_13_condition_trees_and_tiling() {
    const NAME: &str = "condition trees and cone tiling";
    const TREE_5_4: &str = "a4<a1+a2\n  ---+-\n  a3<a1+a2\n    ++---\n    --+--\n";
    const TREE_5_5: &str =
        "a5<a1+a2\n  ----+\n  a4<a1+a2\n    ++---\n    a4<a1+a3\n      ---+-\n      +-+--\n";
    let t4 = build_condition_tree(5, 4).expect("tree");
    let t5 = build_condition_tree(5, 5).expect("tree");
    check(
        13,
        NAME,
        t4.to_text() == TREE_5_4,
        &format!("t=4 tree differs node-for-node:\n{}", t4.to_text()),
    );
    check(
        13,
        NAME,
        t5.to_text() == TREE_5_5,
        &format!("t=5 tree differs node-for-node:\n{}", t5.to_text()),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (t, tree) in [(4u64, &t4), (5, &t5)] {
        for _ in 0..10_000 {
            let mut a: Vec<f64> =
                (0..5).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
            a.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
            let sig = tree.route(&a).expect("route");
            let w = sig.apply(&a).expect("apply");
            let got = t_of_weights(&w).expect("t");
            check(
                13,
                NAME,
                got == t,
                &format!("routed signature {sig} gives T={got}, wanted {t}, for {a:?}"),
            );
        }
    }
    pass(13, NAME, "both trees match node-for-node; 10000 routed vectors per t realize t");
}

#[test]
fn criterion_14_power_law_round_trip_and_campaign_slope() {
    const NAME: &str = "power-law fit round-trip and campaign slope";
    // Round trip on synthetic data drawn exactly from the fitted model.
    let a = 0.81f64;
    let n_o = 1e6f64;
    let b = (1.0 - a) / (n_o.powf(1.0 - a) - 1.0);
    let points: Vec<(u64, f64)> =
        (1..=2000u64).map(|r| (r, b * (r as f64).powf(-a))).collect();
    let fit = zipf_fit(&RankCurve::from_points(&points).expect("curve")).expect("fit");
    let slope_err = (-fit.slope - a).abs() / a;
    let no_err = (fit.n_o - n_o).abs() / n_o;
    check(
        14,
        NAME,
        slope_err <= SYNTH_SLOPE_RTOL,
        &format!("slope {} off synthetic exponent {a} by {slope_err:.2e}", fit.slope),
    );
    check(
        14,
        NAME,
        no_err <= SYNTH_NO_RTOL,
        &format!("N_O {} off synthetic {n_o} by {no_err:.2e}", fit.n_o),
    );
    // Desk-scale campaign slope. The full-budget (1e8-sample) slope sits
    // near -0.8; this pinned 1e7 replay must land in the widened interval.
    let r = perceptron_campaign(7, WeightLaw::gaussian(1.0), 10_000_000, 14);
    let curve = rank_curve(&r.freq, 2);
    let fit = zipf_fit(&curve).expect("fit");
    check(
        14,
        NAME,
        fit.slope >= SLOPE_RANGE.0 && fit.slope <= SLOPE_RANGE.1,
        &format!(
            "campaign slope {:.4} outside [{}, {}]",
            fit.slope, SLOPE_RANGE.0, SLOPE_RANGE.1
        ),
    );
    pass(
        14,
        NAME,
        &format!(
            "synthetic slope error {slope_err:.1e}, N_O error {no_err:.1e}; \
             campaign slope {:.4} over {} ranks",
            fit.slope,
            curve.entries().len()
        ),
    );
}

/// Correlation trajectories of the tanh infinite-width map on the full
/// +-1 cube: by symmetry every pair's correlation depends only on the
/// overlap x.y = n - 2k, so the n distinct off-diagonal values (k = 1..=n)
/// carry the whole matrix. Returns their correlations after each of
/// `depth` layers, antipodal pair last.
fn tanh_cube_correlations(
    n: usize,
    sigma_w: f64,
    sigma_b: f64,
    depth: usize,
) -> Vec<Vec<f64>> {
    let q0 = sigma_w * sigma_w + sigma_b * sigma_b;
    let order = suggested_quadrature_order(q0);
    let mut states: Vec<CorrelationState> = (1..=n)
        .map(|k| {
            let overlap = (n as f64 - 2.0 * k as f64) / n as f64;
            let c0 = (sigma_w * sigma_w * overlap + sigma_b * sigma_b) / q0;
            CorrelationState::new(q0, q0, c0).expect("state")
        })
        .collect();
    let mut history = Vec::with_capacity(depth);
    for _ in 0..depth {
        states = states
            .iter()
            .map(|s| tanh_correlation_step(s, sigma_w, sigma_b, order).expect("step"))
            .collect();
        history.push(states.iter().map(|s| s.c12).collect());
    }
    history
}

#[test]
fn criterion_15_saturating_map_depth_regimes() {
    const NAME: &str = "saturating-map depth regimes";
    let n = 7;
    let depth = 11; // depth 10 is the criterion; depth 11 diagnoses the miss
    let chaotic = tanh_cube_correlations(n, 4.0, 0.0, depth);
    let at10 = &chaotic[9];
    let antipodal = at10[n - 1];
    check(
        15,
        NAME,
        (antipodal + 1.0).abs() <= ANTIPODAL_TOL,
        &format!("antipodal correlation {antipodal} not at -1"),
    );
    let ordered = tanh_cube_correlations(n, 4.0, 10.0, 10);
    let ordered_min =
        ordered[9].iter().cloned().fold(f64::INFINITY, f64::min);
    check(
        15,
        NAME,
        ordered_min > ORDERED_FLOOR,
        &format!("sigma_b=10 correlations not ordered: min rho_10 = {ordered_min:.6}"),
    );
    let flat_max = |layer: &[f64]| {
        layer[..n - 1].iter().map(|c| c.abs()).fold(0.0f64, f64::max)
    };
    let (max10, max11) = (flat_max(at10), flat_max(&chaotic[10]));
    // Known honest failure: the depth-10 flatness bound is genuinely missed
    // by the faithful recursion. The closest pair (overlap 5/7) still holds
    // |rho_10| = 0.0617 > 0.05; the identical recursion crosses the bound at
    // depth 11 (max |rho_11| = 0.0472). Asserted as specified rather than
    // weakened; the antipodal and ordered-regime checks above passed first.
    check(
        15,
        NAME,
        max10 < FLATNESS_BOUND,
        &format!(
            "depth-10 flatness missed: max off-diagonal |rho_10| = {max10:.6} >= \
             {FLATNESS_BOUND} (closest pair starts at overlap 5/7); the same recursion \
             passes from depth 11 (max |rho_11| = {max11:.6}); antipodal exactness \
             ({antipodal:.8}) and the ordered regime (min rho_10 = {ordered_min:.6} > \
             {ORDERED_FLOOR}) both held"
        ),
    );
    pass(
        15,
        NAME,
        &format!(
            "antipodal {antipodal:.8}; chaotic flatness {max10:.6} < {FLATNESS_BOUND}; \
             ordered min {ordered_min:.6} > {ORDERED_FLOOR}"
        ),
    );
}
