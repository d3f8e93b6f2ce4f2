//! Closed-form laws and infinite-width predictions: the uniform T-law, the
//! infinitesimal-bias law, exact uniform-weight pattern probabilities, the
//! ReLU kernel recursion in closed form, the tanh correlation map by
//! Gauss-Hermite quadrature with regime classification, and GP-limit
//! T-distributions sampled with common random numbers across depths.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::THistogram;
use crate::hypercube::{binary_entropy, InputSet};
use crate::netsample::Activation;

/// Probability of each T-value for a bias-free symmetric-weight perceptron
/// on the full {0,1}^n cube: 2^-n for 0 <= t < 2^n and exactly 0 at t = 2^n
/// (the origin's dot product is 0, so the all-ones pattern is unreachable).
/// Indexed by t, length 2^n + 1.
pub fn uniform_law(n: u32) -> Result<Vec<f64>> {
    check_law_dim(n)?;
    let bins = 1usize << n;
    let p = 0.5f64.powi(n as i32);
    let mut law = vec![p; bins + 1];
    law[bins] = 0.0;
    Ok(law)
}

/// The same law under an infinitesimally small symmetric bias: mass 2^-(n+1)
/// at t = 0 and t = 2^n, 2^-n everywhere else. Indexed by t, length 2^n + 1.
pub fn infinitesimal_bias_law(n: u32) -> Result<Vec<f64>> {
    check_law_dim(n)?;
    let bins = 1usize << n;
    let p = 0.5f64.powi(n as i32);
    let mut law = vec![p; bins + 1];
    law[0] = p / 2.0;
    law[bins] = p / 2.0;
    Ok(law)
}

fn check_law_dim(n: u32) -> Result<()> {
    if n == 0 || n > 24 {
        return Err(Error::InvalidArgument(format!("law dimension {n} outside 1..=24")));
    }
    Ok(())
}

/// Average per-function probability inside a T-class of the stated size:
/// 2^-n / |F_t|.
pub fn avg_prob_in_class(n: u32, class_size: u64) -> Result<f64> {
    check_law_dim(n)?;
    if class_size == 0 {
        return Err(Error::InvalidArgument("class size must be >= 1".into()));
    }
    Ok(0.5f64.powi(n as i32) / class_size as f64)
}

/// Exact probability of the alternating pattern "0101..." for a bias-free
/// perceptron with centered-uniform weights: 2^-n / n!.
pub fn alternating_prob_uniform_weights(n: u32) -> Result<f64> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidArgument(format!("dimension {n} outside 1..=20")));
    }
    let mut fact = 1.0f64;
    for k in 2..=n {
        fact *= k as f64;
    }
    Ok(0.5f64.powi(n as i32) / fact)
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature for expectations over the standard normal.
// ---------------------------------------------------------------------------

type Quad = Arc<(Vec<f64>, Vec<f64>)>;

/// Hard ceiling on quadrature order (time and memory guard).
pub const MAX_QUAD_ORDER: usize = 32_768;

/// A quadrature order that comfortably passes the order-doubling gate of
/// [`tanh_correlation_step`] at pre-activation variance `q_max`: tanh's
/// poles sit at distance pi/(2 sqrt(q)) from the real axis, so the node
/// budget grows linearly in q to keep the doubling disagreement under 1e-8
/// (calibrated against adaptive reference integration). Clamped to
/// [256, MAX_QUAD_ORDER] and rounded up to a multiple of 64.
pub fn suggested_quadrature_order(q_max: f64) -> usize {
    let raw = (72.0 * q_max.max(1.0)).ceil() as usize;
    (raw.div_ceil(64) * 64).clamp(256, MAX_QUAD_ORDER)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix,
/// accumulating only the first row of the eigenvector product. On entry `d`
/// is the diagonal and `e[..n-1]` the off-diagonal; on exit `d` holds
/// eigenvalues (unsorted) and `z` the first component of each normalized
/// eigenvector. O(n^2) time, which keeps large quadrature orders affordable
/// where a dense eigensolver would not be.
fn tridiag_ql_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        'sweep: loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break 'sweep;
            }
            sweeps += 1;
            if sweeps > 60 {
                return Err(Error::Numerical("tridiagonal QL iteration stalled".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    continue 'sweep;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Nodes and weights for E[f(Z)], Z ~ N(0,1), by the Golub-Welsch method on
/// the Jacobi tridiagonal with off-diagonals sqrt(k). Weights sum to 1
/// exactly in exact arithmetic. Results are cached per order.
fn gauss_hermite(order: usize) -> Quad {
    static CACHE: OnceLock<Mutex<HashMap<usize, Quad>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(q) = cache.lock().expect("quadrature cache poisoned").get(&order) {
        return q.clone();
    }
    let mut d = vec![0.0f64; order];
    let mut e: Vec<f64> = (1..order).map(|k| (k as f64).sqrt()).collect();
    e.push(0.0);
    let mut z = vec![0.0f64; order];
    z[0] = 1.0;
    tridiag_ql_first_row(&mut d, &mut e, &mut z)
        .expect("QL converges on Gauss-Hermite Jacobi matrices");
    let mut pairs: Vec<(f64, f64)> = d.iter().zip(&z).map(|(&x, &c)| (x, c * c)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    let quad: Quad = Arc::new(pairs.into_iter().unzip());
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .insert(order, quad.clone());
    quad
}

/// E[f(Z)] under Z ~ N(0,1) at the given order. Parallel above a size
/// threshold, with a fixed summation order either way so results do not
/// depend on the worker count.
fn gauss_expect(order: usize, f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let quad = gauss_hermite(order);
    let (nodes, weights) = (&quad.0, &quad.1);
    if order >= 4096 {
        (0..order)
            .into_par_iter()
            .map(|i| weights[i] * f(nodes[i]))
            .collect::<Vec<_>>()
            .iter()
            .sum()
    } else {
        nodes.iter().zip(weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

// ---------------------------------------------------------------------------
// tanh / erf correlation map.
// ---------------------------------------------------------------------------

/// Two-point second-moment state of pre-activations: variances q11, q22 and
/// correlation c12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationState {
    pub q11: f64,
    pub q22: f64,
    pub c12: f64,
}

impl CorrelationState {
    /// Validated constructor: positive variances, |c12| <= 1.
    pub fn new(q11: f64, q22: f64, c12: f64) -> Result<CorrelationState> {
        if !(q11 > 0.0 && q11.is_finite() && q22 > 0.0 && q22.is_finite()) {
            return Err(Error::InvalidArgument("variances must be positive and finite".into()));
        }
        if !(c12.abs() <= 1.0) {
            return Err(Error::InvalidArgument(format!("|c12| = {} exceeds 1", c12.abs())));
        }
        Ok(CorrelationState { q11, q22, c12 })
    }
}

/// One layer of the correlation map for a saturating activation (tanh or
/// erf): evaluates the two-dimensional Gaussian expectation of
/// phi(u1) phi(u2) by Gauss-Hermite product quadrature and the variances by
/// the one-dimensional analogue, then renormalizes to a correlation.
///
/// The result is checked against the same integrals at twice the order;
/// disagreement beyond 1e-8 is an error rather than a silently wrong number.
///
/// # Errors
/// Order < 16, activations without a quadrature path (relu has a closed
/// form; linear is the identity), quadrature non-convergence.
pub fn correlation_step(
    activation: Activation,
    s: &CorrelationState,
    sigma_w: f64,
    sigma_b: f64,
    order: usize,
) -> Result<CorrelationState> {
    if order < 16 {
        return Err(Error::InvalidArgument("quadrature order must be >= 16".into()));
    }
    if !(sigma_w > 0.0) || !(sigma_b >= 0.0) {
        return Err(Error::InvalidArgument("need sigma_w > 0 and sigma_b >= 0".into()));
    }
    let phi: fn(f64) -> f64 = match activation {
        Activation::Tanh => |x| x.tanh(),
        Activation::Erf => statrs::function::erf::erf,
        Activation::Relu | Activation::Linear => {
            return Err(Error::InvalidArgument(
                "correlation_step serves saturating activations; relu has a closed form".into(),
            ))
        }
    };
    let lo = raw_step(phi, s, sigma_w, sigma_b, order);
    let hi = raw_step(phi, s, sigma_w, sigma_b, 2 * order);
    let err = (lo.0 - hi.0)
        .abs()
        .max((lo.1 - hi.1).abs())
        .max((lo.2 - hi.2).abs());
    if err > 1e-8 {
        return Err(Error::Numerical(format!(
            "quadrature disagreement {err:.3e} between orders {order} and {}",
            2 * order
        )));
    }
    let (q11, q22, q12) = hi;
    let denom = (q11 * q22).sqrt();
    if !(denom > 0.0) {
        return Err(Error::Numerical("collapsed variance in correlation map".into()));
    }
    let c = q12 / denom;
    if c.abs() > 1.0 + 1e-9 {
        return Err(Error::Numerical(format!("correlation {c} escaped [-1,1]")));
    }
    CorrelationState::new(q11, q22, c.clamp(-1.0, 1.0))
}

/// The documented tanh map; see [`correlation_step`].
pub fn tanh_correlation_step(
    s: &CorrelationState,
    sigma_w: f64,
    sigma_b: f64,
    order: usize,
) -> Result<CorrelationState> {
    correlation_step(Activation::Tanh, s, sigma_w, sigma_b, order)
}

/// Raw next (q11, q22, q12) at one order, no convergence check.
fn raw_step(
    phi: fn(f64) -> f64,
    s: &CorrelationState,
    sigma_w: f64,
    sigma_b: f64,
    order: usize,
) -> (f64, f64, f64) {
    let sw2 = sigma_w * sigma_w;
    let sb2 = sigma_b * sigma_b;
    let sq11 = s.q11.sqrt();
    let sq22 = s.q22.sqrt();
    let q11 = sw2 * gauss_expect(order, |z| phi(sq11 * z).powi(2)) + sb2;
    let q22 = sw2 * gauss_expect(order, |z| phi(sq22 * z).powi(2)) + sb2;
    // u1 = sqrt(q11) x, u2 = sqrt(q22) (c x + sqrt(1-c^2) y) over independent
    // standard normals x, y reproduces the joint law with correlation c.
    let c = s.c12;
    let root = (1.0 - c * c).max(0.0).sqrt();
    let quad = gauss_hermite(order);
    let (nodes, weights) = (&quad.0, &quad.1);
    let outer_term = |ix: usize| -> f64 {
        let x = nodes[ix];
        let t1 = phi(sq11 * x);
        let mut inner = 0.0;
        for (&y, &wy) in nodes.iter().zip(weights) {
            inner += wy * phi(sq22 * (c * x + root * y));
        }
        weights[ix] * t1 * inner
    };
    // Parallel over outer nodes with a fixed summation order.
    let q12: f64 = if order >= 1024 {
        (0..order)
            .into_par_iter()
            .map(outer_term)
            .collect::<Vec<_>>()
            .iter()
            .sum()
    } else {
        (0..order).map(outer_term).sum()
    };
    (q11, q22, sw2 * q12 + sb2)
}

/// Depth behavior of a tanh network at given hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Correlations are driven toward 1 with depth.
    Ordered,
    /// Correlations are driven toward 0 with depth; nearby inputs decouple.
    Chaotic,
}

/// Diagnostics behind a regime classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDiagnostics {
    /// Largest fixed point of the tanh variance map.
    pub q_star: f64,
    /// One-sided finite-difference slope of the correlation map at c = 1,
    /// evaluated at the variance fixed point.
    pub slope: f64,
    pub regime: Regime,
}

/// Classifies tanh hyperparameters as ordered or chaotic: chaotic iff the
/// slope of the correlation map at c12 = 1 (estimated by one-sided finite
/// difference at the variance fixed point q*) exceeds 1. See
/// [`regime_diagnostics`] for the numbers behind the verdict.
pub fn classify_regime(sigma_w: f64, sigma_b: f64) -> Result<Regime> {
    Ok(regime_diagnostics(sigma_w, sigma_b)?.regime)
}

/// Computes the variance fixed point and the c = 1 map slope.
///
/// The fixed point is the largest root of
/// `g(q) = sigma_w^2 E[tanh^2(sqrt(q) Z)] + sigma_b^2 - q`,
/// located by a downward grid scan and bisection, independently at two
/// quadrature orders that must agree. A fixed point at q* ~ 0 collapses the
/// map onto its linearization, where the slope is exactly sigma_w^2.
///
/// # Errors
/// Hyperparameters out of range or quadrature orders disagreeing on q*.
pub fn regime_diagnostics(sigma_w: f64, sigma_b: f64) -> Result<RegimeDiagnostics> {
    if !(sigma_w > 0.0 && sigma_w.is_finite()) || !(sigma_b >= 0.0 && sigma_b.is_finite()) {
        return Err(Error::InvalidArgument("need sigma_w > 0 and sigma_b >= 0".into()));
    }
    // Variances are bounded by sigma_w^2 + sigma_b^2 since |tanh| <= 1; that
    // scale decides how many quadrature nodes the integrals need.
    let q_cap = sigma_w * sigma_w + sigma_b * sigma_b + 1.0;
    if 72.0 * q_cap > MAX_QUAD_ORDER as f64 {
        return Err(Error::InvalidArgument(format!(
            "variance scale {q_cap:.1} needs quadrature beyond the supported order; \
             keep sigma_w^2 + sigma_b^2 under about 450"
        )));
    }
    let base = suggested_quadrature_order(q_cap);
    let q_lo = largest_fixed_point(sigma_w, sigma_b, base);
    let q_hi = largest_fixed_point(sigma_w, sigma_b, 2 * base);
    if (q_lo - q_hi).abs() > 1e-6 * (1.0 + q_hi.abs()) {
        return Err(Error::Numerical(format!(
            "variance fixed point did not converge: {q_lo} vs {q_hi}"
        )));
    }
    let q_star = q_hi;
    let slope = if q_star < 1e-9 {
        // Degenerate fixed point at the origin: tanh is its own
        // linearization there and the map slope is sigma_w^2 exactly.
        sigma_w * sigma_w
    } else {
        let h = 1e-6;
        let state = CorrelationState::new(q_star, q_star, 1.0 - h)?;
        let mut order = suggested_quadrature_order(q_star);
        let next = loop {
            match tanh_correlation_step(&state, sigma_w, sigma_b, order) {
                Ok(next) => break next,
                Err(Error::Numerical(_)) if order < MAX_QUAD_ORDER => {
                    order = (order * 2).min(MAX_QUAD_ORDER);
                }
                Err(e) => return Err(e),
            }
        };
        // c = 1 maps to 1; the one-sided difference quotient uses that
        // exactly.
        (1.0 - next.c12) / h
    };
    let regime = if slope > 1.0 { Regime::Chaotic } else { Regime::Ordered };
    Ok(RegimeDiagnostics { q_star, slope, regime })
}

fn largest_fixed_point(sigma_w: f64, sigma_b: f64, order: usize) -> f64 {
    let sw2 = sigma_w * sigma_w;
    let sb2 = sigma_b * sigma_b;
    let g = |q: f64| -> f64 {
        if q <= 0.0 {
            return sb2;
        }
        let sq = q.sqrt();
        sw2 * gauss_expect(order, |z| (sq * z).tanh().powi(2)) + sb2 - q
    };
    // E[tanh^2] <= 1, so g < 0 for all q > sw2 + sb2; scan down from there.
    let qmax = sw2 + sb2 + 1.0;
    let steps = 4000;
    let mut upper = qmax;
    let mut found = None;
    for i in (0..=steps).rev() {
        let q = qmax * i as f64 / steps as f64;
        if g(q) >= 0.0 {
            found = Some(q);
            break;
        }
        upper = q;
    }
    let Some(mut lower) = found else {
        return 0.0;
    };
    if lower == 0.0 {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lower + upper);
        if g(mid) >= 0.0 {
            lower = mid;
        } else {
            upper = mid;
        }
    }
    0.5 * (lower + upper)
}

// ---------------------------------------------------------------------------
// ReLU kernel recursion.
// ---------------------------------------------------------------------------

/// Covariance of pre-activations at a given depth in the infinite-width
/// limit, together with the hyperparameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    mat: DMatrix<f64>,
    depth: usize,
    sigma_w: f64,
    sigma_b: f64,
}

impl KernelMatrix {
    /// Depth-0 kernel from raw inputs: K(x,x') = sigma_b^2 +
    /// sigma_w^2 <x,x'> / n, matching the sampler's variance/fan-in
    /// convention so the depth-0 GP is exactly the perceptron prior.
    pub fn from_inputs(inputs: &InputSet, sigma_w: f64, sigma_b: f64) -> Result<KernelMatrix> {
        if !(sigma_w > 0.0 && sigma_w.is_finite()) || !(sigma_b >= 0.0 && sigma_b.is_finite()) {
            return Err(Error::InvalidArgument("need sigma_w > 0 and sigma_b >= 0".into()));
        }
        let m = inputs.len();
        let n = inputs.n() as f64;
        let sw2 = sigma_w * sigma_w;
        let sb2 = sigma_b * sigma_b;
        let mut mat = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let dot: f64 = inputs
                    .point(i)
                    .iter()
                    .zip(inputs.point(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let v = sb2 + sw2 * dot / n;
                mat[(i, j)] = v;
                mat[(j, i)] = v;
            }
        }
        Ok(KernelMatrix { mat, depth: 0, sigma_w, sigma_b })
    }

    /// Builds a kernel from an explicit symmetric matrix at a stated depth.
    pub fn from_matrix(mat: DMatrix<f64>, depth: usize, sigma_w: f64, sigma_b: f64) -> Result<KernelMatrix> {
        if !mat.is_square() {
            return Err(Error::InvalidArgument("kernel matrix must be square".into()));
        }
        let m = mat.nrows();
        for i in 0..m {
            for j in (i + 1)..m {
                if (mat[(i, j)] - mat[(j, i)]).abs() > 1e-12 * (1.0 + mat[(i, j)].abs()) {
                    return Err(Error::InvalidArgument("kernel matrix must be symmetric".into()));
                }
            }
        }
        Ok(KernelMatrix { mat, depth, sigma_w, sigma_b })
    }

    /// The covariance matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Number of kernel-recursion steps applied since the raw inputs.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Hyperparameters (sigma_w, sigma_b) recorded at construction.
    pub fn hyperparameters(&self) -> (f64, f64) {
        (self.sigma_w, self.sigma_b)
    }

    /// Correlation between points i and j (entry normalized by variances).
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        let d = (self.mat[(i, i)] * self.mat[(j, j)]).sqrt();
        if d == 0.0 {
            0.0
        } else {
            self.mat[(i, j)] / d
        }
    }
}

/// One layer of the ReLU kernel recursion:
///
/// * off-diagonal: `K'(x,x') = sigma_b^2 + (sigma_w^2 / 2 pi) sqrt(K(x,x)
///   K(x',x')) (sin(theta) + (pi - theta) cos(theta))` with `theta =
///   arccos(K(x,x') / sqrt(K(x,x) K(x',x')))`,
/// * diagonal, exactly: `K'(x,x) = sigma_b^2 + (sigma_w^2 / 2) K(x,x)`.
///
/// The arccos argument is clamped within 1e-12 of [-1, 1]; larger excursions
/// signal a broken kernel and abort.
///
/// # Errors
/// Non-positive diagonal entries, or correlation escaping [-1,1] beyond
/// tolerance.
pub fn relu_kernel_step(k: &KernelMatrix, sigma_w: f64, sigma_b: f64) -> Result<KernelMatrix> {
    if !(sigma_w > 0.0 && sigma_w.is_finite()) || !(sigma_b >= 0.0 && sigma_b.is_finite()) {
        return Err(Error::InvalidArgument("need sigma_w > 0 and sigma_b >= 0".into()));
    }
    let m = k.mat.nrows();
    let sw2 = sigma_w * sigma_w;
    let sb2 = sigma_b * sigma_b;
    for i in 0..m {
        if !(k.mat[(i, i)] > 0.0) {
            return Err(Error::Degenerate(format!(
                "kernel diagonal entry {i} is {}; the relu recursion needs positive variances",
                k.mat[(i, i)]
            )));
        }
    }
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        out[(i, i)] = sb2 + 0.5 * sw2 * k.mat[(i, i)];
        for j in (i + 1)..m {
            let scale = (k.mat[(i, i)] * k.mat[(j, j)]).sqrt();
            let rho = k.mat[(i, j)] / scale;
            if rho.abs() > 1.0 + 1e-12 {
                return Err(Error::Numerical(format!(
                    "kernel correlation {rho} at ({i},{j}) escaped [-1,1]"
                )));
            }
            let theta = rho.clamp(-1.0, 1.0).acos();
            let v = sb2
                + sw2 / (2.0 * std::f64::consts::PI)
                    * scale
                    * (theta.sin() + (std::f64::consts::PI - theta) * theta.cos());
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(KernelMatrix { mat: out, depth: k.depth + 1, sigma_w, sigma_b })
}

// ---------------------------------------------------------------------------
// GP-limit T-distribution by Monte Carlo over factorized kernels.
// ---------------------------------------------------------------------------

/// Largest input-set size for dense kernel factorization.
pub const MAX_GP_POINTS: usize = 4096;

/// MC draws per deterministic shard of GP sampling.
const GP_SHARD: u64 = 8192;

/// Depth sweep of GP-limit T-distributions with common random numbers: the
/// same standard-normal draw is pushed through every depth's factor, so
/// depth-to-depth differences are paired and their standard errors small.
#[derive(Debug, Clone)]
pub struct DepthSweep {
    /// The depths sampled, strictly increasing.
    pub layers: Vec<usize>,
    /// One T-histogram per depth.
    pub hists: Vec<THistogram>,
    /// Mean of the per-draw entropy drop H_(layers[k]) - H_(layers[k+1]).
    pub step_mean: Vec<f64>,
    /// Standard error of each paired entropy drop.
    pub step_se: Vec<f64>,
}

/// T-distribution of the infinite-width ReLU network at one depth; see
/// [`gp_depth_sweep`] for the underlying machinery and determinism contract.
pub fn gp_t_distribution(
    inputs: &InputSet,
    depth: usize,
    sigma_w: f64,
    sigma_b: f64,
    mc_samples: u64,
    seed: u64,
) -> Result<THistogram> {
    let sweep = gp_depth_sweep(inputs, &[depth], sigma_w, sigma_b, mc_samples, seed)?;
    Ok(sweep.hists.into_iter().next().expect("one depth requested"))
}

/// Samples GP-limit T-distributions at several depths with common random
/// numbers.
///
/// Builds the depth-0 kernel from the inputs, advances it with
/// [`relu_kernel_step`], and factors the kernel at each requested depth.
/// Zero-variance points (e.g. the origin of {0,1}^n with no bias) are
/// deterministic zeros at every depth — the recursion keeps them dead — so
/// they are excluded from factorization and contribute 0 to every T.
/// Factorization is Cholesky with a relative diagonal jitter schedule
/// (1e-10 doubling up to 1e-6); failure past the schedule is an error.
///
/// Sampling shards draws in fixed-size blocks with one ChaCha stream per
/// block, so the result is bit-identical for a fixed seed regardless of
/// worker count.
///
/// # Errors
/// Empty/oversized input sets, non-increasing depth lists, zero samples, or
/// factorization failure.
pub fn gp_depth_sweep(
    inputs: &InputSet,
    layers: &[usize],
    sigma_w: f64,
    sigma_b: f64,
    mc_samples: u64,
    seed: u64,
) -> Result<DepthSweep> {
    let m = inputs.len();
    if m == 0 || m > MAX_GP_POINTS {
        return Err(Error::InvalidArgument(format!(
            "gp sampling supports 1..={MAX_GP_POINTS} points, got {m}"
        )));
    }
    if layers.is_empty() || layers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("depth list must be strictly increasing".into()));
    }
    if mc_samples == 0 {
        return Err(Error::InvalidArgument("gp sampling needs mc_samples >= 1".into()));
    }

    // Advance the kernel, gathering the factor at each requested depth.
    let mut kernel = KernelMatrix::from_inputs(inputs, sigma_w, sigma_b)?;
    // Dead set is fixed by the depth-0 kernel; the recursion maps dead
    // diagonal 0 to sigma_b^2 + 0, which is 0 exactly when sigma_b = 0 (the
    // only way dead entries arise from inputs).
    let max_diag = (0..m).map(|i| kernel.matrix()[(i, i)]).fold(0.0f64, f64::max);
    if !(max_diag > 0.0) {
        return Err(Error::Degenerate("every input point has zero prior variance".into()));
    }
    let live: Vec<usize> =
        (0..m).filter(|&i| kernel.matrix()[(i, i)] > 1e-12 * max_diag).collect();
    let mut factors: Vec<Vec<f64>> = Vec::with_capacity(layers.len());
    let mut reached = 0usize;
    for &target in layers {
        while reached < target {
            kernel = relu_kernel_step_live(&kernel, sigma_w, sigma_b, &live)?;
            reached += 1;
        }
        factors.push(factor_live(kernel.matrix(), &live)?);
    }

    // Shard the draws deterministically.
    let nshards = mc_samples.div_ceil(GP_SHARD);
    let shard_results: Vec<SweepAccumulator> = (0..nshards)
        .into_par_iter()
        .map(|shard| {
            let quota = GP_SHARD.min(mc_samples - shard * GP_SHARD);
            run_gp_shard(&factors, live.len(), m, seed, shard, quota)
        })
        .collect();
    let mut acc = SweepAccumulator::new(layers.len(), m);
    for s in &shard_results {
        acc.merge(s);
    }

    let total = mc_samples as f64;
    let mut step_mean = Vec::new();
    let mut step_se = Vec::new();
    for k in 0..layers.len().saturating_sub(1) {
        let mean = acc.diff_sum[k] / total;
        let var = (acc.diff_sumsq[k] / total - mean * mean).max(0.0);
        step_mean.push(mean);
        step_se.push((var / total).sqrt());
    }
    Ok(DepthSweep { layers: layers.to_vec(), hists: acc.hists, step_mean, step_se })
}

/// Kernel step restricted to live indices; dead rows/columns stay exactly
/// zero, which is what the full recursion would do to them at sigma_b = 0.
fn relu_kernel_step_live(
    k: &KernelMatrix,
    sigma_w: f64,
    sigma_b: f64,
    live: &[usize],
) -> Result<KernelMatrix> {
    let m = k.matrix().nrows();
    if live.len() == m {
        return relu_kernel_step(k, sigma_w, sigma_b);
    }
    let sub = k.matrix().select_rows(live).select_columns(live);
    let stepped = relu_kernel_step(
        &KernelMatrix::from_matrix(sub, k.depth(), sigma_w, sigma_b)?,
        sigma_w,
        sigma_b,
    )?;
    let mut out = DMatrix::zeros(m, m);
    for (a, &i) in live.iter().enumerate() {
        for (b, &j) in live.iter().enumerate() {
            out[(i, j)] = stepped.matrix()[(a, b)];
        }
    }
    Ok(KernelMatrix { mat: out, depth: k.depth() + 1, sigma_w, sigma_b })
}

/// Lower-triangular Cholesky factor of the live submatrix, row-major packed
/// into a dense live x live buffer (zeros above the diagonal).
fn factor_live(mat: &DMatrix<f64>, live: &[usize]) -> Result<Vec<f64>> {
    let sub = mat.select_rows(live).select_columns(live);
    let k = live.len();
    let max_diag = (0..k).map(|i| sub[(i, i)]).fold(0.0f64, f64::max);
    let mut jitter_rel = 0.0f64;
    loop {
        let mut attempt = sub.clone();
        if jitter_rel > 0.0 {
            for i in 0..k {
                attempt[(i, i)] += jitter_rel * max_diag;
            }
        }
        if let Some(chol) = nalgebra::Cholesky::new(attempt) {
            let l = chol.l();
            let mut packed = vec![0.0f64; k * k];
            for i in 0..k {
                for j in 0..=i {
                    packed[i * k + j] = l[(i, j)];
                }
            }
            return Ok(packed);
        }
        jitter_rel = if jitter_rel == 0.0 { 1e-10 } else { jitter_rel * 2.0 };
        if jitter_rel > 1e-6 {
            return Err(Error::Numerical(
                "kernel factorization failed even with maximal diagonal jitter".into(),
            ));
        }
    }
}

struct SweepAccumulator {
    hists: Vec<THistogram>,
    diff_sum: Vec<f64>,
    diff_sumsq: Vec<f64>,
}

impl SweepAccumulator {
    fn new(depths: usize, m: usize) -> SweepAccumulator {
        SweepAccumulator {
            hists: vec![THistogram::new(m); depths],
            diff_sum: vec![0.0; depths.saturating_sub(1)],
            diff_sumsq: vec![0.0; depths.saturating_sub(1)],
        }
    }

    fn merge(&mut self, other: &SweepAccumulator) {
        for (a, b) in self.hists.iter_mut().zip(&other.hists) {
            a.merge(b);
        }
        for (a, b) in self.diff_sum.iter_mut().zip(&other.diff_sum) {
            *a += b;
        }
        for (a, b) in self.diff_sumsq.iter_mut().zip(&other.diff_sumsq) {
            *a += b;
        }
    }
}

fn run_gp_shard(
    factors: &[Vec<f64>],
    live: usize,
    m: usize,
    seed: u64,
    shard: u64,
    quota: u64,
) -> SweepAccumulator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    let mut acc = SweepAccumulator::new(factors.len(), m);
    let mut g = vec![0.0f64; live];
    let mut entropies = vec![0.0f64; factors.len()];
    for _ in 0..quota {
        for slot in g.iter_mut() {
            *slot = rng.sample(StandardNormal);
        }
        for (d, factor) in factors.iter().enumerate() {
            // z = L g with L lower triangular; count strict positives.
            let mut t = 0u64;
            for i in 0..live {
                let row = &factor[i * live..i * live + i + 1];
                let mut z = 0.0;
                for (l, gv) in row.iter().zip(g.iter()) {
                    z += l * gv;
                }
                if z > 0.0 {
                    t += 1;
                }
            }
            acc.hists[d].record(t);
            entropies[d] = binary_entropy(t as f64 / m as f64);
        }
        for k in 0..factors.len().saturating_sub(1) {
            let d = entropies[k] - entropies[k + 1];
            acc.diff_sum[k] += d;
            acc.diff_sumsq[k] += d * d;
        }
    }
    acc
}
