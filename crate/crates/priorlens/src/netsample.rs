//! Random parameter draws and forward evaluation of perceptrons and fully
//! connected networks over an input set, plus the sharded high-throughput
//! campaign driver.
//!
//! Determinism contract: a campaign's result depends only on (spec, inputs,
//! samples, seed, shards). Shard k draws from an independent ChaCha stream
//! `(seed, stream k)`, and shard tables are merged in shard order, so the
//! result is bit-identical no matter how the scheduler interleaves workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{FreqTable, THistogram};
use crate::hypercube::{InputLabel, InputSet, OutputPattern};

/// Elementwise activation of hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Erf,
    Linear,
}

impl Activation {
    /// Applies the activation to one pre-activation.
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Erf => statrs::function::erf::erf(x),
            Activation::Linear => x,
        }
    }
}

/// Marginal law of the weight entries. All laws are symmetric about 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// Centered Gaussian with standard deviation `sigma` (before fan-in
    /// scaling).
    Gaussian { sigma: f64 },
    /// Uniform on [-half_width, +half_width] (before fan-in scaling).
    Uniform { half_width: f64 },
}

/// Marginal law of the bias entries; biases are never fan-in scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiasKind {
    Gaussian { sigma: f64 },
    Uniform { half_width: f64 },
    /// Bias vectors are exactly zero.
    None,
}

/// How weight variance shrinks with the layer's fan-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FanInRule {
    /// No scaling; entries come straight from the law.
    None,
    /// Variance divided by the fan-in (standard infinite-width convention;
    /// the default).
    #[default]
    DivideByFanIn,
    /// Variance divided by sqrt(fan-in) — a literal reading of one statement
    /// of the depth theorem; kept as a switch so both conventions can be
    /// compared.
    DivideBySqrtFanIn,
}

/// Distribution of one parameter draw: weight law, bias law, fan-in rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightLaw {
    pub weights: WeightKind,
    pub bias: BiasKind,
    pub fan_in: FanInRule,
}

impl WeightLaw {
    /// Gaussian weights, no bias, default fan-in scaling.
    pub fn gaussian(sigma_w: f64) -> WeightLaw {
        WeightLaw {
            weights: WeightKind::Gaussian { sigma: sigma_w },
            bias: BiasKind::None,
            fan_in: FanInRule::default(),
        }
    }

    /// Gaussian weights and Gaussian bias (sigma_b = 0 means no bias).
    pub fn gaussian_with_bias(sigma_w: f64, sigma_b: f64) -> WeightLaw {
        WeightLaw {
            weights: WeightKind::Gaussian { sigma: sigma_w },
            bias: if sigma_b == 0.0 {
                BiasKind::None
            } else {
                BiasKind::Gaussian { sigma: sigma_b }
            },
            fan_in: FanInRule::default(),
        }
    }

    /// Centered-uniform weights, no bias.
    pub fn uniform(half_width: f64) -> WeightLaw {
        WeightLaw {
            weights: WeightKind::Uniform { half_width },
            bias: BiasKind::None,
            fan_in: FanInRule::default(),
        }
    }

    /// Checks the law's parameters.
    pub fn validate(&self) -> Result<()> {
        match self.weights {
            WeightKind::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                return Err(Error::InvalidArgument("weight sigma must be positive".into()))
            }
            WeightKind::Uniform { half_width } if !(half_width > 0.0 && half_width.is_finite()) => {
                return Err(Error::InvalidArgument("weight half-width must be positive".into()))
            }
            _ => {}
        }
        match self.bias {
            BiasKind::Gaussian { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                return Err(Error::InvalidArgument("bias sigma must be >= 0".into()))
            }
            BiasKind::Uniform { half_width } if !(half_width >= 0.0 && half_width.is_finite()) => {
                return Err(Error::InvalidArgument("bias half-width must be >= 0".into()))
            }
            _ => {}
        }
        Ok(())
    }
}

/// Architecture description: layer widths (input width first, output width 1
/// last), hidden activation, and the parameter law. The output is always
/// thresholded by the strict Heaviside `1(x > 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetSpec {
    widths: Vec<usize>,
    activation: Activation,
    law: WeightLaw,
}

impl NetSpec {
    /// Builds a spec and validates it: at least (input, output) layers, the
    /// output width exactly 1, all widths >= 1, a valid law.
    pub fn new(widths: Vec<usize>, activation: Activation, law: WeightLaw) -> Result<NetSpec> {
        if widths.len() < 2 {
            return Err(Error::InvalidArgument(
                "widths must list at least input and output layers".into(),
            ));
        }
        if *widths.last().expect("non-empty") != 1 {
            return Err(Error::InvalidArgument("output width must be 1".into()));
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(Error::InvalidArgument("layer widths must be >= 1".into()));
        }
        law.validate()?;
        Ok(NetSpec { widths, activation, law })
    }

    /// A perceptron (no hidden layers) on n inputs.
    pub fn perceptron(n: usize, law: WeightLaw) -> Result<NetSpec> {
        NetSpec::new(vec![n, 1], Activation::Linear, law)
    }

    /// Spec for compiled (hand-constructed) parameters. Identical to
    /// [`NetSpec::new`] except hidden widths of 0 are allowed: the degenerate
    /// constant-pattern constructions have no clauses to wire, and a width-0
    /// hidden layer simply contributes nothing to the next pre-activation.
    /// Such specs cannot be sampled with [`draw_params`].
    pub fn new_compiled(
        widths: Vec<usize>,
        activation: Activation,
        law: WeightLaw,
    ) -> Result<NetSpec> {
        if widths.len() < 2 {
            return Err(Error::InvalidArgument(
                "widths must list at least input and output layers".into(),
            ));
        }
        if *widths.last().expect("non-empty") != 1 {
            return Err(Error::InvalidArgument("output width must be 1".into()));
        }
        if widths[0] == 0 {
            return Err(Error::InvalidArgument("input width must be >= 1".into()));
        }
        law.validate()?;
        Ok(NetSpec { widths, activation, law })
    }

    /// Layer widths including input and output.
    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Number of hidden layers L (0 = perceptron).
    pub fn depth(&self) -> usize {
        self.widths.len() - 2
    }

    /// Hidden activation.
    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Parameter law.
    pub fn law(&self) -> &WeightLaw {
        &self.law
    }
}

/// One concrete parameter draw: per-layer weight matrices (row-major,
/// `widths[l+1] x widths[l]`) and bias vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NetParams {
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

impl NetParams {
    /// Builds params from explicit matrices, checking shape conformity with
    /// the spec. Bias vectors must be present (all-zero for "no bias").
    pub fn from_parts(spec: &NetSpec, weights: Vec<Vec<f64>>, biases: Vec<Vec<f64>>) -> Result<NetParams> {
        let layers = spec.widths().len() - 1;
        if weights.len() != layers || biases.len() != layers {
            return Err(Error::InvalidArgument(format!(
                "expected {layers} weight/bias layers, got {}/{}",
                weights.len(),
                biases.len()
            )));
        }
        for l in 0..layers {
            let rows = spec.widths()[l + 1];
            let cols = spec.widths()[l];
            if weights[l].len() != rows * cols {
                return Err(Error::InvalidArgument(format!(
                    "layer {l} weight matrix has {} entries, expected {rows}x{cols}",
                    weights[l].len()
                )));
            }
            if biases[l].len() != rows {
                return Err(Error::InvalidArgument(format!(
                    "layer {l} bias vector has {} entries, expected {rows}",
                    biases[l].len()
                )));
            }
        }
        Ok(NetParams { weights, biases })
    }

    /// Row-major weight matrix of layer l.
    pub fn weights(&self, l: usize) -> &[f64] {
        &self.weights[l]
    }

    /// Bias vector of layer l.
    pub fn biases(&self, l: usize) -> &[f64] {
        &self.biases[l]
    }
}

/// Per-layer multiplier applied to weight entries under the fan-in rule.
fn fan_in_scale(rule: FanInRule, fan_in: usize) -> f64 {
    match rule {
        FanInRule::None => 1.0,
        // variance / fan_in => entries scaled by fan_in^(-1/2)
        FanInRule::DivideByFanIn => 1.0 / (fan_in as f64).sqrt(),
        // variance / sqrt(fan_in) => entries scaled by fan_in^(-1/4)
        FanInRule::DivideBySqrtFanIn => 1.0 / (fan_in as f64).powf(0.25),
    }
}

fn draw_one<R: Rng>(kind: WeightKind, scale: f64, rng: &mut R) -> f64 {
    match kind {
        WeightKind::Gaussian { sigma } => {
            let z: f64 = rng.sample(StandardNormal);
            z * sigma * scale
        }
        WeightKind::Uniform { half_width } => {
            let u: f64 = rng.random();
            (2.0 * u - 1.0) * half_width * scale
        }
    }
}

/// Draws one parameter set from the spec's law. Weight entries are i.i.d.
/// from the weight law scaled per layer by the fan-in rule; bias entries are
/// i.i.d. from the bias law, unscaled; absent bias gives exact zeros.
///
/// # Errors
/// Specs with width-0 hidden layers (only produced by the compiled-spec
/// constructor) cannot be sampled.
pub fn draw_params<R: Rng>(spec: &NetSpec, rng: &mut R) -> Result<NetParams> {
    if spec.widths().iter().any(|&w| w == 0) {
        return Err(Error::InvalidArgument("cannot sample a spec with width-0 layers".into()));
    }
    let law = spec.law();
    let layers = spec.widths().len() - 1;
    let mut weights = Vec::with_capacity(layers);
    let mut biases = Vec::with_capacity(layers);
    for l in 0..layers {
        let rows = spec.widths()[l + 1];
        let cols = spec.widths()[l];
        let scale = fan_in_scale(law.fan_in, cols);
        let mut w = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            w.push(draw_one(law.weights, scale, rng));
        }
        let mut b = Vec::with_capacity(rows);
        for _ in 0..rows {
            match law.bias {
                BiasKind::None => b.push(0.0),
                BiasKind::Gaussian { sigma } => {
                    b.push(draw_one(WeightKind::Gaussian { sigma }, 1.0, rng))
                }
                BiasKind::Uniform { half_width } => {
                    b.push(draw_one(WeightKind::Uniform { half_width }, 1.0, rng))
                }
            }
        }
        weights.push(w);
        biases.push(b);
    }
    Ok(NetParams { weights, biases })
}

/// Forward pass on a single point; returns the final pre-activation (before
/// the Heaviside threshold). `cur` and `next` are scratch buffers.
fn forward_scalar(
    spec: &NetSpec,
    params: &NetParams,
    x: &[f64],
    cur: &mut Vec<f64>,
    next: &mut Vec<f64>,
) -> f64 {
    cur.clear();
    cur.extend_from_slice(x);
    let layers = spec.widths().len() - 1;
    for l in 0..layers {
        let rows = spec.widths()[l + 1];
        let cols = spec.widths()[l];
        let w = params.weights(l);
        let b = params.biases(l);
        next.clear();
        for r in 0..rows {
            let mut acc = b[r];
            let row = &w[r * cols..(r + 1) * cols];
            for (wi, xi) in row.iter().zip(cur.iter()) {
                acc += wi * xi;
            }
            if l + 1 < layers {
                acc = spec.activation().apply(acc);
            }
            next.push(acc);
        }
        std::mem::swap(cur, next);
    }
    cur[0]
}

/// Evaluates the network's output pattern over an input set: bit i is 1 iff
/// the final pre-activation on point i is strictly positive. Ties at exactly
/// 0 go to output 0 — no perturbation is added.
///
/// # Errors
/// Input dimension mismatch with the spec.
pub fn eval_pattern(spec: &NetSpec, params: &NetParams, inputs: &InputSet) -> Result<OutputPattern> {
    if spec.widths()[0] != inputs.n() {
        return Err(Error::InvalidArgument(format!(
            "spec expects {} inputs, input set has dimension {}",
            spec.widths()[0],
            inputs.n()
        )));
    }
    let mut cur = Vec::new();
    let mut next = Vec::new();
    let mut out = OutputPattern::zeros(inputs.len());
    for i in 0..inputs.len() {
        let h = forward_scalar(spec, params, inputs.point(i), &mut cur, &mut next);
        if h > 0.0 {
            out.set_bit(i, true);
        }
    }
    Ok(out)
}

/// Result of a sampling campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub freq: FreqTable,
    pub thist: THistogram,
    pub samples: u64,
    pub seed: u64,
    pub shards: usize,
}

impl CampaignResult {
    /// Merges another campaign's tables into this one (summation). Used by
    /// the shard reducer; exposed because merge order must not matter.
    pub fn merge(&mut self, other: &CampaignResult) {
        self.freq.merge(&other.freq);
        self.thist.merge(&other.thist);
        self.samples += other.samples;
    }
}

/// Runs `samples` independent draw-and-evaluate rounds sharded over workers.
///
/// Shard k derives its generator as ChaCha8(seed) on stream k, so shard
/// streams never overlap and the campaign is reproducible bit-for-bit from
/// (seed, shards) alone. The sample count is split as evenly as possible
/// with the first `samples % shards` shards taking one extra draw.
///
/// # Errors
/// Zero samples or shards; dimension mismatches from evaluation.
pub fn run_campaign(
    spec: &NetSpec,
    inputs: &InputSet,
    samples: u64,
    seed: u64,
    shards: usize,
) -> Result<CampaignResult> {
    if samples == 0 {
        return Err(Error::InvalidArgument("campaign needs samples >= 1".into()));
    }
    if shards == 0 {
        return Err(Error::InvalidArgument("campaign needs shards >= 1".into()));
    }
    if spec.widths()[0] != inputs.n() {
        return Err(Error::InvalidArgument(format!(
            "spec expects {} inputs, input set has dimension {}",
            spec.widths()[0],
            inputs.n()
        )));
    }
    if spec.widths().iter().any(|&w| w == 0) {
        return Err(Error::InvalidArgument("cannot sample a spec with width-0 layers".into()));
    }
    let base = samples / shards as u64;
    let extra = (samples % shards as u64) as usize;
    let shard_results: Result<Vec<(FreqTable, THistogram)>> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let quota = base + if k < extra { 1 } else { 0 };
            run_shard(spec, inputs, quota, seed, k as u64)
        })
        .collect();
    let shard_results = shard_results?;
    let mut freq = FreqTable::new();
    let mut thist = THistogram::new(inputs.len());
    for (f, h) in &shard_results {
        freq.merge(f);
        thist.merge(h);
    }
    Ok(CampaignResult { freq, thist, samples, seed, shards })
}

fn run_shard(
    spec: &NetSpec,
    inputs: &InputSet,
    quota: u64,
    seed: u64,
    stream: u64,
) -> Result<(FreqTable, THistogram)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut freq = FreqTable::new();
    let mut thist = THistogram::new(inputs.len());

    let n = inputs.n();
    let fast = spec.depth() == 0
        && inputs.label() == InputLabel::Hypercube01
        && inputs.len() == 1usize << n;
    if fast {
        // Perceptron on the full {0,1}^n cube: pre-activations over all 2^n
        // vertices via a subset-sum table. Vertex index i has coordinate j
        // equal to bit n-1-j, so v[bit] holds the weight of the coordinate
        // carried by that index bit.
        let law = spec.law();
        let scale = fan_in_scale(law.fan_in, n);
        let m = inputs.len();
        let mut v = vec![0.0f64; n];
        let mut sums = vec![0.0f64; m];
        for _ in 0..quota {
            // Draw in coordinate order (matching draw_params' stream use),
            // storing each weight at its index bit: coordinate j is carried
            // by bit n-1-j of the vertex index.
            for coord in 0..n {
                v[n - 1 - coord] = draw_one(law.weights, scale, &mut rng);
            }
            let b = match law.bias {
                BiasKind::None => 0.0,
                BiasKind::Gaussian { sigma } => {
                    draw_one(WeightKind::Gaussian { sigma }, 1.0, &mut rng)
                }
                BiasKind::Uniform { half_width } => {
                    draw_one(WeightKind::Uniform { half_width }, 1.0, &mut rng)
                }
            };
            sums[0] = b;
            for i in 1..m {
                let low = i.trailing_zeros() as usize;
                sums[i] = sums[i & (i - 1)] + v[low];
            }
            let mut pat = OutputPattern::zeros(m);
            let mut t = 0u64;
            for (i, &s) in sums.iter().enumerate() {
                if s > 0.0 {
                    pat.set_bit(i, true);
                    t += 1;
                }
            }
            thist.record(t);
            freq.record(pat);
        }
    } else {
        let mut cur = Vec::new();
        let mut next = Vec::new();
        for _ in 0..quota {
            let params = draw_params(spec, &mut rng)?;
            let mut pat = OutputPattern::zeros(inputs.len());
            let mut t = 0u64;
            for i in 0..inputs.len() {
                let h = forward_scalar(spec, &params, inputs.point(i), &mut cur, &mut next);
                if h > 0.0 {
                    pat.set_bit(i, true);
                    t += 1;
                }
            }
            thist.record(t);
            freq.record(pat);
        }
    }
    Ok((freq, thist))
}
