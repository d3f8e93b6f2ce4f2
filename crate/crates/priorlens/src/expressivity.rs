//! Compiles any truth table over the {0,1}^n cube into explicit ReLU
//! network weights — a one-hidden-layer clause construction and a deep
//! variant that spreads the clauses across layers — plus an exact verifier.
//!
//! All compiled parameters are small integers (and one 0.5 output bias in
//! the negated branch), so evaluation in f64 is exact and the verifier is a
//! bit-for-bit comparison, not a tolerance check.

use serde_json::json;

use crate::error::{Error, Result};
use crate::hypercube::{build_input_set, CubeKind, OutputPattern};
use crate::netsample::{eval_pattern, Activation, NetParams, NetSpec, WeightLaw};

/// Truth-table compilation guard: widths grow like 2^(n-1).
pub const MAX_COMPILE_DIM: usize = 12;

/// Compiles a pattern into a single-hidden-layer ReLU net of width
/// min(t, 2^n − t): one exact-match detector per minority input, biases
/// 1 − γ with γ the detector's count of positive literals. When the ones
/// are the majority the detectors match the zeros instead and the output
/// layer negates (weights −1, bias 0.5). Constant patterns compile to a
/// width-0 hidden layer.
pub fn build_one_hidden(pattern: &OutputPattern, n: usize) -> Result<(NetSpec, NetParams)> {
    let (targets, negate) = clause_plan(pattern, n)?;
    let width = targets.len();
    let spec = NetSpec::new_compiled(
        vec![n, width, 1],
        Activation::Relu,
        WeightLaw::gaussian(1.0),
    )?;
    let mut w1 = Vec::with_capacity(width * n);
    let mut b1 = Vec::with_capacity(width);
    for &i in &targets {
        let (row, bias) = detector(i, n);
        w1.extend_from_slice(&row);
        b1.push(bias);
    }
    let (w2, b2) = if negate {
        (vec![-1.0; width], vec![0.5])
    } else {
        (vec![1.0; width], vec![0.0])
    };
    let params = NetParams::from_parts(&spec, vec![w1, w2], vec![b1, b2])?;
    Ok((spec, params))
}

/// Compiles a pattern into l hidden ReLU layers of equal width
/// n + ⌈t_eff/l⌉ + 1 with t_eff = min(t, 2^n − t). Each hidden layer is
/// three blocks: n passthrough neurons carrying the raw input (valid under
/// ReLU because cube inputs are non-negative), ⌈t_eff/l⌉ detector slots
/// (later layers read the passthrough copy; unused slots are zero), and one
/// accumulator summing every detector fired so far (zero in the first
/// layer). The output reads the last accumulator plus the last detector
/// block, negated as in [`build_one_hidden`] when the ones are the majority.
pub fn build_multi_layer(
    pattern: &OutputPattern,
    n: usize,
    l: usize,
) -> Result<(NetSpec, NetParams)> {
    if l == 0 || l > 256 {
        return Err(Error::InvalidArgument(format!(
            "hidden layer count must be 1..=256, got {l}"
        )));
    }
    let (targets, negate) = clause_plan(pattern, n)?;
    let t_eff = targets.len();
    let c = t_eff.div_ceil(l);
    let h = n + c + 1;
    let acc = n + c;
    let mut widths = Vec::with_capacity(l + 2);
    widths.push(n);
    widths.extend(std::iter::repeat(h).take(l));
    widths.push(1);
    let spec = NetSpec::new_compiled(widths, Activation::Relu, WeightLaw::gaussian(1.0))?;

    let mut weights = Vec::with_capacity(l + 1);
    let mut biases = Vec::with_capacity(l + 1);
    for layer in 0..l {
        let cols = if layer == 0 { n } else { h };
        let mut w = vec![0.0f64; h * cols];
        let mut b = vec![0.0f64; h];
        // Passthrough block: identity on the first n columns (the raw
        // input in layer 0, the previous passthrough copy afterwards).
        for r in 0..n {
            w[r * cols + r] = 1.0;
        }
        // Detector block for this layer's clause share.
        for q in 0..c {
            let k = layer * c + q;
            if k >= t_eff {
                break;
            }
            let (row, bias) = detector(targets[k], n);
            let r = n + q;
            w[r * cols..r * cols + n].copy_from_slice(&row);
            b[r] = bias;
        }
        // Accumulator: previous accumulator plus the previous detector
        // block; nothing to carry into the first hidden layer.
        if layer > 0 {
            w[acc * cols + acc] = 1.0;
            for q in 0..c {
                w[acc * cols + n + q] = 1.0;
            }
        }
        weights.push(w);
        biases.push(b);
    }
    // Output: accumulator plus the final detector block.
    let mut w_out = vec![0.0f64; h];
    let sign = if negate { -1.0 } else { 1.0 };
    w_out[acc] = sign;
    for q in 0..c {
        w_out[n + q] = sign;
    }
    weights.push(w_out);
    biases.push(vec![if negate { 0.5 } else { 0.0 }]);

    let params = NetParams::from_parts(&spec, weights, biases)?;
    Ok((spec, params))
}

/// Exact check: does the network reproduce the pattern bit-for-bit over
/// the full cube?
///
/// # Errors
/// Pattern length not matching the spec's input dimension.
pub fn verify(spec: &NetSpec, params: &NetParams, pattern: &OutputPattern) -> Result<bool> {
    let n = spec.widths()[0];
    if n > MAX_COMPILE_DIM || pattern.len() != 1usize << n {
        return Err(Error::InvalidArgument(format!(
            "pattern has {} bits, spec expects 2^{n}",
            pattern.len()
        )));
    }
    let inputs = build_input_set(n, CubeKind::ZeroOne, None)?;
    Ok(eval_pattern(spec, params, &inputs)? == *pattern)
}

/// Serializes a compiled network as JSON: widths, activation, row-major
/// weight matrices, bias vectors.
pub fn network_to_json(spec: &NetSpec, params: &NetParams) -> serde_json::Value {
    let layers = spec.widths().len() - 1;
    let weights: Vec<&[f64]> = (0..layers).map(|l| params.weights(l)).collect();
    let biases: Vec<&[f64]> = (0..layers).map(|l| params.biases(l)).collect();
    json!({
        "widths": spec.widths(),
        "activation": activation_name(spec.activation()),
        "weights": weights,
        "biases": biases,
    })
}

/// Rebuilds a compiled network from [`network_to_json`] output.
pub fn network_from_json(value: &serde_json::Value) -> Result<(NetSpec, NetParams)> {
    let widths: Vec<usize> = value
        .get("widths")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse("network JSON needs a \"widths\" array".into()))?
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| Error::Parse("widths must be non-negative integers".into()))
        })
        .collect::<Result<_>>()?;
    let act_name = value
        .get("activation")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Parse("network JSON needs an \"activation\" string".into()))?;
    let activation = parse_activation(act_name)?;
    let read_matrix_list = |key: &str| -> Result<Vec<Vec<f64>>> {
        value
            .get(key)
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse(format!("network JSON needs a {key:?} array")))?
            .iter()
            .map(|m| {
                m.as_array()
                    .ok_or_else(|| Error::Parse(format!("{key:?} entries must be arrays")))?
                    .iter()
                    .map(|x| {
                        x.as_f64()
                            .ok_or_else(|| Error::Parse(format!("{key:?} entries must be numbers")))
                    })
                    .collect()
            })
            .collect()
    };
    let weights = read_matrix_list("weights")?;
    let biases = read_matrix_list("biases")?;
    let spec = NetSpec::new_compiled(widths, activation, WeightLaw::gaussian(1.0))?;
    let params = NetParams::from_parts(&spec, weights, biases)?;
    Ok((spec, params))
}

fn activation_name(a: Activation) -> &'static str {
    match a {
        Activation::Relu => "relu",
        Activation::Tanh => "tanh",
        Activation::Erf => "erf",
        Activation::Linear => "linear",
    }
}

fn parse_activation(s: &str) -> Result<Activation> {
    match s {
        "relu" => Ok(Activation::Relu),
        "tanh" => Ok(Activation::Tanh),
        "erf" => Ok(Activation::Erf),
        "linear" => Ok(Activation::Linear),
        other => Err(Error::Parse(format!("unknown activation {other:?}"))),
    }
}

/// Which cube points get detectors, and whether the output is negated:
/// detectors match the minority side of the truth table.
fn clause_plan(pattern: &OutputPattern, n: usize) -> Result<(Vec<usize>, bool)> {
    if n == 0 || n > MAX_COMPILE_DIM {
        return Err(Error::InvalidArgument(format!(
            "compilation supports 1..={MAX_COMPILE_DIM} inputs, got {n}"
        )));
    }
    let m = 1usize << n;
    if pattern.len() != m {
        return Err(Error::InvalidArgument(format!(
            "pattern has {} bits, expected 2^{n} = {m}",
            pattern.len()
        )));
    }
    let t = pattern.t_value() as usize;
    let negate = 2 * t > m;
    let targets: Vec<usize> = (0..m).filter(|&i| pattern.bit(i) != negate).collect();
    Ok((targets, negate))
}

/// Exact-match detector for cube point index i: +1 weights on its one
/// coordinates, −1 on its zeros, bias 1 − γ. Pre-activation is 1 on the
/// point itself and ≤ 0 (integer) everywhere else.
fn detector(i: usize, n: usize) -> (Vec<f64>, f64) {
    let mut row = Vec::with_capacity(n);
    let mut gamma = 0u32;
    for j in 0..n {
        if (i >> (n - 1 - j)) & 1 == 1 {
            row.push(1.0);
            gamma += 1;
        } else {
            row.push(-1.0);
        }
    }
    (row, 1.0 - f64::from(gamma))
}
