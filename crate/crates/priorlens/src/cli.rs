//! Command-line front end: seeded sampling campaigns and deterministic
//! analysis modes with machine-readable outputs.
//!
//! Two subcommands. `sample` runs a parameter-draw campaign for a perceptron
//! or fully connected network and writes four tables (campaign JSON,
//! T-histogram CSV, rank CSV, per-pattern CSV). `analyze` bundles the
//! deterministic surfaces: closed-form T-laws, infinite-width depth sweeps,
//! power-law fits, sign-condition trees, pattern compilation, and the
//! exhaustive threshold census.
//!
//! Conventions, uniform across modes:
//! - all randomness flows from `--seed`; there is no implicit entropy source;
//! - a plain-text `key=value` config file supplies flag defaults, and
//!   explicit flags override it;
//! - `PRIORLENS_THREADS` caps both the worker pool and `--shards`;
//! - files carry a `# version/spec/seed/shards` comment header (a `"meta"`
//!   object in JSON files) sufficient to reproduce them byte-for-byte, and
//!   no timestamps, so identical invocations write identical bytes;
//! - CSV uses `.` decimals and probabilities carry 12 significant digits;
//! - exit codes: 2 for flag errors, 3 for I/O errors, 1 for everything else.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analytic;
use crate::complexity;
use crate::conditions::build_condition_tree;
use crate::error::{Error, Result};
use crate::estimator::{self, rank_curve, zipf_fit, RankCurve};
use crate::expressivity;
use crate::hypercube::{build_input_set, load_input_set, CubeKind, InputSet, OutputPattern};
use crate::netsample::{
    run_campaign, Activation, BiasKind, FanInRule, NetSpec, WeightKind, WeightLaw,
};
use crate::oracle;

/// Version stamp embedded in every output header.
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs the CLI on explicit argv (element 0 is the program name) and returns
/// the process exit code. Kept separate from `main` so integration tests can
/// drive it in-process.
pub fn run(raw: Vec<String>) -> i32 {
    let merged = match inject_config_defaults(raw) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Sample(a) => cmd_sample(a),
        Cmd::Analyze { mode } => match mode {
            AnalyzeCmd::GpDepth(a) => cmd_gp_depth(a),
            AnalyzeCmd::Laws(a) => cmd_laws(a),
            AnalyzeCmd::Zipf(a) => cmd_zipf(a),
            AnalyzeCmd::Conditions(a) => cmd_conditions(a),
            AnalyzeCmd::Expressivity(a) => cmd_expressivity(a),
            AnalyzeCmd::Oracle(a) => cmd_oracle(a),
        },
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => 2,
        Error::Io(_) | Error::Parse(_) => 3,
        _ => 1,
    }
}

#[derive(Parser)]
#[command(
    name = "priorlens",
    version,
    about = "Seeded sampling and analysis of the function prior of threshold networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample network parameters and tabulate the induced Boolean functions.
    #[command(args_override_self = true)]
    Sample(SampleArgs),
    /// Deterministic analyses: laws, depth sweeps, fits, trees, compilers.
    Analyze {
        #[command(subcommand)]
        mode: AnalyzeCmd,
    },
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Entropy and P(T=0) of the infinite-width ReLU prior, depth by depth.
    #[command(name = "gp-depth", args_override_self = true)]
    GpDepth(GpDepthArgs),
    /// Closed-form T-value laws as a t,probability table.
    #[command(args_override_self = true)]
    Laws(LawsArgs),
    /// Least-squares power-law fit of a rank,probability CSV.
    #[command(args_override_self = true)]
    Zipf(ZipfArgs),
    /// Sign/threshold decision tree for sorted weight magnitudes.
    #[command(args_override_self = true)]
    Conditions(ConditionsArgs),
    /// Compile a Boolean pattern into an exact network and verify it.
    #[command(args_override_self = true)]
    Expressivity(ExpressivityArgs),
    /// Exhaustive census of threshold-realizable patterns by T-value.
    #[command(args_override_self = true)]
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArchFlag {
    Perceptron,
    Mlp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ActFlag {
    Relu,
    Tanh,
    Erf,
    Linear,
}

impl From<ActFlag> for Activation {
    fn from(a: ActFlag) -> Activation {
        match a {
            ActFlag::Relu => Activation::Relu,
            ActFlag::Tanh => Activation::Tanh,
            ActFlag::Erf => Activation::Erf,
            ActFlag::Linear => Activation::Linear,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistFlag {
    Gaussian,
    Uniform,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FanInFlag {
    /// Weight variance divided by fan-in (the infinite-width convention).
    Divide,
    /// Weight variance divided by sqrt(fan-in).
    Sqrt,
    /// Raw draws, no fan-in scaling.
    None,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CubeFlag {
    #[value(name = "cube01")]
    Cube01,
    #[value(name = "pm1")]
    Pm1,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawFlag {
    Uniform,
    #[value(name = "infinitesimal-bias")]
    InfinitesimalBias,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatFlag {
    Text,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    /// Architecture to sample.
    #[arg(long, value_enum, default_value_t = ArchFlag::Perceptron)]
    arch: ArchFlag,
    /// Input dimension n (perceptron width; must match --widths for mlp).
    #[arg(long)]
    n: Option<usize>,
    /// Layer widths for --arch mlp, comma separated: input first, 1 last.
    #[arg(long)]
    widths: Option<String>,
    /// Hidden activation for --arch mlp.
    #[arg(long, value_enum, default_value_t = ActFlag::Relu)]
    act: ActFlag,
    /// Weight distribution.
    #[arg(long, value_enum, default_value_t = DistFlag::Gaussian)]
    dist: DistFlag,
    /// Weight scale: Gaussian sigma, or half-width for --dist uniform.
    #[arg(long, default_value_t = 1.0)]
    sigma_w: f64,
    /// Bias scale: Gaussian sigma, or half-width for --bias-dist uniform.
    /// 0 disables the bias term.
    #[arg(long, default_value_t = 0.0)]
    sigma_b: f64,
    /// Bias distribution (only read when --sigma-b > 0).
    #[arg(long, value_enum, default_value_t = DistFlag::Gaussian)]
    bias_dist: DistFlag,
    /// Fan-in scaling of the weight variance.
    #[arg(long, value_enum, default_value_t = FanInFlag::Divide)]
    fan_in: FanInFlag,
    /// Input set: cube01, pm1, cube01:M or pm1:M (seeded M-vertex
    /// subsample), or a CSV path (one point per line).
    #[arg(long, default_value = "cube01")]
    inputs: String,
    /// Number of parameter draws.
    #[arg(long)]
    samples: u64,
    /// Master seed; all randomness flows from it.
    #[arg(long)]
    seed: u64,
    /// Worker shards; the result depends on (seed, shards) only, never on
    /// thread scheduling.
    #[arg(long, default_value_t = 8)]
    shards: usize,
    /// Rank-curve cutoff: patterns seen <= cutoff times are dropped from
    /// rank.csv and patterns.csv.
    #[arg(long, default_value_t = 2)]
    cutoff: u64,
    /// Output directory for campaign.json, t_hist.csv, rank.csv,
    /// patterns.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Plain-text key=value defaults, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GpDepthArgs {
    /// Input dimension n.
    #[arg(long)]
    n: usize,
    /// Depths to report: inclusive range "0..8" or comma list "0,2,4".
    #[arg(long, default_value = "0..8")]
    layers: String,
    /// Weight sigma of the kernel recursion.
    #[arg(long, default_value_t = 1.0)]
    sigma_w: f64,
    /// Bias sigma of the kernel recursion.
    #[arg(long, default_value_t = 0.0)]
    sigma_b: f64,
    /// Input cube.
    #[arg(long, value_enum, default_value_t = CubeFlag::Cube01)]
    cube: CubeFlag,
    /// Optional seeded M-vertex subsample of the cube.
    #[arg(long)]
    subsample: Option<usize>,
    /// Monte-Carlo draws from the depth-L prior.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Master seed; all randomness flows from it.
    #[arg(long)]
    seed: u64,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value defaults, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct LawsArgs {
    /// Input dimension n.
    #[arg(long)]
    n: u32,
    /// Which closed-form law to print.
    #[arg(long, value_enum, default_value_t = LawFlag::Uniform)]
    law: LawFlag,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value defaults, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ZipfArgs {
    /// Input CSV of rank,probability rows ('#' comments and one header line
    /// allowed).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output JSON path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value defaults, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionsArgs {
    /// Weight-vector dimension n.
    #[arg(long)]
    n: usize,
    /// Target T-value.
    #[arg(long)]
    t: u64,
    /// Output rendering.
    #[arg(long, value_enum, default_value_t = FormatFlag::Text)]
    format: FormatFlag,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value defaults, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ExpressivityArgs {
    /// Pattern file: first non-comment line is a bit string (character i =
    /// vertex i of the canonical cube order) or a hex string.
    #[arg(long = "in", conflicts_with = "pattern")]
    input: Option<PathBuf>,
    /// Pattern literal, same formats as --in.
    #[arg(long)]
    pattern: Option<String>,
    /// Input dimension n (the pattern must have 2^n bits).
    #[arg(long)]
    n: usize,
    /// Hidden layers: 1 compiles the flat single-hidden-layer form, >1 the
    /// accumulator form of the same depth.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// Write the verified network as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value defaults, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Input dimension n (full cube has 2^n points; the census caps at 32).
    #[arg(long)]
    n: usize,
    /// Input cube.
    #[arg(long, value_enum, default_value_t = CubeFlag::Cube01)]
    cube: CubeFlag,
    /// Add a constant bias coordinate to every threshold unit.
    #[arg(long)]
    bias: bool,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value defaults, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// config plumbing

/// Reads `--config <path>` from the raw argv (if present), parses the file's
/// `key=value` lines into flags, and splices them in directly after the
/// subcommand tokens so explicit flags, coming later, override them.
fn inject_config_defaults(raw: Vec<String>) -> Result<Vec<String>> {
    let mut path: Option<String> = None;
    let mut i = 0;
    while i < raw.len() {
        let a = &raw[i];
        if a == "--config" {
            if let Some(v) = raw.get(i + 1) {
                if !v.starts_with('-') {
                    path = Some(v.clone());
                }
            }
            i += 2;
            continue;
        }
        if let Some(rest) = a.strip_prefix("--config=") {
            path = Some(rest.to_string());
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(raw) };
    let text =
        fs::read_to_string(&path).map_err(|e| Error::Io(format!("config {path}: {e}")))?;
    let mut defaults = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse(format!("config {path}:{}: expected key=value", idx + 1)));
        };
        let k = k.trim();
        let v = v.trim();
        if k.is_empty()
            || !k.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
        {
            return Err(Error::Parse(format!("config {path}:{}: bad key '{k}'", idx + 1)));
        }
        if k == "config" {
            // No recursive includes.
            continue;
        }
        defaults.push(format!("--{k}"));
        if !v.is_empty() {
            defaults.push(v.to_string());
        }
    }
    // Insert after the subcommand tokens: prog [sample|analyze [mode]].
    let mut head = 1usize;
    if raw.len() > head && !raw[head].starts_with('-') {
        let is_analyze = raw[head] == "analyze";
        head += 1;
        if is_analyze && raw.len() > head && !raw[head].starts_with('-') {
            head += 1;
        }
    }
    let mut merged = raw;
    merged.splice(head..head, defaults);
    Ok(merged)
}

/// Applies the PRIORLENS_THREADS cap: bounds the rayon pool and the shard
/// count. Returns the effective shard count.
fn effective_shards(requested: usize) -> Result<usize> {
    if requested == 0 {
        return Err(Error::InvalidArgument("--shards must be >= 1".into()));
    }
    match std::env::var("PRIORLENS_THREADS") {
        Err(_) => Ok(requested),
        Ok(s) => {
            let cap: usize = s.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "PRIORLENS_THREADS must be a positive integer, got '{s}'"
                ))
            })?;
            if cap == 0 {
                return Err(Error::InvalidArgument(
                    "PRIORLENS_THREADS must be a positive integer, got '0'".into(),
                ));
            }
            // Best effort: fails harmlessly if a pool already exists.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(cap).build_global();
            Ok(requested.min(cap))
        }
    }
}

// ---------------------------------------------------------------------------
// output plumbing

/// Probability formatting: 12 significant digits, locale-free.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn meta_lines(spec_line: &str, seed: Option<u64>, shards: Option<usize>) -> String {
    let mut s = format!("# version: priorlens {VERSION}\n# spec: {spec_line}\n");
    if let Some(seed) = seed {
        s.push_str(&format!("# seed: {seed}\n"));
    }
    if let Some(k) = shards {
        s.push_str(&format!("# shards: {k}\n"));
    }
    s
}

fn meta_json(spec_line: &str, seed: Option<u64>, shards: Option<usize>) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    m.insert("version".into(), json!(format!("priorlens {VERSION}")));
    m.insert("spec".into(), json!(spec_line));
    if let Some(seed) = seed {
        m.insert("seed".into(), json!(seed));
    }
    if let Some(k) = shards {
        m.insert("shards".into(), json!(k));
    }
    serde_json::Value::Object(m)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Emits a text body: bare to stdout, or meta header + body to a file.
fn emit_text(out: Option<&Path>, meta: &str, body: &str) -> Result<()> {
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(p) => write_text(p, &format!("{meta}{body}")),
    }
}

/// Emits a JSON value: bare to stdout, or with a "meta" member to a file.
fn emit_json(out: Option<&Path>, meta: serde_json::Value, mut v: serde_json::Value) -> Result<()> {
    let rendered = match out {
        None => v,
        Some(_) => {
            if let serde_json::Value::Object(map) = &mut v {
                map.insert("meta".into(), meta);
            }
            v
        }
    };
    let text = format!(
        "{}\n",
        serde_json::to_string_pretty(&rendered)
            .map_err(|e| Error::Internal(format!("json render: {e}")))?
    );
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => write_text(p, &text),
    }
}

// ---------------------------------------------------------------------------
// sample

fn act_name(a: Activation) -> &'static str {
    match a {
        Activation::Relu => "relu",
        Activation::Tanh => "tanh",
        Activation::Erf => "erf",
        Activation::Linear => "linear",
    }
}

fn dist_name(d: DistFlag) -> &'static str {
    match d {
        DistFlag::Gaussian => "gaussian",
        DistFlag::Uniform => "uniform",
    }
}

fn fan_in_name(f: FanInFlag) -> &'static str {
    match f {
        FanInFlag::Divide => "divide",
        FanInFlag::Sqrt => "sqrt",
        FanInFlag::None => "none",
    }
}

/// Subsample RNG seed, derived from the campaign seed so input selection and
/// weight draws never share a stream.
fn subsample_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Resolves an `--inputs` spec against dimension n.
fn parse_inputs(spec: &str, n: usize, seed: u64) -> Result<InputSet> {
    let subsize = |rest: &str| -> Result<usize> {
        rest.parse::<usize>().map_err(|_| {
            Error::InvalidArgument(format!("bad subsample size '{rest}' in --inputs {spec}"))
        })
    };
    match spec {
        "cube01" => build_input_set(n, CubeKind::ZeroOne, None),
        "pm1" => build_input_set(n, CubeKind::PlusMinusOne, None),
        other => {
            if let Some(rest) = other.strip_prefix("cube01:") {
                build_input_set(n, CubeKind::ZeroOne, Some((subsize(rest)?, subsample_seed(seed))))
            } else if let Some(rest) = other.strip_prefix("pm1:") {
                build_input_set(
                    n,
                    CubeKind::PlusMinusOne,
                    Some((subsize(rest)?, subsample_seed(seed))),
                )
            } else {
                load_input_set(Path::new(other))
            }
        }
    }
}

fn parse_widths(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad width '{s}' in --widths {text}")))
        })
        .collect()
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let law = WeightLaw {
        weights: match a.dist {
            DistFlag::Gaussian => WeightKind::Gaussian { sigma: a.sigma_w },
            DistFlag::Uniform => WeightKind::Uniform { half_width: a.sigma_w },
        },
        bias: if a.sigma_b == 0.0 {
            BiasKind::None
        } else {
            match a.bias_dist {
                DistFlag::Gaussian => BiasKind::Gaussian { sigma: a.sigma_b },
                DistFlag::Uniform => BiasKind::Uniform { half_width: a.sigma_b },
            }
        },
        fan_in: match a.fan_in {
            FanInFlag::Divide => FanInRule::DivideByFanIn,
            FanInFlag::Sqrt => FanInRule::DivideBySqrtFanIn,
            FanInFlag::None => FanInRule::None,
        },
    };
    let (spec, n, arch_part) = match a.arch {
        ArchFlag::Perceptron => {
            let n = a.n.ok_or_else(|| {
                Error::InvalidArgument("--arch perceptron needs --n".into())
            })?;
            if a.widths.is_some() {
                return Err(Error::InvalidArgument(
                    "--widths only applies to --arch mlp".into(),
                ));
            }
            (NetSpec::perceptron(n, law)?, n, format!("--arch perceptron --n {n}"))
        }
        ArchFlag::Mlp => {
            let widths_text = a
                .widths
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("--arch mlp needs --widths".into()))?;
            let widths = parse_widths(widths_text)?;
            let spec = NetSpec::new(widths.clone(), a.act.into(), law)?;
            let n = widths[0];
            if let Some(nn) = a.n {
                if nn != n {
                    return Err(Error::InvalidArgument(format!(
                        "--n {nn} contradicts --widths input width {n}"
                    )));
                }
            }
            let joined =
                widths.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",");
            (spec, n, format!("--arch mlp --widths {joined} --act {}", act_name(a.act.into())))
        }
    };
    let shards = effective_shards(a.shards)?;
    let inputs = parse_inputs(&a.inputs, n, a.seed)?;
    let result = run_campaign(&spec, &inputs, a.samples, a.seed, shards)?;

    let spec_line = format!(
        "sample {arch_part} --dist {dist} --sigma-w {sw} --sigma-b {sb} --bias-dist {bd} \
         --fan-in {fi} --inputs {inp} --samples {samples} --seed {seed} --shards {shards} \
         --cutoff {cutoff}",
        dist = dist_name(a.dist),
        sw = a.sigma_w,
        sb = a.sigma_b,
        bd = dist_name(a.bias_dist),
        fi = fan_in_name(a.fan_in),
        inp = a.inputs,
        samples = a.samples,
        seed = a.seed,
        cutoff = a.cutoff,
    );
    let meta = meta_lines(&spec_line, Some(a.seed), Some(shards));

    fs::create_dir_all(&a.out)
        .map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;

    // t_hist.csv: one row per T-value, 0..=m.
    let hist = &result.thist;
    let mut t_csv = String::from("t,count\n");
    for (t, &c) in hist.counts().iter().enumerate() {
        t_csv.push_str(&format!("{t},{c}\n"));
    }
    write_text(&a.out.join("t_hist.csv"), &format!("{meta}{t_csv}"))?;

    // rank.csv and patterns.csv share the cutoff rank curve.
    let curve = rank_curve(&result.freq, a.cutoff);
    let mut rank_csv = String::from("rank,probability\n");
    let mut pat_csv = String::from("pattern,t,entropy,k_lz,probability\n");
    for e in curve.entries() {
        rank_csv.push_str(&format!("{},{}\n", e.rank, sig12(e.probability)));
        pat_csv.push_str(&format!(
            "{},{},{:.6},{:.6},{}\n",
            e.pattern.to_hex(),
            e.pattern.t_value(),
            e.pattern.entropy(),
            complexity::k_lz(&e.pattern)?,
            sig12(e.probability)
        ));
    }
    write_text(&a.out.join("rank.csv"), &format!("{meta}{rank_csv}"))?;
    write_text(&a.out.join("patterns.csv"), &format!("{meta}{pat_csv}"))?;

    // campaign.json: the run summary.
    let chi2 = if inputs.len() == (1usize << n) {
        match estimator::chi_square_uniformity(hist, n) {
            Ok((stat, p)) => json!({ "stat": stat, "p": p }),
            Err(_) => serde_json::Value::Null,
        }
    } else {
        serde_json::Value::Null
    };
    let summary = json!({
        "meta": meta_json(&spec_line, Some(a.seed), Some(shards)),
        "arch": match a.arch { ArchFlag::Perceptron => "perceptron", ArchFlag::Mlp => "mlp" },
        "widths": spec.widths(),
        "activation": act_name(spec.activation()),
        "n": n,
        "input_points": inputs.len(),
        "inputs": a.inputs,
        "samples": result.samples,
        "seed": result.seed,
        "shards": result.shards,
        "cutoff": a.cutoff,
        "distinct_patterns": result.freq.distinct(),
        "retained_ranks": curve.entries().len(),
        "mean_entropy": estimator::mean_entropy(hist)?,
        "p_t0": hist.probability(0),
        "chi2_uniform": chi2,
    });
    let text = format!(
        "{}\n",
        serde_json::to_string_pretty(&summary)
            .map_err(|e| Error::Internal(format!("json render: {e}")))?
    );
    write_text(&a.out.join("campaign.json"), &text)?;

    println!(
        "wrote campaign.json, t_hist.csv, rank.csv, patterns.csv to {} \
         ({} samples, {} distinct patterns)",
        a.out.display(),
        result.samples,
        result.freq.distinct()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// analyze modes

/// Parses a depth list: "a..b" (inclusive) or a comma list.
fn parse_layers(text: &str) -> Result<Vec<usize>> {
    let bad = |_| Error::InvalidArgument(format!("bad --layers '{text}'"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(bad)?;
        let hi: usize = hi.trim().parse().map_err(bad)?;
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty --layers range '{text}'")));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(|s| s.trim().parse::<usize>().map_err(bad)).collect()
}

fn cmd_gp_depth(a: GpDepthArgs) -> Result<()> {
    let layers = parse_layers(&a.layers)?;
    let kind = match a.cube {
        CubeFlag::Cube01 => CubeKind::ZeroOne,
        CubeFlag::Pm1 => CubeKind::PlusMinusOne,
    };
    let inputs =
        build_input_set(a.n, kind, a.subsample.map(|m| (m, subsample_seed(a.seed))))?;
    let sweep = analytic::gp_depth_sweep(&inputs, &layers, a.sigma_w, a.sigma_b, a.samples, a.seed)?;

    let layer_list =
        layers.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
    let spec_line = format!(
        "analyze gp-depth --n {n} --layers {layer_list} --sigma-w {sw} --sigma-b {sb} \
         --cube {cube}{sub} --samples {samples} --seed {seed}",
        n = a.n,
        sw = a.sigma_w,
        sb = a.sigma_b,
        cube = match a.cube {
            CubeFlag::Cube01 => "cube01",
            CubeFlag::Pm1 => "pm1",
        },
        sub = a.subsample.map(|m| format!(" --subsample {m}")).unwrap_or_default(),
        samples = a.samples,
        seed = a.seed,
    );

    let mut body = String::from("layer,mean_entropy,p_t0\n");
    for (i, &layer) in sweep.layers.iter().enumerate() {
        let h = &sweep.hists[i];
        body.push_str(&format!(
            "{layer},{:.6},{}\n",
            estimator::mean_entropy(h)?,
            sig12(h.probability(0))
        ));
    }
    emit_text(a.out.as_deref(), &meta_lines(&spec_line, Some(a.seed), None), &body)
}

fn cmd_laws(a: LawsArgs) -> Result<()> {
    let (name, law) = match a.law {
        LawFlag::Uniform => ("uniform", analytic::uniform_law(a.n)?),
        LawFlag::InfinitesimalBias => {
            ("infinitesimal-bias", analytic::infinitesimal_bias_law(a.n)?)
        }
    };
    let spec_line = format!("analyze laws --n {} --law {name}", a.n);
    let mut body = String::from("t,probability\n");
    for (t, &p) in law.iter().enumerate() {
        body.push_str(&format!("{t},{}\n", sig12(p)));
    }
    emit_text(a.out.as_deref(), &meta_lines(&spec_line, None, None), &body)
}

/// Reads a rank CSV back in: '#' comments skipped, one optional header line.
fn read_rank_csv(path: &Path) -> Result<RankCurve> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut points: Vec<(u64, f64)> = Vec::new();
    let mut seen_data = false;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let rank = fields.next().unwrap_or("").trim();
        let prob = fields.next().unwrap_or("").trim();
        match (rank.parse::<u64>(), prob.parse::<f64>()) {
            (Ok(r), Ok(p)) => {
                points.push((r, p));
                seen_data = true;
            }
            _ if !seen_data => {
                // Header line like "rank,probability".
                seen_data = true;
            }
            _ => {
                return Err(Error::Parse(format!(
                    "{}:{}: expected rank,probability",
                    path.display(),
                    idx + 1
                )));
            }
        }
    }
    RankCurve::from_points(&points)
}

fn cmd_zipf(a: ZipfArgs) -> Result<()> {
    let curve = read_rank_csv(&a.input)?;
    let fit = zipf_fit(&curve)?;
    let spec_line = format!("analyze zipf --in {}", a.input.display());
    let v = json!({
        "slope": fit.slope,
        "intercept": fit.intercept,
        "n_o": fit.n_o,
        "residual": fit.residual,
        "ranks_used": curve.entries().len(),
    });
    emit_json(a.out.as_deref(), meta_json(&spec_line, None, None), v)
}

fn cmd_conditions(a: ConditionsArgs) -> Result<()> {
    let tree = build_condition_tree(a.n, a.t)?;
    let spec_line = format!(
        "analyze conditions --n {} --t {} --format {}",
        a.n,
        a.t,
        match a.format {
            FormatFlag::Text => "text",
            FormatFlag::Json => "json",
        }
    );
    match a.format {
        FormatFlag::Text => {
            emit_text(a.out.as_deref(), &meta_lines(&spec_line, None, None), &tree.to_text())
        }
        FormatFlag::Json => {
            emit_json(a.out.as_deref(), meta_json(&spec_line, None, None), tree.to_json())
        }
    }
}

/// Parses a pattern literal: a 2^n-character bit string, or hex (optionally
/// 0x-prefixed).
fn parse_pattern(text: &str, n: usize) -> Result<OutputPattern> {
    let m = 1usize
        .checked_shl(n as u32)
        .filter(|_| n <= 24)
        .ok_or_else(|| Error::InvalidArgument(format!("pattern dimension {n} too large")))?;
    let s = text.trim();
    if s.len() == m && s.bytes().all(|b| b == b'0' || b == b'1') {
        return OutputPattern::from_bit_str(s);
    }
    OutputPattern::from_hex(s.strip_prefix("0x").unwrap_or(s), m)
}

fn cmd_expressivity(a: ExpressivityArgs) -> Result<()> {
    let literal = match (&a.pattern, &a.input) {
        (Some(p), None) => p.clone(),
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            text.lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .ok_or_else(|| {
                    Error::Parse(format!("{}: no pattern line found", path.display()))
                })?
                .to_string()
        }
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --pattern or --in is required".into(),
            ))
        }
    };
    let pattern = parse_pattern(&literal, a.n)?;
    if a.layers == 0 {
        return Err(Error::InvalidArgument("--layers must be >= 1".into()));
    }
    let (spec, params) = if a.layers == 1 {
        expressivity::build_one_hidden(&pattern, a.n)?
    } else {
        expressivity::build_multi_layer(&pattern, a.n, a.layers)?
    };
    if !expressivity::verify(&spec, &params, &pattern)? {
        return Err(Error::Internal(
            "compiled network failed bit-exact verification".into(),
        ));
    }
    let spec_line = format!(
        "analyze expressivity --pattern {} --n {} --layers {}",
        pattern.to_hex(),
        a.n,
        a.layers
    );
    if let Some(out) = &a.out {
        let v = expressivity::network_to_json(&spec, &params);
        emit_json(Some(out), meta_json(&spec_line, None, None), v)?;
    }
    let widths = spec
        .widths()
        .iter()
        .map(|w| w.to_string())
        .collect::<Vec<_>>()
        .join(",");
    println!(
        "pattern {} n={} t={} layers={} widths=[{}]: verified",
        pattern.to_hex(),
        a.n,
        pattern.t_value(),
        a.layers,
        widths
    );
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let kind = match a.cube {
        CubeFlag::Cube01 => CubeKind::ZeroOne,
        CubeFlag::Pm1 => CubeKind::PlusMinusOne,
    };
    let inputs = build_input_set(a.n, kind, None)?;
    let patterns = oracle::enumerate_threshold_patterns(&inputs, a.bias)?;
    let sizes = oracle::class_sizes(&patterns);
    let spec_line = format!(
        "analyze oracle --n {} --cube {}{}",
        a.n,
        match a.cube {
            CubeFlag::Cube01 => "cube01",
            CubeFlag::Pm1 => "pm1",
        },
        if a.bias { " --bias" } else { "" }
    );
    let mut body = String::from("t,count\n");
    for (t, c) in &sizes {
        body.push_str(&format!("{t},{c}\n"));
    }
    body.push_str(&format!("# total: {}\n", patterns.len()));
    emit_text(a.out.as_deref(), &meta_lines(&spec_line, None, None), &body)
}
