//! Ranks the patterns a sampled perceptron produces by frequency and fits a
//! power law to the rank-probability curve. The fitted slope sits well above
//! -1 and the intercept extrapolates the number of reachable patterns.

use priorlens::complexity::k_lz;
use priorlens::estimator::{rank_curve, zipf_fit};
use priorlens::hypercube::{build_input_set, CubeKind};
use priorlens::netsample::{run_campaign, NetSpec, WeightLaw};

fn main() -> priorlens::Result<()> {
    let n = 7usize;
    let samples = 2_000_000;
    let inputs = build_input_set(n, CubeKind::ZeroOne, None)?;
    let spec = NetSpec::perceptron(n, WeightLaw::gaussian(1.0))?;
    let result = run_campaign(&spec, &inputs, samples, 14, 8)?;

    let curve = rank_curve(&result.freq, 2);
    println!(
        "{} draws produced {} distinct patterns; {} survive the cutoff of 2\n",
        samples,
        result.freq.distinct(),
        curve.entries().len()
    );

    println!("{:>5}  {:>11}  {:>4}  {:>7}  pattern (hex)", "rank", "probability", "t", "k_lz");
    for row in curve.entries().iter().take(10) {
        println!(
            "{:>5}  {:>11.3e}  {:>4}  {:>7.2}  {}",
            row.rank,
            row.probability,
            row.pattern.t_value(),
            k_lz(&row.pattern)?,
            row.pattern.to_hex()
        );
    }

    let fit = zipf_fit(&curve)?;
    println!("\nleast-squares fit of log10 p against log10 rank over {} ranks:", curve.entries().len());
    println!("  slope     = {:+.4}   (a pure Zipf law would give -1)", fit.slope);
    println!("  intercept = {:+.4}", fit.intercept);
    println!(
        "  extrapolated pattern count N_O = {:.3e}  (2^2^n = {:.3e} patterns exist)",
        fit.n_o,
        2f64.powi(1 << n)
    );
    Ok(())
}
