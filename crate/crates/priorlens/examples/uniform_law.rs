//! Samples sign patterns of a bias-free perceptron on the 7-cube and checks
//! the histogram of T = #{vertices mapped to 1} against the exact law: every
//! value 0 <= t < 2^n is equally likely, and t = 2^n is unreachable.
//!
//! The same flat histogram appears for any sign-symmetric weight
//! distribution; rerun with `WeightLaw::uniform(1.0)` to see it.

use priorlens::analytic::uniform_law;
use priorlens::estimator::chi_square_uniformity;
use priorlens::hypercube::{build_input_set, CubeKind};
use priorlens::netsample::{run_campaign, NetSpec, WeightLaw};

fn main() -> priorlens::Result<()> {
    let n = 7usize;
    let m = 1usize << n;
    let samples = 400_000;

    let inputs = build_input_set(n, CubeKind::ZeroOne, None)?;
    let spec = NetSpec::perceptron(n, WeightLaw::gaussian(1.0))?;
    let result = run_campaign(&spec, &inputs, samples, 1, 8)?;

    let law = uniform_law(n as u32)?;
    println!("perceptron on the {n}-cube, {samples} Gaussian draws\n");
    println!("{:>5}  {:>10}  {:>10}", "t", "observed", "exact");
    for t in (0..=m).step_by(m / 8) {
        println!("{t:>5}  {:>10.6}  {:>10.6}", result.thist.probability(t), law[t]);
    }

    let (stat, p) = chi_square_uniformity(&result.thist, n)?;
    println!("\nchi-square against the flat law over t = 0..{m}:");
    println!("  statistic = {stat:.1} on {} degrees of freedom, p = {p:.4}", m - 1);
    println!(
        "  t = {m} (the all-ones pattern) observed {} times; it needs a \
         positive threshold,\n  which a bias-free unit cannot produce.",
        result.thist.count(m)
    );
    Ok(())
}
