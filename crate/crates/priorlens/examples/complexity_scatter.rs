//! Relates sampling probability to description length: buckets the patterns
//! a perceptron produces by their compression-based complexity estimate and
//! shows the mean log-probability falling as complexity grows — frequent
//! patterns are simple ones.

use std::collections::BTreeMap;

use priorlens::complexity::{k_lz, kbool_bound_recursive};
use priorlens::estimator::rank_curve;
use priorlens::hypercube::{build_input_set, CubeKind};
use priorlens::netsample::{run_campaign, NetSpec, WeightLaw};

fn main() -> priorlens::Result<()> {
    let n = 7usize;
    let samples = 1_000_000;
    let inputs = build_input_set(n, CubeKind::ZeroOne, None)?;
    let spec = NetSpec::perceptron(n, WeightLaw::gaussian(1.0))?;
    let result = run_campaign(&spec, &inputs, samples, 21, 8)?;
    let curve = rank_curve(&result.freq, 2);

    // Bucket retained patterns by rounded k_lz and average log10 p in each.
    let mut buckets: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for row in curve.entries() {
        let k = k_lz(&row.pattern)?;
        let bucket = (k / 8.0).round() as i64;
        let slot = buckets.entry(bucket).or_insert((0.0, 0));
        slot.0 += row.probability.log10();
        slot.1 += 1;
    }

    println!(
        "{} draws, {} retained patterns, bucketed by compression estimate\n",
        samples,
        curve.entries().len()
    );
    println!("{:>12}  {:>9}  {:>16}", "k_lz bucket", "patterns", "mean log10 prob");
    for (bucket, (sum, count)) in &buckets {
        println!(
            "{:>12}  {count:>9}  {:>16.3}",
            format!("~{}", bucket * 8),
            sum / *count as f64
        );
    }

    // The same envelope in terms of an exact combinatorial bound: complexity
    // grows with min(t, 2^n - t), and the most probable patterns sit at the
    // extremes.
    let top = &curve.entries()[0];
    let bottom = curve.entries().last().unwrap();
    println!(
        "\nmost frequent pattern:  p = {:.2e}, description bound {:>4} connectives",
        top.probability,
        kbool_bound_recursive(n as u32, top.pattern.t_value())
    );
    println!(
        "least frequent retained: p = {:.2e}, description bound {:>4} connectives",
        bottom.probability,
        kbool_bound_recursive(n as u32, bottom.pattern.t_value())
    );
    Ok(())
}
