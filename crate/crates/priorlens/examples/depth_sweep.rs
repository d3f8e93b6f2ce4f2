//! Tracks the infinite-width ReLU prior across depth on the 7-cube: the
//! kernel recursion gives the exact Gaussian process at each depth, and
//! common-random-number sampling from consecutive kernels shows the mean
//! pattern entropy falling monotonically while P(T = 0) climbs.

use priorlens::analytic::gp_depth_sweep;
use priorlens::estimator::mean_entropy;
use priorlens::hypercube::{build_input_set, CubeKind};

fn main() -> priorlens::Result<()> {
    let n = 7usize;
    let layers: Vec<usize> = (0..=8).collect();
    let inputs = build_input_set(n, CubeKind::ZeroOne, None)?;
    let sweep = gp_depth_sweep(&inputs, &layers, 1.0, 0.0, 50_000, 6)?;

    println!("infinite-width ReLU network on the {n}-cube, 50000 draws per depth\n");
    println!("{:>6}  {:>13}  {:>9}  {:>20}", "depth", "mean entropy", "P(T=0)", "entropy drop (se)");
    for (k, depth) in sweep.layers.iter().enumerate() {
        let h = &sweep.hists[k];
        let step = if k + 1 < sweep.layers.len() {
            format!("{:+.5} ({:.5})", -sweep.step_mean[k], sweep.step_se[k])
        } else {
            String::new()
        };
        println!(
            "{depth:>6}  {:>13.5}  {:>9.5}  {:>20}",
            mean_entropy(h)?,
            h.probability(0),
            step
        );
    }
    println!(
        "\nEvery per-depth drop is many standard errors wide: depth strengthens \
         the\npreference for low-entropy patterns even at zero bias."
    );
    Ok(())
}
