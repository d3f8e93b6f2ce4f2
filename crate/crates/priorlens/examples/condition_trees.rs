//! Builds the decision tree that maps sorted weight magnitudes to a sign
//! assignment achieving a requested T-value, prints it, and then stress-tests
//! it: for random magnitude vectors the routed signature must always produce
//! a weight vector with exactly the requested count of positive vertices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use priorlens::conditions::{build_condition_tree, t_of_weights};

fn main() -> priorlens::Result<()> {
    let (n, t) = (5usize, 4u64);
    let tree = build_condition_tree(n, t)?;
    println!("conditions on sorted magnitudes a1 < a2 < ... < a{n} for T = {t}:\n");
    println!("{}", tree.to_text());

    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let trials = 100_000;
    for _ in 0..trials {
        let mut a: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z.abs() + 1e-12
            })
            .collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let sigma = tree.route(&a)?;
        let w = sigma.apply(&a)?;
        let got = t_of_weights(&w)?;
        assert_eq!(got, t, "{sigma} on {a:?} gave T = {got}");
    }
    println!("routed {trials} random magnitude vectors; every one landed on T = {t}");
    Ok(())
}
