//! Compiles a truth table into an exact ReLU network, two ways: a single
//! hidden layer with one unit per clause, and a deeper accumulator form
//! that spreads the same clauses across several layers. Both are verified
//! bit-for-bit against the pattern on every vertex.

use priorlens::expressivity::{build_multi_layer, build_one_hidden, network_to_json, verify};
use priorlens::hypercube::OutputPattern;

fn main() -> priorlens::Result<()> {
    // Parity of three bits: the classic pattern no single threshold unit
    // can produce (its T-value is 4 but no weight vector realizes it).
    let pattern = OutputPattern::from_bit_str("01101001")?;
    let n = 3usize;
    println!(
        "target pattern {} (hex {}), t = {}\n",
        pattern.to_bit_str(),
        pattern.to_hex(),
        pattern.t_value()
    );

    let (flat_spec, flat_params) = build_one_hidden(&pattern, n)?;
    println!(
        "single hidden layer: widths {:?}, verified = {}",
        flat_spec.widths(),
        verify(&flat_spec, &flat_params, &pattern)?
    );

    for layers in [2usize, 4] {
        let (spec, params) = build_multi_layer(&pattern, n, layers)?;
        println!(
            "{layers} hidden layers:   widths {:?}, verified = {}",
            spec.widths(),
            verify(&spec, &params, &pattern)?
        );
        if layers == 2 {
            let json = network_to_json(&spec, &params);
            println!("\nnetwork JSON (first 200 chars):");
            let text = serde_json::to_string(&json).unwrap();
            println!("  {}...", &text[..text.len().min(200)]);
        }
    }
    println!(
        "\nThe deep form trades width for depth: hidden width n + c + 1 \
         carries c\nclauses per layer through a running accumulator."
    );
    Ok(())
}
