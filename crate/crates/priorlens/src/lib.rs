//! priorlens measures and predicts the prior distribution over Boolean
//! functions induced by randomly initialized neural networks.
//!
//! The crate has three faces that cross-validate each other:
//!
//! * **Sampling** ([`netsample`], [`estimator`]): high-throughput seeded
//!   Monte-Carlo campaigns over perceptrons and fully connected nets,
//!   reduced to T-histograms, pattern frequency tables, rank curves and
//!   Zipf/N_O fits, with chi-square tests to compare them.
//! * **Analytic laws** ([`analytic`], [`complexity`]): closed-form T-laws,
//!   exact special-pattern probabilities, Boolean-complexity bounds, the
//!   Lempel-Ziv estimator, and infinite-width kernel recursions (ReLU closed
//!   form, tanh quadrature) with depth sweeps and regime classification.
//! * **Exact structure** ([`oracle`], [`conditions`], [`expressivity`]):
//!   rational-arithmetic LP enumeration of threshold patterns, magnitude
//!   condition trees that tile weight space by output pattern, and a
//!   compiler from arbitrary truth tables to exact network weights.
//!
//! Start with [`hypercube::build_input_set`] and [`netsample::run_campaign`],
//! or run the `priorlens` binary: `priorlens sample --arch perceptron --n 7
//! --dist gaussian --samples 1000000 --seed 1 --out out/`.

pub mod error;
pub mod hypercube;
pub mod complexity;
pub mod estimator;
pub mod netsample;
pub mod analytic;
pub(crate) mod ratlp;
pub mod oracle;
pub mod conditions;
pub mod expressivity;
pub mod cli;

pub use error::{Error, Result};
