//! Stability of the self-consistent equation: a transform that nearly
//! solves it along the vertical lattice above z must lie close to the
//! deterministic solution, with a sqrt(kappa + eta + delta) improvement.
//!
//! Run: `cargo run --release --example stability`

use locallaw::ensembles::EntryDistribution;
use locallaw::harness::{experiment_stability, StabilityParams};

fn main() {
    let base = StabilityParams {
        entry: EntryDistribution::RealGaussian,
        phi: 1.0,
        n: 300,
        trials: 15,
        e: 2.0,
        eta: 0.05,
        lattice_spacing: 0.01,
        seed: 29,
        jobs: 1,
    };
    for (label, e) in [("bulk E = 2.0", 2.0), ("outside E = 4.5 (kappa = 0.5)", 4.5)] {
        let out = experiment_stability(&StabilityParams { e, ..base.clone() }).unwrap();
        println!("{label}:");
        println!(
            "  margin |m_R - m_phi| sqrt(kappa+eta+delta)/delta: median {:.3}",
            out.summary("margin_median").unwrap()
        );
        println!(
            "  margin <= 100 in {:.0}% of trials",
            100.0 * out.summary("margin_below_100_fraction").unwrap()
        );
    }
}
