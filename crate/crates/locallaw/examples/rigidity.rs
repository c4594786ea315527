//! Eigenvalue rigidity: the gap |lambda_alpha - gamma_alpha|, its
//! edge-adapted normalization, and the N^{-2/3} edge-fluctuation scaling.
//!
//! Run: `cargo run --release --example rigidity`

use locallaw::ensembles::EntryDistribution;
use locallaw::harness::{experiment_rigidity, RigidityParams};

fn main() {
    for phi in [1.0, 2.0] {
        let out = experiment_rigidity(&RigidityParams {
            entry: EntryDistribution::RealGaussian,
            phi,
            n_ladder: vec![128, 256, 512, 1024],
            trials: 20,
            alpha_edge: vec![1, 2, 5, 10],
            eps_grid: vec![0.25, 0.5],
            seed: 13,
            jobs: 1,
        })
        .unwrap();
        println!("phi = {phi}:");
        let fit = out.fit("top_edge_vs_n").unwrap();
        println!("  |lambda_1 - gamma_+| exponent: {:.3} +- {:.3} (theory: -2/3)", fit.exponent, fit.stderr);
        if let Some(fit) = out.fit("bottom_edge_vs_n") {
            println!("  |lambda_K - gamma_-| exponent: {:.3} +- {:.3} (theory: -2/3)", fit.exponent, fit.stderr);
        }
        println!(
            "  bulk normalized statistic median: {:.3}",
            out.summary("bulk_normalized_median").unwrap()
        );
        if let Some(v) = out.verdict("edge_rigidity") {
            println!(
                "  edge statistic domination: {}",
                if v.is_consistent() { "consistent" } else { "inconsistent" }
            );
        }
    }
}
