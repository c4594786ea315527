//! Outside-spectrum law at eta = 0: the error against the transform decays
//! like kappa^{-1/4} K^{-1/2} above the upper edge.
//!
//! Run: `cargo run --release --example outside`

use locallaw::ensembles::{EnsembleKind, EntryDistribution};
use locallaw::harness::{experiment_outside, OutsideParams};

fn main() {
    let out = experiment_outside(&OutsideParams {
        kind: EnsembleKind::SampleCovariance,
        entry: EntryDistribution::RealGaussian,
        phi: 1.0,
        n_ladder: vec![128, 256, 512, 1024],
        kappa_grid: vec![0.1, 0.2, 0.4, 0.8],
        fixed_kappa: 0.5,
        trials: 12,
        seed: 11,
        jobs: 1,
    })
    .unwrap();

    println!("max error at eta = 0: {:.4}", out.summary("max_error").unwrap());
    let kfit = out.fit("error_vs_k").unwrap();
    println!("K-scaling exponent at kappa = 0.5: {:.3} +- {:.3} (theory: -1/2)", kfit.exponent, kfit.stderr);
    let kappa_fit = out.fit("error_vs_kappa").unwrap();
    println!(
        "kappa-scaling exponent at N = 1024: {:.3} +- {:.3} (theory: -1/4)",
        kappa_fit.exponent, kappa_fit.stderr
    );
}
