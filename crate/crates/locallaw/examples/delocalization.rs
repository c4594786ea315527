//! Isotropic delocalization: bulk eigenvectors have no preferred direction.
//! Overlaps with fixed unit vectors stay at scale 1/N, while the entries
//! oscillate (large absolute sum, cancelling signed sum).
//!
//! Run: `cargo run --release --example delocalization`

use locallaw::ensembles::{EnsembleKind, EntryDistribution};
use locallaw::harness::{experiment_delocalization, DelocalizationParams};

fn main() {
    let n = 512;
    let out = experiment_delocalization(&DelocalizationParams {
        kind: EnsembleKind::SampleCovariance,
        entry: EntryDistribution::ComplexGaussian,
        phi: 1.0,
        n,
        trials: 40,
        alphas: vec![n / 5, 2 * n / 5, 3 * n / 5, 4 * n / 5],
        epsilon: 0.05,
        seed: 17,
        jobs: 1,
    })
    .unwrap();

    let threshold = (n as f64).powf(0.2);
    println!("N = {n}, threshold N^0.2 = {threshold:.3}");
    println!(
        "overlaps N|<u,v>|^2 below threshold: {:.1}%",
        100.0 * out.summary("overlap_below_threshold_fraction").unwrap()
    );
    println!(
        "signed sums |sum u_i| below threshold: {:.1}%",
        100.0 * out.summary("signed_sum_below_threshold_fraction").unwrap()
    );
    println!(
        "oscillation sum median sum|u_i|/sqrt(N): {:.4} (complex haar value: 0.886)",
        out.summary("osc_abs_sum_median").unwrap()
    );
    println!(
        "coordinate maximum median N max|u_i|^2: {:.3} (ln N = {:.3})",
        out.summary("coord_max_median").unwrap(),
        (n as f64).ln()
    );
}
