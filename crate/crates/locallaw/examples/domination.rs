//! The stochastic-domination estimator on analytic calibration families and
//! on large-deviation test forms.
//!
//! Run: `cargo run --release --example domination`

use locallaw::ensembles::EntryDistribution;
use locallaw::harness::{
    estimate_domination, experiment_large_deviation, DominationSample, LargeDeviationParams,
    LdeKind,
};

fn triple(f: impl Fn(usize, f64) -> f64) -> Vec<DominationSample> {
    let mut out = Vec::new();
    for &n in &[128usize, 512, 2048] {
        for t in 0..40 {
            let zeta = 0.5 + 0.01 * t as f64;
            out.push(DominationSample { n, xi: f(n, zeta), zeta });
        }
    }
    out
}

fn main() {
    let eps = [0.1, 0.25, 0.5];
    println!("calibration triples (expected: consistent, consistent, inconsistent):");
    for (name, samples) in [
        ("xi = 0          ", triple(|_, _| 0.0)),
        ("xi = zeta       ", triple(|_, z| z)),
        ("xi = sqrt(N)zeta", triple(|n, z| (n as f64).sqrt() * z)),
    ] {
        let v = estimate_domination(&samples, &eps).unwrap();
        println!(
            "  {name} -> {}",
            if v.is_consistent() { "consistent" } else { "inconsistent" }
        );
    }

    println!("\nlarge-deviation forms (xi = |form|, zeta = coefficient l2-norm):");
    for kind in [LdeKind::Linear, LdeKind::Bilinear, LdeKind::OffDiagonal] {
        let out = experiment_large_deviation(&LargeDeviationParams {
            kind,
            entry: EntryDistribution::Rademacher,
            sizes: vec![64, 256, 1024],
            trials: 30,
            eps_grid: vec![0.25, 0.5],
            seed: 23,
        })
        .unwrap();
        let v = out.verdict("form_vs_norm").unwrap();
        println!(
            "  {kind:?}: {}",
            if v.is_consistent() { "consistent" } else { "inconsistent" }
        );
        for t in &v.tables {
            let fr: Vec<String> = t
                .fractions
                .iter()
                .map(|(n, f, _)| format!("N={n}: {f:.2}"))
                .collect();
            println!("    eps = {:<4} exceedance {}", t.eps, fr.join(", "));
        }
    }
}
