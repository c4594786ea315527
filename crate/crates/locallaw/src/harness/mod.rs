//! Monte Carlo verification harness: reduces the probabilistic local-law
//! statements to measurable statistics with stochastic-domination verdicts
//! and scaling-exponent fits.

mod delocalization;
mod domination;
mod entrywise;
mod fluctuation;
mod isotropic;
mod large_deviation;
mod outside;
mod rigidity;
mod scaling;
mod stability;

pub use delocalization::{experiment_delocalization, DelocalizationParams};
pub use domination::{
    estimate_domination, Consistency, DominationSample, DominationTable, DominationVerdict,
};
pub use entrywise::{experiment_entrywise, EntrywiseParams};
pub use fluctuation::{experiment_fluctuation_averaging, FluctuationParams};
pub use isotropic::{experiment_isotropic, IsotropicParams};
pub use large_deviation::{experiment_large_deviation, LargeDeviationParams, LdeKind};
pub use outside::{experiment_outside, OutsideParams};
pub use rigidity::{experiment_rigidity, RigidityParams};
pub use scaling::ScalingFit;
pub use stability::{check_stability_lemma, experiment_stability, StabilityMargin, StabilityParams};

use crate::ensembles::{
    generalized_wigner, sample_covariance, EnsembleKind, EnsembleSpec, EntryDistribution,
    VarianceProfile,
};
use crate::error::Result;
use crate::laws::C64;
use crate::linalg::{EntryMatrix, HermitianMatrix};
use crate::rng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

/// One metric value at one spectral parameter (z fields zero when the
/// metric has no spectral argument).
#[derive(Debug, Clone, Serialize)]
pub struct MetricRow {
    pub z_re: f64,
    pub z_im: f64,
    pub metric: String,
    pub value: f64,
}

impl MetricRow {
    pub fn at(z_re: f64, z_im: f64, metric: impl Into<String>, value: f64) -> MetricRow {
        MetricRow { z_re, z_im, metric: metric.into(), value }
    }

    pub fn scalar(metric: impl Into<String>, value: f64) -> MetricRow {
        MetricRow { z_re: 0.0, z_im: 0.0, metric: metric.into(), value }
    }
}

/// Everything recorded about one trial; reproducible from (spec, seed).
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub phi: f64,
    pub rows: Vec<MetricRow>,
}

/// z-dependent random control quantities of one (trial, z).
#[derive(Debug, Clone)]
pub struct ControlDiagnostics {
    /// max entrywise deviation |R_{mu nu} - delta m|
    pub lambda: f64,
    /// max off-diagonal entry |R_{mu nu}|
    pub lambda_o: f64,
    /// |m_R - m_phi|
    pub theta: f64,
    /// sqrt((Im m_phi + Theta)/(N eta))
    pub psi_theta: f64,
}

/// Aggregated result of one experiment.
#[derive(Debug)]
pub struct ExperimentOutput {
    pub experiment: String,
    pub records: Vec<TrialRecord>,
    pub fits: Vec<(String, ScalingFit)>,
    pub verdicts: Vec<(String, DominationVerdict)>,
    pub summaries: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl ExperimentOutput {
    pub fn new(experiment: impl Into<String>) -> Self {
        ExperimentOutput {
            experiment: experiment.into(),
            records: Vec::new(),
            fits: Vec::new(),
            verdicts: Vec::new(),
            summaries: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn summary(&self, name: &str) -> Option<f64> {
        self.summaries.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn fit(&self, name: &str) -> Option<&ScalingFit> {
        self.fits.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn verdict(&self, name: &str) -> Option<&DominationVerdict> {
        self.verdicts.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    /// Deterministic aggregation order: records sorted by (n, seed).
    pub fn sort_records(&mut self) {
        self.records.sort_by_key(|r| (r.n, r.seed));
    }
}

/// Builds the ensemble matrix for a trial. For sample covariance the
/// returned matrix is the factor X (M x N); for Wigner it is H itself.
pub fn build_matrix(
    kind: EnsembleKind,
    entry: EntryDistribution,
    phi: f64,
    n: usize,
    profile: Option<&VarianceProfile>,
    seed: u64,
) -> Result<(EntryMatrix, usize)> {
    match kind {
        EnsembleKind::SampleCovariance => {
            let m = ((phi * n as f64).round() as usize).max(1);
            let spec = EnsembleSpec::sample_covariance(m, n, entry, seed);
            Ok((sample_covariance(&spec)?, m))
        }
        EnsembleKind::GeneralizedWigner => {
            let spec = EnsembleSpec::wigner(n, entry, profile.cloned(), seed);
            Ok((generalized_wigner(&spec)?, n))
        }
    }
}

/// The Hermitian matrix whose spectrum the experiments probe: X*X for the
/// covariance ensemble, H itself for Wigner.
pub fn spectral_matrix(kind: EnsembleKind, matrix: &EntryMatrix) -> HermitianMatrix {
    match kind {
        EnsembleKind::SampleCovariance => matrix.gram_sample(),
        EnsembleKind::GeneralizedWigner => match matrix {
            EntryMatrix::Real(m) => HermitianMatrix::Real(m.clone()),
            EntryMatrix::Complex(m) => HermitianMatrix::Complex(m.clone()),
        },
    }
}

/// A named deterministic test-vector pair.
#[derive(Debug, Clone)]
pub struct VectorPair {
    pub family: &'static str,
    pub v: Vec<C64>,
    pub w: Vec<C64>,
}

fn unit(mut v: Vec<C64>) -> Vec<C64> {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

fn coordinate(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[i] = C64::new(1.0, 0.0);
    v
}

fn random_unit(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    unit(
        (0..n)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect(),
    )
}

fn sparse_unit(n: usize, k: usize, rng: &mut impl Rng) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    for _ in 0..k {
        let i = rng.gen_range(0..n);
        v[i] = C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    if v.iter().all(|x| x.norm_sqr() == 0.0) {
        v[0] = C64::new(1.0, 0.0);
    }
    unit(v)
}

/// The four deterministic vector families of the isotropic experiments:
/// coordinate axes, fixed random unit pairs, localized (3-sparse) vectors,
/// and the fully delocalized direction. Vectors depend only on
/// `(master_seed, n)`, never on the sampled matrix.
pub fn vector_pairs(n: usize, master_seed: u64) -> Vec<VectorPair> {
    let mut rng = rng::substream(master_seed, rng::lane("test-vectors"), n as u64);
    let e0 = coordinate(n, 0);
    let e1 = coordinate(n, 1.min(n - 1));
    let emid = coordinate(n, n / 2);
    let r1 = random_unit(n, &mut rng);
    let r2 = random_unit(n, &mut rng);
    let s1 = sparse_unit(n, 3, &mut rng);
    let s2 = sparse_unit(n, 3, &mut rng);
    let flat = unit(vec![C64::new(1.0, 0.0); n]);
    vec![
        VectorPair { family: "coordinate", v: e0.clone(), w: e0.clone() },
        VectorPair { family: "coordinate", v: e0.clone(), w: e1 },
        VectorPair { family: "coordinate", v: emid.clone(), w: emid },
        VectorPair { family: "random", v: r1.clone(), w: r1.clone() },
        VectorPair { family: "random", v: r1, w: r2 },
        VectorPair { family: "sparse", v: s1.clone(), w: s1.clone() },
        VectorPair { family: "sparse", v: s1, w: s2 },
        VectorPair { family: "flat", v: flat.clone(), w: flat.clone() },
        VectorPair { family: "flat", v: flat, w: e0 },
    ]
}

/// Deterministic parallel map over `0..count` with at most `jobs` threads;
/// the output order is by index regardless of scheduling.
pub fn parallel_map<T, F>(count: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = jobs.max(1).min(count.max(1));
    if jobs <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut gathered: Vec<Vec<(usize, T)>> = Vec::new();
    std::thread::scope(|scope| {
        let f = &f;
        let next = &next;
        let mut handles = Vec::new();
        for _ in 0..jobs {
            handles.push(scope.spawn(move || {
                let mut local: Vec<(usize, T)> = Vec::new();
                loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= count {
                        break;
                    }
                    local.push((i, f(i)));
                }
                local
            }));
        }
        for handle in handles {
            gathered.push(handle.join().expect("worker panicked"));
        }
    });
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    for chunk in gathered {
        for (i, value) in chunk {
            slots[i] = Some(value);
        }
    }
    slots.into_iter().map(|s| s.expect("all indices claimed")).collect()
}

/// Median of a slice (not necessarily sorted).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_is_order_stable() {
        let seq = parallel_map(57, 1, |i| i * i);
        let par = parallel_map(57, 4, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn vector_pairs_are_deterministic_and_unit() {
        let a = vector_pairs(64, 7);
        let b = vector_pairs(64, 7);
        assert_eq!(a.len(), 9);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.v, y.v);
            assert_eq!(x.w, y.w);
            let nv: f64 = x.v.iter().map(|c| c.norm_sqr()).sum();
            assert!((nv - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn median_basics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
