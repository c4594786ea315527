//! Reproducible generation of sample covariance factors X and generalized
//! Wigner matrices H.
//!
//! Entries of X are standardized variables scaled so that E|X_{i mu}|^2 is
//! exactly (NM)^{-1/2}; Wigner matrices are Hermitian with independent
//! upper-triangle entries of variance S_ij given by a row-stochastic
//! variance profile.

use crate::error::{Error, Result};
use crate::laws::C64;
use crate::linalg::EntryMatrix;
use crate::rng;
use faer::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt;

/// Standardized entry laws (mean 0, variance 1, all moments finite).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryDistribution {
    /// Independent real and imaginary parts, each N(0, 1/2).
    ComplexGaussian,
    RealGaussian,
    /// +-1 with probability 1/2.
    Rademacher,
    /// Uniform on [-sqrt(3), sqrt(3)].
    StandardizedUniform,
}

impl EntryDistribution {
    pub fn is_real(&self) -> bool {
        !matches!(self, EntryDistribution::ComplexGaussian)
    }

    /// Analytic standardized fourth moment E|xi|^4.
    pub fn fourth_moment(&self) -> f64 {
        match self {
            EntryDistribution::ComplexGaussian => 2.0,
            EntryDistribution::RealGaussian => 3.0,
            EntryDistribution::Rademacher => 1.0,
            EntryDistribution::StandardizedUniform => 1.8,
        }
    }

    /// One standardized draw. Real laws return a zero imaginary part.
    pub fn sample(&self, rng: &mut ChaCha12Rng) -> C64 {
        match self {
            EntryDistribution::ComplexGaussian => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            EntryDistribution::RealGaussian => {
                C64::new(StandardNormal.sample(rng), 0.0)
            }
            EntryDistribution::Rademacher => {
                C64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)
            }
            EntryDistribution::StandardizedUniform => {
                C64::new(rng.gen_range(-1.0f64..1.0) * 3.0f64.sqrt(), 0.0)
            }
        }
    }

    /// Real standardized draw (used for Wigner diagonals, which must be
    /// real; the complex law degrades to a real gaussian there).
    pub fn sample_real(&self, rng: &mut ChaCha12Rng) -> f64 {
        match self {
            EntryDistribution::ComplexGaussian | EntryDistribution::RealGaussian => {
                StandardNormal.sample(rng)
            }
            EntryDistribution::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDistribution::StandardizedUniform => rng.gen_range(-1.0f64..1.0) * 3.0f64.sqrt(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "complex-gaussian" => Ok(EntryDistribution::ComplexGaussian),
            "real-gaussian" => Ok(EntryDistribution::RealGaussian),
            "rademacher" => Ok(EntryDistribution::Rademacher),
            "standardized-uniform" => Ok(EntryDistribution::StandardizedUniform),
            other => Err(Error::invalid(format!(
                "unknown entry distribution '{other}' (expected complex-gaussian, real-gaussian, rademacher, standardized-uniform)"
            ))),
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EntryDistribution::ComplexGaussian => "complex-gaussian",
            EntryDistribution::RealGaussian => "real-gaussian",
            EntryDistribution::Rademacher => "rademacher",
            EntryDistribution::StandardizedUniform => "standardized-uniform",
        };
        f.write_str(s)
    }
}

/// Profile validation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMode {
    /// 1/(C N) <= S_ij <= C/N together with unit row sums.
    Strict,
    /// Only the upper bound S_ij <= C/N together with unit row sums.
    RelaxedLowerBound,
}

/// Symmetric variance profile with unit row sums.
#[derive(Debug, Clone)]
pub struct VarianceProfile {
    n: usize,
    s: Vec<f64>,
    pub mode: ProfileMode,
}

impl VarianceProfile {
    pub fn new(n: usize, s: Vec<f64>, mode: ProfileMode) -> Result<Self> {
        if s.len() != n * n {
            return Err(Error::invalid("profile array has wrong size"));
        }
        let profile = VarianceProfile { n, s, mode };
        profile.validate(8.0)?;
        Ok(profile)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n + j]
    }

    /// Row sums exactly 1 (to 1e-12), symmetry, nonnegativity, and the
    /// mode-dependent bounds with constant `c`.
    pub fn validate(&self, c: f64) -> Result<()> {
        let n = self.n;
        let nf = n as f64;
        for i in 0..n {
            let mut sum = 0.0;
            for j in 0..n {
                let v = self.get(i, j);
                if v < 0.0 {
                    return Err(Error::invalid(format!("negative variance S[{i},{j}]")));
                }
                if (v - self.get(j, i)).abs() > 1e-14 {
                    return Err(Error::invalid(format!("profile not symmetric at ({i},{j})")));
                }
                if v > c / nf {
                    return Err(Error::invalid(format!(
                        "S[{i},{j}] = {v} exceeds C/N = {}",
                        c / nf
                    )));
                }
                if self.mode == ProfileMode::Strict && v < 1.0 / (c * nf) {
                    return Err(Error::invalid(format!(
                        "S[{i},{j}] = {v} below 1/(C N) = {}",
                        1.0 / (c * nf)
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "row {i} of the variance profile sums to {sum}, not 1"
                )));
            }
        }
        Ok(())
    }
}

/// Profile builders exposed to configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Flat,
    /// Convex mix (1-t)/N + t P/N with P a random symmetric doubly
    /// stochastic perturbation (entries within [1/2, 2] before scaling).
    ConvexMix { t: f64 },
}

/// Build a variance profile of the requested kind.
pub fn build_profile(kind: ProfileKind, n: usize, seed: u64) -> Result<VarianceProfile> {
    if n == 0 {
        return Err(Error::invalid("profile dimension must be positive"));
    }
    let nf = n as f64;
    match kind {
        ProfileKind::Flat => {
            VarianceProfile::new(n, vec![1.0 / nf; n * n], ProfileMode::Strict)
        }
        ProfileKind::ConvexMix { t } => {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::invalid(format!("mix parameter t = {t} outside [0, 1)")));
            }
            let mut rng = rng::substream(seed, rng::lane("variance-profile"), 0);
            // symmetric positive seed matrix with entries in [1/2, 2]
            let mut q = vec![0.0f64; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = rng.gen_range(0.5f64..2.0);
                    q[i * n + j] = v;
                    q[j * n + i] = v;
                }
            }
            // symmetric Sinkhorn scaling d_i q_ij d_j towards row sums 1
            let mut d = vec![1.0f64; n];
            for _ in 0..500 {
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    let mut sum = 0.0;
                    for j in 0..n {
                        sum += d[i] * q[i * n + j] * d[j];
                    }
                    worst = worst.max((sum - 1.0).abs());
                    d[i] /= sum.sqrt();
                }
                if worst < 1e-15 {
                    break;
                }
            }
            let mut s = vec![0.0f64; n * n];
            for i in 0..n {
                for j in 0..n {
                    s[i * n + j] = (1.0 - t) / nf + t * d[i] * q[i * n + j] * d[j];
                }
            }
            // make the row sums exactly 1 at working precision by a final
            // symmetric correction spread over the diagonal
            for i in 0..n {
                let sum: f64 = (0..n).map(|j| s[i * n + j]).sum();
                s[i * n + i] += 1.0 - sum;
            }
            VarianceProfile::new(n, s, ProfileMode::Strict)
        }
    }
}

/// Which matrix family to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    SampleCovariance,
    GeneralizedWigner,
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleKind::SampleCovariance => "sample-covariance",
            EnsembleKind::GeneralizedWigner => "generalized-wigner",
        })
    }
}

impl EnsembleKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sample-covariance" => Ok(EnsembleKind::SampleCovariance),
            "generalized-wigner" => Ok(EnsembleKind::GeneralizedWigner),
            other => Err(Error::invalid(format!(
                "unknown ensemble kind '{other}' (expected sample-covariance or generalized-wigner)"
            ))),
        }
    }
}

/// Full description of a random matrix ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub m: usize,
    pub n: usize,
    pub entry: EntryDistribution,
    /// Wigner only; `None` means the flat profile.
    pub profile: Option<VarianceProfile>,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn sample_covariance(m: usize, n: usize, entry: EntryDistribution, seed: u64) -> Self {
        EnsembleSpec { kind: EnsembleKind::SampleCovariance, m, n, entry, profile: None, seed }
    }

    pub fn wigner(n: usize, entry: EntryDistribution, profile: Option<VarianceProfile>, seed: u64) -> Self {
        EnsembleSpec { kind: EnsembleKind::GeneralizedWigner, m: n, n, entry, profile, seed }
    }

    pub fn phi(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// Human-readable flat key/value form (documented keys: kind, M, N,
    /// entry, profile, seed).
    pub fn to_config_string(&self) -> String {
        let profile = match &self.profile {
            None => "flat".to_string(),
            Some(p) => format!("custom({}x{})", p.n(), p.n()),
        };
        format!(
            "kind = {}\nM = {}\nN = {}\nentry = {}\nprofile = {}\nseed = {}\n",
            self.kind, self.m, self.n, self.entry, profile, self.seed
        )
    }
}

/// Entry scale of X: E|X_{i mu}|^2 = 1/sqrt(NM), held exactly by
/// construction (the generator multiplies standardized draws by
/// (NM)^{-1/4}).
pub fn covariance_entry_scale(m: usize, n: usize) -> f64 {
    ((n as f64) * (m as f64)).powf(-0.25)
}

/// Sample covariance factor X (M x N), deterministic given `spec`.
pub fn sample_covariance(spec: &EnsembleSpec) -> Result<EntryMatrix> {
    if spec.kind != EnsembleKind::SampleCovariance {
        return Err(Error::Precondition(
            "sample_covariance requires kind = sample-covariance".into(),
        ));
    }
    let (m, n) = (spec.m, spec.n);
    if m == 0 || n == 0 {
        return Err(Error::invalid("dimensions must be positive"));
    }
    if m.saturating_mul(n) > 64_000_000 {
        return Err(Error::Resource(format!(
            "matrix of {m} x {n} entries exceeds the generation budget"
        )));
    }
    let scale = covariance_entry_scale(m, n);
    let mut rng = rng::substream(spec.seed, rng::lane("sample-covariance"), 0);
    if spec.entry.is_real() {
        let mut x = Mat::<f64>::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                x[(i, j)] = spec.entry.sample(&mut rng).re * scale;
            }
        }
        Ok(EntryMatrix::Real(x))
    } else {
        let mut x = Mat::<c64>::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                x[(i, j)] = spec.entry.sample(&mut rng) * scale;
            }
        }
        Ok(EntryMatrix::Complex(x))
    }
}

/// Generalized Wigner matrix H = H* (N x N) with Var H_ij = S_ij.
pub fn generalized_wigner(spec: &EnsembleSpec) -> Result<EntryMatrix> {
    if spec.kind != EnsembleKind::GeneralizedWigner {
        return Err(Error::Precondition(
            "generalized_wigner requires kind = generalized-wigner".into(),
        ));
    }
    let n = spec.n;
    let flat;
    let profile = match &spec.profile {
        Some(p) => {
            if p.n() != n {
                return Err(Error::invalid(format!(
                    "profile dimension {} does not match N = {n}",
                    p.n()
                )));
            }
            p
        }
        None => {
            flat = build_profile(ProfileKind::Flat, n, spec.seed)?;
            &flat
        }
    };
    let mut rng = rng::substream(spec.seed, rng::lane("generalized-wigner"), 0);
    if spec.entry.is_real() {
        let mut h = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let sd = profile.get(i, j).sqrt();
                let v = spec.entry.sample(&mut rng).re * sd;
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(EntryMatrix::Real(h))
    } else {
        let mut h = Mat::<c64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let sd = profile.get(i, j).sqrt();
                if i == j {
                    // diagonal entries are real for a Hermitian matrix
                    h[(i, i)] = c64::new(spec.entry.sample_real(&mut rng) * sd, 0.0);
                } else {
                    let v = spec.entry.sample(&mut rng) * sd;
                    h[(i, j)] = v;
                    h[(j, i)] = v.conj();
                }
            }
        }
        Ok(EntryMatrix::Complex(h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{decompose, eigenvalues_only};

    #[test]
    fn seed_determinism_bit_identical() {
        let spec = EnsembleSpec::sample_covariance(17, 23, EntryDistribution::ComplexGaussian, 99);
        let a = sample_covariance(&spec).unwrap();
        let b = sample_covariance(&spec).unwrap();
        for i in 0..17 {
            for j in 0..23 {
                assert_eq!(a.get(i, j), b.get(i, j));
            }
        }
    }

    #[test]
    fn entry_distribution_moments() {
        let trials = 1_000_000usize;
        for dist in [
            EntryDistribution::ComplexGaussian,
            EntryDistribution::RealGaussian,
            EntryDistribution::Rademacher,
            EntryDistribution::StandardizedUniform,
        ] {
            let mut rng = rng::substream(5, 1, 0);
            let mut sum = C64::new(0.0, 0.0);
            let mut sum2 = 0.0;
            let mut sum4 = 0.0;
            for _ in 0..trials {
                let x = dist.sample(&mut rng);
                sum += x;
                sum2 += x.norm_sqr();
                sum4 += x.norm_sqr() * x.norm_sqr();
            }
            let mean = sum / trials as f64;
            let var = sum2 / trials as f64;
            let m4 = sum4 / trials as f64;
            assert!(mean.norm() < 5e-3, "{dist}: mean {mean}");
            assert!((var - 1.0).abs() < 5e-3, "{dist}: var {var}");
            assert!(
                (m4 / dist.fourth_moment() - 1.0).abs() < 0.02,
                "{dist}: fourth moment {m4} vs {}",
                dist.fourth_moment()
            );
        }
    }

    #[test]
    fn covariance_mean_within_clt_band() {
        let n = 500;
        let spec = EnsembleSpec::sample_covariance(n, n, EntryDistribution::RealGaussian, 42);
        let x = sample_covariance(&spec).unwrap();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum += x.get(i, j).re;
            }
        }
        let count = (n * n) as f64;
        let entry_sd = covariance_entry_scale(n, n);
        // CLT standard error of the empirical mean of N*M entries.
        let se = entry_sd / count.sqrt();
        assert!((sum / count).abs() < 3.0 * se, "mean {} vs band {}", sum / count, 3.0 * se);
    }

    #[test]
    fn top_eigenvalue_near_upper_edge() {
        // lambda_1 of X*X concentrates near gamma_+ = 4 at phi = 1.
        let mut hits = 0;
        let n = 300;
        for seed in 0..10 {
            let spec =
                EnsembleSpec::sample_covariance(n, n, EntryDistribution::RealGaussian, seed);
            let x = sample_covariance(&spec).unwrap();
            let evals = eigenvalues_only(&x.gram_sample()).unwrap();
            let top = evals[evals.len() - 1];
            if (top - 4.0).abs() < 0.2 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "only {hits}/10 top eigenvalues within 0.2 of the edge");
    }

    #[test]
    fn wigner_hermitian_and_spectrum() {
        let spec = EnsembleSpec::wigner(300, EntryDistribution::ComplexGaussian, None, 7);
        let h = generalized_wigner(&spec).unwrap();
        // exact Hermiticity by construction
        for i in 0..300 {
            for j in 0..300 {
                assert_eq!(h.get(i, j), h.get(j, i).conj());
            }
        }
        let herm = match &h {
            EntryMatrix::Complex(m) => crate::linalg::HermitianMatrix::Complex(m.clone()),
            EntryMatrix::Real(m) => crate::linalg::HermitianMatrix::Real(m.clone()),
        };
        let d = decompose(&herm).unwrap();
        let inside = d
            .eigenvalues()
            .iter()
            .filter(|&&l| (-2.1..=2.1).contains(&l))
            .count();
        assert!(inside as f64 >= 0.99 * 300.0, "only {inside}/300 eigenvalues in [-2.1, 2.1]");
    }

    #[test]
    fn profiles() {
        let p = build_profile(ProfileKind::Flat, 4, 0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p.get(i, j), 0.25);
            }
        }
        let p = build_profile(ProfileKind::ConvexMix { t: 0.5 }, 100, 3).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..100 {
            let sum: f64 = (0..100).map(|j| p.get(i, j)).sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for j in 0..100 {
                lo = lo.min(100.0 * p.get(i, j));
                hi = hi.max(100.0 * p.get(i, j));
            }
        }
        assert!(lo >= 0.25, "min N S = {lo}");
        assert!(hi <= 4.0, "max N S = {hi}");
        assert!(build_profile(ProfileKind::ConvexMix { t: 1.5 }, 10, 0).is_err());
        // row sums off by 1% -> rejected
        let mut s = vec![0.25f64; 16];
        s[0] = 0.24;
        assert!(VarianceProfile::new(4, s, ProfileMode::Strict).is_err());
    }

    #[test]
    fn entry_scale_is_symbolically_exact() {
        // the generator's scale factor squares to exactly 1/sqrt(NM)
        for (m, n) in [(100usize, 100usize), (64, 256), (2048, 512)] {
            let s = covariance_entry_scale(m, n);
            let target = 1.0 / ((n as f64) * (m as f64)).sqrt();
            assert!((s * s - target).abs() <= 2.0 * f64::EPSILON * target);
        }
    }

    #[test]
    fn wrong_kind_rejected() {
        let spec = EnsembleSpec::sample_covariance(4, 4, EntryDistribution::Rademacher, 0);
        assert!(generalized_wigner(&spec).is_err());
    }
}
