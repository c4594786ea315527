//! Large-deviation bounds for linear and quadratic forms in standardized
//! independent variables, phrased as stochastic-domination property tests:
//! the form is dominated by the l2-norm of its coefficients.

use super::{estimate_domination, DominationSample, ExperimentOutput, MetricRow, TrialRecord};
use crate::ensembles::EntryDistribution;
use crate::error::{Error, Result};
use crate::laws::C64;
use crate::rng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdeKind {
    /// sum_i b_i xi_i against (sum |b_i|^2)^{1/2}
    Linear,
    /// sum_{ij} a_ij xi_i zeta_j against (sum |a_ij|^2)^{1/2}
    Bilinear,
    /// sum_{i != j} a_ij xi_i xi_j against (sum_{i != j} |a_ij|^2)^{1/2}
    OffDiagonal,
}

#[derive(Debug, Clone)]
pub struct LargeDeviationParams {
    pub kind: LdeKind,
    pub entry: EntryDistribution,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub eps_grid: Vec<f64>,
    pub seed: u64,
}

/// Runs the large-deviation property test. Coefficients are deterministic
/// given the seed and fixed before any variable is drawn.
pub fn experiment_large_deviation(params: &LargeDeviationParams) -> Result<ExperimentOutput> {
    if params.sizes.is_empty() || params.trials == 0 {
        return Err(Error::invalid("large-deviation experiment needs sizes and trials"));
    }
    let mut out = ExperimentOutput::new("large-deviation");
    let mut samples = Vec::new();
    for &n in &params.sizes {
        // deterministic coefficients
        let mut coeff_rng = rng::substream(params.seed, rng::lane("lde-coefficients"), n as u64);
        let (coeffs, zeta) = match params.kind {
            LdeKind::Linear => {
                let b: Vec<f64> = (0..n).map(|_| coeff_rng.gen::<f64>() - 0.5).collect();
                let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                (b, norm)
            }
            LdeKind::Bilinear | LdeKind::OffDiagonal => {
                let a: Vec<f64> = (0..n * n).map(|_| (coeff_rng.gen::<f64>() - 0.5) / n as f64).collect();
                let norm = match params.kind {
                    LdeKind::OffDiagonal => a
                        .iter()
                        .enumerate()
                        .filter(|(idx, _)| idx / n != idx % n)
                        .map(|(_, x)| x * x)
                        .sum::<f64>()
                        .sqrt(),
                    _ => a.iter().map(|x| x * x).sum::<f64>().sqrt(),
                };
                (a, norm)
            }
        };

        for trial in 0..params.trials {
            let seed = rng::derive_seed(params.seed, rng::lane("lde"), n as u64, trial as u64);
            let mut draw_rng = rng::substream(seed, 0, 0);
            let xi: Vec<C64> = (0..n).map(|_| params.entry.sample(&mut draw_rng)).collect();
            let value = match params.kind {
                LdeKind::Linear => xi
                    .iter()
                    .zip(&coeffs)
                    .map(|(x, &b)| b * x)
                    .sum::<C64>()
                    .norm(),
                LdeKind::Bilinear => {
                    let eta: Vec<C64> = (0..n).map(|_| params.entry.sample(&mut draw_rng)).collect();
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            acc += coeffs[i * n + j] * xi[i] * eta[j];
                        }
                    }
                    acc.norm()
                }
                LdeKind::OffDiagonal => {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..n {
                        for j in 0..n {
                            if i != j {
                                acc += coeffs[i * n + j] * xi[i] * xi[j];
                            }
                        }
                    }
                    acc.norm()
                }
            };
            samples.push(DominationSample { n, xi: value, zeta });
            out.records.push(TrialRecord {
                seed,
                n,
                m: n,
                phi: 1.0,
                rows: vec![
                    MetricRow::scalar("form_abs", value),
                    MetricRow::scalar("coeff_norm", zeta),
                ],
            });
        }
    }
    out.verdicts
        .push(("form_vs_norm".into(), estimate_domination(&samples, &params.eps_grid)?));
    out.sort_records();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::Distribution;

    #[test]
    fn single_variable_is_dominated() {
        // b = e_1: the form is one bounded-moment variable, zeta = 1.
        let mut samples = Vec::new();
        for &n in &[100usize, 400, 1600] {
            for t in 0..30 {
                let mut rng = rng::substream(5, n as u64, t);
                let xi = EntryDistribution::Rademacher.sample(&mut rng);
                samples.push(DominationSample { n, xi: xi.norm(), zeta: 1.0 });
            }
        }
        let v = estimate_domination(&samples, &[0.1, 0.25]).unwrap();
        assert!(v.is_consistent());
    }

    #[test]
    fn flat_linear_form_concentrates_at_clt_scale() {
        // |sum xi_i| <= N^{0.05} sqrt(N): the CLT gives the fraction
        // P[|N(0,1)| <= N^{0.05}] = 88.7% at N = 10^4, so the empirical
        // fraction over 100 trials must land in a 2-sigma band around it.
        let n = 10_000usize;
        let mut hits = 0;
        for t in 0..100u64 {
            let mut rng = rng::substream(17, rng::lane("clt"), t);
            let mut sum = 0.0f64;
            for _ in 0..n {
                let x: f64 = rand_distr::StandardNormal.sample(&mut rng);
                sum += x;
            }
            if sum.abs() <= (n as f64).powf(0.05) * (n as f64).sqrt() {
                hits += 1;
            }
        }
        assert!(
            (82..=95).contains(&hits),
            "{hits}/100 inside the band; CLT predicts 88.7 +- 6.3"
        );
    }

    #[test]
    fn offdiagonal_form_consistent_across_sizes() {
        // a_ij = 1/N over N in {100, 400, 1600}: xi = |sum_{i!=j} xi_i xi_j|/N,
        // zeta = sqrt(N(N-1))/N ~ 1
        let mut samples = Vec::new();
        for &n in &[100usize, 400, 1600] {
            let zeta = ((n * (n - 1)) as f64).sqrt() / n as f64;
            for t in 0..25u64 {
                let mut rng = rng::substream(23, rng::lane("offdiag"), (n as u64) << 32 | t);
                let xi: Vec<f64> = (0..n)
                    .map(|_| EntryDistribution::Rademacher.sample(&mut rng).re)
                    .collect();
                let total: f64 = xi.iter().sum();
                let sq: f64 = xi.iter().map(|x| x * x).sum();
                // sum_{i != j} xi_i xi_j = (sum xi)^2 - sum xi^2
                let form = (total * total - sq).abs() / n as f64;
                samples.push(DominationSample { n, xi: form, zeta });
            }
        }
        let v = estimate_domination(&samples, &[0.25, 0.5]).unwrap();
        assert!(v.is_consistent());

        // and through the experiment surface with generated coefficients
        let params = LargeDeviationParams {
            kind: LdeKind::OffDiagonal,
            entry: EntryDistribution::Rademacher,
            sizes: vec![50, 100, 200],
            trials: 25,
            eps_grid: vec![0.25, 0.5],
            seed: 23,
        };
        let out = experiment_large_deviation(&params).unwrap();
        assert!(out.verdict("form_vs_norm").unwrap().is_consistent());
    }

    #[test]
    fn linear_and_bilinear_consistent() {
        for kind in [LdeKind::Linear, LdeKind::Bilinear] {
            let params = LargeDeviationParams {
                kind,
                entry: EntryDistribution::StandardizedUniform,
                sizes: vec![64, 256, 1024],
                trials: 25,
                eps_grid: vec![0.25],
                seed: 29,
            };
            let out = experiment_large_deviation(&params).unwrap();
            assert!(out.verdict("form_vs_norm").unwrap().is_consistent(), "{kind:?}");
        }
    }
}
