//! Outside-spectrum law at and near the real axis: the error admits the
//! stronger bound sqrt(Im m / (N eta)), stable down to eta = 0, with the
//! closed-form comparison (kappa + eta)^{-1/4} K^{-1/2} up to constants.

use super::{
    build_matrix, median, parallel_map, spectral_matrix, vector_pairs, ExperimentOutput,
    MetricRow, ScalingFit, TrialRecord,
};
use crate::ensembles::{EnsembleKind, EntryDistribution};
use crate::error::{Error, Result};
use crate::laws::{mp_edges, mp_stieltjes, sc_stieltjes, SpectralPoint};
use crate::linalg::decompose;
use crate::rng;

#[derive(Debug, Clone)]
pub struct OutsideParams {
    pub kind: EnsembleKind,
    pub entry: EntryDistribution,
    pub phi: f64,
    /// Ladder for the K-scaling fit at `fixed_kappa`.
    pub n_ladder: Vec<usize>,
    /// Distances above the upper edge for the kappa-scaling fit (eta = 0),
    /// evaluated at the largest ladder size.
    pub kappa_grid: Vec<f64>,
    pub fixed_kappa: f64,
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
}

/// Runs the outside-spectrum experiment at eta = 0.
pub fn experiment_outside(params: &OutsideParams) -> Result<ExperimentOutput> {
    if params.n_ladder.is_empty() || params.kappa_grid.is_empty() || params.trials == 0 {
        return Err(Error::invalid("outside experiment needs sizes, kappas and trials"));
    }
    let mut out = ExperimentOutput::new("outside");
    let upper_edge = match params.kind {
        EnsembleKind::SampleCovariance => mp_edges(params.phi)?.1,
        EnsembleKind::GeneralizedWigner => 2.0,
    };

    // K-scaling at fixed kappa across the ladder
    let mut k_medians = Vec::new();
    for &n in &params.n_ladder {
        let errors = collect_errors(params, n, params.fixed_kappa, upper_edge)?;
        let med = median(&errors.1);
        k_medians.push(med);
        out.records.extend(errors.0);
    }
    let ns: Vec<f64> = params.n_ladder.iter().map(|&n| n as f64).collect();
    if ns.len() >= 4 {
        out.fits.push(("error_vs_k".into(), ScalingFit::fit_loglog(&ns, &k_medians)?));
    }

    // kappa-scaling at the largest size
    let n_top = *params.n_ladder.iter().max().unwrap();
    let mut kappa_medians = Vec::new();
    let mut max_error: f64 = 0.0;
    for &kappa in &params.kappa_grid {
        let (records, errors) = collect_errors(params, n_top, kappa, upper_edge)?;
        max_error = errors.iter().fold(max_error, |a, &b| a.max(b));
        kappa_medians.push(median(&errors));
        out.records.extend(records);
    }
    if params.kappa_grid.len() >= 4 {
        out.fits.push((
            "error_vs_kappa".into(),
            ScalingFit::fit_loglog(&params.kappa_grid, &kappa_medians)?,
        ));
    }
    out.summaries.push(("max_error".into(), max_error));
    out.sort_records();
    Ok(out)
}

fn collect_errors(
    params: &OutsideParams,
    n: usize,
    kappa: f64,
    upper_edge: f64,
) -> Result<(Vec<TrialRecord>, Vec<f64>)> {
    let e = upper_edge + kappa;
    let z = SpectralPoint::new(e, 0.0)?;
    let m_law = match params.kind {
        EnsembleKind::SampleCovariance => mp_stieltjes(&z, params.phi)?,
        EnsembleKind::GeneralizedWigner => sc_stieltjes(&z)?,
    };
    let pairs: Vec<_> = vector_pairs(n, params.seed)
        .into_iter()
        .filter(|p| p.family == "random" || p.family == "flat")
        .collect();
    let results: Vec<Result<(TrialRecord, Vec<f64>)>> =
        parallel_map(params.trials, params.jobs, |t| {
            let seed = rng::derive_seed(params.seed, rng::lane("outside"), n as u64, t as u64);
            let (x, m) = build_matrix(params.kind, params.entry, params.phi, n, None, seed)?;
            let decomp = decompose(&spectral_matrix(params.kind, &x))?;
            let mut errors = Vec::with_capacity(pairs.len());
            let mut rows = Vec::new();
            for p in &pairs {
                let inner: crate::laws::C64 =
                    p.v.iter().zip(&p.w).map(|(a, b)| a.conj() * b).sum();
                let form = decomp.quadratic_form(z.z(), &p.v, &p.w)?;
                errors.push((form - m_law * inner).norm());
            }
            rows.push(MetricRow::at(e, 0.0, "median_error", median(&errors)));
            rows.push(MetricRow::at(e, 0.0, "kappa", kappa));
            Ok((TrialRecord { seed, n, m, phi: params.phi, rows }, errors))
        });
    let mut records = Vec::new();
    let mut all_errors = Vec::new();
    for r in results {
        let (record, errors) = r?;
        records.push(record);
        all_errors.extend(errors);
    }
    Ok((records, all_errors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_zero_errors_finite_and_small() {
        let params = OutsideParams {
            kind: EnsembleKind::SampleCovariance,
            entry: EntryDistribution::RealGaussian,
            phi: 1.0,
            n_ladder: vec![64, 128, 256, 512],
            kappa_grid: vec![0.1, 0.2, 0.4, 0.8],
            fixed_kappa: 0.5,
            trials: 10,
            seed: 3,
            jobs: 1,
        };
        let out = experiment_outside(&params).unwrap();
        assert!(out.summary("max_error").unwrap() < 1.0);
        let kfit = out.fit("error_vs_k").unwrap();
        assert!((-0.8..=-0.2).contains(&kfit.exponent), "K exponent {}", kfit.exponent);
        let kappa_fit = out.fit("error_vs_kappa").unwrap();
        assert!(
            (-0.6..=0.05).contains(&kappa_fit.exponent),
            "kappa exponent {}",
            kappa_fit.exponent
        );
    }
}
