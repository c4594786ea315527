//! Eigenvalue rigidity: |lambda_alpha - gamma_alpha| against the classical
//! locations, with the edge-scaling fits for lambda_1 - gamma_+ and (for
//! aspect ratios away from one) lambda_K - gamma_-.

use super::{
    build_matrix, estimate_domination, median, parallel_map, DominationSample, ExperimentOutput,
    MetricRow, ScalingFit, TrialRecord,
};
use crate::ensembles::{EnsembleKind, EntryDistribution};
use crate::error::{Error, Result};
use crate::laws::{classical_locations, mp_edges};
use crate::linalg::eigenvalues_only;
use crate::rng;

#[derive(Debug, Clone)]
pub struct RigidityParams {
    pub entry: EntryDistribution,
    pub phi: f64,
    pub n_ladder: Vec<usize>,
    pub trials: usize,
    /// Edge indices (1-based, small) for the normalized statistics.
    pub alpha_edge: Vec<usize>,
    pub eps_grid: Vec<f64>,
    pub seed: u64,
    pub jobs: usize,
}

struct TrialData {
    record: TrialRecord,
    top_gap: f64,
    bottom_gap: f64,
    bulk_stat: f64,
    edge_stats: Vec<f64>,
}

/// Runs the rigidity experiment for the sample-covariance ensemble.
pub fn experiment_rigidity(params: &RigidityParams) -> Result<ExperimentOutput> {
    if params.n_ladder.is_empty() || params.trials == 0 {
        return Err(Error::invalid("rigidity experiment needs sizes and trials"));
    }
    let mut out = ExperimentOutput::new("rigidity");
    let (lo_edge, hi_edge) = mp_edges(params.phi)?;
    let soft_lower_edge = (params.phi - 1.0).abs() >= 0.1;

    let mut top_medians = Vec::new();
    let mut bottom_medians = Vec::new();
    let mut bulk_medians = Vec::new();
    let mut samples: Vec<DominationSample> = Vec::new();

    for &n in &params.n_ladder {
        let m = ((params.phi * n as f64).round() as usize).max(1);
        let k = m.min(n);
        // classical locations for the probed alphas (1-based, descending)
        let mut alphas: Vec<usize> = params.alpha_edge.iter().copied().filter(|&a| a <= k).collect();
        alphas.push((k / 2).max(1));
        alphas.push(k);
        alphas.sort_unstable();
        alphas.dedup();
        let gammas = classical_locations(n, m, &alphas)?;

        let results: Vec<Result<TrialData>> = parallel_map(params.trials, params.jobs, |t| {
            run_trial(params, n, m, k, &alphas, &gammas, lo_edge, hi_edge, soft_lower_edge, t as u64)
        });
        let mut tops = Vec::new();
        let mut bottoms = Vec::new();
        let mut bulks = Vec::new();
        for r in results {
            let data = r?;
            tops.push(data.top_gap);
            bottoms.push(data.bottom_gap);
            bulks.push(data.bulk_stat);
            for &s in &data.edge_stats {
                samples.push(DominationSample { n, xi: s, zeta: 1.0 });
            }
            out.records.push(data.record);
        }
        top_medians.push(median(&tops));
        bottom_medians.push(median(&bottoms));
        bulk_medians.push(median(&bulks));
    }

    if params.n_ladder.len() >= 4 {
        let ns: Vec<f64> = params.n_ladder.iter().map(|&n| n as f64).collect();
        out.fits.push(("top_edge_vs_n".into(), ScalingFit::fit_loglog(&ns, &top_medians)?));
        if soft_lower_edge {
            out.fits
                .push(("bottom_edge_vs_n".into(), ScalingFit::fit_loglog(&ns, &bottom_medians)?));
        }
    }
    out.summaries
        .push(("bulk_normalized_median".into(), median(&bulk_medians)));
    if samples.len() >= 60 {
        if let Ok(verdict) = estimate_domination(&samples, &params.eps_grid) {
            out.verdicts.push(("edge_rigidity".into(), verdict));
        }
    }
    out.sort_records();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    params: &RigidityParams,
    n: usize,
    m: usize,
    k: usize,
    alphas: &[usize],
    gammas: &[f64],
    lo_edge: f64,
    hi_edge: f64,
    soft_lower_edge: bool,
    trial: u64,
) -> Result<TrialData> {
    let seed = rng::derive_seed(params.seed, rng::lane("rigidity"), n as u64, trial);
    let (x, _) = build_matrix(
        EnsembleKind::SampleCovariance,
        params.entry,
        params.phi,
        n,
        None,
        seed,
    )?;
    let mut evals = eigenvalues_only(&x.gram_sample())?;
    evals.sort_by(|a, b| b.total_cmp(a)); // descending: lambda_1 >= ...
    let kf = k as f64;

    let mut rows = Vec::new();
    let mut edge_stats = Vec::new();
    let mut bulk_stat = 0.0;
    for (&alpha, &gamma) in alphas.iter().zip(gammas) {
        let lambda = evals[alpha - 1];
        let gap = (lambda - gamma).abs();
        // edge-adapted normalization: alpha^{1/3} K^{2/3} near the top edge,
        // (K+1-alpha)^{1/3} K^{2/3} near the soft lower edge
        let weight = if alpha * 2 <= k || !soft_lower_edge {
            (alpha as f64).powf(1.0 / 3.0) * kf.powf(2.0 / 3.0)
        } else {
            ((k + 1 - alpha) as f64).powf(1.0 / 3.0) * kf.powf(2.0 / 3.0)
        };
        let stat = gap * weight;
        rows.push(MetricRow::scalar(format!("abs_gap_alpha_{alpha}"), gap));
        rows.push(MetricRow::scalar(format!("normalized_alpha_{alpha}"), stat));
        if alpha <= 10 {
            edge_stats.push(stat);
        }
        if alpha == (k / 2).max(1) {
            bulk_stat = stat;
        }
    }
    let top_gap = (evals[0] - hi_edge).abs();
    let bottom_gap = (evals[k - 1] - lo_edge).abs();
    rows.push(MetricRow::scalar("top_edge_gap", top_gap));
    rows.push(MetricRow::scalar("bottom_edge_gap", bottom_gap));
    Ok(TrialData {
        record: TrialRecord { seed, n, m, phi: params.phi, rows },
        top_gap,
        bottom_gap,
        bulk_stat,
        edge_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_scaling_and_bulk_stat() {
        let params = RigidityParams {
            entry: EntryDistribution::RealGaussian,
            phi: 1.0,
            n_ladder: vec![64, 128, 256, 512],
            trials: 16,
            alpha_edge: vec![1, 2, 5],
            eps_grid: vec![0.25, 0.5],
            seed: 21,
            jobs: 1,
        };
        let out = experiment_rigidity(&params).unwrap();
        let fit = out.fit("top_edge_vs_n").unwrap();
        assert!(
            (fit.exponent + 2.0 / 3.0).abs() <= 0.25,
            "lambda_1 - gamma_+ exponent {}",
            fit.exponent
        );
        assert!(out.summary("bulk_normalized_median").unwrap() < 10.0);
    }

    #[test]
    fn ordering_invariants() {
        // lambda and gamma sequences are both descending.
        let n = 128;
        let m = 256;
        let alphas: Vec<usize> = (1..=10).collect();
        let gammas = classical_locations(n, m, &alphas).unwrap();
        for w in gammas.windows(2) {
            assert!(w[0] >= w[1]);
        }
        let spec = crate::ensembles::EnsembleSpec::sample_covariance(
            m,
            n,
            EntryDistribution::RealGaussian,
            4,
        );
        let x = crate::ensembles::sample_covariance(&spec).unwrap();
        let mut evals = eigenvalues_only(&x.gram_sample()).unwrap();
        evals.sort_by(|a, b| b.total_cmp(a));
        for w in evals.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }
}
