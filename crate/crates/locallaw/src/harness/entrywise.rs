//! Entrywise local law: the random control parameters Lambda, Lambda_o,
//! Theta, Psi_Theta per (z, trial), on both the sample and the population
//! side.

use super::{
    build_matrix, median, parallel_map, ControlDiagnostics, ExperimentOutput, MetricRow,
    ScalingFit, TrialRecord,
};
use crate::ensembles::{EnsembleKind, EntryDistribution};
use crate::error::{Error, Result};
use crate::laws::{mp_stieltjes, mp_stieltjes_dual, SpectralPoint};
use crate::linalg::decompose;
use crate::rng;

#[derive(Debug, Clone)]
pub struct EntrywiseParams {
    pub entry: EntryDistribution,
    pub phi: f64,
    pub n_ladder: Vec<usize>,
    pub trials: usize,
    pub z_grid: Vec<SpectralPoint>,
    /// Compute the full entrywise maxima (O(N^3) per z). When false only
    /// the trace-level statistic Theta is computed.
    pub full_entrywise: bool,
    pub seed: u64,
    pub jobs: usize,
}

/// Per-(z, trial) control diagnostics for the sample-covariance ensemble.
pub fn experiment_entrywise(params: &EntrywiseParams) -> Result<ExperimentOutput> {
    if params.n_ladder.is_empty() || params.trials == 0 || params.z_grid.is_empty() {
        return Err(Error::invalid("entrywise experiment needs sizes, trials and a z-grid"));
    }
    let mut out = ExperimentOutput::new("entrywise");
    let mut theta_medians: Vec<f64> = Vec::new();
    let mut max_ratio_lambda: f64 = 0.0;
    let mut max_ratio_g: f64 = 0.0;

    for &n in &params.n_ladder {
        let results: Vec<Result<(TrialRecord, Vec<f64>)>> =
            parallel_map(params.trials, params.jobs, |t| {
                run_trial(params, n, t as u64)
            });
        let mut thetas = Vec::new();
        for r in results {
            let (record, theta_per_z) = r?;
            thetas.extend(theta_per_z);
            for row in &record.rows {
                if row.metric == "lambda_over_psi" {
                    max_ratio_lambda = max_ratio_lambda.max(row.value);
                }
                if row.metric == "g_error_over_psi" {
                    max_ratio_g = max_ratio_g.max(row.value);
                }
            }
            out.records.push(record);
        }
        theta_medians.push(median(&thetas));
    }

    if params.n_ladder.len() >= 4 {
        let ns: Vec<f64> = params.n_ladder.iter().map(|&n| n as f64).collect();
        out.fits.push(("theta_vs_n".into(), ScalingFit::fit_loglog(&ns, &theta_medians)?));
    }
    if params.full_entrywise {
        out.summaries.push(("max_lambda_over_psi".into(), max_ratio_lambda));
        out.summaries.push(("max_g_error_over_psi".into(), max_ratio_g));
    }
    out.sort_records();
    Ok(out)
}

/// Control diagnostics of a single decomposed sample at one z.
pub fn control_diagnostics(
    r_matrix: &faer::Mat<faer::c64>,
    m_phi: crate::laws::C64,
    n: usize,
    eta: f64,
) -> ControlDiagnostics {
    let dim = r_matrix.nrows();
    let mut lambda: f64 = 0.0;
    let mut lambda_o: f64 = 0.0;
    let mut trace = crate::laws::C64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            let entry = r_matrix[(i, j)];
            if i == j {
                lambda = lambda.max((entry - m_phi).norm());
                trace += entry;
            } else {
                lambda_o = lambda_o.max(entry.norm());
            }
        }
    }
    lambda = lambda.max(lambda_o);
    let theta = (trace / dim as f64 - m_phi).norm();
    let psi_theta = ((m_phi.im + theta) / (n as f64 * eta)).max(0.0).sqrt();
    ControlDiagnostics { lambda, lambda_o, theta, psi_theta }
}

fn run_trial(params: &EntrywiseParams, n: usize, trial: u64) -> Result<(TrialRecord, Vec<f64>)> {
    let seed = rng::derive_seed(params.seed, rng::lane("entrywise"), n as u64, trial);
    let (x, m) = build_matrix(
        EnsembleKind::SampleCovariance,
        params.entry,
        params.phi,
        n,
        None,
        seed,
    )?;
    let r_side = decompose(&x.gram_sample())?;
    let g_side = if params.full_entrywise {
        Some(decompose(&x.gram_population())?)
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut thetas = Vec::new();
    for z in &params.z_grid {
        let m_phi = mp_stieltjes(z, params.phi)?;
        let n_eta = n as f64 * z.eta;
        let psi = (m_phi.im / n_eta).max(0.0).sqrt() + 1.0 / n_eta;
        if let Some(g_side) = &g_side {
            let r_mat = r_side.resolvent_matrix(z.z());
            let diag = control_diagnostics(&r_mat, m_phi, n, z.eta);
            rows.push(MetricRow::at(z.e, z.eta, "lambda", diag.lambda));
            rows.push(MetricRow::at(z.e, z.eta, "lambda_o", diag.lambda_o));
            rows.push(MetricRow::at(z.e, z.eta, "theta", diag.theta));
            rows.push(MetricRow::at(z.e, z.eta, "psi_theta", diag.psi_theta));
            rows.push(MetricRow::at(z.e, z.eta, "lambda_over_psi", diag.lambda / psi));
            thetas.push(diag.theta);

            // population side: |G_ij - delta m_{1/phi}| * phi / Psi
            let m_dual = mp_stieltjes_dual(z, params.phi)?;
            let g_mat = g_side.resolvent_matrix(z.z());
            let mut worst: f64 = 0.0;
            for i in 0..g_mat.nrows() {
                for j in 0..g_mat.ncols() {
                    let target = if i == j { m_dual } else { crate::laws::C64::new(0.0, 0.0) };
                    worst = worst.max((g_mat[(i, j)] - target).norm());
                }
            }
            rows.push(MetricRow::at(z.e, z.eta, "g_error_over_psi", worst * params.phi / psi));
        } else {
            let m_r = r_side.trace_resolvent(z.z()) / n as f64;
            let theta = (m_r - m_phi).norm();
            rows.push(MetricRow::at(z.e, z.eta, "theta", theta));
            thetas.push(theta);
        }
    }
    Ok((TrialRecord { seed, n, m, phi: params.phi, rows }, thetas))
}
