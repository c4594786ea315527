//! Finite-size estimator for stochastic domination.
//!
//! The definition is asymptotic (for every eps and D the exceedance
//! probability of xi > N^eps zeta decays faster than any power), which is
//! not decidable at a fixed N. The estimator therefore tests the trend: for
//! each eps on a grid, the empirical exceedance fraction must be
//! nonincreasing along the N-ladder up to two-sigma binomial noise, and the
//! fraction at the largest N must sit clearly below one (0.9). A family
//! whose exceedance stays at one for every N can never be dominated and is
//! reported inconsistent regardless of monotonicity.

use crate::error::{Error, Result};

/// One observation (xi, zeta) at size N.
#[derive(Debug, Clone, Copy)]
pub struct DominationSample {
    pub n: usize,
    pub xi: f64,
    pub zeta: f64,
}

/// Exceedance fractions of xi > N^eps zeta for one eps.
#[derive(Debug, Clone)]
pub struct DominationTable {
    pub eps: f64,
    /// (N, exceedance fraction, sample count) ordered by N.
    pub fractions: Vec<(usize, f64, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
}

/// Verdict of the domination estimator.
#[derive(Debug, Clone)]
pub struct DominationVerdict {
    pub tables: Vec<DominationTable>,
    /// Per-eps least-squares slope of the exceedance fraction against ln N.
    pub trends: Vec<(f64, f64)>,
    pub verdict: Consistency,
}

impl DominationVerdict {
    pub fn is_consistent(&self) -> bool {
        self.verdict == Consistency::Consistent
    }
}

/// Exceedance table and verdict for the given samples and eps grid.
/// Requires at least 3 distinct N values with at least 20 samples each.
pub fn estimate_domination(
    samples: &[DominationSample],
    eps_grid: &[f64],
) -> Result<DominationVerdict> {
    if eps_grid.is_empty() {
        return Err(Error::invalid("eps grid must not be empty"));
    }
    let mut sizes: Vec<usize> = samples.iter().map(|s| s.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::invalid(format!(
            "domination estimation needs >= 3 distinct N values, got {}",
            sizes.len()
        )));
    }
    for &n in &sizes {
        let count = samples.iter().filter(|s| s.n == n).count();
        if count < 20 {
            return Err(Error::invalid(format!(
                "domination estimation needs >= 20 samples per N, got {count} at N = {n}"
            )));
        }
    }

    let mut tables = Vec::new();
    let mut trends = Vec::new();
    let mut verdict = Consistency::Consistent;
    for &eps in eps_grid {
        let mut fractions = Vec::new();
        for &n in &sizes {
            let threshold_scale = (n as f64).powf(eps);
            let mut total = 0usize;
            let mut exceed = 0usize;
            for s in samples.iter().filter(|s| s.n == n) {
                total += 1;
                if s.xi > threshold_scale * s.zeta {
                    exceed += 1;
                }
            }
            fractions.push((n, exceed as f64 / total as f64, total));
        }
        // monotone nonincreasing up to 2-sigma binomial noise
        for w in fractions.windows(2) {
            let (_, f1, t1) = w[0];
            let (_, f2, t2) = w[1];
            let noise = 2.0
                * ((f1 * (1.0 - f1) / t1 as f64) + (f2 * (1.0 - f2) / t2 as f64))
                    .sqrt();
            if f2 > f1 + noise + 1e-12 {
                verdict = Consistency::Inconsistent;
            }
        }
        // a fraction pinned near one at the largest N cannot be dominated
        if fractions.last().map(|&(_, f, _)| f > 0.9).unwrap_or(false) {
            verdict = Consistency::Inconsistent;
        }
        // trend: least-squares slope of fraction against ln N
        let xs: Vec<f64> = fractions.iter().map(|&(n, _, _)| (n as f64).ln()).collect();
        let ys: Vec<f64> = fractions.iter().map(|&(_, f, _)| f).collect();
        let xm = xs.iter().sum::<f64>() / xs.len() as f64;
        let ym = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
        trends.push((eps, if sxx > 0.0 { sxy / sxx } else { 0.0 }));
        tables.push(DominationTable { eps, fractions });
    }
    Ok(DominationVerdict { tables, trends, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(xi_of: impl Fn(usize, f64) -> f64) -> Vec<DominationSample> {
        let mut out = Vec::new();
        for &n in &[100usize, 400, 1600] {
            for t in 0..25 {
                let zeta = 1.0 + 0.01 * t as f64;
                out.push(DominationSample { n, xi: xi_of(n, zeta), zeta });
            }
        }
        out
    }

    #[test]
    fn calibration_triples() {
        let eps = [0.1, 0.25, 0.5];
        // xi = 0: consistent, all fractions zero.
        let v = estimate_domination(&triple(|_, _| 0.0), &eps).unwrap();
        assert!(v.is_consistent());
        assert!(v.tables.iter().all(|t| t.fractions.iter().all(|&(_, f, _)| f == 0.0)));
        // xi = zeta: consistent (N^eps zeta > zeta for eps > 0).
        let v = estimate_domination(&triple(|_, z| z), &eps).unwrap();
        assert!(v.is_consistent());
        // xi = sqrt(N) zeta: inconsistent at eps = 0.25.
        let v = estimate_domination(&triple(|n, z| (n as f64).sqrt() * z), &[0.25]).unwrap();
        assert!(!v.is_consistent());
        assert!(v.tables[0].fractions.iter().all(|&(_, f, _)| f == 1.0));
    }

    #[test]
    fn preconditions() {
        let few: Vec<DominationSample> = (0..40)
            .map(|i| DominationSample { n: if i < 20 { 10 } else { 20 }, xi: 0.0, zeta: 1.0 })
            .collect();
        assert!(estimate_domination(&few, &[0.1]).is_err());
        let sparse: Vec<DominationSample> = [10usize, 20, 40]
            .iter()
            .flat_map(|&n| (0..5).map(move |_| DominationSample { n, xi: 0.0, zeta: 1.0 }))
            .collect();
        assert!(estimate_domination(&sparse, &[0.1]).is_err());
    }
}
