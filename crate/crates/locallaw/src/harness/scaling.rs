//! Ordinary least squares in log-log coordinates.

use crate::error::{Error, Result};

/// Fitted scaling exponent with its standard error and the fitted points
/// (log abscissa, log ordinate).
#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
}

impl ScalingFit {
    /// Fits `y ~ c x^exponent` by OLS on (ln x, ln y). Requires at least 4
    /// points with positive coordinates.
    pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<ScalingFit> {
        if xs.len() != ys.len() {
            return Err(Error::invalid("scaling fit needs equally many x and y values"));
        }
        if xs.len() < 4 {
            return Err(Error::invalid(format!(
                "scaling fit needs at least 4 points, got {}",
                xs.len()
            )));
        }
        if xs.iter().chain(ys.iter()).any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(Error::invalid("scaling fit needs positive finite values"));
        }
        let points: Vec<(f64, f64)> =
            xs.iter().zip(ys).map(|(&x, &y)| (x.ln(), y.ln())).collect();
        let n = points.len() as f64;
        let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
        let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - xm).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
        if sxx == 0.0 {
            return Err(Error::invalid("scaling fit needs at least two distinct abscissae"));
        }
        let slope = sxy / sxx;
        let intercept = ym - slope * xm;
        let ss_res: f64 = points
            .iter()
            .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
            .sum();
        let dof = (points.len() as f64 - 2.0).max(1.0);
        let stderr = (ss_res / dof / sxx).sqrt();
        Ok(ScalingFit { exponent: slope, stderr, intercept, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let xs = [256.0f64, 512.0, 1024.0, 2048.0];
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.powf(-2.0 / 3.0)).collect();
        let fit = ScalingFit::fit_loglog(&xs, &ys).unwrap();
        assert!((fit.exponent + 2.0 / 3.0).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScalingFit::fit_loglog(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(ScalingFit::fit_loglog(&[1.0, 2.0, 3.0, -4.0], &[1.0, 2.0, 3.0, 4.0]).is_err());
    }
}
