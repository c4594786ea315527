//! Deterministic spectral laws: Marchenko-Pastur and semicircle densities,
//! their Stieltjes transforms, spectral edges, control parameters, classical
//! eigenvalue locations, the stability operator, and the admissible spectral
//! domains.

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default domain parameter omega used when a caller does not configure one.
pub const DEFAULT_OMEGA: f64 = 0.05;

/// Default exponent bound C in the dimension constraint N^{1/C} <= M <= N^C.
pub const DEFAULT_DIMENSION_EXPONENT: f64 = 8.0;

pub type C64 = Complex64;

/// Aspect ratio phi = M/N stored as the integer pair that defines it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AspectRatio {
    m: u64,
    n: u64,
}

impl AspectRatio {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid(format!(
                "aspect ratio needs positive dimensions, got M={m}, N={n}"
            )));
        }
        Ok(AspectRatio { m, n })
    }

    pub fn phi(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Number of nontrivial eigenvalues K = min(M, N).
    pub fn k(&self) -> usize {
        self.m.min(self.n) as usize
    }

    /// Checks N^{1/C} <= M <= N^C for the configured exponent bound.
    pub fn dimension_bound_ok(&self, c: f64) -> bool {
        let (m, n) = (self.m as f64, self.n as f64);
        if n <= 1.0 {
            return m <= 1.5;
        }
        m.ln() * c >= n.ln() && m.ln() <= c * n.ln()
    }
}

/// Spectral parameter z = E + i eta with eta >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub e: f64,
    pub eta: f64,
}

impl SpectralPoint {
    pub fn new(e: f64, eta: f64) -> Result<Self> {
        if !e.is_finite() || !eta.is_finite() || eta < 0.0 {
            return Err(Error::invalid(format!(
                "spectral point needs finite E and eta >= 0, got E={e}, eta={eta}"
            )));
        }
        Ok(SpectralPoint { e, eta })
    }

    pub fn z(&self) -> C64 {
        C64::new(self.e, self.eta)
    }

    pub fn from_complex(z: C64) -> Result<Self> {
        SpectralPoint::new(z.re, z.im)
    }
}

/// The four admissible domains of spectral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// Bulk domain S for sample covariance matrices.
    S,
    /// Outside-spectrum domain for sample covariance matrices.
    STilde,
    /// Bulk domain for Wigner matrices.
    SW,
    /// Outside-spectrum domain for Wigner matrices.
    STildeW,
}

/// Membership predicate data for a spectral domain.
#[derive(Debug, Clone, Copy)]
pub struct DomainSpec {
    pub omega: f64,
    /// K = min(M, N) for the covariance domains, N for the Wigner ones.
    pub k: usize,
    pub kind: DomainKind,
}

impl DomainSpec {
    pub fn new(omega: f64, k: usize, kind: DomainKind) -> Result<Self> {
        if !(omega > 0.0 && omega < 1.0) {
            return Err(Error::invalid(format!("omega must lie in (0,1), got {omega}")));
        }
        if k == 0 {
            return Err(Error::invalid("K must be positive"));
        }
        Ok(DomainSpec { omega, k, kind })
    }

    /// Membership test. `phi` is used by the covariance domains (for the
    /// spectral edges) and ignored by the Wigner ones.
    pub fn contains(&self, z: &SpectralPoint, phi: f64) -> bool {
        let om = self.omega;
        let om_inv = 1.0 / om;
        let k = self.k as f64;
        let modulus = z.z().norm();
        match self.kind {
            DomainKind::S => {
                let kappa = match kappa_mp(z.e, phi) {
                    Ok(v) => v,
                    Err(_) => return false,
                };
                kappa <= om_inv
                    && z.eta >= k.powf(-1.0 + om)
                    && z.eta <= om_inv
                    && modulus >= om
            }
            DomainKind::STilde => {
                let (lo, hi) = match mp_edges(phi) {
                    Ok(v) => v,
                    Err(_) => return false,
                };
                let kappa = kappa_mp(z.e, phi).unwrap_or(f64::NAN);
                !(z.e >= lo && z.e <= hi)
                    && kappa >= k.powf(-2.0 / 3.0 + om)
                    && kappa <= om_inv
                    && modulus >= om
                    && z.eta > 0.0
                    && z.eta <= om_inv
            }
            DomainKind::SW => {
                z.e.abs() <= om_inv && z.eta >= k.powf(-1.0 + om) && z.eta <= om_inv
            }
            DomainKind::STildeW => {
                let sep = 2.0 + k.powf(-2.0 / 3.0 + om);
                z.e.abs() >= sep && z.e.abs() <= om_inv && z.eta > 0.0 && z.eta <= om_inv
            }
        }
    }
}

/// One deterministic law evaluation bundled with its control quantities.
#[derive(Debug, Clone, Copy)]
pub struct LawEvaluation {
    pub m: C64,
    pub im_m: f64,
    pub kappa: f64,
    pub psi: f64,
    pub edges: (f64, f64),
}

impl LawEvaluation {
    /// Evaluate the Marchenko-Pastur law and its control parameter at z.
    pub fn marchenko_pastur(z: &SpectralPoint, phi: f64, n: usize) -> Result<Self> {
        let m = mp_stieltjes(z, phi)?;
        let edges = mp_edges(phi)?;
        let kappa = kappa_mp(z.e, phi)?;
        let n_eta = n as f64 * z.eta;
        let psi = (m.im / n_eta).max(0.0).sqrt() + 1.0 / n_eta;
        Ok(LawEvaluation { m, im_m: m.im, kappa, psi, edges })
    }

    /// Evaluate the semicircle law and its control parameter at z.
    pub fn semicircle(z: &SpectralPoint, n: usize) -> Result<Self> {
        let m = sc_stieltjes(z)?;
        let kappa = kappa_sc(z.e);
        let n_eta = n as f64 * z.eta;
        let psi = (m.im / n_eta).max(0.0).sqrt() + 1.0 / n_eta;
        Ok(LawEvaluation { m, im_m: m.im, kappa, psi, edges: (-2.0, 2.0) })
    }
}

/// Rescaled spectral parameters and the rescaled transform.
#[derive(Debug, Clone, Copy)]
pub struct RescaledParams {
    /// z~ = phi^{-1/2} z
    pub z_tilde: C64,
    /// z^ = z - phi^{1/2} + phi^{-1/2}
    pub z_hat: C64,
    /// m~ = phi^{1/2} m_{phi^{-1}}(z)
    pub m_tilde: C64,
}

impl RescaledParams {
    pub fn new(z: &SpectralPoint, phi: f64) -> Result<Self> {
        let (zt, zh) = rescaled_z(z.z(), phi)?;
        let m_tilde = phi.sqrt() * mp_stieltjes_dual(z, phi)?;
        Ok(RescaledParams { z_tilde: zt, z_hat: zh, m_tilde })
    }
}

pub(crate) fn rescaled_z(z: C64, phi: f64) -> Result<(C64, C64)> {
    if !phi.is_finite() || phi <= 0.0 {
        return Err(Error::invalid(format!("phi must be positive, got {phi}")));
    }
    let s = phi.sqrt();
    Ok((z / s, z - s + 1.0 / s))
}

/// Spectral edges gamma_- and gamma_+ of the Marchenko-Pastur law.
pub fn mp_edges(phi: f64) -> Result<(f64, f64)> {
    if !phi.is_finite() || phi <= 0.0 {
        return Err(Error::invalid(format!("phi must be positive, got {phi}")));
    }
    let s = phi.sqrt() + 1.0 / phi.sqrt();
    Ok(((s - 2.0).max(0.0), s + 2.0))
}

/// Distance of E to the Marchenko-Pastur edges.
pub fn kappa_mp(e: f64, phi: f64) -> Result<f64> {
    let (lo, hi) = mp_edges(phi)?;
    Ok((hi - e).abs().min((lo - e).abs()))
}

/// Distance of E to the semicircle edges +-2.
pub fn kappa_sc(e: f64) -> f64 {
    (e.abs() - 2.0).abs()
}

/// Marchenko-Pastur density: `(continuous part at x, atom mass at 0)`.
///
/// The continuous part is `sqrt(phi)/(2 pi) * sqrt(((x-g-)(g+-x))_+) / x`,
/// supported on `[gamma_-, gamma_+]`; the atom `(1-phi)_+` sits at zero and is
/// reported separately.
pub fn mp_density(x: f64, phi: f64) -> Result<(f64, f64)> {
    let (lo, hi) = mp_edges(phi)?;
    let atom = (1.0 - phi).max(0.0);
    if x <= 0.0 || x < lo || x > hi {
        return Ok((0.0, atom));
    }
    let prod = (x - lo) * (hi - x);
    if prod <= 0.0 {
        return Ok((0.0, atom));
    }
    Ok((phi.sqrt() / (2.0 * PI) * prod.sqrt() / x, atom))
}

/// Semicircle density on [-2, 2].
pub fn sc_density(x: f64) -> f64 {
    let t = 4.0 - x * x;
    if t <= 0.0 {
        0.0
    } else {
        t.sqrt() / (2.0 * PI)
    }
}

/// Stieltjes transform of the Marchenko-Pastur law.
///
/// The branch is fixed by Im m > 0 in the upper half-plane and m -> 0 at
/// infinity; eta = 0 is admitted only outside `[gamma_-, gamma_+]`.
pub fn mp_stieltjes(z: &SpectralPoint, phi: f64) -> Result<C64> {
    let (lo, hi) = mp_edges(phi)?;
    let drift = phi.sqrt() - 1.0 / phi.sqrt();
    if z.eta == 0.0 {
        let e = z.e;
        if e >= lo && e <= hi {
            return Err(Error::BranchUndefined(format!(
                "eta = 0 with E = {e} inside the spectrum [{lo}, {hi}]"
            )));
        }
        if e == 0.0 {
            return Err(Error::invalid("z = 0 is not admissible"));
        }
        // Boundary values from the upper half-plane: the square root of
        // (z-lo)(hi-z) tends to -+ i sqrt(|..|) on the two sides.
        let root = ((e - lo) * (e - hi)).abs().sqrt();
        let signed = if e > hi { root } else { -root };
        return Ok(C64::new((drift - e + signed) / (2.0 / phi.sqrt() * e), 0.0));
    }
    let z = z.z();
    let w = (z - lo) * (hi - z);
    let sq = w.sqrt(); // principal branch
    let denom = 2.0 / phi.sqrt() * z;
    let m_plus = (drift - z + C64::i() * sq) / denom;
    let m_minus = (drift - z - C64::i() * sq) / denom;
    let mut m = if m_plus.im > 0.0 { m_plus } else { m_minus };
    // One Newton polish on the defining quadratic keeps the fixed-point
    // residual at rounding level across the whole domain.
    let (zt, zh) = rescaled_z(z, phi)?;
    let dres = zt - 1.0 / (m * m);
    if dres.norm() > 1e-14 {
        let res = 1.0 / m + zt * m + zh;
        let polished = m - res / dres;
        if polished.im > 0.0 {
            m = polished;
        }
    }
    Ok(m)
}

/// Stieltjes transform of the dual law rho_{1/phi}:
/// `m_{phi^{-1}}(z) = (m_phi(z) + (1-phi)/z) / phi`.
pub fn mp_stieltjes_dual(z: &SpectralPoint, phi: f64) -> Result<C64> {
    if z.e == 0.0 && z.eta == 0.0 {
        return Err(Error::invalid("z = 0 is not admissible for the dual transform"));
    }
    let m = mp_stieltjes(z, phi)?;
    Ok((m + (1.0 - phi) / z.z()) / phi)
}

/// Stieltjes transform of the semicircle law, `m(z) = (-z + sqrt(z^2-4))/2`.
pub fn sc_stieltjes(z: &SpectralPoint) -> Result<C64> {
    if z.eta == 0.0 {
        let e = z.e;
        if e.abs() <= 2.0 {
            return Err(Error::BranchUndefined(format!(
                "eta = 0 with E = {e} inside the spectrum [-2, 2]"
            )));
        }
        let root = (e * e - 4.0).sqrt();
        let signed = if e > 2.0 { root } else { -root };
        return Ok(C64::new((-e + signed) / 2.0, 0.0));
    }
    let z = z.z();
    let sq = (z * z - 4.0).sqrt();
    // Evaluate the large root without cancellation and recover the small one
    // from the root product m1 m2 = 1 of m^2 + z m + 1 = 0.
    let aligned = if (z.conj() * sq).re >= 0.0 { sq } else { -sq };
    let big = (-z - aligned) / 2.0;
    let small = 1.0 / big;
    Ok(if small.im > 0.0 { small } else { big })
}

/// Control parameter Psi(z) = sqrt(Im m_phi / (N eta)) + 1/(N eta).
///
/// The point must lie in the bulk domain S built from `DEFAULT_OMEGA` and
/// K = min(M, N); use [`control_psi_in`] to supply a configured domain.
pub fn control_psi(z: &SpectralPoint, aspect: &AspectRatio, n: usize) -> Result<f64> {
    let domain = DomainSpec::new(DEFAULT_OMEGA, aspect.k(), DomainKind::S)?;
    control_psi_in(z, aspect, n, &domain)
}

/// Control parameter with an explicitly configured domain.
pub fn control_psi_in(
    z: &SpectralPoint,
    aspect: &AspectRatio,
    n: usize,
    domain: &DomainSpec,
) -> Result<f64> {
    let phi = aspect.phi();
    if !domain.contains(z, phi) {
        return Err(Error::Domain(format!(
            "z = {} + {}i lies outside {:?}",
            z.e, z.eta, domain.kind
        )));
    }
    let m = mp_stieltjes(z, phi)?;
    let n_eta = n as f64 * z.eta;
    Ok((m.im / n_eta).max(0.0).sqrt() + 1.0 / n_eta)
}

/// The stability operator D(u)(z) = 1/u + z~ u + z^.
pub fn stability_operator(u: C64, z: &SpectralPoint, phi: f64) -> Result<C64> {
    if u == C64::new(0.0, 0.0) {
        return Err(Error::invalid("stability operator is undefined at u = 0"));
    }
    let (zt, zh) = rescaled_z(z.z(), phi)?;
    Ok(1.0 / u + zt * u + zh)
}

/// The other root of the quadratic D(u) = 0, from the solved form of the
/// stability equation. Together with m_phi these are the two roots.
pub fn stability_second_root(z: &SpectralPoint, phi: f64) -> Result<C64> {
    let m = mp_stieltjes(z, phi)?;
    let (zt, _) = rescaled_z(z.z(), phi)?;
    // Vieta: u1 * u2 = 1 / z~ for z~ u^2 + z^ u + 1 = 0.
    Ok(1.0 / (zt * m))
}

/// Vertical lattice L(z): `{z}` together with the points of spacing * N
/// on the segment Im w in [Im z, 1] above z. Returns `{z}` alone when
/// Im z >= 1. Duplicates (when Im z is itself a lattice point) are removed.
pub fn lattice(z: &SpectralPoint, spacing: f64) -> Result<Vec<SpectralPoint>> {
    if !spacing.is_finite() || spacing <= 0.0 {
        return Err(Error::invalid(format!("lattice spacing must be positive, got {spacing}")));
    }
    if spacing < 1e-6 {
        return Err(Error::invalid(format!(
            "lattice spacing {spacing} below the supported floor 1e-6"
        )));
    }
    let mut points = vec![*z];
    if z.eta >= 1.0 {
        return Ok(points);
    }
    let mut k = (z.eta / spacing).ceil() as u64;
    if k == 0 {
        k = 1;
    }
    loop {
        let im = k as f64 * spacing;
        if im > 1.0 + 1e-15 {
            break;
        }
        if (im - z.eta).abs() > 1e-15 {
            points.push(SpectralPoint { e: z.e, eta: im });
        }
        k += 1;
    }
    Ok(points)
}

/// Default lattice spacing max(N^-5, 1e-6).
pub fn default_lattice_spacing(n: usize) -> f64 {
    (n as f64).powi(-5).max(1e-6)
}

/// Tail mass of the continuous Marchenko-Pastur density above `t`,
/// integrated through the substitution x = g- + (g+-g-) sin^2(theta) which
/// removes the inverse-square-root endpoint singularity.
pub fn mp_tail_mass(t: f64, phi: f64) -> Result<f64> {
    let (lo, hi) = mp_edges(phi)?;
    if t >= hi {
        return Ok(0.0);
    }
    let span = hi - lo;
    let t = t.max(lo);
    let theta0 = ((t - lo) / span).clamp(0.0, 1.0).sqrt().asin();
    let pref = phi.sqrt() * span * span / (4.0 * PI);
    let integrand = move |theta: f64| {
        let s2 = (2.0 * theta).sin();
        let x = lo + span * theta.sin().powi(2);
        if x < 1e-300 {
            // reachable only at theta = 0 when gamma_- = 0 (phi = 1), where
            // sin^2(2 theta)/x -> 4 cos^2(theta) / span.
            return phi.sqrt() * span / PI * theta.cos().powi(2);
        }
        pref * s2 * s2 / x
    };
    Ok(adaptive_simpson(&integrand, theta0, PI / 2.0, 1e-13))
}

/// Tail mass of the semicircle density above `t` (closed form).
pub fn sc_tail_mass(t: f64) -> f64 {
    if t <= -2.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 0.0;
    }
    let cdf = 0.5 + (t * (4.0 - t * t).sqrt() + 4.0 * (t / 2.0).asin()) / (4.0 * PI);
    1.0 - cdf
}

/// Classical eigenvalue locations gamma_alpha of the Marchenko-Pastur law,
/// solving `integral_{gamma_alpha}^inf rho_phi = alpha / N` by monotone
/// bisection in `[gamma_-, gamma_+]`. `alphas` are 1-based and must satisfy
/// 1 <= alpha <= K = min(M, N).
pub fn classical_locations(n: usize, m: usize, alphas: &[usize]) -> Result<Vec<f64>> {
    let aspect = AspectRatio::new(m as u64, n as u64)?;
    let phi = aspect.phi();
    let k = aspect.k();
    let (lo, hi) = mp_edges(phi)?;
    let total = mp_tail_mass(lo, phi)?;
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if alpha == 0 || alpha > k {
            return Err(Error::invalid(format!(
                "alpha = {alpha} outside 1..=K with K = {k}"
            )));
        }
        let target = alpha as f64 / n as f64;
        if target >= total - 1e-12 {
            out.push(lo);
            continue;
        }
        let mut a = lo;
        let mut b = hi;
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if mp_tail_mass(mid, phi)? > target {
                a = mid;
            } else {
                b = mid;
            }
            if b - a < 1e-13 {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Classical locations of the semicircle law: `integral_{g_a}^inf rho = a/N`.
pub fn sc_classical_locations(n: usize, alphas: &[usize]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if alpha == 0 || alpha > n {
            return Err(Error::invalid(format!("alpha = {alpha} outside 1..={n}")));
        }
        let target = alpha as f64 / n as f64;
        let mut a = -2.0;
        let mut b = 2.0;
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if sc_tail_mass(mid) > target {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// One grid point of [`law_asymptotics_check`].
#[derive(Debug, Clone)]
pub struct AsymptoticsPoint {
    pub z: SpectralPoint,
    pub abs_m: f64,
    /// |1 - m^2| / sqrt(kappa + eta)
    pub one_minus_m2_ratio: f64,
    /// Im m divided by its two-regime comparison value.
    pub im_ratio: f64,
    pub violations: Vec<String>,
}

/// Report of the comparability checks for m_phi on a grid.
#[derive(Debug, Clone)]
pub struct AsymptoticsReport {
    pub points: Vec<AsymptoticsPoint>,
    pub violations: usize,
}

/// Verifies the elementary comparability properties of m_phi on a grid:
/// |m| and |1 - m^2|/sqrt(kappa+eta) within a factor-10 window of 1, and
/// Im m within factor 10 of its two-regime value. For phi < 1 the check is
/// applied to the dual transform (the properties are stated for phi >= 1).
pub fn law_asymptotics_check(grid: &[SpectralPoint], phi: f64) -> Result<AsymptoticsReport> {
    let eff_phi = if phi >= 1.0 { phi } else { 1.0 / phi };
    let (lo, hi) = mp_edges(eff_phi)?;
    let mut points = Vec::with_capacity(grid.len());
    let mut violations = 0;
    for z in grid {
        let m = mp_stieltjes(z, eff_phi)?;
        let kappa = kappa_mp(z.e, eff_phi)?;
        let root = (kappa + z.eta).sqrt();
        let abs_m = m.norm();
        let one_minus_m2_ratio = (1.0 - m * m).norm() / root;
        let inside = z.e >= lo && z.e <= hi;
        let expected_im = if inside { root } else { z.eta / root };
        let im_ratio = m.im / expected_im;
        let mut excl = Vec::new();
        if !(0.1..=10.0).contains(&abs_m) {
            excl.push(format!("|m| = {abs_m:.3e} outside [0.1, 10]"));
        }
        if !(0.1..=10.0).contains(&one_minus_m2_ratio) {
            excl.push(format!("|1-m^2|/sqrt(k+eta) = {one_minus_m2_ratio:.3e} outside [0.1, 10]"));
        }
        if !(0.1..=10.0).contains(&im_ratio) {
            excl.push(format!("Im m ratio = {im_ratio:.3e} outside [0.1, 10]"));
        }
        violations += usize::from(!excl.is_empty());
        points.push(AsymptoticsPoint {
            z: *z,
            abs_m,
            one_minus_m2_ratio,
            im_ratio,
            violations: excl,
        });
    }
    Ok(AsymptoticsReport { points, violations })
}

/// Fixed-point residual |m + 1/(z + z phi^{-1/2} m - (phi^{1/2}-phi^{-1/2}))|.
pub fn mp_fixed_point_residual(m: C64, z: C64, phi: f64) -> f64 {
    let s = phi.sqrt();
    (m + 1.0 / (z + z / s * m - (s - 1.0 / s))).norm()
}

/// Fixed-point residual |m + 1/(z + m)| of the semicircle transform.
pub fn sc_fixed_point_residual(m: C64, z: C64) -> f64 {
    (m + 1.0 / (z + m)).norm()
}
