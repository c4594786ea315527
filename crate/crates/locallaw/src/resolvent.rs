//! Resolvents of X*X and XX*, their minors, and machine-precision checks of
//! the resolvent identities.
//!
//! Minors are produced by zeroing the removed rows/columns of X and
//! re-decomposing the reduced Gram matrices; results are cached by removal
//! set, so repeated queries are bit-identical.

use crate::error::{Error, Result};
use crate::laws::C64;
use crate::linalg::{decompose, EntryMatrix, SpectralDecomposition};
use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

/// Removal sets: `rows` are population indices 0..M, `cols` are sample
/// indices 0..N. The two index spaces are distinct; a removal never mixes
/// them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MinorSpec {
    pub rows: BTreeSet<usize>,
    pub cols: BTreeSet<usize>,
}

impl MinorSpec {
    pub fn empty() -> Self {
        MinorSpec::default()
    }

    pub fn rows(rows: impl IntoIterator<Item = usize>) -> Self {
        MinorSpec { rows: rows.into_iter().collect(), cols: BTreeSet::new() }
    }

    pub fn cols(cols: impl IntoIterator<Item = usize>) -> Self {
        MinorSpec { rows: BTreeSet::new(), cols: cols.into_iter().collect() }
    }

    pub fn with_row(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.rows.insert(i);
        out
    }

    pub fn with_col(&self, mu: usize) -> Self {
        let mut out = self.clone();
        out.cols.insert(mu);
        out
    }

    pub fn removed(&self) -> usize {
        self.rows.len() + self.cols.len()
    }
}

/// Both-sided resolvent data of one minor: `g` is the decomposition of
/// X^(T)(X^(T))* (population side, M x M) and `r` of (X^(T))*X^(T)
/// (sample side, N x N).
#[derive(Debug)]
pub struct MinorResolvent {
    pub g: SpectralDecomposition,
    pub r: SpectralDecomposition,
    /// X with the removed rows/columns zeroed (the minor's own factor).
    pub x_minor: EntryMatrix,
}

impl MinorResolvent {
    /// Sandwich (X R^(spec) X*)_{ij} = sum_{mu nu} X_{i mu} R_{mu nu} X*_{j nu}*
    /// ... with the *full* X rows i and j (the removed index sets only enter
    /// through the minor resolvent).
    pub fn sandwich_r(&self, x: &EntryMatrix, z: C64, i: usize, j: usize) -> C64 {
        let ri = x.row(i);
        let rj = x.row(j);
        let ci = self.r.project(&conj(&ri));
        let cj = self.r.project(&conj(&rj));
        // sum_k (row_i . v_k)(conj(row_j . v_k)) / (lambda_k - z)
        let mut acc = C64::new(0.0, 0.0);
        let lambda = self.r.eigenvalues();
        for k in 0..lambda.len() {
            // project returns conj(v_k) . w; with w = conj(row) this is
            // conj(v_k . row), so undo the conjugation.
            let pi = ci[k].conj();
            let pj = cj[k].conj();
            acc += pi * pj.conj() / (C64::new(lambda[k], 0.0) - z);
        }
        acc
    }

    /// Sandwich (X* G^(spec) X)_{mu nu} = sum_{ij} X*_{mu i} G_{ij} X_{j nu}.
    pub fn sandwich_g(&self, x: &EntryMatrix, z: C64, mu: usize, nu: usize) -> C64 {
        let cmu = self.g.project(&x.column(mu));
        let cnu = self.g.project(&x.column(nu));
        self.g.quadratic_form_projected(z, &cmu, &cnu)
    }
}

fn conj(v: &[C64]) -> Vec<C64> {
    v.iter().map(|x| x.conj()).collect()
}

/// Minor resolvent factory with caching by removal set.
pub struct MinorSystem {
    x: EntryMatrix,
    cache: RefCell<HashMap<MinorSpec, Rc<MinorResolvent>>>,
    max_removed: usize,
}

impl MinorSystem {
    /// `max_removed` caps |rows| + |cols| per query.
    pub fn new(x: EntryMatrix, max_removed: usize) -> Self {
        MinorSystem { x, cache: RefCell::new(HashMap::new()), max_removed }
    }

    pub fn x(&self) -> &EntryMatrix {
        &self.x
    }

    pub fn m(&self) -> usize {
        self.x.nrows()
    }

    pub fn n(&self) -> usize {
        self.x.ncols()
    }

    /// Decompositions of the requested minor, cached.
    pub fn resolvent(&self, spec: &MinorSpec) -> Result<Rc<MinorResolvent>> {
        if let Some(hit) = self.cache.borrow().get(spec) {
            return Ok(hit.clone());
        }
        if spec.removed() > self.max_removed {
            return Err(Error::Resource(format!(
                "minor removes {} indices, cap is {}",
                spec.removed(),
                self.max_removed
            )));
        }
        if spec.rows.iter().any(|&i| i >= self.m()) || spec.cols.iter().any(|&c| c >= self.n()) {
            return Err(Error::invalid("minor removal index out of range"));
        }
        let rows: Vec<usize> = spec.rows.iter().copied().collect();
        let cols: Vec<usize> = spec.cols.iter().copied().collect();
        let xm = self.x.zeroed(&rows, &cols);
        let g = decompose(&xm.gram_population())?;
        let r = decompose(&xm.gram_sample())?;
        let entry = Rc::new(MinorResolvent { g, r, x_minor: xm });
        self.cache.borrow_mut().insert(spec.clone(), entry.clone());
        Ok(entry)
    }
}

/// Residual report of an identity suite; `scale` is the natural size
/// eta^{-2} against which tolerances are set.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub residuals: Vec<(&'static str, f64)>,
    pub scale: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, (_, r)| a.max(*r))
    }
}

/// Residuals of the three resolvent identities for G (population side):
/// the minor-difference identity, its reciprocal form, and the expansions of
/// diagonal and off-diagonal entries in terms of X and R-minors.
///
/// `t` is the removed row set; `i`, `j` must avoid it (i != j for the
/// off-diagonal identity). The auxiliary index k of the first identity is
/// the smallest row index outside `t + {i, j}`.
pub fn check_identities_g(
    sys: &MinorSystem,
    z: C64,
    t: &BTreeSet<usize>,
    i: usize,
    j: usize,
) -> Result<IdentityReport> {
    if t.contains(&i) || t.contains(&j) {
        return Err(Error::Precondition("i, j must avoid the removed set".into()));
    }
    if i == j {
        return Err(Error::Precondition("off-diagonal identity needs i != j".into()));
    }
    let m = sys.m();
    let k = (0..m)
        .find(|v| !t.contains(v) && *v != i && *v != j)
        .ok_or_else(|| Error::Precondition("no auxiliary row index available".into()))?;

    let spec_t = MinorSpec { rows: t.clone(), cols: BTreeSet::new() };
    let base = sys.resolvent(&spec_t)?;
    let with_k = sys.resolvent(&spec_t.with_row(k))?;
    let with_i = sys.resolvent(&spec_t.with_row(i))?;
    let with_ij = sys.resolvent(&spec_t.with_row(i).with_row(j))?;

    let g = |mr: &MinorResolvent, a: usize, b: usize| mr.g.resolvent_entry(z, a, b);

    // G_ij^(T) = G_ij^(Tk) + G_ik^(T) G_kj^(T) / G_kk^(T)
    let lhs = g(&base, i, j);
    let rhs = g(&with_k, i, j) + g(&base, i, k) * g(&base, k, j) / g(&base, k, k);
    let res1 = (lhs - rhs).norm();

    // 1/G_ii^(T) = 1/G_ii^(Tk) - G_ik^(T) G_ki^(T) / (G_ii^(T) G_ii^(Tk) G_kk^(T))
    let lhs = 1.0 / g(&base, i, i);
    let rhs = 1.0 / g(&with_k, i, i)
        - g(&base, i, k) * g(&base, k, i)
            / (g(&base, i, i) * g(&with_k, i, i) * g(&base, k, k));
    let res2 = (lhs - rhs).norm();

    // 1/G_ii^(T) = -z - z sum X_{i mu} R^(Ti)_{mu nu} X*_{nu i}
    let lhs = 1.0 / g(&base, i, i);
    let rhs = -z - z * with_i.sandwich_r(sys.x(), z, i, i);
    let res3 = (lhs - rhs).norm();

    // G_ij^(T) = z G_ii^(T) G_jj^(iT) sum X_{i mu} R^(Tij)_{mu nu} X*_{nu j}
    let lhs = g(&base, i, j);
    let rhs = z * g(&base, i, i) * g(&with_i, j, j) * with_ij.sandwich_r(sys.x(), z, i, j);
    let res4 = (lhs - rhs).norm();

    Ok(IdentityReport {
        residuals: vec![
            ("G minor difference", res1),
            ("G reciprocal minor difference", res2),
            ("G diagonal expansion", res3),
            ("G off-diagonal expansion", res4),
        ],
        scale: (1.0 / (z.im * z.im)).max(1.0),
    })
}

/// Residuals of the resolvent identities for R (sample side), the
/// row/column-swapped mirror of [`check_identities_g`].
pub fn check_identities_r(
    sys: &MinorSystem,
    z: C64,
    t: &BTreeSet<usize>,
    mu: usize,
    nu: usize,
) -> Result<IdentityReport> {
    if t.contains(&mu) || t.contains(&nu) {
        return Err(Error::Precondition("mu, nu must avoid the removed set".into()));
    }
    if mu == nu {
        return Err(Error::Precondition("off-diagonal identity needs mu != nu".into()));
    }
    let n = sys.n();
    let rho = (0..n)
        .find(|v| !t.contains(v) && *v != mu && *v != nu)
        .ok_or_else(|| Error::Precondition("no auxiliary column index available".into()))?;

    let spec_t = MinorSpec { rows: BTreeSet::new(), cols: t.clone() };
    let base = sys.resolvent(&spec_t)?;
    let with_rho = sys.resolvent(&spec_t.with_col(rho))?;
    let with_mu = sys.resolvent(&spec_t.with_col(mu))?;
    let with_munu = sys.resolvent(&spec_t.with_col(mu).with_col(nu))?;

    let r = |mr: &MinorResolvent, a: usize, b: usize| mr.r.resolvent_entry(z, a, b);

    let lhs = r(&base, mu, nu);
    let rhs = r(&with_rho, mu, nu) + r(&base, mu, rho) * r(&base, rho, nu) / r(&base, rho, rho);
    let res1 = (lhs - rhs).norm();

    let lhs = 1.0 / r(&base, mu, mu);
    let rhs = 1.0 / r(&with_rho, mu, mu)
        - r(&base, mu, rho) * r(&base, rho, mu)
            / (r(&base, mu, mu) * r(&with_rho, mu, mu) * r(&base, rho, rho));
    let res2 = (lhs - rhs).norm();

    // 1/R_mumu^[T] = -z - z sum X*_{mu i} G^[T mu]_{ij} X_{j mu}
    let lhs = 1.0 / r(&base, mu, mu);
    let rhs = -z - z * with_mu.sandwich_g(sys.x(), z, mu, mu);
    let res3 = (lhs - rhs).norm();

    // R_munu^[T] = z R_mumu^[T] R_nunu^[mu T] sum X*_{mu i} G^[T mu nu]_{ij} X_{j nu}
    let lhs = r(&base, mu, nu);
    let rhs = z * r(&base, mu, mu) * r(&with_mu, nu, nu) * with_munu.sandwich_g(sys.x(), z, mu, nu);
    let res4 = (lhs - rhs).norm();

    Ok(IdentityReport {
        residuals: vec![
            ("R minor difference", res1),
            ("R reciprocal minor difference", res2),
            ("R diagonal expansion", res3),
            ("R off-diagonal expansion", res4),
        ],
        scale: (1.0 / (z.im * z.im)).max(1.0),
    })
}

/// Trace identities: `tr R^[T] - tr G^[T] = (M - (N - |T|))/z` and the
/// averaged relation `tr G / M = tr R / (phi N) + (1 - phi)/(phi z)`.
pub fn check_trace_identities(sys: &MinorSystem, z: C64, cols: &BTreeSet<usize>) -> Result<IdentityReport> {
    let m = sys.m() as f64;
    let n = sys.n() as f64;
    let spec = MinorSpec { rows: BTreeSet::new(), cols: cols.clone() };
    let mr = sys.resolvent(&spec)?;
    // The zeroed minor keeps its removed sample directions as extra zero
    // eigenvalues of (X^[T])* X^[T]; its resolvent has |T| diagonal entries
    // equal to -1/z on the removed indices, which we subtract to obtain the
    // trace of the true (N - |T|)-dimensional minor.
    let t = cols.len() as f64;
    let tr_r = mr.r.trace_resolvent(z) + t / z;
    let tr_g = mr.g.trace_resolvent(z);
    let res1 = (tr_r - tr_g - (m - (n - t)) / z).norm();

    let full = sys.resolvent(&MinorSpec::empty())?;
    let phi = m / n;
    let lhs = full.g.trace_resolvent(z) / m;
    let rhs = full.r.trace_resolvent(z) / (phi * n) + (1.0 - phi) / (phi * z);
    let res2 = (lhs - rhs).norm();

    Ok(IdentityReport {
        residuals: vec![("trace minor identity", res1), ("trace G/R relation", res2)],
        scale: (1.0 / (z.im * z.im)).max(1.0),
    })
}

/// Ward identity residual `|sum_j |G^[T]_ij|^2 - Im G^[T]_ii / eta|`.
pub fn check_ward(sys: &MinorSystem, z: C64, cols: &BTreeSet<usize>, i: usize) -> Result<f64> {
    if z.im <= 0.0 {
        return Err(Error::invalid("Ward identity needs eta > 0"));
    }
    let spec = MinorSpec { rows: BTreeSet::new(), cols: cols.clone() };
    let mr = sys.resolvent(&spec)?;
    let row = mr.g.resolvent_row(z, i);
    let lhs: f64 = row.iter().map(|g| g.norm_sqr()).sum();
    let rhs = mr.g.resolvent_entry(z, i, i).im / z.im;
    Ok((lhs - rhs).abs())
}

/// Interlacing margins |tr R^{minor} - tr R| * eta together with the
/// eigenvalue interlacing check for single removals.
#[derive(Debug, Clone)]
pub struct InterlacingReport {
    /// |tr R^{spec} - tr R| * eta.
    pub trace_margin: f64,
    /// Worst signed violation of lambda_{k+1} <= lambda'_k <= lambda_k over
    /// ordered eigenvalues (positive values mean a violation); only set for
    /// single removals.
    pub interlacing_violation: Option<f64>,
}

/// Margin report for the eigenvalue interlacing lemma.
pub fn check_interlacing(sys: &MinorSystem, z: C64, spec: &MinorSpec) -> Result<InterlacingReport> {
    let full = sys.resolvent(&MinorSpec::empty())?;
    let minor = sys.resolvent(spec)?;
    // Compensate the spurious -1/z eigenvalue contributions of zeroed
    // directions (see check_trace_identities).
    let t = spec.cols.len() as f64;
    let tr_r_minor = minor.r.trace_resolvent(z) + t / z;
    let tr_r = full.r.trace_resolvent(z);
    let trace_margin = (tr_r_minor - tr_r).norm() * z.im;

    let interlacing_violation = if spec.removed() == 1 {
        let mut orig: Vec<f64> = full.r.eigenvalues().to_vec();
        orig.sort_by(|a, b| b.total_cmp(a));
        let mut red: Vec<f64> = minor.r.eigenvalues().to_vec();
        red.sort_by(|a, b| b.total_cmp(a));
        if !spec.cols.is_empty() {
            // A zeroed column leaves a structural zero eigenvalue behind;
            // the true minor is the (N-1)-dimensional principal submatrix.
            red.pop();
        }
        // Rows: X*X loses a rank-one PSD term, so the dimension is kept and
        // the same interlacing pattern lambda_{k+1} <= lambda'_k <= lambda_k
        // applies.
        let mut worst = f64::NEG_INFINITY;
        let tol = 1e-9 * (1.0 + orig[0].abs());
        for k in 0..red.len() {
            let upper = orig[k];
            let lower = if k + 1 < orig.len() { orig[k + 1] } else { f64::NEG_INFINITY };
            worst = worst.max(red[k] - upper - tol).max(lower - red[k] - tol);
        }
        Some(worst)
    } else {
        None
    };

    Ok(InterlacingReport { trace_margin, interlacing_violation })
}
