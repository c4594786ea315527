//! Dense matrix plumbing: sampled matrices, Hermitian eigendecompositions,
//! and resolvent evaluation from a cached decomposition.
//!
//! Real ensembles stay in `f64` end to end (the eigenproblem is four times
//! cheaper than the complex one); quadratic forms accept complex vectors in
//! both cases.

use crate::error::{Error, Result};
use crate::laws::C64;
use faer::prelude::*;
use faer::Side;

/// A sampled matrix X (or Wigner matrix H), real or complex.
#[derive(Debug, Clone)]
pub enum EntryMatrix {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl EntryMatrix {
    pub fn nrows(&self) -> usize {
        match self {
            EntryMatrix::Real(m) => m.nrows(),
            EntryMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            EntryMatrix::Real(m) => m.ncols(),
            EntryMatrix::Complex(m) => m.ncols(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, EntryMatrix::Real(_))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            EntryMatrix::Real(m) => C64::new(m[(i, j)], 0.0),
            EntryMatrix::Complex(m) => m[(i, j)],
        }
    }

    /// Copy with the given rows and columns zeroed out.
    pub fn zeroed(&self, rows: &[usize], cols: &[usize]) -> EntryMatrix {
        let mut out = self.clone();
        match &mut out {
            EntryMatrix::Real(m) => {
                for &r in rows {
                    for j in 0..m.ncols() {
                        m[(r, j)] = 0.0;
                    }
                }
                for &c in cols {
                    for i in 0..m.nrows() {
                        m[(i, c)] = 0.0;
                    }
                }
            }
            EntryMatrix::Complex(m) => {
                for &r in rows {
                    for j in 0..m.ncols() {
                        m[(r, j)] = c64::new(0.0, 0.0);
                    }
                }
                for &c in cols {
                    for i in 0..m.nrows() {
                        m[(i, c)] = c64::new(0.0, 0.0);
                    }
                }
            }
        }
        out
    }

    /// Gram matrix X*X (the sample side, N x N).
    pub fn gram_sample(&self) -> HermitianMatrix {
        match self {
            EntryMatrix::Real(m) => HermitianMatrix::Real(m.transpose() * m),
            EntryMatrix::Complex(m) => HermitianMatrix::Complex(m.adjoint() * m),
        }
    }

    /// Gram matrix XX* (the population side, M x M).
    pub fn gram_population(&self) -> HermitianMatrix {
        match self {
            EntryMatrix::Real(m) => HermitianMatrix::Real(m * m.transpose()),
            EntryMatrix::Complex(m) => HermitianMatrix::Complex(m * m.adjoint()),
        }
    }

    /// Column mu as a complex vector of length M.
    pub fn column(&self, mu: usize) -> Vec<C64> {
        (0..self.nrows()).map(|i| self.get(i, mu)).collect()
    }

    /// Row i as a complex vector of length N.
    pub fn row(&self, i: usize) -> Vec<C64> {
        (0..self.ncols()).map(|j| self.get(i, j)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                best = best.max(self.get(i, j).norm());
            }
        }
        best
    }
}

/// A Hermitian (or real symmetric) matrix to be decomposed.
#[derive(Debug, Clone)]
pub enum HermitianMatrix {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl HermitianMatrix {
    pub fn dim(&self) -> usize {
        match self {
            HermitianMatrix::Real(m) => m.nrows(),
            HermitianMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            HermitianMatrix::Real(m) => C64::new(m[(i, j)], 0.0),
            HermitianMatrix::Complex(m) => m[(i, j)],
        }
    }

    pub fn from_complex_entries(n: usize, f: impl Fn(usize, usize) -> C64) -> HermitianMatrix {
        HermitianMatrix::Complex(Mat::from_fn(n, n, &f))
    }

    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                best = best.max(self.get(i, j).norm());
            }
        }
        best
    }

    /// max |A - A*| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Eigenvector storage of a [`SpectralDecomposition`].
#[derive(Debug, Clone)]
pub enum Basis {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

/// Cached eigendecomposition A = U diag(lambda) U*, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    basis: Basis,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian to within `1e-12 * max(1, |A|_max)`.
pub fn decompose(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let defect = a.hermiticity_defect();
    if defect > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian: max |A - A*| = {defect:.3e}"
        )));
    }
    match a {
        HermitianMatrix::Real(m) => {
            let evd = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::invalid(format!("eigendecomposition failed: {e:?}")))?;
            let n = m.nrows();
            let eigenvalues = (0..n).map(|i| evd.S()[i]).collect();
            Ok(SpectralDecomposition {
                eigenvalues,
                basis: Basis::Real(evd.U().to_owned()),
            })
        }
        HermitianMatrix::Complex(m) => {
            let evd = m
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::invalid(format!("eigendecomposition failed: {e:?}")))?;
            let n = m.nrows();
            let eigenvalues = (0..n).map(|i| evd.S()[i].re).collect();
            Ok(SpectralDecomposition {
                eigenvalues,
                basis: Basis::Complex(evd.U().to_owned()),
            })
        }
    }
}

/// Eigenvalues only (no eigenvector accumulation), ascending.
pub fn eigenvalues_only(a: &HermitianMatrix) -> Result<Vec<f64>> {
    match a {
        HermitianMatrix::Real(m) => m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::invalid(format!("eigenvalue computation failed: {e:?}"))),
        HermitianMatrix::Complex(m) => m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::invalid(format!("eigenvalue computation failed: {e:?}"))),
    }
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let n = self.dim();
        match &self.basis {
            Basis::Real(u) => (0..n).map(|i| C64::new(u[(i, k)], 0.0)).collect(),
            Basis::Complex(u) => (0..n).map(|i| u[(i, k)]).collect(),
        }
    }

    /// Coefficients c_k = <u_k, v> = (U* v)_k.
    pub fn project(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "vector length mismatch");
        let mut out = vec![C64::new(0.0, 0.0); n];
        match &self.basis {
            Basis::Real(u) => {
                for k in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..n {
                        acc += u[(i, k)] * v[i];
                    }
                    out[k] = acc;
                }
            }
            Basis::Complex(u) => {
                for k in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..n {
                        acc += u[(i, k)].conj() * v[i];
                    }
                    out[k] = acc;
                }
            }
        }
        out
    }

    fn check_shift(&self, z: C64) -> Result<()> {
        if z.im == 0.0 {
            let near = self
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |acc, &l| acc.min((l - z.re).abs()));
            if near < 1e-12 {
                return Err(Error::Singular(format!(
                    "z = {} coincides with an eigenvalue at eta = 0",
                    z.re
                )));
            }
        }
        Ok(())
    }

    /// <v, (A - z)^{-1} w> for unit vectors v, w (norms checked to 1e-12).
    pub fn quadratic_form(&self, z: C64, v: &[C64], w: &[C64]) -> Result<C64> {
        let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let nw = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if (nv - 1.0).abs() > 1e-12 || (nw - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "quadratic_form expects unit vectors, got |v| = {nv}, |w| = {nw}"
            )));
        }
        self.check_shift(z)?;
        let cv = self.project(v);
        let cw = self.project(w);
        Ok(self.quadratic_form_projected(z, &cv, &cw))
    }

    /// Quadratic form from precomputed projections (no norm check).
    pub fn quadratic_form_projected(&self, z: C64, cv: &[C64], cw: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.dim() {
            acc += cv[k].conj() * cw[k] / (self.eigenvalues[k] - z);
        }
        acc
    }

    /// tr (A - z)^{-1} = sum_k 1/(lambda_k - z).
    pub fn trace_resolvent(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &l in &self.eigenvalues {
            acc += 1.0 / (C64::new(l, 0.0) - z);
        }
        acc
    }

    /// Resolvent entry (A - z)^{-1}_{ij}.
    pub fn resolvent_entry(&self, z: C64, i: usize, j: usize) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        match &self.basis {
            Basis::Real(u) => {
                for k in 0..n {
                    acc += u[(i, k)] * u[(j, k)] / (C64::new(self.eigenvalues[k], 0.0) - z);
                }
            }
            Basis::Complex(u) => {
                for k in 0..n {
                    acc += u[(i, k)] * u[(j, k)].conj()
                        / (C64::new(self.eigenvalues[k], 0.0) - z);
                }
            }
        }
        acc
    }

    /// Row i of the resolvent.
    pub fn resolvent_row(&self, z: C64, i: usize) -> Vec<C64> {
        let n = self.dim();
        let mut weights = vec![C64::new(0.0, 0.0); n];
        match &self.basis {
            Basis::Real(u) => {
                for k in 0..n {
                    weights[k] = u[(i, k)] / (C64::new(self.eigenvalues[k], 0.0) - z);
                }
                let mut out = vec![C64::new(0.0, 0.0); n];
                for k in 0..n {
                    let wk = weights[k];
                    for j in 0..n {
                        out[j] += wk * u[(j, k)];
                    }
                }
                out
            }
            Basis::Complex(u) => {
                for k in 0..n {
                    weights[k] = u[(i, k)] / (C64::new(self.eigenvalues[k], 0.0) - z);
                }
                let mut out = vec![C64::new(0.0, 0.0); n];
                for k in 0..n {
                    let wk = weights[k];
                    for j in 0..n {
                        out[j] += wk * u[(j, k)].conj();
                    }
                }
                out
            }
        }
    }

    /// Dense resolvent matrix (A - z)^{-1}; intended for small instances.
    pub fn resolvent_matrix(&self, z: C64) -> Mat<c64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| self.resolvent_entry(z, i, j))
    }

    /// max |A - U diag(lambda) U*| over entries.
    pub fn reconstruction_error(&self, a: &HermitianMatrix) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                match &self.basis {
                    Basis::Real(u) => {
                        for k in 0..n {
                            acc += u[(i, k)] * self.eigenvalues[k] * u[(j, k)];
                        }
                    }
                    Basis::Complex(u) => {
                        for k in 0..n {
                            acc += u[(i, k)] * self.eigenvalues[k] * u[(j, k)].conj();
                        }
                    }
                }
                worst = worst.max((acc - a.get(i, j)).norm());
            }
        }
        worst
    }

    /// max |U*U - I| over entries.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                let mut acc = C64::new(0.0, 0.0);
                match &self.basis {
                    Basis::Real(u) => {
                        for i in 0..n {
                            acc += u[(i, a)] * u[(i, b)];
                        }
                    }
                    Basis::Complex(u) => {
                        for i in 0..n {
                            acc += u[(i, a)].conj() * u[(i, b)];
                        }
                    }
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_zero_and_diagonal() {
        let a = HermitianMatrix::Real(Mat::zeros(4, 4));
        let d = decompose(&a).unwrap();
        assert!(d.eigenvalues().iter().all(|&l| l == 0.0));
        let e1: Vec<C64> = (0..4)
            .map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        // resolvent of the zero matrix is -1/z.
        let z = C64::new(0.7, 0.3);
        let q = d.quadratic_form(z, &e1, &e1).unwrap();
        assert!((q + 1.0 / z).norm() < 1e-14);
        assert!((d.trace_resolvent(z) + 4.0 / z).norm() < 1e-13);

        let a = HermitianMatrix::Real(Mat::from_fn(3, 3, |i, j| {
            if i == j {
                (i + 1) as f64
            } else {
                0.0
            }
        }));
        let d = decompose(&a).unwrap();
        let got: Vec<f64> = d.eigenvalues().to_vec();
        assert_eq!(got, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = Mat::<f64>::zeros(3, 3);
        m[(0, 1)] = 1.0;
        assert!(decompose(&HermitianMatrix::Real(m)).is_err());
    }

    #[test]
    fn herglotz_and_reconstruction() {
        use rand::Rng;
        let mut rng = crate::rng::substream(11, 0, 0);
        let x = Mat::<f64>::from_fn(50, 50, |_, _| rng.gen::<f64>() - 0.5);
        let a = HermitianMatrix::Real(x.transpose() * &x);
        let d = decompose(&a).unwrap();
        assert!(d.reconstruction_error(&a) < 1e-10 * a.max_abs());
        assert!(d.orthogonality_defect() < 1e-10);
        // Im <v, R v> > 0 for eta > 0.
        let mut v: Vec<C64> = (0..50)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let q = d.quadratic_form(C64::new(1.0, 0.5), &v, &v).unwrap();
        assert!(q.im > 0.0);
    }

    #[test]
    fn quadratic_form_against_dense_solve() {
        use rand::Rng;
        let mut rng = crate::rng::substream(12, 0, 0);
        let n = 30;
        let x = Mat::<c64>::from_fn(n, n, |_, _| {
            c64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let a = x.adjoint() * &x;
        let herm = HermitianMatrix::Complex(a.clone());
        let d = decompose(&herm).unwrap();
        let z = c64::new(1.0, 0.4);

        let mut v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut w: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        for vec in [&mut v, &mut w] {
            let norm = vec.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            vec.iter_mut().for_each(|x| *x /= norm);
        }

        // dense linear-solve oracle: (A - z) y = w, then <v, y>.
        let shifted = Mat::from_fn(n, n, |i, j| {
            a[(i, j)] - if i == j { z } else { c64::new(0.0, 0.0) }
        });
        let rhs = Mat::from_fn(n, 1, |i, _| w[i]);
        let y = shifted.partial_piv_lu().solve(&rhs);
        let oracle: C64 = (0..n).map(|i| v[i].conj() * y[(i, 0)]).sum();

        let got = d.quadratic_form(z, &v, &w).unwrap();
        assert!((got - oracle).norm() < 1e-9, "{got} vs {oracle}");
    }

    #[test]
    fn zero_matrix_off_diagonal_form_vanishes() {
        // the X = 0 ensemble stub: R = -I/z, so <e0, R e1> - m <e0, e1> = 0
        let d = decompose(&HermitianMatrix::Real(Mat::zeros(4, 4))).unwrap();
        let e0: Vec<C64> = (0..4).map(|i| C64::new(f64::from(u8::from(i == 0)), 0.0)).collect();
        let e1: Vec<C64> = (0..4).map(|i| C64::new(f64::from(u8::from(i == 1)), 0.0)).collect();
        let q = d.quadratic_form(C64::new(0.4, 0.8), &e0, &e1).unwrap();
        assert_eq!(q, C64::new(0.0, 0.0));
    }

    #[test]
    fn resolvent_conjugation_symmetry() {
        use rand::Rng;
        let mut rng = crate::rng::substream(15, 0, 0);
        let n = 12;
        // real symmetric: R is symmetric
        let xr = Mat::<f64>::from_fn(n, n, |_, _| rng.gen::<f64>() - 0.5);
        let dr = decompose(&HermitianMatrix::Real(xr.transpose() * &xr)).unwrap();
        let z = C64::new(0.9, 0.6);
        assert!((dr.resolvent_entry(z, 2, 7) - dr.resolvent_entry(z, 7, 2)).norm() < 1e-13);
        // complex Hermitian: R(conj z) = R(z)^*
        let xc = Mat::<c64>::from_fn(n, n, |_, _| {
            c64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let dc = decompose(&HermitianMatrix::Complex(xc.adjoint() * &xc)).unwrap();
        let a = dc.resolvent_entry(z.conj(), 3, 5);
        let b = dc.resolvent_entry(z, 5, 3).conj();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn trace_by_eigenvalues_matches_trace_by_entries() {
        use rand::Rng;
        let mut rng = crate::rng::substream(14, 0, 0);
        let n = 40;
        let x = Mat::<c64>::from_fn(n, n, |_, _| {
            c64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 0.2
        });
        let d = decompose(&HermitianMatrix::Complex(x.adjoint() * &x)).unwrap();
        let z = C64::new(1.3, 0.4);
        let by_eigenvalues = d.trace_resolvent(z);
        let by_entries: C64 = (0..n).map(|i| d.resolvent_entry(z, i, i)).sum();
        assert!((by_eigenvalues - by_entries).norm() < 1e-9);
    }

    #[test]
    fn singular_shift_rejected() {
        let a = HermitianMatrix::Real(Mat::zeros(3, 3));
        let d = decompose(&a).unwrap();
        let e1: Vec<C64> = (0..3)
            .map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        assert!(d.quadratic_form(C64::new(0.0, 0.0), &e1, &e1).is_err());
    }
}
