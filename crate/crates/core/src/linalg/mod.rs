//! Dense complex linear algebra sized for this problem.
//!
//! Everything downstream operates on small dense matrices: Hankel matrices of
//! a few hundred rows, Vandermonde matrices with a handful of columns, and
//! S×S eigenproblems with S below ~10. The kernel favors verifiable accuracy
//! over speed: one-sided Jacobi for the SVD and shifted Hessenberg QR for
//! eigenvalues.

mod eig;
mod svd;

use crate::error::{Error, Result};
use num_complex::Complex64;

pub use eig::eigenvalues;

/// Default relative threshold below which singular values are treated as
/// zero when inverting: far below any signal singular value in the regimes
/// this crate targets, above roundoff for the dimensions used.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries; every entry must be finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Dimension("non-finite matrix entry".into()));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds entry-wise from `f(row, col)`.
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Conjugate transpose `A*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Entry-wise difference.
    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Scales every entry.
    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    /// Copy of rows `lo..hi`.
    pub fn row_slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi || hi > self.rows {
            return Err(Error::Dimension(format!(
                "row slice {lo}..{hi} out of range for {} rows",
                self.rows
            )));
        }
        Ok(Self::from_fn(hi - lo, self.cols, |i, j| self[(lo + i, j)]))
    }

    /// Copy of columns `lo..hi`.
    pub fn col_slice(&self, lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi || hi > self.cols {
            return Err(Error::Dimension(format!(
                "column slice {lo}..{hi} out of range for {} columns",
                self.cols
            )));
        }
        Ok(Self::from_fn(self.rows, hi - lo, |i, j| self[(i, lo + j)]))
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Spectral norm `σ_1`, computed via the SVD.
    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(svd(self)?.singular_values[0])
    }

    /// Max deviation of `self* · self` from the identity; 0 for a matrix
    /// with orthonormal columns.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.adjoint().matmul(self).expect("shapes agree");
        let mut worst: f64 = 0.0;
        for i in 0..gram.rows {
            for j in 0..gram.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

/// A thin SVD `A = U · diag(σ) · V*` with `min(rows, cols)` triplets.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Left singular vectors, `rows × min(rows, cols)`, orthonormal columns.
    pub u: ComplexMatrix,
    /// Singular values in descending order, all non-negative.
    pub singular_values: Vec<f64>,
    /// Right singular vectors, `cols × min(rows, cols)`, orthonormal columns.
    pub v: ComplexMatrix,
}

impl SvdResult {
    /// `U · diag(σ) · V*`, using the leading `k` triplets.
    pub fn reconstruct_rank(&self, k: usize) -> ComplexMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut out = ComplexMatrix::zeros(m, n);
        for r in 0..k {
            let s = self.singular_values[r];
            for i in 0..m {
                let uis = self.u[(i, r)] * s;
                for j in 0..n {
                    out[(i, j)] += uis * self.v[(j, r)].conj();
                }
            }
        }
        out
    }

    /// Full reconstruction from all triplets.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_rank(self.singular_values.len())
    }
}

/// One-sided Jacobi SVD; see [`svd::jacobi_svd`] for the algorithm.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    svd::jacobi_svd(a)
}

/// Leading-`s` singular triplets `(U_S, Σ_S, V_S)`.
///
/// By Eckart–Young, `U_S · diag(Σ_S) · V_S*` is the spectral-norm-best
/// rank-`s` approximant.
pub fn truncate_rank(
    decomp: &SvdResult,
    s: usize,
) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    if s == 0 || s > decomp.singular_values.len() {
        return Err(Error::Parameter(format!(
            "truncation rank {s} out of range 1..={}",
            decomp.singular_values.len()
        )));
    }
    Ok((
        decomp.u.col_slice(0, s)?,
        decomp.singular_values[..s].to_vec(),
        decomp.v.col_slice(0, s)?,
    ))
}

/// Moore–Penrose pseudoinverse via the SVD, inverting singular values above
/// `rank_tol · σ_1` and zeroing the rest.
pub fn pseudo_inverse(a: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let decomp = svd(a)?;
    let sigma_max = decomp.singular_values[0];
    let threshold = rank_tol * sigma_max;
    let k = decomp.singular_values.len();
    // A† = V · diag(1/σ) · U*
    let mut out = ComplexMatrix::zeros(a.cols, a.rows);
    for r in 0..k {
        let s = decomp.singular_values[r];
        if s <= threshold || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..a.cols {
            let vir = decomp.v[(i, r)] * inv;
            for j in 0..a.rows {
                out[(i, j)] += vir * decomp.u[(j, r)].conj();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::keyed_rng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = keyed_rng(seed, &[rows as u64, cols as u64]);
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    /// Random unitary via the left factor of a random matrix's SVD.
    pub(crate) fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
        let u = svd(&random_matrix(n, n, seed)).unwrap().u;
        assert!(u.orthonormality_defect() < 1e-10);
        u
    }

    #[test]
    fn constructor_validates() {
        assert!(ComplexMatrix::new(2, 2, vec![c(1.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![c(f64::NAN, 0.0); 4]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(1.0, 2.0)]).is_ok());
    }

    #[test]
    fn svd_of_identity() {
        let s = svd(&ComplexMatrix::identity(2)).unwrap();
        assert!((s.singular_values[0] - 1.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_of_orthonormal_column_example() {
        // [0 0; 1 0; 0 1] has orthonormal columns; both singular values 1.
        let a = ComplexMatrix::new(
            3,
            2,
            vec![
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
            ],
        )
        .unwrap();
        let s = svd(&a).unwrap();
        assert!((s.singular_values[0] - 1.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-14);
        let resid = a.sub(&s.reconstruct()).unwrap().frobenius_norm();
        assert!(resid < 1e-13);
    }

    #[test]
    fn svd_of_rank_one_hankel() {
        // Hankel of y_k = e^{-2 pi i k 0.3}, M = 4, L = 2: rank one with
        // sigma_1 = 3 (outer product of two unit-modulus 3-vectors).
        let z = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * 0.3);
        let y: Vec<Complex64> = (0..5).map(|k| z.powu(k)).collect();
        let a = ComplexMatrix::from_fn(3, 3, |i, j| y[i + j]);
        let s = svd(&a).unwrap();
        assert!((s.singular_values[0] - 3.0).abs() < 1e-10);
        assert!(s.singular_values[1].abs() < 1e-10);
        assert!(s.singular_values[2].abs() < 1e-10);
        assert!(s.u.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        for seed in 0..100 {
            let rows = 1 + (seed as usize * 7) % 32;
            let cols = 1 + (seed as usize * 11) % 32;
            let a = random_matrix(rows, cols, seed);
            let s = svd(&a).unwrap();
            let resid = a.sub(&s.reconstruct()).unwrap().frobenius_norm();
            assert!(
                resid <= 1e-10 * a.frobenius_norm().max(1e-300),
                "seed {seed}: relative residual {:e}",
                resid / a.frobenius_norm()
            );
            assert!(s.u.orthonormality_defect() < 1e-12);
            assert!(s.v.orthonormality_defect() < 1e-12);
            for w in s.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert!(s.singular_values.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn svd_of_zero_matrix_completes_basis() {
        let s = svd(&ComplexMatrix::zeros(4, 3)).unwrap();
        assert!(s.singular_values.iter().all(|&x| x == 0.0));
        assert!(s.u.orthonormality_defect() < 1e-14);
        assert!(s.v.orthonormality_defect() < 1e-14);
    }

    #[test]
    fn singular_values_invariant_under_unitaries() {
        for seed in 0..10 {
            let a = random_matrix(8, 8, 500 + seed);
            let q1 = random_unitary(8, 600 + seed);
            let q2 = random_unitary(8, 700 + seed);
            let b = q1.matmul(&a).unwrap().matmul(&q2).unwrap();
            let sa = svd(&a).unwrap().singular_values;
            let sb = svd(&b).unwrap().singular_values;
            let scale = sa[0].max(1.0);
            for (x, y) in sa.iter().zip(&sb) {
                assert!((x - y).abs() <= 1e-10 * scale, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn truncate_full_rank_is_lossless() {
        let a = random_matrix(6, 4, 42);
        let s = svd(&a).unwrap();
        let (u, sig, v) = truncate_rank(&s, 4).unwrap();
        let mut recon = ComplexMatrix::zeros(6, 4);
        for r in 0..4 {
            for i in 0..6 {
                for j in 0..4 {
                    recon[(i, j)] += u[(i, r)] * sig[r] * v[(j, r)].conj();
                }
            }
        }
        let resid = a.sub(&recon).unwrap().frobenius_norm();
        assert!(resid < 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn truncate_diagonal_eckart_young() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(3.0 - i as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let s = svd(&a).unwrap();
        let approx = s.reconstruct_rank(2);
        let err = a.sub(&approx).unwrap().spectral_norm().unwrap();
        assert!((err - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncate_error_matches_next_singular_value() {
        let a = random_matrix(8, 8, 99);
        let s = svd(&a).unwrap();
        let approx = s.reconstruct_rank(3);
        let err = a.sub(&approx).unwrap().spectral_norm().unwrap();
        assert!((err - s.singular_values[3]).abs() < 1e-10 * s.singular_values[0]);
    }

    #[test]
    fn truncate_rank_bounds_checked() {
        let s = svd(&random_matrix(4, 3, 5)).unwrap();
        assert!(truncate_rank(&s, 0).is_err());
        assert!(truncate_rank(&s, 4).is_err());
        assert!(truncate_rank(&s, 3).is_ok());
    }

    #[test]
    fn pseudo_inverse_of_invertible_is_inverse() {
        let a = random_matrix(5, 5, 11);
        let pinv = pseudo_inverse(&a, DEFAULT_RANK_TOL).unwrap();
        let prod = a.matmul(&pinv).unwrap();
        let defect = prod.sub(&ComplexMatrix::identity(5)).unwrap().frobenius_norm();
        assert!(defect < 1e-10, "defect {defect:e}");
    }

    #[test]
    fn pseudo_inverse_of_isometry_is_adjoint() {
        let q = svd(&random_matrix(7, 3, 21)).unwrap().u;
        let pinv = pseudo_inverse(&q, DEFAULT_RANK_TOL).unwrap();
        let diff = pinv.sub(&q.adjoint()).unwrap().frobenius_norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn pseudo_inverse_of_rank_one_projector() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let pinv = pseudo_inverse(&a, DEFAULT_RANK_TOL).unwrap();
        assert!(pinv.sub(&a).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn pseudo_inverse_is_involutive_on_full_rank() {
        for seed in 0..10 {
            let a = random_matrix(6, 6, 300 + seed);
            let back = pseudo_inverse(&pseudo_inverse(&a, DEFAULT_RANK_TOL).unwrap(), DEFAULT_RANK_TOL)
                .unwrap();
            let rel = back.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
            assert!(rel < 1e-8, "seed {seed}: {rel:e}");
        }
    }

    #[test]
    fn penrose_identities_hold() {
        let a = random_matrix(6, 4, 77);
        let p = pseudo_inverse(&a, DEFAULT_RANK_TOL).unwrap();
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        assert!(apa.sub(&a).unwrap().frobenius_norm() < 1e-10);
        let pap = p.matmul(&a).unwrap().matmul(&p).unwrap();
        assert!(pap.sub(&p).unwrap().frobenius_norm() < 1e-10);
        let ap = a.matmul(&p).unwrap();
        assert!(ap.sub(&ap.adjoint()).unwrap().frobenius_norm() < 1e-10);
        let pa = p.matmul(&a).unwrap();
        assert!(pa.sub(&pa.adjoint()).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn eigenvalues_single_atom_rotation() {
        let z = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * 0.3);
        let a = ComplexMatrix::new(1, 1, vec![z]).unwrap();
        let e = eigenvalues(&a).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0] - z).norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_nilpotent_block() {
        let a = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let e = eigenvalues(&a).unwrap();
        assert!(e.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn eigenvalues_by_similarity() {
        // A = P^{-1} diag(e^{-2 pi i 0.1}, e^{-2 pi i 0.2}) P for a random
        // well-conditioned P.
        let tau = 2.0 * std::f64::consts::PI;
        let d1 = Complex64::from_polar(1.0, -tau * 0.1);
        let d2 = Complex64::from_polar(1.0, -tau * 0.2);
        let p = random_matrix(2, 2, 13);
        let pinv = pseudo_inverse(&p, DEFAULT_RANK_TOL).unwrap();
        let d = ComplexMatrix::new(2, 2, vec![d1, c(0.0, 0.0), c(0.0, 0.0), d2]).unwrap();
        let a = pinv.matmul(&d).unwrap().matmul(&p).unwrap();
        let mut e = eigenvalues(&a).unwrap();
        e.sort_by(|x, y| x.arg().partial_cmp(&y.arg()).unwrap());
        let mut expect = [d1, d2];
        expect.sort_by(|x, y| x.arg().partial_cmp(&y.arg()).unwrap());
        for (got, want) in e.iter().zip(expect.iter()) {
            assert!((got - want).norm() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn eigenvalue_trace_identity() {
        for seed in 0..20 {
            let a = random_matrix(8, 8, 900 + seed);
            let e = eigenvalues(&a).unwrap();
            let sum: Complex64 = e.iter().sum();
            let trace: Complex64 = (0..8).map(|i| a[(i, i)]).sum();
            let scale = trace.norm().max(1.0);
            assert!(
                (sum - trace).norm() <= 1e-8 * scale,
                "seed {seed}: {sum} vs {trace}"
            );
        }
    }

    #[test]
    fn eigenvalues_rejects_non_square_and_oversize() {
        assert!(eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
        assert!(eigenvalues(&ComplexMatrix::zeros(65, 65)).is_err());
    }
}
