//! One-sided Jacobi SVD.
//!
//! Cyclic sweeps orthogonalize pairs of columns of the working matrix
//! `B = A·V` with plane rotations; at convergence the column norms are the
//! singular values, the normalized columns form `U`, and the accumulated
//! rotations form `V`. The complex off-diagonal entry of each 2×2 Gram block
//! is phase-rotated to the real axis before the real Jacobi angle is applied.

use super::{ComplexMatrix, SvdResult};
use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

pub fn jacobi_svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if a.rows() < a.cols() {
        // A = U Σ V*  ⇔  A* = V Σ U*
        let flipped = jacobi_svd(&a.adjoint())?;
        return Ok(SvdResult {
            u: flipped.v,
            singular_values: flipped.singular_values,
            v: flipped.u,
        });
    }

    let m = a.rows();
    let n = a.cols();
    // Column-major working copies of B and V.
    let mut b: Vec<Vec<Complex64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            col[j] = Complex64::new(1.0, 0.0);
            col
        })
        .collect();

    let tol = (m as f64).sqrt() * f64::EPSILON;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    app += b[p][i].norm_sqr();
                    aqq += b[q][i].norm_sqr();
                    apq += b[p][i].conj() * b[q][i];
                }
                let g = apq.norm();
                if g <= tol * (app * aqq).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = apq / g;
                // Real Jacobi angle for the phase-aligned 2x2 Gram block.
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau.abs() > 1e150 {
                    0.5 / tau
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase_conj = phase.conj();
                for i in 0..m {
                    let bp = b[p][i];
                    let bq = phase_conj * b[q][i];
                    b[p][i] = c * bp - s * bq;
                    b[q][i] = s * bp + c * bq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = phase_conj * v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNonConvergence { sweeps });
    }

    let mut sigma: Vec<f64> = b
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).expect("finite"));
    b = order.iter().map(|&i| std::mem::take(&mut b[i])).collect();
    v = order.iter().map(|&i| std::mem::take(&mut v[i])).collect();
    sigma = order.iter().map(|&i| sigma[i]).collect();

    // Normalize columns of B into U; exactly-zero columns get a
    // deterministic orthonormal completion from canonical basis vectors.
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (j, col) in b.into_iter().enumerate() {
        if sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            u_cols.push(col.into_iter().map(|z| z * inv).collect());
        } else {
            u_cols.push(complete_column(&u_cols, m));
        }
    }

    let u = ComplexMatrix::from_fn(m, n, |i, j| u_cols[j][i]);
    let v = ComplexMatrix::from_fn(n, n, |i, j| v[j][i]);
    Ok(SvdResult {
        u,
        singular_values: sigma,
        v,
    })
}

/// Canonical basis vector with the largest component outside the span of
/// `cols`, re-orthogonalized twice and normalized. With `d < m` columns the
/// best residual norm is at least `sqrt((m-d)/m)`, so this never degenerates.
fn complete_column(cols: &[Vec<Complex64>], m: usize) -> Vec<Complex64> {
    let orthogonalize = |r: &mut Vec<Complex64>| {
        for _ in 0..2 {
            for col in cols {
                let inner: Complex64 = col.iter().zip(r.iter()).map(|(c, x)| c.conj() * x).sum();
                for i in 0..m {
                    r[i] -= inner * col[i];
                }
            }
        }
    };
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for k in 0..m {
        let mut r = vec![Complex64::new(0.0, 0.0); m];
        r[k] = Complex64::new(1.0, 0.0);
        orthogonalize(&mut r);
        let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().map_or(true, |(b, _)| norm > *b) {
            best = Some((norm, r));
        }
        // Early out on a residual that is already comfortably large.
        if norm > 0.7 {
            break;
        }
    }
    let (norm, r) = best.expect("m > 0");
    assert!(norm > 0.0, "basis completion requested with a full basis");
    let inv = 1.0 / norm;
    r.into_iter().map(|z| z * inv).collect()
}
