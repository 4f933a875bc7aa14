//! Eigenvalues of small dense complex matrices.
//!
//! Balance (diagonal similarity by powers of two), Householder reduction to
//! upper Hessenberg form, then single-shift QR iteration with Wilkinson
//! shifts and deflation. Sized for the S×S matrices produced by the
//! estimators, with S well below the hard cap.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Hard cap on the eigenproblem size; Ψ is S×S with S small.
pub const MAX_EIG_DIM: usize = 64;

const MAX_ITERS_PER_EIG: usize = 40;

pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if a.rows() != a.cols() {
        return Err(Error::Dimension(format!(
            "eigenvalues of a non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > MAX_EIG_DIM {
        return Err(Error::Parameter(format!(
            "eigenproblem of order {n} exceeds the supported {MAX_EIG_DIM}"
        )));
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }

    let mut h: Vec<Complex64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
    balance(&mut h, n);
    hessenberg(&mut h, n);
    shifted_qr(&mut h, n)
}

/// Parlett–Reinsch balancing: scale rows/columns by powers of two until row
/// and column 1-norms are comparable. Exact in floating point, leaves the
/// spectrum untouched.
fn balance(h: &mut [Complex64], n: usize) {
    const RADIX: f64 = 2.0;
    let b2 = RADIX * RADIX;
    let mut done = false;
    let mut passes = 0;
    while !done && passes < 32 {
        passes += 1;
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[j * n + i].norm();
                    r += h[i * n + j].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut c2 = c;
            let mut g = r / RADIX;
            while c2 < g {
                f *= RADIX;
                c2 *= b2;
            }
            g = r * RADIX;
            while c2 > g {
                f /= RADIX;
                c2 /= b2;
            }
            if (c2 + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    h[i * n + j] *= inv;
                }
                for j in 0..n {
                    h[j * n + i] *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form in place.
fn hessenberg(h: &mut [Complex64], n: usize) {
    for k in 0..n.saturating_sub(2) {
        let mut norm_sq = 0.0;
        for i in (k + 1)..n {
            norm_sq += h[i * n + k].norm_sqr();
        }
        if norm_sq == 0.0 {
            continue;
        }
        let norm = norm_sq.sqrt();
        let x0 = h[(k + 1) * n + k];
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(-norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        // v = x - alpha e_1; with this sign choice v*x is real positive and
        // ||v||^2 = 2 v*x, so H = I - 2vv*/||v||^2 maps x to alpha e_1.
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in (k + 1)..n {
            v[i] = h[i * n + k];
        }
        v[k + 1] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;

        // Left: H <- H - beta v (v* H)
        for j in 0..n {
            let mut inner = Complex64::new(0.0, 0.0);
            for i in (k + 1)..n {
                inner += v[i].conj() * h[i * n + j];
            }
            inner *= beta;
            for i in (k + 1)..n {
                h[i * n + j] -= v[i] * inner;
            }
        }
        // Right: H <- H - beta (H v) v*
        for i in 0..n {
            let mut inner = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                inner += h[i * n + j] * v[j];
            }
            inner *= beta;
            for j in (k + 1)..n {
                h[i * n + j] -= inner * v[j].conj();
            }
        }

        h[(k + 1) * n + k] = alpha;
        for i in (k + 2)..n {
            h[i * n + k] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Eigenvalues of a 2x2 block by the quadratic formula.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    (half_tr + disc, half_tr - disc)
}

/// Single-shift QR with deflation on an upper Hessenberg matrix.
fn shifted_qr(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    let hnorm: f64 = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if hnorm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let negligible = |h: &[Complex64], i: usize| -> bool {
        let local = h[(i - 1) * n + (i - 1)].norm() + h[i * n + i].norm();
        let thr = f64::EPSILON * if local > 0.0 { local } else { hnorm };
        h[i * n + (i - 1)].norm() <= thr
    };

    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iters_at_block = 0;
    let budget = MAX_ITERS_PER_EIG * n;
    let mut total_iters = 0;

    loop {
        // Deflate converged trailing eigenvalues.
        loop {
            if hi == 0 {
                eigs.push(h[0]);
                return Ok(eigs);
            }
            if negligible(h, hi) {
                h[hi * n + hi - 1] = Complex64::new(0.0, 0.0);
                eigs.push(h[hi * n + hi]);
                hi -= 1;
                iters_at_block = 0;
                continue;
            }
            if hi == 1 || negligible(h, hi - 1) {
                if hi >= 2 {
                    h[(hi - 1) * n + hi - 2] = Complex64::new(0.0, 0.0);
                }
                let (l1, l2) = eig2(
                    h[(hi - 1) * n + hi - 1],
                    h[(hi - 1) * n + hi],
                    h[hi * n + hi - 1],
                    h[hi * n + hi],
                );
                eigs.push(l1);
                eigs.push(l2);
                if hi == 1 {
                    return Ok(eigs);
                }
                hi -= 2;
                iters_at_block = 0;
                continue;
            }
            break;
        }

        // Start of the active block: walk up until a negligible subdiagonal.
        let mut lo = hi - 1;
        while lo > 0 && !negligible(h, lo) {
            lo -= 1;
        }

        total_iters += 1;
        iters_at_block += 1;
        if total_iters > budget {
            return Err(Error::EigNonConvergence {
                iterations: total_iters,
            });
        }

        // Wilkinson shift: trailing 2x2 eigenvalue closest to h[hi][hi];
        // occasionally an exceptional shift to break limit cycles.
        let shift = if iters_at_block % 12 == 0 {
            h[hi * n + hi] + Complex64::new(0.75 * h[hi * n + hi - 1].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                h[hi * n + hi],
            );
            let d = h[hi * n + hi];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        // Explicit shifted QR step on the active block: H - mu I = QR, then
        // H <- RQ + mu I via a chain of Givens rotations.
        for i in lo..=hi {
            h[i * n + i] -= shift;
        }
        let mut rot = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[i * n + i], h[(i + 1) * n + i]);
            rot.push((c, s));
            for j in i..=hi {
                let x = h[i * n + j];
                let y = h[(i + 1) * n + j];
                h[i * n + j] = c * x + s * y;
                h[(i + 1) * n + j] = -s.conj() * x + c * y;
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let i = lo + idx;
            let row_end = (i + 2).min(hi + 1);
            for r in lo..row_end {
                let x = h[r * n + i];
                let y = h[r * n + i + 1];
                h[r * n + i] = x * c + y * s.conj();
                h[r * n + i + 1] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[i * n + i] += shift;
        }
    }
}

/// Givens pair `(c, s)` with `c` real such that
/// `[c s; -s* c] [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let fn_ = f.norm();
    let d = (fn_ * fn_ + gn * gn).sqrt();
    if fn_ == 0.0 {
        (0.0, g.conj() / gn * (gn / d))
    } else {
        let c = fn_ / d;
        let s = (f / fn_) * g.conj() / d;
        (c, s)
    }
}
