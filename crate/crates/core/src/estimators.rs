//! Support estimators: ESPRIT and a MUSIC baseline.
//!
//! Both start from the SVD of the Hankel matrix `H(y)`. ESPRIT forms
//! `Ψ̂ = Û₀† Û₁` from the leading-S left singular vectors and reads the
//! support off the eigenvalue angles; MUSIC scans the orthogonal complement
//! with the imaging function `R(ω) = ‖φ_L(ω)* Û_⊥‖₂ / ‖φ_L(ω)‖₂` and picks
//! its deepest local minima.

use crate::error::{Error, Result};
use crate::forward::{check_window, hankel, steering_vector, vandermonde, Measurement};
use crate::linalg::{eigenvalues, pseudo_inverse, svd, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::measures::{torus_distance, TorusPoint};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Grid points per unit of bandwidth for the default MUSIC grid.
pub const MUSIC_GRID_PER_M: usize = 16;

/// Internals of an ESPRIT run, kept for bound verification.
#[derive(Debug, Clone)]
pub struct EspritDiagnostics {
    /// All singular values of `H(y)` in descending order.
    pub singular_values: Vec<f64>,
    /// Smallest singular value of `Û₀`.
    pub sigma_s_u0: f64,
    /// The S×S matrix `Ψ̂ = Û₀† Û₁`.
    pub psi: ComplexMatrix,
    /// Eigenvalues of `Ψ̂` before projection to the unit circle.
    pub raw_eigenvalues: Vec<Complex64>,
    /// Leading-S left singular vectors of `H(y)`.
    pub signal_basis: ComplexMatrix,
    /// Eigenvalues that were exactly zero (angle undefined, mapped to ω = 0).
    pub zero_eigenvalues: usize,
}

/// Output of a support estimator.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    /// Estimated support `Ω̂` of the requested cardinality (repeats possible
    /// when eigenvalues collide).
    pub support_estimate: Vec<TorusPoint>,
    /// Estimated amplitudes when recovery was performed.
    pub amplitudes_estimate: Option<Vec<Complex64>>,
    /// ESPRIT internals (also populated by MUSIC for the shared SVD part).
    pub diagnostics: EspritDiagnostics,
}

/// Maps an eigenvalue to a torus point via `ω̂ = (−∠λ̂ / 2π) mod 1`.
fn eigenvalue_to_point(lambda: Complex64) -> TorusPoint {
    TorusPoint::new(-lambda.arg() / TAU)
}

/// ESPRIT on `M+1` samples: Hankel, SVD, `Ψ̂ = Û₀†Û₁`, eigenvalue angles.
///
/// Requires `S ≤ L ≤ M+1−S`. For noiseless data this recovers any support
/// exactly (up to roundoff), regardless of the separation.
pub fn esprit(y: &Measurement, s: usize, l: usize) -> Result<EstimationResult> {
    let m = y.bandwidth();
    check_window(s, l, m)?;

    let h = hankel(&y.samples, l)?;
    let decomp = svd(&h)?;
    let u = decomp.u.col_slice(0, s)?;
    let u0 = u.row_slice(0, l)?;
    let u1 = u.row_slice(1, l + 1)?;

    let u0_svd = svd(&u0)?;
    let sigma_s_u0 = u0_svd.singular_values[s - 1];

    let psi = pseudo_inverse(&u0, DEFAULT_RANK_TOL)?.matmul(&u1)?;
    let raw_eigenvalues = eigenvalues(&psi)?;

    let mut zero_eigenvalues = 0;
    let support_estimate = raw_eigenvalues
        .iter()
        .map(|&lam| {
            if lam.norm() == 0.0 {
                zero_eigenvalues += 1;
            }
            eigenvalue_to_point(lam)
        })
        .collect();

    Ok(EstimationResult {
        support_estimate,
        amplitudes_estimate: None,
        diagnostics: EspritDiagnostics {
            singular_values: decomp.singular_values,
            sigma_s_u0,
            psi,
            raw_eigenvalues,
            signal_basis: u,
            zero_eigenvalues,
        },
    })
}

/// MUSIC with `grid_size` imaging points (at least `8M`), each minimum
/// refined by parabolic interpolation of `R²` on the surrounding grid triplet.
pub fn music(y: &Measurement, s: usize, l: usize, grid_size: usize) -> Result<EstimationResult> {
    let m = y.bandwidth();
    check_window(s, l, m)?;
    if grid_size < 8 * m {
        return Err(Error::Parameter(format!(
            "MUSIC grid of {grid_size} points is below the 8M = {} minimum",
            8 * m
        )));
    }

    let h = hankel(&y.samples, l)?;
    let decomp = svd(&h)?;
    if decomp.singular_values[s - 1] <= 0.0 {
        // No subspace gap to scan (e.g. an all-zero measurement).
        return Err(Error::MusicPeakDeficit {
            found: 0,
            needed: s,
        });
    }
    let u = decomp.u.col_slice(0, s)?;
    let u0 = u.row_slice(0, l)?;
    let u1 = u.row_slice(1, l + 1)?;
    let u0_svd = svd(&u0)?;
    let psi = pseudo_inverse(&u0, DEFAULT_RANK_TOL)?.matmul(&u1)?;
    let raw_eigenvalues = eigenvalues(&psi)?;

    // R(ω)² via the complement identity: since [Û Û_⊥] is unitary,
    // ‖φ*Û_⊥‖² = ‖φ‖² − ‖φ*Û‖², avoiding the (L+1)×(L+1−S) matrix.
    let phi_norm_sq = (l + 1) as f64;
    let r_sq: Vec<f64> = (0..grid_size)
        .map(|g| {
            let omega = g as f64 / grid_size as f64;
            let phi = steering_vector(omega, l);
            let mut proj_sq = 0.0;
            for col in 0..s {
                let mut inner = Complex64::new(0.0, 0.0);
                for (row, p) in phi.iter().enumerate() {
                    inner += p.conj() * u[(row, col)];
                }
                proj_sq += inner.norm_sqr();
            }
            ((phi_norm_sq - proj_sq) / phi_norm_sq).max(0.0)
        })
        .collect();

    // Local minima on the circular grid, deepest S kept.
    let mut minima: Vec<(f64, usize)> = (0..grid_size)
        .filter(|&g| {
            let prev = r_sq[(g + grid_size - 1) % grid_size];
            let next = r_sq[(g + 1) % grid_size];
            r_sq[g] < prev && r_sq[g] <= next
        })
        .map(|g| (r_sq[g], g))
        .collect();
    if minima.len() < s {
        return Err(Error::MusicPeakDeficit {
            found: minima.len(),
            needed: s,
        });
    }
    minima.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    minima.truncate(s);

    let support_estimate = minima
        .iter()
        .map(|&(_, g)| {
            let f_prev = r_sq[(g + grid_size - 1) % grid_size];
            let f0 = r_sq[g];
            let f_next = r_sq[(g + 1) % grid_size];
            let denom = f_prev - 2.0 * f0 + f_next;
            let delta = if denom > 0.0 {
                (0.5 * (f_prev - f_next) / denom).clamp(-0.5, 0.5)
            } else {
                0.0
            };
            TorusPoint::new((g as f64 + delta) / grid_size as f64)
        })
        .collect();

    Ok(EstimationResult {
        support_estimate,
        amplitudes_estimate: None,
        diagnostics: EspritDiagnostics {
            sigma_s_u0: u0_svd.singular_values[s - 1],
            singular_values: decomp.singular_values,
            psi,
            raw_eigenvalues,
            signal_basis: u,
            zero_eigenvalues: 0,
        },
    })
}

/// Least-squares amplitudes `x̂ = Φ_M(Ω̂)† y` for a distinct estimated support.
pub fn recover_amplitudes(y: &Measurement, omega_hat: &[TorusPoint]) -> Result<Vec<Complex64>> {
    if omega_hat.is_empty() {
        return Err(Error::Parameter("empty support estimate".into()));
    }
    for i in 0..omega_hat.len() {
        for j in (i + 1)..omega_hat.len() {
            if torus_distance(omega_hat[i], omega_hat[j]) < 1e-13 {
                return Err(Error::RepeatedNodes(i, j));
            }
        }
    }
    let phi = vandermonde(omega_hat, y.bandwidth());
    let pinv = pseudo_inverse(&phi, DEFAULT_RANK_TOL)?;
    pinv.mul_vec(&y.samples)
}
