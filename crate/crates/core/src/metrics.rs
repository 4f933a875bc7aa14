//! Matching distances and every stability bound as a computable check.
//!
//! The support error metric is the min-over-permutations of the max pairwise
//! torus distance; the same bottleneck machinery serves the eigenvalue
//! variant with the complex modulus. Each theoretical inequality (the md
//! relation, the Bauer–Fike route, the two-regime error bound, the U₀ floor,
//! the Moitra bound, the clumps scaling law, the uncertainty principles)
//! is evaluated into a [`BoundReport`] rather than asserted inline, so the
//! experiment driver and the CLI can aggregate them.

use crate::error::{Error, Result};
use crate::estimators::EstimationResult;
use crate::forward::{check_window, fourier_coefficients, hankel, vandermonde};
use crate::linalg::{pseudo_inverse, svd, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::measures::{
    generate_clumps, min_separation_of, torus_distance, AtomicMeasure, ClumpsConfig, TorusPoint,
};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Additive slack absorbing roundoff in non-strict bound checks.
pub const BOUND_SLACK: f64 = 1e-9;

/// Largest multiset size handled by the brute-force permutation scan.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// One evaluated inequality: satisfied iff `lhs <= rhs`.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// Parameter snapshot (`key=value` pairs, semicolon separated).
    pub context: String,
}

impl BoundReport {
    pub fn check(name: &str, lhs: f64, rhs: f64, context: String) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            satisfied: lhs <= rhs,
            context,
        }
    }

    /// `name,lhs,rhs,satisfied,context` CSV row (context quoted).
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},\"{}\"",
            self.name, self.lhs, self.rhs, self.satisfied, self.context
        )
    }
}

// ---------------------------------------------------------------------------
// Matching distances
// ---------------------------------------------------------------------------

fn cost_matrix<T: Copy>(a: &[T], b: &[T], dist: impl Fn(T, T) -> f64) -> Vec<Vec<f64>> {
    a.iter()
        .map(|&x| b.iter().map(|&y| dist(x, y)).collect())
        .collect()
}

/// Min over assignments of the max entry, by exhaustive permutation scan
/// with pruning.
fn bottleneck_brute(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let mut used = vec![false; n];
    let mut best = f64::INFINITY;
    fn recurse(
        cost: &[Vec<f64>],
        used: &mut [bool],
        row: usize,
        current_max: f64,
        best: &mut f64,
    ) {
        if current_max >= *best {
            return;
        }
        if row == cost.len() {
            *best = current_max;
            return;
        }
        for col in 0..cost.len() {
            if !used[col] {
                used[col] = true;
                recurse(cost, used, row + 1, current_max.max(cost[row][col]), best);
                used[col] = false;
            }
        }
    }
    recurse(cost, &mut used, 0, 0.0, &mut best);
    best
}

/// Kuhn's augmenting-path matching restricted to edges with cost <= `thr`.
fn has_perfect_matching(cost: &[Vec<f64>], thr: f64) -> bool {
    let n = cost.len();
    let mut matched_col: Vec<Option<usize>> = vec![None; n];
    fn augment(
        cost: &[Vec<f64>],
        thr: f64,
        row: usize,
        seen: &mut [bool],
        matched_col: &mut [Option<usize>],
    ) -> bool {
        for col in 0..cost.len() {
            if cost[row][col] <= thr && !seen[col] {
                seen[col] = true;
                let free = match matched_col[col] {
                    None => true,
                    Some(other) => augment(cost, thr, other, seen, matched_col),
                };
                if free {
                    matched_col[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }
    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(cost, thr, row, &mut seen, &mut matched_col) {
            return false;
        }
    }
    true
}

/// Min over assignments of the max entry, by binary search over the distinct
/// costs with a maximum-matching feasibility test. Exact, like the brute
/// force, since the optimum is always one of the entries.
fn bottleneck_matching(cost: &[Vec<f64>]) -> f64 {
    let mut thresholds: Vec<f64> = cost.iter().flatten().copied().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    thresholds.dedup();
    let mut lo = 0usize;
    let mut hi = thresholds.len() - 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if has_perfect_matching(cost, thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    thresholds[lo]
}

fn matching_distance_impl<T: Copy>(
    a: &[T],
    b: &[T],
    dist: impl Fn(T, T) -> f64,
    force_bottleneck: Option<bool>,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "matching distance of multisets with sizes {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Dimension("matching distance of empty multisets".into()));
    }
    let cost = cost_matrix(a, b, dist);
    let use_bottleneck = force_bottleneck.unwrap_or(a.len() > BRUTE_FORCE_LIMIT);
    Ok(if use_bottleneck {
        bottleneck_matching(&cost)
    } else {
        bottleneck_brute(&cost)
    })
}

/// Support matching distance
/// `md(Ω, Ω̂) = min_ψ max_j |ω̂_{ψ(j)} − ω_j|_𝕋`.
pub fn matching_distance(omega: &[TorusPoint], omega_hat: &[TorusPoint]) -> Result<f64> {
    matching_distance_impl(omega, omega_hat, torus_distance, None)
}

/// [`matching_distance`] forced through the permutation scan.
pub fn matching_distance_brute_force(
    omega: &[TorusPoint],
    omega_hat: &[TorusPoint],
) -> Result<f64> {
    matching_distance_impl(omega, omega_hat, torus_distance, Some(false))
}

/// [`matching_distance`] forced through the bottleneck matcher.
pub fn matching_distance_bottleneck(
    omega: &[TorusPoint],
    omega_hat: &[TorusPoint],
) -> Result<f64> {
    matching_distance_impl(omega, omega_hat, torus_distance, Some(true))
}

/// Eigenvalue matching distance
/// `md(Ψ, Ψ̂) = min_ψ max_j |λ̂_{ψ(j)} − λ_j|`.
pub fn eigenvalue_matching_distance(lams: &[Complex64], lams_hat: &[Complex64]) -> Result<f64> {
    matching_distance_impl(lams, lams_hat, |x, y| (x - y).norm(), None)
}

/// The eigenvalues `e^{−2πiω_j}` of the noiseless Ψ for a support.
pub fn unit_eigenvalues(omega: &[TorusPoint]) -> Vec<Complex64> {
    omega
        .iter()
        .map(|p| Complex64::from_polar(1.0, -TAU * p.value()))
        .collect()
}

/// Checks `md(Ω, Ω̂) ≤ ½·md(Ψ, Ψ̂)`, with roundoff slack.
pub fn check_md_relation(
    omega: &[TorusPoint],
    omega_hat: &[TorusPoint],
    lams: &[Complex64],
    lams_hat: &[Complex64],
) -> Result<BoundReport> {
    let md_omega = matching_distance(omega, omega_hat)?;
    let md_psi = eigenvalue_matching_distance(lams, lams_hat)?;
    Ok(BoundReport::check(
        "md_relation",
        md_omega,
        0.5 * md_psi + 1e-12,
        format!("S={};md_psi={md_psi}", omega.len()),
    ))
}

// ---------------------------------------------------------------------------
// Singular-value bounds
// ---------------------------------------------------------------------------

/// `σ_S(Φ_M(Ω))`, the smallest singular value of the Vandermonde matrix.
pub fn sigma_min_vandermonde(omega: &[TorusPoint], m: usize) -> Result<f64> {
    if omega.len() > m + 1 {
        return Err(Error::Parameter(format!(
            "sigma_min of a {}x{} Vandermonde with more columns than rows",
            m + 1,
            omega.len()
        )));
    }
    let decomp = svd(&vandermonde(omega, m))?;
    Ok(decomp.singular_values[omega.len() - 1])
}

/// Moitra's well-separated bound `(C−1)/C · M ≤ σ_S²(Φ_M)` for `Δ ≥ C/M`.
pub fn check_moitra_bound(omega: &[TorusPoint], m: usize) -> Result<BoundReport> {
    let delta = min_separation_of(omega)?;
    let c = delta * m as f64;
    if c <= 1.0 {
        return Err(Error::Parameter(format!(
            "Moitra bound needs Delta > 1/M (C = {c})"
        )));
    }
    let sigma = sigma_min_vandermonde(omega, m)?;
    Ok(BoundReport::check(
        "moitra_sigma_sq",
        (c - 1.0) / c * m as f64,
        sigma * sigma,
        format!("S={};M={m};C={c}", omega.len()),
    ))
}

/// Least-squares line through `(x_i, y_i)`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares fit; needs at least two distinct abscissae.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Parameter(format!(
            "linear fit needs >= 2 paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let syy: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("degenerate abscissae in linear fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Scaling of `σ_S(Φ_{M/2})` with the super-resolution factor under the
/// clumps model.
#[derive(Debug, Clone)]
pub struct ClumpsScalingReport {
    /// `(srf, σ_S(Φ_{M/2}))` for every feasible grid point.
    pub points: Vec<(f64, f64)>,
    /// Grid values whose configuration was infeasible and skipped.
    pub skipped: Vec<f64>,
    pub fit: LineFit,
    /// Largest clump cardinality λ; the predicted slope is `−(λ−1)`.
    pub lambda: usize,
}

/// Sweeps `α = 1/SRF` over `srf_grid`, generates a clumps support at
/// bandwidth `M` for each, and fits `log σ_S(Φ_{M/2})` against `log SRF`.
/// Infeasible grid points are skipped and reported.
pub fn check_clumps_scaling(
    m: usize,
    clump_sizes: &[usize],
    beta: f64,
    srf_grid: &[f64],
    seed: u64,
) -> Result<ClumpsScalingReport> {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    let mut lambda = 0;
    for &srf in srf_grid {
        let alpha = 1.0 / srf;
        let cfg = match ClumpsConfig::new(m, clump_sizes.to_vec(), alpha, beta) {
            Ok(cfg) => cfg,
            Err(_) => {
                skipped.push(srf);
                continue;
            }
        };
        lambda = cfg.lambda_max();
        let support = match generate_clumps(&cfg, seed) {
            Ok(s) => s,
            Err(_) => {
                skipped.push(srf);
                continue;
            }
        };
        let sigma = sigma_min_vandermonde(&support, m / 2)?;
        points.push((srf, sigma));
    }
    if points.len() < 3 {
        return Err(Error::Parameter(format!(
            "clumps scaling needs >= 3 feasible grid points, got {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|(s, _)| s.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.log10()).collect();
    Ok(ClumpsScalingReport {
        fit: linear_fit(&xs, &ys)?,
        points,
        skipped,
        lambda,
    })
}

/// Lower bound on the clipped singular values of `U₀`, `U₁`:
/// `min(σ_S²(U₀), σ_S²(U₁)) ≥ max(1 − S/σ_S²(Φ_L), 4^{−S})`.
///
/// `u` must have orthonormal columns (the signal basis of a noiseless run);
/// `sigma_phi_l` is `σ_S(Φ_L)` for the same support.
pub fn check_u0_bound(u: &ComplexMatrix, sigma_phi_l: f64, s: usize) -> Result<BoundReport> {
    if u.cols() != s {
        return Err(Error::Dimension(format!(
            "signal basis has {} columns, expected S = {s}",
            u.cols()
        )));
    }
    let defect = u.orthonormality_defect();
    if defect > 1e-8 {
        return Err(Error::Parameter(format!(
            "basis is not orthonormal (defect {defect:e})"
        )));
    }
    let l = u.rows() - 1;
    let u0 = u.row_slice(0, l)?;
    let u1 = u.row_slice(1, l + 1)?;
    let s0 = svd(&u0)?.singular_values[s - 1];
    let s1 = svd(&u1)?.singular_values[s - 1];
    let observed = (s0 * s0).min(s1 * s1);
    let bound = (1.0 - s as f64 / (sigma_phi_l * sigma_phi_l)).max(0.25f64.powi(s as i32));
    Ok(BoundReport::check(
        "u0_sigma_floor",
        bound - BOUND_SLACK,
        observed,
        format!("S={s};L={l};sigma_phi_L={sigma_phi_l}"),
    ))
}

// ---------------------------------------------------------------------------
// Two-regime error bound
// ---------------------------------------------------------------------------

/// Which noise regime applies at a given Hankel noise norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseRegime {
    Small,
    Moderate,
    None,
}

/// Evaluated error bound for one noise realization.
#[derive(Debug, Clone, Copy)]
pub struct ErrorBoundAssessment {
    pub regime: NoiseRegime,
    /// The bound for the active regime; infinite when no condition holds.
    pub bound: f64,
    /// Bound under the moderate-noise condition, when it holds.
    pub moderate: Option<f64>,
    /// Bound under the small-noise condition, when it holds.
    pub small: Option<f64>,
}

/// Noise-independent constants of the two-regime bound for one measure.
///
/// `σ_S(U₀)` is taken from the noiseless signal basis. The small-noise
/// regime requires the minimum separation, so for a single atom only the
/// moderate regime is evaluated.
#[derive(Debug, Clone)]
pub struct ErrorBoundConstants {
    pub s: usize,
    pub l: usize,
    pub x_min: f64,
    pub delta: Option<f64>,
    pub sigma_phi_l: f64,
    pub sigma_phi_ml: f64,
    pub sigma_u0: f64,
    moderate_cap: f64,
    moderate_per_noise: f64,
    small_cap: Option<f64>,
    small_per_noise: f64,
}

impl ErrorBoundConstants {
    pub fn new(measure: &AtomicMeasure, m: usize, l: usize) -> Result<Self> {
        let s = measure.num_atoms();
        check_window(s, l, m)?;
        let x_min = measure.x_min();
        let delta = if s >= 2 {
            Some(min_separation_of(measure.support())?)
        } else {
            None
        };
        let sigma_phi_l = sigma_min_vandermonde(measure.support(), l)?;
        let sigma_phi_ml = sigma_min_vandermonde(measure.support(), m - l)?;

        let y0 = fourier_coefficients(measure, m);
        let h0 = hankel(&y0, l)?;
        let u = svd(&h0)?.u.col_slice(0, s)?;
        let u0 = u.row_slice(0, l)?;
        let sigma_u0 = svd(&u0)?.singular_values[s - 1];

        let sf = s as f64;
        let lp1 = (l + 1) as f64;
        let moderate_cap =
            x_min * sigma_u0 * sigma_phi_l * sigma_phi_ml / (4.0 * (2.0 * sf).sqrt());
        let moderate_per_noise = 20.0 * sf * sf * lp1.sqrt()
            / (x_min * sigma_u0.powi(2) * sigma_phi_l.powi(2) * sigma_phi_ml);
        let small_cap = delta.map(|d| {
            x_min * d * sigma_u0.powi(2) * sigma_phi_l.powi(3) * sigma_phi_ml
                / (20.0 * sf.powf(2.5) * lp1)
        });
        let small_per_noise =
            20.0 * sf.sqrt() / (x_min * sigma_u0.powi(2) * sigma_phi_l * sigma_phi_ml);

        Ok(Self {
            s,
            l,
            x_min,
            delta,
            sigma_phi_l,
            sigma_phi_ml,
            sigma_u0,
            moderate_cap,
            moderate_per_noise,
            small_cap,
            small_per_noise,
        })
    }

    /// Applies the conditions to one realization's `‖H(η)‖₂`.
    pub fn assess(&self, hankel_noise_norm: f64) -> ErrorBoundAssessment {
        let moderate = (hankel_noise_norm <= self.moderate_cap)
            .then(|| self.moderate_per_noise * hankel_noise_norm);
        let small = self
            .small_cap
            .filter(|&cap| hankel_noise_norm <= cap)
            .map(|_| self.small_per_noise * hankel_noise_norm);
        let (regime, bound) = match (small, moderate) {
            (Some(b), _) => (NoiseRegime::Small, b),
            (None, Some(b)) => (NoiseRegime::Moderate, b),
            (None, None) => (NoiseRegime::None, f64::INFINITY),
        };
        ErrorBoundAssessment {
            regime,
            bound,
            moderate,
            small,
        }
    }
}

/// One-shot form of the two-regime bound.
pub fn predicted_error_bound(
    measure: &AtomicMeasure,
    m: usize,
    l: usize,
    hankel_noise_norm: f64,
) -> Result<ErrorBoundAssessment> {
    Ok(ErrorBoundConstants::new(measure, m, l)?.assess(hankel_noise_norm))
}

// ---------------------------------------------------------------------------
// Bauer–Fike route
// ---------------------------------------------------------------------------

/// Rebuilds the noiseless `Ψ` with its basis aligned to the noisy run
/// (columns matched by maximal |inner product|, phases rotated to make the
/// inner products real positive) and checks
/// `md(Ω, Ω̂) ≤ S^{3/2}·√(L+1)·‖Ψ̂ − Ψ‖₂ / σ_S(Φ_L)`.
pub fn check_bauer_fike(
    measure: &AtomicMeasure,
    m: usize,
    l: usize,
    run: &EstimationResult,
) -> Result<BoundReport> {
    let s = measure.num_atoms();
    check_window(s, l, m)?;
    let y0 = fourier_coefficients(measure, m);
    let h0 = hankel(&y0, l)?;
    let clean_u = svd(&h0)?.u.col_slice(0, s)?;
    let aligned = align_basis(&clean_u, &run.diagnostics.signal_basis)?;
    let u0 = aligned.row_slice(0, l)?;
    let u1 = aligned.row_slice(1, l + 1)?;
    let psi = pseudo_inverse(&u0, DEFAULT_RANK_TOL)?.matmul(&u1)?;

    let diff_norm = run.diagnostics.psi.sub(&psi)?.spectral_norm()?;
    let sigma_phi_l = sigma_min_vandermonde(measure.support(), l)?;
    let md = matching_distance(measure.support(), &run.support_estimate)?;
    let rhs =
        (s as f64).powf(1.5) * ((l + 1) as f64).sqrt() * diff_norm / sigma_phi_l + BOUND_SLACK;
    Ok(BoundReport::check(
        "bauer_fike_md",
        md,
        rhs,
        format!("S={s};L={l};psi_diff={diff_norm};sigma_phi_L={sigma_phi_l}"),
    ))
}

/// Permutes and phase-rotates the columns of `basis` to match `target`
/// greedily by |inner product|.
fn align_basis(basis: &ComplexMatrix, target: &ComplexMatrix) -> Result<ComplexMatrix> {
    if basis.rows() != target.rows() || basis.cols() != target.cols() {
        return Err(Error::Dimension("basis alignment shape mismatch".into()));
    }
    let (rows, cols) = (basis.rows(), basis.cols());
    let mut taken = vec![false; cols];
    let mut aligned = ComplexMatrix::zeros(rows, cols);
    for t in 0..cols {
        let mut best: Option<(f64, usize, Complex64)> = None;
        for j in 0..cols {
            if taken[j] {
                continue;
            }
            let mut inner = Complex64::new(0.0, 0.0);
            for i in 0..rows {
                inner += basis[(i, j)].conj() * target[(i, t)];
            }
            let mag = inner.norm();
            if best.as_ref().map_or(true, |(b, _, _)| mag > *b) {
                best = Some((mag, j, inner));
            }
        }
        let (mag, j, inner) = best.expect("cols > 0");
        taken[j] = true;
        // Rotate so the inner product with the target column is real >= 0.
        let phase = if mag > 0.0 {
            inner / mag
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..rows {
            aligned[(i, t)] = basis[(i, j)] * phase;
        }
    }
    Ok(aligned)
}

// ---------------------------------------------------------------------------
// Uncertainty constants
// ---------------------------------------------------------------------------

/// Fourier coefficient `μ̂(k)` for any integer `k`.
pub fn fourier_coefficient_at(measure: &AtomicMeasure, k: i64) -> Complex64 {
    measure
        .support()
        .iter()
        .zip(measure.amplitudes())
        .map(|(p, x)| x * Complex64::from_polar(1.0, -TAU * k as f64 * p.value()))
        .sum()
}

/// Concentration constant `C_N(μ) = |μ̂(0)| / (Σ_{k=0}^{N−1} |μ̂(k)|²)^{1/2}`.
///
/// Well-defined for `N ≥ S`; smaller windows can have zero denominator.
pub fn uncertainty_constant(measure: &AtomicMeasure, n: usize) -> Result<f64> {
    let s = measure.num_atoms();
    if n < s {
        return Err(Error::UncertaintyWindowTooShort { n, s });
    }
    let coeffs: Vec<Complex64> = (0..n as i64)
        .map(|k| fourier_coefficient_at(measure, k))
        .collect();
    let denom_sq: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    Ok(coeffs[0].norm() / denom_sq.sqrt())
}

/// Vanishing trigonometric polynomial
/// `p_Ω(t) = (−1)^S Π_j (e^{2πi(t−ω_j)} − 1)`; its zero set is exactly `Ω`
/// and its sup norm over the torus is at most `2^S`.
pub fn vanishing_polynomial(omega: &[TorusPoint], t: TorusPoint) -> Complex64 {
    let sign = if omega.len() % 2 == 0 { 1.0 } else { -1.0 };
    omega.iter().fold(Complex64::new(sign, 0.0), |acc, w| {
        acc * (Complex64::from_polar(1.0, TAU * (t.value() - w.value())) - 1.0)
    })
}

/// Counts coefficients in the window `start..start+n` with modulus above
/// `rel_tol · max_k |μ̂(k)|`. At least `⌊N/S⌋` are nonzero for any window of
/// `N` consecutive coefficients.
pub fn count_nonzero_coefficients(
    measure: &AtomicMeasure,
    start: i64,
    n: usize,
    rel_tol: f64,
) -> usize {
    let mags: Vec<f64> = (0..n as i64)
        .map(|off| fourier_coefficient_at(measure, start + off).norm())
        .collect();
    let max = mags.iter().fold(0.0f64, |a, &b| a.max(b));
    let tol = rel_tol * max;
    mags.iter().filter(|&&v| v > tol).count()
}

/// Best `C_N` over amplitudes for a fixed support: the squared norm of the
/// projection of `e₀` onto the range of `Φ_{N−1}(Ω)`.
pub fn uncertainty_constant_optimal_complex(omega: &[TorusPoint], n: usize) -> Result<f64> {
    let s = omega.len();
    if n < s {
        return Err(Error::UncertaintyWindowTooShort { n, s });
    }
    let u = svd(&vandermonde(omega, n - 1))?.u.col_slice(0, s)?;
    let proj_sq: f64 = (0..s).map(|j| u[(0, j)].norm_sqr()).sum();
    Ok(proj_sq.sqrt().min(1.0))
}

/// Best `C_N` over *real* amplitudes for a fixed support:
/// `C² = 𝟙ᵀ(Re G)⁻¹𝟙` with `G = Φ*Φ` the Gram matrix.
pub fn uncertainty_constant_optimal_real(omega: &[TorusPoint], n: usize) -> Result<f64> {
    let s = omega.len();
    if n < s {
        return Err(Error::UncertaintyWindowTooShort { n, s });
    }
    let phi = vandermonde(omega, n - 1);
    let gram = phi.adjoint().matmul(&phi)?;
    let re_gram = ComplexMatrix::from_fn(s, s, |i, j| Complex64::new(gram[(i, j)].re, 0.0));
    let inv = pseudo_inverse(&re_gram, DEFAULT_RANK_TOL)?;
    let ones = vec![Complex64::new(1.0, 0.0); s];
    let z = inv.mul_vec(&ones)?;
    let c_sq: f64 = z.iter().map(|v| v.re).sum();
    Ok(c_sq.max(0.0).sqrt().min(1.0))
}

/// Result of the random-restart extremal search for `C_{N,S}`.
///
/// The reported value is a *lower* bound on the supremum; it is never
/// asserted as the supremum itself.
#[derive(Debug, Clone)]
pub struct UncertaintySearch {
    pub best_value: f64,
    pub best_support: Vec<TorusPoint>,
}

/// Separation floor for the extremal search domain. Below this the optimal
/// amplitudes run through a numerically confluent Vandermonde whose computed
/// range is meaningless, which inflates the objective past proven caps. The
/// search therefore maximizes over `Δ ≥ 10⁻³` only; since it reports a lower
/// bound on the supremum, restricting the domain keeps the report honest.
const SEARCH_MIN_SEPARATION: f64 = 1e-3;

/// Random restarts plus coordinate ascent over the support, with amplitudes
/// optimized in closed form at every step.
pub fn extremal_uncertainty_search(
    s: usize,
    n: usize,
    real_amplitudes: bool,
    restarts: usize,
    seed: u64,
) -> Result<UncertaintySearch> {
    use rand::Rng;
    if n < s {
        return Err(Error::UncertaintyWindowTooShort { n, s });
    }
    let separated = |omega: &[TorusPoint]| {
        (0..s).all(|i| {
            ((i + 1)..s).all(|j| torus_distance(omega[i], omega[j]) >= SEARCH_MIN_SEPARATION)
        })
    };
    let objective = |omega: &[TorusPoint]| -> Result<f64> {
        if real_amplitudes {
            uncertainty_constant_optimal_real(omega, n)
        } else {
            uncertainty_constant_optimal_complex(omega, n)
        }
    };
    let mut best = UncertaintySearch {
        best_value: 0.0,
        best_support: Vec::new(),
    };
    for restart in 0..restarts {
        let mut rng = crate::seeding::keyed_rng(seed, &[0x7563, restart as u64]);
        let mut omega: Vec<TorusPoint> = loop {
            let candidate: Vec<TorusPoint> = (0..s)
                .map(|_| TorusPoint::new(rng.gen_range(0.0..1.0)))
                .collect();
            if separated(&candidate) {
                break candidate;
            }
        };
        let mut value = objective(&omega)?;
        let mut step = 0.05;
        while step > 1e-7 {
            let mut improved = false;
            for j in 0..s {
                for dir in [-1.0, 1.0] {
                    let mut trial = omega.clone();
                    trial[j] = TorusPoint::new(trial[j].value() + dir * step);
                    if !separated(&trial) {
                        continue;
                    }
                    let trial_value = objective(&trial)?;
                    if trial_value > value {
                        value = trial_value;
                        omega = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if value > best.best_value {
            best.best_value = value;
            best.best_support = omega;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::esprit;
    use crate::forward::{add_noise, fourier_coefficients};
    use crate::seeding::keyed_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn pt(v: f64) -> TorusPoint {
        TorusPoint::new(v)
    }

    fn random_support(s: usize, min_delta: f64, seed: u64) -> Vec<TorusPoint> {
        let mut rng = keyed_rng(seed, &[0x737570]);
        loop {
            let pts: Vec<TorusPoint> = (0..s).map(|_| pt(rng.gen_range(0.0..1.0))).collect();
            if (0..s).all(|i| ((i + 1)..s).all(|j| torus_distance(pts[i], pts[j]) >= min_delta)) {
                return pts;
            }
        }
    }

    fn random_unit_measure(support: Vec<TorusPoint>, seed: u64) -> AtomicMeasure {
        let mut rng = keyed_rng(seed, &[0x616d70]);
        let amps = (0..support.len())
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..TAU)))
            .collect();
        AtomicMeasure::new(support, amps).unwrap()
    }

    #[test]
    fn matching_identity_and_order() {
        let a = [pt(0.0), pt(0.5)];
        let b = [pt(0.5), pt(0.0)];
        assert_eq!(matching_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(matching_distance(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn matching_wraparound_pairing() {
        let omega = [pt(0.1), pt(0.9)];
        let omega_hat = [pt(0.92), pt(0.11)];
        let md = matching_distance(&omega, &omega_hat).unwrap();
        assert!((md - 0.02).abs() < 1e-15, "md = {md}");
    }

    #[test]
    fn matching_rejects_length_mismatch() {
        assert!(matching_distance(&[pt(0.1)], &[pt(0.1), pt(0.2)]).is_err());
        assert!(eigenvalue_matching_distance(
            &[Complex64::new(1.0, 0.0)],
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]
        )
        .is_err());
    }

    #[test]
    fn eigenvalue_matching_chord_length() {
        let lams = [Complex64::new(1.0, 0.0)];
        let lams_hat = [Complex64::from_polar(1.0, 0.1)];
        let md = eigenvalue_matching_distance(&lams, &lams_hat).unwrap();
        let expect = 2.0 * (0.05f64).sin();
        assert!((md - expect).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_matching_antipodal_swap() {
        let lams = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let swapped = [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(eigenvalue_matching_distance(&lams, &swapped).unwrap(), 0.0);
    }

    #[test]
    fn bottleneck_equals_brute_force() {
        for seed in 0..200 {
            let a = random_support(7, 1e-4, 10_000 + seed);
            let b = random_support(7, 1e-4, 20_000 + seed);
            let brute = matching_distance_brute_force(&a, &b).unwrap();
            let bottleneck = matching_distance_bottleneck(&a, &b).unwrap();
            assert_eq!(brute, bottleneck, "seed {seed}");
        }
    }

    #[test]
    fn md_relation_synthetic_rotation() {
        // omega = 0, lambda_hat = e^{-2 pi i 0.01}: arc 0.01 vs chord/2.
        let report = check_md_relation(
            &[pt(0.0)],
            &[pt(0.01)],
            &unit_eigenvalues(&[pt(0.0)]),
            &[Complex64::from_polar(1.0, -TAU * 0.01)],
        )
        .unwrap();
        assert!(report.satisfied, "{report:?}");
        assert!((report.lhs - 0.01).abs() < 1e-12);
    }

    #[test]
    fn md_relation_on_noisy_esprit_runs() {
        for seed in 0..20 {
            let support = random_support(3, 0.02, 300 + seed);
            let measure = random_unit_measure(support, 400 + seed);
            let y0 = fourier_coefficients(&measure, 40);
            let y = add_noise(&y0, 1e-3, 500 + seed);
            let run = esprit(&y, 3, 20).unwrap();
            let report = check_md_relation(
                measure.support(),
                &run.support_estimate,
                &unit_eigenvalues(measure.support()),
                &run.diagnostics.raw_eigenvalues,
            )
            .unwrap();
            assert!(report.satisfied, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn sigma_min_orthogonal_cases() {
        assert!((sigma_min_vandermonde(&[pt(0.0), pt(0.5)], 1).unwrap()
            - std::f64::consts::SQRT_2)
            .abs()
            < 1e-12);
        assert!((sigma_min_vandermonde(&[pt(0.0), pt(0.25)], 3).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn moitra_bound_on_separated_supports() {
        for seed in 0..50 {
            let s = 2 + (seed as usize) % 5;
            let support = random_support(s, 2.0 / 100.0, 40_000 + seed);
            let report = check_moitra_bound(&support, 100).unwrap();
            assert!(report.satisfied, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn clumps_scaling_slopes() {
        // Singleton clumps: sigma_S does not depend on alpha, slope ~ 0.
        let grid: Vec<f64> = (0..8).map(|i| 2.0 * (10.0f64 / 2.0).powf(i as f64 / 7.0)).collect();
        let flat = check_clumps_scaling(100, &[1, 1, 1], 10.0, &grid, 5).unwrap();
        assert!(flat.fit.slope.abs() < 0.15, "slope {}", flat.fit.slope);

        let pair = check_clumps_scaling(100, &[2], 10.0, &grid, 5).unwrap();
        assert!(
            (pair.fit.slope + 1.0).abs() < 0.15,
            "slope {} vs -1",
            pair.fit.slope
        );

        let triple2 = check_clumps_scaling(100, &[3, 3], 10.0, &grid, 5).unwrap();
        assert!(
            (triple2.fit.slope + 2.0).abs() < 0.15,
            "slope {} vs -2",
            triple2.fit.slope
        );
    }

    #[test]
    fn u0_bound_single_atom() {
        // For one atom the basis is the normalized steering vector and
        // sigma_1(U0)^2 = L/(L+1) >= 1/4.
        let measure = AtomicMeasure::new(vec![pt(0.37)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let y0 = fourier_coefficients(&measure, 8);
        let h = hankel(&y0, 4).unwrap();
        let u = svd(&h).unwrap().u.col_slice(0, 1).unwrap();
        let sigma_phi = sigma_min_vandermonde(measure.support(), 4).unwrap();
        let report = check_u0_bound(&u, sigma_phi, 1).unwrap();
        assert!(report.satisfied, "{report:?}");
        assert!((report.rhs - 4.0 / 5.0).abs() < 1e-10);
    }

    #[test]
    fn u0_bound_on_clumped_supports() {
        for seed in 0..10 {
            let cfg = ClumpsConfig::new(100, vec![2, 2], 0.4, 10.0).unwrap();
            let support = generate_clumps(&cfg, seed).unwrap();
            let measure = random_unit_measure(support, 600 + seed);
            let y0 = fourier_coefficients(&measure, 100);
            let h = hankel(&y0, 50).unwrap();
            let u = svd(&h).unwrap().u.col_slice(0, 4).unwrap();
            let sigma_phi = sigma_min_vandermonde(measure.support(), 50).unwrap();
            let report = check_u0_bound(&u, sigma_phi, 4).unwrap();
            assert!(report.satisfied, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn u0_bound_rejects_non_orthonormal() {
        let not_orthonormal = ComplexMatrix::from_fn(5, 2, |i, j| {
            Complex64::new((i + j) as f64 + 1.0, 0.0)
        });
        assert!(check_u0_bound(&not_orthonormal, 1.0, 2).is_err());
    }

    #[test]
    fn u0_well_separated_explicit_floor() {
        // Delta = 4/L gives sigma_S^2(U0) >= 1 - (C/(C-1)) S/L with C = 4.
        let l = 50usize;
        let support = vec![pt(0.05), pt(0.05 + 4.0 / 50.0), pt(0.05 + 8.0 / 50.0)];
        let measure = AtomicMeasure::new(support, vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        let y0 = fourier_coefficients(&measure, 100);
        let h = hankel(&y0, l).unwrap();
        let u = svd(&h).unwrap().u.col_slice(0, 3).unwrap();
        let u0 = u.row_slice(0, l).unwrap();
        let s0 = svd(&u0).unwrap().singular_values[2];
        let floor = 1.0 - (4.0 / 3.0) * 3.0 / l as f64;
        assert!(s0 * s0 >= floor - 1e-9, "{} vs {floor}", s0 * s0);
    }

    #[test]
    fn error_bound_zero_noise() {
        let measure = random_unit_measure(random_support(3, 0.03, 9), 10);
        let assessment = predicted_error_bound(&measure, 30, 15, 0.0).unwrap();
        assert_eq!(assessment.regime, NoiseRegime::Small);
        assert_eq!(assessment.bound, 0.0);
        assert_eq!(assessment.moderate, Some(0.0));
        assert_eq!(assessment.small, Some(0.0));
    }

    #[test]
    fn error_bound_single_atom_branches() {
        let measure =
            AtomicMeasure::new(vec![pt(0.3)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let assessment = predicted_error_bound(&measure, 10, 5, 1e-6).unwrap();
        assert!(assessment.small.is_none());
        assert_eq!(assessment.regime, NoiseRegime::Moderate);
        assert!(assessment.bound.is_finite());
    }

    #[test]
    fn error_bound_vacuous_above_caps() {
        let measure = random_unit_measure(random_support(2, 0.05, 77), 78);
        let assessment = predicted_error_bound(&measure, 20, 10, 1e12).unwrap();
        assert_eq!(assessment.regime, NoiseRegime::None);
        assert!(assessment.bound.is_infinite());
    }

    #[test]
    fn error_bound_holds_on_noisy_runs() {
        for seed in 0..20 {
            let support = random_support(2, 0.05, 800 + seed);
            let measure = random_unit_measure(support, 900 + seed);
            let constants = ErrorBoundConstants::new(&measure, 40, 20).unwrap();
            let y0 = fourier_coefficients(&measure, 40);
            let y = add_noise(&y0, 1e-5, 1_000 + seed);
            let eta: Vec<Complex64> = y
                .samples
                .iter()
                .zip(y.clean.as_ref().unwrap())
                .map(|(a, b)| a - b)
                .collect();
            let noise_norm = hankel(&eta, 20).unwrap().spectral_norm().unwrap();
            let assessment = constants.assess(noise_norm);
            let run = esprit(&y, 2, 20).unwrap();
            let md = matching_distance(measure.support(), &run.support_estimate).unwrap();
            if let Some(bound) = assessment.moderate {
                assert!(md <= bound + BOUND_SLACK, "seed {seed}: {md:e} > {bound:e}");
            }
            if let Some(bound) = assessment.small {
                assert!(md <= bound + BOUND_SLACK, "seed {seed}: {md:e} > {bound:e}");
            }
        }
    }

    #[test]
    fn bauer_fike_holds_on_noisy_runs() {
        for seed in 0..20 {
            let support = random_support(3, 0.04, 2_000 + seed);
            let measure = random_unit_measure(support, 2_100 + seed);
            let y0 = fourier_coefficients(&measure, 40);
            let y = add_noise(&y0, 1e-4, 2_200 + seed);
            let run = esprit(&y, 3, 20).unwrap();
            let report = check_bauer_fike(&measure, 40, 20, &run).unwrap();
            assert!(report.satisfied, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn uncertainty_single_atom_closed_form() {
        let measure =
            AtomicMeasure::new(vec![pt(0.62)], vec![Complex64::new(0.0, 2.5)]).unwrap();
        for n in [1usize, 4, 9] {
            let c = uncertainty_constant(&measure, n).unwrap();
            assert!((c - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn uncertainty_window_floor() {
        let measure = random_unit_measure(random_support(3, 0.05, 1), 2);
        assert!(matches!(
            uncertainty_constant(&measure, 2),
            Err(Error::UncertaintyWindowTooShort { n: 2, s: 3 })
        ));
    }

    #[test]
    fn uncertainty_complex_bound_random_sample() {
        for s in 2..=5usize {
            let cap = (1.0 - 0.25f64.powi(s as i32)).sqrt();
            let mut worst = 0.0f64;
            for seed in 0..250 {
                let mut rng = keyed_rng(seed, &[s as u64, 0x756e63]);
                let n = rng.gen_range(s + 1..=4 * s);
                let measure =
                    random_unit_measure(random_support(s, 1e-5, 3_000 + seed), 3_100 + seed);
                let c = uncertainty_constant(&measure, n).unwrap();
                worst = worst.max(c);
            }
            assert!(worst <= cap, "S = {s}: worst {worst} > cap {cap}");
        }
    }

    #[test]
    fn uncertainty_real_bound_random_sample() {
        for s in 2..=5usize {
            let cap = (1.0 - 1.0 / (8.0 * s as f64 - 1.0)).sqrt();
            let mut worst = 0.0f64;
            for seed in 0..250 {
                let mut rng = keyed_rng(seed, &[s as u64, 0x756e72]);
                let n = rng.gen_range(s + 1..=4 * s);
                let support = random_support(s, 1e-5, 5_000 + seed);
                let amps: Vec<Complex64> = (0..s)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0f64), 0.0))
                    .collect();
                if amps.iter().all(|a| a.norm() == 0.0) {
                    continue;
                }
                let measure = AtomicMeasure::new(support, amps).unwrap();
                let c = uncertainty_constant(&measure, n).unwrap();
                worst = worst.max(c);
            }
            assert!(worst <= cap, "S = {s}: worst {worst} > cap {cap}");
        }
    }

    #[test]
    fn uncertainty_collapsing_support() {
        let base = random_support(3, 0.1, 42);
        let n = 7usize;
        let eps = 1e-6;
        let support: Vec<TorusPoint> =
            base.iter().map(|p| pt(eps * p.value())).collect();
        let measure =
            AtomicMeasure::new(support, vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        let c = uncertainty_constant(&measure, n).unwrap();
        assert!(
            (c - 1.0 / (n as f64).sqrt()).abs() < 1e-3,
            "c = {c}, expected ~{}",
            1.0 / (n as f64).sqrt()
        );
    }

    #[test]
    fn uncertainty_well_separated_decay() {
        // Delta >= C/(N-1) forces C_N <= min(1, sqrt(C/(C-1)) sqrt(S/(N-1))).
        for seed in 0..40 {
            let s = 2 + (seed as usize) % 3;
            let n = 8 * s;
            let c_sep = 2.0;
            let support = random_support(s, c_sep / (n as f64 - 1.0), 6_000 + seed);
            let measure = random_unit_measure(support, 6_100 + seed);
            let c = uncertainty_constant(&measure, n).unwrap();
            let cap = (c_sep / (c_sep - 1.0)).sqrt() * (s as f64 / (n as f64 - 1.0)).sqrt();
            assert!(c <= cap.min(1.0) + 1e-12, "seed {seed}: {c} > {cap}");
        }
    }

    #[test]
    fn vanishing_polynomial_roots_and_values() {
        let omega = random_support(3, 0.05, 7);
        for w in &omega {
            assert!(vanishing_polynomial(&omega, *w).norm() < 1e-12);
        }
        // S = 1, root at 0, evaluated at 1/2: (-1)(e^{i pi} - 1) = 2.
        let v = vanishing_polynomial(&[pt(0.0)], pt(0.5));
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn vanishing_polynomial_sup_norm() {
        let omega = random_support(3, 0.01, 11);
        let mut max = 0.0f64;
        for g in 0..10_000 {
            let t = pt(g as f64 / 10_000.0);
            max = max.max(vanishing_polynomial(&omega, t).norm());
        }
        assert!(max <= 8.0 + 1e-9, "sup {max} > 2^3");
    }

    #[test]
    fn nonzero_counts() {
        let dirac = AtomicMeasure::new(vec![pt(0.0)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(count_nonzero_coefficients(&dirac, 0, 5, 1e-12), 5);

        // Two atoms at {0, 1/2} with x = (1, -1): coefficients (0,2,0,2),
        // exactly floor(4/2) = 2 nonzero.
        let pair = AtomicMeasure::new(
            vec![pt(0.0), pt(0.5)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(count_nonzero_coefficients(&pair, 0, 4, 1e-12), 2);

        for seed in 0..30 {
            let measure = random_unit_measure(random_support(3, 1e-4, 8_000 + seed), 8_100 + seed);
            let count = count_nonzero_coefficients(&measure, -4, 9, 1e-12);
            assert!(count >= 3, "seed {seed}: {count} < floor(9/3)");
        }
    }

    #[test]
    fn extremal_search_stays_below_theorem_caps() {
        let complex_search = extremal_uncertainty_search(2, 3, false, 4, 1).unwrap();
        let complex_cap = (1.0 - 1.0 / 16.0f64).sqrt();
        assert!(complex_search.best_value <= complex_cap + 1e-9);
        // The search is a genuine lower bound: it should find something
        // non-trivial, well above the collapsing-support floor 1/sqrt(N).
        assert!(complex_search.best_value > 0.5);

        let real_search = extremal_uncertainty_search(2, 3, true, 4, 2).unwrap();
        let real_cap = (1.0 - 1.0 / 15.0f64).sqrt();
        assert!(real_search.best_value <= real_cap + 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matching_distance_is_a_metric(
            raw_a in proptest::collection::vec(0.0..1.0f64, 4),
            raw_b in proptest::collection::vec(0.0..1.0f64, 4),
            raw_c in proptest::collection::vec(0.0..1.0f64, 4),
        ) {
            let to_pts = |raw: &[f64]| raw.iter().map(|&v| pt(v)).collect::<Vec<_>>();
            let (a, b, c) = (to_pts(&raw_a), to_pts(&raw_b), to_pts(&raw_c));
            let dab = matching_distance(&a, &b).unwrap();
            let dba = matching_distance(&b, &a).unwrap();
            let dac = matching_distance(&a, &c).unwrap();
            let dcb = matching_distance(&c, &b).unwrap();
            prop_assert!((dab - dba).abs() < 1e-15);
            prop_assert_eq!(matching_distance(&a, &a).unwrap(), 0.0);
            prop_assert!(dab <= dac + dcb + 1e-12);
        }
    }
}
