//! The measurement pipeline `y = Φ_M x + η` and its Hankel lift.
//!
//! Builds Vandermonde matrices with unit-circle nodes, exact Fourier data of
//! an atomic measure, circularly-symmetric complex Gaussian noise, and the
//! `(L+1) × (M−L+1)` Hankel matrix the subspace estimators factor.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measures::{AtomicMeasure, TorusPoint};
use crate::seeding::keyed_rng;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;
use std::io::{BufRead, Write};

/// A (possibly noisy) vector of `M+1` consecutive Fourier coefficients.
#[derive(Debug, Clone)]
pub struct Measurement {
    /// Observed samples `y`, length `M+1`.
    pub samples: Vec<Complex64>,
    /// Noiseless samples `y⁰` when known (synthetic data).
    pub clean: Option<Vec<Complex64>>,
    /// Standard deviation of the complex noise, `E|η_k|² = σ²`.
    pub noise_sigma: f64,
    /// Seed of the noise stream.
    pub seed: u64,
}

impl Measurement {
    /// Noiseless measurement wrapping exact samples.
    pub fn noiseless(samples: Vec<Complex64>) -> Self {
        Self {
            clean: Some(samples.clone()),
            samples,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    /// Bandwidth `M` (samples run `k = 0..=M`).
    pub fn bandwidth(&self) -> usize {
        self.samples.len() - 1
    }

    /// Writes the samples as `k,re,im` rows with a schema comment.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        writeln!(w, "# schema_version=1").map_err(io)?;
        writeln!(w, "k,re,im").map_err(io)?;
        for (k, z) in self.samples.iter().enumerate() {
            writeln!(w, "{},{},{}", k, z.re, z.im).map_err(io)?;
        }
        Ok(())
    }

    /// Reads `k,re,im` rows (comment lines starting with `#` are skipped).
    /// `k` must ascend from 0 without gaps. Errors carry the line number.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut samples = Vec::new();
        let mut expected_k = 0usize;
        let mut saw_header = false;
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Io(format!("line {lineno}: {e}")))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if !saw_header {
                if trimmed != "k,re,im" {
                    return Err(Error::Io(format!(
                        "line {lineno}: expected header 'k,re,im', got '{trimmed}'"
                    )));
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Io(format!(
                    "line {lineno}: expected 3 fields, got {}",
                    fields.len()
                )));
            }
            let k: usize = fields[0]
                .trim()
                .parse()
                .map_err(|e| Error::Io(format!("line {lineno}: bad index: {e}")))?;
            if k != expected_k {
                return Err(Error::Io(format!(
                    "line {lineno}: expected k = {expected_k}, got {k}"
                )));
            }
            let re: f64 = fields[1]
                .trim()
                .parse()
                .map_err(|e| Error::Io(format!("line {lineno}: bad re: {e}")))?;
            let im: f64 = fields[2]
                .trim()
                .parse()
                .map_err(|e| Error::Io(format!("line {lineno}: bad im: {e}")))?;
            samples.push(Complex64::new(re, im));
            expected_k += 1;
        }
        if samples.is_empty() {
            return Err(Error::Io("no samples in input".into()));
        }
        Ok(Self {
            samples,
            clean: None,
            noise_sigma: 0.0,
            seed: 0,
        })
    }
}

/// The `(M+1) × S` Vandermonde matrix with entry `(k, j) = e^{−2πik ω_j}`.
pub fn vandermonde(omega: &[TorusPoint], m: usize) -> ComplexMatrix {
    assert!(!omega.is_empty(), "vandermonde needs at least one node");
    ComplexMatrix::from_fn(m + 1, omega.len(), |k, j| {
        Complex64::from_polar(1.0, -TAU * k as f64 * omega[j].value())
    })
}

/// The single-node column `φ_L(ω) = (e^{−2πikω})_{k=0..L}`.
pub fn steering_vector(omega: f64, l: usize) -> Vec<Complex64> {
    (0..=l)
        .map(|k| Complex64::from_polar(1.0, -TAU * k as f64 * omega))
        .collect()
}

/// Exact Fourier coefficients `y⁰_k = Σ_j x_j e^{−2πik ω_j}`, `k = 0..=M`.
pub fn fourier_coefficients(measure: &AtomicMeasure, m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m + 1];
    for (point, amp) in measure.support().iter().zip(measure.amplitudes()) {
        for (k, y) in out.iter_mut().enumerate() {
            *y += amp * Complex64::from_polar(1.0, -TAU * k as f64 * point.value());
        }
    }
    out
}

/// Adds circularly-symmetric complex Gaussian noise with `E|η_k|² = σ²`
/// (real and imaginary parts each of variance `σ²/2`). Deterministic under
/// `seed`; `σ = 0` returns the clean data exactly.
pub fn add_noise(y0: &[Complex64], sigma: f64, seed: u64) -> Measurement {
    assert!(sigma >= 0.0, "noise level must be non-negative");
    if sigma == 0.0 {
        return Measurement {
            samples: y0.to_vec(),
            clean: Some(y0.to_vec()),
            noise_sigma: 0.0,
            seed,
        };
    }
    let mut rng = keyed_rng(seed, &[0x6e6f697365]);
    let scale = sigma / std::f64::consts::SQRT_2;
    let samples = y0
        .iter()
        .map(|&y| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            y + Complex64::new(scale * re, scale * im)
        })
        .collect();
    Measurement {
        samples,
        clean: Some(y0.to_vec()),
        noise_sigma: sigma,
        seed,
    }
}

/// The `(L+1) × (M−L+1)` Hankel matrix with entry `(i, j) = y_{i+j}`.
pub fn hankel(y: &[Complex64], l: usize) -> Result<ComplexMatrix> {
    let m = y.len().saturating_sub(1);
    if y.is_empty() || l < 1 || l > m {
        return Err(Error::Parameter(format!(
            "hankel parameter L = {l} outside 1..={m}"
        )));
    }
    Ok(ComplexMatrix::from_fn(l + 1, m - l + 1, |i, j| y[i + j]))
}

/// Checks the ESPRIT window constraint `S ≤ L ≤ M+1−S`.
pub fn check_window(s: usize, l: usize, m: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::Parameter("S must be positive".into()));
    }
    if l < s || l + s > m + 1 {
        return Err(Error::Parameter(format!(
            "ESPRIT window requires S <= L <= M+1-S (S = {s}, L = {l}, M = {m})"
        )));
    }
    Ok(())
}

/// Frobenius residual of the Vandermonde factorization
/// `H(y⁰) = Φ_L · diag(x) · Φ_{M−L}ᵀ` (plain transpose).
pub fn verify_vandermonde_factorization(
    measure: &AtomicMeasure,
    m: usize,
    l: usize,
) -> Result<f64> {
    check_window(measure.num_atoms(), l, m)?;
    let y0 = fourier_coefficients(measure, m);
    let h = hankel(&y0, l)?;
    let phi_l = vandermonde(measure.support(), l);
    let phi_r = vandermonde(measure.support(), m - l);
    let s = measure.num_atoms();
    let dx = {
        let mut d = ComplexMatrix::zeros(s, s);
        for (j, &x) in measure.amplitudes().iter().enumerate() {
            d[(j, j)] = x;
        }
        d
    };
    let product = phi_l.matmul(&dx)?.matmul(&phi_r.transpose())?;
    Ok(h.sub(&product)?.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd;
    use crate::measures::AtomicMeasure;
    use proptest::prelude::*;

    fn pt(v: f64) -> TorusPoint {
        TorusPoint::new(v)
    }

    fn unit(v: f64) -> Complex64 {
        Complex64::from_polar(1.0, v)
    }

    #[test]
    fn vandermonde_node_at_zero() {
        let phi = vandermonde(&[pt(0.0)], 3);
        assert_eq!((phi.rows(), phi.cols()), (4, 1));
        for k in 0..4 {
            assert!((phi[(k, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn vandermonde_orthogonal_columns() {
        // Nodes {0, 1/4} at M = 3: the Gram matrix is 4I, both singular
        // values are 2.
        let phi = vandermonde(&[pt(0.0), pt(0.25)], 3);
        let s = svd(&phi).unwrap();
        assert!((s.singular_values[0] - 2.0).abs() < 1e-12);
        assert!((s.singular_values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vandermonde_two_by_two() {
        let phi = vandermonde(&[pt(0.0), pt(0.5)], 1);
        assert!((phi[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((phi[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((phi[(1, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((phi[(1, 1)] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let s = svd(&phi).unwrap();
        let rt2 = std::f64::consts::SQRT_2;
        assert!((s.singular_values[0] - rt2).abs() < 1e-12);
        assert!((s.singular_values[1] - rt2).abs() < 1e-12);
    }

    #[test]
    fn fourier_of_dirac_at_zero() {
        let m = AtomicMeasure::new(vec![pt(0.0)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let y = fourier_coefficients(&m, 5);
        assert!(y.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn fourier_of_single_unit_atom_has_unit_modulus() {
        let m = AtomicMeasure::new(vec![pt(0.3)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let y = fourier_coefficients(&m, 4);
        for (k, z) in y.iter().enumerate() {
            assert!((z.norm() - 1.0).abs() < 1e-14);
            let expect = Complex64::from_polar(1.0, -TAU * k as f64 * 0.3);
            assert!((z - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn fourier_alternating_pair() {
        // δ_0 − δ_{1/2} gives the pattern 1 − (−1)^k = (0, 2, 0, 2).
        let m = AtomicMeasure::new(
            vec![pt(0.0), pt(0.5)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        )
        .unwrap();
        let y = fourier_coefficients(&m, 3);
        let expect = [0.0, 2.0, 0.0, 2.0];
        for (z, &e) in y.iter().zip(expect.iter()) {
            assert!((z - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn fourier_agrees_with_vandermonde_action() {
        let m = AtomicMeasure::new(
            vec![pt(0.12), pt(0.57), pt(0.91)],
            vec![unit(0.3), unit(1.1), unit(2.9)],
        )
        .unwrap();
        let y = fourier_coefficients(&m, 17);
        let via_phi = vandermonde(m.support(), 17).mul_vec(m.amplitudes()).unwrap();
        let num: f64 = y
            .iter()
            .zip(&via_phi)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(num <= 1e-12 * den);
    }

    #[test]
    fn zero_noise_is_exact() {
        let y0 = vec![unit(0.1), unit(0.7), unit(1.9)];
        let m = add_noise(&y0, 0.0, 123);
        assert_eq!(m.samples, y0);
        assert_eq!(m.clean.as_ref().unwrap(), &y0);
    }

    #[test]
    fn noise_is_deterministic_under_seed() {
        let y0 = vec![Complex64::new(0.0, 0.0); 64];
        let a = add_noise(&y0, 0.5, 9);
        let b = add_noise(&y0, 0.5, 9);
        assert_eq!(a.samples, b.samples);
        let c = add_noise(&y0, 0.5, 10);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn noise_second_moment() {
        let y0 = vec![Complex64::new(0.0, 0.0); 100_000];
        let m = add_noise(&y0, 1.0, 2024);
        let mean_sq: f64 =
            m.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / m.samples.len() as f64;
        assert!(
            (mean_sq - 1.0).abs() < 0.02,
            "E|eta|^2 = {mean_sq}, expected 1.0 +- 0.02"
        );
    }

    #[test]
    fn hankel_definition_unrolled() {
        let y: Vec<Complex64> = (1..=5).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let h = hankel(&y, 2).unwrap();
        assert_eq!((h.rows(), h.cols()), (3, 3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[(i, j)].re, (i + j + 1) as f64);
            }
        }
    }

    #[test]
    fn hankel_of_zero_is_zero() {
        let y = vec![Complex64::new(0.0, 0.0); 6];
        let h = hankel(&y, 3).unwrap();
        assert_eq!(h.frobenius_norm(), 0.0);
    }

    #[test]
    fn hankel_rejects_bad_window() {
        let y = vec![Complex64::new(1.0, 0.0); 5];
        assert!(hankel(&y, 0).is_err());
        assert!(hankel(&y, 5).is_err());
        assert!(hankel(&y, 4).is_ok());
    }

    #[test]
    fn hankel_rank_equals_atom_count() {
        let m = AtomicMeasure::new(
            vec![pt(0.1), pt(0.35), pt(0.62)],
            vec![unit(0.4), unit(1.3), unit(2.2)],
        )
        .unwrap();
        let y0 = fourier_coefficients(&m, 20);
        let h = hankel(&y0, 10).unwrap();
        let s = svd(&h).unwrap();
        let top = s.singular_values[0];
        assert!(s.singular_values[2] / top > 1e-8);
        assert!(s.singular_values[3] / top < 1e-9);
    }

    #[test]
    fn factorization_residual_small_random() {
        let m = AtomicMeasure::new(
            vec![pt(0.05), pt(0.44), pt(0.71)],
            vec![unit(0.2), unit(1.0), unit(2.5)],
        )
        .unwrap();
        let y0 = fourier_coefficients(&m, 20);
        let h = hankel(&y0, 10).unwrap();
        let resid = verify_vandermonde_factorization(&m, 20, 10).unwrap();
        assert!(resid <= 1e-10 * h.frobenius_norm());
    }

    #[test]
    fn factorization_single_atom() {
        let m = AtomicMeasure::new(vec![pt(0.3)], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let resid = verify_vandermonde_factorization(&m, 4, 2).unwrap();
        assert!(resid < 1e-13);
    }

    #[test]
    fn factorization_rejects_window_violation() {
        let m = AtomicMeasure::new(
            vec![pt(0.1), pt(0.2), pt(0.4)],
            vec![Complex64::new(1.0, 0.0); 3],
        )
        .unwrap();
        // L = S - 1 violates S <= L.
        assert!(verify_vandermonde_factorization(&m, 10, 2).is_err());
    }

    #[test]
    fn gaussian_hankel_concentration() {
        // Mean spectral norm of H(eta) over 200 trials stays below the
        // sigma * sqrt(2 max(L+1, M-L+1) log(M+2)) concentration bound.
        let (m, l, sigma) = (100usize, 50usize, 1.0f64);
        let y0 = vec![Complex64::new(0.0, 0.0); m + 1];
        let mut total = 0.0;
        let trials = 200;
        for t in 0..trials {
            let noisy = add_noise(&y0, sigma, 7_000 + t);
            total += hankel(&noisy.samples, l).unwrap().spectral_norm().unwrap();
        }
        let mean = total / trials as f64;
        let bound = sigma * (2.0 * 51.0 * ((m + 2) as f64).ln()).sqrt();
        assert!(mean <= bound, "mean {mean:.3} vs bound {bound:.3}");
    }

    #[test]
    fn measurement_csv_roundtrip() {
        let m = Measurement::noiseless(vec![unit(0.3), unit(1.2), unit(2.0)]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = Measurement::read_csv(&buf[..]).unwrap();
        for (a, b) in m.samples.iter().zip(&back.samples) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn measurement_csv_rejects_malformed() {
        assert!(Measurement::read_csv(&b""[..]).is_err());
        assert!(Measurement::read_csv(&b"k,re,im\n"[..]).is_err());
        assert!(Measurement::read_csv(&b"k,re,im\n1,0.0,0.0\n"[..]).is_err());
        assert!(Measurement::read_csv(&b"k,re,im\n0,0.0\n"[..]).is_err());
        assert!(Measurement::read_csv(&b"wrong,header\n0,0,0\n"[..]).is_err());
        let err = Measurement::read_csv(&b"k,re,im\n0,1.0,0.0\n2,1.0,0.0\n"[..]).unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }

    proptest! {
        #[test]
        fn fourier_is_linear_in_amplitudes(
            w1 in 0.0..1.0f64, w2 in 0.5..0.999f64,
            a_re in -2.0..2.0f64, a_im in -2.0..2.0f64,
            b_re in -2.0..2.0f64, b_im in -2.0..2.0f64,
        ) {
            let w1 = w1 * 0.45; // keep the two supports distinct
            prop_assume!((a_re, a_im) != (0.0, 0.0) && (b_re, b_im) != (0.0, 0.0));
            let a = Complex64::new(a_re, a_im);
            let b = Complex64::new(b_re, b_im);
            let m1 = AtomicMeasure::new(vec![pt(w1)], vec![a]).unwrap();
            let m2 = AtomicMeasure::new(vec![pt(w2)], vec![b]).unwrap();
            let joint = AtomicMeasure::new(vec![pt(w1), pt(w2)], vec![a, b]).unwrap();
            let y1 = fourier_coefficients(&m1, 12);
            let y2 = fourier_coefficients(&m2, 12);
            let y = fourier_coefficients(&joint, 12);
            for k in 0..=12 {
                prop_assert!((y[k] - (y1[k] + y2[k])).norm() < 1e-12);
            }
        }

        #[test]
        fn hankel_entries_depend_only_on_antidiagonal(l in 1usize..6, m in 6usize..12) {
            prop_assume!(l <= m);
            let y: Vec<Complex64> =
                (0..=m).map(|k| unit(k as f64 * 0.77 + 0.1)).collect();
            let h = hankel(&y, l).unwrap();
            for i in 0..h.rows() {
                for j in 0..h.cols() {
                    prop_assert_eq!(h[(i, j)], y[i + j]);
                }
            }
        }
    }
}
