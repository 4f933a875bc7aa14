//! Super-resolution spectral estimation toolkit.
//!
//! Estimates an atomic measure `μ = Σ_j x_j δ_{ω_j}` on the torus `[0,1)`
//! from its first `M+1` noisy Fourier coefficients `y_k = Σ_j x_j e^{-2πik ω_j} + η_k`.
//! The crate provides:
//!
//! * [`measures`] — atomic measures, torus geometry, and the separated-clumps
//!   support generator,
//! * [`linalg`] — a dense complex kernel (one-sided Jacobi SVD, Hessenberg QR
//!   eigenvalues, pseudoinverse) sized for the small matrices of this problem,
//! * [`forward`] — Vandermonde/Hankel construction, exact Fourier data, and
//!   seeded complex-Gaussian noise,
//! * [`estimators`] — ESPRIT and a MUSIC baseline with least-squares amplitude
//!   recovery,
//! * [`metrics`] — matching distances, singular-value bounds, and the
//!   non-harmonic uncertainty constants, all as checkable reports,
//! * [`experiments`] — a deterministic Monte-Carlo sweep harness producing
//!   phase-transition curves and scaling-law fits.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod forward;
pub mod linalg;
pub mod measures;
pub mod metrics;
pub mod seeding;

pub use error::Error;
pub use estimators::{EspritDiagnostics, EstimationResult};
pub use forward::Measurement;
pub use linalg::{ComplexMatrix, SvdResult};
pub use measures::{AtomicMeasure, ClumpsConfig, TorusPoint};
pub use metrics::BoundReport;
pub use num_complex::Complex64;
