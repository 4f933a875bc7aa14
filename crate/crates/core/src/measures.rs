//! Atomic measures on the torus and the separated-clumps support model.
//!
//! A measure is `μ = Σ_j x_j δ_{ω_j}` with `ω_j ∈ [0,1)` and complex
//! amplitudes `x_j`. The separation geometry of the support drives every
//! conditioning bound in this crate, so the torus metric and the clumps
//! generator live here.

use crate::error::{Error, Result};
use crate::seeding::keyed_rng;
use num_complex::Complex64;
use rand::Rng;

/// A point on the torus `𝕋 = [0,1)`, canonically wrapped.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TorusPoint {
    value: f64,
}

impl TorusPoint {
    /// Wraps any finite real to `[0,1)` by floor subtraction.
    pub fn new(value: f64) -> Self {
        assert!(value.is_finite(), "torus point must be finite");
        let mut v = value - value.floor();
        // Guard against `x - floor(x)` rounding up to exactly 1.0 for tiny
        // negative inputs.
        if v >= 1.0 {
            v -= 1.0;
        }
        Self { value: v }
    }

    /// Position in `[0,1)`.
    pub fn value(self) -> f64 {
        self.value
    }
}

/// Wrap-around distance on the torus, in `[0, 1/2]`.
pub fn torus_distance(a: TorusPoint, b: TorusPoint) -> f64 {
    let d = (a.value - b.value).abs();
    d.min(1.0 - d)
}

/// A non-zero complex discrete measure with distinct support points.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    support: Vec<TorusPoint>,
    amplitudes: Vec<Complex64>,
}

impl AtomicMeasure {
    /// Validates and builds a measure. Support and amplitudes must have equal
    /// nonzero length, the support points must be pairwise distinct, and at
    /// least one amplitude must be nonzero.
    pub fn new(support: Vec<TorusPoint>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        if support.len() != amplitudes.len() {
            return Err(Error::InvalidMeasure(format!(
                "support length {} != amplitudes length {}",
                support.len(),
                amplitudes.len()
            )));
        }
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if torus_distance(support[i], support[j]) == 0.0 {
                    return Err(Error::InvalidMeasure(format!(
                        "repeated support points at indices {i} and {j}"
                    )));
                }
            }
        }
        if amplitudes.iter().all(|x| x.norm() == 0.0) {
            return Err(Error::InvalidMeasure("all amplitudes are zero".into()));
        }
        Ok(Self {
            support,
            amplitudes,
        })
    }

    /// Number of atoms `S`.
    pub fn num_atoms(&self) -> usize {
        self.support.len()
    }

    /// Support points `Ω`.
    pub fn support(&self) -> &[TorusPoint] {
        &self.support
    }

    /// Amplitudes `x`.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Smallest amplitude modulus `x_min = min_j |x_j|`.
    pub fn x_min(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|x| x.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Minimum separation `Δ = min_{j≠k} |ω_j − ω_k|_𝕋`.
///
/// Errors for a single atom; callers dividing by `Δ` must branch rather than
/// propagate a silent infinity.
pub fn min_separation(m: &AtomicMeasure) -> Result<f64> {
    min_separation_of(m.support())
}

/// [`min_separation`] on a raw support.
pub fn min_separation_of(support: &[TorusPoint]) -> Result<f64> {
    if support.len() < 2 {
        return Err(Error::SingleAtomSeparation);
    }
    let mut delta = f64::INFINITY;
    for i in 0..support.len() {
        for j in (i + 1)..support.len() {
            delta = delta.min(torus_distance(support[i], support[j]));
        }
    }
    Ok(delta)
}

/// Super-resolution factor `SRF = 1/(Δ·M)`.
pub fn srf(delta: f64, m: usize) -> f64 {
    1.0 / (delta * m as f64)
}

/// Parameters of the separated-clumps model: `A` clumps of sizes `λ_a`, each
/// contained in an interval of length `1/M`, intra-clump spacing `α/M`, and
/// inter-clump gaps of at least `β/M`.
#[derive(Debug, Clone)]
pub struct ClumpsConfig {
    m: usize,
    clump_sizes: Vec<usize>,
    alpha: f64,
    beta: f64,
}

impl ClumpsConfig {
    /// Validates the model invariants: `α, β > 0`, every clump nonempty, and
    /// `α(λ_a − 1) < 1` so each clump fits in an interval of length `1/M`.
    pub fn new(m: usize, clump_sizes: Vec<usize>, alpha: f64, beta: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::ClumpsInvalid("M must be positive".into()));
        }
        if clump_sizes.is_empty() || clump_sizes.iter().any(|&s| s == 0) {
            return Err(Error::ClumpsInvalid("clump sizes must be positive".into()));
        }
        if !(alpha > 0.0) || !(beta > 0.0) {
            return Err(Error::ClumpsInvalid("alpha and beta must be positive".into()));
        }
        let lambda = *clump_sizes.iter().max().expect("nonempty");
        if alpha * (lambda as f64 - 1.0) >= 1.0 {
            return Err(Error::ClumpsInvalid(format!(
                "clump of {lambda} points spaced alpha/M = {}/M does not fit in 1/M",
                alpha
            )));
        }
        Ok(Self {
            m,
            clump_sizes,
            alpha,
            beta,
        })
    }

    /// Bandwidth parameter `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Clump cardinalities `λ_1..λ_A`.
    pub fn clump_sizes(&self) -> &[usize] {
        &self.clump_sizes
    }

    /// Number of clumps `A`.
    pub fn num_clumps(&self) -> usize {
        self.clump_sizes.len()
    }

    /// Total number of atoms `S = Σ λ_a`.
    pub fn num_atoms(&self) -> usize {
        self.clump_sizes.iter().sum()
    }

    /// Largest clump cardinality `λ`.
    pub fn lambda_max(&self) -> usize {
        *self.clump_sizes.iter().max().expect("nonempty")
    }

    /// Intra-clump spacing factor `α` (so `Δ = α/M`).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Inter-clump gap factor `β`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `SRF = 1/(Δ·M) = 1/α` under this model.
    pub fn srf(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Smallest `β` for which the clump-interaction condition of the
    /// singular-value theorem holds: `β ≥ max_a 20·S^{1/2}·λ_a^{5/2}/α^{1/2}`.
    ///
    /// The experiment protocol does not enforce this (it is typically far
    /// larger than the torus allows at desk scale); it is reported alongside
    /// results so runs outside the theorem's hypotheses are identifiable.
    pub fn sep2_lower_bound(&self) -> f64 {
        let s = self.num_atoms() as f64;
        self.clump_sizes
            .iter()
            .map(|&l| 20.0 * s.sqrt() * (l as f64).powf(2.5) / self.alpha.sqrt())
            .fold(0.0, f64::max)
    }

    /// Whether `β` meets [`ClumpsConfig::sep2_lower_bound`].
    pub fn satisfies_sep2(&self) -> bool {
        self.beta >= self.sep2_lower_bound()
    }
}

/// `n` unit-magnitude amplitudes with seeded random phases, the amplitude
/// model of the experiment protocol.
pub fn random_unit_amplitudes(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = keyed_rng(seed, &[0x616d706c]);
    (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// `n` real amplitudes uniform in `[-1, 1]`, redrawn until at least one is
/// nonzero.
pub fn random_real_amplitudes(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = keyed_rng(seed, &[0x7265616c]);
    loop {
        let amps: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        if amps.iter().any(|a| a.norm() > 0.0) {
            return amps;
        }
    }
}

/// Rejection-samples `s` uniform support points whose pairwise torus
/// distance is at least `min_delta`.
pub fn random_support(s: usize, min_delta: f64, seed: u64) -> Vec<TorusPoint> {
    assert!(
        s as f64 * min_delta < 0.9,
        "cannot fit {s} points with separation {min_delta}"
    );
    let mut rng = keyed_rng(seed, &[0x73757070]);
    loop {
        let points: Vec<TorusPoint> = (0..s)
            .map(|_| TorusPoint::new(rng.gen_range(0.0..1.0)))
            .collect();
        let ok = (0..s)
            .all(|i| ((i + 1)..s).all(|j| torus_distance(points[i], points[j]) >= min_delta));
        if ok {
            return points;
        }
    }
}

const ANCHOR_RETRY_BUDGET: usize = 64;

/// Draws a support satisfying the separated-clumps model.
///
/// Within clump `a` the `λ_a` points are equally spaced by `α/M`. Clump
/// anchors are drawn uniformly at random, sorted, and greedily repaired to
/// enforce the `β/M` gaps; after a fixed retry budget the clumps are
/// distributed evenly instead. Deterministic given `placement_seed`.
pub fn generate_clumps(cfg: &ClumpsConfig, placement_seed: u64) -> Result<Vec<TorusPoint>> {
    let m = cfg.m as f64;
    let spacing = cfg.alpha / m;
    let gap = cfg.beta / m;
    let a = cfg.num_clumps();
    let widths: Vec<f64> = cfg
        .clump_sizes
        .iter()
        .map(|&l| (l as f64 - 1.0) * spacing)
        .collect();
    let total_width: f64 = widths.iter().sum();

    // On the torus, A clumps need A inter-clump gaps (one wraps around).
    let needed = if a > 1 {
        total_width + a as f64 * gap
    } else {
        total_width
    };
    if needed >= 1.0 {
        return Err(Error::ClumpsInfeasible(format!(
            "total clump width {total_width:.6} plus gaps exceeds the torus"
        )));
    }

    let mut rng = keyed_rng(placement_seed, &[0x636c756d70]);
    for _ in 0..ANCHOR_RETRY_BUDGET {
        let mut anchors: Vec<f64> = (0..a).map(|_| rng.gen_range(0.0..1.0)).collect();
        anchors.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        if let Some(points) = try_place(cfg, &anchors, &widths, gap) {
            return Ok(points);
        }
    }

    // Even distribution fallback: clumps in index order, equal leftover gap.
    let slack = (1.0 - total_width) / a as f64;
    if a > 1 && slack < gap {
        return Err(Error::ClumpsInfeasible(
            "even distribution cannot honor the inter-clump gap".into(),
        ));
    }
    let mut points = Vec::with_capacity(cfg.num_atoms());
    let mut cursor = 0.0;
    for (idx, &size) in cfg.clump_sizes.iter().enumerate() {
        for j in 0..size {
            points.push(TorusPoint::new(cursor + j as f64 * spacing));
        }
        cursor += widths[idx] + slack;
    }
    Ok(points)
}

/// Greedy left-to-right repair of sorted anchors; `None` when the repaired
/// layout no longer fits (including the wrap-around gap).
fn try_place(
    cfg: &ClumpsConfig,
    anchors: &[f64],
    widths: &[f64],
    gap: f64,
) -> Option<Vec<TorusPoint>> {
    let spacing = cfg.alpha / cfg.m as f64;
    let mut starts = Vec::with_capacity(anchors.len());
    let mut cursor = f64::NEG_INFINITY;
    for (idx, &anchor) in anchors.iter().enumerate() {
        let start = anchor.max(cursor);
        starts.push(start);
        cursor = start + widths[idx] + gap;
    }
    let last_end = starts.last().copied().expect("nonempty") + widths[widths.len() - 1];
    if anchors.len() > 1 {
        // The first clump must also clear the last one across the seam.
        if last_end + gap > starts[0] + 1.0 || last_end >= 1.0 {
            return None;
        }
    } else if last_end >= 1.0 {
        return None;
    }
    let mut points = Vec::with_capacity(cfg.num_atoms());
    for (idx, &size) in cfg.clump_sizes.iter().enumerate() {
        for j in 0..size {
            points.push(TorusPoint::new(starts[idx] + j as f64 * spacing));
        }
    }
    Some(points)
}

/// Independent post-hoc validator for the separated-clumps model.
///
/// Groups the (sorted, wrap-aware) points at gaps of at least `β/M`, then
/// checks: clump sizes match `cfg` as a multiset, every clump spans at most
/// `1/M`, the minimum separation is at least `α/M`, and inter-clump gaps are
/// at least `β/M`. Tolerance absorbs placement roundoff.
pub fn validate_clumps(cfg: &ClumpsConfig, points: &[TorusPoint]) -> Result<()> {
    const TOL: f64 = 1e-12;
    let m = cfg.m as f64;
    if points.len() != cfg.num_atoms() {
        return Err(Error::ClumpsInvalid(format!(
            "expected {} points, got {}",
            cfg.num_atoms(),
            points.len()
        )));
    }
    let mut sorted: Vec<f64> = points.iter().map(|p| p.value()).collect();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let n = sorted.len();

    if n >= 2 {
        let delta = min_separation_of(points)?;
        if delta + TOL < cfg.alpha / m {
            return Err(Error::ClumpsInvalid(format!(
                "min separation {delta:.3e} below alpha/M = {:.3e}",
                cfg.alpha / m
            )));
        }
    }

    // Split into groups at gaps >= beta/M (circularly).
    let gap_at = |i: usize| {
        let next = sorted[(i + 1) % n] + if i + 1 == n { 1.0 } else { 0.0 };
        next - sorted[i]
    };
    let threshold = cfg.beta / m - TOL;
    let mut boundaries: Vec<usize> = (0..n).filter(|&i| gap_at(i) >= threshold).collect();
    if boundaries.is_empty() {
        // All points in one clump (no qualifying inter-clump gap).
        boundaries.push(n - 1);
    }
    let mut group_sizes = Vec::new();
    let mut group_spans = Vec::new();
    let first_start = (boundaries[boundaries.len() - 1] + 1) % n;
    let mut start = first_start;
    for &b in &boundaries {
        let size = if b >= start { b - start + 1 } else { n - start + b + 1 };
        let span = {
            let lo = sorted[start];
            let hi = sorted[b] + if b < start { 1.0 } else { 0.0 };
            hi - lo
        };
        group_sizes.push(size);
        group_spans.push(span);
        start = (b + 1) % n;
    }

    let mut expected = cfg.clump_sizes.to_vec();
    expected.sort_unstable();
    let mut observed = group_sizes.clone();
    observed.sort_unstable();
    if expected != observed {
        return Err(Error::ClumpsInvalid(format!(
            "clump size multiset {observed:?} does not match config {expected:?}"
        )));
    }
    for &span in &group_spans {
        if span > 1.0 / m + TOL {
            return Err(Error::ClumpsInvalid(format!(
                "clump span {span:.3e} exceeds 1/M = {:.3e}",
                1.0 / m
            )));
        }
    }
    if cfg.num_clumps() > 1 && boundaries.len() != cfg.num_clumps() {
        return Err(Error::ClumpsInvalid(format!(
            "found {} inter-clump gaps, expected {}",
            boundaries.len(),
            cfg.num_clumps()
        )));
    }
    Ok(())
}
