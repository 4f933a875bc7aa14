//! Monte-Carlo harness for the scaling-law and phase-transition experiments.
//!
//! For every `(SRF, σ)` grid cell the driver draws a few random amplitude
//! phase vectors, runs a batch of noise realizations per phase draw, and
//! reports the *worst* mean matching distance and success rate over the
//! phase draws. Success means `md(Ω, Ω̂) ≤ Δ/2`. All randomness is keyed by
//! `(master seed, cell indices, phase draw, trial)`, so results do not
//! depend on scheduling and repeated runs are byte-identical.

use crate::error::{Error, Result};
use crate::estimators::{esprit, music, EstimationResult, MUSIC_GRID_PER_M};
use crate::forward::{add_noise, fourier_coefficients, hankel};
use crate::measures::{generate_clumps, AtomicMeasure, ClumpsConfig, TorusPoint};
use crate::metrics::{
    check_bauer_fike, check_md_relation, linear_fit, matching_distance, unit_eigenvalues,
    BoundReport, ErrorBoundConstants, LineFit, BOUND_SLACK,
};
use crate::seeding::derive_seed;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::io::Write;

const TAG_PHASE: u64 = 1;
const TAG_NOISE: u64 = 2;
const TAG_SUPPORT: u64 = 3;

/// Which estimator the sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Esprit,
    Music,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Esprit => "esprit",
            Estimator::Music => "music",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "esprit" => Ok(Estimator::Esprit),
            "music" => Ok(Estimator::Music),
            other => Err(Error::Parameter(format!("unknown estimator '{other}'"))),
        }
    }
}

/// Parameters of one Monte-Carlo sweep.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub m: usize,
    pub l: usize,
    /// Clump cardinalities of the support template; `α = 1/SRF` is swept.
    pub clump_sizes: Vec<usize>,
    /// Inter-clump gap factor `β`.
    pub beta: f64,
    pub srf_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub trials_per_cell: usize,
    pub phase_draws: usize,
    pub master_seed: u64,
    /// Run the per-trial inequality checks (ESPRIT only).
    pub check_bounds: bool,
}

impl SweepSpec {
    /// Desk-scale profile: a ~25x reduction of the full protocol, sized for
    /// minutes rather than hours.
    pub fn desk(clump_sizes: Vec<usize>, master_seed: u64) -> Self {
        Self {
            m: 100,
            l: 50,
            clump_sizes,
            beta: 10.0,
            srf_grid: log_spaced(2.0, 8.0, 6),
            sigma_grid: log_spaced(1e-4, 1.0, 12),
            trials_per_cell: 20,
            phase_draws: 4,
            master_seed,
            check_bounds: false,
        }
    }

    /// Full-scale profile matching the published protocol (100 trials,
    /// 10 phase draws).
    pub fn paper(clump_sizes: Vec<usize>, master_seed: u64) -> Self {
        Self {
            m: 100,
            l: 50,
            clump_sizes,
            beta: 10.0,
            srf_grid: log_spaced(2.0, 8.0, 10),
            sigma_grid: log_spaced(1e-5, 1.0, 26),
            trials_per_cell: 100,
            phase_draws: 10,
            master_seed,
            check_bounds: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.srf_grid.is_empty() || self.sigma_grid.is_empty() {
            return Err(Error::Parameter("empty sweep grid".into()));
        }
        if !strictly_monotone(&self.srf_grid) || !strictly_monotone(&self.sigma_grid) {
            return Err(Error::Parameter("sweep grids must be strictly monotone".into()));
        }
        if self.trials_per_cell == 0 || self.phase_draws == 0 {
            return Err(Error::Parameter(
                "trials_per_cell and phase_draws must be positive".into(),
            ));
        }
        crate::forward::check_window(self.num_atoms(), self.l, self.m)
    }

    pub fn num_atoms(&self) -> usize {
        self.clump_sizes.iter().sum()
    }
}

fn strictly_monotone(grid: &[f64]) -> bool {
    grid.windows(2).all(|w| w[0] < w[1])
}

/// `count` points log-spaced over `[lo, hi]` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(llo + (lhi - llo) * i as f64 / (count - 1) as f64))
        .collect()
}

/// One `(srf, sigma, phase draw)` record.
#[derive(Debug, Clone)]
pub struct PhaseDrawRecord {
    pub srf: f64,
    pub sigma: f64,
    pub phase_draw: usize,
    /// Mean matching distance over the noise trials; +inf when any trial's
    /// estimator call failed.
    pub mean_md: f64,
    pub success_rate: f64,
}

/// Worst-over-phase-draws view of one grid cell.
#[derive(Debug, Clone)]
pub struct CellSummary {
    pub srf: f64,
    pub sigma: f64,
    pub worst_mean_md: f64,
    pub worst_success_rate: f64,
}

/// Complete sweep output.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub estimator: Estimator,
    pub spec: SweepSpec,
    /// Records in (srf, sigma, phase draw) lexicographic order.
    pub records: Vec<PhaseDrawRecord>,
    /// Design `Δ = 1/(SRF·M)` per srf grid entry.
    pub delta_per_srf: Vec<f64>,
    /// Number of per-trial inequality checks run (when enabled).
    pub bound_checks_run: usize,
    /// The failed checks, if any.
    pub bound_failures: Vec<BoundReport>,
}

impl SweepResult {
    /// Worst-case aggregation over phase draws, in (srf, sigma) order.
    pub fn cells(&self) -> Vec<CellSummary> {
        let draws = self.spec.phase_draws;
        self.records
            .chunks(draws)
            .map(|chunk| CellSummary {
                srf: chunk[0].srf,
                sigma: chunk[0].sigma,
                worst_mean_md: chunk.iter().map(|r| r.mean_md).fold(0.0, f64::max),
                worst_success_rate: chunk
                    .iter()
                    .map(|r| r.success_rate)
                    .fold(1.0, f64::min),
            })
            .collect()
    }
}

struct TrialOutcome {
    md: f64,
    success: bool,
    failures: Vec<BoundReport>,
    checks: usize,
}

/// Runs the sweep. Cells are evaluated in parallel; the RNG keying makes the
/// output independent of the schedule.
pub fn run_sweep(spec: &SweepSpec, estimator: Estimator) -> Result<SweepResult> {
    spec.validate()?;

    // One support per srf (the geometry does not depend on sigma).
    let mut supports = Vec::with_capacity(spec.srf_grid.len());
    let mut delta_per_srf = Vec::with_capacity(spec.srf_grid.len());
    for (si, &srf) in spec.srf_grid.iter().enumerate() {
        let alpha = 1.0 / srf;
        let cfg = ClumpsConfig::new(spec.m, spec.clump_sizes.clone(), alpha, spec.beta)?;
        let support = generate_clumps(&cfg, seed64(spec.master_seed, &[TAG_SUPPORT, si as u64]))?;
        supports.push(support);
        delta_per_srf.push(alpha / spec.m as f64);
    }

    let cell_indices: Vec<(usize, usize, usize)> = (0..spec.srf_grid.len())
        .flat_map(|si| {
            (0..spec.sigma_grid.len())
                .flat_map(move |gi| (0..spec.phase_draws).map(move |pi| (si, gi, pi)))
        })
        .collect();

    let outcomes: Vec<Result<(PhaseDrawRecord, Vec<BoundReport>, usize)>> = cell_indices
        .par_iter()
        .map(|&(si, gi, pi)| run_phase_draw(spec, estimator, &supports[si], delta_per_srf[si], si, gi, pi))
        .collect();

    let mut records = Vec::with_capacity(outcomes.len());
    let mut bound_failures = Vec::new();
    let mut bound_checks_run = 0;
    for outcome in outcomes {
        let (record, failures, checks) = outcome?;
        records.push(record);
        bound_failures.extend(failures);
        bound_checks_run += checks;
    }

    Ok(SweepResult {
        estimator,
        spec: spec.clone(),
        records,
        delta_per_srf,
        bound_checks_run,
        bound_failures,
    })
}

fn seed64(master: u64, path: &[u64]) -> u64 {
    let bytes = derive_seed(master, path);
    u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
}

fn run_phase_draw(
    spec: &SweepSpec,
    estimator: Estimator,
    support: &[TorusPoint],
    delta: f64,
    si: usize,
    gi: usize,
    pi: usize,
) -> Result<(PhaseDrawRecord, Vec<BoundReport>, usize)> {
    use rand::Rng;
    let s = support.len();
    let sigma = spec.sigma_grid[gi];
    let srf = spec.srf_grid[si];

    // Unit-magnitude amplitudes with random phases, fixed for this draw.
    let mut phase_rng = crate::seeding::keyed_rng(
        spec.master_seed,
        &[TAG_PHASE, si as u64, gi as u64, pi as u64],
    );
    let amplitudes: Vec<Complex64> = (0..s)
        .map(|_| Complex64::from_polar(1.0, phase_rng.gen_range(0.0..TAU)))
        .collect();
    let measure = AtomicMeasure::new(support.to_vec(), amplitudes)?;
    let y0 = fourier_coefficients(&measure, spec.m);
    let lams_true = unit_eigenvalues(support);

    let check = spec.check_bounds && estimator == Estimator::Esprit;
    let constants = if check {
        Some(ErrorBoundConstants::new(&measure, spec.m, spec.l)?)
    } else {
        None
    };

    let mut md_sum = 0.0;
    let mut successes = 0usize;
    let mut failures = Vec::new();
    let mut checks = 0usize;
    for trial in 0..spec.trials_per_cell {
        let noise_seed = seed64(
            spec.master_seed,
            &[TAG_NOISE, si as u64, gi as u64, pi as u64, trial as u64],
        );
        let y = add_noise(&y0, sigma, noise_seed);
        let run: Result<EstimationResult> = match estimator {
            Estimator::Esprit => esprit(&y, s, spec.l),
            Estimator::Music => music(&y, s, spec.l, MUSIC_GRID_PER_M * spec.m),
        };
        let outcome = match run {
            Ok(result) => {
                let md = matching_distance(support, &result.support_estimate)?;
                let mut trial_failures = Vec::new();
                let mut trial_checks = 0;
                if let Some(constants) = &constants {
                    trial_checks += run_trial_checks(
                        spec,
                        &measure,
                        constants,
                        &y,
                        &result,
                        md,
                        &lams_true,
                        &mut trial_failures,
                    )?;
                }
                TrialOutcome {
                    md,
                    success: md <= delta / 2.0,
                    failures: trial_failures,
                    checks: trial_checks,
                }
            }
            // Estimator failure counts as an unsuccessful trial.
            Err(_) => TrialOutcome {
                md: f64::INFINITY,
                success: false,
                failures: Vec::new(),
                checks: 0,
            },
        };
        md_sum += outcome.md;
        successes += outcome.success as usize;
        failures.extend(outcome.failures);
        checks += outcome.checks;
    }

    let record = PhaseDrawRecord {
        srf,
        sigma,
        phase_draw: pi,
        mean_md: md_sum / spec.trials_per_cell as f64,
        success_rate: successes as f64 / spec.trials_per_cell as f64,
    };
    Ok((record, failures, checks))
}

/// Per-trial inequality checks: the md relation, the two-regime error bound,
/// the Bauer–Fike route, and the `σ_S(Û₀) ≥ 2^{−S}` floor.
#[allow(clippy::too_many_arguments)]
fn run_trial_checks(
    spec: &SweepSpec,
    measure: &AtomicMeasure,
    constants: &ErrorBoundConstants,
    y: &crate::forward::Measurement,
    result: &EstimationResult,
    md: f64,
    lams_true: &[Complex64],
    failures: &mut Vec<BoundReport>,
) -> Result<usize> {
    let mut checks = 0;
    let s = measure.num_atoms();

    let relation = check_md_relation(
        measure.support(),
        &result.support_estimate,
        lams_true,
        &result.diagnostics.raw_eigenvalues,
    )?;
    checks += 1;
    if !relation.satisfied {
        failures.push(relation);
    }

    let eta: Vec<Complex64> = y
        .samples
        .iter()
        .zip(y.clean.as_ref().expect("synthetic measurement"))
        .map(|(a, b)| a - b)
        .collect();
    let noise_norm = hankel(&eta, spec.l)?.spectral_norm()?;
    let assessment = constants.assess(noise_norm);
    for (name, bound) in [
        ("thm_moderate_md", assessment.moderate),
        ("thm_small_md", assessment.small),
    ] {
        if let Some(bound) = bound {
            checks += 1;
            let report = BoundReport::check(
                name,
                md,
                bound + BOUND_SLACK,
                format!("sigma={};noise_norm={noise_norm}", y.noise_sigma),
            );
            if !report.satisfied {
                failures.push(report);
            }
        }
    }

    let floor = BoundReport::check(
        "u0_hat_floor",
        0.5f64.powi(s as i32) - BOUND_SLACK,
        result.diagnostics.sigma_s_u0,
        format!("S={s};sigma={}", y.noise_sigma),
    );
    checks += 1;
    if !floor.satisfied {
        failures.push(floor);
    }

    let bauer_fike = check_bauer_fike(measure, spec.m, spec.l, result)?;
    checks += 1;
    if !bauer_fike.satisfied {
        failures.push(bauer_fike);
    }

    Ok(checks)
}

/// Status of one transition-curve column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionStatus {
    Resolved,
    /// Every noise level on the grid succeeded; `σ*` is only a lower bound.
    RightCensored,
    /// No noise level reached the success threshold.
    Unresolved,
}

impl TransitionStatus {
    pub fn name(self) -> &'static str {
        match self {
            TransitionStatus::Resolved => "resolved",
            TransitionStatus::RightCensored => "right-censored",
            TransitionStatus::Unresolved => "unresolved",
        }
    }
}

/// One point of the phase-transition curve.
#[derive(Debug, Clone)]
pub struct TransitionPoint {
    pub srf: f64,
    pub sigma_star: Option<f64>,
    pub status: TransitionStatus,
}

/// For each SRF, the largest grid `σ` whose worst-case success rate is at
/// least `success_level`. The grid is read literally; monotonicity in `σ` is
/// not assumed.
pub fn extract_transition_curve(result: &SweepResult, success_level: f64) -> Vec<TransitionPoint> {
    let cells = result.cells();
    let n_sigma = result.spec.sigma_grid.len();
    result
        .spec
        .srf_grid
        .iter()
        .enumerate()
        .map(|(si, &srf)| {
            let column = &cells[si * n_sigma..(si + 1) * n_sigma];
            let passing: Vec<usize> = (0..n_sigma)
                .filter(|&gi| column[gi].worst_success_rate >= success_level)
                .collect();
            match passing.last() {
                None => TransitionPoint {
                    srf,
                    sigma_star: None,
                    status: TransitionStatus::Unresolved,
                },
                Some(&gi) => TransitionPoint {
                    srf,
                    sigma_star: Some(result.spec.sigma_grid[gi]),
                    status: if passing.len() == n_sigma {
                        TransitionStatus::RightCensored
                    } else {
                        TransitionStatus::Resolved
                    },
                },
            }
        })
        .collect()
}

/// Least-squares line through `(log10 SRF, log10 σ*)` over the resolved
/// points; the transition exponent estimate is `q(Ω) = −slope`.
pub fn fit_transition_slope(curve: &[TransitionPoint]) -> Result<LineFit> {
    let resolved: Vec<&TransitionPoint> = curve
        .iter()
        .filter(|p| p.status == TransitionStatus::Resolved)
        .collect();
    if resolved.len() < 3 {
        return Err(Error::Parameter(format!(
            "transition fit needs >= 3 resolved points, got {}",
            resolved.len()
        )));
    }
    let xs: Vec<f64> = resolved.iter().map(|p| p.srf.log10()).collect();
    let ys: Vec<f64> = resolved
        .iter()
        .map(|p| p.sigma_star.expect("resolved").log10())
        .collect();
    linear_fit(&xs, &ys)
}

// ---------------------------------------------------------------------------
// Artifact emission
// ---------------------------------------------------------------------------

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// `cells.csv`: one row per cell per phase draw.
pub fn write_cells_csv<W: Write>(result: &SweepResult, mut w: W) -> Result<()> {
    writeln!(
        w,
        "schema_version,estimator,srf,sigma,phase_draw,mean_md,success_rate"
    )
    .map_err(io_err)?;
    for r in &result.records {
        writeln!(
            w,
            "1,{},{},{},{},{},{}",
            result.estimator.name(),
            r.srf,
            r.sigma,
            r.phase_draw,
            r.mean_md,
            r.success_rate
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// `curve.csv`: the extracted transition per SRF.
pub fn write_curve_csv<W: Write>(
    curve: &[TransitionPoint],
    estimator: Estimator,
    mut w: W,
) -> Result<()> {
    writeln!(w, "schema_version,estimator,srf,sigma_star,status").map_err(io_err)?;
    for p in curve {
        let sigma = p
            .sigma_star
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            w,
            "1,{},{},{},{}",
            estimator.name(),
            p.srf,
            sigma,
            p.status.name()
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// One row of `slopes.csv`.
#[derive(Debug, Clone)]
pub struct SlopeRow {
    pub estimator: Estimator,
    pub clumps: usize,
    pub lambda: usize,
    pub fit: LineFit,
}

pub fn write_slopes_csv<W: Write>(rows: &[SlopeRow], mut w: W) -> Result<()> {
    writeln!(
        w,
        "schema_version,estimator,clumps,lambda,slope,intercept,r_squared,q_estimate"
    )
    .map_err(io_err)?;
    for row in rows {
        writeln!(
            w,
            "1,{},{},{},{},{},{},{}",
            row.estimator.name(),
            row.clumps,
            row.lambda,
            row.fit.slope,
            row.fit.intercept,
            row.fit.r_squared,
            -row.fit.slope
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// `meta.csv`: run conventions and parameters as key-value rows.
pub fn write_meta_csv<W: Write>(result: &SweepResult, mut w: W) -> Result<()> {
    let spec = &result.spec;
    writeln!(w, "schema_version,key,value").map_err(io_err)?;
    let rows = [
        ("estimator", result.estimator.name().to_string()),
        ("m", spec.m.to_string()),
        ("l", spec.l.to_string()),
        (
            "clump_sizes",
            spec.clump_sizes
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join("+"),
        ),
        ("beta", spec.beta.to_string()),
        ("trials_per_cell", spec.trials_per_cell.to_string()),
        ("phase_draws", spec.phase_draws.to_string()),
        ("master_seed", spec.master_seed.to_string()),
        ("noise_model", "complex-circular;E|eta_k|^2=sigma^2".to_string()),
        ("aggregation", "worst-over-phase-draws".to_string()),
        ("failed_trial_md", "inf".to_string()),
        ("success_criterion", "md<=delta/2".to_string()),
        ("bound_checks_run", result.bound_checks_run.to_string()),
        ("bound_failures", result.bound_failures.len().to_string()),
    ];
    for (key, value) in rows {
        writeln!(w, "1,{key},{value}").map_err(io_err)?;
    }
    Ok(())
}

/// A named series for the log-log SVG plot.
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Renders a self-contained log-log SVG scatter/line plot (plain paths, no
/// external assets). Points with non-positive coordinates are dropped.
pub fn render_loglog_svg(title: &str, x_label: &str, y_label: &str, series: &[PlotSeries]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const MARGIN: f64 = 60.0;
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .collect();
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &finite {
        x_lo = x_lo.min(x.log10());
        x_hi = x_hi.max(x.log10());
        y_lo = y_lo.min(y.log10());
        y_hi = y_hi.max(y.log10());
    }
    if !x_lo.is_finite() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_hi - x_lo < 1e-9 {
        x_hi = x_lo + 1.0;
    }
    if y_hi - y_lo < 1e-9 {
        y_hi = y_lo + 1.0;
    }
    let sx = |lx: f64| MARGIN + (lx - x_lo) / (x_hi - x_lo) * (W - 2.0 * MARGIN);
    let sy = |ly: f64| H - MARGIN - (ly - y_lo) / (y_hi - y_lo) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"14\">{title}</text>\n",
        W / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "<path d=\"M {m} {t} L {m} {b} L {r} {b}\" stroke=\"black\" fill=\"none\"/>\n",
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    ));
    // Decade ticks.
    for d in (x_lo.floor() as i64)..=(x_hi.ceil() as i64) {
        let lx = d as f64;
        if lx < x_lo - 1e-9 || lx > x_hi + 1e-9 {
            continue;
        }
        let x = sx(lx);
        svg.push_str(&format!(
            "<path d=\"M {x} {b} L {x} {b2}\" stroke=\"black\"/>\n\
             <text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\" font-family=\"monospace\" \
             font-size=\"11\">1e{d}</text>\n",
            b = H - MARGIN,
            b2 = H - MARGIN + 6.0,
            ty = H - MARGIN + 20.0
        ));
    }
    for d in (y_lo.floor() as i64)..=(y_hi.ceil() as i64) {
        let ly = d as f64;
        if ly < y_lo - 1e-9 || ly > y_hi + 1e-9 {
            continue;
        }
        let y = sy(ly);
        svg.push_str(&format!(
            "<path d=\"M {m} {y} L {m2} {y}\" stroke=\"black\"/>\n\
             <text x=\"{tx}\" y=\"{y}\" text-anchor=\"end\" font-family=\"monospace\" \
             font-size=\"11\">1e{d}</text>\n",
            m = MARGIN,
            m2 = MARGIN - 6.0,
            tx = MARGIN - 10.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"12\">{x_label}</text>\n",
        W / 2.0,
        H - 14.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" \
         font-size=\"12\" transform=\"rotate(-90 16 {mid})\">{y_label}</text>\n",
        H / 2.0,
        mid = H / 2.0
    ));

    for (idx, s) in series.iter().enumerate() {
        let color = colors[idx % colors.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .copied()
            .filter(|&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| (sx(x.log10()), sy(y.log10())))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            d.push_str(if i == 0 { "M " } else { "L " });
            d.push_str(&format!("{x:.2} {y:.2} "));
        }
        svg.push_str(&format!(
            "<path d=\"{d}\" stroke=\"{color}\" fill=\"none\" stroke-width=\"1.5\"/>\n"
        ));
        for (x, y) in &pts {
            svg.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>\n"
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"{color}\">{}</text>\n",
            W - MARGIN - 150.0,
            MARGIN + 18.0 * (idx as f64 + 1.0),
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
