//! `superres sweep`: Monte-Carlo phase-transition sweeps.

use crate::config::SweepConfig;
use crate::{Cli, Profile};
use superres_core::experiments::{
    extract_transition_curve, fit_transition_slope, run_sweep, write_cells_csv, write_curve_csv,
    write_meta_csv, write_slopes_csv, Estimator, PlotSeries, SlopeRow, SweepSpec,
};
use superres_core::Error;

fn sizes_tag(sizes: &[usize]) -> String {
    sizes
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join("-")
}

pub fn run(cli: &Cli, file_cfg: Option<SweepConfig>) -> Result<u8, Error> {
    let cfg = file_cfg.unwrap_or_default();
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let estimator: Estimator = cli
        .estimator
        .clone()
        .or(cfg.estimator.clone())
        .unwrap_or_else(|| "esprit".into())
        .parse()?;
    let clump_configs = cfg.clump_configs.clone().unwrap_or_else(|| vec![vec![2]]);
    let success_level = cfg.success_level.unwrap_or(0.95);

    let mut slope_rows = Vec::new();
    let mut curve_series = Vec::new();
    for sizes in &clump_configs {
        let mut spec = match cli.profile {
            Profile::Desk => SweepSpec::desk(sizes.clone(), seed),
            Profile::Paper => SweepSpec::paper(sizes.clone(), seed),
        };
        if let Some(m) = cfg.m {
            spec.m = m;
        }
        if let Some(l) = cfg.l {
            spec.l = l;
        }
        if let Some(beta) = cfg.beta {
            spec.beta = beta;
        }
        if let Some(grid) = &cfg.srf_grid {
            spec.srf_grid = grid.clone();
        }
        if let Some(grid) = &cfg.sigma_grid {
            spec.sigma_grid = grid.clone();
        }
        if let Some(trials) = cfg.trials_per_cell {
            spec.trials_per_cell = trials;
        }
        if let Some(draws) = cfg.phase_draws {
            spec.phase_draws = draws;
        }
        spec.check_bounds = cfg.check_bounds;

        let tag = sizes_tag(sizes);
        eprintln!(
            "sweep: estimator={} clumps={tag} grid={}x{} trials={} draws={}",
            estimator.name(),
            spec.srf_grid.len(),
            spec.sigma_grid.len(),
            spec.trials_per_cell,
            spec.phase_draws
        );
        let result = run_sweep(&spec, estimator)?;

        let mut cells = Vec::new();
        write_cells_csv(&result, &mut cells)?;
        super::write_file(
            &cli.out.join(format!("cells_{}_{tag}.csv", estimator.name())),
            &cells,
        )?;
        let mut meta = Vec::new();
        write_meta_csv(&result, &mut meta)?;
        super::write_file(
            &cli.out.join(format!("meta_{}_{tag}.csv", estimator.name())),
            &meta,
        )?;

        let curve = extract_transition_curve(&result, success_level);
        let mut curve_csv = Vec::new();
        write_curve_csv(&curve, estimator, &mut curve_csv)?;
        super::write_file(
            &cli.out.join(format!("curve_{}_{tag}.csv", estimator.name())),
            &curve_csv,
        )?;

        let lambda = sizes.iter().copied().max().unwrap_or(1);
        match fit_transition_slope(&curve) {
            Ok(fit) => {
                println!(
                    "clumps={tag}: q(Omega) = {:.3} (theory {}), r^2 = {:.3}",
                    -fit.slope,
                    2 * lambda - 2,
                    fit.r_squared
                );
                slope_rows.push(SlopeRow {
                    estimator,
                    clumps: sizes.len(),
                    lambda,
                    fit,
                });
            }
            Err(e) => eprintln!("clumps={tag}: transition fit unavailable: {e}"),
        }

        curve_series.push(PlotSeries {
            label: format!("{} {tag}", estimator.name()),
            points: curve
                .iter()
                .filter_map(|p| p.sigma_star.map(|s| (p.srf, s)))
                .collect(),
        });

        if !result.bound_failures.is_empty() {
            eprintln!(
                "warning: {} bound violations recorded",
                result.bound_failures.len()
            );
            for report in &result.bound_failures {
                eprintln!("  {}", report.csv_row());
            }
            return Ok(1);
        }
    }

    let mut slopes_csv = Vec::new();
    write_slopes_csv(&slope_rows, &mut slopes_csv)?;
    super::write_file(&cli.out.join("slopes.csv"), &slopes_csv)?;

    let svg = superres_core::experiments::render_loglog_svg(
        &format!("95% phase transition ({})", estimator.name()),
        "SRF",
        "sigma*",
        &curve_series,
    );
    super::write_file(
        &cli.out.join(format!("transition_{}.svg", estimator.name())),
        svg.as_bytes(),
    )?;
    Ok(0)
}
