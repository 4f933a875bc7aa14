//! `superres estimate`: one-shot support and amplitude recovery.

use crate::config::EstimateConfig;
use crate::Cli;
use std::io::BufReader;
use std::path::PathBuf;
use superres_core::estimators::{esprit, music, recover_amplitudes, MUSIC_GRID_PER_M};
use superres_core::forward::{add_noise, fourier_coefficients};
use superres_core::{Error, Measurement};

pub fn run(
    cli: &Cli,
    file_cfg: Option<EstimateConfig>,
    input_flag: Option<PathBuf>,
    s_flag: Option<usize>,
    l_flag: Option<usize>,
) -> Result<u8, Error> {
    let cfg = file_cfg.unwrap_or(EstimateConfig {
        input: None,
        synthetic: None,
        s: None,
        l: None,
        estimator: None,
        music_grid: None,
        seed: None,
    });
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);

    // Flags override the file; an input path wins over a synthetic spec.
    let input = input_flag.or(cfg.input.clone());
    let measurement = match (&input, &cfg.synthetic) {
        (Some(path), _) => {
            let file = std::fs::File::open(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Measurement::read_csv(BufReader::new(file))?
        }
        (None, Some(spec)) => {
            let measure = spec.measure(seed)?;
            let y0 = fourier_coefficients(&measure, spec.m);
            add_noise(&y0, spec.sigma, seed)
        }
        (None, None) => {
            return Err(Error::Parameter(
                "estimate needs --input or an [estimate.synthetic] spec".into(),
            ))
        }
    };

    let m = measurement.bandwidth();
    let s = s_flag
        .or(cfg.s)
        .or_else(|| cfg.synthetic.as_ref().and_then(|spec| spec.atoms.as_ref().map(|a| a.len())))
        .ok_or_else(|| Error::Parameter("estimate needs the atom count S".into()))?;
    let l = l_flag.or(cfg.l).unwrap_or(m / 2);
    let estimator = cli
        .estimator
        .clone()
        .or(cfg.estimator.clone())
        .unwrap_or_else(|| "esprit".into());

    let result = match estimator.as_str() {
        "esprit" => esprit(&measurement, s, l)?,
        "music" => {
            let grid = cfg.music_grid.unwrap_or(MUSIC_GRID_PER_M * m);
            music(&measurement, s, l, grid)?
        }
        other => return Err(Error::Parameter(format!("unknown estimator '{other}'"))),
    };

    let amplitudes = match recover_amplitudes(&measurement, &result.support_estimate) {
        Ok(x) => Some(x),
        // Repeated nodes leave the support usable but the amplitudes not.
        Err(Error::RepeatedNodes(i, j)) => {
            eprintln!("warning: repeated estimated nodes ({i}, {j}); skipping amplitudes");
            None
        }
        Err(e) => return Err(e),
    };

    let mut sorted: Vec<(f64, Option<superres_core::Complex64>)> = result
        .support_estimate
        .iter()
        .enumerate()
        .map(|(j, p)| (p.value(), amplitudes.as_ref().map(|x| x[j])))
        .collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));

    println!("estimator: {estimator}  M = {m}  S = {s}  L = {l}");
    for (j, (omega, amp)) in sorted.iter().enumerate() {
        match amp {
            Some(x) => println!(
                "omega_hat[{j}] = {omega:.8}  x_hat[{j}] = {:.8} + {:.8}i",
                x.re, x.im
            ),
            None => println!("omega_hat[{j}] = {omega:.8}"),
        }
    }
    let diag = &result.diagnostics;
    println!(
        "sigma_1..4(H) = {:?}  sigma_S(U0) = {:.6e}",
        &diag.singular_values[..diag.singular_values.len().min(4)],
        diag.sigma_s_u0
    );

    let mut csv = String::from("schema_version,j,omega_hat,x_hat_re,x_hat_im\n");
    for (j, (omega, amp)) in sorted.iter().enumerate() {
        let (re, im) = amp.map_or((String::new(), String::new()), |x| {
            (x.re.to_string(), x.im.to_string())
        });
        csv.push_str(&format!("1,{j},{omega},{re},{im}\n"));
    }
    let out = cli.out.join("estimate.csv");
    super::write_file(&out, csv.as_bytes())?;
    Ok(0)
}
