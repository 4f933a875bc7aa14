//! `superres generate`: emit a synthetic measurement CSV.

use crate::config::GenerateConfig;
use crate::Cli;
use superres_core::forward::{add_noise, fourier_coefficients};
use superres_core::Error;

pub fn run(cli: &Cli, file_cfg: Option<GenerateConfig>) -> Result<u8, Error> {
    let cfg = file_cfg.ok_or_else(|| {
        Error::Parameter("generate needs a [generate] section in the config file".into())
    })?;
    let seed = cli.seed.or(cfg.synthetic.seed).unwrap_or(0);
    let measure = cfg.synthetic.measure(seed)?;
    let y0 = fourier_coefficients(&measure, cfg.synthetic.m);
    let measurement = add_noise(&y0, cfg.synthetic.sigma, seed);

    let name = cfg.output.as_deref().unwrap_or("samples.csv");
    let path = cli.out.join(name);
    let mut buf = Vec::new();
    measurement.write_csv(&mut buf)?;
    super::write_file(&path, &buf)?;
    println!(
        "wrote {} samples (M = {}, sigma = {}, seed = {seed}) to {}",
        measurement.samples.len(),
        cfg.synthetic.m,
        cfg.synthetic.sigma,
        path.display()
    );
    Ok(0)
}
