//! Config file handling: a TOML file with one section per command.
//! Command-line flags override file values.

use serde::Deserialize;
use std::path::{Path, PathBuf};
use superres_core::{AtomicMeasure, ClumpsConfig, Complex64, Error, TorusPoint};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub estimate: Option<EstimateConfig>,
    pub generate: Option<GenerateConfig>,
    pub sweep: Option<SweepConfig>,
    #[serde(rename = "verify-bounds")]
    pub verify_bounds: Option<VerifyConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// A synthetic measure: either explicit atoms or a clumps layout.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Explicit atoms as `[omega, re, im]` triplets.
    pub atoms: Option<Vec<(f64, f64, f64)>>,
    /// Clumps layout (unit-magnitude amplitudes with seeded random phases).
    pub clump_sizes: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub m: usize,
    #[serde(default)]
    pub sigma: f64,
    pub seed: Option<u64>,
}

impl SyntheticSpec {
    /// Builds the measure this spec describes.
    pub fn measure(&self, seed: u64) -> Result<AtomicMeasure, Error> {
        match (&self.atoms, &self.clump_sizes) {
            (Some(atoms), None) => {
                if atoms.is_empty() {
                    return Err(Error::Parameter("synthetic spec with no atoms".into()));
                }
                let support = atoms.iter().map(|&(w, _, _)| TorusPoint::new(w)).collect();
                let amplitudes = atoms
                    .iter()
                    .map(|&(_, re, im)| Complex64::new(re, im))
                    .collect();
                AtomicMeasure::new(support, amplitudes)
            }
            (None, Some(sizes)) => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Parameter("clumps spec needs alpha".into()))?;
                let beta = self.beta.unwrap_or(10.0);
                let cfg = ClumpsConfig::new(self.m, sizes.clone(), alpha, beta)?;
                let support = superres_core::measures::generate_clumps(&cfg, seed)?;
                let amplitudes =
                    superres_core::measures::random_unit_amplitudes(support.len(), seed);
                AtomicMeasure::new(support, amplitudes)
            }
            _ => Err(Error::Parameter(
                "synthetic spec needs exactly one of `atoms` or `clump_sizes`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    /// Input measurement CSV (`k,re,im`); alternative to `synthetic`.
    pub input: Option<PathBuf>,
    pub synthetic: Option<SyntheticSpec>,
    pub s: Option<usize>,
    pub l: Option<usize>,
    pub estimator: Option<String>,
    pub music_grid: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    #[serde(flatten)]
    pub synthetic: SyntheticSpec,
    /// Output file name inside the output directory.
    pub output: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// One sweep per clump-size vector; default `[[2]]`.
    pub clump_configs: Option<Vec<Vec<usize>>>,
    pub beta: Option<f64>,
    pub m: Option<usize>,
    pub l: Option<usize>,
    pub srf_grid: Option<Vec<f64>>,
    pub sigma_grid: Option<Vec<f64>>,
    pub trials_per_cell: Option<usize>,
    pub phase_draws: Option<usize>,
    pub estimator: Option<String>,
    pub seed: Option<u64>,
    pub success_level: Option<f64>,
    #[serde(default)]
    pub check_bounds: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Scenario names; defaults to the full suite.
    pub scenarios: Option<Vec<String>>,
    /// Window length `N` for the fixed-window uncertainty checks.
    pub uncertainty_window: Option<usize>,
    /// Random measures per atom count in the uncertainty scenario.
    pub uncertainty_samples: Option<usize>,
    pub seed: Option<u64>,
}
