use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use chebpade::pade::DEFAULT_EPS_DISK;
use chebpade::{Error, Result};

/// Everything that determines the output of a run. Serialized into every
/// manifest; the hash excludes `out` so results do not depend on where they
/// are written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub function: String,
    pub params: BTreeMap<String, String>,
    /// Working precision in decimal digits.
    pub precision: u32,
    /// Order of a single approximant.
    pub n: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// Coefficients to compute; `None` means `2·max(n, n_max) + 10`.
    pub n_coeffs: Option<usize>,
    pub eps_disk: f64,
    pub interpolation_grid: usize,
    pub equilibrium_grid: usize,
    /// Evaluation points for `rates`, e.g. `"1.5i"`; empty uses per-class defaults.
    pub points: Vec<String>,
    /// Order of the partial sum whose zeros are plotted by `figure`.
    pub partial_sum: usize,
    pub figure: Option<u8>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            function: "sqrt2".into(),
            params: BTreeMap::new(),
            precision: 200,
            n: 10,
            n_min: 1,
            n_max: 16,
            n_coeffs: None,
            eps_disk: DEFAULT_EPS_DISK,
            interpolation_grid: 100_000,
            equilibrium_grid: 400,
            points: Vec::new(),
            partial_sum: 100,
            figure: None,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n", self.n),
            ("n_min", self.n_min),
            ("n_max", self.n_max),
            ("interpolation_grid", self.interpolation_grid),
            ("equilibrium_grid", self.equilibrium_grid),
            ("partial_sum", self.partial_sum),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidInput(format!("{name} must be positive")));
        }
        if self.n_min > self.n_max {
            return Err(Error::InvalidInput(format!("n_min {} exceeds n_max {}", self.n_min, self.n_max)));
        }
        if !(self.eps_disk > 0.0) {
            return Err(Error::InvalidInput("eps_disk must be positive".into()));
        }
        if let Some(f) = self.figure {
            if !(1..=4).contains(&f) {
                return Err(Error::InvalidInput(format!("figure must be 1-4, got {f}")));
            }
        }
        Ok(())
    }

    pub fn coefficient_count(&self, order: usize) -> usize {
        self.n_coeffs.unwrap_or(2 * order + 10)
    }

    /// SHA-256 of the canonical JSON form, without the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        let text = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
