//! Run configuration: JSON-serializable description of a coin, initial state,
//! horizon, grid, and output location, with the validation rules every
//! command shares.

use crate::coin::{CoinError, CoinMatrix, CoinSpec};
use crate::linalg::{vnorm_sqr, C64};
use crate::walk::{InitialState, WalkError};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Initial states with a norm defect at or below this are accepted silently.
pub const INIT_ACCEPT_TOL: f64 = 1e-9;

/// Defects up to this are renormalized with a warning; beyond it the config
/// is rejected.
pub const INIT_RENORM_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("horizon must be at least 1")]
    HorizonZero,
    #[error("stride must be at least 1")]
    StrideZero,
    #[error("k_grid must be a power of two of at least 64, got {got}")]
    BadGrid { got: usize },
    #[error("initial state norm defect {defect:.3e} exceeds {INIT_RENORM_TOL:.1e}")]
    InitialNotNormalizable { defect: f64 },
    #[error(transparent)]
    Coin(#[from] CoinError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("failed to read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

/// A complex number as an unambiguous (re, im) pair in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ComplexDef {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexDef> for C64 {
    fn from(z: ComplexDef) -> C64 {
        C64::new(z.re, z.im)
    }
}

impl From<C64> for ComplexDef {
    fn from(z: C64) -> ComplexDef {
        ComplexDef { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoinChoice {
    Grover,
    Hadamard,
    Custom {
        a: ComplexDef,
        b: ComplexDef,
        c: ComplexDef,
        d: ComplexDef,
    },
}

impl CoinChoice {
    pub fn build(&self) -> Result<CoinMatrix, CoinError> {
        match self {
            CoinChoice::Grover => Ok(CoinMatrix::grover()),
            CoinChoice::Hadamard => Ok(CoinMatrix::hadamard()),
            CoinChoice::Custom { a, b, c, d } => {
                let spec = CoinSpec::new((*a).into(), (*b).into(), (*c).into(), (*d).into())?;
                CoinMatrix::new(spec)
            }
        }
    }
}

fn default_horizon() -> u64 {
    100
}

fn default_k_grid() -> usize {
    256
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

fn default_stride() -> u64 {
    1
}

fn default_initial() -> [ComplexDef; 4] {
    [
        ComplexDef { re: 1.0, im: 0.0 },
        ComplexDef::default(),
        ComplexDef::default(),
        ComplexDef::default(),
    ]
}

fn default_coin() -> CoinChoice {
    CoinChoice::Grover
}

/// One reproducible run: everything a command needs, JSON round-trippable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_coin")]
    pub coin: CoinChoice,
    /// Initial chirality amplitudes (α, β, γ, μ) at the origin.
    #[serde(default = "default_initial")]
    pub initial: [ComplexDef; 4],
    /// Largest simulated time.
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    /// Wavenumber grid size (power of two, ≥ 64).
    #[serde(default = "default_k_grid")]
    pub k_grid: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Reserved for randomized extensions; the core dynamics are deterministic.
    #[serde(default)]
    pub seed: u64,
    /// Time stride between distribution snapshots.
    #[serde(default = "default_stride")]
    pub stride: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            coin: default_coin(),
            initial: default_initial(),
            horizon: default_horizon(),
            k_grid: default_k_grid(),
            output_dir: default_output_dir(),
            seed: 0,
            stride: default_stride(),
        }
    }
}

/// Validated inputs shared by every command.
#[derive(Debug, Clone)]
pub struct ValidatedRun {
    pub coin: CoinMatrix,
    pub init: InitialState,
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<ValidatedRun, ConfigError> {
        if self.horizon < 1 {
            return Err(ConfigError::HorizonZero);
        }
        if self.stride < 1 {
            return Err(ConfigError::StrideZero);
        }
        if self.k_grid < 64 || !self.k_grid.is_power_of_two() {
            return Err(ConfigError::BadGrid { got: self.k_grid });
        }
        let coin = self.coin.build()?;

        let raw: [C64; 4] = [
            self.initial[0].into(),
            self.initial[1].into(),
            self.initial[2].into(),
            self.initial[3].into(),
        ];
        let defect = (vnorm_sqr(&raw) - 1.0).abs();
        if defect > INIT_RENORM_TOL {
            return Err(ConfigError::InitialNotNormalizable { defect });
        }
        let mut warnings = Vec::new();
        if defect > INIT_ACCEPT_TOL {
            warnings.push(format!(
                "initial state renormalized: norm defect {defect:.3e} within {INIT_RENORM_TOL:.1e}"
            ));
        }
        let norm = vnorm_sqr(&raw).sqrt();
        let init = InitialState::new(raw.map(|z| z / norm))?;
        Ok(ValidatedRun {
            coin,
            init,
            warnings,
        })
    }
}
