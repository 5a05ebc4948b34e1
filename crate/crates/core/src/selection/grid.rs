use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::{EncodingConfig, EncodingKind, NormalizerKind};
use crate::error::{PgmError, Result};
use crate::pgm::{EngineChoice, PgmConfig, PriorsMode};

/// One hyperparameter cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub encoding: EncodingKind,
    pub alpha: f64,
    pub copies: u32,
    pub priors: PriorsMode,
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/alpha={}/n={}/priors={}",
            self.encoding, self.alpha, self.copies, self.priors
        )
    }
}

/// Settings shared by every grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseSettings {
    pub normalizer: NormalizerKind,
    pub engine: EngineChoice,
    pub rank_tol: f64,
    pub dense_dim_limit: usize,
}

impl Default for BaseSettings {
    fn default() -> Self {
        Self {
            normalizer: NormalizerKind::Zscore,
            engine: EngineChoice::Auto,
            rank_tol: crate::operator::DEFAULT_RANK_TOL,
            dense_dim_limit: crate::operator::DEFAULT_DENSE_DIM_LIMIT,
        }
    }
}

impl GridPoint {
    pub fn to_config(&self, base: &BaseSettings) -> Result<PgmConfig> {
        Ok(PgmConfig {
            encoding: EncodingConfig::new(self.encoding, self.alpha, base.normalizer)?,
            copies: self.copies,
            priors: self.priors.clone(),
            engine: base.engine,
            rank_tol: base.rank_tol,
            dense_dim_limit: base.dense_dim_limit,
        })
    }
}

/// Cartesian hyperparameter grid. Enumeration order (encodings, then α, then
/// copies, then priors, each in listed order) is also the tie-break order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub encodings: Vec<EncodingKind>,
    pub alphas: Vec<f64>,
    pub copies: Vec<u32>,
    pub priors: Vec<PriorsMode>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            encodings: vec![EncodingKind::Stereographic, EncodingKind::Amplitude],
            alphas: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            copies: std::iter::once(1).chain((5..=60).step_by(5)).collect(),
            priors: vec![PriorsMode::Uniform],
        }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &encoding in &self.encodings {
            for &alpha in &self.alphas {
                for &copies in &self.copies {
                    for priors in &self.priors {
                        out.push(GridPoint {
                            encoding,
                            alpha,
                            copies,
                            priors: priors.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.encodings.len() * self.alphas.len() * self.copies.len() * self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(PgmError::InvalidConfig("grid is empty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(PgmError::InvalidAlpha(*a));
        }
        if self.copies.contains(&0) {
            return Err(PgmError::InvalidConfig("copies must be at least 1".into()));
        }
        Ok(())
    }
}

/// `default`, or `;`-separated `key=values` with keys `encodings`, `alphas`,
/// `copies` (comma lists) and `priors` (`/`-separated). Missing keys keep
/// their default values, e.g. `encodings=amplit;alphas=0.5,1;copies=1`.
impl FromStr for Grid {
    type Err = PgmError;

    fn from_str(s: &str) -> Result<Self> {
        let mut grid = Grid::default();
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("default") {
            return Ok(grid);
        }
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| PgmError::InvalidConfig(format!("grid entry '{part}' lacks '='")))?;
            let list = || values.split(',').map(str::trim).filter(|v| !v.is_empty());
            match key.trim() {
                "encodings" | "encoding" => {
                    grid.encodings = list().map(str::parse).collect::<Result<_>>()?
                }
                "alphas" | "alpha" => {
                    grid.alphas = list()
                        .map(|v| {
                            v.parse::<f64>()
                                .map_err(|_| PgmError::InvalidConfig(format!("bad alpha '{v}'")))
                        })
                        .collect::<Result<_>>()?
                }
                "copies" | "n" => {
                    grid.copies = list()
                        .map(|v| {
                            v.parse::<u32>()
                                .map_err(|_| PgmError::InvalidConfig(format!("bad copies '{v}'")))
                        })
                        .collect::<Result<_>>()?
                }
                "priors" => {
                    grid.priors = values
                        .split('/')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                other => {
                    return Err(PgmError::InvalidConfig(format!("unknown grid key '{other}'")))
                }
            }
        }
        grid.validate()?;
        Ok(grid)
    }
}
