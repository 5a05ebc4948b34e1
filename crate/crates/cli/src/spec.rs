//! The TOML model specification shared by `train --config` and the
//! `chosen_config.toml` written by `gridsearch`.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use pgm_core::operator::{DEFAULT_DENSE_DIM_LIMIT, DEFAULT_RANK_TOL};
use pgm_core::selection::{BaseSettings, GridPoint};
use pgm_core::{EncodingConfig, EncodingKind, EngineChoice, NormalizerKind, PgmConfig, PriorsMode};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub encoding: Option<String>,
    pub alpha: Option<f64>,
    pub copies: Option<u32>,
    pub priors: Option<String>,
    pub engine: Option<String>,
    pub normalizer: Option<String>,
    pub rank_tol: Option<f64>,
    pub dense_dim_limit: Option<usize>,
}

impl ModelSpec {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| {
            pgm_core::PgmError::InvalidConfig(format!("config {}: {e}", path.display())).into()
        })
    }

    /// Fields set in `other` win.
    pub fn overlay(mut self, other: ModelSpec) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            encoding,
            alpha,
            copies,
            priors,
            engine,
            normalizer,
            rank_tol,
            dense_dim_limit
        );
        self
    }

    pub fn from_point(point: &GridPoint, base: &BaseSettings) -> Self {
        Self {
            encoding: Some(point.encoding.to_string()),
            alpha: Some(point.alpha),
            copies: Some(point.copies),
            priors: Some(point.priors.to_string()),
            engine: Some(base.engine.to_string()),
            normalizer: Some(base.normalizer.to_string()),
            rank_tol: Some(base.rank_tol),
            dense_dim_limit: Some(base.dense_dim_limit),
        }
    }

    /// Unset fields take their defaults: stereographic, α = 1, one copy,
    /// uniform priors, automatic engine, z-score normalization.
    pub fn resolve(&self) -> pgm_core::Result<PgmConfig> {
        let encoding: EncodingKind = match &self.encoding {
            Some(e) => e.parse()?,
            None => EncodingKind::Stereographic,
        };
        let normalizer: NormalizerKind = match &self.normalizer {
            Some(n) => n.parse()?,
            None => NormalizerKind::Zscore,
        };
        let mut config = PgmConfig::new(
            EncodingConfig::new(encoding, self.alpha.unwrap_or(1.0), normalizer)?,
            self.copies.unwrap_or(1),
        );
        config.priors = match &self.priors {
            Some(p) => p.parse::<PriorsMode>()?,
            None => PriorsMode::Uniform,
        };
        config.engine = match &self.engine {
            Some(e) => e.parse::<EngineChoice>()?,
            None => EngineChoice::Auto,
        };
        config.rank_tol = self.rank_tol.unwrap_or(DEFAULT_RANK_TOL);
        config.dense_dim_limit = self.dense_dim_limit.unwrap_or(DEFAULT_DENSE_DIM_LIMIT);
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }
}
