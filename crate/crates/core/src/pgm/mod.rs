//! The PGM classifier: class ensembles, POVM construction (dense or Gram
//! engine), Born-rule scoring and the smallest-index argmax rule.

mod dense;
mod ensemble;
mod gram;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{encode_dataset, encode_sample, EncodingConfig, FeatureVector, NormalizerParams, PureState};
use crate::error::{PgmError, Result};
use crate::operator::{DEFAULT_DENSE_DIM_LIMIT, DEFAULT_RANK_TOL};

pub use dense::{build_dense_pgm, build_from_ensemble, DensePgm};
pub use ensemble::{
    copies_centroid, mixture, quantum_centroid, ClassEnsemble, LabeledStateSet, Priors, PriorsMode,
};
pub use gram::{build_gram_pgm, overlap_power, weighted_gram, GramPgm};

/// Scores are rounded to this many decimals before the argmax so that float
/// ties resolve identically on every platform.
pub const TIE_DECIMALS: i32 = 12;

/// Per-class Born-rule scores.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Smallest index among the maximal (rounded) scores.
    pub fn argmax(&self) -> usize {
        argmax_smallest_index(&self.0)
    }
}

/// Smallest index attaining the maximum after rounding to [`TIE_DECIMALS`].
pub fn argmax_smallest_index(scores: &[f64]) -> usize {
    let scale = 10f64.powi(TIE_DECIMALS);
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, &s) in scores.iter().enumerate() {
        let r = (s * scale).round() / scale;
        if r > best_value {
            best = i;
            best_value = r;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    /// Dense while the lifted dimension is within the limit and no larger
    /// than the training set; Gram otherwise.
    #[default]
    Auto,
    Dense,
    Gram,
}

impl fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineChoice::Auto => "auto",
            EngineChoice::Dense => "dense",
            EngineChoice::Gram => "gram",
        })
    }
}

impl FromStr for EngineChoice {
    type Err = PgmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(EngineChoice::Auto),
            "dense" => Ok(EngineChoice::Dense),
            "gram" => Ok(EngineChoice::Gram),
            other => Err(PgmError::InvalidConfig(format!("unknown engine '{other}'"))),
        }
    }
}

/// Everything needed to fit a model from raw features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgmConfig {
    pub encoding: EncodingConfig,
    pub copies: u32,
    #[serde(default)]
    pub priors: PriorsMode,
    #[serde(default)]
    pub engine: EngineChoice,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default = "default_dense_dim_limit")]
    pub dense_dim_limit: usize,
}

fn default_rank_tol() -> f64 {
    DEFAULT_RANK_TOL
}

fn default_dense_dim_limit() -> usize {
    DEFAULT_DENSE_DIM_LIMIT
}

impl PgmConfig {
    pub fn new(encoding: EncodingConfig, copies: u32) -> Self {
        Self {
            encoding,
            copies,
            priors: PriorsMode::Uniform,
            engine: EngineChoice::Auto,
            rank_tol: DEFAULT_RANK_TOL,
            dense_dim_limit: DEFAULT_DENSE_DIM_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.encoding.validate()?;
        if self.copies == 0 {
            return Err(PgmError::InvalidConfig("copies must be at least 1".into()));
        }
        if !(self.rank_tol > 0.0) {
            return Err(PgmError::InvalidConfig("rank_tol must be positive".into()));
        }
        Ok(())
    }

    /// Engine actually used for `train_size` states of dimension `state_dim`.
    pub fn resolve_engine(&self, state_dim: usize, train_size: usize) -> Result<EngineKind> {
        let lifted = state_dim.checked_pow(self.copies);
        match self.engine {
            EngineChoice::Gram => Ok(EngineKind::Gram),
            EngineChoice::Dense => match lifted {
                Some(dim) if dim <= self.dense_dim_limit => Ok(EngineKind::Dense),
                _ => Err(PgmError::DenseBlowup {
                    base: state_dim,
                    copies: self.copies,
                    limit: self.dense_dim_limit,
                }),
            },
            EngineChoice::Auto => Ok(match lifted {
                Some(dim) if dim <= self.dense_dim_limit && dim <= train_size.max(1) => {
                    EngineKind::Dense
                }
                _ => EngineKind::Gram,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Dense,
    Gram,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Dense => "dense",
            EngineKind::Gram => "gram",
        })
    }
}

#[derive(Clone, Debug)]
pub enum PgmEngine {
    Dense(DensePgm),
    Gram(GramPgm),
}

impl PgmEngine {
    pub fn kind(&self) -> EngineKind {
        match self {
            PgmEngine::Dense(_) => EngineKind::Dense,
            PgmEngine::Gram(_) => EngineKind::Gram,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            PgmEngine::Dense(d) => d.n_classes(),
            PgmEngine::Gram(g) => g.n_classes(),
        }
    }

    pub fn copies(&self) -> u32 {
        match self {
            PgmEngine::Dense(d) => d.copies(),
            PgmEngine::Gram(g) => g.copies(),
        }
    }

    pub fn state_dim(&self) -> usize {
        match self {
            PgmEngine::Dense(d) => d.state_dim(),
            PgmEngine::Gram(g) => g.state_dim(),
        }
    }

    pub fn score_state(&self, psi: &PureState) -> Result<ScoreVector> {
        match self {
            PgmEngine::Dense(d) => d.score_state(psi),
            PgmEngine::Gram(g) => g.score_state(psi),
        }
    }

    pub fn build(
        kind: EngineKind,
        train: &LabeledStateSet,
        priors: &Priors,
        copies: u32,
        rank_tol: f64,
        dense_dim_limit: usize,
    ) -> Result<Self> {
        Ok(match kind {
            EngineKind::Dense => PgmEngine::Dense(build_dense_pgm(
                train,
                priors,
                copies,
                rank_tol,
                dense_dim_limit,
            )?),
            EngineKind::Gram => PgmEngine::Gram(build_gram_pgm(train, priors, copies, rank_tol)?),
        })
    }
}

/// A fitted classifier: normalizer, encoding and measurement.
#[derive(Clone, Debug)]
pub struct PgmModel {
    pub encoding: EncodingConfig,
    pub normalizer: NormalizerParams,
    pub priors: Priors,
    pub rank_tol: f64,
    pub engine: PgmEngine,
}

impl PgmModel {
    /// Fits on raw features; `labels` index into `0..n_classes`.
    pub fn fit(
        features: &[FeatureVector],
        labels: &[usize],
        n_classes: usize,
        config: &PgmConfig,
    ) -> Result<Self> {
        config.validate()?;
        if features.is_empty() {
            return Err(PgmError::InvalidConfig("empty training set".into()));
        }
        let normalizer = NormalizerParams::fit(features, config.encoding.normalizer)?;
        let states = encode_dataset(features, &config.encoding, &normalizer)?;
        let train = LabeledStateSet::new(states, labels.to_vec(), n_classes)?;
        let priors = Priors::resolve(&config.priors, train.class_counts())?;
        let kind = config.resolve_engine(train.state_dim(), train.len())?;
        let engine = PgmEngine::build(
            kind,
            &train,
            &priors,
            config.copies,
            config.rank_tol,
            config.dense_dim_limit,
        )?;
        Ok(Self {
            encoding: config.encoding.clone(),
            normalizer,
            priors,
            rank_tol: config.rank_tol,
            engine,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.engine.n_classes()
    }

    pub fn copies(&self) -> u32 {
        self.engine.copies()
    }

    pub fn n_features(&self) -> usize {
        self.normalizer.dim()
    }

    pub fn encode(&self, x: &FeatureVector) -> Result<PureState> {
        encode_sample(x, &self.encoding, &self.normalizer)
    }

    pub fn score(&self, x: &FeatureVector) -> Result<ScoreVector> {
        self.engine.score_state(&self.encode(x)?)
    }

    pub fn classify(&self, x: &FeatureVector) -> Result<usize> {
        Ok(self.score(x)?.argmax())
    }

    /// Scores and labels in input order.
    pub fn predict_batch(&self, xs: &[FeatureVector]) -> Result<(Vec<usize>, Vec<ScoreVector>)> {
        let scores = xs
            .par_iter()
            .enumerate()
            .map(|(i, x)| self.score(x).map_err(PgmError::at_index(i)))
            .collect::<Result<Vec<_>>>()?;
        let labels = scores.iter().map(ScoreVector::argmax).collect();
        Ok((labels, scores))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{EncodingKind, NormalizerKind};

    #[test]
    fn argmax_examples() {
        assert_eq!(argmax_smallest_index(&[0.2, 0.5, 0.3]), 1);
        assert_eq!(argmax_smallest_index(&[0.5, 0.5]), 0);
        assert_eq!(argmax_smallest_index(&[1.0]), 0);
        // differences below the rounding grain count as ties
        assert_eq!(argmax_smallest_index(&[0.5, 0.5 + 1e-15]), 0);
        assert_eq!(argmax_smallest_index(&[0.5, 0.5 + 1e-9]), 1);
    }

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    fn toy() -> (Vec<FeatureVector>, Vec<usize>) {
        let xs = vec![
            fv(&[-2.0, 0.1]),
            fv(&[-2.2, -0.1]),
            fv(&[-1.9, 0.0]),
            fv(&[2.0, 0.2]),
            fv(&[2.1, -0.2]),
            fv(&[1.8, 0.1]),
        ];
        (xs, vec![0, 0, 0, 1, 1, 1])
    }

    fn config(engine: EngineChoice, copies: u32) -> PgmConfig {
        let enc = EncodingConfig::new(EncodingKind::Amplitude, 1.0, NormalizerKind::Zscore).unwrap();
        PgmConfig {
            engine,
            ..PgmConfig::new(enc, copies)
        }
    }

    #[test]
    fn fit_and_predict_toy() {
        let (xs, ys) = toy();
        let model = PgmModel::fit(&xs, &ys, 2, &config(EngineChoice::Auto, 1)).unwrap();
        assert_eq!(model.engine.kind(), EngineKind::Dense);
        let (pred, scores) = model.predict_batch(&xs).unwrap();
        assert_eq!(pred, ys);
        for s in &scores {
            assert!((s.sum() - 1.0).abs() < 1e-8);
        }
        assert_eq!(model.classify(&xs[4]).unwrap(), 1);
        let (empty, _) = model.predict_batch(&[]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn engine_resolution() {
        let c = config(EngineChoice::Auto, 60);
        assert_eq!(c.resolve_engine(31, 300).unwrap(), EngineKind::Gram);
        let c = config(EngineChoice::Auto, 1);
        assert_eq!(c.resolve_engine(11, 114).unwrap(), EngineKind::Dense);
        let c = config(EngineChoice::Dense, 60);
        assert!(matches!(
            c.resolve_engine(31, 300),
            Err(PgmError::DenseBlowup { .. })
        ));
        let c = config(EngineChoice::Gram, 1);
        assert_eq!(c.resolve_engine(3, 10).unwrap(), EngineKind::Gram);
    }

    #[test]
    fn predict_batch_reports_index() {
        let (xs, ys) = toy();
        let model = PgmModel::fit(&xs, &ys, 2, &config(EngineChoice::Gram, 2)).unwrap();
        let err = model
            .predict_batch(&[fv(&[0.0, 0.0]), fv(&[1.0])])
            .unwrap_err();
        assert!(matches!(err, PgmError::AtIndex { index: 1, .. }));
    }

    #[test]
    fn fit_rejects_bad_config() {
        let (xs, ys) = toy();
        let mut c = config(EngineChoice::Auto, 0);
        assert!(PgmModel::fit(&xs, &ys, 2, &c).is_err());
        c.copies = 1;
        c.encoding.rescale_alpha = -1.0;
        assert!(matches!(
            PgmModel::fit(&xs, &ys, 2, &c),
            Err(PgmError::InvalidAlpha(_))
        ));
        assert!(matches!(
            PgmModel::fit(&xs, &ys, 3, &config(EngineChoice::Auto, 1)),
            Err(PgmError::EmptyClass(2))
        ));
    }
}
