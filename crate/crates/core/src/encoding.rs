//! Classical-to-quantum encodings.
//!
//! A sample goes through `normalize → rescale(α) → encode(kind)`. Both encodings
//! map `R^d` to unit vectors in `R^{d+1}`, so they are interchangeable in a grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PgmError, Result};

/// A finite real feature vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(PgmError::NonFiniteFeature(pos));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A unit vector standing for the pure state `|ψ⟩⟨ψ|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<f64>);

impl PureState {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() || amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(PgmError::InvalidOperator("state amplitudes must be finite".into()));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(PgmError::InvalidOperator(format!(
                "state is not normalized (norm {norm})"
            )));
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(mut v: Vec<f64>) -> Result<Self> {
        let norm = l2_norm(&v);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(PgmError::InvalidOperator("cannot normalize vector".into()));
        }
        v.iter_mut().for_each(|a| *a /= norm);
        Ok(Self(v))
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `⟨ψ|φ⟩`
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(PgmError::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(dot(&self.0, &other.0))
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Stereographic,
    Amplitude,
}

impl EncodingKind {
    pub const ALL: [EncodingKind; 2] = [EncodingKind::Stereographic, EncodingKind::Amplitude];
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::Stereographic => "stereographic",
            EncodingKind::Amplitude => "amplitude",
        })
    }
}

impl FromStr for EncodingKind {
    type Err = PgmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stereo" | "stereographic" => Ok(EncodingKind::Stereographic),
            "amplit" | "amplitude" => Ok(EncodingKind::Amplitude),
            other => Err(PgmError::InvalidConfig(format!("unknown encoding '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizerKind {
    None,
    #[default]
    Zscore,
    Minmax,
}

impl fmt::Display for NormalizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalizerKind::None => "none",
            NormalizerKind::Zscore => "zscore",
            NormalizerKind::Minmax => "minmax",
        })
    }
}

impl FromStr for NormalizerKind {
    type Err = PgmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(NormalizerKind::None),
            "zscore" => Ok(NormalizerKind::Zscore),
            "minmax" => Ok(NormalizerKind::Minmax),
            other => Err(PgmError::InvalidConfig(format!("unknown normalizer '{other}'"))),
        }
    }
}

/// How features become states. The pipeline order is fixed:
/// normalize, then multiply by `rescale_alpha`, then encode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodingConfig {
    pub kind: EncodingKind,
    pub rescale_alpha: f64,
    pub normalizer: NormalizerKind,
}

impl EncodingConfig {
    pub fn new(kind: EncodingKind, rescale_alpha: f64, normalizer: NormalizerKind) -> Result<Self> {
        check_alpha(rescale_alpha)?;
        Ok(Self {
            kind,
            rescale_alpha,
            normalizer,
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.rescale_alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(PgmError::InvalidAlpha(alpha))
    }
}

/// Per-feature affine normalization fitted on training rows only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizerParams {
    pub kind: NormalizerKind,
    pub location: Vec<f64>,
    pub scale: Vec<f64>,
}

impl NormalizerParams {
    /// zscore uses mean and population std; minmax uses min and range.
    /// A zero (degenerate) scale is replaced by 1.
    pub fn fit(train: &[FeatureVector], kind: NormalizerKind) -> Result<Self> {
        let first = train
            .first()
            .ok_or_else(|| PgmError::InvalidConfig("cannot fit normalizer on empty set".into()))?;
        let d = first.len();
        for (i, x) in train.iter().enumerate() {
            if x.len() != d {
                return Err(PgmError::AtIndex {
                    index: i,
                    source: Box::new(PgmError::DimMismatch {
                        expected: d,
                        found: x.len(),
                    }),
                });
            }
        }
        let m = train.len() as f64;
        let (location, scale) = match kind {
            NormalizerKind::None => (vec![0.0; d], vec![1.0; d]),
            NormalizerKind::Zscore => {
                let mut mean = vec![0.0; d];
                for x in train {
                    for (acc, v) in mean.iter_mut().zip(x.as_slice()) {
                        *acc += v;
                    }
                }
                mean.iter_mut().for_each(|v| *v /= m);
                let mut var = vec![0.0; d];
                for x in train {
                    for ((acc, v), mu) in var.iter_mut().zip(x.as_slice()).zip(&mean) {
                        *acc += (v - mu) * (v - mu);
                    }
                }
                let std = var.into_iter().map(|v| (v / m).sqrt()).collect();
                (mean, std)
            }
            NormalizerKind::Minmax => {
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for x in train {
                    for (j, &v) in x.as_slice().iter().enumerate() {
                        lo[j] = lo[j].min(v);
                        hi[j] = hi[j].max(v);
                    }
                }
                let range = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
                (lo, range)
            }
        };
        let scale = scale
            .into_iter()
            .map(|s: f64| if s > 0.0 && s.is_finite() { s } else { 1.0 })
            .collect();
        Ok(Self {
            kind,
            location,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.location.len()
    }

    pub fn apply(&self, x: &FeatureVector) -> Result<FeatureVector> {
        self.check_dim(x)?;
        let values = x
            .as_slice()
            .iter()
            .zip(&self.location)
            .zip(&self.scale)
            .map(|((v, loc), s)| (v - loc) / s)
            .collect();
        FeatureVector::new(values)
    }

    pub fn invert(&self, x: &FeatureVector) -> Result<FeatureVector> {
        self.check_dim(x)?;
        let values = x
            .as_slice()
            .iter()
            .zip(&self.location)
            .zip(&self.scale)
            .map(|((v, loc), s)| v * s + loc)
            .collect();
        FeatureVector::new(values)
    }

    fn check_dim(&self, x: &FeatureVector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(PgmError::DimMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// `x ↦ αx`
pub fn rescale(x: &FeatureVector, alpha: f64) -> Result<FeatureVector> {
    check_alpha(alpha)?;
    FeatureVector::new(x.as_slice().iter().map(|v| alpha * v).collect())
}

/// `(x, 1) / ‖(x, 1)‖`
pub fn encode_amplitude(x: &FeatureVector) -> PureState {
    let mut v = Vec::with_capacity(x.len() + 1);
    v.extend_from_slice(x.as_slice());
    v.push(1.0);
    let norm = l2_norm(&v);
    v.iter_mut().for_each(|a| *a /= norm);
    PureState(v)
}

/// Inverse stereographic projection: `(2x, ‖x‖² − 1) / (‖x‖² + 1)`.
pub fn encode_stereographic(x: &FeatureVector) -> PureState {
    let sq: f64 = x.as_slice().iter().map(|v| v * v).sum();
    let denom = sq + 1.0;
    let mut v: Vec<f64> = x.as_slice().iter().map(|xi| 2.0 * xi / denom).collect();
    v.push((sq - 1.0) / denom);
    PureState(v)
}

pub fn encode(x: &FeatureVector, kind: EncodingKind) -> PureState {
    match kind {
        EncodingKind::Amplitude => encode_amplitude(x),
        EncodingKind::Stereographic => encode_stereographic(x),
    }
}

/// Runs one sample through the full pipeline.
pub fn encode_sample(
    x: &FeatureVector,
    cfg: &EncodingConfig,
    params: &NormalizerParams,
) -> Result<PureState> {
    let normalized = params.apply(x)?;
    let scaled = rescale(&normalized, cfg.rescale_alpha)?;
    Ok(encode(&scaled, cfg.kind))
}

pub fn encode_dataset(
    xs: &[FeatureVector],
    cfg: &EncodingConfig,
    params: &NormalizerParams,
) -> Result<Vec<PureState>> {
    xs.iter()
        .enumerate()
        .map(|(i, x)| encode_sample(x, cfg, params).map_err(PgmError::at_index(i)))
        .collect()
}
