#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use pgm_core::encoding::encode;
use pgm_core::pgm::LabeledStateSet;
use pgm_core::{Dataset, EncodingKind, FeatureVector, PureState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Encoded Gaussian features, so states live where real models put them.
pub fn random_state(rng: &mut ChaCha8Rng, d: usize) -> PureState {
    let kind = if rng.gen_bool(0.5) {
        EncodingKind::Stereographic
    } else {
        EncodingKind::Amplitude
    };
    let x = FeatureVector::new(gaussian_vec(rng, d)).unwrap();
    encode(&x, kind)
}

/// Unit vector in `dim` dimensions, uniform on the sphere.
pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> PureState {
    PureState::normalized(gaussian_vec(rng, dim)).unwrap()
}

/// `m` states over feature dimension `d`; every class gets at least one.
pub fn random_set(rng: &mut ChaCha8Rng, n_classes: usize, d: usize, m: usize) -> LabeledStateSet {
    assert!(m >= n_classes);
    let states = (0..m).map(|_| random_state(rng, d)).collect();
    let labels = (0..m)
        .map(|j| if j < n_classes { j } else { rng.gen_range(0..n_classes) })
        .collect();
    LabeledStateSet::new(states, labels, n_classes).unwrap()
}

pub fn random_priors(rng: &mut ChaCha8Rng, n_classes: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n_classes).map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|p| p / s).collect()
}

/// Isotropic Gaussian blobs, `per_class` rows around each center.
pub fn blobs(rng: &mut ChaCha8Rng, centers: &[Vec<f64>], per_class: usize, sigma: f64) -> Dataset {
    let d = centers[0].len();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for i in 0..per_class * centers.len() {
        let c = i % centers.len();
        let noise = gaussian_vec(rng, d);
        let x = centers[c].iter().zip(noise).map(|(m, z)| m + sigma * z).collect();
        features.push(FeatureVector::new(x).unwrap());
        labels.push(c);
    }
    Dataset::new(
        (0..d).map(|j| format!("x{j}")).collect(),
        (0..centers.len()).map(|c| format!("c{c}")).collect(),
        features,
        labels,
    )
    .unwrap()
}
