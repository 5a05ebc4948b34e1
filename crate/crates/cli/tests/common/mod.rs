#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Runs the `pgm` binary with an explicit worker count.
pub fn pgm(args: &[&str], workers: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgm"))
        .args(args)
        .env("PGM_WORKERS", workers)
        .output()
        .expect("failed to launch pgm")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Writes `rows` under a header of `x0..x{d-1}` plus `label`.
pub fn write_csv(path: &Path, rows: &[(Vec<f64>, String)]) {
    let d = rows.first().map_or(0, |r| r.0.len());
    let mut text: String = (0..d).map(|j| format!("x{j},")).collect();
    text.push_str("label\n");
    for (x, label) in rows {
        for v in x {
            text.push_str(&format!("{v},"));
        }
        text.push_str(label);
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

/// Isotropic Gaussian blobs, rows interleaved by class.
pub fn blob_rows(
    rng: &mut ChaCha8Rng,
    centers: &[Vec<f64>],
    per_class: usize,
    sigma: f64,
) -> Vec<(Vec<f64>, String)> {
    let d = centers[0].len();
    (0..per_class * centers.len())
        .map(|i| {
            let c = i % centers.len();
            let z = gaussian_vec(rng, d);
            let x = centers[c]
                .iter()
                .zip(z)
                .map(|(m, e)| m + sigma * e)
                .collect();
            (x, format!("c{c}"))
        })
        .collect()
}

/// A 143-row, two-class table shaped like a small radiomics cohort:
/// 72 `high`, 71 `low`, 8 correlated features.
pub fn cohort_rows(seed: u64) -> Vec<(Vec<f64>, String)> {
    let mut r = rng(seed);
    (0..143)
        .map(|i| {
            let high = i < 72;
            let shift = if high { 0.8 } else { -0.8 };
            let base = gaussian_vec(&mut r, 8);
            let x = base
                .iter()
                .enumerate()
                .map(|(j, z)| z + if j < 3 { shift } else { 0.3 * base[0] })
                .collect();
            (x, if high { "high" } else { "low" }.to_string())
        })
        .collect()
}
