//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pgm_core::encoding::encode;
use pgm_core::metrics::{auc_ovr, binary_rates, ConfusionMatrix};
use pgm_core::operator::{DEFAULT_DENSE_DIM_LIMIT, DEFAULT_RANK_TOL};
use pgm_core::pgm::{
    build_dense_pgm, build_gram_pgm, copies_centroid, quantum_centroid, LabeledStateSet, Priors,
};
use pgm_core::selection::{
    run_protocol, select_robust_config, stratified_holdout, Grid, ProtocolConfig, ResolvedBy,
};
use pgm_core::{
    Dataset, EncodingConfig, EncodingKind, EngineChoice, FeatureVector, NormalizerKind, PgmConfig,
    PgmError, PgmModel, PriorsMode, PureState,
};

use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_state(r: &mut ChaCha8Rng, d: usize) -> PureState {
    let kind = if r.gen_bool(0.5) {
        EncodingKind::Stereographic
    } else {
        EncodingKind::Amplitude
    };
    encode(&FeatureVector::new(gaussian_vec(r, d)).unwrap(), kind)
}

fn unit(r: &mut ChaCha8Rng, dim: usize) -> PureState {
    PureState::normalized(gaussian_vec(r, dim)).unwrap()
}

struct Instance {
    set: LabeledStateSet,
    priors: Priors,
    copies: u32,
    d: usize,
}

/// ℓ in 2..=5, d in 2..=6, n in 1..=3, m in 5..=40, random or uniform priors.
fn instance(r: &mut ChaCha8Rng) -> Instance {
    let l = r.gen_range(2..=5);
    let d = r.gen_range(2..=6);
    let copies = r.gen_range(1..=3);
    let m = r.gen_range(5..=40).max(l);
    let states = (0..m).map(|_| random_state(r, d)).collect();
    let labels = (0..m)
        .map(|j| if j < l { j } else { r.gen_range(0..l) })
        .collect();
    let set = LabeledStateSet::new(states, labels, l).unwrap();
    let mode = if r.gen_bool(0.5) {
        PriorsMode::Uniform
    } else {
        let raw: Vec<f64> = (0..l).map(|_| r.gen_range(0.1..1.0)).collect();
        let s: f64 = raw.iter().sum();
        PriorsMode::Explicit(raw.iter().map(|p| p / s).collect())
    };
    let priors = Priors::resolve(&mode, set.class_counts()).unwrap();
    Instance {
        set,
        priors,
        copies,
        d,
    }
}

fn instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut r = rng(seed);
    (0..count).map(|_| instance(&mut r)).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_completeness = 0.0f64;
    let mut worst_eig = f64::INFINITY;
    for inst in instances(101, 120) {
        let pgm = build_dense_pgm(
            &inst.set,
            &inst.priors,
            inst.copies,
            DEFAULT_RANK_TOL,
            DEFAULT_DENSE_DIM_LIMIT,
        )
        .map_err(|e| e.to_string())?;
        worst_completeness = worst_completeness.max(pgm.completeness_error());
        for f in pgm.povm() {
            worst_eig = worst_eig.min(f.min_eigenvalue().map_err(|e| e.to_string())?);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst_completeness <= 1e-8, || {
        format!("completeness error {worst_completeness:e}")
    })?;
    check(worst_eig >= -1e-8, || {
        format!("min eigenvalue {worst_eig:e}")
    })?;
    check(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "120 ensembles, max |sum F - I| = {worst_completeness:.1e}, min eig = {worst_eig:.1e}, {secs:.1} s"
    ))
}

fn criterion_2() -> Outcome {
    let mut r = rng(202);
    let mut worst_sum = 0.0f64;
    let mut worst_min = f64::INFINITY;
    let mut models = 0;
    let mut record = |f: &[f64]| {
        worst_sum = worst_sum.max((f.iter().sum::<f64>() - 1.0).abs());
        worst_min = worst_min.min(f.iter().copied().fold(f64::INFINITY, f64::min));
    };
    for inst in instances(202, 100) {
        let dense = build_dense_pgm(
            &inst.set,
            &inst.priors,
            inst.copies,
            DEFAULT_RANK_TOL,
            DEFAULT_DENSE_DIM_LIMIT,
        )
        .map_err(|e| e.to_string())?;
        let gram = build_gram_pgm(&inst.set, &inst.priors, inst.copies, DEFAULT_RANK_TOL)
            .map_err(|e| e.to_string())?;
        models += 2;
        for _ in 0..50 {
            let x = random_state(&mut r, inst.d);
            record(dense.score_state(&x).unwrap().values());
            record(gram.score_state(&x).unwrap().values());
        }
    }
    // end-to-end models with normalization, α and copies from the grid
    for (i, point) in Grid::default().points().iter().step_by(7).enumerate() {
        let ds = blobs(&mut r, 3, 4, 12, 2.0);
        let config = PgmConfig {
            priors: if i % 2 == 0 {
                PriorsMode::Uniform
            } else {
                PriorsMode::Empirical
            },
            ..point.to_config(&Default::default()).unwrap()
        };
        let model =
            PgmModel::fit(&ds.features, &ds.labels, 3, &config).map_err(|e| e.to_string())?;
        models += 1;
        for _ in 0..50 {
            let x = FeatureVector::new(gaussian_vec(&mut r, 4).iter().map(|z| 4.0 * z).collect())
                .unwrap();
            record(model.score(&x).unwrap().values());
        }
    }
    check(worst_sum <= 1e-8, || format!("|sum f - 1| = {worst_sum:e}"))?;
    check(worst_min >= -1e-10, || format!("min score {worst_min:e}"))?;
    Ok(format!(
        "{models} models x 50 points, max |sum - 1| = {worst_sum:.1e}, min f = {worst_min:.1e}"
    ))
}

fn criterion_3() -> Outcome {
    let mut r = rng(303);
    let mut worst = 0.0f64;
    for inst in instances(303, 100) {
        let dense = build_dense_pgm(
            &inst.set,
            &inst.priors,
            inst.copies,
            DEFAULT_RANK_TOL,
            DEFAULT_DENSE_DIM_LIMIT,
        )
        .map_err(|e| e.to_string())?;
        let gram = build_gram_pgm(&inst.set, &inst.priors, inst.copies, DEFAULT_RANK_TOL)
            .map_err(|e| e.to_string())?;
        let probes: Vec<PureState> = inst
            .set
            .states()
            .iter()
            .cloned()
            .chain((0..20).map(|_| random_state(&mut r, inst.d)))
            .collect();
        for x in &probes {
            let (a, b) = (dense.score_state(x).unwrap(), gram.score_state(x).unwrap());
            for (u, v) in a.values().iter().zip(b.values()) {
                worst = worst.max((u - v).abs());
            }
        }
    }
    check(worst <= 1e-8, || format!("max |dense - gram| = {worst:e}"))?;
    Ok(format!("100 ensembles, max |dense - gram| = {worst:.1e}"))
}

fn two_state_success(a: &PureState, b: &PureState) -> f64 {
    let set = LabeledStateSet::new(vec![a.clone(), b.clone()], vec![0, 1], 2).unwrap();
    let priors = Priors::resolve(&PriorsMode::Uniform, set.class_counts()).unwrap();
    let pgm = build_dense_pgm(&set, &priors, 1, DEFAULT_RANK_TOL, DEFAULT_DENSE_DIM_LIMIT).unwrap();
    0.5 * (pgm.score_state(a).unwrap().values()[0] + pgm.score_state(b).unwrap().values()[1])
}

fn criterion_4() -> Outcome {
    let mut r = rng(404);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let dim = 2 + i % 4;
        let (a, b) = (unit(&mut r, dim), unit(&mut r, dim));
        // overlap by direct summation, independent of the library
        let gamma: f64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x * y)
            .sum();
        let helstrom = 0.5 * (1.0 + (1.0 - gamma * gamma).sqrt());
        worst = worst.max((two_state_success(&a, &b) - helstrom).abs());
    }
    check(worst <= 1e-10, || {
        format!("max deviation from Helstrom {worst:e}")
    })?;
    let zero = PureState::new(vec![1.0, 0.0]).unwrap();
    let plus = PureState::normalized(vec![1.0, 1.0]).unwrap();
    let worked = two_state_success(&zero, &plus);
    check((worked - 0.8535533906).abs() <= 1e-10, || {
        format!("|0>/|+> gives {worked}")
    })?;
    Ok(format!(
        "50 pairs, max deviation {worst:.1e}; |0>/|+> = {worked:.10}"
    ))
}

/// Orthonormal vectors by Gram-Schmidt on Gaussian draws.
fn orthonormal(r: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < count {
        let mut v = gaussian_vec(r, dim);
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    basis
}

fn criterion_5() -> Outcome {
    let mut r = rng(505);
    let mut cases = 0;
    for l in 2..=4 {
        for per_class in 1..=3 {
            for copies in 1..=2 {
                let dim = l * per_class + 1;
                let vectors = orthonormal(&mut r, l * per_class, dim);
                let labels: Vec<usize> = (0..vectors.len()).map(|j| j % l).collect();
                let states: Vec<PureState> = vectors
                    .into_iter()
                    .map(|v| PureState::new(v).unwrap())
                    .collect();
                let set = LabeledStateSet::new(states, labels.clone(), l).unwrap();
                let priors = Priors::resolve(&PriorsMode::Uniform, set.class_counts()).unwrap();
                let dense = build_dense_pgm(
                    &set,
                    &priors,
                    copies,
                    DEFAULT_RANK_TOL,
                    DEFAULT_DENSE_DIM_LIMIT,
                )
                .map_err(|e| e.to_string())?;
                let gram = build_gram_pgm(&set, &priors, copies, DEFAULT_RANK_TOL)
                    .map_err(|e| e.to_string())?;
                for engine in 0..2 {
                    let scores: Vec<Vec<f64>> = set
                        .states()
                        .iter()
                        .map(|s| {
                            let f = if engine == 0 {
                                dense.score_state(s)
                            } else {
                                gram.score_state(s)
                            };
                            f.unwrap().values().to_vec()
                        })
                        .collect();
                    let errors = scores
                        .iter()
                        .zip(&labels)
                        .filter(|(f, &c)| pgm_core::pgm::argmax_smallest_index(f) != c)
                        .count();
                    check(errors == 0, || {
                        format!("{errors} training errors (l={l}, n={copies})")
                    })?;
                    for c in 0..l {
                        let column: Vec<f64> = scores.iter().map(|f| f[c]).collect();
                        let member: Vec<bool> = labels.iter().map(|&y| y == c).collect();
                        let auc = auc_ovr(&column, &member).unwrap();
                        check(auc == Some(1.0), || format!("class {c} AUC {auc:?}"))?;
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!(
        "{cases} orthogonal ensembles: 0 training errors, every per-class AUC = 1"
    ))
}

fn criterion_6() -> Outcome {
    let class = [
        PureState::new(vec![1.0, 0.0]).unwrap(),
        PureState::new(vec![0.0, 1.0]).unwrap(),
    ];
    let lifted = copies_centroid(&class, 2, DEFAULT_DENSE_DIM_LIMIT).map_err(|e| e.to_string())?;
    let single = quantum_centroid(&class).map_err(|e| e.to_string())?;
    let squared = single.kron(&single);
    let mut differing = 0;
    for i in 0..4 {
        for j in 0..4 {
            let want_lifted = if (i, j) == (0, 0) || (i, j) == (3, 3) {
                0.5
            } else {
                0.0
            };
            let want_squared = if i == j { 0.25 } else { 0.0 };
            check(lifted.op().get(i, j) == want_lifted, || {
                format!("lifted[{i}][{j}]")
            })?;
            check(squared.op().get(i, j) == want_squared, || {
                format!("squared[{i}][{j}]")
            })?;
            if want_lifted != want_squared {
                differing += 1;
            }
        }
    }
    Ok(format!(
        "diag(1/2,0,0,1/2) vs I/4: {differing} entries differ"
    ))
}

fn criterion_7() -> Outcome {
    let mut r = rng(707);
    let states: Vec<PureState> = (0..300).map(|_| random_state(&mut r, 30)).collect();
    let labels: Vec<usize> = (0..300).map(|j| j % 3).collect();
    let set = LabeledStateSet::new(states, labels, 3).unwrap();
    let priors = Priors::resolve(&PriorsMode::Uniform, set.class_counts()).unwrap();

    let refused = build_dense_pgm(&set, &priors, 60, DEFAULT_RANK_TOL, DEFAULT_DENSE_DIM_LIMIT);
    check(matches!(refused, Err(PgmError::DenseBlowup { .. })), || {
        "dense engine did not refuse".into()
    })?;

    let probes: Vec<PureState> = (0..100).map(|_| random_state(&mut r, 30)).collect();
    let start = Instant::now();
    let gram = build_gram_pgm(&set, &priors, 60, DEFAULT_RANK_TOL).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for x in &probes {
        worst = worst.max((gram.score_state(x).unwrap().sum() - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 10.0, || format!("took {secs:.1} s"))?;
    check(worst <= 1e-8, || format!("score sum off by {worst:e}"))?;

    // the same refusal through the model-level API
    let ds = blobs(&mut r, 3, 30, 100, 1.0);
    let config = PgmConfig {
        engine: EngineChoice::Dense,
        ..PgmConfig::new(
            EncodingConfig::new(EncodingKind::Stereographic, 1.0, NormalizerKind::Zscore).unwrap(),
            60,
        )
    };
    let err = PgmModel::fit(&ds.features, &ds.labels, 3, &config).unwrap_err();
    check(matches!(err, PgmError::DenseBlowup { .. }), || {
        format!("fit gave {err}")
    })?;
    Ok(format!(
        "gram fit + 100 scores in {secs:.2} s; dense refused with DenseBlowup"
    ))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut r = rng(808);
    let centers = [
        vec![0.0, 0.0, 0.0],
        vec![3.0, 0.0, 0.0],
        vec![0.0, 3.0, 0.0],
    ];
    write_csv(
        &dir.path().join("data.csv"),
        &blob_rows(&mut r, &centers, 100, 1.0),
    );
    let run = |args: &[&str], workers: &str| -> Result<(), String> {
        let out = pgm(args, workers);
        check(code(&out) == 0, || {
            format!("pgm {} failed: {}", args[0], stderr(&out))
        })
    };
    run(
        &[
            "splits",
            &p("data.csv"),
            "--seed",
            "8",
            "--repetitions",
            "3",
            "--out",
            &p("splits.json"),
        ],
        "1",
    )?;
    let grid = "encodings=stereo,amplit;alphas=0.5,2;copies=1,5,10";
    for (workers, out) in [("1", "w1"), ("4", "w4")] {
        run(
            &[
                "gridsearch",
                &p("data.csv"),
                "--splits",
                &p("splits.json"),
                "--grid",
                grid,
                "--cv-reps",
                "2",
                "--seed",
                "8",
                "--out",
                &p(out),
            ],
            workers,
        )?;
    }
    for file in ["report.json", "report.csv", "chosen_config.toml"] {
        let a = std::fs::read(dir.path().join("w1").join(file)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dir.path().join("w4").join(file)).map_err(|e| e.to_string())?;
        check(a == b, || format!("{file} differs between 1 and 4 workers"))?;
    }
    Ok("300 samples, 12-point grid, 3 splits x 2 CV reps: outputs byte-identical for 1 and 4 workers".into())
}

/// `per_class` rows around each of `l` centers in `d` dimensions; the centers
/// sit on scaled coordinate axes so pairwise distances equal `spread`.
fn blobs(r: &mut ChaCha8Rng, l: usize, d: usize, per_class: usize, spread: f64) -> Dataset {
    let centers: Vec<Vec<f64>> = (0..l)
        .map(|c| {
            (0..d)
                .map(|j| if j == c { spread / 2f64.sqrt() } else { 0.0 })
                .collect()
        })
        .collect();
    dataset(blob_rows(r, &centers, per_class, 1.0), l)
}

fn dataset(rows: Vec<(Vec<f64>, String)>, l: usize) -> Dataset {
    let d = rows[0].0.len();
    let labels = rows.iter().map(|(_, c)| c[1..].parse().unwrap()).collect();
    Dataset::new(
        (0..d).map(|j| format!("x{j}")).collect(),
        (0..l).map(|c| format!("c{c}")).collect(),
        rows.into_iter()
            .map(|(x, _)| FeatureVector::new(x).unwrap())
            .collect(),
        labels,
    )
    .unwrap()
}

/// Nearest true center, the Bayes rule for equal isotropic blobs.
fn bayes_label(x: &[f64], centers: &[Vec<f64>]) -> usize {
    let dist = |c: &Vec<f64>| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    (0..centers.len())
        .min_by(|&a, &b| dist(&centers[a]).total_cmp(&dist(&centers[b])))
        .unwrap()
}

fn criterion_9() -> Outcome {
    // copies stay within the dense engine at 1200 training rows
    let grid: Grid = "encodings=stereo,amplit;alphas=0.5,1,2,4;copies=1,3,5"
        .parse()
        .unwrap();
    let config = ProtocolConfig {
        cv_repetitions: 2,
        ..ProtocolConfig::new(grid, 909)
    };
    // equilateral centers with side 4 in the plane, σ = 1
    let side = 4.0;
    let centers = vec![
        vec![0.0, 0.0],
        vec![side, 0.0],
        vec![side / 2.0, side * 3f64.sqrt() / 2.0],
    ];
    let per_class = 500;
    let mut r = rng(909);
    let ds = dataset(blob_rows(&mut r, &centers, per_class, 1.0), 3);
    let splits = stratified_holdout(&ds.labels, 0.2, 10, 909).map_err(|e| e.to_string())?;
    let report = run_protocol(&ds, &splits, &config).map_err(|e| e.to_string())?;
    let acc = report.test_summary["macro_accuracy"].mean;
    let auc = report.test_summary["macro_auc"].mean;

    // reference: the Bayes rule on the same test rows
    let bayes = splits
        .iter()
        .map(|s| {
            let mut hits = [0usize; 3];
            let mut totals = [0usize; 3];
            for &i in &s.test {
                let y = ds.labels[i];
                totals[y] += 1;
                hits[y] += usize::from(bayes_label(ds.features[i].as_slice(), &centers) == y);
            }
            (0..3).map(|c| hits[c] as f64 / totals[c] as f64).sum::<f64>() / 3.0
        })
        .sum::<f64>()
        / splits.len() as f64;

    let collapsed = dataset(blob_rows(&mut r, &vec![vec![0.0, 0.0]; 3], per_class, 1.0), 3);
    let null = run_protocol(&collapsed, &splits, &config).map_err(|e| e.to_string())?;
    let chance = null.test_summary["accuracy"].mean;

    let detail = format!(
        "separated: macro-accuracy {acc:.4} (need >= 0.95; Bayes rule on the same test rows {bayes:.4}), \
         macro-AUC {auc:.4} (need >= 0.99); collapsed: accuracy {chance:.4} (need 0.34 +/- 0.05)"
    );
    if acc >= 0.95 && auc >= 0.99 && (chance - 0.34).abs() <= 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Pair counting with ½ for ties.
fn brute_auc(scores: &[f64], member: &[bool]) -> Option<f64> {
    let mut wins = 0.0;
    let mut pairs = 0usize;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if member[i] && !member[j] {
                pairs += 1;
                wins += if si > sj {
                    1.0
                } else if si == sj {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    (pairs > 0).then(|| wins / pairs as f64)
}

fn criterion_10() -> Outcome {
    let mut r = rng(1010);
    for case in 0..1000 {
        let n = r.gen_range(1..=30);
        // few distinct levels so ties are common
        let levels = r.gen_range(1..=8);
        let scores: Vec<f64> = (0..n)
            .map(|_| r.gen_range(0..levels) as f64 / levels as f64)
            .collect();
        let member: Vec<bool> = (0..n).map(|_| r.gen_bool(0.4)).collect();
        let got = auc_ovr(&scores, &member).map_err(|e| e.to_string())?;
        let want = brute_auc(&scores, &member);
        check(got == want, || format!("case {case}: {got:?} vs {want:?}"))?;
    }

    // truth rows, predicted columns
    let cm =
        ConfusionMatrix::from_counts(vec![vec![5, 2, 1], vec![1, 6, 0], vec![0, 3, 7]]).unwrap();
    let rates = binary_rates(&cm, 1).unwrap();
    check(rates.precision == 6.0 / 11.0, || {
        format!("precision {}", rates.precision)
    })?;
    check(rates.recall == 6.0 / 7.0, || {
        format!("recall {}", rates.recall)
    })?;
    check(rates.specificity == 13.0 / 18.0, || {
        format!("specificity {}", rates.specificity)
    })?;
    check(rates.degenerate.is_empty(), || {
        "unexpected degenerate flag".into()
    })?;

    let never_predicted = ConfusionMatrix::from_counts(vec![vec![4, 0], vec![3, 0]]).unwrap();
    let rates = binary_rates(&never_predicted, 1).unwrap();
    check(rates.precision == 0.0 && rates.recall == 0.0, || {
        "degenerate rates not zero".into()
    })?;
    check(rates.specificity == 1.0, || {
        format!("specificity {}", rates.specificity)
    })?;
    check(rates.degenerate.iter().any(|m| m == "precision"), || {
        "precision not flagged".into()
    })?;
    Ok("1000 tie-heavy sets match pair counting exactly; binary-rate fixtures match".into())
}

fn criterion_11() -> Outcome {
    let grid = Grid::default();
    let points = grid.points();
    check(points.len() == 156, || format!("{} points", points.len()))?;
    let alphas = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let copies: Vec<u32> = std::iter::once(1).chain((1..=12).map(|k| 5 * k)).collect();
    let mut i = 0;
    for encoding in [EncodingKind::Stereographic, EncodingKind::Amplitude] {
        for &alpha in &alphas {
            for &n in &copies {
                let p = &points[i];
                check(
                    p.encoding == encoding && p.alpha == alpha && p.copies == n,
                    || format!("point {i} is {p}"),
                )?;
                i += 1;
            }
        }
    }

    let freq = select_robust_config(
        &[4, 4, 9, 4, 9],
        &[Some(0.6), Some(0.6), Some(0.99), Some(0.6), Some(0.99)],
    )
    .unwrap();
    check(
        freq.chosen == 4 && freq.resolved_by == ResolvedBy::Frequency,
        || "frequency stage".into(),
    )?;
    let by_auc =
        select_robust_config(&[2, 7, 2, 7], &[Some(0.7), Some(0.9), Some(0.8), Some(0.9)]).unwrap();
    check(
        by_auc.chosen == 7 && by_auc.resolved_by == ResolvedBy::MeanTestAuc,
        || "AUC stage".into(),
    )?;
    let by_order = select_robust_config(&[7, 3], &[Some(0.8), Some(0.8)]).unwrap();
    check(
        by_order.chosen == 3 && by_order.resolved_by == ResolvedBy::GridOrder,
        || "grid-order stage".into(),
    )?;
    Ok("156 points in stereo/amplit x 6 alphas x 13 copy counts order; frequency, AUC and grid-order fixtures".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("POVM completeness", criterion_1),
        ("score normalization", criterion_2),
        ("engine equivalence", criterion_3),
        ("two-state optimality", criterion_4),
        ("orthogonal classes", criterion_5),
        ("tensor-copy inequality", criterion_6),
        ("scalability", criterion_7),
        ("protocol determinism", criterion_8),
        ("synthetic performance", criterion_9),
        ("metric oracles", criterion_10),
        ("grid fidelity", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
