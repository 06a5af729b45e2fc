//! Acceptance gate: one test per criterion, each ending in a single
//! `ACCEPTANCE n <name>: PASS` line. Every numeric claim is checked against
//! an independently computed oracle (generalized eigensolves, grid searches,
//! brute-force metric enumeration, finite differences) with the tolerance
//! pinned next to the assertion. The determinism criterion reruns each
//! computation and compares the full formatted reports byte for byte.

use std::fmt::Write as _;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use daemb::adapt::{
    self, combination_objective, solve_combination_weights, AdaptConfig, AdaptMethod,
};
use daemb::cca::{cca_fit, View};
use daemb::embedding::{AlignedPairSet, EmbeddingTable, Vocabulary};
use daemb::eval::{self, logistic_gradient, logistic_loss, metrics, LabeledDataset};
use daemb::kcca::{gaussian_gram, kcca_fit, median_bandwidth, KernelConfig};
use daemb::linalg;
use daemb::pipeline::{self, PipelineConfig};

// ---------------------------------------------------------------- utilities

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; ChaCha-backed so all draws are reproducible
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, d, |_, _| normal(rng))
}

fn pair_set(ds: DMatrix<f64>, gen: DMatrix<f64>) -> AlignedPairSet {
    let tokens: Vec<String> = (0..ds.nrows()).map(|i| format!("w{i:05}")).collect();
    AlignedPairSet {
        vocab: Vocabulary::new(tokens).unwrap(),
        ds_vectors: ds,
        gen_vectors: gen,
    }
}

/// Eigenvalues of a general (nonsymmetric) real matrix, sorted by
/// descending real part. Panics if any retained eigenvalue has a
/// significant imaginary part.
fn real_eigenvalues_desc(m: &DMatrix<f64>, keep: usize) -> Vec<f64> {
    let eig = m.clone().complex_eigenvalues();
    let mut vals: Vec<(f64, f64)> = eig.iter().map(|c| (c.re, c.im)).collect();
    vals.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    vals.truncate(keep);
    for (re, im) in &vals {
        assert!(
            im.abs() <= 1e-8 * re.abs().max(1.0),
            "eigenvalue {re}+{im}i unexpectedly complex"
        );
    }
    vals.into_iter().map(|(re, _)| re).collect()
}

fn centered(m: &DMatrix<f64>) -> DMatrix<f64> {
    linalg::center_rows(m).0
}

// -------------------------------------------------- criterion computations
//
// Each criterion is a deterministic function returning a formatted report;
// tests 1-8 assert on the cached first run, criterion 9 recomputes every
// report and demands byte identity.

fn report_cca_oracle() -> String {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let n = 10_000;
    let d = 5;
    let rho = [0.9, 0.6, 0.3, 0.1, 0.0];

    // latent construction with known canonical correlations, then mixing by
    // fixed invertible maps (correlations are invariant to invertible maps)
    let z = normal_matrix(&mut rng, n, d);
    let w = normal_matrix(&mut rng, n, d);
    let mut x_lat = DMatrix::zeros(n, d);
    let mut y_lat = DMatrix::zeros(n, d);
    for k in 0..d {
        for i in 0..n {
            x_lat[(i, k)] = z[(i, k)];
            y_lat[(i, k)] = rho[k] * z[(i, k)] + (1.0 - rho[k] * rho[k]).sqrt() * w[(i, k)];
        }
    }
    let mx = normal_matrix(&mut rng, d, d);
    let my = normal_matrix(&mut rng, d, d);
    let pairs = pair_set(&x_lat * &mx, &y_lat * &my);

    let model = cca_fit(&pairs, d, 0.0).unwrap();

    // oracle: eigenvalues of Cxx^-1 Cxy Cyy^-1 Cyx are squared canonical
    // correlations (classic generalized-eigenproblem formulation)
    let xc = centered(&pairs.ds_vectors);
    let yc = centered(&pairs.gen_vectors);
    let nf = n as f64;
    let cxx = xc.transpose() * &xc / nf;
    let cyy = yc.transpose() * &yc / nf;
    let cxy = xc.transpose() * &yc / nf;
    let m = cxx.try_inverse().unwrap()
        * &cxy
        * cyy.try_inverse().unwrap()
        * cxy.transpose();
    let oracle: Vec<f64> = real_eigenvalues_desc(&m, d)
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();

    for k in 0..d {
        assert!(
            (model.correlations[k] - rho[k]).abs() <= 0.03,
            "correlation {k}: {} vs planted {} (tol 0.03)",
            model.correlations[k],
            rho[k]
        );
        assert!(
            (model.correlations[k] - oracle[k]).abs() <= 1e-6,
            "correlation {k}: {} vs oracle {} (tol 1e-6)",
            model.correlations[k],
            oracle[k]
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");

    let mut out = String::from("cca-oracle\n");
    for k in 0..d {
        writeln!(
            out,
            "k={k} fitted={:.12e} oracle={:.12e} planted={:.2}",
            model.correlations[k], oracle[k], rho[k]
        )
        .unwrap();
    }
    out
}

fn report_combination_weights() -> String {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut out = String::from("combination-weights\n");

    for i in 0..100 {
        let n = rng.gen_range(3..20);
        let d = rng.gen_range(1..6);
        let a = normal_matrix(&mut rng, n, d);
        let b = normal_matrix(&mut rng, n, d);
        let w = solve_combination_weights(&a, &b).unwrap();
        assert!(
            (w.alpha - 0.5).abs() <= 1e-9 && (w.beta - 0.5).abs() <= 1e-9,
            "instance {i}: ({}, {}) not (0.5, 0.5) within 1e-9",
            w.alpha,
            w.beta
        );
        if i < 5 {
            // independent confirmation: 0.01-step grid search of the objective
            let mut best = (f64::INFINITY, 0.0, 0.0);
            for ai in 0..=100 {
                for bi in 0..=100 {
                    let (al, be) = (ai as f64 * 0.01, bi as f64 * 0.01);
                    let obj = combination_objective(&a, &b, al, be);
                    if obj < best.0 {
                        best = (obj, al, be);
                    }
                }
            }
            assert!(
                (best.1 - 0.5).abs() <= 0.01 && (best.2 - 0.5).abs() <= 0.01,
                "grid minimizer ({}, {}) not at (0.5, 0.5)",
                best.1,
                best.2
            );
            writeln!(out, "grid[{i}] alpha={:.2} beta={:.2}", best.1, best.2).unwrap();
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10 s");
    out
}

fn report_kcca_oracle() -> String {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let n = 50;
    let x = normal_matrix(&mut rng, n, 3);
    let y = &x * 0.6 + normal_matrix(&mut rng, n, 3) * 0.8;

    let (sigma, kappa, d) = (1.3, 0.05, 3);
    let cfg = KernelConfig::explicit(sigma, kappa);
    let pairs = pair_set(x.clone(), y.clone());
    let model = kcca_fit(&pairs, d, cfg, cfg).unwrap();

    // Gram matrices against direct formula evaluation
    let kx = gaussian_gram(&x, sigma);
    for i in 0..n {
        for j in 0..n {
            let mut sq = 0.0;
            for c in 0..3 {
                sq += (x[(i, c)] - x[(j, c)]).powi(2);
            }
            let direct = (-sq / (2.0 * sigma * sigma)).exp();
            assert!(
                (kx[(i, j)] - direct).abs() <= 1e-12,
                "gram ({i},{j}): {} vs {direct} (tol 1e-12)",
                kx[(i, j)]
            );
        }
    }

    // dense explicit eigensolve of the regularized dual system:
    // (Kx + n kappa I)^-1 Ky (Ky + n kappa I)^-1 Kx on double-centered Grams
    let h = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let kxc = &h * &kx * &h;
    let kyc = &h * gaussian_gram(&y, sigma) * &h;
    let reg = DMatrix::identity(n, n) * (n as f64 * kappa);
    let m = (&kxc + &reg).try_inverse().unwrap()
        * &kyc
        * (&kyc + &reg).try_inverse().unwrap()
        * &kxc;
    let oracle: Vec<f64> = real_eigenvalues_desc(&m, d)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0).sqrt())
        .collect();

    let mut out = String::from("kcca-oracle\n");
    for k in 0..d {
        assert!(
            (model.correlations[k] - oracle[k]).abs() <= 1e-8,
            "correlation {k}: {} vs oracle {} (tol 1e-8)",
            model.correlations[k],
            oracle[k]
        );
        writeln!(
            out,
            "k={k} fitted={:.12e} oracle={:.12e}",
            model.correlations[k], oracle[k]
        )
        .unwrap();
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 2.0, "took {elapsed:?}, budget 2 s");
    out
}

fn report_nonlinearity() -> String {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let n = 500;
    let x = DMatrix::from_fn(n, 1, |_, _| {
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
    });
    let y = x.map(|v| v.sin());
    let pairs = pair_set(x.clone(), y);

    let linear = cca_fit(&pairs, 1, 1e-6).unwrap().correlations[0];
    let sx = median_bandwidth(&pairs.ds_vectors, 2000, 404).unwrap();
    let sy = median_bandwidth(&pairs.gen_vectors, 2000, 404).unwrap();
    let kernel = kcca_fit(
        &pairs,
        1,
        KernelConfig::explicit(sx, 0.01),
        KernelConfig::explicit(sy, 0.01),
    )
    .unwrap()
    .correlations[0];

    assert!(
        kernel - linear >= 0.1,
        "kcca {kernel} vs linear cca {linear}: gap below 0.1"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10 s");
    format!("nonlinearity\nlinear={linear:.12e} kernel={kernel:.12e}\n")
}

fn report_metric_oracle() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0usize;
    let mut digest = 0.0f64;

    while checked < 1000 {
        let n = rng.gen_range(2..=20);
        let scores: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2) as u8).collect();
        if !labels.contains(&0) || !labels.contains(&1) {
            continue;
        }
        let got = metrics(&scores, &labels, 0.5).unwrap();

        // brute force: explicit confusion matrix ...
        let tp = scores
            .iter()
            .zip(&labels)
            .filter(|(s, l)| **s >= 0.5 && **l == 1)
            .count() as f64;
        let fp = scores
            .iter()
            .zip(&labels)
            .filter(|(s, l)| **s >= 0.5 && **l == 0)
            .count() as f64;
        let fnc = scores
            .iter()
            .zip(&labels)
            .filter(|(s, l)| **s < 0.5 && **l == 1)
            .count() as f64;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fnc > 0.0 { tp / (tp + fnc) } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        // ... and pairwise enumeration for AUC, ties counting one half
        let mut wins = 0.0;
        let mut pairs_n = 0.0;
        for i in 0..n {
            for j in 0..n {
                if labels[i] == 1 && labels[j] == 0 {
                    pairs_n += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        let auc = wins / pairs_n;

        assert!((got.precision - precision).abs() <= 1e-12, "precision mismatch");
        assert!((got.f_score - f1).abs() <= 1e-12, "f-score mismatch");
        assert!((got.auc - auc).abs() <= 1e-12, "auc mismatch");
        digest += got.precision + got.f_score + got.auc;
        checked += 1;
    }
    format!("metric-oracle\nsets=1000 digest={digest:.12e}\n")
}

fn report_gradient_check() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut max_rel = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(4..=50);
        let d = rng.gen_range(1..=10);
        let features = normal_matrix(&mut rng, n, d);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2) as u8).collect();
        labels[0] = 0;
        labels[1] = 1;
        let w = DVector::from_fn(d, |_, _| normal(&mut rng) * 0.5);
        let bias = normal(&mut rng) * 0.5;
        let lambda = rng.gen_range(0.0..2.0);

        let (gw, gb) = logistic_gradient(&features, &labels, &w, bias, lambda);
        let h = 1e-5;
        let mut check = |analytic: f64, fd: f64| {
            let rel = (analytic - fd).abs() / analytic.abs().max(1.0);
            assert!(rel <= 1e-5, "gradient mismatch: {analytic} vs fd {fd}");
            max_rel = max_rel.max(rel);
        };
        for k in 0..d {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += h;
            wm[k] -= h;
            let fd = (logistic_loss(&features, &labels, &wp, bias, lambda)
                - logistic_loss(&features, &labels, &wm, bias, lambda))
                / (2.0 * h);
            check(gw[k], fd);
        }
        let fd_b = (logistic_loss(&features, &labels, &w, bias + h, lambda)
            - logistic_loss(&features, &labels, &w, bias - h, lambda))
            / (2.0 * h);
        check(gb, fd_b);
    }
    format!("gradient-check\ninstances=20 max_rel={max_rel:.6e}\n")
}

// --- criterion 7: desk-scale pipeline run ---------------------------------
//
// With DAEMB_DATA_DIR (sentence datasets) and DAEMB_GLOVE set, the real
// corpora are used. Otherwise three synthetic sentiment datasets with the
// same file formats stand in: token polarity drives both the labels and a
// noisy "generic" embedding axis, so the domain-adapted fusion can denoise
// what each single view only captures partially.

struct DeskDataset {
    name: String,
    dataset_path: std::path::PathBuf,
    generic_path: std::path::PathBuf,
}

fn synth_desk_dataset(
    dir: &std::path::Path,
    name: &str,
    seed: u64,
) -> DeskDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_polar = 60; // per class
    let n_neutral = 30;
    let dim = 12;

    let mut tokens = Vec::new();
    let mut polarity = Vec::new();
    for i in 0..n_polar {
        tokens.push(format!("pos{i:03}"));
        polarity.push(1.0);
    }
    for i in 0..n_polar {
        tokens.push(format!("neg{i:03}"));
        polarity.push(-1.0);
    }
    for i in 0..n_neutral {
        tokens.push(format!("neu{i:03}"));
        polarity.push(0.0);
    }

    // generic vectors: polarity along a fixed random axis plus heavy noise
    let axis = {
        let v = DVector::from_fn(dim, |_, _| normal(&mut rng));
        let norm = v.norm();
        v / norm
    };
    let vectors = DMatrix::from_fn(tokens.len(), dim, |i, j| {
        polarity[i] * axis[j] + 0.8 * normal(&mut rng)
    });
    let table = EmbeddingTable::new(Vocabulary::new(tokens.clone()).unwrap(), vectors).unwrap();
    let generic_path = dir.join(format!("{name}-generic.txt"));
    daemb::embedding::save_embeddings(&table, &generic_path).unwrap();

    // documents: mostly label-polarity tokens, leavened with neutral and
    // opposite-polarity ones
    let mut lines = String::new();
    for doc in 0..300 {
        let label = doc % 2;
        let mut words = Vec::new();
        for _ in 0..8 {
            let r: f64 = rng.gen();
            let idx = if r < 0.6 {
                // own-polarity token
                let base = if label == 1 { 0 } else { n_polar };
                base + rng.gen_range(0..n_polar)
            } else if r < 0.85 {
                2 * n_polar + rng.gen_range(0..n_neutral)
            } else {
                let base = if label == 1 { n_polar } else { 0 };
                base + rng.gen_range(0..n_polar)
            };
            words.push(tokens[idx].clone());
        }
        writeln!(lines, "{}\t{label}", words.join(" ")).unwrap();
    }
    let dataset_path = dir.join(format!("{name}.tsv"));
    std::fs::write(&dataset_path, lines).unwrap();

    DeskDataset {
        name: name.to_string(),
        dataset_path,
        generic_path,
    }
}

fn desk_datasets(dir: &std::path::Path) -> Vec<DeskDataset> {
    if let (Ok(data_dir), Ok(glove)) = (
        std::env::var("DAEMB_DATA_DIR"),
        std::env::var("DAEMB_GLOVE"),
    ) {
        let data_dir = std::path::PathBuf::from(data_dir);
        let glove = std::path::PathBuf::from(glove);
        return ["yelp", "amazon", "imdb"]
            .iter()
            .map(|name| DeskDataset {
                name: name.to_string(),
                dataset_path: data_dir.join(format!("{name}.tsv")),
                generic_path: glove.clone(),
            })
            .collect();
    }
    vec![
        synth_desk_dataset(dir, "synth-a", 71),
        synth_desk_dataset(dir, "synth-b", 72),
        synth_desk_dataset(dir, "synth-c", 73),
    ]
}

fn desk_config(ds: &DeskDataset, out_dir: &std::path::Path) -> PipelineConfig {
    let cfg_path = out_dir.join(format!("{}.toml", ds.name));
    let text = format!(
        r#"seed = 7
output_dir = "{out}"

[data]
dataset = "{dataset}"
generic = "{generic}"
ds_source = "lsa"
dataset_name = "{name}"

[lsa]
k = 10

[adapt]
methods = ["cca", "kcca", "generic-only", "ds-only"]
d_grid = [2, 4, 6]
cv_folds = 5
"#,
        out = out_dir.join(&ds.name).display(),
        dataset = ds.dataset_path.display(),
        generic = ds.generic_path.display(),
        name = ds.name,
    );
    std::fs::write(&cfg_path, text).unwrap();
    PipelineConfig::load(&cfg_path).unwrap()
}

fn parse_metrics_tsv(text: &str) -> Vec<(String, f64)> {
    // (embedding name, mean f-score) per row
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("embedding") && !l.is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            (cols[0].to_string(), cols[3].parse::<f64>().unwrap())
        })
        .collect()
}

fn report_desk_scale() -> String {
    let start = Instant::now();
    let work = tempfile::tempdir().unwrap();
    let datasets = desk_datasets(work.path());

    let mut out = String::from("desk-scale\n");
    let mut wins = 0usize;
    for ds in &datasets {
        let cfg = desk_config(ds, work.path());
        let tsv_path = pipeline::cmd_pipeline(&cfg).unwrap();
        let tsv = std::fs::read_to_string(&tsv_path).unwrap();
        let rows = parse_metrics_tsv(&tsv);

        let mut best_da = f64::NEG_INFINITY;
        let mut generic_only = f64::NEG_INFINITY;
        let mut ds_only = f64::NEG_INFINITY;
        for (name, f) in &rows {
            writeln!(out, "{} {name} f={f:.6}", ds.name).unwrap();
            if name.starts_with("cca(") || name.starts_with("kcca(") {
                best_da = best_da.max(*f);
            } else if name.contains("generic") {
                generic_only = *f;
            } else {
                ds_only = *f;
            }
        }
        assert!(best_da.is_finite() && generic_only.is_finite() && ds_only.is_finite());
        if best_da >= generic_only && best_da >= ds_only {
            wins += 1;
        }
    }
    writeln!(out, "wins={wins}/3").unwrap();
    assert!(
        wins >= 2,
        "best DA embedding beat both single-view rows on only {wins}/3 datasets"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1800.0, "took {elapsed:?}, budget 30 min");
    out
}

fn report_dimension_plausibility() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let n = 300;
    let latent = normal_matrix(&mut rng, n, 70);
    let mg = normal_matrix(&mut rng, 70, 100);
    let md = normal_matrix(&mut rng, 70, 70);
    let gen_vec = &latent * &mg + normal_matrix(&mut rng, n, 100) * 0.5;
    let ds_vec = &latent * &md + normal_matrix(&mut rng, n, 70) * 0.5;

    let tokens: Vec<String> = (0..n).map(|i| format!("w{i:05}")).collect();
    let gen =
        EmbeddingTable::new(Vocabulary::new(tokens.clone()).unwrap(), gen_vec).unwrap();
    let ds = EmbeddingTable::new(Vocabulary::new(tokens.clone()).unwrap(), ds_vec).unwrap();

    let docs: Vec<Vec<String>> = tokens.iter().map(|t| vec![t.clone()]).collect();
    let labels: Vec<u8> = (0..n).map(|i| (latent[(i, 0)] > 0.0) as u8).collect();
    let dataset = LabeledDataset::new(docs, labels, "dims".into()).unwrap();

    // default grid: selected d must respect the min(d1, d2) = 70 bound
    let mut cfg = AdaptConfig::new(AdaptMethod::Cca);
    cfg.cv_folds = 3;
    let (_, report, _) = adapt::adapt(&ds, &gen, &cfg, &dataset).unwrap();
    let selected_d = report.candidates[report.selected].d;
    assert!(selected_d <= 70, "selected d = {selected_d} exceeds 70");

    // the published average DA dimensionality must be accepted as-is
    cfg.d_grid = vec![68];
    let (table, _, _) = adapt::adapt(&ds, &gen, &cfg, &dataset).unwrap();
    assert_eq!(table.dim(), 68);

    format!("dimension-plausibility\nselected_d={selected_d} explicit_d=68 ok\n")
}

// ------------------------------------------------------------------- tests

static REPORTS: [OnceLock<String>; 8] = [
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
];

const CRITERIA: [(&str, fn() -> String); 8] = [
    ("cca-oracle-equivalence", report_cca_oracle),
    ("combination-weight-verification", report_combination_weights),
    ("kcca-small-instance-oracle", report_kcca_oracle),
    ("nonlinearity-capture", report_nonlinearity),
    ("metric-oracle", report_metric_oracle),
    ("gradient-check", report_gradient_check),
    ("desk-scale-reproduction", report_desk_scale),
    ("dimension-plausibility", report_dimension_plausibility),
];

fn cached(i: usize) -> &'static str {
    REPORTS[i].get_or_init(CRITERIA[i].1)
}

fn pass(i: usize) {
    cached(i);
    println!("ACCEPTANCE {} {}: PASS", i + 1, CRITERIA[i].0);
}

#[test]
fn acceptance_1_cca_oracle_equivalence() {
    pass(0);
}

#[test]
fn acceptance_2_combination_weight_verification() {
    pass(1);
}

#[test]
fn acceptance_3_kcca_small_instance_oracle() {
    pass(2);
}

#[test]
fn acceptance_4_nonlinearity_capture() {
    pass(3);
}

#[test]
fn acceptance_5_metric_oracle() {
    pass(4);
}

#[test]
fn acceptance_6_gradient_check() {
    pass(5);
}

#[test]
fn acceptance_7_desk_scale_reproduction() {
    pass(6);
}

#[test]
fn acceptance_8_dimension_plausibility() {
    pass(7);
}

#[test]
fn acceptance_9_determinism() {
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        let first = cached(i);
        let second = f();
        assert_eq!(first, second, "criterion {} ({name}) not deterministic", i + 1);
    }
    println!("ACCEPTANCE 9 determinism: PASS");
}
