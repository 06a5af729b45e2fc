//! Domain-adapted embeddings: combination of projected views, the
//! concatenation-SVD baseline, and cross-validated selection of the
//! projection dimension and bandwidth rule.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cca::{self, View};
use crate::embedding::{AlignedPairSet, EmbeddingTable, IntersectStats};
use crate::error::{Error, Result};
use crate::eval::{self, EvalOptions, LabeledDataset};
use crate::kcca::{self, KernelConfig, SigmaRule};
use crate::linalg;

/// Combination weights for the two projected views.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DaCombiner {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for DaCombiner {
    fn default() -> Self {
        DaCombiner {
            alpha: 0.5,
            beta: 0.5,
        }
    }
}

/// Rowwise `alpha * proj_ds + beta * proj_g`.
pub fn combine(
    proj_ds: &DMatrix<f64>,
    proj_g: &DMatrix<f64>,
    combiner: DaCombiner,
) -> Result<DMatrix<f64>> {
    if proj_ds.shape() != proj_g.shape() {
        return Err(Error::Dimension(format!(
            "projection shapes differ: {:?} vs {:?}",
            proj_ds.shape(),
            proj_g.shape()
        )));
    }
    Ok(proj_ds * combiner.alpha + proj_g * combiner.beta)
}

/// Objective the combination weights minimize:
/// sum_i ||u_i - s_i||^2 + ||v_i - s_i||^2 with s = alpha u + beta v.
pub fn combination_objective(
    proj_ds: &DMatrix<f64>,
    proj_g: &DMatrix<f64>,
    alpha: f64,
    beta: f64,
) -> f64 {
    let s = proj_ds * alpha + proj_g * beta;
    (proj_ds - &s).norm_squared() + (proj_g - &s).norm_squared()
}

/// Closed-form minimizer of the combination objective. The analytic solution
/// is (1/2, 1/2) independent of the data; degenerate instances fall back to
/// that value by convention.
pub fn solve_combination_weights(
    proj_ds: &DMatrix<f64>,
    proj_g: &DMatrix<f64>,
) -> Result<DaCombiner> {
    if proj_ds.shape() != proj_g.shape() {
        return Err(Error::Dimension(format!(
            "projection shapes differ: {:?} vs {:?}",
            proj_ds.shape(),
            proj_g.shape()
        )));
    }
    let uu = proj_ds.dot(proj_ds);
    let vv = proj_g.dot(proj_g);
    let uv = proj_ds.dot(proj_g);

    // normal equations of the 2-variable least squares
    // [2uu 2uv][alpha]   [uu + uv]
    // [2uv 2vv][beta ] = [uv + vv]
    let det = 4.0 * (uu * vv - uv * uv);
    let scale = (uu + vv).max(1.0);
    if det.abs() <= 1e-12 * scale * scale {
        return Ok(DaCombiner::default());
    }
    let alpha = (2.0 * vv * (uu + uv) - 2.0 * uv * (uv + vv)) / det;
    let beta = (2.0 * uu * (uv + vv) - 2.0 * uv * (uu + uv)) / det;
    Ok(DaCombiner { alpha, beta })
}

/// Concatenation-SVD baseline: mean-centered [ds | gen] truncated to its
/// top-d singular directions, word vectors = U_d S_d.
pub fn concsvd(pairs: &AlignedPairSet, d: usize) -> Result<EmbeddingTable> {
    let total = pairs.ds_dim() + pairs.gen_dim();
    if d == 0 || d > total {
        return Err(Error::Dimension(format!(
            "d = {d} must satisfy 1 <= d <= d1 + d2 = {total}"
        )));
    }
    let n = pairs.len();
    let mut concat = DMatrix::zeros(n, total);
    concat.columns_mut(0, pairs.ds_dim()).copy_from(&pairs.ds_vectors);
    concat
        .columns_mut(pairs.ds_dim(), pairs.gen_dim())
        .copy_from(&pairs.gen_vectors);
    let (centered, _) = linalg::center_rows(&concat);

    let (u, singular_values, _) = linalg::svd_desc(&centered, true, false);
    let u = u.expect("svd with u");
    let k = d.min(singular_values.len());
    let mut vectors = DMatrix::zeros(n, k);
    for j in 0..k {
        let s = singular_values[j];
        for i in 0..n {
            vectors[(i, j)] = u[(i, j)] * s;
        }
    }
    linalg::fix_column_signs(&mut vectors, None);
    EmbeddingTable::new(pairs.vocab.clone(), vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdaptMethod {
    Cca,
    Kcca,
    Concsvd,
}

impl std::fmt::Display for AdaptMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AdaptMethod::Cca => write!(f, "cca"),
            AdaptMethod::Kcca => write!(f, "kcca"),
            AdaptMethod::Concsvd => write!(f, "concsvd"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionScore {
    FScore,
    Auc,
}

/// Configuration for cross-validated adaptation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub method: AdaptMethod,
    pub d_grid: Vec<usize>,
    pub sigma_rules: Vec<SigmaRule>,
    pub shared_sigma: bool,
    pub ridge: f64,
    pub kappa: f64,
    pub cv_folds: usize,
    pub seed: u64,
    pub score: SelectionScore,
    pub sample_cap: usize,
    pub eval: EvalOptions,
}

impl AdaptConfig {
    pub fn new(method: AdaptMethod) -> Self {
        AdaptConfig {
            method,
            d_grid: Vec::new(), // empty = default grid clipped to the bound
            sigma_rules: vec![SigmaRule::Median, SigmaRule::TwiceMedian],
            shared_sigma: false,
            ridge: 1e-3,
            kappa: 0.1,
            cv_folds: 10,
            seed: 0,
            score: SelectionScore::FScore,
            sample_cap: 2000,
            eval: EvalOptions::default(),
        }
    }

    fn resolved_grid(&self, pairs: &AlignedPairSet) -> Result<Vec<usize>> {
        let bound = match self.method {
            AdaptMethod::Concsvd => pairs.ds_dim() + pairs.gen_dim(),
            AdaptMethod::Kcca => pairs.ds_dim().min(pairs.gen_dim()).min(pairs.len()),
            AdaptMethod::Cca => pairs.ds_dim().min(pairs.gen_dim()),
        };
        let mut grid: Vec<usize> = if self.d_grid.is_empty() {
            let mut g = vec![8, 16, 32, 48, 64, bound];
            g.retain(|&d| d >= 1);
            g
        } else {
            self.d_grid.clone()
        };
        grid.iter_mut().for_each(|d| *d = (*d).min(bound));
        grid.retain(|&d| d >= 1);
        grid.sort_unstable();
        grid.dedup();
        if grid.is_empty() {
            return Err(Error::Config("d grid is empty".into()));
        }
        Ok(grid)
    }
}

/// One evaluated candidate in the selection grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateResult {
    pub method: AdaptMethod,
    pub d: usize,
    pub sigma_rule: Option<SigmaRule>,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub error: Option<String>,
}

/// All candidate scores plus the index of the selected candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionReport {
    pub candidates: Vec<CandidateResult>,
    pub selected: usize,
    pub seed: u64,
    pub score: SelectionScore,
}

impl SelectionReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("method\td\tsigma_rule\tfold_scores\tmean\tstd\tstatus\n");
        for (i, c) in self.candidates.iter().enumerate() {
            let rule = c
                .sigma_rule
                .map(|r| r.to_string())
                .unwrap_or_else(|| "-".into());
            let scores = c
                .fold_scores
                .iter()
                .map(|s| format!("{s:.6}"))
                .collect::<Vec<_>>()
                .join(",");
            let status = match &c.error {
                Some(e) => format!("failed: {e}"),
                None if i == self.selected => "selected".into(),
                None => "ok".into(),
            };
            out.push_str(&format!(
                "{}\t{}\t{rule}\t{scores}\t{:.6}\t{:.6}\t{status}\n",
                c.method, c.d, c.mean, c.std
            ));
        }
        out
    }
}

struct Candidate {
    d: usize,
    sigma_rule: Option<SigmaRule>,
}

/// Builds the DA table for one fitted candidate.
fn build_da_table(
    pairs: &AlignedPairSet,
    method: AdaptMethod,
    d: usize,
    sigma_rule: Option<SigmaRule>,
    cfg: &AdaptConfig,
) -> Result<EmbeddingTable> {
    match method {
        AdaptMethod::Concsvd => concsvd(pairs, d),
        AdaptMethod::Cca => {
            let model = cca::cca_fit(pairs, d, cfg.ridge)?;
            let p_ds = cca::cca_project(&model, &pairs.ds_vectors, View::Ds)?;
            let p_g = cca::cca_project(&model, &pairs.gen_vectors, View::Gen)?;
            let weights = solve_combination_weights(&p_ds, &p_g)?;
            let da = combine(&p_ds, &p_g, weights)?;
            EmbeddingTable::new(pairs.vocab.clone(), da)
        }
        AdaptMethod::Kcca => {
            let rule = sigma_rule.expect("kcca candidate carries a sigma rule");
            let cfg_ds = KernelConfig::resolved(
                rule,
                cfg.kappa,
                &pairs.ds_vectors,
                cfg.sample_cap,
                cfg.seed,
            )?;
            let cfg_g = if cfg.shared_sigma {
                KernelConfig {
                    sigma: cfg_ds.sigma,
                    ..cfg_ds
                }
            } else {
                KernelConfig::resolved(rule, cfg.kappa, &pairs.gen_vectors, cfg.sample_cap, cfg.seed)?
            };
            let model = kcca::kcca_fit(pairs, d, cfg_ds, cfg_g)?;
            let all: Vec<usize> = (0..pairs.len()).collect();
            let p_ds = kcca::kcca_project(&model, View::Ds, &all)?;
            let p_g = kcca::kcca_project(&model, View::Gen, &all)?;
            let weights = solve_combination_weights(&p_ds, &p_g)?;
            let da = combine(&p_ds, &p_g, weights)?;
            EmbeddingTable::new(pairs.vocab.clone(), da)
        }
    }
}

/// Fits every candidate in the grid, scores each by cross-validation on the
/// labeled dataset, and returns the DA table of the best candidate together
/// with the full report. Ties break toward smaller d, then sigma = median.
pub fn adapt(
    ds: &EmbeddingTable,
    gen: &EmbeddingTable,
    cfg: &AdaptConfig,
    dataset: &LabeledDataset,
) -> Result<(EmbeddingTable, SelectionReport, IntersectStats)> {
    let (pairs, stats) = crate::embedding::intersect(ds, gen)?;
    let grid = cfg.resolved_grid(&pairs)?;

    let mut candidates: Vec<Candidate> = Vec::new();
    for &d in &grid {
        match cfg.method {
            AdaptMethod::Kcca => {
                for &rule in &cfg.sigma_rules {
                    candidates.push(Candidate {
                        d,
                        sigma_rule: Some(rule),
                    });
                }
            }
            _ => candidates.push(Candidate { d, sigma_rule: None }),
        }
    }

    // shared fold assignment so all candidates see identical splits
    let assignment = eval::stratified_folds(&dataset.labels, cfg.cv_folds, cfg.seed)?;

    let evaluated: Vec<(Option<EmbeddingTable>, CandidateResult)> =
        crate::par::map_indices(candidates.len(), |i| {
            let cand = &candidates[i];
            let outcome = build_da_table(&pairs, cfg.method, cand.d, cand.sigma_rule, cfg)
                .and_then(|table| {
                    let report = eval::cross_validate_with_folds(
                        dataset,
                        &table,
                        &assignment,
                        cfg.cv_folds,
                        cfg.seed,
                        &cfg.eval,
                    )?;
                    Ok((table, report))
                });
            match outcome {
                Ok((table, report)) => {
                    let (fold_scores, mean, std) = match cfg.score {
                        SelectionScore::FScore => (
                            report.per_fold.iter().map(|f| f.f_score).collect::<Vec<_>>(),
                            report.f_score.mean,
                            report.f_score.std,
                        ),
                        SelectionScore::Auc => (
                            report
                                .per_fold
                                .iter()
                                .map(|f| f.auc.unwrap_or(f64::NAN))
                                .collect::<Vec<_>>(),
                            report.auc.mean,
                            report.auc.std,
                        ),
                    };
                    (
                        Some(table),
                        CandidateResult {
                            method: cfg.method,
                            d: cand.d,
                            sigma_rule: cand.sigma_rule,
                            fold_scores,
                            mean,
                            std,
                            error: None,
                        },
                    )
                }
                Err(e) => (
                    None,
                    CandidateResult {
                        method: cfg.method,
                        d: cand.d,
                        sigma_rule: cand.sigma_rule,
                        fold_scores: Vec::new(),
                        mean: f64::NEG_INFINITY,
                        std: 0.0,
                        error: Some(format!(
                            "candidate (d={}, sigma={:?}): {e}",
                            cand.d, cand.sigma_rule
                        )),
                    },
                ),
            }
        });

    let mut best: Option<usize> = None;
    for (i, (table, result)) in evaluated.iter().enumerate() {
        if table.is_none() {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let cur = &evaluated[b].1;
                result.mean > cur.mean
                    || (result.mean == cur.mean
                        && (result.d < cur.d
                            || (result.d == cur.d
                                && result.sigma_rule == Some(SigmaRule::Median)
                                && cur.sigma_rule == Some(SigmaRule::TwiceMedian))))
            }
        };
        if better {
            best = Some(i);
        }
    }
    let selected = best.ok_or_else(|| {
        let msgs: Vec<String> = evaluated
            .iter()
            .filter_map(|(_, r)| r.error.clone())
            .collect();
        Error::Numeric(format!("every candidate failed: {}", msgs.join("; ")))
    })?;

    let mut evaluated = evaluated;
    let table = evaluated[selected].0.take().unwrap();
    let report = SelectionReport {
        candidates: evaluated.into_iter().map(|(_, r)| r).collect(),
        selected,
        seed: cfg.seed,
        score: cfg.score,
    };
    Ok((table, report, stats))
}
