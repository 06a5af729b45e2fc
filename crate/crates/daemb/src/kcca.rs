//! Gaussian-kernel KCCA: kernel matrix construction, median-heuristic
//! bandwidth, regularized kernel CCA fit, and projection of
//! training-vocabulary words.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cca::View;
use crate::embedding::AlignedPairSet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::par;

pub const KCCA_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaRule {
    Median,
    TwiceMedian,
    Explicit,
}

impl std::fmt::Display for SigmaRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SigmaRule::Median => write!(f, "median"),
            SigmaRule::TwiceMedian => write!(f, "twice-median"),
            SigmaRule::Explicit => write!(f, "explicit"),
        }
    }
}

/// Gaussian-kernel hyperparameters for one view.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelConfig {
    pub sigma: f64,
    pub sigma_rule: SigmaRule,
    pub kappa: f64,
}

impl KernelConfig {
    pub fn explicit(sigma: f64, kappa: f64) -> Self {
        KernelConfig {
            sigma,
            sigma_rule: SigmaRule::Explicit,
            kappa,
        }
    }

    /// Resolves the bandwidth from the data when the rule is not explicit.
    pub fn resolved(
        rule: SigmaRule,
        kappa: f64,
        vectors: &DMatrix<f64>,
        sample_cap: usize,
        seed: u64,
    ) -> Result<Self> {
        let mu = median_bandwidth(vectors, sample_cap, seed)?;
        let sigma = match rule {
            SigmaRule::Median => mu,
            SigmaRule::TwiceMedian => 2.0 * mu,
            SigmaRule::Explicit => {
                return Err(Error::Config(
                    "explicit sigma rule requires an explicit value".into(),
                ))
            }
        };
        Ok(KernelConfig {
            sigma,
            sigma_rule: rule,
            kappa,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.sigma <= 0.0 || !self.sigma.is_finite() {
            return Err(Error::Invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.kappa < 0.0 {
            return Err(Error::Invalid("kappa must be non-negative".into()));
        }
        Ok(())
    }
}

/// Centering statistics of a double-centered Gram matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramCentering {
    pub row_means: DVector<f64>,
    pub grand_mean: f64,
}

/// Fitted KCCA model. Training points are retained because projections are
/// kernel evaluations against them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KccaModel {
    pub version: u32,
    pub d: usize,
    pub train_ds: DMatrix<f64>,
    pub train_g: DMatrix<f64>,
    pub alpha_ds: DMatrix<f64>,
    pub alpha_g: DMatrix<f64>,
    pub correlations: Vec<f64>,
    pub config_ds: KernelConfig,
    pub config_g: KernelConfig,
    pub centering_ds: GramCentering,
    pub centering_g: GramCentering,
}

impl KccaModel {
    pub fn n_train(&self) -> usize {
        self.train_ds.nrows()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)
            .map_err(|e| Error::Invalid(format!("model serialization failed: {e}")))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: KccaModel = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            line: 0,
            msg: e.to_string(),
        })?;
        if model.version != KCCA_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported KCCA model version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

fn row_distance(m: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..m.ncols() {
        let d = m[(a, k)] - m[(b, k)];
        acc += d * d;
    }
    acc.sqrt()
}

/// Median of pairwise Euclidean distances over a seeded subsample of rows.
/// Even pair counts take the lower median.
pub fn median_bandwidth(vectors: &DMatrix<f64>, sample_cap: usize, seed: u64) -> Result<f64> {
    let n = vectors.nrows();
    if n < 2 {
        return Err(Error::Invalid("need at least 2 points for the median heuristic".into()));
    }
    if sample_cap < 2 {
        return Err(Error::Invalid("sample_cap must be at least 2".into()));
    }
    let m = n.min(sample_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx: Vec<usize> = if m == n {
        (0..n).collect()
    } else {
        let mut sampled = rand::seq::index::sample(&mut rng, n, m).into_vec();
        sampled.sort_unstable();
        sampled
    };

    let mut dists: Vec<f64> = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            dists.push(row_distance(vectors, idx[i], idx[j]));
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = dists[(dists.len() - 1) / 2];
    if median <= 0.0 {
        return Err(Error::Numeric(
            "median pairwise distance is zero (points coincide); supply an explicit sigma".into(),
        ));
    }
    Ok(median)
}

/// Gaussian Gram matrix: entry (a, b) = exp(-||w_a - w_b||^2 / (2 sigma^2)).
pub fn gaussian_gram(vectors: &DMatrix<f64>, sigma: f64) -> DMatrix<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let n = vectors.nrows();
    let inv = 1.0 / (2.0 * sigma * sigma);
    let rows: Vec<Vec<f64>> = par::map_indices(n, |a| {
        (0..n)
            .map(|b| {
                let d = row_distance(vectors, a, b);
                (-d * d * inv).exp()
            })
            .collect()
    });
    DMatrix::from_fn(n, n, |a, b| rows[a][b])
}

fn double_center(k: &DMatrix<f64>) -> (DMatrix<f64>, GramCentering) {
    let n = k.nrows();
    let mut row_means = DVector::zeros(n);
    for i in 0..n {
        row_means[i] = k.row(i).sum() / n as f64;
    }
    let grand = row_means.sum() / n as f64;
    let centered = DMatrix::from_fn(n, n, |i, j| k[(i, j)] - row_means[i] - row_means[j] + grand);
    (
        centered,
        GramCentering {
            row_means,
            grand_mean: grand,
        },
    )
}

/// Fits regularized Gaussian-kernel CCA on the aligned pair set.
pub fn kcca_fit(
    pairs: &AlignedPairSet,
    d: usize,
    cfg_ds: KernelConfig,
    cfg_g: KernelConfig,
) -> Result<KccaModel> {
    let n = pairs.len();
    if d == 0 || d > n {
        return Err(Error::Dimension(format!("d = {d} must satisfy 1 <= d <= n = {n}")));
    }
    cfg_ds.validate()?;
    cfg_g.validate()?;

    let kx = gaussian_gram(&pairs.ds_vectors, cfg_ds.sigma);
    let ky = gaussian_gram(&pairs.gen_vectors, cfg_g.sigma);
    let (kxc, centering_ds) = double_center(&kx);
    let (kyc, centering_g) = double_center(&ky);

    let nf = n as f64;
    let reg = |k: &DMatrix<f64>, kappa: f64| -> DMatrix<f64> {
        let mut a = k.clone();
        for i in 0..n {
            a[(i, i)] += nf * kappa;
        }
        a
    };
    let a = reg(&kxc, cfg_ds.kappa);
    let b = reg(&kyc, cfg_g.kappa);

    let inv = |m: DMatrix<f64>, side: &str| -> Result<DMatrix<f64>> {
        m.clone().cholesky().map(|c| c.inverse()).ok_or_else(|| {
            Error::Numeric(format!(
                "regularized {side} Gram matrix is not positive definite; \
                 use kappa > 0 (or a larger kappa)"
            ))
        })
    };
    let a_inv = inv(a, "DS")?;
    let b_inv = inv(b, "generic")?;

    // Eigenvalues of M = A^-1 Ky B^-1 Kx equal those of the symmetric
    // S = Px^{1/2} Qy Px^{1/2} with Px = Kx A^-1 and Qy = Ky B^-1
    // (Px, Qy are symmetric PSD because each Gram commutes with its own
    // regularized inverse).
    let px = &kxc * &a_inv;
    let qy = &kyc * &b_inv;
    let px_sqrt = linalg::sqrt_psd(&px);
    let s = &px_sqrt * &qy * &px_sqrt;
    let s = (&s + s.transpose()) * 0.5; // shed asymmetric round-off
    let (vals, vecs) = linalg::sym_eigen_desc(&s);

    let mut alpha_ds = DMatrix::zeros(n, d);
    let mut alpha_g = DMatrix::zeros(n, d);
    let mut correlations = Vec::with_capacity(d);
    for j in 0..d {
        let lambda = vals[j].clamp(0.0, 1.0);
        let rho = lambda.sqrt();
        correlations.push(rho);

        let w = vecs.column(j);
        // eigenvector of Qy Px, mapped back through A
        let z = &qy * (&px_sqrt * w);
        let mut ax = &a_inv * z;
        let mut ay = if rho > 1e-12 {
            (&b_inv * (&kxc * &ax)) / rho
        } else {
            DVector::zeros(n)
        };

        // rescale to unit projected variance
        let scale = |alpha: &mut DVector<f64>, k: &DMatrix<f64>| {
            let p = k * alpha.clone();
            let var = p.dot(&p) / nf;
            if var > 1e-300 {
                *alpha /= var.sqrt();
            }
        };
        scale(&mut ax, &kxc);
        scale(&mut ay, &kyc);

        // deterministic sign: DS projection of the first training row >= 0
        let first = kxc.row(0).transpose().dot(&ax);
        if first < 0.0 {
            ax.neg_mut();
            ay.neg_mut();
        }
        alpha_ds.column_mut(j).copy_from(&ax);
        alpha_g.column_mut(j).copy_from(&ay);
    }

    Ok(KccaModel {
        version: KCCA_FORMAT_VERSION,
        d,
        train_ds: pairs.ds_vectors.clone(),
        train_g: pairs.gen_vectors.clone(),
        alpha_ds,
        alpha_g,
        correlations,
        config_ds: cfg_ds,
        config_g: cfg_g,
        centering_ds,
        centering_g,
    })
}

/// Projects training points (by row index) into the shared space:
/// row i of the centered Gram times the dual coefficients.
pub fn kcca_project(model: &KccaModel, view: View, indices: &[usize]) -> Result<DMatrix<f64>> {
    let n = model.n_train();
    let (train, alpha, cfg, centering) = match view {
        View::Ds => (&model.train_ds, &model.alpha_ds, &model.config_ds, &model.centering_ds),
        View::Gen => (&model.train_g, &model.alpha_g, &model.config_g, &model.centering_g),
    };
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::Invalid(format!(
            "training-row index {bad} out of range 0..{n}"
        )));
    }

    let inv = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    let rows: Vec<Vec<f64>> = par::map_indices(indices.len(), |r| {
        let i = indices[r];
        let mut centered = vec![0.0; n];
        for (j, c) in centered.iter_mut().enumerate() {
            let dist = row_distance_between(train, i, j);
            let k = (-dist * inv).exp();
            *c = k - centering.row_means[i] - centering.row_means[j] + centering.grand_mean;
        }
        let mut out = vec![0.0; model.d];
        for (l, o) in out.iter_mut().enumerate() {
            *o = centered
                .iter()
                .zip(alpha.column(l).iter())
                .map(|(c, a)| c * a)
                .sum();
        }
        out
    });
    Ok(DMatrix::from_fn(indices.len(), model.d, |r, c| rows[r][c]))
}

fn row_distance_between(m: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..m.ncols() {
        let d = m[(a, k)] - m[(b, k)];
        acc += d * d;
    }
    acc
}
