//! Linear canonical correlation analysis between two row-aligned views,
//! solved via the whitened-SVD formulation.

use std::path::Path;

use nalgebra::{DMatrix, RowDVector};
use serde::{Deserialize, Serialize};

use crate::embedding::AlignedPairSet;
use crate::error::{Error, Result};
use crate::linalg;

pub const CCA_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum View {
    Ds,
    Gen,
}

/// Fitted linear CCA model: projection matrices, canonical correlations and
/// the view means used for centering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CcaModel {
    pub version: u32,
    pub d: usize,
    pub phi_ds: DMatrix<f64>,
    pub phi_g: DMatrix<f64>,
    pub correlations: Vec<f64>,
    pub mean_ds: RowDVector<f64>,
    pub mean_g: RowDVector<f64>,
}

impl CcaModel {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Invalid(format!("model serialization failed: {e}")))?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: CcaModel = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            line: 0,
            msg: e.to_string(),
        })?;
        if model.version != CCA_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported CCA model version {}",
                model.version
            )));
        }
        Ok(model)
    }
}

/// Fits a d-dimensional CCA. `ridge` is scaled by trace(C)/dim before being
/// added to each auto-covariance.
pub fn cca_fit(pairs: &AlignedPairSet, d: usize, ridge: f64) -> Result<CcaModel> {
    let (d1, d2) = (pairs.ds_dim(), pairs.gen_dim());
    if d == 0 || d > d1.min(d2) {
        return Err(Error::Dimension(format!(
            "d = {d} must satisfy 1 <= d <= min(d1, d2) = {}",
            d1.min(d2)
        )));
    }
    if pairs.len() < 2 {
        return Err(Error::Alignment("need at least 2 aligned rows".into()));
    }
    if ridge < 0.0 {
        return Err(Error::Invalid("ridge must be non-negative".into()));
    }

    let (xc, mean_ds) = linalg::center_rows(&pairs.ds_vectors);
    let (yc, mean_g) = linalg::center_rows(&pairs.gen_vectors);

    let mut cxx = linalg::cross_covariance(&xc, &xc);
    let mut cyy = linalg::cross_covariance(&yc, &yc);
    let cxy = linalg::cross_covariance(&xc, &yc);

    for (c, dim) in [(&mut cxx, d1), (&mut cyy, d2)] {
        let scale = ridge * c.trace() / dim as f64;
        for i in 0..dim {
            c[(i, i)] += scale;
        }
    }

    let wx = linalg::inv_sqrt_spd(&cxx, 0.0)?;
    let wy = linalg::inv_sqrt_spd(&cyy, 0.0)?;

    let t = &wx * &cxy * &wy;
    let (u, singular_values, vt) = linalg::svd_desc(&t, true, true);
    let u = u.expect("svd with u");
    let vt = vt.expect("svd with v_t");

    let mut phi_ds = &wx * u.columns(0, d).clone_owned();
    let mut phi_g = &wy * vt.rows(0, d).transpose();
    let correlations: Vec<f64> = singular_values.iter().take(d).copied().collect();

    linalg::fix_column_signs(&mut phi_ds, Some(&mut phi_g));

    let model = CcaModel {
        version: CCA_FORMAT_VERSION,
        d,
        phi_ds,
        phi_g,
        correlations,
        mean_ds,
        mean_g,
    };

    // Fit-time sanity check: distinct canonical pairs must be uncorrelated
    // across views.
    let proj_x = &xc * &model.phi_ds;
    let proj_y = &yc * &model.phi_g;
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let c = linalg::correlation(
                proj_x.column(i).as_slice(),
                proj_y.column(j).as_slice(),
            );
            if c.abs() > 1e-6 {
                return Err(Error::Numeric(format!(
                    "canonical pairs ({i}, {j}) are correlated ({c:.3e}); \
                     the fit is numerically unreliable"
                )));
            }
        }
    }
    Ok(model)
}

/// Projects rows into the shared space: `(vectors - mean_view) * phi_view`.
pub fn cca_project(model: &CcaModel, vectors: &DMatrix<f64>, view: View) -> Result<DMatrix<f64>> {
    let (phi, mean) = match view {
        View::Ds => (&model.phi_ds, &model.mean_ds),
        View::Gen => (&model.phi_g, &model.mean_g),
    };
    if vectors.ncols() != phi.nrows() {
        return Err(Error::Dimension(format!(
            "input width {} does not match view dimension {}",
            vectors.ncols(),
            phi.nrows()
        )));
    }
    let mut centered = vectors.clone();
    for i in 0..centered.nrows() {
        let mut row = centered.row_mut(i);
        row -= mean;
    }
    Ok(centered * phi)
}
