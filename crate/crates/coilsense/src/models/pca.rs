//! Principal component analysis via eigendecomposition of the sample
//! covariance matrix. With only 20 sensor variables the covariance is tiny,
//! so a dense Jacobi solve is exact and fast.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::jacobi_eigh;
use crate::models::fix_column_signs;
use crate::preprocess::Standardizer;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaModel {
    /// m x k, orthonormal columns, sign-fixed.
    pub loadings: Array2<f64>,
    /// Share of total variance per retained component, non-increasing.
    pub explained_variance_ratio: Array1<f64>,
    /// Covariance eigenvalues of the retained components.
    pub eigenvalues: Array1<f64>,
    /// Column means subtracted before projection.
    pub center: Array1<f64>,
    /// Column scales divided out before projection (ones when the caller
    /// already standardized).
    pub scale: Array1<f64>,
}

/// Fits PCA on `x`. With `standardize` the columns are z-scored first
/// (loadings of the correlation matrix); otherwise they are only centered.
pub fn pca_fit(x: &Array2<f64>, k: usize, standardize: bool) -> Result<PcaModel> {
    let n = x.nrows();
    let m = x.ncols();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "PCA needs at least 2 rows, got {n}"
        )));
    }
    if k == 0 || k > m.min(n - 1) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} out of range 1..={}",
            m.min(n - 1)
        )));
    }

    let (center, scale) = if standardize {
        let s = Standardizer::fit(x.view())?;
        (s.mean, s.std)
    } else {
        (
            x.mean_axis(Axis(0)).expect("n >= 2"),
            Array1::ones(m),
        )
    };

    let mut z = x.to_owned();
    for mut row in z.rows_mut() {
        let std_row = (&row - &center) / &scale;
        row.assign(&std_row);
    }
    let cov = z.t().dot(&z) / (n as f64 - 1.0);

    let (values, vectors) = jacobi_eigh(&cov)?;
    let total: f64 = values.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "data has zero total variance".into(),
        ));
    }

    let mut loadings = vectors.slice(ndarray::s![.., ..k]).to_owned();
    fix_column_signs(&mut loadings);
    let eigenvalues = Array1::from_iter(values.iter().take(k).map(|v| v.max(0.0)));
    let explained_variance_ratio = &eigenvalues / total;

    Ok(PcaModel {
        loadings,
        explained_variance_ratio,
        eigenvalues,
        center,
        scale,
    })
}

/// Projects rows of `x` onto the retained components.
pub fn pca_project(model: &PcaModel, x: &Array2<f64>) -> Result<Array2<f64>> {
    if x.ncols() != model.center.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} columns", model.center.len()),
            actual: format!("{}", x.ncols()),
        });
    }
    let mut z = x.to_owned();
    for mut row in z.rows_mut() {
        let std_row = (&row - &model.center) / &model.scale;
        row.assign(&std_row);
    }
    Ok(z.dot(&model.loadings))
}

impl PcaModel {
    pub fn k(&self) -> usize {
        self.loadings.ncols()
    }

    /// Back-projection of scores into (standardized) input space, for
    /// reconstruction-error checks.
    pub fn reconstruct(&self, scores: &Array2<f64>) -> Result<Array2<f64>> {
        if scores.ncols() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} score columns", self.k()),
                actual: format!("{}", scores.ncols()),
            });
        }
        let z = scores.dot(&self.loadings.t());
        let mut out = z;
        for mut row in out.rows_mut() {
            let raw = &row * &self.scale + &self.center;
            row.assign(&raw);
        }
        Ok(out)
    }
}
