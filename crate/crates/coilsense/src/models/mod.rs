//! Regression and decomposition models: PCA, PLS (NIPALS) and per-variable
//! OLS baselines, plus Pearson correlation and model (de)serialization.

mod ols;
mod pca;
mod pls;

pub use ols::{ols_fit_univariate, OlsModel};
pub use pca::{pca_fit, pca_project, PcaModel};
pub use pls::{pls_fit, PlsModel};

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fitted regressor mapping sensor matrices to (t1, t2) estimates.
pub trait Predict {
    fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>>;
}

/// Sample Pearson correlation coefficient.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} values", a.len()),
            actual: format!("{}", b.len()),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument(
            "correlation needs at least 2 values".into(),
        ));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for i in 0..a.len() {
        let da = a[i] - mean_a;
        let db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    let denom_a = var_a.sqrt();
    let denom_b = var_b.sqrt();
    if denom_a <= 1e-12 * (1.0 + mean_a.abs()) * n.sqrt() {
        return Err(Error::ConstantColumn { column: 0 });
    }
    if denom_b <= 1e-12 * (1.0 + mean_b.abs()) * n.sqrt() {
        return Err(Error::ConstantColumn { column: 1 });
    }
    Ok(cov / (denom_a * denom_b))
}

/// Flips each column so that its largest-magnitude entry is positive; ties
/// resolve to the first such entry. Makes eigenvector and weight signs
/// reproducible.
pub(crate) fn fix_column_signs(m: &mut Array2<f64>) -> Vec<f64> {
    let mut flips = Vec::with_capacity(m.ncols());
    for mut col in m.columns_mut() {
        let mut best = 0usize;
        let mut best_abs = f64::NEG_INFINITY;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        let sign = if col[best] < 0.0 { -1.0 } else { 1.0 };
        if sign < 0.0 {
            col.mapv_inplace(|v| -v);
        }
        flips.push(sign);
    }
    flips
}

const PLS_FORMAT: &str = "coilsense/pls-model/v1";

#[derive(Serialize, Deserialize)]
struct VersionedPls {
    format: String,
    model: PlsModel,
}

/// Writes a PLS model as self-describing JSON with a format tag. Matrices
/// are stored row-major with their dimensions.
pub fn save_pls_model(writer: impl Write, model: &PlsModel) -> Result<()> {
    let versioned = VersionedPls {
        format: PLS_FORMAT.to_string(),
        model: model.clone(),
    };
    serde_json::to_writer_pretty(writer, &versioned)
        .map_err(|e| Error::ModelFormat(e.to_string()))
}

pub fn load_pls_model(reader: impl Read) -> Result<PlsModel> {
    let versioned: VersionedPls =
        serde_json::from_reader(reader).map_err(|e| Error::ModelFormat(e.to_string()))?;
    if versioned.format != PLS_FORMAT {
        return Err(Error::ModelFormat(format!(
            "unsupported model format {:?}, expected {PLS_FORMAT:?}",
            versioned.format
        )));
    }
    Ok(versioned.model)
}

pub fn save_pls_model_file(path: impl AsRef<Path>, model: &PlsModel) -> Result<()> {
    let file = std::fs::File::create(path)?;
    save_pls_model(file, model)
}

pub fn load_pls_model_file(path: impl AsRef<Path>) -> Result<PlsModel> {
    let file = std::fs::File::open(path)?;
    load_pls_model(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pearson_of_identical_vectors_is_one() {
        let a = [1.0, 2.0, 5.0, -1.0];
        assert_abs_diff_eq!(pearson_correlation(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_of_negated_vector_is_minus_one() {
        let a = [1.0, 2.0, 5.0, -1.0];
        let b: Vec<f64> = a.iter().map(|v| -v).collect();
        assert_abs_diff_eq!(pearson_correlation(&a, &b).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_hand_computed() {
        // cov = 1.5, sd_a = 1, sd_b = sqrt(7/3)
        let a = [1.0, 2.0, 3.0];
        let b = [1.0, 2.0, 4.0];
        let r = pearson_correlation(&a, &b).unwrap();
        assert!((r - 0.9820).abs() < 1e-4);
    }

    #[test]
    fn pearson_rejects_constant_input() {
        assert!(pearson_correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn sign_fix_makes_largest_entry_positive() {
        let mut m = ndarray::array![[0.1, -0.9], [-0.8, 0.2]];
        fix_column_signs(&mut m);
        assert_abs_diff_eq!(m[[1, 0]], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m[[0, 0]], -0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(m[[0, 1]], 0.9, epsilon = 1e-15);
    }
}
