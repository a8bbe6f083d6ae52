//! Per-variable ordinary least squares baseline: one sensor variable as the
//! only predictor of both material properties.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::models::Predict;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OlsModel {
    /// 0-based sensor variable used as predictor.
    pub predictor_index: usize,
    /// Slope per target (t1, t2).
    pub slope: [f64; 2],
    /// Intercept per target.
    pub intercept: [f64; 2],
}

/// Closed-form simple linear regression of both targets on one predictor
/// column.
pub fn ols_fit_univariate(data: &LabeledDataset, predictor_index: usize) -> Result<OlsModel> {
    let n = data.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "OLS needs at least 2 rows, got {n}"
        )));
    }
    if predictor_index >= data.x.ncols() {
        return Err(Error::InvalidArgument(format!(
            "predictor index {predictor_index} out of range"
        )));
    }
    let x = data.x.column(predictor_index);
    let x_mean = x.mean().expect("n >= 2");
    let mut sxx = 0.0;
    for i in 0..n {
        let d = x[i] - x_mean;
        sxx += d * d;
    }
    if sxx <= 1e-12 * (1.0 + x_mean.abs()).powi(2) * n as f64 {
        return Err(Error::ConstantColumn {
            column: predictor_index,
        });
    }

    let mut slope = [0.0; 2];
    let mut intercept = [0.0; 2];
    for target in 0..2 {
        let y = data.y.column(target);
        let y_mean = y.mean().expect("n >= 2");
        let mut sxy = 0.0;
        for i in 0..n {
            sxy += (x[i] - x_mean) * (y[i] - y_mean);
        }
        slope[target] = sxy / sxx;
        intercept[target] = y_mean - slope[target] * x_mean;
    }
    Ok(OlsModel {
        predictor_index,
        slope,
        intercept,
    })
}

impl Predict for OlsModel {
    fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if self.predictor_index >= x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: format!("at least {} columns", self.predictor_index + 1),
                actual: format!("{}", x.ncols()),
            });
        }
        let mut out = Array2::zeros((x.nrows(), 2));
        for i in 0..x.nrows() {
            let v = x[[i, self.predictor_index]];
            for target in 0..2 {
                out[[i, target]] = self.slope[target] * v + self.intercept[target];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{CoilId, SENSOR_DIM};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_distr::Distribution;

    fn dataset_from_column(x_col: &[f64], y: &[[f64; 2]]) -> LabeledDataset {
        let n = x_col.len();
        let mut x = Array2::zeros((n, SENSOR_DIM));
        let mut ym = Array2::zeros((n, 2));
        for i in 0..n {
            x[[i, 4]] = x_col[i];
            // fill the rest with something non-constant but irrelevant
            for j in 0..SENSOR_DIM {
                if j != 4 {
                    x[[i, j]] = (i as f64) * 0.1 + j as f64;
                }
            }
            ym[[i, 0]] = y[i][0];
            ym[[i, 1]] = y[i][1];
        }
        let coils = (0..n).map(|i| CoilId::new(format!("C{i}"))).collect();
        LabeledDataset::new(x, ym, coils).unwrap()
    }

    #[test]
    fn exact_line_recovers_slope_and_intercept() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<[f64; 2]> = xs.iter().map(|x| [2.0 * x + 1.0, -x + 0.5]).collect();
        let ds = dataset_from_column(&xs, &ys);
        let model = ols_fit_univariate(&ds, 4).unwrap();
        assert_abs_diff_eq!(model.slope[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.intercept[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.slope[1], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(model.intercept[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn matches_normal_equation_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(127);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let xs: Vec<f64> = (0..50).map(|_| normal.sample(&mut rng)).collect();
        let ys: Vec<[f64; 2]> = xs
            .iter()
            .map(|x| {
                [
                    1.7 * x - 0.3 + 0.5 * normal.sample(&mut rng),
                    -0.8 * x + 2.0 + 0.5 * normal.sample(&mut rng),
                ]
            })
            .collect();
        let ds = dataset_from_column(&xs, &ys);
        let model = ols_fit_univariate(&ds, 4).unwrap();

        // 2x2 normal equations per target: [n, Sx; Sx, Sxx] [b; a] = [Sy; Sxy]
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        for target in 0..2 {
            let sy: f64 = ys.iter().map(|y| y[target]).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y[target]).sum();
            let det = n * sxx - sx * sx;
            let intercept = (sy * sxx - sx * sxy) / det;
            let slope = (n * sxy - sx * sy) / det;
            assert_abs_diff_eq!(model.slope[target], slope, epsilon = 1e-10);
            assert_abs_diff_eq!(model.intercept[target], intercept, epsilon = 1e-10);
        }
    }

    #[test]
    fn independent_target_has_near_zero_slope() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(131);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let n = 400;
        let xs: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let ys: Vec<[f64; 2]> = (0..n)
            .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
            .collect();
        let ds = dataset_from_column(&xs, &ys);
        let model = ols_fit_univariate(&ds, 4).unwrap();
        // standard error of the slope is about sigma / (sd_x * sqrt(n))
        let se = 1.0 / (n as f64).sqrt();
        assert!(model.slope[0].abs() < 3.0 * se, "slope {}", model.slope[0]);
        assert!(model.slope[1].abs() < 3.0 * se, "slope {}", model.slope[1]);
    }

    #[test]
    fn constant_predictor_errors() {
        let xs = [2.0; 5];
        let ys: Vec<[f64; 2]> = (0..5).map(|i| [i as f64, -(i as f64)]).collect();
        let ds = dataset_from_column(&xs, &ys);
        assert!(matches!(
            ols_fit_univariate(&ds, 4),
            Err(Error::ConstantColumn { column: 4 })
        ));
    }
}
