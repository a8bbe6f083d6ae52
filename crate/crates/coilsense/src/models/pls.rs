//! Partial least squares regression (PLS2) fitted by NIPALS.
//!
//! Per component the inner power iteration finds the dominant left singular
//! direction `w` of the cross-covariance X'Y; scores are `t = Xw`, loadings
//! `p = X't/(t't)` and `q = Y't/(t't)`, after which both blocks are deflated
//! with the X-scores (`X -= t p'`, `Y -= t q'`). The regression coefficients
//! `B = W (P'W)^-1 Q'` collapse prediction into a single affine map on
//! standardized data.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::models::Predict;
use crate::preprocess::Standardizer;

/// Inner-loop tolerance on the change of the weight vector.
pub const NIPALS_TOL: f64 = 1e-10;
/// Maximum inner-loop iterations per component.
pub const NIPALS_MAX_ITER: usize = 500;
/// Below this squared norm a residual block counts as rank-exhausted.
const EPS_RANK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlsModel {
    /// Number of latent variables.
    pub k: usize,
    /// m x k X-weights W.
    pub x_weights: Array2<f64>,
    /// m x k X-loadings P.
    pub x_loadings: Array2<f64>,
    /// o x k Y-loadings Q.
    pub y_loadings: Array2<f64>,
    /// m x o regression coefficients in standardized space.
    pub coefficients: Array2<f64>,
    pub x_standardizer: Standardizer,
    pub y_standardizer: Standardizer,
}

/// Fits a PLS2 regression with `k` latent variables. Both blocks are
/// standardized internally with training statistics.
pub fn pls_fit(x: &Array2<f64>, y: &Array2<f64>, k: usize) -> Result<PlsModel> {
    let n = x.nrows();
    let m = x.ncols();
    let o = y.ncols();
    if y.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} target rows"),
            actual: format!("{}", y.nrows()),
        });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "PLS needs at least 2 rows, got {n}"
        )));
    }
    if k == 0 || k > m.min(n - 1) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} out of range 1..={}",
            m.min(n - 1)
        )));
    }

    let x_standardizer = Standardizer::fit(x.view())?;
    let y_standardizer = Standardizer::fit(y.view())?;
    let mut xd = x_standardizer.apply(x.view())?;
    let mut yd = y_standardizer.apply(y.view())?;

    let mut w_mat = Array2::zeros((m, k));
    let mut p_mat = Array2::zeros((m, k));
    let mut q_mat = Array2::zeros((o, k));

    for comp in 0..k {
        // start from the target column with the most residual energy
        let mut u_col = 0;
        let mut u_ssq = f64::NEG_INFINITY;
        for j in 0..o {
            let ssq: f64 = yd.column(j).iter().map(|v| v * v).sum();
            if ssq > u_ssq {
                u_ssq = ssq;
                u_col = j;
            }
        }
        if u_ssq < EPS_RANK {
            return Err(Error::RankExhausted {
                requested: k,
                rank: comp,
            });
        }
        let mut u = yd.column(u_col).to_owned();

        let mut w = Array1::<f64>::zeros(m);
        let mut w_old: Option<Array1<f64>> = None;
        let mut t = Array1::<f64>::zeros(n);
        let mut converged_iterations = None;
        for iter in 0..NIPALS_MAX_ITER {
            w = xd.t().dot(&u);
            let w_ssq = w.dot(&w);
            if w_ssq < EPS_RANK {
                return Err(Error::RankExhausted {
                    requested: k,
                    rank: comp,
                });
            }
            w /= w_ssq.sqrt();
            t = xd.dot(&w);
            let tt = t.dot(&t);
            if tt < EPS_RANK {
                return Err(Error::RankExhausted {
                    requested: k,
                    rank: comp,
                });
            }
            let c = yd.t().dot(&t) / tt;
            let cc = c.dot(&c);
            if cc < EPS_RANK {
                // targets have no remaining covariance with X
                return Err(Error::RankExhausted {
                    requested: k,
                    rank: comp,
                });
            }
            u = yd.dot(&c) / cc;

            if let Some(prev) = &w_old {
                let diff = (&w - prev).mapv(|v| v * v).sum().sqrt();
                if diff < NIPALS_TOL {
                    converged_iterations = Some(iter + 1);
                    break;
                }
            }
            w_old = Some(w.clone());
        }
        if converged_iterations.is_none() {
            return Err(Error::NonConvergence {
                iterations: NIPALS_MAX_ITER,
            });
        }

        let tt = t.dot(&t);
        let mut p = xd.t().dot(&t) / tt;
        let mut q = yd.t().dot(&t) / tt;

        // deterministic sign: anchor on the weight vector, flip the whole
        // component together so that X - t p' is unchanged
        let mut best = 0usize;
        let mut best_abs = f64::NEG_INFINITY;
        for (i, v) in w.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if w[best] < 0.0 {
            w.mapv_inplace(|v| -v);
            t.mapv_inplace(|v| -v);
            p.mapv_inplace(|v| -v);
            q.mapv_inplace(|v| -v);
        }

        // rank-one deflation of both blocks with the X-scores
        for i in 0..n {
            for j in 0..m {
                xd[[i, j]] -= t[i] * p[j];
            }
            for j in 0..o {
                yd[[i, j]] -= t[i] * q[j];
            }
        }

        w_mat.column_mut(comp).assign(&w);
        p_mat.column_mut(comp).assign(&p);
        q_mat.column_mut(comp).assign(&q);
    }

    // B = W (P'W)^-1 Q'
    let ptw = p_mat.t().dot(&w_mat);
    let rotations = w_mat.dot(&solve(&ptw, &Array2::eye(k))?);
    let coefficients = rotations.dot(&q_mat.t());

    Ok(PlsModel {
        k,
        x_weights: w_mat,
        x_loadings: p_mat,
        y_loadings: q_mat,
        coefficients,
        x_standardizer,
        y_standardizer,
    })
}

impl PlsModel {
    /// Projection matrix `W (P'W)^-1` mapping standardized X onto scores.
    pub fn rotations(&self) -> Result<Array2<f64>> {
        let ptw = self.x_loadings.t().dot(&self.x_weights);
        Ok(self.x_weights.dot(&solve(&ptw, &Array2::eye(self.k))?))
    }

    /// Scores of new data on the latent variables.
    pub fn transform(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        let z = self.x_standardizer.apply(x.view())?;
        Ok(z.dot(&self.rotations()?))
    }

    /// De-standardized prediction: a single matrix multiply plus shift.
    pub fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        let z = self.x_standardizer.apply(x.view())?;
        let y_std = z.dot(&self.coefficients);
        self.y_standardizer.invert(y_std.view())
    }

    /// Prediction of a single measurement vector.
    pub fn predict_row(&self, x: ndarray::ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let z = self.x_standardizer.apply_row(x)?;
        let y_std = z.dot(&self.coefficients);
        self.y_standardizer.invert_row(y_std.view())
    }
}

impl Predict for PlsModel {
    fn predict(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        PlsModel::predict(self, x)
    }
}
