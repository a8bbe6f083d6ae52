//! Normalization, standardization, smoothing and noise ranking of sensor
//! variables.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::{Coil, SENSOR_DIM};
use crate::error::{Error, Result};

/// Linear-interpolation percentile with fractional index `p * (n - 1)`.
/// `p = 0` is the minimum, `p = 1` the maximum.
pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("percentile of empty sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "percentile fraction must be in [0, 1], got {p}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = p * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let frac = idx - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() {
        Ok(sorted[lo])
    } else {
        Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
    }
}

/// Percentile-based reference normalization.
///
/// Fitted on three measurement groups taken on deliberately modified
/// material: per variable, the 10th percentile of the hard group and the
/// 90th percentile of the soft group estimate the extremes (hard material
/// reads lower), and the reference-group mean after that scaling becomes the
/// zero point. After applying, values near zero resemble the reference
/// material, negative values lean hard, positive values lean soft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceNormalization {
    pub p10_hard: Array1<f64>,
    pub p90_soft: Array1<f64>,
    pub mu_ref: Array1<f64>,
}

pub fn fit_reference_normalization(
    hard: ArrayView2<'_, f64>,
    soft: ArrayView2<'_, f64>,
    reference: ArrayView2<'_, f64>,
) -> Result<ReferenceNormalization> {
    for (name, group) in [("hard", &hard), ("soft", &soft), ("reference", &reference)] {
        if group.nrows() == 0 {
            return Err(Error::InvalidArgument(format!("{name} group is empty")));
        }
        if group.ncols() != SENSOR_DIM {
            return Err(Error::DimensionMismatch {
                expected: format!("{SENSOR_DIM} columns in {name} group"),
                actual: format!("{}", group.ncols()),
            });
        }
    }

    let mut p10_hard = Array1::zeros(SENSOR_DIM);
    let mut p90_soft = Array1::zeros(SENSOR_DIM);
    for j in 0..SENSOR_DIM {
        p10_hard[j] = percentile(hard.column(j).to_vec().as_slice(), 0.10)?;
        p90_soft[j] = percentile(soft.column(j).to_vec().as_slice(), 0.90)?;
        let scale = p90_soft[j] - p10_hard[j];
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::DegenerateScale { column: j });
        }
    }

    // The scaling map is affine, so the mean of the scaled reference group
    // equals the scaled raw mean; computing it this way makes the fitted
    // normalization send the raw reference mean to exactly zero.
    let ref_mean = reference.mean_axis(Axis(0)).expect("non-empty reference");
    let mu_ref = (&ref_mean - &p10_hard) / (&p90_soft - &p10_hard);

    Ok(ReferenceNormalization {
        p10_hard,
        p90_soft,
        mu_ref,
    })
}

impl ReferenceNormalization {
    /// Componentwise `(x - p10_hard) / (p90_soft - p10_hard) - mu_ref`.
    pub fn apply(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        if x.len() != SENSOR_DIM {
            return Err(Error::DimensionMismatch {
                expected: format!("{SENSOR_DIM}"),
                actual: format!("{}", x.len()),
            });
        }
        Ok((&x - &self.p10_hard) / (&self.p90_soft - &self.p10_hard) - &self.mu_ref)
    }

    pub fn apply_matrix(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != SENSOR_DIM {
            return Err(Error::DimensionMismatch {
                expected: format!("{SENSOR_DIM} columns"),
                actual: format!("{}", x.ncols()),
            });
        }
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            let normalized = (&row - &self.p10_hard) / (&self.p90_soft - &self.p10_hard)
                - &self.mu_ref;
            row.assign(&normalized);
        }
        Ok(out)
    }
}

/// Column-wise z-scoring with the sample (n-1) standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Array1<f64>,
    pub std: Array1<f64>,
    pub fitted_on: usize,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<'_, f64>) -> Result<Self> {
        if x.nrows() < 2 {
            return Err(Error::InvalidArgument(format!(
                "standardizer needs at least 2 rows, got {}",
                x.nrows()
            )));
        }
        let mean = x.mean_axis(Axis(0)).expect("nrows >= 2");
        let std = x.std_axis(Axis(0), 1.0);
        for j in 0..std.len() {
            if std[j] <= 1e-12 * (1.0 + mean[j].abs()) {
                return Err(Error::ConstantColumn { column: j });
            }
        }
        Ok(Standardizer {
            mean,
            std,
            fitted_on: x.nrows(),
        })
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_cols(x.ncols())?;
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            let z = (&row - &self.mean) / &self.std;
            row.assign(&z);
        }
        Ok(out)
    }

    pub fn apply_row(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        self.check_cols(x.len())?;
        Ok((&x - &self.mean) / &self.std)
    }

    pub fn invert(&self, z: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_cols(z.ncols())?;
        let mut out = z.to_owned();
        for mut row in out.rows_mut() {
            let x = &row * &self.std + &self.mean;
            row.assign(&x);
        }
        Ok(out)
    }

    pub fn invert_row(&self, z: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        self.check_cols(z.len())?;
        Ok(&z * &self.std + &self.mean)
    }

    fn check_cols(&self, ncols: usize) -> Result<()> {
        if ncols != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} columns", self.mean.len()),
                actual: format!("{ncols}"),
            });
        }
        Ok(())
    }
}

/// Trailing moving average with a warm-up ramp: element `i` is the mean of
/// the last `min(i + 1, window)` values. Output length equals input length,
/// and the result never needs future samples, so it can run on a stream.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::InvalidArgument("moving average window must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for i in 0..series.len() {
        sum += series[i];
        if i >= window {
            sum -= series[i - window];
        }
        let n = (i + 1).min(window);
        out.push(sum / n as f64);
    }
    Ok(out)
}

/// Incremental counterpart of [`moving_average`] for streaming use.
#[derive(Debug, Clone)]
pub struct MovingAverage {
    window: usize,
    buf: std::collections::VecDeque<f64>,
    sum: f64,
}

impl MovingAverage {
    pub fn new(window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidArgument("moving average window must be >= 1".into()));
        }
        Ok(MovingAverage {
            window,
            buf: std::collections::VecDeque::with_capacity(window),
            sum: 0.0,
        })
    }

    pub fn push(&mut self, value: f64) -> f64 {
        self.buf.push_back(value);
        self.sum += value;
        if self.buf.len() > self.window {
            self.sum -= self.buf.pop_front().expect("non-empty");
        }
        self.sum / self.buf.len() as f64
    }
}

/// Per-variable measurement-noise estimate for one coil.
///
/// For each sensor variable the standard deviation of the raw values over a
/// plateau range is divided by the total transition difference of the
/// signal, i.e. the difference between the first and last value of its
/// moving average. Higher fractions mean noisier variables.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRanking {
    pub fractions: [f64; SENSOR_DIM],
    pub warnings: Vec<String>,
}

impl NoiseRanking {
    /// Variable indices sorted noisiest-first (infinite sentinels first).
    pub fn ranked_variables(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..SENSOR_DIM).collect();
        idx.sort_by(|&a, &b| self.fractions[b].total_cmp(&self.fractions[a]));
        idx
    }
}

pub fn noise_ranking(
    coil: &Coil,
    plateau: std::ops::Range<usize>,
    window: usize,
) -> Result<NoiseRanking> {
    if plateau.start >= plateau.end {
        return Err(Error::InvalidArgument(format!(
            "empty plateau range {}..{}",
            plateau.start, plateau.end
        )));
    }
    if plateau.end > coil.len() {
        return Err(Error::InvalidArgument(format!(
            "plateau {}..{} exceeds coil length {}",
            plateau.start,
            plateau.end,
            coil.len()
        )));
    }
    if plateau.end - plateau.start < 2 {
        return Err(Error::InvalidArgument("plateau must contain at least 2 samples".into()));
    }

    let mut fractions = [0.0; SENSOR_DIM];
    let mut warnings = Vec::new();
    for (j, fraction) in fractions.iter_mut().enumerate() {
        let series = coil.variable_series(j);
        let std = sample_std(&series[plateau.clone()]);
        let ma = moving_average(&series, window)?;
        let transition = (ma[ma.len() - 1] - ma[0]).abs();
        if transition == 0.0 {
            warnings.push(format!(
                "sv{}: zero transition difference, noise fraction reported as +inf",
                j + 1
            ));
            *fraction = f64::INFINITY;
        } else {
            *fraction = std / transition;
        }
    }
    Ok(NoiseRanking { fractions, warnings })
}

/// Sample (n-1) standard deviation of a slice.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}
