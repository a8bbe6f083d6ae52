//! Generalized matrix learning vector quantization.
//!
//! One prototype per class and a global relevance matrix `Lambda = Omega'
//! Omega` define the adaptive squared distance `d(x, w) = (x - w)' Lambda
//! (x - w)`. Training minimizes the ratio cost `sum mu(x)` with
//! `mu = (d+ - d-)/(d+ + d-)` by full-batch gradient descent on the
//! prototypes and Omega, renormalizing Omega to unit trace(Lambda) after
//! every step.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluation::roc_auc;

#[derive(Debug, Clone)]
pub struct GmlvqConfig {
    pub learning_rate_prototypes: f64,
    pub learning_rate_omega: f64,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    /// Standard deviation of the seeded jitter added to the class-mean
    /// prototype initialization.
    pub prototype_jitter: f64,
    pub seed: u64,
}

impl Default for GmlvqConfig {
    fn default() -> Self {
        GmlvqConfig {
            learning_rate_prototypes: 0.01,
            learning_rate_omega: 0.001,
            max_epochs: 300,
            patience: 20,
            prototype_jitter: 1e-3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub epoch: usize,
    /// Cost at the start of the epoch, before the update.
    pub cost: f64,
    pub validation_auc: Option<f64>,
    /// trace(Omega' Omega) after the epoch's update and renormalization.
    pub lambda_trace: f64,
}

#[derive(Debug, Clone)]
pub struct GmlvqModel {
    /// One prototype per class, row `c` belongs to class id `c`.
    pub prototypes: Array2<f64>,
    /// Class ids in prototype-row order (0..n_classes).
    pub classes: Vec<usize>,
    pub omega: Array2<f64>,
    pub training_trace: Vec<TraceEntry>,
}

impl GmlvqModel {
    /// Relevance matrix `Lambda = Omega' Omega`.
    pub fn lambda(&self) -> Array2<f64> {
        self.omega.t().dot(&self.omega)
    }

    /// Adaptive squared distance to one prototype.
    pub fn distance(&self, x: ArrayView1<'_, f64>, prototype_index: usize) -> Result<f64> {
        if prototype_index >= self.prototypes.nrows() {
            return Err(Error::InvalidArgument(format!(
                "prototype index {prototype_index} out of range"
            )));
        }
        if x.len() != self.prototypes.ncols() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}", self.prototypes.ncols()),
                actual: format!("{}", x.len()),
            });
        }
        let diff = &x - &self.prototypes.row(prototype_index);
        let mapped = self.omega.dot(&diff);
        Ok(mapped.dot(&mapped))
    }

    /// Nearest-prototype class under the relevance metric.
    pub fn classify(&self, x: ArrayView1<'_, f64>) -> Result<usize> {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..self.prototypes.nrows() {
            let d = self.distance(x, c)?;
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        Ok(self.classes[best])
    }

    /// Signed score for binary problems: distance to the class-0 prototype
    /// minus distance to the class-1 prototype, so larger means more likely
    /// class 1 (the positive class).
    pub fn positive_score(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        if self.prototypes.nrows() != 2 {
            return Err(Error::InvalidArgument(
                "positive_score requires a binary model".into(),
            ));
        }
        Ok(self.distance(x, 0)? - self.distance(x, 1)?)
    }
}

/// Cost `sum mu(x)` and its analytic gradients with respect to the
/// prototypes and Omega, at the given parameters. Exposed so the gradients
/// can be checked against finite differences.
pub fn cost_and_gradients(
    prototypes: &Array2<f64>,
    omega: &Array2<f64>,
    x: ArrayView2<'_, f64>,
    labels: &[usize],
) -> Result<(f64, Array2<f64>, Array2<f64>)> {
    let n_classes = prototypes.nrows();
    let m = prototypes.ncols();
    if x.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: format!("{m} columns"),
            actual: format!("{}", x.ncols()),
        });
    }
    if x.nrows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} labels", x.nrows()),
            actual: format!("{}", labels.len()),
        });
    }
    let lambda = omega.t().dot(omega);

    let mut cost = 0.0;
    let mut grad_proto = Array2::zeros((n_classes, m));
    let mut grad_omega = Array2::zeros(omega.raw_dim());

    for (i, &label) in labels.iter().enumerate() {
        let xi = x.row(i);
        // d+ = own-class prototype, d- = nearest other class
        let mut d_plus = f64::INFINITY;
        let mut d_minus = f64::INFINITY;
        let mut idx_minus = usize::MAX;
        for c in 0..n_classes {
            let diff = &xi - &prototypes.row(c);
            let mapped = omega.dot(&diff);
            let d = mapped.dot(&mapped);
            if c == label {
                d_plus = d;
            } else if d < d_minus {
                d_minus = d;
                idx_minus = c;
            }
        }
        let sum = d_plus + d_minus;
        if sum <= 0.0 {
            // sample sits exactly on both prototypes; nothing to learn from it
            continue;
        }
        cost += (d_plus - d_minus) / sum;

        let dmu_dplus = 2.0 * d_minus / (sum * sum);
        let dmu_dminus = -2.0 * d_plus / (sum * sum);

        let diff_plus = &xi - &prototypes.row(label);
        let diff_minus = &xi - &prototypes.row(idx_minus);

        // d(x,w)/dw = -2 Lambda (x - w)
        let gp = lambda.dot(&diff_plus) * (-2.0 * dmu_dplus);
        let gm = lambda.dot(&diff_minus) * (-2.0 * dmu_dminus);
        grad_proto.row_mut(label).zip_mut_with(&gp, |a, b| *a += b);
        grad_proto.row_mut(idx_minus).zip_mut_with(&gm, |a, b| *a += b);

        // d(x,w)/dOmega = 2 Omega (x - w)(x - w)'
        let od_plus = omega.dot(&diff_plus);
        let od_minus = omega.dot(&diff_minus);
        for r in 0..omega.nrows() {
            for c in 0..m {
                grad_omega[[r, c]] += 2.0
                    * (dmu_dplus * od_plus[r] * diff_plus[c]
                        + dmu_dminus * od_minus[r] * diff_minus[c]);
            }
        }
    }
    Ok((cost, grad_proto, grad_omega))
}

fn renormalize_omega(omega: &mut Array2<f64>) {
    let trace: f64 = omega.iter().map(|v| v * v).sum();
    if trace > 0.0 {
        let scale = trace.sqrt();
        omega.mapv_inplace(|v| v / scale);
    }
}

/// Fits GMLVQ by batch gradient descent. With validation data the fit stops
/// once the validation AUC has not improved for `patience` epochs and keeps
/// the parameters it had at that point; without validation it runs until the
/// cost plateaus or `max_epochs` is reached.
pub fn gmlvq_fit(
    x: &Array2<f64>,
    labels: &[usize],
    validation: Option<(&Array2<f64>, &[usize])>,
    config: &GmlvqConfig,
) -> Result<GmlvqModel> {
    let n = x.nrows();
    let m = x.ncols();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} labels"),
            actual: format!("{}", labels.len()),
        });
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidArgument("GMLVQ needs at least 2 classes".into()));
    }
    if classes != (0..classes.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(
            "class labels must be 0..n_classes".into(),
        ));
    }
    if let Some((vx, vl)) = validation {
        if vx.nrows() != vl.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} validation labels", vx.nrows()),
                actual: format!("{}", vl.len()),
            });
        }
        if classes.len() != 2 {
            return Err(Error::InvalidArgument(
                "validation-based early stopping requires a binary problem".into(),
            ));
        }
    }

    // prototypes at class-conditional means plus seeded jitter
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = rand_distr::Normal::new(0.0, 1.0).map_err(|e| {
        Error::InvalidConfig(format!("bad jitter distribution: {e}"))
    })?;
    let mut prototypes = Array2::zeros((classes.len(), m));
    for (row, &class) in classes.iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "class {class} has no samples"
            )));
        }
        let mut mean = Array1::<f64>::zeros(m);
        for &i in &members {
            mean += &x.row(i);
        }
        mean /= members.len() as f64;
        for j in 0..m {
            use rand_distr::Distribution;
            prototypes[[row, j]] = mean[j] + config.prototype_jitter * normal.sample(&mut rng);
        }
    }

    let mut omega = Array2::eye(m) / (m as f64).sqrt();
    renormalize_omega(&mut omega);

    let mut trace = Vec::new();
    let mut best_val = f64::NEG_INFINITY;
    let mut epochs_since_best = 0usize;
    let mut prev_cost = f64::INFINITY;

    for epoch in 0..config.max_epochs {
        let (cost, grad_proto, grad_omega) =
            cost_and_gradients(&prototypes, &omega, x.view(), labels)?;

        prototypes.zip_mut_with(&grad_proto, |p, g| {
            *p -= config.learning_rate_prototypes * g;
        });
        omega.zip_mut_with(&grad_omega, |o, g| {
            *o -= config.learning_rate_omega * g;
        });
        renormalize_omega(&mut omega);

        let lambda_trace: f64 = omega.iter().map(|v| v * v).sum();

        let validation_auc = match validation {
            Some((vx, vl)) => {
                let snapshot = GmlvqModel {
                    prototypes: prototypes.clone(),
                    classes: classes.clone(),
                    omega: omega.clone(),
                    training_trace: Vec::new(),
                };
                let scores: Vec<f64> = vx
                    .rows()
                    .into_iter()
                    .map(|r| snapshot.positive_score(r))
                    .collect::<Result<_>>()?;
                let flags: Vec<bool> = vl.iter().map(|&l| l == 1).collect();
                Some(roc_auc(&scores, &flags)?)
            }
            None => None,
        };

        trace.push(TraceEntry {
            epoch,
            cost,
            validation_auc,
            lambda_trace,
        });

        if let Some(auc) = validation_auc {
            if auc > best_val {
                best_val = auc;
                epochs_since_best = 0;
            } else {
                epochs_since_best += 1;
                if epochs_since_best >= config.patience {
                    break;
                }
            }
        } else if (prev_cost - cost).abs() < 1e-12 {
            break;
        }
        prev_cost = cost;
    }

    Ok(GmlvqModel {
        prototypes,
        classes,
        omega,
        training_trace: trace,
    })
}

#[derive(Debug, Clone)]
pub struct SplitEvalConfig {
    pub n_splits: usize,
    pub validation_size: usize,
    pub gmlvq: GmlvqConfig,
    pub seed: u64,
}

impl Default for SplitEvalConfig {
    fn default() -> Self {
        SplitEvalConfig {
            n_splits: 100,
            validation_size: 8,
            gmlvq: GmlvqConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitAucResult {
    pub mean_auc: f64,
    pub per_split: Vec<f64>,
}

fn derive_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 step, decorrelates per-split streams
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Repeats seeded random validation splits, fitting with early stopping on
/// each split's validation part and reporting its validation AUC.
pub fn repeated_split_auc(
    x: &Array2<f64>,
    labels: &[usize],
    config: &SplitEvalConfig,
) -> Result<SplitAucResult> {
    let n = x.nrows();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} labels"),
            actual: format!("{}", labels.len()),
        });
    }
    if config.validation_size == 0 || config.validation_size >= n {
        return Err(Error::InvalidArgument(format!(
            "validation size {} must be in 1..{n}",
            config.validation_size
        )));
    }
    if config.n_splits == 0 {
        return Err(Error::InvalidArgument("n_splits must be >= 1".into()));
    }

    let per_split: Vec<f64> = (0..config.n_splits)
        .into_par_iter()
        .map(|split| -> Result<f64> {
            let split_seed = derive_seed(config.seed, split as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed);

            // redraw until both parts contain both classes
            let mut indices: Vec<usize> = (0..n).collect();
            let mut attempts = 0;
            let (train_idx, val_idx) = loop {
                shuffle(&mut indices, &mut rng);
                let (val, train) = indices.split_at(config.validation_size);
                let has_both = |idx: &[usize]| {
                    idx.iter().any(|&i| labels[i] == 1) && idx.iter().any(|&i| labels[i] == 0)
                };
                if has_both(val) && has_both(train) {
                    break (train.to_vec(), val.to_vec());
                }
                attempts += 1;
                if attempts > 1000 {
                    return Err(Error::InvalidArgument(
                        "could not draw a two-class split".into(),
                    ));
                }
            };

            let gather = |idx: &[usize]| {
                let mut gx = Array2::zeros((idx.len(), x.ncols()));
                let mut gl = Vec::with_capacity(idx.len());
                for (dst, &src) in idx.iter().enumerate() {
                    gx.row_mut(dst).assign(&x.row(src));
                    gl.push(labels[src]);
                }
                (gx, gl)
            };
            let (train_x, train_l) = gather(&train_idx);
            let (val_x, val_l) = gather(&val_idx);

            let mut fit_config = config.gmlvq.clone();
            fit_config.seed = derive_seed(split_seed, 0xF17);
            let model = gmlvq_fit(&train_x, &train_l, Some((&val_x, &val_l)), &fit_config)?;

            let scores: Vec<f64> = val_x
                .rows()
                .into_iter()
                .map(|r| model.positive_score(r))
                .collect::<Result<_>>()?;
            let flags: Vec<bool> = val_l.iter().map(|&l| l == 1).collect();
            roc_auc(&scores, &flags)
        })
        .collect::<Result<_>>()?;

    let mean_auc = per_split.iter().sum::<f64>() / per_split.len() as f64;
    Ok(SplitAucResult {
        mean_auc,
        per_split,
    })
}

fn shuffle(indices: &mut [usize], rng: &mut ChaCha8Rng) {
    // Fisher-Yates
    for i in (1..indices.len()).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Axis};
    use rand_distr::Distribution;

    fn blob_data(
        n_per_class: usize,
        separation: f64,
        seed: u64,
    ) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let m = 5;
        let mut x = Array2::zeros((2 * n_per_class, m));
        let mut labels = Vec::new();
        for i in 0..2 * n_per_class {
            let class = i % 2;
            let center = if class == 0 { -separation / 2.0 } else { separation / 2.0 };
            for j in 0..m {
                x[[i, j]] = center + 0.5 * normal.sample(&mut rng);
            }
            labels.push(class);
        }
        (x, labels)
    }

    #[test]
    fn distance_to_own_prototype_is_zero() {
        let model = GmlvqModel {
            prototypes: array![[1.0, 2.0, 3.0], [-1.0, 0.0, 1.0]],
            classes: vec![0, 1],
            omega: Array2::eye(3) / 3.0_f64.sqrt(),
            training_trace: Vec::new(),
        };
        let d = model.distance(model.prototypes.row(0), 0).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_omega_gives_scaled_euclidean_distance() {
        let m = 4;
        let model = GmlvqModel {
            prototypes: array![[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]],
            classes: vec![0, 1],
            omega: Array2::eye(m) / (m as f64).sqrt(),
            training_trace: Vec::new(),
        };
        let x = array![2.0, -1.0, 0.5, 3.0];
        let d = model.distance(x.view(), 0).unwrap();
        let euclid_sq: f64 = x.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(d, euclid_sq / m as f64, epsilon = 1e-12);
    }

    #[test]
    fn distance_matches_mapped_norm_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(197);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let m = 6;
        let omega = Array2::from_shape_fn((m, m), |_| normal.sample(&mut rng));
        let w = Array1::from_shape_fn(m, |_| normal.sample(&mut rng));
        let x = Array1::from_shape_fn(m, |_| normal.sample(&mut rng));
        let model = GmlvqModel {
            prototypes: w.clone().insert_axis(Axis(0)).to_owned(),
            classes: vec![0],
            omega: omega.clone(),
            training_trace: Vec::new(),
        };
        let d = model.distance(x.view(), 0).unwrap();
        let mapped = omega.dot(&(&x - &w));
        let expected: f64 = mapped.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(d, expected, epsilon = 1e-12);
    }

    #[test]
    fn separated_blobs_reach_perfect_training_accuracy() {
        let (x, labels) = blob_data(20, 6.0, 199);
        let model = gmlvq_fit(&x, &labels, None, &GmlvqConfig::default()).unwrap();
        let mut correct = 0;
        for i in 0..x.nrows() {
            if model.classify(x.row(i)).unwrap() == labels[i] {
                correct += 1;
            }
        }
        assert_eq!(correct, x.nrows());

        // cost strictly decreases epoch over epoch until convergence
        let costs: Vec<f64> = model.training_trace.iter().map(|t| t.cost).collect();
        assert!(costs.len() >= 2);
        for w in costs.windows(2) {
            assert!(w[1] < w[0] + 1e-12, "cost rose: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn lambda_stays_unit_trace_psd_every_epoch() {
        let (x, labels) = blob_data(15, 3.0, 211);
        let model = gmlvq_fit(&x, &labels, None, &GmlvqConfig::default()).unwrap();
        for entry in &model.training_trace {
            assert_abs_diff_eq!(entry.lambda_trace, 1.0, epsilon = 1e-8);
        }
        // PSD by construction; verify numerically via the quadratic form
        let lambda = model.lambda();
        let mut rng = ChaCha8Rng::seed_from_u64(213);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        for _ in 0..50 {
            let v = Array1::from_shape_fn(lambda.nrows(), |_| normal.sample(&mut rng));
            let q = v.dot(&lambda.dot(&v));
            assert!(q >= -1e-12, "negative quadratic form {q}");
        }
        // and symmetric
        for i in 0..lambda.nrows() {
            for j in 0..lambda.ncols() {
                assert_abs_diff_eq!(lambda[[i, j]], lambda[[j, i]], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn random_labels_on_identical_points_give_chance_auc() {
        // no signal at all: every point identical, labels alternate
        let n = 40;
        let x = Array2::from_elem((n, 4), 0.25);
        let labels: Vec<usize> = (0..n).map(|i| (i % 2) as usize).collect();
        let (vx, vl) = (x.clone(), labels.clone());
        let model = gmlvq_fit(&x, &labels, Some((&vx, &vl)), &GmlvqConfig::default()).unwrap();
        let scores: Vec<f64> = (0..n)
            .map(|i| model.positive_score(x.row(i)).unwrap())
            .collect();
        let flags: Vec<bool> = labels.iter().map(|&l| l == 1).collect();
        let auc = roc_auc(&scores, &flags).unwrap();
        assert!((auc - 0.5).abs() <= 0.1, "auc {auc}");
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(227);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let m = 4;
        let x = Array2::from_shape_fn((5, m), |_| normal.sample(&mut rng));
        let labels = vec![0usize, 1, 0, 1, 1];
        let prototypes = Array2::from_shape_fn((2, m), |_| normal.sample(&mut rng));
        let omega = Array2::from_shape_fn((m, m), |_| 0.5 * normal.sample(&mut rng));

        let (_, grad_proto, grad_omega) =
            cost_and_gradients(&prototypes, &omega, x.view(), &labels).unwrap();

        let h = 1e-6;
        let cost_at = |p: &Array2<f64>, o: &Array2<f64>| {
            cost_and_gradients(p, o, x.view(), &labels).unwrap().0
        };
        for r in 0..2 {
            for c in 0..m {
                let mut plus = prototypes.clone();
                plus[[r, c]] += h;
                let mut minus = prototypes.clone();
                minus[[r, c]] -= h;
                let fd = (cost_at(&plus, &omega) - cost_at(&minus, &omega)) / (2.0 * h);
                let rel = (grad_proto[[r, c]] - fd).abs() / fd.abs().max(1e-8);
                assert!(rel < 1e-5, "prototype grad [{r},{c}]: {} vs {fd}", grad_proto[[r, c]]);
            }
        }
        for r in 0..m {
            for c in 0..m {
                let mut plus = omega.clone();
                plus[[r, c]] += h;
                let mut minus = omega.clone();
                minus[[r, c]] -= h;
                let fd = (cost_at(&prototypes, &plus) - cost_at(&prototypes, &minus)) / (2.0 * h);
                let rel = (grad_omega[[r, c]] - fd).abs() / fd.abs().max(1e-8);
                assert!(rel < 1e-5, "omega grad [{r},{c}]: {} vs {fd}", grad_omega[[r, c]]);
            }
        }
    }

    #[test]
    fn decision_invariant_under_sign_flip_and_rotation() {
        let (x, labels) = blob_data(10, 4.0, 229);
        let model = gmlvq_fit(&x, &labels, None, &GmlvqConfig::default()).unwrap();
        let m = model.omega.ncols();

        // orthogonal left factor: a permutation-with-flip matrix
        let mut q = Array2::zeros((m, m));
        for i in 0..m {
            let j = (i + 1) % m;
            q[[i, j]] = if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        let variants = [
            model.omega.mapv(|v| -v),
            q.dot(&model.omega),
        ];
        for omega in variants {
            let alt = GmlvqModel {
                prototypes: model.prototypes.clone(),
                classes: model.classes.clone(),
                omega,
                training_trace: Vec::new(),
            };
            for i in 0..x.nrows() {
                assert_eq!(
                    model.classify(x.row(i)).unwrap(),
                    alt.classify(x.row(i)).unwrap()
                );
            }
        }
    }

    #[test]
    fn cost_invariant_under_translation() {
        let (x, labels) = blob_data(8, 2.0, 233);
        let mut rng = ChaCha8Rng::seed_from_u64(239);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let m = x.ncols();
        let prototypes = Array2::from_shape_fn((2, m), |_| normal.sample(&mut rng));
        let omega = Array2::from_shape_fn((m, m), |_| 0.3 * normal.sample(&mut rng));
        let (cost, _, _) = cost_and_gradients(&prototypes, &omega, x.view(), &labels).unwrap();

        let shift = Array1::from_shape_fn(m, |_| normal.sample(&mut rng));
        let x_shifted = &x + &shift;
        let mut proto_shifted = prototypes.clone();
        for mut row in proto_shifted.rows_mut() {
            let s = &row + &shift;
            row.assign(&s);
        }
        let (cost_shifted, _, _) =
            cost_and_gradients(&proto_shifted, &omega, x_shifted.view(), &labels).unwrap();
        assert_abs_diff_eq!(cost, cost_shifted, epsilon = 1e-9);
    }

    #[test]
    fn perfectly_separable_data_has_mean_auc_one() {
        let (x, labels) = blob_data(16, 8.0, 241);
        let config = SplitEvalConfig {
            n_splits: 10,
            validation_size: 8,
            seed: 7,
            ..Default::default()
        };
        let result = repeated_split_auc(&x, &labels, &config).unwrap();
        assert_eq!(result.per_split.len(), 10);
        assert_abs_diff_eq!(result.mean_auc, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn shuffled_labels_give_chance_level_mean_auc() {
        let mut rng = ChaCha8Rng::seed_from_u64(251);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let n = 32;
        let x = Array2::from_shape_fn((n, 6), |_| normal.sample(&mut rng));
        // balanced labels, then shuffled independently of the features
        let mut labels: Vec<usize> = (0..n).map(|i| (i % 2) as usize).collect();
        for i in (1..labels.len()).rev() {
            let j = rng.random_range(0..=i);
            labels.swap(i, j);
        }
        let config = SplitEvalConfig {
            n_splits: 100,
            validation_size: 8,
            seed: 11,
            ..Default::default()
        };
        let result = repeated_split_auc(&x, &labels, &config).unwrap();
        assert_eq!(result.per_split.len(), 100);
        assert!(
            result.mean_auc > 0.4 && result.mean_auc < 0.6,
            "mean auc {}",
            result.mean_auc
        );
    }
}
