//! Small dense linear algebra used by the model fits. The problem sizes here
//! are tiny (20 x 20 covariance matrices, k x k systems with k <= 20), so a
//! cyclic Jacobi eigensolver and a pivoted Gaussian elimination are all that
//! is needed, and both are deterministic.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with matching eigenvector
/// columns.
pub(crate) fn jacobi_eigh(matrix: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{} x {}", n, matrix.ncols()),
        });
    }
    let mut a = matrix.clone();
    let mut v = Array2::eye(n);
    let scale: f64 = matrix.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = off_diagonal_norm(&a);
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for i in 0..n {
                    let aip = a[[i, p]];
                    let aiq = a[[i, q]];
                    a[[i, p]] = c * aip - s * aiq;
                    a[[i, q]] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[[p, i]];
                    let aqi = a[[q, i]];
                    a[[p, i]] = c * api - s * aqi;
                    a[[q, i]] = s * api + c * aqi;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].total_cmp(&a[[i, i]]));
    let values = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let mut vectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[[row, i]];
        }
    }
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[[i, j]] * a[[i, j]];
            }
        }
    }
    sum.sqrt()
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub(crate) fn solve(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{} x {}", n, a.ncols()),
        });
    }
    if b.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} rows"),
            actual: format!("{}", b.nrows()),
        });
    }
    let m = b.ncols();
    let mut lhs = a.clone();
    let mut rhs = b.clone();

    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if lhs[[row, col]].abs() > lhs[[pivot, col]].abs() {
                pivot = row;
            }
        }
        if lhs[[pivot, col]].abs() < 1e-300 {
            return Err(Error::InvalidArgument("singular system in solve".into()));
        }
        if pivot != col {
            for j in 0..n {
                lhs.swap([col, j], [pivot, j]);
            }
            for j in 0..m {
                rhs.swap([col, j], [pivot, j]);
            }
        }
        let d = lhs[[col, col]];
        for row in col + 1..n {
            let factor = lhs[[row, col]] / d;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                lhs[[row, j]] -= factor * lhs[[col, j]];
            }
            for j in 0..m {
                rhs[[row, j]] -= factor * rhs[[col, j]];
            }
        }
    }

    let mut x = Array2::zeros((n, m));
    for j in 0..m {
        for row in (0..n).rev() {
            let mut acc = rhs[[row, j]];
            for k in row + 1..n {
                acc -= lhs[[row, k]] * x[[k, j]];
            }
            x[[row, j]] = acc / lhs[[row, row]];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // diag(5, 2, 1) rotated by a known orthogonal matrix
        let a = array![[4.0, 1.0, 0.5], [1.0, 3.0, 0.25], [0.5, 0.25, 2.0]];
        let (values, vectors) = jacobi_eigh(&a).unwrap();
        // A v = lambda v for every pair
        for k in 0..3 {
            let v = vectors.column(k);
            let av = a.dot(&v);
            for i in 0..3 {
                assert!((av[i] - values[k] * v[i]).abs() < 1e-10);
            }
        }
        // descending order, orthonormal columns
        assert!(values[0] >= values[1] && values[1] >= values[2]);
        let gram = vectors.t().dot(&vectors);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn solve_round_trips() {
        let a = array![[3.0, 1.0, -1.0], [0.5, 2.0, 0.0], [-1.0, 0.25, 4.0]];
        let x_true = array![[1.0, 0.0], [-2.0, 1.5], [0.5, 3.0]];
        let b = a.dot(&x_true);
        let x = solve(&a, &b).unwrap();
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_rejects_singular() {
        let a = array![[1.0, 2.0], [2.0, 4.0]];
        let b = array![[1.0], [2.0]];
        assert!(solve(&a, &b).is_err());
    }
}
