//! Small dense helpers shared across modules.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;

/// Largest entry of `|U†U - I|`.
pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    let p = u.adjoint() * u;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Entrywise deviation of `a` from `b`, scaled by the largest entry of `b`.
pub fn relative_deviation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = max_abs(b);
    let diff = max_abs(&(a - b));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues sorted descending.
pub fn symmetric_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Real orthogonal matrix whose first row is the unit vector `u`.
pub fn householder_completion(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut w = DVector::from_fn(n, |i, _| -u[i]);
    w[0] += 1.0;
    let ww = w.dot(&w);
    let mut h = DMatrix::identity(n, n);
    if ww > 1e-300 {
        h -= (&w * w.transpose()) * (2.0 / ww);
    }
    h
}

/// Pairwise summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Mean and sample standard deviation, with deterministic summation order.
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (pairwise_sum(&sq) / (n - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn householder_rows_orthonormal() {
        let u = [0.6, -0.8, 0.0];
        let h = householder_completion(&u);
        for j in 0..3 {
            assert!((h[(0, j)] - u[j]).abs() < 1e-15);
        }
        let p = &h * h.transpose();
        assert!(relative_deviation(&p, &DMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn eigen_sorted_descending() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]);
        let (vals, vecs) = symmetric_eigen_desc(&m);
        assert_eq!(vals[0], 3.0);
        assert!((vecs[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
        let (m, s) = mean_and_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
