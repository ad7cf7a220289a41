//! Thin wrappers around the dense complex routines of `faer`.

use crate::{Error, Result, C64};
use faer::linalg::solvers::Solve;
use faer::Mat;

pub type CMat = Mat<C64>;

/// Eigenvalues and unit-norm right eigenvectors (as columns).
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
}

fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    Ok(m.nrows())
}

fn check_finite(m: &CMat) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Range(format!("non-finite matrix entry at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Full non-Hermitian eigendecomposition.
pub fn eig(m: &CMat) -> Result<Eigen> {
    let n = check_square(m)?;
    check_finite(m)?;
    let e = m.eigen().map_err(|err| Error::Eigensolver {
        dim: n,
        reason: format!("{err:?} (condition estimate {:.3e})", condition_estimate(m)),
    })?;
    let values: Vec<C64> = e.S().column_vector().iter().copied().collect();
    let mut vectors = e.U().to_owned();
    for j in 0..n {
        let norm = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                vectors[(i, j)] /= norm;
            }
        }
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let n = check_square(m)?;
    check_finite(m)?;
    m.eigenvalues().map_err(|err| Error::Eigensolver { dim: n, reason: format!("{err:?}") })
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    let n = check_square(a)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    let out: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Singular("linear system is singular".into()));
    }
    Ok(out)
}

/// Solves `A X = B` for several right-hand sides.
pub fn solve_many(a: &CMat, b: &CMat) -> Result<CMat> {
    let n = check_square(a)?;
    if b.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
    }
    let x = a.partial_piv_lu().solve(b);
    check_finite(&x).map_err(|_| Error::Singular("linear system is singular".into()))?;
    Ok(x)
}

/// Ratio of extreme singular values; infinite for singular input.
pub fn condition_estimate(m: &CMat) -> f64 {
    match m.singular_values() {
        Ok(s) if !s.is_empty() => {
            let max = s.iter().cloned().fold(0.0, f64::max);
            let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
            if min > 0.0 {
                max / min
            } else {
                f64::INFINITY
            }
        }
        _ => f64::NAN,
    }
}

pub fn matvec(m: &CMat, x: &[C64]) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); m.nrows()];
    for j in 0..m.ncols() {
        let xj = x[j];
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}

/// `⟨a|b⟩` with the first argument conjugated.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalized(a: &[C64]) -> Vec<C64> {
    let n = norm(a);
    a.iter().map(|v| v / n).collect()
}

pub fn from_row_major(n: usize, data: &[C64]) -> CMat {
    Mat::from_fn(n, n, |i, j| data[i * n + j])
}

pub fn column(m: &CMat, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues() {
        let m = Mat::from_fn(3, 3, |i, j| if i == j { C64::new(i as f64, -1.0) } else { C64::new(0.0, 0.0) });
        let mut v = eigenvalues(&m).unwrap();
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (i, x) in v.iter().enumerate() {
            assert!((x - C64::new(i as f64, -1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let n = 12;
        let m = Mat::from_fn(n, n, |i, j| C64::new(((i * 7 + j * 3) % 11) as f64, ((i + j) % 5) as f64 * 0.1));
        let e = eig(&m).unwrap();
        for k in 0..n {
            let v = column(&e.vectors, k);
            let mv = matvec(&m, &v);
            let r: f64 = mv.iter().zip(&v).map(|(a, b)| (a - e.values[k] * b).norm_sqr()).sum();
            assert!(r.sqrt() < 1e-10);
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_solve() {
        let a = Mat::from_fn(2, 2, |i, j| C64::new((i + 2 * j + 1) as f64, (i == j) as u8 as f64));
        let x = solve(&a, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let b = matvec(&a, &x);
        assert!((b[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((b[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn non_square_rejected() {
        let m: CMat = Mat::zeros(2, 3);
        assert!(eig(&m).is_err());
    }
}
