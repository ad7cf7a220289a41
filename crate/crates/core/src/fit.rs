//! Least-squares fits used by the scaling studies.

use crate::{Error, Real, Result};
use serde::{Deserialize, Serialize};

/// `y = prefactor · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit<T> {
    pub exponent: T,
    pub prefactor: T,
    /// RMS deviation of `ln y`.
    pub residual: T,
    pub r_squared: T,
}

/// `y = prefactor · e^{−x/decay_constant}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit<T> {
    pub decay_constant: T,
    pub prefactor: T,
    pub residual: T,
    pub r_squared: T,
}

/// `y = peak / (1 + 4(x − center)²/fwhm²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit<T> {
    pub center: T,
    pub fwhm: T,
    pub peak: T,
    pub r_squared: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    pub residual: T,
    pub r_squared: T,
}

const MIN_POINTS: usize = 4;

fn check_len<T>(x: &[T], y: &[T], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < min {
        return Err(Error::invalid(format!("fit needs at least {min} points, got {}", x.len())));
    }
    Ok(())
}

/// Ordinary least squares for `y = slope·x + intercept`.
pub fn linear<T: Real>(x: &[T], y: &[T]) -> Result<LineFit<T>> {
    check_len(x, y, 2)?;
    let n = T::count(x.len());
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    if !(sxx > T::zero()) {
        return Err(Error::Singular("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let e = yi - slope * xi - intercept;
            e * e
        })
        .fold(T::zero(), |a, b| a + b);
    let r_squared = if syy > T::zero() { T::one() - ss_res / syy } else { T::one() };
    Ok(LineFit { slope, intercept, residual: (ss_res / n).sqrt(), r_squared })
}

fn logs<T: Real>(v: &[T], what: &str) -> Result<Vec<T>> {
    v.iter()
        .map(|&a| {
            if a > T::zero() && a.is_finite() {
                Ok(a.ln())
            } else {
                Err(Error::invalid(format!("{what} must be positive and finite, got {a}")))
            }
        })
        .collect()
}

/// Fits `y = A x^p` on log–log axes.
pub fn fit_power_law<T: Real>(x: &[T], y: &[T]) -> Result<PowerFit<T>> {
    check_len(x, y, MIN_POINTS)?;
    let lx = logs(x, "abscissa")?;
    let ly = logs(y, "ordinate")?;
    let l = linear(&lx, &ly)?;
    Ok(PowerFit {
        exponent: l.slope,
        prefactor: l.intercept.exp(),
        residual: l.residual,
        r_squared: l.r_squared,
    })
}

/// Fits `y = A e^{−x/τ}` on log-linear axes.
pub fn fit_exponential<T: Real>(x: &[T], y: &[T]) -> Result<ExponentialFit<T>> {
    check_len(x, y, MIN_POINTS)?;
    let ly = logs(y, "ordinate")?;
    let l = linear(x, &ly)?;
    if l.slope == T::zero() {
        return Err(Error::Singular("flat series has no decay constant".into()));
    }
    Ok(ExponentialFit {
        decay_constant: -T::one() / l.slope,
        prefactor: l.intercept.exp(),
        residual: l.residual,
        r_squared: l.r_squared,
    })
}

/// Fits a Lorentzian through the linear least-squares problem
/// `1/y = a + b x + c x²`.
pub fn fit_lorentzian<T: Real>(x: &[T], y: &[T]) -> Result<LorentzianFit<T>> {
    check_len(x, y, MIN_POINTS)?;
    if y.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::invalid("Lorentzian fit needs positive ordinates"));
    }
    // Normal equations for the three-parameter quadratic.
    let mut ata = [[T::zero(); 3]; 3];
    let mut atb = [T::zero(); 3];
    let scale = x.iter().fold(T::zero(), |a, &b| a.max(b.abs())).max(T::min_positive_value());
    for (&xi, &yi) in x.iter().zip(y) {
        let u = xi / scale;
        let row = [T::one(), u, u * u];
        let rhs = T::one() / yi;
        for i in 0..3 {
            atb[i] += row[i] * rhs;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let [a, b, cq] = solve3(ata, atb)?;
    if !(cq > T::zero()) {
        return Err(Error::Singular("series has no Lorentzian peak".into()));
    }
    let center_u = -b / (T::lit(2.0) * cq);
    let floor = a - b * b / (T::lit(4.0) * cq);
    if !(floor > T::zero()) {
        return Err(Error::Singular("fitted peak height is not positive".into()));
    }
    let half_u = (floor / cq).sqrt();
    let peak = T::one() / floor;
    let center = center_u * scale;
    let fwhm = T::lit(2.0) * half_u * scale;
    let my = y.iter().fold(T::zero(), |s, &v| s + v) / T::count(y.len());
    let (mut ss_res, mut ss_tot) = (T::zero(), T::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = T::lit(2.0) * (xi - center) / fwhm;
        let model = peak / (T::one() + dx * dx);
        ss_res += (yi - model) * (yi - model);
        ss_tot += (yi - my) * (yi - my);
    }
    let r_squared = if ss_tot > T::zero() { T::one() - ss_res / ss_tot } else { T::one() };
    Ok(LorentzianFit { center, fwhm, peak, r_squared })
}

fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Result<[T; 3]> {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if !(a[piv][col].abs() > T::epsilon()) {
            return Err(Error::Singular("degenerate normal equations".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 3];
    for i in (0..3).rev() {
        let mut s = b[i];
        for k in (i + 1)..3 {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}
