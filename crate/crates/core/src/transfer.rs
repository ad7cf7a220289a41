//! Point scatterers in a one-dimensional waveguide.
//!
//! A scatterer of strength `ζ = −i r/t` followed by a free section of optical
//! length `φ = ωd/c` has the unit-cell transfer matrix
//!
//! ```text
//! M = [[1+iζ, iζ], [−iζ, 1−iζ]] · diag(e^{iφ}, e^{−iφ})
//! ```
//!
//! with `det M = 1`, so that `cos qd = ½ Tr M = cos φ − ζ sin φ`. Powers of
//! `M` follow from the Chebyshev recursion `M^N = U_{N−1} M − U_{N−2} 1`.
//!
//! With this convention `1/t_N = cos Nqd − i sin Nqd / v_g`; only `|t_N|`
//! carries physics.

use crate::{Error, Real, Result};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub type Mat2<T> = [[Complex<T>; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScattererModel<T> {
    pub zeta: T,
    pub d: T,
    #[serde(rename = "N")]
    pub cells: usize,
}

impl<T: Real> ScattererModel<T> {
    pub fn new(zeta: T, d: T, cells: usize) -> Result<Self> {
        if !(d > T::zero()) || cells == 0 || !zeta.is_finite() {
            return Err(Error::invalid("scatterer chain needs d > 0, N ≥ 1 and finite ζ"));
        }
        Ok(ScattererModel { zeta, d, cells })
    }
}

fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[c(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det<T: Real>(m: &Mat2<T>) -> Complex<T> {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// `M_sc · M_free` for one cell.
pub fn unit_cell_matrix<T: Real>(zeta: T, phase: T) -> Mat2<T> {
    let (s, co) = phase.sin_cos();
    let fwd = c(co, s);
    let bwd = c(co, -s);
    let iz = c(T::zero(), zeta);
    let one = c(T::one(), T::zero());
    [[(one + iz) * fwd, iz * bwd], [-iz * fwd, (one - iz) * bwd]]
}

/// Bloch phase `qd` with `cos qd = cos φ − ζ sin φ`.
///
/// Real in the bands (principal value in `[0, π]`), complex in the gaps.
pub fn dispersion<T: Real>(zeta: T, phase: T) -> Complex<T> {
    let x = phase.cos() - zeta * phase.sin();
    c(x, T::zero()).acos()
}

/// Unwraps the real part of a Bloch-phase sweep so consecutive values differ by
/// the smallest amount compatible with `±qd + 2πn`.
pub fn unwrap_branch<T: Real>(qd: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out: Vec<Complex<T>> = Vec::with_capacity(qd.len());
    for &q in qd {
        let Some(&prev) = out.last() else {
            out.push(q);
            continue;
        };
        let mut best = q;
        let mut best_gap = T::infinity();
        for cand in [q, -q] {
            let shift = ((prev.re - cand.re) / T::TAU()).round() * T::TAU();
            let v = cand + shift;
            let gap = (v.re - prev.re).abs();
            if gap < best_gap {
                best_gap = gap;
                best = v;
            }
        }
        out.push(best);
    }
    out
}

/// Lower and upper edges `(φ−, φ+)` of the gap that opens at `qd = π`.
pub fn band_edges<T: Real>(zeta: T) -> (T, T) {
    let z2 = zeta * zeta;
    (((z2 - T::one()) / (z2 + T::one())).acos(), T::PI())
}

/// Quadratic approximation of the band near `qd = π`.
///
/// Below the gap `φ ≈ φ− − (π − qd)²/2ζ`, above it `φ ≈ φ+ + (π − qd)²/2ζ`.
pub fn edge_expansion<T: Real>(zeta: T, qd: T, upper: bool) -> T {
    let (lo, hi) = band_edges(zeta);
    let dq = T::PI() - qd;
    let curv = dq * dq / (T::lit(2.0) * zeta);
    if upper {
        hi + curv
    } else {
        lo - curv
    }
}

/// Group velocity `dφ/d(qd) = sin qd / (sin φ + ζ cos φ)` in units of `c`.
pub fn group_velocity<T: Real>(zeta: T, phase: T) -> Complex<T> {
    let qd = dispersion(zeta, phase);
    qd.sin() / (phase.sin() + zeta * phase.cos())
}

/// `U_{N−1}(a)` and `U_{N−2}(a)` rescaled by a common factor `10^{−100·k}`,
/// returned with `k`. Keeps gap frequencies with large `N` finite.
fn chebyshev<T: Real>(a: Complex<T>, n: usize) -> (Complex<T>, Complex<T>, i32) {
    let mut u_prev = c(T::zero(), T::zero()); // U_{-1}
    let mut u = c(T::one(), T::zero()); // U_0
    let mut scale = 0;
    let big = T::lit(1e100);
    let two_a = a * T::lit(2.0);
    for _ in 1..n {
        let next = two_a * u - u_prev;
        u_prev = u;
        u = next;
        if u.norm() > big {
            u = u / big;
            u_prev = u_prev / big;
            scale += 1;
        }
    }
    (u, u_prev, scale)
}

/// `M^N` by the Chebyshev recursion, exact for any `N ≥ 1`.
pub fn matrix_power<T: Real>(m: &Mat2<T>, n: usize) -> Mat2<T> {
    let a = (m[0][0] + m[1][1]) * T::lit(0.5);
    let (u1, u0, scale) = chebyshev(a, n);
    let f = T::lit(1e100).powi(scale);
    let mut out = [[c(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { u0 } else { c(T::zero(), T::zero()) };
            out[i][j] = (u1 * m[i][j] - id) * f;
        }
    }
    out
}

/// `M^N` from the eigenvalues `e^{±iqd}` (Sylvester's formula). Fails at the
/// band edges where the eigenvalues merge.
pub fn matrix_power_spectral<T: Real>(m: &Mat2<T>, n: usize) -> Result<Mat2<T>> {
    let a = (m[0][0] + m[1][1]) * T::lit(0.5);
    let root = (a * a - T::one()).sqrt();
    let (lp, lm) = (a + root, a - root);
    let gap = lp - lm;
    if gap.norm() < T::lit(1e-8) {
        return Err(Error::Singular("degenerate transfer-matrix eigenvalues".into()));
    }
    let (pn, mn) = (lp.powi(n as i32), lm.powi(n as i32));
    let mut out = [[c(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { T::one() } else { T::zero() };
            let a_m = m[i][j] - lm * id;
            let b_m = m[i][j] - lp * id;
            out[i][j] = (pn * a_m - mn * b_m) / gap;
        }
    }
    Ok(out)
}

/// `(t_N, r_N)` of the finite chain at optical length `φ` per cell.
pub fn finite_array_coefficients<T: Real>(
    model: &ScattererModel<T>,
    phase: T,
) -> (Complex<T>, Complex<T>) {
    let m = unit_cell_matrix(model.zeta, phase);
    let a = (m[0][0] + m[1][1]) * T::lit(0.5);
    let (u1, u0, scale) = chebyshev(a, model.cells);
    let m22 = u1 * m[1][1] - u0;
    let m21 = u1 * m[1][0];
    let r = -m21 / m22;
    let t = m22.inv() * T::lit(1e-100).powi(scale);
    (t, r)
}

/// `(φ, |t_N|², |r_N|²)` on the given phases.
pub fn spectrum<T: Real>(model: &ScattererModel<T>, phases: &[T]) -> Vec<(T, T, T)> {
    phases
        .iter()
        .map(|&p| {
            let (t, r) = finite_array_coefficients(model, p);
            (p, t.norm_sqr(), r.norm_sqr())
        })
        .collect()
}

/// Phase of the `ξ`-th transmission resonance below the gap, where
/// `qd = π(N − ξ)/N`.
pub fn resonance_phase<T: Real>(zeta: T, cells: usize, xi: usize) -> T {
    let qd = T::PI() * T::count(cells - xi) / T::count(cells);
    let amp = (T::one() + zeta * zeta).sqrt();
    let delta = zeta.atan();
    (qd.cos() / amp).acos() - delta
}

/// Analytic small-`ξ` linewidth `2ξ²π²/(ζ²N³)` in units of `c/d`.
pub fn analytic_linewidth<T: Real>(zeta: T, cells: usize, xi: usize) -> T {
    let n = T::count(cells);
    let x = T::count(xi);
    T::lit(2.0) * x * x * T::PI() * T::PI() / (zeta * zeta * n * n * n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub xi: usize,
    pub phase: f64,
    pub fwhm: f64,
    pub analytic: f64,
    pub relative_deviation: f64,
    /// Half-maximum not reached before the neighboring resonance.
    pub overlapping: bool,
}

/// Transmission resonances `ξ = 1..=xi_max` below the gap with their
/// half-maximum widths (in `φ`) next to the analytic law.
pub fn resonance_linewidths(model: &ScattererModel<f64>, xi_max: usize) -> Result<Vec<Resonance>> {
    if xi_max == 0 || 4 * xi_max > model.cells {
        return Err(Error::invalid(format!(
            "resonances need 1 ≤ ξ ≤ N/4 (ξ = {xi_max}, N = {})",
            model.cells
        )));
    }
    if model.zeta <= 0.0 {
        return Err(Error::invalid("linewidth law needs ζ > 0"));
    }
    let t2 = |p: f64| finite_array_coefficients(model, p).0.norm_sqr();
    (1..=xi_max)
        .map(|xi| {
            let center = resonance_phase(model.zeta, model.cells, xi);
            let toward_gap = if xi == 1 {
                band_edges(model.zeta).0
            } else {
                resonance_phase(model.zeta, model.cells, xi - 1)
            };
            let toward_band = resonance_phase(model.zeta, model.cells, xi + 1);
            let hi = half_max_crossing(&t2, center, toward_gap);
            let lo = half_max_crossing(&t2, center, toward_band);
            let analytic = analytic_linewidth(model.zeta, model.cells, xi);
            let (fwhm, overlapping) = match (lo, hi) {
                (Some(a), Some(b)) => ((b - a).abs(), false),
                _ => (f64::NAN, true),
            };
            Ok(Resonance {
                xi,
                phase: center,
                fwhm,
                analytic,
                relative_deviation: (fwhm - analytic) / analytic,
                overlapping,
            })
        })
        .collect()
}

/// Bisection for `|t|² = 1/2` between a peak and a point beyond it. The scan
/// stops at the midpoint to the neighboring feature.
fn half_max_crossing(f: &impl Fn(f64) -> f64, peak: f64, neighbor: f64) -> Option<f64> {
    let limit = peak + 0.5 * (neighbor - peak);
    let steps = 400;
    let mut inside = peak;
    let mut outside = None;
    for i in 1..=steps {
        let p = peak + (limit - peak) * i as f64 / steps as f64;
        if f(p) < 0.5 {
            outside = Some(p);
            break;
        }
        inside = p;
    }
    let mut outside = outside?;
    for _ in 0..80 {
        let mid = 0.5 * (inside + outside);
        if f(mid) >= 0.5 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Some(0.5 * (inside + outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn free_propagation_without_scatterer() {
        let m = unit_cell_matrix(0.0, 0.7);
        assert!((m[0][0] - Complex64::from_polar(1.0, 0.7)).norm() < 1e-15);
        assert!((m[1][1] - Complex64::from_polar(1.0, -0.7)).norm() < 1e-15);
        assert_eq!(m[0][1].norm(), 0.0);
    }

    #[test]
    fn trace_and_determinant() {
        for &(z, p) in &[(0.3f64, 0.4f64), (1.0, 2.5), (-2.0, 5.0)] {
            let m = unit_cell_matrix(z, p);
            let half_tr = (m[0][0] + m[1][1]) * 0.5;
            assert!((half_tr.re - (p.cos() - z * p.sin())).abs() < 1e-14);
            assert!(half_tr.im.abs() < 1e-14);
            assert!((det(&m) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn gap_edges() {
        let z = 0.8;
        let (lo, hi) = band_edges(z);
        assert_eq!(hi, PI);
        assert!((dispersion(z, lo).re - PI).abs() < 1e-6);
        assert!((dispersion(z, hi).re - PI).abs() < 1e-6);
        let inside = dispersion(z, 0.5 * (lo + hi));
        assert!(inside.im.abs() > 0.1);
    }

    #[test]
    fn quadratic_edge_expansion() {
        let z = 1.0;
        for &dq in &[0.02, 0.05, 0.09] {
            let qd = PI - dq;
            let exact_lo = resonance_phase_for_qd(z, qd, false);
            let exact_hi = resonance_phase_for_qd(z, qd, true);
            let (lo, hi) = band_edges(z);
            let approx_lo = edge_expansion(z, qd, false);
            let approx_hi = edge_expansion(z, qd, true);
            assert!(((approx_lo - lo) / (exact_lo - lo) - 1.0).abs() < 0.05);
            assert!(((approx_hi - hi) / (exact_hi - hi) - 1.0).abs() < 0.05);
        }
    }

    fn resonance_phase_for_qd(z: f64, qd: f64, upper: bool) -> f64 {
        let amp = (1.0 + z * z).sqrt();
        let a = (qd.cos() / amp).acos();
        if upper {
            2.0 * PI - a - z.atan()
        } else {
            a - z.atan()
        }
    }

    #[test]
    fn empty_lattice_is_transparent() {
        let model = ScattererModel::new(0.0, 1.0, 37).unwrap();
        for i in 0..20 {
            let (t, r) = finite_array_coefficients(&model, 0.3 * i as f64);
            assert!((t.norm() - 1.0).abs() < 1e-12);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn resonances_transmit_fully() {
        let model = ScattererModel::new(1.0f64, 1.0, 50).unwrap();
        for xi in 1..6 {
            let p = resonance_phase(1.0, 50, xi);
            let (t, _) = finite_array_coefficients(&model, p);
            assert!((t.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn power_methods_agree() {
        let m = unit_cell_matrix(0.7, 1.3);
        let mut direct = m;
        for n in 2..=200 {
            direct = mat_mul(&direct, &m);
            if n % 37 == 0 || n == 200 {
                let cheb = matrix_power(&m, n);
                let spec = matrix_power_spectral(&m, n).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((cheb[i][j] - direct[i][j]).norm() < 1e-9);
                        assert!((spec[i][j] - direct[i][j]).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_transmission() {
        let model = ScattererModel::new(0.6, 1.0, 23).unwrap();
        let p = 1.1;
        let qd = dispersion(0.6, p);
        let vg = group_velocity(0.6, p);
        let n = Complex64::new(23.0, 0.0);
        let inv = (n * qd).cos() - Complex64::i() * (n * qd).sin() / vg;
        let (t, _) = finite_array_coefficients(&model, p);
        assert!((t - inv.inv()).norm() < 1e-10);
    }

    #[test]
    fn deep_gap_stays_finite() {
        let model = ScattererModel::new(5.0f64, 1.0, 400).unwrap();
        let (lo, hi) = band_edges(5.0);
        let (t, r) = finite_array_coefficients(&model, 0.5 * (lo + hi));
        assert!(t.norm() < 1e-30 && t.norm().is_finite());
        assert!((r.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unwrap_is_continuous() {
        let phases: Vec<f64> = (0..400).map(|i| 0.01 + 6.0 * i as f64 / 400.0).collect();
        let q: Vec<_> = phases.iter().map(|&p| dispersion(0.4, p)).collect();
        let u = unwrap_branch(&q);
        for w in u.windows(2) {
            assert!((w[1].re - w[0].re).abs() < 0.2);
        }
    }
}
