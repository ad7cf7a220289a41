//! Continuum dark and bright polaritons under a spatially varying control field.
//!
//! In the slow-light limit the dark polariton obeys a first-order advection
//! equation with local group velocity `v_g(z) = 2Ω_c(z)² d/Γ_1D` (units with
//! `c = 1`). With the travel time `T(z) = ∫_{z_start}^z dz'/v_g(z')`, the
//! solution is
//!
//! ```text
//! Ψ(t, z) = f̃(t − T(z)) / √v_g(z),    f̃(−T(z)) = √v_g(z) Ψ(0, z)
//! ```
//!
//! and the bright polariton follows as `Φ = −d ∂_z f̃(t − T(z))`.
//!
//! Discrete spin amplitudes carry the phase `e^{ik_1D z_j}`; the fields here
//! are the slowly varying envelopes, so callers strip that phase before
//! propagating and restore it afterwards (see [`envelope`]).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use spinwave::{Error, Result};

/// Piecewise-cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

fn check_nodes(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() < 2 || y.len() != x.len() {
        return Err(Error::invalid("interpolation needs at least two matching points"));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("interpolation nodes must increase strictly"));
    }
    Ok(())
}

impl Pchip {
    /// Monotone interpolant with Fritsch–Carlson slopes: preserves
    /// monotonicity of the data, so it inverts cleanly.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Pchip> {
        check_nodes(&x, &y)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slope = vec![0.0; n];
        if n == 2 {
            slope = vec![delta[0]; 2];
        } else {
            for i in 1..n - 1 {
                let (a, b) = (delta[i - 1], delta[i]);
                if a * b > 0.0 {
                    let (w1, w2) = (2.0 * h[i] + h[i - 1], h[i] + 2.0 * h[i - 1]);
                    slope[i] = (w1 + w2) / (w1 / a + w2 / b);
                }
            }
            slope[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slope[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Pchip { x, y, slope })
    }

    /// Interpolant with centered-difference slopes. Not monotone, but it does
    /// not flatten extrema, so derivatives of smooth profiles stay accurate.
    pub fn centered(x: Vec<f64>, y: Vec<f64>) -> Result<Pchip> {
        check_nodes(&x, &y)?;
        let n = x.len();
        let slope = (0..n)
            .map(|i| {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (y[b] - y[a]) / (x[b] - x[a])
            })
            .collect();
        Ok(Pchip { x, y, slope })
    }

    fn segment(&self, t: f64) -> usize {
        self.x.partition_point(|&v| v <= t).clamp(1, self.x.len() - 1) - 1
    }

    /// Value and derivative; constant extrapolation outside the nodes.
    pub fn eval_with_derivative(&self, t: f64) -> (f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            return (self.y[0], 0.0);
        }
        if t >= self.x[n - 1] {
            return (self.y[n - 1], 0.0);
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.slope[i] * h, self.slope[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1;
        let dv = (6.0 * s2 - 6.0 * s) * y0 + (3.0 * s2 - 4.0 * s + 1.0) * m0 + (-6.0 * s2 + 6.0 * s) * y1 + (3.0 * s2 - 2.0 * s) * m1;
        (v, dv / h)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_derivative(t).0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }
}

/// Three-point end slope, limited to keep the interpolant monotone.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

/// Complex field on interpolation nodes.
#[derive(Debug, Clone)]
struct ComplexPchip {
    re: Pchip,
    im: Pchip,
}

impl ComplexPchip {
    fn new(x: &[f64], v: &[C64]) -> Result<Self> {
        Ok(ComplexPchip {
            re: Pchip::centered(x.to_vec(), v.iter().map(|c| c.re).collect())?,
            im: Pchip::centered(x.to_vec(), v.iter().map(|c| c.im).collect())?,
        })
    }

    fn eval_with_derivative(&self, t: f64) -> (C64, C64) {
        let (a, da) = self.re.eval_with_derivative(t);
        let (b, db) = self.im.eval_with_derivative(t);
        (C64::new(a, b), C64::new(da, db))
    }
}

/// Group velocity along the chain and the travel-time map it induces.
#[derive(Debug, Clone)]
pub struct PolaritonMedium {
    /// Refined grid: atom positions plus `refine − 1` points between neighbors.
    pub z: Vec<f64>,
    pub group_velocity: Vec<f64>,
    /// `T(z)` on the grid, zero at the first atom.
    pub travel_time: Vec<f64>,
    pub spacing: f64,
    atoms: Vec<f64>,
    travel: Pchip,
    velocity: Pchip,
}

impl PolaritonMedium {
    /// Medium from control amplitudes at the atoms. `Ω_c²` is interpolated
    /// linearly between atoms and the grid is refined `refine` times.
    pub fn new(positions: &[f64], control: &[f64], gamma_1d: f64, refine: usize) -> Result<PolaritonMedium> {
        if positions.len() != control.len() {
            return Err(Error::DimensionMismatch { expected: positions.len(), got: control.len() });
        }
        if positions.len() < 3 {
            return Err(Error::invalid("polariton medium needs at least three atoms"));
        }
        if !(gamma_1d > 0.0) {
            return Err(Error::invalid("guided decay rate must be positive"));
        }
        if control.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
            return Err(Error::invalid("group velocity must be positive everywhere"));
        }
        let refine = refine.max(1);
        let spacing = (positions[positions.len() - 1] - positions[0]) / (positions.len() - 1) as f64;
        let mut z = Vec::with_capacity((positions.len() - 1) * refine + 1);
        let mut vg = Vec::with_capacity(z.capacity());
        for j in 0..positions.len() - 1 {
            let (a, b) = (positions[j], positions[j + 1]);
            let (ca, cb) = (control[j].powi(2), control[j + 1].powi(2));
            for r in 0..refine {
                let s = r as f64 / refine as f64;
                z.push(a + s * (b - a));
                vg.push(2.0 * (ca + s * (cb - ca)) * spacing / gamma_1d);
            }
        }
        z.push(positions[positions.len() - 1]);
        vg.push(2.0 * control[control.len() - 1].powi(2) * spacing / gamma_1d);
        Self::from_velocity(z, vg, spacing, positions.to_vec())
    }

    /// Medium from a velocity profile on an explicit grid.
    pub fn from_velocity(z: Vec<f64>, vg: Vec<f64>, spacing: f64, atoms: Vec<f64>) -> Result<PolaritonMedium> {
        if vg.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("group velocity must be positive everywhere"));
        }
        // Trapezoid on the refined grid; 1/v_g is piecewise smooth.
        let mut t = vec![0.0; z.len()];
        for i in 1..z.len() {
            t[i] = t[i - 1] + 0.5 * (z[i] - z[i - 1]) * (1.0 / vg[i] + 1.0 / vg[i - 1]);
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Range("travel-time map is not strictly increasing".into()));
        }
        let travel = Pchip::new(z.clone(), t.clone())?;
        let velocity = Pchip::new(z.clone(), vg.clone())?;
        Ok(PolaritonMedium { z, group_velocity: vg, travel_time: t, spacing, atoms, travel, velocity })
    }

    pub fn velocity_at(&self, z: f64) -> f64 {
        self.velocity.eval(z)
    }

    pub fn travel_time_at(&self, z: f64) -> f64 {
        self.travel.eval(z)
    }

    /// Total transit time across the chain.
    pub fn transit_time(&self) -> f64 {
        *self.travel_time.last().unwrap_or(&0.0)
    }

    /// `z` with `T(z) = s`, or `None` outside `[0, T_end]`. Newton steps
    /// safeguarded by bisection on the monotone interpolant.
    pub fn inverse_travel_time(&self, s: f64) -> Option<f64> {
        let end = self.transit_time();
        if !(0.0..=end).contains(&s) {
            return None;
        }
        let i = self.travel_time.partition_point(|&v| v <= s).clamp(1, self.z.len() - 1) - 1;
        let (mut lo, mut hi) = (self.z[i], self.z[i + 1]);
        let mut x = lo + (hi - lo) * (s - self.travel_time[i]) / (self.travel_time[i + 1] - self.travel_time[i]);
        for _ in 0..100 {
            let (f, df) = self.travel.eval_with_derivative(x);
            let r = f - s;
            if r.abs() <= 1e-14 * end.max(1.0) {
                break;
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = x - r / df;
            x = if df > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        Some(x)
    }

    /// Mixing angle `tan θ = √(Γ_1D/(2Ω_c² d)) = 1/√v_g` (with `c = 1`, `n = 1/d`).
    pub fn mixing_angle(&self) -> Vec<f64> {
        self.group_velocity.iter().map(|v| (1.0 / v.sqrt()).atan()).collect()
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }
}

/// Dark and bright polariton envelopes at one time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolaritonField {
    pub t: f64,
    pub z: Vec<f64>,
    pub dark: Vec<C64>,
    pub bright: Vec<C64>,
}

/// Removes (`sign = −1`) or restores (`sign = +1`) the carrier `e^{ik z}`.
pub fn envelope(c: &[C64], z: &[f64], k: f64, sign: f64) -> Vec<C64> {
    c.iter().zip(z).map(|(v, &z)| v * C64::from_polar(1.0, sign * k * z)).collect()
}

/// `f̃` as a function of the source point `z0`: `√v_g(z0) Ψ0(z0)`.
fn source_profile(medium: &PolaritonMedium, psi0: &[C64]) -> Result<ComplexPchip> {
    if psi0.len() != medium.atoms.len() {
        return Err(Error::DimensionMismatch { expected: medium.atoms.len(), got: psi0.len() });
    }
    let initial = ComplexPchip::new(&medium.atoms, psi0)?;
    let values: Vec<C64> = medium
        .z
        .iter()
        .zip(&medium.group_velocity)
        .map(|(&z, &v)| initial.eval_with_derivative(z).0 * v.sqrt())
        .collect();
    ComplexPchip::new(&medium.z, &values)
}

/// Dark and bright envelopes at time `t` on `query` points, from the initial
/// envelope `psi0` at the atoms.
pub fn propagate(medium: &PolaritonMedium, psi0: &[C64], t: f64, query: &[f64]) -> Result<PolaritonField> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("time {t} must be finite and non-negative")));
    }
    let f = source_profile(medium, psi0)?;
    let zero = C64::new(0.0, 0.0);
    let mut dark = Vec::with_capacity(query.len());
    let mut bright = Vec::with_capacity(query.len());
    let (first, last) = (medium.z[0], medium.z[medium.z.len() - 1]);
    for &z in query {
        if z < first || z > last {
            dark.push(zero);
            bright.push(zero);
            continue;
        }
        let s = medium.travel_time_at(z) - t;
        let Some(z0) = medium.inverse_travel_time(s) else {
            dark.push(zero);
            bright.push(zero);
            continue;
        };
        let (v, v0) = (medium.velocity_at(z), medium.velocity_at(z0));
        let (value, slope) = f.eval_with_derivative(z0);
        dark.push(value / v.sqrt());
        // ∂_z f̃(t − T(z)) = f̃'(z0) dz0/dz with dz0/dz = v_g(z0)/v_g(z).
        bright.push(-medium.spacing * slope * (v0 / v));
    }
    Ok(PolaritonField { t, z: query.to_vec(), dark, bright })
}

/// `Ψ(t, z)` alone.
pub fn dark_polariton_solution(medium: &PolaritonMedium, psi0: &[C64], t: f64, query: &[f64]) -> Result<Vec<C64>> {
    Ok(propagate(medium, psi0, t, query)?.dark)
}

/// `Φ(t, z) = −d ∂_z f̃(t − T(z))`.
pub fn bright_from_dark(medium: &PolaritonMedium, psi0: &[C64], t: f64, query: &[f64]) -> Result<Vec<C64>> {
    let field = propagate(medium, psi0, t, query)?;
    // A grid coarser than the profile's features makes the derivative meaningless.
    let h = medium.z.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let scale = psi0.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let jump = psi0.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
    if scale > 0.0 && jump > 0.5 * scale && h > 0.0 {
        return Err(Error::Range("grid too coarse for the bright-polariton derivative".into()));
    }
    Ok(field.bright)
}

/// Relative L² distance `‖a − b‖/‖b‖`.
pub fn l2_mismatch(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(z: &[f64], zc: f64, w: f64) -> Vec<C64> {
        z.iter().map(|&z| C64::new((-(z - zc).powi(2) / (2.0 * w * w)).exp(), 0.0)).collect()
    }

    fn line(n: usize, d: f64) -> Vec<f64> {
        (0..n).map(|j| j as f64 * d).collect()
    }

    #[test]
    fn pchip_reproduces_cubic_free_monotone_data() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let p = Pchip::new(x, y).unwrap();
        assert!((p.eval(3.3) - 7.6).abs() < 1e-14);
        assert!((p.eval_with_derivative(5.5).1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pchip_stays_monotone() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 5.0];
        let p = Pchip::new(x, y).unwrap();
        let mut prev = -1.0;
        for i in 0..=400 {
            let v = p.eval(i as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn uniform_velocity_translates() {
        let z = line(60, 1.0);
        let medium = PolaritonMedium::new(&z, &vec![0.5; 60], 0.5, 4).unwrap();
        let v = medium.group_velocity[0];
        assert!((v - 1.0).abs() < 1e-14);
        let psi0 = gaussian(&z, 15.0, 3.0);
        let t = 12.0;
        let out = dark_polariton_solution(&medium, &psi0, t, &z).unwrap();
        let want = gaussian(&z, 15.0 + v * t, 3.0);
        for (a, b) in out.iter().zip(&want) {
            assert!((a - b).norm() < 2e-3);
        }
    }

    #[test]
    fn travel_time_round_trip() {
        let z = line(40, 0.7);
        let control: Vec<f64> = (0..40).map(|j| 0.1 * (1.0 + j as f64 / 10.0)).collect();
        let medium = PolaritonMedium::new(&z, &control, 0.4, 4).unwrap();
        for &x in &[0.0, 1.234, 10.0, 27.3] {
            let back = medium.inverse_travel_time(medium.travel_time_at(x)).unwrap();
            assert!((back - x).abs() < 1e-8);
        }
        assert!(medium.inverse_travel_time(-1.0).is_none());
    }

    #[test]
    fn norm_is_conserved_inside_the_chain() {
        let z = line(200, 0.5);
        let control: Vec<f64> = (0..200).map(|j| 1.0 + 0.5 * (j as f64 / 200.0)).collect();
        let medium = PolaritonMedium::new(&z, &control, 1.0, 4).unwrap();
        let psi0 = gaussian(&z, 20.0, 3.0);
        let fine: Vec<f64> = (0..=4000).map(|i| i as f64 * 99.5 / 4000.0).collect();
        let norm = |t: f64| {
            let p = dark_polariton_solution(&medium, &psi0, t, &fine).unwrap();
            p.iter().map(|c| c.norm_sqr()).sum::<f64>() * (fine[1] - fine[0])
        };
        let (a, b) = (norm(0.0), norm(20.0));
        assert!((a - b).abs() < 1e-3 * a, "{a} vs {b}");
    }

    #[test]
    fn stationary_profile_has_no_bright_part() {
        let z = line(30, 1.0);
        let medium = PolaritonMedium::new(&z, &vec![1.0; 30], 1.0, 4).unwrap();
        let psi0 = vec![C64::new(0.3, -0.1); 30];
        let phi = bright_from_dark(&medium, &psi0, 0.0, &z[1..29]).unwrap();
        assert!(phi.iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn uniform_bright_tracks_gradient() {
        let z = line(80, 1.0);
        let medium = PolaritonMedium::new(&z, &vec![0.8; 80], 0.4, 4).unwrap();
        let psi0 = gaussian(&z, 30.0, 5.0);
        let phi = bright_from_dark(&medium, &psi0, 0.0, &z).unwrap();
        let v = medium.group_velocity[0];
        for (j, &x) in z.iter().enumerate().skip(5).take(50) {
            let grad = -(x - 30.0) / 25.0 * (-(x - 30.0).powi(2) / 50.0).exp();
            assert!((phi[j].re + v.sqrt() * grad).abs() < 5e-3);
        }
    }

    #[test]
    fn rejects_nonpositive_velocity() {
        let z = line(5, 1.0);
        assert!(PolaritonMedium::new(&z, &[1.0, 1.0, 0.0, 1.0, 1.0], 1.0, 2).is_err());
    }
}
