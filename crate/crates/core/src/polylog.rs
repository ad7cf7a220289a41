//! Polylogarithms `Li_s(z)` of order 1, 2 and 3 on the closed unit disk.
//!
//! Inside `|z| ≤ 1/2` the defining series converges geometrically. Elsewhere
//! the expansion in `μ = ln z`,
//!
//! ```text
//! Li_s(e^μ) = Σ_{k ≠ s−1} ζ(s−k) μ^k / k!  +  μ^{s−1}/(s−1)! [H_{s−1} − ln(−μ)]
//! ```
//!
//! converges for `|μ| < 2π`, which covers the rest of the disk including the
//! unit circle where the plain series is only algebraically convergent.

use crate::{Error, Real, Result};
use num_complex::Complex;
use std::sync::OnceLock;

const MAX_TERMS: usize = 400;

/// `ζ(2m)` for `m = 0..ZETA_EVEN_LEN` (with `ζ(0) = −1/2`).
const ZETA_EVEN_LEN: usize = 64;

fn zeta_even() -> &'static [f64; ZETA_EVEN_LEN] {
    static TABLE: OnceLock<[f64; ZETA_EVEN_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; ZETA_EVEN_LEN];
        t[0] = -0.5;
        for (m, slot) in t.iter_mut().enumerate().skip(1) {
            let p = (2 * m) as i32;
            let mut s = 0.0;
            // Sum small terms first; the tail beyond 2000 is below 1e-16 for p ≥ 4.
            let top = if m == 1 { 0 } else { 2000 };
            for n in (1..=top).rev() {
                s += (n as f64).powi(-p);
            }
            *slot = if m == 1 { std::f64::consts::PI.powi(2) / 6.0 } else { s };
        }
        t
    })
}

/// `ζ(3)`.
pub const APERY: f64 = 1.202_056_903_159_594_3;

/// `ζ(s)` for the integer orders met in the expansion (`s ≤ 3`, `s ≠ 1`).
fn zeta_int(s: i64) -> f64 {
    match s {
        3 => APERY,
        2 => std::f64::consts::PI.powi(2) / 6.0,
        0 => -0.5,
        n if n < 0 && n % 2 == 0 => 0.0,
        n if n < 0 => {
            // ζ(1 − 2m) = (−1)^m 2 (2m−1)! ζ(2m) / (2π)^{2m}; only used for small m.
            let m = ((1 - n) / 2) as usize;
            let mut fact = 1.0;
            for i in 1..(2 * m) {
                fact *= i as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * 2.0 * fact * zeta_even()[m] / (2.0 * std::f64::consts::PI).powi(2 * m as i32)
        }
        _ => unreachable!("ζ(1) never requested"),
    }
}

/// Coefficient of `μ^k` for `k ≥ s` with `s − k = 1 − 2m`, i.e. `ζ(1−2m)/k!`,
/// evaluated without forming large factorials.
fn tail_coefficient(s: usize, m: usize) -> f64 {
    let k = s - 1 + 2 * m;
    // (2m−1)! / k! = 1 / ((2m)(2m+1)···k)
    let mut ratio = 1.0;
    for i in (2 * m)..=k {
        ratio /= i as f64;
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * 2.0 * ratio * zeta_even()[m] / (2.0 * std::f64::consts::PI).powi(2 * m as i32)
}

/// `Li_s(z)` for `s ∈ {1, 2, 3}` and `|z| ≤ 1`.
pub fn polylog<T: Real>(s: u32, z: Complex<T>) -> Result<Complex<T>> {
    if !(1..=3).contains(&s) {
        return Err(Error::Unsupported(format!("polylogarithm of order {s}")));
    }
    let r = z.norm();
    if !r.is_finite() || r > T::one() + T::epsilon() * T::lit(8.0) {
        return Err(Error::invalid(format!("|z| = {r} outside the unit disk")));
    }
    let one = Complex::new(T::one(), T::zero());
    if s == 1 {
        if (one - z).norm() == T::zero() {
            return Err(Error::Divergent("Li_1(1) = −ln 0".into()));
        }
        return Ok(-(one - z).ln());
    }
    if z == one {
        return Ok(Complex::new(T::lit(zeta_int(s as i64)), T::zero()));
    }
    if r <= T::lit(0.5) {
        return Ok(direct_series(s, z));
    }
    Ok(log_series(s, z))
}

fn direct_series<T: Real>(s: u32, z: Complex<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut pow = z;
    for k in 1..=MAX_TERMS {
        let kf = T::count(k);
        let term = pow / kf.powi(s as i32);
        acc = acc + term;
        if term.norm() <= T::epsilon() * T::lit(0.1) * acc.norm() {
            break;
        }
        pow = pow * z;
    }
    acc
}

fn log_series<T: Real>(s: u32, z: Complex<T>) -> Complex<T> {
    let s = s as usize;
    let mu = z.ln();
    let zero = Complex::new(T::zero(), T::zero());
    let mut acc = zero;

    // Head: k = 0 .. s−1, skipping the pole k = s−1 which carries the log term.
    let mut pow = Complex::new(T::one(), T::zero());
    let mut fact = T::one();
    for k in 0..s {
        if k > 0 {
            pow = pow * mu;
            fact = fact * T::count(k);
        }
        if k + 1 == s {
            let harmonic: T = (1..s).map(|i| T::one() / T::count(i)).fold(T::zero(), |a, b| a + b);
            let log = if mu.norm() == T::zero() { zero } else { (-mu).ln() };
            acc = acc + pow / fact * (Complex::new(harmonic, T::zero()) - log);
        } else {
            acc = acc + pow / fact * T::lit(zeta_int((s - k) as i64));
        }
    }

    // k = s carries ζ(0) = −1/2.
    let pow = pow * mu;
    let fact = fact * T::count(s);
    acc = acc - pow / fact * T::lit(0.5);

    // Tail: k = s − 1 + 2m, m ≥ 1; odd negative zeta values only.
    let mu2 = mu * mu;
    let mut pow = pow / mu * mu2;
    for m in 1..ZETA_EVEN_LEN {
        let term = pow * T::lit(tail_coefficient(s, m));
        acc = acc + term;
        if term.norm() <= T::epsilon() * T::lit(0.1) * acc.norm().max(T::one()) {
            break;
        }
        pow = pow * mu2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{LN_2, PI};

    fn li(s: u32, z: Complex64) -> Complex64 {
        polylog(s, z).unwrap()
    }

    fn brute(s: u32, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..20_000 {
            acc += p / (k as f64).powi(s as i32);
            p *= z;
        }
        acc
    }

    #[test]
    fn zeta_three_at_one() {
        assert!((li(3, Complex64::new(1.0, 0.0)).re - 1.202_056_903_159_594).abs() < 1e-14);
    }

    #[test]
    fn zero_argument() {
        assert_eq!(li(2, Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        assert_eq!(li(3, Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn order_one_is_log() {
        let z = Complex64::new(0.0, 1.0);
        let expect = -(Complex64::new(1.0, 0.0) - z).ln();
        assert!((li(1, z) - expect).norm() < 1e-15);
        assert!(matches!(polylog(1, Complex64::new(1.0, 0.0)), Err(Error::Divergent(_))));
    }

    #[test]
    fn half_closed_forms() {
        let h = Complex64::new(0.5, 0.0);
        let li2 = PI * PI / 12.0 - LN_2 * LN_2 / 2.0;
        let li3 = 7.0 * APERY / 8.0 - PI * PI * LN_2 / 12.0 + LN_2.powi(3) / 6.0;
        assert!((li(2, h).re - li2).abs() < 1e-15);
        assert!((li(3, h).re - li3).abs() < 1e-15);
    }

    #[test]
    fn unit_circle_closed_forms() {
        for i in 1..40 {
            let th = 2.0 * PI * i as f64 / 40.0;
            let z = Complex64::new(th.cos(), th.sin());
            let re2 = PI * PI / 6.0 - th * (2.0 * PI - th) / 4.0;
            let im3 = PI * PI * th / 6.0 - PI * th * th / 4.0 + th.powi(3) / 12.0;
            assert!((li(2, z).re - re2).abs() < 1e-12, "θ = {th}");
            assert!((li(3, z).im - im3).abs() < 1e-12, "θ = {th}");
        }
    }

    #[test]
    fn matches_partial_sums_inside_disk() {
        for &(r, th) in &[(0.6, 0.3), (0.8, 2.0), (0.95, -1.2), (0.7, PI), (0.9, 0.0)] {
            let z = Complex64::from_polar(r, th);
            for s in 2..=3 {
                let a = li(s, z);
                let b = brute(s, z);
                assert!((a - b).norm() < 1e-11 * b.norm().max(1.0), "s={s} z={z}");
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let z = Complex64::from_polar(1.0, 0.7);
        assert!((li(2, z.conj()) - li(2, z).conj()).norm() < 1e-14);
    }

    #[test]
    fn outside_disk_rejected() {
        assert!(polylog(2, Complex64::new(1.5, 0.0)).is_err());
        assert!(polylog(4, Complex64::new(0.1, 0.0)).is_err());
    }

    #[test]
    fn single_precision() {
        let v = polylog(2, Complex::<f32>::new(-1.0, 0.0)).unwrap();
        assert!((v.re + (PI * PI / 12.0) as f32).abs() < 1e-5);
    }
}
