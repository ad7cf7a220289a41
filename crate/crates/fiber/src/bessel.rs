//! Cylinder functions of real positive argument, all orders `0..=m_max` at once.
//!
//! `J` and `I` come from Miller's backward recurrence normalized by the
//! generating-function sums; `Y_0`, `Y_1` from the Neumann series over the same
//! `J` values; `K_0`, `K_1` from the trapezoidal rule on
//! `e^x K_ν(x) = ∫_0^∞ exp(−x(cosh t − 1)) cosh(νt) dt`. Higher `Y` and `K`
//! orders follow by forward recurrence, which is stable for both.

use spinwave::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE: f64 = 1e250;

/// Largest argument accepted by [`bessel_y`]; the Neumann series loses digits
/// to cancellation beyond it.
pub const Y_MAX_ARG: f64 = 12.0;

/// Largest argument accepted by [`bessel_i`] and [`bessel_k`] (no exponential scaling).
pub const IK_MAX_ARG: f64 = 600.0;

fn check_arg(x: f64, max: f64, name: &str) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() || x > max {
        return Err(Error::Range(format!("{name}(x) needs 0 < x ≤ {max}, got {x}")));
    }
    Ok(())
}

fn start_order(m_max: usize, x: f64) -> usize {
    let top = (m_max as f64).max(x);
    let n = top + 20.0 + (40.0 * top).sqrt();
    2 * ((n as usize) / 2 + 1)
}

/// Backward recurrence `f_{k−1} = (2k/x) f_k + sign·f_{k+1}` from a high start.
/// Returns orders `0..=m_max` and the normalization sum `f_0 + 2Σ_{k even} f_k`
/// (J, `sign = −1`) or `f_0 + 2Σ_k f_k` (I, `sign = +1`).
fn miller(m_max: usize, x: f64, sign: f64, every_order: bool) -> (Vec<f64>, f64) {
    let start = start_order(m_max, x);
    let mut out = vec![0.0; m_max + 1];
    let mut next = 0.0; // f_{k+1}
    let mut cur = 1e-300; // f_k
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        if k <= m_max {
            out[k] = cur;
        }
        if every_order || k % 2 == 0 {
            sum += 2.0 * cur;
        }
        let prev = (2.0 * k as f64 / x) * cur + sign * next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            sum /= RESCALE;
            for v in out.iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    out[0] = cur;
    sum += cur;
    (out, sum)
}

/// `J_m(x)` for `m = 0..=m_max`.
pub fn bessel_j(m_max: usize, x: f64) -> Result<Vec<f64>> {
    check_arg(x, f64::INFINITY, "J")?;
    if x > 1e4 {
        return Err(Error::Range(format!("J(x) not implemented for x = {x}")));
    }
    let (mut out, sum) = miller(m_max.max(1), x, -1.0, false);
    for v in out.iter_mut() {
        *v /= sum;
    }
    out.truncate(m_max + 1);
    Ok(out)
}

/// `Y_m(x)` for `m = 0..=m_max`, `0 < x ≤ Y_MAX_ARG`.
pub fn bessel_y(m_max: usize, x: f64) -> Result<Vec<f64>> {
    check_arg(x, Y_MAX_ARG, "Y")?;
    let pi = std::f64::consts::PI;
    // The series needs J up to an order where the terms are negligible.
    let extra = start_order(1, x);
    let j = bessel_j(extra, x)?;
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 <= extra {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = 2.0 / pi * lg * j[0] - 4.0 / pi * s0;
    let y1 = -2.0 / pi * (j[0] / x - lg * j[1]) + 2.0 / pi * s1;
    let mut out = vec![0.0; m_max.max(1) + 1];
    out[0] = y0;
    out[1] = y1;
    for m in 1..m_max {
        out[m + 1] = (2.0 * m as f64 / x) * out[m] - out[m - 1];
    }
    out.truncate(m_max + 1);
    Ok(out)
}

/// `I_m(x)` for `m = 0..=m_max`.
pub fn bessel_i(m_max: usize, x: f64) -> Result<Vec<f64>> {
    check_arg(x, IK_MAX_ARG, "I")?;
    let (mut out, sum) = miller(m_max.max(1), x, 1.0, true);
    let scale = x.exp() / sum;
    for v in out.iter_mut() {
        *v *= scale;
    }
    out.truncate(m_max + 1);
    Ok(out)
}

/// `e^x K_ν(x)` for `ν ∈ {0, 1}` by the trapezoidal rule.
fn scaled_k01(x: f64) -> (f64, f64) {
    // The error of the rule decays like exp(−2π²/(h² x)).
    let h = (0.5 / x.sqrt()).min(0.1);
    let mut k0 = 0.5 * h;
    let mut k1 = 0.5 * h;
    let mut i = 1;
    loop {
        let t = i as f64 * h;
        let g = (-x * (t.cosh() - 1.0)).exp();
        let a = g * h;
        let b = g * t.cosh() * h;
        k0 += a;
        k1 += b;
        if b < 1e-18 * k1 {
            break;
        }
        i += 1;
    }
    (k0, k1)
}

/// `K_m(x)` for `m = 0..=m_max`.
pub fn bessel_k(m_max: usize, x: f64) -> Result<Vec<f64>> {
    check_arg(x, IK_MAX_ARG, "K")?;
    let (k0, k1) = scaled_k01(x);
    let damp = (-x).exp();
    let mut out = vec![0.0; m_max.max(1) + 1];
    out[0] = k0 * damp;
    out[1] = k1 * damp;
    for m in 1..m_max {
        out[m + 1] = (2.0 * m as f64 / x) * out[m] + out[m - 1];
        if !out[m + 1].is_finite() {
            return Err(Error::Range(format!("K_{}({x}) overflows", m + 1)));
        }
    }
    out.truncate(m_max + 1);
    Ok(out)
}

/// Derivatives `Z'_m = Z_{m−1} − (m/x) Z_m` for `J`, `Y`, `I`
/// (`Z'_0 = −Z_1` for `J`, `Y`; `I'_0 = I_1`). Needs one order beyond `m`.
pub fn derivative_jy(values: &[f64], x: f64) -> Vec<f64> {
    let n = values.len() - 1;
    (0..n)
        .map(|m| if m == 0 { -values[1] } else { values[m - 1] - m as f64 / x * values[m] })
        .collect()
}

pub fn derivative_i(values: &[f64], x: f64) -> Vec<f64> {
    let n = values.len() - 1;
    (0..n)
        .map(|m| if m == 0 { values[1] } else { values[m - 1] - m as f64 / x * values[m] })
        .collect()
}

/// `K'_m = −K_{m−1} − (m/x) K_m`, `K'_0 = −K_1`.
pub fn derivative_k(values: &[f64], x: f64) -> Vec<f64> {
    let n = values.len() - 1;
    (0..n)
        .map(|m| if m == 0 { -values[1] } else { -values[m - 1] - m as f64 / x * values[m] })
        .collect()
}
