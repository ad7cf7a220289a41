//! Driven dynamics of an atom chain along the fiber.
//!
//! Amplitudes of the excited states `c_e` (and, with a control field, the
//! storage states `c_s`) evolve under a non-Hermitian single-excitation
//! Hamiltonian `H = H_1D + H'`. The guided part is
//! `(H_1D)_ij = −i(Γ_1D/2) e^{ik_1D|z_i − z_j|}`. The non-guided part is either
//! diagonal, `J' − iΓ'/2` (independent emission), or the full
//! `H'_ij = −3π G'(z_i − z_j)` (collective emission).
//!
//! A weak probe `Ω e^{ik_1D z}` at detuning `Δ` gives the steady state
//! `(H − Δ) c = Ω u`, `u_j = e^{ik_1D z_j}`, and the guided output fields
//!
//! ```text
//! t = 1 + i(Γ_1D/2Ω) Σ_j e^{−ik_1D z_j} c_j,    r = i(Γ_1D/2Ω) Σ_j e^{ik_1D z_j} c_j
//! ```
//!
//! With a control field `Ω_c(z_j)` coupling `e_j ↔ s_j` the system doubles to
//! `2N` amplitudes (excited first). The storage level sits at `J'`, so the
//! two-photon detuning is `Δ_s = Δ − J'` and the probe is transparent at `Δ = J'`.

use crate::greens::{FiberConstants, FiberCouplings, FiberModel};
use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use spinwave::geometry::LatticeKind;
use spinwave::linalg::{self, CMat};
use spinwave::{AtomArray, Error, Result};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Eigenvector condition number above which retrieval switches to time stepping.
pub const DEFECTIVE_CONDITION: f64 = 1e12;

/// Remaining population at which a stepped retrieval stops.
pub const RESIDUAL_POPULATION: f64 = 1e-8;

/// Longest stepped retrieval, in `1/Γ0`.
pub const STEPPING_HORIZON: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmissionModel {
    /// Each atom radiates into free space on its own at `Γ'`, shifted by `J'`.
    Independent,
    /// Non-guided emission through the full `G'` of the fiber.
    Collective,
}

impl FromStr for EmissionModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "independent" => Ok(EmissionModel::Independent),
            "collective" => Ok(EmissionModel::Collective),
            other => Err(Error::invalid(format!("unknown emission model `{other}`"))),
        }
    }
}

impl fmt::Display for EmissionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmissionModel::Independent => "independent",
            EmissionModel::Collective => "collective",
        })
    }
}

/// Chain along the fiber with its guided and non-guided Hamiltonians.
#[derive(Debug, Clone)]
pub struct FiberChain {
    /// Axial positions `z_j`.
    pub positions: Vec<f64>,
    pub spacing: f64,
    pub constants: FiberConstants,
    pub model: EmissionModel,
    pub guided: CMat,
    pub radiative: CMat,
}

fn axial_positions(array: &AtomArray) -> Result<Vec<f64>> {
    if array.kind != LatticeKind::FiberChain {
        return Err(Error::invalid(format!("expected a fiber chain, got {:?}", array.kind)));
    }
    Ok(array.positions.iter().map(|p| p[2]).collect())
}

impl FiberChain {
    fn assemble(
        positions: Vec<f64>,
        spacing: f64,
        constants: FiberConstants,
        model: EmissionModel,
        radiative: impl Fn(f64) -> Result<C64>,
    ) -> Result<FiberChain> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::invalid("chain needs at least one atom"));
        }
        let half = C64::new(0.0, -0.5 * constants.gamma_1d);
        let guided = Mat::from_fn(n, n, |i, j| {
            half * C64::from_polar(1.0, constants.k_1d * (positions[i] - positions[j]).abs())
        });
        let mut h = Mat::from_fn(n, n, |_, _| ZERO);
        match model {
            EmissionModel::Independent => {
                for i in 0..n {
                    h[(i, i)] = C64::new(constants.j_prime, -0.5 * constants.gamma_prime);
                }
            }
            EmissionModel::Collective => {
                for i in 0..n {
                    for j in i..n {
                        let v = radiative(positions[j] - positions[i])?;
                        h[(i, j)] = v;
                        h[(j, i)] = v;
                    }
                }
            }
        }
        Ok(FiberChain { positions, spacing, constants, model, guided, radiative: h })
    }

    /// Chain built from an evaluated fiber model.
    pub fn new(array: &AtomArray, fiber: &FiberModel, model: EmissionModel) -> Result<FiberChain> {
        let z = axial_positions(array)?;
        Self::assemble(z, array.lattice_constant, fiber.constants, model, |s| fiber.radiative(s))
    }

    /// Chain built from cached couplings; every separation must be present.
    pub fn from_couplings(array: &AtomArray, couplings: &FiberCouplings, model: EmissionModel) -> Result<FiberChain> {
        let z = axial_positions(array)?;
        Self::assemble(z, array.lattice_constant, couplings.constants, model, |s| {
            couplings
                .lookup(s)
                .map(|(_, r)| r)
                .ok_or_else(|| Error::invalid(format!("separation {s} missing from the coupling cache")))
        })
    }

    /// Independent-emission chain, which needs only the single-atom constants.
    pub fn independent(array: &AtomArray, constants: FiberConstants) -> Result<FiberChain> {
        let z = axial_positions(array)?;
        Self::assemble(z, array.lattice_constant, constants, EmissionModel::Independent, |_| Ok(ZERO))
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `H_1D + H'`.
    pub fn hamiltonian(&self) -> CMat {
        &self.guided + &self.radiative
    }

    /// `e^{ik_1D z_j}`: the probe profile and the phase of right-going emission.
    pub fn phases(&self) -> Vec<C64> {
        self.positions.iter().map(|&z| C64::from_polar(1.0, self.constants.k_1d * z)).collect()
    }

    /// Length `Nd` used in the delay time.
    pub fn length(&self) -> f64 {
        self.len() as f64 * self.spacing
    }

    /// `[[H − Δ, −Ω_c], [−Ω_c, (J' − Δ)]]` on the `2N` excited/storage amplitudes.
    pub fn eit_matrix(&self, control: &[f64], delta: f64) -> Result<CMat> {
        let n = self.len();
        if control.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: control.len() });
        }
        let h = self.hamiltonian();
        let s = C64::new(self.constants.j_prime - delta, 0.0);
        Ok(Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => h[(i, j)] - if i == j { C64::new(delta, 0.0) } else { ZERO },
            (true, false) if j - n == i => C64::new(-control[i], 0.0),
            (false, true) if i - n == j => C64::new(-control[j], 0.0),
            (false, false) if i == j => s,
            _ => ZERO,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R")]
    pub reflection: f64,
    /// `1 − T − R`.
    #[serde(rename = "kappa")]
    pub loss: f64,
    pub t: C64,
    pub r: C64,
}

impl TransportResult {
    fn from_fields(t: C64, r: C64) -> Self {
        let (tt, rr) = (t.norm_sqr(), r.norm_sqr());
        TransportResult { transmission: tt, reflection: rr, loss: 1.0 - tt - rr, t, r }
    }
}

fn check_drive(delta: f64, omega: f64) -> Result<()> {
    if !delta.is_finite() {
        return Err(Error::invalid(format!("detuning {delta} must be finite")));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid(format!("probe amplitude {omega} must be positive")));
    }
    Ok(())
}

/// Guided output fields from the excited amplitudes.
fn output_fields(chain: &FiberChain, c_e: &[C64], omega: f64) -> (C64, C64) {
    let g = 0.5 * chain.constants.gamma_1d / omega;
    let w = chain.phases();
    let fwd: C64 = w.iter().zip(c_e).map(|(w, c)| w.conj() * c).sum();
    let back: C64 = w.iter().zip(c_e).map(|(w, c)| w * c).sum();
    (C64::new(1.0, 0.0) + I * g * fwd, I * g * back)
}

/// Steady-state transport of a weak probe through two-level atoms.
/// Returns the result and the excited amplitudes.
pub fn two_level_transport(chain: &FiberChain, delta: f64, omega: f64) -> Result<(TransportResult, Vec<C64>)> {
    check_drive(delta, omega)?;
    let mut k = chain.hamiltonian();
    for i in 0..chain.len() {
        k[(i, i)] -= delta;
    }
    let rhs: Vec<C64> = chain.phases().into_iter().map(|u| u * omega).collect();
    let c = linalg::solve(&k, &rhs)?;
    let (t, r) = output_fields(chain, &c, omega);
    Ok((TransportResult::from_fields(t, r), c))
}

/// Transport at a spacing with `k_1D d` a multiple of `π`.
pub fn mirror_transport(chain: &FiberChain, delta: f64, omega: f64) -> Result<TransportResult> {
    let phase = chain.constants.k_1d * chain.spacing / PI;
    if (phase - phase.round()).abs() > 1e-9 || phase.round() < 1.0 {
        return Err(Error::invalid(format!("k_1D d = {phase}π is not a multiple of π")));
    }
    Ok(two_level_transport(chain, delta, omega)?.0)
}

/// Closed-form independent-emission mirror spectrum `(T, R)`.
pub fn mirror_closed_form(constants: &FiberConstants, atoms: usize, delta: f64) -> (f64, f64) {
    let n = atoms as f64;
    let d = delta - constants.j_prime;
    let gp = constants.gamma_prime;
    let den = (n * constants.gamma_1d + gp).powi(2) + 4.0 * d * d;
    ((gp * gp + 4.0 * d * d) / den, (n * constants.gamma_1d).powi(2) / den)
}

/// Dilute-gas estimate `T ≈ exp[−D/(1 + 4(Δ − J')²/Γ'²)]`.
pub fn independent_transmission_estimate(constants: &FiberConstants, atoms: usize, delta: f64) -> f64 {
    let x = 2.0 * (delta - constants.j_prime) / constants.gamma_prime;
    (-constants.optical_depth(atoms) / (1.0 + x * x)).exp()
}

/// Uniform or site-dependent control amplitudes, validated.
fn check_control(chain: &FiberChain, control: &[f64]) -> Result<()> {
    if control.len() != chain.len() {
        return Err(Error::DimensionMismatch { expected: chain.len(), got: control.len() });
    }
    if control.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
        return Err(Error::invalid("control amplitudes must be positive"));
    }
    Ok(())
}

/// EIT steady state: transport result, excited and storage amplitudes.
pub fn eit_steady_state(
    chain: &FiberChain,
    control: &[f64],
    delta: f64,
    omega: f64,
) -> Result<(TransportResult, Vec<C64>, Vec<C64>)> {
    check_drive(delta, omega)?;
    check_control(chain, control)?;
    let n = chain.len();
    let k = chain.eit_matrix(control, delta)?;
    let mut rhs = vec![ZERO; 2 * n];
    for (r, u) in rhs.iter_mut().zip(chain.phases()) {
        *r = u * omega;
    }
    let x = linalg::solve(&k, &rhs)?;
    let (t, r) = output_fields(chain, &x[..n], omega);
    Ok((TransportResult::from_fields(t, r), x[..n].to_vec(), x[n..].to_vec()))
}

/// Linear response at many detunings from one eigendecomposition of the
/// static generator `K0`: `t(Δ) = 1 + i(Γ_1D/2) Σ_a p_a y_a / (λ_a − Δ)`.
///
/// Falls back to a direct solve per detuning when the spectral form does not
/// reproduce one.
pub struct Response {
    gamma_1d: f64,
    values: Vec<C64>,
    forward: Vec<C64>,
    backward: Vec<C64>,
    direct: Option<(FiberChain, Option<Vec<f64>>)>,
}

impl Response {
    /// Two-level atoms (`control = None`) or EIT with the given control.
    pub fn new(chain: &FiberChain, control: Option<&[f64]>) -> Result<Response> {
        if let Some(c) = control {
            check_control(chain, c)?;
        }
        let n = chain.len();
        let k0 = match control {
            Some(c) => chain.eit_matrix(c, 0.0)?,
            None => chain.hamiltonian(),
        };
        let dim = k0.nrows();
        let w = chain.phases();
        let mut rhs = vec![ZERO; dim];
        rhs[..n].copy_from_slice(&w);
        let gamma_1d = chain.constants.gamma_1d;
        let spectral = (|| -> Result<Response> {
            let e = linalg::eig(&k0)?;
            let y = linalg::solve(&e.vectors, &rhs)?;
            let mut forward = vec![ZERO; dim];
            let mut backward = vec![ZERO; dim];
            for a in 0..dim {
                let (mut f, mut b) = (ZERO, ZERO);
                for j in 0..n {
                    f += w[j].conj() * e.vectors[(j, a)];
                    b += w[j] * e.vectors[(j, a)];
                }
                forward[a] = f * y[a];
                backward[a] = b * y[a];
            }
            Ok(Response { gamma_1d, values: e.values, forward, backward, direct: None })
        })();
        let direct = Response {
            gamma_1d,
            values: vec![],
            forward: vec![],
            backward: vec![],
            direct: Some((chain.clone(), control.map(|c| c.to_vec()))),
        };
        let Ok(spectral) = spectral else { return Ok(direct) };
        // Spot checks against direct solves at and around the resonance.
        let j = chain.constants.j_prime;
        for delta in [j, j + 0.0137, j - 1.3] {
            let a = spectral.at(delta)?;
            let b = direct.at(delta)?;
            if (a.t - b.t).norm() > 1e-8 || (a.r - b.r).norm() > 1e-8 {
                return Ok(direct);
            }
        }
        Ok(spectral)
    }

    pub fn is_spectral(&self) -> bool {
        self.direct.is_none()
    }

    pub fn at(&self, delta: f64) -> Result<TransportResult> {
        match &self.direct {
            Some((chain, Some(control))) => return Ok(eit_steady_state(chain, control, delta, 1.0)?.0),
            Some((chain, None)) => return Ok(two_level_transport(chain, delta, 1.0)?.0),
            None => {}
        }
        let (mut f, mut b) = (ZERO, ZERO);
        for a in 0..self.values.len() {
            let den = self.values[a] - delta;
            f += self.forward[a] / den;
            b += self.backward[a] / den;
        }
        let g = 0.5 * self.gamma_1d;
        Ok(TransportResult::from_fields(C64::new(1.0, 0.0) + I * g * f, I * g * b))
    }
}

/// Golden-section refinement of a bracketed minimum.
fn refine_minimum(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    const G: f64 = 0.381_966_011_250_105;
    let mut x1 = lo + G * (hi - lo);
    let mut x2 = hi - G * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + G * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - G * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Global minimum of `f` on `[lo, hi]`: a uniform scan, then golden-section
/// refinement of the best few local minima.
pub fn scan_minimum(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, points: usize) -> Result<(f64, f64)> {
    let points = points.max(3);
    let h = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| lo + h * i as f64).collect();
    let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut minima: Vec<usize> = (1..points - 1).filter(|&i| ys[i] <= ys[i - 1] && ys[i] <= ys[i + 1]).collect();
    minima.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
    let mut best = ys
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &y)| (xs[i], y))
        .ok_or_else(|| Error::invalid("empty scan"))?;
    for &i in minima.iter().take(8) {
        let cand = refine_minimum(&f, xs[i - 1], xs[i + 1])?;
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// Extremes of a two-level spectrum, each at its own optimal detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumExtremes {
    pub min_transmission: f64,
    pub delta_transmission: f64,
    /// Smallest `1 − R`.
    pub min_unreflected: f64,
    pub delta_reflection: f64,
    pub min_loss: f64,
    pub delta_loss: f64,
}

/// Minimum `T`, `1 − R` and `κ` over `J' ± half_width`.
pub fn spectrum_extremes(chain: &FiberChain, half_width: f64, points: usize) -> Result<SpectrumExtremes> {
    let resp = Response::new(chain, None)?;
    let (lo, hi) = (chain.constants.j_prime - half_width, chain.constants.j_prime + half_width);
    let (dt, t) = scan_minimum(|d| Ok(resp.at(d)?.transmission), lo, hi, points)?;
    let (dr, r) = scan_minimum(|d| Ok(1.0 - resp.at(d)?.reflection), lo, hi, points)?;
    let (dk, k) = scan_minimum(|d| Ok(resp.at(d)?.loss), lo, hi, points)?;
    Ok(SpectrumExtremes {
        min_transmission: t,
        delta_transmission: dt,
        min_unreflected: r,
        delta_reflection: dr,
        min_loss: k,
        delta_loss: dk,
    })
}

/// EIT spectrum over a detuning grid.
pub fn eit_spectrum(chain: &FiberChain, control: &[f64], deltas: &[f64]) -> Result<Vec<TransportResult>> {
    let resp = Response::new(chain, Some(control))?;
    deltas.iter().map(|&d| resp.at(d)).collect()
}

/// Analytic group velocity `2Ω_c² d / Γ_1D` at the window center.
pub fn analytic_group_velocity(constants: &FiberConstants, omega_c: f64, d: f64) -> f64 {
    2.0 * omega_c * omega_c * d / constants.gamma_1d
}

/// Group velocity from the phase slope of `t_EIT` at `Δ = J'`: `Nd / |dφ/dΔ|`.
pub fn group_velocity(chain: &FiberChain, control: &[f64]) -> Result<f64> {
    let resp = Response::new(chain, Some(control))?;
    let omega = control.iter().sum::<f64>() / control.len() as f64;
    let h = 1e-4 * analytic_bandwidth(&chain.constants, chain.len(), omega);
    let j = chain.constants.j_prime;
    let (p, m) = (resp.at(j + h)?.t, resp.at(j - h)?.t);
    let slope = (p / m).arg() / (2.0 * h);
    if slope == 0.0 || !slope.is_finite() {
        return Err(Error::Range("flat transmission phase at the window center".into()));
    }
    Ok(chain.length() / slope.abs())
}

/// Full window width `Δ_EIT = 2Ω_c² √(2/(NΓ_1D(Γ' + ηΓ_1D/2N)))`, `η = N mod 2`,
/// from the second-order expansion of the effective wave vector.
pub fn analytic_bandwidth(constants: &FiberConstants, atoms: usize, omega_c: f64) -> f64 {
    let n = atoms as f64;
    let eta = (atoms % 2) as f64;
    let g = constants.gamma_prime + eta * constants.gamma_1d / (2.0 * n);
    2.0 * omega_c * omega_c * (2.0 / (n * constants.gamma_1d * g)).sqrt()
}

/// Delay time `τ = NΓ_1D / 2Ω_c²`.
pub fn delay_time(constants: &FiberConstants, atoms: usize, omega_c: f64) -> f64 {
    atoms as f64 * constants.gamma_1d / (2.0 * omega_c * omega_c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    /// Full width between the two `|t|² = 1/e` crossings.
    pub delta_eit: f64,
    /// Crossing above the center, as an offset from `J'`.
    pub upper: f64,
    /// Crossing below the center, as an offset from `J'` (negative).
    pub lower: f64,
    pub delay: f64,
    /// `τ Δ_EIT`.
    pub product: f64,
}

/// Walks out from `J'` until `|t|² < 1/e`, then bisects the crossing.
fn crossing(resp: &Response, center: f64, step: f64, max_steps: usize) -> Result<f64> {
    let target = (-1.0f64).exp();
    let below = |x: f64| -> Result<bool> { Ok(resp.at(center + x)?.transmission < target) };
    let mut prev = 0.0;
    for s in 1..=max_steps {
        let x = step * s as f64;
        if below(x)? {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if below(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = x;
    }
    Err(Error::Range(format!(
        "transparency window edge not found within {} of the center",
        step * max_steps as f64
    )))
}

/// Bandwidth-delay product with a uniform control `omega_c`.
pub fn bandwidth_delay_product(chain: &FiberChain, omega_c: f64) -> Result<Bandwidth> {
    if !(omega_c > 0.0) {
        return Err(Error::invalid("control amplitude must be positive"));
    }
    let control = vec![omega_c; chain.len()];
    let resp = Response::new(chain, Some(&control))?;
    let step = analytic_bandwidth(&chain.constants, chain.len(), omega_c) / 200.0;
    let center = chain.constants.j_prime;
    let upper = crossing(&resp, center, step, 200_000)?;
    let lower = crossing(&resp, center, -step, 200_000)?;
    let delta_eit = upper - lower;
    let delay = delay_time(&chain.constants, chain.len(), omega_c);
    Ok(Bandwidth { delta_eit, upper, lower, delay, product: delay * delta_eit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinWaveKind {
    /// `c_j ∝ j e^{ik_1D z_j}`, `j = 1..N`.
    OptimalRamp,
    /// `c_j ∝ e^{ik_1D z_j} e^{−(z_j − z_c)²/2σ²}`, `z_c = (N−1)d/2`, `σ = √N d`.
    Gaussian,
}

impl FromStr for SpinWaveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "optimalramp" | "ramp" => Ok(SpinWaveKind::OptimalRamp),
            "gaussian" => Ok(SpinWaveKind::Gaussian),
            other => Err(Error::invalid(format!("unknown spin wave `{other}`"))),
        }
    }
}

/// Normalized storage-state amplitudes for the chosen spin wave.
pub fn initial_spin_wave(kind: SpinWaveKind, chain: &FiberChain) -> Vec<C64> {
    let n = chain.len();
    let d = chain.spacing;
    let z0 = chain.positions[0];
    let zc = z0 + (n as f64 - 1.0) * d / 2.0;
    let sigma = (n as f64).sqrt() * d;
    let c: Vec<C64> = chain
        .phases()
        .into_iter()
        .zip(&chain.positions)
        .enumerate()
        .map(|(j, (w, &z))| match kind {
            SpinWaveKind::OptimalRamp => w * (j + 1) as f64,
            SpinWaveKind::Gaussian => w * (-(z - zc).powi(2) / (2.0 * sigma * sigma)).exp(),
        })
        .collect();
    linalg::normalized(&c)
}

/// `Ω_c(z_j) = base √(N/(N + 1 − j))`, `j = 1..N`.
pub fn ramped_control_profile(atoms: usize, base: f64) -> Result<Vec<f64>> {
    if !(base > 0.0) || !base.is_finite() {
        return Err(Error::invalid(format!("base control amplitude {base} must be positive")));
    }
    let n = atoms as f64;
    Ok((1..=atoms).map(|j| base * (n / (n + 1.0 - j as f64)).sqrt()).collect())
}

/// Hermitian weights whose expectation gives an instantaneous rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Non-guided emission `κ'`.
    Radiative,
    /// Total guided emission `κ_1D`.
    Guided,
    /// Right-going guided emission.
    Right,
    /// Left-going guided emission.
    Left,
}

/// `2N × 2N` rate operator supported on the excited block.
fn rate_operator(chain: &FiberChain, channel: Channel) -> CMat {
    let n = chain.len();
    let g = 0.5 * chain.constants.gamma_1d;
    let w = chain.phases();
    let block = |i: usize, j: usize| -> C64 {
        match channel {
            Channel::Radiative => I * (chain.radiative[(i, j)] - chain.radiative[(j, i)].conj()),
            Channel::Guided => I * (chain.guided[(i, j)] - chain.guided[(j, i)].conj()),
            Channel::Right => w[i] * w[j].conj() * g,
            Channel::Left => w[i].conj() * w[j] * g,
        }
    };
    Mat::from_fn(2 * n, 2 * n, |i, j| if i < n && j < n { block(i, j) } else { ZERO })
}

/// `(e^{iωt} − 1)/(iω)`, or its `t → ∞` limit `i/ω` when `t` is `None`.
fn growth(omega: C64, t: Option<f64>) -> C64 {
    match t {
        None => I / omega,
        Some(t) => {
            let x = I * omega * t;
            if x.norm() < 1e-6 {
                C64::new(t, 0.0) * (C64::new(1.0, 0.0) + x / 2.0 + x * x / 6.0)
            } else {
                (x.exp() - 1.0) / (I * omega)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Propagation {
    /// Exact exponentials in the eigenbasis, analytic time integrals.
    Spectral,
    /// Fixed-step exponential propagator with Simpson integrals.
    Stepping,
}

/// Sampled retrieval trace and totals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetrievalResult {
    /// `∫κ' dt` over the whole retrieval.
    pub epsilon: f64,
    /// `1 − ∫κ_1D dt`, the same infidelity from the guided side.
    pub epsilon_guided: f64,
    pub right_emission: f64,
    pub left_emission: f64,
    /// Largest `|pop + ∫κ' + ∫κ_1D − 1|` over the samples.
    pub bookkeeping_error: f64,
    /// Population left at the end (zero for the spectral route).
    pub remainder: f64,
    pub method: Propagation,
    pub condition: f64,
    pub times: Vec<f64>,
    /// Decayed fraction `1 − pop(t)`.
    pub tau: Vec<f64>,
    pub kappa_prime: Vec<f64>,
    pub kappa_1d: Vec<f64>,
    /// `|c_e|²` per site at each sample.
    pub excited: Vec<Vec<f64>>,
    /// `|c_s|²` per site at each sample.
    pub storage: Vec<Vec<f64>>,
}

/// Retrieval of a stored spin wave under a static control field.
pub struct Retrieval {
    chain: FiberChain,
    generator: CMat,
    x0: Vec<C64>,
    spectral: Option<Spectral>,
}

struct Spectral {
    values: Vec<C64>,
    vectors: CMat,
    alpha: Vec<C64>,
    condition: f64,
}

impl Retrieval {
    /// `initial` holds the storage amplitudes; the excited states start empty.
    pub fn new(chain: &FiberChain, control: &[f64], initial: &[C64]) -> Result<Retrieval> {
        check_control(chain, control)?;
        let n = chain.len();
        if initial.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: initial.len() });
        }
        let generator = chain.eit_matrix(control, 0.0)?;
        let mut x0 = vec![ZERO; 2 * n];
        x0[n..].copy_from_slice(initial);
        let spectral = match linalg::eig(&generator) {
            Ok(e) => {
                let condition = linalg::condition_estimate(&e.vectors);
                if condition.is_finite() && condition <= DEFECTIVE_CONDITION {
                    let alpha = linalg::solve(&e.vectors, &x0)?;
                    Some(Spectral { values: e.values, vectors: e.vectors, alpha, condition })
                } else {
                    None
                }
            }
            Err(_) => None,
        };
        Ok(Retrieval { chain: chain.clone(), generator, x0, spectral })
    }

    pub fn method(&self) -> Propagation {
        if self.spectral.is_some() {
            Propagation::Spectral
        } else {
            Propagation::Stepping
        }
    }

    pub fn chain(&self) -> &FiberChain {
        &self.chain
    }

    /// State `(c_e, c_s)` at time `t` (spectral route only).
    pub fn state_at(&self, t: f64) -> Result<Vec<C64>> {
        let s = self.spectral.as_ref().ok_or_else(|| Error::Unsupported("state_at on a stepped retrieval".into()))?;
        let coef: Vec<C64> = s.alpha.iter().zip(&s.values).map(|(a, l)| a * (-I * l * t).exp()).collect();
        Ok(linalg::matvec(&s.vectors, &coef))
    }

    /// `∫_0^t x†Mx dt'` in the eigenbasis; `None` integrates to infinity.
    fn spectral_integral(s: &Spectral, m: &CMat, t: Option<f64>) -> f64 {
        let vh = s.vectors.adjoint().to_owned();
        let g = &(&vh * m) * &s.vectors;
        let dim = s.values.len();
        let mut acc = ZERO;
        for a in 0..dim {
            let ca = s.alpha[a].conj();
            if ca == ZERO {
                continue;
            }
            let la = s.values[a].conj();
            for b in 0..dim {
                acc += ca * s.alpha[b] * g[(a, b)] * growth(la - s.values[b], t);
            }
        }
        acc.re
    }

    fn population(x: &[C64]) -> f64 {
        x.iter().map(|v| v.norm_sqr()).sum()
    }

    fn rate(m: &CMat, x: &[C64]) -> f64 {
        linalg::dot(x, &linalg::matvec(m, x)).re
    }

    /// Time at which the population first drops below `level`.
    fn decay_time(&self, level: f64) -> Result<f64> {
        let pop = |t: f64| -> Result<f64> { Ok(Self::population(&self.state_at(t)?)) };
        let rate = self.spectral.as_ref().map(|s| s.values.iter().map(|l| -l.im).fold(0.0, f64::max)).unwrap_or(1.0);
        let mut hi = 1.0 / rate.max(1e-300);
        let mut tries = 0;
        while pop(hi)? > level {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::NoConvergence("population never decays".into()));
            }
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if pop(mid)? > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// Runs the retrieval, sampling `samples` evenly spaced times up to the
    /// point where the population falls below `1e-8`.
    pub fn run(&self, samples: usize) -> Result<RetrievalResult> {
        match &self.spectral {
            Some(s) => self.run_spectral(s, samples),
            None => self.run_stepping(samples),
        }
    }

    fn run_spectral(&self, s: &Spectral, samples: usize) -> Result<RetrievalResult> {
        let n = self.chain.len();
        let m_rad = rate_operator(&self.chain, Channel::Radiative);
        let m_1d = rate_operator(&self.chain, Channel::Guided);
        let epsilon = Self::spectral_integral(s, &m_rad, None);
        let guided = Self::spectral_integral(s, &m_1d, None);
        let right = Self::spectral_integral(s, &rate_operator(&self.chain, Channel::Right), None);
        let left = Self::spectral_integral(s, &rate_operator(&self.chain, Channel::Left), None);

        let t_end = self.decay_time(RESIDUAL_POPULATION)?;
        let times: Vec<f64> = (0..samples.max(2)).map(|i| t_end * i as f64 / (samples.max(2) - 1) as f64).collect();
        let mut out = RetrievalResult {
            epsilon,
            epsilon_guided: 1.0 - guided,
            right_emission: right,
            left_emission: left,
            bookkeeping_error: (epsilon + guided - 1.0).abs(),
            remainder: 0.0,
            method: Propagation::Spectral,
            condition: s.condition,
            times: times.clone(),
            tau: vec![],
            kappa_prime: vec![],
            kappa_1d: vec![],
            excited: vec![],
            storage: vec![],
        };
        // Cumulative integrals on the sample grid for the bookkeeping check.
        let vh = s.vectors.adjoint().to_owned();
        let g_rad = &(&vh * &m_rad) * &s.vectors;
        let g_1d = &(&vh * &m_1d) * &s.vectors;
        let cumulative = |g: &CMat, t: f64| -> f64 {
            let dim = s.values.len();
            let mut acc = ZERO;
            for a in 0..dim {
                let ca = s.alpha[a].conj();
                let la = s.values[a].conj();
                for b in 0..dim {
                    acc += ca * s.alpha[b] * g[(a, b)] * growth(la - s.values[b], Some(t));
                }
            }
            acc.re
        };
        for &t in &times {
            let x = self.state_at(t)?;
            let pop = Self::population(&x);
            out.tau.push(1.0 - pop);
            out.kappa_prime.push(Self::rate(&m_rad, &x));
            out.kappa_1d.push(Self::rate(&m_1d, &x));
            out.excited.push(x[..n].iter().map(|v| v.norm_sqr()).collect());
            out.storage.push(x[n..].iter().map(|v| v.norm_sqr()).collect());
            let closure = pop + cumulative(&g_rad, t) + cumulative(&g_1d, t) - 1.0;
            out.bookkeeping_error = out.bookkeeping_error.max(closure.abs());
        }
        Ok(out)
    }

    /// Exponential propagator with Simpson integration of the rates. Used only
    /// when the generator is too close to defective for the eigenbasis.
    fn run_stepping(&self, samples: usize) -> Result<RetrievalResult> {
        let n = self.chain.len();
        let m_rad = rate_operator(&self.chain, Channel::Radiative);
        let m_1d = rate_operator(&self.chain, Channel::Guided);
        let m_r = rate_operator(&self.chain, Channel::Right);
        let m_l = rate_operator(&self.chain, Channel::Left);
        let scale = max_abs_row_sum(&self.generator).max(1e-12);
        let dt = 0.05 / scale;
        let half = expm(&self.generator, C64::new(0.0, -0.5 * dt));
        let mut x = self.x0.clone();
        let mut t = 0.0;
        let (mut int_rad, mut int_1d, mut int_r, mut int_l) = (0.0, 0.0, 0.0, 0.0);
        let mut trace = vec![(0.0, x.clone(), 0.0, 0.0)];
        let mut worst: f64 = 0.0;
        while Self::population(&x) > RESIDUAL_POPULATION && t < STEPPING_HORIZON {
            let xm = linalg::matvec(&half, &x);
            let x1 = linalg::matvec(&half, &xm);
            let simpson = |m: &CMat| dt / 6.0 * (Self::rate(m, &x) + 4.0 * Self::rate(m, &xm) + Self::rate(m, &x1));
            int_rad += simpson(&m_rad);
            int_1d += simpson(&m_1d);
            int_r += simpson(&m_r);
            int_l += simpson(&m_l);
            x = x1;
            t += dt;
            worst = worst.max((Self::population(&x) + int_rad + int_1d - 1.0).abs());
            trace.push((t, x.clone(), int_rad, int_1d));
        }
        let remainder = Self::population(&x);
        let stride = (trace.len() / samples.max(2)).max(1);
        let mut out = RetrievalResult {
            epsilon: int_rad,
            epsilon_guided: 1.0 - int_1d,
            right_emission: int_r,
            left_emission: int_l,
            bookkeeping_error: worst,
            remainder,
            method: Propagation::Stepping,
            condition: f64::INFINITY,
            times: vec![],
            tau: vec![],
            kappa_prime: vec![],
            kappa_1d: vec![],
            excited: vec![],
            storage: vec![],
        };
        for (t, x, _, _) in trace.iter().step_by(stride) {
            out.times.push(*t);
            out.tau.push(1.0 - Self::population(x));
            out.kappa_prime.push(Self::rate(&m_rad, x));
            out.kappa_1d.push(Self::rate(&m_1d, x));
            out.excited.push(x[..n].iter().map(|v| v.norm_sqr()).collect());
            out.storage.push(x[n..].iter().map(|v| v.norm_sqr()).collect());
        }
        Ok(out)
    }
}

fn max_abs_row_sum(m: &CMat) -> f64 {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(s·A)` by scaling and squaring of a degree-16 Taylor polynomial.
pub fn expm(a: &CMat, s: C64) -> CMat {
    let n = a.nrows();
    let norm = max_abs_row_sum(a) * s.norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let factor = s / 2f64.powi(squarings as i32);
    let b = Mat::from_fn(n, n, |i, j| a[(i, j)] * factor);
    let mut result = Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { ZERO });
    let mut term = result.clone();
    for k in 1..=16 {
        term = &term * &b;
        let inv = 1.0 / k as f64;
        for j in 0..n {
            for i in 0..n {
                term[(i, j)] *= inv;
            }
        }
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Non-guided decay rate by dominant `|k|`, from the eigenmodes of `H'`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiativeRateTable {
    pub k: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl RadiativeRateTable {
    pub fn new(chain: &FiberChain) -> Result<RadiativeRateTable> {
        let e = linalg::eig(&chain.radiative)?;
        let mut rows: Vec<(f64, f64)> = (0..e.values.len())
            .map(|a| {
                let v = linalg::column(&e.vectors, a);
                (spinwave::modes::dominant_k_line(&v, chain.spacing), -2.0 * e.values[a].im)
            })
            .collect();
        rows.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(RadiativeRateTable { k: rows.iter().map(|r| r.0).collect(), gamma: rows.iter().map(|r| r.1).collect() })
    }

    /// Rate of the nearest tabulated `|k|`.
    pub fn at(&self, k: f64) -> f64 {
        let k = k.abs();
        let i = self.k.partition_point(|&x| x < k);
        let pick = match (i.checked_sub(1), self.k.get(i)) {
            (Some(p), Some(&q)) => {
                if (k - self.k[p]) <= (q - k) {
                    p
                } else {
                    i
                }
            }
            (Some(p), None) => p,
            _ => 0,
        };
        self.gamma[pick]
    }
}

/// `(d/2π) ∫_{−1}^{1} Γ'(k)|Σ_j c_j e^{−ikz_j}|² dk` by the midpoint rule.
pub fn fourier_loss(chain: &FiberChain, excited: &[C64], table: &RadiativeRateTable) -> Result<f64> {
    if excited.len() != chain.len() {
        return Err(Error::DimensionMismatch { expected: chain.len(), got: excited.len() });
    }
    let points = (8 * chain.len()).max(400);
    let h = 2.0 / points as f64;
    let mut acc = 0.0;
    for p in 0..points {
        let k = -1.0 + (p as f64 + 0.5) * h;
        let ck: C64 = chain.positions.iter().zip(excited).map(|(&z, &c)| c * C64::from_polar(1.0, -k * z)).sum();
        acc += table.at(k) * ck.norm_sqr();
    }
    Ok(chain.spacing / (2.0 * PI) * acc * h)
}

/// Peak of `|Σ_j c_j e^{−ikz_j}|` over `(−π/d, π/d]`, keeping the sign.
pub fn dominant_k_signed(c: &[C64], positions: &[f64], d: f64) -> f64 {
    let points = spinwave::modes::PADDING * c.len();
    let mut best = (-1.0, 0.0);
    for p in 0..points {
        let k = PI / d * (-1.0 + 2.0 * (p as f64 + 1.0) / points as f64);
        let acc: C64 = positions.iter().zip(c).map(|(&z, &v)| v * C64::from_polar(1.0, -k * z)).sum();
        let a = acc.norm_sqr();
        if a > best.0 * (1.0 + 1e-12) {
            best = (a, k);
        }
    }
    best.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Excited,
    Storage,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeRates {
    pub k: f64,
    pub gamma_1d: f64,
    pub gamma_prime: f64,
    pub branch: Branch,
    pub eigenvalue: C64,
}

/// Partial guided and non-guided decay rates of the eigenmodes of the
/// `2N` system under a uniform control field.
pub fn selective_radiance_spectrum(chain: &FiberChain, omega_c: f64) -> Result<Vec<ModeRates>> {
    let n = chain.len();
    let control = vec![omega_c; n];
    check_control(chain, &control)?;
    let e = linalg::eig(&chain.eit_matrix(&control, 0.0)?)?;
    let mut out = Vec::with_capacity(2 * n);
    for a in 0..2 * n {
        let v = linalg::column(&e.vectors, a);
        let (ve, vs) = v.split_at(n);
        let pe = ve.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let ps = vs.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let total = pe + ps;
        let partial = |m: &CMat| -2.0 * linalg::dot(ve, &linalg::matvec(m, ve)).im / total;
        let branch = if ps > pe { Branch::Storage } else { Branch::Excited };
        let dominant = if ps > pe { vs } else { ve };
        out.push(ModeRates {
            k: dominant_k_signed(dominant, &chain.positions, chain.spacing),
            gamma_1d: partial(&chain.guided),
            gamma_prime: partial(&chain.radiative),
            branch,
            eigenvalue: e.values[a],
        });
    }
    out.sort_by(|x, y| x.k.total_cmp(&y.k));
    Ok(out)
}

/// Largest `Γ_1D/Γ'` on the storage branch.
pub fn max_selective_ratio(modes: &[ModeRates]) -> Option<f64> {
    modes
        .iter()
        .filter(|m| m.branch == Branch::Storage && m.gamma_prime > 0.0)
        .map(|m| m.gamma_1d / m.gamma_prime)
        .fold(None, |acc, r| Some(acc.map_or(r, |a: f64| a.max(r))))
}
