//! Radial–radial Green's function for atoms around a dielectric nanofiber.
//!
//! For atoms at a common radius `ρa` and azimuth, with radial dipoles, the
//! scattered part of `G_ρρ(z)` is a Fourier integral over the axial wave
//! number `k`:
//!
//! ```text
//! G_sc(z) = ∫ F(k) e^{ikz} dk,   F(k) = Σ_m F_m(k),   F_{−m} = F_m
//! ```
//!
//! `F_m` comes from matching the tangential fields at the fiber surface: a
//! 4×4 linear system per `(m, k)` for the interior (`A`, `B`) and scattered
//! (`C`, `D`) amplitudes. `F` is even in `k`, real for `|k| > k0`, and has a
//! simple pole at the guided wave number `±k_1D` (from `m = ±1` only).
//!
//! The pole is handled by subtracting `Res · S(k)` with
//! `S(k) = 2a(a²+b²)/((k²−a²)(k²+b²))`, `a = k_1D`, `b = 1`, whose outgoing
//! Fourier transform is `2πi e^{ia|z|} − 2πa e^{−b|z|}/b`. The first piece is
//! the guided Green's function; the remainder is smooth and decays like `k⁻⁴`,
//! so the non-guided part is
//!
//! ```text
//! G'(z) = G0_ρρ(z) + 2∫_0^∞ [F(k) − Res S(k)] cos(kz) dk − 2πa Res e^{−b|z|}/b
//! ```
//!
//! integrated along the real axis on panels graded toward the branch point
//! `k = k0`, where `F` has a logarithmic singularity.

use crate::bessel;
use crate::quadrature::{graded, Rule};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spinwave::greens::free_space_greens;
use spinwave::{Error, Result};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::RwLock;

/// Relative size of the last angular-momentum term at which the sum stops.
pub const M_TAIL_TOLERANCE: f64 = 1e-8;

/// Version stamp of the JSON coupling cache.
pub const CACHE_VERSION: u32 = 1;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Nanofiber and atom placement, in units of `1/k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub radius: f64,
    pub permittivity: f64,
    pub atom_radius: f64,
    /// Cap on the angular-momentum sum `|m| ≤ m_max`.
    pub m_max: usize,
}

impl Default for FiberSpec {
    /// `k0 r = 1.2`, `ε = 4`, `ρa = 1.5 r`.
    fn default() -> Self {
        FiberSpec { radius: 1.2, permittivity: 4.0, atom_radius: 1.8, m_max: 40 }
    }
}

impl FiberSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::invalid(format!("fiber radius {} must be positive", self.radius)));
        }
        if !(self.permittivity > 1.0) {
            return Err(Error::invalid(format!("permittivity {} must exceed 1", self.permittivity)));
        }
        if !(self.atom_radius > self.radius) {
            return Err(Error::invalid(format!(
                "atoms at ρa = {} must sit outside the fiber (r = {})",
                self.atom_radius, self.radius
            )));
        }
        if self.atom_radius > bessel::Y_MAX_ARG {
            return Err(Error::Unsupported(format!(
                "atom radius {} beyond the supported {}",
                self.atom_radius,
                bessel::Y_MAX_ARG
            )));
        }
        if self.m_max == 0 {
            return Err(Error::invalid("m_max must be at least 1"));
        }
        Ok(())
    }

    fn index(&self) -> f64 {
        self.permittivity.sqrt()
    }
}

/// Regular and outgoing radial functions with their radial derivatives, for
/// all orders up to a cap, at one radius and one `k⊥²`.
struct Radial {
    w: Vec<f64>,
    wr: Vec<f64>,
    v: Vec<C64>,
    vr: Vec<C64>,
    /// Normalization of the outgoing function relative to `H^{(1)}`.
    cn: C64,
}

fn radial(m_max: usize, kap2: f64, rr: f64, outgoing: bool) -> Result<Radial> {
    let n = m_max + 1;
    if kap2 > 0.0 {
        let kap = kap2.sqrt();
        let x = kap * rr;
        let j = bessel::bessel_j(n, x)?;
        let jd = bessel::derivative_jy(&j, x);
        let (v, vr) = if outgoing {
            let y = bessel::bessel_y(n, x)?;
            let yd = bessel::derivative_jy(&y, x);
            (
                (0..n).map(|m| C64::new(j[m], y[m])).collect(),
                (0..n).map(|m| C64::new(jd[m], yd[m]) * kap).collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Radial { w: j[..n].to_vec(), wr: jd.iter().map(|d| d * kap).collect(), v, vr, cn: c(1.0) })
    } else {
        let q = (-kap2).sqrt();
        let x = q * rr;
        let i = bessel::bessel_i(n, x)?;
        let id = bessel::derivative_i(&i, x);
        let (v, vr) = if outgoing {
            let k = bessel::bessel_k(n, x)?;
            let kd = bessel::derivative_k(&k, x);
            (
                (0..n).map(|m| c(k[m])).collect(),
                (0..n).map(|m| c(kd[m] * q)).collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Radial {
            w: i[..n].to_vec(),
            wr: id.iter().map(|d| d * q).collect(),
            v,
            vr,
            cn: C64::new(0.0, -2.0 / PI),
        })
    }
}

/// Gaussian elimination with partial pivoting on a 4×4 system; returns the
/// solution and the determinant.
fn solve4(mut a: [[C64; 4]; 4], mut b: [C64; 4]) -> Option<([C64; 4], C64)> {
    let mut det = c(1.0);
    for col in 0..4 {
        let piv = (col..4).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))?;
        if a[piv][col].norm() == 0.0 || !a[piv][col].norm().is_finite() {
            return None;
        }
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in (col + 1)..4 {
            let f = a[r][col] / a[col][col];
            for k in col..4 {
                let t = a[col][k];
                a[r][k] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = [c(0.0); 4];
    for r in (0..4).rev() {
        let mut s = b[r];
        for k in (r + 1)..4 {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    Some((x, det))
}

/// Radial functions needed at one axial wave number.
struct ModeSet {
    k: f64,
    inside: Radial,
    surface: Radial,
    atoms: Radial,
}

impl ModeSet {
    fn new(fiber: &FiberSpec, k: f64, m_max: usize) -> Result<ModeSet> {
        let k1 = fiber.permittivity - k * k;
        let k2 = 1.0 - k * k;
        if k1 == 0.0 || k2 == 0.0 {
            return Err(Error::Singular(format!("k = {k} sits on a branch point")));
        }
        Ok(ModeSet {
            k,
            inside: radial(m_max, k1, fiber.radius, false)?,
            surface: radial(m_max, k2, fiber.radius, true)?,
            atoms: radial(m_max, k2, fiber.atom_radius, true)?,
        })
    }

    /// Boundary system for order `m`: matrix and right-hand side.
    fn system(&self, fiber: &FiberSpec, m: usize) -> ([[C64; 4]; 4], [C64; 4]) {
        let k = self.k;
        let eps = fiber.permittivity;
        let k1 = c(eps - k * k);
        let k2 = c(1.0 - k * k);
        let (u, ur) = (c(self.inside.w[m]), c(self.inside.wr[m]));
        let (w, wr) = (c(self.surface.w[m]), c(self.surface.wr[m]));
        let (v, vr) = (self.surface.v[m], self.surface.vr[m]);
        let (va, var) = (self.atoms.v[m], self.atoms.vr[m]);
        let cn = self.surface.cn;
        let mf = m as f64;
        // Incident field of a radial unit dipole at ρa, expanded around the axis.
        let e = -I * k * cn * var;
        let h = -(mf / fiber.atom_radius) * cn * va;
        let a = I * k * mf / fiber.radius;
        let z = c(0.0);
        let mat = [
            [u, z, -v, z],
            [z, u, z, -v],
            [a * u / k1, -ur / k1, -a * v / k2, vr / k2],
            [eps * ur / k1, a * u / k1, -vr / k2, -a * v / k2],
        ];
        let rhs = [e * w, h * w, (a * e * w - h * wr) / k2, (a * h * w + e * wr) / k2];
        (mat, rhs)
    }

    fn integrand(&self, fiber: &FiberSpec, m: usize) -> Result<C64> {
        let (mut mat, rhs) = self.system(fiber, m);
        // Near the light line the outgoing functions reach ~1e160 at high
        // order; scaling their columns keeps the elimination finite.
        let big = (2..4).flat_map(|j| (0..4).map(move |i| (i, j))).map(|(i, j)| mat[i][j].norm()).fold(0.0, f64::max);
        let scale = if big > 1.0 { 1.0 / big } else { 1.0 };
        for row in mat.iter_mut() {
            row[2] *= scale;
            row[3] *= scale;
        }
        let (mut x, _) = solve4(mat, rhs).ok_or_else(|| {
            Error::Singular(format!("boundary system singular at m = {m}, k = {}", self.k))
        })?;
        x[2] *= scale;
        x[3] *= scale;
        let k2 = 1.0 - self.k * self.k;
        let (va, var) = (self.atoms.v[m], self.atoms.vr[m]);
        let er = I / k2 * (self.k * x[2] * var + I * (m as f64 / fiber.atom_radius) * x[3] * va);
        let out = I / (8.0 * PI) * er;
        if !out.is_finite() {
            return Err(Error::Range(format!("non-finite mode integrand at m = {m}, k = {}", self.k)));
        }
        Ok(out)
    }
}

/// `F_m(k)` for one angular momentum (`F_{−m} = F_m`), with `k` real and off
/// the branch points `±k0`, `±√ε k0`.
pub fn mode_integrand(m: i32, k: f64, fiber: &FiberSpec) -> Result<C64> {
    fiber.validate()?;
    let m = m.unsigned_abs() as usize;
    ModeSet::new(fiber, k, m)?.integrand(fiber, m)
}

/// `F(k) = Σ_m F_m(k)`, truncated once a term falls below
/// `M_TAIL_TOLERANCE` of the running sum twice in a row. Returns the sum and
/// the highest order used.
pub fn spectral_density(k: f64, fiber: &FiberSpec) -> Result<(C64, usize)> {
    let set = ModeSet::new(fiber, k, fiber.m_max)?;
    let mut sum = set.integrand(fiber, 0)?;
    let mut small = 0;
    for m in 1..=fiber.m_max {
        let t = set.integrand(fiber, m)? * 2.0;
        sum += t;
        if t.norm() <= M_TAIL_TOLERANCE * sum.norm() || t.norm() < 1e-18 {
            small += 1;
            if small == 2 {
                return Ok((sum, m));
            }
        } else {
            small = 0;
        }
    }
    Ok((sum, fiber.m_max))
}

/// Determinant of the `m = 1` boundary system; its real root on
/// `(k0, √ε k0)` is the guided wave number.
pub fn pole_determinant(k: f64, fiber: &FiberSpec) -> Result<C64> {
    let set = ModeSet::new(fiber, k, 1)?;
    let (mat, rhs) = set.system(fiber, 1);
    solve4(mat, rhs)
        .map(|(_, d)| d)
        .ok_or_else(|| Error::Singular(format!("m = 1 system degenerate at k = {k}")))
}

/// Guided wave number `k_1D` of the fundamental mode.
pub fn guided_pole(fiber: &FiberSpec) -> Result<f64> {
    fiber.validate()?;
    let lo = 1.0;
    let hi = fiber.index();
    let samples = 400;
    let f = |k: f64| pole_determinant(k, fiber).map(|d| d.re);
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..samples {
        let k = lo + (hi - lo) * i as f64 / samples as f64;
        let v = f(k)?;
        if let Some((kp, vp)) = prev {
            if vp.signum() != v.signum() {
                roots.push((kp, k));
            }
        }
        prev = Some((k, v));
    }
    // Sign changes through a pole of the determinant are not roots: keep
    // only brackets whose refined value is small.
    let mut found = Vec::new();
    for (mut a, mut b) in roots {
        let mut fa = f(a)?;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = f(mid)?;
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
            if b - a < 1e-14 * b {
                break;
            }
        }
        // Secant polish from the bracket ends.
        let (fa, fb) = (f(a)?, f(b)?);
        let root = if fb != fa { a - fa * (b - a) / (fb - fa) } else { 0.5 * (a + b) };
        let root = root.clamp(a, b);
        let scale = f(root - 1e-3)?.abs().max(f(root + 1e-3)?.abs());
        if f(root)?.abs() < 1e-8 * scale {
            found.push(root);
        }
    }
    match found.as_slice() {
        [k] => Ok(*k),
        [] => Err(Error::Unsupported(format!(
            "no guided-mode root of the m = 1 determinant on ({lo}, {hi}); fiber not single-mode"
        ))),
        many => Err(Error::Unsupported(format!(
            "{} roots of the m = 1 determinant on ({lo}, {hi}): {many:?}",
            many.len()
        ))),
    }
}

/// Residue of `F` at `k = k_1D`, by symmetric differences with one
/// Richardson step.
pub fn guided_residue(fiber: &FiberSpec, k_1d: f64) -> Result<f64> {
    let f = |k: f64| mode_integrand(1, k, fiber).map(|v| v * 2.0);
    let est = |h: f64| -> Result<C64> { Ok((f(k_1d + h)? - f(k_1d - h)?) * (0.5 * h)) };
    let h = 1e-3 * (k_1d - 1.0).min(fiber.index() - k_1d);
    let r = (est(0.5 * h)? * 4.0 - est(h)?) / 3.0;
    if r.im.abs() > 1e-6 * r.re.abs() {
        return Err(Error::NoConvergence(format!("residue has imaginary part {r}")));
    }
    Ok(r.re)
}

/// `S(k)`: the pole-subtraction profile with unit residue at `k = a`.
fn subtraction(k: f64, a: f64) -> f64 {
    let b = 1.0;
    2.0 * a * (a * a + b * b) / ((k * k - a * a) * (k * k + b * b))
}

/// Single-atom constants of the guided and non-guided channels (units `Γ0`, `k0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberConstants {
    pub k_1d: f64,
    /// Residue of the spectral density at `k_1D`.
    pub residue: f64,
    pub gamma_1d: f64,
    pub gamma_prime: f64,
    pub j_prime: f64,
}

impl FiberConstants {
    /// Optical depth `D = 2NΓ_1D/Γ'`.
    pub fn optical_depth(&self, atoms: usize) -> f64 {
        2.0 * atoms as f64 * self.gamma_1d / self.gamma_prime
    }

    pub fn guided_wavelength(&self) -> f64 {
        2.0 * PI / self.k_1d
    }
}

/// Tabulated `F(k) − Res S(k)` on a fixed rule, valid for `|z| ≤ z_max`.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    pub rule: Rule,
    pub values: Vec<C64>,
    pub z_max: f64,
    /// Largest `k` at which `F` itself was evaluated.
    pub k_cut: f64,
}

/// Panel layout: graded toward `k0` on both sides, breakpoints at `k_1D` and
/// `√ε`, uniform panels no wider than `min(0.05, π/z_max)` elsewhere.
fn table_rule(fiber: &FiberSpec, k_1d: f64, z_max: f64, levels: u32) -> (Rule, f64) {
    let width = (PI / z_max.max(1.0)).min(0.05);
    // F falls off like exp(−2q(ρa − r)) for k beyond the light line.
    let gap = fiber.atom_radius - fiber.radius;
    let q = (40.0 / (2.0 * gap)).min(bessel::IK_MAX_ARG / fiber.atom_radius * 0.9);
    let k_cut = (1.0 + q * q).sqrt().max(fiber.index() + 1.0);
    let k_end = k_cut.max(100.0);
    let mut breaks = graded(0.0, 1.0, levels);
    let mut upper = graded(k_1d, 1.0, levels);
    upper.reverse();
    breaks.extend(upper);
    breaks.extend([fiber.index(), k_cut, k_end]);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    (Rule::panels(&breaks, 10, width), k_cut)
}

impl SpectralTable {
    pub fn build(fiber: &FiberSpec, k_1d: f64, residue: f64, z_max: f64) -> Result<SpectralTable> {
        Self::build_with(fiber, k_1d, residue, z_max, 30)
    }

    /// `levels` sets the depth of the geometric grading toward `k0`.
    pub fn build_with(fiber: &FiberSpec, k_1d: f64, residue: f64, z_max: f64, levels: u32) -> Result<SpectralTable> {
        let (rule, k_cut) = table_rule(fiber, k_1d, z_max, levels);
        let values = rule
            .nodes
            .par_iter()
            .map(|&k| {
                let s = residue * subtraction(k, k_1d);
                if k > k_cut {
                    return Ok(c(-s));
                }
                let (f, _) = spectral_density(k, fiber)?;
                Ok(f - s)
            })
            .collect::<Result<Vec<C64>>>()?;
        Ok(SpectralTable { rule, values, z_max, k_cut })
    }

    /// `2∫_0^∞ [F − Res S] cos(kz) dk`.
    pub fn transform(&self, z: f64) -> C64 {
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.values)
            .map(|((&k, &w), &v)| v * (2.0 * w * (k * z).cos()))
            .sum()
    }
}

/// Fiber with its guided-mode constants and a spectral table, plus a memo of
/// non-guided couplings by separation.
#[derive(Debug)]
pub struct FiberModel {
    pub spec: FiberSpec,
    pub constants: FiberConstants,
    table: SpectralTable,
    memo: RwLock<HashMap<u64, C64>>,
}

impl FiberModel {
    /// Locates the pole, builds the table for separations up to `z_max` and
    /// evaluates the single-atom constants.
    pub fn new(spec: FiberSpec, z_max: f64) -> Result<FiberModel> {
        spec.validate()?;
        if !(z_max >= 0.0) || !z_max.is_finite() {
            return Err(Error::invalid(format!("z_max = {z_max} must be finite and non-negative")));
        }
        let k_1d = guided_pole(&spec)?;
        let residue = guided_residue(&spec, k_1d)?;
        let table = SpectralTable::build(&spec, k_1d, residue, z_max)?;
        let g0 = table.transform(0.0) - c(2.0 * PI * k_1d * residue);
        let constants = FiberConstants {
            k_1d,
            residue,
            gamma_1d: 12.0 * PI * PI * residue,
            gamma_prime: 1.0 + 6.0 * PI * g0.im,
            j_prime: -3.0 * PI * g0.re,
        };
        Ok(FiberModel { spec, constants, table, memo: RwLock::new(HashMap::new()) })
    }

    pub fn table(&self) -> &SpectralTable {
        &self.table
    }

    pub fn z_max(&self) -> f64 {
        self.table.z_max
    }

    /// Guided Hamiltonian element `−i(Γ_1D/2) e^{ik_1D|z|}`.
    pub fn guided(&self, z: f64) -> C64 {
        C64::from_polar(1.0, self.constants.k_1d * z.abs()) * C64::new(0.0, -0.5 * self.constants.gamma_1d)
    }

    /// Non-guided Green's function `G'_ρρ(z)`; the vacuum self term keeps
    /// only its imaginary part.
    pub fn radiative_greens(&self, z: f64) -> Result<C64> {
        let z = z.abs();
        if z > self.table.z_max * (1.0 + 1e-12) {
            return Err(Error::Range(format!(
                "separation {z} beyond the tabulated range {}",
                self.table.z_max
            )));
        }
        let a = self.constants.k_1d;
        let sc = self.table.transform(z) - c(2.0 * PI * a * self.constants.residue * (-z).exp());
        let g0 = if z < spinwave::greens::MIN_SEPARATION {
            C64::new(0.0, 1.0 / (6.0 * PI))
        } else {
            free_space_greens([0.0, 0.0, z])?.0[0][0]
        };
        Ok(g0 + sc)
    }

    /// Non-guided Hamiltonian element `−3π G'_ρρ(z)`; equals `J' − iΓ'/2` at `z = 0`.
    pub fn radiative(&self, z: f64) -> Result<C64> {
        let key = z.abs().to_bits();
        if let Some(v) = self.memo.read().ok().and_then(|m| m.get(&key).copied()) {
            return Ok(v);
        }
        let v = self.radiative_greens(z)? * -3.0 * PI;
        if let Ok(mut m) = self.memo.write() {
            m.entry(key).or_insert(v);
        }
        Ok(v)
    }

    /// Couplings at the given separations, evaluated in parallel.
    pub fn couplings(&self, separations: &[f64]) -> Result<FiberCouplings> {
        let mut seps: Vec<f64> = separations.iter().map(|z| z.abs()).collect();
        seps.sort_by(f64::total_cmp);
        seps.dedup();
        let radiative = seps.par_iter().map(|&z| self.radiative(z)).collect::<Result<Vec<_>>>()?;
        let guided = seps.iter().map(|&z| self.guided(z)).collect();
        Ok(FiberCouplings {
            version: CACHE_VERSION,
            spec: self.spec,
            constants: self.constants,
            separations: seps,
            guided,
            radiative,
        })
    }

    /// Total single-atom decay from the spectral route:
    /// `Γ_tot = 6π[∫_{−1}^{1}(F0 + Im F) dk + 2π Res]`, with `F0` the vacuum
    /// spectral density. Independent of the closed-form vacuum term.
    pub fn total_decay_spectral(&self) -> Result<f64> {
        let mut b = graded(0.0, 1.0, 30);
        b.dedup();
        let rule = Rule::panels(&b, 10, 0.05);
        let mut acc = 0.0;
        for (&k, &w) in rule.nodes.iter().zip(&rule.weights) {
            let (f, _) = spectral_density(k, &self.spec)?;
            acc += w * (vacuum_density(k, self.spec.atom_radius)? + f.im);
        }
        Ok(6.0 * PI * (2.0 * acc + 2.0 * PI * self.constants.residue))
    }
}

/// Spectral density of `Im G0_ρρ` along the axis at radius `ρa`, for `|k| < 1`.
pub fn vacuum_density(k: f64, atom_radius: f64) -> Result<f64> {
    let x = (1.0 - k * k).sqrt() * atom_radius;
    let m_max = 40;
    let j = bessel::bessel_j(m_max + 1, x)?;
    let jd = bessel::derivative_jy(&j, x);
    let mut s = k * k * jd[0] * jd[0];
    for m in 1..=m_max {
        let mf = m as f64;
        s += 2.0 * (k * k * jd[m] * jd[m] + mf * mf * j[m] * j[m] / (x * x));
    }
    Ok(s / (8.0 * PI))
}

/// Guided and non-guided couplings by separation (Hamiltonian elements in `Γ0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberCouplings {
    pub version: u32,
    pub spec: FiberSpec,
    pub constants: FiberConstants,
    pub separations: Vec<f64>,
    pub guided: Vec<C64>,
    pub radiative: Vec<C64>,
}

impl FiberCouplings {
    pub fn lookup(&self, z: f64) -> Option<(C64, C64)> {
        let z = z.abs();
        let i = self.separations.partition_point(|&s| s < z - 1e-12 * z.max(1.0));
        let s = *self.separations.get(i)?;
        ((s - z).abs() <= 1e-12 * z.max(1.0)).then(|| (self.guided[i], self.radiative[i]))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::invalid(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
    }

    /// Loads a cache file, rejecting other versions or fibers.
    pub fn load(path: &Path, spec: &FiberSpec) -> Result<FiberCouplings> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        let c: FiberCouplings = serde_json::from_str(&text).map_err(|e| Error::invalid(e.to_string()))?;
        if c.version != CACHE_VERSION {
            return Err(Error::invalid(format!("cache version {} (expected {CACHE_VERSION})", c.version)));
        }
        if c.spec != *spec {
            return Err(Error::invalid("cache built for a different fiber"));
        }
        Ok(c)
    }
}

/// Couplings for the given separations with a model sized to their maximum.
pub fn fiber_couplings(separations: &[f64], fiber: &FiberSpec) -> Result<FiberCouplings> {
    if separations.iter().any(|z| !(*z >= 0.0)) {
        return Err(Error::invalid("separations must be non-negative"));
    }
    let z_max = separations.iter().cloned().fold(0.0, f64::max);
    FiberModel::new(*fiber, z_max)?.couplings(separations)
}
