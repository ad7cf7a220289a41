use std::f64::consts::PI;

use spinwave::geometry::build_fiber_chain;
use spinwave_fiber::dynamics::{
    analytic_group_velocity, bandwidth_delay_product, group_velocity,
    independent_transmission_estimate, initial_spin_wave, max_selective_ratio, mirror_closed_form,
    mirror_transport, ramped_control_profile, selective_radiance_spectrum, spectrum_extremes,
    Branch, EmissionModel, FiberChain, Response, Retrieval, SpinWaveKind,
};
use spinwave_fiber::greens::{FiberModel, FiberSpec};

use super::{counts, exponential, fixed_prefactor, power};
use crate::config::Params;
use crate::error::{CliError, Context, Result};
use crate::output::{Cell, Outcome, Table};
use crate::sweep::Runner;

fn spec(p: &Params) -> FiberSpec {
    FiberSpec {
        radius: p.float("radius"),
        permittivity: p.float("permittivity"),
        atom_radius: p.float("atom_radius"),
        ..FiberSpec::default()
    }
}

fn emission(p: &Params) -> EmissionModel {
    p.text("model").parse().expect("validated emission model")
}

/// Fiber model whose coupling table covers chains up to `atoms` long at
/// `spacing` guided wavelengths.
fn model(p: &Params, atoms: usize, spacing: f64) -> Result<(FiberModel, f64)> {
    // The guided wavelength is needed before the table size is known.
    let k_1d = FiberModel::new(spec(p), 0.0)
        .in_module("greens-fiber")?
        .constants
        .k_1d;
    let d = spacing * 2.0 * PI / k_1d;
    let z_max = (atoms.max(2) - 1) as f64 * d + 1.0;
    Ok((
        FiberModel::new(spec(p), z_max).in_module("greens-fiber")?,
        d,
    ))
}

fn chain(fiber: &FiberModel, atoms: usize, d: f64, m: EmissionModel) -> Result<FiberChain> {
    let array = build_fiber_chain(atoms, d).in_module("geometry")?;
    match m {
        EmissionModel::Independent => FiberChain::independent(&array, fiber.constants),
        EmissionModel::Collective => FiberChain::new(&array, fiber, m),
    }
    .in_module("fiber-dynamics")
}

pub fn constants(p: &Params) -> Result<Outcome> {
    let fiber = FiberModel::new(spec(p), 0.0).in_module("greens-fiber")?;
    let k = fiber.constants;
    let total = fiber.total_decay_spectral().in_module("greens-fiber")?;
    let mut t = Table::new("constants", &["quantity", "value"]);
    let mut out = Outcome::default();
    for (name, v) in [
        ("k_1D", k.k_1d),
        ("Gamma_1D", k.gamma_1d),
        ("Gamma_prime", k.gamma_prime),
        ("J_prime", k.j_prime),
        ("residue", k.residue),
        ("total_decay_spectral", total),
    ] {
        t.push(vec![name.into(), v.into()]);
        out.record(name, v);
    }
    out.record("total_decay_mismatch", total - k.gamma_1d - k.gamma_prime);
    out.tables.push(t);
    Ok(out)
}

pub fn transport(p: &Params) -> Result<Outcome> {
    let n = p.int("N");
    let (fiber, d) = model(p, n, p.float("spacing"))?;
    let m = emission(p);
    let c = chain(&fiber, n, d, m)?;
    let k = fiber.constants;
    let resp = Response::new(&c, None).in_module("fiber-dynamics")?;
    let (hw, points) = (p.float("half_width"), p.int("points").max(2));
    let mut t = Table::new("spectrum", &["delta", "T", "R", "kappa", "T_dilute"]);
    let (mut t_min, mut k_min, mut dev) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for i in 0..points {
        let delta = k.j_prime - hw + 2.0 * hw * i as f64 / (points - 1) as f64;
        let r = resp.at(delta).in_module("fiber-dynamics")?;
        let est = independent_transmission_estimate(&k, n, delta);
        t.push(vec![
            delta.into(),
            r.transmission.into(),
            r.reflection.into(),
            r.loss.into(),
            est.into(),
        ]);
        t_min = t_min.min(r.transmission);
        k_min = k_min.min(r.loss);
        dev = dev.max((r.transmission - est).abs());
    }
    let mut out = Outcome::default();
    out.record("spacing", d);
    out.record("T_min", t_min);
    out.record("kappa_min", k_min);
    out.record("dilute_max_deviation", dev);
    out.tables.push(t);
    Ok(out)
}

pub fn mirror(p: &Params, runner: &Runner) -> Result<Outcome> {
    let sizes = p.ints("sizes");
    let (fiber, d) = model(p, sizes.iter().copied().max().unwrap_or(1), 0.5)?;
    let m = emission(p);
    let (hw, points) = (p.float("half_width"), p.int("points"));
    let rows = runner.sweep("mirror", &sizes, |&n| {
        let e =
            spectrum_extremes(&chain(&fiber, n, d, m)?, hw, points).in_module("fiber-dynamics")?;
        // The independent chain must reproduce the closed form everywhere.
        let ind = chain(&fiber, n, d, EmissionModel::Independent)?;
        let mut dev = 0.0f64;
        for i in 0..=100 {
            let delta = fiber.constants.j_prime - hw + 2.0 * hw * i as f64 / 100.0;
            let r = mirror_transport(&ind, delta, 1.0).in_module("fiber-dynamics")?;
            let (t, rr) = mirror_closed_form(&fiber.constants, n, delta);
            dev = dev
                .max((r.transmission - t).abs())
                .max((r.reflection - rr).abs());
        }
        Ok((e, dev))
    })?;
    let mut t = Table::new(
        "mirror",
        &[
            "N",
            "T_min",
            "delta_T",
            "one_minus_R_min",
            "delta_R",
            "kappa_min",
            "delta_kappa",
            "closed_form_deviation",
        ],
    );
    for (n, (e, dev)) in sizes.iter().zip(&rows) {
        t.push(vec![
            (*n).into(),
            e.min_transmission.into(),
            e.delta_transmission.into(),
            e.min_unreflected.into(),
            e.delta_reflection.into(),
            e.min_loss.into(),
            e.delta_loss.into(),
            (*dev).into(),
        ]);
    }
    let mut out = Outcome::default();
    let x = counts(&sizes);
    for (name, col) in [
        ("T", "T_min"),
        ("one_minus_R", "one_minus_R_min"),
        ("kappa", "kappa_min"),
    ] {
        if let Some(f) = power(&x, &t.column(col))? {
            out.record(&format!("{name}_exponent"), f.exponent);
        }
    }
    out.record(
        "closed_form_max_deviation",
        rows.iter().map(|r| r.1).fold(0.0, f64::max),
    );
    out.tables.push(t);
    Ok(out)
}

pub fn eit(p: &Params, runner: &Runner) -> Result<Outcome> {
    let sizes = p.ints("sizes");
    let (fiber, d) = model(
        p,
        sizes.iter().copied().max().unwrap_or(1),
        p.float("spacing"),
    )?;
    let (m, omega) = (emission(p), p.float("omega_c"));
    let rows = runner.sweep("eit", &sizes, |&n| {
        let c = chain(&fiber, n, d, m)?;
        let b = bandwidth_delay_product(&c, omega).in_module("fiber-dynamics")?;
        let v = group_velocity(&c, &vec![omega; n]).in_module("fiber-dynamics")?;
        Ok((b, v))
    })?;
    let mut t = Table::new(
        "eit",
        &[
            "N",
            "delta_eit",
            "delay",
            "product",
            "product_over_sqrt_N",
            "v_g",
            "v_g_analytic",
        ],
    );
    for (n, (b, v)) in sizes.iter().zip(&rows) {
        t.push(vec![
            (*n).into(),
            b.delta_eit.into(),
            b.delay.into(),
            b.product.into(),
            (b.product / (*n as f64).sqrt()).into(),
            (*v).into(),
            analytic_group_velocity(&fiber.constants, omega, d).into(),
        ]);
    }
    let mut out = Outcome::default();
    let (x, y) = (counts(&sizes), t.column("product"));
    if let Some(f) = power(&x, &y)? {
        out.record("exponent", f.exponent);
        out.record("r_squared", f.r_squared);
    }
    out.record("sqrt_prefactor", fixed_prefactor(&x, &y, 0.5));
    out.record("linear_prefactor", fixed_prefactor(&x, &y, 1.0));
    out.record(
        "sqrt_prefactor_expected",
        (2.0 * fiber.constants.gamma_1d / fiber.constants.gamma_prime).sqrt(),
    );
    out.tables.push(t);
    Ok(out)
}

pub fn storage(p: &Params, runner: &Runner) -> Result<Outcome> {
    let sizes = p.ints("sizes");
    let (fiber, d) = model(
        p,
        sizes.iter().copied().max().unwrap_or(1),
        p.float("spacing"),
    )?;
    let m = emission(p);
    let kind = match p.text("spin_wave") {
        "gaussian" => SpinWaveKind::Gaussian,
        _ => SpinWaveKind::OptimalRamp,
    };
    let ramped = p.text("profile") == "ramped";
    let rows = runner.sweep("storage", &sizes, |&n| {
        let c = chain(&fiber, n, d, m)?;
        let control = if ramped {
            ramped_control_profile(n, p.float("ramp_base")).in_module("fiber-dynamics")?
        } else {
            vec![p.float("omega_c"); n]
        };
        let r = Retrieval::new(&c, &control, &initial_spin_wave(kind, &c))
            .in_module("fiber-dynamics")?;
        let out = r.run(4).in_module("fiber-dynamics")?;
        Ok((
            out.epsilon,
            out.epsilon_guided,
            out.right_emission,
            out.left_emission,
            out.bookkeeping_error,
            out.remainder,
            out.condition,
        ))
    })?;
    let mut t = Table::new(
        "retrieval",
        &[
            "N",
            "epsilon",
            "epsilon_guided",
            "right",
            "left",
            "bookkeeping_error",
            "remainder",
            "condition",
        ],
    );
    for (n, r) in sizes.iter().zip(&rows) {
        t.push(vec![
            (*n).into(),
            r.0.into(),
            r.1.into(),
            r.2.into(),
            r.3.into(),
            r.4.into(),
            r.5.into(),
            Cell::Float(r.6),
        ]);
    }
    let mut out = Outcome::default();
    let (x, eps) = (counts(&sizes), t.column("epsilon"));
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::Degenerate(
            "retrieval error is not positive".into(),
        ));
    }
    if let Some(f) = power(&x, &eps)? {
        out.record("power_exponent", f.exponent);
        out.record("power_prefactor", f.prefactor);
        out.record("power_r_squared", f.r_squared);
    }
    if let Some(f) = exponential(&x, &eps)? {
        out.record("decay_constant", f.decay_constant);
        out.record("exponential_r_squared", f.r_squared);
    }
    out.record("inverse_prefactor", fixed_prefactor(&x, &eps, -1.0));
    out.record(
        "max_bookkeeping_error",
        rows.iter().map(|r| r.4).fold(0.0, f64::max),
    );
    out.tables.push(t);
    Ok(out)
}

pub fn selective_radiance(p: &Params, runner: &Runner) -> Result<Outcome> {
    let sizes = p.ints("sizes");
    let (fiber, d) = model(
        p,
        sizes.iter().copied().max().unwrap_or(1),
        p.float("spacing"),
    )?;
    let omega = p.float("omega_c");
    let spectra = runner.sweep("selective", &sizes, |&n| {
        let c = chain(&fiber, n, d, EmissionModel::Collective)?;
        selective_radiance_spectrum(&c, omega).in_module("fiber-dynamics")
    })?;
    let mut t = Table::new("max_ratio", &["N", "max_ratio", "ratio_over_N2"]);
    let mut ratios = Vec::new();
    for (n, s) in sizes.iter().zip(&spectra) {
        let r = max_selective_ratio(s)
            .ok_or_else(|| CliError::Degenerate(format!("no storage-branch modes at N = {n}")))?;
        t.push(vec![
            (*n).into(),
            r.into(),
            (r / (*n as f64).powi(2)).into(),
        ]);
        ratios.push(r);
    }
    let mut modes = Table::new("modes", &["k", "Gamma_1D", "Gamma_prime", "branch"]);
    if let Some(s) = spectra.last() {
        for m in s {
            let branch = if m.branch == Branch::Storage {
                "storage"
            } else {
                "excited"
            };
            modes.push(vec![
                m.k.into(),
                m.gamma_1d.into(),
                m.gamma_prime.into(),
                branch.into(),
            ]);
        }
    }
    let mut out = Outcome::default();
    let x = counts(&sizes);
    if let Some(f) = power(&x, &ratios)? {
        out.record("exponent", f.exponent);
        out.record("r_squared", f.r_squared);
    }
    out.record("quadratic_prefactor", fixed_prefactor(&x, &ratios, 2.0));
    out.tables.push(t);
    out.tables.push(modes);
    Ok(out)
}
