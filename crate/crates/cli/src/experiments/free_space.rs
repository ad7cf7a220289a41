use std::f64::consts::TAU;

use spinwave::ansatz::{
    ansatz_state, bosonic_state, expectation_decay, fermionic_ansatz, overlap_error,
    state_decay_rate,
};
use spinwave::bands::band_1d;
use spinwave::field::{field_intensity_map, plane_grid};
use spinwave::geometry::{build_chain, build_defect_chain, build_ring, build_square, Polarization};
use spinwave::greens::free_space_couplings;
use spinwave::hamiltonian::{
    binomial, build_block_hamiltonian, free_space_hamiltonian, SingleParticle, DENSE_LIMIT,
};
use spinwave::modes::{eigenmodes, DominantK, EigenMode};
use spinwave::sparse::{most_subradiant, BlockOperator};
use spinwave::{AtomArray, C64};

use super::{counts, exponential, power};
use crate::config::Params;
use crate::error::{CliError, Context, Result};
use crate::output::{Cell, Outcome, Table};
use crate::sweep::Runner;

fn pol(p: &Params) -> Polarization {
    p.text("pol").parse().expect("validated polarization")
}

/// Lattice constant in `1/k0` from a value in units of `λ0`.
fn lambda(d: f64) -> f64 {
    d * TAU
}

fn modes_of(array: &AtomArray, label: bool) -> Result<Vec<EigenMode>> {
    let h = free_space_hamiltonian(array).in_module("spin-model")?;
    eigenmodes(&h, label.then_some(array)).in_module("spin-model")
}

pub fn bands(p: &Params) -> Result<Outcome> {
    let d = lambda(p.float("d"));
    let points = band_1d(d, pol(p), p.int("points")).in_module("analytic-bands")?;
    let mut t = Table::new("band", &["k", "J", "Gamma"]);
    for b in &points {
        t.push(vec![b.k.into(), b.shift.into(), b.decay.into()]);
    }
    let mut out = Outcome::default();
    let finite: Vec<f64> = points
        .iter()
        .map(|b| b.shift)
        .filter(|v| v.is_finite())
        .collect();
    out.record(
        "guided_points",
        points.iter().filter(|b| b.decay == 0.0).count(),
    );
    out.record(
        "J_min",
        finite.iter().copied().fold(f64::INFINITY, f64::min),
    );
    out.record(
        "J_max",
        finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    out.record(
        "Gamma_max",
        points.iter().map(|b| b.decay).fold(0.0, f64::max),
    );
    out.tables.push(t);
    Ok(out)
}

fn build(geometry: &str, n: usize, d: f64, dipole: [f64; 3]) -> spinwave::Result<AtomArray> {
    match geometry {
        "ring" => build_ring(n, d, dipole),
        "square" => build_square(n, d, dipole),
        _ => build_chain(n, d, dipole),
    }
}

pub fn modes(p: &Params) -> Result<Outcome> {
    let array = build(
        p.text("geometry"),
        p.int("N"),
        lambda(p.float("d")),
        pol(p).unit(),
    )
    .in_module("geometry")?;
    let modes = modes_of(&array, true)?;
    let mut t = Table::new("modes", &["xi", "J", "Gamma", "k1", "k2"]);
    for m in &modes {
        let (k1, k2) = match m.dominant_k {
            Some(DominantK::Line(k)) => (Some(k), None),
            Some(DominantK::Plane(a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        t.push(vec![
            m.xi.into(),
            m.shift.into(),
            m.decay.into(),
            k1.into(),
            k2.into(),
        ]);
    }
    let mut out = Outcome::default();
    out.record("atoms", array.len());
    out.record("Gamma_min", modes[0].decay);
    out.record("Gamma_max", modes.last().map(|m| m.decay));
    out.record("Gamma_sum", modes.iter().map(|m| m.decay).sum::<f64>());
    out.tables.push(t);
    Ok(out)
}

/// Ansatz index with the best overlap, its overlap error and decay rate.
fn best_ansatz(mode: &EigenMode, array: &AtomArray) -> Result<(usize, f64, f64)> {
    let n = array.len();
    let h = free_space_hamiltonian(array).in_module("spin-model")?;
    let mut best = (1, f64::INFINITY);
    for k in 1..=n {
        let s = ansatz_state(k, n).in_module("spin-model")?;
        let e = overlap_error(&s.amplitudes, &mode.coefficients);
        if e < best.1 {
            best = (k, e);
        }
    }
    let g = state_decay_rate(&ansatz_state(best.0, n).in_module("spin-model")?, &h)
        .in_module("spin-model")?;
    Ok((best.0, best.1, g))
}

pub fn scaling(p: &Params, runner: &Runner) -> Result<Outcome> {
    let d = lambda(p.float("d"));
    let dipole = pol(p).unit();
    let sizes = p.ints("sizes");
    let rows = runner.sweep("scaling", &sizes, |&n| {
        let array = build_chain(n, d, dipole).in_module("geometry")?;
        let modes = modes_of(&array, false)?;
        let g = |i: usize| modes.get(i).map(|m| m.decay);
        let (k, err, g_ans) = best_ansatz(&modes[0], &array)?;
        Ok((g(0), g(1), g(2), k, err, g_ans))
    })?;
    let mut by_size = Table::new(
        "size_scaling",
        &[
            "N",
            "Gamma_xi1",
            "Gamma_xi2",
            "Gamma_xi3",
            "ansatz_n",
            "overlap_error",
            "Gamma_ansatz",
        ],
    );
    for (n, r) in sizes.iter().zip(&rows) {
        by_size.push(vec![
            (*n).into(),
            r.0.into(),
            r.1.into(),
            r.2.into(),
            r.3.into(),
            r.4.into(),
            r.5.into(),
        ]);
    }

    let n = p.int("N");
    let modes = modes_of(&build_chain(n, d, dipole).in_module("geometry")?, false)?;
    let mut by_index = Table::new("index_scaling", &["xi", "Gamma"]);
    for m in modes.iter().take(p.int("xi_max")) {
        by_index.push(vec![m.xi.into(), m.decay.into()]);
    }

    let mut out = Outcome::default();
    let x = counts(&sizes);
    let g1: Vec<f64> = rows.iter().filter_map(|r| r.0).collect();
    if let Some(f) = power(&x, &g1)? {
        out.record("size_exponent", f.exponent);
        out.record("size_r_squared", f.r_squared);
    }
    let errs: Vec<f64> = rows.iter().map(|r| r.4).collect();
    if let Some(f) = power(&x, &errs)? {
        out.record("overlap_exponent", f.exponent);
    }
    if let Some(f) = power(&by_index.column("xi"), &by_index.column("Gamma"))? {
        out.record("index_exponent", f.exponent);
        out.record("index_r_squared", f.r_squared);
    }
    if let Some(last) = rows.last() {
        out.record("ansatz_ratio", last.0.map(|g| last.5 / g));
    }
    out.tables.push(by_size);
    out.tables.push(by_index);
    Ok(out)
}

pub fn ring(p: &Params, runner: &Runner) -> Result<Outcome> {
    let d = lambda(p.float("d"));
    let dipole = pol(p).unit();
    let sizes = p.ints("sizes");
    let rows = runner.sweep("ring", &sizes, |&n| {
        let array = build_ring(n, d, dipole).in_module("geometry")?;
        Ok(modes_of(&array, false)?[0].decay)
    })?;
    let mut t = Table::new("ring", &["N", "Gamma_min"]);
    for (n, g) in sizes.iter().zip(&rows) {
        t.push(vec![(*n).into(), (*g).into()]);
    }
    let mut out = Outcome::default();
    if let Some(f) = exponential(&counts(&sizes), &rows)? {
        out.record("decay_constant", f.decay_constant);
        out.record("prefactor", f.prefactor);
        out.record("r_squared", f.r_squared);
    }
    out.tables.push(t);
    Ok(out)
}

/// Fraction of `|c|²` on the middle third of the chain.
fn middle_weight(c: &[C64]) -> f64 {
    let n = c.len();
    let total: f64 = c.iter().map(|v| v.norm_sqr()).sum();
    c[n / 3..2 * n / 3]
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        / total
}

pub fn defect_cavity(p: &Params, runner: &Runner) -> Result<Outcome> {
    let d_max = lambda(p.float("d_max"));
    let (ratio, threshold) = (p.float("ratio"), p.float("localization"));
    let dipole = pol(p).unit();
    let sizes = p.ints("sizes");
    let rows = runner.sweep("defect", &sizes, |&n| {
        let array = build_defect_chain(n, d_max, ratio, dipole).in_module("geometry")?;
        let modes = modes_of(&array, false)?;
        // Modes are sorted by decay, so the first localized one is the fundamental.
        modes
            .iter()
            .map(|m| (m.xi, m.decay, middle_weight(&m.coefficients)))
            .find(|m| m.2 > threshold)
            .ok_or_else(|| {
                CliError::Degenerate(format!(
                    "no mode of the N = {n} cavity is localized in the middle third"
                ))
            })
    })?;
    let mut t = Table::new("cavity", &["N", "xi", "Gamma_cavity", "middle_weight"]);
    for (n, r) in sizes.iter().zip(&rows) {
        t.push(vec![(*n).into(), r.0.into(), r.1.into(), r.2.into()]);
    }
    let mut out = Outcome::default();
    let g: Vec<f64> = rows.iter().map(|r| r.1).collect();
    if let Some(f) = exponential(&counts(&sizes), &g)? {
        out.record("decay_constant", f.decay_constant);
        out.record("prefactor", f.prefactor);
        out.record("r_squared", f.r_squared);
    }
    out.tables.push(t);
    Ok(out)
}

/// Smallest decay in the `n`-excitation block: dense when it fits, Arnoldi otherwise.
fn most_subradiant_rate(h: &SingleParticle, n: usize) -> Result<f64> {
    if binomial(h.n, n) <= DENSE_LIMIT {
        let block = build_block_hamiltonian(h, n).in_module("spin-model")?;
        return Ok(eigenmodes(&block, None).in_module("spin-model")?[0].decay);
    }
    let op = BlockOperator::new(h, n).in_module("spin-model")?;
    let pair =
        most_subradiant(&|x| op.apply(x), op.dim(), 80, 1e-10, 400).in_module("spin-model")?;
    Ok(-2.0 * pair.value.im)
}

pub fn multi_excitation(p: &Params, runner: &Runner) -> Result<Outcome> {
    let d = lambda(p.float("d"));
    let dipole = pol(p).unit();
    let single = |n: usize| -> Result<(AtomArray, SingleParticle)> {
        let array = build_chain(n, d, dipole).in_module("geometry")?;
        let sp =
            SingleParticle::from_couplings(&free_space_couplings(&array).in_module("greens-free")?);
        Ok((array, sp))
    };

    let sizes = p.ints("sizes");
    let two = runner.sweep("two-excitation", &sizes, |&n| {
        let (array, sp) = single(n)?;
        let first = modes_of(&array, false)?;
        let op = BlockOperator::new(&sp, 2).in_module("spin-model")?;
        let decay = |amps: &[C64]| -> Result<f64> {
            expectation_decay(amps, &op.apply(amps).in_module("spin-model")?)
                .in_module("spin-model")
        };
        let bosonic = decay(
            &bosonic_state(&first[0].coefficients, 2)
                .in_module("spin-model")?
                .amplitudes,
        )?;
        let fermionic = decay(
            &fermionic_ansatz(&[n, n - 1], n)
                .in_module("spin-model")?
                .amplitudes,
        )?;
        Ok((bosonic, most_subradiant_rate(&sp, 2)?, fermionic))
    })?;
    let mut t2 = Table::new(
        "two_excitation",
        &["N", "Gamma_bosonic", "Gamma_exact", "Gamma_fermionic"],
    );
    for (n, r) in sizes.iter().zip(&two) {
        t2.push(vec![(*n).into(), r.0.into(), r.1.into(), r.2.into()]);
    }

    let mut points = Vec::new();
    for &n in &p.ints("density_sizes") {
        for k in 2..=p.int("max_excitations").min(n.saturating_sub(1)) {
            points.push((k, n));
        }
    }
    let density = runner.sweep("density", &points, |&(k, n)| {
        most_subradiant_rate(&single(n)?.1, k)
    })?;
    let mut td = Table::new("density", &["n", "N", "Gamma", "Gamma_over_density_cubed"]);
    let (mut fx, mut fy) = (Vec::new(), Vec::new());
    for (&(k, n), &g) in points.iter().zip(&density) {
        let rho = k as f64 / n as f64;
        td.push(vec![
            k.into(),
            n.into(),
            g.into(),
            Cell::Float(g / rho.powi(3)),
        ]);
        if rho <= p.float("density_max") + 1e-12 {
            fx.push(rho);
            fy.push(g);
        }
    }

    let mut out = Outcome::default();
    let x = counts(&sizes);
    for (name, col) in [("bosonic", 0), ("exact", 1), ("fermionic", 2)] {
        let y: Vec<f64> = two.iter().map(|r| [r.0, r.1, r.2][col]).collect();
        if let Some(f) = power(&x, &y)? {
            out.record(&format!("{name}_exponent"), f.exponent);
        }
    }
    if let Some(f) = power(&fx, &fy)? {
        out.record("density_exponent", f.exponent);
    }
    let scaled: Vec<f64> = fx.iter().zip(&fy).map(|(r, g)| g / r.powi(3)).collect();
    if !scaled.is_empty() {
        let hi = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        out.record("density_spread", hi / lo);
    }
    out.tables.push(t2);
    out.tables.push(td);
    Ok(out)
}

pub fn field_map(p: &Params) -> Result<Outcome> {
    let n = p.int("N");
    let d = lambda(p.float("d"));
    let array = build_chain(n, d, pol(p).unit()).in_module("geometry")?;
    let modes = modes_of(&array, false)?;
    let mode = &modes[p.int("xi") - 1];
    let (extent, samples) = (p.float("extent") * d, p.int("grid"));
    let z_end = (n - 1) as f64 * d;
    let grid = plane_grid(
        p.float("offset") * d,
        (-extent, extent),
        (-extent, z_end + extent),
        samples,
        samples,
    );
    let values = field_intensity_map(&mode.coefficients, &array, &grid).in_module("spin-model")?;
    let mut t = Table::new("intensity", &["y", "z", "intensity"]);
    let (mut total, mut ends, mut peak) = (0.0, 0.0, 0.0f64);
    for (r, v) in grid.iter().zip(&values) {
        t.push(vec![r[1].into(), r[2].into(), (*v).into()]);
        if let Some(v) = *v {
            total += v;
            peak = peak.max(v);
            if r[2] < 5.0 * d || r[2] > z_end - 5.0 * d {
                ends += v;
            }
        }
    }
    let mut out = Outcome::default();
    out.record("xi", mode.xi);
    out.record("Gamma", mode.decay);
    out.record("peak_intensity", peak);
    // Share of the sampled intensity within five spacings of either chain end.
    out.record(
        "end_fraction",
        if total > 0.0 { ends / total } else { f64::NAN },
    );
    out.tables.push(t);
    Ok(out)
}
