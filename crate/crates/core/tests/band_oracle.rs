//! Infinite-chain bands against an Abel-regularized real-space lattice sum.

use spinwave::bands::{decay_1d, dispersion_1d};
use spinwave::geometry::Polarization;
use spinwave::greens::{free_space_greens, rates_from_tensor};
use std::f64::consts::PI;

/// `Σ_{n≠0} (J_n, Γ_n) e^{ik n d} e^{−η|n|}`, Richardson-extrapolated to `η → 0`.
fn lattice_sum(k: f64, d: f64, pol: Polarization) -> (f64, f64) {
    let dip = pol.unit::<f64>();
    let at = |eta: f64| {
        let terms = (40.0 / eta).ceil() as usize;
        let (mut j, mut g) = (0.0, 0.0);
        for n in 1..=terms {
            let z = n as f64 * d;
            let (jn, gn) = rates_from_tensor(&free_space_greens([0.0, 0.0, z]).unwrap(), dip);
            let w = 2.0 * (k * z).cos() * (-eta * n as f64).exp();
            j += jn * w;
            g += gn * w;
        }
        (j, 1.0 + g)
    };
    let (a, b, c) = (at(4e-3), at(2e-3), at(1e-3));
    // Second-order Richardson in η.
    let ex = |x: f64, y: f64, z: f64| (8.0 * z - 6.0 * y + x) / 3.0;
    (ex(a.0, b.0, c.0), ex(a.1, b.1, c.1))
}

#[test]
fn shifts_match_real_space_sums() {
    for &(frac, k_frac) in &[(0.2, 0.3), (0.2, 0.8), (0.35, 0.5), (0.45, 0.95), (0.3, 0.0)] {
        let d = frac * 2.0 * PI;
        let k = k_frac * PI / d;
        for pol in [Polarization::Parallel, Polarization::Transverse] {
            let (j, _) = lattice_sum(k, d, pol);
            let exact = dispersion_1d(k, d, pol).unwrap();
            assert!((j - exact).abs() < 1e-6 * exact.abs().max(1.0), "d = {frac}λ, k = {k_frac}π/d, {pol:?}: {j} vs {exact}");
        }
    }
}

#[test]
fn decay_matches_real_space_sums_away_from_edges() {
    for &(frac, k_frac) in &[(0.2, 0.1), (0.6, 0.2), (0.8, 0.5), (0.3, 0.7)] {
        let d = frac * 2.0 * PI;
        let k = k_frac * PI / d;
        for pol in [Polarization::Parallel, Polarization::Transverse] {
            let (_, g) = lattice_sum(k, d, pol);
            let exact = decay_1d(k, d, pol);
            assert!((g - exact).abs() < 1e-6 * exact.max(1.0), "d = {frac}λ, k = {k_frac}π/d, {pol:?}: {g} vs {exact}");
        }
    }
}
