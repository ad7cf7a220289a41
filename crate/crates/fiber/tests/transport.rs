//! Steady-state transport of a weak guided probe.

use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use spinwave::geometry::build_fiber_chain;
use spinwave_fiber::dynamics::{
    independent_transmission_estimate, mirror_closed_form, mirror_transport, spectrum_extremes, two_level_transport,
    EmissionModel, FiberChain, Response,
};
use spinwave_fiber::greens::{FiberConstants, FiberModel, FiberSpec};

fn model() -> &'static FiberModel {
    static MODEL: OnceLock<FiberModel> = OnceLock::new();
    MODEL.get_or_init(|| FiberModel::new(FiberSpec::default(), 60.0).unwrap())
}

fn chain(n: usize, d: f64, emission: EmissionModel) -> FiberChain {
    FiberChain::new(&build_fiber_chain(n, d).unwrap(), model(), emission).unwrap()
}

fn quarter() -> f64 {
    PI / (2.0 * model().constants.k_1d)
}

fn emission() -> impl Strategy<Value = EmissionModel> {
    prop_oneof![Just(EmissionModel::Independent), Just(EmissionModel::Collective)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hamiltonian_is_symmetric(n in 2usize..12, d in 0.3f64..3.0, m in emission()) {
        let h = chain(n, d, m).hamiltonian();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((h[(i, j)] - h[(j, i)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn transport_is_passive(n in 1usize..15, d in 0.3f64..3.0, delta in -4.0f64..4.0, m in emission()) {
        let (res, _) = two_level_transport(&chain(n, d, m), delta, 1.0).unwrap();
        prop_assert!(res.transmission >= 0.0 && res.transmission <= 1.0 + 1e-9);
        prop_assert!(res.reflection >= 0.0 && res.reflection <= 1.0 + 1e-9);
        prop_assert!(res.loss >= -1e-9);
    }

    #[test]
    fn probe_strength_drops_out(n in 1usize..10, d in 0.3f64..3.0, delta in -3.0f64..3.0, omega in 1e-4f64..10.0) {
        let c = chain(n, d, EmissionModel::Collective);
        let (a, ca) = two_level_transport(&c, delta, 1.0).unwrap();
        let (b, cb) = two_level_transport(&c, delta, omega).unwrap();
        prop_assert!((a.t - b.t).norm() < 1e-10 && (a.r - b.r).norm() < 1e-10);
        for (x, y) in ca.iter().zip(&cb) {
            prop_assert!((x * omega - y).norm() < 1e-10 * omega.max(1.0));
        }
    }

    #[test]
    fn rigid_translation_keeps_intensities(n in 1usize..10, d in 0.3f64..3.0, shift in 0.0f64..20.0, delta in -3.0f64..3.0) {
        let mut array = build_fiber_chain(n, d).unwrap();
        let base = FiberChain::new(&array, model(), EmissionModel::Collective).unwrap();
        for p in array.positions.iter_mut() {
            p[2] += shift;
        }
        let moved = FiberChain::new(&array, model(), EmissionModel::Collective).unwrap();
        let (a, _) = two_level_transport(&base, delta, 1.0).unwrap();
        let (b, _) = two_level_transport(&moved, delta, 1.0).unwrap();
        prop_assert!((a.transmission - b.transmission).abs() < 1e-10);
        prop_assert!((a.reflection - b.reflection).abs() < 1e-10);
    }

    #[test]
    fn spectral_response_agrees_with_direct_solves(n in 2usize..12, delta in -3.0f64..3.0, m in emission()) {
        let c = chain(n, quarter(), m);
        let resp = Response::new(&c, None).unwrap();
        let (direct, _) = two_level_transport(&c, delta, 1.0).unwrap();
        let fast = resp.at(delta).unwrap();
        prop_assert!((fast.t - direct.t).norm() < 1e-9 && (fast.r - direct.r).norm() < 1e-9);
    }

    #[test]
    fn independent_mirror_has_closed_form(n in 1usize..30, delta in -5.0f64..5.0) {
        let c = FiberChain::independent(&build_fiber_chain(n, 2.0 * quarter()).unwrap(), model().constants).unwrap();
        let res = mirror_transport(&c, delta, 1.0).unwrap();
        let (t, r) = mirror_closed_form(&c.constants, n, delta);
        prop_assert!((res.transmission - t).abs() < 1e-10 && (res.reflection - r).abs() < 1e-10);
    }
}

#[test]
fn lossless_atoms_conserve_flux() {
    let constants = FiberConstants { gamma_prime: 0.0, ..model().constants };
    let c = FiberChain::independent(&build_fiber_chain(12, 0.83).unwrap(), constants).unwrap();
    for delta in [-2.0, -0.6, -0.5, 0.1, 1.7] {
        let (res, _) = two_level_transport(&c, delta, 1.0).unwrap();
        assert!(res.loss.abs() < 1e-12, "Δ = {delta}: κ = {}", res.loss);
    }
}

#[test]
fn single_atom_lineshape() {
    let c = chain(1, 1.0, EmissionModel::Collective);
    let k = model().constants;
    let (res, _) = two_level_transport(&c, k.j_prime, 1.0).unwrap();
    let g = k.gamma_1d + k.gamma_prime;
    assert!((res.transmission - (k.gamma_prime / g).powi(2)).abs() < 1e-12);
    assert!((res.reflection - (k.gamma_1d / g).powi(2)).abs() < 1e-12);
}

#[test]
fn dilute_estimate_holds_for_independent_atoms() {
    let k = model().constants;
    let c = FiberChain::independent(&build_fiber_chain(20, quarter()).unwrap(), k).unwrap();
    let worst = (0..=400)
        .map(|i| k.j_prime - 4.0 + 8.0 * i as f64 / 400.0)
        .map(|d| (two_level_transport(&c, d, 1.0).unwrap().0.transmission - independent_transmission_estimate(&k, 20, d)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.05, "worst deviation {worst}");
}

#[test]
fn mirror_requires_commensurate_spacing() {
    let c = chain(4, quarter(), EmissionModel::Independent);
    assert!(mirror_transport(&c, 0.0, 1.0).is_err());
}

#[test]
fn collective_emission_suppresses_resonant_loss() {
    let ind = spectrum_extremes(&chain(20, quarter(), EmissionModel::Independent), 3.0, 6000).unwrap();
    let col = spectrum_extremes(&chain(20, quarter(), EmissionModel::Collective), 3.0, 6000).unwrap();
    assert!(col.min_loss < 0.2 * ind.min_loss, "{} vs {}", col.min_loss, ind.min_loss);
}

#[test]
fn far_detuned_loss_ratio_falls_as_inverse_length() {
    let j = model().constants.j_prime;
    let sizes = [10usize, 15, 20, 30, 40];
    let ratio: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let loss = |m| two_level_transport(&chain(n, quarter(), m), j + 20.0, 1.0).unwrap().0.loss;
            loss(EmissionModel::Collective) / loss(EmissionModel::Independent)
        })
        .collect();
    let x: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let fit = spinwave::fit::fit_power_law(&x, &ratio).unwrap();
    assert!((fit.exponent + 1.0).abs() < 0.3, "exponent {}", fit.exponent);
}
