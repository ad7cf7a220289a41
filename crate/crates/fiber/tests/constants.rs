//! Single-atom constants of the nanofiber and the coupling cache.

use spinwave_fiber::greens::{guided_pole, FiberCouplings, FiberModel, FiberSpec};

fn spec(radius: f64, atom_radius: f64) -> FiberSpec {
    FiberSpec { radius, atom_radius, ..FiberSpec::default() }
}

// Frozen from the reference geometry (k0 r = 1.2, ε = 4, k0 ρa = 1.8).
#[test]
fn reference_constants_are_stable() {
    let c = FiberModel::new(FiberSpec::default(), 10.0).unwrap().constants;
    assert!((c.k_1d - 1.2967328101610227).abs() < 1e-10, "{}", c.k_1d);
    assert!((c.gamma_1d - 0.36796).abs() < 5e-5, "{}", c.gamma_1d);
    assert!((c.gamma_prime - 1.27758).abs() < 5e-5, "{}", c.gamma_prime);
    assert!((c.j_prime + 0.54478).abs() < 5e-5, "{}", c.j_prime);
}

#[test]
fn total_decay_matches_independent_spectral_route() {
    let model = FiberModel::new(FiberSpec::default(), 10.0).unwrap();
    let c = model.constants;
    let total = model.total_decay_spectral().unwrap();
    assert!((total - (c.gamma_1d + c.gamma_prime)).abs() < 1e-4, "{total} vs {}", c.gamma_1d + c.gamma_prime);
}

#[test]
fn guided_wavevector_grows_with_radius() {
    let mut last = 1.0;
    for r in [0.8, 1.0, 1.2, 1.4, 1.6] {
        let k = guided_pole(&spec(r, 1.5 * r)).unwrap();
        assert!(k > last && k < 2.0, "r = {r}: k1D = {k}");
        last = k;
    }
}

#[test]
fn guided_coupling_falls_with_distance_from_surface() {
    let mut last = f64::INFINITY;
    for rho in [1.5, 1.8, 2.2, 2.8, 3.6] {
        let g = FiberModel::new(spec(1.2, rho), 1.0).unwrap().constants.gamma_1d;
        assert!(g < last && g > 0.0, "ρa = {rho}: Γ1D = {g}");
        last = g;
    }
}

#[test]
fn coupling_cache_round_trip() {
    let model = FiberModel::new(FiberSpec::default(), 5.0).unwrap();
    let couplings = model.couplings(&[0.0, 1.2, 2.4, 3.6]).unwrap();
    let dir = std::env::temp_dir().join(format!("spinwave-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("couplings.json");
    couplings.save(&path).unwrap();
    let loaded = FiberCouplings::load(&path, &FiberSpec::default()).unwrap();
    assert_eq!(loaded, couplings);
    assert!(FiberCouplings::load(&path, &spec(1.0, 1.5)).is_err());
    std::fs::remove_dir_all(&dir).unwrap();

    let (g, r) = loaded.lookup(2.4).unwrap();
    assert!((g - model.guided(2.4)).norm() < 1e-15);
    assert!((r - model.radiative(2.4).unwrap()).norm() < 1e-15);
    let self_term = loaded.lookup(0.0).unwrap().1;
    let c = model.constants;
    assert!((self_term.re - c.j_prime).abs() < 1e-12 && (self_term.im + 0.5 * c.gamma_prime).abs() < 1e-12);
    assert!(loaded.lookup(1.0).is_none());
}

#[test]
fn separations_beyond_the_table_are_rejected() {
    let model = FiberModel::new(FiberSpec::default(), 5.0).unwrap();
    assert!(model.radiative(6.0).is_err());
}
