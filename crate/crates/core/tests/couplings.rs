//! Structural properties of free-space couplings and lattice builders.

use proptest::prelude::*;
use spinwave::geometry::{build_chain, build_ring, build_square, distance};
use spinwave::greens::{free_space_couplings, free_space_greens};
use spinwave::hamiltonian::{build_block_hamiltonian, free_space_hamiltonian, SingleParticle};
use spinwave::linalg::{eigenvalues, from_row_major};
use spinwave::modes::{eigenmodes, total_decay};
use spinwave::C64;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn direction() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0f64..1.0).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn greens_tensor_is_symmetric_and_even(r in direction(), scale in 0.05f64..30.0) {
        let r = [r[0] * scale, r[1] * scale, r[2] * scale];
        let g = free_space_greens(r).unwrap();
        let h = free_space_greens([-r[0], -r[1], -r[2]]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                prop_assert!((g.0[a][b] - g.0[b][a]).norm() <= 1e-12 * g.0[a][b].norm().max(1.0));
                prop_assert!((g.0[a][b] - h.0[a][b]).norm() <= 1e-12 * g.0[a][b].norm().max(1.0));
            }
        }
    }

    #[test]
    fn dissipative_couplings_are_positive_semidefinite(n in 2usize..8, d in 0.1f64..4.0, dip in direction()) {
        let c = free_space_couplings(&build_square(n, d, dip).unwrap()).unwrap();
        let gamma: Vec<C64> = c.gamma.iter().map(|&g| C64::new(g, 0.0)).collect();
        let values = eigenvalues(&from_row_major(c.n, &gamma)).unwrap();
        for v in values {
            prop_assert!(v.re > -1e-9 && v.im.abs() < 1e-9, "eigenvalue {v}");
        }
    }

    #[test]
    fn couplings_are_reciprocal(n in 2usize..25, d in 0.1f64..4.0, dip in direction()) {
        let c = free_space_couplings(&build_chain(n, d, dip).unwrap()).unwrap();
        for a in 0..n {
            prop_assert_eq!(c.j_at(a, a), 0.0);
            prop_assert_eq!(c.gamma_at(a, a), 1.0);
            for b in 0..n {
                prop_assert_eq!(c.j_at(a, b), c.j_at(b, a));
                prop_assert_eq!(c.gamma_at(a, b), c.gamma_at(b, a));
            }
        }
    }

    #[test]
    fn uniform_chain_couplings_depend_on_separation_only(n in 3usize..20, d in 0.1f64..4.0, dip in direction()) {
        let c = free_space_couplings(&build_chain(n, d, dip).unwrap()).unwrap();
        for a in 0..n - 1 {
            for b in 0..n - 1 {
                prop_assert!((c.j_at(a, b) - c.j_at(a + 1, b + 1)).abs() < 1e-12 * c.j_at(a, b).abs().max(1.0));
            }
        }
    }

    #[test]
    fn ring_couplings_are_rotation_invariant(n in 3usize..24, d in 0.1f64..3.0) {
        // Dipoles normal to the ring plane see every site alike.
        let c = free_space_couplings(&build_ring(n, d, [1.0, 0.0, 0.0]).unwrap()).unwrap();
        for a in 0..n {
            for b in 0..n {
                let (a1, b1) = ((a + 1) % n, (b + 1) % n);
                prop_assert!((c.j_at(a, b) - c.j_at(a1, b1)).abs() < 1e-9 * c.j_at(a, b).abs().max(1.0));
                prop_assert!((c.gamma_at(a, b) - c.gamma_at(a1, b1)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn nearest_neighbours_sit_at_the_lattice_constant(n in 3usize..30, d in 0.05f64..5.0) {
        let dip = [0.0, 0.0, 1.0];
        for array in [build_chain(n, d, dip).unwrap(), build_ring(n, d, dip).unwrap(), build_square(n.min(8), d, dip).unwrap()] {
            for nn in array.nearest_neighbor_distances() {
                prop_assert!((nn - d).abs() < 1e-9 * d);
            }
            prop_assert!((array.min_separation().unwrap() - d).abs() < 1e-9 * d);
        }
        let ring = build_ring(n, d, dip).unwrap();
        let last = distance(ring.positions[0], ring.positions[n - 1]);
        prop_assert!((last - d).abs() < 1e-9 * d);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn decay_rates_sum_to_atom_number(n in 1usize..40, d in 0.1f64..4.0, dip in direction()) {
        let array = build_chain(n, d, dip).unwrap();
        let modes = eigenmodes(&free_space_hamiltonian(&array).unwrap(), Some(&array)).unwrap();
        prop_assert!((total_decay(&modes) - n as f64).abs() < 1e-8 * n as f64);
        prop_assert!(modes.iter().all(|m| m.decay > -1e-10));
        prop_assert!(modes.windows(2).all(|w| w[0].decay <= w[1].decay));
    }

    #[test]
    fn multi_excitation_blocks_are_complex_symmetric(n in 2usize..9, d in 0.1f64..2.0, k in 1usize..4) {
        let c = free_space_couplings(&build_chain(n, d, [1.0, 0.0, 0.0]).unwrap()).unwrap();
        let h = build_block_hamiltonian(&SingleParticle::from_couplings(&c), k.min(n)).unwrap();
        prop_assert!(h.symmetry_defect() < 1e-13);
        let trace: C64 = (0..h.dim()).map(|i| h.matrix[(i, i)]).sum();
        let expected = -0.5 * spinwave::hamiltonian::binomial(n - 1, k.min(n) - 1) as f64 * n as f64;
        prop_assert!((trace.im - expected).abs() < 1e-9, "{} vs {expected}", trace.im);
    }
}
