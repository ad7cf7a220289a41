//! Fixed-excitation blocks against the full `2^N` spin Hilbert space.

use spinwave::geometry::{build_chain, build_ring};
use spinwave::greens::free_space_couplings;
use spinwave::hamiltonian::{build_block_hamiltonian, SingleParticle};
use spinwave::linalg::eigenvalues;
use spinwave::{AtomArray, C64};

/// `Σ_ij h_ij σ_i† σ_j` on all `2^N` configurations, then restricted to the
/// states with `k` excitations.
fn brute_force_block(h: &SingleParticle, k: usize) -> faer::Mat<C64> {
    let n = h.n;
    let states: Vec<u32> = (0u32..1 << n).filter(|s| s.count_ones() as usize == k).collect();
    let index = |s: u32| states.iter().position(|&x| x == s).unwrap();
    let mut m = faer::Mat::zeros(states.len(), states.len());
    for (col, &s) in states.iter().enumerate() {
        for j in 0..n {
            if s & (1 << j) == 0 {
                continue;
            }
            let lowered = s & !(1 << j);
            for i in 0..n {
                if lowered & (1 << i) != 0 {
                    continue;
                }
                let row = index(lowered | (1 << i));
                m[(row, col)] += h.at(i, j);
            }
        }
    }
    m
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    v
}

fn check(array: &AtomArray, k: usize) {
    let h = SingleParticle::from_couplings(&free_space_couplings(array).unwrap());
    let block = build_block_hamiltonian(&h, k).unwrap();
    let brute = brute_force_block(&h, k);
    assert_eq!(block.dim(), brute.nrows());
    let a = sorted(eigenvalues(&block.matrix).unwrap());
    let b = sorted(eigenvalues(&brute).unwrap());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() < 1e-9, "{x} vs {y}");
    }
}

#[test]
fn two_excitations_on_a_chain() {
    check(&build_chain(7, 0.6, [1.0, 0.0, 0.0]).unwrap(), 2);
}

#[test]
fn three_excitations_on_a_ring() {
    check(&build_ring(8, 0.9, [1.0, 0.0, 0.0]).unwrap(), 3);
}

#[test]
fn single_excitation_block_is_the_coupling_matrix() {
    check(&build_chain(6, 1.3, [0.0, 0.0, 1.0]).unwrap(), 1);
}
