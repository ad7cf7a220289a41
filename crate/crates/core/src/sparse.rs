//! Matrix-free multi-excitation blocks and an Arnoldi search for the most
//! subradiant eigenpair when the block is too large to store.

use crate::hamiltonian::{check_guard, SingleParticle, TupleBasis};
use crate::linalg::{self, CMat};
use crate::{Error, Result, C64};
use faer::Mat;
use rayon::prelude::*;

/// `H` applied on the fly from the single-particle matrix.
pub struct BlockOperator<'a> {
    pub h: &'a SingleParticle,
    pub basis: TupleBasis,
}

impl<'a> BlockOperator<'a> {
    pub fn new(h: &'a SingleParticle, excitations: usize) -> Result<Self> {
        check_guard(h.n, excitations)?;
        Ok(BlockOperator { h, basis: TupleBasis::new(h.n, excitations)? })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        // ⟨a|H|b⟩ = h_ji when b holds i where a holds j.
        Ok((0..self.dim())
            .into_par_iter()
            .map(|a| {
                let mut acc: C64 = self.basis.tuples[a].iter().map(|&i| self.h.at(i, i)).sum::<C64>() * x[a];
                self.basis.for_each_hop(a, |b, i, j| acc += self.h.at(j, i) * x[b]);
                acc
            })
            .collect())
    }
}

/// Eigenpair with the largest imaginary part (smallest decay) found by
/// restarted Arnoldi iteration.
pub struct ExtremalPair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub residual: f64,
    pub restarts: usize,
}

/// Restarted Arnoldi for `max Im λ`.
///
/// Each cycle builds a Krylov space of dimension `krylov`, takes the Ritz
/// pair with the largest imaginary part and restarts from a blend of the top
/// few Ritz vectors. Convergence is slow when subradiant eigenvalues cluster;
/// this path is only used beyond the dense limit.
pub fn most_subradiant(
    op: &dyn Fn(&[C64]) -> Result<Vec<C64>>,
    dim: usize,
    krylov: usize,
    tol: f64,
    max_restarts: usize,
) -> Result<ExtremalPair> {
    if dim == 0 {
        return Err(Error::invalid("empty operator"));
    }
    let m = krylov.min(dim).max(1);
    // Deterministic start vector with support everywhere.
    let mut start: Vec<C64> = (0..dim)
        .map(|i| C64::new(1.0 + ((i * 2_654_435_761) % 1000) as f64 * 1e-4, 0.0))
        .collect();
    start = linalg::normalized(&start);
    let mut best = None;
    for restart in 0..max_restarts {
        let (q, hess, beta) = arnoldi(op, &start, m)?;
        let k = hess.nrows();
        let e = linalg::eig(&hess)?;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| e.values[b].im.partial_cmp(&e.values[a].im).unwrap());
        let top = order[0];
        let ritz = combine(&q, &linalg::column(&e.vectors, top));
        let ritz = linalg::normalized(&ritz);
        let hv = op(&ritz)?;
        let lambda = linalg::dot(&ritz, &hv);
        let residual = linalg::norm(
            &hv.iter().zip(&ritz).map(|(a, b)| a - lambda * b).collect::<Vec<_>>(),
        );
        let pair = ExtremalPair { value: lambda, vector: ritz.clone(), residual, restarts: restart };
        if residual < tol * lambda.norm().max(1.0) || beta == 0.0 {
            return Ok(pair);
        }
        best = Some(pair);
        // Restart from the leading Ritz vectors, weighted toward the target.
        let mut next = vec![C64::new(0.0, 0.0); dim];
        for (rank, &idx) in order.iter().take(4).enumerate() {
            let v = combine(&q, &linalg::column(&e.vectors, idx));
            let w = 1.0 / (1 + rank * rank * 4) as f64;
            for (a, b) in next.iter_mut().zip(v) {
                *a += b * w;
            }
        }
        start = linalg::normalized(&next);
    }
    let pair = best.expect("at least one cycle");
    Err(Error::NoConvergence(format!(
        "Arnoldi residual {:.3e} after {max_restarts} restarts (λ ≈ {})",
        pair.residual, pair.value
    )))
}

fn combine(q: &[Vec<C64>], y: &[C64]) -> Vec<C64> {
    let dim = q[0].len();
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (col, &c) in q.iter().zip(y) {
        for (o, v) in out.iter_mut().zip(col) {
            *o += v * c;
        }
    }
    out
}

/// Arnoldi with modified Gram–Schmidt and one reorthogonalization pass.
fn arnoldi(
    op: &dyn Fn(&[C64]) -> Result<Vec<C64>>,
    start: &[C64],
    m: usize,
) -> Result<(Vec<Vec<C64>>, CMat, f64)> {
    let mut q = vec![start.to_vec()];
    let mut h = Mat::<C64>::zeros(m + 1, m);
    let mut beta = 0.0;
    let mut used = m;
    for j in 0..m {
        let mut w = op(&q[j])?;
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = linalg::dot(qi, &w);
                h[(i, j)] += c;
                for (a, b) in w.iter_mut().zip(qi) {
                    *a -= c * b;
                }
            }
        }
        beta = linalg::norm(&w);
        h[(j + 1, j)] = C64::new(beta, 0.0);
        if beta < 1e-13 {
            used = j + 1;
            beta = 0.0;
            break;
        }
        if j + 1 < m {
            q.push(w.iter().map(|v| v / beta).collect());
        }
    }
    q.truncate(used);
    let square = Mat::from_fn(used, used, |i, j| h[(i, j)]);
    Ok((q, square, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_chain;
    use crate::greens::free_space_couplings;
    use crate::hamiltonian::build_block_hamiltonian;

    fn chain_h(n: usize, d: f64) -> SingleParticle {
        let a = build_chain(n, d, [0.0, 0.0, 1.0]).unwrap();
        SingleParticle::from_couplings(&free_space_couplings(&a).unwrap())
    }

    #[test]
    fn matrix_free_matches_dense() {
        let h = chain_h(8, 1.9);
        for n in 1..=3 {
            let dense = build_block_hamiltonian(&h, n).unwrap();
            let op = BlockOperator::new(&h, n).unwrap();
            let x: Vec<C64> = (0..op.dim()).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
            let a = dense.apply(&x).unwrap();
            let b = op.apply(&x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn arnoldi_finds_most_subradiant() {
        let h = chain_h(14, 0.6 * std::f64::consts::PI);
        let dense = build_block_hamiltonian(&h, 2).unwrap();
        let vals = linalg::eigenvalues(&dense.matrix).unwrap();
        let target = vals.iter().cloned().fold(C64::new(0.0, f64::NEG_INFINITY), |a, b| if b.im > a.im { b } else { a });
        let op = BlockOperator::new(&h, 2).unwrap();
        let pair = most_subradiant(&|x| op.apply(x), op.dim(), 80, 1e-9, 400).unwrap();
        assert!((pair.value - target).norm() < 1e-7, "{} vs {}", pair.value, target);
    }
}
