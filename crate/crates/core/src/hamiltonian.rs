//! Non-Hermitian effective Hamiltonian in fixed-excitation blocks.
//!
//! A single-particle matrix `h_ij = J_ij − iΓ_ij/2` defines
//! `H = Σ_ij h_ij σ_i† σ_j`. Acting on a set of excited atoms, the diagonal
//! collects `Σ_{i ∈ a} h_ii`, and tuples that differ by moving one excitation
//! from `j` to `i` are connected by `h_ij`. Hard-core spins never hold two
//! excitations, which the sorted-tuple basis enforces by construction.

use crate::greens::PairCouplings;
use crate::linalg::CMat;
use crate::{Error, Result, C64};
use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest block dimension accepted at all.
pub const DIMENSION_GUARD: usize = 200_000;
/// Largest excitation number accepted.
pub const MAX_EXCITATIONS: usize = 4;
/// Largest block stored as a dense matrix; larger blocks go matrix-free.
pub const DENSE_LIMIT: usize = 8_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    FreeSpace,
    FiberGuided,
    FiberRadiative,
    FiberTotal,
    WithControlField,
}

/// The one-excitation matrix `h` that all blocks derive from.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticle {
    pub n: usize,
    /// Row-major `n × n`.
    pub h: Vec<C64>,
    pub source: Source,
}

impl SingleParticle {
    pub fn from_couplings(c: &PairCouplings<f64>) -> Self {
        let h = c
            .j
            .iter()
            .zip(&c.gamma)
            .map(|(&j, &g)| C64::new(j, -0.5 * g))
            .collect();
        SingleParticle { n: c.n, h, source: Source::FreeSpace }
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.h[i * self.n + j]
    }

    pub fn to_matrix(&self) -> CMat {
        crate::linalg::from_row_major(self.n, &self.h)
    }

    /// `a·h + b·other`, used to assemble fiber sources from their parts.
    pub fn combine(&self, a: f64, other: &SingleParticle, b: f64, source: Source) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let h = self.h.iter().zip(&other.h).map(|(x, y)| x * a + y * b).collect();
        Ok(SingleParticle { n: self.n, h, source })
    }
}

/// Binomial coefficient, saturating at `usize::MAX`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Sorted tuples of excited atoms, ordered by colexicographic rank so that
/// `rank` is a closed-form inverse of indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleBasis {
    pub atoms: usize,
    pub excitations: usize,
    pub tuples: Vec<Vec<usize>>,
    /// `binom[m][k] = C(m, k)` for `m ≤ atoms`, `k ≤ excitations`.
    binom: Vec<Vec<usize>>,
}

impl TupleBasis {
    pub fn new(atoms: usize, excitations: usize) -> Result<Self> {
        check_guard(atoms, excitations)?;
        let binom: Vec<Vec<usize>> = (0..=atoms)
            .map(|m| (0..=excitations).map(|k| binomial(m, k)).collect())
            .collect();
        let dim = binom[atoms][excitations];
        let mut tuples = Vec::with_capacity(dim);
        // Colex order: increment the lowest position that can move.
        let mut cur: Vec<usize> = (0..excitations).collect();
        loop {
            tuples.push(cur.clone());
            let mut p = 0;
            while p < excitations {
                let cap = if p + 1 < excitations { cur[p + 1] } else { atoms };
                if cur[p] + 1 < cap {
                    cur[p] += 1;
                    for (q, slot) in cur.iter_mut().enumerate().take(p) {
                        *slot = q;
                    }
                    break;
                }
                p += 1;
            }
            if p == excitations {
                break;
            }
        }
        debug_assert_eq!(tuples.len(), dim);
        Ok(TupleBasis { atoms, excitations, tuples, binom })
    }

    pub fn dim(&self) -> usize {
        self.tuples.len()
    }

    /// Position of a sorted tuple in the basis.
    pub fn rank(&self, tuple: &[usize]) -> usize {
        tuple.iter().enumerate().map(|(k, &c)| self.binom[c][k + 1]).sum()
    }

    /// Calls `f(b, i, j)` for every neighbor `b` reached from tuple `a` by
    /// replacing excitation `j ∈ a` with `i ∉ a`.
    pub fn for_each_hop(&self, a: usize, mut f: impl FnMut(usize, usize, usize)) {
        let tup = &self.tuples[a];
        let mut buf = tup.clone();
        for p in 0..tup.len() {
            let j = tup[p];
            for i in 0..self.atoms {
                if tup.binary_search(&i).is_ok() {
                    continue;
                }
                buf.copy_from_slice(tup);
                buf[p] = i;
                buf.sort_unstable();
                f(self.rank(&buf), i, j);
            }
        }
    }
}

pub fn check_guard(atoms: usize, excitations: usize) -> Result<usize> {
    if excitations == 0 || excitations > atoms {
        return Err(Error::invalid(format!(
            "excitation number {excitations} must lie in 1..={atoms}"
        )));
    }
    let dim = binomial(atoms, excitations);
    if excitations > MAX_EXCITATIONS || dim > DIMENSION_GUARD {
        return Err(Error::DimensionGuard {
            dim,
            limit: DIMENSION_GUARD,
            atoms,
            excitations,
        });
    }
    Ok(dim)
}

/// Labels of the rows of an effective Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    Tuples(TupleBasis),
    /// `2N` amplitudes: excited states `e_j` first, then storage states `s_j`.
    ExcitedStorage { atoms: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Tuples(t) => t.dim(),
            Basis::ExcitedStorage { atoms } => 2 * atoms,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub matrix: CMat,
    pub excitations: usize,
    pub basis: Basis,
    pub source: Source,
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest `|H − Hᵀ|` entry.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).norm());
            }
        }
        worst
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(crate::linalg::matvec(&self.matrix, x))
    }
}

/// Dense `n`-excitation block built from the single-particle matrix.
pub fn build_block_hamiltonian(h: &SingleParticle, excitations: usize) -> Result<EffectiveHamiltonian> {
    let basis = TupleBasis::new(h.n, excitations)?;
    let dim = basis.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::Unsupported(format!(
            "dense block of dimension {dim} exceeds {DENSE_LIMIT}; use the matrix-free operator"
        )));
    }
    let matrix = if excitations == 1 {
        h.to_matrix()
    } else {
        let rows: Vec<Vec<(usize, C64)>> = (0..dim)
            .into_par_iter()
            .map(|a| {
                let mut row = Vec::with_capacity(1 + excitations * h.n);
                let diag = basis.tuples[a].iter().map(|&i| h.at(i, i)).sum();
                row.push((a, diag));
                basis.for_each_hop(a, |b, i, j| row.push((b, h.at(j, i))));
                row
            })
            .collect();
        let mut m = Mat::zeros(dim, dim);
        for (a, row) in rows.into_iter().enumerate() {
            for (b, v) in row {
                m[(a, b)] = v;
            }
        }
        m
    };
    Ok(EffectiveHamiltonian {
        matrix,
        excitations,
        basis: Basis::Tuples(basis),
        source: h.source,
    })
}

/// Free-space single-excitation Hamiltonian of an array.
pub fn free_space_hamiltonian(array: &crate::AtomArray) -> Result<EffectiveHamiltonian> {
    let c = crate::greens::free_space_couplings(array)?;
    build_block_hamiltonian(&SingleParticle::from_couplings(&c), 1)
}
