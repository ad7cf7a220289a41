//! Atomic arrays.
//!
//! Conventions: chains run along `ẑ`, planar arrays (square lattice, ring) lie
//! in the `y–z` plane, so `x̂` is always the transverse direction. Cubic
//! lattices fill the octant starting at the origin.

use crate::{Error, Real, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeKind {
    Chain,
    Ring,
    Square,
    Cubic,
    DefectChain,
    FiberChain,
}

/// Dipole orientation shared by all atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dipole<T> {
    Vector([T; 3]),
    /// Radial with respect to a fiber axis; only meaningful for fiber chains.
    Radial(RadialTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialTag {
    Radial,
}

impl<T: Real> Dipole<T> {
    pub fn vector(&self) -> Option<[T; 3]> {
        match self {
            Dipole::Vector(v) => Some(*v),
            Dipole::Radial(_) => None,
        }
    }
}

/// Polarization relative to the array axis or plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Along the chain (`ẑ`).
    Parallel,
    /// Normal to the chain or to the array plane (`x̂`).
    Transverse,
}

impl Polarization {
    pub fn unit<T: Real>(self) -> [T; 3] {
        match self {
            Polarization::Parallel => [T::zero(), T::zero(), T::one()],
            Polarization::Transverse => [T::one(), T::zero(), T::zero()],
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "parallel" | "par" | "z" => Ok(Polarization::Parallel),
            "transverse" | "perp" | "x" => Ok(Polarization::Transverse),
            other => Err(Error::invalid(format!("unknown polarization `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomArray<T> {
    pub kind: LatticeKind,
    #[serde(rename = "N")]
    pub count: usize,
    /// Atoms per edge for square and cubic lattices, `count` otherwise.
    pub side: usize,
    #[serde(rename = "d")]
    pub lattice_constant: T,
    pub positions: Vec<[T; 3]>,
    pub dipole: Dipole<T>,
}

fn unit_vector<T: Real>(v: [T; 3]) -> Result<[T; 3]> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::invalid("dipole orientation must be a nonzero finite vector"));
    }
    Ok([v[0] / norm, v[1] / norm, v[2] / norm])
}

fn check_spacing<T: Real>(d: T) -> Result<()> {
    if d > T::zero() && d.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("lattice constant must be positive, got {d}")))
    }
}

/// `N` atoms at `z_j = j·d`, `j = 0..N`.
pub fn build_chain<T: Real>(n: usize, d: T, dipole: [T; 3]) -> Result<AtomArray<T>> {
    if n == 0 {
        return Err(Error::invalid("chain needs at least one atom"));
    }
    check_spacing(d)?;
    let positions = (0..n).map(|j| [T::zero(), T::zero(), T::count(j) * d]).collect();
    Ok(AtomArray {
        kind: LatticeKind::Chain,
        count: n,
        side: n,
        lattice_constant: d,
        positions,
        dipole: Dipole::Vector(unit_vector(dipole)?),
    })
}

/// Chain of atoms next to a fiber, dipoles radial to the fiber axis.
pub fn build_fiber_chain<T: Real>(n: usize, d: T) -> Result<AtomArray<T>> {
    let mut chain = build_chain(n, d, [T::one(), T::zero(), T::zero()])?;
    chain.kind = LatticeKind::FiberChain;
    chain.dipole = Dipole::Radial(RadialTag::Radial);
    Ok(chain)
}

/// `N` atoms on a circle in the `y–z` plane with adjacent chord length `d`.
pub fn build_ring<T: Real>(n: usize, d: T, dipole: [T; 3]) -> Result<AtomArray<T>> {
    if n < 3 {
        return Err(Error::invalid(format!("ring needs at least 3 atoms, got {n}")));
    }
    check_spacing(d)?;
    let radius = ring_radius(n, d);
    let positions = (0..n)
        .map(|j| {
            let phi = T::TAU() * T::count(j) / T::count(n);
            [T::zero(), radius * phi.cos(), radius * phi.sin()]
        })
        .collect();
    Ok(AtomArray {
        kind: LatticeKind::Ring,
        count: n,
        side: n,
        lattice_constant: d,
        positions,
        dipole: Dipole::Vector(unit_vector(dipole)?),
    })
}

/// Radius of the ring whose chord between neighbours is `d`.
pub fn ring_radius<T: Real>(n: usize, d: T) -> T {
    d / (T::lit(2.0) * (T::PI() / T::count(n)).sin())
}

/// `N × N` square lattice in the `y–z` plane. Atom `(a, b)` sits at index
/// `a·N + b` with `y = a·d`, `z = b·d`.
pub fn build_square<T: Real>(n: usize, d: T, dipole: [T; 3]) -> Result<AtomArray<T>> {
    if n == 0 {
        return Err(Error::invalid("square lattice needs N ≥ 1"));
    }
    check_spacing(d)?;
    let mut positions = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            positions.push([T::zero(), T::count(a) * d, T::count(b) * d]);
        }
    }
    Ok(AtomArray {
        kind: LatticeKind::Square,
        count: n * n,
        side: n,
        lattice_constant: d,
        positions,
        dipole: Dipole::Vector(unit_vector(dipole)?),
    })
}

/// `N × N × N` cubic lattice.
pub fn build_cubic<T: Real>(n: usize, d: T, dipole: [T; 3]) -> Result<AtomArray<T>> {
    if n == 0 {
        return Err(Error::invalid("cubic lattice needs N ≥ 1"));
    }
    check_spacing(d)?;
    let mut positions = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                positions.push([T::count(a) * d, T::count(b) * d, T::count(c) * d]);
            }
        }
    }
    Ok(AtomArray {
        kind: LatticeKind::Cubic,
        count: n * n * n,
        side: n,
        lattice_constant: d,
        positions,
        dipole: Dipole::Vector(unit_vector(dipole)?),
    })
}

/// Spacing that follows atom `i` (1-based) in a defect chain.
///
/// Inside the middle third, `N/3 ≤ i ≤ 2N/3` (integer division), the spacing
/// dips as `d_max + (d_min − d_max)·sin²(3πi/N)`; elsewhere it is `d_max`.
pub fn defect_spacing<T: Real>(i: usize, n: usize, d_max: T, ratio: T) -> T {
    let lo = n / 3;
    let hi = 2 * n / 3;
    if i < lo || i > hi {
        return d_max;
    }
    let s = (T::lit(3.0) * T::PI() * T::count(i) / T::count(n)).sin();
    d_max + (ratio * d_max - d_max) * s * s
}

/// Chain with a smooth spacing dip in the middle third, acting as a cavity
/// for the band-edge modes of the outer `d_max` sections.
pub fn build_defect_chain<T: Real>(
    n: usize,
    d_max: T,
    ratio: T,
    dipole: [T; 3],
) -> Result<AtomArray<T>> {
    if n == 0 {
        return Err(Error::invalid("defect chain needs at least one atom"));
    }
    check_spacing(d_max)?;
    if !(ratio > T::zero() && ratio < T::one()) {
        return Err(Error::invalid(format!("ratio must lie in (0, 1), got {ratio}")));
    }
    let mut positions = Vec::with_capacity(n);
    let mut z = T::zero();
    positions.push([T::zero(), T::zero(), z]);
    for i in 1..n {
        z += defect_spacing(i, n, d_max, ratio);
        positions.push([T::zero(), T::zero(), z]);
    }
    Ok(AtomArray {
        kind: LatticeKind::DefectChain,
        count: n,
        side: n,
        lattice_constant: d_max,
        positions,
        dipole: Dipole::Vector(unit_vector(dipole)?),
    })
}

pub fn distance<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

impl<T: Real> AtomArray<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Coordinate along the chain axis for one-dimensional arrays.
    pub fn axial(&self, i: usize) -> T {
        self.positions[i][2]
    }

    /// Smallest pairwise distance; `None` for a single atom.
    pub fn min_separation(&self) -> Option<T> {
        let mut best: Option<T> = None;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let r = distance(self.positions[i], self.positions[j]);
                best = Some(best.map_or(r, |b| b.min(r)));
            }
        }
        best
    }

    /// Distance from each atom to its nearest neighbour.
    pub fn nearest_neighbor_distances(&self) -> Vec<T> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| j != i)
                    .map(|j| distance(self.positions[i], self.positions[j]))
                    .fold(T::infinity(), T::min)
            })
            .collect()
    }

    /// Converts the array to another precision.
    pub fn cast<U: Real>(&self) -> AtomArray<U> {
        let conv = |x: T| U::lit(x.as_f64());
        AtomArray {
            kind: self.kind,
            count: self.count,
            side: self.side,
            lattice_constant: conv(self.lattice_constant),
            positions: self.positions.iter().map(|p| [conv(p[0]), conv(p[1]), conv(p[2])]).collect(),
            dipole: match self.dipole {
                Dipole::Vector(v) => Dipole::Vector([conv(v[0]), conv(v[1]), conv(v[2])]),
                Dipole::Radial(t) => Dipole::Radial(t),
            },
        }
    }
}
