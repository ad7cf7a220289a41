//! Intensity radiated by a single-excitation state.
//!
//! With the input field in vacuum, the positive-frequency field at `r` is
//! `E(r) ∝ Σ_j G0(r − r_j)·d̂ c_j`, and the intensity is `Σ_α |E_α|²`.

use crate::greens::{free_space_greens, MIN_SEPARATION};
use crate::{AtomArray, Error, Result, C64};
use rayon::prelude::*;

/// Field-intensity samples; `None` marks points too close to an atom.
pub fn field_intensity_map(
    coefficients: &[C64],
    array: &AtomArray,
    grid: &[[f64; 3]],
) -> Result<Vec<Option<f64>>> {
    if coefficients.len() != array.len() {
        return Err(Error::DimensionMismatch { expected: array.len(), got: coefficients.len() });
    }
    let dipole = array
        .dipole
        .vector()
        .ok_or_else(|| Error::invalid("intensity maps need a vector dipole"))?;
    grid.par_iter()
        .map(|&r| {
            let mut e = [C64::new(0.0, 0.0); 3];
            for (pos, &c) in array.positions.iter().zip(coefficients) {
                let disp = [r[0] - pos[0], r[1] - pos[1], r[2] - pos[2]];
                let dist = (disp[0] * disp[0] + disp[1] * disp[1] + disp[2] * disp[2]).sqrt();
                if dist < MIN_SEPARATION {
                    return Ok(None);
                }
                let g = free_space_greens(disp)?.apply(dipole);
                for a in 0..3 {
                    e[a] += g[a] * c;
                }
            }
            Ok(Some(e.iter().map(|v| v.norm_sqr()).sum()))
        })
        .collect()
}

/// Regular grid on the plane `x = x0`, spanning `y ∈ [y0, y1]`, `z ∈ [z0, z1]`.
pub fn plane_grid(x0: f64, y: (f64, f64), z: (f64, f64), ny: usize, nz: usize) -> Vec<[f64; 3]> {
    let lin = |(a, b): (f64, f64), n: usize, i: usize| {
        if n <= 1 {
            a
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(ny * nz);
    for iy in 0..ny {
        for iz in 0..nz {
            out.push([x0, lin(y, ny, iy), lin(z, nz, iz)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_chain;

    #[test]
    fn dipole_pattern() {
        let a = build_chain(1, 1.0, [1.0, 0.0, 0.0]).unwrap();
        let c = [C64::new(1.0, 0.0)];
        let r = 500.0;
        let pts = [[r, 0.0, 0.0], [0.0, r, 0.0], [0.0, 0.0, r]];
        let i = field_intensity_map(&c, &a, &pts).unwrap();
        let (axis, eq) = (i[0].unwrap(), i[1].unwrap());
        assert!(axis < 1e-4 * eq);
        assert!((i[2].unwrap() - eq).abs() < 1e-12 * eq);
    }

    #[test]
    fn inverse_square_far_field() {
        let a = build_chain(1, 1.0, [1.0, 0.0, 0.0]).unwrap();
        let c = [C64::new(1.0, 0.0)];
        let i = field_intensity_map(&c, &a, &[[0.0, 1e3, 1e3], [0.0, 2e3, 2e3]]).unwrap();
        let ratio = i[0].unwrap() / i[1].unwrap();
        assert!((ratio - 4.0).abs() < 1e-2);
    }

    #[test]
    fn coincident_points_skipped() {
        let a = build_chain(2, 1.0, [1.0, 0.0, 0.0]).unwrap();
        let c = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let i = field_intensity_map(&c, &a, &[[0.0, 0.0, 1.0], [0.3, 0.0, 0.0]]).unwrap();
        assert!(i[0].is_none());
        assert!(i[1].is_some());
    }
}
