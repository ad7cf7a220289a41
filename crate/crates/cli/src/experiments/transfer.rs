use std::f64::consts::PI;

use spinwave::transfer::{band_edges, resonance_linewidths, spectrum, ScattererModel};

use crate::config::Params;
use crate::error::{Context, Result};
use crate::output::{Outcome, Table};
use crate::sweep::Runner;

pub fn transfer_matrix(p: &Params, runner: &Runner) -> Result<Outcome> {
    let zeta = p.float("zeta");
    let sizes = p.ints("sizes");
    let xi_max = p.int("xi_max");
    let rows = runner.sweep("linewidths", &sizes, |&n| {
        let model = ScattererModel::new(zeta, 1.0, n).in_module("transfer-matrix")?;
        resonance_linewidths(&model, xi_max).in_module("transfer-matrix")
    })?;
    let mut t = Table::new(
        "linewidths",
        &[
            "N",
            "xi",
            "phase",
            "fwhm",
            "analytic",
            "relative_deviation",
            "overlapping",
        ],
    );
    let mut worst = 0.0f64;
    for (n, res) in sizes.iter().zip(&rows) {
        for r in res {
            t.push(vec![
                (*n).into(),
                r.xi.into(),
                r.phase.into(),
                r.fwhm.into(),
                r.analytic.into(),
                r.relative_deviation.into(),
                usize::from(r.overlapping).into(),
            ]);
            worst = worst.max(r.relative_deviation.abs());
        }
    }

    // Spectrum of the first size across the lower band up to the gap.
    let model = ScattererModel::new(zeta, 1.0, sizes[0]).in_module("transfer-matrix")?;
    let (lower, _) = band_edges(zeta);
    let points = p.int("points").max(2);
    let phases: Vec<f64> = (0..points)
        .map(|i| 1e-6 + (lower.min(PI) - 1e-6) * i as f64 / (points - 1) as f64)
        .collect();
    let mut s = Table::new("spectrum", &["phase", "T", "R", "energy_defect"]);
    let mut defect = 0.0f64;
    for (phi, tt, rr) in spectrum(&model, &phases) {
        let e = 1.0 - tt - rr;
        defect = defect.max(e.abs());
        s.push(vec![phi.into(), tt.into(), rr.into(), e.into()]);
    }

    let mut out = Outcome::default();
    out.record("max_relative_deviation", worst);
    out.record("max_energy_defect", defect);
    out.record("band_edge", lower);
    out.tables.push(t);
    out.tables.push(s);
    Ok(out)
}
