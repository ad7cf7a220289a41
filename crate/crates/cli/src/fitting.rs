//! The `fit` subcommand: a power, exponential or Lorentzian law through two
//! columns of a CSV file.

use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use spinwave::fit::{
    fit_exponential, fit_lorentzian, fit_power_law, ExponentialFit, LorentzianFit, PowerFit,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Power,
    Exponential,
    Lorentzian,
}

impl FromStr for Law {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Law::Power),
            "exponential" => Ok(Law::Exponential),
            "lorentzian" => Ok(Law::Lorentzian),
            other => Err(CliError::schema(format!(
                "law: unknown `{other}` (expected power|exponential|lorentzian)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum FitReport {
    Power {
        rows: usize,
        #[serde(flatten)]
        fit: PowerFit<f64>,
    },
    Exponential {
        rows: usize,
        #[serde(flatten)]
        fit: ExponentialFit<f64>,
    },
    Lorentzian {
        rows: usize,
        #[serde(flatten)]
        fit: LorentzianFit<f64>,
    },
}

/// Column by header name or zero-based index.
fn column_index(headers: &csv::StringRecord, which: &str) -> Result<usize> {
    if let Some(i) = headers.iter().position(|h| h == which) {
        return Ok(i);
    }
    which
        .parse::<usize>()
        .ok()
        .filter(|&i| i < headers.len())
        .ok_or_else(|| {
            CliError::schema(format!(
                "column `{which}` not found (headers: {})",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
}

/// Reads two numeric columns; rows with an empty cell in either are skipped.
pub fn read_series(path: &Path, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    let headers = r.headers()?.clone();
    let (ix, iy) = (column_index(&headers, x)?, column_index(&headers, y)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let (a, b) = (
            rec.get(ix).unwrap_or("").trim(),
            rec.get(iy).unwrap_or("").trim(),
        );
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| {
                CliError::schema(format!(
                    "{} row {}: `{s}` is not a number",
                    path.display(),
                    line + 2
                ))
            })
        };
        xs.push(parse(a)?);
        ys.push(parse(b)?);
    }
    Ok((xs, ys))
}

/// Fits `law`; fewer than four rows is a usage error, a failed fit is numerical.
pub fn fit_series(x: &[f64], y: &[f64], law: Law) -> Result<FitReport> {
    if x.len() < 4 {
        return Err(CliError::schema(format!(
            "fit needs at least 4 rows, got {}",
            x.len()
        )));
    }
    let degenerate = |e: spinwave::Error| CliError::Degenerate(format!("degenerate data: {e}"));
    let rows = x.len();
    let report = match law {
        Law::Power => FitReport::Power {
            rows,
            fit: fit_power_law(x, y).map_err(degenerate)?,
        },
        Law::Exponential => FitReport::Exponential {
            rows,
            fit: fit_exponential(x, y).map_err(degenerate)?,
        },
        Law::Lorentzian => FitReport::Lorentzian {
            rows,
            fit: fit_lorentzian(x, y).map_err(degenerate)?,
        },
    };
    let finite = match &report {
        FitReport::Power { fit, .. } => fit.exponent.is_finite() && fit.prefactor.is_finite(),
        FitReport::Exponential { fit, .. } => {
            fit.decay_constant.is_finite() && fit.prefactor.is_finite()
        }
        FitReport::Lorentzian { fit, .. } => fit.center.is_finite() && fit.fwhm.is_finite(),
    };
    if !finite {
        return Err(CliError::Degenerate(
            "degenerate data: fit parameters are not finite".into(),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_gives_its_decay_constant() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * (-v / 5.0).exp()).collect();
        let FitReport::Exponential { fit, .. } = fit_series(&x, &y, Law::Exponential).unwrap()
        else {
            panic!("wrong law")
        };
        assert!((fit.decay_constant - 5.0).abs() < 1e-10);
        assert!((fit.prefactor - 3.0).abs() < 1e-10);
    }

    #[test]
    fn short_and_degenerate_series_are_rejected() {
        let e = fit_series(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], Law::Power).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = fit_series(&[1.0, 2.0, 3.0, 4.0], &[1.0, -2.0, 3.0, 4.0], Law::Power).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let e = fit_series(&[2.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0], Law::Exponential).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn report_serializes_with_law_tag() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.powi(-3)).collect();
        let json = serde_json::to_value(fit_series(&x, &y, Law::Power).unwrap()).unwrap();
        assert_eq!(json["law"], "power");
        assert!((json["exponent"].as_f64().unwrap() + 3.0).abs() < 1e-12);
        assert_eq!(json["rows"], 4);
    }
}
