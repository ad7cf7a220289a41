//! Named recipes. Each has a parameter schema, a short description of the
//! result it reproduces, and a runner producing tables plus a summary.

mod fiber;
mod free_space;
mod transfer;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use spinwave::fit::{fit_exponential, fit_power_law, ExponentialFit, PowerFit};

use crate::config::{Key, Kind, Params};
use crate::error::{CliError, Context, Result};
use crate::output::Outcome;
use crate::sweep::Runner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Bands,
    Modes,
    Scaling,
    Ring,
    DefectCavity,
    MultiExcitation,
    FiberConstants,
    Transport,
    Mirror,
    Eit,
    Storage,
    TransferMatrix,
    FieldMap,
    SelectiveRadiance,
}

pub const ALL: [Experiment; 14] = [
    Experiment::Bands,
    Experiment::Modes,
    Experiment::Scaling,
    Experiment::Ring,
    Experiment::DefectCavity,
    Experiment::MultiExcitation,
    Experiment::FiberConstants,
    Experiment::Transport,
    Experiment::Mirror,
    Experiment::Eit,
    Experiment::Storage,
    Experiment::TransferMatrix,
    Experiment::FieldMap,
    Experiment::SelectiveRadiance,
];

const POL: Kind = Kind::Choice(&["parallel", "transverse"]);
const GEOMETRY: Kind = Kind::Choice(&["chain", "ring", "square"]);
const EMISSION: Kind = Kind::Choice(&["independent", "collective"]);
const SPIN_WAVE: Kind = Kind::Choice(&["optimal-ramp", "gaussian"]);
const PROFILE: Kind = Kind::Choice(&["uniform", "ramped"]);

const fn key(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Key {
    Key {
        name,
        kind,
        default,
        help,
    }
}

const D: Key = key("d", Kind::Float, "0.3", "lattice constant in units of λ0");
const FIBER: [Key; 3] = [
    key("radius", Kind::Float, "1.2", "fiber radius, units of 1/k0"),
    key("permittivity", Kind::Float, "4.0", "fiber permittivity"),
    key(
        "atom_radius",
        Kind::Float,
        "1.8",
        "radial distance of the atoms, units of 1/k0",
    ),
];
const SPACING: Key = key(
    "spacing",
    Kind::Float,
    "0.25",
    "atom spacing along the fiber in guided wavelengths",
);

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Bands => "bands",
            Experiment::Modes => "modes",
            Experiment::Scaling => "scaling",
            Experiment::Ring => "ring",
            Experiment::DefectCavity => "defect-cavity",
            Experiment::MultiExcitation => "multi-excitation",
            Experiment::FiberConstants => "fiber-constants",
            Experiment::Transport => "transport",
            Experiment::Mirror => "mirror",
            Experiment::Eit => "eit",
            Experiment::Storage => "storage",
            Experiment::TransferMatrix => "transfer-matrix",
            Experiment::FieldMap => "field-map",
            Experiment::SelectiveRadiance => "selective-radiance",
        }
    }

    /// The result this recipe reproduces, recorded in the manifest.
    pub fn target(self) -> &'static str {
        match self {
            Experiment::Bands => "infinite chain: collective shift and decay across the Brillouin zone",
            Experiment::Modes => "finite array: single-excitation eigenmodes ranked by decay",
            Experiment::Scaling => "finite chain: most subradiant decay versus atom number and mode index, with ansatz comparison",
            Experiment::Ring => "ring: exponential suppression of the most subradiant decay",
            Experiment::DefectCavity => "graded-spacing chain: localized cavity mode decay versus length",
            Experiment::MultiExcitation => "multi-excitation subradiance: bosonic, exact and fermionized states",
            Experiment::FiberConstants => "nanofiber single-atom guided and non-guided constants",
            Experiment::Transport => "nanofiber chain: probe transmission, reflection and loss spectrum",
            Experiment::Mirror => "atomic mirror: optimal transmission, reflection and loss versus atom number",
            Experiment::Eit => "slow light: transparency window bandwidth-delay product versus atom number",
            Experiment::Storage => "stored spin-wave retrieval error versus atom number",
            Experiment::TransferMatrix => "periodic scatterers: transmission resonance widths near the band edge",
            Experiment::FieldMap => "intensity radiated by a chain eigenmode",
            Experiment::SelectiveRadiance => "largest guided to non-guided emission ratio versus atom number",
        }
    }

    pub fn schema(self) -> &'static [Key] {
        match self {
            Experiment::Bands => {
                const {
                    &[
                        D,
                        key("pol", POL, "\"parallel\"", "dipole orientation"),
                        key("points", Kind::Int, "201", "wave vectors across the zone"),
                    ]
                }
            }
            Experiment::Modes => {
                const {
                    &[
                        key("N", Kind::Int, "50", "atoms (side length for square)"),
                        D,
                        key("pol", POL, "\"parallel\"", "dipole orientation"),
                        key("geometry", GEOMETRY, "\"chain\"", "array geometry"),
                    ]
                }
            }
            Experiment::Scaling => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[20, 40, 80, 160]",
                            "chain lengths for the size scaling",
                        ),
                        key(
                            "N",
                            Kind::Int,
                            "50",
                            "chain length for the mode-index scaling",
                        ),
                        key("xi_max", Kind::Int, "5", "largest mode index"),
                        D,
                        key("pol", POL, "\"parallel\"", "dipole orientation"),
                    ]
                }
            }
            Experiment::Ring => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30]",
                            "ring sizes",
                        ),
                        D,
                        key(
                            "pol",
                            POL,
                            "\"transverse\"",
                            "dipole orientation (transverse: normal to the ring)",
                        ),
                    ]
                }
            }
            Experiment::DefectCavity => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[30, 45, 60, 75, 90, 105, 120, 135, 150]",
                            "chain lengths",
                        ),
                        key("d_max", Kind::Float, "0.4", "outer spacing in units of λ0"),
                        key(
                            "ratio",
                            Kind::Float,
                            "0.75",
                            "central to outer spacing ratio",
                        ),
                        key("pol", POL, "\"parallel\"", "dipole orientation"),
                        key(
                            "localization",
                            Kind::Float,
                            "0.5",
                            "least weight in the middle third for a cavity mode",
                        ),
                    ]
                }
            }
            Experiment::MultiExcitation => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[10, 20, 30, 40, 50]",
                            "chain lengths for the two-excitation sweep",
                        ),
                        key(
                            "density_sizes",
                            Kind::IntList,
                            "[10, 15, 20]",
                            "chain lengths for the density sweep",
                        ),
                        key(
                            "max_excitations",
                            Kind::Int,
                            "4",
                            "largest excitation number in the density sweep",
                        ),
                        key(
                            "density_max",
                            Kind::Float,
                            "0.2",
                            "largest n/N used in the density fit",
                        ),
                        D,
                        key("pol", POL, "\"parallel\"", "dipole orientation"),
                    ]
                }
            }
            Experiment::FiberConstants => &FIBER,
            Experiment::Transport => {
                const {
                    &[
                        key("N", Kind::Int, "20", "atoms"),
                        SPACING,
                        key(
                            "model",
                            EMISSION,
                            "\"independent\"",
                            "non-guided emission model",
                        ),
                        key("half_width", Kind::Float, "4.0", "detuning range around J'"),
                        key("points", Kind::Int, "401", "detunings"),
                        FIBER[0],
                        FIBER[1],
                        FIBER[2],
                    ]
                }
            }
            Experiment::Mirror => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[10, 20, 30, 40, 50, 60]",
                            "atom numbers",
                        ),
                        key(
                            "model",
                            EMISSION,
                            "\"collective\"",
                            "non-guided emission model",
                        ),
                        key(
                            "half_width",
                            Kind::Float,
                            "3.0",
                            "detuning range around J' searched for minima",
                        ),
                        key(
                            "points",
                            Kind::Int,
                            "60000",
                            "scan points per minimum search",
                        ),
                        FIBER[0],
                        FIBER[1],
                        FIBER[2],
                    ]
                }
            }
            Experiment::Eit => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[25, 50, 100, 150, 200]",
                            "atom numbers",
                        ),
                        key(
                            "model",
                            EMISSION,
                            "\"independent\"",
                            "non-guided emission model",
                        ),
                        key("omega_c", Kind::Float, "0.2", "control Rabi frequency"),
                        SPACING,
                        FIBER[0],
                        FIBER[1],
                        FIBER[2],
                    ]
                }
            }
            Experiment::Storage => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[50, 75, 100, 150, 200]",
                            "atom numbers",
                        ),
                        key(
                            "model",
                            EMISSION,
                            "\"collective\"",
                            "non-guided emission model",
                        ),
                        key(
                            "spin_wave",
                            SPIN_WAVE,
                            "\"optimal-ramp\"",
                            "stored spin wave",
                        ),
                        key("profile", PROFILE, "\"uniform\"", "control profile"),
                        key(
                            "omega_c",
                            Kind::Float,
                            "1.0",
                            "uniform control Rabi frequency",
                        ),
                        key(
                            "ramp_base",
                            Kind::Float,
                            "0.005",
                            "ramped control base amplitude",
                        ),
                        SPACING,
                        FIBER[0],
                        FIBER[1],
                        FIBER[2],
                    ]
                }
            }
            Experiment::TransferMatrix => {
                const {
                    &[
                        key("zeta", Kind::Float, "1.0", "single-scatterer strength"),
                        key("sizes", Kind::IntList, "[50, 100, 200]", "cells"),
                        key("xi_max", Kind::Int, "3", "resonances per size"),
                        key(
                            "points",
                            Kind::Int,
                            "2001",
                            "phases in the spectrum of the first size",
                        ),
                    ]
                }
            }
            Experiment::FieldMap => {
                const {
                    &[
                        key("N", Kind::Int, "50", "atoms"),
                        D,
                        key("pol", POL, "\"parallel\"", "dipole orientation"),
                        key("xi", Kind::Int, "1", "mode index, 1 = most subradiant"),
                        key(
                            "offset",
                            Kind::Float,
                            "5.0",
                            "plane distance from the chain in lattice constants",
                        ),
                        key(
                            "extent",
                            Kind::Float,
                            "10.0",
                            "half-width across and margin along the chain in lattice constants",
                        ),
                        key("grid", Kind::Int, "81", "samples per axis"),
                    ]
                }
            }
            Experiment::SelectiveRadiance => {
                const {
                    &[
                        key(
                            "sizes",
                            Kind::IntList,
                            "[50, 75, 100, 150, 200]",
                            "atom numbers",
                        ),
                        key("omega_c", Kind::Float, "4.0", "control Rabi frequency"),
                        SPACING,
                        FIBER[0],
                        FIBER[1],
                        FIBER[2],
                    ]
                }
            }
        }
    }

    /// Range checks beyond types; messages name the offending field.
    pub fn validate(self, p: &Params) -> Result<()> {
        for k in self.schema() {
            let bad = |why: &str| Err(CliError::schema(format!("parameters.{}: {why}", k.name)));
            match (k.name, k.kind) {
                (_, Kind::Float) if !(p.float(k.name) > 0.0) && k.name != "offset" => {
                    return bad("must be positive")
                }
                ("N" | "points" | "grid" | "xi" | "xi_max" | "max_excitations", Kind::Int)
                    if p.int(k.name) == 0 =>
                {
                    return bad("must be at least 1")
                }
                (_, Kind::IntList) if p.ints(k.name).contains(&0) => {
                    return bad("entries must be at least 1")
                }
                _ => {}
            }
        }
        let guard = |name: &str, limit: usize| -> Result<()> {
            let worst = if self
                .schema()
                .iter()
                .any(|k| k.name == name && k.kind == Kind::IntList)
            {
                p.ints(name).into_iter().max().unwrap_or(0)
            } else {
                p.int(name)
            };
            if worst > limit {
                return Err(CliError::schema(format!(
                    "parameters.{name}: {worst} exceeds the limit {limit}"
                )));
            }
            Ok(())
        };
        match self {
            Experiment::Modes => {
                guard(
                    "N",
                    if p.text("geometry") == "square" {
                        40
                    } else {
                        2000
                    },
                )?;
                if p.text("geometry") == "ring" && p.int("N") < 3 {
                    return Err(CliError::schema(
                        "parameters.N: a ring needs at least 3 atoms",
                    ));
                }
            }
            Experiment::Scaling => {
                guard("sizes", 2000)?;
                guard("N", 2000)?;
                if p.int("xi_max") > p.int("N") {
                    return Err(CliError::schema("parameters.xi_max: exceeds N"));
                }
            }
            Experiment::Ring => {
                guard("sizes", 2000)?;
                if p.ints("sizes").iter().any(|&n| n < 3) {
                    return Err(CliError::schema(
                        "parameters.sizes: a ring needs at least 3 atoms",
                    ));
                }
            }
            Experiment::DefectCavity => {
                guard("sizes", 2000)?;
                if p.ints("sizes").iter().any(|&n| n < 6) {
                    return Err(CliError::schema(
                        "parameters.sizes: the cavity needs at least 6 atoms",
                    ));
                }
                if p.float("localization") >= 1.0 {
                    return Err(CliError::schema("parameters.localization: must be below 1"));
                }
            }
            Experiment::MultiExcitation => {
                if p.ints("sizes").iter().any(|&n| n < 3) {
                    return Err(CliError::schema("parameters.sizes: need at least 3 atoms"));
                }
                guard("max_excitations", spinwave::hamiltonian::MAX_EXCITATIONS)?;
                if p.int("max_excitations") < 2 {
                    return Err(CliError::schema(
                        "parameters.max_excitations: must be at least 2",
                    ));
                }
                for n in p.ints("sizes") {
                    spinwave::hamiltonian::check_guard(n, 2)
                        .map_err(|e| CliError::schema(format!("parameters.sizes: {e}")))?;
                }
                for n in p.ints("density_sizes") {
                    for k in 2..=p.int("max_excitations").min(n.saturating_sub(1)) {
                        spinwave::hamiltonian::check_guard(n, k).map_err(|e| {
                            CliError::schema(format!("parameters.density_sizes: {e}"))
                        })?;
                    }
                }
            }
            Experiment::Transport => guard("N", 2000)?,
            Experiment::Mirror
            | Experiment::Eit
            | Experiment::Storage
            | Experiment::SelectiveRadiance => guard("sizes", 1000)?,
            Experiment::TransferMatrix => {
                if p.ints("sizes").iter().any(|&n| 4 * p.int("xi_max") > n) {
                    return Err(CliError::schema(
                        "parameters.xi_max: needs 4·xi_max ≤ every size",
                    ));
                }
            }
            Experiment::FieldMap => {
                guard("N", 2000)?;
                guard("grid", 1000)?;
                if p.int("xi") > p.int("N") {
                    return Err(CliError::schema("parameters.xi: exceeds N"));
                }
            }
            Experiment::Bands | Experiment::FiberConstants => {}
        }
        Ok(())
    }

    pub fn run(self, p: &Params, runner: &Runner) -> Result<Outcome> {
        match self {
            Experiment::Bands => free_space::bands(p),
            Experiment::Modes => free_space::modes(p),
            Experiment::Scaling => free_space::scaling(p, runner),
            Experiment::Ring => free_space::ring(p, runner),
            Experiment::DefectCavity => free_space::defect_cavity(p, runner),
            Experiment::MultiExcitation => free_space::multi_excitation(p, runner),
            Experiment::FieldMap => free_space::field_map(p),
            Experiment::FiberConstants => fiber::constants(p),
            Experiment::Transport => fiber::transport(p),
            Experiment::Mirror => fiber::mirror(p, runner),
            Experiment::Eit => fiber::eit(p, runner),
            Experiment::Storage => fiber::storage(p, runner),
            Experiment::SelectiveRadiance => fiber::selective_radiance(p, runner),
            Experiment::TransferMatrix => transfer::transfer_matrix(p, runner),
        }
    }
}

impl FromStr for Experiment {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        ALL.iter().copied().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ALL.iter().map(|e| e.name()).collect();
            CliError::schema(format!(
                "experiment: unknown name `{s}` (expected one of: {})",
                names.join(", ")
            ))
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Experiment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Power-law fit, or `None` with fewer than four points.
fn power(x: &[f64], y: &[f64]) -> Result<Option<PowerFit<f64>>> {
    if x.len() < 4 {
        return Ok(None);
    }
    fit_power_law(x, y).in_module("fit").map(Some)
}

fn exponential(x: &[f64], y: &[f64]) -> Result<Option<ExponentialFit<f64>>> {
    if x.len() < 4 {
        return Ok(None);
    }
    fit_exponential(x, y).in_module("fit").map(Some)
}

/// Prefactor `A` of `y = A x^p` for a fixed exponent, fitted in log space.
fn fixed_prefactor(x: &[f64], y: &[f64], exponent: f64) -> f64 {
    let mean = x
        .iter()
        .zip(y)
        .map(|(x, y)| y.ln() - exponent * x.ln())
        .sum::<f64>()
        / x.len() as f64;
    mean.exp()
}

fn counts(v: &[usize]) -> Vec<f64> {
    v.iter().map(|&n| n as f64).collect()
}
