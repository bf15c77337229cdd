//! Runs a validated [`Scenario`] and writes its outputs.

use std::path::{Path, PathBuf};

use waveguide_core::oracle::{compare, integrate, Integration, TruncatedLattice};
use waveguide_core::{intensity_map, IntegrationReport, IntensityMap, Topology};

use crate::config::{Mode, OutputFormat, Scenario};
use crate::output;
use crate::CliError;

/// Results of running a scenario in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    /// Closed-form map in `closed_form` and `compare` modes, oracle map in
    /// `oracle` mode.
    pub map: IntensityMap,
    pub report: Option<IntegrationReport>,
}

impl Execution {
    /// Whether a compare run stayed within `tolerance`. Always true for the
    /// other modes.
    pub fn passed(&self, tolerance: f64) -> bool {
        self.report.map_or(true, |r| r.max_abs_error <= tolerance)
    }
}

/// Oracle run on a lattice covering both the light cone of the excitation
/// and the output window.
fn oracle_run(scenario: &Scenario) -> Result<Integration, CliError> {
    let z_max = *scenario.z_grid.last().expect("validated grid is non-empty");
    let auto = TruncatedLattice::for_excitation(scenario.coupling, &scenario.excitation, z_max)?;
    let (lo, hi) = scenario.window;
    let span = match scenario.coupling.topology() {
        Topology::Infinite => (auto.j_min().min(lo), auto.j_max().max(hi)),
        Topology::SemiInfinite => (0, auto.j_max().max(hi)),
    };
    let lattice = TruncatedLattice::seeded(scenario.coupling, &scenario.excitation, span)?;
    Ok(integrate(&lattice, &scenario.z_grid, scenario.oracle_dz)?)
}

fn closed_form(scenario: &Scenario) -> Result<IntensityMap, CliError> {
    Ok(intensity_map(
        &scenario.coupling,
        &scenario.excitation,
        &scenario.z_grid,
        scenario.window,
    )?)
}

pub fn execute(scenario: &Scenario) -> Result<Execution, CliError> {
    match scenario.mode {
        Mode::ClosedForm => Ok(Execution {
            map: closed_form(scenario)?,
            report: None,
        }),
        Mode::Oracle => {
            let (lo, hi) = scenario.window;
            let snapshots = oracle_run(scenario)?
                .snapshots
                .iter()
                .map(|s| s.restrict(lo, hi).expect("lattice covers the window"))
                .collect();
            Ok(Execution {
                map: IntensityMap { snapshots },
                report: None,
            })
        }
        Mode::Compare => {
            let map = closed_form(scenario)?;
            let report = compare(&map.snapshots, &oracle_run(scenario)?)?;
            Ok(Execution {
                map,
                report: Some(report),
            })
        }
    }
}

/// `out.csv` -> `out.report.json`.
pub fn report_path(out: &Path) -> PathBuf {
    out.with_extension("report.json")
}

/// Executes `scenario`, writes the map to `out` and, in compare mode, the
/// report next to it. A compare run beyond tolerance still writes both files
/// before failing.
pub fn run(scenario: &Scenario, out: &Path) -> Result<Execution, CliError> {
    let execution = execute(scenario)?;
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    let body = match scenario.format {
        OutputFormat::Csv => output::map_csv(&execution.map),
        OutputFormat::Json => output::map_json(&scenario.name, &execution.map),
    };
    std::fs::write(out, body).map_err(io(out))?;
    if let Some(report) = &execution.report {
        let path = report_path(out);
        let passed = execution.passed(scenario.tolerance);
        let body = output::report_json(&scenario.name, report, scenario.tolerance, passed);
        std::fs::write(&path, body).map_err(io(&path))?;
        if !passed {
            return Err(CliError::Numerical(format!(
                "max |closed - oracle| = {:e} at j = {}, z = {} exceeds tolerance {:e}",
                report.max_abs_error, report.at_site, report.at_z, scenario.tolerance
            )));
        }
    }
    Ok(execution)
}
