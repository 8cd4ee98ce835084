//! Convergence studies: rerun one configuration over a list of grids,
//! either holding the Courant number fixed (dt scaled with the spacing)
//! or holding dt fixed, and fit error-vs-spacing rates.

use serde::Serialize;

use swift_transport::diagnostics::fit_convergence_rate;

use crate::config::{ConvergenceMode, Resolved};
use crate::runner::run_single;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub name: String,
    /// Normalized L2 error per grid, same order as `grids`.
    pub errors: Vec<f64>,
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatesTable {
    pub mode: &'static str,
    pub grids: Vec<usize>,
    pub spacings: Vec<f64>,
    pub variables: Vec<RateRow>,
}

/// Assembles a rates table from per-grid, per-variable errors. Split out
/// from the run loop so the fitting plumbing is testable with synthetic
/// errors.
pub fn rates_from_errors(
    mode: ConvergenceMode,
    grids: &[usize],
    spacings: &[f64],
    names: &[String],
    errors_by_grid: &[Vec<f64>],
) -> Result<RatesTable, CliError> {
    let mut variables = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let series: Vec<f64> = errors_by_grid.iter().map(|e| e[k]).collect();
        let rate = fit_convergence_rate(spacings, &series)
            .map_err(|e| CliError::Config(format!("rate fit for {name}: {e}")))?;
        variables.push(RateRow {
            name: name.clone(),
            errors: series,
            rate,
        });
    }
    Ok(RatesTable {
        mode: mode.as_str(),
        grids: grids.to_vec(),
        spacings: spacings.to_vec(),
        variables,
    })
}

/// Runs the study. The base configuration's first grid entry anchors the
/// Courant scaling: at grid n, fixed-Courant mode uses dt * base_n / n.
pub fn run_convergence(
    base: &Resolved,
    grids: &[usize],
    mode: ConvergenceMode,
) -> Result<RatesTable, CliError> {
    let ndim = base.case.ndim();
    let base_n = base.grid[0] as f64;
    let mut names: Vec<String> = Vec::new();
    let mut errors_by_grid: Vec<Vec<f64>> = Vec::new();
    for &n in grids {
        let dt = match mode {
            ConvergenceMode::FixedCourant => base.dt * base_n / n as f64,
            ConvergenceMode::FixedDt => base.dt,
        };
        let sub = Resolved {
            grid: vec![n; ndim],
            dt,
            snapshots: Vec::new(),
            convergence: None,
            ..base.clone()
        };
        let stats = run_single(&sub, None)?;
        let mut errs = Vec::new();
        let mut these_names = Vec::new();
        for v in &stats.variables {
            if let Some(e) = v.l2_error {
                these_names.push(v.name.clone());
                errs.push(e);
            }
        }
        if names.is_empty() {
            names = these_names;
        }
        errors_by_grid.push(errs);
    }
    // A variable solved exactly (e.g. constant density under constant
    // velocity) has zero errors and no meaningful rate; drop it rather
    // than refuse the whole study.
    let usable: Vec<usize> = (0..names.len())
        .filter(|&k| errors_by_grid.iter().all(|e| e[k] > 0.0))
        .collect();
    if usable.is_empty() {
        return Err(CliError::Config(
            "no variable has a nonzero error series to fit".to_string(),
        ));
    }
    let names: Vec<String> = usable.iter().map(|&k| names[k].clone()).collect();
    let errors_by_grid: Vec<Vec<f64>> = errors_by_grid
        .iter()
        .map(|e| usable.iter().map(|&k| e[k]).collect())
        .collect();
    let spacings: Vec<f64> = grids
        .iter()
        .map(|&n| {
            // All cases use a 1000 m domain extent per direction.
            1000.0 / n as f64
        })
        .collect();
    rates_from_errors(mode, grids, &spacings, &names, &errors_by_grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_quadratic_errors_fit_rate_two() {
        let grids = [64usize, 128, 256];
        let spacings: Vec<f64> = grids.iter().map(|&n| 1000.0 / n as f64).collect();
        let errors: Vec<Vec<f64>> = spacings.iter().map(|&h| vec![3.0 * h * h]).collect();
        let table = rates_from_errors(
            ConvergenceMode::FixedDt,
            &grids,
            &spacings,
            &["m".to_string()],
            &errors,
        )
        .unwrap();
        assert!((table.variables[0].rate - 2.0).abs() < 1e-12);
    }
}
