//! Executes a resolved configuration: builds the simulation, steps it with
//! snapshot hooks, and writes the statistics file, snapshots, and plots.

use std::fs;
use std::path::Path;

use serde::Serialize;

use swift_transport::diagnostics::RunStats;
use swift_transport::mesh::BoundaryKind;
use swift_transport::sim::{step_count, Form, RunSpec, Simulation, TracerSetup};
use swift_transport::{Mesh64, VelocitySampling};

use crate::config::{tracer_name, Resolved};
use crate::convergence::run_convergence;
use crate::output::{contour_levels, write_field_csv, write_field_svg};
use crate::CliError;

/// Relative mass drift beyond which the summary flags a variable.
pub const DRIFT_FLAG: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub name: String,
    pub final_min: f64,
    pub final_max: f64,
    pub l2_error: Option<f64>,
    pub mass_drift: f64,
    /// False when the relative mass drift exceeds 1e-12.
    pub conserved: bool,
}

#[derive(Serialize)]
struct StatsFile<'a> {
    config: crate::config::ConfigEcho,
    stats: &'a RunStats,
    summary: &'a [SummaryRow],
}

fn build_mesh(res: &Resolved) -> Result<Mesh64, CliError> {
    let (extents, boundaries): (Vec<[f64; 2]>, Vec<BoundaryKind>) = if res.case.ndim() == 3 {
        (
            vec![[-500.0, 500.0], [-500.0, 500.0], [0.0, 1000.0]],
            vec![
                BoundaryKind::Periodic,
                BoundaryKind::Periodic,
                BoundaryKind::Rigid,
            ],
        )
    } else {
        (
            vec![[-500.0, 500.0], [-500.0, 500.0]],
            vec![BoundaryKind::Periodic, BoundaryKind::Periodic],
        )
    };
    Mesh64::uniform(&extents, &res.grid, &boundaries)
        .map_err(|e| CliError::Config(format!("mesh: {e}")))
}

/// Maps each requested snapshot time to a step index, requiring it to sit
/// on a step boundary (a partial-step snapshot would not correspond to any
/// state the scheme produces).
fn snapshot_steps(res: &Resolved, steps: usize) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for &t in &res.snapshots {
        let k = if res.end_time == 0.0 {
            0.0
        } else {
            t / res.dt
        };
        let rounded = k.round();
        if (k - rounded).abs() > 1e-9 {
            return Err(CliError::Config(format!(
                "snapshot time {t} is not a multiple of dt = {}",
                res.dt
            )));
        }
        let idx = rounded as usize;
        if idx > steps {
            return Err(CliError::Config(format!(
                "snapshot time {t} is beyond the final step"
            )));
        }
        out.push(idx);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn write_snapshot(sim: &Simulation<f64>, res: &Resolved, dir: &Path) -> Result<(), CliError> {
    let t = sim.time();
    let tag = format!("t{t}");
    if res.form != Form::Advective {
        let path = dir.join(format!("snap_rho_{tag}.csv"));
        write_field_csv(&path, sim.mesh(), sim.rho())?;
        let levels = contour_levels(
            sim.rho().min(),
            sim.rho().max(),
            0.05,
            0.8,
        );
        write_field_svg(
            &dir.join(format!("plot_rho_{tag}.svg")),
            sim.mesh(),
            sim.rho(),
            &levels,
            &format!("rho t={t}s"),
        )?;
    }
    for trs in sim.tracers() {
        let mesh = if trs.setup.staggered {
            sim.shifted_mesh().expect("staggered tracer has a shifted mesh")
        } else {
            sim.mesh()
        };
        let name = &trs.setup.name;
        write_field_csv(&dir.join(format!("snap_{name}_{tag}.csv")), mesh, &trs.field)?;
        let levels = contour_levels(trs.field.min(), trs.field.max(), 0.1, 0.0);
        write_field_svg(
            &dir.join(format!("plot_{name}_{tag}.svg")),
            mesh,
            &trs.field,
            &levels,
            &format!("{name} t={t}s"),
        )?;
    }
    Ok(())
}

/// Runs one configuration. With an output directory, writes snapshots at
/// the configured times; without one (convergence sub-runs), only the
/// statistics are produced.
pub fn run_single(res: &Resolved, out_dir: Option<&Path>) -> Result<RunStats, CliError> {
    let mesh = build_mesh(res)?;
    let steps = if res.end_time == 0.0 {
        0
    } else {
        step_count(res.end_time, res.dt).map_err(|e| CliError::Config(e.to_string()))?
    };
    let snap_steps = snapshot_steps(res, steps)?;

    let tracers = if res.form == Form::Density {
        Vec::new()
    } else {
        vec![TracerSetup {
            name: if res.limiter { "m_lim" } else { "m" }.to_string(),
            profile: res.tracer,
            limited: res.limiter,
            staggered: res.staggered,
        }]
    };
    let spec = RunSpec {
        case: res.case,
        density: res.density,
        scheme: res.scheme,
        form: res.form,
        sampling: VelocitySampling::Midpoint,
        dt: res.dt,
        steps,
    };
    let mut sim =
        Simulation::new(spec, mesh, tracers).map_err(|e| CliError::Config(e.to_string()))?;

    let maybe_snap = |sim: &Simulation<f64>| -> Result<(), CliError> {
        if let Some(dir) = out_dir {
            if snap_steps.contains(&sim.step_index()) {
                write_snapshot(sim, res, dir)?;
            }
        }
        Ok(())
    };
    maybe_snap(&sim)?;
    while sim.step_index() < steps {
        sim.step().map_err(|e| CliError::Numerical(e.to_string()))?;
        maybe_snap(&sim)?;
    }
    Ok(sim.stats())
}

pub fn summarize(stats: &RunStats) -> Vec<SummaryRow> {
    stats
        .variables
        .iter()
        .map(|v| SummaryRow {
            name: v.name.clone(),
            final_min: *v.min.last().unwrap(),
            final_max: *v.max.last().unwrap(),
            l2_error: v.l2_error,
            mass_drift: v.mass_drift,
            conserved: v.mass_drift <= DRIFT_FLAG,
        })
        .collect()
}

fn print_summary(res: &Resolved, stats: &RunStats, summary: &[SummaryRow]) {
    let grid = stats
        .grid
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join("x");
    println!(
        "case {} scheme {} form {} tracer {} grid {} dt {} steps {} c_max {:.3}",
        stats.case,
        stats.scheme,
        stats.form,
        tracer_name(res.tracer),
        grid,
        stats.dt,
        stats.steps,
        stats.c_max
    );
    for row in summary {
        let l2 = row
            .l2_error
            .map(|e| format!("{e:.4e}"))
            .unwrap_or_else(|| "n/a".to_string());
        let flag = if row.conserved {
            ""
        } else {
            "  [MASS NOT CONSERVED]"
        };
        println!(
            "  {}: min {:.6} max {:.6} L2 {} mass drift {:.2e}{}",
            row.name, row.final_min, row.final_max, l2, row.mass_drift, flag
        );
    }
}

/// Entry point for a resolved configuration: a convergence study when the
/// config has one, otherwise a single run with outputs.
pub fn execute(res: &Resolved, quiet: bool) -> Result<(), CliError> {
    fs::create_dir_all(&res.output)?;
    if let Some((grids, mode)) = &res.convergence {
        let table = run_convergence(res, grids, *mode)?;
        let json = serde_json::to_string_pretty(&table)
            .map_err(|e| CliError::Config(format!("serialize rates: {e}")))?;
        fs::write(res.output.join("rates.json"), json + "\n")?;
        if !quiet {
            println!(
                "convergence ({}), grids {:?}",
                table.mode, table.grids
            );
            for v in &table.variables {
                let errs = v
                    .errors
                    .iter()
                    .map(|e| format!("{e:.3e}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                println!("  {}: rate {:.3} (errors {errs})", v.name, v.rate);
            }
        }
        return Ok(());
    }

    let stats = run_single(res, Some(&res.output))?;
    let summary = summarize(&stats);
    let file = StatsFile {
        config: res.echo(),
        stats: &stats,
        summary: &summary,
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::Config(format!("serialize stats: {e}")))?;
    fs::write(res.output.join("stats.json"), json + "\n")?;
    if !quiet {
        print_summary(res, &stats, &summary);
    }
    Ok(())
}
