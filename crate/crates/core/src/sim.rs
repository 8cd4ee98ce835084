//! Time-stepping driver: composes the analytic test cases, the dimensional
//! splittings and the staggered-grid remaps into full runs, collecting the
//! per-step statistics the experiment harness reports.
//!
//! The driver owns the velocity time-sampling rule (midpoint of each step
//! by default), always transports the density unlimited, and lets every
//! tracer choose its own limiter flag and vertical placement. One density
//! solve per step feeds all tracers.

use crate::cpgrid::{build_shifted_mesh, cp_tracer_step, remap_density_to_shifted, ShiftedMesh};
use crate::diagnostics::{l2_error, mass_budget, RunStats, VariableStats};
use crate::error::{Result, TransportError};
use crate::field::{CellField, SchemeConfig, VelocitySampling};
use crate::mesh::Mesh;
use crate::scalar::Real;
use crate::splitting2d::{
    cosmic_density_step, cosmic_tracer_step, swift_advective_step, swift_density_step,
    swift_tracer_step,
};
use crate::splitting3d::{
    cosmic3d_density_step, cosmic3d_tracer_step, swift3d_density_step, swift3d_tracer_step,
};
use crate::testcases::{density_field, tracer_field, velocity_at, CaseId, DensityProfile, TracerProfile};

/// Dimensional splitting selector.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scheme {
    Cosmic,
    Swift,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Cosmic => "cosmic",
            Scheme::Swift => "swift",
        }
    }
}

/// What the run transports.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Form {
    /// Density only.
    Density,
    /// Density plus consistently coupled mixing ratios.
    Tracer,
    /// Mixing ratios in advective form (no density; 2D SWIFT only).
    Advective,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Density => "density",
            Form::Tracer => "tracer",
            Form::Advective => "advective",
        }
    }
}

impl CaseId {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::Constant2d => "constant2d",
            CaseId::NonDivergent2d => "nondivergent2d",
            CaseId::Divergent2d => "divergent2d",
            CaseId::Deformational3d => "deformational3d",
        }
    }
}

/// One tracer requested of a run.
#[derive(Clone, Debug)]
pub struct TracerSetup {
    pub name: String,
    pub profile: TracerProfile,
    pub limited: bool,
    /// Hold the tracer on the vertically shifted (Charney-Phillips) mesh.
    /// 3D SWIFT tracer runs only.
    pub staggered: bool,
}

/// Everything that defines a run except the mesh and the tracer list.
#[derive(Clone, Copy, Debug)]
pub struct RunSpec {
    pub case: CaseId,
    pub density: DensityProfile,
    pub scheme: Scheme,
    pub form: Form,
    pub sampling: VelocitySampling,
    pub dt: f64,
    pub steps: usize,
}

/// Number of steps covering `end_time` with step `dt`; partial final steps
/// are refused because they would change every reported statistic.
pub fn step_count(end_time: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(end_time > 0.0) {
        return Err(TransportError::UnsupportedConfig(format!(
            "need positive dt and end time, got dt = {dt}, end time = {end_time}"
        )));
    }
    let k = (end_time / dt).round();
    if k < 1.0 || (end_time - k * dt).abs() > 1e-9 * end_time.max(dt) {
        return Err(TransportError::NonIntegerStepCount { end_time, dt });
    }
    Ok(k as usize)
}

/// A tracer's live state: its configuration, current field and the initial
/// field kept as the error reference.
#[derive(Clone, Debug)]
pub struct TracerState<T> {
    pub setup: TracerSetup,
    pub field: CellField<T>,
    pub initial: CellField<T>,
    cfg: SchemeConfig,
}

/// A run in progress. Construct with [`Simulation::new`], then either call
/// [`Simulation::step`] manually or drive to completion with
/// [`Simulation::run_to_end`] / [`Simulation::run_with`].
pub struct Simulation<T: Real> {
    spec: RunSpec,
    mesh: Mesh<T>,
    cp: Option<ShiftedMesh<T>>,
    rho: CellField<T>,
    rho_initial: CellField<T>,
    tracers: Vec<TracerState<T>>,
    step_index: usize,
    c_max: f64,
    min_widths: Vec<f64>,
    rho_series: VariableStats,
    tracer_series: Vec<VariableStats>,
}

impl<T: Real> Simulation<T> {
    pub fn new(spec: RunSpec, mesh: Mesh<T>, tracers: Vec<TracerSetup>) -> Result<Self> {
        let ndim = mesh.ndim();
        if ndim != spec.case.ndim() {
            return Err(TransportError::DimensionMismatch(format!(
                "case {} needs a {}D mesh, got {}D",
                spec.case.as_str(),
                spec.case.ndim(),
                ndim
            )));
        }
        if !(spec.dt > 0.0) {
            return Err(TransportError::UnsupportedConfig(format!(
                "dt must be positive, got {}",
                spec.dt
            )));
        }
        if spec.form == Form::Advective && (ndim != 2 || spec.scheme != Scheme::Swift) {
            return Err(TransportError::UnsupportedConfig(
                "advective form is available for 2D SWIFT runs only".into(),
            ));
        }
        if spec.form == Form::Density && !tracers.is_empty() {
            return Err(TransportError::UnsupportedConfig(
                "density-form runs take no tracers".into(),
            ));
        }
        if spec.form != Form::Density && tracers.is_empty() {
            return Err(TransportError::UnsupportedConfig(
                "tracer and advective runs need at least one tracer".into(),
            ));
        }
        let any_staggered = tracers.iter().any(|t| t.staggered);
        if any_staggered && (ndim != 3 || spec.scheme != Scheme::Swift || spec.form != Form::Tracer)
        {
            return Err(TransportError::UnsupportedConfig(
                "staggered tracers need a 3D SWIFT tracer run".into(),
            ));
        }
        let cp = if any_staggered {
            Some(build_shifted_mesh(&mesh)?)
        } else {
            None
        };

        let rho = density_field(spec.density, &mesh)?;
        let mut states = Vec::with_capacity(tracers.len());
        for setup in tracers {
            let target = if setup.staggered {
                &cp.as_ref().unwrap().shifted
            } else {
                &mesh
            };
            let field = tracer_field(setup.profile, target)?;
            let cfg = SchemeConfig {
                limiter: setup.limited,
                sampling: spec.sampling,
                ..SchemeConfig::default()
            };
            states.push(TracerState {
                setup,
                field: field.clone(),
                initial: field,
                cfg,
            });
        }

        let min_widths = (0..ndim)
            .map(|d| {
                mesh.widths(d)
                    .iter()
                    .map(|w| w.to_f64().unwrap())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();

        let mut sim = Simulation {
            rho_initial: rho.clone(),
            rho,
            spec,
            mesh,
            cp,
            tracers: states,
            step_index: 0,
            c_max: 0.0,
            min_widths,
            rho_series: VariableStats::new("rho"),
            tracer_series: Vec::new(),
        };
        sim.tracer_series = sim
            .tracers
            .iter()
            .map(|t| VariableStats::new(t.setup.name.clone()))
            .collect();
        sim.record();
        Ok(sim)
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    /// The shifted companion mesh, when any tracer is staggered.
    pub fn shifted_mesh(&self) -> Option<&Mesh<T>> {
        self.cp.as_ref().map(|cp| &cp.shifted)
    }

    pub fn rho(&self) -> &CellField<T> {
        &self.rho
    }

    pub fn tracers(&self) -> &[TracerState<T>] {
        &self.tracers
    }

    pub fn spec(&self) -> &RunSpec {
        &self.spec
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.spec.dt
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    /// Advances one step of length dt. Errors carry the failing step number.
    pub fn step(&mut self) -> Result<()> {
        let failing = self.step_index + 1;
        self.step_inner().map_err(|e| TransportError::StepFailed {
            step: failing,
            source: Box::new(e),
        })?;
        self.step_index += 1;
        self.record();
        Ok(())
    }

    fn step_inner(&mut self) -> Result<()> {
        let t = self.time();
        let dt = self.spec.dt;
        let t_sample = match self.spec.sampling {
            VelocitySampling::StepStart => t,
            VelocitySampling::Midpoint => t + 0.5 * dt,
            VelocitySampling::StepEnd => t + dt,
        };
        let v = velocity_at(self.spec.case, t_sample, &self.mesh)?;
        for (d, f) in v.iter().enumerate() {
            let c = f.max_abs().to_f64().unwrap() * dt / self.min_widths[d];
            self.c_max = self.c_max.max(c);
        }
        let dt = T::lit(dt);
        // The density is always transported unlimited; the limiter is a
        // tracer-shaping device.
        let rho_cfg = SchemeConfig {
            limiter: false,
            sampling: self.spec.sampling,
            ..SchemeConfig::default()
        };

        if self.spec.form == Form::Advective {
            for tr in &mut self.tracers {
                tr.field = swift_advective_step(&tr.field, &v[0], &v[1], dt, &self.mesh, &tr.cfg)?;
            }
            return Ok(());
        }

        if self.mesh.ndim() == 2 {
            let res = match self.spec.scheme {
                Scheme::Cosmic => {
                    cosmic_density_step(&self.rho, &v[0], &v[1], dt, &self.mesh, &rho_cfg)?
                }
                Scheme::Swift => {
                    swift_density_step(&self.rho, &v[0], &v[1], dt, &self.mesh, &rho_cfg)?
                }
            };
            for tr in &mut self.tracers {
                let rm = match self.spec.scheme {
                    Scheme::Cosmic => cosmic_tracer_step(
                        &tr.field, &self.rho, &res, &v[0], &v[1], dt, &self.mesh, &tr.cfg,
                    )?,
                    Scheme::Swift => {
                        swift_tracer_step(&tr.field, &self.rho, &res, dt, &self.mesh, &tr.cfg)?
                    }
                };
                tr.field = rm.div(&res.rho_new);
            }
            self.rho = res.rho_new;
        } else {
            let res = match self.spec.scheme {
                Scheme::Cosmic => cosmic3d_density_step(
                    &self.rho, &v[0], &v[1], &v[2], dt, &self.mesh, &rho_cfg,
                )?,
                Scheme::Swift => swift3d_density_step(
                    &self.rho, &v[0], &v[1], &v[2], dt, &self.mesh, &rho_cfg,
                )?,
            };
            for tr in &mut self.tracers {
                if tr.setup.staggered {
                    tr.field = cp_tracer_step(
                        &tr.field,
                        &self.rho,
                        &res,
                        dt,
                        self.cp.as_ref().unwrap(),
                        &tr.cfg,
                    )?;
                } else {
                    let rm = match self.spec.scheme {
                        Scheme::Cosmic => cosmic3d_tracer_step(
                            &tr.field, &self.rho, &res, &v[0], &v[1], dt, &self.mesh, &tr.cfg,
                        )?,
                        Scheme::Swift => swift3d_tracer_step(
                            &tr.field, &self.rho, &res, dt, &self.mesh, &tr.cfg,
                        )?,
                    };
                    tr.field = rm.div(&res.rho_new);
                }
            }
            self.rho = res.rho_new;
        }
        Ok(())
    }

    /// Appends the current min/max/mass of every variable to the series.
    fn record(&mut self) {
        let to = |x: T| x.to_f64().unwrap();
        if self.spec.form != Form::Advective {
            let mass = to(mass_budget(&self.rho, &self.mesh));
            self.rho_series
                .push(to(self.rho.min()), to(self.rho.max()), mass);
        }
        for (tr, series) in self.tracers.iter().zip(&mut self.tracer_series) {
            let mass = match self.spec.form {
                Form::Advective => to(mass_budget(&tr.field, &self.mesh)),
                _ => {
                    if tr.setup.staggered {
                        let cp = self.cp.as_ref().unwrap();
                        let rho_s = remap_density_to_shifted(&self.rho, cp)
                            .expect("density remap cannot fail after construction");
                        to(mass_budget(&rho_s.mul(&tr.field), &cp.shifted))
                    } else {
                        to(mass_budget(&self.rho.mul(&tr.field), &self.mesh))
                    }
                }
            };
            series.push(to(tr.field.min()), to(tr.field.max()), mass);
        }
    }

    /// Runs to the configured step count, calling `hook` on the initial
    /// state and after every step (for snapshotting).
    pub fn run_with<F>(&mut self, mut hook: F) -> Result<RunStats>
    where
        F: FnMut(&Simulation<T>) -> Result<()>,
    {
        if self.step_index == 0 {
            hook(self)?;
        }
        while self.step_index < self.spec.steps {
            self.step()?;
            hook(self)?;
        }
        Ok(self.stats())
    }

    pub fn run_to_end(&mut self) -> Result<RunStats> {
        self.run_with(|_| Ok(()))
    }

    /// Assembles the report from the series so far. L2 errors compare the
    /// current fields against the initial condition, which is the analytic
    /// solution whenever the run spans a whole flow period.
    pub fn stats(&self) -> RunStats {
        let mut variables = Vec::new();
        if self.spec.form != Form::Advective {
            let mut s = self.rho_series.clone();
            s.l2_error = l2_error(&self.rho, &self.rho_initial, &self.mesh)
                .ok()
                .map(|e| e.to_f64().unwrap());
            variables.push(s);
        }
        for (tr, series) in self.tracers.iter().zip(&self.tracer_series) {
            let mesh = if tr.setup.staggered {
                &self.cp.as_ref().unwrap().shifted
            } else {
                &self.mesh
            };
            let mut s = series.clone();
            s.l2_error = l2_error(&tr.field, &tr.initial, mesh)
                .ok()
                .map(|e| e.to_f64().unwrap());
            variables.push(s);
        }
        RunStats {
            case: self.spec.case.as_str().into(),
            scheme: self.spec.scheme.as_str().into(),
            form: self.spec.form.as_str().into(),
            grid: (0..self.mesh.ndim()).map(|d| self.mesh.count(d)).collect(),
            dt: self.spec.dt,
            steps: self.spec.steps,
            end_time: self.spec.steps as f64 * self.spec.dt,
            c_max: self.c_max,
            variables,
        }
    }
}
