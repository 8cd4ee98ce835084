//! Run configuration: the raw JSON form, defaults, and validation into a
//! fully resolved description. Every default matches the standard test
//! suite so a config can be as short as `{"case": "nondivergent2d"}`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;
use swift_transport::sim::{Form, Scheme};
use swift_transport::testcases::{CaseId, DensityProfile, TracerProfile};

/// The configuration file as written by the user; everything except the
/// case is optional.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: String,
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default)]
    pub form: Option<String>,
    #[serde(default)]
    pub limiter: Option<bool>,
    #[serde(default)]
    pub grid: Option<Vec<usize>>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub end_time: Option<f64>,
    #[serde(default)]
    pub density: Option<String>,
    #[serde(default)]
    pub tracer: Option<String>,
    #[serde(default)]
    pub staggering: Option<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub snapshots: Option<Vec<f64>>,
    #[serde(default)]
    pub convergence: Option<ConvergenceConfig>,
}

/// Optional convergence-study section: run the same configuration over a
/// list of grids and fit error-vs-spacing rates.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub grids: Vec<usize>,
    /// "fixed_courant" rescales dt with the spacing; "fixed_dt" keeps it.
    pub mode: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceMode {
    FixedCourant,
    FixedDt,
}

impl ConvergenceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ConvergenceMode::FixedCourant => "fixed_courant",
            ConvergenceMode::FixedDt => "fixed_dt",
        }
    }
}

/// A validated configuration with every field concrete.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub case: CaseId,
    pub scheme: Scheme,
    pub form: Form,
    pub limiter: bool,
    pub grid: Vec<usize>,
    pub dt: f64,
    pub end_time: f64,
    pub density: DensityProfile,
    pub tracer: TracerProfile,
    pub staggered: bool,
    pub output: PathBuf,
    pub snapshots: Vec<f64>,
    pub convergence: Option<(Vec<usize>, ConvergenceMode)>,
}

/// Plain-string echo of the resolved configuration, embedded in the stats
/// file so an output directory is self-describing.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub case: &'static str,
    pub scheme: &'static str,
    pub form: &'static str,
    pub limiter: bool,
    pub grid: Vec<usize>,
    pub dt: f64,
    pub end_time: f64,
    pub density: &'static str,
    pub tracer: &'static str,
    pub staggering: &'static str,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn density_name(p: DensityProfile) -> &'static str {
    match p {
        DensityProfile::ConstantRho => "constant",
        DensityProfile::SineRho => "sine",
        DensityProfile::LinearRho => "linear",
    }
}

pub fn tracer_name(p: TracerProfile) -> &'static str {
    match p {
        TracerProfile::SlottedCylinders => "slotted_cylinders",
        TracerProfile::SineTracer => "sine",
        TracerProfile::Step3d => "step",
        TracerProfile::Uniform => "uniform",
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| bad(format!("cannot parse {}: {e}", path.display())))
    }

    pub fn resolve(self) -> Result<Resolved, CliError> {
        let case = match self.case.as_str() {
            "constant2d" => CaseId::Constant2d,
            "nondivergent2d" => CaseId::NonDivergent2d,
            "divergent2d" => CaseId::Divergent2d,
            "deformational3d" => CaseId::Deformational3d,
            other => {
                return Err(bad(format!(
                    "unknown case {other:?}; expected constant2d, nondivergent2d, \
                     divergent2d or deformational3d"
                )))
            }
        };
        let ndim = case.ndim();

        let scheme = match self.scheme.as_deref() {
            None | Some("swift") => Scheme::Swift,
            Some("cosmic") => Scheme::Cosmic,
            Some(other) => {
                return Err(bad(format!(
                    "unknown scheme {other:?}; expected cosmic or swift"
                )))
            }
        };
        let form = match self.form.as_deref() {
            None | Some("tracer") => Form::Tracer,
            Some("density") => Form::Density,
            Some("advective") => Form::Advective,
            Some(other) => {
                return Err(bad(format!(
                    "unknown form {other:?}; expected density, tracer or advective"
                )))
            }
        };
        let density = match self.density.as_deref() {
            Some("constant") => DensityProfile::ConstantRho,
            Some("sine") => DensityProfile::SineRho,
            Some("linear") => DensityProfile::LinearRho,
            None => {
                if ndim == 3 {
                    DensityProfile::LinearRho
                } else {
                    DensityProfile::SineRho
                }
            }
            Some(other) => {
                return Err(bad(format!(
                    "unknown density {other:?}; expected constant, sine or linear"
                )))
            }
        };
        let tracer = match self.tracer.as_deref() {
            Some("slotted_cylinders") => TracerProfile::SlottedCylinders,
            Some("sine") => TracerProfile::SineTracer,
            Some("step") => TracerProfile::Step3d,
            Some("uniform") => TracerProfile::Uniform,
            None => {
                if ndim == 3 {
                    TracerProfile::Step3d
                } else {
                    TracerProfile::SlottedCylinders
                }
            }
            Some(other) => {
                return Err(bad(format!(
                    "unknown tracer {other:?}; expected slotted_cylinders, sine, \
                     step or uniform"
                )))
            }
        };
        let staggered = match self.staggering.as_deref() {
            None | Some("colocated") => false,
            Some("charney_phillips") => true,
            Some(other) => {
                return Err(bad(format!(
                    "unknown staggering {other:?}; expected colocated or \
                     charney_phillips"
                )))
            }
        };

        let grid = self.grid.unwrap_or_else(|| {
            if ndim == 3 {
                vec![64, 64, 64]
            } else {
                vec![128, 128]
            }
        });
        if grid.len() != ndim {
            return Err(bad(format!(
                "grid has {} entries but case {} is {}-dimensional",
                grid.len(),
                case.as_str(),
                ndim
            )));
        }
        if grid.iter().any(|&n| n < 4) {
            return Err(bad("grid counts must be at least 4".to_string()));
        }

        let dt = self.dt.unwrap_or(if ndim == 3 { 2.5 } else { 2.0 });
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(bad(format!("dt must be positive and finite, got {dt}")));
        }
        let end_time = self.end_time.unwrap_or(100.0);
        if !(end_time >= 0.0) || !end_time.is_finite() {
            return Err(bad(format!(
                "end_time must be non-negative and finite, got {end_time}"
            )));
        }

        let snapshots = self.snapshots.unwrap_or_default();
        for &t in &snapshots {
            if !(0.0..=end_time).contains(&t) {
                return Err(bad(format!(
                    "snapshot time {t} lies outside [0, {end_time}]"
                )));
            }
        }

        let convergence = match self.convergence {
            None => None,
            Some(c) => {
                let mode = match c.mode.as_str() {
                    "fixed_courant" => ConvergenceMode::FixedCourant,
                    "fixed_dt" => ConvergenceMode::FixedDt,
                    other => {
                        return Err(bad(format!(
                            "unknown convergence mode {other:?}; expected \
                             fixed_courant or fixed_dt"
                        )))
                    }
                };
                if c.grids.len() < 3 {
                    return Err(bad(format!(
                        "convergence study needs at least 3 grids, got {}",
                        c.grids.len()
                    )));
                }
                if c.grids.iter().any(|&n| n < 4) {
                    return Err(bad("convergence grids must be at least 4".to_string()));
                }
                Some((c.grids, mode))
            }
        };

        Ok(Resolved {
            case,
            scheme,
            form,
            limiter: self.limiter.unwrap_or(true),
            grid,
            dt,
            end_time,
            density,
            tracer,
            staggered,
            output: self.output.unwrap_or_else(|| PathBuf::from("out")),
            snapshots,
            convergence,
        })
    }
}

impl Resolved {
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            case: self.case.as_str(),
            scheme: self.scheme.as_str(),
            form: self.form.as_str(),
            limiter: self.limiter,
            grid: self.grid.clone(),
            dt: self.dt,
            end_time: self.end_time,
            density: density_name(self.density),
            tracer: tracer_name(self.tracer),
            staggering: if self.staggered {
                "charney_phillips"
            } else {
                "colocated"
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<Resolved, CliError> {
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        cfg.resolve()
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let r = parse(r#"{"case": "nondivergent2d"}"#).unwrap();
        assert_eq!(r.grid, vec![128, 128]);
        assert_eq!(r.dt, 2.0);
        assert_eq!(r.end_time, 100.0);
        assert!(r.limiter);
        assert_eq!(r.scheme, Scheme::Swift);
        assert_eq!(density_name(r.density), "sine");
        assert_eq!(tracer_name(r.tracer), "slotted_cylinders");
    }

    #[test]
    fn three_d_defaults() {
        let r = parse(r#"{"case": "deformational3d"}"#).unwrap();
        assert_eq!(r.grid, vec![64, 64, 64]);
        assert_eq!(r.dt, 2.5);
        assert_eq!(density_name(r.density), "linear");
        assert_eq!(tracer_name(r.tracer), "step");
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(parse(r#"{"case": "warp9"}"#).is_err());
        assert!(parse(r#"{"case": "constant2d", "grid": [128]}"#).is_err());
        assert!(parse(r#"{"case": "constant2d", "dt": -1.0}"#).is_err());
        assert!(parse(r#"{"case": "constant2d", "snapshots": [999.0]}"#).is_err());
        assert!(parse(r#"{"case": "constant2d", "scheme": "upwind"}"#).is_err());
        // Unknown keys are configuration errors, not silently ignored.
        let e = serde_json::from_str::<RunConfig>(r#"{"case": "constant2d", "dx": 1}"#);
        assert!(e.is_err());
        // A convergence section needs at least three grids.
        assert!(parse(
            r#"{"case": "constant2d",
                "convergence": {"grids": [64, 128], "mode": "fixed_dt"}}"#
        )
        .is_err());
    }
}
