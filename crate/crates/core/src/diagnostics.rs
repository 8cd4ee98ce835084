//! Error norms, extrema, mass budgets and convergence-rate fits.
//!
//! Everything here is a fixed-order compensated reduction, so the numbers
//! written to run reports are bitwise reproducible across thread counts.

use crate::error::{Result, TransportError};
use crate::field::CellField;
use crate::mesh::Mesh;
use crate::scalar::Real;
use crate::sum::Accumulator;

/// Normalized volume-weighted L2 error:
/// sqrt(sum (q - q_true)^2 V) / sqrt(sum q_true^2 V).
///
/// Volume weighting keeps the norm meaningful on non-uniform meshes; on a
/// uniform mesh the weights cancel in the ratio.
pub fn l2_error<T: Real>(q: &CellField<T>, q_true: &CellField<T>, mesh: &Mesh<T>) -> Result<T> {
    if q.shape() != q_true.shape() || q.len() != mesh.n_cells() {
        return Err(TransportError::ShapeMismatch {
            expected: q_true.shape(),
            found: q.shape(),
        });
    }
    let vol = mesh.volumes();
    let mut num = Accumulator::new();
    let mut den = Accumulator::new();
    for ((&a, &b), &v) in q.data().iter().zip(q_true.data()).zip(vol) {
        let d = a - b;
        num.add(d * d * v);
        den.add(b * b * v);
    }
    let den = den.value();
    if !(den > T::zero()) {
        return Err(TransportError::ZeroReferenceNorm);
    }
    Ok((num.value() / den).sqrt())
}

/// Total of q times cell volume, accumulated in index order with
/// compensation.
pub fn mass_budget<T: Real>(q: &CellField<T>, mesh: &Mesh<T>) -> T {
    let mut acc = Accumulator::new();
    for (&x, &v) in q.data().iter().zip(mesh.volumes()) {
        acc.add(x * v);
    }
    acc.value()
}

/// Least-squares slope of log(error) against log(spacing). Recovers exact
/// power laws: errors proportional to dx^p yield p to roundoff.
pub fn fit_convergence_rate(spacings: &[f64], errors: &[f64]) -> Result<f64> {
    if spacings.len() != errors.len() || spacings.len() < 2 {
        return Err(TransportError::TooFewResolutions(
            spacings.len().min(errors.len()),
        ));
    }
    for (&h, &e) in spacings.iter().zip(errors) {
        if !(h > 0.0) || !(e > 0.0) {
            return Err(TransportError::UnsupportedConfig(format!(
                "convergence fit needs positive spacings and errors, got ({h}, {e})"
            )));
        }
    }
    let n = spacings.len() as f64;
    let xs: Vec<f64> = spacings.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - xbar) * (y - ybar);
        sxx += (x - xbar) * (x - xbar);
    }
    Ok(sxy / sxx)
}

/// Per-variable time series gathered over a run. All series have
/// `steps + 1` entries; index 0 is the initial condition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VariableStats {
    pub name: String,
    /// Instantaneous minimum at the end of each step.
    pub min: Vec<f64>,
    /// Instantaneous maximum at the end of each step.
    pub max: Vec<f64>,
    /// Conserved total: density-volume mass for the density, tracer mass
    /// for mixing ratios (and a plain field integral in advective form).
    pub mass: Vec<f64>,
    /// Largest relative departure of the mass series from its initial
    /// value.
    pub mass_drift: f64,
    /// End-of-run normalized L2 error against the analytic reference
    /// (the initial condition for the cyclic test flows); absent when no
    /// reference applies.
    pub l2_error: Option<f64>,
}

impl VariableStats {
    pub fn new(name: impl Into<String>) -> Self {
        VariableStats {
            name: name.into(),
            min: Vec::new(),
            max: Vec::new(),
            mass: Vec::new(),
            mass_drift: 0.0,
            l2_error: None,
        }
    }

    /// Appends one sample and refreshes the drift summary.
    pub fn push(&mut self, min: f64, max: f64, mass: f64) {
        self.min.push(min);
        self.max.push(max);
        self.mass.push(mass);
        let m0 = self.mass[0];
        let scale = if m0.abs() > 0.0 { m0.abs() } else { 1.0 };
        self.mass_drift = self.mass_drift.max((mass - m0).abs() / scale);
    }
}

/// Full report for one run: metadata plus the per-variable series.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunStats {
    pub case: String,
    pub scheme: String,
    pub form: String,
    /// Cell counts per direction.
    pub grid: Vec<usize>,
    pub dt: f64,
    pub steps: usize,
    pub end_time: f64,
    /// Largest per-direction facet Courant number seen over the run.
    pub c_max: f64,
    pub variables: Vec<VariableStats>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryKind;

    fn line_mesh(n: usize) -> Mesh<f64> {
        Mesh::uniform(&[[0.0, n as f64]], &[n], &[BoundaryKind::Periodic]).unwrap()
    }

    #[test]
    fn l2_error_basics() {
        let mesh = line_mesh(2);
        let qt = CellField::from_data(&mesh, vec![3.0, 4.0]).unwrap();
        let q0 = CellField::from_data(&mesh, vec![0.0, 0.0]).unwrap();
        // Equal fields: zero error.
        assert_eq!(l2_error(&qt, &qt, &mesh).unwrap(), 0.0);
        // Everything missing: error is exactly 1.
        assert!((l2_error(&q0, &qt, &mesh).unwrap() - 1.0).abs() < 1e-15);
        // Doubling: ||q_true|| in the numerator too.
        let q2 = CellField::from_data(&mesh, vec![6.0, 8.0]).unwrap();
        assert!((l2_error(&q2, &qt, &mesh).unwrap() - 1.0).abs() < 1e-15);
        // Zero reference is rejected.
        assert!(matches!(
            l2_error(&qt, &q0, &mesh),
            Err(TransportError::ZeroReferenceNorm)
        ));
    }

    #[test]
    fn l2_error_is_scale_invariant() {
        let mesh = line_mesh(16);
        let qt = CellField::from_cell_centers(&mesh, |x, _, _| 1.0 + (0.7 * x).sin());
        let q = CellField::from_cell_centers(&mesh, |x, _, _| 1.1 + (0.7 * x).sin().powi(2));
        let e1 = l2_error(&q, &qt, &mesh).unwrap();
        let a = 3.7;
        let qa = CellField::from_data(&mesh, q.data().iter().map(|x| a * x).collect()).unwrap();
        let qta = CellField::from_data(&mesh, qt.data().iter().map(|x| a * x).collect()).unwrap();
        let e2 = l2_error(&qa, &qta, &mesh).unwrap();
        assert!((e1 - e2).abs() < 1e-14);
    }

    #[test]
    fn mass_budget_examples() {
        let mesh = line_mesh(4);
        assert_eq!(mass_budget(&CellField::zeros(&mesh), &mesh), 0.0);
        assert_eq!(mass_budget(&CellField::ones(&mesh), &mesh), 4.0);
    }

    #[test]
    fn convergence_fit_recovers_power_laws() {
        let hs: [f64; 4] = [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0];
        let cubes: Vec<f64> = hs.iter().map(|&h| 0.3 * h.powi(3)).collect();
        assert!((fit_convergence_rate(&hs, &cubes).unwrap() - 3.0).abs() < 1e-12);
        let squares: Vec<f64> = hs.iter().map(|&h| 5.0 * h.powi(2)).collect();
        assert!((fit_convergence_rate(&hs, &squares).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            fit_convergence_rate(&[1.0], &[1.0]),
            Err(TransportError::TooFewResolutions(1))
        ));
        assert!(fit_convergence_rate(&[1.0, 0.5], &[1.0, -0.25]).is_err());
    }

    #[test]
    fn variable_stats_drift() {
        let mut v = VariableStats::new("rho");
        v.push(0.0, 1.0, 10.0);
        v.push(-0.1, 1.1, 10.0 + 1e-9);
        assert!((v.mass_drift - 1e-10).abs() < 1e-16);
        assert_eq!(v.min.len(), 2);
    }
}
