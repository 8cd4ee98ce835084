//! Analytic initial conditions and time-dependent velocity fields for the
//! standard transport test suite: constant advection, non-divergent and
//! divergent deformational flows in 2D, and a 3D deformational flow with
//! horizontal background wind. All scalar fields return to their initial
//! state at t = T, so the initial condition doubles as the reference
//! solution for error norms.
//!
//! The deformational fields use moving-frame coordinates
//! x' = (x + Lx/2) - u0 t, y' = (y + Ly/2) - u0 t in every horizontal trig
//! factor. With that choice (and equal grid spacings) the sampled discrete
//! divergence cancels exactly: each sin^2 facet difference reduces to a
//! product of centred sines times a common spacing factor, and the
//! coefficients sum to zero (1 - 1 in 2D, 2 - 1 - 1 in 3D).

use std::f64::consts::PI;

use crate::error::{Result, TransportError};
use crate::field::{CellField, DirFacetField};
use crate::mesh::{BoundaryKind, Mesh};
use crate::scalar::Real;

/// Background wind and deformational amplitude, m/s.
pub const U0: f64 = 10.0;
/// Duration of every test, s; also the period of the deformational flows.
pub const END_TIME: f64 = 100.0;

/// Flow field selector.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CaseId {
    Constant2d,
    NonDivergent2d,
    Divergent2d,
    Deformational3d,
}

/// Initial density selector.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DensityProfile {
    /// rho = 1.
    ConstantRho,
    /// rho = 0.8 + 0.2 sin(2 pi x / Lx) sin(2 pi y / Ly).
    SineRho,
    /// rho = 0.5 + 0.5 (1 - z / Lz).
    LinearRho,
}

/// Initial tracer selector.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TracerProfile {
    /// Two cylinders of radius 160 m at (-250, 0) and (250, 0) with value
    /// 1, each with a 50 m wide slot cut upward from the centre line.
    SlottedCylinders,
    /// m = 0.5 + 0.5 sin(2 pi x / Lx) sin(2 pi y / Ly).
    SineTracer,
    /// m = 1 where |x| < Lx/4 and |z - Lz/2| < 3 Lz / 10, else 0.
    Step3d,
    /// m = 1 everywhere: the consistency probe (a constant mixing ratio
    /// must stay constant under any flow).
    Uniform,
}

/// A complete experiment setup: flow plus initial profiles.
#[derive(Clone, Copy, Debug)]
pub struct TestCase {
    pub case: CaseId,
    pub density: DensityProfile,
    pub tracer: TracerProfile,
}

/// Selects which initial field [`init_field`] builds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Which {
    Density,
    Tracer,
}

impl CaseId {
    pub fn ndim(self) -> usize {
        match self {
            CaseId::Deformational3d => 3,
            _ => 2,
        }
    }
}

fn domain_lengths<T: Real>(mesh: &Mesh<T>) -> [f64; 3] {
    let mut l = [1.0f64; 3];
    for (d, li) in l.iter_mut().enumerate().take(mesh.ndim()) {
        let [a, b] = mesh.extent(d);
        *li = (b - a).to_f64().unwrap();
    }
    l
}

fn check_dim<T: Real>(mesh: &Mesh<T>, required: usize) -> Result<()> {
    if mesh.ndim() != required {
        return Err(TransportError::DimensionMismatch(format!(
            "test case needs a {required}D mesh, got {}D",
            mesh.ndim()
        )));
    }
    Ok(())
}

/// Samples an initial density at cell centres.
pub fn density_field<T: Real>(profile: DensityProfile, mesh: &Mesh<T>) -> Result<CellField<T>> {
    let [lx, ly, lz] = domain_lengths(mesh);
    match profile {
        DensityProfile::ConstantRho => Ok(CellField::constant(mesh, T::one())),
        DensityProfile::SineRho => Ok(CellField::from_cell_centers(mesh, move |x, y, _| {
            let v = 0.8
                + 0.2
                    * (2.0 * PI * x.to_f64().unwrap() / lx).sin()
                    * (2.0 * PI * y.to_f64().unwrap() / ly).sin();
            T::lit(v)
        })),
        DensityProfile::LinearRho => {
            check_dim(mesh, 3)?;
            Ok(CellField::from_cell_centers(mesh, move |_, _, z| {
                T::lit(0.5 + 0.5 * (1.0 - z.to_f64().unwrap() / lz))
            }))
        }
    }
}

/// Samples an initial tracer at cell centres.
pub fn tracer_field<T: Real>(profile: TracerProfile, mesh: &Mesh<T>) -> Result<CellField<T>> {
    let [lx, ly, lz] = domain_lengths(mesh);
    match profile {
        TracerProfile::Uniform => Ok(CellField::ones(mesh)),
        TracerProfile::SineTracer => Ok(CellField::from_cell_centers(mesh, move |x, y, _| {
            let v = 0.5
                + 0.5
                    * (2.0 * PI * x.to_f64().unwrap() / lx).sin()
                    * (2.0 * PI * y.to_f64().unwrap() / ly).sin();
            T::lit(v)
        })),
        TracerProfile::SlottedCylinders => {
            const X_C: [f64; 2] = [-250.0, 250.0];
            const Y_C: f64 = 0.0;
            const R_C: f64 = 160.0;
            const L_C: f64 = 25.0;
            Ok(CellField::from_cell_centers(mesh, move |x, y, _| {
                let (x, y) = (x.to_f64().unwrap(), y.to_f64().unwrap());
                for xc in X_C {
                    let r = ((x - xc).powi(2) + (y - Y_C).powi(2)).sqrt();
                    if r < R_C {
                        // The slot overrides the cylinder body.
                        let in_slot = y > Y_C && (x - xc).abs() < L_C;
                        return if in_slot { T::zero() } else { T::one() };
                    }
                }
                T::zero()
            }))
        }
        TracerProfile::Step3d => {
            check_dim(mesh, 3)?;
            Ok(CellField::from_cell_centers(mesh, move |x, _, z| {
                let inside = x.to_f64().unwrap().abs() < lx / 4.0
                    && (z.to_f64().unwrap() - lz / 2.0).abs() < 3.0 * lz / 10.0;
                if inside {
                    T::one()
                } else {
                    T::zero()
                }
            }))
        }
    }
}

/// Samples the initial density or tracer of a test case.
pub fn init_field<T: Real>(tc: &TestCase, which: Which, mesh: &Mesh<T>) -> Result<CellField<T>> {
    check_dim(mesh, tc.case.ndim())?;
    match which {
        Which::Density => density_field(tc.density, mesh),
        Which::Tracer => tracer_field(tc.tracer, mesh),
    }
}

/// Samples the case's velocity at time `t` onto every facet family of the
/// mesh; the returned fields are ordered by direction. Rigid wall facets
/// are exactly zero (the 3D vertical component vanishes analytically at
/// the walls; sampling pins it to zero bitwise).
pub fn velocity_at<T: Real>(case: CaseId, t: f64, mesh: &Mesh<T>) -> Result<Vec<DirFacetField<T>>> {
    check_dim(mesh, case.ndim())?;
    let [lx, ly, lz] = domain_lengths(mesh);
    // Moving-frame offsets; the trig factors are periodic so no wrapping is
    // required.
    let xs = lx / 2.0 - U0 * t;
    let ys = ly / 2.0 - U0 * t;
    let ct = (PI * t / END_TIME).cos();

    let fields = match case {
        CaseId::Constant2d => vec![
            DirFacetField::sample(mesh, 0, |_, _, _| T::lit(U0)),
            DirFacetField::sample(mesh, 1, |_, _, _| T::lit(U0)),
        ],
        CaseId::NonDivergent2d | CaseId::Divergent2d => {
            // Non-divergent: amplitude u0 and opposing signs; divergent:
            // amplitude u0/2 and matching signs.
            let (amp, sy) = if case == CaseId::NonDivergent2d {
                (U0, -1.0)
            } else {
                (0.5 * U0, 1.0)
            };
            let ux = DirFacetField::sample(mesh, 0, move |x, y, _| {
                let xp = x.to_f64().unwrap() + xs;
                let yp = y.to_f64().unwrap() + ys;
                T::lit(
                    amp * (PI * xp / lx).sin().powi(2) * (2.0 * PI * yp / ly).sin() * ct + U0,
                )
            });
            let uy = DirFacetField::sample(mesh, 1, move |x, y, _| {
                let xp = x.to_f64().unwrap() + xs;
                let yp = y.to_f64().unwrap() + ys;
                T::lit(
                    sy * amp * (PI * yp / ly).sin().powi(2) * (2.0 * PI * xp / lx).sin() * ct
                        + U0,
                )
            });
            vec![ux, uy]
        }
        CaseId::Deformational3d => {
            if mesh.boundary(2) != BoundaryKind::Rigid {
                return Err(TransportError::DimensionMismatch(
                    "the 3D deformational case needs a rigid vertical direction".into(),
                ));
            }
            let ux = DirFacetField::sample(mesh, 0, move |x, y, z| {
                let xp = x.to_f64().unwrap() + xs;
                let yp = y.to_f64().unwrap() + ys;
                let z = z.to_f64().unwrap();
                T::lit(
                    2.0 * U0
                        * (PI * xp / lx).sin().powi(2)
                        * (2.0 * PI * yp / ly).sin()
                        * (2.0 * PI * z / lz).sin()
                        * ct
                        + U0,
                )
            });
            let uy = DirFacetField::sample(mesh, 1, move |x, y, z| {
                let xp = x.to_f64().unwrap() + xs;
                let yp = y.to_f64().unwrap() + ys;
                let z = z.to_f64().unwrap();
                T::lit(
                    -U0 * (PI * yp / ly).sin().powi(2)
                        * (2.0 * PI * xp / lx).sin()
                        * (2.0 * PI * z / lz).sin()
                        * ct
                        + U0,
                )
            });
            let uz = DirFacetField::sample(mesh, 2, move |x, y, z| {
                let xp = x.to_f64().unwrap() + xs;
                let yp = y.to_f64().unwrap() + ys;
                let z = z.to_f64().unwrap();
                T::lit(
                    -U0 * (PI * z / lz).sin().powi(2)
                        * (2.0 * PI * xp / lx).sin()
                        * (2.0 * PI * yp / ly).sin()
                        * ct,
                )
            });
            vec![ux, uy, uz]
        }
    };
    Ok(fields)
}

/// Largest sampled facet speed of the case over a whole run, divided into
/// dt and the smallest spacing: an upper bound used to report c_max. The
/// analytic maxima are 10 (constant), 20 (non-divergent), 15 (divergent)
/// and 30 (3D) m/s.
pub fn peak_speed(case: CaseId) -> f64 {
    match case {
        CaseId::Constant2d => U0,
        CaseId::NonDivergent2d => 2.0 * U0,
        CaseId::Divergent2d => 1.5 * U0,
        CaseId::Deformational3d => 3.0 * U0,
    }
}
