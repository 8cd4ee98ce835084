//! Three-dimensional transport: a conservative half step in the vertical,
//! a full two-dimensional horizontal step, then the second vertical half
//! step (Strang composition). The horizontal stage is either the SWIFT or
//! the COSMIC splitting from [`crate::splitting2d`]'s family, rebuilt here
//! against the vertically updated density and unity fields.
//!
//! The vertical half steps transport with the velocity scaled by one half
//! over the full dt. The stored vertical fluxes are twice the operator
//! outputs, so the whole step satisfies
//!
//! rho_new = rho - dt div_x(Fx) - dt div_y(Fy)
//!                - (dt/2) div_z(Fz1) - (dt/2) div_z(Fz2)
//!
//! with both factors of two exact in binary arithmetic.

use crate::error::Result;
use crate::ffsl1d::{advective_pieces, divergence_1d, flux_1d};
use crate::field::{CellField, DirFacetField, SchemeConfig};
use crate::mesh::Mesh;
use crate::scalar::Real;
use crate::splitting2d::{require_positive_density, require_positive_sigma};

/// Stored products of one 3D density update; the tracer steps reuse all of
/// them. For the COSMIC variant the sigma fields are stage-local unity
/// transports kept for diagnostics only (the scheme never divides by them);
/// for SWIFT they are the fields the scheme itself uses.
pub struct DensityStepResult3d<T> {
    pub rho_new: CellField<T>,
    /// Combined (inner/outer averaged) horizontal mass fluxes.
    pub flux_x: DirFacetField<T>,
    pub flux_y: DirFacetField<T>,
    /// First and second vertical half-step fluxes, scaled to pair with
    /// (dt/2) divergence weights.
    pub flux_z1: DirFacetField<T>,
    pub flux_z2: DirFacetField<T>,
    /// rho after the first vertical half step.
    pub rho_z: CellField<T>,
    /// rho_z - dt div_x(Fx) and rho_z - dt div_y(Fy).
    pub rho_x: CellField<T>,
    pub rho_y: CellField<T>,
    /// rho after vertical half plus both horizontal updates.
    pub rho_xy: CellField<T>,
    pub sigma_z: CellField<T>,
    pub sigma_x: CellField<T>,
    pub sigma_y: CellField<T>,
    pub sigma_xy: CellField<T>,
}

fn updated<T: Real>(
    q: &CellField<T>,
    flux: &DirFacetField<T>,
    dt: T,
    mesh: &Mesh<T>,
) -> Result<CellField<T>> {
    Ok(q.add_scaled(-dt, &divergence_1d(flux, mesh)?))
}

/// base - (dt div_x + dt div_y), symmetric in x and y.
fn two_way_update<T: Real>(
    base: &CellField<T>,
    div_x: &CellField<T>,
    div_y: &CellField<T>,
    dt: T,
    mesh: &Mesh<T>,
) -> Result<CellField<T>> {
    let data = (0..base.len())
        .map(|i| base.data()[i] - (dt * div_x.data()[i] + dt * div_y.data()[i]))
        .collect();
    CellField::from_data(mesh, data)
}

/// SWIFT density update in three dimensions.
pub fn swift3d_density_step<T: Real>(
    rho: &CellField<T>,
    ux: &DirFacetField<T>,
    uy: &DirFacetField<T>,
    uz: &DirFacetField<T>,
    dt: T,
    mesh: &Mesh<T>,
    cfg: &SchemeConfig,
) -> Result<DensityStepResult3d<T>> {
    let vol = CellField::volumes(mesh);
    let ones = CellField::ones(mesh);
    let uz_half = uz.scaled(T::half());

    // First vertical half step for density and unity.
    let fz1 = flux_1d(rho, &uz_half, &vol, dt, mesh, 2, cfg)?;
    let rho_z = updated(rho, &fz1, dt, mesh)?;
    let sigma_z = updated(&ones, &flux_1d(&ones, &uz_half, &vol, dt, mesh, 2, cfg)?, dt, mesh)?;
    require_positive_sigma(&sigma_z, "swift3d vertical sigma^z")?;

    // Horizontal SWIFT stage on rho_z, carrying sigma_z through the metric.
    let rho_az = rho_z.div(&sigma_z);
    let metric_sz = CellField::weighted_volumes(mesh, &sigma_z);

    let fi_x = flux_1d(&rho_az, ux, &metric_sz, dt, mesh, 0, cfg)?;
    let rho_ix = updated(&rho_z, &fi_x, dt, mesh)?;
    let fsi_x = flux_1d(&ones, ux, &metric_sz, dt, mesh, 0, cfg)?;
    let sigma_x = updated(&sigma_z, &fsi_x, dt, mesh)?;
    require_positive_sigma(&sigma_x, "swift3d inner x")?;

    let fi_y = flux_1d(&rho_az, uy, &metric_sz, dt, mesh, 1, cfg)?;
    let rho_iy = updated(&rho_z, &fi_y, dt, mesh)?;
    let fsi_y = flux_1d(&ones, uy, &metric_sz, dt, mesh, 1, cfg)?;
    let sigma_y = updated(&sigma_z, &fsi_y, dt, mesh)?;
    require_positive_sigma(&sigma_y, "swift3d inner y")?;

    let rho_ax = rho_ix.div(&sigma_x);
    let rho_ay = rho_iy.div(&sigma_y);
    let metric_sy = CellField::weighted_volumes(mesh, &sigma_y);
    let metric_sx = CellField::weighted_volumes(mesh, &sigma_x);
    let fo_x = flux_1d(&rho_ay, ux, &metric_sy, dt, mesh, 0, cfg)?;
    let fo_y = flux_1d(&rho_ax, uy, &metric_sx, dt, mesh, 1, cfg)?;
    let fso_x = flux_1d(&ones, ux, &metric_sy, dt, mesh, 0, cfg)?;
    let fso_y = flux_1d(&ones, uy, &metric_sx, dt, mesh, 1, cfg)?;

    let flux_x = fi_x.average(&fo_x);
    let flux_y = fi_y.average(&fo_y);
    let div_x = divergence_1d(&flux_x, mesh)?;
    let div_y = divergence_1d(&flux_y, mesh)?;
    let rho_xy = two_way_update(&rho_z, &div_x, &div_y, dt, mesh)?;
    let rho_x = rho_z.add_scaled(-dt, &div_x);
    let rho_y = rho_z.add_scaled(-dt, &div_y);

    let fs_x = fsi_x.average(&fso_x);
    let fs_y = fsi_y.average(&fso_y);
    let sigma_xy = two_way_update(
        &sigma_z,
        &divergence_1d(&fs_x, mesh)?,
        &divergence_1d(&fs_y, mesh)?,
        dt,
        mesh,
    )?;
    require_positive_sigma(&sigma_xy, "swift3d sigma^{xy}")?;

    // Second vertical half step from the advective form of rho_xy.
    let rho_axy = rho_xy.div(&sigma_xy);
    let metric_sxy = CellField::weighted_volumes(mesh, &sigma_xy);
    let fz2 = flux_1d(&rho_axy, &uz_half, &metric_sxy, dt, mesh, 2, cfg)?;
    let rho_new = updated(&rho_xy, &fz2, dt, mesh)?;

    Ok(DensityStepResult3d {
        rho_new,
        flux_x,
        flux_y,
        flux_z1: fz1.scaled(T::two()),
        flux_z2: fz2.scaled(T::two()),
        rho_z,
        rho_x,
        rho_y,
        rho_xy,
        sigma_z,
        sigma_x,
        sigma_y,
        sigma_xy,
    })
}

/// SWIFT consistent tracer update in three dimensions; returns
/// (rho m)^{n+1}. Every stage divides by the matching stored density, so a
/// constant mixing ratio is preserved exactly and the limiter gives a
/// monotone update.
pub fn swift3d_tracer_step<T: Real>(
    m: &CellField<T>,
    rho: &CellField<T>,
    density: &DensityStepResult3d<T>,
    dt: T,
    mesh: &Mesh<T>,
    cfg: &SchemeConfig,
) -> Result<CellField<T>> {
    require_positive_density(rho, "3d tracer rho^n")?;
    require_positive_density(&density.rho_z, "3d tracer rho^z")?;
    require_positive_density(&density.rho_x, "3d tracer rho^x")?;
    require_positive_density(&density.rho_y, "3d tracer rho^y")?;
    require_positive_density(&density.rho_xy, "3d tracer rho^{xy}")?;

    let fz1 = density.flux_z1.scaled(T::half());
    let fz2 = density.flux_z2.scaled(T::half());

    // First vertical half step.
    let rho_m = rho.mul(m);
    let gz1 = flux_1d(m, &fz1, &CellField::weighted_volumes(mesh, rho), dt, mesh, 2, cfg)?;
    let rm_z = updated(&rho_m, &gz1, dt, mesh)?;
    let m_z = rm_z.div(&density.rho_z);

    // Horizontal SWIFT tracer stage.
    let metric_z = CellField::weighted_volumes(mesh, &density.rho_z);
    let g1_x = flux_1d(&m_z, &density.flux_x, &metric_z, dt, mesh, 0, cfg)?;
    let m_x = updated(&rm_z, &g1_x, dt, mesh)?.div(&density.rho_x);
    let g1_y = flux_1d(&m_z, &density.flux_y, &metric_z, dt, mesh, 1, cfg)?;
    let m_y = updated(&rm_z, &g1_y, dt, mesh)?.div(&density.rho_y);

    let metric_y = CellField::weighted_volumes(mesh, &density.rho_y);
    let metric_x = CellField::weighted_volumes(mesh, &density.rho_x);
    let g2_x = flux_1d(&m_y, &density.flux_x, &metric_y, dt, mesh, 0, cfg)?;
    let g2_y = flux_1d(&m_x, &density.flux_y, &metric_x, dt, mesh, 1, cfg)?;

    let fm_x = g1_x.average(&g2_x);
    let fm_y = g1_y.average(&g2_y);
    let rm_xy = two_way_update(
        &rm_z,
        &divergence_1d(&fm_x, mesh)?,
        &divergence_1d(&fm_y, mesh)?,
        dt,
        mesh,
    )?;
    let m_xy = rm_xy.div(&density.rho_xy);

    // Second vertical half step.
    let gz2 = flux_1d(
        &m_xy,
        &fz2,
        &CellField::weighted_volumes(mesh, &density.rho_xy),
        dt,
        mesh,
        2,
        cfg,
    )?;
    updated(&rm_xy, &gz2, dt, mesh)
}

/// COSMIC-horizontal comparison baseline: the same vertical Strang halves,
/// with the 2D COSMIC splitting as the horizontal stage. The vertical half
/// steps are plain conservative updates (no unity division).
pub fn cosmic3d_density_step<T: Real>(
    rho: &CellField<T>,
    ux: &DirFacetField<T>,
    uy: &DirFacetField<T>,
    uz: &DirFacetField<T>,
    dt: T,
    mesh: &Mesh<T>,
    cfg: &SchemeConfig,
) -> Result<DensityStepResult3d<T>> {
    let vol = CellField::volumes(mesh);
    let ones = CellField::ones(mesh);
    let uz_half = uz.scaled(T::half());
    let half = T::half();

    // First vertical half step.
    let fz1 = flux_1d(rho, &uz_half, &vol, dt, mesh, 2, cfg)?;
    let rho_z = updated(rho, &fz1, dt, mesh)?;
    let sigma_z = updated(&ones, &flux_1d(&ones, &uz_half, &vol, dt, mesh, 2, cfg)?, dt, mesh)?;

    // Horizontal COSMIC stage on rho_z.
    let (inc_x, sigma_x) = advective_pieces(&rho_z, ux, dt, mesh, 0, cfg)?;
    let (inc_y, sigma_y) = advective_pieces(&rho_z, uy, dt, mesh, 1, cfg)?;
    let rho_ax = rho_z.add_scaled(-half, &inc_x);
    let rho_ay = rho_z.add_scaled(-half, &inc_y);
    let flux_x = flux_1d(&rho_ay, ux, &vol, dt, mesh, 0, cfg)?;
    let flux_y = flux_1d(&rho_ax, uy, &vol, dt, mesh, 1, cfg)?;
    let div_x = divergence_1d(&flux_x, mesh)?;
    let div_y = divergence_1d(&flux_y, mesh)?;
    let rho_xy = two_way_update(&rho_z, &div_x, &div_y, dt, mesh)?;
    let rho_x = rho_z.add_scaled(-dt, &div_x);
    let rho_y = rho_z.add_scaled(-dt, &div_y);

    // Unity carried through the horizontal unity fluxes, diagnostics only.
    let sigma_xy = two_way_update(
        &sigma_z,
        &divergence_1d(&flux_1d(&ones, ux, &vol, dt, mesh, 0, cfg)?, mesh)?,
        &divergence_1d(&flux_1d(&ones, uy, &vol, dt, mesh, 1, cfg)?, mesh)?,
        dt,
        mesh,
    )?;

    // Second vertical half step.
    let fz2 = flux_1d(&rho_xy, &uz_half, &vol, dt, mesh, 2, cfg)?;
    let rho_new = updated(&rho_xy, &fz2, dt, mesh)?;

    Ok(DensityStepResult3d {
        rho_new,
        flux_x,
        flux_y,
        flux_z1: fz1.scaled(T::two()),
        flux_z2: fz2.scaled(T::two()),
        rho_z,
        rho_x,
        rho_y,
        rho_xy,
        sigma_z,
        sigma_x,
        sigma_y,
        sigma_xy,
    })
}

/// Consistent tracer update matching [`cosmic3d_density_step`]; returns
/// (rho m)^{n+1}. Not monotone even with the limiter, which is the point of
/// the comparison.
#[allow(clippy::too_many_arguments)]
pub fn cosmic3d_tracer_step<T: Real>(
    m: &CellField<T>,
    rho: &CellField<T>,
    density: &DensityStepResult3d<T>,
    ux: &DirFacetField<T>,
    uy: &DirFacetField<T>,
    dt: T,
    mesh: &Mesh<T>,
    cfg: &SchemeConfig,
) -> Result<CellField<T>> {
    require_positive_density(rho, "3d tracer rho^n")?;
    require_positive_density(&density.rho_z, "3d tracer rho^z")?;
    require_positive_density(&density.rho_xy, "3d tracer rho^{xy}")?;
    let half = T::half();

    let fz1 = density.flux_z1.scaled(half);
    let fz2 = density.flux_z2.scaled(half);

    // First vertical half step.
    let rho_m = rho.mul(m);
    let gz1 = flux_1d(m, &fz1, &CellField::weighted_volumes(mesh, rho), dt, mesh, 2, cfg)?;
    let rm_z = updated(&rho_m, &gz1, dt, mesh)?;
    let m_z = rm_z.div(&density.rho_z);

    // Horizontal COSMIC tracer stage.
    let (inc_x, _) = advective_pieces(&m_z, ux, dt, mesh, 0, cfg)?;
    let (inc_y, _) = advective_pieces(&m_z, uy, dt, mesh, 1, cfg)?;
    let m_ax = m_z.add_scaled(-half, &inc_x);
    let m_ay = m_z.add_scaled(-half, &inc_y);
    let metric_z = CellField::weighted_volumes(mesh, &density.rho_z);
    let fm_x = flux_1d(&m_ay, &density.flux_x, &metric_z, dt, mesh, 0, cfg)?;
    let fm_y = flux_1d(&m_ax, &density.flux_y, &metric_z, dt, mesh, 1, cfg)?;
    let rm_xy = two_way_update(
        &rm_z,
        &divergence_1d(&fm_x, mesh)?,
        &divergence_1d(&fm_y, mesh)?,
        dt,
        mesh,
    )?;
    let m_xy = rm_xy.div(&density.rho_xy);

    // Second vertical half step.
    let gz2 = flux_1d(
        &m_xy,
        &fz2,
        &CellField::weighted_volumes(mesh, &density.rho_xy),
        dt,
        mesh,
        2,
        cfg,
    )?;
    updated(&rm_xy, &gz2, dt, mesh)
}
