//! Charney-Phillips vertical staggering: tracers live on level surfaces
//! (the primary mesh's vertical facets) while density lives at primary cell
//! centres. Conservative tracer transport runs on a vertically shifted mesh
//! whose cell centres coincide with those level surfaces, using density and
//! mass fluxes remapped from the primary mesh.
//!
//! The remap operators are chosen so that remapping commutes exactly with
//! any flux-divergence update built from the remapped fluxes:
//!
//! * density: mass-weighted average of the two primary half-cells
//!   overlapping each shifted cell (a single half-cell at the walls);
//! * vertical flux: arithmetic mean of the two primary facet fluxes
//!   bounding the primary cell whose centre carries the shifted facet,
//!   zero at the walls;
//! * horizontal flux: facet-area-weighted mean of the fluxes of the two
//!   overlapped primary layers (plain copy in the wall half-layers);
//! * mixing ratio: the identity, since level-surface points and shifted
//!   cell centres coincide.

use crate::error::{Result, TransportError};
use crate::field::{facet_shape, CellField, DirFacetField, SchemeConfig};
use crate::ffsl1d::divergence_1d;
use crate::mesh::{build_mesh, BoundaryKind, Mesh, Spacing};
use crate::scalar::Real;
use crate::splitting2d::require_positive_density;
use crate::splitting3d::{swift3d_tracer_step, DensityStepResult3d};

/// The vertically shifted mesh together with the primary mesh it derives
/// from. The shifted mesh has one extra layer; its interior vertical facets
/// sit at the primary layer midpoints, and when the primary spacing is
/// uniform its wall layers have half the depth of the others.
pub struct ShiftedMesh<T> {
    pub shifted: Mesh<T>,
    pub primary: Mesh<T>,
}

/// Index of the vertical direction of a mesh, if it has one.
fn vertical_dir<T: Real>(mesh: &Mesh<T>) -> Result<usize> {
    let v = mesh.ndim() - 1;
    if mesh.boundary(v) != BoundaryKind::Rigid {
        return Err(TransportError::ShiftedNeedsRigidVertical);
    }
    Ok(v)
}

/// Builds the shifted mesh: vertical facets are the primary domain walls
/// plus every primary layer midpoint.
pub fn build_shifted_mesh<T: Real>(primary: &Mesh<T>) -> Result<ShiftedMesh<T>> {
    let v = vertical_dir(primary)?;
    let nz = mesh_layers(primary);
    if nz < 2 {
        return Err(TransportError::TooFewLayers {
            required: 2,
            found: nz,
        });
    }

    let mut facets = Vec::with_capacity(nz + 2);
    facets.push(primary.facet_coords(v)[0]);
    facets.extend_from_slice(primary.centers(v));
    facets.push(primary.facet_coords(v)[nz]);

    let ndim = primary.ndim();
    let mut extents = Vec::new();
    let mut counts = Vec::new();
    let mut bounds = Vec::new();
    let mut spacing = Vec::new();
    for d in 0..ndim {
        extents.push(primary.extent(d));
        bounds.push(primary.boundary(d));
        if d == v {
            counts.push(nz + 1);
            spacing.push(Spacing::Explicit(facets.clone()));
        } else {
            counts.push(mesh_count(primary, d));
            spacing.push(Spacing::Explicit(primary.facet_coords(d).to_vec()));
        }
    }
    let shifted = build_mesh(&extents, &counts, &bounds, &spacing)?;
    Ok(ShiftedMesh {
        shifted,
        primary: primary.clone(),
    })
}

fn mesh_layers<T: Real>(mesh: &Mesh<T>) -> usize {
    mesh.counts()[mesh.ndim() - 1]
}

fn mesh_count<T: Real>(mesh: &Mesh<T>, d: usize) -> usize {
    mesh.counts()[d]
}

/// Number of cells in one horizontal slab (the vertical index is the
/// slowest-varying one, so slabs are contiguous).
fn slab_len(shape: [usize; 3], ndim: usize) -> usize {
    shape[..ndim - 1].iter().product()
}

/// Remaps a primary-mesh density to the shifted mesh by mass-weighted
/// half-cell averaging. Conserves total mass exactly (each primary
/// half-cell mass is assigned to exactly one shifted cell).
pub fn remap_density_to_shifted<T: Real>(
    rho: &CellField<T>,
    cp: &ShiftedMesh<T>,
) -> Result<CellField<T>> {
    rho.check_mesh(&cp.primary)?;
    let ndim = cp.primary.ndim();
    let nz = mesh_layers(&cp.primary);
    let h = slab_len(rho.shape(), ndim);
    let half = T::half();

    let vol = cp.primary.volumes();
    let svol = cp.shifted.volumes();
    let mut out = vec![T::zero(); h * (nz + 1)];
    for k in 0..=nz {
        for i in 0..h {
            let mut mass = T::zero();
            if k > 0 {
                mass += half * rho.data()[i + h * (k - 1)] * vol[i + h * (k - 1)];
            }
            if k < nz {
                mass += half * rho.data()[i + h * k] * vol[i + h * k];
            }
            out[i + h * k] = mass / svol[i + h * k];
        }
    }
    CellField::from_data(&cp.shifted, out)
}

/// Remaps a primary-mesh facet flux to the shifted mesh. Vertical fluxes
/// move to shifted facets (primary cell centres) as the mean of the two
/// bounding primary facet fluxes, with zero at the walls. Horizontal fluxes
/// combine the two overlapped primary layers weighted by their facet areas
/// (equivalently their depths), with a plain copy in the wall half-layers.
pub fn remap_flux_to_shifted<T: Real>(
    f: &DirFacetField<T>,
    cp: &ShiftedMesh<T>,
) -> Result<DirFacetField<T>> {
    f.check_mesh(&cp.primary)?;
    let ndim = cp.primary.ndim();
    let v = ndim - 1;
    let dir = f.dir();
    let nz = mesh_layers(&cp.primary);
    let half = T::half();

    let sshape = facet_shape(cp.shifted.counts(), dir);

    if dir == v {
        // Vertical: facet plane k of the shifted mesh sits at the primary
        // centre k-1 for k in 1..=nz; walls are zero.
        let h = slab_len(f.shape(), ndim);
        let mut out = vec![T::zero(); h * (nz + 2)];
        for k in 1..=nz {
            for i in 0..h {
                out[i + h * k] = half * (f.data()[i + h * (k - 1)] + f.data()[i + h * k]);
            }
        }
        Ok(DirFacetField::from_raw(dir, sshape, out))
    } else {
        // Horizontal: shifted layer k overlaps the upper half of primary
        // layer k-1 and the lower half of layer k; facet areas scale with
        // the layer depths.
        let h = slab_len(f.shape(), ndim);
        let w = cp.primary.widths(v);
        let mut out = vec![T::zero(); h * (nz + 1)];
        for k in 0..=nz {
            for i in 0..h {
                out[i + h * k] = if k == 0 {
                    f.data()[i]
                } else if k == nz {
                    f.data()[i + h * (nz - 1)]
                } else {
                    (f.data()[i + h * (k - 1)] * w[k - 1] + f.data()[i + h * k] * w[k])
                        / (w[k - 1] + w[k])
                };
            }
        }
        Ok(DirFacetField::from_raw(dir, sshape, out))
    }
}

/// Mixing ratios on level surfaces are a vertical facet field of the
/// primary mesh; the same values, in the same memory order, are the cell
/// field of the shifted mesh. This is the identity remap.
pub fn remap_mixing_ratio_to_shifted<T: Real>(
    m_levels: &DirFacetField<T>,
    cp: &ShiftedMesh<T>,
) -> Result<CellField<T>> {
    m_levels.check_mesh(&cp.primary)?;
    if m_levels.dir() != cp.primary.ndim() - 1 {
        return Err(TransportError::DimensionMismatch(format!(
            "mixing-ratio levels must be vertical facets, got direction {}",
            m_levels.dir()
        )));
    }
    CellField::from_data(&cp.shifted, m_levels.data().to_vec())
}

/// Inverse of [`remap_mixing_ratio_to_shifted`].
pub fn remap_mixing_ratio_to_levels<T: Real>(
    m: &CellField<T>,
    cp: &ShiftedMesh<T>,
) -> Result<DirFacetField<T>> {
    m.check_mesh(&cp.shifted)?;
    let v = cp.primary.ndim() - 1;
    Ok(DirFacetField::from_raw(
        v,
        facet_shape(cp.primary.counts(), v),
        m.data().to_vec(),
    ))
}

/// One conservative tracer step on the shifted mesh, driven by the mass
/// fluxes of a primary-mesh 3D density step. The intermediate densities are
/// rebuilt on the shifted mesh from the remapped fluxes, so a constant
/// mixing ratio is preserved to roundoff; by the commutation property they
/// agree with remapping the primary intermediates. Returns m^{n+1} on the
/// shifted mesh (level surfaces).
pub fn cp_tracer_step<T: Real>(
    m: &CellField<T>,
    rho: &CellField<T>,
    density: &DensityStepResult3d<T>,
    dt: T,
    cp: &ShiftedMesh<T>,
    cfg: &SchemeConfig,
) -> Result<CellField<T>> {
    let mesh = &cp.shifted;
    m.check_mesh(mesh)?;
    let rho_s = remap_density_to_shifted(rho, cp)?;
    require_positive_density(&rho_s, "cp tracer remapped rho")?;

    let flux_x = remap_flux_to_shifted(&density.flux_x, cp)?;
    let flux_y = remap_flux_to_shifted(&density.flux_y, cp)?;
    let flux_z1 = remap_flux_to_shifted(&density.flux_z1, cp)?;
    let flux_z2 = remap_flux_to_shifted(&density.flux_z2, cp)?;

    // Rebuild the stage densities from the remapped fluxes.
    let hdt = T::half() * dt;
    let rho_z = rho_s.add_scaled(-hdt, &divergence_1d(&flux_z1, mesh)?);
    let div_x = divergence_1d(&flux_x, mesh)?;
    let div_y = divergence_1d(&flux_y, mesh)?;
    let rho_x = rho_z.add_scaled(-dt, &div_x);
    let rho_y = rho_z.add_scaled(-dt, &div_y);
    let rho_xy = CellField::from_data(
        mesh,
        (0..rho_z.len())
            .map(|i| rho_z.data()[i] - (dt * div_x.data()[i] + dt * div_y.data()[i]))
            .collect(),
    )?;
    let rho_new = rho_xy.add_scaled(-hdt, &divergence_1d(&flux_z2, mesh)?);
    require_positive_density(&rho_new, "cp tracer rho^{n+1}")?;

    let ones = CellField::ones(mesh);
    let shifted_density = DensityStepResult3d {
        rho_new: rho_new.clone(),
        flux_x,
        flux_y,
        flux_z1,
        flux_z2,
        rho_z,
        rho_x,
        rho_y,
        rho_xy,
        sigma_z: ones.clone(),
        sigma_x: ones.clone(),
        sigma_y: ones.clone(),
        sigma_xy: ones,
    };
    let rm = swift3d_tracer_step(m, &rho_s, &shifted_density, dt, mesh, cfg)?;
    Ok(rm.div(&rho_new))
}
