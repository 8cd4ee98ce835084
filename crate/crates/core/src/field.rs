//! Field containers: cell-centred fields, direction-normal facet fields and
//! departure-point data, plus the scheme configuration switches.
//!
//! Fields store flat data in the mesh's row-major layout and carry their own
//! shape; operations check the shape against the mesh they are given.
//! Facet fields always hold `n_d + 1` planes in their direction: on periodic
//! directions the upper boundary plane duplicates the lower one bitwise, on
//! rigid directions the two boundary planes are exactly zero.

use crate::error::{Result, TransportError};
use crate::mesh::{other_dims, BoundaryKind, Mesh};
use crate::scalar::Real;

/// Velocity evaluation time within a step of length dt, for time-dependent
/// flows. `Midpoint` (t + dt/2) is the default used by every reported run;
/// the other rules exist for sensitivity checks.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum VelocitySampling {
    StepStart,
    #[default]
    Midpoint,
    StepEnd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Reconstruction {
    /// Piecewise parabolic subgrid reconstruction with fourth-order facet
    /// interpolation.
    #[default]
    Ppm4,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SchemeConfig {
    /// Strict monotonic limiting of the subgrid reconstruction.
    pub limiter: bool,
    pub reconstruction: Reconstruction,
    pub sampling: VelocitySampling,
}

impl SchemeConfig {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn limited() -> Self {
        Self {
            limiter: true,
            ..Self::default()
        }
    }
}

/// One value per mesh cell, row-major, direction 0 fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField<T> {
    shape: [usize; 3],
    data: Vec<T>,
}

impl<T: Real> CellField<T> {
    pub fn constant(mesh: &Mesh<T>, value: T) -> Self {
        Self {
            shape: mesh.counts(),
            data: vec![value; mesh.n_cells()],
        }
    }

    pub fn zeros(mesh: &Mesh<T>) -> Self {
        Self::constant(mesh, T::zero())
    }

    pub fn ones(mesh: &Mesh<T>) -> Self {
        Self::constant(mesh, T::one())
    }

    /// Point-samples `f(x, y, z)` at every cell centre.
    pub fn from_cell_centers<F: FnMut(T, T, T) -> T>(mesh: &Mesh<T>, mut f: F) -> Self {
        let [n0, n1, n2] = mesh.counts();
        let (cx, cy, cz) = (mesh.centers(0), mesh.centers(1), mesh.centers(2));
        let mut data = Vec::with_capacity(mesh.n_cells());
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                for i0 in 0..n0 {
                    data.push(f(cx[i0], cy[i1], cz[i2]));
                }
            }
        }
        Self {
            shape: [n0, n1, n2],
            data,
        }
    }

    pub fn from_data(mesh: &Mesh<T>, data: Vec<T>) -> Result<Self> {
        if data.len() != mesh.n_cells() {
            return Err(TransportError::ShapeMismatch {
                expected: mesh.counts(),
                found: [data.len(), 1, 1],
            });
        }
        Ok(Self {
            shape: mesh.counts(),
            data,
        })
    }

    /// The per-cell volume field V.
    pub fn volumes(mesh: &Mesh<T>) -> Self {
        Self {
            shape: mesh.counts(),
            data: mesh.volumes().to_vec(),
        }
    }

    /// The generalized metric w·V for a weight field w (density or unity).
    pub fn weighted_volumes(mesh: &Mesh<T>, weight: &CellField<T>) -> Self {
        let data = weight
            .data
            .iter()
            .zip(mesh.volumes())
            .map(|(&w, &v)| w * v)
            .collect();
        Self {
            shape: mesh.counts(),
            data,
        }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn min(&self) -> T {
        self.data.iter().fold(T::infinity(), |m, &x| m.min(x))
    }

    pub fn max(&self) -> T {
        self.data.iter().fold(T::neg_infinity(), |m, &x| m.max(x))
    }

    /// Elementwise product.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .collect();
        Self {
            shape: self.shape,
            data,
        }
    }

    /// Elementwise quotient.
    pub fn div(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a / b)
            .collect();
        Self {
            shape: self.shape,
            data,
        }
    }

    /// self + scale * other, elementwise.
    pub fn add_scaled(&self, scale: T, other: &Self) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + scale * b)
            .collect();
        Self {
            shape: self.shape,
            data,
        }
    }

    pub(crate) fn check_mesh(&self, mesh: &Mesh<T>) -> Result<()> {
        if self.shape != mesh.counts() {
            return Err(TransportError::ShapeMismatch {
                expected: mesh.counts(),
                found: self.shape,
            });
        }
        Ok(())
    }
}

/// One value per facet normal to `dir`. The facet shape equals the cell shape
/// with `dir` incremented, so there are `n_dir + 1` planes including both
/// domain boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct DirFacetField<T> {
    dir: usize,
    shape: [usize; 3],
    data: Vec<T>,
}

pub(crate) fn facet_shape(cell_shape: [usize; 3], dir: usize) -> [usize; 3] {
    let mut s = cell_shape;
    s[dir] += 1;
    s
}

impl<T: Real> DirFacetField<T> {
    /// Samples `f(x, y, z)` at facet centres: the facet coordinate in `dir`,
    /// cell centres in the other directions. Enforces the boundary
    /// conventions: periodic upper plane duplicates the lower plane bitwise,
    /// rigid boundary planes are forced to exactly zero.
    pub fn sample<F: FnMut(T, T, T) -> T>(mesh: &Mesh<T>, dir: usize, mut f: F) -> Self {
        let shape = facet_shape(mesh.counts(), dir);
        let [n0, n1, n2] = shape;
        let coord = |d: usize, i: usize| -> T {
            if d == dir {
                mesh.facet_coords(d)[i]
            } else {
                mesh.centers(d)[i]
            }
        };
        let mut data = vec![T::zero(); n0 * n1 * n2];
        let n_dir = mesh.count(dir);
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                for i0 in 0..n0 {
                    let idx = [i0, i1, i2];
                    let k = i0 + n0 * (i1 + n1 * i2);
                    let boundary_plane = idx[dir] == 0 || idx[dir] == n_dir;
                    data[k] = match mesh.boundary(dir) {
                        BoundaryKind::Rigid if boundary_plane => T::zero(),
                        _ if idx[dir] == n_dir => T::zero(), // filled below
                        _ => f(coord(0, i0), coord(1, i1), coord(2, i2)),
                    };
                }
            }
        }
        let mut field = Self { dir, shape, data };
        if mesh.boundary(dir) == BoundaryKind::Periodic {
            field.copy_periodic_plane();
        }
        field
    }

    /// Duplicates facet plane 0 into plane `n_dir` (periodic convention).
    pub(crate) fn copy_periodic_plane(&mut self) {
        let [n0, n1, n2] = self.shape;
        let dir = self.dir;
        let n = self.shape[dir] - 1;
        match dir {
            0 => {
                for i2 in 0..n2 {
                    for i1 in 0..n1 {
                        let base = n0 * (i1 + n1 * i2);
                        self.data[base + n] = self.data[base];
                    }
                }
            }
            1 => {
                for i2 in 0..n2 {
                    let lo = n0 * n1 * i2;
                    let hi = lo + n0 * n;
                    for i0 in 0..n0 {
                        self.data[hi + i0] = self.data[lo + i0];
                    }
                }
            }
            2 => {
                let plane = n0 * n1;
                let hi = plane * n;
                for k in 0..plane {
                    self.data[hi + k] = self.data[k];
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn zeros(mesh: &Mesh<T>, dir: usize) -> Self {
        let shape = facet_shape(mesh.counts(), dir);
        Self {
            dir,
            shape,
            data: vec![T::zero(); shape[0] * shape[1] * shape[2]],
        }
    }

    pub(crate) fn from_raw(dir: usize, shape: [usize; 3], data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), shape[0] * shape[1] * shape[2]);
        Self { dir, shape, data }
    }

    pub fn dir(&self) -> usize {
        self.dir
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Elementwise average of two facet fields on the same layout.
    pub fn average(&self, other: &Self) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        debug_assert_eq!(self.dir, other.dir);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a + b) * T::half())
            .collect();
        Self {
            dir: self.dir,
            shape: self.shape,
            data,
        }
    }

    /// Scales every value by `s`.
    pub fn scaled(&self, s: T) -> Self {
        Self {
            dir: self.dir,
            shape: self.shape,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub(crate) fn check_mesh(&self, mesh: &Mesh<T>) -> Result<()> {
        if self.shape != facet_shape(mesh.counts(), self.dir) {
            return Err(TransportError::ShapeMismatch {
                expected: facet_shape(mesh.counts(), self.dir),
                found: self.shape,
            });
        }
        Ok(())
    }
}

/// Departure data per facet of direction `dir`: the signed whole-cell count,
/// the signed fractional Courant number of the departure cell, and the
/// fractional facet velocity. `dt` is the step the decomposition was built
/// for; integer fluxes reuse it.
#[derive(Clone, Debug)]
pub struct DepartureField<T> {
    pub(crate) dir: usize,
    pub(crate) shape: [usize; 3],
    pub(crate) dt: T,
    pub(crate) c_int: Vec<i32>,
    pub(crate) c_frac: Vec<T>,
    pub(crate) u_hat_frac: Vec<T>,
}

impl<T: Real> DepartureField<T> {
    pub fn dir(&self) -> usize {
        self.dir
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn c_int(&self) -> &[i32] {
        &self.c_int
    }

    pub fn c_frac(&self) -> &[T] {
        &self.c_frac
    }

    pub fn u_hat_frac(&self) -> &[T] {
        &self.u_hat_frac
    }
}

/// Copies `src` (any cell or facet shape) into sweep layout for `dir`: the
/// swept direction becomes fastest, the remaining directions follow in
/// ascending order, so each row of length `shape[dir]` is contiguous.
pub(crate) fn gather_rows<T: Copy>(src: &[T], shape: [usize; 3], dir: usize) -> Vec<T> {
    let [n0, n1, n2] = shape;
    debug_assert_eq!(src.len(), n0 * n1 * n2);
    if dir == 0 {
        return src.to_vec();
    }
    let (a, b) = other_dims(dir);
    let nd = shape[dir];
    let (na, nb) = (shape[a], shape[b]);
    let mut dst = vec![src[0]; src.len()];
    let mut idx = [0usize; 3];
    for ib in 0..nb {
        idx[b] = ib;
        for ia in 0..na {
            idx[a] = ia;
            let row = ia + na * ib;
            for id in 0..nd {
                idx[dir] = id;
                dst[id + nd * row] = src[idx[0] + n0 * (idx[1] + n1 * idx[2])];
            }
        }
    }
    dst
}

/// Inverse of `gather_rows`.
pub(crate) fn scatter_rows<T: Copy>(rows: &[T], shape: [usize; 3], dir: usize) -> Vec<T> {
    let [n0, n1, n2] = shape;
    debug_assert_eq!(rows.len(), n0 * n1 * n2);
    if dir == 0 {
        return rows.to_vec();
    }
    let (a, b) = other_dims(dir);
    let nd = shape[dir];
    let (na, nb) = (shape[a], shape[b]);
    let mut dst = vec![rows[0]; rows.len()];
    let mut idx = [0usize; 3];
    for ib in 0..nb {
        idx[b] = ib;
        for ia in 0..na {
            idx[a] = ia;
            let row = ia + na * ib;
            for id in 0..nd {
                idx[dir] = id;
                dst[idx[0] + n0 * (idx[1] + n1 * idx[2])] = rows[id + nd * row];
            }
        }
    }
    dst
}
