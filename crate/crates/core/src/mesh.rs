//! Structured, logically rectangular meshes.
//!
//! Meshes are tensor products of per-direction facet coordinate arrays, so a
//! cell volume is the product of its per-direction widths and a facet area is
//! the product of the orthogonal widths. Internally everything is padded to
//! three directions; trivial directions have one cell of unit width, which
//! keeps volumes and areas dimensionally consistent (S = 1 for 1D meshes).
//!
//! Index conventions, fixed so outputs are byte-stable:
//! * cell `i` owns facet `i` (lower, at coordinate `facets[i]`) and facet
//!   `i+1` (upper);
//! * multi-dimensional fields are row-major with direction 0 fastest:
//!   `linear = i0 + n0*(i1 + n1*i2)`;
//! * periodic wrap is index arithmetic (modulo), never ghost copies.

use crate::error::{Result, TransportError};
use crate::scalar::Real;
use crate::sum;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundaryKind {
    Periodic,
    Rigid,
}

/// Per-direction spacing rule for `build_mesh`.
#[derive(Clone, Debug)]
pub enum Spacing<T> {
    Uniform,
    /// Explicit facet coordinates, length `count + 1`, strictly increasing,
    /// first and last equal to the direction extents.
    Explicit(Vec<T>),
}

#[derive(Clone, Debug)]
pub struct Mesh<T> {
    ndim: usize,
    counts: [usize; 3],
    boundary: [BoundaryKind; 3],
    facets: [Vec<T>; 3],
    widths: [Vec<T>; 3],
    centers: [Vec<T>; 3],
    /// Facet area per direction, indexed over the two orthogonal directions
    /// (ascending order) as `ia + na*ib`. Constant along a sweep row because
    /// the mesh is a tensor product.
    areas: [Vec<T>; 3],
    volumes: Vec<T>,
}

/// Builds a mesh from per-direction extents, cell counts, boundary kinds and
/// spacing rules. All four slices must have the same length (1 to 3).
///
/// Rigid boundaries model the vertical: they are accepted for direction 2 of
/// a 3D mesh and for the single direction of a 1D column, never for a
/// horizontal direction.
pub fn build_mesh<T: Real>(
    extents: &[[T; 2]],
    counts: &[usize],
    boundaries: &[BoundaryKind],
    spacing: &[Spacing<T>],
) -> Result<Mesh<T>> {
    let ndim = extents.len();
    if !(1..=3).contains(&ndim) {
        return Err(TransportError::UnsupportedDimension(ndim));
    }
    if counts.len() != ndim || boundaries.len() != ndim || spacing.len() != ndim {
        return Err(TransportError::DimensionMismatch(format!(
            "extents {}, counts {}, boundaries {}, spacing {}",
            ndim,
            counts.len(),
            boundaries.len(),
            spacing.len()
        )));
    }

    let mut mcounts = [1usize; 3];
    let mut mboundary = [BoundaryKind::Periodic; 3];
    let mut mfacets: [Vec<T>; 3] = [Vec::new(), Vec::new(), Vec::new()];

    for d in 0..3 {
        if d >= ndim {
            mfacets[d] = vec![T::zero(), T::one()];
            continue;
        }
        let n = counts[d];
        if n < 1 {
            return Err(TransportError::BadCellCount { dir: d, count: n });
        }
        let [a, b] = extents[d];
        if !(b > a) {
            return Err(TransportError::NonMonotoneFacets { dir: d, index: 0 });
        }
        let vertical = d == 2 || ndim == 1;
        if boundaries[d] == BoundaryKind::Rigid && !vertical {
            return Err(TransportError::RigidHorizontal { dir: d });
        }
        let coords = match &spacing[d] {
            Spacing::Uniform => {
                let len = b - a;
                let nt = T::of_usize(n);
                let mut f: Vec<T> = (0..=n).map(|i| a + len * T::of_usize(i) / nt).collect();
                f[0] = a;
                f[n] = b;
                f
            }
            Spacing::Explicit(f) => {
                if f.len() != n + 1 || f[0] != a || f[n] != b {
                    return Err(TransportError::BadExplicitSpacing { dir: d });
                }
                f.clone()
            }
        };
        for i in 0..n {
            if !(coords[i + 1] > coords[i]) {
                return Err(TransportError::NonMonotoneFacets { dir: d, index: i });
            }
        }
        mcounts[d] = n;
        mboundary[d] = boundaries[d];
        mfacets[d] = coords;
    }

    let mut widths: [Vec<T>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut centers: [Vec<T>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for d in 0..3 {
        let f = &mfacets[d];
        widths[d] = (0..mcounts[d]).map(|i| f[i + 1] - f[i]).collect();
        centers[d] = (0..mcounts[d])
            .map(|i| (f[i] + f[i + 1]) * T::half())
            .collect();
    }

    let mut areas: [Vec<T>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for d in 0..3 {
        let (a, b) = other_dims(d);
        let (na, nb) = (mcounts[a], mcounts[b]);
        let mut s = Vec::with_capacity(na * nb);
        for ib in 0..nb {
            for ia in 0..na {
                s.push(widths[a][ia] * widths[b][ib]);
            }
        }
        areas[d] = s;
    }

    let (n0, n1, n2) = (mcounts[0], mcounts[1], mcounts[2]);
    let mut volumes = Vec::with_capacity(n0 * n1 * n2);
    for i2 in 0..n2 {
        for i1 in 0..n1 {
            let w12 = widths[1][i1] * widths[2][i2];
            for i0 in 0..n0 {
                volumes.push(widths[0][i0] * w12);
            }
        }
    }

    Ok(Mesh {
        ndim,
        counts: mcounts,
        boundary: mboundary,
        facets: mfacets,
        widths,
        centers,
        areas,
        volumes,
    })
}

/// The two directions orthogonal to `dir`, in ascending order.
pub(crate) fn other_dims(dir: usize) -> (usize, usize) {
    match dir {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => panic!("direction out of range: {dir}"),
    }
}

impl<T: Real> Mesh<T> {
    /// Convenience builder: uniform spacing in every direction.
    pub fn uniform(
        extents: &[[T; 2]],
        counts: &[usize],
        boundaries: &[BoundaryKind],
    ) -> Result<Self> {
        let spacing: Vec<Spacing<T>> = (0..extents.len()).map(|_| Spacing::Uniform).collect();
        build_mesh(extents, counts, boundaries, &spacing)
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    /// Cell counts padded to three directions (trivial directions are 1).
    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn count(&self, dir: usize) -> usize {
        self.counts[dir]
    }

    pub fn n_cells(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    pub fn boundary(&self, dir: usize) -> BoundaryKind {
        self.boundary[dir]
    }

    /// Facet coordinates in `dir`, length `count(dir) + 1`.
    pub fn facet_coords(&self, dir: usize) -> &[T] {
        &self.facets[dir]
    }

    pub fn widths(&self, dir: usize) -> &[T] {
        &self.widths[dir]
    }

    pub fn centers(&self, dir: usize) -> &[T] {
        &self.centers[dir]
    }

    /// Facet areas for direction `dir`, indexed `ia + na*ib` over the two
    /// orthogonal directions in ascending order.
    pub fn areas(&self, dir: usize) -> &[T] {
        &self.areas[dir]
    }

    /// Per-cell volumes in row-major order (direction 0 fastest).
    pub fn volumes(&self) -> &[T] {
        &self.volumes
    }

    pub fn cell_index(&self, i: [usize; 3]) -> usize {
        i[0] + self.counts[0] * (i[1] + self.counts[1] * i[2])
    }

    /// Domain extent in `dir` as `[min, max]`.
    pub fn extent(&self, dir: usize) -> [T; 2] {
        let f = &self.facets[dir];
        [f[0], f[f.len() - 1]]
    }

    /// Total mesh volume, compensated summation.
    pub fn total_volume(&self) -> T {
        sum::sum(&self.volumes)
    }

    /// Analytic domain volume (product of extents).
    pub fn domain_volume(&self) -> T {
        (0..3)
            .map(|d| {
                let e = self.extent(d);
                e[1] - e[0]
            })
            .fold(T::one(), |p, w| p * w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic(n: usize) -> Vec<BoundaryKind> {
        vec![BoundaryKind::Periodic; n]
    }

    #[test]
    fn uniform_1d_geometry() {
        let m = Mesh::<f64>::uniform(&[[-500.0, 500.0]], &[128], &periodic(1)).unwrap();
        assert_eq!(m.count(0), 128);
        assert_eq!(m.widths(0)[0], 7.8125);
        assert!(m.volumes().iter().all(|&v| v == 7.8125));
        assert!(m.areas(0).iter().all(|&s| s == 1.0));
    }

    #[test]
    fn uniform_2d_geometry() {
        let m = Mesh::<f64>::uniform(
            &[[-500.0, 500.0], [-500.0, 500.0]],
            &[128, 128],
            &periodic(2),
        )
        .unwrap();
        assert!(m.volumes().iter().all(|&v| v == 61.03515625));
        assert!(m.areas(0).iter().all(|&s| s == 7.8125));
        assert!(m.areas(1).iter().all(|&s| s == 7.8125));
        assert_eq!(m.n_cells(), 128 * 128);
    }

    #[test]
    fn explicit_non_uniform() {
        let m = build_mesh::<f64>(
            &[[0.0, 4.0]],
            &[3],
            &periodic(1),
            &[Spacing::Explicit(vec![0.0, 1.0, 3.0, 4.0])],
        )
        .unwrap();
        assert_eq!(m.volumes(), &[1.0, 2.0, 1.0]);
        assert_eq!(m.areas(0), &[1.0]);
        assert_eq!(m.centers(0), &[0.5, 2.0, 3.5]);
    }

    #[test]
    fn total_volume_matches_domain() {
        let m = Mesh::<f64>::uniform(
            &[[-500.0, 500.0], [-500.0, 500.0]],
            &[127, 93],
            &periodic(2),
        )
        .unwrap();
        let total = m.total_volume();
        let exact = m.domain_volume();
        assert!((total - exact).abs() / exact < 1e-14);
    }

    #[test]
    fn conforming_facets() {
        let m = build_mesh::<f64>(
            &[[0.0, 4.0]],
            &[3],
            &periodic(1),
            &[Spacing::Explicit(vec![0.0, 1.0, 3.0, 4.0])],
        )
        .unwrap();
        // Upper facet of cell i is the lower facet of cell i+1 by construction;
        // widths and centers must agree with the shared coordinates.
        let f = m.facet_coords(0);
        for i in 0..m.count(0) {
            assert_eq!(m.widths(0)[i], f[i + 1] - f[i]);
            assert_eq!(m.centers(0)[i], 0.5 * (f[i] + f[i + 1]));
        }
    }

    #[test]
    fn rigid_only_vertical() {
        let err = Mesh::<f64>::uniform(
            &[[0.0, 1.0], [0.0, 1.0]],
            &[8, 8],
            &[BoundaryKind::Rigid, BoundaryKind::Periodic],
        )
        .unwrap_err();
        assert!(matches!(err, TransportError::RigidHorizontal { dir: 0 }));

        // Vertical direction of a 3D mesh and a 1D column are both fine.
        assert!(Mesh::<f64>::uniform(
            &[[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]],
            &[4, 4, 4],
            &[
                BoundaryKind::Periodic,
                BoundaryKind::Periodic,
                BoundaryKind::Rigid
            ],
        )
        .is_ok());
        assert!(Mesh::<f64>::uniform(&[[0.0, 1.0]], &[4], &[BoundaryKind::Rigid]).is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Mesh::<f64>::uniform(&[[0.0, 1.0]], &[0], &periodic(1)),
            Err(TransportError::BadCellCount { .. })
        ));
        assert!(matches!(
            build_mesh::<f64>(
                &[[0.0, 1.0]],
                &[2],
                &periodic(1),
                &[Spacing::Explicit(vec![0.0, 0.7, 0.5, 1.0])],
            ),
            Err(TransportError::BadExplicitSpacing { .. })
        ));
        assert!(matches!(
            build_mesh::<f64>(
                &[[0.0, 1.0]],
                &[3],
                &periodic(1),
                &[Spacing::Explicit(vec![0.0, 0.7, 0.5, 1.0])],
            ),
            Err(TransportError::NonMonotoneFacets { dir: 0, index: 1 })
        ));
        assert!(matches!(
            Mesh::<f64>::uniform(&[[1.0, 0.0]], &[4], &periodic(1)),
            Err(TransportError::NonMonotoneFacets { .. })
        ));
    }
}
