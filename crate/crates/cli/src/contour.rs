//! Marching-squares isolines on a rectilinear grid of point samples, used
//! by the SVG plot writer. Output is a soup of straight segments per
//! contour level; the plots stroke each segment, so no polyline chaining
//! is needed.

/// Line segments `[x1, y1, x2, y2]` of the `level` isoline of `v`, where
/// `v[j * xs.len() + i]` is the sample at `(xs[i], ys[j])`. Crossing
/// points are linearly interpolated; saddle cells are disambiguated with
/// the cell-average value.
pub fn isoline_segments(xs: &[f64], ys: &[f64], v: &[f64], level: f64) -> Vec<[f64; 4]> {
    let (nx, ny) = (xs.len(), ys.len());
    assert_eq!(v.len(), nx * ny, "sample grid shape mismatch");
    let mut segs = Vec::new();
    if nx < 2 || ny < 2 {
        return segs;
    }
    let at = |i: usize, j: usize| v[j * nx + i];
    // Edge ids within a cell: 0 bottom, 1 right, 2 top, 3 left.
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (va, vb) = (at(i, j), at(i + 1, j));
            let (vc, vd) = (at(i + 1, j + 1), at(i, j + 1));
            let code = (usize::from(va >= level))
                | (usize::from(vb >= level) << 1)
                | (usize::from(vc >= level) << 2)
                | (usize::from(vd >= level) << 3);
            if code == 0 || code == 15 {
                continue;
            }
            let lerp = |p: f64, q: f64, vp: f64, vq: f64| p + (level - vp) / (vq - vp) * (q - p);
            let point = |edge: usize| -> [f64; 2] {
                match edge {
                    0 => [lerp(xs[i], xs[i + 1], va, vb), ys[j]],
                    1 => [xs[i + 1], lerp(ys[j], ys[j + 1], vb, vc)],
                    2 => [lerp(xs[i], xs[i + 1], vd, vc), ys[j + 1]],
                    _ => [xs[i], lerp(ys[j], ys[j + 1], va, vd)],
                }
            };
            let mut emit = |e1: usize, e2: usize| {
                let [x1, y1] = point(e1);
                let [x2, y2] = point(e2);
                segs.push([x1, y1, x2, y2]);
            };
            match code {
                1 | 14 => emit(3, 0),
                2 | 13 => emit(0, 1),
                3 | 12 => emit(3, 1),
                4 | 11 => emit(1, 2),
                6 | 9 => emit(0, 2),
                7 | 8 => emit(3, 2),
                5 => {
                    // Corners a and c above: the centre decides whether the
                    // above-region is one diagonal band or two patches.
                    if 0.25 * (va + vb + vc + vd) >= level {
                        emit(0, 1);
                        emit(2, 3);
                    } else {
                        emit(0, 3);
                        emit(1, 2);
                    }
                }
                10 => {
                    if 0.25 * (va + vb + vc + vd) >= level {
                        emit(0, 3);
                        emit(1, 2);
                    } else {
                        emit(0, 1);
                        emit(2, 3);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    segs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_front_is_a_straight_line() {
        // Field f(x, y) = x on a 5x3 grid: the 0.5 isoline is x = 0.5.
        let xs: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = (0..3).map(|j| j as f64).collect();
        let v: Vec<f64> = ys
            .iter()
            .flat_map(|_| xs.iter().cloned())
            .collect();
        let segs = isoline_segments(&xs, &ys, &v, 0.5);
        assert_eq!(segs.len(), 2);
        for s in segs {
            assert!((s[0] - 0.5).abs() < 1e-14 && (s[2] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn level_outside_range_gives_nothing() {
        let xs = [0.0, 1.0];
        let ys = [0.0, 1.0];
        let v = [0.0, 0.1, 0.2, 0.3];
        assert!(isoline_segments(&xs, &ys, &v, 2.0).is_empty());
        assert!(isoline_segments(&xs, &ys, &v, -1.0).is_empty());
    }

    #[test]
    fn diagonal_interpolation_is_linear() {
        // f = x + y on a unit cell; the 1.0 isoline joins (1,0) to (0,1).
        let xs = [0.0, 1.0];
        let ys = [0.0, 1.0];
        let v = [0.0, 1.0, 1.0, 2.0];
        let segs = isoline_segments(&xs, &ys, &v, 1.0);
        assert_eq!(segs.len(), 1);
        let s = segs[0];
        let ends = [[s[0], s[1]], [s[2], s[3]]];
        for e in ends {
            assert!((e[0] + e[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn closed_bump_contour_has_consistent_topology() {
        // A radial bump: every marching-squares segment endpoint lies on
        // the circle r = 0.5 up to interpolation error, and the segment
        // count is positive.
        let n = 41;
        let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let ys = xs.clone();
        let mut v = vec![0.0; n * n];
        for (j, &y) in ys.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                v[j * n + i] = 1.0 - (x * x + y * y).sqrt();
            }
        }
        let segs = isoline_segments(&xs, &ys, &v, 0.5);
        assert!(!segs.is_empty());
        for s in &segs {
            for k in [0usize, 2] {
                let r = (s[k] * s[k] + s[k + 1] * s[k + 1]).sqrt();
                assert!((r - 0.5).abs() < 0.01, "endpoint off the circle: r = {r}");
            }
        }
    }
}
