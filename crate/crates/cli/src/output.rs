//! Snapshot and plot writers: CSV field dumps with bit-faithful floats,
//! and SVG contour maps. 3D fields are plotted as the vertical slice
//! through the middle of the y range.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use swift_transport::{CellField64, Mesh64};

use crate::contour::isoline_segments;

/// 17 significant decimal digits: enough for an exact f64 round trip.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one field as CSV: coordinate columns then the value, one row
/// per cell in index order (x fastest).
pub fn write_field_csv(path: &Path, mesh: &Mesh64, field: &CellField64) -> std::io::Result<()> {
    let ndim = mesh.ndim();
    let counts = mesh.counts();
    let mut out = String::new();
    out.push_str(match ndim {
        3 => "x,y,z,value\n",
        2 => "x,y,value\n",
        _ => "x,value\n",
    });
    let (cx, cy, cz) = (mesh.centers(0), mesh.centers(1), mesh.centers(2));
    let data = field.data();
    let mut k = 0;
    for iz in 0..counts[2].max(1) {
        for iy in 0..counts[1].max(1) {
            for ix in 0..counts[0] {
                out.push_str(&full(cx[ix]));
                if ndim >= 2 {
                    out.push(',');
                    out.push_str(&full(cy[iy]));
                }
                if ndim >= 3 {
                    out.push(',');
                    out.push_str(&full(cz[iz]));
                }
                out.push(',');
                out.push_str(&full(data[k]));
                out.push('\n');
                k += 1;
            }
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

/// Contour levels every `step`, spanning the data range, omitting any
/// level within rounding distance of `omit`.
pub fn contour_levels(min: f64, max: f64, step: f64, omit: f64) -> Vec<f64> {
    let lo = (min / step).floor() as i64;
    let hi = (max / step).ceil() as i64;
    let mut out = Vec::new();
    for k in lo..=hi {
        let level = k as f64 * step;
        if (level - omit).abs() < 1e-9 || level < min || level > max {
            continue;
        }
        out.push(level);
    }
    out
}

/// The plotting plane of a field: the full plane in 2D, the x-z slice at
/// the middle y index in 3D. Returns (horizontal coords, vertical coords,
/// values, axis names).
fn plot_plane(mesh: &Mesh64, field: &CellField64) -> (Vec<f64>, Vec<f64>, Vec<f64>, [&'static str; 2]) {
    let counts = mesh.counts();
    let data = field.data();
    if mesh.ndim() == 3 {
        let (nx, ny, nz) = (counts[0], counts[1], counts[2]);
        let jmid = ny / 2;
        let mut v = Vec::with_capacity(nx * nz);
        for iz in 0..nz {
            for ix in 0..nx {
                v.push(data[ix + nx * (jmid + ny * iz)]);
            }
        }
        (
            mesh.centers(0).to_vec(),
            mesh.centers(2).to_vec(),
            v,
            ["x", "z"],
        )
    } else {
        (
            mesh.centers(0).to_vec(),
            mesh.centers(1).to_vec(),
            data.to_vec(),
            ["x", "y"],
        )
    }
}

/// Renders one field as an SVG contour map. Negative levels are dashed,
/// matching the usual convention for undershoot contours.
pub fn field_svg(mesh: &Mesh64, field: &CellField64, levels: &[f64], title: &str) -> String {
    let (xs, ys, v, axes) = plot_plane(mesh, field);
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let (y0, y1) = (ys[0], ys[ys.len() - 1]);
    let (w, h) = (x1 - x0, y1 - y0);
    let scale = 600.0 / w.max(1e-12);
    let (pw, ph) = (w * scale, h * scale);
    let pad = 40.0;
    // World to view: x rightwards, y upwards (SVG y runs down).
    let vx = |x: f64| (x - x0) * scale + pad;
    let vy = |y: f64| (y1 - y) * scale + pad;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        pw + 2.0 * pad,
        ph + 2.0 * pad + 20.0,
        pw + 2.0 * pad,
        ph + 2.0 * pad + 20.0
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{pw:.2}" height="{ph:.2}" fill="white" stroke="black" stroke-width="1"/>"#
    );
    for &level in levels {
        let segs = isoline_segments(&xs, &ys, &v, level);
        if segs.is_empty() {
            continue;
        }
        let mut d = String::new();
        for s in &segs {
            let _ = write!(
                d,
                "M{:.2} {:.2}L{:.2} {:.2}",
                vx(s[0]),
                vy(s[1]),
                vx(s[2]),
                vy(s[3])
            );
        }
        let dash = if level < 0.0 {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="black" stroke-width="1"{dash}/>"#
        );
    }
    let fmin = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(
        svg,
        r#"<text x="{pad}" y="{:.1}" font-family="sans-serif" font-size="14">{} ({}-{} plane)  min {:.3}  max {:.3}</text>"#,
        ph + 2.0 * pad + 15.0,
        title,
        axes[0],
        axes[1],
        fmin,
        fmax
    );
    svg.push_str("</svg>\n");
    svg
}

pub fn write_field_svg(
    path: &Path,
    mesh: &Mesh64,
    field: &CellField64,
    levels: &[f64],
    title: &str,
) -> std::io::Result<()> {
    fs::write(path, field_svg(mesh, field, levels, title))
}
