//! CSV and SVG writers for scanned regions.

use std::io::{self, Write};

use num_complex::Complex64;

use super::{ComplexWindow, StabilityRegion};

/// 17 significant digits, enough to round-trip any `f64`.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `re,im,abs_r,inside`, one row per node, imaginary index outermost.
pub fn write_grid_csv<W: Write>(region: &StabilityRegion, mut out: W) -> io::Result<()> {
    let w = &region.window;
    writeln!(out, "re,im,abs_r,inside")?;
    for j in 0..w.ny {
        for i in 0..w.nx {
            let z = w.node(i, j);
            writeln!(
                out,
                "{},{},{},{}",
                float(z.re),
                float(z.im),
                float(region.abs_at(i, j)),
                u8::from(region.is_inside(i, j))
            )?;
        }
    }
    Ok(())
}

/// `polyline_id,re,im`, polylines numbered from 0.
pub fn write_boundary_csv<W: Write>(boundary: &[Vec<Complex64>], mut out: W) -> io::Result<()> {
    writeln!(out, "polyline_id,re,im")?;
    for (id, line) in boundary.iter().enumerate() {
        for z in line {
            writeln!(out, "{id},{},{}", float(z.re), float(z.im))?;
        }
    }
    Ok(())
}

/// One `<path>` per polyline in window coordinates (one SVG unit per axis
/// unit, imaginary axis pointing up).
pub fn write_boundary_svg<W: Write>(
    boundary: &[Vec<Complex64>],
    window: &ComplexWindow,
    mut out: W,
) -> io::Result<()> {
    let width = window.re_max - window.re_min;
    let height = window.im_max - window.im_min;
    let stroke = 0.004 * width.max(height);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        window.re_min, -window.im_max, width, height
    )?;
    writeln!(
        out,
        r##"  <g fill="none" stroke="#999" stroke-width="{}"><path d="M {} 0 H {}"/><path d="M 0 {} V {}"/></g>"##,
        stroke / 2.0,
        window.re_min,
        window.re_max,
        -window.im_max,
        -window.im_min
    )?;
    for line in boundary {
        let mut d = String::new();
        for (k, z) in line.iter().enumerate() {
            let cmd = if k == 0 { "M" } else { "L" };
            // `+ 0.0` turns -0.0 into 0.0.
            d.push_str(&format!("{cmd} {:.6} {:.6} ", z.re + 0.0, -z.im + 0.0));
        }
        writeln!(
            out,
            r#"  <path fill="none" stroke="black" stroke-width="{stroke}" d="{}"/>"#,
            d.trim_end()
        )?;
    }
    writeln!(out, "</svg>")
}
