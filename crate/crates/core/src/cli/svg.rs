use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::hopf::{CriticalPoint, Orientation, TrajectorySegment};
use crate::mesh::{DiscreteMap, UnitDiskMesh};

const SIZE: f64 = 1000.0;
const PAD: f64 = 40.0;

/// Affine map from a world-space box onto the square canvas, y pointing up.
struct Frame {
    lo: Complex64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Complex64>) -> Self {
        let (mut lo, mut hi) = (Complex64::new(f64::MAX, f64::MAX), Complex64::new(f64::MIN, f64::MIN));
        for p in points.filter(|p| p.is_finite()) {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        if lo.re > hi.re {
            lo = Complex64::new(-1.0, -1.0);
            hi = Complex64::new(1.0, 1.0);
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
        let scale = (SIZE - 2.0 * PAD) / span;
        // Centre the shorter side.
        let slack = Complex64::new(span - (hi.re - lo.re), span - (hi.im - lo.im)) * 0.5;
        Self { lo: lo - slack, scale }
    }

    fn xy(&self, p: Complex64) -> (f64, f64) {
        (PAD + (p.re - self.lo.re) * self.scale, SIZE - PAD - (p.im - self.lo.im) * self.scale)
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn polyline(out: &mut String, frame: &Frame, pts: &[Complex64], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let mut coords = String::new();
    for p in pts.iter().filter(|p| p.is_finite()) {
        let (x, y) = frame.xy(*p);
        let _ = write!(coords, "{x:.2},{y:.2} ");
    }
    let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.trim_end());
}

/// Vertical trajectories solid, horizontal dashed, critical points as dots.
pub fn foliation_svg(segments: &[TrajectorySegment], critical: &[CriticalPoint]) -> String {
    let frame = Frame::fit([Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0)].into_iter());
    let mut out = String::new();
    header(&mut out);
    let circle: Vec<Complex64> = (0..=256).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 256.0)).collect();
    polyline(&mut out, &frame, &circle, r##"stroke="#888" stroke-width="1""##);
    for seg in segments {
        let style = match seg.orientation {
            Orientation::Vertical => r##"stroke="#1f4e9c" stroke-width="1.2""##,
            Orientation::Horizontal => r##"stroke="#b8430f" stroke-width="1.2" stroke-dasharray="6,4""##,
        };
        polyline(&mut out, &frame, &seg.points, style);
    }
    for c in critical {
        let (x, y) = frame.xy(c.position);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="black"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

/// Images under `h` of `circles` concentric circles and `rays` radii.
pub fn map_svg(mesh: &UnitDiskMesh, h: &DiscreteMap, circles: usize, rays: usize) -> String {
    let frame = Frame::fit(h.values.iter().copied());
    let mut out = String::new();
    header(&mut out);
    let image = |pts: Vec<Complex64>| -> Vec<Complex64> {
        pts.into_iter().filter_map(|z| mesh.interpolate(&h.values, z)).collect()
    };
    for k in 1..=circles {
        let r = k as f64 / circles as f64;
        let pts = (0..=512).map(|j| Complex64::from_polar(r, TAU * j as f64 / 512.0)).collect();
        let width = if k == circles { 2.0 } else { 1.0 };
        polyline(&mut out, &frame, &image(pts), &format!(r##"stroke="#1f4e9c" stroke-width="{width}""##));
    }
    for k in 0..rays {
        let theta = TAU * k as f64 / rays as f64;
        let pts = (0..=128).map(|j| Complex64::from_polar(j as f64 / 128.0, theta)).collect();
        polyline(&mut out, &frame, &image(pts), r##"stroke="#b8430f" stroke-width="1""##);
    }
    out.push_str("</svg>\n");
    out
}
