use num_complex::Complex64;

use crate::boundary::segment_distance;

fn cross(a: Complex64, b: Complex64) -> f64 {
    (a.conj() * b).im
}

pub fn segment_hits_disk(a: Complex64, b: Complex64, y: Complex64, r: f64) -> bool {
    segment_distance(y, a, b) <= r
}

/// Whether the closed triangle `tri` (any orientation, possibly degenerate)
/// meets the closed disk `B(y, r)`.
pub fn triangle_hits_disk(tri: [Complex64; 3], y: Complex64, r: f64) -> bool {
    if (0..3).any(|k| segment_hits_disk(tri[k], tri[(k + 1) % 3], y, r)) {
        return true;
    }
    // A flat triangle is the union of its edges, and the sign test below
    // would accept every point on its supporting line.
    if cross(tri[1] - tri[0], tri[2] - tri[0]) == 0.0 {
        return false;
    }
    let s = [cross(tri[1] - tri[0], y - tri[0]), cross(tri[2] - tri[1], y - tri[1]), cross(tri[0] - tri[2], y - tri[2])];
    s.iter().all(|v| *v >= 0.0) || s.iter().all(|v| *v <= 0.0)
}

/// Signed area of `disk ∩ triangle(centre, a, b)` for a disk centred at the
/// origin; `a` and `b` are relative to the centre.
fn wedge_area(a: Complex64, b: Complex64, r: f64) -> f64 {
    let d = b - a;
    let (qa, qb, qc) = (d.norm_sqr(), 2.0 * (a.conj() * d).re, a.norm_sqr() - r * r);
    let mut cuts = vec![0.0];
    if qa > 0.0 {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc > 0.0 {
            let sq = disc.sqrt();
            for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.push(1.0);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (a + d * w[0], a + d * w[1]);
        let mid = a + d * (0.5 * (w[0] + w[1]));
        if mid.norm_sqr() <= r * r {
            total += 0.5 * cross(p, q);
        } else {
            let angle = cross(p, q).atan2((p.conj() * q).re);
            total += 0.5 * r * r * angle;
        }
    }
    total
}

/// Signed area of `polygon ∩ B(y, r)`: positive for counterclockwise input.
pub fn disk_polygon_area(poly: &[Complex64], y: Complex64, r: f64) -> f64 {
    let n = poly.len();
    (0..n).map(|i| wedge_area(poly[i] - y, poly[(i + 1) % n] - y, r)).sum()
}
