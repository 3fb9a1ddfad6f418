use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{triangle_differential, DiscreteMap, UnitDiskMesh};

/// `C(K) = 64 K²` in the decay inequality.
pub const DECAY_CONSTANT_PER_K2: f64 = 64.0;

const INSIDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationSample {
    pub radius: f64,
    pub osc_ball: f64,
    pub osc_circle: f64,
}

impl OscillationSample {
    /// Smallest `K` with `osc_ball ≤ K · osc_circle`.
    pub fn ratio(&self) -> f64 {
        if self.osc_ball == 0.0 {
            1.0
        } else if self.osc_circle == 0.0 {
            f64::INFINITY
        } else {
            self.osc_ball / self.osc_circle
        }
    }

    pub fn satisfies(&self, k: f64, slack: f64) -> bool {
        self.osc_ball <= k * self.osc_circle + slack
    }
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    ((a - o).conj() * (b - o)).im
}

/// Largest pairwise distance, via the convex hull.
pub(crate) fn diameter(points: &[Complex64]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.is_empty() {
        hull = pts;
    }
    let mut best: f64 = 0.0;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max((hull[i] - hull[j]).norm());
        }
    }
    best
}

/// Oscillation of `h` over the vertices of `B(center, r)` and over the
/// discrete sphere: ball vertices joined by an edge to a vertex outside.
pub fn oscillation_profile(
    mesh: &UnitDiskMesh,
    h: &DiscreteMap,
    center: Complex64,
    radii: &[f64],
) -> Result<Vec<OscillationSample>> {
    h.check_mesh(mesh)?;
    let resolution = mesh.median_diameter();
    let adj = mesh.vertex_adjacency();
    radii
        .iter()
        .map(|&r| {
            if !(r >= resolution) {
                return Err(Error::BelowResolution { radius: r, resolution });
            }
            if center.norm() + r > 1.0 + INSIDE_TOL {
                return Err(Error::Geometry(format!("ball B({center}, {r}) leaves the disk")));
            }
            let inside: Vec<bool> = mesh.vertices.iter().map(|v| (v - center).norm() <= r + INSIDE_TOL).collect();
            let mut ball = Vec::new();
            let mut sphere = Vec::new();
            for v in 0..mesh.vertex_count() {
                if !inside[v] {
                    continue;
                }
                ball.push(h.values[v]);
                if adj[v].iter().any(|&u| !inside[u]) || mesh.is_boundary_vertex(v) {
                    sphere.push(h.values[v]);
                }
            }
            Ok(OscillationSample { radius: r, osc_ball: diameter(&ball), osc_circle: diameter(&sphere) })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCheck {
    /// `(osc over B(center, r))²`.
    pub lhs: f64,
    /// `C(K) / log(R/r) · E[h; B(center, R)]`.
    pub rhs: f64,
    pub local_energy: f64,
    pub passes: bool,
}

pub fn oscillation_decay_check(
    mesh: &UnitDiskMesh,
    h: &DiscreteMap,
    center: Complex64,
    r: f64,
    big_r: f64,
    k: f64,
) -> Result<DecayCheck> {
    h.check_mesh(mesh)?;
    if !(r > 0.0 && 2.0 * r < big_r) {
        return Err(Error::Geometry(format!("need 0 < r < R/2, got r = {r}, R = {big_r}")));
    }
    if center.norm() + big_r > 1.0 + INSIDE_TOL {
        return Err(Error::Geometry(format!("ball B({center}, {big_r}) leaves the disk")));
    }
    if !(k >= 1.0) {
        return Err(Error::InvalidArgument(format!("oscillation constant must be at least 1, got {k}")));
    }
    let small: Vec<Complex64> = (0..mesh.vertex_count())
        .filter(|&v| (mesh.vertices[v] - center).norm() <= r + INSIDE_TOL)
        .map(|v| h.values[v])
        .collect();
    let osc = diameter(&small);
    let local_energy: f64 = (0..mesh.triangle_count())
        .filter(|&t| (mesh.centroid(t) - center).norm() <= big_r)
        .map(|t| {
            let d = triangle_differential(mesh, t, &h.values);
            d.area * d.stretch_sq()
        })
        .sum();
    let lhs = osc * osc;
    let rhs = DECAY_CONSTANT_PER_K2 * k * k / (big_r / r).ln() * local_energy;
    Ok(DecayCheck { lhs, rhs, local_energy, passes: lhs <= rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hull_diameter() {
        let pts: Vec<Complex64> = (0..50).map(|k| Complex64::from_polar(1.0, k as f64 * 0.7)).collect();
        let brute = pts.iter().flat_map(|a| pts.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
        assert!((diameter(&pts) - brute).abs() < 1e-15);
        assert_eq!(diameter(&[c(1.0, 1.0)]), 0.0);
        assert!((diameter(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_has_unit_ratio() {
        let mesh = UnitDiskMesh::build(20, 8).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        for s in oscillation_profile(&mesh, &id, c(0.0, 0.0), &[0.3, 0.5]).unwrap() {
            assert!((s.osc_ball - 2.0 * s.radius).abs() < 1e-12);
            assert_eq!(s.osc_ball, s.osc_circle);
        }
    }

    #[test]
    fn decay_on_identity_and_constant() {
        let mesh = UnitDiskMesh::build(40, 8).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        let chk = oscillation_decay_check(&mesh, &id, c(0.0, 0.0), 0.1, 0.5, 1.0).unwrap();
        assert!((chk.lhs - 0.04).abs() < 1e-12);
        let expect = 64.0 * 2.0 * std::f64::consts::PI * 0.25 / 5f64.ln();
        assert!((chk.rhs - expect).abs() / expect < 0.05, "{}", chk.rhs);
        assert!(chk.passes);
        let k = DiscreteMap::from_fn(&mesh, |_| c(2.0, 0.0)).unwrap();
        let chk = oscillation_decay_check(&mesh, &k, c(0.1, 0.0), 0.1, 0.5, 1.0).unwrap();
        assert_eq!(chk.lhs, 0.0);
        assert!(chk.passes);
    }

    #[test]
    fn geometry_errors() {
        let mesh = UnitDiskMesh::build(10, 6).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        assert!(matches!(oscillation_profile(&mesh, &id, c(0.0, 0.0), &[0.01]), Err(Error::BelowResolution { .. })));
        assert!(matches!(oscillation_profile(&mesh, &id, c(0.8, 0.0), &[0.3]), Err(Error::Geometry(_))));
        assert!(matches!(oscillation_decay_check(&mesh, &id, c(0.0, 0.0), 0.3, 0.5, 1.0), Err(Error::Geometry(_))));
    }
}
