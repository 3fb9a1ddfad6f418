use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fibers::{fiber_components, image_triangle};
use super::geometry::disk_polygon_area;
use crate::boundary::distance_to_polygon;
use crate::error::{Error, Result};
use crate::mesh::{triangle_differential, DiscreteMap, UnitDiskMesh};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeComponent {
    pub triangle_ids: Vec<usize>,
    /// `None` when the component reaches the unit circle.
    pub degree_winding: Option<i64>,
    pub degree_jacobian: f64,
    pub closure_meets_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub target_point: Complex64,
    pub radius: f64,
    pub components: Vec<DegreeComponent>,
    pub total_degree: i64,
}

impl DegreeReport {
    /// Sum of the Jacobian estimates over components away from the circle.
    pub fn total_jacobian_degree(&self) -> f64 {
        self.components.iter().filter(|c| !c.closure_meets_boundary).map(|c| c.degree_jacobian).sum()
    }
}

/// Per-component degree of `h` over `B(y, r)`, by winding of `h - y` along
/// the component's boundary edges and by the normalized signed area of the
/// clipped image triangles.
pub fn degree_in_preimage(mesh: &UnitDiskMesh, h: &DiscreteMap, y: Complex64, r: f64) -> Result<DegreeReport> {
    h.check_mesh(mesh)?;
    let trace = h.boundary_values(mesh);
    if distance_to_polygon(&trace, y) < 1.5 * r {
        return Err(Error::BoundaryAdjacent);
    }
    let comps = fiber_components(mesh, h, y, r)?;
    let mut member = vec![usize::MAX; mesh.triangle_count()];
    for (i, comp) in comps.iter().enumerate() {
        for &t in &comp.triangles {
            member[t] = i;
        }
    }
    let ball = PI * r * r;
    let mut components = Vec::with_capacity(comps.len());
    for (i, comp) in comps.into_iter().enumerate() {
        let mut angle = 0.0;
        let mut open = false;
        let mut jac = 0.0;
        for &t in &comp.triangles {
            let tri = mesh.triangles[t];
            for k in 0..3 {
                match mesh.neighbors(t)[k] {
                    None => open = true,
                    Some(n) if member[n] == i => {}
                    Some(_) => {
                        let a = h.values[tri[(k + 1) % 3]] - y;
                        let b = h.values[tri[(k + 2) % 3]] - y;
                        angle += (b * a.conj()).arg();
                    }
                }
            }
            let d = triangle_differential(mesh, t, &h.values);
            if d.jacobian != 0.0 {
                let clipped = disk_polygon_area(&image_triangle(mesh, h, t), y, r).abs();
                jac += d.jacobian.signum() * clipped;
            }
        }
        let closure_meets_boundary = open || comp.meets_boundary;
        components.push(DegreeComponent {
            triangle_ids: comp.triangles,
            degree_winding: if closure_meets_boundary { None } else { Some((angle / (2.0 * PI)).round() as i64) },
            degree_jacobian: jac / ball,
            closure_meets_boundary,
        });
    }
    let total_degree = components.iter().filter_map(|c| c.degree_winding).sum();
    Ok(DegreeReport { target_point: y, radius: r, components, total_degree })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeEquality {
    pub map_degree: i64,
    pub extension_degree: i64,
    pub equal: bool,
}

/// Total degrees of two maps with the same trace.
pub fn degree_equality_check(
    mesh: &UnitDiskMesh,
    h: &DiscreteMap,
    f_extension: &DiscreteMap,
    y: Complex64,
    r: f64,
) -> Result<DegreeEquality> {
    h.check_mesh(mesh)?;
    f_extension.check_mesh(mesh)?;
    if mesh.boundary_loop.iter().any(|&b| h.values[b] != f_extension.values[b]) {
        return Err(Error::TraceMismatch);
    }
    let a = degree_in_preimage(mesh, h, y, r)?.total_degree;
    let b = degree_in_preimage(mesh, f_extension, y, r)?.total_degree;
    Ok(DegreeEquality { map_degree: a, extension_degree: b, equal: a == b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_degree_one() {
        let mesh = UnitDiskMesh::build(16, 6).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        let rep = degree_in_preimage(&mesh, &id, c(0.0, 0.0), 0.5).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert_eq!(rep.total_degree, 1);
        assert!((rep.components[0].degree_jacobian - 1.0).abs() < 1e-9);
    }

    #[test]
    fn square_degree_two() {
        let mesh = UnitDiskMesh::build(32, 8).unwrap();
        let sq = DiscreteMap::from_fn(&mesh, |z| z * z).unwrap();
        let rep = degree_in_preimage(&mesh, &sq, c(0.0, 0.0), 0.25).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert_eq!(rep.total_degree, 2);
        assert!((rep.components[0].degree_jacobian - 2.0).abs() < 0.1);
    }

    #[test]
    fn point_outside_image() {
        let mesh = UnitDiskMesh::build(8, 6).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        let rep = degree_in_preimage(&mesh, &id, c(2.0, 0.0), 0.5).unwrap();
        assert!(rep.components.is_empty());
        assert_eq!(rep.total_degree, 0);
    }

    #[test]
    fn reflection_has_negative_degree() {
        let mesh = UnitDiskMesh::build(8, 6).unwrap();
        let refl = DiscreteMap::from_fn(&mesh, |z| z.conj()).unwrap();
        let rep = degree_in_preimage(&mesh, &refl, c(0.1, 0.0), 0.3).unwrap();
        assert_eq!(rep.total_degree, -1);
        assert!((rep.total_jacobian_degree() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn boundary_adjacent_and_trace_mismatch() {
        let mesh = UnitDiskMesh::build(8, 6).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        assert_eq!(degree_in_preimage(&mesh, &id, c(0.9, 0.0), 0.1), Err(Error::BoundaryAdjacent));
        let scaled = id.scaled(2.0);
        assert_eq!(degree_equality_check(&mesh, &id, &scaled, c(0.0, 0.0), 0.1), Err(Error::TraceMismatch));
    }
}
