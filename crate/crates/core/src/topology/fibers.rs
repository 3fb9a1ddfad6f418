use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{segment_hits_disk, triangle_hits_disk};
use crate::boundary::distance_to_polygon;
use crate::energy::jacobian_stats;
use crate::error::{Error, Result};
use crate::mesh::{wirtinger, DiscreteMap, UnitDiskMesh};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberComponent {
    pub triangles: Vec<usize>,
    /// Some triangle of the component has a vertex on the unit circle.
    pub meets_boundary: bool,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, keeping labels deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

pub(crate) fn image_triangle(mesh: &UnitDiskMesh, h: &DiscreteMap, t: usize) -> [Complex64; 3] {
    let [a, b, c] = mesh.triangles[t];
    [h.values[a], h.values[b], h.values[c]]
}

/// Local index of a mesh-boundary edge of `t`, if it has one.
fn outer_edge(mesh: &UnitDiskMesh, t: usize) -> Option<usize> {
    (0..3).find(|&k| mesh.neighbors(t)[k].is_none())
}

/// Connected components of the triangles whose affine images meet the
/// closed disk `B(y, r)`. Triangles sharing an edge are adjacent; all
/// triangles whose outer (unit-circle) edge carries a trace segment meeting
/// the disk are joined into one component.
pub fn fiber_components(mesh: &UnitDiskMesh, h: &DiscreteMap, y: Complex64, r: f64) -> Result<Vec<FiberComponent>> {
    if !(r > 0.0) || !y.is_finite() {
        return Err(Error::InvalidArgument(format!("fiber radius must be positive, got {r}")));
    }
    h.check_mesh(mesh)?;
    let nt = mesh.triangle_count();
    let marked: Vec<bool> = (0..nt).map(|t| triangle_hits_disk(image_triangle(mesh, h, t), y, r)).collect();
    let mut uf = UnionFind::new(nt);
    let mut trace_hit: Option<usize> = None;
    for t in 0..nt {
        if !marked[t] {
            continue;
        }
        for n in mesh.neighbors(t).iter().flatten() {
            if marked[*n] {
                uf.union(t, *n);
            }
        }
        if let Some(k) = outer_edge(mesh, t) {
            let tri = mesh.triangles[t];
            let (a, b) = (h.values[tri[(k + 1) % 3]], h.values[tri[(k + 2) % 3]]);
            if segment_hits_disk(a, b, y, r) {
                match trace_hit {
                    Some(first) => uf.union(first, t),
                    None => trace_hit = Some(t),
                }
            }
        }
    }
    let mut label = vec![usize::MAX; nt];
    let mut out: Vec<FiberComponent> = Vec::new();
    for t in 0..nt {
        if !marked[t] {
            continue;
        }
        let root = uf.find(t);
        if label[root] == usize::MAX {
            label[root] = out.len();
            out.push(FiberComponent { triangles: Vec::new(), meets_boundary: false });
        }
        let comp = &mut out[label[root]];
        comp.triangles.push(t);
        comp.meets_boundary |= mesh.touches_boundary(t);
    }
    Ok(out)
}

/// Three times the median element diameter of the mesh.
pub fn default_fiber_radius(mesh: &UnitDiskMesh) -> f64 {
    3.0 * mesh.median_diameter()
}

/// `n × n` grid over the bounding box of `polygon`, keeping the points that
/// lie inside it at distance more than `margin` from its edges.
pub fn interior_grid(polygon: &[Complex64], n: usize, margin: f64) -> Vec<Complex64> {
    if polygon.len() < 3 || n == 0 {
        return Vec::new();
    }
    let (mut lo, mut hi) = (polygon[0], polygon[0]);
    for p in polygon {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let fx = (i as f64 + 0.5) / n as f64;
            let fy = (j as f64 + 0.5) / n as f64;
            let p = Complex64::new(lo.re + fx * (hi.re - lo.re), lo.im + fy * (hi.im - lo.im));
            if crate::boundary::winding_number(polygon, p) != 0 && distance_to_polygon(polygon, p) > margin {
                out.push(p);
            }
        }
    }
    out
}

/// `n × n` grid over the bounding box of the image of `h`, keeping points
/// farther than `margin` from the trace curve.
pub fn image_grid(mesh: &UnitDiskMesh, h: &DiscreteMap, n: usize, margin: f64) -> Result<Vec<Complex64>> {
    h.check_mesh(mesh)?;
    let trace = h.boundary_values(mesh);
    let (mut lo, mut hi) = (h.values[0], h.values[0]);
    for p in &h.values {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let fx = (i as f64 + 0.5) / n as f64;
            let fy = (j as f64 + 0.5) / n as f64;
            let p = Complex64::new(lo.re + fx * (hi.re - lo.re), lo.im + fy * (hi.im - lo.im));
            if distance_to_polygon(&trace, p) > margin {
                out.push(p);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    MonotoneConsistent,
    NonMonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSample {
    pub y: Complex64,
    pub r: f64,
    pub component_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub samples: Vec<FiberSample>,
    pub max_components: usize,
    pub verdict: Verdict,
    pub min_jacobian: f64,
}

impl MonotonicityReport {
    pub fn worst_sample(&self) -> Option<&FiberSample> {
        self.samples.iter().max_by_key(|s| s.component_count)
    }
}

pub fn monotonicity_report(mesh: &UnitDiskMesh, h: &DiscreteMap, grid: &[Complex64], r: f64) -> Result<MonotonicityReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("fiber radius must be positive, got {r}")));
    }
    let samples: Vec<FiberSample> = grid
        .par_iter()
        .map(|&y| fiber_components(mesh, h, y, r).map(|c| FiberSample { y, r, component_count: c.len() }))
        .collect::<Result<_>>()?;
    let max_components = samples.iter().map(|s| s.component_count).max().unwrap_or(0);
    let min_jacobian = jacobian_stats(&wirtinger(mesh, h)?).min_jacobian;
    Ok(MonotonicityReport {
        samples,
        max_components,
        verdict: if max_components <= 1 { Verdict::MonotoneConsistent } else { Verdict::NonMonotone },
        min_jacobian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_connected_fibers() {
        let mesh = UnitDiskMesh::build(16, 6).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        assert_eq!(fiber_components(&mesh, &id, c(0.3, 0.0), 0.05).unwrap().len(), 1);
        let circle: Vec<Complex64> = (0..64).map(|k| Complex64::from_polar(1.0, k as f64 * 0.1)).collect();
        let grid = interior_grid(&circle, 10, 0.05);
        assert!(!grid.is_empty());
        let rep = monotonicity_report(&mesh, &id, &grid, 0.05).unwrap();
        assert_eq!(rep.verdict, Verdict::MonotoneConsistent);
        assert_eq!(rep.max_components, 1);
    }

    #[test]
    fn square_has_two_preimages() {
        let mesh = UnitDiskMesh::build(32, 8).unwrap();
        let sq = DiscreteMap::from_fn(&mesh, |z| gallery::power(z, 2)).unwrap();
        let comps = fiber_components(&mesh, &sq, c(0.25, 0.0), 0.01).unwrap();
        assert_eq!(comps.len(), 2);
        for comp in &comps {
            let mean: Complex64 =
                comp.triangles.iter().map(|&t| mesh.centroid(t)).sum::<Complex64>() / comp.triangles.len() as f64;
            assert!((mean.norm() - 0.5).abs() < 0.05 && mean.im.abs() < 0.05);
        }
    }

    #[test]
    fn boundary_arcs_are_joined() {
        let mesh = UnitDiskMesh::build(8, 6).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        // A ball straddling the circle yields a single component.
        assert_eq!(fiber_components(&mesh, &id, c(1.0, 0.0), 0.3).unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_radius() {
        let mesh = UnitDiskMesh::build(2, 6).unwrap();
        let id = DiscreteMap::from_fn(&mesh, |z| z).unwrap();
        assert!(fiber_components(&mesh, &id, c(0.0, 0.0), 0.0).is_err());
    }
}
