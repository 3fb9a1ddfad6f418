//! Concentric-ring triangulations of the closed unit disk and the per-element
//! Wirtinger calculus of piecewise-linear maps defined on them.
//!
//! Ring `k` (1 ≤ k ≤ rings) sits at radius `k / rings` and carries
//! `k * sectors` equally spaced vertices; vertex 0 is the origin. Every ring
//! contains the `sectors` spoke directions `2πs / sectors`, so the band
//! between two consecutive rings splits into `sectors` identical wedges of
//! `2k - 1` triangles each. Triangles are stored band by band, wedge by
//! wedge, which makes point location a constant-time lookup.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies the triangulation a [`DiscreteMap`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshId {
    pub rings: usize,
    pub sectors: usize,
}

#[derive(Debug, Clone)]
pub struct UnitDiskMesh {
    pub vertices: Vec<Complex64>,
    pub triangles: Vec<[usize; 3]>,
    /// Ring `rings`, counterclockwise.
    pub boundary_loop: Vec<usize>,
    pub rings: usize,
    pub sectors: usize,
    /// `∂_z λ_v` of the three barycentric hat functions, per triangle.
    shape_dz: Vec<[Complex64; 3]>,
    areas: Vec<f64>,
    /// Triangle across the edge opposite to local vertex `i`.
    neighbors: Vec<[Option<usize>; 3]>,
    incident: Vec<Vec<usize>>,
}

/// Index of the first vertex of ring `k`.
fn ring_offset(k: usize, sectors: usize) -> usize {
    if k == 0 {
        0
    } else {
        1 + sectors * (k - 1) * k / 2
    }
}

impl UnitDiskMesh {
    pub fn build(rings: usize, sectors: usize) -> Result<Self> {
        if rings < 1 {
            return Err(Error::InvalidMesh(format!("rings must be at least 1, got {rings}")));
        }
        if sectors < 3 {
            return Err(Error::InvalidMesh(format!("sectors must be at least 3, got {sectors}")));
        }
        let n_vertices = 1 + sectors * rings * (rings + 1) / 2;
        let mut vertices = Vec::with_capacity(n_vertices);
        vertices.push(Complex64::new(0.0, 0.0));
        for k in 1..=rings {
            let count = k * sectors;
            let radius = k as f64 / rings as f64;
            for j in 0..count {
                let theta = 2.0 * PI * j as f64 / count as f64;
                let (s, c) = theta.sin_cos();
                if k == rings {
                    vertices.push(Complex64::new(c, s));
                } else {
                    vertices.push(Complex64::new(radius * c, radius * s));
                }
            }
        }
        debug_assert_eq!(vertices.len(), n_vertices);

        let mut triangles = Vec::with_capacity(sectors * rings * rings);
        for k in 1..=rings {
            let inner_count = (k - 1) * sectors;
            let outer_count = k * sectors;
            let inner_at = |i: usize| {
                if k == 1 {
                    0
                } else {
                    ring_offset(k - 1, sectors) + i % inner_count
                }
            };
            let outer_at = |j: usize| ring_offset(k, sectors) + j % outer_count;
            for s in 0..sectors {
                // Within a wedge the inner ring contributes k points (the last
                // one shared with the next wedge) and the outer ring k + 1.
                let i0 = s * (k - 1);
                let j0 = s * k;
                let (mut i, mut j) = (0usize, 0usize);
                while i < k - 1 || j < k {
                    let advance_outer = if i == k - 1 {
                        true
                    } else if j == k {
                        false
                    } else {
                        // Compare the fractional angles of the next candidates.
                        let next_inner = (i + 1) as f64 / (k - 1) as f64;
                        let next_outer = (j + 1) as f64 / k as f64;
                        next_outer <= next_inner
                    };
                    if advance_outer {
                        triangles.push([inner_at(i0 + i), outer_at(j0 + j), outer_at(j0 + j + 1)]);
                        j += 1;
                    } else {
                        triangles.push([inner_at(i0 + i), outer_at(j0 + j), inner_at(i0 + i + 1)]);
                        i += 1;
                    }
                }
            }
        }
        debug_assert_eq!(triangles.len(), sectors * rings * rings);

        let boundary_loop = (ring_offset(rings, sectors)..n_vertices).collect();
        Ok(Self::assemble(vertices, triangles, boundary_loop, rings, sectors))
    }

    fn assemble(
        vertices: Vec<Complex64>,
        triangles: Vec<[usize; 3]>,
        boundary_loop: Vec<usize>,
        rings: usize,
        sectors: usize,
    ) -> Self {
        let mut shape_dz = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let (a, b, c) = (vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            let e1 = b - a;
            let e2 = c - a;
            let det = e1 * e2.conj() - e2 * e1.conj();
            shape_dz.push([(e1.conj() - e2.conj()) / det, e2.conj() / det, -e1.conj() / det]);
            areas.push(0.5 * (e1.conj() * e2).im);
        }

        let mut incident = vec![Vec::new(); vertices.len()];
        for (ti, t) in triangles.iter().enumerate() {
            for &v in t {
                incident[v].push(ti);
            }
        }
        let mut edge_owner = std::collections::HashMap::with_capacity(triangles.len() * 3);
        let mut neighbors = vec![[None; 3]; triangles.len()];
        for (ti, t) in triangles.iter().enumerate() {
            for local in 0..3 {
                let (p, q) = (t[(local + 1) % 3], t[(local + 2) % 3]);
                let key = (p.min(q), p.max(q));
                if let Some(&(other, other_local)) = edge_owner.get(&key) {
                    neighbors[ti][local] = Some(other);
                    let n: &mut [Option<usize>; 3] = &mut neighbors[other];
                    n[other_local] = Some(ti);
                } else {
                    edge_owner.insert(key, (ti, local));
                }
            }
        }

        Self { vertices, triangles, boundary_loop, rings, sectors, shape_dz, areas, neighbors, incident }
    }

    /// The mesh with twice as many rings.
    pub fn refine(&self) -> Result<Self> {
        Self::build(2 * self.rings, self.sectors)
    }

    pub fn id(&self) -> MeshId {
        MeshId { rings: self.rings, sectors: self.sectors }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn shape_dz(&self, t: usize) -> &[Complex64; 3] {
        &self.shape_dz[t]
    }

    pub fn neighbors(&self, t: usize) -> &[Option<usize>; 3] {
        &self.neighbors[t]
    }

    pub fn incident_triangles(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn centroid(&self, t: usize) -> Complex64 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pa - pb).norm().max((pb - pc).norm()).max((pc - pa).norm())
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.triangle_count()).map(|t| self.diameter(t)).fold(0.0, f64::max)
    }

    pub fn median_diameter(&self) -> f64 {
        let mut d: Vec<f64> = (0..self.triangle_count()).map(|t| self.diameter(t)).collect();
        d.sort_by(|a, b| a.total_cmp(b));
        d[d.len() / 2]
    }

    /// Arc length between consecutive boundary vertices.
    pub fn boundary_spacing(&self) -> f64 {
        2.0 * PI / self.boundary_loop.len() as f64
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        v >= ring_offset(self.rings, self.sectors)
    }

    pub fn first_boundary_vertex(&self) -> usize {
        ring_offset(self.rings, self.sectors)
    }

    pub fn interior_vertices(&self) -> std::ops::Range<usize> {
        0..self.first_boundary_vertex()
    }

    /// True when the triangle has at least one vertex on the unit circle.
    pub fn touches_boundary(&self, t: usize) -> bool {
        self.triangles[t].iter().any(|&v| self.is_boundary_vertex(v))
    }

    /// Sorted edge-neighbours of every vertex.
    pub fn vertex_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for &[a, b, c] in &self.triangles {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                adj[p].push(q);
                adj[q].push(p);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Barycentric coordinates of `z` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, z: Complex64) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        let cross = |u: Complex64, v: Complex64| (u.conj() * v).im;
        let total = cross(pb - pa, pc - pa);
        let la = cross(pb - z, pc - z) / total;
        let lb = cross(pc - z, pa - z) / total;
        [la, lb, 1.0 - la - lb]
    }

    fn wedge_range(&self, band: usize, sector: usize) -> std::ops::Range<usize> {
        let start = self.sectors * (band - 1) * (band - 1) + sector * (2 * band - 1);
        start..start + 2 * band - 1
    }

    /// Triangle containing `z`, with its barycentric coordinates. Points of
    /// the closed disk that fall between the boundary polygon and the unit
    /// circle are assigned to the nearest boundary-band triangle, whose affine
    /// extension is then used.
    pub fn locate(&self, z: Complex64) -> Option<(usize, [f64; 3])> {
        let r = z.norm();
        if !r.is_finite() || r > 1.0 + 1e-12 {
            return None;
        }
        let rings = self.rings as f64;
        let band = ((r * rings).ceil() as usize).clamp(1, self.rings);
        let wedge_angle = 2.0 * PI / self.sectors as f64;
        let theta = z.im.atan2(z.re).rem_euclid(2.0 * PI);
        let sector = ((theta / wedge_angle) as usize).min(self.sectors - 1);

        let mut best: Option<(usize, [f64; 3], f64)> = None;
        let bands = [band, band.saturating_sub(1).max(1), (band + 1).min(self.rings)];
        let sectors = [sector, (sector + 1) % self.sectors, (sector + self.sectors - 1) % self.sectors];
        for &b in &bands {
            for &s in &sectors {
                for t in self.wedge_range(b, s) {
                    let bary = self.barycentric(t, z);
                    let worst = bary.iter().cloned().fold(f64::INFINITY, f64::min);
                    if worst >= -1e-12 {
                        return Some((t, bary));
                    }
                    if best.as_ref().is_none_or(|(_, _, w)| worst > *w) {
                        best = Some((t, bary, worst));
                    }
                }
            }
        }
        // Sliver between the boundary polygon and the circle.
        let (t, bary, _) = best?;
        if self.touches_boundary(t) && r > (self.rings as f64 - 1.0) / rings {
            Some((t, bary))
        } else {
            None
        }
    }

    /// Piecewise-linear interpolation of per-vertex values at `z`.
    pub fn interpolate(&self, values: &[Complex64], z: Complex64) -> Option<Complex64> {
        let (t, bary) = self.locate(z)?;
        let [a, b, c] = self.triangles[t];
        Some(values[a] * bary[0] + values[b] * bary[1] + values[c] * bary[2])
    }

    /// Plain-text serialization: `ND NT`, then `x y` per vertex, then
    /// `i j k` per triangle (0-based).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.vertex_count(), self.triangle_count());
        for v in &self.vertices {
            let _ = writeln!(out, "{:e} {:e}", v.re, v.im);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        out
    }

    /// Parses the text format. The ring/sector parameters are recovered from
    /// the counts and the geometry is checked against a freshly built mesh.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad header `{header}`"))))
            .collect::<Result<_>>()?;
        if counts.len() != 2 {
            return Err(Error::Parse(format!("bad header `{header}`")));
        }
        let (nd, nt) = (counts[0], counts[1]);
        let mut vertices = Vec::with_capacity(nd);
        for _ in 0..nd {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated vertex block".into()))?;
            let xy: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad vertex `{line}`"))))
                .collect::<Result<_>>()?;
            if xy.len() != 2 {
                return Err(Error::Parse(format!("bad vertex `{line}`")));
            }
            vertices.push(Complex64::new(xy[0], xy[1]));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let line = lines.next().ok_or_else(|| Error::Parse("truncated triangle block".into()))?;
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad triangle `{line}`"))))
                .collect::<Result<_>>()?;
            if ids.len() != 3 {
                return Err(Error::Parse(format!("bad triangle `{line}`")));
            }
            triangles.push([ids[0], ids[1], ids[2]]);
        }
        // nt = S R², nd = 1 + S R (R + 1) / 2  =>  R = nt / (2 (nd - 1) - nt) ... solve directly.
        let twice = 2 * nd.saturating_sub(1);
        if twice <= nt || nt == 0 {
            return Err(Error::Parse("counts do not describe a concentric disk mesh".into()));
        }
        let rings = nt / (twice - nt);
        let sectors = if rings > 0 { nt / (rings * rings) } else { 0 };
        let built = Self::build(rings, sectors)
            .map_err(|_| Error::Parse("counts do not describe a concentric disk mesh".into()))?;
        if built.vertex_count() != nd || built.triangle_count() != nt || built.triangles != triangles {
            return Err(Error::Parse("connectivity differs from the concentric disk mesh".into()));
        }
        for (a, b) in built.vertices.iter().zip(&vertices) {
            if (a - b).norm() > 1e-9 {
                return Err(Error::Parse("vertex coordinates differ from the concentric disk mesh".into()));
            }
        }
        Ok(built)
    }
}

/// Per-vertex complex values of a piecewise-linear map on a [`UnitDiskMesh`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMap {
    pub values: Vec<Complex64>,
    pub mesh_id: MeshId,
}

impl DiscreteMap {
    pub fn new(mesh: &UnitDiskMesh, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::VertexCountMismatch { expected: mesh.vertex_count(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, mesh_id: mesh.id() })
    }

    pub fn from_fn(mesh: &UnitDiskMesh, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(mesh, mesh.vertices.iter().map(|&z| f(z)).collect())
    }

    pub fn try_from_fn(mesh: &UnitDiskMesh, f: impl Fn(Complex64) -> Result<Complex64>) -> Result<Self> {
        let values = mesh.vertices.iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
        Self::new(mesh, values)
    }

    pub fn check_mesh(&self, mesh: &UnitDiskMesh) -> Result<()> {
        if self.mesh_id != mesh.id() {
            return Err(Error::MeshMismatch);
        }
        if self.values.len() != mesh.vertex_count() {
            return Err(Error::VertexCountMismatch { expected: mesh.vertex_count(), got: self.values.len() });
        }
        Ok(())
    }

    /// The trace: values on the boundary loop, in loop order.
    pub fn boundary_values(&self, mesh: &UnitDiskMesh) -> Vec<Complex64> {
        mesh.boundary_loop.iter().map(|&v| self.values[v]).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * factor).collect(), mesh_id: self.mesh_id }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleDifferential {
    pub hz: Complex64,
    pub hzbar: Complex64,
    pub jacobian: f64,
    pub area: f64,
}

impl TriangleDifferential {
    /// `|Dh|²` (Frobenius), i.e. `2(|h_z|² + |h_z̄|²)`.
    pub fn stretch_sq(&self) -> f64 {
        2.0 * (self.hz.norm_sqr() + self.hzbar.norm_sqr())
    }

    /// Operator norm of `Dh`.
    pub fn lipschitz(&self) -> f64 {
        self.hz.norm() + self.hzbar.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerField {
    pub records: Vec<TriangleDifferential>,
}

/// Wirtinger derivatives of a single triangle's affine interpolant.
pub fn triangle_differential(mesh: &UnitDiskMesh, t: usize, values: &[Complex64]) -> TriangleDifferential {
    let g = mesh.shape_dz(t);
    let [a, b, c] = mesh.triangles[t];
    let (ha, hb, hc) = (values[a], values[b], values[c]);
    let hz = g[0] * ha + g[1] * hb + g[2] * hc;
    let hzbar = g[0].conj() * ha + g[1].conj() * hb + g[2].conj() * hc;
    TriangleDifferential { hz, hzbar, jacobian: hz.norm_sqr() - hzbar.norm_sqr(), area: mesh.area(t) }
}

pub fn wirtinger(mesh: &UnitDiskMesh, h: &DiscreteMap) -> Result<WirtingerField> {
    h.check_mesh(mesh)?;
    if let Some(i) = h.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let records = (0..mesh.triangle_count())
        .into_par_iter()
        .map(|t| triangle_differential(mesh, t, &h.values))
        .collect();
    Ok(WirtingerField { records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_area(mesh: &UnitDiskMesh, t: usize) -> f64 {
        let [a, b, c] = mesh.triangles[t];
        let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
        0.5 * ((pb - pa).conj() * (pc - pa)).im
    }

    #[test]
    fn smallest_mesh() {
        let m = UnitDiskMesh::build(1, 3).unwrap();
        assert_eq!(m.vertex_count(), 4);
        assert_eq!(m.triangle_count(), 3);
        let expected = 3.0 * 3f64.sqrt() / 4.0;
        assert!((m.total_area() - expected).abs() < 1e-14);
    }

    #[test]
    fn vertex_counting() {
        let m = UnitDiskMesh::build(2, 6).unwrap();
        assert_eq!(m.vertex_count(), 19);
        for (r, s) in [(3, 4), (7, 5), (12, 8)] {
            let m = UnitDiskMesh::build(r, s).unwrap();
            assert_eq!(m.vertex_count(), 1 + s * r * (r + 1) / 2);
            assert_eq!(m.triangle_count(), s * r * r);
        }
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(matches!(UnitDiskMesh::build(4, 2), Err(Error::InvalidMesh(_))));
        assert!(matches!(UnitDiskMesh::build(0, 6), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn structural_invariants() {
        for (r, s) in [(1, 3), (2, 6), (5, 7), (16, 6)] {
            let m = UnitDiskMesh::build(r, s).unwrap();
            for t in 0..m.triangle_count() {
                assert!(signed_area(&m, t) > 0.0, "triangle {t} not ccw for ({r},{s})");
            }
            for v in &m.vertices {
                assert!(v.norm() <= 1.0 + 1e-12);
            }
            for &b in &m.boundary_loop {
                assert!((m.vertices[b].norm() - 1.0).abs() <= 1e-12);
            }
            // The boundary loop is exactly the set of vertices on edges with
            // a single incident triangle, visited once in ccw order.
            let mut seen = std::collections::HashSet::new();
            for w in 0..m.boundary_loop.len() {
                let a = m.boundary_loop[w];
                let b = m.boundary_loop[(w + 1) % m.boundary_loop.len()];
                assert!(seen.insert(a));
                let turn = (m.vertices[a].conj() * m.vertices[b]).im;
                assert!(turn > 0.0);
            }
            let mut boundary_edges = 0;
            for t in 0..m.triangle_count() {
                boundary_edges += m.neighbors(t).iter().filter(|n| n.is_none()).count();
            }
            assert_eq!(boundary_edges, m.boundary_loop.len());
        }
    }

    #[test]
    fn area_converges_to_pi() {
        let m = UnitDiskMesh::build(64, 64).unwrap();
        assert!((m.total_area() - PI).abs() / PI < 1e-3);
        let m16 = UnitDiskMesh::build(16, 6).unwrap();
        assert!((m16.total_area() - PI).abs() / PI < 1e-2);
    }

    #[test]
    fn refine_doubles_rings() {
        let m = UnitDiskMesh::build(8, 5).unwrap();
        let r = m.refine().unwrap();
        assert_eq!(r.rings, 16);
        assert_eq!(r.sectors, 5);
        assert_eq!(r.vertex_count(), 1 + 5 * 16 * 17 / 2);
    }

    #[test]
    fn wirtinger_of_identity_and_reflection() {
        let m = UnitDiskMesh::build(4, 6).unwrap();
        let id = DiscreteMap::from_fn(&m, |z| z).unwrap();
        for rec in wirtinger(&m, &id).unwrap().records {
            assert!((rec.hz - 1.0).norm() < 1e-13);
            assert!(rec.hzbar.norm() < 1e-13);
            assert!((rec.jacobian - 1.0).abs() < 1e-12);
        }
        let refl = DiscreteMap::from_fn(&m, |z| z.conj()).unwrap();
        for rec in wirtinger(&m, &refl).unwrap().records {
            assert!(rec.hz.norm() < 1e-13);
            assert!((rec.hzbar - 1.0).norm() < 1e-13);
            assert!((rec.jacobian + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wirtinger_rejects_bad_maps() {
        let m = UnitDiskMesh::build(2, 6).unwrap();
        assert!(matches!(
            DiscreteMap::new(&m, vec![Complex64::new(0.0, 0.0); 3]),
            Err(Error::VertexCountMismatch { .. })
        ));
        let mut bad = DiscreteMap::from_fn(&m, |z| z).unwrap();
        bad.values[5] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(wirtinger(&m, &bad), Err(Error::NonFinite(5))));
        let other = UnitDiskMesh::build(3, 6).unwrap();
        let h = DiscreteMap::from_fn(&other, |z| z).unwrap();
        assert!(matches!(wirtinger(&m, &h), Err(Error::MeshMismatch)));
    }

    #[test]
    fn square_map_derivative_bound() {
        let m = UnitDiskMesh::build(6, 6).unwrap();
        let h = DiscreteMap::from_fn(&m, |z| z * z).unwrap();
        let field = wirtinger(&m, &h).unwrap();
        for (t, rec) in field.records.iter().enumerate() {
            let z0 = m.centroid(t);
            assert!((rec.hz - 2.0 * z0).norm() <= 2.0 * m.diameter(t));
        }
    }

    #[test]
    fn locate_and_interpolate() {
        let m = UnitDiskMesh::build(7, 5).unwrap();
        let values: Vec<_> = m.vertices.iter().map(|&z| 2.0 * z + Complex64::new(0.5, -1.0)).collect();
        for &z in &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.31, -0.2),
            Complex64::new(-0.7, 0.69),
            Complex64::new(0.999, 0.0),
            Complex64::from_polar(1.0, 0.3),
        ] {
            let w = m.interpolate(&values, z).unwrap();
            assert!((w - (2.0 * z + Complex64::new(0.5, -1.0))).norm() < 1e-12);
        }
        assert!(m.locate(Complex64::new(1.2, 0.0)).is_none());
    }

    #[test]
    fn text_round_trip() {
        let m = UnitDiskMesh::build(3, 5).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("31 45\n"));
        let back = UnitDiskMesh::from_text(&text).unwrap();
        assert_eq!(back.id(), m.id());
        assert!(UnitDiskMesh::from_text("3 2\n0 0\n").is_err());
    }
}
