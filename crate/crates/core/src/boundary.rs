//! Boundary homeomorphisms `f : 𝕊¹ → ∂𝕐`, their Douglas energy and their
//! Poisson-kernel harmonic extension into the disk.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gallery::GalleryMap;
use crate::mesh::{DiscreteMap, UnitDiskMesh};

/// Samples used to draw the target polygon of a gallery boundary.
const GALLERY_POLYGON_SAMPLES: usize = 2048;
const INJECTIVITY_TOL: f64 = 1e-9;
const POLYGON_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMap {
    Gallery(GalleryMap),
    /// `(θ, f(e^{iθ}))` with strictly increasing `θ ∈ [0, 2π)`.
    Samples(Vec<(f64, Complex64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub target_polygon: Vec<Complex64>,
    pub map: BoundaryMap,
    pub counterclockwise: bool,
}

/// On-disk form: `{ "kind": "gallery:<name>" | "samples", "samples": [[θ, re, im], ...], "polygon": [[x, y], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polygon: Vec<[f64; 2]>,
}

impl BoundarySpec {
    pub fn gallery(map: GalleryMap) -> Result<Self> {
        let polygon = (0..GALLERY_POLYGON_SAMPLES)
            .map(|j| map.boundary(2.0 * PI * j as f64 / GALLERY_POLYGON_SAMPLES as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { target_polygon: polygon, map: BoundaryMap::Gallery(map), counterclockwise: true })
    }

    /// A sample table. Without an explicit polygon the samples themselves
    /// form the target polygon.
    pub fn samples(mut samples: Vec<(f64, Complex64)>, polygon: Option<Vec<Complex64>>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidArgument("need at least 3 boundary samples".into()));
        }
        for (i, (theta, w)) in samples.iter_mut().enumerate() {
            if !theta.is_finite() || !w.is_finite() {
                return Err(Error::NonFinite(i));
            }
            *theta = theta.rem_euclid(2.0 * PI);
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("sample angles must be distinct".into()));
        }
        let polygon = polygon.unwrap_or_else(|| samples.iter().map(|s| s.1).collect());
        Ok(Self { target_polygon: polygon, map: BoundaryMap::Samples(samples), counterclockwise: true })
    }

    pub fn from_file_model(file: &BoundaryFile) -> Result<Self> {
        let polygon: Option<Vec<Complex64>> = if file.polygon.is_empty() {
            None
        } else {
            Some(file.polygon.iter().map(|p| Complex64::new(p[0], p[1])).collect())
        };
        if file.kind == "samples" {
            let samples = file.samples.iter().map(|s| (s[0], Complex64::new(s[1], s[2]))).collect();
            Self::samples(samples, polygon)
        } else if let Some(name) = file.kind.strip_prefix("gallery:") {
            let mut spec = Self::gallery(name.parse()?)?;
            if let Some(p) = polygon {
                spec.target_polygon = p;
            }
            Ok(spec)
        } else {
            Err(Error::Parse(format!("unknown boundary kind `{}`", file.kind)))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BoundaryFile = serde_json::from_str(text)?;
        Self::from_file_model(&file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file_model(&self) -> BoundaryFile {
        let polygon = self.target_polygon.iter().map(|p| [p.re, p.im]).collect();
        match &self.map {
            BoundaryMap::Gallery(g) => BoundaryFile { kind: format!("gallery:{g}"), samples: Vec::new(), polygon },
            BoundaryMap::Samples(s) => BoundaryFile {
                kind: "samples".into(),
                samples: s.iter().map(|(t, w)| [*t, w.re, w.im]).collect(),
                polygon,
            },
        }
    }

    /// `f(e^{iθ})`, linearly interpolated in `θ` for sample tables.
    pub fn evaluate(&self, theta: f64) -> Result<Complex64> {
        match &self.map {
            BoundaryMap::Gallery(g) => g.boundary(theta),
            BoundaryMap::Samples(s) => Ok(interpolate_periodic(s, theta)),
        }
    }

    /// Points used by the homeomorphism proxy: the table itself, or a dense
    /// sampling of a closed form.
    fn proxy_points(&self) -> Result<Vec<Complex64>> {
        match &self.map {
            BoundaryMap::Samples(s) => Ok(s.iter().map(|p| p.1).collect()),
            BoundaryMap::Gallery(g) => (0..GALLERY_POLYGON_SAMPLES)
                .map(|j| g.boundary(2.0 * PI * j as f64 / GALLERY_POLYGON_SAMPLES as f64))
                .collect(),
        }
    }

    /// Winding number of `f` around an interior point of the target polygon.
    pub fn winding_number(&self) -> Result<i64> {
        let pts = self.proxy_points()?;
        let centre = interior_point(&self.target_polygon)
            .ok_or_else(|| Error::Geometry("target polygon has no interior".into()))?;
        Ok(winding_number(&pts, centre))
    }

    /// Injectivity up to 1e-9, samples on the polygon up to 1e-6·diameter,
    /// and winding +1.
    pub fn validate(&self) -> Result<()> {
        let pts = self.proxy_points()?;
        check_injective(&pts)?;
        let diameter = polygon_diameter(&self.target_polygon);
        for (i, p) in pts.iter().enumerate() {
            if distance_to_polygon(&self.target_polygon, *p) > POLYGON_TOL * diameter.max(1e-300) {
                return Err(Error::OffPolygon(i));
            }
        }
        let w = self.winding_number()?;
        if w != 1 || !self.counterclockwise {
            return Err(Error::Orientation(w));
        }
        Ok(())
    }

    /// Smallest interior angle of the target polygon, in radians. Recorded
    /// as a Lipschitz-regularity indicator only.
    pub fn min_interior_angle(&self) -> f64 {
        let p = &self.target_polygon;
        let n = p.len();
        let sign = if signed_area(p) >= 0.0 { 1.0 } else { -1.0 };
        (0..n)
            .map(|i| {
                let prev = p[(i + n - 1) % n] - p[i];
                let next = p[(i + 1) % n] - p[i];
                let turn = (prev * next.conj()).arg() * sign;
                // interior angle measured from `next` to `prev` counterclockwise
                turn.rem_euclid(2.0 * PI)
            })
            .fold(2.0 * PI, f64::min)
    }
}

fn interpolate_periodic(samples: &[(f64, Complex64)], theta: f64) -> Complex64 {
    let t = theta.rem_euclid(2.0 * PI);
    let n = samples.len();
    let idx = samples.partition_point(|s| s.0 <= t);
    let (lo, hi) = if idx == 0 || idx == n {
        let lo = samples[n - 1];
        let hi = (samples[0].0 + 2.0 * PI, samples[0].1);
        let tt = if idx == 0 { t + 2.0 * PI } else { t };
        return lerp(lo, hi, tt);
    } else {
        (samples[idx - 1], samples[idx])
    };
    lerp(lo, hi, t)
}

fn lerp(lo: (f64, Complex64), hi: (f64, Complex64), t: f64) -> Complex64 {
    let w = (t - lo.0) / (hi.0 - lo.0);
    lo.1 * (1.0 - w) + hi.1 * w
}

fn check_injective(pts: &[Complex64]) -> Result<()> {
    // Sort by x and sweep; only pairs whose x differs by < tol can collide.
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].re.total_cmp(&pts[b].re));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if pts[j].re - pts[i].re > INJECTIVITY_TOL {
                break;
            }
            if (pts[i] - pts[j]).norm() <= INJECTIVITY_TOL {
                return Err(Error::NotInjective(i.min(j), i.max(j)));
            }
        }
    }
    Ok(())
}

pub fn signed_area(poly: &[Complex64]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| (poly[i].conj() * poly[(i + 1) % n]).im).sum::<f64>() * 0.5
}

fn polygon_diameter(poly: &[Complex64]) -> f64 {
    let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in poly {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    (hi - lo).norm()
}

pub fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// Distance from `p` to the closed polyline through `poly`.
pub fn distance_to_polygon(poly: &[Complex64], p: Complex64) -> f64 {
    let n = poly.len();
    (0..n).map(|i| segment_distance(p, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
}

/// Winding number of the closed polyline `pts` around `centre`.
pub fn winding_number(pts: &[Complex64], centre: Complex64) -> i64 {
    let n = pts.len();
    let total: f64 = (0..n).map(|i| ((pts[(i + 1) % n] - centre) / (pts[i] - centre)).arg()).sum();
    (total / (2.0 * PI)).round() as i64
}

/// A point well inside the polygon: the best-clearance point of a coarse
/// grid over the bounding box, among points the polygon winds around.
pub fn interior_point(poly: &[Complex64]) -> Option<Complex64> {
    if poly.len() < 3 {
        return None;
    }
    let (mut lo, mut hi) = (poly[0], poly[0]);
    for p in poly {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let n = 48;
    let mut best: Option<(Complex64, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            let p = Complex64::new(
                lo.re + (hi.re - lo.re) * (i as f64 + 0.5) / n as f64,
                lo.im + (hi.im - lo.im) * (j as f64 + 0.5) / n as f64,
            );
            if winding_number(poly, p) == 0 {
                continue;
            }
            let clearance = distance_to_polygon(poly, p);
            if best.is_none_or(|(_, c)| clearance > c) {
                best = Some((p, clearance));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Evaluates the boundary map at the angles of the mesh boundary vertices,
/// in loop order, after checking the injectivity proxy.
pub fn sample_boundary(spec: &BoundarySpec, mesh: &UnitDiskMesh) -> Result<Vec<Complex64>> {
    if let BoundaryMap::Samples(s) = &spec.map {
        check_injective(&s.iter().map(|p| p.1).collect::<Vec<_>>())?;
    }
    mesh.boundary_loop
        .iter()
        .map(|&v| {
            let z = mesh.vertices[v];
            spec.evaluate(z.im.atan2(z.re).rem_euclid(2.0 * PI))
        })
        .collect()
}

/// Winding number of a sampled trace around an interior point of its own
/// polygon: the orientation check applied to boundary values directly.
pub fn trace_winding(values: &[Complex64]) -> Result<i64> {
    let centre = interior_point(values).ok_or_else(|| Error::Geometry("trace polygon has no interior".into()))?;
    Ok(winding_number(values, centre))
}

/// Poisson-kernel harmonic extension by the trapezoid rule over the boundary
/// samples. The quadrature weights are normalized so constants reproduce
/// exactly; boundary vertices copy their samples.
pub fn harmonic_extension(boundary_values: &[Complex64], mesh: &UnitDiskMesh) -> Result<DiscreteMap> {
    let n = mesh.boundary_loop.len();
    if boundary_values.len() != n {
        return Err(Error::VertexCountMismatch { expected: n, got: boundary_values.len() });
    }
    if let Some(i) = boundary_values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(mesh.boundary_loop[i]));
    }
    let nodes: Vec<Complex64> = mesh.boundary_loop.iter().map(|&v| mesh.vertices[v]).collect();
    let first_boundary = mesh.first_boundary_vertex();
    let interior: Vec<Result<Complex64>> = (0..first_boundary)
        .into_par_iter()
        .map(|v| {
            let z = mesh.vertices[v];
            let gap = 1.0 - z.norm_sqr();
            if gap < 1e-12 {
                return Err(Error::NearBoundary(v));
            }
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for (node, f) in nodes.iter().zip(boundary_values) {
                let kernel = gap / (node - z).norm_sqr();
                num += f * kernel;
                den += kernel;
            }
            Ok(num / den)
        })
        .collect();
    let mut values = Vec::with_capacity(mesh.vertex_count());
    for v in interior {
        values.push(v?);
    }
    values.extend_from_slice(boundary_values);
    DiscreteMap::new(mesh, values)
}

/// Largest weak-form (cotangent) Laplacian residual `|(K h)_v|` over
/// interior vertices, taken componentwise.
pub fn laplacian_residual(mesh: &UnitDiskMesh, h: &DiscreteMap) -> Result<f64> {
    h.check_mesh(mesh)?;
    let k = crate::linalg::stiffness(mesh);
    let re: Vec<f64> = h.values.iter().map(|v| v.re).collect();
    let im: Vec<f64> = h.values.iter().map(|v| v.im).collect();
    let (mut kre, mut kim) = (vec![0.0; re.len()], vec![0.0; im.len()]);
    k.mul_vec(&re, &mut kre);
    k.mul_vec(&im, &mut kim);
    Ok(mesh.interior_vertices().map(|v| kre[v].abs().max(kim[v].abs())).fold(0.0, f64::max))
}

/// Five-point Laplacian of a closed-form map at `z` with spacing `step`.
pub fn five_point_laplacian(f: impl Fn(Complex64) -> Complex64, z: Complex64, step: f64) -> Complex64 {
    let (dx, dy) = (Complex64::new(step, 0.0), Complex64::new(0.0, step));
    (f(z + dx) + f(z - dx) + f(z + dy) + f(z - dy) - f(z) * 4.0) / (step * step)
}

/// Trapezoid approximation of `∬ |f(z) - f(z')|² / |z - z'|² |dz| |dz'|` for
/// samples at equally spaced angles, the diagonal excluded.
pub fn douglas_energy(boundary_values: &[Complex64]) -> f64 {
    let n = boundary_values.len();
    if n < 3 {
        return 0.0;
    }
    let h = 2.0 * PI / n as f64;
    let nodes: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, h * j as f64)).collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                let dz = (nodes[i] - nodes[j]).norm();
                if dz < 0.5 * h {
                    continue;
                }
                acc += (boundary_values[i] - boundary_values[j]).norm_sqr() / (dz * dz);
            }
            acc
        })
        .collect();
    rows.iter().sum::<f64>() * h * h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_trace(mesh: &UnitDiskMesh, f: impl Fn(Complex64) -> Complex64) -> Vec<Complex64> {
        mesh.boundary_loop.iter().map(|&v| f(mesh.vertices[v])).collect()
    }

    #[test]
    fn identity_spec_on_smallest_mesh() {
        let mesh = UnitDiskMesh::build(1, 3).unwrap();
        let spec = BoundarySpec::gallery(GalleryMap::Identity).unwrap();
        spec.validate().unwrap();
        let vals = sample_boundary(&spec, &mesh).unwrap();
        for (v, &b) in vals.iter().zip(&mesh.boundary_loop) {
            assert!((v - mesh.vertices[b]).norm() < 1e-15);
        }
    }

    #[test]
    fn doubled_circle_is_rejected() {
        let samples: Vec<_> = (0..64)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 64.0;
                (t, Complex64::from_polar(1.0, 2.0 * t))
            })
            .collect();
        let circle: Vec<_> = (0..64).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / 64.0)).collect();
        let spec = BoundarySpec::samples(samples, Some(circle)).unwrap();
        assert_eq!(spec.winding_number().unwrap(), 2);
        assert!(matches!(spec.validate(), Err(Error::NotInjective(..))));
        let mesh = UnitDiskMesh::build(4, 8).unwrap();
        assert!(matches!(sample_boundary(&spec, &mesh), Err(Error::NotInjective(..))));
    }

    #[test]
    fn clockwise_trace_is_rejected() {
        let spec = BoundarySpec::gallery("ellipse:1,-1".parse().unwrap()).unwrap();
        assert!(matches!(spec.validate(), Err(Error::Orientation(-1))));
    }

    #[test]
    fn sample_table_interpolates() {
        let samples: Vec<_> = (0..8).map(|j| (PI * j as f64 / 4.0, Complex64::new(j as f64, 0.0))).collect();
        let spec = BoundarySpec::samples(samples, None).unwrap();
        assert!((spec.evaluate(PI / 8.0).unwrap() - 0.5).norm() < 1e-12);
        // wrap-around segment between the last sample and 2π
        assert!((spec.evaluate(2.0 * PI - PI / 8.0).unwrap() - 3.5).norm() < 1e-12);
    }

    #[test]
    fn fig1_spec_is_a_valid_homeomorphism_proxy() {
        let spec = BoundarySpec::gallery(GalleryMap::Fig1).unwrap();
        spec.validate().unwrap();
        assert!(spec.min_interior_angle() > 0.0);
    }

    #[test]
    fn extension_of_identity_and_constants() {
        let mesh = UnitDiskMesh::build(12, 16).unwrap();
        let h = harmonic_extension(&circle_trace(&mesh, |z| z), &mesh).unwrap();
        for (v, z) in h.values.iter().zip(&mesh.vertices) {
            assert!((v - z).norm() < 1e-6, "{v} vs {z}");
        }
        let c = Complex64::new(0.3, -2.0);
        let h = harmonic_extension(&vec![c; mesh.boundary_loop.len()], &mesh).unwrap();
        for v in &h.values {
            assert!((v - c).norm() < 1e-14);
        }
    }

    #[test]
    fn extension_of_second_harmonic_is_z_squared() {
        let mesh = UnitDiskMesh::build(12, 16).unwrap();
        let h = harmonic_extension(&circle_trace(&mesh, |z| z * z), &mesh).unwrap();
        for (v, z) in h.values.iter().zip(&mesh.vertices) {
            assert!((v - z * z).norm() < 1e-5);
        }
    }

    #[test]
    fn extension_rejects_wrong_length() {
        let mesh = UnitDiskMesh::build(3, 6).unwrap();
        assert!(matches!(
            harmonic_extension(&[Complex64::new(1.0, 0.0); 5], &mesh),
            Err(Error::VertexCountMismatch { .. })
        ));
    }

    #[test]
    fn mean_value_and_maximum_principle() {
        let mesh = UnitDiskMesh::build(10, 12).unwrap();
        let trace = circle_trace(&mesh, |z| Complex64::new((3.0 * z.arg()).sin() + 0.3 * (z.arg()).cos(), 0.0));
        let h = harmonic_extension(&trace, &mesh).unwrap();
        assert!(h.values[0].norm() < 1e-12);
        let lo = trace.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        let hi = trace.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        for v in &h.values {
            assert!(v.re >= lo - 1e-12 && v.re <= hi + 1e-12);
        }
    }

    #[test]
    fn douglas_closed_forms() {
        for n in [64usize, 256, 1024] {
            let nodes: Vec<_> = (0..n).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect();
            let id = douglas_energy(&nodes);
            // Exact trapezoid value: n(n-1) pairs with integrand 1.
            let expected = (2.0 * PI).powi(2) * (1.0 - 1.0 / n as f64);
            assert!((id - expected).abs() < 1e-9 * expected);
            let sq: Vec<_> = nodes.iter().map(|z| z * z).collect();
            let e2 = douglas_energy(&sq);
            assert!((e2 - 2.0 * (2.0 * PI).powi(2)).abs() < 2.0 * (2.0 * PI).powi(2) * 4.0 / n as f64);
        }
        assert_eq!(douglas_energy(&[Complex64::new(1.0, 1.0); 32]), 0.0);
    }

    #[test]
    fn douglas_rigid_and_dilation() {
        let n = 128;
        let f: Vec<_> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                Complex64::new(t.cos() * 2.0, t.sin() + 0.3 * (2.0 * t).sin())
            })
            .collect();
        let base = douglas_energy(&f);
        let rot = Complex64::from_polar(1.0, 0.7);
        let moved: Vec<_> = f.iter().map(|w| rot * w + Complex64::new(3.0, -1.0)).collect();
        assert!((douglas_energy(&moved) - base).abs() < 1e-10 * base);
        let dilated: Vec<_> = f.iter().map(|w| w * 3.0).collect();
        assert!((douglas_energy(&dilated) - 9.0 * base).abs() < 1e-10 * base);
    }

    #[test]
    fn boundary_file_round_trip() {
        let json = r#"{"kind":"gallery:fig1"}"#;
        let spec = BoundarySpec::from_json(json).unwrap();
        assert!(matches!(spec.map, BoundaryMap::Gallery(GalleryMap::Fig1)));
        let model = spec.to_file_model();
        assert_eq!(model.kind, "gallery:fig1");
        let json = r#"{"kind":"samples","samples":[[0,1,0],[2.0943951023931953,-0.5,0.8660254037844386],[4.1887902047863905,-0.5,-0.8660254037844386]]}"#;
        let spec = BoundarySpec::from_json(json).unwrap();
        spec.validate().unwrap();
        assert!(BoundarySpec::from_json(r#"{"kind":"bogus"}"#).is_err());
    }

    #[test]
    fn weak_laplacian_residual() {
        let mesh = UnitDiskMesh::build(8, 6).unwrap();
        let lin = DiscreteMap::from_fn(&mesh, |z| z * Complex64::new(2.0, 1.0) + z.conj()).unwrap();
        assert!(laplacian_residual(&mesh, &lin).unwrap() < 1e-12);
        let coarse = crate::gallery::GalleryMap::Fig1.sample(&mesh).unwrap();
        let fine_mesh = mesh.refine().unwrap();
        let fine = crate::gallery::GalleryMap::Fig1.sample(&fine_mesh).unwrap();
        let (a, b) = (laplacian_residual(&mesh, &coarse).unwrap(), laplacian_residual(&fine_mesh, &fine).unwrap());
        assert!(b < a / 3.5, "{a} {b}");
    }

    #[test]
    fn five_point_stencil_on_quadratics() {
        let lap = five_point_laplacian(|z| z * z, Complex64::new(0.3, -0.2), 1e-2);
        assert!(lap.norm() < 1e-10);
        let lap = five_point_laplacian(|z| Complex64::new(z.norm_sqr(), 0.0), Complex64::new(0.3, -0.2), 1e-2);
        assert!((lap.re - 4.0).abs() < 1e-9);
    }
}
