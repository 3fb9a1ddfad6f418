//! Hopf product `φ = h_z · conj(h_z̄)`, its anti-holomorphicity residual,
//! zeros of the quadratic differential `φ dz²`, and tracing of its
//! horizontal (`φ·t² > 0`) and vertical (`φ·t² < 0`) trajectories.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{DiscreteMap, UnitDiskMesh, WirtingerField};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfField {
    /// Per triangle.
    pub phi: Vec<Complex64>,
    /// Per vertex.
    pub phi_fit: Vec<Complex64>,
    /// `Σ area·|∂_z̄ φ_fit|` over triangles.
    pub residual: f64,
}

impl HopfField {
    /// Fits vertex values to per-triangle data and measures the residual.
    pub fn from_triangle_values(mesh: &UnitDiskMesh, phi: Vec<Complex64>) -> Result<Self> {
        if phi.len() != mesh.triangle_count() {
            return Err(Error::VertexCountMismatch { expected: mesh.triangle_count(), got: phi.len() });
        }
        let phi_fit: Vec<Complex64> = (0..mesh.vertex_count()).into_par_iter().map(|v| fit_vertex(mesh, &phi, v)).collect();
        let residual = dzbar_mass(mesh, &phi_fit);
        Ok(Self { phi, phi_fit, residual })
    }

    /// A field given directly by vertex values (triangle values are the P1
    /// interpolant at centroids).
    pub fn from_vertex_values(mesh: &UnitDiskMesh, phi_fit: Vec<Complex64>) -> Result<Self> {
        if phi_fit.len() != mesh.vertex_count() {
            return Err(Error::VertexCountMismatch { expected: mesh.vertex_count(), got: phi_fit.len() });
        }
        if let Some(i) = phi_fit.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let phi = mesh.triangles.iter().map(|&[a, b, c]| (phi_fit[a] + phi_fit[b] + phi_fit[c]) / 3.0).collect();
        let residual = dzbar_mass(mesh, &phi_fit);
        Ok(Self { phi, phi_fit, residual })
    }

    /// Samples a closed-form differential at the vertices.
    pub fn synthetic(mesh: &UnitDiskMesh, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::from_vertex_values(mesh, mesh.vertices.iter().map(|&z| f(z)).collect())
    }

    pub fn negated(&self) -> Self {
        Self {
            phi: self.phi.iter().map(|p| -p).collect(),
            phi_fit: self.phi_fit.iter().map(|p| -p).collect(),
            residual: self.residual,
        }
    }

    /// P1 interpolant of `phi_fit`.
    pub fn evaluate(&self, mesh: &UnitDiskMesh, z: Complex64) -> Option<Complex64> {
        mesh.interpolate(&self.phi_fit, z)
    }
}

pub fn hopf_product(mesh: &UnitDiskMesh, field: &WirtingerField) -> Result<HopfField> {
    let phi = field.records.iter().map(|r| r.hz * r.hzbar.conj()).collect();
    HopfField::from_triangle_values(mesh, phi)
}

pub fn holomorphy_residual(hopf: &HopfField, mesh: &UnitDiskMesh) -> f64 {
    if hopf.phi_fit.len() == mesh.vertex_count() {
        dzbar_mass(mesh, &hopf.phi_fit)
    } else {
        hopf.residual
    }
}

fn dzbar_mass(mesh: &UnitDiskMesh, values: &[Complex64]) -> f64 {
    let per: Vec<f64> = (0..mesh.triangle_count())
        .into_par_iter()
        .map(|t| {
            let g = mesh.shape_dz(t);
            let tri = mesh.triangles[t];
            let d: Complex64 = (0..3).map(|k| g[k].conj() * values[tri[k]]).sum();
            mesh.area(t) * d.norm()
        })
        .collect();
    per.iter().sum()
}

/// Area-weighted least-squares affine fit of centroid values around `v`,
/// evaluated at `v`. Patches too small to determine an affine function are
/// widened by one ring of triangles.
fn fit_vertex(mesh: &UnitDiskMesh, phi: &[Complex64], v: usize) -> Complex64 {
    let mut patch: Vec<usize> = mesh.incident_triangles(v).to_vec();
    for _ in 0..3 {
        if let Some(value) = affine_fit(mesh, phi, v, &patch) {
            return value;
        }
        let mut wider = patch.clone();
        for &t in &patch {
            for &u in &mesh.triangles[t] {
                wider.extend_from_slice(mesh.incident_triangles(u));
            }
        }
        wider.sort_unstable();
        wider.dedup();
        patch = wider;
    }
    let w: f64 = patch.iter().map(|&t| mesh.area(t)).sum();
    patch.iter().map(|&t| phi[t] * mesh.area(t)).sum::<Complex64>() / w
}

fn affine_fit(mesh: &UnitDiskMesh, phi: &[Complex64], v: usize, patch: &[usize]) -> Option<Complex64> {
    if patch.len() < 3 {
        return None;
    }
    let zv = mesh.vertices[v];
    let rho = patch.iter().map(|&t| (mesh.centroid(t) - zv).norm()).fold(0.0, f64::max);
    if rho == 0.0 {
        return None;
    }
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [Complex64::new(0.0, 0.0); 3];
    let mut weight = 0.0;
    for &t in patch {
        let d = (mesh.centroid(t) - zv) / rho;
        let basis = [1.0, d.re, d.im];
        let a = mesh.area(t);
        weight += a;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += a * basis[i] * basis[j];
            }
            rhs[i] += phi[t] * (a * basis[i]);
        }
    }
    let det = det3(&m);
    if !(det.abs() > 1e-8 * weight.powi(3)) {
        return None;
    }
    // Cramer's rule for the constant coefficient.
    let mut m0 = m;
    let solve = |col: [f64; 3], m0: &mut [[f64; 3]; 3]| {
        for i in 0..3 {
            m0[i][0] = col[i];
        }
        det3(m0) / det
    };
    let re = solve([rhs[0].re, rhs[1].re, rhs[2].re], &mut m0);
    let im = solve([rhs[0].im, rhs[1].im, rhs[2].im], &mut m0);
    Some(Complex64::new(re, im))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub position: Complex64,
    pub order_estimate: u32,
    pub emanating_count: u32,
}

/// Default relative threshold for [`critical_points`].
pub const DEFAULT_CRITICAL_TOL: f64 = 0.05;

/// Zero of the affine interpolant of `values` over triangle `t`, if it lies
/// in the closed triangle.
fn p1_zero(mesh: &UnitDiskMesh, values: &[Complex64], t: usize) -> Option<Complex64> {
    let [a, b, c] = mesh.triangles[t];
    let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
    let (fa, fb, fc) = (values[a], values[b], values[c]);
    // Solve fa + s(fb - fa) + u(fc - fa) = 0 for real s, u.
    let (e1, e2) = (fb - fa, fc - fa);
    let det = e1.re * e2.im - e1.im * e2.re;
    if det.abs() < 1e-300 {
        return None;
    }
    let s = (-fa.re * e2.im + fa.im * e2.re) / det;
    let u = (-e1.re * fa.im + e1.im * fa.re) / det;
    let tol = 1e-9;
    if s >= -tol && u >= -tol && s + u <= 1.0 + tol {
        Some(pa + (pb - pa) * s + (pc - pa) * u)
    } else {
        None
    }
}

/// Winding of `phi` around the circle `|z - centre| = radius`.
fn phi_winding(hopf: &HopfField, mesh: &UnitDiskMesh, centre: Complex64, radius: f64) -> Option<i64> {
    const SAMPLES: usize = 256;
    let mut total = 0.0;
    let mut prev: Option<Complex64> = None;
    let mut first: Option<Complex64> = None;
    for k in 0..SAMPLES {
        let z = centre + Complex64::from_polar(radius, 2.0 * PI * k as f64 / SAMPLES as f64);
        let w = hopf.evaluate(mesh, z)?;
        if w.norm() == 0.0 {
            return None;
        }
        if let Some(p) = prev {
            total += (w * p.conj()).arg();
        } else {
            first = Some(w);
        }
        prev = Some(w);
    }
    total += (first? * prev?.conj()).arg();
    Some((total / (2.0 * PI)).round() as i64)
}

/// Clusters of vertices where `|phi_fit| < tol · median|phi_fit|`, together
/// with vertices of triangles whose affine interpolant vanishes. Clusters
/// whose winding is zero are discarded as noise.
pub fn critical_points(hopf: &HopfField, mesh: &UnitDiskMesh, tol: f64) -> Result<Vec<CriticalPoint>> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("critical tolerance must lie in (0, 1), got {tol}")));
    }
    let mut mags: Vec<f64> = hopf.phi_fit.iter().map(|p| p.norm()).collect();
    let max = mags.iter().cloned().fold(0.0, f64::max);
    mags.sort_by(|a, b| a.total_cmp(b));
    let median = mags[mags.len() / 2];
    if !(median > 1e-14 * max) || max == 0.0 {
        return Err(Error::IdenticallyZero);
    }
    let threshold = tol * median;
    let mut candidate = vec![false; mesh.vertex_count()];
    for (v, p) in hopf.phi_fit.iter().enumerate() {
        if p.norm() < threshold {
            candidate[v] = true;
        }
    }
    let mut exact_zeros = Vec::new();
    for t in 0..mesh.triangle_count() {
        if let Some(z) = p1_zero(mesh, &hopf.phi_fit, t) {
            exact_zeros.push((t, z));
            for &v in &mesh.triangles[t] {
                candidate[v] = true;
            }
        }
    }
    let adj = mesh.vertex_adjacency();
    let mut seen = vec![false; mesh.vertex_count()];
    let mut out = Vec::new();
    for start in 0..mesh.vertex_count() {
        if !candidate[start] || seen[start] {
            continue;
        }
        let mut cluster = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < cluster.len() {
            let v = cluster[head];
            head += 1;
            for &u in &adj[v] {
                if candidate[u] && !seen[u] {
                    seen[u] = true;
                    cluster.push(u);
                }
            }
        }
        let in_cluster = |t: usize| mesh.triangles[t].iter().all(|v| cluster.contains(v));
        let position = exact_zeros
            .iter()
            .find(|(t, _)| in_cluster(*t))
            .map(|&(_, z)| z)
            .unwrap_or_else(|| {
                let best = cluster.iter().min_by(|&&a, &&b| hopf.phi_fit[a].norm().total_cmp(&hopf.phi_fit[b].norm()));
                mesh.vertices[*best.expect("non-empty cluster")]
            });
        let mut local: Vec<f64> =
            cluster.iter().flat_map(|&v| mesh.incident_triangles(v).iter().map(|&t| mesh.diameter(t))).collect();
        local.sort_by(|a, b| a.total_cmp(b));
        let diam = local[local.len() / 2];
        let radius = (3.0 * diam).min(0.95 * (1.0 - position.norm()));
        if radius < 0.5 * diam {
            continue;
        }
        let Some(order) = phi_winding(hopf, mesh, position, radius) else { continue };
        if order <= 0 {
            continue;
        }
        let order = order as u32;
        out.push(CriticalPoint { position, order_estimate: order, emanating_count: order + 2 });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Orientation::Vertical => "vertical",
            Orientation::Horizontal => "horizontal",
        })
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertical" => Ok(Orientation::Vertical),
            "horizontal" => Ok(Orientation::Horizontal),
            other => Err(Error::Parse(format!("unknown orientation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedBoundary,
    ReachedCriticalPoint,
    StepCap,
    LeftMesh,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedBoundary => "reached-boundary",
            Termination::ReachedCriticalPoint => "reached-critical-point",
            Termination::StepCap => "step-cap",
            Termination::LeftMesh => "left-mesh",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySegment {
    pub seed: Complex64,
    pub orientation: Orientation,
    /// From the backward end through the seed to the forward end.
    pub points: Vec<Complex64>,
    /// `[backward end, forward end]`.
    pub termination: [Termination; 2],
    pub endpoints: [Complex64; 2],
}

impl TrajectorySegment {
    /// Largest angle (degrees) by which a chord direction misses the
    /// trajectory family, measured at chord midpoints.
    pub fn max_direction_error(&self, hopf: &HopfField, mesh: &UnitDiskMesh) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.points.windows(2) {
            let chord = w[1] - w[0];
            if chord.norm() == 0.0 {
                continue;
            }
            let t = chord / chord.norm();
            let Some(phi) = hopf.evaluate(mesh, clamp_into_disk((w[0] + w[1]) * 0.5)) else { continue };
            if phi.norm() == 0.0 {
                continue;
            }
            let q = phi * t * t;
            let target = match self.orientation {
                Orientation::Horizontal => 0.0,
                Orientation::Vertical => PI,
            };
            // arg(q) lives on the doubled circle; halve to get the chord angle.
            let dev = angle_distance(q.arg(), target) / 2.0;
            worst = worst.max(dev.to_degrees());
        }
        worst
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn clamp_into_disk(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 1.0 - 1e-12 {
        z * ((1.0 - 1e-12) / r)
    } else {
        z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceConfig {
    pub min_step: f64,
    pub max_step: f64,
    pub max_turn_degrees: f64,
    pub max_points: usize,
    /// Stop radius around critical points, in element diameters.
    pub critical_stop_diameters: f64,
    pub critical_tol: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            min_step: 1e-4,
            max_step: 0.05,
            max_turn_degrees: 5.0,
            max_points: 100_000,
            critical_stop_diameters: 1.5,
            critical_tol: DEFAULT_CRITICAL_TOL,
        }
    }
}

/// Traces trajectories of one Hopf field; critical points are located once.
pub struct Tracer<'a> {
    hopf: &'a HopfField,
    mesh: &'a UnitDiskMesh,
    config: TraceConfig,
    critical: Vec<CriticalPoint>,
    stop_radius: f64,
    floor: f64,
}

impl<'a> Tracer<'a> {
    pub fn new(hopf: &'a HopfField, mesh: &'a UnitDiskMesh, config: TraceConfig) -> Result<Self> {
        if !(config.min_step > 0.0 && config.max_step >= config.min_step && config.max_points >= 2) {
            return Err(Error::InvalidArgument("trace step bounds must satisfy 0 < min ≤ max".into()));
        }
        let critical = critical_points(hopf, mesh, config.critical_tol)?;
        let mut mags: Vec<f64> = hopf.phi_fit.iter().map(|p| p.norm()).collect();
        mags.sort_by(|a, b| a.total_cmp(b));
        let floor = config.critical_tol * mags[mags.len() / 2];
        let stop_radius = config.critical_stop_diameters * mesh.median_diameter();
        Ok(Self { hopf, mesh, config, critical, stop_radius, floor })
    }

    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.critical
    }

    /// Unit direction of the family at `z`, signed to agree with `reference`.
    fn direction(&self, z: Complex64, orientation: Orientation, reference: Complex64) -> Option<Complex64> {
        let phi = self.hopf.evaluate(self.mesh, clamp_into_disk(z))?;
        if phi.norm() == 0.0 {
            return None;
        }
        let half = Complex64::from_polar(1.0, -phi.arg() / 2.0);
        let d = match orientation {
            Orientation::Horizontal => half,
            Orientation::Vertical => Complex64::i() * half,
        };
        Some(if (d * reference.conj()).re < 0.0 { -d } else { d })
    }

    fn initial_direction(&self, z: Complex64, orientation: Orientation) -> Option<Complex64> {
        let d = self.direction(z, orientation, Complex64::new(1.0, 0.0))?;
        let flip = match orientation {
            Orientation::Vertical => d.im < 0.0 || (d.im == 0.0 && d.re < 0.0),
            Orientation::Horizontal => d.re < 0.0 || (d.re == 0.0 && d.im < 0.0),
        };
        Some(if flip { -d } else { d })
    }

    fn near_critical(&self, z: Complex64) -> bool {
        self.critical.iter().any(|c| (c.position - z).norm() < self.stop_radius)
    }

    fn half_trace(&self, seed: Complex64, orientation: Orientation, start_dir: Complex64, budget: usize) -> (Vec<Complex64>, Termination) {
        let cfg = &self.config;
        let max_turn = cfg.max_turn_degrees.to_radians();
        let mut pts = Vec::new();
        let mut z = seed;
        let mut dir = start_dir;
        let mut h = cfg.max_step.min(0.01).max(cfg.min_step);
        loop {
            if pts.len() >= budget {
                return (pts, Termination::StepCap);
            }
            let step = loop {
                let Some(k1) = self.direction(z, orientation, dir) else { return (pts, Termination::LeftMesh) };
                let k2 = self.direction(z + k1 * (h / 2.0), orientation, k1);
                let k3 = k2.and_then(|k2| self.direction(z + k2 * (h / 2.0), orientation, k2));
                let k4 = k3.and_then(|k3| self.direction(z + k3 * h, orientation, k3));
                let (Some(k2), Some(k3), Some(k4)) = (k2, k3, k4) else {
                    return (pts, Termination::LeftMesh);
                };
                let turn = (k4 * k1.conj()).arg().abs();
                if turn > max_turn && h > cfg.min_step {
                    h = (h / 2.0).max(cfg.min_step);
                    continue;
                }
                let mut delta = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                if delta.norm() > h {
                    delta *= h / delta.norm();
                }
                let grow = turn < max_turn / 4.0;
                break (delta, k4, grow);
            };
            let (delta, new_dir, grow) = step;
            if delta.norm() == 0.0 {
                return (pts, Termination::ReachedCriticalPoint);
            }
            let next = z + delta;
            if next.norm() >= 1.0 {
                // Clip the chord at the unit circle.
                let (a, b, c) = (delta.norm_sqr(), 2.0 * (z.conj() * delta).re, z.norm_sqr() - 1.0);
                let s = (-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a);
                let hit = z + delta * s.clamp(0.0, 1.0);
                pts.push(hit / hit.norm());
                return (pts, Termination::ReachedBoundary);
            }
            pts.push(next);
            z = next;
            dir = new_dir;
            if self.near_critical(z) {
                return (pts, Termination::ReachedCriticalPoint);
            }
            match self.hopf.evaluate(self.mesh, z) {
                Some(p) if p.norm() >= self.floor => {}
                Some(_) => return (pts, Termination::ReachedCriticalPoint),
                None => return (pts, Termination::LeftMesh),
            }
            if grow {
                h = (h * 1.5).min(cfg.max_step);
            }
        }
    }

    pub fn trace(&self, seed: Complex64, orientation: Orientation) -> Result<TrajectorySegment> {
        if !seed.is_finite() || seed.norm() >= 1.0 {
            return Err(Error::SeedOutside(format!("{seed}")));
        }
        let phi = self.hopf.evaluate(self.mesh, seed).ok_or_else(|| Error::SeedOutside(format!("{seed}")))?;
        if phi.norm() < self.floor || self.near_critical(seed) {
            return Err(Error::SeedAtCriticalPoint(format!("{seed}")));
        }
        let d0 = self.initial_direction(seed, orientation).ok_or_else(|| Error::SeedOutside(format!("{seed}")))?;
        let budget = self.config.max_points - 1;
        let (fwd, t_fwd) = self.half_trace(seed, orientation, d0, budget / 2);
        let (bwd, t_bwd) = self.half_trace(seed, orientation, -d0, budget - budget / 2);
        let mut points: Vec<Complex64> = bwd.into_iter().rev().collect();
        points.push(seed);
        points.extend(fwd);
        let endpoints = [points[0], *points.last().expect("seed present")];
        Ok(TrajectorySegment { seed, orientation, points, termination: [t_bwd, t_fwd], endpoints })
    }
}

pub fn trace_trajectory(
    hopf: &HopfField,
    mesh: &UnitDiskMesh,
    seed: Complex64,
    orientation: Orientation,
    config: &TraceConfig,
) -> Result<TrajectorySegment> {
    Tracer::new(hopf, mesh, *config)?.trace(seed, orientation)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointCheck {
    pub distance: f64,
    pub distinct: bool,
}

/// Distance between the two boundary endpoints, compared with the boundary
/// vertex spacing.
pub fn endpoint_distinctness(seg: &TrajectorySegment, mesh: &UnitDiskMesh) -> Result<EndpointCheck> {
    if seg.termination != [Termination::ReachedBoundary; 2] {
        return Err(Error::InapplicableTermination);
    }
    let distance = (seg.endpoints[0] - seg.endpoints[1]).norm();
    Ok(EndpointCheck { distance, distinct: distance > mesh.boundary_spacing() })
}

const CONSTANCY_SAMPLES: usize = 2048;

/// Largest `|h(p) - h(q)|` over (subsampled) pairs of polyline points.
pub fn vertical_constancy(mesh: &UnitDiskMesh, h: &DiscreteMap, seg: &TrajectorySegment) -> Result<f64> {
    if seg.orientation != Orientation::Vertical {
        return Err(Error::InvalidArgument("constancy is checked along vertical trajectories".into()));
    }
    h.check_mesh(mesh)?;
    let n = seg.points.len();
    let stride = n.div_ceil(CONSTANCY_SAMPLES).max(1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    let values: Vec<Complex64> = idx
        .iter()
        .map(|&i| mesh.interpolate(&h.values, clamp_into_disk(seg.points[i])).ok_or(Error::SegmentOutside))
        .collect::<Result<_>>()?;
    let mut osc: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            osc = osc.max((values[i] - values[j]).norm());
        }
    }
    Ok(osc)
}
