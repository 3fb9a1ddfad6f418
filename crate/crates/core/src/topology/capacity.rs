use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, stiffness};
use crate::mesh::UnitDiskMesh;

const CG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condenser {
    pub compact_set: Vec<usize>,
    pub capacity: f64,
}

impl Condenser {
    pub fn solve(mesh: &UnitDiskMesh, compact_set: Vec<usize>) -> Result<Self> {
        let capacity = capacity(mesh, &compact_set)?;
        Ok(Self { compact_set, capacity })
    }
}

/// Minimum of `∫|∇u|²` over P1 functions equal to 1 on the vertices of the
/// plate and 0 on the unit circle.
pub fn capacity(mesh: &UnitDiskMesh, plate: &[usize]) -> Result<f64> {
    if plate.is_empty() {
        return Err(Error::EmptyPlate);
    }
    if let Some(&t) = plate.iter().find(|&&t| t >= mesh.triangle_count()) {
        return Err(Error::InvalidArgument(format!("triangle {t} is not in the mesh")));
    }
    if plate.iter().any(|&t| mesh.touches_boundary(t)) {
        return Err(Error::PlateTouchesBoundary);
    }
    let n = mesh.vertex_count();
    let mut u = vec![0.0; n];
    let mut fixed = vec![false; n];
    for &t in plate {
        for &v in &mesh.triangles[t] {
            u[v] = 1.0;
            fixed[v] = true;
        }
    }
    for &b in &mesh.boundary_loop {
        fixed[b] = true;
    }
    let k = stiffness(mesh);
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    if !free.is_empty() {
        // K_ff u_f = -K_fc u_c
        let mut ku = vec![0.0; n];
        k.mul_vec(&u, &mut ku);
        let rhs: Vec<f64> = free.iter().map(|&v| -ku[v]).collect();
        let (kff, _) = k.restrict(&free);
        let mut x = vec![0.0; free.len()];
        conjugate_gradient(&kff, &rhs, &mut x, CG_TOL, 20 * free.len() + 100)?;
        for (i, &v) in free.iter().enumerate() {
            u[v] = x[i];
        }
    }
    Ok(k.quadratic_form(&u))
}

/// Triangles lying in the closed disk `|z| ≤ radius`.
pub fn disk_plate(mesh: &UnitDiskMesh, radius: f64) -> Vec<usize> {
    (0..mesh.triangle_count())
        .filter(|&t| mesh.triangles[t].iter().all(|&v| mesh.vertices[v].norm() <= radius + 1e-12))
        .collect()
}

/// Triangles met by the real segment `[a, b]`, sampled at a quarter of the
/// smallest element size.
pub fn segment_plate(mesh: &UnitDiskMesh, a: f64, b: f64) -> Result<Vec<usize>> {
    if !(a.is_finite() && b.is_finite() && a <= b) || a.abs() >= 1.0 || b.abs() >= 1.0 {
        return Err(Error::SegmentOutside);
    }
    let step = 0.25 / (mesh.rings as f64 * mesh.sectors as f64).max(1.0);
    let n = (((b - a) / step).ceil() as usize).max(1);
    let mut out = Vec::new();
    for i in 0..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        let (t, _) = mesh.locate(Complex64::new(x, 0.0)).ok_or(Error::SegmentOutside)?;
        out.push(t);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Capacities of the plates `[a, 1 - ε]` for each `ε` in `eps_list`.
pub fn capacity_blowup_profile(mesh: &UnitDiskMesh, a: f64, eps_list: &[f64]) -> Result<Vec<f64>> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!("segment start must lie in (0, 1), got {a}")));
    }
    if eps_list.iter().any(|&e| !(e > 0.0) || a + e >= 1.0) {
        return Err(Error::SegmentOutside);
    }
    eps_list.iter().map(|&e| capacity(mesh, &segment_plate(mesh, a, 1.0 - e)?)).collect()
}
