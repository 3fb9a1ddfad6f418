//! Small sparse linear algebra kit: CSR storage, the P1 stiffness matrix,
//! Jacobi-preconditioned conjugate gradients and an envelope Cholesky
//! factorization (the ring ordering of the disk mesh keeps the envelope narrow).

use crate::error::{Error, Result};
use crate::mesh::UnitDiskMesh;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate `(row, col)` entries.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(triplets.len());
        let mut val: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *val.last_mut().expect("entry") += v;
            } else {
                col.push(c);
                val.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, col, val }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k]];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.col[k] == i)
                    .map_or(0.0, |k| self.val[k])
            })
            .collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Principal submatrix on `keep` (indices in increasing order), with the
    /// mapping from old to new indices.
    pub fn restrict(&self, keep: &[usize]) -> (CsrMatrix, Vec<Option<usize>>) {
        let mut map = vec![None; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = Some(new);
        }
        let mut triplets = Vec::new();
        for (new_r, &old_r) in keep.iter().enumerate() {
            for k in self.row_ptr[old_r]..self.row_ptr[old_r + 1] {
                if let Some(new_c) = map[self.col[k]] {
                    triplets.push((new_r, new_c, self.val[k]));
                }
            }
        }
        (CsrMatrix::from_triplets(keep.len(), triplets), map)
    }
}

/// Scalar P1 stiffness `K_ij = ∫ ∇λ_i · ∇λ_j`.
pub fn stiffness(mesh: &UnitDiskMesh) -> CsrMatrix {
    let mut triplets = Vec::with_capacity(9 * mesh.triangle_count());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let g = mesh.shape_dz(t);
        let area = mesh.area(t);
        for a in 0..3 {
            for b in 0..3 {
                // ∇λ = 2·conj(∂_z λ) as a complex vector.
                let dot = 4.0 * (g[a].conj() * g[b]).re;
                triplets.push((tri[a], tri[b], area * dot));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.vertex_count(), triplets)
}

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for SPD `a`, starting from `x`.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<CgStats> {
    let n = a.n;
    let diag = a.diagonal();
    let inv: Vec<f64> = diag.iter().map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats { iterations: 0, relative_residual: 0.0 });
    }
    let mut r = vec![0.0; n];
    a.mul_vec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let res = r.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
        if res <= rel_tol {
            return Ok(CgStats { iterations: it, relative_residual: res });
        }
        a.mul_vec(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::SolverDiverged(res));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = r.iter().map(|v| v * v).sum::<f64>().sqrt() / b_norm;
    if res <= rel_tol {
        Ok(CgStats { iterations: max_iter, relative_residual: res })
    } else {
        Err(Error::SolverDiverged(res))
    }
}

/// `L Lᵀ` factorization stored row-wise over each row's envelope
/// (first nonzero column through the diagonal).
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let mut first = vec![0usize; n];
        for i in 0..n {
            let lo = (a.row_ptr[i]..a.row_ptr[i + 1]).map(|k| a.col[k]).filter(|&c| c <= i).min().unwrap_or(i);
            first[i] = lo;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let c = a.col[k];
                if c <= i {
                    data[start[i] + c - first[i]] = a.val[k];
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let mut s = data[start[i] + j - fi];
                let (ri, rj) = (start[i] - fi, start[j] - fj);
                for k in lo..j {
                    s -= data[ri + k] * data[rj + k];
                }
                if j == i {
                    if s <= 0.0 {
                        return Err(Error::SolverDiverged(s));
                    }
                    data[start[i] + i - fi] = s.sqrt();
                } else {
                    data[start[i] + j - fi] = s / data[start[j] + j - fj];
                }
            }
        }
        Ok(Self { first, start, data })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.first.len();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let mut s = b[i];
            for k in fi..i {
                s -= row[k - fi] * b[k];
            }
            b[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            b[i] /= row[i - fi];
            let bi = b[i];
            for k in fi..i {
                b[k] -= row[k - fi] * bi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interior_system(mesh: &UnitDiskMesh) -> CsrMatrix {
        let k = stiffness(mesh);
        let keep: Vec<usize> = mesh.interior_vertices().collect();
        k.restrict(&keep).0
    }

    #[test]
    fn stiffness_annihilates_constants_and_reproduces_area() {
        let mesh = UnitDiskMesh::build(5, 7).unwrap();
        let k = stiffness(&mesh);
        let ones = vec![1.0; mesh.vertex_count()];
        let mut y = vec![0.0; mesh.vertex_count()];
        k.mul_vec(&ones, &mut y);
        assert!(y.iter().all(|v| v.abs() < 1e-12));
        // ∫|∇x|² = area
        let x: Vec<f64> = mesh.vertices.iter().map(|z| z.re).collect();
        assert!((k.quadratic_form(&x) - mesh.total_area()).abs() < 1e-12);
    }

    #[test]
    fn cg_and_cholesky_agree() {
        let mesh = UnitDiskMesh::build(6, 6).unwrap();
        let a = interior_system(&mesh);
        let b: Vec<f64> = (0..a.n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let mut x = vec![0.0; a.n];
        let stats = conjugate_gradient(&a, &b, &mut x, 1e-12, 10_000).unwrap();
        assert!(stats.relative_residual <= 1e-12);
        let chol = EnvelopeCholesky::factor(&a).unwrap();
        let mut y = b.clone();
        chol.solve_in_place(&mut y);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-9 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(EnvelopeCholesky::factor(&a).is_err());
    }
}
