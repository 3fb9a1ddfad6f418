//! Dirichlet energy, Jacobian statistics, and minimization of the energy over
//! piecewise-linear maps with fixed trace and nonnegative Jacobian.
//!
//! The constraint `J ≥ 0` is enforced by the one-sided penalty
//! `μ Σ area·max(0, -J)²`, which admits `J = 0` on sets of positive area.
//! The weight `μ` is raised geometrically, warm-starting every stage.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{harmonic_extension, trace_winding};
use crate::error::{Error, Result};
use crate::linalg::{stiffness, CsrMatrix, EnvelopeCholesky};
use crate::mesh::{triangle_differential, wirtinger, DiscreteMap, UnitDiskMesh, WirtingerField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    pub negative_jacobian_mass: f64,
    pub min_jacobian: f64,
    pub penalty_weight: f64,
}

/// `Σ area · 2(|h_z|² + |h_z̄|²)`.
pub fn dirichlet_energy(field: &WirtingerField) -> f64 {
    field.records.iter().map(|r| r.area * r.stretch_sq()).sum()
}

pub fn jacobian_stats(field: &WirtingerField) -> EnergyBreakdown {
    let mut mass = 0.0;
    let mut min_j = f64::INFINITY;
    for r in &field.records {
        let neg = (-r.jacobian).max(0.0);
        mass += r.area * neg * neg;
        min_j = min_j.min(r.jacobian);
    }
    EnergyBreakdown { dirichlet: dirichlet_energy(field), negative_jacobian_mass: mass, min_jacobian: min_j, penalty_weight: 0.0 }
}

/// Dirichlet energy of the Poisson extension sampled at the vertices, the
/// continuum unconstrained minimizer. The discrete minimum can sit slightly
/// below it.
pub fn unconstrained_minimizer_energy(boundary_values: &[Complex64], mesh: &UnitDiskMesh) -> Result<f64> {
    let h = harmonic_extension(boundary_values, mesh)?;
    Ok(dirichlet_energy(&wirtinger(mesh, &h)?))
}

/// How the descent direction is preconditioned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    /// Diagonal of the Dirichlet stiffness.
    Diagonal,
    /// The full interior Dirichlet stiffness, factored once.
    #[default]
    Stiffness,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub penalty_start: f64,
    pub penalty_factor: f64,
    pub penalty_max: f64,
    pub tol_energy: f64,
    pub max_iters: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            penalty_start: 1.0,
            penalty_factor: 10.0,
            penalty_max: 1e8,
            tol_energy: 1e-9,
            max_iters: 100_000,
            preconditioner: Preconditioner::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.penalty_start > 0.0 && self.penalty_factor > 1.0 && self.penalty_max >= self.penalty_start) {
            return Err(Error::InvalidArgument("penalty schedule must be positive and increasing".into()));
        }
        if !(self.tol_energy > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidArgument("tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }

    pub fn schedule(&self) -> Vec<f64> {
        let mut out = vec![self.penalty_start];
        while let Some(&last) = out.last() {
            let next = last * self.penalty_factor;
            if next > self.penalty_max * (1.0 + 1e-12) {
                break;
            }
            out.push(next);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimizerOutcome {
    /// `min J ≥ -jacobian_tolerance` at the end of a penalty stage.
    Feasible,
    /// The iteration cap or the end of the schedule was reached while the
    /// constraint was still violated.
    Infeasible,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageSummary {
    pub penalty_weight: f64,
    pub iterations: usize,
    pub dirichlet: f64,
    pub negative_jacobian_mass: f64,
    pub min_jacobian: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimizerResult {
    pub map: DiscreteMap,
    /// Composite objective after every accepted step.
    pub energy_history: Vec<f64>,
    /// Penalty weight in force at each entry of `energy_history`.
    pub penalty_schedule: Vec<f64>,
    pub stages: Vec<StageSummary>,
    pub converged: bool,
    pub outcome: MinimizerOutcome,
    pub iterations: usize,
    pub jacobian_tolerance: f64,
    pub breakdown: EnergyBreakdown,
}

/// `1e-6 ×` the median positive triangle Jacobian of `h` (1 if none).
pub fn jacobian_tolerance(field: &WirtingerField) -> f64 {
    let mut pos: Vec<f64> = field.records.iter().map(|r| r.jacobian).filter(|j| *j > 0.0).collect();
    if pos.is_empty() {
        return 1e-6;
    }
    pos.sort_by(|a, b| a.total_cmp(b));
    1e-6 * pos[pos.len() / 2]
}

/// The penalized objective `E[h] + μ Σ area·max(0, -J)²` with its gradient
/// with respect to the real and imaginary parts of every vertex value.
pub struct PenalizedObjective<'a> {
    mesh: &'a UnitDiskMesh,
    pub penalty_weight: f64,
}

impl<'a> PenalizedObjective<'a> {
    pub fn new(mesh: &'a UnitDiskMesh, penalty_weight: f64) -> Self {
        Self { mesh, penalty_weight }
    }

    pub fn value(&self, values: &[Complex64]) -> f64 {
        let mu = self.penalty_weight;
        let per: Vec<f64> = (0..self.mesh.triangle_count())
            .into_par_iter()
            .map(|t| {
                let d = triangle_differential(self.mesh, t, values);
                let neg = (-d.jacobian).max(0.0);
                d.area * (d.stretch_sq() + mu * neg * neg)
            })
            .collect();
        per.iter().sum()
    }

    /// Returns the value and writes `∂/∂x + i ∂/∂y` per vertex into `grad`.
    pub fn value_and_gradient(&self, values: &[Complex64], grad: &mut [Complex64]) -> f64 {
        let mu = self.penalty_weight;
        let mesh = self.mesh;
        let per: Vec<(f64, [Complex64; 3])> = (0..mesh.triangle_count())
            .into_par_iter()
            .map(|t| {
                let d = triangle_differential(mesh, t, values);
                let g = mesh.shape_dz(t);
                let neg = (-d.jacobian).max(0.0);
                let value = d.area * (d.stretch_sq() + mu * neg * neg);
                let mut out = [Complex64::new(0.0, 0.0); 3];
                for (k, gk) in g.iter().enumerate() {
                    // 2 ∂/∂h̄_v of |h_z|² and |h_z̄|² are 2 h_z ḡ and 2 h_z̄ g.
                    let dz = d.hz * gk.conj();
                    let dzbar = d.hzbar * gk;
                    let dirichlet = 4.0 * d.area * (dz + dzbar);
                    let jac = 2.0 * (dz - dzbar);
                    out[k] = dirichlet - 2.0 * mu * d.area * neg * jac;
                }
                (value, out)
            })
            .collect();
        grad.iter_mut().for_each(|g| *g = Complex64::new(0.0, 0.0));
        let mut total = 0.0;
        for (t, (value, g)) in per.iter().enumerate() {
            total += value;
            let tri = mesh.triangles[t];
            for k in 0..3 {
                grad[tri[k]] += g[k];
            }
        }
        total
    }
}

enum Precond {
    Diagonal(Vec<f64>),
    Stiffness { chol: EnvelopeCholesky, scratch_re: Vec<f64>, scratch_im: Vec<f64> },
}

impl Precond {
    fn build(kind: Preconditioner, stiff: &CsrMatrix, free: &[usize]) -> Result<Self> {
        let (restricted, _) = stiff.restrict(free);
        match kind {
            Preconditioner::Diagonal => Ok(Precond::Diagonal(restricted.diagonal().iter().map(|d| 2.0 * d).collect())),
            Preconditioner::Stiffness => {
                let chol = EnvelopeCholesky::factor(&restricted)?;
                Ok(Precond::Stiffness { chol, scratch_re: vec![0.0; free.len()], scratch_im: vec![0.0; free.len()] })
            }
        }
    }

    /// `direction = -P⁻¹ grad` on the free vertices.
    fn apply(&mut self, grad: &[Complex64], free: &[usize], direction: &mut [Complex64]) {
        match self {
            Precond::Diagonal(diag) => {
                for (k, &v) in free.iter().enumerate() {
                    direction[k] = -grad[v] / diag[k];
                }
            }
            Precond::Stiffness { chol, scratch_re, scratch_im } => {
                for (k, &v) in free.iter().enumerate() {
                    scratch_re[k] = grad[v].re;
                    scratch_im[k] = grad[v].im;
                }
                chol.solve_in_place(scratch_re);
                chol.solve_in_place(scratch_im);
                for k in 0..free.len() {
                    // The Dirichlet Hessian is 2K per component.
                    direction[k] = -Complex64::new(scratch_re[k], scratch_im[k]) * 0.5;
                }
            }
        }
    }
}

const ARMIJO_C: f64 = 1e-4;
const STALL_WINDOW: usize = 10;
const MIN_STEP: f64 = 1e-20;

/// Minimizes the penalized energy with the trace pinned to
/// `boundary_values`, starting from the harmonic extension.
pub fn minimize_admissible(
    boundary_values: &[Complex64],
    mesh: &UnitDiskMesh,
    config: &SolverConfig,
) -> Result<MinimizerResult> {
    config.validate()?;
    let winding = trace_winding(boundary_values)?;
    if winding != 1 {
        return Err(Error::Orientation(winding));
    }
    let initial = harmonic_extension(boundary_values, mesh)?;
    let tol_j = jacobian_tolerance(&wirtinger(mesh, &initial)?);
    minimize_from(initial, mesh, config, tol_j)
}

/// Penalty continuation from an arbitrary starting map; the trace of `start`
/// is kept bit-for-bit.
pub fn minimize_from(
    start: DiscreteMap,
    mesh: &UnitDiskMesh,
    config: &SolverConfig,
    jacobian_tolerance: f64,
) -> Result<MinimizerResult> {
    config.validate()?;
    start.check_mesh(mesh)?;
    let free: Vec<usize> = mesh.interior_vertices().collect();
    let stiff = stiffness(mesh);
    let mut precond = Precond::build(config.preconditioner, &stiff, &free)?;

    let mut values = start.values.clone();
    let mut trial = values.clone();
    let mut grad = vec![Complex64::new(0.0, 0.0); values.len()];
    let mut direction = vec![Complex64::new(0.0, 0.0); free.len()];

    let mut energy_history = Vec::new();
    let mut penalty_schedule = Vec::new();
    let mut stages = Vec::new();
    let mut iterations = 0usize;
    let mut feasible = false;

    'stages: for mu in config.schedule() {
        let objective = PenalizedObjective::new(mesh, mu);
        let mut f = objective.value_and_gradient(&values, &mut grad);
        let mut step = 1.0f64;
        let mut stage_iters = 0usize;
        let mut window: std::collections::VecDeque<f64> = std::collections::VecDeque::from([f]);
        loop {
            if iterations >= config.max_iters {
                stages.push(stage_summary(mesh, &values, mu, stage_iters)?);
                break 'stages;
            }
            precond.apply(&grad, &free, &mut direction);
            let slope: f64 = free.iter().zip(&direction).map(|(&v, d)| (grad[v].conj() * d).re).sum();
            if !(slope < 0.0) {
                break;
            }
            let mut t = (2.0 * step).min(1.0);
            let accepted = loop {
                for (k, &v) in free.iter().enumerate() {
                    trial[v] = values[v] + direction[k] * t;
                }
                let ft = objective.value(&trial);
                if ft <= f + ARMIJO_C * t * slope && ft < f {
                    break Some(ft);
                }
                t *= 0.5;
                if t < MIN_STEP {
                    break None;
                }
            };
            let Some(_) = accepted else { break };
            step = t;
            std::mem::swap(&mut values, &mut trial);
            f = objective.value_and_gradient(&values, &mut grad);
            iterations += 1;
            stage_iters += 1;
            energy_history.push(f);
            penalty_schedule.push(mu);
            window.push_back(f);
            if window.len() > STALL_WINDOW + 1 {
                window.pop_front();
            }
            if window.len() == STALL_WINDOW + 1 {
                let old = window[0];
                if (old - f).abs() <= config.tol_energy * old.abs().max(f64::MIN_POSITIVE) {
                    break;
                }
            }
        }
        let summary = stage_summary(mesh, &values, mu, stage_iters)?;
        let done = summary.min_jacobian >= -jacobian_tolerance;
        stages.push(summary);
        if done {
            feasible = true;
            break;
        }
    }
    // keep the trace exactly
    for &b in &mesh.boundary_loop {
        values[b] = start.values[b];
    }
    let map = DiscreteMap::new(mesh, values)?;
    let field = wirtinger(mesh, &map)?;
    let mut breakdown = jacobian_stats(&field);
    breakdown.penalty_weight = stages.last().map_or(0.0, |s| s.penalty_weight);
    if !feasible && breakdown.min_jacobian >= -jacobian_tolerance {
        feasible = true;
    }
    Ok(MinimizerResult {
        map,
        energy_history,
        penalty_schedule,
        stages,
        converged: feasible,
        outcome: if feasible { MinimizerOutcome::Feasible } else { MinimizerOutcome::Infeasible },
        iterations,
        jacobian_tolerance,
        breakdown,
    })
}

fn stage_summary(mesh: &UnitDiskMesh, values: &[Complex64], mu: f64, iterations: usize) -> Result<StageSummary> {
    let map = DiscreteMap::new(mesh, values.to_vec())?;
    let stats = jacobian_stats(&wirtinger(mesh, &map)?);
    Ok(StageSummary {
        penalty_weight: mu,
        iterations,
        dirichlet: stats.dirichlet,
        negative_jacobian_mass: stats.negative_jacobian_mass,
        min_jacobian: stats.min_jacobian,
    })
}
