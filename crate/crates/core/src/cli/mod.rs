//! Scene files, the staged pipeline behind `hopflab run`, and report output.

mod svg;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::boundary::{
    douglas_energy, harmonic_extension, interior_point, sample_boundary, BoundaryFile, BoundaryMap, BoundarySpec,
};
use crate::energy::{jacobian_stats, jacobian_tolerance, minimize_admissible, MinimizerOutcome, MinimizerResult, SolverConfig};
use crate::error::{Error, Result};
use crate::gallery::GalleryMap;
use crate::hopf::{critical_points, hopf_product, HopfField, Orientation, TraceConfig, Tracer, TrajectorySegment};
use crate::mesh::{wirtinger, DiscreteMap, MeshId, UnitDiskMesh};
use crate::topology::{
    capacity, capacity_blowup_profile, default_fiber_radius, degree_equality_check, degree_in_preimage, disk_plate,
    image_grid, monotonicity_report, oscillation_decay_check, oscillation_profile,
};

pub use svg::{foliation_svg, map_svg};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Energy,
    Hopf,
    Trajectories,
    Degree,
    Monotonicity,
    Capacity,
    Oscillation,
}

impl Analysis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Analysis::Energy => "energy",
            Analysis::Hopf => "hopf",
            Analysis::Trajectories => "trajectories",
            Analysis::Degree => "degree",
            Analysis::Monotonicity => "monotonicity",
            Analysis::Capacity => "capacity",
            Analysis::Oscillation => "oscillation",
        }
    }
}

impl std::str::FromStr for Analysis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.trim().to_string()))
            .map_err(|_| Error::Parse(format!("unknown analysis `{s}`")))
    }
}

/// Which map the analyses look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MapSource {
    /// Poisson extension of the boundary values.
    #[default]
    Harmonic,
    /// Constrained energy minimizer with the boundary values as trace.
    Minimize,
    /// The gallery map itself, sampled at the vertices.
    Gallery,
}

/// A gallery name, an inline boundary description, or a path to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySource {
    Name(String),
    File { file: PathBuf },
    Inline(BoundaryFile),
}

impl BoundarySource {
    fn resolve(&self, base: &Path) -> Result<(BoundarySpec, Option<GalleryMap>)> {
        match self {
            BoundarySource::Name(name) => {
                let g: GalleryMap = name.parse()?;
                Ok((BoundarySpec::gallery(g.clone())?, Some(g)))
            }
            BoundarySource::File { file } => {
                let path = if file.is_absolute() { file.clone() } else { base.join(file) };
                let spec = BoundarySpec::load(&path)?;
                let g = gallery_of(&spec);
                Ok((spec, g))
            }
            BoundarySource::Inline(m) => {
                let spec = BoundarySpec::from_file_model(m)?;
                let g = gallery_of(&spec);
                Ok((spec, g))
            }
        }
    }
}

fn gallery_of(spec: &BoundarySpec) -> Option<GalleryMap> {
    match &spec.map {
        BoundaryMap::Gallery(g) => Some(g.clone()),
        BoundaryMap::Samples(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisSettings {
    /// Monotonicity grid is `grid × grid` over the image bounding box.
    pub grid: usize,
    pub fiber_radius: Option<f64>,
    /// Degree targets; defaults to the deepest point of the target polygon.
    pub degree_points: Vec<Complex64>,
    pub degree_radius: Option<f64>,
    /// Number of trajectory seeds; each is traced in both families.
    pub seeds: usize,
    pub trace: TraceConfig,
    pub critical_tol: f64,
    pub capacity_disk_r: f64,
    pub capacity_segment: Option<(f64, Vec<f64>)>,
    pub oscillation_centers: usize,
    pub oscillation_r: f64,
    pub oscillation_big_r: f64,
    pub oscillation_k: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            grid: 20,
            fiber_radius: None,
            degree_points: Vec::new(),
            degree_radius: None,
            seeds: 10,
            trace: TraceConfig::default(),
            critical_tol: crate::hopf::DEFAULT_CRITICAL_TOL,
            capacity_disk_r: (-1.0f64).exp(),
            capacity_segment: None,
            oscillation_centers: 20,
            oscillation_r: 0.1,
            oscillation_big_r: 0.4,
            oscillation_k: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub mesh: MeshId,
    pub boundary: BoundarySource,
    #[serde(default)]
    pub map: MapSource,
    #[serde(default)]
    pub solver: SolverConfig,
    pub analyses: Vec<Analysis>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub settings: AnalysisSettings,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("hopflab-out")
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let scene: SceneConfig = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.analyses.is_empty() {
            return Err(Error::InvalidArgument("scene requests no analyses".into()));
        }
        let mut seen = self.analyses.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("an analysis is requested twice".into()));
        }
        self.solver.validate()
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scene serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub scene_hash: String,
    /// Keyed by analysis name.
    pub analyses: BTreeMap<String, Value>,
    /// Analyses that missed an internal tolerance.
    pub failures: Vec<String>,
    /// Wall time per stage in seconds; the only non-deterministic field.
    pub timing: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// The report with timings removed, for comparisons.
    pub fn without_timing(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        v
    }
}

struct Stopwatch {
    timing: BTreeMap<String, f64>,
    last: Instant,
}

impl Stopwatch {
    fn new() -> Self {
        Self { timing: BTreeMap::new(), last: Instant::now() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timing.insert(stage.to_string(), (now - self.last).as_secs_f64());
        self.last = now;
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

/// Points of the disk `|z| ≤ radius` on a golden-angle spiral.
pub fn spiral_points(n: usize, radius: f64) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n).map(|k| Complex64::from_polar(radius * ((k as f64 + 0.5) / n as f64).sqrt(), k as f64 * golden)).collect()
}

struct Context<'a> {
    scene: &'a SceneConfig,
    mesh: UnitDiskMesh,
    spec: Option<BoundarySpec>,
    map: DiscreteMap,
    harmonic: Option<DiscreteMap>,
    minimizer: Option<MinimizerResult>,
    hopf: Option<HopfField>,
    trajectories: Vec<TrajectorySegment>,
}

/// Executes the scene, writing `report.json` and the requested figures into
/// the output directory.
pub fn run(scene: &SceneConfig, base_dir: &Path) -> Result<RunReport> {
    scene.validate()?;
    let mut clock = Stopwatch::new();
    let mesh = stage("mesh", UnitDiskMesh::build(scene.mesh.rings, scene.mesh.sectors))?;
    clock.lap("mesh");

    let (spec, gallery) = stage("boundary", scene.boundary.resolve(base_dir))?;
    let (map, spec, harmonic, minimizer) = match scene.map {
        MapSource::Gallery => {
            let g = gallery.ok_or_else(|| {
                Error::InvalidArgument("map source `gallery` needs a gallery boundary".into()).in_stage("boundary")
            })?;
            clock.lap("boundary");
            let map = stage("map", g.sample(&mesh))?;
            (map, Some(spec), None, None)
        }
        MapSource::Harmonic | MapSource::Minimize => {
            stage("boundary", spec.validate())?;
            let values = stage("boundary", sample_boundary(&spec, &mesh))?;
            clock.lap("boundary");
            let harmonic = stage("extension", harmonic_extension(&values, &mesh))?;
            clock.lap("extension");
            if scene.map == MapSource::Minimize {
                let result = stage("minimize", minimize_admissible(&values, &mesh, &scene.solver))?;
                clock.lap("minimize");
                (result.map.clone(), Some(spec), Some(harmonic), Some(result))
            } else {
                (harmonic.clone(), Some(spec), Some(harmonic), None)
            }
        }
    };

    let out_dir = if scene.output_dir.is_absolute() { scene.output_dir.clone() } else { base_dir.join(&scene.output_dir) };
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())).in_stage("output"))?;

    let mut ctx = Context { scene, mesh, spec, map, harmonic, minimizer, hopf: None, trajectories: Vec::new() };
    let mut analyses = BTreeMap::new();
    let mut failures = Vec::new();
    for &a in &scene.analyses {
        let (value, ok) = stage(a.as_str(), analyse(&mut ctx, a, &out_dir))?;
        clock.lap(a.as_str());
        if !ok {
            failures.push(a.as_str().to_string());
        }
        analyses.insert(a.as_str().to_string(), value);
    }
    let map_file = map_svg(&ctx.mesh, &ctx.map, 8, 16);
    write_file(&out_dir.join("map.svg"), &map_file)?;
    clock.lap("figures");

    let report = RunReport {
        tool: "hopflab".into(),
        version: VERSION.into(),
        scene_hash: scene.hash(),
        analyses,
        failures,
        timing: clock.timing,
    };
    let text = serde_json::to_string_pretty(&report)?;
    write_file(&out_dir.join("report.json"), &(text + "\n"))?;
    Ok(report)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())).in_stage("output"))
}

fn ensure_hopf(ctx: &mut Context<'_>) -> Result<()> {
    if ctx.hopf.is_none() {
        ctx.hopf = Some(hopf_product(&ctx.mesh, &wirtinger(&ctx.mesh, &ctx.map)?)?);
    }
    Ok(())
}

fn analyse(ctx: &mut Context<'_>, analysis: Analysis, out_dir: &Path) -> Result<(Value, bool)> {
    let settings = &ctx.scene.settings;
    match analysis {
        Analysis::Energy => {
            let field = wirtinger(&ctx.mesh, &ctx.map)?;
            let stats = jacobian_stats(&field);
            let trace = ctx.map.boundary_values(&ctx.mesh);
            let mut v = json!({
                "dirichlet": stats.dirichlet,
                "negative_jacobian_mass": stats.negative_jacobian_mass,
                "min_jacobian": stats.min_jacobian,
                "douglas_energy": douglas_energy(&trace),
            });
            let mut ok = true;
            if let Some(h) = &ctx.harmonic {
                let hf = wirtinger(&ctx.mesh, h)?;
                let hs = jacobian_stats(&hf);
                v["harmonic_dirichlet"] = json!(hs.dirichlet);
                v["harmonic_min_jacobian"] = json!(hs.min_jacobian);
                v["jacobian_tolerance"] = json!(jacobian_tolerance(&hf));
            }
            if let Some(m) = &ctx.minimizer {
                ok = m.outcome == MinimizerOutcome::Feasible;
                v["minimizer"] = json!({
                    "outcome": m.outcome,
                    "converged": m.converged,
                    "iterations": m.iterations,
                    "jacobian_tolerance": m.jacobian_tolerance,
                    "stages": m.stages,
                });
            }
            if let Some(spec) = &ctx.spec {
                v["min_interior_angle"] = json!(spec.min_interior_angle());
            }
            Ok((v, ok))
        }
        Analysis::Hopf => {
            ensure_hopf(ctx)?;
            let hopf = ctx.hopf.as_ref().expect("hopf computed");
            let (crit, zero) = match critical_points(hopf, &ctx.mesh, settings.critical_tol) {
                Ok(c) => (c, false),
                Err(Error::IdenticallyZero) => (Vec::new(), true),
                Err(e) => return Err(e),
            };
            Ok((
                json!({
                    "residual": hopf.residual,
                    "identically_zero": zero,
                    "critical_points": crit,
                }),
                true,
            ))
        }
        Analysis::Trajectories => {
            ensure_hopf(ctx)?;
            let hopf = ctx.hopf.as_ref().expect("hopf computed");
            let mut trace_cfg = settings.trace;
            trace_cfg.critical_tol = settings.critical_tol;
            let tracer = match Tracer::new(hopf, &ctx.mesh, trace_cfg) {
                Ok(t) => t,
                Err(Error::IdenticallyZero) => {
                    write_file(&out_dir.join("trajectories.csv"), TRAJECTORY_HEADER)?;
                    write_file(&out_dir.join("foliation.svg"), &foliation_svg(&[], &[]))?;
                    return Ok((json!({"identically_zero": true, "traced": 0}), true));
                }
                Err(e) => return Err(e),
            };
            let mut skipped = 0usize;
            let mut segments = Vec::new();
            for seed in spiral_points(settings.seeds, 0.85) {
                for orientation in [Orientation::Vertical, Orientation::Horizontal] {
                    match tracer.trace(seed, orientation) {
                        Ok(seg) => segments.push(seg),
                        Err(Error::SeedAtCriticalPoint(_)) | Err(Error::SeedOutside(_)) => skipped += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
            let mut terminations: BTreeMap<&str, usize> = BTreeMap::new();
            let mut distinct = 0usize;
            let mut both_boundary = 0usize;
            let mut worst_direction: f64 = 0.0;
            for seg in &segments {
                for t in seg.termination {
                    *terminations.entry(t.as_str()).or_default() += 1;
                }
                if let Ok(check) = crate::hopf::endpoint_distinctness(seg, &ctx.mesh) {
                    both_boundary += 1;
                    if check.distinct {
                        distinct += 1;
                    }
                }
                worst_direction = worst_direction.max(seg.max_direction_error(hopf, &ctx.mesh));
            }
            write_file(&out_dir.join("trajectories.csv"), &trajectory_csv(&segments))?;
            write_file(&out_dir.join("foliation.svg"), &foliation_svg(&segments, tracer.critical_points()))?;
            let v = json!({
                "traced": segments.len(),
                "skipped_seeds": skipped,
                "terminations": terminations,
                "boundary_to_boundary": both_boundary,
                "distinct_endpoints": distinct,
                "max_direction_error_degrees": worst_direction,
                "critical_points": tracer.critical_points(),
            });
            let ok = distinct == both_boundary;
            ctx.trajectories = segments;
            Ok((v, ok))
        }
        Analysis::Degree => {
            let r = settings.degree_radius.unwrap_or_else(|| default_fiber_radius(&ctx.mesh));
            let points = if settings.degree_points.is_empty() {
                let poly = match &ctx.spec {
                    Some(s) => s.target_polygon.clone(),
                    None => ctx.map.boundary_values(&ctx.mesh),
                };
                interior_point(&poly).into_iter().collect()
            } else {
                settings.degree_points.clone()
            };
            let mut rows = Vec::new();
            let mut ok = true;
            for y in points {
                match degree_in_preimage(&ctx.mesh, &ctx.map, y, r) {
                    Ok(rep) => {
                        let comps: Vec<Value> = rep
                            .components
                            .iter()
                            .map(|c| {
                                if let Some(w) = c.degree_winding {
                                    ok &= (w as f64 - c.degree_jacobian).abs() <= 0.1;
                                }
                                json!({
                                    "triangles": c.triangle_ids.len(),
                                    "degree_winding": c.degree_winding,
                                    "degree_jacobian": c.degree_jacobian,
                                    "closure_meets_boundary": c.closure_meets_boundary,
                                })
                            })
                            .collect();
                        let mut row = json!({"y": y, "radius": r, "total_degree": rep.total_degree, "components": comps});
                        if let (Some(h), Some(_)) = (&ctx.harmonic, &ctx.minimizer) {
                            let eq = degree_equality_check(&ctx.mesh, &ctx.map, h, y, r)?;
                            ok &= eq.equal;
                            row["harmonic_extension_degree"] = json!(eq.extension_degree);
                        }
                        rows.push(row);
                    }
                    Err(Error::BoundaryAdjacent) => rows.push(json!({"y": y, "radius": r, "boundary_adjacent": true})),
                    Err(e) => return Err(e),
                }
            }
            Ok((json!({ "points": rows }), ok))
        }
        Analysis::Monotonicity => {
            let r = settings.fiber_radius.unwrap_or_else(|| default_fiber_radius(&ctx.mesh));
            let grid = image_grid(&ctx.mesh, &ctx.map, settings.grid, r)?;
            let rep = monotonicity_report(&ctx.mesh, &ctx.map, &grid, r)?;
            let multi: Vec<Value> = rep
                .samples
                .iter()
                .filter(|s| s.component_count > 1)
                .map(|s| json!({"y": s.y, "components": s.component_count}))
                .collect();
            Ok((
                json!({
                    "fiber_radius": r,
                    "samples": rep.samples.len(),
                    "max_components": rep.max_components,
                    "verdict": rep.verdict,
                    "min_jacobian": rep.min_jacobian,
                    "multi_component_fibers": multi,
                }),
                true,
            ))
        }
        Analysis::Capacity => {
            let radius = settings.capacity_disk_r;
            let plate = disk_plate(&ctx.mesh, radius);
            let cap = capacity(&ctx.mesh, &plate)?;
            let mut v = json!({
                "disk_radius": radius,
                "plate_triangles": plate.len(),
                "capacity": cap,
                "continuum": 2.0 * PI / (1.0 / radius).ln(),
            });
            let mut ok = true;
            if let Some((a, eps)) = &settings.capacity_segment {
                let profile = capacity_blowup_profile(&ctx.mesh, *a, eps)?;
                ok = profile.windows(2).all(|w| w[1] > w[0]);
                v["segment"] = json!({"a": a, "eps": eps, "capacities": profile, "increasing": ok});
            }
            Ok((v, ok))
        }
        Analysis::Oscillation => {
            let (r, big_r, k) = (settings.oscillation_r, settings.oscillation_big_r, settings.oscillation_k);
            let centres = spiral_points(settings.oscillation_centers, (1.0 - big_r) * 0.95);
            let mut checks = Vec::new();
            let mut ok = true;
            for c in centres {
                let chk = oscillation_decay_check(&ctx.mesh, &ctx.map, c, r, big_r, k)?;
                ok &= chk.passes;
                checks.push(json!({"center": c, "lhs": chk.lhs, "rhs": chk.rhs, "passes": chk.passes}));
            }
            let radii: Vec<f64> =
                [0.2, 0.4, 0.6].into_iter().filter(|&x| x >= ctx.mesh.median_diameter()).collect();
            let profile = oscillation_profile(&ctx.mesh, &ctx.map, Complex64::new(0.0, 0.0), &radii)?;
            let profile: Vec<Value> = profile
                .iter()
                .map(|s| json!({"radius": s.radius, "osc_ball": s.osc_ball, "osc_circle": s.osc_circle, "ratio": finite_or_null(s.ratio())}))
                .collect();
            Ok((json!({"r": r, "R": big_r, "K": k, "decay_checks": checks, "profile_at_origin": profile}), ok))
        }
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

const TRAJECTORY_HEADER: &str = "seed_re,seed_im,orientation,point_index,x,y,termination\n";

/// One row per polyline point; the termination column names the end the
/// point's half-trajectory ran into.
pub fn trajectory_csv(segments: &[TrajectorySegment]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    for seg in segments {
        let seed_index = seg.points.iter().position(|p| *p == seg.seed).unwrap_or(0);
        for (i, p) in seg.points.iter().enumerate() {
            let term = if i < seed_index { seg.termination[0] } else { seg.termination[1] };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                seg.seed.re,
                seg.seed.im,
                seg.orientation,
                i,
                p.re,
                p.im,
                term.as_str()
            );
        }
    }
    out
}
